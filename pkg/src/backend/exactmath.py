"""
Exact arithmetic kernels
Polinômios inteiros, fatoração mod p, formas normais de matrizes inteiras,
redução LLL e enumeração de vetores curtos (Fincke-Pohst).
Tudo em inteiros/racionais de precisão arbitrária.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from sympy import Matrix, Poly, Symbol, divisors, isprime
from sympy.core.random import seed as _seed_sympy_rng
from sympy.matrices.normalforms import hermite_normal_form as _sympy_hnf
from sympy.polys.domains import QQ, ZZ
from sympy.polys.galoistools import (
    gf_ddf_zassenhaus,
    gf_edf_zassenhaus,
    gf_from_int_poly,
    gf_monic,
    gf_sqf_list,
)
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMRankError


X = Symbol('x')

GramLike = Sequence[Sequence[Union[int, Fraction]]]


class DomainError(ValueError):
    """Input outside the domain of an exact kernel"""


# ---------------------------------------------------------------------------
# Tipos
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial, coefficients lowest degree first (trailing zeros stripped)"""

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        coeffs = [int(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, 'coeffs', tuple(coeffs))

    @classmethod
    def from_high(cls, coeffs: Sequence[int]) -> 'IntPoly':
        """Build from coefficients listed highest degree first (galoistools order)"""
        return cls(tuple(reversed([int(c) for c in coeffs])))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def high_first(self) -> List[int]:
        return list(reversed(self.coeffs))

    def derivative(self) -> 'IntPoly':
        return IntPoly(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def __call__(self, x):
        value = 0
        for c in reversed(self.coeffs):
            value = value * x + c
        return value

    def to_sympy(self) -> Poly:
        return Poly(self.high_first() or [0], X, domain='ZZ')

    def __str__(self) -> str:
        if not self.coeffs:
            return '0'
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = '' if i == 0 else ('x' if i == 1 else f'x^{i}')
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f'{abs(c)}{mono}'
            sign = '-' if c < 0 else '+'
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        text = ('-' if first_sign == '-' else '') + first_body
        for sign, body in terms[1:]:
            text += f' {sign} {body}'
        return text


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix, row-major"""

    rows: int
    cols: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if self.rows < 0 or self.cols < 0 or len(entries) != self.rows * self.cols:
            raise DomainError(
                f"IntMatrix {self.rows}x{self.cols} needs {self.rows * self.cols} entries, got {len(entries)}"
            )
        object.__setattr__(self, 'entries', entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> 'IntMatrix':
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise DomainError("ragged rows")
        return cls(len(rows), cols, tuple(e for r in rows for e in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: Optional[int] = None) -> 'IntMatrix':
        columns = [list(c) for c in columns]
        if rows is None:
            rows = len(columns[0]) if columns else 0
        return cls.from_rows([[c[i] for c in columns] for i in range(rows)], cols=len(columns))

    @classmethod
    def identity(cls, n: int) -> 'IntMatrix':
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'IntMatrix':
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def from_sympy(cls, M: Matrix) -> 'IntMatrix':
        return cls(M.rows, M.cols, tuple(int(e) for e in M))

    def __getitem__(self, ij: Tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> List[List[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> List[Tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> 'IntMatrix':
        return IntMatrix.from_rows([list(self.column(j)) for j in range(self.cols)], cols=self.rows)

    def __matmul__(self, other: 'IntMatrix') -> 'IntMatrix':
        if self.cols != other.rows:
            raise DomainError("shape mismatch in product")
        cols = other.columns()
        return IntMatrix.from_rows(
            [[sum(a * b for a, b in zip(self.row(i), c)) for c in cols] for i in range(self.rows)],
            cols=other.cols,
        )

    def to_sympy(self) -> Matrix:
        return Matrix(self.rows, self.cols, list(self.entries))

    def det(self) -> int:
        if self.rows != self.cols:
            raise DomainError("determinant of a non-square matrix")
        if self.rows == 0:
            return 1
        return int(self.to_sympy().det(method='bareiss'))

    def is_diagonal(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j)

    def diagonal(self) -> List[int]:
        return [self[i, i] for i in range(min(self.rows, self.cols))]


@dataclass(frozen=True)
class RationalPoint2:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'x', Fraction(self.x))
        object.__setattr__(self, 'y', Fraction(self.y))


# ---------------------------------------------------------------------------
# Polinômios
# ---------------------------------------------------------------------------

def poly_discriminant(f: IntPoly) -> int:
    """
    Discriminant through the resultant with the derivative

    Parameters:
    -----------
    f : IntPoly
        Polynomial of degree >= 1

    Returns:
    --------
    int
        (-1)^{n(n-1)/2} Res(f, f') / lc(f)
    """
    if f.degree < 1:
        raise DomainError(f"discriminant needs degree >= 1, got {f}")
    n = f.degree
    P = f.to_sympy()
    res = int(P.resultant(P.diff(X)))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * res // f.leading


def factor_mod_p(f: IntPoly, p: int) -> List[Tuple[IntPoly, int]]:
    """
    Monic irreducible factors of f over GF(p) with multiplicities.

    Square-free split, then distinct-degree and equal-degree (Cantor-Zassenhaus)
    splitting. Factors come back with coefficients in [0, p), sorted by
    (degree, coefficients).
    """
    if not isprime(p):
        raise DomainError(f"{p} is not prime")
    F = gf_from_int_poly(f.high_first(), p)
    if not F:
        raise DomainError(f"{f} vanishes mod {p}")
    _, F = gf_monic(F, p, ZZ)
    if len(F) == 1:
        return []

    # semente fixa: o caminho aleatório do EDF fica reprodutível
    _seed_sympy_rng(p)
    factors = []
    _, sqf_parts = gf_sqf_list(F, p, ZZ)
    for part, mult in sqf_parts:
        for block, degree in gf_ddf_zassenhaus(part, p, ZZ):
            for g in gf_edf_zassenhaus(block, degree, p, ZZ):
                factors.append((IntPoly.from_high([int(c) % p for c in g]), mult))

    factors.sort(key=lambda item: (item[0].degree, item[0].coeffs, item[1]))
    return factors


def integer_roots(f: IntPoly) -> List[int]:
    """All integer roots of a nonzero integer polynomial, ascending"""
    if f.is_zero():
        raise DomainError("every integer is a root of the zero polynomial")
    roots = set()
    coeffs = list(f.coeffs)
    if coeffs[0] == 0:
        roots.add(0)
        while coeffs[0] == 0:
            coeffs.pop(0)
    reduced = IntPoly(tuple(coeffs))
    if reduced.degree >= 1:
        for d in divisors(abs(coeffs[0])):
            for candidate in (int(d), -int(d)):
                if reduced(candidate) == 0:
                    roots.add(candidate)
    return sorted(roots)


# ---------------------------------------------------------------------------
# Formas normais
# ---------------------------------------------------------------------------

def _swap_rows(A, U, i, j):
    if i != j:
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]


def _swap_columns(A, V, i, j):
    if i != j:
        for M in (A, V):
            for r in M:
                r[i], r[j] = r[j], r[i]


def _add_row(A, U, target, source, factor):
    # row[target] += factor * row[source]
    for M in (A, U):
        src = M[source]
        M[target] = [a + factor * b for a, b in zip(M[target], src)]


def _add_column(A, V, target, source, factor):
    for M in (A, V):
        for r in M:
            r[target] += factor * r[source]


def _least_entry(A, t):
    best = None
    for i in range(t, len(A)):
        row = A[i]
        for j in range(t, len(row)):
            e = row[j]
            if e and (best is None or abs(e) < best[0]):
                best = (abs(e), i, j)
                if best[0] == 1:
                    return best[1], best[2]
    return None if best is None else (best[1], best[2])


def smith_normal_form(M: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """
    Smith normal form with transforms: U·M·V = D.

    Elementary row/column operations with a least-absolute-value pivot at
    every stage (keeps the transforms small on sparse relation matrices).

    Returns:
    --------
    (D, U, V)
        D diagonal, d1 | d2 | ..., nonzero entries positive; U, V unimodular
    """
    m, n = M.rows, M.cols
    A = M.to_rows()
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    t = 0
    while t < min(m, n):
        spot = _least_entry(A, t)
        if spot is None:
            break
        _swap_rows(A, U, t, spot[0])
        _swap_columns(A, V, t, spot[1])

        while True:
            pivot = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // pivot
                    if q:
                        _add_row(A, U, i, t, -q)
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // pivot
                    if q:
                        _add_column(A, V, j, t, -q)
                    dirty = dirty or A[t][j] != 0

            if dirty:
                # menor resto na borda vira o novo pivô
                best = None
                for i in range(t + 1, m):
                    if A[i][t] and (best is None or abs(A[i][t]) < best[0]):
                        best = (abs(A[i][t]), 'row', i)
                for j in range(t + 1, n):
                    if A[t][j] and (best is None or abs(A[t][j]) < best[0]):
                        best = (abs(A[t][j]), 'col', j)
                if best[1] == 'row':
                    _swap_rows(A, U, t, best[2])
                else:
                    _swap_columns(A, V, t, best[2])
                continue

            offender = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % pivot:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            _add_row(A, U, t, offender, 1)

        if A[t][t] < 0:
            A[t] = [-e for e in A[t]]
            U[t] = [-e for e in U[t]]
        t += 1

    return (IntMatrix.from_rows(A, cols=n),
            IntMatrix.from_rows(U, cols=m),
            IntMatrix.from_rows(V, cols=n))


def hermite_normal_form(M: IntMatrix, det_multiple: Optional[int] = None) -> IntMatrix:
    """
    Column-style HNF (upper triangular, entries right of each pivot reduced mod the pivot).

    det_multiple, when known to be a multiple of the lattice determinant of a
    full-rank input, switches sympy to the modular algorithm.
    """
    if M.rows == 0 or M.cols == 0 or not any(M.entries):
        return IntMatrix(M.rows, 0, ())
    if det_multiple:
        W = _sympy_hnf(M.to_sympy(), D=int(abs(det_multiple)), check_rank=True)
    else:
        W = _sympy_hnf(M.to_sympy())
    return IntMatrix.from_sympy(W)


# ---------------------------------------------------------------------------
# Redução de reticulados
# ---------------------------------------------------------------------------

def _fraction_matrix(gram: GramLike) -> List[List[Fraction]]:
    G = [[Fraction(e) for e in row] for row in gram]
    n = len(G)
    if any(len(row) != n for row in G):
        raise DomainError("Gram matrix must be square")
    for i in range(n):
        for j in range(i):
            if G[i][j] != G[j][i]:
                raise DomainError("Gram matrix must be symmetric")
    return G


def _gram_schmidt(G: List[List[Fraction]]) -> Tuple[List[List[Fraction]], List[Fraction]]:
    n = len(G)
    mu = [[Fraction(0)] * n for _ in range(n)]
    bstar: List[Fraction] = []
    for i in range(n):
        for j in range(i):
            s = G[i][j] - sum((mu[j][k] * mu[i][k] * bstar[k] for k in range(j)), Fraction(0))
            mu[i][j] = s / bstar[j]
        b = G[i][i] - sum((mu[i][k] ** 2 * bstar[k] for k in range(i)), Fraction(0))
        if b <= 0:
            raise DomainError("Gram matrix is not positive definite (dependent basis)")
        bstar.append(b)
    return mu, bstar


def congruent_gram(T: Sequence[Sequence[int]], G: GramLike) -> List[List[Fraction]]:
    """T·G·Tᵀ for a transform whose rows are coordinate vectors"""
    G = [[Fraction(e) for e in row] for row in G]
    TG = [[sum((t * G[k][j] for k, t in enumerate(row)), Fraction(0)) for j in range(len(G))]
          for row in T]
    return [[sum((a * b for a, b in zip(TG[i], T[j])), Fraction(0)) for j in range(len(T))]
            for i in range(len(T))]


def lll_reduce_gram(gram: GramLike,
                    delta: Fraction = Fraction(3, 4)) -> Tuple[List[List[Fraction]], IntMatrix]:
    """
    LLL on a rational Gram matrix.

    Returns:
    --------
    (reduced_gram, T)
        T unimodular, rows are the reduced basis in the input coordinates,
        reduced_gram = T·G·Tᵀ
    """
    G0 = _fraction_matrix(gram)
    n = len(G0)
    T = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    G = G0
    mu, bstar = _gram_schmidt(G)

    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                T[k] = [a - q * b for a, b in zip(T[k], T[j])]
                G = congruent_gram(T, G0)
                mu, bstar = _gram_schmidt(G)
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            T[k], T[k - 1] = T[k - 1], T[k]
            G = congruent_gram(T, G0)
            mu, bstar = _gram_schmidt(G)
            k = max(k - 1, 1)

    return G, IntMatrix.from_rows(T, cols=n)


def lll_reduce(basis: Union[IntMatrix, GramLike], delta: Fraction = Fraction(3, 4)) -> IntMatrix:
    """
    LLL reduction (δ = 3/4 by default).

    Parameters:
    -----------
    basis : IntMatrix or Gram matrix
        IntMatrix: rows are the basis vectors, reduced with sympy's exact LLL.
        Gram data (rational entries): reduced in Gram form.

    Returns:
    --------
    IntMatrix
        For an IntMatrix input, the reduced basis rows. For Gram input, the
        unimodular transform whose rows are the reduced vectors in the
        original coordinates.
    """
    if isinstance(basis, IntMatrix):
        if basis.rows == 0:
            return basis
        dM = DomainMatrix([[ZZ(e) for e in row] for row in basis.to_rows()],
                          (basis.rows, basis.cols), ZZ)
        try:
            reduced = dM.lll(delta=QQ(delta.numerator, delta.denominator))
        except DMRankError as exc:
            raise DomainError(f"dependent basis: {exc}") from exc
        return IntMatrix.from_rows([[int(e) for e in row] for row in reduced.to_list()],
                                   cols=basis.cols)
    return lll_reduce_gram(basis, delta)[1]


def _completed_square(G: List[List[Fraction]]) -> List[List[Fraction]]:
    # Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
    n = len(G)
    Q = [row[:] for row in G]
    for i in range(n):
        if Q[i][i] <= 0:
            raise DomainError("Gram matrix is not positive definite")
        for j in range(i + 1, n):
            Q[j][i] = Q[i][j]
            Q[i][j] = Q[i][j] / Q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                Q[k][l] -= Q[k][i] * Q[i][l]
    return Q


def enumerate_short_vectors(gram: GramLike, bound) -> Iterator[Tuple[int, ...]]:
    """
    Fincke-Pohst: every nonzero v with vᵀGv <= bound, once up to sign.

    The emitted representative has its last nonzero coordinate positive.
    Exact rational arithmetic throughout.
    """
    G = _fraction_matrix(gram)
    n = len(G)
    bound = Fraction(bound)
    if n == 0 or bound <= 0:
        return
    Q = _completed_square(G)
    x = [0] * n

    def search(i: int, remaining: Fraction):
        center = -sum((Q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        qi = Q[i][i]
        reach = math.isqrt(math.floor(remaining / qi)) + 1
        for xi in range(math.floor(center) - reach, math.ceil(center) + reach + 1):
            used = qi * (xi - center) ** 2
            if used > remaining:
                continue
            x[i] = xi
            if i == 0:
                yield tuple(x)
            else:
                yield from search(i - 1, remaining - used)
        x[i] = 0

    for v in search(n - 1, bound):
        last = next((c for c in reversed(v) if c), 0)
        if last > 0:
            yield v


def quadratic_value(gram: GramLike, v: Sequence[int]) -> Fraction:
    """vᵀ·G·v"""
    return sum((Fraction(gram[i][j]) * v[i] * v[j]
                for i in range(len(v)) for j in range(len(v))), Fraction(0))


def is_positive_definite(gram: GramLike) -> bool:
    """Exact test through the rational LDLᵀ (completed squares)"""
    try:
        _completed_square(_fraction_matrix(gram))
    except DomainError:
        return False
    return True
