"""
Cubic fields Q[x]/(f) with maximal monogenic order Z[alpha]
Imersões validadas (mpmath.iv), aritmética de ideais em HNF por colunas,
decomposição de primos, normas e cota de Minkowski.

Elementos são triplas inteiras (x, y, z) = x + y alpha + z alpha^2 na base
de potências; como Z[alpha] é maximal, essa é uma base inteira do anel de
inteiros e todos os ideais vivem nela.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from mpmath import iv
from sympy import Matrix, Poly, isprime

try:
    from .cubic_forms import MonicCubic, is_maximal
    from .exactmath import (
        DomainError,
        IntMatrix,
        IntPoly,
        X,
        factor_mod_p,
        hermite_normal_form,
        is_positive_definite,
    )
    from .intervals import endpoints, hull, interval_precision, upper_fraction
except ImportError:
    from cubic_forms import MonicCubic, is_maximal
    from exactmath import (
        DomainError,
        IntMatrix,
        IntPoly,
        X,
        factor_mod_p,
        hermite_normal_form,
        is_positive_definite,
    )
    from intervals import endpoints, hull, interval_precision, upper_fraction


DEFAULT_PRECISION = 128

# pi > 103993/33102 (convergente de pi, erro < 6e-10)
PI_LOWER = Fraction(103993, 33102)

Element = Tuple[int, int, int]
FieldKey = Tuple[int, int, int]


# ---------------------------------------------------------------------------
# Aritmética de elementos
# ---------------------------------------------------------------------------

def times_alpha(theta: Sequence, key: FieldKey) -> Tuple:
    """alpha * (x + y alpha + z alpha^2) using alpha^3 = -c - b alpha - a alpha^2"""
    a, b, c = key
    x, y, z = theta
    return (-c * z, x - b * z, y - a * z)


def element_matrix(theta: Sequence, key: FieldKey) -> List[List]:
    """Multiplication-by-theta matrix (columns theta, alpha theta, alpha^2 theta)"""
    col0 = tuple(theta)
    col1 = times_alpha(col0, key)
    col2 = times_alpha(col1, key)
    return [[col0[i], col1[i], col2[i]] for i in range(3)]


def element_mul(u: Sequence, v: Sequence, key: FieldKey) -> Tuple:
    M = element_matrix(u, key)
    return tuple(sum(M[i][k] * v[k] for k in range(3)) for i in range(3))


def _det3(M) -> int:
    return (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
            - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
            + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))


def norm_of(theta: Sequence, key: FieldKey):
    return _det3(element_matrix(theta, key))


def power_sums(key: FieldKey) -> List[int]:
    """Tr(alpha^k) for k = 0..4 (Newton identities)"""
    a, b, c = key
    s = [3, -a]
    s.append(-a * s[1] - 2 * b)
    s.append(-a * s[2] - b * s[1] - 3 * c)
    s.append(-a * s[3] - b * s[2] - c * s[1])
    return s


def trace_matrix(key: FieldKey) -> List[List[int]]:
    s = power_sums(key)
    return [[s[i + j] for j in range(3)] for i in range(3)]


def derivative_element(key: FieldKey) -> Element:
    """f'(alpha) = b + 2a alpha + 3 alpha^2"""
    a, b, _ = key
    return (b, 2 * a, 3)


# ---------------------------------------------------------------------------
# Ideais fracionários
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FracIdeal:
    """(1/den) * column lattice of num, num in HNF, gcd(content(num), den) = 1"""

    key: FieldKey
    num: IntMatrix
    den: int = 1

    @classmethod
    def from_columns(cls, key: FieldKey, columns: Sequence[Sequence], den: int = 1,
                     det_multiple: Optional[int] = None) -> 'FracIdeal':
        """Canonical ideal spanned (over Z) by rational columns divided by den"""
        entries = [Fraction(e) for col in columns for e in col]
        common = math.lcm(*(q.denominator for q in entries))
        scaled = [[int(Fraction(e) * common) for e in col] for col in columns]
        M = IntMatrix.from_columns(scaled, rows=3)
        if det_multiple is not None:
            det_multiple *= common ** 3
        W = hermite_normal_form(M, det_multiple=det_multiple)
        if W.cols != 3:
            raise DomainError("generators do not span a full-rank ideal")
        den = den * common
        g = math.gcd(reduce(math.gcd, W.entries, 0), den)
        if g > 1:
            W = IntMatrix(3, 3, tuple(e // g for e in W.entries))
            den //= g
        return cls(tuple(key), W, den)

    @classmethod
    def unit(cls, key: FieldKey) -> 'FracIdeal':
        return cls(tuple(key), IntMatrix.identity(3), 1)

    @classmethod
    def principal(cls, key: FieldKey, theta: Sequence[int], den: int = 1) -> 'FracIdeal':
        if not any(theta):
            raise DomainError("the zero ideal is not invertible")
        M = element_matrix(theta, key)
        columns = [[M[i][j] for i in range(3)] for j in range(3)]
        return cls.from_columns(key, columns, den, det_multiple=_det3(M))

    @property
    def norm(self) -> Fraction:
        return Fraction(abs(self.num.det()), self.den ** 3)

    def is_integral(self) -> bool:
        return self.den == 1

    def contains(self, theta: Sequence[int], den: int = 1) -> bool:
        """theta/den in the ideal"""
        # den_I * theta / den precisa estar na rede de num
        target = [Fraction(t * self.den, den) for t in theta]
        W = self.num
        coords = [Fraction(0)] * 3
        for i in (2, 1, 0):
            rest = target[i] - sum((W[i, j] * coords[j] for j in range(i + 1, 3)), Fraction(0))
            coords[i] = rest / W[i, i]
            if coords[i].denominator != 1:
                return False
        return True

    def to_dict(self) -> Dict:
        return {'num': self.num.to_rows(), 'den': self.den}


def ideal_mul(I: FracIdeal, J: FracIdeal) -> FracIdeal:
    if I.key != J.key:
        raise DomainError("ideals of different fields")
    columns = [element_mul(u, v, I.key) for u in I.num.columns() for v in J.num.columns()]
    det_multiple = abs(I.num.det() * J.num.det())
    return FracIdeal.from_columns(I.key, columns, I.den * J.den, det_multiple=det_multiple)


def ideal_norm(I: FracIdeal) -> Fraction:
    return I.norm


def ideal_inverse(I: FracIdeal) -> FracIdeal:
    """
    I^-1 = f'(alpha) * I^dual, with I^dual the trace dual of I.

    For Z[alpha] = O_K the codifferent is (1/f'(alpha)), so the trace dual
    of I is I^-1 / f'(alpha).
    """
    T = Matrix(trace_matrix(I.key))
    B = I.num.to_sympy() / I.den
    dual = T.inv() * B.T.inv()
    M = Matrix(element_matrix(derivative_element(I.key), I.key))
    inverse = M * dual
    columns = [[Fraction(int(e.p), int(e.q)) for e in inverse.col(j)] for j in range(3)]
    return FracIdeal.from_columns(I.key, columns)


def ideal_pow(I: FracIdeal, e: int) -> FracIdeal:
    if e < 0:
        return ideal_pow(ideal_inverse(I), -e)
    result = FracIdeal.unit(I.key)
    base = I
    while e:
        if e & 1:
            result = ideal_mul(result, base)
        e >>= 1
        if e:
            base = ideal_mul(base, base)
    return result


# ---------------------------------------------------------------------------
# Corpo
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeIdeal:
    p: int
    generator_poly: IntPoly
    residue_degree: int
    ramification: int
    hnf: FracIdeal

    @property
    def norm(self) -> int:
        return self.p ** self.residue_degree

    @property
    def label(self) -> str:
        return f"({self.p}, {self.generator_poly})"


@dataclass(frozen=True, eq=False)
class CubicField:
    """
    Isomorphism class of a cubic field, held through a maximal monic cubic.

    real_roots are iv enclosures of the real roots (ascending); for a complex
    field complex_root is the enclosure of the root with positive imaginary
    part. Enclosure width stays below 2^-precision.
    """

    defining: MonicCubic
    disc: int
    signature: Tuple[int, int]
    precision: int
    real_roots: Tuple
    complex_root: Optional[object] = None
    _cache: Dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def key(self) -> FieldKey:
        return self.defining.coefficients

    @property
    def unit_rank(self) -> int:
        r1, r2 = self.signature
        return r1 + r2 - 1

    @property
    def places(self) -> List:
        """One root enclosure per archimedean place, real places first"""
        return list(self.real_roots) + ([self.complex_root] if self.complex_root is not None else [])

    @property
    def place_weights(self) -> List[int]:
        return [1] * len(self.real_roots) + ([2] if self.complex_root is not None else [])

    def at_precision(self, bits: int) -> 'CubicField':
        if bits == self.precision:
            return self
        return make_field(self.defining, bits)

    def embed(self, theta: Sequence) -> List:
        """Images of x + y alpha + z alpha^2 (iv.mpf at real places, iv.mpc at the complex one)"""
        x, y, z = theta
        with interval_precision(self.precision):
            return [x + (y + z * s) * s for s in self.places]

    def log_embedding(self, theta: Sequence) -> Tuple:
        """log|sigma(theta)| per place (unweighted), as iv intervals"""
        values = self.embed(theta)
        with interval_precision(self.precision):
            return tuple(iv.ln(abs(v)) for v in values)

    def __repr__(self) -> str:
        return f"CubicField({self.defining}, disc={self.disc}, signature={self.signature})"


def _rational(q) -> Fraction:
    return Fraction(int(q.p), int(q.q))


def make_field(f: MonicCubic, precision: int = DEFAULT_PRECISION) -> CubicField:
    """
    Parameters:
    -----------
    f : MonicCubic
        Irreducible with Z[x]/(f) maximal
    precision : int
        Root enclosures are refined below 2^-precision

    Returns:
    --------
    CubicField
    """
    if not f.is_irreducible():
        raise DomainError(f"{f} is reducible over Q")
    if not is_maximal(f):
        raise DomainError(f"Z[x]/({f}) is not the maximal order")
    disc = f.discriminant
    signature = (3, 0) if disc > 0 else (1, 1)

    eps = Fraction(1, 2 ** precision)
    isolated = Poly(f.poly.high_first(), X, domain='ZZ').intervals(eps=eps)
    with interval_precision(precision + 16):
        real_roots = tuple(hull(_rational(s), _rational(t)) for (s, t), _ in isolated)
        complex_root = None
        if signature == (1, 1):
            r = real_roots[0]
            a, b, _ = f.coefficients
            # f = (x - r)(x^2 + p x + q)
            p = a + r
            q = b + p * r
            u = -p / 2
            v = iv.sqrt(q - p * p / 4)
            complex_root = iv.mpc(u, v)
    if len(real_roots) != signature[0]:
        raise DomainError(f"root isolation of {f} disagrees with the discriminant sign")
    return CubicField(f, disc, signature, precision, real_roots, complex_root)


def element_norm(K: CubicField, theta: Sequence[int]) -> int:
    """N(x + y alpha + z alpha^2) = Res(f(t), x + y t + z t^2)"""
    return norm_of(theta, K.key)


def minkowski_bound(K: CubicField) -> Fraction:
    """Rational upper bound for (3!/3^3) (4/pi)^r2 sqrt|disc|"""
    d = abs(K.disc)
    root = math.isqrt(d)
    if root * root == d:
        sqrt_upper = Fraction(root)
    else:
        k = 40
        sqrt_upper = Fraction(math.isqrt(d * 4 ** k) + 1, 2 ** k)
    bound = Fraction(6, 27) * sqrt_upper
    if K.signature[1]:
        bound *= 4 / PI_LOWER
    return bound


def split_prime(K: CubicField, p: int) -> List[PrimeIdeal]:
    """Primes above p read off f mod p (valid at every p since the index is 1)"""
    if not isprime(p):
        raise DomainError(f"{p} is not prime")
    cache = K._cache.setdefault('split', {})
    if p in cache:
        return cache[p]

    primes = []
    for g, e in factor_mod_p(K.defining.poly, p):
        if g.degree == 3:
            # primo inerte, g = f mod p: o ideal é (p)
            columns = [[p, 0, 0], [0, p, 0], [0, 0, p]]
        else:
            g_alpha = list(g.coeffs) + [0] * (3 - len(g.coeffs))
            M = element_matrix(g_alpha, K.key)
            columns = [[p, 0, 0], [0, p, 0], [0, 0, p]] + \
                      [[M[i][j] for i in range(3)] for j in range(3)]
        hnf = FracIdeal.from_columns(K.key, columns, det_multiple=p ** 3)
        primes.append(PrimeIdeal(p, g, g.degree, e, hnf))
    cache[p] = primes
    return primes


def prime_power(K: CubicField, P: PrimeIdeal, e: int) -> FracIdeal:
    cache = K._cache.setdefault('powers', {})
    if (P.hnf, e) not in cache:
        cache[(P.hnf, e)] = ideal_pow(P.hnf, e)
    return cache[(P.hnf, e)]


def valuation(K: CubicField, P: PrimeIdeal, theta: Sequence[int], limit: int) -> int:
    """v_P(theta) for integral theta, knowing v_P(theta) <= limit"""
    k = 0
    while k < limit and prime_power(K, P, k + 1).contains(theta):
        k += 1
    return k


# ---------------------------------------------------------------------------
# Forma T2 para enumeração
# ---------------------------------------------------------------------------

def _power_basis_t2(K: CubicField) -> List[List]:
    # Gram da base 1, alpha, alpha^2 sob T2 = sum_v e_v |sigma_v|^2
    # lugar complexo em partes real e imaginária (iv.mpc.conjugate quebra no mpmath 1.3)
    with interval_precision(K.precision):
        G = [[iv.mpf(0)] * 3 for _ in range(3)]
        for s in K.real_roots:
            powers = [iv.mpf(1), s, s * s]
            for i in range(3):
                for j in range(3):
                    G[i][j] = G[i][j] + powers[i] * powers[j]
        if K.complex_root is not None:
            u, v = K.complex_root.real, K.complex_root.imag
            re, im = [iv.mpf(1)], [iv.mpf(0)]
            for _ in range(2):
                re.append(re[-1] * u - im[-1] * v)
                im.append(re[-2] * v + im[-1] * u)
            for i in range(3):
                for j in range(3):
                    G[i][j] = G[i][j] + 2 * (re[i] * re[j] + im[i] * im[j])
        return G


def t2_gram(K: CubicField, basis: IntMatrix) -> Tuple[List[List[Fraction]], Fraction]:
    """
    Rational Gram matrix G and inflation factor s such that every v with
    T2(basis . v) <= B satisfies v^T G v <= s B.

    Totally real fields: T2 is the trace form, exact, s = 1.
    Complex fields: G is the midpoint of the interval Gram and s absorbs the
    enclosure radius against a verified lower eigenvalue bound.
    """
    W = basis.to_rows()
    if K.signature == (3, 0):
        T = trace_matrix(K.key)
        TW = [[sum(T[i][k] * W[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
        G = [[Fraction(sum(W[k][i] * TW[k][j] for k in range(3))) for j in range(3)]
             for i in range(3)]
        return G, Fraction(1)

    G0 = _power_basis_t2(K)
    with interval_precision(K.precision):
        Gi = [[sum((W[k][i] * W[l][j] * G0[k][l] for k in range(3) for l in range(3)), iv.mpf(0))
               for j in range(3)] for i in range(3)]
        mids, radius = [], Fraction(0)
        for i in range(3):
            row = []
            for j in range(3):
                lo, hi = endpoints(Gi[i][j])
                row.append((lo + hi) / 2)
                radius = max(radius, (hi - lo) / 2)
            mids.append(row)
    for i in range(3):
        for j in range(i):
            mids[i][j] = mids[j][i]

    estimate = float(np.linalg.eigvalsh(np.array([[float(e) for e in row] for row in mids])).min())
    if not estimate > 0:
        raise DomainError("T2 Gram matrix not certified positive definite")
    lam = Fraction(estimate / 2)
    shifted = [[mids[i][j] - (lam if i == j else 0) for j in range(3)] for i in range(3)]
    delta = 3 * radius
    if not is_positive_definite(shifted) or delta >= lam:
        raise DomainError("T2 Gram matrix not certified positive definite at this precision")
    return mids, lam / (lam - delta)


def t2_value_upper(K: CubicField, theta: Sequence[int]) -> Fraction:
    with interval_precision(K.precision):
        total = sum((w * abs(v) * abs(v) for v, w in zip(K.embed(theta), K.place_weights)), iv.mpf(0))
    return upper_fraction(total)
