"""
Binary cubic forms and monic cubics
Discriminantes, critério de Dedekind, translações, redução GL2(Z)
e auditoria de multiplicidade de monogenizadores.

Convenções (fixas em todo o pacote):
    F(x, y) = a x^3 + b x^2 y + c x y^2 + d y^3
    Hessiano H = (b^2 - 3ac) x^2 + (bc - 9ad) xy + (c^2 - 3bd) y^2
    I = b^2 - 3ac,  J = -2b^3 + 9abc - 27a^2 d,  4 I^3 - J^2 = 27 disc
    gamma = (p, q, r, s) age por F o gamma (x, y) = F(px + qy, rx + sy)
"""

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
import math
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from mpmath import iv
from sympy import Poly, factorint, isprime, primefactors, sieve
from sympy.ntheory import pollard_rho
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_from_int_poly, gf_gcd, gf_quo

try:
    from .exactmath import DomainError, IntPoly, X, factor_mod_p, integer_roots
    from .intervals import hull, interval_precision, is_certain
except ImportError:
    from exactmath import DomainError, IntPoly, X, factor_mod_p, integer_roots
    from intervals import hull, interval_precision, is_certain


TRIAL_LIMIT = 10 ** 6
RHO_RETRIES = 8
RHO_MAX_STEPS = 200_000
MONOGENISER_BOUND = 60
REDUCTION_PRECISION = 128
REDUCTION_MAX_PRECISION = 4096

GL2 = Tuple[int, int, int, int]


class UnresolvedFactorization(DomainError):
    """Discriminant factorization exceeded the configured effort"""


class MonogeniserBoundViolation(AssertionError):
    """More than 60 translation classes (or more than 3 unit translates) for one field"""


# ---------------------------------------------------------------------------
# Tipos
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BinaryCubicForm:
    a: int
    b: int
    c: int
    d: int

    @property
    def coefficients(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def discriminant(self) -> int:
        a, b, c, d = self.coefficients
        return b * b * c * c - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d + 18 * a * b * c * d

    def hessian(self) -> Tuple[int, int, int]:
        a, b, c, d = self.coefficients
        return (b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d)

    @property
    def covariant_i(self) -> int:
        return self.b * self.b - 3 * self.a * self.c

    @property
    def covariant_j(self) -> int:
        a, b, c, d = self.coefficients
        return -2 * b ** 3 + 9 * a * b * c - 27 * a * a * d

    def is_irreducible(self) -> bool:
        if self.a == 0 or self.d == 0:
            return False
        return bool(Poly([self.a, self.b, self.c, self.d], X, domain='ZZ').is_irreducible)

    def act(self, gamma: GL2) -> 'BinaryCubicForm':
        return BinaryCubicForm(*compose_form(self.coefficients, gamma))

    def __neg__(self) -> 'BinaryCubicForm':
        return BinaryCubicForm(-self.a, -self.b, -self.c, -self.d)


@dataclass(frozen=True)
class MonicCubic:
    """x^3 + a x^2 + b x + c"""

    a: int
    b: int
    c: int

    @property
    def coefficients(self) -> Tuple[int, int, int]:
        return (self.a, self.b, self.c)

    @property
    def poly(self) -> IntPoly:
        return IntPoly((self.c, self.b, self.a, 1))

    @property
    def discriminant(self) -> int:
        a, b, c = self.coefficients
        return 18 * a * b * c - 4 * a ** 3 * c + a * a * b * b - 4 * b ** 3 - 27 * c * c

    @property
    def covariant_i(self) -> int:
        return self.a * self.a - 3 * self.b

    @property
    def covariant_j(self) -> int:
        return -2 * self.a ** 3 + 9 * self.a * self.b - 27 * self.c

    def __call__(self, n):
        return ((n + self.a) * n + self.b) * n + self.c

    def is_irreducible(self) -> bool:
        # cúbica mônica: redutível <=> raiz inteira
        return not integer_roots(self.poly)

    def as_form(self) -> BinaryCubicForm:
        return BinaryCubicForm(1, self.a, self.b, self.c)

    def __str__(self) -> str:
        return str(self.poly)


# ---------------------------------------------------------------------------
# Discriminantes e maximalidade
# ---------------------------------------------------------------------------

def family_discriminant(a: int, b: int) -> int:
    """Discriminant of x^3 + a x^2 + b x + 1"""
    return a * a * b * b - 4 * a ** 3 - 4 * b ** 3 + 18 * a * b - 27


def _square_part_by_rho(m: int) -> List[int]:
    exponents: Counter = Counter()
    stack = [m]
    while stack:
        k = stack.pop()
        if k == 1:
            continue
        if isprime(k):
            exponents[k] += 1
            continue
        root = math.isqrt(k)
        if root * root == k:
            stack.extend([root, root])
            continue
        factor = pollard_rho(k, retries=RHO_RETRIES, max_steps=RHO_MAX_STEPS)
        if factor is None:
            raise UnresolvedFactorization(
                f"composite cofactor {k} survived trial division and Pollard rho"
            )
        stack.extend([factor, k // factor])
    return [p for p, e in exponents.items() if e >= 2]


def square_dividing_primes(n: int, trial_limit: int = TRIAL_LIMIT) -> List[int]:
    """
    Primes p with p^2 | n.

    Trial division stops once p^3 exceeds the cofactor: what is left then has
    at most two prime factors, so it is p^2 exactly when it is a perfect square.
    Past trial_limit the cofactor goes to Pollard rho; a composite that
    resists raises UnresolvedFactorization.
    """
    remaining = abs(int(n))
    if remaining == 0:
        raise DomainError("zero has no finite square part")
    found: List[int] = []
    cube_reached = False
    for p in sieve.primerange(2, trial_limit + 1):
        if p * p * p > remaining:
            cube_reached = True
            break
        if remaining % p == 0:
            k = 0
            while remaining % p == 0:
                remaining //= p
                k += 1
            if k >= 2:
                found.append(int(p))
    if remaining > 1:
        if cube_reached:
            root = math.isqrt(remaining)
            if root * root == remaining:
                found.append(root)
        elif not isprime(remaining):
            found.extend(_square_part_by_rho(remaining))
    return sorted(found)


def _require_irreducible(f: MonicCubic):
    if not f.is_irreducible():
        raise DomainError(f"{f} is reducible over Q")


def dedekind_is_maximal_at(f: MonicCubic, p: int) -> bool:
    """
    Dedekind criterion at p.

    With f mod p = prod g_i^e_i, g the product of the lifts, h a lift of f/g
    and F = (g h - f)/p, Z[alpha] is p-maximal iff gcd(F, g, h) = 1 mod p.
    """
    if not isprime(p):
        raise DomainError(f"{p} is not prime")
    _require_irreducible(f)

    f_int = Poly(f.poly.high_first(), X, domain='ZZ')
    g = Poly(1, X, domain='ZZ')
    for factor, _ in factor_mod_p(f.poly, p):
        g = g * Poly(factor.high_first(), X, domain='ZZ')

    f_bar = gf_from_int_poly([int(c) for c in f_int.all_coeffs()], p)
    g_bar = gf_from_int_poly([int(c) for c in g.all_coeffs()], p)
    h_bar = gf_quo(f_bar, g_bar, p, ZZ)
    h = Poly([int(c) % p for c in h_bar] or [0], X, domain='ZZ')

    F = (g * h - f_int).exquo_ground(p)
    F_bar = gf_from_int_poly([int(c) for c in F.all_coeffs()], p)

    common = gf_gcd(gf_gcd(F_bar, g_bar, p, ZZ), h_bar, p, ZZ)
    return len(common) == 1


def is_maximal(f: MonicCubic) -> bool:
    """Z[x]/(f) is the full ring of integers (checked at every p with p^2 | disc)"""
    _require_irreducible(f)
    disc = f.discriminant
    return all(dedekind_is_maximal_at(f, p) for p in square_dividing_primes(disc))


# ---------------------------------------------------------------------------
# Translações
# ---------------------------------------------------------------------------

def translate(f: MonicCubic, n: int) -> MonicCubic:
    """f(x + n)"""
    a, b, _ = f.coefficients
    return MonicCubic(a + 3 * n, b + 2 * a * n + 3 * n * n, f(n))


def translation_normal_form(f: MonicCubic) -> MonicCubic:
    """Representative of the translation class with a in {0, 1, 2}"""
    return translate(f, -(f.a // 3))


def unit_constant_translates(f: MonicCubic) -> Set[int]:
    """Integers n with f(n) = 1, i.e. translates of f with constant coefficient 1"""
    _require_irreducible(f)
    a, b, c = f.coefficients
    found = set(integer_roots(IntPoly((c - 1, b, a, 1))))
    if len(found) > 3:
        raise MonogeniserBoundViolation(f"{f} has {len(found)} unit translates")
    return found


# ---------------------------------------------------------------------------
# Redução GL2(Z)
# ---------------------------------------------------------------------------

def _hom_mul(u: Sequence, v: Sequence) -> List:
    out = [0] * (len(u) + len(v) - 1)
    for i, x in enumerate(u):
        for j, y in enumerate(v):
            out[i + j] = out[i + j] + x * y
    return out


def compose_form(coeffs: Sequence, gamma: GL2) -> List:
    """
    Coefficients (x-degree descending) of F(px + qy, rx + sy).

    Works for any degree and for any ring of coefficients supporting + and *
    (integers, Fractions, mpmath intervals).
    """
    p, q, r, s = gamma
    n = len(coeffs) - 1
    first, second = [p, q], [r, s]
    out = [0] * (n + 1)
    for i, c in enumerate(coeffs):
        term = [1]
        for _ in range(n - i):
            term = _hom_mul(term, first)
        for _ in range(i):
            term = _hom_mul(term, second)
        for k, t in enumerate(term):
            out[k] = out[k] + c * t
    return out


_SMALL_GL2: Tuple[GL2, ...] = tuple(
    g for g in product((-1, 0, 1), repeat=4) if abs(g[0] * g[3] - g[1] * g[2]) == 1
)


def _translation(n: int) -> GL2:
    return (1, n, 0, 1)


_SWAP: GL2 = (0, -1, 1, 0)
_REFLECT: GL2 = (1, 0, 0, -1)


def _reduce_positive(F: BinaryCubicForm) -> BinaryCubicForm:
    # Hessiano definido positivo: redução de Gauss exata
    while True:
        P, Q, R = F.hessian()
        n = (P - Q) // (2 * P)
        if n:
            F = F.act(_translation(n))
            P, Q, R = F.hessian()
        if P > R:
            F = F.act(_SWAP)
            continue
        break
    if F.hessian()[1] < 0:
        F = F.act(_REFLECT)

    H = F.hessian()
    candidates = [G for G in (F.act(g) for g in _SMALL_GL2) if G.hessian() == H]
    return min(candidates, key=lambda G: G.coefficients)


def _quadratic_factor(F: BinaryCubicForm, bits: int) -> List:
    """Positive definite real quadratic factor of F (one real root), as intervals"""
    a, b, c, d = F.coefficients
    eps = Fraction(1, 2 ** bits)
    (s, t), _ = Poly([a, b, c, d], X, domain='ZZ').intervals(eps=eps)[0]
    r = hull(Fraction(int(s.p), int(s.q)), Fraction(int(t.p), int(t.q)))
    A = iv.mpf(a)
    B = b + a * r
    C = c + B * r
    sign = 1 if a > 0 else -1
    return [sign * A, sign * B, sign * C]


def _reduce_negative(F: BinaryCubicForm, precision: int) -> BinaryCubicForm:
    bits = precision
    while bits <= REDUCTION_MAX_PRECISION:
        with interval_precision(bits):
            q = _quadratic_factor(F, bits)
            for _ in range(100_000):
                A, B, C = q
                n = math.floor(float(((A - B) / (2 * A)).mid))
                if n:
                    F = F.act(_translation(n))
                    q = compose_form(q, _translation(n))
                    A, B, C = q
                if float(A.mid) > float(C.mid):
                    F = F.act(_SWAP)
                    q = compose_form(q, _SWAP)
                    continue
                break
            A, B, C = q
            if is_certain(abs(B) < A) and is_certain(A < C):
                if is_certain(B < 0):
                    F = F.act(_REFLECT)
                return F if F.a > 0 else -F
        bits *= 2
    raise DomainError(f"could not certify the reduction of {F.coefficients}")


def reduce_form(F: BinaryCubicForm, precision: int = REDUCTION_PRECISION) -> BinaryCubicForm:
    """
    Canonical representative of the GL2(Z)-orbit of an irreducible form.

    Positive discriminant: exact Gauss reduction of the Hessian, then the
    lexicographically least form among the Hessian's automorphs.
    Negative discriminant: reduction of the real quadratic factor (validated
    intervals, precision doubling until every comparison is decided); the
    factor's point is never on the boundary for irreducible F, so only the
    sign is left to normalise (a > 0).
    """
    disc = F.discriminant
    if disc == 0:
        raise DomainError(f"degenerate form {F.coefficients}")
    if not F.is_irreducible():
        raise DomainError(f"reducible form {F.coefficients}")
    if disc > 0:
        return _reduce_positive(F)
    return _reduce_negative(F, precision)


def forms_equivalent(F: BinaryCubicForm, G: BinaryCubicForm) -> bool:
    if F.discriminant != G.discriminant:
        return False
    return reduce_form(F) == reduce_form(G)


# ---------------------------------------------------------------------------
# Multiplicidade de monogenizadores
# ---------------------------------------------------------------------------

def unit_family_index(search_bound: int) -> Dict[int, List[Tuple[int, int]]]:
    """discriminant -> [(a, b)] for x^3 + a x^2 + b x + 1 with max(|a|, |b|) <= search_bound"""
    index: Dict[int, List[Tuple[int, int]]] = {}
    for a in range(-search_bound, search_bound + 1):
        for b in range(-search_bound, search_bound + 1):
            index.setdefault(family_discriminant(a, b), []).append((a, b))
    return index


def monogeniser_multiplicity(f: MonicCubic, search_bound: int,
                             index: Optional[Mapping[int, Sequence[Tuple[int, int]]]] = None
                             ) -> Tuple[int, List[MonicCubic]]:
    """
    Translation classes of x^3 + a x^2 + b x + 1 (max(|a|,|b|) <= search_bound)
    defining the same field as f.

    Parameters:
    -----------
    f : MonicCubic
        Irreducible and maximal
    search_bound : int
        Coefficient window
    index : mapping, optional
        Precomputed unit_family_index(search_bound), shared across calls

    Returns:
    --------
    (count, witnesses)
        One witness per translation class, in scan order; f itself stands
        for its own class when it lies in the window
    """
    _require_irreducible(f)
    if index is None:
        index = unit_family_index(search_bound)
    disc = f.discriminant
    target = reduce_form(f.as_form())

    classes: Dict[MonicCubic, MonicCubic] = {}
    for a, b in index.get(disc, ()):
        if max(abs(a), abs(b)) > search_bound:
            continue
        g = MonicCubic(a, b, 1)
        if not g.is_irreducible():
            continue
        # mesmo discriminante de um corpo maximal => índice 1
        if reduce_form(g.as_form()) != target:
            continue
        key = translation_normal_form(g)
        if g == f or key not in classes:
            classes[key] = g

    count = len(classes)
    if count > MONOGENISER_BOUND:
        raise MonogeniserBoundViolation(
            f"{f}: {count} translation classes exceed {MONOGENISER_BOUND}"
        )
    return count, list(classes.values())


# ---------------------------------------------------------------------------
# Gêneros (corpos quadráticos imaginários)
# ---------------------------------------------------------------------------

def quadratic_genus_two_rank(d: int) -> int:
    """omega(Delta_d) - 1 with Delta_d = d (d = 1 mod 4) or 4d"""
    if d >= 0:
        raise DomainError(f"d must be negative, got {d}")
    if any(e > 1 for e in factorint(-d).values()):
        raise DomainError(f"d = {d} is not squarefree")
    fundamental = d if d % 4 == 1 else 4 * d
    return len(primefactors(fundamental)) - 1
