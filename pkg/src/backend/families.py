"""
Cubic families and their height orderings
Enumeradores das famílias x^3 + a x^2 + b x + 1 com congruências mod 4
(B112) e das cúbicas mônicas módulo translação (F1), com filtros de
irredutibilidade, maximalidade e assinatura.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
import math
from typing import Dict, Iterator, Tuple

try:
    from .cubic_forms import MonicCubic, family_discriminant, is_maximal
    from .exactmath import DomainError
    from .number_field import CubicField, make_field
except ImportError:
    from cubic_forms import MonicCubic, family_discriminant, is_maximal
    from exactmath import DomainError
    from number_field import CubicField, make_field


KIND_B112 = 'B112'
KIND_F1 = 'F1'

SIGNATURE_FILTERS = {
    'totally_real': lambda disc: disc > 0,
    'complex': lambda disc: disc < 0,
    'both': lambda disc: True,
}

# apelidos aceitos na linha de comando
SIGNATURE_ALIASES = {'real': 'totally_real', 'totally_real': 'totally_real',
                     'complex': 'complex', 'both': 'both'}

ORDERINGS = {
    KIND_B112: ('symmetric', 'weighted'),
    KIND_F1: ('covariant',),
}

B112_RESIDUES = frozenset({(0, 0), (1, 2), (2, 1)})

# |Delta(a, b)| <= 54 Y^4 na caixa |a|, |b| <= Y
DISC_BOUND_CONSTANT = 54


def symmetric_height(a: int, b: int) -> Fraction:
    return Fraction(max(abs(a), abs(b)))


def weighted_height_squared(a: int, b: int) -> Fraction:
    """max(|a|, |b|^(1/2))^2, kept squared so it stays rational"""
    return Fraction(max(a * a, abs(b)))


def covariant_height(f: MonicCubic) -> Fraction:
    """max(|a^2 - 3b|^3, (-2a^3 + 9ab - 27c)^2 / 4)"""
    return max(Fraction(abs(f.covariant_i) ** 3), Fraction(f.covariant_j ** 2, 4))


def all_heights(f: MonicCubic) -> Dict[str, Fraction]:
    """Heights defined for f; symmetric and weighted only when c = 1"""
    a, b, c = f.coefficients
    heights = {'covariant': covariant_height(f)}
    if c == 1:
        heights['symmetric'] = symmetric_height(a, b)
        heights['weighted'] = weighted_height_squared(a, b)
    return heights


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    signature_filter: str = 'totally_real'
    ordering: str = 'symmetric'
    height_cap: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind not in ORDERINGS:
            raise DomainError(f"unknown family {self.kind!r}")
        signature = SIGNATURE_ALIASES.get(self.signature_filter)
        if signature is None:
            raise DomainError(f"unknown signature filter {self.signature_filter!r}")
        object.__setattr__(self, 'signature_filter', signature)
        if self.kind == KIND_F1 and self.ordering == 'symmetric':
            object.__setattr__(self, 'ordering', 'covariant')
        if self.ordering not in ORDERINGS[self.kind]:
            raise DomainError(f"ordering {self.ordering!r} is not defined for {self.kind}")
        object.__setattr__(self, 'height_cap', Fraction(self.height_cap))

    def members(self) -> Iterator['FamilyMember']:
        if self.kind == KIND_B112:
            return enumerate_b112(self.height_cap, self.ordering, self.signature_filter)
        return enumerate_f1(self.height_cap, self.signature_filter)

    def to_dict(self) -> Dict:
        return {'kind': self.kind, 'signature_filter': self.signature_filter,
                'ordering': self.ordering, 'height_cap': str(self.height_cap)}


@dataclass
class FamilyMember:
    form: MonicCubic
    heights: Dict[str, Fraction]
    disc: int
    precision: int = 128

    @cached_property
    def field(self) -> CubicField:
        return make_field(self.form, self.precision)

    @property
    def coefficients(self) -> Tuple[int, int, int]:
        return self.form.coefficients


def _check_signature(signature_filter: str):
    name = SIGNATURE_ALIASES.get(signature_filter)
    if name is None:
        raise DomainError(f"unknown signature filter {signature_filter!r}")
    return SIGNATURE_FILTERS[name]


def b112_candidate(a: int, b: int) -> bool:
    """Congruence and positivity conditions, before irreducibility and maximality"""
    return a > 0 and b > 0 and (a % 4, b % 4) in B112_RESIDUES


def enumerate_b112(height_cap, ordering: str = 'symmetric',
                   signature_filter: str = 'totally_real') -> Iterator[FamilyMember]:
    """
    x^3 + a x^2 + b x + 1 with a, b > 0, (a, b) mod 4 in {(0,0), (1,2), (2,1)},
    irreducible and maximal, by ascending height then (a, b).

    Weighted ordering compares max(a^2, b) against cap^2.
    """
    if ordering not in ORDERINGS[KIND_B112]:
        raise DomainError(f"ordering {ordering!r} is not defined for B112")
    keep = _check_signature(signature_filter)
    cap = Fraction(height_cap)
    if cap < 1:
        return
    a_max = math.floor(cap)
    if ordering == 'symmetric':
        b_max = a_max
        height = symmetric_height
    else:
        b_max = math.floor(cap * cap)
        height = weighted_height_squared

    candidates = []
    for a in range(1, a_max + 1):
        for b in range(1, b_max + 1):
            if not b112_candidate(a, b):
                continue
            disc = family_discriminant(a, b)
            if disc == 0 or not keep(disc):
                continue
            candidates.append((height(a, b), a, b, disc))
    candidates.sort()

    for _, a, b, disc in candidates:
        f = MonicCubic(a, b, 1)
        if not f.is_irreducible() or not is_maximal(f):
            continue
        yield FamilyMember(f, all_heights(f), disc)


def _integer_cube_root_floor(q: Fraction) -> int:
    t = int(round(float(q) ** (1 / 3))) if q > 0 else 0
    while t ** 3 > q:
        t -= 1
    while (t + 1) ** 3 <= q:
        t += 1
    return t


def enumerate_f1(height_cap, signature_filter: str = 'totally_real') -> Iterator[FamilyMember]:
    """
    Monic cubics x^3 + a x^2 + b x + c with a in {0, 1, 2} (one per
    translation class), irreducible and maximal, covariant height <= cap,
    by ascending height then (a, b, c).
    """
    keep = _check_signature(signature_filter)
    cap = Fraction(height_cap)
    if cap <= 0:
        return
    i_max = _integer_cube_root_floor(cap)
    j_max = math.isqrt(math.floor(4 * cap))

    candidates = []
    for a in range(3):
        # I = a^2 - 3b, |I| <= i_max
        b_lo = math.ceil(Fraction(a * a - i_max, 3))
        b_hi = math.floor(Fraction(a * a + i_max, 3))
        for b in range(b_lo, b_hi + 1):
            base = -2 * a ** 3 + 9 * a * b
            # J = base - 27c, |J| <= j_max
            c_lo = math.ceil(Fraction(base - j_max, 27))
            c_hi = math.floor(Fraction(base + j_max, 27))
            for c in range(c_lo, c_hi + 1):
                f = MonicCubic(a, b, c)
                H = covariant_height(f)
                if H > cap:
                    continue
                disc = f.discriminant
                if disc == 0 or not keep(disc):
                    continue
                candidates.append((H, a, b, c))
    candidates.sort()

    for _, a, b, c in candidates:
        f = MonicCubic(a, b, c)
        if not f.is_irreducible() or not is_maximal(f):
            continue
        yield FamilyMember(f, all_heights(f), f.discriminant)


def count_maximal_b112(height_cap) -> int:
    """Members of B112 at symmetric height <= cap, both signatures"""
    return sum(1 for _ in enumerate_b112(height_cap, 'symmetric', 'both'))


@dataclass(frozen=True)
class DiscBoundCertificate:
    """
    |Delta(a, b)| <= constant * Y^4 for |a|, |b| <= Y, by the triangle
    inequality on the terms of Delta, plus the exhaustive maximum over the box.
    """

    Y: Fraction
    constant: int
    term_bounds: Tuple[Tuple[str, Fraction], ...]
    exhaustive_max: int
    argmax: Tuple[int, int]

    @property
    def bound(self) -> Fraction:
        return self.constant * self.Y ** 4

    @property
    def holds(self) -> bool:
        return sum(b for _, b in self.term_bounds) <= self.bound and self.exhaustive_max <= self.bound

    def to_dict(self) -> Dict:
        return {
            'Y': str(self.Y),
            'constant': self.constant,
            'bound': str(self.bound),
            'term_bounds': {name: str(b) for name, b in self.term_bounds},
            'exhaustive_max': self.exhaustive_max,
            'argmax': list(self.argmax),
            'holds': self.holds,
        }


def height_implies_disc_bound(Y) -> DiscBoundCertificate:
    """Height max(|a|, |b|) <= Y forces |disc(x^3 + a x^2 + b x + 1)| <= 54 Y^4"""
    Y = Fraction(Y)
    if Y < 1:
        raise DomainError("the height bound needs Y >= 1")
    # Delta = a^2 b^2 - 4a^3 - 4b^3 + 18ab - 27
    terms = (
        ('a^2 b^2', Y ** 4),
        ('4 a^3', 4 * Y ** 3),
        ('4 b^3', 4 * Y ** 3),
        ('18 a b', 18 * Y ** 2),
        ('27', Fraction(27)),
    )
    n = math.floor(Y)
    best, argmax = -1, (0, 0)
    for a in range(-n, n + 1):
        for b in range(-n, n + 1):
            value = abs(family_discriminant(a, b))
            if value > best:
                best, argmax = value, (a, b)
    return DiscBoundCertificate(Y, DISC_BOUND_CONSTANT, terms, best, argmax)


def describe_family(spec: FamilySpec) -> str:
    if spec.kind == KIND_B112:
        return f"B112 ({spec.ordering} height <= {spec.height_cap}, {spec.signature_filter})"
    return f"F1 (covariant height <= {spec.height_cap}, {spec.signature_filter})"
