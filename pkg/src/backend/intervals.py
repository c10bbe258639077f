"""
Validated real numbers on top of mpmath.iv
"""

from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
import math
from typing import Dict, Tuple

from mpmath import iv
from mpmath.libmp import to_rational


@contextmanager
def interval_precision(bits: int):
    """Run a block with iv.prec = bits, restoring the previous precision"""
    saved = iv.prec
    iv.prec = int(bits)
    try:
        yield
    finally:
        iv.prec = saved


def from_fraction(q) -> 'iv.mpf':
    q = Fraction(q)
    return iv.mpf(q.numerator) / q.denominator


def hull(lo, hi) -> 'iv.mpf':
    """Smallest interval (at the current precision) containing [lo, hi] for rationals lo <= hi"""
    return iv.mpf([from_fraction(lo), from_fraction(hi)])


def endpoints(x) -> Tuple[Fraction, Fraction]:
    a, b = x._mpi_
    return Fraction(*to_rational(a)), Fraction(*to_rational(b))


def upper_fraction(x) -> Fraction:
    return endpoints(x)[1]


def lower_fraction(x) -> Fraction:
    return endpoints(x)[0]


def midpoint_float(x) -> float:
    return float(x.mid)


def is_certain(answer) -> bool:
    """mpmath interval comparisons answer True, False or None (undecided)"""
    return answer is True


@dataclass(frozen=True)
class ValidatedReal:
    """Real number known to lie in [mid - radius, mid + radius]"""

    mid: float
    radius: float

    @classmethod
    def from_interval(cls, x) -> 'ValidatedReal':
        lo, hi = endpoints(x)
        mid = float((lo + hi) / 2)
        spread = max(hi - Fraction(mid), Fraction(mid) - lo)
        radius = math.nextafter(float(spread), math.inf) if spread else 0.0
        return cls(mid, radius)

    @property
    def lower(self) -> float:
        # arredondamento para fora
        return math.nextafter(self.mid - self.radius, -math.inf)

    @property
    def upper(self) -> float:
        return math.nextafter(self.mid + self.radius, math.inf)

    def to_dict(self) -> Dict[str, float]:
        return {'mid': self.mid, 'radius': self.radius}

    @classmethod
    def from_dict(cls, data: Dict[str, float]) -> 'ValidatedReal':
        return cls(float(data['mid']), float(data['radius']))
