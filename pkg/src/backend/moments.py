"""
Moment geometry of |Cl[2]| distributions
Envoltória convexa fechada dos pontos (2^n, 4^n) com expoentes excluídos,
decisão de viabilidade com certificado (testemunha ou reta separadora) e
cota inferior exata para a massa num expoente.

Toda a aritmética é racional exata (fractions.Fraction); o scipy só sugere
a base inicial do simplex exato.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

try:
    from .exactmath import DomainError, RationalPoint2
except ImportError:
    from exactmath import DomainError, RationalPoint2


DEFAULT_TRUNCATION = 64

FEASIBLE = 'feasible'
INFEASIBLE = 'infeasible'


class MomentInfeasible(ValueError):
    """Moment constraints admit no distribution; carries the separating certificate"""

    def __init__(self, message: str, certificate: 'FeasibilityCertificate'):
        super().__init__(message)
        self.certificate = certificate


def _rational(value) -> Fraction:
    if isinstance(value, float):
        raise DomainError("moment data must be exact rationals, not floats")
    return Fraction(value)


@dataclass(frozen=True)
class MomentProblem:
    """Distributions on {2^n : n >= min_exponent, n not excluded} with mean m1 and second moment <= m2_upper"""

    min_exponent: int
    excluded: FrozenSet[int]
    m1: Fraction
    m2_upper: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'excluded', frozenset(int(n) for n in self.excluded))
        object.__setattr__(self, 'm1', _rational(self.m1))
        object.__setattr__(self, 'm2_upper', _rational(self.m2_upper))
        if self.min_exponent < 0:
            raise DomainError("min_exponent must be a natural number")
        if any(n < self.min_exponent for n in self.excluded):
            raise DomainError("excluded exponents must be >= min_exponent")
        if self.m1 < 2 ** self.min_exponent:
            raise DomainError(f"m1 = {self.m1} is below the support minimum {2 ** self.min_exponent}")

    @classmethod
    def from_point(cls, point: RationalPoint2, min_exponent: int = 0,
                   excluded: Iterable[int] = ()) -> 'MomentProblem':
        return cls(min_exponent, frozenset(excluded), point.x, point.y)

    @property
    def moment_point(self) -> RationalPoint2:
        return RationalPoint2(self.m1, self.m2_upper)

    @staticmethod
    def support_point(n: int) -> RationalPoint2:
        return RationalPoint2(2 ** n, 4 ** n)

    def in_support(self, n: int) -> bool:
        return n >= self.min_exponent and n not in self.excluded

    def exponents(self, upto: int) -> List[int]:
        return [n for n in range(self.min_exponent, upto + 1) if self.in_support(n)]

    def first_exponent(self) -> int:
        n = self.min_exponent
        while n in self.excluded:
            n += 1
        return n

    def next_exponent(self, n: int) -> int:
        n += 1
        while n in self.excluded:
            n += 1
        return n

    def to_dict(self) -> Dict:
        return {
            'min_exponent': self.min_exponent,
            'excluded': sorted(self.excluded),
            'm1': str(self.m1),
            'm2_upper': str(self.m2_upper),
        }


@dataclass(frozen=True)
class FeasibilityCertificate:
    """
    verdict 'feasible': witness maps exponent -> mass, replayable exactly.
    verdict 'infeasible': line y = slope x + intercept through the support
    points at exponents `points` (equal exponents mean a tangent line) with
    every support point on or above it and (m1, m2_upper) strictly below.
    """

    verdict: str
    witness: Dict[int, Fraction] = field(default_factory=dict)
    slope: Optional[Fraction] = None
    intercept: Optional[Fraction] = None
    points: Tuple[int, ...] = ()

    @property
    def feasible(self) -> bool:
        return self.verdict == FEASIBLE

    def to_dict(self) -> Dict:
        data = {'verdict': self.verdict}
        if self.feasible:
            data['witness'] = {str(n): str(p) for n, p in sorted(self.witness.items())}
        else:
            data['slope'] = str(self.slope)
            data['intercept'] = str(self.intercept)
            data['points'] = list(self.points)
        return data


@dataclass(frozen=True)
class MassBound:
    """Exact minimum of the mass at `target` with primal witness and dual quadratic"""

    target: int
    value: Fraction
    witness: Dict[int, Fraction]
    dual: Tuple[Fraction, Fraction, Fraction]
    truncation: int

    def to_dict(self) -> Dict:
        return {
            'target': self.target,
            'value': str(self.value),
            'witness': {str(n): str(p) for n, p in sorted(self.witness.items())},
            'dual': [str(c) for c in self.dual],
            'truncation': self.truncation,
        }


# ---------------------------------------------------------------------------
# Fronteira inferior e viabilidade
# ---------------------------------------------------------------------------

def _chord(u: Fraction, v: Fraction) -> Tuple[Fraction, Fraction]:
    # reta por (u, u^2) e (v, v^2)
    return u + v, -u * v


def _bracket(problem: MomentProblem, x: Fraction) -> Tuple[int, int]:
    """Consecutive support exponents n <= m with 2^n <= x <= 2^m (n == m on a support point)"""
    n = problem.first_exponent()
    if x < 2 ** n:
        raise DomainError(f"x = {x} lies below the smallest support abscissa {2 ** n}")
    while True:
        m = problem.next_exponent(n)
        if x == 2 ** n:
            return n, n
        if x < 2 ** m:
            return n, m
        n = m


def lower_boundary(problem: MomentProblem, x) -> Fraction:
    """
    Lower boundary of the closed convex hull of the support points at x:
    x^2 on a support abscissa, else the chord between the neighbouring
    support points. `problem` supplies only the support.
    """
    x = _rational(x)
    n, m = _bracket(problem, x)
    if n == m:
        return x * x
    slope, intercept = _chord(Fraction(2 ** n), Fraction(2 ** m))
    return slope * x + intercept


def is_feasible(problem: MomentProblem) -> FeasibilityCertificate:
    """Decide whether (m1, m2_upper) dominates a point of the closed hull"""
    point = problem.moment_point
    m1, m2 = point.x, point.y
    first = problem.first_exponent()
    u0 = problem.support_point(first).x

    if m1 < u0:
        # primeiro expoente excluído: reta por (u0, u0^2), inclinação <= 2 u0
        slope = min(2 * u0, (u0 * u0 - m2) / (u0 - m1) - 1)
        return FeasibilityCertificate(INFEASIBLE, slope=slope, intercept=u0 * u0 - slope * u0,
                                      points=(first, first))

    n, m = _bracket(problem, m1)
    if n == m:
        if m2 >= m1 * m1:
            return FeasibilityCertificate(FEASIBLE, witness={n: Fraction(1)})
        m = problem.next_exponent(n)
    else:
        u, v = Fraction(2 ** n), Fraction(2 ** m)
        slope, intercept = _chord(u, v)
        if m2 >= slope * m1 + intercept:
            low = (v - m1) / (v - u)
            return FeasibilityCertificate(FEASIBLE, witness={n: low, m: 1 - low})

    slope, intercept = _chord(Fraction(2 ** n), Fraction(2 ** m))
    return FeasibilityCertificate(INFEASIBLE, slope=slope, intercept=intercept, points=(n, m))


def replay_certificate(problem: MomentProblem, certificate: FeasibilityCertificate,
                       horizon: int = 2 * DEFAULT_TRUNCATION) -> bool:
    """
    Independent exact check of a certificate.

    Separating lines are checked at every support point up to `horizon`;
    beyond it x^2 - slope x - intercept is increasing once 2x >= slope, which
    covers the rest of the support.
    """
    if certificate.feasible:
        if not certificate.witness:
            return False
        masses = certificate.witness
        if any(p < 0 or not problem.in_support(n) for n, p in masses.items()):
            return False
        mean = sum(p * problem.support_point(n).x for n, p in masses.items())
        second = sum(p * problem.support_point(n).y for n, p in masses.items())
        target = problem.moment_point
        return sum(masses.values()) == 1 and mean == target.x and second <= target.y

    s, t = certificate.slope, certificate.intercept
    if s is None or t is None:
        return False
    target = problem.moment_point
    if not target.y < s * target.x + t:
        return False
    support = [problem.support_point(n) for n in problem.exponents(horizon)]
    if any(P.y < s * P.x + t for P in support):
        return False
    last = support[-1].x
    return 2 * last >= s


# ---------------------------------------------------------------------------
# Massa mínima num expoente (simplex exato)
# ---------------------------------------------------------------------------

def _solve3(B: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """Gauss-Jordan over Fractions for a small square system; None if singular"""
    n = len(B)
    M = [list(B[i]) + [rhs[i]] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            return None
        M[col], M[pivot] = M[pivot], M[col]
        for r in range(n):
            if r != col and M[r][col]:
                factor = M[r][col] / M[col][col]
                M[r] = [a - factor * b for a, b in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def _transpose(M):
    return [list(row) for row in zip(*M)]


class _ExactSimplex:
    """
    Revised simplex with Bland's rule for min c.x, A x = b, x >= 0, where A
    has three rows. Columns are given as 3-tuples of Fractions.
    """

    def __init__(self, columns: List[Tuple[Fraction, ...]], b: Sequence[Fraction], cost: List[Fraction]):
        self.columns = columns
        self.b = list(b)
        self.cost = cost

    def basic_solution(self, basis: Sequence[int]) -> Optional[List[Fraction]]:
        B = _transpose([self.columns[j] for j in basis])
        return _solve3(B, self.b)

    def duals(self, basis: Sequence[int]) -> List[Fraction]:
        # y^T B = c_B
        B = [self.columns[j] for j in basis]
        return _solve3(B, [self.cost[j] for j in basis])

    def run(self, basis: List[int], allowed: Iterable[int]) -> Tuple[List[int], List[Fraction], List[Fraction]]:
        allowed = sorted(allowed)
        while True:
            x = self.basic_solution(basis)
            y = self.duals(basis)
            entering = None
            for j in allowed:
                if j in basis:
                    continue
                reduced = self.cost[j] - sum(yi * aij for yi, aij in zip(y, self.columns[j]))
                if reduced < 0:
                    entering = j
                    break
            if entering is None:
                return basis, x, y
            d = _solve3(_transpose([self.columns[j] for j in basis]), list(self.columns[entering]))
            best = None
            for i, di in enumerate(d):
                if di > 0:
                    ratio = x[i] / di
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                raise DomainError("moment LP is unbounded")
            basis = list(basis)
            basis[best[1]] = entering


def _float_basis_guess(exponents: Sequence[int], problem: MomentProblem, target: int) -> List[int]:
    """Support indices scipy's HiGHS puts mass on, largest first (a warm start only)"""
    try:
        powers1 = np.array([float(2 ** n) / float(problem.m1) for n in exponents])
        powers2 = np.array([float(4 ** n) / float(problem.m2_upper) for n in exponents])
        c = np.array([1.0 if n == target else 0.0 for n in exponents])
        res = linprog(c, A_ub=powers2.reshape(1, -1), b_ub=[1.0],
                      A_eq=np.vstack([np.ones(len(exponents)), powers1]), b_eq=[1.0, 1.0],
                      bounds=(0, None), method='highs')
    except (ValueError, OverflowError, ZeroDivisionError):
        return []
    if res.status != 0:
        return []
    order = np.argsort(-res.x)
    return [int(i) for i in order[:3] if res.x[i] > 1e-12]


def min_mass_at(problem: MomentProblem, target_exponent: int,
                truncation: int = DEFAULT_TRUNCATION) -> MassBound:
    """
    Exact minimum of p_target over distributions on the support up to
    2^truncation meeting the moment constraints.

    The optimal dual quadratic q(x) = l0 + l1 x + mu x^2 (mu <= 0) satisfies
    q <= [x == 2^target] on the truncated support; the tail check extends
    this to every exponent, so the value is the minimum over the full
    support. Infeasible constraints raise MomentInfeasible.
    """
    if not problem.in_support(target_exponent):
        raise DomainError(f"exponent {target_exponent} is not in the support")
    if truncation < max(target_exponent, problem.min_exponent) + 2:
        raise DomainError("truncation leaves too few support points")
    if problem.m1 > 2 ** truncation:
        raise DomainError("m1 exceeds the truncated support")

    exponents = problem.exponents(truncation)
    k = len(exponents)
    one = Fraction(1)
    columns = [(one, Fraction(2 ** n), Fraction(4 ** n)) for n in exponents]
    columns.append((Fraction(0), Fraction(0), one))              # folga de m2
    columns.extend([(one, 0, 0), (0, one, 0), (0, 0, one)])       # artificiais
    columns = [tuple(Fraction(e) for e in col) for col in columns]
    slack = k
    artificial = [k + 1, k + 2, k + 3]
    b = [one, problem.m1, problem.m2_upper]

    target_cost = [Fraction(1) if j < k and exponents[j] == target_exponent else Fraction(0)
                   for j in range(len(columns))]
    real_columns = list(range(k + 1))

    basis = None
    guess = _float_basis_guess(exponents, problem, target_exponent)
    for extra in ([], [slack]):
        candidate = (guess + extra + [j for j in real_columns if j not in guess + extra])[:3]
        x = _ExactSimplex(columns, b, target_cost).basic_solution(candidate) if len(set(candidate)) == 3 else None
        if x is not None and all(v >= 0 for v in x):
            basis = candidate
            break

    if basis is None:
        # fase 1
        phase1_cost = [Fraction(1) if j in artificial else Fraction(0) for j in range(len(columns))]
        lp = _ExactSimplex(columns, b, phase1_cost)
        basis, x, _ = lp.run(list(artificial), real_columns)
        if any(v != 0 for j, v in zip(basis, x) if j in artificial):
            raise MomentInfeasible(
                f"no distribution has first moment {problem.m1} and second <= {problem.m2_upper}",
                is_feasible(problem))
        for i, j in enumerate(basis):
            if j not in artificial:
                continue
            for r in real_columns:
                if r in basis:
                    continue
                trial = list(basis)
                trial[i] = r
                if lp.basic_solution(trial) is not None:
                    basis = trial
                    break

    lp = _ExactSimplex(columns, b, target_cost)
    basis, x, y = lp.run(basis, real_columns)
    witness = {exponents[j]: v for j, v in zip(basis, x) if j < k and v != 0}
    value = sum((v for j, v in zip(basis, x) if target_cost[j]), Fraction(0))
    dual = (y[0], y[1], y[2])
    if not _dual_tail_holds(problem, target_exponent, dual, truncation):
        raise DomainError(f"truncation at 2^{truncation} is not certified for this problem")
    return MassBound(target_exponent, value, witness, dual, truncation)


def _dual_tail_holds(problem: MomentProblem, target: int, dual, truncation: int) -> bool:
    l0, l1, mu = dual
    if mu > 0:
        return False
    for n in problem.exponents(2 * truncation):
        x = Fraction(2 ** n)
        bound = 1 if n == target else 0
        if l0 + l1 * x + mu * x * x > bound:
            return False
    # primeiro expoente do suporte além de 2T (2T pode estar excluído)
    x = Fraction(2 ** problem.next_exponent(2 * truncation))
    # q côncava (ou afim): q(x) <= 0 e q'(x) <= 0 valem para todo x maior
    return l0 + l1 * x + mu * x * x <= 0 and l1 + 2 * mu * x <= 0


# ---------------------------------------------------------------------------
# Cenários e distribuições
# ---------------------------------------------------------------------------

PUBLISHED_SCENARIOS: Dict[str, Tuple[MomentProblem, str]] = {
    'totally-real-exclusion': (MomentProblem(0, frozenset({1}), Fraction(3, 2), Fraction(3)), INFEASIBLE),
    'chord-boundary': (MomentProblem(0, frozenset({1}), Fraction(2), Fraction(6)), FEASIBLE),
    'rank-one-or-two': (MomentProblem(0, frozenset({1, 2}), Fraction(2), Fraction(6)), INFEASIBLE),
    'rank-two-counterpart': (MomentProblem(1, frozenset({2}), Fraction(3), Fraction(12)), INFEASIBLE),
    'complex-prediction': (MomentProblem(0, frozenset({1}), Fraction(3, 2), Fraction(3)), INFEASIBLE),
}


def second_moment_bound_from_distribution(distribution: Mapping[int, object]) -> Tuple[Fraction, Fraction]:
    """
    (E|Cl[2]|, E|Cl[2]|^2) for a distribution over 2-ranks, given as
    exponent -> mass or exponent -> count (normalised here).
    """
    weights = {int(n): _rational(w) for n, w in distribution.items() if w}
    if not weights or any(w < 0 for w in weights.values()):
        raise DomainError("distribution needs nonnegative weights with positive total")
    total = sum(weights.values())
    m1 = sum(w * 2 ** n for n, w in weights.items()) / total
    m2 = sum(w * 4 ** n for n, w in weights.items()) / total
    return m1, m2
