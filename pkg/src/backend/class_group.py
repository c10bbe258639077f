"""
Class groups, regulators and 2-ranks of cubic fields
Coleta de relações sobre uma base de fatores, núcleo de Smith, regulador
validado, certificação pela fórmula analítica do número de classes e um
oráculo exaustivo para discriminantes pequenos.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import hashlib
from itertools import combinations, product
import json
import math
import os
import random
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from mpmath import iv
from sympy import Matrix, sieve
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_from_int_poly, gf_gcd, gf_pow_mod, gf_sub

try:
    from .exactmath import (
        DomainError,
        IntMatrix,
        enumerate_short_vectors,
        factor_mod_p,
        lll_reduce,
        smith_normal_form,
    )
    from .intervals import ValidatedReal, endpoints, from_fraction, interval_precision, is_certain, upper_fraction
    from .number_field import (
        CubicField,
        Element,
        FracIdeal,
        PrimeIdeal,
        element_matrix,
        element_mul,
        element_norm,
        ideal_inverse,
        ideal_mul,
        minkowski_bound,
        prime_power,
        split_prime,
        t2_gram,
        valuation,
    )
except ImportError:
    from exactmath import (
        DomainError,
        IntMatrix,
        enumerate_short_vectors,
        factor_mod_p,
        lll_reduce,
        smith_normal_form,
    )
    from intervals import ValidatedReal, endpoints, from_fraction, interval_precision, is_certain, upper_fraction
    from number_field import (
        CubicField,
        Element,
        FracIdeal,
        PrimeIdeal,
        element_matrix,
        element_mul,
        element_norm,
        ideal_inverse,
        ideal_mul,
        minkowski_bound,
        prime_power,
        split_prime,
        t2_gram,
        valuation,
    )


TOOLCHAIN_VERSION = "cubiclab-1.0"

DEFAULT_CONFIG = {
    'precision_bits': 128,
    'max_precision_bits': 1024,
    'relation_budget': 20000,
    'max_relation_budget': 160000,
    'extra_relations': 20,
    'auxiliary_bound': 30,
    'euler_cutoff': 10 ** 5,
    'tail_factor': '6/5',
    'seed': 0,
    'oracle_cap': 20,
    'use_oracle': False,
    'strict': False,
    'verify_relations': True,
    'unit_search_max_t2': 4096,
}

STATUS_ORACLE = 'oracle'
STATUS_CERTIFIED = 'certified'
STATUS_HEURISTIC = 'heuristic'
STATUS_RANK = {STATUS_HEURISTIC: 0, STATUS_CERTIFIED: 1, STATUS_ORACLE: 2}

UNIT_EXPONENT_LIMIT = 8
EUCLID_STEPS = 10_000


class ClassGroupError(RuntimeError):
    """Base class for class group failures"""


class InsufficientRelations(ClassGroupError):
    pass


class RegulatorRankDeficient(ClassGroupError):
    pass


class CertificationFailed(ClassGroupError):
    pass


def resolve_config(overrides: Optional[Dict] = None) -> Dict:
    """DEFAULT_CONFIG + CUBICLAB_PRECISION_BITS + caller overrides"""
    config = dict(DEFAULT_CONFIG)
    env_bits = os.environ.get('CUBICLAB_PRECISION_BITS')
    if env_bits:
        config['precision_bits'] = int(env_bits)
    if overrides:
        unknown = set(overrides) - set(DEFAULT_CONFIG)
        if unknown:
            raise DomainError(f"unknown class group settings: {sorted(unknown)}")
        config.update(overrides)
    config['tail_factor'] = str(Fraction(config['tail_factor']))
    if config['auxiliary_bound'] < 2:
        raise DomainError("auxiliary_bound must be at least 2")
    if config['max_precision_bits'] < config['precision_bits']:
        config['max_precision_bits'] = config['precision_bits']
    if config['max_relation_budget'] < config['relation_budget']:
        config['max_relation_budget'] = config['relation_budget']
    return config


def config_hash(config: Dict) -> str:
    payload = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


# ---------------------------------------------------------------------------
# Tipos
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Certification:
    status: str
    analytic_ratio: Optional[ValidatedReal]
    euler_cutoff: int
    relation_budget: int
    precision_bits: int
    tail_factor: str

    def to_dict(self) -> Dict:
        return {
            'status': self.status,
            'analytic_ratio': self.analytic_ratio.to_dict() if self.analytic_ratio else None,
            'euler_cutoff': self.euler_cutoff,
            'relation_budget': self.relation_budget,
            'precision_bits': self.precision_bits,
            'tail_factor': self.tail_factor,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'Certification':
        ratio = data.get('analytic_ratio')
        return cls(
            status=data['status'],
            analytic_ratio=ValidatedReal.from_dict(ratio) if ratio else None,
            euler_cutoff=int(data['euler_cutoff']),
            relation_budget=int(data['relation_budget']),
            precision_bits=int(data['precision_bits']),
            tail_factor=str(data['tail_factor']),
        )


@dataclass(frozen=True)
class ClassGroupResult:
    elementary_divisors: Tuple[int, ...]
    regulator: Optional[ValidatedReal]
    certification: Certification
    units: Tuple[Element, ...] = ()

    @property
    def h(self) -> int:
        return math.prod(self.elementary_divisors)

    @property
    def two_rank(self) -> int:
        return two_rank_of(self.elementary_divisors)

    @property
    def cl2_size(self) -> int:
        return 2 ** self.two_rank

    @property
    def status(self) -> str:
        return self.certification.status

    def to_dict(self) -> Dict:
        return {
            'elementary_divisors': list(self.elementary_divisors),
            'h': self.h,
            'two_rank': self.two_rank,
            'cl2_size': self.cl2_size,
            'regulator': self.regulator.to_dict() if self.regulator else None,
            'certification': self.certification.to_dict(),
            'units': [list(u) for u in self.units],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'ClassGroupResult':
        regulator = data.get('regulator')
        return cls(
            elementary_divisors=tuple(int(d) for d in data['elementary_divisors']),
            regulator=ValidatedReal.from_dict(regulator) if regulator else None,
            certification=Certification.from_dict(data['certification']),
            units=tuple(tuple(int(x) for x in u) for u in data.get('units', [])),
        )


@dataclass(frozen=True)
class Relation:
    """(element) = prod fb[i]^exponents[i]"""

    element: Element
    exponents: Tuple[int, ...]
    log_embedding: Tuple = field(compare=False, repr=False)


def two_rank_of(divisors: Sequence[int]) -> int:
    return sum(1 for d in divisors if d % 2 == 0)


# ---------------------------------------------------------------------------
# Base de fatores e relações
# ---------------------------------------------------------------------------

def factor_base(K: CubicField, bound: Optional[Fraction] = None) -> List[PrimeIdeal]:
    """Prime ideals of norm <= bound (default: the Minkowski bound), by (norm, p)"""
    if bound is None:
        bound = minkowski_bound(K)
    limit = math.floor(bound)
    primes = []
    for p in sieve.primerange(2, limit + 1):
        primes.extend(P for P in split_prime(K, int(p)) if P.norm <= limit)
    primes.sort(key=lambda P: (P.norm, P.p, P.generator_poly.coeffs))
    return primes


def _canonical(v: Element) -> bool:
    first = next((c for c in v if c), 0)
    return first > 0


def candidate_elements(seed: int) -> Iterator[Element]:
    """Primitive elements up to sign, in shells of doubling side, shuffled per shell"""
    inner, side = 0, 1
    while True:
        shell = [v for v in product(range(-side, side + 1), repeat=3)
                 if max(abs(c) for c in v) > inner and _canonical(v)
                 and math.gcd(*v) == 1 and v != (1, 0, 0)]
        random.Random(seed * 7919 + side).shuffle(shell)
        yield from shell
        inner, side = side, 2 * side


class _RelationFinder:
    """Smoothness test and exponent vectors over a fixed factor base"""

    def __init__(self, K: CubicField, fb: Sequence[PrimeIdeal], verify: bool):
        self.K = K
        self.fb = list(fb)
        self.verify = verify
        self.by_p: Dict[int, List[Tuple[int, PrimeIdeal]]] = {}
        for idx, P in enumerate(self.fb):
            self.by_p.setdefault(P.p, []).append((idx, P))
        self.complete = {p: len(members) == len(split_prime(K, p))
                         for p, members in self.by_p.items()}

    def free_relations(self) -> Iterator[Element]:
        for p in sorted(self.by_p):
            if self.complete[p]:
                yield (p, 0, 0)

    def relation_for(self, theta: Element) -> Optional[Relation]:
        n = abs(element_norm(self.K, theta))
        exponents = [0] * len(self.fb)
        for p, members in self.by_p.items():
            if n % p:
                continue
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            remaining = k
            for pos, (idx, P) in enumerate(members):
                if self.complete[p] and pos == len(members) - 1:
                    if remaining % P.residue_degree:
                        return None
                    v = remaining // P.residue_degree
                else:
                    v = valuation(self.K, P, theta, remaining // P.residue_degree)
                exponents[idx] = v
                remaining -= v * P.residue_degree
            if remaining:
                return None
        if n != 1:
            return None
        if self.verify and not self.replays(theta, exponents):
            raise ClassGroupError(f"relation for {theta} failed ideal replay")
        return Relation(theta, tuple(exponents), self.K.log_embedding(theta))

    def replays(self, theta: Element, exponents: Sequence[int]) -> bool:
        product_ideal = FracIdeal.unit(self.K.key)
        for P, e in zip(self.fb, exponents):
            if e:
                product_ideal = ideal_mul(product_ideal, prime_power(self.K, P, e))
        return FracIdeal.principal(self.K.key, theta) == product_ideal


def verify_relation(K: CubicField, fb: Sequence[PrimeIdeal], relation: Relation) -> bool:
    """(element) == prod fb^exponents, by ideal arithmetic"""
    return _RelationFinder(K, fb, verify=False).replays(relation.element, relation.exponents)


def _full_rank(rows: Sequence[Sequence[int]], n: int) -> bool:
    if n == 0:
        return True
    if len(rows) < n:
        return False
    return Matrix([list(r) for r in rows]).rank() == n


def collect_relations(K: CubicField, fb: Sequence[PrimeIdeal], budget: int,
                      seed: int = 0, wanted: Optional[int] = None,
                      verify: bool = True) -> List[Relation]:
    """
    Relations from free relations (p) and then from primitive elements in
    expanding boxes, until `wanted` relations of full rank are found.

    Raises InsufficientRelations when `budget` candidates are examined first.
    """
    if not fb:
        return []
    finder = _RelationFinder(K, fb, verify)
    if wanted is None:
        wanted = len(fb) + K.unit_rank + DEFAULT_CONFIG['extra_relations']
    relations: List[Relation] = []
    seen = set()

    def offer(theta):
        if theta in seen:
            return
        seen.add(theta)
        rel = finder.relation_for(theta)
        if rel is not None:
            relations.append(rel)

    for theta in finder.free_relations():
        offer(theta)

    examined = 0
    for theta in candidate_elements(seed):
        if len(relations) >= wanted and _full_rank([r.exponents for r in relations], len(fb)):
            return relations
        if examined >= budget:
            break
        examined += 1
        offer(theta)

    if _full_rank([r.exponents for r in relations], len(fb)) and len(relations) >= wanted:
        return relations
    raise InsufficientRelations(
        f"{len(relations)} relations after {budget} candidates for {len(fb)} primes"
    )


# ---------------------------------------------------------------------------
# Unidades e regulador
# ---------------------------------------------------------------------------

def real_gcd(values: Sequence) -> Tuple[Optional[object], bool]:
    """
    Generator of the rank-1 lattice spanned by interval values (real Euclid).

    Remainders whose interval contains 0 are dropped. Returns (gcd, clean)
    where clean is False if some dropped remainder was not clearly smaller
    than the current divisor (precision too low to trust the drop).
    """
    vals = [abs(v) for v in values if 0 not in v]
    clean = True
    steps = 0
    while len(vals) > 1:
        steps += 1
        if steps > EUCLID_STEPS:
            return None, False
        vals.sort(key=lambda v: float(v.mid))
        b = vals[0]
        rest = []
        for a in vals[1:]:
            q = int(round(float((a / b).mid)))
            r = abs(a - q * b)
            if 0 in r:
                if not is_certain(4 * r < b):
                    clean = False
                continue
            rest.append(r)
        vals = [b] + rest
    return (vals[0] if vals else None), clean


def regulator_from_logs(log_vectors: Sequence[Sequence], unit_rank: int) -> Tuple[Optional[object], bool]:
    """Covolume of the lattice spanned by unit log vectors (interval entries)"""
    if unit_rank == 0:
        return iv.mpf(1), True
    if unit_rank == 1:
        return real_gcd([v[0] for v in log_vectors])
    minors = [u[0] * v[1] - u[1] * v[0] for u, v in combinations(log_vectors, 2)]
    return real_gcd(minors)


def _unit_logs(K: CubicField, vectors: Sequence[Sequence[int]], relations: Sequence[Relation]) -> List:
    r = K.unit_rank
    logs = []
    with interval_precision(K.precision):
        for k in vectors:
            logs.append([sum((c * rel.log_embedding[j] for c, rel in zip(k, relations) if c),
                             iv.mpf(0)) for j in range(r)])
    return logs


def _solve_element(K: CubicField, numerator: Element, denominator: Element) -> Optional[Element]:
    """numerator / denominator as an integral triple, or None"""
    M = Matrix(element_matrix(denominator, K.key))
    coords = M.LUsolve(Matrix(list(numerator)))
    if not all(c.is_integer for c in coords):
        return None
    return tuple(int(c) for c in coords)


def _element_power(K: CubicField, theta: Element, e: int) -> Element:
    result = (1, 0, 0)
    for _ in range(e):
        result = element_mul(result, theta, K.key)
    return result


def units_from_kernel(K: CubicField, kernel: Sequence[Sequence[int]],
                      relations: Sequence[Relation], limit: int = UNIT_EXPONENT_LIMIT) -> List[Element]:
    """Exact units prod theta_i^k_i for kernel vectors with small exponents"""
    units = []
    for k in kernel:
        if not any(k) or sum(abs(c) for c in k) > limit:
            continue
        num, den = (1, 0, 0), (1, 0, 0)
        for c, rel in zip(k, relations):
            if c > 0:
                num = element_mul(num, _element_power(K, rel.element, c), K.key)
            elif c < 0:
                den = element_mul(den, _element_power(K, rel.element, -c), K.key)
        unit = _solve_element(K, num, den)
        if unit is None or abs(element_norm(K, unit)) != 1:
            continue
        if not _canonical(unit):
            unit = tuple(-x for x in unit)
        if unit != (1, 0, 0) and unit not in units:
            units.append(unit)
    return units


# ---------------------------------------------------------------------------
# Fórmula analítica
# ---------------------------------------------------------------------------

def _root_count_mod(K: CubicField, p: int) -> int:
    f = gf_from_int_poly(K.defining.poly.high_first(), p)
    xp = gf_pow_mod([1, 0], p, f, p, ZZ)
    g = gf_gcd(f, gf_sub(xp, [1, 0], p, ZZ), p, ZZ)
    return len(g) - 1


def _local_factor(K: CubicField, p: int):
    """(1 - 1/p) / prod_{P | p} (1 - 1/N(P)) as an interval"""
    one = iv.mpf(1)
    if K.disc % p == 0:
        degrees = [g.degree for g, _ in factor_mod_p(K.defining.poly, p)]
    else:
        degrees = {3: [1, 1, 1], 1: [1, 2], 0: [3]}[_root_count_mod(K, p)]
    value = one - one / p
    for f in degrees:
        value = value / (one - one / iv.mpf(p) ** f)
    return value


def _analytic_interval(K: CubicField, euler_cutoff: int, tail_factor: Fraction):
    if euler_cutoff < 100:
        raise DomainError("the Euler product cutoff must be at least 100")
    cache = K._cache.setdefault('euler', {})
    key = (euler_cutoff, K.precision)
    with interval_precision(K.precision):
        if key not in cache:
            L = iv.mpf(1)
            for p in sieve.primerange(2, euler_cutoff + 1):
                L = L * _local_factor(K, int(p))
            cache[key] = L
        L = cache[key]
        # alargamento simétrico; (6/5) em 10^5, decaindo como cutoff^(-1/2)
        excess = (from_fraction(tail_factor) - 1) * iv.sqrt(iv.mpf(10 ** 5) / euler_cutoff)
        w = 1 + excess
        L = L * iv.mpf([1 / w, w])
        r1, r2 = K.signature
        value = 2 * iv.sqrt(abs(K.disc)) * L / (2 ** r1 * (2 * iv.pi) ** r2)
    return value


def analytic_hr_estimate(K: CubicField, euler_cutoff: int = 10 ** 5,
                         tail_factor=Fraction(6, 5)) -> ValidatedReal:
    """
    h R from the residue formula, w = 2, Euler product truncated at
    euler_cutoff and widened by a heuristic tail factor.
    """
    return ValidatedReal.from_interval(_analytic_interval(K, euler_cutoff, Fraction(tail_factor)))


def _certify(K: CubicField, h: int, regulator, config: Dict) -> Tuple[str, object]:
    """('certified' | 'outside' | 'straddle', ratio interval)"""
    E = _analytic_interval(K, config['euler_cutoff'], Fraction(config['tail_factor']))
    with interval_precision(K.precision):
        ratio = h * regulator / E
        square = ratio * ratio
        if is_certain(square > iv.mpf(1) / 2) and is_certain(square < 2):
            return 'certified', ratio
        if is_certain(square < iv.mpf(1) / 2) or is_certain(square > 2):
            return 'outside', ratio
    return 'straddle', ratio


# ---------------------------------------------------------------------------
# Grupo de classes
# ---------------------------------------------------------------------------

@dataclass
class _Attempt:
    outcome: str
    divisors: Tuple[int, ...] = ()
    regulator: Optional[object] = None
    ratio: Optional[object] = None
    units: Tuple[Element, ...] = ()
    error: Optional[ClassGroupError] = None


def _tight(x, bits: int = 32) -> bool:
    lo, hi = endpoints(x)
    return lo > 0 and (hi - lo) * 2 ** bits < lo


def _attempt(K: CubicField, config: Dict, budget: int, extra: int) -> _Attempt:
    minkowski = minkowski_bound(K)
    class_fb = factor_base(K, minkowski)
    fb = factor_base(K, max(minkowski, Fraction(config['auxiliary_bound'])))
    r = K.unit_rank

    wanted = len(fb) + r + extra
    try:
        relations = collect_relations(K, fb, budget, seed=config['seed'], wanted=wanted,
                                      verify=config['verify_relations'])
    except InsufficientRelations as exc:
        return _Attempt('exhausted', error=exc)

    A = IntMatrix.from_rows([list(rel.exponents) for rel in relations], cols=len(fb))
    D, U, _ = smith_normal_form(A)
    diagonal = D.diagonal()
    rank = sum(1 for d in diagonal if d)
    if class_fb:
        divisors = tuple(d for d in diagonal if d > 1)
    else:
        # Minkowski < 2: classe trivial demonstrada
        divisors = ()

    kernel = [list(U.row(i)) for i in range(rank, U.rows)]
    if kernel:
        kernel = lll_reduce(IntMatrix.from_rows(kernel)).to_rows()
    logs = _unit_logs(K, kernel, relations)
    regulator, clean = regulator_from_logs(logs, r)
    if regulator is None:
        return _Attempt('rank', error=RegulatorRankDeficient(
            f"kernel of {len(relations)} relations gives fewer than {r} independent units"))
    if not clean:
        return _Attempt('straddle', divisors, regulator)

    units = tuple(units_from_kernel(K, kernel, relations))
    outcome, ratio = _certify(K, math.prod(divisors), regulator, config)
    if outcome == 'straddle' and _tight(regulator):
        # largura vem da cauda do produto de Euler, não da precisão
        outcome = 'tail'
    return _Attempt(outcome, divisors, regulator, ratio, units)


def class_group(K: CubicField, config: Optional[Dict] = None) -> ClassGroupResult:
    """
    Class group with regulator and certification.

    Escalation: a ratio certainly outside (1/sqrt2, sqrt2) asks for more
    relations (budget doubles), a ratio straddling the boundary asks for more
    precision (bits double). What still fails at both maxima is labelled
    heuristic, or raises CertificationFailed in strict mode.
    """
    config = resolve_config(config)
    if config['use_oracle'] and minkowski_bound(K) <= config['oracle_cap']:
        return class_group_oracle(K, config)

    precision = config['precision_bits']
    budget = config['relation_budget']
    extra = config['extra_relations']
    last: Optional[_Attempt] = None
    while True:
        Kp = K.at_precision(precision)
        attempt = _attempt(Kp, config, budget, extra)
        if attempt.outcome == 'certified':
            return _result(attempt, STATUS_CERTIFIED, config, budget, precision)
        if attempt.regulator is not None:
            last = attempt
        if attempt.outcome == 'tail':
            break

        more_budget = budget * 2 <= config['max_relation_budget']
        more_bits = precision * 2 <= config['max_precision_bits']
        if attempt.outcome in ('outside', 'exhausted', 'rank') and more_budget:
            budget *= 2
            extra *= 2
        elif more_bits and attempt.outcome != 'exhausted':
            precision *= 2
        elif more_budget:
            budget *= 2
            extra *= 2
        else:
            break

    if attempt.outcome in ('exhausted', 'rank') and last is None:
        raise attempt.error
    if config['strict']:
        raise CertificationFailed(
            f"{K}: analytic ratio not certified at {precision} bits and budget {budget}"
        )
    return _result(last or attempt, STATUS_HEURISTIC, config, budget, precision)


def _result(attempt: _Attempt, status: str, config: Dict, budget: int, precision: int) -> ClassGroupResult:
    with interval_precision(precision):
        regulator = ValidatedReal.from_interval(attempt.regulator) if attempt.regulator is not None else None
        ratio = ValidatedReal.from_interval(attempt.ratio) if attempt.ratio is not None else None
    return ClassGroupResult(
        elementary_divisors=tuple(attempt.divisors),
        regulator=regulator,
        certification=Certification(status, ratio, config['euler_cutoff'], budget,
                                    precision, config['tail_factor']),
        units=tuple(attempt.units),
    )


# ---------------------------------------------------------------------------
# Oráculo exaustivo
# ---------------------------------------------------------------------------

def search_units(K: CubicField, max_t2: int = 4096) -> List[Element]:
    """
    Units found by short-vector search in O_K under T2, bound doubling from 8.

    Besides elements of norm +-1, two elements generating the same principal
    ideal give the unit theta1/theta2, which reaches much larger units.
    Stops once the units found have full rank.
    """
    r = K.unit_rank
    if r == 0:
        return []
    bound = 8
    while bound <= max_t2:
        G, inflation = t2_gram(K, IntMatrix.identity(3))
        units: List[Element] = []
        by_ideal: Dict[FracIdeal, Element] = {}
        for v in enumerate_short_vectors(G, bound * inflation):
            n = abs(element_norm(K, v))
            if n == 1:
                candidates = [v]
            elif n <= 64:
                I = FracIdeal.principal(K.key, v)
                if I not in by_ideal:
                    by_ideal[I] = v
                    continue
                candidates = [_solve_element(K, v, by_ideal[I])]
            else:
                continue
            for u in candidates:
                if u is None:
                    continue
                if not _canonical(u):
                    u = tuple(-x for x in u)
                if u != (1, 0, 0) and u not in units:
                    units.append(u)
        if units and _independent_units(K, units):
            return units
        bound *= 2
    raise RegulatorRankDeficient(f"{K}: no full-rank unit system with T2 <= {max_t2}")


def _log_vectors(K: CubicField, units: Sequence[Element]) -> List[List]:
    return [list(K.log_embedding(u)) for u in units]


def _independent_units(K: CubicField, units: Sequence[Element]) -> bool:
    regulator, _ = regulator_from_logs([v[:K.unit_rank] for v in _log_vectors(K, units)], K.unit_rank)
    return regulator is not None


def _reduction_spread(K: CubicField, units: Sequence[Element]) -> List:
    """
    S_v with every principal ideal (theta) having a generator whose balanced
    log vector satisfies |l_v| <= S_v.
    """
    logs = _log_vectors(K, units)
    r = K.unit_rank
    weights = K.place_weights
    with interval_precision(K.precision):
        if r == 1:
            generator, _ = real_gcd([v[0] for v in logs])
            # vetor log do gerador: (g, -g/2) nas posições real/complexa
            if K.signature == (1, 1):
                return [generator / 2, generator / 4]
            raise DomainError("rank-1 unit group needs a complex place")
        best = None
        for u, v in combinations(logs, 2):
            det = u[0] * v[1] - u[1] * v[0]
            if 0 in det:
                continue
            if best is None or float(abs(det).mid) < float(abs(best[0]).mid):
                best = (det, u, v)
        _, u, v = best
        return [(abs(u[i]) + abs(v[i])) / 2 for i in range(len(weights))]


def principal_generator(K: CubicField, I: FracIdeal, spread: Sequence) -> Optional[Element]:
    """theta with (theta) = I for an integral ideal I, or None if I is not principal"""
    if not I.is_integral():
        raise DomainError("principal_generator expects an integral ideal")
    N = int(I.norm)
    with interval_precision(K.precision):
        scale = iv.exp(iv.ln(iv.mpf(N)) * 2 / 3)
        radius = scale * sum((w * iv.exp(2 * s) for w, s in zip(K.place_weights, spread)), iv.mpf(0))
    bound = upper_fraction(radius)
    G, inflation = t2_gram(K, I.num)
    W = I.num
    for v in enumerate_short_vectors(G, bound * inflation):
        theta = tuple(sum(W[i, j] * v[j] for j in range(3)) for i in range(3))
        if abs(element_norm(K, theta)) == N:
            return theta
    return None


def _integral_ideals(K: CubicField, limit: int) -> List[FracIdeal]:
    primes = []
    for p in sieve.primerange(2, limit + 1):
        primes.extend(P for P in split_prime(K, int(p)) if P.norm <= limit)
    found = [FracIdeal.unit(K.key)]

    def extend(start: int, ideal: FracIdeal, norm: int):
        for i in range(start, len(primes)):
            P = primes[i]
            current, current_norm = ideal, norm
            while current_norm * P.norm <= limit:
                current = ideal_mul(current, P.hnf)
                current_norm *= P.norm
                found.append(current)
                extend(i + 1, current, current_norm)

    extend(0, found[0], 1)
    found.sort(key=lambda J: (J.norm, J.num.entries))
    return found


def _same_class(K: CubicField, I: FracIdeal, J: FracIdeal, spread) -> bool:
    # I ~ J  <=>  I * (N(J) J^-1) principal
    Jinv = ideal_inverse(J)
    n = int(J.norm)
    scaled = FracIdeal.from_columns(K.key, [[e * n for e in col] for col in Jinv.num.columns()],
                                    den=Jinv.den)
    return principal_generator(K, ideal_mul(I, scaled), spread) is not None


def group_structure(table: Sequence[Sequence[int]], identity: int = 0) -> Tuple[int, ...]:
    """Invariant factors (> 1) of a finite abelian group given by its Cayley table"""
    h = len(table)
    rows = [[1 if k == identity else 0 for k in range(h)]]
    for i in range(h):
        for j in range(i, h):
            row = [0] * h
            row[i] += 1
            row[j] += 1
            row[table[i][j]] -= 1
            rows.append(row)
    D, _, _ = smith_normal_form(IntMatrix.from_rows(rows, cols=h))
    return tuple(d for d in D.diagonal() if d > 1)


def class_group_oracle(K: CubicField, config: Optional[Dict] = None) -> ClassGroupResult:
    """
    Exhaustive class group for Minkowski bound <= oracle_cap: every integral
    ideal below the bound is sorted into classes by explicit principality
    tests, and the group law is read off a Cayley table.
    """
    config = resolve_config(config)
    bound = minkowski_bound(K)
    if bound > config['oracle_cap']:
        raise DomainError(f"Minkowski bound {float(bound):.2f} exceeds the oracle cap {config['oracle_cap']}")

    units = search_units(K, config['unit_search_max_t2'])
    spread = _reduction_spread(K, units) if units else []

    reps: List[FracIdeal] = []
    for I in _integral_ideals(K, math.floor(bound)):
        if not any(_same_class(K, I, J, spread) for J in reps):
            reps.append(I)

    h = len(reps)
    table = [[0] * h for _ in range(h)]
    for i in range(h):
        for j in range(i, h):
            prod_ideal = ideal_mul(reps[i], reps[j])
            k = next(k for k, J in enumerate(reps) if _same_class(K, prod_ideal, J, spread))
            table[i][j] = table[j][i] = k
    divisors = group_structure(table)

    logs = [v[:K.unit_rank] for v in _log_vectors(K, units)]
    regulator, _ = regulator_from_logs(logs, K.unit_rank)
    _, ratio = _certify(K, h, regulator, config)
    with interval_precision(K.precision):
        return ClassGroupResult(
            elementary_divisors=divisors,
            regulator=ValidatedReal.from_interval(regulator),
            certification=Certification(STATUS_ORACLE, ValidatedReal.from_interval(ratio),
                                        config['euler_cutoff'], 0, K.precision,
                                        config['tail_factor']),
            units=tuple(units[:K.unit_rank]) if K.unit_rank else (),
        )
