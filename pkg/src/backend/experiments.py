"""
Family experiments in batch
Executa grupos de classes sobre famílias enumeradas, agrega |Cl[2]|,
audita monogenizadores e produz as contagens de crescimento.
Progresso vai para stderr; CSV/JSON ficam com o chamador.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime
from fractions import Fraction
import math
import sys
import time
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

try:
    from .class_group import (
        STATUS_HEURISTIC,
        ClassGroupResult,
        class_group,
        resolve_config,
    )
    from .cubic_forms import (
        MONOGENISER_BOUND,
        MonicCubic,
        MonogeniserBoundViolation,
        forms_equivalent,
        monogeniser_multiplicity,
        quadratic_genus_two_rank,
        unit_constant_translates,
        unit_family_index,
    )
    from .exactmath import DomainError, RationalPoint2
    from .families import KIND_B112, KIND_F1, FamilySpec, describe_family
    from .number_field import make_field
except ImportError:
    from class_group import (
        STATUS_HEURISTIC,
        ClassGroupResult,
        class_group,
        resolve_config,
    )
    from cubic_forms import (
        MONOGENISER_BOUND,
        MonicCubic,
        MonogeniserBoundViolation,
        forms_equivalent,
        monogeniser_multiplicity,
        quadratic_genus_two_rank,
        unit_constant_translates,
        unit_family_index,
    )
    from exactmath import DomainError, RationalPoint2
    from families import KIND_B112, KIND_F1, FamilySpec, describe_family
    from number_field import make_field


RECORD_SCHEMA = 'cubiclab.records/1'
STATS_SCHEMA = 'cubiclab.stats/1'
AUDIT_SCHEMA = 'cubiclab.audit/1'

RECORD_COLUMNS = [
    'a', 'b', 'c', 'disc',
    'height_symmetric', 'height_weighted', 'height_covariant',
    'h', 'elementary_divisors', 'two_rank', 'cl2_size',
    'regulator', 'certification_status', 'error',
]

MAX_UNIT_TRANSLATES = 3


def _fraction_text(q: Optional[Fraction]) -> str:
    return '' if q is None else str(q)


def _fraction_or_none(text: str) -> Optional[Fraction]:
    return Fraction(text) if text not in ('', None) else None


# ---------------------------------------------------------------------------
# Registros por corpo
# ---------------------------------------------------------------------------

@dataclass
class FieldRecord:
    """One field of a family run: coefficients, heights and class group summary"""

    a: int
    b: int
    c: int
    disc: int
    heights: Dict[str, Fraction] = field(default_factory=dict)
    elementary_divisors: Tuple[int, ...] = ()
    two_rank: Optional[int] = None
    cl2_size: Optional[int] = None
    certification_status: str = ''
    regulator: Optional[float] = None
    error: Optional[str] = None

    @property
    def coefficients(self) -> Tuple[int, int, int]:
        return (self.a, self.b, self.c)

    @property
    def form(self) -> MonicCubic:
        return MonicCubic(self.a, self.b, self.c)

    @property
    def h(self) -> Optional[int]:
        if self.two_rank is None:
            return None
        return math.prod(self.elementary_divisors)

    @property
    def ok(self) -> bool:
        return self.error is None and self.two_rank is not None

    @property
    def counted(self) -> bool:
        """Enters the averages: computed and not heuristic"""
        return self.ok and self.certification_status != STATUS_HEURISTIC

    def with_result(self, result: ClassGroupResult) -> 'FieldRecord':
        return replace(
            self,
            elementary_divisors=tuple(result.elementary_divisors),
            two_rank=result.two_rank,
            cl2_size=result.cl2_size,
            certification_status=result.status,
            regulator=result.regulator.mid if result.regulator else None,
            error=None,
        )

    def to_dict(self) -> Dict:
        return {
            'a': self.a, 'b': self.b, 'c': self.c, 'disc': self.disc,
            'heights': {k: str(v) for k, v in sorted(self.heights.items())},
            'elementary_divisors': list(self.elementary_divisors),
            'h': self.h,
            'two_rank': self.two_rank,
            'cl2_size': self.cl2_size,
            'certification_status': self.certification_status,
            'regulator': self.regulator,
            'error': self.error,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'FieldRecord':
        return cls(
            a=int(data['a']), b=int(data['b']), c=int(data['c']), disc=int(data['disc']),
            heights={k: Fraction(v) for k, v in data.get('heights', {}).items()},
            elementary_divisors=tuple(int(d) for d in data.get('elementary_divisors', ())),
            two_rank=data.get('two_rank'),
            cl2_size=data.get('cl2_size'),
            certification_status=data.get('certification_status', ''),
            regulator=data.get('regulator'),
            error=data.get('error'),
        )

    def to_row(self) -> Dict[str, str]:
        """CSV row, every value already a string"""
        computed = self.two_rank is not None
        return {
            'a': str(self.a), 'b': str(self.b), 'c': str(self.c), 'disc': str(self.disc),
            'height_symmetric': _fraction_text(self.heights.get('symmetric')),
            'height_weighted': _fraction_text(self.heights.get('weighted')),
            'height_covariant': _fraction_text(self.heights.get('covariant')),
            'h': str(self.h) if computed else '',
            'elementary_divisors': ';'.join(str(d) for d in self.elementary_divisors),
            'two_rank': str(self.two_rank) if computed else '',
            'cl2_size': str(self.cl2_size) if computed else '',
            'regulator': repr(self.regulator) if self.regulator is not None else '',
            'certification_status': self.certification_status,
            'error': self.error or '',
        }

    @classmethod
    def from_row(cls, row: Dict[str, str]) -> 'FieldRecord':
        heights = {}
        for name in ('symmetric', 'weighted', 'covariant'):
            value = _fraction_or_none(row.get(f'height_{name}', ''))
            if value is not None:
                heights[name] = value
        divisors = row.get('elementary_divisors', '')
        two_rank = row.get('two_rank', '')
        cl2 = row.get('cl2_size', '')
        regulator = row.get('regulator', '')
        return cls(
            a=int(row['a']), b=int(row['b']), c=int(row['c']), disc=int(row['disc']),
            heights=heights,
            elementary_divisors=tuple(int(d) for d in divisors.split(';') if d),
            two_rank=int(two_rank) if two_rank != '' else None,
            cl2_size=int(cl2) if cl2 != '' else None,
            certification_status=row.get('certification_status', ''),
            regulator=float(regulator) if regulator != '' else None,
            error=row.get('error') or None,
        )


def compute_record(coefficients: Tuple[int, int, int], heights: Dict[str, Fraction],
                   class_group_config: Dict) -> FieldRecord:
    """Class group of one field; failures go into record.error"""
    f = MonicCubic(*coefficients)
    record = FieldRecord(f.a, f.b, f.c, f.discriminant, dict(heights))
    try:
        K = make_field(f, class_group_config['precision_bits'])
        result = class_group(K, class_group_config)
    except Exception as e:
        return replace(record, error=f"{type(e).__name__}: {e}")
    return record.with_result(result)


def _compute_job(job):
    return compute_record(*job)


# ---------------------------------------------------------------------------
# Estatísticas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyStats:
    count: int
    counted: int
    avg_cl2: Optional[Fraction]
    avg_cl2_sq: Optional[Fraction]
    proportion_rank1: Optional[Fraction]
    proportion_rank_ge1: Optional[Fraction]
    proportion_rank1_or_2: Optional[Fraction]
    excluded_heuristic_count: int
    error_count: int
    heuristic_warning: bool = False

    @property
    def empty(self) -> bool:
        return self.count == 0

    @classmethod
    def from_records(cls, records: Sequence[FieldRecord],
                     heuristic_threshold: Fraction = Fraction(1, 20)) -> 'FamilyStats':
        """Aggregates over certified and oracle records; heuristic ones are only counted"""
        counted = [r for r in records if r.counted]
        heuristic = sum(1 for r in records if r.ok and not r.counted)
        errors = sum(1 for r in records if not r.ok)
        n = len(counted)

        def share(predicate) -> Optional[Fraction]:
            return Fraction(sum(1 for r in counted if predicate(r)), n) if n else None

        warning = bool(records) and Fraction(heuristic, len(records)) > heuristic_threshold
        return cls(
            count=len(records),
            counted=n,
            avg_cl2=Fraction(sum(r.cl2_size for r in counted), n) if n else None,
            avg_cl2_sq=Fraction(sum(r.cl2_size ** 2 for r in counted), n) if n else None,
            proportion_rank1=share(lambda r: r.two_rank == 1),
            proportion_rank_ge1=share(lambda r: r.two_rank >= 1),
            proportion_rank1_or_2=share(lambda r: r.two_rank in (1, 2)),
            excluded_heuristic_count=heuristic,
            error_count=errors,
            heuristic_warning=warning,
        )

    def moment_vector(self) -> Optional[RationalPoint2]:
        """(first, second) moment of |Cl[2]|, ready for MomentProblem.from_point"""
        if self.avg_cl2 is None:
            return None
        return RationalPoint2(self.avg_cl2, self.avg_cl2_sq)

    def to_dict(self) -> Dict:
        return {
            'schema': STATS_SCHEMA,
            'count': self.count,
            'counted': self.counted,
            'avg_cl2': _fraction_text(self.avg_cl2) or None,
            'avg_cl2_sq': _fraction_text(self.avg_cl2_sq) or None,
            'proportion_rank1': _fraction_text(self.proportion_rank1) or None,
            'proportion_rank_ge1': _fraction_text(self.proportion_rank_ge1) or None,
            'proportion_rank1_or_2': _fraction_text(self.proportion_rank1_or_2) or None,
            'excluded_heuristic_count': self.excluded_heuristic_count,
            'error_count': self.error_count,
            'heuristic_warning': self.heuristic_warning,
            'empty': self.empty,
        }


# ---------------------------------------------------------------------------
# Execução em batch
# ---------------------------------------------------------------------------

class FamilyExperiment:
    """Runs class groups over a family, in enumeration order"""

    DEFAULT_CONFIG = {
        'seed': 0,
        'workers': 1,
        'heuristic_threshold': Fraction(1, 20),
        'escalate_precision': True,
        'verbose': True,
        'output_folder': None,
        'log_name': 'experiment_log.txt',
        'class_group': {},
    }

    def __init__(self, config: Optional[Dict] = None):
        config = dict(config or {})
        unknown = set(config) - set(self.DEFAULT_CONFIG)
        if unknown:
            raise DomainError(f"unknown experiment options: {sorted(unknown)}")
        self.config = {**self.DEFAULT_CONFIG, **config}
        if self.config['workers'] < 1:
            raise DomainError("workers must be >= 1")
        self.records: List[FieldRecord] = []
        self.stats: Optional[FamilyStats] = None
        self.log_file: Optional[Path] = None

    # -- saída ---------------------------------------------------------------

    def _say(self, message: str = ''):
        if self.config['verbose']:
            print(message, file=sys.stderr)

    def _log(self, line: str):
        if self.log_file is not None:
            with open(self.log_file, 'a', encoding='utf-8') as log:
                log.write(line + "\n")

    def _class_group_config(self) -> Dict:
        overrides = dict(self.config['class_group'])
        overrides['seed'] = self.config['seed']
        return resolve_config(overrides)

    def _open_log(self, spec: FamilySpec, cg_config: Dict, total: int):
        folder = self.config['output_folder']
        if folder is None:
            return
        folder = Path(folder)
        folder.mkdir(parents=True, exist_ok=True)
        self.log_file = folder / self.config['log_name']
        self._log("=" * 80)
        self._log("CUBICLAB FAMILY EXPERIMENT LOG")
        self._log("=" * 80)
        self._log(f"Start time: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        self._log(f"Family: {describe_family(spec)}")
        self._log(f"Fields: {total}")
        self._log(f"Seed: {self.config['seed']}")
        self._log(f"Precision: {cg_config['precision_bits']} bits")
        self._log(f"Workers: {self.config['workers']}")
        self._log("=" * 80 + "\n")

    # -- cálculo -------------------------------------------------------------

    def _compute(self, jobs: List[Tuple]) -> Iterable[FieldRecord]:
        if self.config['workers'] == 1 or len(jobs) < 2:
            return map(_compute_job, jobs)
        # map devolve na ordem de submissão, mesmo que os workers terminem fora de ordem
        executor = ProcessPoolExecutor(max_workers=self.config['workers'])
        try:
            return list(executor.map(_compute_job, jobs, chunksize=4))
        finally:
            executor.shutdown()

    def _run_jobs(self, jobs: List[Tuple], label: str) -> List[FieldRecord]:
        records = []
        total = len(jobs)
        for idx, record in enumerate(self._compute(jobs), 1):
            records.append(record)
            name = f"({record.a}, {record.b}, {record.c}) disc {record.disc}"
            if record.error:
                self._say(f"[{idx}/{total}] {name} [ERROR] {record.error}")
                self._log(f"{label} {name}: ERROR {record.error}")
            else:
                divisors = list(record.elementary_divisors)
                self._say(f"[{idx}/{total}] {name} [OK] Cl = {divisors} "
                          f"rk2 = {record.two_rank} ({record.certification_status})")
                self._log(f"{label} {name}: divisors={divisors} two_rank={record.two_rank} "
                          f"status={record.certification_status}")
        return records

    def run(self, spec: FamilySpec) -> Tuple[List[FieldRecord], FamilyStats]:
        cg_config = self._class_group_config()
        members = list(spec.members())
        self._open_log(spec, cg_config, len(members))

        self._say("=" * 80)
        self._say("STARTING FAMILY EXPERIMENT")
        self._say("=" * 80)
        self._say(f"{describe_family(spec)}: {len(members)} fields\n")
        start_time = time.time()

        jobs = [(m.coefficients, m.heights, cg_config) for m in members]
        records = self._run_jobs(jobs, 'field')

        threshold = self.config['heuristic_threshold']
        stats = FamilyStats.from_records(records, threshold)
        if stats.heuristic_warning and self.config['escalate_precision']:
            records = self._escalate(records, cg_config)
            stats = FamilyStats.from_records(records, threshold)
        if stats.heuristic_warning:
            self._say(f"[WARN] {stats.excluded_heuristic_count} of {stats.count} fields "
                      f"remain heuristic; they are excluded from the averages")
            self._log(f"WARNING: {stats.excluded_heuristic_count} heuristic fields")

        total_time = time.time() - start_time
        self.records, self.stats = records, stats
        self._say("\n" + "=" * 80)
        self._say("EXPERIMENT COMPLETE!")
        self._say("=" * 80)
        self._say(f"Fields: {stats.count}, counted: {stats.counted}, "
                  f"heuristic: {stats.excluded_heuristic_count}, errors: {stats.error_count}")
        if stats.avg_cl2 is not None:
            self._say(f"Average |Cl[2]|: {stats.avg_cl2} ({float(stats.avg_cl2):.4f})")
        self._say(f"Total time: {total_time:.1f} s")
        self._say("=" * 80)

        self._log("\n" + "=" * 80)
        self._log(f"End time: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        self._log(f"Fields: {stats.count}  counted: {stats.counted}  "
                  f"heuristic: {stats.excluded_heuristic_count}  errors: {stats.error_count}")
        self._log(f"Total time: {total_time:.1f} s")
        self._log("=" * 80)
        return records, stats

    def _escalate(self, records: List[FieldRecord], cg_config: Dict) -> List[FieldRecord]:
        """Second pass over heuristic fields with twice the starting precision"""
        bits = cg_config['precision_bits'] * 2
        escalated = {**cg_config, 'precision_bits': bits,
                     'max_precision_bits': max(cg_config['max_precision_bits'], bits)}
        positions = [i for i, r in enumerate(records) if r.ok and not r.counted]
        self._say(f"\n[WARN] {len(positions)} heuristic fields; retrying at {bits} bits")
        self._log(f"Escalating {len(positions)} heuristic fields to {bits} bits")
        jobs = [(records[i].coefficients, records[i].heights, escalated) for i in positions]
        redone = self._run_jobs(jobs, 'retry')
        records = list(records)
        for i, record in zip(positions, redone):
            records[i] = record
        return records


def run_family_experiment(spec: FamilySpec, config: Optional[Dict] = None
                          ) -> Tuple[List[FieldRecord], FamilyStats]:
    return FamilyExperiment(config).run(spec)


# ---------------------------------------------------------------------------
# Crescimento
# ---------------------------------------------------------------------------

def _window(kind: str, X: int, signature_filter: str) -> FamilySpec:
    if kind == KIND_B112:
        # |disc| < X pede altura simétrica <= X^(1/4)
        return FamilySpec(KIND_B112, signature_filter, 'symmetric', math.isqrt(math.isqrt(X)))
    if kind == KIND_F1:
        return FamilySpec(KIND_F1, signature_filter, 'covariant', X)
    raise DomainError(f"unknown family {kind!r}")


def growth_count(kind: str, X, signature_filter: str = 'both',
                 class_group_config: Optional[Dict] = None) -> int:
    """
    Isomorphism classes with |disc| < X and 2-rank 1 inside the family
    window for X. Equivalent forms are counted once; heuristic class groups
    are left out.
    """
    if X < 1:
        raise DomainError("growth counts need X >= 1")
    X = math.floor(X)
    cg_config = resolve_config(class_group_config)
    seen: Dict[int, List[MonicCubic]] = {}
    count = 0
    for member in _window(kind, X, signature_filter).members():
        if abs(member.disc) >= X:
            continue
        form = member.form.as_form()
        same_disc = seen.setdefault(member.disc, [])
        if any(forms_equivalent(form, other.as_form()) for other in same_disc):
            continue
        same_disc.append(member.form)
        result = class_group(member.field, cg_config)
        if result.status != STATUS_HEURISTIC and result.two_rank == 1:
            count += 1
    return count


def growth_slope(kind: str, X, signature_filter: str = 'both',
                 class_group_config: Optional[Dict] = None) -> Optional[float]:
    """log-log slope of growth_count between X and 4X; None if a count is zero"""
    low = growth_count(kind, X, signature_filter, class_group_config)
    high = growth_count(kind, 4 * X, signature_filter, class_group_config)
    if low == 0 or high == 0:
        return None
    return float(np.log(high / low) / np.log(4.0))


# ---------------------------------------------------------------------------
# Auditoria de monogenizadores
# ---------------------------------------------------------------------------

@dataclass
class MonogeniserAudit:
    search_bound: int
    rows: List[Dict] = field(default_factory=list)

    @property
    def max_multiplicity(self) -> int:
        return max((r['multiplicity'] for r in self.rows), default=0)

    @property
    def max_translates(self) -> int:
        return max((r['unit_translates'] for r in self.rows), default=0)

    @property
    def passed(self) -> bool:
        return self.max_multiplicity <= MONOGENISER_BOUND and self.max_translates <= MAX_UNIT_TRANSLATES

    def to_dict(self) -> Dict:
        return {
            'schema': AUDIT_SCHEMA,
            'search_bound': self.search_bound,
            'fields': len(self.rows),
            'max_multiplicity': self.max_multiplicity,
            'max_unit_translates': self.max_translates,
            'passed': self.passed,
            'rows': self.rows,
        }


def audit_monogenisers(sample: Sequence, search_bound: int) -> MonogeniserAudit:
    """
    For each field: translation classes of x^3 + a x^2 + b x + 1 inside the
    search window that define it, and the translates with constant term 1.
    More than 60 classes or 3 translates raises MonogeniserBoundViolation.
    """
    if search_bound < 0:
        raise DomainError("search_bound must be >= 0")
    audit = MonogeniserAudit(search_bound)
    if not sample:
        return audit
    index = unit_family_index(search_bound)
    for item in sample:
        f = MonicCubic(*item.coefficients)
        multiplicity, witnesses = monogeniser_multiplicity(f, search_bound, index)
        translates = unit_constant_translates(f)
        if multiplicity > MONOGENISER_BOUND or len(translates) > MAX_UNIT_TRANSLATES:
            raise MonogeniserBoundViolation(
                f"{f}: {multiplicity} classes, {len(translates)} unit translates"
            )
        audit.rows.append({
            'coefficients': list(f.coefficients),
            'disc': f.discriminant,
            'multiplicity': multiplicity,
            'witnesses': [[g.a, g.b] for g in witnesses],
            'unit_translates': len(translates),
        })
    return audit


# ---------------------------------------------------------------------------
# Linha de base por gêneros
# ---------------------------------------------------------------------------

def genus_baseline(d_range: Iterable[int]) -> pd.DataFrame:
    """(d, fundamental discriminant, genus 2-rank) for negative squarefree d; others skipped"""
    rows = []
    for d in d_range:
        try:
            rank = quadratic_genus_two_rank(d)
        except DomainError:
            continue
        rows.append({'d': d, 'fundamental_disc': d if d % 4 == 1 else 4 * d,
                     'genus_two_rank': rank})
    return pd.DataFrame(rows, columns=['d', 'fundamental_disc', 'genus_two_rank'])
