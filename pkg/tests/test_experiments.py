from fractions import Fraction

import pytest

from src.backend import experiments
from src.backend.class_group import Certification, ClassGroupResult, InsufficientRelations
from src.backend.cubic_forms import MonicCubic, MonogeniserBoundViolation, translation_normal_form
from src.backend.exactmath import DomainError
from src.backend.experiments import (
    FamilyExperiment,
    FamilyStats,
    FieldRecord,
    audit_monogenisers,
    genus_baseline,
    growth_count,
    growth_slope,
    run_family_experiment,
)
from src.backend.families import FamilySpec
from src.backend.moments import MomentProblem, is_feasible

QUIET = {'verbose': False}


def _record(two_rank, status='certified', error=None):
    divisors = (2,) * two_rank
    return FieldRecord(0, 1, -1, -31, {}, divisors, two_rank, 2 ** two_rank, status, 0.38, error)


def _fake_result(status, divisors=()):
    return ClassGroupResult(divisors, None, Certification(status, None, 0, 0, 128, '6/5'))


@pytest.fixture(scope="module")
def small_run():
    return run_family_experiment(FamilySpec('B112', 'both', 'symmetric', 6), QUIET)


# ---------------------------------------------------------------------------
# Registros e estatísticas
# ---------------------------------------------------------------------------

def test_record_row_round_trip():
    record = FieldRecord(1, -2, -1, 49, {'covariant': Fraction(343)}, (), 0, 1, 'certified', 0.5255)
    assert FieldRecord.from_row(record.to_row()) == record
    assert FieldRecord.from_dict(record.to_dict()) == record
    assert record.to_row()['height_symmetric'] == ''


def test_failed_record_row():
    record = FieldRecord(0, 0, 1, -27, error='DomainError: reducible')
    row = record.to_row()
    assert row['h'] == '' and row['two_rank'] == ''
    assert FieldRecord.from_row(row) == record
    assert not record.ok and not record.counted


def test_stats_from_records():
    records = [_record(0), _record(1), _record(1, 'heuristic'), _record(0, error='boom'), _record(2, 'oracle')]
    records[3] = FieldRecord(0, 1, -1, -31, error='boom')
    stats = FamilyStats.from_records(records)
    assert stats.count == 5
    assert stats.counted == 3
    assert stats.avg_cl2 == Fraction(1 + 2 + 4, 3)
    assert stats.avg_cl2_sq == Fraction(1 + 4 + 16, 3)
    assert stats.proportion_rank1 == Fraction(1, 3)
    assert stats.proportion_rank_ge1 == Fraction(2, 3)
    assert stats.proportion_rank1_or_2 == Fraction(2, 3)
    assert stats.excluded_heuristic_count == 1
    assert stats.error_count == 1
    assert stats.heuristic_warning
    assert not stats.empty


def test_empty_stats_are_flagged():
    stats = FamilyStats.from_records([])
    assert stats.empty
    assert stats.avg_cl2 is None and stats.proportion_rank1 is None
    assert stats.to_dict()['empty'] is True


def test_stats_feed_moment_problem():
    stats = FamilyStats.from_records([_record(0), _record(0), _record(1), _record(1)])
    point = stats.moment_vector()
    assert (point.x, point.y) == (Fraction(3, 2), Fraction(5, 2))
    problem = MomentProblem.from_point(point)
    assert problem.moment_point == point
    assert is_feasible(problem).feasible
    assert not is_feasible(MomentProblem.from_point(point, excluded=[1])).feasible


# ---------------------------------------------------------------------------
# Execução
# ---------------------------------------------------------------------------

def test_small_family_run(small_run):
    records, stats = small_run
    by_pair = {(r.a, r.b): r for r in records}
    assert by_pair[(2, 1)].disc == -23
    assert by_pair[(2, 1)].h == 1 and by_pair[(2, 1)].two_rank == 0
    assert by_pair[(5, 6)].disc == 49
    assert by_pair[(5, 6)].h == 1 and by_pair[(5, 6)].two_rank == 0
    assert all(r.cl2_size == 2 ** r.two_rank for r in records if r.ok)
    assert stats.count == len(records)


def test_stats_recompute_from_records(small_run):
    records, stats = small_run
    assert FamilyStats.from_records(records) == stats
    counted = [r for r in records if r.counted]
    assert counted
    assert stats.avg_cl2 == Fraction(sum(r.cl2_size for r in counted), len(counted))


def test_run_is_deterministic(small_run):
    records, stats = small_run
    again, again_stats = run_family_experiment(FamilySpec('B112', 'both', 'symmetric', 6), QUIET)
    assert [r.to_row() for r in again] == [r.to_row() for r in records]
    assert again_stats.to_dict() == stats.to_dict()


def test_empty_family_run():
    records, stats = run_family_experiment(FamilySpec('B112', 'both', 'symmetric', 0), QUIET)
    assert records == []
    assert stats.count == 0 and stats.empty


def test_field_errors_do_not_abort(monkeypatch):
    def failing(K, config):
        if K.disc == 49:
            raise InsufficientRelations("no relations")
        return _fake_result('certified')

    monkeypatch.setattr(experiments, 'class_group', failing)
    records, stats = run_family_experiment(FamilySpec('B112', 'both', 'symmetric', 6), QUIET)
    failed = [r for r in records if r.error]
    assert failed and all(r.disc == 49 for r in failed)
    assert 'InsufficientRelations' in failed[0].error
    assert stats.error_count == len(failed)
    assert stats.counted == len(records) - len(failed)


def test_heuristic_fields_escalate_precision(monkeypatch):
    seen = []

    def by_precision(K, config):
        seen.append(config['precision_bits'])
        return _fake_result('heuristic' if config['precision_bits'] < 256 else 'certified')

    monkeypatch.setattr(experiments, 'class_group', by_precision)
    records, stats = run_family_experiment(FamilySpec('B112', 'both', 'symmetric', 6), QUIET)
    assert 256 in seen
    assert stats.excluded_heuristic_count == 0
    assert not stats.heuristic_warning
    assert all(r.certification_status == 'certified' for r in records)


def test_heuristic_warning_without_escalation(monkeypatch):
    monkeypatch.setattr(experiments, 'class_group', lambda K, config: _fake_result('heuristic'))
    records, stats = run_family_experiment(FamilySpec('B112', 'both', 'symmetric', 6),
                                           {'verbose': False, 'escalate_precision': False})
    assert stats.heuristic_warning
    assert stats.excluded_heuristic_count == stats.count == len(records)
    assert stats.avg_cl2 is None


def test_experiment_log_file(monkeypatch, tmp_path):
    monkeypatch.setattr(experiments, 'class_group', lambda K, config: _fake_result('certified'))
    experiment = FamilyExperiment({'verbose': False, 'output_folder': tmp_path / 'run', 'seed': 4})
    records, _ = experiment.run(FamilySpec('B112', 'both', 'symmetric', 6))
    text = (tmp_path / 'run' / 'experiment_log.txt').read_text(encoding='utf-8')
    assert text.startswith("=" * 80)
    assert "CUBICLAB FAMILY EXPERIMENT LOG" in text
    assert "Seed: 4" in text
    assert "Total time:" in text
    assert text.count("field (") == len(records)


def test_progress_goes_to_stderr(monkeypatch, capsys):
    monkeypatch.setattr(experiments, 'class_group', lambda K, config: _fake_result('certified'))
    run_family_experiment(FamilySpec('B112', 'both', 'symmetric', 6))
    captured = capsys.readouterr()
    assert captured.out == ''
    assert "STARTING FAMILY EXPERIMENT" in captured.err
    assert "[OK]" in captured.err


def test_experiment_rejects_unknown_options():
    with pytest.raises(DomainError):
        FamilyExperiment({'wokers': 2})
    with pytest.raises(DomainError):
        FamilyExperiment({'workers': 0})


@pytest.mark.slow
def test_worker_pool_preserves_order(small_run):
    records, _ = small_run
    pooled, _ = run_family_experiment(FamilySpec('B112', 'both', 'symmetric', 6),
                                      {'verbose': False, 'workers': 2})
    assert [r.to_row() for r in pooled] == [r.to_row() for r in records]


@pytest.mark.slow
def test_totally_real_cap_forty():
    spec = FamilySpec('B112', 'totally_real', 'symmetric', 40)
    records, stats = run_family_experiment(spec, QUIET)
    assert stats.count > 0
    assert stats.avg_cl2 <= Fraction(7, 2)
    assert 0 <= stats.proportion_rank1 <= 1
    assert FamilyStats.from_records(records) == stats


# ---------------------------------------------------------------------------
# Crescimento
# ---------------------------------------------------------------------------

def test_growth_below_smallest_discriminant():
    assert growth_count('B112', 20) == 0
    assert growth_slope('B112', 20) is None


def test_growth_is_monotone():
    assert growth_count('B112', 300) <= growth_count('B112', 1000)


def test_growth_rejects_small_x():
    with pytest.raises(DomainError):
        growth_count('B112', 0)
    with pytest.raises(DomainError):
        growth_count('B212', 100)


# ---------------------------------------------------------------------------
# Auditoria de monogenizadores
# ---------------------------------------------------------------------------

def test_audit_empty_sample():
    audit = audit_monogenisers([], 10)
    assert audit.rows == []
    assert audit.passed
    assert audit.to_dict()['max_multiplicity'] == 0


def test_audit_smallest_complex_field():
    audit = audit_monogenisers([FieldRecord(0, -1, -1, -23)], 10)
    row = audit.rows[0]
    assert row['multiplicity'] >= 2
    classes = {translation_normal_form(MonicCubic(a, b, 1)) for a, b in row['witnesses']}
    assert {MonicCubic(1, 2, 1), MonicCubic(2, 1, 1)} <= classes
    assert row['unit_translates'] <= 3
    assert audit.passed


def test_audit_zero_search_bound():
    audit = audit_monogenisers([FieldRecord(0, -1, -1, -23)], 0)
    assert audit.rows[0]['multiplicity'] == 0


def test_audit_raises_on_violation(monkeypatch):
    monkeypatch.setattr(experiments, 'monogeniser_multiplicity', lambda f, bound, index: (61, []))
    with pytest.raises(MonogeniserBoundViolation):
        audit_monogenisers([FieldRecord(0, -1, -1, -23)], 5)


@pytest.mark.slow
def test_audit_b112_cap_25():
    members = list(FamilySpec('B112', 'both', 'symmetric', 25).members())
    audit = audit_monogenisers(members, 25)
    assert len(audit.rows) == len(members)
    assert audit.max_multiplicity <= 60
    assert audit.max_translates <= 3


# ---------------------------------------------------------------------------
# Gêneros
# ---------------------------------------------------------------------------

def test_genus_baseline_table():
    table = genus_baseline(range(-1, -11, -1))
    assert list(table.columns) == ['d', 'fundamental_disc', 'genus_two_rank']
    assert list(table['d']) == [-1, -2, -3, -5, -6, -7, -10]
    assert list(table['fundamental_disc']) == [-4, -8, -3, -20, -24, -7, -40]
    assert list(table['genus_two_rank']) == [0, 0, 0, 1, 1, 0, 1]


def test_genus_baseline_empty_range():
    assert genus_baseline([]).empty
