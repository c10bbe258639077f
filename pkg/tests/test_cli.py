import json
from pathlib import Path

import pytest

from src.backend.experiments import FamilyStats
from src.backend.report_generator import StructuredReportGenerator
from src.cli.main_cli import main

REFERENCE = Path(__file__).resolve().parent.parent / 'exemplos_teste' / 'reference_fields.csv'


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# enumerate
# ---------------------------------------------------------------------------

def test_enumerate_empty_cap_is_header_only(capsys):
    code, out, _ = run(capsys, 'enumerate', '--family', 'b112', '--cap', '0', '--signature', 'both')
    assert code == 0
    assert out.splitlines() == ['# schema: cubiclab.enumerate/1',
                                'a,b,c,disc,height_symmetric,height_weighted,height_covariant']


def test_enumerate_b112(capsys, tmp_path):
    path = tmp_path / 'b112.csv'
    code, out, _ = run(capsys, 'enumerate', '--family', 'b112', '--cap', '6', '--signature', 'both',
                       '--out', str(path))
    assert code == 0 and out == ''
    rows = path.read_text(encoding='utf-8').splitlines()
    assert any(row.startswith('2,1,1,-23,') for row in rows)


def test_enumerate_invalid_ordering(capsys):
    code, _, err = run(capsys, 'enumerate', '--family', 'f1', '--ordering', 'weighted', '--cap', '10')
    assert code == 2
    assert '[ERROR]' in err


@pytest.mark.parametrize("argv", [
    ['enumerate', '--family', 'b113', '--cap', '5'],
    ['enumerate', '--family', 'b112'],
    ['enumerate', '--family', 'b112', '--cap', '2.5'],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


# ---------------------------------------------------------------------------
# classgroup
# ---------------------------------------------------------------------------

def test_classgroup_json(capsys):
    code, out, _ = run(capsys, 'classgroup', '--poly', '0,-1,-1')
    data = json.loads(out)
    assert code == 0
    assert data['schema'] == 'cubiclab.classgroup/1'
    assert data['h'] == 1
    assert data['disc'] == -23
    assert data['certification']['status'] == 'certified'


def test_classgroup_oracle(capsys):
    code, out, _ = run(capsys, 'classgroup', '--poly', '0,4,-1', '--oracle')
    data = json.loads(out)
    assert code == 0
    assert data['elementary_divisors'] == [2]
    assert data['certification']['status'] == 'oracle'


def test_classgroup_reducible(capsys):
    code, out, err = run(capsys, 'classgroup', '--poly', '1,1,1')
    assert code == 2
    assert out == ''
    assert 'reducible' in err


def test_classgroup_reference_agreement(capsys):
    code, _, _ = run(capsys, 'classgroup', '--poly', '0,4,-1', '--oracle', '--reference', str(REFERENCE))
    assert code == 0


def test_classgroup_reference_mismatch(capsys, tmp_path):
    wrong = tmp_path / 'wrong.csv'
    wrong.write_text('a,b,c,disc,h,divisors\n0,4,-1,-283,4,4\n', encoding='utf-8')
    code, out, err = run(capsys, 'classgroup', '--poly', '0,4,-1', '--oracle', '--reference', str(wrong))
    assert code == 3
    assert json.loads(out)['h'] == 2
    assert 'mismatch' in err


def test_classgroup_cache_round_trip(capsys, tmp_path):
    cache = tmp_path / 'cache.jsonl'
    _, first, _ = run(capsys, 'classgroup', '--poly', '0,-1,-1', '--cache', str(cache))
    _, second, _ = run(capsys, 'classgroup', '--poly', '0,-1,-1', '--cache', str(cache))
    assert first == second
    assert len(cache.read_text(encoding='utf-8').splitlines()) == 1


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

def test_moments_infeasible_line(capsys):
    code, out, _ = run(capsys, 'moments', '--exclude', '1', '--m1', '3/2', '--m2', '3')
    data = json.loads(out)
    assert code == 1
    assert data['certificate']['verdict'] == 'infeasible'
    assert (data['certificate']['slope'], data['certificate']['intercept']) == ('5', '-4')


def test_moments_feasible_boundary(capsys):
    code, out, _ = run(capsys, 'moments', '--exclude', '1', '--m1', '2', '--m2', '6')
    data = json.loads(out)
    assert code == 0
    assert data['certificate']['witness'] == {'0': '2/3', '2': '1/3'}


def test_moments_rank_one_or_two(capsys):
    code, _, _ = run(capsys, 'moments', '--exclude', '1,2', '--m1', '2', '--m2', '6')
    assert code == 1


def test_moments_rejects_decimals(capsys):
    code, _, _ = run(capsys, 'moments', '--m1', '1.5', '--m2', '3')
    assert code == 2


def test_moments_scenario(capsys):
    code, out, _ = run(capsys, 'moments', '--scenario', 'rank-two-counterpart')
    data = json.loads(out)
    assert code == 1
    assert data['expected'] == 'infeasible'
    assert data['problem']['min_exponent'] == 1


def test_moments_min_mass(capsys):
    code, out, _ = run(capsys, 'moments', '--m1', '3/2', '--m2', '3', '--min-mass-at', '1')
    data = json.loads(out)
    assert code == 0
    assert data['min_mass']['value'] == '1/4'


def test_moments_needs_both_moments(capsys):
    code, _, err = run(capsys, 'moments', '--m1', '3/2')
    assert code == 2
    assert '[ERROR]' in err


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------

def test_experiment_is_deterministic_and_recomputable(capsys, tmp_path):
    outputs = []
    for name in ('first', 'second'):
        records = tmp_path / f'{name}.csv'
        stats = tmp_path / f'{name}.json'
        code, _, _ = run(capsys, 'experiment', '--family', 'b112', '--cap', '6', '--signature', 'both',
                         '--seed', '1', '--quiet', '--out', str(records), '--stats', str(stats))
        assert code == 0
        outputs.append((records.read_bytes(), stats.read_bytes()))
    assert outputs[0] == outputs[1]

    payload = json.loads((tmp_path / 'first.json').read_text(encoding='utf-8'))
    assert 'excluded_heuristic_count' in payload
    assert payload['seed'] == 1
    recomputed = FamilyStats.from_records(StructuredReportGenerator.read_records_csv(tmp_path / 'first.csv'))
    assert {k: payload[k] for k in recomputed.to_dict()} == recomputed.to_dict()


# ---------------------------------------------------------------------------
# audit-monogenisers, genus-baseline, growth
# ---------------------------------------------------------------------------

def test_audit_cap_ten(capsys):
    code, out, _ = run(capsys, 'audit-monogenisers', '--family', 'b112', '--cap', '10', '--search-bound', '10')
    data = json.loads(out)
    assert code == 0
    assert data['passed']
    assert data['max_multiplicity'] <= 60
    assert data['max_unit_translates'] <= 3


def test_audit_zero_search_bound(capsys):
    code, out, _ = run(capsys, 'audit-monogenisers', '--cap', '6', '--search-bound', '0')
    assert code == 0
    assert json.loads(out)['max_multiplicity'] == 0


def test_audit_malformed_flags(capsys):
    code, _, _ = run(capsys, 'audit-monogenisers', '--cap', '6', '--search-bound', 'ten')
    assert code == 2


def test_genus_baseline_csv(capsys):
    code, out, _ = run(capsys, 'genus-baseline', '--from', '-1', '--to', '-10')
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == '# schema: cubiclab.genus/1'
    assert lines[1] == 'd,fundamental_disc,genus_two_rank'
    assert '-5,-20,1' in lines


def test_growth_small_x(capsys):
    code, out, _ = run(capsys, 'growth', '--family', 'b112', '--X', '20', '--slope')
    data = json.loads(out)
    assert code == 0
    assert data['count'] == 0
    assert data['slope_to_4X'] is None


def test_experiment_report_folder(capsys, tmp_path):
    folder = tmp_path / 'reports'
    code, out, err = run(capsys, 'experiment', '--family', 'b112', '--cap', '3', '--signature', 'both',
                         '--quiet', '--report-dir', str(folder))
    assert code == 0
    assert out.startswith('# schema: cubiclab.records/1')
    assert (folder / 'field_records.csv').read_text(encoding='utf-8') == out
    stats = json.loads((folder / 'family_stats.json').read_text(encoding='utf-8'))
    assert stats['schema'] == 'cubiclab.stats/1'
    assert stats['family']['kind'] == 'B112'
    assert 'GENERATING REPORTS' in err
