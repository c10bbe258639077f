"""
CubicLab - linha de comando em batch
Subcomandos: enumerate, classgroup, experiment, moments,
audit-monogenisers, genus-baseline, growth.

Códigos de saída: 0 sucesso/viável, 1 inviável, 2 uso, 3 divergência com a
tabela de referência, 4 falha da auditoria.
"""

import argparse
from fractions import Fraction
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from src.backend.cache import ClassGroupCache
from src.backend.class_group import (
    TOOLCHAIN_VERSION,
    ClassGroupError,
    class_group,
    class_group_oracle,
    resolve_config,
)
from src.backend.cubic_forms import MonicCubic, MonogeniserBoundViolation
from src.backend.exactmath import DomainError
from src.backend.experiments import (
    FamilyExperiment,
    audit_monogenisers,
    genus_baseline,
    growth_count,
    growth_slope,
)
from src.backend.families import KIND_B112, KIND_F1, FamilySpec
from src.backend.moments import (
    DEFAULT_TRUNCATION,
    PUBLISHED_SCENARIOS,
    MomentInfeasible,
    MomentProblem,
    is_feasible,
    min_mass_at,
)
from src.backend.number_field import make_field
from src.backend.reference_table import ReferenceTableError, ingest_reference, reference_mismatch
from src.backend.report_generator import StructuredReportGenerator


EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_REFERENCE_MISMATCH = 3
EXIT_AUDIT_FAILED = 4
EXIT_INTERRUPTED = 130

FAMILIES = {'b112': KIND_B112, 'f1': KIND_F1}

CLASSGROUP_SCHEMA = 'cubiclab.classgroup/1'
MOMENTS_SCHEMA = 'cubiclab.moments/1'
GROWTH_SCHEMA = 'cubiclab.growth/1'
GENUS_SCHEMA = 'cubiclab.genus/1'


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def exact_rational(text: str) -> Fraction:
    """P/Q or integer; decimals are refused"""
    if any(ch in text for ch in '.eE'):
        raise argparse.ArgumentTypeError(f"{text!r}: use an exact rational P/Q")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational number")


def int_list(text: str) -> List[int]:
    if not text.strip():
        return []
    try:
        return [int(part) for part in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of integers")


def coefficients(text: str) -> MonicCubic:
    values = int_list(text)
    if len(values) != 3:
        raise argparse.ArgumentTypeError("--poly expects a,b,c for x^3 + a x^2 + b x + c")
    return MonicCubic(*values)


def _add_family_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--family', choices=sorted(FAMILIES), default='b112')
    parser.add_argument('--ordering', choices=['symmetric', 'weighted', 'covariant'], default=None,
                        help="default: symmetric for b112, covariant for f1")
    parser.add_argument('--cap', type=exact_rational, required=True, help="height cap (P/Q)")
    parser.add_argument('--signature', choices=['real', 'complex', 'both'], default='real')


def _family_spec(args) -> FamilySpec:
    kind = FAMILIES[args.family]
    ordering = args.ordering or ('symmetric' if kind == KIND_B112 else 'covariant')
    return FamilySpec(kind, args.signature, ordering, args.cap)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='cubiclab', description="2-torsion in class groups of cubic fields")
    parser.add_argument('--version', action='version', version=TOOLCHAIN_VERSION)
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('enumerate', help="list a family up to a height cap")
    _add_family_flags(p)
    p.add_argument('--out', type=Path, default=None)

    p = sub.add_parser('classgroup', help="class group of one cubic field")
    p.add_argument('--poly', type=coefficients, required=True)
    p.add_argument('--oracle', action='store_true')
    p.add_argument('--cache', type=Path, default=None)
    p.add_argument('--reference', type=Path, default=None)
    p.add_argument('--precision', type=int, default=None)
    p.add_argument('--strict', action='store_true')
    p.add_argument('--seed', type=int, default=0)

    p = sub.add_parser('experiment', help="class groups over a family with statistics")
    _add_family_flags(p)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('--precision', type=int, default=None)
    p.add_argument('--out', type=Path, default=None, help="records CSV (default: stdout)")
    p.add_argument('--stats', type=Path, default=None)
    p.add_argument('--log-dir', type=Path, default=None)
    p.add_argument('--report-dir', type=Path, default=None,
                   help="folder for field_records.csv, family_stats.json and the 2-rank table")
    p.add_argument('--quiet', action='store_true')

    p = sub.add_parser('moments', help="moment feasibility certificates")
    p.add_argument('--scenario', choices=sorted(PUBLISHED_SCENARIOS), default=None)
    p.add_argument('--min-exp', type=int, default=0)
    p.add_argument('--exclude', type=int_list, default=[])
    p.add_argument('--m1', type=exact_rational, default=None)
    p.add_argument('--m2', type=exact_rational, default=None)
    p.add_argument('--min-mass-at', type=int, default=None)
    p.add_argument('--truncation', type=int, default=DEFAULT_TRUNCATION)

    p = sub.add_parser('audit-monogenisers', help="bound the monogenisers of each family member")
    p.add_argument('--family', choices=['b112'], default='b112')
    p.add_argument('--cap', type=exact_rational, required=True)
    p.add_argument('--search-bound', type=int, required=True)
    p.add_argument('--signature', choices=['real', 'complex', 'both'], default='both')

    p = sub.add_parser('genus-baseline', help="genus 2-ranks of imaginary quadratic fields")
    p.add_argument('--from', dest='d_from', type=int, default=-1)
    p.add_argument('--to', dest='d_to', type=int, default=-200)
    p.add_argument('--out', type=Path, default=None)

    p = sub.add_parser('growth', help="fields of 2-rank one below a discriminant bound")
    p.add_argument('--family', choices=sorted(FAMILIES), default='b112')
    p.add_argument('--X', dest='X', type=int, required=True)
    p.add_argument('--signature', choices=['real', 'complex', 'both'], default='both')
    p.add_argument('--slope', action='store_true', help="also report the slope between X and 4X")
    return parser


# ---------------------------------------------------------------------------
# Comandos
# ---------------------------------------------------------------------------

def _out(path: Optional[Path]):
    return path if path is not None else sys.stdout


def cmd_enumerate(args) -> int:
    spec = _family_spec(args)
    count = StructuredReportGenerator.write_enumerate_csv(spec.members(), _out(args.out))
    print(f"[OK] {count} fields", file=sys.stderr)
    return EXIT_OK


def cmd_classgroup(args) -> int:
    f = args.poly
    overrides = {'seed': args.seed, 'strict': args.strict}
    if args.precision is not None:
        overrides['precision_bits'] = args.precision
    config = resolve_config(overrides)
    K = make_field(f, config['precision_bits'])

    if args.oracle:
        result = class_group_oracle(K, config)
    elif args.cache is not None:
        result = ClassGroupCache(args.cache).class_group(f, config)
    else:
        result = class_group(K, config)

    payload = {'schema': CLASSGROUP_SCHEMA, 'poly': list(f.coefficients), 'disc': f.discriminant}
    payload.update(result.to_dict())
    StructuredReportGenerator.write_json(payload, sys.stdout)

    if args.reference is not None:
        mismatch = reference_mismatch(ingest_reference(args.reference), f, result)
        if mismatch:
            print(f"[ERROR] Reference mismatch: {mismatch}", file=sys.stderr)
            return EXIT_REFERENCE_MISMATCH
    return EXIT_OK


def cmd_experiment(args) -> int:
    spec = _family_spec(args)
    class_group_config = {}
    if args.precision is not None:
        class_group_config['precision_bits'] = args.precision
    experiment = FamilyExperiment({
        'seed': args.seed,
        'workers': args.workers,
        'verbose': not args.quiet,
        'output_folder': args.log_dir,
        'class_group': class_group_config,
    })
    records, stats = experiment.run(spec)
    StructuredReportGenerator.write_records_csv(records, _out(args.out))
    if args.stats is not None:
        payload = StructuredReportGenerator.stats_payload(stats, spec, args.seed)
        StructuredReportGenerator.write_json(payload, args.stats)
    if args.report_dir is not None:
        StructuredReportGenerator.generate_all_reports(records, stats, args.report_dir, spec, args.seed)
    return EXIT_OK


def _moment_problem(args) -> MomentProblem:
    if args.scenario is not None:
        return PUBLISHED_SCENARIOS[args.scenario][0]
    if args.m1 is None or args.m2 is None:
        raise DomainError("moments needs --m1 and --m2 (or --scenario)")
    return MomentProblem(args.min_exp, frozenset(args.exclude), args.m1, args.m2)


def cmd_moments(args) -> int:
    problem = _moment_problem(args)
    certificate = is_feasible(problem)
    payload = {'schema': MOMENTS_SCHEMA, 'problem': problem.to_dict(),
               'certificate': certificate.to_dict()}
    if args.scenario is not None:
        payload['scenario'] = args.scenario
        payload['expected'] = PUBLISHED_SCENARIOS[args.scenario][1]
    if args.min_mass_at is not None and certificate.feasible:
        try:
            payload['min_mass'] = min_mass_at(problem, args.min_mass_at, args.truncation).to_dict()
        except MomentInfeasible as e:
            payload['certificate'] = e.certificate.to_dict()
            certificate = e.certificate
    StructuredReportGenerator.write_json(payload, sys.stdout)
    return EXIT_OK if certificate.feasible else EXIT_INFEASIBLE


def cmd_audit(args) -> int:
    spec = FamilySpec(KIND_B112, args.signature, 'symmetric', args.cap)
    members = list(spec.members())
    print(f"[OK] Auditing {len(members)} fields, search bound {args.search_bound}", file=sys.stderr)
    try:
        audit = audit_monogenisers(members, args.search_bound)
    except MonogeniserBoundViolation as e:
        StructuredReportGenerator.write_json({'schema': 'cubiclab.audit/1', 'passed': False,
                                              'violation': str(e)}, sys.stdout)
        print(f"[ERROR] Audit failed: {e}", file=sys.stderr)
        return EXIT_AUDIT_FAILED
    StructuredReportGenerator.write_json(audit.to_dict(), sys.stdout)
    print(f"[OK] Max multiplicity {audit.max_multiplicity}, max unit translates {audit.max_translates}",
          file=sys.stderr)
    return EXIT_OK if audit.passed else EXIT_AUDIT_FAILED


def cmd_genus_baseline(args) -> int:
    high, low = max(args.d_from, args.d_to), min(args.d_from, args.d_to)
    frame = genus_baseline(range(high, low - 1, -1))
    StructuredReportGenerator.write_table(frame, GENUS_SCHEMA, _out(args.out))
    return EXIT_OK


def cmd_growth(args) -> int:
    kind = FAMILIES[args.family]
    payload = {'schema': GROWTH_SCHEMA, 'family': kind, 'signature': args.signature, 'X': args.X,
               'count': growth_count(kind, args.X, args.signature)}
    if args.slope:
        payload['slope_to_4X'] = growth_slope(kind, args.X, args.signature)
    StructuredReportGenerator.write_json(payload, sys.stdout)
    return EXIT_OK


COMMANDS = {
    'enumerate': cmd_enumerate,
    'classgroup': cmd_classgroup,
    'experiment': cmd_experiment,
    'moments': cmd_moments,
    'audit-monogenisers': cmd_audit,
    'genus-baseline': cmd_genus_baseline,
    'growth': cmd_growth,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Função principal"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        return COMMANDS[args.command](args)
    except KeyboardInterrupt:
        print("\n[WARN] Interrupted by user", file=sys.stderr)
        return EXIT_INTERRUPTED
    except MonogeniserBoundViolation as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_AUDIT_FAILED
    except (DomainError, ReferenceTableError, ClassGroupError, ValueError) as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
