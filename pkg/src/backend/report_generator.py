"""
Report generator for family runs.
Escreve CSV de registros e de enumeração (com linha de schema), JSON de
estatísticas e a tabela da linha de base por gêneros.
"""

import json
import sys
from pathlib import Path
from typing import IO, Dict, Iterable, List, Optional, Union

import pandas as pd

try:
    from .experiments import RECORD_COLUMNS, RECORD_SCHEMA, FamilyStats, FieldRecord
    from .families import FamilyMember, FamilySpec
except ImportError:
    from experiments import RECORD_COLUMNS, RECORD_SCHEMA, FamilyStats, FieldRecord
    from families import FamilyMember, FamilySpec


ENUMERATE_SCHEMA = 'cubiclab.enumerate/1'
ENUMERATE_COLUMNS = ['a', 'b', 'c', 'disc', 'height_symmetric', 'height_weighted', 'height_covariant']

Target = Union[str, Path, IO[str]]


def _write_frame(frame: pd.DataFrame, schema: str, target: Target):
    text = f"# schema: {schema}\n" + frame.to_csv(index=False, lineterminator='\n')
    if isinstance(target, (str, Path)):
        with open(target, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)
    else:
        target.write(text)


def _dump_json(payload: Dict, target: Target):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if isinstance(target, (str, Path)):
        with open(target, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)
    else:
        target.write(text)


class StructuredReportGenerator:
    """CSV/JSON writers shared by the command line and the experiments"""

    @staticmethod
    def records_frame(records: Iterable[FieldRecord]) -> pd.DataFrame:
        return pd.DataFrame([r.to_row() for r in records], columns=RECORD_COLUMNS, dtype=str)

    @staticmethod
    def write_records_csv(records: Iterable[FieldRecord], target: Target):
        frame = StructuredReportGenerator.records_frame(records)
        _write_frame(frame, RECORD_SCHEMA, target)

    @staticmethod
    def read_records_csv(path: Union[str, Path]) -> List[FieldRecord]:
        """Inverse of write_records_csv"""
        with open(path, 'r', encoding='utf-8') as handle:
            first = handle.readline().strip()
            if first != f"# schema: {RECORD_SCHEMA}":
                raise ValueError(f"{path}: expected schema {RECORD_SCHEMA}, found {first!r}")
            frame = pd.read_csv(handle, dtype=str, keep_default_na=False)
        return [FieldRecord.from_row(row) for row in frame.to_dict('records')]

    @staticmethod
    def enumerate_frame(members: Iterable[FamilyMember]) -> pd.DataFrame:
        rows = []
        for m in members:
            a, b, c = m.coefficients
            rows.append({
                'a': str(a), 'b': str(b), 'c': str(c), 'disc': str(m.disc),
                'height_symmetric': str(m.heights['symmetric']) if 'symmetric' in m.heights else '',
                'height_weighted': str(m.heights['weighted']) if 'weighted' in m.heights else '',
                'height_covariant': str(m.heights['covariant']),
            })
        return pd.DataFrame(rows, columns=ENUMERATE_COLUMNS, dtype=str)

    @staticmethod
    def write_enumerate_csv(members: Iterable[FamilyMember], target: Target) -> int:
        frame = StructuredReportGenerator.enumerate_frame(members)
        _write_frame(frame, ENUMERATE_SCHEMA, target)
        return len(frame)

    @staticmethod
    def stats_payload(stats: FamilyStats, spec: Optional[FamilySpec] = None,
                      seed: Optional[int] = None) -> Dict:
        payload = stats.to_dict()
        if spec is not None:
            payload['family'] = spec.to_dict()
        if seed is not None:
            payload['seed'] = seed
        return payload

    @staticmethod
    def write_table(frame: pd.DataFrame, schema: str, target: Target):
        _write_frame(frame.astype(str), schema, target)

    @staticmethod
    def write_json(payload: Dict, target: Target):
        _dump_json(payload, target)

    @staticmethod
    def generate_all_reports(records: List[FieldRecord], stats: FamilyStats,
                             output_folder: Union[str, Path],
                             spec: Optional[FamilySpec] = None,
                             seed: Optional[int] = None) -> Dict[str, Path]:
        """
        Write every report of a family run

        Parameters:
        -----------
        records : list of FieldRecord
            In enumeration order
        stats : FamilyStats
            Aggregates of the same records
        output_folder : Path
            Created if missing

        Returns:
        --------
        Dict[str, Path]
            Mapping {report_name: file_path}
        """
        output_folder = Path(output_folder)
        output_folder.mkdir(parents=True, exist_ok=True)
        reports = {}

        print(f"\n{'='*60}", file=sys.stderr)
        print("GENERATING REPORTS", file=sys.stderr)
        print(f"{'='*60}\n", file=sys.stderr)

        print("[1/3] Writing field records...", file=sys.stderr)
        path = output_folder / 'field_records.csv'
        StructuredReportGenerator.write_records_csv(records, path)
        reports['records'] = path
        print(f"  [OK] field_records.csv ({len(records)} rows)", file=sys.stderr)

        print("\n[2/3] Writing family statistics...", file=sys.stderr)
        path = output_folder / 'family_stats.json'
        StructuredReportGenerator.write_json(StructuredReportGenerator.stats_payload(stats, spec, seed), path)
        reports['stats'] = path
        print("  [OK] family_stats.json", file=sys.stderr)

        print("\n[3/3] Writing 2-rank distribution...", file=sys.stderr)
        counted = [r for r in records if r.counted]
        if counted:
            frame = pd.DataFrame({'two_rank': [r.two_rank for r in counted]})
            table = frame.value_counts().rename('fields').reset_index().sort_values('two_rank')
            path = output_folder / 'two_rank_distribution.csv'
            table.to_csv(path, index=False, lineterminator='\n')
            reports['two_rank_distribution'] = path
            print(f"  [OK] two_rank_distribution.csv ({len(table)} ranks)", file=sys.stderr)
        else:
            print("  [WARN] No certified records; distribution skipped", file=sys.stderr)

        print(f"\n{'='*60}", file=sys.stderr)
        print(f"[OK] Reports generated in: {output_folder}", file=sys.stderr)
        print(f"  Total files: {len(reports)}", file=sys.stderr)
        print(f"{'='*60}\n", file=sys.stderr)
        return reports
