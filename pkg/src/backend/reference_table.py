"""
Reference table ingestion
Lê tabelas externas de grupos de classes (a,b,c,disc,h,divisors) e
valida cada linha antes de usá-la como verdade de referência.
"""

from dataclasses import dataclass
import math
import sys
from pathlib import Path
from typing import Dict, Optional, Tuple

import pandas as pd

try:
    from .cache import Key, cache_key
    from .class_group import ClassGroupResult
    from .cubic_forms import MonicCubic
except ImportError:
    from cache import Key, cache_key
    from class_group import ClassGroupResult
    from cubic_forms import MonicCubic


REFERENCE_COLUMNS = ['a', 'b', 'c', 'disc', 'h', 'divisors']


class ReferenceTableError(ValueError):
    """Unreadable or inconsistent reference table"""


@dataclass(frozen=True)
class ReferenceRow:
    coeffs: Tuple[int, int, int]
    disc: int
    h: int
    elementary_divisors: Tuple[int, ...]

    @property
    def form(self) -> MonicCubic:
        return MonicCubic(*self.coeffs)

    def to_dict(self) -> Dict:
        return {'coeffs': list(self.coeffs), 'disc': self.disc, 'h': self.h,
                'elementary_divisors': list(self.elementary_divisors)}


def _parse_row(raw: Dict[str, str], line: int) -> ReferenceRow:
    try:
        a, b, c, disc, h = (int(raw[name]) for name in ('a', 'b', 'c', 'disc', 'h'))
        text = raw['divisors'].strip()
        divisors = tuple(int(d) for d in text.split(';')) if text else ()
    except ValueError as e:
        raise ReferenceTableError(f"line {line}: not an integer ({e})") from e

    f = MonicCubic(a, b, c)
    if f.discriminant != disc:
        raise ReferenceTableError(f"line {line}: disc {disc} does not match {f} (computed {f.discriminant})")
    if any(d < 2 for d in divisors):
        raise ReferenceTableError(f"line {line}: elementary divisors must be >= 2")
    if any(later % earlier for earlier, later in zip(divisors, divisors[1:])):
        raise ReferenceTableError(f"line {line}: divisors {list(divisors)} are not a divisibility chain")
    if math.prod(divisors) != h:
        raise ReferenceTableError(f"line {line}: h = {h} but the divisors multiply to {math.prod(divisors)}")
    return ReferenceRow((a, b, c), disc, h, divisors)


def ingest_reference(path) -> Dict[Key, ReferenceRow]:
    """
    Validated reference rows keyed by the translation normal form of (a, b, c).

    Parameters:
    -----------
    path : str or Path
        CSV with header a,b,c,disc,h,divisors; divisors separated by ';'

    Returns:
    --------
    Dict[Key, ReferenceRow]
        Empty (with a warning on stderr) for an empty file
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=True)
    except FileNotFoundError as e:
        raise ReferenceTableError(f"{path}: file not found") from e
    except pd.errors.EmptyDataError:
        print(f"[WARN] Reference table {path} is empty", file=sys.stderr)
        return {}

    missing = [name for name in REFERENCE_COLUMNS if name not in frame.columns]
    if missing:
        raise ReferenceTableError(f"{path}: line 1: missing columns {missing}")
    if frame.empty:
        print(f"[WARN] Reference table {path} has no rows", file=sys.stderr)
        return {}

    table: Dict[Key, ReferenceRow] = {}
    for offset, raw in enumerate(frame.to_dict('records')):
        line = offset + 2
        row = _parse_row(raw, line)
        key = cache_key(row.form)
        known = table.get(key)
        if known is not None and known.elementary_divisors != row.elementary_divisors:
            raise ReferenceTableError(f"line {line}: {row.coeffs} contradicts an earlier row")
        table[key] = row
    return table


def reference_mismatch(table: Dict[Key, ReferenceRow], f: MonicCubic,
                       result: ClassGroupResult) -> Optional[str]:
    """Description of the disagreement with the table, or None (also when f is not listed)"""
    row = table.get(cache_key(f))
    if row is None:
        return None
    if row.elementary_divisors != tuple(result.elementary_divisors):
        return (f"{f}: computed divisors {list(result.elementary_divisors)}, "
                f"reference {list(row.elementary_divisors)} (h = {row.h})")
    return None
