"""
Class group cache
Arquivo JSON-lines só de acréscimo: uma linha por (polinômio, config_hash).
Uma chave nunca recebe outro valor sob o mesmo hash de configuração.
"""

from dataclasses import dataclass
import json
from pathlib import Path
from typing import Dict, Optional, Tuple

try:
    from .class_group import TOOLCHAIN_VERSION, ClassGroupResult, class_group, config_hash, resolve_config
    from .cubic_forms import MonicCubic, translation_normal_form
    from .number_field import make_field
except ImportError:
    from class_group import TOOLCHAIN_VERSION, ClassGroupResult, class_group, config_hash, resolve_config
    from cubic_forms import MonicCubic, translation_normal_form
    from number_field import make_field


CACHE_SCHEMA = 'cubiclab.cache/1'

Key = Tuple[int, int, int]


class CacheConflict(RuntimeError):
    """Same key and config hash already stored with a different result"""


def cache_key(f: MonicCubic) -> Key:
    return translation_normal_form(f).coefficients


@dataclass(frozen=True)
class CacheEntry:
    key: Key
    config_hash: str
    version: str
    result: ClassGroupResult

    def to_line(self) -> str:
        payload = {
            'schema': CACHE_SCHEMA,
            'key': list(self.key),
            'config_hash': self.config_hash,
            'version': self.version,
            'result': self.result.to_dict(),
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_line(cls, line: str) -> 'CacheEntry':
        data = json.loads(line)
        if data.get('schema') != CACHE_SCHEMA:
            raise ValueError(f"unexpected cache schema {data.get('schema')!r}")
        return cls(
            key=tuple(int(x) for x in data['key']),
            config_hash=data['config_hash'],
            version=data['version'],
            result=ClassGroupResult.from_dict(data['result']),
        )


class ClassGroupCache:
    """In-memory view of a JSON-lines cache file; writes are appends"""

    def __init__(self, path):
        self.path = Path(path)
        self.entries: Dict[Tuple[Key, str], CacheEntry] = {}
        self.hits = 0
        self.misses = 0
        self._load()

    def _load(self):
        if not self.path.exists():
            return
        with open(self.path, 'r', encoding='utf-8') as handle:
            for number, line in enumerate(handle, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = CacheEntry.from_line(line)
                except (ValueError, KeyError) as e:
                    raise ValueError(f"{self.path}:{number}: unreadable cache line ({e})") from e
                self._remember(entry)

    def _remember(self, entry: CacheEntry):
        slot = (entry.key, entry.config_hash)
        known = self.entries.get(slot)
        if known is not None and known.result.to_dict() != entry.result.to_dict():
            raise CacheConflict(
                f"key {entry.key} under config {entry.config_hash[:12]} already holds a different result"
            )
        self.entries[slot] = entry

    def get(self, f: MonicCubic, config: Dict) -> Optional[ClassGroupResult]:
        entry = self.entries.get((cache_key(f), config_hash(config)))
        if entry is None:
            self.misses += 1
            return None
        self.hits += 1
        return entry.result

    def put(self, f: MonicCubic, config: Dict, result: ClassGroupResult) -> CacheEntry:
        entry = CacheEntry(cache_key(f), config_hash(config), TOOLCHAIN_VERSION, result)
        slot = (entry.key, entry.config_hash)
        if slot in self.entries:
            self._remember(entry)
            return self.entries[slot]
        self._remember(entry)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, 'a', encoding='utf-8', newline='\n') as handle:
            handle.write(entry.to_line() + "\n")
        return entry

    def class_group(self, f: MonicCubic, config: Optional[Dict] = None) -> ClassGroupResult:
        """Cached class group of the field defined by f"""
        config = resolve_config(config)
        cached = self.get(f, config)
        if cached is not None:
            return cached
        result = class_group(make_field(f, config['precision_bits']), config)
        self.put(f, config, result)
        return result

    def __len__(self) -> int:
        return len(self.entries)
