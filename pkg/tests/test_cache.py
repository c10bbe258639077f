import json

import pytest

from src.backend import cache as cache_module
from src.backend.cache import CacheConflict, CacheEntry, ClassGroupCache, cache_key
from src.backend.class_group import TOOLCHAIN_VERSION, Certification, ClassGroupResult, config_hash, resolve_config
from src.backend.cubic_forms import MonicCubic, translate


def _result(divisors=(), status='certified'):
    return ClassGroupResult(divisors, None, Certification(status, None, 100000, 20000, 128, '6/5'))


@pytest.fixture
def config(monkeypatch):
    monkeypatch.delenv('CUBICLAB_PRECISION_BITS', raising=False)
    return resolve_config()


def test_key_is_translation_invariant():
    f = MonicCubic(3, 2, 1)
    assert cache_key(f) == (0, -1, 1)
    assert cache_key(translate(f, 5)) == cache_key(f)


def test_put_appends_one_line(tmp_path, config):
    path = tmp_path / 'cache.jsonl'
    store = ClassGroupCache(path)
    store.put(MonicCubic(0, 4, -1), config, _result((2,)))
    store.put(MonicCubic(0, 4, -1), config, _result((2,)))
    lines = path.read_text(encoding='utf-8').splitlines()
    assert len(lines) == 1
    data = json.loads(lines[0])
    assert set(data) == {'schema', 'key', 'config_hash', 'version', 'result'}
    assert data['key'] == [0, 4, -1]
    assert data['version'] == TOOLCHAIN_VERSION


def test_reload_returns_stored_result(tmp_path, config):
    path = tmp_path / 'cache.jsonl'
    ClassGroupCache(path).put(MonicCubic(0, 4, -1), config, _result((2,)))
    again = ClassGroupCache(path)
    assert len(again) == 1
    assert again.get(MonicCubic(0, 4, -1), config) == _result((2,))
    assert again.get(MonicCubic(0, 4, -1), {**config, 'seed': 9}) is None


def test_conflicting_put_raises(tmp_path, config):
    store = ClassGroupCache(tmp_path / 'cache.jsonl')
    store.put(MonicCubic(0, 4, -1), config, _result((2,)))
    with pytest.raises(CacheConflict):
        store.put(MonicCubic(0, 4, -1), config, _result((4,)))


def test_conflicting_lines_on_disk_raise(tmp_path, config):
    path = tmp_path / 'cache.jsonl'
    store = ClassGroupCache(path)
    store.put(MonicCubic(0, 4, -1), config, _result((2,)))
    forged = CacheEntry((0, 4, -1), config_hash(config), TOOLCHAIN_VERSION, _result((3,)))
    with open(path, 'a', encoding='utf-8') as handle:
        handle.write(forged.to_line() + "\n")
    with pytest.raises(CacheConflict):
        ClassGroupCache(path)


def test_unreadable_line_names_position(tmp_path):
    path = tmp_path / 'cache.jsonl'
    path.write_text('{"schema": "other"}\n', encoding='utf-8')
    with pytest.raises(ValueError, match="cache.jsonl:1"):
        ClassGroupCache(path)


def test_cached_class_group_computes_once(tmp_path, monkeypatch, config):
    calls = []

    def fake(K, cfg):
        calls.append(K.disc)
        return _result((2,))

    monkeypatch.setattr(cache_module, 'class_group', fake)
    store = ClassGroupCache(tmp_path / 'cache.jsonl')
    first = store.class_group(MonicCubic(0, 4, -1))
    second = store.class_group(MonicCubic(0, 4, -1))
    assert first == second
    assert calls == [-283]
    assert store.hits == 1 and store.misses == 1


def test_cache_round_trip_real_field(tmp_path, config):
    path = tmp_path / 'cache.jsonl'
    computed = ClassGroupCache(path).class_group(MonicCubic(0, -1, -1))
    reloaded = ClassGroupCache(path).class_group(MonicCubic(0, -1, -1))
    assert json.dumps(reloaded.to_dict(), sort_keys=True) == json.dumps(computed.to_dict(), sort_keys=True)
    assert reloaded.h == 1
