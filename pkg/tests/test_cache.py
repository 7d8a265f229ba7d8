"""
Tests for the on-disk result cache
"""

from concurrent.futures import ThreadPoolExecutor
import json

import pytest

from src.cache import ResultCache, checksum


@pytest.fixture
def cache(cache_dir):
    return ResultCache(cache_dir, version="1.0.0")


def test_put_then_get(cache):
    assert cache.get("weight2", 23, (1,), 2, 91) is None
    cache.put("weight2", 23, (1,), 2, 91, payload={"rank": 2})
    assert cache.get("weight2", 23, (1,), 2, 91) == {"rank": 2}
    assert (cache.hits, cache.misses) == (1, 1)


def test_writes_leave_no_temporary_files(cache):
    cache.put("weight2", 23, payload=[1, 2, 3])
    assert not list(cache.root.rglob("*.tmp"))
    assert len(cache.entries()) == 1


def test_concurrent_writers_of_one_key(cache):
    payloads = [{"rank": k} for k in range(16)]
    with ThreadPoolExecutor(max_workers=8) as pool:
        list(pool.map(lambda payload: cache.put("weight2", 23, payload=payload), payloads))
    assert not list(cache.root.rglob("*.tmp"))
    assert len(cache.entries()) == 1
    assert cache.get("weight2", 23) in payloads


def test_version_bump_makes_entries_stale(cache):
    cache.put("weight2", 23, payload=[1])
    newer = ResultCache(cache.root, version="1.1.0")
    assert newer.get("weight2", 23) is None
    assert newer.evict(stale=True) == 1
    assert newer.entries() == []


def test_corrupt_payloads_are_detected(cache):
    cache.put("weight2", 23, payload=[1, 2])
    path = cache.path("weight2", 23)
    entry = json.loads(path.read_text())
    entry["payload"] = [1, 3]
    path.write_text(json.dumps(entry))
    assert cache.get("weight2", 23) is None
    assert cache.verify() == [path]
    assert cache.evict(corrupt=True) == 1


def test_evict_one_kind(cache):
    cache.put("weight2", 23, payload=1)
    cache.put("eigenforms", 23, payload=2)
    assert cache.evict(kind="eigenforms") == 1
    assert [p.parent.name for p in cache.entries()] == ["weight2"]


def test_status_and_warm(cache):
    assert cache.status().empty
    added = cache.warm([23, 31], lambda N: cache.put("weight2", N, payload=N))
    assert added == 2
    status = cache.status()
    assert status.loc[0, "kind"] == "weight2"
    assert status.loc[0, "entries"] == 2


def test_checksum_ignores_key_order():
    assert checksum({"a": 1, "b": 2}) == checksum({"b": 2, "a": 1})
