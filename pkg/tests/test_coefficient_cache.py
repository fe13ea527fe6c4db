"""Tests for the coefficient memo table and the append-only coefficient store."""
import json
import sys
import threading
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from coefficient_cache import STORE_FILENAME, CoefficientMemo, CoefficientStore
from data_loader import load_newform
from errors import CacheConflict, ConfigError
from forms.base_change import base_change
from quadfield import ImagQuadField


# ──────────────────────────────────────────────────────────────────
# CoefficientStore
# ──────────────────────────────────────────────────────────────────

def test_put_is_idempotent(tmp_path):
    store = CoefficientStore(tmp_path)
    assert store.put_coefficient("11a/K-1", -1, (3, 0), -5) is True
    assert store.put_coefficient("11a/K-1", -1, (3, 0), -5) is False
    assert store.get_coefficient("11a/K-1", -1, (3, 0)) == "-5"
    assert store.count() == 1


def test_conflicting_value_is_rejected(tmp_path):
    store = CoefficientStore(tmp_path)
    store.put_coefficient("11a/K-1", -1, (3, 0), -5)
    with pytest.raises(CacheConflict):
        store.put_coefficient("11a/K-1", -1, (3, 0), 7)


def test_store_survives_reload(tmp_path):
    CoefficientStore(tmp_path).put_coefficient("11a/K-1", -1, (1, 1), -2)
    fresh = CoefficientStore(tmp_path)
    assert fresh.get_coefficient("11a/K-1", -1, (1, 1)) == "-2"
    assert fresh.get_coefficient("11a/K-1", -2, (1, 1)) is None


def test_header_and_sorted_records(tmp_path):
    store = CoefficientStore(tmp_path)
    store.put_coefficient("f", -1, (2, 1), 1)
    lines = (tmp_path / STORE_FILENAME).read_text().splitlines()
    assert json.loads(lines[0]) == {"format": "bianchi-coefficient-cache", "version": 1}
    record = json.loads(lines[1])
    assert record == {"kind": "coefficient", "form": "f", "d": -1, "gen": [2, 1], "value": "1"}
    assert lines[1] == json.dumps(record, sort_keys=True)


def test_unknown_store_version(tmp_path):
    (tmp_path / STORE_FILENAME).write_text(json.dumps({"format": "bianchi-coefficient-cache", "version": 99}) + "\n")
    with pytest.raises(ConfigError):
        CoefficientStore(tmp_path).count()


def test_torn_final_line_is_skipped(tmp_path):
    store = CoefficientStore(tmp_path)
    store.put_coefficient("f", -1, (2, 1), 1)
    with open(tmp_path / STORE_FILENAME, "a") as f:
        f.write('{"kind": "coeffic')
    assert CoefficientStore(tmp_path).count() == 1


def test_newform_records(tmp_path):
    store = CoefficientStore(tmp_path)
    record = load_newform("11a").to_record()
    assert store.put_newform("11a", record) is True
    assert store.put_newform("11a", record) is False
    store.reload()
    assert store.get_newform("11a")["level"] == 11


# ──────────────────────────────────────────────────────────────────
# CoefficientMemo
# ──────────────────────────────────────────────────────────────────

def test_memo_computes_once():
    memo = CoefficientMemo()
    calls = []

    def compute():
        calls.append(1)
        return 42

    assert memo.get_or_compute("k", compute) == 42
    assert memo.get_or_compute("k", compute) == 42
    assert len(calls) == 1
    assert (memo.hits, memo.misses) == (1, 1)
    assert "k" in memo and len(memo) == 1
    memo.clear()
    assert len(memo) == 0


def test_memo_is_safe_under_threads():
    memo = CoefficientMemo()
    results = []

    def worker():
        results.append(memo.get_or_compute("shared", lambda: object()))

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len({id(r) for r in results}) == 1


def test_memo_writes_through_and_reads_back(tmp_path):
    store = CoefficientStore(tmp_path)
    CoefficientMemo(store, "f", -1).get_or_compute((5, 0), lambda: 9)
    again = CoefficientMemo(CoefficientStore(tmp_path), "f", -1)
    assert again.get_or_compute((5, 0), lambda: pytest.fail("recomputed a stored coefficient")) == 9


def test_base_change_fills_the_store(tmp_path):
    store = CoefficientStore(tmp_path)
    form = base_change(load_newform("11a"), ImagQuadField(-1), store=store)
    value = form.coefficient(form.field.ideal(3))
    assert value == -5
    assert store.count() >= 1
    rebuilt = base_change(load_newform("11a"), ImagQuadField(-1), store=CoefficientStore(tmp_path))
    assert rebuilt.coefficient(rebuilt.field.ideal(3)) == -5


if __name__ == "__main__":
    test_memo_computes_once()
    test_memo_is_safe_under_threads()
    print("✓ CoefficientMemo")
