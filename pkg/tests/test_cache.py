import os

import pytest

from hmfslopes.cache import MAGIC, cache_key, cache_load, cache_save, read_header
from hmfslopes.errors import CacheVersionMismatch, HashMismatch, IoFailure
from hmfslopes.presets import Setting


@pytest.fixture(scope="module")
def built(s13):
    return s13.class_set(), s13.hecke()


def test_round_trip_is_byte_identical(built, tmp_path):
    cs, hecke = built
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    cache_save(a, cs, hecke)
    cs2, hecke2 = cache_load(a, expect=cs)
    assert set(hecke2) == set(hecke)
    for q in hecke:
        assert hecke2[q].entries == hecke[q].entries
    cache_save(b, cs2, hecke2)
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().startswith(MAGIC)


def test_load_without_expectation(built, tmp_path):
    cs, hecke = built
    path = tmp_path / "c.bin"
    cache_save(path, cs, hecke)
    cs2, hecke2 = cache_load(path)
    assert cs2.h == cs.h and cs2.reps == cs.reps


def test_tampered_body_detected(built, tmp_path):
    cs, hecke = built
    path = tmp_path / "d.bin"
    cache_save(path, cs, hecke)
    raw = bytearray(path.read_bytes())
    raw[-3] ^= 1
    path.write_bytes(bytes(raw))
    with pytest.raises(HashMismatch):
        cache_load(path)


def test_stale_cache_detected(built, tmp_path):
    cs, hecke = built
    path = tmp_path / "e.bin"
    cache_save(path, cs, hecke)
    other = Setting(13, 3, 3).class_set()
    assert cache_key(other) != cache_key(cs)
    with pytest.raises(HashMismatch):
        cache_load(path, expect=other)


def test_version_and_garbage(built, tmp_path):
    cs, hecke = built
    path = tmp_path / "f.bin"
    cache_save(path, cs, hecke)
    raw = bytearray(path.read_bytes())
    raw[len(MAGIC) + 1] = 9
    path.write_bytes(bytes(raw))
    with pytest.raises(CacheVersionMismatch):
        cache_load(path)
    junk = tmp_path / "g.bin"
    junk.write_bytes(b"not a cache")
    with pytest.raises(IoFailure):
        read_header(junk)
    with pytest.raises(IoFailure):
        cache_load(tmp_path / "missing.bin")


def test_key_depends_on_precision(s13):
    a = Setting.preset("sqrt13-p3").class_set(Np=10)
    b = Setting.preset("sqrt13-p3").class_set(Np=12)
    assert cache_key(a) != cache_key(b)


def test_setting_reuses_cache(tmp_path):
    S = Setting.preset("sqrt13-p3", cache_dir=str(tmp_path))
    S.hecke()
    files = os.listdir(tmp_path)
    assert len(files) == 1
    T = Setting.preset("sqrt13-p3", cache_dir=str(tmp_path))
    T.hecke()
    assert T.cache_path == S.cache_path
    kap = T.weight((2, 2))
    assert T.classical_slopes(kap)[0] == S.classical_slopes(kap)[0]
