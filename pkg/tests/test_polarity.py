import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sempolar.errors import DegenerateInputError, DimensionMismatchError
from sempolar.polarity import (
    build_series,
    read_series_csv,
    sp_bruteforce,
    sp_fast,
    write_series_csv,
)
from sempolar.store import EmbeddingRecord, write_store

E1 = np.array([[1.0, 0.0]])
E2 = np.array([[0.0, 1.0]])


def test_identical_vectors_sp_zero():
    assert sp_bruteforce(E1, E1).value == 0.0
    assert sp_fast(E1, E1).value == 0.0


def test_orthogonal_vectors_sp_one():
    assert sp_bruteforce(E1, E2).value == pytest.approx(1.0, abs=1e-15)
    assert sp_fast(E1, E2).value == pytest.approx(1.0, abs=1e-15)


def test_hand_computed_half():
    c = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert sp_bruteforce(c, E1).value == pytest.approx(0.5, abs=1e-15)
    assert sp_fast(c, E1).value == pytest.approx(0.5, abs=1e-15)


def test_empty_set_error():
    with pytest.raises(DegenerateInputError):
        sp_fast(np.empty((0, 2)), E1)
    with pytest.raises(DegenerateInputError):
        sp_bruteforce(E1, np.empty((0, 2)))


def test_dimension_mismatch_error():
    with pytest.raises(DimensionMismatchError):
        sp_fast(E1, np.ones((1, 3)))


def test_zero_vector_error():
    with pytest.raises(DegenerateInputError):
        sp_fast(np.array([[0.0, 0.0]]), E1)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_fast_matches_bruteforce(seed):
    rng = np.random.default_rng(seed)
    n1, n2 = int(rng.integers(1, 51)), int(rng.integers(1, 51))
    d = int(rng.integers(2, 33))
    c = rng.standard_normal((n1, d))
    f = rng.standard_normal((n2, d))
    assert abs(sp_fast(c, f).value - sp_bruteforce(c, f).value) < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_symmetry_and_bounds(seed):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((int(rng.integers(1, 30)), 8))
    f = rng.standard_normal((int(rng.integers(1, 30)), 8))
    ab = sp_fast(c, f).value
    ba = sp_fast(f, c).value
    assert ab == ba  # exact
    assert 0.0 <= ab <= 2.0
    assert abs(sp_bruteforce(c, f).value - sp_bruteforce(f, c).value) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_scale_invariance(seed):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((10, 6))
    f = rng.standard_normal((7, 6))
    sc = c * rng.uniform(0.01, 100.0, size=(10, 1))
    sf = f * rng.uniform(0.01, 100.0, size=(7, 1))
    assert abs(sp_fast(c, f).value - sp_fast(sc, sf).value) < 1e-12


def test_sp_zero_iff_positively_colinear():
    e = np.array([0.6, 0.8])
    c = np.stack([2.0 * e, 3.0 * e])
    f = np.stack([5.0 * e])
    assert sp_fast(c, f).value < 1e-12
    rot = np.array([[np.cos(0.01), -np.sin(0.01)], [np.sin(0.01), np.cos(0.01)]])
    assert sp_fast(c, (rot @ f.T).T).value > 1e-6
    assert sp_fast(c, -f).value == pytest.approx(2.0, abs=1e-12)


# ---------------------------------------------------------------------------
# series building over a store
# ---------------------------------------------------------------------------


def _rec(tid, source, kid, year, month, vec):
    return EmbeddingRecord(tid, source, kid, year, month, np.asarray(vec, dtype=np.float32))


def _unit(theta):
    return np.array([np.cos(theta), np.sin(theta)])


def test_flat_series_identical_vectors(tmp_path):
    recs = []
    i = 0
    for year in range(2010, 2021):
        for month in (2, 7):
            for source in ("cnn", "foxnews"):
                recs.append(_rec(f"t{i}", source, 4, year, month, [1.0, 0.0]))
                i += 1
    store = write_store(recs, tmp_path / "s.dlns")
    series = build_series(store, 4, ("cnn", "foxnews"), "yearly", (2010, 2020))
    assert len(series) == 11
    assert np.allclose(series.values(), 0.0)
    assert series.filled_buckets() == []


def test_yearly_spike_fixture(tmp_path):
    recs = []
    i = 0
    for year in range(2010, 2021):
        angle = np.pi / 2 if year == 2015 else 0.0  # orthogonal rotation in 2015
        for month in range(1, 13):
            recs.append(_rec(f"c{i}", "cnn", 4, year, month, _unit(0.0)))
            recs.append(_rec(f"f{i}", "foxnews", 4, year, month, _unit(angle)))
            i += 1
    store = write_store(recs, tmp_path / "s.dlns")
    series = build_series(store, 4, ("cnn", "foxnews"), "yearly", (2010, 2020))
    vals = dict(zip(series.buckets(), series.values()))
    assert vals[2015] == pytest.approx(1.0, abs=1e-6)
    assert max(vals, key=vals.get) == 2015
    monthly = build_series(store, 4, ("cnn", "foxnews"), "monthly", (2010, 2020))
    assert len(monthly) == 132


def test_missing_month_interpolated(tmp_path):
    recs = [
        _rec("c1", "cnn", 1, 2010, 1, [1.0, 0.0]),
        _rec("f1", "foxnews", 1, 2010, 1, [0.8, 0.6]),  # SP = 0.2
        _rec("c3", "cnn", 1, 2010, 3, [1.0, 0.0]),
        _rec("f3", "foxnews", 1, 2010, 3, [0.6, 0.8]),  # SP = 0.4
    ]
    store = write_store(recs, tmp_path / "s.dlns")
    series = build_series(store, 1, ("cnn", "foxnews"), "monthly", (2010, 2010))
    points = {p.bucket: p for p in series.points}
    assert points[(2010, 1)].value == pytest.approx(0.2, abs=1e-6)
    assert not points[(2010, 1)].filled
    assert points[(2010, 2)].value == pytest.approx(0.3, abs=1e-6)
    assert points[(2010, 2)].filled
    # trailing months extend the nearest defined value
    assert points[(2010, 12)].value == pytest.approx(0.4, abs=1e-6)
    assert points[(2010, 12)].filled
    assert (2010, 2) in series.filled_buckets()


def test_no_data_raises(tmp_path):
    store = write_store([_rec("c", "cnn", 1, 2010, 1, [1.0, 0.0])], tmp_path / "s.dlns")
    with pytest.raises(DegenerateInputError):
        build_series(store, 1, ("cnn", "foxnews"), "yearly", (2010, 2020))


def test_yearly_is_union_not_mean_of_monthly(tmp_path):
    e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    recs = [
        _rec("c1", "cnn", 1, 2010, 1, e1),
        _rec("c2", "cnn", 1, 2010, 1, e1),
        _rec("f1", "foxnews", 1, 2010, 1, e1),   # month 1: SP 0
        _rec("c3", "cnn", 1, 2010, 6, e2),
        _rec("f2", "foxnews", 1, 2010, 6, -e2),  # month 6: SP 2
    ]
    store = write_store(recs, tmp_path / "s.dlns")
    monthly = build_series(store, 1, ("cnn", "foxnews"), "monthly", (2010, 2010))
    defined = [p.value for p in monthly.points if not p.filled]
    assert defined == pytest.approx([0.0, 2.0], abs=1e-12)
    yearly = build_series(store, 1, ("cnn", "foxnews"), "yearly", (2010, 2010))
    # union: mean cos over 3x2 pairs = (1 + 1 + 0 + 0 + 0 - 1) / 6 = 1/6
    assert yearly.points[0].value == pytest.approx(5.0 / 6.0, abs=1e-6)
    assert yearly.points[0].value != pytest.approx(np.mean(defined), abs=1e-3)


def test_series_csv_round_trip(tmp_path):
    recs = [
        _rec("c1", "cnn", 1, 2010, 1, [1.0, 0.0]),
        _rec("f1", "foxnews", 1, 2010, 1, [0.8, 0.6]),
        _rec("c2", "cnn", 1, 2011, 5, [1.0, 0.0]),
        _rec("f2", "foxnews", 1, 2011, 5, [0.0, 1.0]),
    ]
    store = write_store(recs, tmp_path / "s.dlns")
    series = build_series(store, 1, ("cnn", "foxnews"), "monthly", (2010, 2011))
    buf = io.StringIO()
    write_series_csv([series], buf, {1: "racism"})
    buf.seek(0)
    (back,) = read_series_csv(buf, {"racism": 1})
    assert back.keyword_id == 1
    assert back.pair == ("cnn", "foxnews")
    assert back.granularity == "monthly"
    assert [p.bucket for p in back.points] == [p.bucket for p in series.points]
    assert [p.value for p in back.points] == [p.value for p in series.points]
    assert [p.filled for p in back.points] == [p.filled for p in series.points]
