"""Semantic polarity between two embedding sets, and SP time series.

SP(C, F) is the mean cosine *distance* over all cross pairs:

    SP = sum_{i,j} (1 - cos(c_i, f_j)) / (n1 * n2)

which lies in [0, 2].  ``sp_bruteforce`` evaluates the double sum
literally and serves as the oracle; ``sp_fast`` uses the identity

    mean_{i,j} cos(c_i, f_j) = (sum_i c_i / |c_i|) . (sum_j f_j / |f_j|) / (n1 * n2)

for O(n1 + n2) time and O(d) extra space.  All accumulation is float64.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from sempolar.errors import (
    DataFormatError,
    DegenerateInputError,
    DimensionMismatchError,
)
from sempolar.store import EmbeddingSet, EmbeddingStore

Bucket = int | tuple[int, int]  # year, or (year, month)

_CHUNK = 8192


@dataclass(frozen=True)
class SPValue:
    """One semantic-polarity measurement for one time bucket."""

    value: float
    n1: int
    n2: int
    bucket: Bucket | None = None
    keyword_id: int | None = None
    pair: tuple[str, str] | None = None


@dataclass(frozen=True)
class SPPoint:
    bucket: Bucket
    value: float
    filled: bool
    n1: int = 0
    n2: int = 0


@dataclass
class SPSeries:
    """Time-ordered SP values for one keyword and one source pair."""

    keyword_id: int
    pair: tuple[str, str]
    granularity: str  # "yearly" | "monthly"
    points: list[SPPoint] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points], dtype=np.float64)

    def buckets(self) -> list[Bucket]:
        return [p.bucket for p in self.points]

    def filled_buckets(self) -> list[Bucket]:
        """Diagnostics: every bucket whose value was interpolated."""
        return [p.bucket for p in self.points if p.filled]


def _as_matrix(embeddings: EmbeddingSet | np.ndarray | Sequence) -> np.ndarray:
    if isinstance(embeddings, EmbeddingSet):
        if not embeddings.entries:
            raise DegenerateInputError("SP is undefined for an empty embedding set")
        mat = embeddings.matrix()
    else:
        mat = np.asarray(embeddings)
    if mat.ndim == 1:
        mat = mat[None, :]
    if mat.ndim != 2 or mat.shape[0] == 0:
        raise DegenerateInputError("SP is undefined for an empty embedding set")
    return mat


def _check_pair(c: np.ndarray, f: np.ndarray) -> None:
    if c.shape[1] != f.shape[1]:
        raise DimensionMismatchError(f"dimension mismatch: {c.shape[1]} vs {f.shape[1]}")


def _unit_rows_sum(mat: np.ndarray) -> np.ndarray:
    """Sum of L2-normalized rows, accumulated in float64, O(d) extra space."""
    total = np.zeros(mat.shape[1], dtype=np.float64)
    buf = np.empty((min(_CHUNK, mat.shape[0]), mat.shape[1]), dtype=np.float64)
    for lo in range(0, mat.shape[0], _CHUNK):
        chunk = mat[lo : lo + _CHUNK]
        b = buf[: chunk.shape[0]]
        np.copyto(b, chunk)
        norms = np.sqrt(np.einsum("ij,ij->i", b, b))
        if np.any(norms == 0.0):
            raise DegenerateInputError("zero vector in embedding set")
        b /= norms[:, None]
        total += b.sum(axis=0)  # np.sum is pairwise per chunk
    return total


def _sp_value(value: float, n1: int, n2: int, bucket, keyword_id, pair) -> SPValue:
    # clamp floating dust at the boundaries; cos is in [-1, 1] exactly
    value = min(2.0, max(0.0, value))
    return SPValue(value=value, n1=n1, n2=n2, bucket=bucket, keyword_id=keyword_id, pair=pair)


def sp_bruteforce(
    c_set: EmbeddingSet | np.ndarray,
    f_set: EmbeddingSet | np.ndarray,
    *,
    bucket: Bucket | None = None,
    keyword_id: int | None = None,
    pair: tuple[str, str] | None = None,
) -> SPValue:
    """Exact double loop over all n1*n2 pairs; oracle for :func:`sp_fast`."""
    c = _as_matrix(c_set)
    f = _as_matrix(f_set)
    _check_pair(c, f)
    c = np.asarray(c, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    cn = np.linalg.norm(c, axis=1)
    fn = np.linalg.norm(f, axis=1)
    if np.any(cn == 0.0) or np.any(fn == 0.0):
        raise DegenerateInputError("zero vector in embedding set")
    total = 0.0
    for i in range(c.shape[0]):
        for j in range(f.shape[0]):
            total += 1.0 - float(np.dot(c[i], f[j])) / (cn[i] * fn[j])
    value = total / (c.shape[0] * f.shape[0])
    return _sp_value(value, c.shape[0], f.shape[0], bucket, keyword_id, pair)


def sp_fast(
    c_set: EmbeddingSet | np.ndarray,
    f_set: EmbeddingSet | np.ndarray,
    *,
    bucket: Bucket | None = None,
    keyword_id: int | None = None,
    pair: tuple[str, str] | None = None,
) -> SPValue:
    """Same quantity as :func:`sp_bruteforce` in O(n1 + n2) time."""
    c = _as_matrix(c_set)
    f = _as_matrix(f_set)
    _check_pair(c, f)
    n1, n2 = c.shape[0], f.shape[0]
    mean_cos = float(np.dot(_unit_rows_sum(c), _unit_rows_sum(f))) / (n1 * n2)
    return _sp_value(1.0 - mean_cos, n1, n2, bucket, keyword_id, pair)


def _window_buckets(granularity: str, window: tuple[int, int]) -> list[Bucket]:
    y0, y1 = window
    if y1 < y0:
        raise DegenerateInputError(f"empty year window {window}")
    years = range(y0, y1 + 1)
    if granularity == "yearly":
        return list(years)
    if granularity == "monthly":
        return [(y, m) for y in years for m in range(1, 13)]
    raise DataFormatError(f"unknown granularity {granularity!r}")


def build_series(
    store: EmbeddingStore,
    keyword_id: int,
    pair: tuple[str, str],
    granularity: str,
    window: tuple[int, int] = (2010, 2020),
) -> SPSeries:
    """One SP value per bucket over the window.

    Buckets where either side has no embeddings are linearly interpolated
    from the nearest defined neighbors (endpoints: nearest-value
    extension) and flagged as filled.  A keyword with no data at all on
    either side raises.
    """
    buckets = _window_buckets(granularity, window)
    raw: list[SPValue | None] = []
    side_seen = [False, False]
    for bucket in buckets:
        c = store.query(pair[0], keyword_id, bucket)
        f = store.query(pair[1], keyword_id, bucket)
        side_seen[0] |= c is not None
        side_seen[1] |= f is not None
        if c is None or f is None:
            raw.append(None)
        else:
            raw.append(sp_fast(c, f, bucket=bucket, keyword_id=keyword_id, pair=pair))
    defined = [i for i, v in enumerate(raw) if v is not None]
    if not defined:
        missing = pair[0] if not side_seen[0] else pair[1] if not side_seen[1] else "both sides"
        raise DegenerateInputError(
            f"keyword {keyword_id} has no usable data over {window} (no embeddings for {missing})"
        )

    points: list[SPPoint] = []
    for i, bucket in enumerate(buckets):
        v = raw[i]
        if v is not None:
            points.append(SPPoint(bucket, v.value, False, v.n1, v.n2))
            continue
        prev = max((j for j in defined if j < i), default=None)
        nxt = min((j for j in defined if j > i), default=None)
        if prev is None:
            value = raw[nxt].value  # type: ignore[union-attr]
        elif nxt is None:
            value = raw[prev].value  # type: ignore[union-attr]
        else:
            w = (i - prev) / (nxt - prev)
            value = (1.0 - w) * raw[prev].value + w * raw[nxt].value  # type: ignore[union-attr]
        points.append(SPPoint(bucket, value, True))
    return SPSeries(keyword_id, pair, granularity, points)


# ---------------------------------------------------------------------------
# CSV export / import
# ---------------------------------------------------------------------------

CSV_HEADER = ["keyword", "pair", "granularity", "bucket", "value", "n1", "n2", "filled"]


def _bucket_str(bucket: Bucket) -> str:
    if isinstance(bucket, tuple):
        return f"{bucket[0]:04d}-{bucket[1]:02d}"
    return f"{bucket:04d}"


def _parse_bucket(raw: str) -> Bucket:
    if "-" in raw:
        y, m = raw.split("-")
        return (int(y), int(m))
    return int(raw)


def write_series_csv(
    series_list: Iterable[SPSeries],
    path: str | Path | IO[str],
    keyword_names: dict[int, str] | None = None,
) -> None:
    names = keyword_names or {}

    def _dump(fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for series in series_list:
            kw = names.get(series.keyword_id, str(series.keyword_id))
            pair = "|".join(series.pair)
            for p in series.points:
                writer.writerow(
                    [kw, pair, series.granularity, _bucket_str(p.bucket),
                     repr(p.value), p.n1, p.n2, "true" if p.filled else "false"]
                )

    if hasattr(path, "write"):
        _dump(path)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            _dump(fh)


def read_series_csv(
    path: str | Path | IO[str], keyword_ids: dict[str, int] | None = None
) -> list[SPSeries]:
    """Inverse of :func:`write_series_csv` (used by downstream stages)."""
    ids = keyword_ids or {}
    out: dict[tuple, SPSeries] = {}
    if isinstance(path, (str, Path)):
        fh: IO[str] = open(path, "r", encoding="utf-8", newline="")
        close = True
    else:
        fh, close = path, False
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise DataFormatError(f"unexpected series CSV header: {header}")
        for row in reader:
            kw, pair_raw, gran, bucket_raw, value, n1, n2, filled = row
            kid = ids.get(kw, None)
            if kid is None:
                kid = int(kw) if kw.isdigit() else -1
            pair = tuple(pair_raw.split("|"))
            key = (kw, pair, gran)
            series = out.get(key)
            if series is None:
                series = out[key] = SPSeries(kid, pair, gran)  # type: ignore[arg-type]
            series.points.append(
                SPPoint(_parse_bucket(bucket_raw), float(value), filled == "true", int(n1), int(n2))
            )
    finally:
        if close:
            fh.close()
    return list(out.values())


def series_csv_string(series_list: Iterable[SPSeries], keyword_names=None) -> str:
    buf = io.StringIO()
    write_series_csv(series_list, buf, keyword_names)
    return buf.getvalue()
