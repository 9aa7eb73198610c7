"""Binary embedding store: one f32 vector per keyword occurrence.

File layout (little-endian):

    magic "DLNS" | version u16 | dimension u32
    metadata length u32 | UTF-8 JSON metadata blob
    records:  turn_id length u16 | turn_id bytes | source id u8
              | keyword id u8 | year u16 | month u8 | d x f32
    index blob (UTF-8 JSON: source-name map + per-bucket record offsets)
    footer:   record count u64 | index offset u64 | magic "DLNS"

Stores are immutable once written; any number of concurrent readers is
safe.  Source names are mapped to u8 ids in first-seen order and the map
lives in the index blob so records can stream to disk.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Protocol

import numpy as np

from sempolar.errors import DimensionMismatchError, InputError, StoreFormatError

MAGIC = b"DLNS"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHI")
_REC_FIXED = struct.Struct("<BBHB")
_FOOTER = struct.Struct("<QQ4s")


@dataclass(frozen=True)
class EmbeddingRecord:
    """One contextual vector for one keyword occurrence."""

    turn_id: str
    source: str
    keyword_id: int
    year: int
    month: int
    vector: np.ndarray

    def key(self) -> tuple:
        return (self.source, self.keyword_id, self.year, self.month, self.turn_id)


@dataclass
class EmbeddingSet:
    """All records matching one (source, keyword, time-bucket) query."""

    entries: list[EmbeddingRecord]

    def __len__(self) -> int:
        return len(self.entries)

    def matrix(self) -> np.ndarray:
        """(n, d) float32 matrix of the entry vectors."""
        return np.stack([e.vector for e in self.entries])


class EmbeddingProvider(Protocol):
    """Anything that maps (turn text, keyword token position) to a vector."""

    dimension: int

    def embed(self, text: str, position: int) -> np.ndarray: ...


def _bucket_key(source_id: int, keyword_id: int, year: int, month: int) -> str:
    return f"{source_id}:{keyword_id}:{year}:{month}"


def _validate_record(rec: EmbeddingRecord, dimension: int) -> np.ndarray:
    vec = np.asarray(rec.vector)
    if vec.ndim != 1 or vec.shape[0] != dimension:
        raise DimensionMismatchError(
            f"record {rec.turn_id!r}: vector has dimension {vec.shape}, store expects {dimension}"
        )
    vec = vec.astype("<f4", copy=False)
    if not np.all(np.isfinite(vec)):
        raise InputError(f"record {rec.turn_id!r}: vector has non-finite entries")
    if not np.any(vec):
        raise InputError(f"record {rec.turn_id!r}: zero vector rejected")
    if not (0 <= rec.keyword_id <= 255):
        raise InputError(f"record {rec.turn_id!r}: keyword_id {rec.keyword_id} outside u8 range")
    if not (1 <= rec.month <= 12):
        raise InputError(f"record {rec.turn_id!r}: month {rec.month} outside 1..12")
    if not (0 <= rec.year <= 0xFFFF):
        raise InputError(f"record {rec.turn_id!r}: year {rec.year} outside u16 range")
    return vec


def write_store(
    records: Iterable[EmbeddingRecord],
    path: str | Path,
    *,
    dimension: int | None = None,
    metadata: dict | None = None,
) -> "EmbeddingStore":
    """Stream records to a new store file and return an open handle.

    ``dimension`` may be omitted when the stream is nonempty; it is then
    taken from the first record.  A dimension mismatch aborts the write,
    naming the offending record.
    """
    path = Path(path)
    meta_blob = json.dumps(metadata or {}, sort_keys=True).encode("utf-8")
    it = iter(records)
    first = next(it, None)
    if first is not None and dimension is None:
        dimension = int(np.asarray(first.vector).shape[0])
    if dimension is None:
        raise InputError("dimension is required for an empty store")

    sources: dict[str, int] = {}
    buckets: dict[str, list[int]] = {}
    count = 0
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, dimension))
        fh.write(struct.pack("<I", len(meta_blob)))
        fh.write(meta_blob)

        def emit(rec: EmbeddingRecord) -> None:
            nonlocal count
            vec = _validate_record(rec, dimension)
            sid = sources.get(rec.source)
            if sid is None:
                if len(sources) == 256:
                    raise InputError("store supports at most 256 distinct sources")
                sid = sources[rec.source] = len(sources)
            tid = rec.turn_id.encode("utf-8")
            if len(tid) > 0xFFFF:
                raise InputError(f"record {rec.turn_id!r}: turn id too long")
            offset = fh.tell()
            fh.write(struct.pack("<H", len(tid)))
            fh.write(tid)
            fh.write(_REC_FIXED.pack(sid, rec.keyword_id, rec.year, rec.month))
            fh.write(vec.tobytes())
            buckets.setdefault(_bucket_key(sid, rec.keyword_id, rec.year, rec.month), []).append(offset)
            count += 1

        if first is not None:
            emit(first)
            for rec in it:
                emit(rec)

        index_offset = fh.tell()
        index_blob = json.dumps({"sources": sources, "buckets": buckets}, sort_keys=True).encode("utf-8")
        fh.write(index_blob)
        fh.write(_FOOTER.pack(count, index_offset, MAGIC))
    return EmbeddingStore.open(path)


class EmbeddingStore:
    """Read-only handle over a written store file."""

    def __init__(self, path: Path, dimension: int, metadata: dict, record_count: int,
                 sources: dict[str, int], buckets: dict[str, list[int]], data_start: int, index_offset: int):
        self.path = path
        self.dimension = dimension
        self.metadata = metadata
        self.record_count = record_count
        self.sources = sources
        self._buckets = buckets
        self._data_start = data_start
        self._index_offset = index_offset
        self._rec_size_fixed = _REC_FIXED.size

    @classmethod
    def open(cls, path: str | Path) -> "EmbeddingStore":
        path = Path(path)
        with open(path, "rb") as fh:
            head = fh.read(_HEADER.size)
            if len(head) < _HEADER.size:
                raise StoreFormatError(f"{path}: truncated header")
            magic, version, dimension = _HEADER.unpack(head)
            if magic != MAGIC:
                raise StoreFormatError(f"{path}: bad magic {magic!r}")
            if version != FORMAT_VERSION:
                raise StoreFormatError(f"{path}: unsupported format version {version}")
            raw_len = fh.read(4)
            if len(raw_len) < 4:
                raise StoreFormatError(f"{path}: truncated header")
            (meta_len,) = struct.unpack("<I", raw_len)
            meta_blob = fh.read(meta_len)
            if len(meta_blob) < meta_len:
                raise StoreFormatError(f"{path}: truncated metadata blob")
            try:
                metadata = json.loads(meta_blob.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise StoreFormatError(f"{path}: bad metadata blob: {exc}") from exc
            data_start = fh.tell()
            fh.seek(0, 2)
            file_size = fh.tell()
            if file_size < data_start + _FOOTER.size:
                raise StoreFormatError(f"{path}: truncated footer")
            fh.seek(file_size - _FOOTER.size)
            record_count, index_offset, tail_magic = _FOOTER.unpack(fh.read(_FOOTER.size))
            if tail_magic != MAGIC:
                raise StoreFormatError(f"{path}: bad trailing magic")
            if not (data_start <= index_offset <= file_size - _FOOTER.size):
                raise StoreFormatError(f"{path}: index offset out of bounds")
            fh.seek(index_offset)
            try:
                index = json.loads(fh.read(file_size - _FOOTER.size - index_offset).decode("utf-8"))
                sources = {str(k): int(v) for k, v in index["sources"].items()}
                buckets = {str(k): [int(o) for o in v] for k, v in index["buckets"].items()}
            except (KeyError, ValueError, UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise StoreFormatError(f"{path}: bad index blob: {exc}") from exc
        return cls(path, dimension, metadata, record_count, sources, buckets, data_start, index_offset)

    def _read_record_at(self, fh, offset: int, source_names: dict[int, str]) -> EmbeddingRecord:
        fh.seek(offset)
        raw = fh.read(2)
        if len(raw) < 2:
            raise StoreFormatError(f"{self.path}: truncated record at {offset}")
        (tid_len,) = struct.unpack("<H", raw)
        tid = fh.read(tid_len).decode("utf-8")
        sid, keyword_id, year, month = _REC_FIXED.unpack(fh.read(self._rec_size_fixed))
        vec = np.frombuffer(fh.read(4 * self.dimension), dtype="<f4")
        if vec.shape[0] != self.dimension:
            raise StoreFormatError(f"{self.path}: truncated vector at {offset}")
        name = source_names.get(sid)
        if name is None:
            raise StoreFormatError(f"{self.path}: record at {offset} references unknown source id {sid}")
        return EmbeddingRecord(tid, name, keyword_id, year, month, vec.copy())

    def iter_records(self) -> Iterator[EmbeddingRecord]:
        """Sequential scan of every record in file order."""
        names = {v: k for k, v in self.sources.items()}
        with open(self.path, "rb") as fh:
            offset = self._data_start
            while offset < self._index_offset:
                rec = self._read_record_at(fh, offset, names)
                offset = fh.tell()
                yield rec

    def query(
        self, source: str, keyword_id: int, bucket: int | tuple[int, int]
    ) -> EmbeddingSet | None:
        """Records for one key; a yearly bucket unions its 12 months.

        Returns ``None`` when nothing matches (distinct from raising on
        I/O or format errors).  Entries are sorted by (year, month,
        turn_id), so results are invariant under store record order.
        """
        sid = self.sources.get(source)
        if sid is None:
            return None
        if isinstance(bucket, tuple):
            year, month = bucket
            keys = [_bucket_key(sid, keyword_id, year, month)]
        else:
            keys = [_bucket_key(sid, keyword_id, bucket, m) for m in range(1, 13)]
        offsets = [o for k in keys for o in self._buckets.get(k, ())]
        if not offsets:
            return None
        names = {v: k for k, v in self.sources.items()}
        with open(self.path, "rb") as fh:
            entries = [self._read_record_at(fh, o, names) for o in offsets]
        entries.sort(key=lambda r: (r.year, r.month, r.turn_id))
        return EmbeddingSet(entries)


def validate_store(path: str | Path) -> dict:
    """Full structural check of a store file.

    Walks every record, cross-checks the footer count and the index
    offsets, and raises :class:`StoreFormatError` on the first defect.
    Returns a summary dict on success.
    """
    store = EmbeddingStore.open(path)
    indexed = sorted(o for offs in store._buckets.values() for o in offs)
    if len(indexed) != store.record_count:
        raise StoreFormatError(
            f"{path}: index lists {len(indexed)} records, footer says {store.record_count}"
        )
    walked = []
    for rec in store.iter_records():
        if not np.all(np.isfinite(rec.vector)):
            raise StoreFormatError(f"{path}: non-finite vector in record {rec.turn_id!r}")
        walked.append(rec)
    if len(walked) != store.record_count:
        raise StoreFormatError(
            f"{path}: walked {len(walked)} records, footer says {store.record_count}"
        )
    return {
        "path": str(path),
        "dimension": store.dimension,
        "records": store.record_count,
        "sources": dict(store.sources),
        "metadata": store.metadata,
    }


def merge_stores(paths: Iterable[str | Path], out_path: str | Path) -> "EmbeddingStore":
    """Concatenate several stores (same dimension) into one."""
    stores = [EmbeddingStore.open(p) for p in paths]
    if not stores:
        raise InputError("nothing to merge")
    dims = {s.dimension for s in stores}
    if len(dims) != 1:
        raise DimensionMismatchError(f"stores disagree on dimension: {sorted(dims)}")
    meta = {"merged_from": [str(s.path) for s in stores]}

    def _all() -> Iterator[EmbeddingRecord]:
        for s in stores:
            yield from s.iter_records()

    return write_store(_all(), out_path, dimension=stores[0].dimension, metadata=meta)
