"""Deterministic toy embedder for fully self-contained runs.

Each token hashes to a fixed pseudorandom unit vector; the embedding of a
keyword occurrence is the L2-normalized sum of the vectors of the keyword
token and its +-window neighbors.  Identical context windows therefore give
identical vectors, and disjoint contexts give near-orthogonal ones.
"""

from __future__ import annotations

import hashlib

import numpy as np

from sempolar.errors import InputError
from sempolar.keywords import tokenize


def _token_seed(token: str, salt: int) -> int:
    digest = hashlib.blake2b(f"{salt}:{token}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def token_vector(token: str, d: int, *, salt: int = 0) -> np.ndarray:
    """Hash-seeded pseudorandom unit vector for one token."""
    rng = np.random.default_rng(_token_seed(token, salt))
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def toy_embed(
    text: str,
    position: int,
    d: int,
    window: int,
    *,
    salt: int = 0,
    _cache: dict | None = None,
) -> np.ndarray:
    """Context-window embedding of the token at ``position`` in ``text``."""
    if d < 2:
        raise InputError(f"dimension must be >= 2, got {d}")
    if window < 0:
        raise InputError(f"window must be >= 0, got {window}")
    tokens = tokenize(text)
    if not (0 <= position < len(tokens)):
        raise InputError(f"keyword position {position} out of range for {len(tokens)} tokens")
    lo = max(0, position - window)
    hi = min(len(tokens), position + window + 1)
    acc = np.zeros(d)
    for tok in tokens[lo:hi]:
        if _cache is not None:
            vec = _cache.get(tok)
            if vec is None:
                vec = _cache[tok] = token_vector(tok, d, salt=salt)
        else:
            vec = token_vector(tok, d, salt=salt)
        acc += vec
    norm = np.linalg.norm(acc)
    if norm == 0.0:  # cancellation is measure-zero for gaussian hash vectors
        raise InputError("context window summed to the zero vector")
    return acc / norm


def toy_embed_span(
    text: str,
    span: tuple[int, int],
    d: int,
    window: int,
    *,
    salt: int = 0,
    _cache: dict | None = None,
) -> np.ndarray:
    """Multiword keywords embed as the normalized mean over the span."""
    start, end = span
    if end <= start:
        raise InputError(f"empty span {span}")
    acc = np.zeros(d)
    for pos in range(start, end):
        acc += toy_embed(text, pos, d, window, salt=salt, _cache=_cache)
    acc /= end - start
    norm = np.linalg.norm(acc)
    if norm == 0.0:
        raise InputError("span embedding summed to the zero vector")
    return acc / norm


class ToyEmbedder:
    """EmbeddingProvider backed by :func:`toy_embed`, with a token cache."""

    def __init__(self, dimension: int, window: int = 4, salt: int = 0):
        if dimension < 2:
            raise InputError(f"dimension must be >= 2, got {dimension}")
        self.dimension = dimension
        self.window = window
        self.salt = salt
        self._cache: dict[str, np.ndarray] = {}

    def embed(self, text: str, position: int) -> np.ndarray:
        return toy_embed(text, position, self.dimension, self.window, salt=self.salt, _cache=self._cache)

    def embed_span(self, text: str, span: tuple[int, int]) -> np.ndarray:
        return toy_embed_span(text, span, self.dimension, self.window, salt=self.salt, _cache=self._cache)

    def describe(self) -> dict:
        return {"provider": "toy", "dimension": self.dimension, "window": self.window, "salt": self.salt}
