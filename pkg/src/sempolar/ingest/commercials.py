"""Commercial removal: blocklist matching plus cross-file duplicate suppression.

Advertising copy is near-verbatim across airings, so any cue text that
repeats more than ``duplicate_threshold`` times across a day's file set is
treated as a commercial alongside explicit blocklist hits.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Mapping

from sempolar.ingest.srt import SrtCue

DEFAULT_DUPLICATE_THRESHOLD = 10


def _norm(text: str) -> str:
    return " ".join(text.lower().split())


def count_cue_texts(cue_lists: Iterable[list[SrtCue]]) -> Counter[str]:
    """Occurrence counts of normalized cue texts across a file set."""
    counts: Counter[str] = Counter()
    for cues in cue_lists:
        counts.update(_norm(c.text) for c in cues)
    return counts


def remove_commercials(
    cues: list[SrtCue],
    blocklist: Iterable[str],
    *,
    text_counts: Mapping[str, int] | None = None,
    duplicate_threshold: float = DEFAULT_DUPLICATE_THRESHOLD,
) -> list[SrtCue]:
    """Drop cues matching a blocklist entry or repeated beyond the threshold.

    ``blocklist`` entries must be normalized lowercase strings; a cue is
    dropped when any entry is a substring of its normalized text.
    ``text_counts`` (from :func:`count_cue_texts` over the daily file set)
    enables the duplicate rule; ``duplicate_threshold=math.inf`` disables it.
    Order is preserved.
    """
    patterns = tuple(blocklist)
    if text_counts is None:
        text_counts = {}
        duplicate_threshold = math.inf

    kept = []
    for cue in cues:
        norm = _norm(cue.text)
        if any(p in norm for p in patterns):
            continue
        if text_counts.get(norm, 0) > duplicate_threshold:
            continue
        kept.append(cue)
    return kept
