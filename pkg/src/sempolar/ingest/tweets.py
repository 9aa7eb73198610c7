"""Tweet dump ingestion.

Input is newline-delimited JSON with keys ``text``, ``created_at``
(ISO-8601 date or datetime), ``target`` ("@CNN" or "@FoxNews"), ``id``.
Records map to turns with source ``twitter@cnn`` / ``twitter@foxnews``.
"""

from __future__ import annotations

import datetime as dt
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from sempolar.ingest.turns import SpeakerTurn, make_turn
from sempolar.keywords import KeywordMatcher

REQUIRED_FIELDS = ("text", "created_at", "target", "id")

TARGET_SOURCES = {
    "@cnn": "twitter@cnn",
    "@foxnews": "twitter@foxnews",
}


@dataclass
class TweetIngestResult:
    turns: list[SpeakerTurn] = field(default_factory=list)
    # (keyword_id, source) -> tweet count; word totals feed the mean
    volume: Counter = field(default_factory=Counter)
    word_totals: Counter = field(default_factory=Counter)
    skipped_missing_field: int = 0
    skipped_bad_target: int = 0
    dropped_no_keyword: int = 0
    dropped_out_of_window: int = 0

    def mean_words(self, keyword_id: int, source: str) -> float:
        n = self.volume[(keyword_id, source)]
        return self.word_totals[(keyword_id, source)] / n if n else 0.0


def _parse_date(raw: str) -> dt.date:
    return dt.datetime.fromisoformat(raw.replace("Z", "+00:00")).date() if "T" in raw else dt.date.fromisoformat(raw)


def ingest_tweets(
    lines: Iterable[str],
    matcher: KeywordMatcher,
    *,
    window: tuple[int, int] = (2010, 2020),
) -> TweetIngestResult:
    """Map tweet records to speaker turns, tallying volume per keyword.

    Records missing a required field, or with an unknown target, are
    skipped and counted; records without any configured keyword are
    dropped and counted.
    """
    res = TweetIngestResult()
    for line in lines:
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError:
            res.skipped_missing_field += 1
            continue
        if not isinstance(rec, dict) or any(k not in rec for k in REQUIRED_FIELDS):
            res.skipped_missing_field += 1
            continue
        source = TARGET_SOURCES.get(str(rec["target"]).lower())
        if source is None:
            res.skipped_bad_target += 1
            continue
        try:
            date = _parse_date(str(rec["created_at"]))
        except ValueError:
            res.skipped_missing_field += 1
            continue
        kws = matcher.match_ids(str(rec["text"]))
        if not kws:
            res.dropped_no_keyword += 1
            continue
        if not (window[0] <= date.year <= window[1]):
            res.dropped_out_of_window += 1
            continue
        turn = make_turn(f"{source}:{rec['id']}", source, date, str(rec["text"]), kws)
        res.turns.append(turn)
        for kid in kws:
            res.volume[(kid, source)] += 1
            res.word_totals[(kid, source)] += turn.word_count
    return res
