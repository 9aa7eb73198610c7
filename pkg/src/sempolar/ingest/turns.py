"""Speaker-turn reconstruction from cues, plus the newline-delimited turn store.

A new turn starts at a ">>" speaker-change marker or when the gap between
consecutive cues exceeds ``gap_ms`` (default 5 s), the standard US
closed-caption convention.
"""

from __future__ import annotations

import datetime as dt
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

from sempolar.errors import DataFormatError
from sempolar.ingest.srt import SrtCue
from sempolar.keywords import KeywordMatcher, normalize_text, tokenize

DEFAULT_GAP_MS = 5000

_SPEAKER_MARK = re.compile(r"^\s*>{2,}\s*")


@dataclass(frozen=True)
class SpeakerTurn:
    """One contiguous utterance (or tweet) admitted to the corpus."""

    turn_id: str
    source: str
    date: dt.date
    text: str
    keywords: frozenset[int]
    word_count: int

    def to_record(self) -> dict:
        return {
            "turn_id": self.turn_id,
            "source": self.source,
            "date": self.date.isoformat(),
            "text": self.text,
            "keywords": sorted(self.keywords),
            "word_count": self.word_count,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "SpeakerTurn":
        try:
            return cls(
                turn_id=rec["turn_id"],
                source=rec["source"],
                date=dt.date.fromisoformat(rec["date"]),
                text=rec["text"],
                keywords=frozenset(rec["keywords"]),
                word_count=rec["word_count"],
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise DataFormatError(f"bad turn record: {exc}") from exc


def make_turn(turn_id: str, source: str, date: dt.date, text: str, keywords: frozenset[int]) -> SpeakerTurn:
    text = normalize_text(text)
    return SpeakerTurn(turn_id, source, date, text, keywords, word_count=len(text.split()))


def merge_cue_texts(cues: Sequence[SrtCue], *, gap_ms: int = DEFAULT_GAP_MS) -> list[str]:
    """Merge consecutive cues into turn texts at ">>" markers or long gaps."""
    turns: list[str] = []
    current: list[str] = []
    prev_end = None
    for cue in cues:
        marked = _SPEAKER_MARK.match(cue.text) is not None
        gapped = prev_end is not None and cue.start_ms - prev_end > gap_ms
        if current and (marked or gapped):
            turns.append(" ".join(current))
            current = []
        piece = _SPEAKER_MARK.sub("", cue.text).strip()
        if piece:
            current.append(piece)
        prev_end = cue.end_ms
    if current:
        turns.append(" ".join(current))
    return turns


def extract_turns(
    cues: Sequence[SrtCue],
    source: str,
    date: dt.date,
    matcher: KeywordMatcher,
    *,
    gap_ms: int = DEFAULT_GAP_MS,
    turn_id_prefix: str = "",
) -> list[SpeakerTurn]:
    """Keyword-bearing speaker turns from commercial-filtered cues.

    Turn ids are ``{prefix}{ordinal:04d}`` over the merged (pre-filter)
    turn sequence, so ids are stable under keyword reconfiguration.
    """
    turns = []
    for i, text in enumerate(merge_cue_texts(cues, gap_ms=gap_ms)):
        kws = matcher.match_ids(text)
        if kws:
            turns.append(make_turn(f"{turn_id_prefix}{i:04d}", source, date, text, kws))
    return turns


def turn_sort_key(turn: SpeakerTurn) -> tuple:
    """Deterministic corpus order: date, then source, then id."""
    return (turn.date, turn.source, turn.turn_id)


def write_turns(turns: Iterable[SpeakerTurn], path: str | Path | IO[str]) -> int:
    """Write the turn store (one JSON record per line). Returns the count."""
    n = 0

    def _dump(fh) -> int:
        count = 0
        for turn in turns:
            fh.write(json.dumps(turn.to_record(), sort_keys=True))
            fh.write("\n")
            count += 1
        return count

    if hasattr(path, "write"):
        n = _dump(path)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            n = _dump(fh)
    return n


def read_turns(path: str | Path) -> Iterator[SpeakerTurn]:
    """Stream turns back from a turn store file."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            yield SpeakerTurn.from_record(rec)


def tokens_of(turn: SpeakerTurn) -> list[str]:
    return tokenize(turn.text)
