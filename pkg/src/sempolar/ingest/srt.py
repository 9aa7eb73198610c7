"""SubRip (.srt) parsing and serialization.

Real caption archives are dirty: BOMs, CRLF, junk blocks, repeated or
out-of-order indices.  The parser keeps every well-formed cue, skips the
rest, and reports how many blocks it dropped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from sempolar.errors import DataFormatError
from sempolar.keywords import normalize_text

_TIMING_RE = re.compile(
    r"^\s*(\d{1,3}):(\d{1,2}):(\d{1,2})[,.](\d{1,3})"
    r"\s*-->\s*"
    r"(\d{1,3}):(\d{1,2}):(\d{1,2})[,.](\d{1,3})\s*$"
)


@dataclass(frozen=True)
class SrtCue:
    """One subtitle cue; times are milliseconds from file start."""

    index: int
    start_ms: int
    end_ms: int
    text: str


@dataclass
class SrtDocument:
    """Parse result: the well-formed cues plus a skip tally."""

    cues: list[SrtCue] = field(default_factory=list)
    skipped: int = 0


def _parse_timing(line: str) -> tuple[int, int] | None:
    m = _TIMING_RE.match(line)
    if m is None:
        return None
    h1, m1, s1, ms1, h2, m2, s2, ms2 = m.groups()
    start = ((int(h1) * 60 + int(m1)) * 60 + int(s1)) * 1000 + int(ms1.ljust(3, "0"))
    end = ((int(h2) * 60 + int(m2)) * 60 + int(s2)) * 1000 + int(ms2.ljust(3, "0"))
    return start, end


def parse_srt(data: bytes, *, lossy: bool = True) -> SrtDocument:
    """Parse raw .srt bytes into cues.

    Malformed blocks (bad index, bad timing, start > end, index not
    strictly increasing) are skipped and counted, never fatal.  With
    ``lossy=False`` invalid UTF-8 raises instead of being replaced.
    """
    try:
        text = data.decode("utf-8-sig", errors="replace" if lossy else "strict")
    except UnicodeDecodeError as exc:
        raise DataFormatError(f"not valid UTF-8: {exc}") from exc

    doc = SrtDocument()
    last_index = 0
    block: list[str] = []

    def flush(block: list[str]) -> None:
        nonlocal last_index
        if not block:
            return
        if len(block) < 2:
            doc.skipped += 1
            return
        try:
            index = int(block[0].strip())
        except ValueError:
            doc.skipped += 1
            return
        timing = _parse_timing(block[1])
        if timing is None or index <= 0:
            doc.skipped += 1
            return
        start, end = timing
        if start > end or index <= last_index:
            doc.skipped += 1
            return
        cue_text = normalize_text(" ".join(block[2:]))
        doc.cues.append(SrtCue(index, start, end, cue_text))
        last_index = index

    for line in text.splitlines():
        if line.strip() == "":
            flush(block)
            block = []
        else:
            block.append(line)
    flush(block)
    return doc


def _format_ms(total_ms: int) -> str:
    s, ms = divmod(total_ms, 1000)
    m, s = divmod(s, 60)
    h, m = divmod(m, 60)
    return f"{h:02d}:{m:02d}:{s:02d},{ms:03d}"


def serialize_srt(cues: list[SrtCue]) -> bytes:
    """Canonical .srt bytes; ``parse_srt(serialize_srt(cues))`` round-trips."""
    blocks = []
    for cue in cues:
        lines = [str(cue.index), f"{_format_ms(cue.start_ms)} --> {_format_ms(cue.end_ms)}"]
        if cue.text:
            lines.append(cue.text)
        blocks.append("\n".join(lines))
    out = "\n\n".join(blocks)
    if out:
        out += "\n"
    return out.encode("utf-8")
