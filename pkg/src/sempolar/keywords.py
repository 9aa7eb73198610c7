"""Keyword configuration and matching.

Matching is case-insensitive and word-boundary aware: text is tokenized
and a surface form matches where its own token sequence appears as a
contiguous run of tokens.  Multiword forms ("climate change") therefore
match spoken text, and hashtag spellings ("#BlackLivesMatter") collapse
to the bare token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from sempolar.errors import ConfigError

# word-ish runs; apostrophes and hyphens stay inside a token ("don't", "1-800")
_TOKEN_RE = re.compile(r"[a-z0-9]+(?:['’-][a-z0-9]+)*")


def normalize_text(text: str) -> str:
    """Collapse all whitespace runs to single spaces and strip the ends."""
    return " ".join(text.split())


def tokenize(text: str) -> list[str]:
    """Lowercased analysis tokens of ``text`` (punctuation dropped)."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class KeywordSpec:
    """One tracked keyword: an id, its accepted spellings, and a topic."""

    keyword_id: int
    surface_forms: tuple[str, ...]
    topic: str

    def __post_init__(self) -> None:
        if not self.surface_forms:
            raise ConfigError(f"keyword {self.keyword_id} has no surface forms")
        if not (0 <= self.keyword_id <= 255):
            raise ConfigError(f"keyword_id {self.keyword_id} outside u8 range")

    @property
    def form_tokens(self) -> tuple[tuple[str, ...], ...]:
        return tuple(tuple(tokenize(f)) for f in self.surface_forms)


# The default nine keywords across six topics.  "blacklivesmatter" also
# matches the spoken three-word spelling.
DEFAULT_KEYWORDS: tuple[KeywordSpec, ...] = (
    KeywordSpec(1, ("racism",), "racism"),
    KeywordSpec(2, ("racist",), "racism"),
    KeywordSpec(3, ("blacklivesmatter", "black lives matter"), "blm"),
    KeywordSpec(4, ("police",), "police"),
    KeywordSpec(5, ("immigration",), "immigration"),
    KeywordSpec(6, ("immigrants",), "immigration"),
    KeywordSpec(7, ("climate change",), "climate-change"),
    KeywordSpec(8, ("global warming",), "climate-change"),
    KeywordSpec(9, ("health care",), "health-care"),
)

DEFAULT_TOPICS: tuple[str, ...] = (
    "racism",
    "blm",
    "police",
    "immigration",
    "climate-change",
    "health-care",
)


def keyword_names(specs: Iterable[KeywordSpec]) -> dict[int, str]:
    """Map keyword_id to its primary (first) surface form."""
    return {s.keyword_id: s.surface_forms[0] for s in specs}


def topic_keywords(specs: Iterable[KeywordSpec], topic: str) -> list[KeywordSpec]:
    found = [s for s in specs if s.topic == topic]
    if not found:
        valid = sorted({s.topic for s in specs})
        raise ConfigError(f"unknown topic {topic!r}; valid topics: {', '.join(valid)}")
    return found


class KeywordMatcher:
    """Finds configured keyword occurrences in tokenized text."""

    def __init__(self, specs: Sequence[KeywordSpec] = DEFAULT_KEYWORDS):
        seen: set[int] = set()
        for spec in specs:
            if spec.keyword_id in seen:
                raise ConfigError(f"duplicate keyword_id {spec.keyword_id}")
            seen.add(spec.keyword_id)
        self.specs = tuple(specs)
        # first-token index: token -> [(spec, form tokens)]
        self._heads: dict[str, list[tuple[KeywordSpec, tuple[str, ...]]]] = {}
        for spec in self.specs:
            for form in spec.form_tokens:
                if form:
                    self._heads.setdefault(form[0], []).append((spec, form))

    def occurrences(self, tokens: Sequence[str]) -> dict[int, list[tuple[int, int]]]:
        """Per keyword_id, the [start, end) token spans of every match.

        Overlapping matches of *different* keywords are all reported; for a
        single keyword, matches at the same start position are reported once.
        """
        spans: dict[int, list[tuple[int, int]]] = {}
        for i, tok in enumerate(tokens):
            for spec, form in self._heads.get(tok, ()):
                if tuple(tokens[i : i + len(form)]) == form:
                    hits = spans.setdefault(spec.keyword_id, [])
                    if not hits or hits[-1][0] != i:
                        hits.append((i, i + len(form)))
        return spans

    def match_ids(self, text: str) -> frozenset[int]:
        """Keyword ids present in ``text``."""
        return frozenset(self.occurrences(tokenize(text)))
