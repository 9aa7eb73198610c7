"""Token-level attribution reports and the lag-shifted corpus windows.

A token's attribution is the mean, over all of its occurrences in both
corpora, of the summed per-dimension integrated gradients of its vector
slice.  Positive scores associate with class a, negative with class b.
Low-frequency tokens (at or below the corpus frequency percentile) and
the topical keyword's surface forms are excluded.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from sempolar.attribution.ig import integrated_gradients
from sempolar.attribution.model import ReferenceClassifier, turn_token_matrix
from sempolar.errors import InputError
from sempolar.ingest.turns import SpeakerTurn
from sempolar.keywords import KeywordSpec, tokenize
from sempolar.store import EmbeddingProvider

DEFAULT_PERCENTILE = 95.0
DEFAULT_TOP_K = 10
DEFAULT_MAX_SPLIT_LAG = 8

AGGREGATION_NOTE = "per-token score = mean over occurrences of summed per-dimension IG"


@dataclass
class AttributionReport:
    """Ranked contextual tokens for one topic, per class."""

    topic: str
    tokens_a: list[tuple[str, float]]
    tokens_b: list[tuple[str, float]]
    frequency_floor: float
    keyword_excluded: bool
    class_a: str = "a"
    class_b: str = "b"
    lag: int | None = None
    diagnostics: list[str] = field(default_factory=list)
    aggregation: str = AGGREGATION_NOTE


def token_attributions(
    model: ReferenceClassifier,
    corpus_a: Sequence[SpeakerTurn],
    corpus_b: Sequence[SpeakerTurn],
    keywords: KeywordSpec | Sequence[KeywordSpec],
    provider: EmbeddingProvider,
    *,
    k: int = DEFAULT_TOP_K,
    percentile: float = DEFAULT_PERCENTILE,
    steps: int = 50,
    class_labels: tuple[str, str] = ("a", "b"),
    lag: int | None = None,
) -> AttributionReport:
    """Top-k tokens per class by mean integrated-gradients score.

    Tokens must be strictly above the ``percentile`` of merged-corpus
    token counts to qualify (percentile 100 therefore excludes
    everything); the keyword surface forms never appear.
    """
    specs = [keywords] if isinstance(keywords, KeywordSpec) else list(keywords)
    if not specs:
        raise InputError("at least one keyword spec is required")
    topic = specs[0].topic
    excluded = {form.lower() for spec in specs for form in spec.surface_forms}

    if not corpus_a or not corpus_b:
        raise InputError("both corpora must be nonempty")

    # canonical processing order makes float accumulation (and therefore
    # the report) invariant under shuffling of the input corpora
    merged = sorted((*corpus_a, *corpus_b), key=lambda t: t.turn_id)

    counts: Counter[str] = Counter()
    for turn in merged:
        counts.update(tokenize(turn.text))

    score_sum: dict[str, float] = {}
    score_n: Counter[str] = Counter()
    for turn in merged:
        tokens = tokenize(turn.text)
        matrix = turn_token_matrix(turn, provider)
        attr = integrated_gradients(model, matrix, steps=steps)
        per_token = attr.sum(axis=1)
        for tok, score in zip(tokens, per_token):
            score_sum[tok] = score_sum.get(tok, 0.0) + float(score)
            score_n[tok] += 1

    floor = float(np.percentile(list(counts.values()), percentile))
    diagnostics: list[str] = []
    qualified = {
        tok: score_sum[tok] / score_n[tok]
        for tok in score_sum
        if counts[tok] > floor and tok not in excluded
    }
    if not qualified:
        diagnostics.append(f"no tokens above the {percentile:g}th frequency percentile (floor {floor:g})")

    positives = sorted(
        ((t, s) for t, s in qualified.items() if s > 0.0), key=lambda ts: (-ts[1], ts[0])
    )
    negatives = sorted(
        ((t, s) for t, s in qualified.items() if s < 0.0), key=lambda ts: (ts[1], ts[0])
    )
    if qualified and len(positives) < k:
        diagnostics.append(f"only {len(positives)} qualifying tokens for class {class_labels[0]}")
    if qualified and len(negatives) < k:
        diagnostics.append(f"only {len(negatives)} qualifying tokens for class {class_labels[1]}")

    return AttributionReport(
        topic=topic,
        tokens_a=positives[:k],
        tokens_b=negatives[:k],
        frequency_floor=percentile,
        keyword_excluded=True,
        class_a=class_labels[0],
        class_b=class_labels[1],
        lag=lag,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Lag-shifted corpus windows
# ---------------------------------------------------------------------------


def lag_windows(lag: int, direction: str = "tv-leads") -> tuple[range, range]:
    """(side_a_months, side_b_months) for a lag; direction swaps them.

    The leading side keeps months [1, 12 - lag] of each year, the
    trailing side keeps [1 + lag, 12], so trailing windows sit ``lag``
    months after leading ones.
    """
    leader = range(1, 13 - lag)
    follower = range(1 + lag, 13)
    if direction == "tv-leads":
        return leader, follower
    if direction == "twitter-leads":
        return follower, leader
    raise InputError(f"unknown direction {direction!r}; use 'tv-leads' or 'twitter-leads'")


def lag_split(
    turns: Iterable[SpeakerTurn],
    lag: int,
    side: str,
    direction: str = "tv-leads",
    *,
    max_lag: int = DEFAULT_MAX_SPLIT_LAG,
) -> list[SpeakerTurn]:
    """Keep only the turns inside the lag window for one side ('a' or 'b')."""
    if not (1 <= lag <= max_lag):
        raise InputError(f"lag {lag} out of range [1, {max_lag}]")
    win_a, win_b = lag_windows(lag, direction)
    if side == "a":
        months = set(win_a)
    elif side == "b":
        months = set(win_b)
    else:
        raise InputError(f"side must be 'a' or 'b', got {side!r}")
    return [t for t in turns if t.date.month in months]


# ---------------------------------------------------------------------------
# Report export
# ---------------------------------------------------------------------------

REPORT_CSV_HEADER = ["token", "attribution", "class", "topic", "lag"]


def write_report_csv(reports: Iterable[AttributionReport], path: str | Path | IO[str]) -> None:
    def _dump(fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_CSV_HEADER)
        for rep in reports:
            lag = "" if rep.lag is None else rep.lag
            for tok, score in rep.tokens_a:
                writer.writerow([tok, repr(score), rep.class_a, rep.topic, lag])
            for tok, score in rep.tokens_b:
                writer.writerow([tok, repr(score), rep.class_b, rep.topic, lag])

    if hasattr(path, "write"):
        _dump(path)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            _dump(fh)


def report_markdown(report: AttributionReport) -> str:
    """Two-column top-token table, one row per rank."""
    lines = []
    title = f"## Topic: {report.topic}"
    if report.lag is not None:
        title += f" (lag: {report.lag} months)"
    lines.append(title)
    lines.append("")
    lines.append(f"| {report.class_a} token | attr. | {report.class_b} token | attr. |")
    lines.append("|---|---|---|---|")
    for i in range(max(len(report.tokens_a), len(report.tokens_b))):
        ta, sa = report.tokens_a[i] if i < len(report.tokens_a) else ("", "")
        tb, sb = report.tokens_b[i] if i < len(report.tokens_b) else ("", "")
        fa = f"{sa:.3f}" if sa != "" else ""
        fb = f"{sb:.3f}" if sb != "" else ""
        lines.append(f"| {ta} | {fa} | {tb} | {fb} |")
    lines.append("")
    lines.append(f"frequency floor: >{report.frequency_floor:g}th percentile; "
                 f"topical keyword excluded: {str(report.keyword_excluded).lower()}")
    lines.append(f"aggregation: {report.aggregation}")
    for d in report.diagnostics:
        lines.append(f"note: {d}")
    lines.append("")
    return "\n".join(lines)
