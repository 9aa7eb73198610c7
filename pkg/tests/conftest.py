"""Shared fixtures: deterministic synthetic corpora with planted dynamics."""

from __future__ import annotations

import datetime as dt
import json
from pathlib import Path

import numpy as np
import pytest
import yaml

from sempolar.cli import main as cli_main
from sempolar.ingest.turns import SpeakerTurn, make_turn
from sempolar.keywords import KeywordMatcher

# class-exclusive context vocabularies planted in the synthetic corpus
CNN_WORDS = [
    "community", "families", "justice", "reform", "protest", "rights",
    "voices", "history", "healing", "equality", "neighbors", "students",
]
FOX_WORDS = [
    "crime", "riots", "disorder", "enforcement", "radical", "chaos",
    "looting", "borders", "taxes", "leftists", "suspects", "gangs",
]
SHARED_WORDS = [
    "news", "said", "people", "today", "officials", "country",
    "state", "public", "week", "report", "union", "streets",
]


def _sentence(rng: np.random.Generator, own_words: list[str], p_exclusive: float,
              uid: int) -> str:
    draws = [
        rng.choice(own_words) if rng.random() < p_exclusive else rng.choice(SHARED_WORDS)
        for _ in range(6)
    ]
    # keyword sits at token 3; the uniq tail stays outside a +-3 window
    return (
        f"{draws[0]} {draws[1]} {draws[2]} police {draws[3]} {draws[4]} {draws[5]} "
        f"zq{uid}xa zq{uid}xb"
    )


def _srt_bytes(texts: list[str]) -> bytes:
    blocks = []
    for i, text in enumerate(texts, 1):
        start = i * 20000
        end = start + 4000
        h, rem = divmod(start, 3600000)
        m, rem = divmod(rem, 60000)
        s, ms = divmod(rem, 1000)
        h2, rem2 = divmod(end, 3600000)
        m2, rem2 = divmod(rem2, 60000)
        s2, ms2 = divmod(rem2, 1000)
        blocks.append(
            f"{i}\n{h:02d}:{m:02d}:{s:02d},{ms:03d} --> {h2:02d}:{m2:02d}:{s2:02d},{ms2:03d}\n"
            f">> {text}\n"
        )
    return "\n".join(blocks).encode("utf-8")


def build_synthetic_corpus(
    root: Path,
    *,
    seed: int = 7,
    years: tuple[int, int] = (2010, 2020),
    turns_per_month: int = 16,
    spike_year: int = 2015,
    lag: int = 3,
    dimension: int = 48,
    window: int = 3,
) -> dict:
    """SRT trees + tweet dump with a polarity spike and a lagged tv->twitter link.

    The exclusive-vocabulary usage probability follows an AR(1) process on
    the TV side, gets a one-year boost in ``spike_year``, and the Twitter
    side copies the TV process ``lag`` months later.
    """
    rng = np.random.default_rng(seed)
    y0, y1 = years
    months = [(y, m) for y in range(y0, y1 + 1) for m in range(1, 13)]
    n = len(months)

    ar = np.zeros(n)
    for t in range(1, n):
        ar[t] = 0.6 * ar[t - 1] + rng.normal(0.0, 0.15)
    spike = np.array([0.5 if y == spike_year else 0.0 for y, _ in months])
    p_tv = np.clip(0.45 + ar + spike, 0.05, 0.95)
    p_tw = np.empty(n)
    for t in range(n):
        base = ar[t - lag] + spike[t - lag] if t >= lag else 0.0
        p_tw[t] = min(0.95, max(0.05, 0.45 + 0.9 * base + rng.normal(0.0, 0.02)))

    uid = 0
    (root / "cnn").mkdir(parents=True, exist_ok=True)
    (root / "foxnews").mkdir(parents=True, exist_ok=True)
    for t, (year, month) in enumerate(months):
        for source, own in (("cnn", CNN_WORDS), ("foxnews", FOX_WORDS)):
            texts = []
            for _ in range(turns_per_month):
                texts.append(_sentence(rng, own, p_tv[t], uid))
                uid += 1
            # noise the pipeline must drop: a commercial and a weather line
            texts.append("call now 1-800-555-0199 for a free quote")
            texts.append("the weather today is mild")
            # a promo line repeated often enough to trip duplicate suppression
            texts.extend(["thanks for tuning in tonight stay with us"] * 12)
            path = root / source / f"{source}_{year:04d}-{month:02d}-15_0000.srt"
            path.write_bytes(_srt_bytes(texts))

    tweet_lines = []
    for t, (year, month) in enumerate(months):
        for target, own in (("@CNN", CNN_WORDS), ("@FoxNews", FOX_WORDS)):
            for _ in range(turns_per_month):
                rec = {
                    "text": _sentence(rng, own, p_tw[t], uid),
                    "created_at": f"{year:04d}-{month:02d}-11",
                    "target": target,
                    "id": f"t{uid:07d}",
                }
                uid += 1
                tweet_lines.append(json.dumps(rec))
    tweets_path = root / "tweets.ndjson"
    tweets_path.write_text("\n".join(tweet_lines) + "\n", encoding="utf-8")

    config = {
        "out": str(root / "out"),
        "seed": seed,
        "corpus": {
            "srt": {"cnn": str(root / "cnn"), "foxnews": str(root / "foxnews")},
            "tweets": str(tweets_path),
        },
        "analysis": {"start_year": y0, "end_year": y1, "attribution_year": 2020},
        "embedding": {"toy": True, "dimension": dimension, "window": window},
    }
    config_path = root / "config.yaml"
    config_path.write_text(yaml.safe_dump(config), encoding="utf-8")
    return {
        "config": config_path,
        "out": root / "out",
        "p_tv": p_tv,
        "p_tw": p_tw,
        "months": months,
        "lag": lag,
        "spike_year": spike_year,
    }


def run_cli(*args: str) -> int:
    return cli_main(list(args))


@pytest.fixture(scope="session")
def synth_corpus(tmp_path_factory) -> dict:
    root = tmp_path_factory.mktemp("corpus")
    return build_synthetic_corpus(root)


@pytest.fixture(scope="session")
def pipeline_run(synth_corpus) -> dict:
    """One full report-all run over the synthetic corpus, timed."""
    import time

    t0 = time.time()
    rc = run_cli("--config", str(synth_corpus["config"]), "report-all")
    elapsed = time.time() - t0
    assert rc == 0
    return {**synth_corpus, "elapsed": elapsed}


@pytest.fixture(scope="session")
def matcher() -> KeywordMatcher:
    return KeywordMatcher()


def quick_turn(i: int, source: str, text: str, matcher: KeywordMatcher,
               date: dt.date = dt.date(2020, 6, 1)) -> SpeakerTurn:
    return make_turn(f"{source}:{i:05d}", source, date, text, matcher.match_ids(text))
