"""Run configuration: one YAML document fully defines a reproducible run.

Any key can be overridden from the environment with the ``SEMPOLAR_``
prefix and ``__`` as the nesting separator, e.g.
``SEMPOLAR_ANALYSIS__END_YEAR=2018`` or ``SEMPOLAR_SEED=7``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from sempolar.errors import ConfigError
from sempolar.keywords import DEFAULT_KEYWORDS, KeywordSpec

ENV_PREFIX = "SEMPOLAR_"

DEFAULT_BLOCKLIST = (
    "call now",
    "order now",
    "limited time offer",
    "www.",
    "1-800",
    "side effects may include",
    "ask your doctor",
)


@dataclass
class RunConfig:
    out_dir: Path = Path("runs/out")
    seed: int = 0

    # corpus
    srt_dirs: dict[str, Path] = field(default_factory=dict)
    tweets_path: Path | None = None
    date_pattern: str = r"(?P<year>\d{4})[-_]?(?P<month>\d{2})[-_]?(?P<day>\d{2})"
    blocklist: tuple[str, ...] = DEFAULT_BLOCKLIST
    duplicate_threshold: int = 10
    turn_gap_ms: int = 5000

    # analysis
    start_year: int = 2010
    end_year: int = 2020
    attribution_year: int | None = 2020
    tv_pair: tuple[str, str] = ("cnn", "foxnews")
    twitter_pair: tuple[str, str] = ("twitter@cnn", "twitter@foxnews")

    # embedding
    toy_embedder: bool = True
    dimension: int = 64
    window: int = 4
    salt: int = 0
    store_path: Path | None = None

    # granger
    min_lag: int = 1
    max_lag: int = 12
    alpha: float = 0.05

    # attribution
    top_k: int = 10
    percentile: float = 95.0
    hidden: int = 16
    ig_steps: int = 50
    learning_rate: float = 0.5
    max_epochs: int = 1500
    patience: int = 50

    keywords: tuple[KeywordSpec, ...] = DEFAULT_KEYWORDS

    @property
    def window_years(self) -> tuple[int, int]:
        return (self.start_year, self.end_year)

    def to_dict(self) -> dict:
        return {
            "out": str(self.out_dir),
            "seed": self.seed,
            "corpus": {
                "srt": {k: str(v) for k, v in sorted(self.srt_dirs.items())},
                "tweets": None if self.tweets_path is None else str(self.tweets_path),
                "date_pattern": self.date_pattern,
                "blocklist": list(self.blocklist),
                "duplicate_threshold": self.duplicate_threshold,
                "turn_gap_ms": self.turn_gap_ms,
            },
            "analysis": {
                "start_year": self.start_year,
                "end_year": self.end_year,
                "attribution_year": self.attribution_year,
                "tv_pair": list(self.tv_pair),
                "twitter_pair": list(self.twitter_pair),
            },
            "embedding": {
                "toy": self.toy_embedder,
                "dimension": self.dimension,
                "window": self.window,
                "salt": self.salt,
                "store": None if self.store_path is None else str(self.store_path),
            },
            "granger": {"min_lag": self.min_lag, "max_lag": self.max_lag, "alpha": self.alpha},
            "attribution": {
                "top_k": self.top_k,
                "percentile": self.percentile,
                "hidden": self.hidden,
                "steps": self.ig_steps,
                "learning_rate": self.learning_rate,
                "max_epochs": self.max_epochs,
                "patience": self.patience,
            },
            "keywords": [
                {"id": s.keyword_id, "forms": list(s.surface_forms), "topic": s.topic}
                for s in self.keywords
            ],
        }

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            yaml.safe_dump(self.to_dict(), fh, sort_keys=True)


_SECTIONS = ("corpus", "analysis", "embedding", "granger", "attribution")
_TOP_KEYS = {"out", "seed", "keywords", *_SECTIONS}


def _expect(mapping: Mapping, section: str, allowed: set[str]) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {section}: {', '.join(sorted(unknown))}")


def _pair(raw: Any, what: str) -> tuple[str, str]:
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise ConfigError(f"{what} must be a two-element list")
    a, b = (str(x).lower() for x in raw)
    if not a or not b or a == b:
        raise ConfigError(f"{what} entries must be nonempty and distinct")
    return (a, b)


def config_from_dict(data: Mapping[str, Any]) -> RunConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("config root must be a mapping")
    _expect(data, "config", _TOP_KEYS)
    cfg = RunConfig()

    if "out" in data:
        cfg.out_dir = Path(str(data["out"]))
    if "seed" in data:
        cfg.seed = int(data["seed"])

    corpus = data.get("corpus") or {}
    _expect(corpus, "corpus", {"srt", "tweets", "date_pattern", "blocklist",
                               "duplicate_threshold", "turn_gap_ms"})
    srt = corpus.get("srt") or {}
    cfg.srt_dirs = {str(k).lower(): Path(str(v)) for k, v in srt.items()}
    if corpus.get("tweets"):
        cfg.tweets_path = Path(str(corpus["tweets"]))
    if "date_pattern" in corpus:
        cfg.date_pattern = str(corpus["date_pattern"])
    if "blocklist" in corpus:
        cfg.blocklist = tuple(str(x).lower() for x in corpus["blocklist"])
    if "duplicate_threshold" in corpus:
        cfg.duplicate_threshold = int(corpus["duplicate_threshold"])
    if "turn_gap_ms" in corpus:
        cfg.turn_gap_ms = int(corpus["turn_gap_ms"])

    analysis = data.get("analysis") or {}
    _expect(analysis, "analysis", {"start_year", "end_year", "attribution_year",
                                   "tv_pair", "twitter_pair"})
    if "start_year" in analysis:
        cfg.start_year = int(analysis["start_year"])
    if "end_year" in analysis:
        cfg.end_year = int(analysis["end_year"])
    if cfg.end_year < cfg.start_year:
        raise ConfigError(f"end_year {cfg.end_year} precedes start_year {cfg.start_year}")
    if "attribution_year" in analysis:
        raw = analysis["attribution_year"]
        cfg.attribution_year = None if raw is None else int(raw)
    if "tv_pair" in analysis:
        cfg.tv_pair = _pair(analysis["tv_pair"], "analysis.tv_pair")
    if "twitter_pair" in analysis:
        cfg.twitter_pair = _pair(analysis["twitter_pair"], "analysis.twitter_pair")

    embedding = data.get("embedding") or {}
    _expect(embedding, "embedding", {"toy", "dimension", "window", "salt", "store"})
    if "toy" in embedding:
        cfg.toy_embedder = bool(embedding["toy"])
    if "dimension" in embedding:
        cfg.dimension = int(embedding["dimension"])
    if "window" in embedding:
        cfg.window = int(embedding["window"])
    if "salt" in embedding:
        cfg.salt = int(embedding["salt"])
    if embedding.get("store"):
        cfg.store_path = Path(str(embedding["store"]))

    granger = data.get("granger") or {}
    _expect(granger, "granger", {"min_lag", "max_lag", "alpha"})
    if "min_lag" in granger:
        cfg.min_lag = int(granger["min_lag"])
    if "max_lag" in granger:
        cfg.max_lag = int(granger["max_lag"])
    if "alpha" in granger:
        cfg.alpha = float(granger["alpha"])
    if not (1 <= cfg.min_lag <= cfg.max_lag):
        raise ConfigError(f"bad lag range [{cfg.min_lag}, {cfg.max_lag}]")

    attribution = data.get("attribution") or {}
    _expect(attribution, "attribution", {"top_k", "percentile", "hidden", "steps",
                                         "learning_rate", "max_epochs", "patience"})
    if "top_k" in attribution:
        cfg.top_k = int(attribution["top_k"])
    if "percentile" in attribution:
        cfg.percentile = float(attribution["percentile"])
    if "hidden" in attribution:
        cfg.hidden = int(attribution["hidden"])
    if "steps" in attribution:
        cfg.ig_steps = int(attribution["steps"])
    if "learning_rate" in attribution:
        cfg.learning_rate = float(attribution["learning_rate"])
    if "max_epochs" in attribution:
        cfg.max_epochs = int(attribution["max_epochs"])
    if "patience" in attribution:
        cfg.patience = int(attribution["patience"])

    if data.get("keywords"):
        specs = []
        for item in data["keywords"]:
            try:
                specs.append(
                    KeywordSpec(
                        int(item["id"]),
                        tuple(str(f).lower() for f in item["forms"]),
                        str(item["topic"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"bad keyword entry {item!r}: {exc}") from exc
        cfg.keywords = tuple(specs)
    return cfg


def _apply_env(data: dict, env: Mapping[str, str]) -> dict:
    for name, raw in sorted(env.items()):
        if not name.startswith(ENV_PREFIX):
            continue
        path = [p.lower() for p in name[len(ENV_PREFIX):].split("__")]
        if not all(path):
            raise ConfigError(f"malformed override variable {name}")
        node = data
        for part in path[:-1]:
            nxt = node.get(part)
            if nxt is None:
                nxt = node[part] = {}
            elif not isinstance(nxt, dict):
                raise ConfigError(f"override {name} descends into non-mapping key {part!r}")
            node = nxt
        node[path[-1]] = yaml.safe_load(raw)
    return data


def load_config(
    path: str | Path | None,
    *,
    env: Mapping[str, str] | None = None,
) -> RunConfig:
    """Load YAML config (or defaults when ``path`` is None), then env overrides."""
    data: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                loaded = yaml.safe_load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from exc
        if loaded is not None:
            if not isinstance(loaded, dict):
                raise ConfigError(f"config root must be a mapping, got {type(loaded).__name__}")
            data = loaded
    data = _apply_env(data, os.environ if env is None else env)
    return config_from_dict(data)
