"""Command-line pipeline: ingest -> embed-toy -> polarize -> granger -> attribute.

Every invocation is reproducible from config + inputs + seed alone; all
emitted files are recorded in ``manifest.json`` with content hashes.
Exit status: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import re
import sys
from collections import Counter, defaultdict
from pathlib import Path

import click

from sempolar.attribution import lag_split, token_attributions, train_classifier
from sempolar.attribution.tokens import report_markdown, write_report_csv
from sempolar.charts import write_line_chart
from sempolar.config import RunConfig, load_config
from sempolar.errors import (
    ConfigError,
    DataFormatError,
    DegenerateInputError,
    InputError,
    SempolarError,
)
from sempolar.ingest import (
    count_cue_texts,
    extract_turns,
    ingest_tweets,
    parse_srt,
    read_turns,
    remove_commercials,
    turn_sort_key,
    write_turns,
)
from sempolar.keywords import KeywordMatcher, keyword_names, tokenize, topic_keywords
from sempolar.polarity import build_series, read_series_csv, write_series_csv
from sempolar.stats import run_hypotheses
from sempolar.store import EmbeddingRecord, EmbeddingStore, validate_store, write_store
from sempolar.toyembed import ToyEmbedder

TURNS_FILE = "turns.ndjson"
STORE_FILE = "embeddings.dlns"
MANIFEST_FILE = "manifest.json"


# ---------------------------------------------------------------------------
# manifest
# ---------------------------------------------------------------------------


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _update_manifest(out_dir: Path, paths: list[Path]) -> None:
    manifest_path = out_dir / MANIFEST_FILE
    entries: dict[str, dict] = {}
    if manifest_path.exists():
        try:
            for item in json.loads(manifest_path.read_text())["files"]:
                entries[item["path"]] = item
        except (json.JSONDecodeError, KeyError, TypeError):
            entries = {}
    for path in paths:
        rel = str(path.relative_to(out_dir))
        entries[rel] = {"path": rel, "sha256": _sha256(path), "bytes": path.stat().st_size}
    payload = {"files": [entries[k] for k in sorted(entries)]}
    manifest_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# stage implementations
# ---------------------------------------------------------------------------


def _extract_date(name: str, pattern: re.Pattern) -> dt.date | None:
    m = pattern.search(name)
    if not m:
        return None
    try:
        return dt.date(int(m.group("year")), int(m.group("month")), int(m.group("day")))
    except (IndexError, ValueError):
        return None


def run_ingest(cfg: RunConfig) -> list[Path]:
    matcher = KeywordMatcher(cfg.keywords)
    try:
        pattern = re.compile(cfg.date_pattern)
    except re.error as exc:
        raise ConfigError(f"bad date_pattern: {exc}") from exc

    turns = []
    diag: dict = {
        "files_parsed": 0,
        "files_unreadable": 0,
        "files_undated": 0,
        "cues_parsed": 0,
        "cues_skipped": 0,
        "cues_removed_commercial": 0,
        "turns_out_of_window": 0,
        "sources": {},
    }

    for source, root in sorted(cfg.srt_dirs.items()):
        if not root.exists():
            raise DataFormatError(f"corpus path for {source!r} does not exist: {root}")
        files = sorted(root.rglob("*.srt"))
        if not files:
            click.echo(f"warning: no .srt files under {root}", err=True)
        by_date: dict[dt.date, list[Path]] = defaultdict(list)
        for f in files:
            date = _extract_date(f.name, pattern)
            if date is None:
                diag["files_undated"] += 1
                continue
            by_date[date].append(f)
        for date in sorted(by_date):
            day_cues = []
            for f in by_date[date]:
                try:
                    raw = f.read_bytes()
                except OSError:
                    diag["files_unreadable"] += 1
                    continue
                doc = parse_srt(raw)
                diag["files_parsed"] += 1
                diag["cues_parsed"] += len(doc.cues)
                diag["cues_skipped"] += doc.skipped
                day_cues.append((f, doc.cues))
            counts = count_cue_texts(cues for _, cues in day_cues)
            for f, cues in day_cues:
                kept = remove_commercials(
                    cues,
                    cfg.blocklist,
                    text_counts=counts,
                    duplicate_threshold=cfg.duplicate_threshold,
                )
                diag["cues_removed_commercial"] += len(cues) - len(kept)
                for turn in extract_turns(
                    kept,
                    source,
                    date,
                    matcher,
                    gap_ms=cfg.turn_gap_ms,
                    turn_id_prefix=f"{source}:{date.isoformat()}:{f.name}:",
                ):
                    if cfg.start_year <= turn.date.year <= cfg.end_year:
                        turns.append(turn)
                    else:
                        diag["turns_out_of_window"] += 1

    if cfg.tweets_path is not None:
        if not cfg.tweets_path.exists():
            raise DataFormatError(f"tweet dump does not exist: {cfg.tweets_path}")
        with open(cfg.tweets_path, "r", encoding="utf-8") as fh:
            res = ingest_tweets(fh, matcher, window=cfg.window_years)
        turns.extend(res.turns)
        names = keyword_names(cfg.keywords)
        diag["tweets"] = {
            "skipped_missing_field": res.skipped_missing_field,
            "skipped_bad_target": res.skipped_bad_target,
            "dropped_no_keyword": res.dropped_no_keyword,
            "dropped_out_of_window": res.dropped_out_of_window,
            "volume": [
                {
                    "keyword": names.get(kid, str(kid)),
                    "source": source,
                    "tweets": count,
                    "mean_words": round(res.mean_words(kid, source), 2),
                }
                for (kid, source), count in sorted(res.volume.items())
            ],
        }

    turns.sort(key=turn_sort_key)

    by_source_kw: Counter = Counter()
    word_volume: Counter = Counter()
    for turn in turns:
        word_volume[(turn.date.year, turn.source)] += turn.word_count
        for kid in turn.keywords:
            by_source_kw[(turn.source, kid)] += 1
    names = keyword_names(cfg.keywords)
    diag["turn_count"] = len(turns)
    diag["turns_per_source_keyword"] = [
        {"source": s, "keyword": names.get(k, str(k)), "turns": n}
        for (s, k), n in sorted(by_source_kw.items())
    ]
    diag["word_volume_per_year"] = [
        {"year": y, "source": s, "words": n} for (y, s), n in sorted(word_volume.items())
    ]

    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    turns_path = cfg.out_dir / TURNS_FILE
    write_turns(turns, turns_path)
    diag_path = cfg.out_dir / "diagnostics_ingest.json"
    diag_path.write_text(json.dumps(diag, indent=2, sort_keys=True) + "\n")

    click.echo(f"ingested {len(turns)} keyword-bearing turns -> {turns_path}")
    click.echo("turns per source/keyword:")
    for row in diag["turns_per_source_keyword"]:
        click.echo(f"  {row['source']:<18} {row['keyword']:<16} {row['turns']}")
    click.echo("word volume per year:")
    for row in diag["word_volume_per_year"]:
        click.echo(f"  {row['year']} {row['source']:<18} {row['words']}")
    if len(turns) == 0:
        click.echo("warning: ingest produced zero turns", err=True)
    return [turns_path, diag_path]


def _require_turns(cfg: RunConfig) -> Path:
    path = cfg.out_dir / TURNS_FILE
    if not path.exists():
        raise DataFormatError(f"no turn store at {path}; run `sempolar ingest` first")
    return path


def run_embed_toy(cfg: RunConfig) -> list[Path]:
    turns_path = _require_turns(cfg)
    matcher = KeywordMatcher(cfg.keywords)
    provider = ToyEmbedder(cfg.dimension, cfg.window, cfg.salt)
    stats = {"occurrences": 0, "multi_occurrence_extra": 0, "turns": 0}

    def records():
        for turn in read_turns(turns_path):
            stats["turns"] += 1
            tokens = tokenize(turn.text)
            spans = matcher.occurrences(tokens)
            for kid in sorted(spans):
                hits = spans[kid]
                if len(hits) > 1:
                    stats["multi_occurrence_extra"] += len(hits) - 1
                for span in hits:
                    stats["occurrences"] += 1
                    vec = provider.embed_span(turn.text, span)
                    yield EmbeddingRecord(
                        turn.turn_id, turn.source, kid, turn.date.year, turn.date.month, vec
                    )

    store_path = cfg.out_dir / STORE_FILE
    store = write_store(records(), store_path, dimension=cfg.dimension,
                        metadata=provider.describe())
    click.echo(
        f"embedded {stats['occurrences']} occurrences from {stats['turns']} turns "
        f"({stats['multi_occurrence_extra']} beyond-first occurrences) -> {store_path}"
    )
    click.echo(f"store: d={store.dimension}, {store.record_count} records")
    return [store_path]


def _open_store(cfg: RunConfig) -> EmbeddingStore:
    if cfg.toy_embedder:
        path = cfg.out_dir / STORE_FILE
        if not path.exists():
            raise DataFormatError(f"no embedding store at {path}; run `sempolar embed-toy` first")
    else:
        if cfg.store_path is None or not cfg.store_path.exists():
            raise DataFormatError(
                "no embedding store configured: enable the toy embedder (--toy-embedder) "
                "or point embedding.store at a store file"
            )
        path = cfg.store_path
    return EmbeddingStore.open(path)


def _pairs_in_store(cfg: RunConfig, store: EmbeddingStore) -> dict[str, tuple[str, str]]:
    pairs = {}
    if all(s in store.sources for s in cfg.tv_pair):
        pairs["tv"] = cfg.tv_pair
    if all(s in store.sources for s in cfg.twitter_pair):
        pairs["twitter"] = cfg.twitter_pair
    if not pairs:
        raise DegenerateInputError(
            f"store at {store.path} contains none of the configured source pairs"
        )
    return pairs


def run_polarize(cfg: RunConfig) -> list[Path]:
    store = _open_store(cfg)
    pairs = _pairs_in_store(cfg, store)
    names = keyword_names(cfg.keywords)
    written: list[Path] = []
    yearly_by_pair: dict[str, list] = {}

    for pair_label, pair in sorted(pairs.items()):
        for granularity in ("yearly", "monthly"):
            series_list = []
            for spec in cfg.keywords:
                try:
                    series = build_series(store, spec.keyword_id, pair, granularity,
                                          cfg.window_years)
                except DegenerateInputError:
                    continue
                series_list.append(series)
            if not series_list:
                raise DegenerateInputError(
                    f"no keyword has usable data for pair {pair} in {store.path}"
                )
            path = cfg.out_dir / f"sp_{pair_label}_{granularity}.csv"
            write_series_csv(series_list, path, names)
            written.append(path)
            if granularity == "yearly":
                yearly_by_pair[pair_label] = series_list
            filled = sum(len(s.filled_buckets()) for s in series_list)
            click.echo(
                f"{pair_label}/{granularity}: {len(series_list)} keyword series"
                + (f", {filled} interpolated buckets" if filled else "")
            )

    # min/max table over yearly series
    minmax_path = cfg.out_dir / "sp_minmax.csv"
    with open(minmax_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("keyword,pair,min_sp,min_year,max_sp,max_year\n")
        for pair_label in sorted(yearly_by_pair):
            for series in yearly_by_pair[pair_label]:
                vals = series.values()
                years = series.buckets()
                i_min = int(vals.argmin())
                i_max = int(vals.argmax())
                kw = names.get(series.keyword_id, str(series.keyword_id))
                fh.write(
                    f"{kw.replace(',', ' ')},{'|'.join(series.pair)},"
                    f"{float(vals[i_min])!r},{years[i_min]},{float(vals[i_max])!r},{years[i_max]}\n"
                )
    written.append(minmax_path)

    charts_dir = cfg.out_dir / "charts"
    charts_dir.mkdir(parents=True, exist_ok=True)
    by_keyword: dict[int, dict[str, list[float]]] = defaultdict(dict)
    for pair_label, series_list in sorted(yearly_by_pair.items()):
        for series in series_list:
            by_keyword[series.keyword_id][pair_label] = list(series.values())
    years = [str(y) for y in range(cfg.start_year, cfg.end_year + 1)]
    for kid in sorted(by_keyword):
        kw = names.get(kid, str(kid))
        chart_path = charts_dir / f"sp_{kw.replace(' ', '-')}.svg"
        write_line_chart(chart_path, f"Semantic polarity: {kw}", years, by_keyword[kid])
        written.append(chart_path)
    click.echo(f"wrote {len(written)} polarity files under {cfg.out_dir}")
    return written


def run_granger(cfg: RunConfig) -> list[Path]:
    names = keyword_names(cfg.keywords)
    ids = {v: k for k, v in names.items()}
    tv_path = cfg.out_dir / "sp_tv_monthly.csv"
    tw_path = cfg.out_dir / "sp_twitter_monthly.csv"
    for path in (tv_path, tw_path):
        if not path.exists():
            raise DataFormatError(f"missing series file {path}; run `sempolar polarize` first")
    tv_series = {names.get(s.keyword_id, str(s.keyword_id)): s
                 for s in read_series_csv(tv_path, ids)}
    tw_series = {names.get(s.keyword_id, str(s.keyword_id)): s
                 for s in read_series_csv(tw_path, ids)}

    shared = sorted(set(tv_series) & set(tw_series))
    if not shared:
        raise DegenerateInputError("no keyword has both a tv and a twitter monthly series")

    adf_rows = []
    granger_rows = []
    summary = {}
    for kw in shared:
        try:
            report = run_hypotheses(
                tv_series[kw], tw_series[kw], (cfg.min_lag, cfg.max_lag),
                alpha=cfg.alpha, names=("tv", "tw"),
            )
        except SempolarError as exc:
            raise type(exc)(f"keyword {kw!r}: {exc}") from exc
        for name, trail in sorted(report.adf.items()):
            adf_rows.append((f"{name}:{kw}", trail.initial))
            if trail.differenced and trail.after is not None:
                adf_rows.append((f"diff({name}:{kw})", trail.after))
        for r in report.results:
            granger_rows.append((kw, r))
        summary[kw] = {
            "min_significant_lag": {d: report.min_significant[d] for d in sorted(report.min_significant)},
            "differenced": {n: t.differenced for n, t in sorted(report.adf.items())},
            "alpha": report.alpha,
            "note": report.note,
        }

    adf_path = cfg.out_dir / "adf.csv"
    with open(adf_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("series,statistic,crit_1pct,crit_5pct,lags,n,conclusion\n")
        for label, res in adf_rows:
            fh.write(
                f"{label},{res.statistic!r},{res.crit_1pct!r},{res.crit_5pct!r},"
                f"{res.lags_used},{res.n},{res.conclusion}\n"
            )

    granger_path = cfg.out_dir / "granger.csv"
    with open(granger_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("keyword,direction,lag,f_value,p_value,significant\n")
        for kw, r in granger_rows:
            fh.write(
                f"{kw.replace(',', ' ')},{r.direction},{r.lag},{r.f_value!r},{r.p_value!r},"
                f"{'true' if r.significant(cfg.alpha) else 'false'}\n"
            )

    hypo_path = cfg.out_dir / "hypotheses.json"
    hypo_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")

    for kw in shared:
        lags = summary[kw]["min_significant_lag"]
        click.echo(f"{kw}: H1 min lag {lags.get('tv->tw')}, H2 min lag {lags.get('tw->tv')}")
    click.echo(f"note: {next(iter(summary.values()))['note']}" if summary else "")
    return [adf_path, granger_path, hypo_path]


def _slug(text: str) -> str:
    return text.replace(" ", "-")


def run_attribute(cfg: RunConfig, topic: str, lag: int | None, direction: str) -> list[Path]:
    if not cfg.toy_embedder:
        raise ConfigError("attribution needs per-token vectors; enable the toy embedder")
    specs = topic_keywords(cfg.keywords, topic)
    kids = {s.keyword_id for s in specs}
    turns_path = _require_turns(cfg)
    provider = ToyEmbedder(cfg.dimension, cfg.window, cfg.salt)
    topic_turns = [t for t in read_turns(turns_path) if t.keywords & kids]

    out = cfg.out_dir / "attribution"
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def one_report(corpus_a, corpus_b, pair, suffix, lag_val):
        if not corpus_a or not corpus_b:
            raise DegenerateInputError(
                f"topic {topic!r}: empty corpus for pair {pair} (suffix {suffix or 'none'})"
            )
        model, metrics = train_classifier(
            corpus_a, corpus_b, provider,
            seed=cfg.seed, hidden=cfg.hidden, learning_rate=cfg.learning_rate,
            max_epochs=cfg.max_epochs, patience=cfg.patience,
        )
        report = token_attributions(
            model, corpus_a, corpus_b, specs, provider,
            k=cfg.top_k, percentile=cfg.percentile, steps=cfg.ig_steps,
            class_labels=pair, lag=lag_val,
        )
        base = f"report_{_slug(topic)}{suffix}"
        csv_path = out / f"{base}.csv"
        write_report_csv([report], csv_path)
        md_path = out / f"{base}.md"
        md_path.write_text(report_markdown(report), encoding="utf-8")
        metrics_path = out / f"metrics_{_slug(topic)}{suffix}.json"
        metrics_path.write_text(
            json.dumps(
                {
                    "topic": topic,
                    "pair": list(pair),
                    "lag": lag_val,
                    "accuracy": metrics.accuracy,
                    "f1": metrics.f1,
                    "precision": metrics.precision,
                    "recall": metrics.recall,
                    "epochs": metrics.epochs,
                    "n_train": metrics.n_train,
                    "n_val": metrics.n_val,
                    "n_test": metrics.n_test,
                },
                indent=2,
                sort_keys=True,
            )
            + "\n"
        )
        written.extend([csv_path, md_path, metrics_path])
        click.echo(
            f"{base}: acc {metrics.accuracy:.3f} f1 {metrics.f1:.3f} "
            f"prec {metrics.precision:.3f} rec {metrics.recall:.3f}"
        )
        top_a = ", ".join(t for t, _ in report.tokens_a[:5])
        top_b = ", ".join(t for t, _ in report.tokens_b[:5])
        click.echo(f"  {pair[0]}: {top_a}")
        click.echo(f"  {pair[1]}: {top_b}")

    if lag is None:
        pair = cfg.tv_pair
        year = cfg.attribution_year
        in_year = (lambda t: True) if year is None else (lambda t: t.date.year == year)
        corpus_a = [t for t in topic_turns if t.source == pair[0] and in_year(t)]
        corpus_b = [t for t in topic_turns if t.source == pair[1] and in_year(t)]
        one_report(corpus_a, corpus_b, pair, "", None)
    else:
        for corpus_label, pair, side in (
            ("tv", cfg.tv_pair, "a"),
            ("twitter", cfg.twitter_pair, "b"),
        ):
            pool = [t for t in topic_turns if t.source in pair]
            kept = lag_split(pool, lag, side, direction)
            corpus_a = [t for t in kept if t.source == pair[0]]
            corpus_b = [t for t in kept if t.source == pair[1]]
            one_report(corpus_a, corpus_b, pair, f"_lag{lag}_{corpus_label}", lag)
    return written


# ---------------------------------------------------------------------------
# click wiring
# ---------------------------------------------------------------------------


@click.group(name="sempolar")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="YAML run configuration.")
@click.option("--seed", type=int, default=None, help="Override the run seed.")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Override the output directory.")
@click.option("--toy-embedder", is_flag=True, default=False,
              help="Force the deterministic toy embedder on.")
@click.pass_context
def cli(ctx, config_path, seed, out_dir, toy_embedder):
    """Semantic-polarization pipeline over captions and tweets."""
    cfg = load_config(config_path)
    if seed is not None:
        cfg.seed = seed
    if out_dir is not None:
        cfg.out_dir = Path(out_dir)
    if toy_embedder:
        cfg.toy_embedder = True
    ctx.obj = cfg


def _finish(cfg: RunConfig, written: list[Path]) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    resolved = cfg.out_dir / "config_resolved.yaml"
    cfg.save(resolved)
    _update_manifest(cfg.out_dir, written + [resolved])


@cli.command()
@click.pass_obj
def ingest(cfg: RunConfig):
    """Parse SRT trees and tweet dumps into the turn store."""
    _finish(cfg, run_ingest(cfg))


@cli.command(name="embed-toy")
@click.pass_obj
def embed_toy(cfg: RunConfig):
    """Embed every keyword occurrence with the toy embedder."""
    _finish(cfg, run_embed_toy(cfg))


@cli.command()
@click.pass_obj
def polarize(cfg: RunConfig):
    """Build yearly and monthly SP series, charts, and the min/max table."""
    _finish(cfg, run_polarize(cfg))


@cli.command()
@click.pass_obj
def granger(cfg: RunConfig):
    """ADF + bidirectional Granger tests over the monthly series."""
    _finish(cfg, run_granger(cfg))


@cli.command()
@click.option("--topic", required=True, help="Topic label (e.g. police).")
@click.option("--lag", type=int, default=None, help="Lag-split the corpora by this many months.")
@click.option("--direction", type=click.Choice(["tv-leads", "twitter-leads"]),
              default="tv-leads", show_default=True)
@click.pass_obj
def attribute(cfg: RunConfig, topic, lag, direction):
    """Train the reference classifier and rank attributive tokens."""
    _finish(cfg, run_attribute(cfg, topic, lag, direction))


@cli.command(name="report-all")
@click.pass_obj
def report_all(cfg: RunConfig):
    """Run the whole pipeline and emit every table and chart."""
    written = run_ingest(cfg)
    if cfg.toy_embedder:
        written += run_embed_toy(cfg)
    written += run_polarize(cfg)
    tw_monthly = cfg.out_dir / "sp_twitter_monthly.csv"
    if tw_monthly.exists():
        written += run_granger(cfg)
    else:
        click.echo("skipping granger: no twitter series", err=True)
    topics = sorted({s.topic for s in cfg.keywords})
    for topic in topics:
        try:
            written += run_attribute(cfg, topic, None, "tv-leads")
        except (InputError, DegenerateInputError) as exc:
            click.echo(f"skipping attribution for {topic!r}: {exc}", err=True)
    _finish(cfg, written)


@cli.command(name="validate-store")
@click.argument("path", type=click.Path())
def validate_store_cmd(path):
    """Structurally validate an embedding store file."""
    summary = validate_store(path)
    click.echo(json.dumps(summary, indent=2, sort_keys=True))


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except SempolarError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
