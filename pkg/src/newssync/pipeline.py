"""Batch pipeline stages: each reads declared input files, writes declared
artifacts under the output directory, and is rerunnable (same inputs and seed
give byte-identical primary outputs).

Stage order for `all`: ingest, pairs, score, graph, events, measures,
regress, agreement, report.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import numpy as np

from . import agreement as agree
from . import events as ev
from . import graph as gr
from . import measures as ms
from . import pairs as pr
from . import regression as rg
from . import similarity as sim
from .config import PipelineConfig, config_lines, derive_seed
from .corpus import Corpus, corpus_stats, filter_articles, load_corpus, load_length_factors

logger = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    """A stage cannot run; the message names what is missing or wrong."""


def _require(path: str | Path, what: str) -> Path:
    p = Path(path)
    if not str(path):
        raise PipelineError(f"no path configured for {what}")
    if not p.exists():
        raise PipelineError(f"missing {what}: {p}")
    return p


def _out(cfg: PipelineConfig, name: str) -> Path:
    out_dir = cfg.output_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / name


def _echo_config(cfg: PipelineConfig) -> None:
    _out(cfg, "config_echo.cfg").write_text(
        "\n".join(config_lines(cfg)) + "\n", encoding="utf-8"
    )


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _load_filtered_corpus(cfg: PipelineConfig) -> Corpus:
    path = _require(_out(cfg, "filtered_articles.jsonl"), "filtered corpus (run `ingest` first)")
    factors = {}
    if cfg.paths.length_factors:
        factors = load_length_factors(_require(cfg.paths.length_factors, "length factor table"))
    return load_corpus(path, length_factors=factors)


# --- stages -----------------------------------------------------------------

def run_ingest(cfg: PipelineConfig) -> None:
    _echo_config(cfg)
    corpus_path = _require(cfg.paths.corpus, "corpus file (paths.corpus)")
    factors = {}
    if cfg.paths.length_factors:
        factors = load_length_factors(_require(cfg.paths.length_factors, "length factor table"))
    corpus = load_corpus(corpus_path, length_factors=factors)
    filtered = filter_articles(
        corpus,
        min_entities=cfg.thresholds.min_entities,
        min_eq_words=cfg.thresholds.min_eq_words,
    )
    logger.info("ingest: %d articles read, %d kept after filtering", len(corpus), len(filtered))

    with _out(cfg, "filtered_articles.jsonl").open("w", encoding="utf-8") as fh:
        for a in filtered.articles:
            record = {
                "id": a.id,
                "country": a.country,
                "language": a.language,
                "date": a.publish_date.isoformat(),
                "entities": sorted(a.entities),
                "word_count": a.word_count,
            }
            if a.embedding_id is not None:
                record["embedding_id"] = a.embedding_id
            if a.title is not None:
                record["title"] = a.title
            if a.url is not None:
                record["url"] = a.url
            fh.write(json.dumps(record) + "\n")

    stats = corpus_stats(filtered)
    _write_csv(
        _out(cfg, "corpus_stats_country.csv"),
        ["country", "articles"],
        [[c, n] for c, n in sorted(stats.by_country.items())],
    )
    _write_csv(
        _out(cfg, "corpus_stats_language.csv"),
        ["language", "articles"],
        [[lang, n] for lang, n in sorted(stats.by_language.items())],
    )


def run_pairs(cfg: PipelineConfig) -> None:
    _echo_config(cfg)
    corpus = _load_filtered_corpus(cfg)
    pairs = pr.generate_candidates(
        corpus,
        jaccard_min=cfg.thresholds.jaccard_min,
        window_days=cfg.thresholds.window_days,
        entity_freq_cap=cfg.flags.entity_freq_cap,
    )
    count = pr.write_pairs_jsonl(pairs, _out(cfg, "pairs.jsonl"))
    logger.info("pairs: %d candidate pairs", count)


def run_score(cfg: PipelineConfig) -> None:
    _echo_config(cfg)
    corpus = _load_filtered_corpus(cfg)
    pairs = pr.read_pairs_jsonl(_require(_out(cfg, "pairs.jsonl"), "pair file (run `pairs` first)"))
    store = _load_store(cfg)
    id_map = {a.id: (a.embedding_id if a.embedding_id is not None else a.id) for a in corpus.articles}
    scored, skipped = sim.score_pairs(pairs, store, id_map=id_map)
    sim.write_scored_jsonl(scored, _out(cfg, "scored_pairs.jsonl"))
    logger.info("score: %d pairs scored, %d skipped", len(scored), skipped)


def _load_store(cfg: PipelineConfig) -> sim.EmbeddingStore:
    path = _require(cfg.paths.embeddings, "embedding store (paths.embeddings)")
    if path.suffix == ".jsonl":
        return sim.load_embeddings_jsonl(path)
    return sim.load_embeddings_binary(path, path.with_suffix(".ids"))


def run_graph(cfg: PipelineConfig) -> None:
    _echo_config(cfg)
    scored = sim.read_scored_jsonl(
        _require(_out(cfg, "scored_pairs.jsonl"), "scored pairs (run `score` first)")
    )
    g = gr.build_graph(scored, min_weight=cfg.thresholds.min_edge_weight)
    gr.write_edge_csv(g, _out(cfg, "graph.csv"))
    logger.info("graph: %d nodes, %d edges", len(g), g.n_edges)


def run_events(cfg: PipelineConfig) -> None:
    _echo_config(cfg)
    g = gr.read_edge_csv(_require(_out(cfg, "graph.csv"), "similarity graph (run `graph` first)"))
    corpus = _load_filtered_corpus(cfg)
    cs = ev.detect_events(
        g,
        significance_threshold=cfg.thresholds.significance_threshold,
        rng_seed=derive_seed(cfg.rng_seed, "events"),
        fallback=cfg.flags.clustering_fallback,
    )
    logger.info("events: %d clusters, %d unassigned", len(cs.clusters), len(cs.unassigned))

    with _out(cfg, "clusters.jsonl").open("w", encoding="utf-8") as fh:
        for c in cs.clusters:
            fh.write(
                json.dumps(
                    {
                        "cluster_id": c.cluster_id,
                        "significance": c.significance,
                        "members": sorted(c.members),
                    }
                )
                + "\n"
            )

    stats = ev.event_stats(cs, corpus)
    _write_csv(
        _out(cfg, "event_stats.csv"),
        ["cluster_id", "duration_days", "article_count", "language_count", "country_count"],
        [
            [r.cluster_id, r.duration_days, r.article_count, r.language_count, r.country_count]
            for r in stats.per_cluster
        ],
    )
    for metric, name in (
        ("duration_days", "event_hist_duration.csv"),
        ("article_count", "event_hist_articles.csv"),
        ("language_count", "event_hist_languages.csv"),
    ):
        _write_csv(
            _out(cfg, name),
            [metric, "clusters"],
            [[value, count] for value, count in stats.histogram(metric).items()],
        )

    bundles = ev.intrusion_bundles(
        cs,
        n_largest=cfg.sampling.intrusion_largest,
        n_random=cfg.sampling.intrusion_random,
        rng_seed=derive_seed(cfg.rng_seed, "intrusion"),
    )
    with _out(cfg, "intrusion_bundles.jsonl").open("w", encoding="utf-8") as fh:
        for b in bundles:
            fh.write(
                json.dumps(
                    {
                        "cluster_id": b.cluster_id,
                        "in_cluster": list(b.in_cluster),
                        "intruder": b.intruder,
                        "presentation": list(b.presentation),
                    }
                )
                + "\n"
            )

    pair_count = ev.cluster_pair_counts(cs)
    _out(cfg, "cluster_pair_count.txt").write_text(f"{pair_count}\n", encoding="utf-8")


def _read_clusters(cfg: PipelineConfig) -> ev.ClusterSet:
    path = _require(_out(cfg, "clusters.jsonl"), "cluster file (run `events` first)")
    clusters = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            clusters.append(
                ev.EventCluster(
                    cluster_id=rec["cluster_id"],
                    members=frozenset(rec["members"]),
                    significance=rec["significance"],
                )
            )
    g = gr.read_edge_csv(_require(_out(cfg, "graph.csv"), "similarity graph"))
    assigned: set = set()
    for c in clusters:
        assigned |= c.members
    return ev.ClusterSet(clusters=clusters, unassigned=frozenset(g.nodes - assigned))


def run_measures(cfg: PipelineConfig) -> None:
    _echo_config(cfg)
    corpus = _load_filtered_corpus(cfg)
    cs = _read_clusters(cfg)
    if cfg.sampling.per_country > 0:
        corpus = ms.equal_weight_subsample(
            corpus, cfg.sampling.per_country, rng_seed=derive_seed(cfg.rng_seed, "subsample")
        )

    membership = cs.membership()
    countries = sorted({a.country for a in corpus.articles if membership.get(a.id)})
    if not countries:
        raise PipelineError("no country has clustered articles; measures undefined")

    rows = []
    for country in countries:
        dist = ms.event_distribution(cs, corpus, country)
        n_articles = sum(1 for a in corpus.articles if a.country == country)
        rows.append(
            [country, repr(ms.shannon_entropy(dist)), dist.support_size, n_articles]
        )
    _write_csv(
        _out(cfg, "diversity.csv"),
        ["country", "diversity_bits", "support_size", "n_articles"],
        rows,
    )
    unclustered = [
        [country, sum(1 for a in corpus.articles if a.country == country and not membership.get(a.id))]
        for country in sorted({a.country for a in corpus.articles})
    ]
    _write_csv(_out(cfg, "unclustered_by_country.csv"), ["country", "articles"], unclustered)

    matrix = ms.synchrony_matrix(cs, corpus, countries=countries)
    sync_rows = []
    for i, a in enumerate(countries):
        for b in countries[i + 1 :]:
            sync_rows.append([a, b, repr(matrix.pair(a, b))])
    _write_csv(_out(cfg, "synchrony.csv"), ["country_a", "country_b", "synchrony"], sync_rows)

    scored = sim.read_scored_jsonl(
        _require(_out(cfg, "scored_pairs.jsonl"), "scored pairs (run `score` first)")
    )
    by_id = corpus.by_id
    scored = [s for s in scored if s.id_a in by_id and s.id_b in by_id]
    base_div = []
    for country in countries:
        try:
            base_div.append([country, repr(ms.baseline_diversity(scored, corpus, country))])
        except ValueError:
            logger.warning("no within-country scored pairs for %s; baseline skipped", country)
    _write_csv(
        _out(cfg, "baseline_diversity.csv"), ["country", "avg_within_similarity"], base_div
    )
    base_sync = []
    for i, a in enumerate(countries):
        for b in countries[i + 1 :]:
            try:
                base_sync.append([a, b, repr(ms.baseline_synchrony(scored, corpus, a, b))])
            except ValueError:
                logger.warning("no cross-country scored pairs for (%s, %s); baseline skipped", a, b)
    _write_csv(
        _out(cfg, "baseline_synchrony.csv"),
        ["country_a", "country_b", "avg_cross_similarity"],
        base_sync,
    )

    populations = _country_predictor(cfg, "population")
    country_graph = ms.synchrony_graph(
        matrix, populations, top_by_population=cfg.sampling.top_by_population
    )
    gr.write_edge_csv(country_graph, _out(cfg, "synchrony_graph.csv"))
    backbone = gr.disparity_backbone(country_graph, alpha=cfg.thresholds.backbone_alpha)
    gr.write_edge_csv(backbone, _out(cfg, "synchrony_backbone.csv"))
    dropped = sorted(country_graph.nodes - backbone.nodes)
    _out(cfg, "backbone_dropped.txt").write_text(
        "".join(f"{c}\n" for c in dropped), encoding="utf-8"
    )

    if len(backbone) > 0:
        ranks = gr.pagerank(backbone)
        between = gr.betweenness(backbone)
        _write_csv(
            _out(cfg, "centrality.csv"),
            ["country", "pagerank", "betweenness"],
            [[c, repr(ranks[c]), repr(between[c])] for c in sorted(backbone.nodes)],
        )
    else:
        _write_csv(_out(cfg, "centrality.csv"), ["country", "pagerank", "betweenness"], [])


def _country_predictor(cfg: PipelineConfig, name: str) -> dict[str, float]:
    values: dict[str, float] = {}
    if not cfg.paths.predictors:
        return values
    path = _require(cfg.paths.predictors, "country predictor table (paths.predictors)")
    for country, predictor, raw in _read_long_csv(path, ("country", "predictor", "value")):
        if predictor == name:
            try:
                values[country] = float(raw)
            except ValueError:
                pass
    return values


def _read_long_csv(path: Path, expected_header: tuple[str, ...]) -> list[tuple[str, ...]]:
    rows = []
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != expected_header:
            raise PipelineError(
                f"{path}: expected header {','.join(expected_header)}, got {header}"
            )
        for row in reader:
            if row:
                rows.append(tuple(cell.strip() for cell in row))
    return rows


def _country_predictors(cfg: PipelineConfig) -> tuple[dict[str, dict[str, str]], list[str]]:
    """predictor -> {country -> raw value}, plus predictor order of appearance."""
    path = _require(cfg.paths.predictors, "country predictor table (paths.predictors)")
    table: dict[str, dict[str, str]] = {}
    order: list[str] = []
    for country, predictor, raw in _read_long_csv(path, ("country", "predictor", "value")):
        if predictor not in table:
            table[predictor] = {}
            order.append(predictor)
        table[predictor][country] = raw
    return table, order


def _pair_predictors(cfg: PipelineConfig) -> tuple[dict[str, dict[frozenset, str]], list[str]]:
    table: dict[str, dict[frozenset, str]] = {}
    order: list[str] = []
    if not cfg.paths.pair_predictors:
        return table, order
    path = _require(cfg.paths.pair_predictors, "pair predictor table (paths.pair_predictors)")
    for a, b, predictor, raw in _read_long_csv(path, ("country_a", "country_b", "predictor", "value")):
        if predictor not in table:
            table[predictor] = {}
            order.append(predictor)
        table[predictor][frozenset((a, b))] = raw
    return table, order


def _is_numeric(values: dict) -> bool:
    try:
        for v in values.values():
            float(v)
        return True
    except ValueError:
        return False


def _binarize_threshold(cfg: PipelineConfig, predictor: str, values: dict[str, float]) -> float:
    if predictor == "gdp":
        return cfg.regress.gdp_high_threshold
    if predictor == "democracy":
        return cfg.regress.democracy_high_threshold
    return float(np.median(sorted(values.values())))


def _build_diversity_table(cfg: PipelineConfig) -> rg.FeatureTable:
    div_rows = _read_long_csv(
        _require(_out(cfg, "diversity.csv"), "diversity measures (run `measures` first)"),
        ("country", "diversity_bits", "support_size", "n_articles"),
    )
    samples = [row[0] for row in div_rows]
    target = rg.rescale01([float(row[1]) for row in div_rows])

    predictors, order = _country_predictors(cfg)
    columns: list[str] = []
    data: list[np.ndarray] = []
    provenance: dict[str, str] = {}
    for name in order:
        values = predictors[name]
        missing = [c for c in samples if c not in values]
        if missing:
            logger.warning("predictor %s missing for %s; column skipped", name, missing)
            continue
        if _is_numeric(values):
            raw = [float(values[c]) for c in samples]
            if len(set(raw)) < 2:
                logger.warning("predictor %s is constant over the samples; skipped", name)
                continue
            columns.append(name)
            data.append(rg.rescale01(raw))
            provenance[name] = "numeric country trait, rescaled to [0, 1]"
        else:
            levels = sorted({values[c] for c in samples})
            if len(levels) < 2:
                logger.warning("categorical predictor %s has one level; skipped", name)
                continue
            kept, matrix = rg.dummy_encode([values[c] for c in samples], levels=levels)
            for i, level in enumerate(kept):
                columns.append(f"{name}={level}")
                data.append(matrix[:, i])
                provenance[f"{name}={level}"] = f"dummy for country trait {name} (ref {levels[0]})"
    if not columns:
        raise PipelineError("no usable predictors for the diversity regression")
    return rg.FeatureTable(
        sample_ids=samples,
        columns=columns,
        X=np.column_stack(data),
        y=target,
        target="diversity01",
        provenance=provenance,
    )


def _build_synchrony_table(cfg: PipelineConfig) -> rg.FeatureTable:
    sync_rows = _read_long_csv(
        _require(_out(cfg, "synchrony.csv"), "synchrony measures (run `measures` first)"),
        ("country_a", "country_b", "synchrony"),
    )
    pairs = [(row[0], row[1]) for row in sync_rows]
    sample_ids = [f"{a}|{b}" for a, b in pairs]
    target = rg.rescale01([float(row[2]) for row in sync_rows])

    columns: list[str] = []
    data: list[np.ndarray] = []
    provenance: dict[str, str] = {}

    country_table, country_order = _country_predictors(cfg)
    for name in country_order:
        values = country_table[name]
        needed = {c for pair in pairs for c in pair}
        missing = sorted(needed - set(values))
        if missing:
            logger.warning("predictor %s missing for %s; column skipped", name, missing)
            continue
        if _is_numeric(values):
            numeric = {c: float(v) for c, v in values.items()}
            threshold = _binarize_threshold(cfg, name, numeric)
            cats = {c: ("high" if v > threshold else "low") for c, v in numeric.items()}
            levels = ["low", "high"]
            provenance_note = f"pairwise category of {name} binarized at {threshold:g}"
        else:
            cats = {c: str(v) for c, v in values.items()}
            levels = sorted(set(cats.values()))
            provenance_note = f"pairwise category of country trait {name}"
        pair_labels = [rg.pairwise_category(cats[a], cats[b], levels=levels) for a, b in pairs]
        observed = sorted(set(pair_labels))
        if len(observed) < 2:
            logger.warning("pairwise predictor %s has one level over the samples; skipped", name)
            continue
        kept, matrix = rg.dummy_encode(pair_labels, levels=observed)
        for i, level in enumerate(kept):
            columns.append(f"{name}({level})")
            data.append(matrix[:, i])
            provenance[f"{name}({level})"] = provenance_note

    pair_table, pair_order = _pair_predictors(cfg)
    for name in pair_order:
        values = pair_table[name]
        missing = [f"{a}|{b}" for a, b in pairs if frozenset((a, b)) not in values]
        if missing:
            logger.warning("pair predictor %s missing for %s; column skipped", name, missing)
            continue
        if _is_numeric(values):
            raw = [float(values[frozenset((a, b))]) for a, b in pairs]
            if len(set(raw)) < 2:
                logger.warning("pair predictor %s is constant; skipped", name)
                continue
            columns.append(name)
            data.append(rg.rescale01(raw))
            provenance[name] = "numeric pair measure, rescaled to [0, 1]"
        else:
            labels = [values[frozenset((a, b))] for a, b in pairs]
            levels = sorted(set(labels))
            if len(levels) < 2:
                continue
            kept, matrix = rg.dummy_encode(labels, levels=levels)
            for i, level in enumerate(kept):
                columns.append(f"{name}={level}")
                data.append(matrix[:, i])
                provenance[f"{name}={level}"] = f"dummy for pair trait {name}"
    if not columns:
        raise PipelineError("no usable predictors for the synchrony regression")
    return rg.FeatureTable(
        sample_ids=sample_ids,
        columns=columns,
        X=np.column_stack(data),
        y=target,
        target="synchrony01",
        provenance=provenance,
    )


def _fit_feasible(table: rg.FeatureTable, retained: list[str], notes: list[str]) -> rg.RegressionModel:
    """Fit on the retained columns, dropping highest-VIF columns while the
    sample is too small or the design is degenerate."""
    current = list(retained)
    while True:
        if not current:
            raise PipelineError("no predictors survive feasibility reduction")
        try:
            if table.n <= len(current) + 1:
                raise ValueError(f"n={table.n} too small for k={len(current)}")
            return rg.ols_fit(table.select(current))
        except ValueError as err:
            if len(current) == 1:
                raise PipelineError(f"cannot fit regression: {err}") from None
            sub = table.select(current)
            values = rg.vif(sub)
            worst = max(sorted(values), key=lambda c: values[c])
            notes.append(f"feasibility: drop {worst} ({err})")
            current.remove(worst)


def _write_model_csv(path: Path, model: rg.RegressionModel) -> None:
    rows = []
    for name, coefficient, std_err, t_value, p_value in model.rows():
        rows.append(
            [name, repr(coefficient), repr(std_err), repr(t_value), repr(p_value),
             rg.significance_marker(p_value)]
        )
    rows.append(["r_squared", repr(model.r_squared), "", "", "", ""])
    rows.append(["adj_r_squared", repr(model.adj_r_squared), "", "", "", ""])
    rows.append(["n", model.n, "", "", "", ""])
    _write_csv(path, ["predictor", "coefficient", "std_err", "t", "p", "significance"], rows)


def _run_regression(cfg: PipelineConfig, table: rg.FeatureTable, prefix: str) -> None:
    rg.write_feature_csv(table, _out(cfg, f"{prefix}_features.csv"))
    notes: list[str] = []
    if table.k >= 2:
        vif_report = rg.vif_select(table, max_vif=cfg.thresholds.vif_max)
    else:
        vif_report = rg.SelectionReport(method="VIF", retained=list(table.columns))
    vif_model = _fit_feasible(table, vif_report.retained, notes)
    _write_model_csv(_out(cfg, f"{prefix}_model_vif.csv"), vif_model)

    aic_report = rg.aic_stepwise_select(table)
    if aic_report.retained:
        aic_model = _fit_feasible(table, aic_report.retained, notes)
        _write_model_csv(_out(cfg, f"{prefix}_model_aic.csv"), aic_model)
    else:
        _write_csv(
            _out(cfg, f"{prefix}_model_aic.csv"),
            ["predictor", "coefficient", "std_err", "t", "p", "significance"],
            [["intercept", repr(float(table.y.mean())), "", "", "", ""]],
        )
        notes.append("AIC selected the intercept-only model")

    lines = [f"[{prefix}] columns: {', '.join(table.columns)}"]
    lines += [f"[VIF] {s}" for s in vif_report.steps]
    lines += [f"[VIF] retained: {', '.join(vif_report.retained) or '(none)'}"]
    lines += [f"[AIC] {s}" for s in aic_report.steps]
    lines += [f"[AIC] retained: {', '.join(aic_report.retained) or '(none)'}"]
    lines += [f"[note] {s}" for s in notes]
    _out(cfg, f"{prefix}_selection.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_regress(cfg: PipelineConfig) -> None:
    _echo_config(cfg)
    _run_regression(cfg, _build_diversity_table(cfg), "diversity")
    _run_regression(cfg, _build_synchrony_table(cfg), "synchrony")


def run_agreement(cfg: PipelineConfig) -> None:
    _echo_config(cfg)
    path = _require(cfg.paths.ratings, "ratings table (paths.ratings)")
    ratings: list[list[str | None]] = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if row:
                ratings.append([cell.strip() or None for cell in row])
    table = agree.RatingsTable(ratings=ratings)
    rows = [
        ["gwet_ac1", repr(agree.gwet_ac1(table))],
        ["krippendorff_alpha", repr(agree.krippendorff_alpha(table))],
    ]
    if cfg.paths.intrusion_answers and cfg.paths.intrusion_truth:
        answers_path = _require(cfg.paths.intrusion_answers, "intrusion answers")
        truth_path = _require(cfg.paths.intrusion_truth, "intrusion truth")
        truth = {
            bundle: intruder
            for bundle, intruder in _read_long_csv(truth_path, ("bundle", "intruder"))
        }
        by_rater: dict[str, dict[str, str]] = {}
        for rater, bundle, chosen in _read_long_csv(
            answers_path, ("rater", "bundle", "chosen")
        ):
            by_rater.setdefault(rater, {})[bundle] = chosen
        per_rater, average = agree.intrusion_precision_by_rater(by_rater, truth)
        for rater, precision in per_rater.items():
            rows.append([f"precision_{rater}", repr(precision)])
        rows.append(["precision_average", repr(average)])
    _write_csv(_out(cfg, "agreement.csv"), ["metric", "value"], rows)


def run_report(cfg: PipelineConfig) -> None:
    _echo_config(cfg)
    _require(_out(cfg, "event_stats.csv"), "event statistics (run `events` first)")
    for prefix in ("diversity", "synchrony"):
        for method in ("vif", "aic"):
            _require(
                _out(cfg, f"{prefix}_model_{method}.csv"),
                f"{prefix} {method.upper()} model (run `regress` first)",
            )
    report_dir = _out(cfg, "report")
    report_dir.mkdir(exist_ok=True)

    def read_model(name: str) -> dict[str, tuple[str, str]]:
        path = _out(cfg, name)
        out: dict[str, tuple[str, str]] = {}
        with path.open(encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            next(reader, None)
            for row in reader:
                if row and row[0] not in ("r_squared", "adj_r_squared", "n"):
                    out[row[0]] = (row[1], row[5])
        return out

    for prefix in ("diversity", "synchrony"):
        vif_rows = read_model(f"{prefix}_model_vif.csv")
        aic_rows = read_model(f"{prefix}_model_aic.csv")
        names = ["intercept"] + sorted((set(vif_rows) | set(aic_rows)) - {"intercept"})
        merged = []
        for name in names:
            v = vif_rows.get(name, ("", ""))
            a = aic_rows.get(name, ("", ""))
            merged.append([name, v[0], v[1], a[0], a[1]])
        _write_csv(
            report_dir / f"{prefix}_table.csv",
            ["predictor", "vif_coefficient", "vif_significance", "aic_coefficient", "aic_significance"],
            merged,
        )

    for hist in ("event_hist_duration.csv", "event_hist_articles.csv", "event_hist_languages.csv"):
        src = _out(cfg, hist)
        if src.exists():
            (report_dir / hist).write_text(src.read_text(encoding="utf-8"), encoding="utf-8")

    lines = []
    for name, label in (
        ("filtered_articles.jsonl", "articles after filtering"),
        ("pairs.jsonl", "candidate pairs"),
        ("scored_pairs.jsonl", "scored pairs"),
        ("clusters.jsonl", "event clusters"),
    ):
        path = _out(cfg, name)
        if path.exists():
            count = sum(1 for line in path.open(encoding="utf-8") if line.strip())
            lines.append(f"{label}: {count}")
    pair_count_path = _out(cfg, "cluster_pair_count.txt")
    if pair_count_path.exists():
        lines.append(f"within-cluster article pairs: {pair_count_path.read_text().strip()}")
    dropped_path = _out(cfg, "backbone_dropped.txt")
    if dropped_path.exists():
        dropped = [l for l in dropped_path.read_text(encoding="utf-8").splitlines() if l]
        lines.append(f"countries dropped from backbone: {', '.join(dropped) if dropped else '(none)'}")
    (report_dir / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


STAGES = {
    "ingest": run_ingest,
    "pairs": run_pairs,
    "score": run_score,
    "graph": run_graph,
    "events": run_events,
    "measures": run_measures,
    "regress": run_regress,
    "agreement": run_agreement,
    "report": run_report,
}


def run_all(cfg: PipelineConfig) -> None:
    for name, stage in STAGES.items():
        logger.info("=== stage %s ===", name)
        stage(cfg)
