"""Command-line interface: one subcommand per pipeline stage.

Every run reads a YAML config (optional) whose values command-line flags
override, writes its outputs into ``--out`` and records a ``manifest.json``
holding the config hash, seed, package versions and output checksums. Outputs
are first written to a staging directory and only moved into place when the
run succeeds. Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import logging
import os
import platform
import shutil
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import yaml

from . import __version__, classify, corpus, cxg, diachrone, embed, netstats, sampling, synth, variables
from .errors import DialignError
from .textprep import EntityMasker, default_gazetteers, default_tagger, load_gazetteer, normalize, tokenize

logger = logging.getLogger("dialign")

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3


class ConfigError(DialignError):
    """Invalid run configuration; the message names the offending field."""


@dataclass
class RunConfig:
    input: list[str] = field(default_factory=list)
    communities: list[str] = field(default_factory=list)
    text_types: list[str] = field(default_factory=list)
    gazetteers: list[str] = field(default_factory=list)
    variables: str | None = None
    pairs: str | None = None
    constructicon: str | None = None
    vectors: str | None = None
    seed: int = 0
    out: str = "out"
    utc_offset: int = 12
    author_filter: list[str] = field(default_factory=lambda: ["spam", "bot"])
    drop_moderators: bool = True
    sampling: dict = field(default_factory=lambda: {"plan": "balanced", "fraction": 0.1, "test_fraction": 0.2})
    classifier: dict = field(default_factory=lambda: {"featurizer": "counts", "mask": False, "epochs": 5,
                                                      "eta0": 0.1, "alpha": 1e-4})
    embedding: dict = field(default_factory=lambda: {"dim": 100, "window": 5, "min_count": 5, "negatives": 5,
                                                     "epochs": 5, "sample": 1e-4, "architecture": "sgns"})
    periods: int = 4
    drift: dict = field(default_factory=lambda: {"mode": "incremental", "source": None, "targets": []})
    cxg: dict = field(default_factory=lambda: {"group_by": "community_month", "rounds": 5, "min_freq": 5,
                                               "association_threshold": 0.5, "sem_k": 256, "normalized": False})
    network: dict = field(default_factory=lambda: {"jaccard_threshold": 0.05, "cosine_threshold": 0.99})
    ols: dict = field(default_factory=lambda: {"table": None, "y": None, "x": []})
    synth: dict = field(default_factory=lambda: {"n_records": 400})

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        body = {k: v for k, v in self.as_dict().items() if k != "out"}
        return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_SECTIONS = {"sampling", "classifier", "embedding", "drift", "cxg", "network", "ols", "synth"}
_LISTS = {"input", "communities", "text_types", "gazetteers", "author_filter"}


def _merge(cfg: RunConfig, values: dict, where: str) -> None:
    for key, value in values.items():
        if key not in _FIELDS:
            raise ConfigError(f"{where}: unknown field '{key}'")
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"{where}: field '{key}' must be a mapping")
            section = getattr(cfg, key)
            defaults = _FIELDS[key].default_factory()
            for sub, v in value.items():
                if sub not in defaults:
                    raise ConfigError(f"{where}: unknown field '{key}.{sub}'")
                section[sub] = v
        elif key in _LISTS:
            if isinstance(value, str):
                value = [v for v in value.split(",") if v]
            if not isinstance(value, list):
                raise ConfigError(f"{where}: field '{key}' must be a list")
            setattr(cfg, key, [str(v) for v in value])
        else:
            setattr(cfg, key, value)


def load_config(path: str | None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: invalid YAML in {path}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a mapping")
    _merge(cfg, data, "config")
    return cfg


def _validate(cfg: RunConfig, needs: tuple[str, ...]) -> None:
    if not isinstance(cfg.seed, int) or isinstance(cfg.seed, bool):
        raise ConfigError("seed: must be an integer")
    if "input" in needs and not cfg.input:
        raise ConfigError("input: at least one input path is required")
    for p in cfg.input + cfg.gazetteers:
        if not os.path.exists(p):
            raise ConfigError(f"input: file not found: {p}")
    for name in ("variables", "pairs", "constructicon", "vectors"):
        p = getattr(cfg, name)
        if name in needs and p is None:
            raise ConfigError(f"{name}: a path is required for this command")
        if p is not None and not os.path.exists(p):
            raise ConfigError(f"{name}: file not found: {p}")
    for t in cfg.text_types:
        if t not in corpus.TEXT_TYPES:
            raise ConfigError(f"text_types: unknown text type '{t}'")
    if cfg.sampling.get("plan") not in sampling.PLANS:
        raise ConfigError(f"sampling.plan: must be one of {', '.join(sampling.PLANS)}")
    if cfg.classifier.get("featurizer") not in ("counts", "embedding"):
        raise ConfigError("classifier.featurizer: must be 'counts' or 'embedding'")
    if cfg.classifier.get("featurizer") == "embedding" and "classify" in needs and cfg.vectors is None:
        raise ConfigError("vectors: embedding features need a vectors file")
    if not isinstance(cfg.periods, int) or cfg.periods < 1:
        raise ConfigError("periods: must be a positive integer")
    if cfg.drift.get("mode") not in ("incremental", "sequential"):
        raise ConfigError("drift.mode: must be 'incremental' or 'sequential'")
    if "drift" in needs and (not cfg.drift.get("source") or not cfg.drift.get("targets")):
        raise ConfigError("drift.source/drift.targets: required for the drift command")
    if cfg.cxg.get("group_by") not in cxg.GROUPINGS:
        raise ConfigError(f"cxg.group_by: must be one of {', '.join(cxg.GROUPINGS)}")
    if "ols" in needs:
        if not cfg.ols.get("table") or not os.path.exists(cfg.ols["table"]):
            raise ConfigError("ols.table: an existing CSV file is required")
        if not cfg.ols.get("y") or not cfg.ols.get("x"):
            raise ConfigError("ols.y/ols.x: response and predictor columns are required")
    try:
        embed.TrainConfig(**_embed_kwargs(cfg))
    except (TypeError, DialignError, ValueError) as exc:
        raise ConfigError(f"embedding: {exc}") from exc


def _embed_kwargs(cfg: RunConfig) -> dict:
    return {**cfg.embedding, "seed": cfg.seed}


# --- data loading -----------------------------------------------------------

def _is_units_file(path: str) -> bool:
    if path.endswith((".gz", ".zst")):
        return False
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                try:
                    return "text_type" in json.loads(line)
                except json.JSONDecodeError:
                    return False
    return False


def load_units(cfg: RunConfig) -> tuple[list[corpus.TextUnit], dict]:
    units: list[corpus.TextUnit] = []
    info = {"records": 0, "skipped": 0}
    records = []
    for path in cfg.input:
        if _is_units_file(path):
            units.extend(corpus.read_units_jsonl(path))
        else:
            recs, skipped = corpus.ingest(path)
            info["records"] += len(recs)
            info["skipped"] += skipped
            records.extend(recs)
    if records:
        cleaned = corpus.clean(records)
        info["cleaned"] = len(cleaned)
        units.extend(corpus.units_from_records(cleaned))
    if cfg.communities:
        keep = set(cfg.communities)
        units = [u for u in units if u.community in keep]
    if cfg.text_types:
        keep = set(cfg.text_types)
        units = [u for u in units if u.text_type in keep]
    units = corpus.filter_authors(units, cfg.author_filter, cfg.drop_moderators)
    if not units:
        raise DialignError("no text units remain after filtering")
    return units, info


def _docs(units, masker=None):
    out = []
    for u in units:
        doc = tokenize(normalize(u.text), origin=u)
        out.append(masker(doc) if masker else doc)
    return out


def _masker(cfg: RunConfig):
    gaz = [load_gazetteer(p) for p in cfg.gazetteers] if cfg.gazetteers else default_gazetteers()
    return EntityMasker(gaz)


def _write_rows(path: Path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


# --- subcommands -------------------------------------------------------------

def cmd_ingest(cfg, out: Path) -> None:
    """Read dumps, clean and dedup records, write text units."""
    units, info = load_units(cfg)
    corpus.write_units_jsonl(units, out / "units.jsonl")
    _write_rows(out / "ingest.csv", [["field", "value"], *[[k, v] for k, v in sorted(info.items())],
                                     ["units", len(units)]])


def cmd_stats(cfg, out: Path) -> None:
    """Per community and text type size, length and TTR tables plus hourly profiles."""
    units, _ = load_units(cfg)
    corpus.write_stats_csv(corpus.corpus_stats(units), out / "corpus_stats.csv")
    rows = [["community", "hour", "share"]]
    for community in sorted({u.community for u in units}):
        prof = corpus.hourly_profile([u for u in units if u.community == community], cfg.utc_offset)
        rows.extend([community, h, f"{c:.6f}"] for h, c in enumerate(prof))
    _write_rows(out / "hourly.csv", rows)


def cmd_variables(cfg, out: Path) -> None:
    """Variant counts per community and distribution patterns."""
    units, _ = load_units(cfg)
    specs = variables.load_specs(cfg.variables)
    tagger = default_tagger()
    docs = [d.with_tokens(d.tokens, tagger.tag(d.tokens)) for d in _docs(units)]
    counts = variables.count_variants(docs, specs)
    communities = cfg.communities or counts.communities
    variables.write_table_csv(counts, out / "variables.csv", communities)
    rows = [["variable", "pattern", "detail"]]
    for spec in specs:
        shares = {c: counts.conservative_share(c, spec.id) for c in communities}
        if sum(s is not None for s in shares.values()) < 2:
            rows.append([spec.id, "insufficient", ""])
            continue
        pat = variables.classify_shares(shares, spec.id)
        detail = ";".join(f"{k}={','.join(v) if isinstance(v, list) else v}" for k, v in sorted(pat.groups.items()))
        rows.append([spec.id, pat.pattern, detail])
    _write_rows(out / "patterns.csv", rows)


def _classify_examples(cfg, units):
    masker = _masker(cfg) if cfg.classifier.get("mask") else None
    docs = _docs(units, masker)
    if cfg.classifier["featurizer"] == "embedding":
        model = embed.load_text(cfg.vectors)
        feats = [classify.featurize_embedding(d, model) for d in docs]
    else:
        feats = [classify.featurize_counts(d) for d in docs]
    by_class: dict[str, list] = {}
    for fv, u in zip(feats, units):
        by_class.setdefault(u.community, []).append(fv)
    return by_class


def _draw(cfg, by_class) -> sampling.SplitDataset:
    plan = cfg.sampling["plan"]
    tf = cfg.sampling.get("test_fraction", 0.2)
    if plan == "balanced":
        return sampling.balanced_sample(by_class, cfg.seed, test_fraction=tf)
    if plan == "proportional":
        return sampling.proportional_sample(by_class, cfg.sampling.get("fraction", 0.1), cfg.seed, test_fraction=tf)
    return sampling.random_sample(by_class, cfg.seed, test_fraction=tf)


def cmd_classify(cfg, out: Path) -> None:
    """Sample, train and evaluate the community classifier."""
    units, _ = load_units(cfg)
    split = _draw(cfg, _classify_examples(cfg, units))
    if not split.test:
        raise DialignError("sampling plan left the test set empty")
    sgd = classify.SGDConfig(int(cfg.classifier["epochs"]), float(cfg.classifier["eta0"]),
                             float(cfg.classifier["alpha"]))
    model = classify.train(split.train, sgd, seed=cfg.seed)
    classify.write_metrics_csv(classify.evaluate(model, split.test), out / "metrics.csv")
    (out / "plan.json").write_text(split.plan_text(), encoding="utf-8")
    model.save(out / "model.tsv")
    if model.features is not None:
        rows = [["class", "rank", "feature", "weight"]]
        for c in model.classes:
            for r, (f, w) in enumerate(classify.top_features(model, c, 20), 1):
                rows.append([c, r, f, f"{w:.6f}"])
        _write_rows(out / "top_features.csv", rows)


def cmd_embed_train(cfg, out: Path) -> None:
    """Train word embeddings on the input corpus."""
    units, _ = load_units(cfg)
    model = embed.train([d.tokens for d in _docs(units)], embed.TrainConfig(**_embed_kwargs(cfg)))
    embed.save_text(model, out / "vectors.txt")
    rows = [["token", "count"], *[[w, int(c)] for w, c in zip(model.words, model.vocab.counts)]]
    _write_rows(out / "vocab.csv", rows)


def cmd_embed_eval(cfg, out: Path) -> None:
    """Cosine similarity over word pairs from saved vectors."""
    model = embed.load_text(cfg.vectors)
    pairs = embed.load_pairs(cfg.pairs) if cfg.pairs else embed.default_pairs()
    res = embed.evaluate_pairs(model, pairs)
    rows = [["source", "target", "cosine"]]
    rows += [[a, b, "OOV" if s is None else f"{s:.6f}"] for a, b, s in res.scores]
    rows += [["mean", "", f"{res.mean:.6f}"], ["oov", "", str(res.oov)]]
    _write_rows(out / "pairs_eval.csv", rows)


def cmd_drift(cfg, out: Path) -> None:
    """Period models and cosine series between a source and target words."""
    units, _ = load_units(cfg)
    part = diachrone.partition_equal_words(units, cfg.periods)
    diachrone.write_manifest_csv(part, out / "periods.csv")
    tc = embed.TrainConfig(**_embed_kwargs(cfg))
    trainer = diachrone.train_incremental if cfg.drift["mode"] == "incremental" else diachrone.train_sequential
    models = trainer(part, tc)
    series = diachrone.shift_series(models, cfg.drift["source"], cfg.drift["targets"], cfg.drift["mode"])
    diachrone.write_series_csv(series, out / "series.csv")
    _write_rows(out / "vocab_sizes.csv", [["period", "vocab"], *[[i, len(m.words)] for i, m in enumerate(models, 1)]])


def _annotated(cfg, units, need_sem: bool):
    tagger = default_tagger()
    docs = _docs(units)
    sem_map = None
    if need_sem:
        if cfg.vectors is None:
            raise ConfigError("vectors: sem slots need a vectors file")
        model = embed.load_text(cfg.vectors)
        sem_map = cxg.induce_sem_clusters(model, min(int(cfg.cxg["sem_k"]), len(model.words)), seed=cfg.seed)
    return [cxg.annotate(d.with_tokens(d.tokens, tagger.tag(d.tokens)), sem_map) for d in docs]


def cmd_cxg_parse(cfg, out: Path) -> None:
    """Construction counts and rates per group from a constructicon."""
    units, _ = load_units(cfg)
    cons = cxg.Constructicon.load(cfg.constructicon)
    need_sem = any("sem" in c.kinds for c in cons)
    vecs = cxg.parse_counts(_annotated(cfg, units, need_sem), cons, cfg.cxg["group_by"])
    vecs.write_csv(out / "cxg_counts.csv")
    vecs.write_csv(out / "cxg_rates.csv", normalized=True)
    rates = vecs.rates()
    graph = cxg.similarity_network({g: rates[i] for i, g in enumerate(vecs.groups)},
                                   float(cfg.network["cosine_threshold"])) if len(vecs.groups) >= 2 else None
    if graph is not None:
        netstats.write_edges_csv(graph, out / "cxg_network.csv")


def cmd_cxg_mine(cfg, out: Path) -> None:
    """Learn a constructicon from the input corpus."""
    units, _ = load_units(cfg)
    mc = cxg.MinerConfig(int(cfg.cxg["rounds"]), int(cfg.cxg["min_freq"]), float(cfg.cxg["association_threshold"]),
                         ("lex", "syn", "sem") if cfg.vectors else ("lex", "syn"))
    cons = cxg.mine_constructions(_annotated(cfg, units, cfg.vectors is not None), mc)
    cons.save(out / "constructicon.tsv")
    _write_rows(out / "constructicon_scores.csv",
                [["id", "pattern", "feature_set", "delta_p"],
                 *[[c.id, c.pattern, c.feature_set, f"{cons.scores[c.id]:.6f}"] for c in cons]])


def cmd_network(cfg, out: Path) -> None:
    """User-overlap network between communities and its Louvain partition."""
    units, _ = load_units(cfg)
    sets = netstats.community_user_sets(units, cfg.drop_moderators)
    if len(sets) < 2:
        raise DialignError("network needs at least two communities")
    graph = netstats.overlap_graph(sets, float(cfg.network["jaccard_threshold"]))
    part = netstats.louvain(graph, seed=cfg.seed)
    netstats.write_edges_csv(graph, out / "edges.csv")
    netstats.write_partition_csv(part, out / "partition.csv", graph.nodes)
    _write_rows(out / "modularity.csv", [["modularity", "communities"], [f"{part.modularity:.9f}", part.n_communities]])


def cmd_cohorts(cfg, out: Path) -> None:
    """User profiles, lifespan and engagement deciles."""
    units, _ = load_units(cfg)
    profiles = netstats.build_profiles(units, cfg.drop_moderators)
    netstats.write_profiles_csv(profiles, out / "profiles.csv")
    if len(profiles) >= 10:
        rows = [["decile", "users", "mean_lifespan_days", "mean_ratio"]]
        for d in range(1, 11):
            life = [p.lifespan_days for p in profiles if p.lifespan_decile == d]
            ratio = [p.engagement_ratio for p in profiles if p.engagement_decile == d]
            rows.append([d, len(life), f"{np.mean(life):.6f}" if life else "-", f"{np.mean(ratio):.6f}" if ratio else "-"])
        _write_rows(out / "cohorts.csv", rows)
        r = netstats.pearson([p.total_score for p in profiles], [p.engagement_ratio for p in profiles]) \
            if len({p.total_score for p in profiles}) > 1 and len({p.engagement_ratio for p in profiles}) > 1 else None
        _write_rows(out / "correlation.csv", [["pair", "pearson"], ["score~ratio", "-" if r is None else f"{r:.9f}"]])


def cmd_ols(cfg, out: Path) -> None:
    """Ordinary least squares on a CSV table."""
    with open(cfg.ols["table"], newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    cols = [cfg.ols["y"], *cfg.ols["x"]]
    missing = [c for c in cols if rows and c not in rows[0]]
    if not rows or missing:
        raise ConfigError(f"ols.x/ols.y: columns not in table: {', '.join(missing) or 'table is empty'}")
    try:
        y = np.array([float(r[cfg.ols["y"]]) for r in rows])
        x = np.array([[float(r[c]) for c in cfg.ols["x"]] for r in rows])
    except ValueError as exc:
        raise DialignError(f"non-numeric value in OLS table: {exc}") from exc
    _write_rows(out / "ols.csv", netstats.ols(y, x, cfg.ols["x"]).rows())


def cmd_report(cfg, out: Path) -> None:
    """Descriptive tables, variable patterns, overlap network and cohorts in one run."""
    cmd_stats(cfg, out)
    cmd_variables(cfg, out)
    cmd_network(cfg, out)
    cmd_cohorts(cfg, out)
    cmd_classify(cfg, out)


def cmd_synth(cfg, out: Path) -> None:
    """Write a synthetic dump for trying the pipeline."""
    synth.write_fixture(out / "fixture.ndjson", seed=cfg.seed, **cfg.synth)


COMMANDS: dict[str, tuple[Callable, tuple[str, ...]]] = {
    "ingest": (cmd_ingest, ("input",)),
    "stats": (cmd_stats, ("input",)),
    "variables": (cmd_variables, ("input",)),
    "classify": (cmd_classify, ("input", "classify")),
    "embed-train": (cmd_embed_train, ("input",)),
    "embed-eval": (cmd_embed_eval, ("vectors",)),
    "drift": (cmd_drift, ("input", "drift")),
    "cxg-parse": (cmd_cxg_parse, ("input", "constructicon")),
    "cxg-mine": (cmd_cxg_mine, ("input",)),
    "network": (cmd_network, ("input",)),
    "cohorts": (cmd_cohorts, ("input",)),
    "ols": (cmd_ols, ("ols",)),
    "report": (cmd_report, ("input",)),
    "synth": (cmd_synth, ()),
}


# --- argument parsing and run driver ----------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="YAML run configuration")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--input", action="append", help="input dump or units file (repeatable)")
    p.add_argument("--communities", help="comma-separated community names")
    p.add_argument("--text-types", help="comma-separated text types")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config field, e.g. embedding.dim=50")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="dialign", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dialign {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common], help=(COMMANDS[name][0].__doc__ or name).splitlines()[0])
        if name in ("variables", "report"):
            sp.add_argument("--variables", dest="variables_path")
        if name in ("embed-eval", "classify", "cxg-parse", "cxg-mine"):
            sp.add_argument("--vectors")
        if name == "embed-eval":
            sp.add_argument("--pairs")
        if name == "cxg-parse":
            sp.add_argument("--constructicon")
        if name == "drift":
            sp.add_argument("--source")
            sp.add_argument("--targets")
            sp.add_argument("--periods", type=int)
            sp.add_argument("--mode", choices=("incremental", "sequential"))
        if name == "classify":
            sp.add_argument("--plan", choices=sampling.PLANS)
            sp.add_argument("--mask", action="store_true")
        if name == "ols":
            sp.add_argument("--table")
            sp.add_argument("--y")
            sp.add_argument("--x")
    return parser


def _parse_scalar(text: str):
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config)
    flags: dict = {}
    for name in ("seed", "out", "communities", "input", "vectors", "pairs", "constructicon", "periods"):
        v = getattr(args, name, None)
        if v is not None:
            flags[name] = v
    if getattr(args, "text_types", None):
        flags["text_types"] = args.text_types
    if getattr(args, "variables_path", None):
        flags["variables"] = args.variables_path
    _merge(cfg, flags, "flag")
    if getattr(args, "source", None):
        cfg.drift["source"] = args.source
    if getattr(args, "targets", None):
        cfg.drift["targets"] = [t for t in args.targets.split(",") if t]
    if getattr(args, "mode", None):
        cfg.drift["mode"] = args.mode
    if getattr(args, "plan", None):
        cfg.sampling["plan"] = args.plan
    if getattr(args, "mask", False):
        cfg.classifier["mask"] = True
    for name in ("table", "y"):
        if getattr(args, name, None):
            cfg.ols[name] = getattr(args, name)
    if getattr(args, "x", None):
        cfg.ols["x"] = [c for c in args.x.split(",") if c]
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set: expected KEY=VALUE, got '{item}'")
        head, _, sub = key.partition(".")
        _merge(cfg, {head: {sub: _parse_scalar(value)} if sub else _parse_scalar(value)}, "--set")
    return cfg


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _manifest(command: str, cfg: RunConfig, staged: Path) -> dict:
    import numba
    import scipy

    outputs = {p.name: _sha256(p) for p in sorted(staged.iterdir()) if p.is_file()}
    return {
        "command": command,
        "config": cfg.as_dict(),
        "config_hash": cfg.digest(),
        "seed": cfg.seed,
        "versions": {"dialign": __version__, "python": platform.python_version(), "numpy": np.__version__,
                     "scipy": scipy.__version__, "numba": numba.__version__},
        "outputs": outputs,
    }


def run(command: str, cfg: RunConfig) -> int:
    func, needs = COMMANDS[command]
    _validate(cfg, needs)
    out = Path(cfg.out)
    created = not out.exists()
    out.mkdir(parents=True, exist_ok=True)
    staged = Path(tempfile.mkdtemp(prefix=".staging-", dir=out))
    try:
        func(cfg, staged)
        manifest = _manifest(command, cfg, staged)
        (staged / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        for p in sorted(staged.iterdir()):
            os.replace(p, out / p.name)
    except BaseException:
        shutil.rmtree(staged, ignore_errors=True)
        if created and not any(out.iterdir()):
            out.rmdir()
        raise
    shutil.rmtree(staged, ignore_errors=True)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return run(args.command, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DialignError, OSError, ValueError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
