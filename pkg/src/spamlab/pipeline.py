"""End-to-end batch runs: load, balance/split, preprocess, vectorize, classify,
compare, explain and report.

Every random choice is derived from ``RunConfig.seed``:

============  ===================================================
stage         seed
============  ===================================================
balancing     ``derive_seed(seed, "balance")``
split/folds   ``derive_seed(seed, "split")``
models        ``seed`` (the ClassifierSpec seed)
background    ``derive_seed(seed, "background")``
instances     ``derive_seed(seed, "instances")``
permutations  ``derive_seed(seed, "shap", <model>, <instance>)``
repeat r      ``derive_seed(seed, "repeat", r)`` for split and models
============  ===================================================
"""
from __future__ import annotations

import contextlib
import csv
import dataclasses
import hashlib
import io
import json
import os
import statistics
import time
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from ._rng import derive_seed, make_rng
from .corpus import Corpus, SplitPlan, balance, load_corpus, split
from .errors import ConfigurationError, SpamLabError
from .evaluation import (FoldReport, MeanRoc, confusion, cross_validate, fold_matrices, fscore, holdout_matrices,
                         mean_roc, reports_to_csv, roc_from_csv, roc_to_csv, time_prediction)
from .explain import (AttributionSet, RankedFeature, attributions_from_csv, attributions_to_csv,
                      make_background, shapley_sample, summary_ranking, summary_to_csv)
from .models.core import ClassifierSpec, ModelKind, TrainedModel, fit, predict
from .plots import emit_roc_svg, emit_summary_svg
from .stats import SignificanceMatrix, compare_all
from .textprep import PrepConfig, TokenStream, asset_hashes, preprocess

REPORT_SCHEMA = 1
ENV_CORPUS = "ENRON_CORPUS_DIR"
FEATURE_SIZES = (10, 25, 50, 75, 100, 125, 150, 200)
PREP_FLAGS = ("strip_html", "drop_short_numeric", "remove_stopwords", "remove_noise_words", "lemmatize")


@dataclass
class ExplainConfig:
    models: list[str] = field(default_factory=lambda: ["rf", "xgb", "mlp"])
    instances: int = 20
    background: int = 100
    permutations: int = 10
    top_k: int = 10


@dataclass
class RunConfig:
    corpus_root: str | None = None
    output_dir: str = "spamlab-out"
    seed: int = 0
    dict_size: int = 200
    prep: dict[str, bool] = field(default_factory=lambda: {k: True for k in PREP_FLAGS})
    models: list[dict[str, Any]] = field(default_factory=lambda: [{"kind": k.value} for k in ModelKind])
    train_fraction: float = 0.7
    folds: int = 5
    repeats: int = 20
    balance: bool = True
    timing: bool = True
    threads: int = 1
    explain: ExplainConfig = field(default_factory=ExplainConfig)

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        unknown = set(d) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ConfigurationError(f"unknown config keys {sorted(unknown)}")
        ex = d.pop("explain", None)
        cfg = cls(**d)
        if ex is not None:
            if not isinstance(ex, dict):
                raise ConfigurationError("explain must be an object")
            bad = set(ex) - {f.name for f in dataclasses.fields(ExplainConfig)}
            if bad:
                raise ConfigurationError(f"unknown explain keys {sorted(bad)}")
            cfg.explain = ExplainConfig(**ex)
        return cfg

    @classmethod
    def load(cls, path: str | os.PathLike) -> "RunConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"cannot read config {path}: {e}") from e

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    # -- validation -----------------------------------------------------------

    def resolved_root(self) -> str | None:
        return self.corpus_root or os.environ.get(ENV_CORPUS) or None

    def validate(self, need_corpus: bool = True) -> None:
        """Raise ConfigurationError before any work starts."""
        if need_corpus:
            root = self.resolved_root()
            if not root:
                raise ConfigurationError(f"no corpus root given and {ENV_CORPUS} is not set")
            if not Path(root).is_dir():
                raise ConfigurationError(f"corpus root is not a directory: {root}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigurationError("seed must be a non-negative integer")
        if not isinstance(self.dict_size, int) or self.dict_size < 1:
            raise ConfigurationError("dict_size must be a positive integer")
        if not 0.0 < float(self.train_fraction) < 1.0:
            raise ConfigurationError("train_fraction must lie in (0, 1)")
        if not isinstance(self.folds, int) or self.folds < 2:
            raise ConfigurationError("folds must be an integer >= 2")
        if not isinstance(self.repeats, int) or self.repeats < 2:
            raise ConfigurationError("repeats must be an integer >= 2")
        if not isinstance(self.threads, int) or self.threads < 1:
            raise ConfigurationError("threads must be a positive integer")
        bad = set(self.prep) - set(PREP_FLAGS)
        if bad:
            raise ConfigurationError(f"unknown preprocessing flags {sorted(bad)}")
        if not self.models:
            raise ConfigurationError("at least one model must be configured")
        specs = self.specs()
        names = [s.kind for s in specs]
        if len(set(names)) != len(names):
            raise ConfigurationError("each model kind may be configured once")
        for m in self.explain.models:
            ModelKind.parse(m)
        for key in ("instances", "background", "permutations", "top_k"):
            v = getattr(self.explain, key)
            if not isinstance(v, int) or v < 1:
                raise ConfigurationError(f"explain.{key} must be a positive integer")

    def specs(self, seed: int | None = None) -> list[ClassifierSpec]:
        out = []
        for m in self.models:
            if isinstance(m, str):
                m = {"kind": m}
            if not isinstance(m, dict) or "kind" not in m:
                raise ConfigurationError(f"model entries need a 'kind': {m!r}")
            out.append(ClassifierSpec(m["kind"], m.get("hyperparameters", {}), self.seed if seed is None else seed))
        return out

    def prep_config(self) -> PrepConfig:
        return PrepConfig(**{k: bool(self.prep.get(k, True)) for k in PREP_FLAGS})

    def config_hash(self) -> str:
        d = self.to_dict()
        d.pop("output_dir")
        d.pop("threads")
        d["corpus_root"] = None
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


# -- shared preparation ---------------------------------------------------------

@dataclass
class Prepared:
    corpus: Corpus
    plan: SplitPlan
    streams: dict[str, TokenStream]
    labels: dict[str, int]


class StageError(SpamLabError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage, self.cause = stage, cause


class _Stages:
    def __init__(self, log=None):
        self.current = None
        self.seconds: dict[str, float] = {}
        self.log = log or (lambda msg: None)

    @contextlib.contextmanager
    def __call__(self, name):
        self.current = name
        self.log(f"[{name}]")
        t0 = time.perf_counter()
        try:
            yield
        except StageError:
            raise
        except Exception as e:
            raise StageError(name, e) from e
        self.seconds[name] = self.seconds.get(name, 0.0) + time.perf_counter() - t0


def load_and_split(cfg: RunConfig, stages: _Stages, split_seed: int | None = None) -> tuple[Corpus, SplitPlan]:
    with stages("load"):
        corpus = load_corpus(cfg.resolved_root())
    with stages("split"):
        if cfg.balance:
            corpus = balance(corpus, derive_seed(cfg.seed, "balance"))
        plan = split(corpus, cfg.train_fraction, cfg.folds,
                     derive_seed(cfg.seed, "split") if split_seed is None else split_seed)
    return corpus, plan


def tokenize_corpus(corpus: Corpus, prep: PrepConfig, stages: _Stages) -> tuple[dict, dict]:
    with stages("preprocess"):
        streams = {d.id: preprocess(d, prep) for d in corpus.documents}
        labels = {d.id: int(d.label) for d in corpus.documents}
    return streams, labels


def prepare(cfg: RunConfig, stages: _Stages | None = None) -> Prepared:
    stages = stages or _Stages()
    corpus, plan = load_and_split(cfg, stages)
    streams, labels = tokenize_corpus(corpus, cfg.prep_config(), stages)
    return Prepared(corpus, plan, streams, labels)


def corpus_digest(corpus: Corpus) -> str:
    h = hashlib.sha256()
    for d in corpus.documents:
        h.update(d.id.encode("utf-8") + b"\0" + hashlib.sha256(d.raw_text).digest())
    return h.hexdigest()


def _threads(n: int):
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=n)


# -- outputs ------------------------------------------------------------------------

class _Writer:
    """Writes artifacts under ``root`` and remembers their hashes for the manifest."""

    def __init__(self, root: Path):
        self.root = root
        self.files: dict[str, str] = {}

    def text(self, rel: str, content: str) -> None:
        path = self.root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        data = content.encode("utf-8")
        path.write_bytes(data)
        self.files[rel] = hashlib.sha256(data).hexdigest()

    def manifest(self) -> dict[str, str]:
        return dict(sorted(self.files.items()))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(v):
    return "" if v is None else repr(float(v))


@dataclass
class ReportBundle:
    output_dir: Path
    reports: dict[str, FoldReport] = field(default_factory=dict)
    significance: SignificanceMatrix | None = None
    rankings: dict[str, list[RankedFeature]] = field(default_factory=dict)
    test_seconds: dict[str, float] = field(default_factory=dict)
    metadata: dict[str, Any] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)
    failed_stage: str | None = None
    manifest: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failed_stage is None

    def summary_rows(self):
        for name, r in self.reports.items():
            yield name, r.mean("fscore"), r.std("fscore"), r.mean("auc"), r.std("auc")


def _fold_fscores(reports: dict[str, FoldReport]) -> dict[str, list[float]]:
    out = {}
    for name, r in reports.items():
        vals = r.values("fscore")
        if all(v is not None for v in vals):
            out[name] = vals
    return out


def explain_models(cfg: RunConfig, prepared: Prepared, specs: Sequence[ClassifierSpec], stages: _Stages,
                   fitted: dict[ModelKind, TrainedModel] | None = None, holdout=None):
    """Sampled Shapley attributions for the configured explain models on test instances.

    Returns ``(attributions per model, rankings per model, feature names)``.
    """
    ex = cfg.explain
    wanted = [ModelKind.parse(m) for m in ex.models]
    chosen = [s for s in specs if s.kind in wanted]
    if not chosen:
        return {}, {}, []
    data = holdout
    if data is None:
        with stages("vectorize"):
            data = holdout_matrices(prepared.streams, prepared.labels, prepared.plan, cfg.dict_size)
    words = list(data.train.words)
    background = make_background(data.train.counts, ex.background, derive_seed(cfg.seed, "background"))
    n_test = data.test.shape[0]
    pick = make_rng(derive_seed(cfg.seed, "instances")).choice(n_test, size=min(ex.instances, n_test), replace=False)
    pick = np.sort(pick)
    attributions, rankings = {}, {}
    with stages("explain"):
        for spec in chosen:
            model = (fitted or {}).get(spec.kind) or fit(spec, data.train)
            sets: list[AttributionSet] = []
            for i in pick:
                doc_id = data.test.rows[i]
                sets.append(shapley_sample(model, data.test.counts[i], background, ex.permutations,
                                           derive_seed(cfg.seed, "shap", spec.kind.value, doc_id),
                                           instance_id=doc_id))
            attributions[spec.kind] = sets
            rankings[spec.name] = summary_ranking(sets, words, ex.top_k)
    return attributions, rankings, words


def _fail(out: _Writer, bundle: ReportBundle, err: StageError, cfg: RunConfig, stages: _Stages) -> ReportBundle:
    bundle.failed_stage = err.stage
    (out.root / "FAILED").write_text(
        f"stage: {err.stage}\nerror: {type(err.cause).__name__}: {err.cause}\n\n"
        + "".join(traceback.format_exception(type(err.cause), err.cause, err.cause.__traceback__)),
        encoding="utf-8")
    _write_report(out, bundle, cfg, stages)
    return bundle


def _write_report(out: _Writer, bundle: ReportBundle, cfg: RunConfig, stages: _Stages) -> None:
    bundle.manifest = out.manifest()
    doc = {
        "schema": REPORT_SCHEMA,
        "spamlab_version": __version__,
        "status": "ok" if bundle.ok else "failed",
        "failed_stage": bundle.failed_stage,
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash(),
        "metadata": bundle.metadata,
        "models": {name: r.to_dict() for name, r in bundle.reports.items()},
        "test_predict_seconds": bundle.test_seconds,
        "failures": bundle.failures,
        "stage_seconds": stages.seconds,
        "manifest": bundle.manifest,
    }
    (out.root / "report.json").write_text(json.dumps(doc, indent=1, default=_json_default) + "\n", encoding="utf-8")


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def run_pipeline(cfg: RunConfig, log=None) -> ReportBundle:
    """Full run; see the module docstring for the seed derivation.

    Configuration problems raise ConfigurationError before anything is
    written. A failure in a later stage leaves a ``FAILED`` file naming the
    stage next to whatever was already written.
    """
    cfg.validate()
    specs = cfg.specs()
    root = Path(cfg.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    stale = root / "FAILED"
    if stale.exists():
        stale.unlink()
    out = _Writer(root)
    stages = _Stages(log)
    bundle = ReportBundle(root)
    t_start = time.perf_counter()
    try:
        with _threads(cfg.threads):
            prepared = prepare(cfg, stages)
            bundle.metadata.update({
                "corpus_digest": corpus_digest(prepared.corpus),
                "documents": len(prepared.corpus),
                "class_counts": {k.name.lower(): v for k, v in prepared.corpus.class_counts.items()},
                "train": len(prepared.plan.train_ids), "test": len(prepared.plan.test_ids),
                "asset_hashes": asset_hashes(),
            })
            with stages("vectorize"):
                folds = fold_matrices(prepared.streams, prepared.labels, prepared.plan, cfg.dict_size)
                holdout = holdout_matrices(prepared.streams, prepared.labels, prepared.plan, cfg.dict_size)
            fitted: dict[ModelKind, TrainedModel] = {}
            with stages("classify"):
                for spec in specs:
                    if log:
                        log(f"  {spec.name}")
                    try:
                        bundle.reports[spec.name] = cross_validate(spec, prepared.plan, folds, cfg.timing, cfg.threads)
                        fitted[spec.kind] = fit(spec, holdout.train)
                        if cfg.timing:
                            bundle.test_seconds[spec.name] = time_prediction(fitted[spec.kind], holdout.test)
                    except Exception as e:
                        bundle.failures[spec.name] = f"{type(e).__name__}: {e}"
                        raise
                out.text("metrics.csv", reports_to_csv(list(bundle.reports.values())))
                out.text("summary.csv", _csv(["model", "fscore_mean", "fscore_std", "auc_mean", "auc_std"],
                                             [[n, *map(_num, v)] for n, *v in bundle.summary_rows()]))
                for spec in specs:
                    out.text(f"roc/{spec.kind.value}.csv", roc_to_csv(bundle.reports[spec.name]))
            with stages("compare"):
                scores = _fold_fscores(bundle.reports)
                if len(scores) >= 2:
                    bundle.significance = compare_all(scores)
                    out.text("significance.csv", bundle.significance.to_csv())
                else:
                    out.text("significance.csv", compare_header())
            attributions, rankings, words = explain_models(cfg, prepared, specs, stages, fitted, holdout)
            bundle.rankings = rankings
            with stages("explain"):
                for kind, sets in attributions.items():
                    out.text(f"shap/{kind.value}.csv", attributions_to_csv(sets, words))
                    out.text(f"shap/{kind.value}_summary.csv", summary_to_csv(rankings[kind.display_name]))
            with stages("plot"):
                curves = [r.mean_roc for r in bundle.reports.values() if r.mean_roc is not None]
                out.text("roc.svg", emit_roc_svg(curves) if curves else _empty_svg("no ROC curves"))
                out.text("summary.svg", emit_summary_svg(rankings) if rankings else _empty_svg("no attributions"))
    except StageError as e:
        return _fail(out, bundle, e, cfg, stages)
    bundle.metadata["wall_clock_seconds"] = time.perf_counter() - t_start
    _write_report(out, bundle, cfg, stages)
    return bundle


def compare_header() -> str:
    return "pair,model_a,model_b,t,df,p_raw,p_adjusted,significant\n"


def _empty_svg(msg: str) -> str:
    return ('<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600" viewBox="0 0 800 600">'
            f'<text x="400" y="300" text-anchor="middle">{msg}</text></svg>\n')


# -- studies --------------------------------------------------------------------------

def _cv_all(cfg, prepared, specs, dict_size, timed, stages):
    with stages("vectorize"):
        folds = fold_matrices(prepared.streams, prepared.labels, prepared.plan, dict_size)
    with stages("classify"):
        return {s.name: cross_validate(s, prepared.plan, folds, timed, cfg.threads) for s in specs}


def ablate_features(cfg: RunConfig, sizes: Sequence[int] = FEATURE_SIZES, log=None) -> list[dict]:
    """Cross-validated mean F-score (over models) and mean prediction time per dictionary size.

    Writes ``ablate_features.csv``; ``time_percent`` is 100 for the fastest size.
    """
    cfg.validate()
    if not sizes or any((not isinstance(s, int)) or s < 1 for s in sizes):
        raise ConfigurationError("feature sizes must be positive integers")
    specs = cfg.specs()
    stages = _Stages(log)
    with _threads(cfg.threads):
        prepared = prepare(cfg, stages)
        rows = []
        for size in sizes:
            reports = _cv_all(cfg, prepared, specs, size, cfg.timing, stages)
            f = [r.mean("fscore") for r in reports.values()]
            t = [r.mean("predict_seconds") for r in reports.values()] if cfg.timing else []
            rows.append({"dict_size": size,
                         "mean_fscore": statistics.fmean(v for v in f if v is not None) if any(v is not None for v in f) else None,
                         "mean_predict_seconds": statistics.fmean(t) if t else None,
                         **{f"fscore[{n}]": r.mean("fscore") for n, r in reports.items()}})
    times = [r["mean_predict_seconds"] for r in rows if r["mean_predict_seconds"]]
    best = min(times) if times else None
    for r in rows:
        r["time_percent"] = None if best is None or not r["mean_predict_seconds"] else 100.0 * best / r["mean_predict_seconds"]
    root = Path(cfg.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    header = ["dict_size", "mean_fscore", "mean_predict_seconds", "time_percent"] + \
             [k for k in rows[0] if k.startswith("fscore[")]
    (root / "ablate_features.csv").write_text(
        _csv(header, [[r["dict_size"], *(_num(r[h]) for h in header[1:])] for r in rows]), encoding="utf-8")
    return rows


def ablate_preprocessing(cfg: RunConfig, off_flags: dict[str, bool] | None = None, log=None) -> list[dict]:
    """Two cross-validated runs that differ only in preprocessing flags.

    The "on" arm uses ``cfg.prep``; the "off" arm uses ``off_flags`` (every
    flag false by default). Writes ``ablate_prep.csv`` with the F-score ratio.
    """
    cfg.validate()
    off = {k: False for k in PREP_FLAGS} if off_flags is None else {**cfg.prep, **off_flags}
    specs = cfg.specs()
    stages = _Stages(log)
    with _threads(cfg.threads):
        corpus, plan = load_and_split(cfg, stages)
        arms = {}
        for arm, flags in (("on", cfg.prep), ("off", off)):
            streams, labels = tokenize_corpus(corpus, PrepConfig(**{k: bool(flags.get(k, True)) for k in PREP_FLAGS}),
                                              stages)
            arms[arm] = _cv_all(cfg, Prepared(corpus, plan, streams, labels), specs, cfg.dict_size, False, stages)
    rows = []
    for s in specs:
        on, offv = arms["on"][s.name].mean("fscore"), arms["off"][s.name].mean("fscore")
        rows.append({"model": s.name, "fscore_on": on, "fscore_off": offv,
                     "ratio": None if on is None or not offv else on / offv})
    root = Path(cfg.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    (root / "ablate_prep.csv").write_text(
        _csv(["model", "fscore_on", "fscore_off", "ratio"],
             [[r["model"], _num(r["fscore_on"]), _num(r["fscore_off"]), _num(r["ratio"])] for r in rows]),
        encoding="utf-8")
    return rows


def compare_repeats(cfg: RunConfig, log=None) -> tuple[dict[str, list[float]], SignificanceMatrix]:
    """Hold-out F-scores over ``cfg.repeats`` seeded splits, then all pairwise t-tests.

    Repeat ``r`` uses one split and one model seed shared by every model, so
    the scores are paired by repeat. Writes ``repeats.csv`` and ``significance.csv``.
    """
    cfg.validate()
    stages = _Stages(log)
    scores: dict[str, list[float]] = {}
    with _threads(cfg.threads):
        with stages("load"):
            corpus = load_corpus(cfg.resolved_root())
            if cfg.balance:
                corpus = balance(corpus, derive_seed(cfg.seed, "balance"))
        streams, labels = tokenize_corpus(corpus, cfg.prep_config(), stages)
        for r in range(cfg.repeats):
            rs = derive_seed(cfg.seed, "repeat", r)
            if log:
                log(f"  repeat {r + 1}/{cfg.repeats}")
            with stages("split"):
                plan = split(corpus, cfg.train_fraction, cfg.folds, rs)
            with stages("vectorize"):
                data = holdout_matrices(streams, labels, plan, cfg.dict_size)
            with stages("classify"):
                for spec in cfg.specs(seed=rs):
                    model = fit(spec, data.train)
                    c = confusion(data.test.labels, predict(model, data.test))
                    f = fscore(c)
                    if f is None:
                        raise ValueError(f"{spec.name}: F-score undefined in repeat {r}")
                    scores.setdefault(spec.name, []).append(f)
    with stages("compare"):
        matrix = compare_all(scores)
    root = Path(cfg.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    (root / "repeats.csv").write_text(
        _csv(["model", "repeat", "fscore"], [[m, i, repr(v)] for m, vals in scores.items() for i, v in enumerate(vals)]),
        encoding="utf-8")
    (root / "significance.csv").write_text(matrix.to_csv(), encoding="utf-8")
    return scores, matrix


def explain_run(cfg: RunConfig, log=None) -> dict[str, list[RankedFeature]]:
    """Attributions only: writes ``shap/<model>.csv`` and ``summary.svg``."""
    cfg.validate()
    specs = cfg.specs()
    stages = _Stages(log)
    with _threads(cfg.threads):
        prepared = prepare(cfg, stages)
        attributions, rankings, words = explain_models(cfg, prepared, specs, stages)
    out = _Writer(Path(cfg.output_dir))
    for kind, sets in attributions.items():
        out.text(f"shap/{kind.value}.csv", attributions_to_csv(sets, words))
        out.text(f"shap/{kind.value}_summary.csv", summary_to_csv(rankings[kind.display_name]))
    out.text("summary.svg", emit_summary_svg(rankings) if rankings else _empty_svg("no attributions"))
    return rankings


def replot(output_dir: str | os.PathLike, top_k: int = 10) -> list[str]:
    """Re-render ``roc.svg`` and ``summary.svg`` from the CSVs of an earlier run."""
    root = Path(output_dir)
    written = []
    curves: list[MeanRoc] = []
    for path in sorted((root / "roc").glob("*.csv")):
        fold_curves = roc_from_csv(path.read_text(encoding="utf-8"))
        if fold_curves:
            curves.append(mean_roc(_display(path.stem), fold_curves))
    if curves:
        (root / "roc.svg").write_text(emit_roc_svg(curves), encoding="utf-8")
        written.append("roc.svg")
    rankings = {}
    for path in sorted((root / "shap").glob("*.csv")):
        if path.stem.endswith("_summary"):
            continue
        sets, names = attributions_from_csv(path.read_text(encoding="utf-8"))
        if sets:
            rankings[_display(path.stem)] = summary_ranking(sets, names, top_k)
    if rankings:
        (root / "summary.svg").write_text(emit_summary_svg(rankings), encoding="utf-8")
        written.append("summary.svg")
    if not written:
        raise ConfigurationError(f"no roc/ or shap/ CSV files under {root}")
    return written


def _display(slug: str) -> str:
    try:
        return ModelKind.parse(slug).display_name
    except ConfigurationError:
        return slug
