"""Confusion metrics, ROC analysis, stratified cross-validation and timing.

Spam is the positive class. Metrics whose denominator is zero are returned
as ``None`` rather than 0 so that callers have to decide what an undefined
precision means for them.
"""
from __future__ import annotations

import csv
import io
import json
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import SplitPlan
from .models.core import ClassifierSpec, TrainedModel, decision_scores, fit, predict
from .textprep import TokenStream
from .vectorize import FeatureMatrix, build_dictionary, build_matrix

ROC_GRID = np.linspace(0.0, 1.0, 101)


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def swapped(self) -> "Confusion":
        """The same table with ham treated as the positive class."""
        return Confusion(self.tn, self.fn, self.tp, self.fp)

    def to_dict(self):
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def confusion(y_true, y_pred) -> Confusion:
    t = np.asarray(y_true).astype(np.int64).ravel()
    p = np.asarray(y_pred).astype(np.int64).ravel()
    if t.shape != p.shape:
        raise ValueError(f"length mismatch: {t.size} labels vs {p.size} predictions")
    return Confusion(int(np.sum((t == 1) & (p == 1))), int(np.sum((t == 0) & (p == 1))),
                     int(np.sum((t == 0) & (p == 0))), int(np.sum((t == 1) & (p == 0))))


def precision(c: Confusion) -> float | None:
    d = c.tp + c.fp
    return c.tp / d if d else None


def recall(c: Confusion) -> float | None:
    d = c.tp + c.fn
    return c.tp / d if d else None


def fscore(c: Confusion) -> float | None:
    """``2TP / (2TP + FP + FN)``, straight from the counts."""
    d = 2 * c.tp + c.fp + c.fn
    return 2 * c.tp / d if d else None


def _mean_defined(values) -> float | None:
    vals = [v for v in values if v is not None]
    return sum(vals) / len(vals) if len(vals) == len(values) and vals else None


def macro_precision(c: Confusion) -> float | None:
    return _mean_defined([precision(c), precision(c.swapped())])


def macro_recall(c: Confusion) -> float | None:
    return _mean_defined([recall(c), recall(c.swapped())])


def macro_fscore(c: Confusion) -> float | None:
    """Unweighted mean of the spam-positive and ham-positive F-scores."""
    return _mean_defined([fscore(c), fscore(c.swapped())])


# -- ROC -----------------------------------------------------------------------

@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray   # thresholds[i] produced point i; +inf for the origin
    auc: float

    def to_rows(self):
        return [(float(f), float(t), float(th)) for f, t, th in zip(self.fpr, self.tpr, self.thresholds)]


def roc_curve(scores, labels) -> RocCurve:
    """Sweep distinct scores from high to low; equal scores flip together.

    Each point classifies ``score >= threshold`` as spam. AUC is the
    trapezoid area, which with grouped ties equals the Mann-Whitney
    probability counting ties as one half.
    """
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).astype(np.int64).ravel()
    if s.shape != y.shape:
        raise ValueError("scores and labels differ in length")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    pos, neg = int(np.sum(y == 1)), int(np.sum(y == 0))
    if pos == 0 or neg == 0:
        raise ValueError("ROC needs both spam and ham labels")
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    last = np.r_[np.flatnonzero(np.diff(s) != 0), len(s) - 1]
    tps = np.cumsum(y)[last]
    fps = (last + 1) - tps
    tpr = np.r_[0.0, tps / pos]
    fpr = np.r_[0.0, fps / neg]
    tpr[-1] = fpr[-1] = 1.0
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(fpr, tpr, np.r_[np.inf, s[last]], auc)


def interpolate_roc(curve: RocCurve, grid=ROC_GRID) -> np.ndarray:
    """TPR on ``grid``; on a vertical run the highest TPR is used, and TPR(0) = 0."""
    fpr, idx = np.unique(curve.fpr[::-1], return_index=True)
    tpr = curve.tpr[::-1][idx]
    out = np.interp(grid, fpr, tpr)
    out[0] = 0.0
    return out


@dataclass(frozen=True)
class MeanRoc:
    name: str
    grid: np.ndarray
    mean_tpr: np.ndarray
    std_tpr: np.ndarray
    auc_mean: float
    auc_std: float


def mean_roc(name: str, curves: Sequence[RocCurve], grid=ROC_GRID) -> MeanRoc:
    """Average of fold curves on a fixed FPR grid, with a sample-std band."""
    if not curves:
        raise ValueError("no curves to average")
    T = np.array([interpolate_roc(c, grid) for c in curves])
    aucs = [c.auc for c in curves]
    mean = T.mean(axis=0)
    mean[-1] = 1.0
    std = T.std(axis=0, ddof=1) if len(curves) > 1 else np.zeros_like(mean)
    return MeanRoc(name, np.asarray(grid), mean, std, statistics.fmean(aucs),
                   statistics.stdev(aucs) if len(aucs) > 1 else 0.0)


# -- timing --------------------------------------------------------------------

def time_prediction(model: TrainedModel, X, repeats: int = 5) -> float:
    """Median wall-clock seconds to predict all of ``X``, after one warm-up call."""
    predict(model, X)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        predict(model, X)
        times.append(time.perf_counter() - t0)
    return max(statistics.median(times), 1e-12)


# -- cross-validation ----------------------------------------------------------

METRICS = ("precision", "recall", "fscore", "fscore_macro", "auc", "predict_seconds")


@dataclass
class FoldResult:
    fold: int
    confusion: Confusion
    roc: RocCurve | None
    predict_seconds: float | None = None

    @property
    def metrics(self) -> dict[str, float | None]:
        c = self.confusion
        return {"precision": precision(c), "recall": recall(c), "fscore": fscore(c),
                "fscore_macro": macro_fscore(c), "auc": None if self.roc is None else self.roc.auc,
                "predict_seconds": self.predict_seconds}


def _summary(values: Sequence[float | None]) -> tuple[float | None, float | None]:
    # undefined in any fold -> undefined aggregate
    if any(v is None for v in values) or not values:
        return None, None
    return statistics.fmean(values), (statistics.stdev(values) if len(values) > 1 else 0.0)


@dataclass
class FoldReport:
    model: str
    folds: list[FoldResult]
    spec: ClassifierSpec | None = None

    def values(self, metric: str) -> list[float | None]:
        return [f.metrics[metric] for f in self.folds]

    def mean(self, metric: str) -> float | None:
        return _summary(self.values(metric))[0]

    def std(self, metric: str) -> float | None:
        return _summary(self.values(metric))[1]

    @property
    def mean_roc(self) -> MeanRoc | None:
        curves = [f.roc for f in self.folds if f.roc is not None]
        return mean_roc(self.model, curves) if curves else None

    CSV_HEADER = ("model", "fold", "tp", "fp", "tn", "fn", "precision", "recall", "fscore", "fscore_macro", "auc")

    def csv_rows(self):
        """One row per fold; timing is left out so the rows are reproducible."""
        for f in self.folds:
            m = f.metrics
            yield [self.model, f.fold, f.confusion.tp, f.confusion.fp, f.confusion.tn, f.confusion.fn,
                   *(_fmt(m[k]) for k in ("precision", "recall", "fscore", "fscore_macro", "auc"))]

    def to_dict(self):
        return {
            "model": self.model,
            "spec": None if self.spec is None else self.spec.to_dict(),
            "folds": [{"fold": f.fold, **f.confusion.to_dict(), **f.metrics} for f in self.folds],
            "mean": {k: self.mean(k) for k in METRICS},
            "std": {k: self.std(k) for k in METRICS},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def reports_to_csv(reports: Sequence[FoldReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FoldReport.CSV_HEADER)
    for r in reports:
        w.writerows(r.csv_rows())
    return buf.getvalue()


def roc_to_csv(report: FoldReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["fold", "fpr", "tpr", "threshold"])
    for f in report.folds:
        if f.roc is not None:
            for fp, tp, th in f.roc.to_rows():
                w.writerow([f.fold, repr(fp), repr(tp), repr(th)])
    return buf.getvalue()


def roc_from_csv(text: str) -> list[RocCurve]:
    by_fold: dict[int, list[tuple[float, float, float]]] = {}
    for row in csv.DictReader(io.StringIO(text)):
        by_fold.setdefault(int(row["fold"]), []).append((float(row["fpr"]), float(row["tpr"]), float(row["threshold"])))
    out = []
    for k in sorted(by_fold):
        a = np.array(by_fold[k])
        fpr, tpr = a[:, 0], a[:, 1]
        out.append(RocCurve(fpr, tpr, a[:, 2], float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))))
    return out


@dataclass(frozen=True)
class FoldData:
    """Train and held-out matrices for one fold, sharing a dictionary built on the train part."""

    train: FeatureMatrix
    test: FeatureMatrix


def make_matrices(streams: Mapping[str, TokenStream], labels: Mapping[str, int], train_ids: Sequence[str],
                  test_ids: Sequence[str], dict_size: int) -> FoldData:
    train_streams = [streams[i] for i in train_ids]
    dictionary = build_dictionary(train_streams, dict_size)
    return FoldData(build_matrix(train_streams, [labels[i] for i in train_ids], dictionary),
                    build_matrix([streams[i] for i in test_ids], [labels[i] for i in test_ids], dictionary))


def fold_matrices(streams: Mapping[str, TokenStream], labels: Mapping[str, int], plan: SplitPlan,
                  dict_size: int = 200) -> list[FoldData]:
    """Per-fold matrices; each fold's dictionary sees only that fold's training documents."""
    return [make_matrices(streams, labels, plan.fold_train_ids(i), plan.folds[i], dict_size) for i in range(plan.k)]


def holdout_matrices(streams, labels, plan: SplitPlan, dict_size: int = 200) -> FoldData:
    return make_matrices(streams, labels, plan.train_ids, plan.test_ids, dict_size)


def evaluate_fold(spec: ClassifierSpec, data: FoldData, fold: int = 0, timed: bool = False) -> FoldResult:
    model = fit(spec, data.train)
    scores = decision_scores(model, data.test)
    pred = (scores > spec.kind.threshold).astype(np.int64)
    y = data.test.labels
    roc = roc_curve(scores, y) if 0 < y.sum() < len(y) else None
    secs = time_prediction(model, data.test) if timed else None
    return FoldResult(fold, confusion(y, pred), roc, secs)


def cross_validate(spec: ClassifierSpec, plan: SplitPlan, matrices: Sequence[FoldData], timed: bool = True,
                   threads: int = 1) -> FoldReport:
    """Fit on k-1 folds, score the held-out fold, for every fold of ``plan``.

    Fits may run on up to ``threads`` workers; timing runs afterwards, one
    fold at a time, so measurements do not compete for cores.
    """
    if len(matrices) != plan.k:
        raise ValueError(f"{len(matrices)} fold matrices for a plan with {plan.k} folds")
    for i, d in enumerate(matrices):
        if d.test.rows != tuple(plan.folds[i]):
            raise ValueError(f"fold {i} matrix rows do not match the plan")

    def run(i):
        model = fit(spec, matrices[i].train)
        scores = decision_scores(model, matrices[i].test)
        return model, scores

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            fitted = list(ex.map(run, range(plan.k)))
    else:
        fitted = [run(i) for i in range(plan.k)]
    results = []
    for i, (model, scores) in enumerate(fitted):
        y = matrices[i].test.labels
        pred = (scores > spec.kind.threshold).astype(np.int64)
        roc = roc_curve(scores, y) if 0 < y.sum() < len(y) else None
        secs = time_prediction(model, matrices[i].test) if timed else None
        results.append(FoldResult(i, confusion(y, pred), roc, secs))
    return FoldReport(spec.name, results, spec)

