"""The common fit / score / predict contract shared by all twelve classifiers.

Spam (label 1) is the positive class everywhere. ``decision_scores`` grows
with spam-likeness; margin models threshold at 0 and probability-style
models at 0.5.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..errors import ConfigurationError, DegenerateTrainingError, IncompatibleFeaturesError
from ..vectorize import FeatureMatrix
from . import gradient_models as gm
from . import naive_bayes as nb
from . import neighbors as nn
from . import svm as sv
from . import trees as tr
from ._common import as_2d, column_scale

FORMAT_VERSION = 1


class ModelKind(str, enum.Enum):
    KNN = "knn"
    MLP = "mlp"
    LOGREG = "logreg"
    RF = "rf"
    XGB = "xgb"
    MNB = "mnb"
    GNB = "gnb"
    BNB = "bnb"
    SVM_RBF = "svm_rbf"
    SVM_LINEAR = "svm_linear"
    SVM_POLY = "svm_poly"
    SVM_SIGMOID = "svm_sigmoid"

    @property
    def display_name(self) -> str:
        return DISPLAY_NAMES[self]

    @property
    def threshold(self) -> float:
        return 0.5 if self in PROBABILITY_KINDS else 0.0

    @classmethod
    def parse(cls, value) -> "ModelKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip()
        for k in cls:
            if key.lower() in (k.value, k.display_name.lower(), k.name.lower()):
                return k
        raise ConfigurationError(f"unknown model kind {value!r}; expected one of {[k.value for k in cls]}")


DISPLAY_NAMES = {
    ModelKind.KNN: "kNN",
    ModelKind.MLP: "MPNN",
    ModelKind.LOGREG: "Logistic Regression",
    ModelKind.RF: "Random Forest",
    ModelKind.XGB: "XGBoost",
    ModelKind.MNB: "Multinomial NB",
    ModelKind.GNB: "Gaussian NB",
    ModelKind.BNB: "Bernoulli NB",
    ModelKind.SVM_RBF: "RBF SVM",
    ModelKind.SVM_LINEAR: "Linear SVM",
    ModelKind.SVM_POLY: "Poly SVM",
    ModelKind.SVM_SIGMOID: "Sigmoid SVM",
}

PROBABILITY_KINDS = frozenset({ModelKind.KNN, ModelKind.MLP, ModelKind.LOGREG, ModelKind.RF})
SVM_KINDS = {
    ModelKind.SVM_LINEAR: sv.KernelKind.LINEAR,
    ModelKind.SVM_POLY: sv.KernelKind.POLY,
    ModelKind.SVM_SIGMOID: sv.KernelKind.SIGMOID,
    ModelKind.SVM_RBF: sv.KernelKind.RBF,
}

_SVM_DEFAULTS = {"c": 1.0, "epoch_cap": 5, "kkt_tol": 1e-3, "scale_features": True}

DEFAULTS: dict[ModelKind, dict[str, Any]] = {
    ModelKind.KNN: {"k": 5, "algorithm": "brute", "leaf_size": 10, "p": 1},
    ModelKind.MLP: {"hidden": [50], "max_iter": 10000, "l2": 1e-4, "grad_tol": 1e-5, "ftol": 2.2e-9},
    ModelKind.LOGREG: {"l2_strength": 1.0, "max_iter": 25, "grad_tol": 1e-5},
    ModelKind.RF: {"n_trees": 50, "min_split": 2, "max_features": "sqrt", "bootstrap": True, "max_depth": None},
    ModelKind.XGB: {"rounds": 100, "eta": 0.3, "lambda": 1.0, "gamma": 0.0, "max_depth": 6,
                    "min_child_weight": 1.0},
    ModelKind.MNB: {},
    ModelKind.GNB: {"var_smoothing": 1e-9},
    ModelKind.BNB: {},
    ModelKind.SVM_LINEAR: dict(_SVM_DEFAULTS),
    ModelKind.SVM_POLY: {**_SVM_DEFAULTS, "degree": 3},
    ModelKind.SVM_SIGMOID: {**_SVM_DEFAULTS, "r": 0.0},
    ModelKind.SVM_RBF: {**_SVM_DEFAULTS, "gamma": "auto"},
}


def _positive(name, v, integer=False, allow_zero=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or (integer and int(v) != v):
        raise ConfigurationError(f"{name} must be {'an integer' if integer else 'a number'}, got {v!r}")
    if v < 0 or (v == 0 and not allow_zero):
        raise ConfigurationError(f"{name} must be {'non-negative' if allow_zero else 'positive'}, got {v!r}")
    return int(v) if integer else float(v)


def _validate(kind: ModelKind, hp: dict) -> dict:
    unknown = set(hp) - set(DEFAULTS[kind])
    if unknown:
        raise ConfigurationError(f"{kind.value}: unknown hyperparameters {sorted(unknown)}")
    out = {**DEFAULTS[kind], **hp}
    if kind is ModelKind.KNN:
        out["k"] = _positive("k", out["k"], integer=True)
        out["leaf_size"] = _positive("leaf_size", out["leaf_size"], integer=True)
        out["p"] = _positive("p", out["p"])
        if out["p"] < 1:
            raise ConfigurationError("Minkowski p must be >= 1")
        try:
            out["algorithm"] = nn.Algorithm(out["algorithm"]).value
        except ValueError:
            raise ConfigurationError(f"unknown kNN algorithm {out['algorithm']!r}") from None
    elif kind is ModelKind.MLP:
        if isinstance(out["hidden"], int):
            out["hidden"] = [out["hidden"]]
        out["hidden"] = [_positive("hidden layer width", h, integer=True) for h in out["hidden"]]
        out["max_iter"] = _positive("max_iter", out["max_iter"], integer=True, allow_zero=True)
        for key in ("l2", "grad_tol", "ftol"):
            out[key] = _positive(key, out[key], allow_zero=True)
    elif kind is ModelKind.LOGREG:
        out["l2_strength"] = _positive("l2_strength", out["l2_strength"], allow_zero=True)
        out["max_iter"] = _positive("max_iter", out["max_iter"], integer=True, allow_zero=True)
        out["grad_tol"] = _positive("grad_tol", out["grad_tol"], allow_zero=True)
    elif kind is ModelKind.RF:
        out["n_trees"] = _positive("n_trees", out["n_trees"], integer=True)
        out["min_split"] = _positive("min_split", out["min_split"], integer=True)
        if out["min_split"] < 2:
            raise ConfigurationError("min_split must be >= 2")
        if out["max_features"] not in ("sqrt", "all", None):
            out["max_features"] = _positive("max_features", out["max_features"], integer=True)
        if out["max_depth"] is not None:
            out["max_depth"] = _positive("max_depth", out["max_depth"], integer=True)
        out["bootstrap"] = bool(out["bootstrap"])
    elif kind is ModelKind.XGB:
        out["rounds"] = _positive("rounds", out["rounds"], integer=True, allow_zero=True)
        out["eta"] = _positive("eta", out["eta"])
        out["lambda"] = _positive("lambda", out["lambda"], allow_zero=True)
        out["gamma"] = _positive("gamma", out["gamma"], allow_zero=True)
        out["max_depth"] = _positive("max_depth", out["max_depth"], integer=True, allow_zero=True)
        out["min_child_weight"] = _positive("min_child_weight", out["min_child_weight"], allow_zero=True)
    elif kind is ModelKind.GNB:
        out["var_smoothing"] = _positive("var_smoothing", out["var_smoothing"])
    elif kind in SVM_KINDS:
        out["c"] = _positive("c", out["c"])
        if out["epoch_cap"] is not None:
            out["epoch_cap"] = _positive("epoch_cap", out["epoch_cap"], integer=True)
        out["kkt_tol"] = _positive("kkt_tol", out["kkt_tol"])
        out["scale_features"] = bool(out["scale_features"])
        if "degree" in out:
            out["degree"] = _positive("degree", out["degree"], integer=True)
        if "r" in out and (isinstance(out["r"], bool) or not isinstance(out["r"], (int, float))):
            raise ConfigurationError(f"r must be a number, got {out['r']!r}")
        if "gamma" in out and out["gamma"] != "auto":
            out["gamma"] = _positive("gamma", out["gamma"])
    return out


@dataclass(frozen=True)
class ClassifierSpec:
    """Model identity, validated hyperparameters and the one seed for all randomness."""

    kind: ModelKind
    hyperparameters: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        kind = ModelKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "hyperparameters", _validate(kind, dict(self.hyperparameters)))
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ConfigurationError(f"seed must be a non-negative integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def name(self) -> str:
        return self.kind.display_name

    def to_dict(self):
        return {"kind": self.kind.value, "hyperparameters": dict(self.hyperparameters), "seed": self.seed}

    @classmethod
    def from_dict(cls, d) -> "ClassifierSpec":
        return cls(d["kind"], d.get("hyperparameters", {}), d.get("seed", 0))


def default_specs(seed: int = 0) -> list[ClassifierSpec]:
    return [ClassifierSpec(k, {}, seed) for k in ModelKind]


@dataclass(frozen=True)
class TrainedModel:
    spec: ClassifierSpec
    params: Any
    fingerprint: str
    n_features: int
    feature_scale: np.ndarray | None = None   # SVM inputs are divided by this before kernels

    @property
    def kind(self) -> ModelKind:
        return self.spec.kind

    def to_json(self) -> str:
        doc = {
            "format": "spamlab.model",
            "version": FORMAT_VERSION,
            "spec": self.spec.to_dict(),
            "fingerprint": self.fingerprint,
            "n_features": self.n_features,
            "feature_scale": None if self.feature_scale is None else self.feature_scale.tolist(),
            "params": self.params.to_dict(),
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TrainedModel":
        doc = json.loads(text)
        if doc.get("format") != "spamlab.model":
            raise ValueError("not a serialized model")
        if doc.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {doc.get('version')!r}")
        spec = ClassifierSpec.from_dict(doc["spec"])
        params = _PARAM_TYPES[spec.kind].from_dict(doc["params"])
        scale = doc.get("feature_scale")
        return cls(spec, params, doc["fingerprint"], int(doc["n_features"]),
                   None if scale is None else np.asarray(scale, dtype=float))


_PARAM_TYPES = {
    ModelKind.KNN: nn.KnnModel, ModelKind.MLP: gm.MlpModel, ModelKind.LOGREG: gm.LogRegModel,
    ModelKind.RF: tr.ForestModel, ModelKind.XGB: tr.BoostModel, ModelKind.MNB: nb.MnbModel,
    ModelKind.GNB: nb.GnbModel, ModelKind.BNB: nb.BnbModel,
    **{k: sv.SvmModel for k in SVM_KINDS},
}


def _unpack(X, y=None):
    if isinstance(X, FeatureMatrix):
        return np.asarray(X.counts, dtype=float), X.labels if y is None else np.asarray(y), X.fingerprint
    if y is None:
        raise ValueError("labels are required when X is a plain array")
    return as_2d(np.asarray(X, dtype=float)), np.asarray(y), ""


def fit(spec: ClassifierSpec, X, y=None) -> TrainedModel:
    """Train ``spec`` on a FeatureMatrix (or an array plus 0/1 labels)."""
    A, y, fingerprint = _unpack(X, y)
    y = y.astype(np.int64)
    if A.shape[0] == 0:
        raise DegenerateTrainingError("cannot train on an empty matrix")
    if len(y) != A.shape[0]:
        raise ValueError(f"{A.shape[0]} rows but {len(y)} labels")
    if not set(np.unique(y)) <= {0, 1}:
        raise ValueError("labels must be 0 (ham) or 1 (spam)")
    if len(np.unique(y)) < 2:
        raise DegenerateTrainingError("training data must contain both ham and spam")
    hp, kind, seed = spec.hyperparameters, spec.kind, spec.seed
    scale = None
    if kind is ModelKind.MNB:
        params = nb.mnb_fit(A, y)
    elif kind is ModelKind.GNB:
        params = nb.gnb_fit(A, y, hp["var_smoothing"])
    elif kind is ModelKind.BNB:
        params = nb.bnb_fit(A, y)
    elif kind is ModelKind.KNN:
        cfg = nn.KnnConfig(hp["k"], nn.Algorithm(hp["algorithm"]), hp["leaf_size"], hp["p"])
        if cfg.k > A.shape[0]:
            raise DegenerateTrainingError(f"k={cfg.k} exceeds the {A.shape[0]} training rows")
        params = nn.KnnModel(A, y, cfg)
    elif kind is ModelKind.LOGREG:
        params = gm.logreg_fit(A, y, hp["l2_strength"], hp["max_iter"], hp["grad_tol"])
    elif kind is ModelKind.MLP:
        params = gm.mlp_fit(A, y, hp["hidden"], hp["max_iter"], hp["l2"], seed, hp["grad_tol"], hp["ftol"])
        params.loss_trace = None
    elif kind is ModelKind.RF:
        params = tr.rf_fit(A, y, hp["n_trees"], hp["min_split"], seed, hp["max_features"], hp["bootstrap"],
                           hp["max_depth"])
    elif kind is ModelKind.XGB:
        params = tr.gbt_fit(A, y, hp["rounds"], hp["eta"], hp["lambda"], hp["gamma"], hp["max_depth"],
                            hp["min_child_weight"])
    else:
        scale = column_scale(A) if hp["scale_features"] else np.ones(A.shape[1])
        S = A / scale
        kernel = _kernel_for(kind, hp, S)
        params = sv.smo_fit(S, np.where(y == 1, 1.0, -1.0), kernel, hp["c"], hp["epoch_cap"], hp["kkt_tol"], seed)
    return TrainedModel(spec, params, fingerprint, A.shape[1], scale)


def _kernel_for(kind, hp, S) -> sv.KernelSpec:
    kk = SVM_KINDS[kind]
    if kk is sv.KernelKind.POLY:
        return sv.KernelSpec(kk, degree=hp["degree"])
    if kk is sv.KernelKind.SIGMOID:
        return sv.KernelSpec(kk, r=float(hp["r"]))
    if kk is sv.KernelKind.RBF:
        return sv.KernelSpec(kk, gamma=rbf_auto_gamma(S) if hp["gamma"] == "auto" else hp["gamma"])
    return sv.KernelSpec(kk)


def rbf_auto_gamma(S) -> float:
    """``1 / (N * var)`` over every entry of the (scaled) training matrix; 1 if constant."""
    S = np.asarray(S, dtype=float)
    var = float(S.var())
    return 1.0 / (S.shape[1] * var) if var > 0 else 1.0


def decision_scores(model: TrainedModel, X) -> np.ndarray:
    """Spam-direction score per row.

    NB: log-posterior odds; SVM: kernel expansion plus bias; kNN: spam
    fraction among neighbours; LR/MLP: spam probability; RF: spam vote
    fraction; boosted trees: raw margin.
    """
    if isinstance(X, FeatureMatrix):
        if model.fingerprint and X.fingerprint != model.fingerprint:
            raise IncompatibleFeaturesError(
                f"feature columns {X.fingerprint[:12]} differ from training columns {model.fingerprint[:12]}")
        A = np.asarray(X.counts, dtype=float)
    else:
        A = as_2d(np.asarray(X, dtype=float))
    if A.shape[1] != model.n_features:
        raise IncompatibleFeaturesError(f"expected {model.n_features} columns, got {A.shape[1]}")
    kind = model.kind
    if kind in (ModelKind.MNB, ModelKind.GNB, ModelKind.BNB):
        return nb.log_odds(model.params, A)
    if kind in SVM_KINDS:
        return model.params.decision(A / model.feature_scale)
    return model.params.decision(A)


def predict(model: TrainedModel, X) -> np.ndarray:
    """0/1 labels; a score exactly at the threshold is ham."""
    return (decision_scores(model, X) > model.kind.threshold).astype(np.int64)
