"""Acceptance criteria 1-10, one PASS/FAIL/SKIP line each.

Criteria 1-5 and 10 need the public Enron corpus; point ENRON_CORPUS_DIR at
the directory holding enron1..enron6 to run them. Everything else runs on
synthetic data or the bundled toy corpus. Tolerances below are the published
ones and must not be edited to make a run pass.
"""
import os
import time

import numpy as np
import pytest

from conftest import enron_root, record_criterion
from oracles import (bnb_exact_log_posterior, mann_whitney_auc, mnb_exact_log_posterior, shapley_bruteforce,
                     svm_dual_optimum, t_two_sided_quadrature)
from spamlab.evaluation import Confusion, fscore, precision, recall, roc_curve
from spamlab.explain import make_background, shapley_exact, shapley_sample
from spamlab.models.core import ClassifierSpec, TrainedModel, default_specs, fit
from spamlab.models.gradient_models import logreg_objective, mlp_objective, n_params
from spamlab.models.naive_bayes import bnb_fit, log_posterior, mnb_fit
from spamlab.models.neighbors import Algorithm, KnnConfig, build_index, knn_query
from spamlab.models.svm import KernelKind, KernelSpec, dual_objective, gram, smo_fit
from spamlab.numopt import SmoothProblem, finite_diff_gradient, lbfgs_minimize
from spamlab.pipeline import RunConfig, ablate_features, ablate_preprocessing, compare_repeats, run_pipeline
from spamlab.stats import student_t_two_sided_p

# -- pinned tolerances ---------------------------------------------------------------

TABLE3_FSCORE = {"Random Forest": 0.94, "XGBoost": 0.94, "MPNN": 0.92, "Bernoulli NB": 0.91,
                 "Logistic Regression": 0.89, "Linear SVM": 0.89}
FSCORE_BAND = 0.05
RUNTIME_LIMIT_S = 30 * 60
XGB_AUC_FLOOR = 0.95
AUC_SLACK = 0.01
NB_ORDER_SLACK = 0.02
FLATNESS_BAND = 0.03
TOP6 = ("rf", "xgb", "mlp", "bnb", "logreg", "svm_linear")
SIG_P = 1e-4
N_PAIRS_12 = 66
ORACLE_BUDGET_S = 120.0
KNN_INSTANCES = 50
SMO_TOL, SMO_MAX_POINTS = 1e-3, 8
NB_TOL, NB_MAX_DOCS = 1e-10, 6
SHAP_TOL, SHAP_PERMUTATIONS, SHAP_MAX_FEATURES = 0.01, 2000, 10
AUC_MW_TOL, AUC_SETS = 1e-12, 100
T_QUAD_TOL, T_REF, DF_REF, P_REF, P_REF_TOL = 1e-6, 2.086, 20, 0.050, 0.001
GRAD_REL_TOL, GRAD_POINTS = 1e-5, 10
LBFGS_GTOL, LBFGS_MAX_DIM, LBFGS_MAX_ITER = 1e-6, 20, 50
RBF_MIN_EIG = -1e-8
HARMONIC_TRIALS, RANDOM_AUC_N, RANDOM_AUC_BAND = 1000, 1000, 0.05
PLEASE_TOP = 10

ENRON_MISSING = "ENRON_CORPUS_DIR not set; the Enron corpus is not bundled"


def verdict(number, ok, detail):
    record_criterion(number, "PASS" if ok else "FAIL", detail)
    assert ok, detail


def skip(number, detail=ENRON_MISSING):
    record_criterion(number, "SKIP", detail)
    pytest.skip(detail)


def threads():
    return int(os.environ.get("SPAMLAB_THREADS", "1"))


# -- Enron fixtures (built lazily, shared across criteria) ------------------------------

@pytest.fixture(scope="module")
def enron_run(tmp_path_factory):
    root = enron_root()
    if root is None:
        return None
    cfg = RunConfig(corpus_root=root, output_dir=str(tmp_path_factory.mktemp("enron_run")), seed=0,
                    threads=threads())
    t0 = time.perf_counter()
    bundle = run_pipeline(cfg)
    return bundle, time.perf_counter() - t0


def _fs(bundle):
    return {name: rep.mean("fscore") for name, rep in bundle.reports.items()}


def _auc(bundle):
    return {name: rep.mean("auc") for name, rep in bundle.reports.items()}


# -- 1-5, 10: Enron ---------------------------------------------------------------------

def test_criterion_1_enron_fscores(enron_run):
    if enron_run is None:
        skip("1")
    bundle, seconds = enron_run
    assert bundle.ok, f"pipeline failed in {bundle.failed_stage}"
    f = _fs(bundle)
    misses = [f"{m} {100 * f[m]:.1f} vs {100 * t:.0f}" for m, t in TABLE3_FSCORE.items()
              if abs(f[m] - t) > FSCORE_BAND]
    ranked = sorted(f, key=lambda m: -f[m])
    top_two = set(ranked[:2]) == {"Random Forest", "XGBoost"}
    svm_below = all(f[m] < f["Linear SVM"] for m in ("Poly SVM", "Sigmoid SVM", "RBF SVM"))
    fast = seconds <= RUNTIME_LIMIT_S
    detail = (", ".join(f"{m}={100 * f[m]:.1f}" for m in TABLE3_FSCORE)
              + f"; top two {ranked[:2]}; other SVMs below linear: {svm_below}; runtime {seconds / 60:.1f} min"
              + (f"; outside +-5pp: {misses}" if misses else ""))
    verdict("1", not misses and top_two and svm_below and fast, detail)


def test_criterion_2_auc_ordering(enron_run):
    if enron_run is None:
        skip("2")
    auc = _auc(enron_run[0])
    xgb = auc["XGBoost"]
    beats = all(xgb >= v - AUC_SLACK for m, v in auc.items() if m != "XGBoost")
    nb = (auc["Bernoulli NB"] > auc["Multinomial NB"] - NB_ORDER_SLACK
          and auc["Multinomial NB"] > auc["Gaussian NB"] - NB_ORDER_SLACK)
    detail = (f"XGBoost AUC {xgb:.4f} (floor {XGB_AUC_FLOOR}), best other {max(v for m, v in auc.items() if m != 'XGBoost'):.4f}; "
              f"BNB {auc['Bernoulli NB']:.4f} MNB {auc['Multinomial NB']:.4f} GNB {auc['Gaussian NB']:.4f}")
    verdict("2", xgb >= XGB_AUC_FLOOR and beats and nb, detail)


def test_criterion_3_feature_size_flatness(tmp_path):
    root = enron_root()
    if root is None:
        skip("3")
    cfg = RunConfig(corpus_root=root, output_dir=str(tmp_path), seed=0, timing=False, threads=threads())
    rows = ablate_features(cfg)
    means = [r["mean_fscore"] for r in rows]
    spread = max(means) - min(means)
    detail = ", ".join(f"{r['dict_size']}:{100 * r['mean_fscore']:.1f}" for r in rows) + f"; spread {100 * spread:.2f}pp"
    verdict("3", spread <= FLATNESS_BAND, detail)


def test_criterion_4_preprocessing_ablation(tmp_path):
    root = enron_root()
    if root is None:
        skip("4")
    cfg = RunConfig(corpus_root=root, output_dir=str(tmp_path), seed=0, timing=False, threads=threads(),
                    models=[{"kind": k} for k in TOP6])
    rows = ablate_preprocessing(cfg)
    ok = all(r["fscore_on"] >= r["fscore_off"] for r in rows)
    detail = ", ".join(f"{r['model']} on {100 * r['fscore_on']:.1f} off {100 * r['fscore_off']:.1f} ratio {r['ratio']:.2f}"
                       for r in rows)
    verdict("4", ok, detail)


def test_criterion_5_significance_structure(toy_root, tmp_path):
    # the pair count is structural and is checked on the toy corpus either way
    cfg = RunConfig(corpus_root=str(toy_root), output_dir=str(tmp_path / "toy"), seed=0, repeats=20)
    _, toy_matrix = compare_repeats(cfg)
    pairs_ok = toy_matrix.n_comparisons == N_PAIRS_12
    root = enron_root()
    if root is None:
        if not pairs_ok:
            verdict("5", False, f"toy compare produced {toy_matrix.n_comparisons} pairs")
        skip("5", f"{toy_matrix.n_comparisons} pairs over 12 models x 20 repeats verified on the toy corpus; "
                  f"Enron significance structure needs ENRON_CORPUS_DIR")
    cfg = RunConfig(corpus_root=root, output_dir=str(tmp_path / "enron"), seed=0, repeats=20, threads=threads())
    _, sig = compare_repeats(cfg)
    rf_xgb = sig.get("Random Forest", "XGBoost")
    mlp_rf = sig.get("MPNN", "Random Forest")
    mlp_xgb = sig.get("MPNN", "XGBoost")
    ok = (sig.n_comparisons == N_PAIRS_12 and not rf_xgb.significant
          and mlp_rf.p_adjusted < SIG_P and mlp_xgb.p_adjusted < SIG_P)
    detail = (f"{sig.n_comparisons} pairs; RF vs XGB p_adj {rf_xgb.p_adjusted:.3g}; "
              f"MPNN vs RF p_adj {mlp_rf.p_adjusted:.3g}; MPNN vs XGB p_adj {mlp_xgb.p_adjusted:.3g}")
    verdict("5", ok, detail)


def test_criterion_10_please_in_rankings(enron_run):
    if enron_run is None:
        skip("10")
    rankings = enron_run[0].rankings
    ranks = {}
    for model in ("Random Forest", "XGBoost", "MPNN"):
        words = [r.feature for r in rankings[model]][:PLEASE_TOP]
        ranks[model] = words.index("please") + 1 if "please" in words else None
    ok = all(r is not None for r in ranks.values())
    top3 = all(r is not None and r <= 3 for r in ranks.values())
    verdict("10", ok, f"rank of 'please': {ranks}; top-3 in all three: {top3}")


# -- 6: oracle equivalence suite ----------------------------------------------------------

def _check_6a():
    r = np.random.default_rng(61)
    worst = 0
    for inst in range(KNN_INSTANCES):
        n, d = int(r.integers(20, 200)), int(r.integers(1, 6))
        X = r.integers(0, 4, size=(n, d)).astype(float) if inst % 2 else r.normal(size=(n, d))
        p = (1.0, 2.0)[inst % 2]
        k = int(r.integers(1, min(n, 12)))
        brute = build_index(X, cfg=KnnConfig(k, Algorithm.BRUTE, 1, p))
        trees = [build_index(X, cfg=KnnConfig(k, a, int(r.integers(1, 12)), p))
                 for a in (Algorithm.BALL_TREE, Algorithm.KD_TREE)]
        for q in np.vstack([X[:2], r.normal(size=(3, d))]):
            want = knn_query(brute, q, k)
            worst += sum(knn_query(t, q, k) != want for t in trees)
    return worst == 0, f"{worst} mismatching queries"


def _check_6b():
    r = np.random.default_rng(62)
    worst = 0.0
    kernels = [KernelSpec(KernelKind.LINEAR), KernelSpec(KernelKind.POLY, degree=2), KernelSpec(KernelKind.RBF, gamma=0.5)]
    for trial in range(30):
        n = int(r.integers(3, SMO_MAX_POINTS + 1))
        X = r.normal(size=(n, 2))
        y = np.where(r.random(n) < 0.5, -1.0, 1.0)
        y[0], y[1] = -1.0, 1.0
        spec, c = kernels[trial % 3], [0.5, 1.0, 10.0][trial % 3]
        m = smo_fit(X, y, spec, c=c, epoch_cap=None, kkt_tol=1e-6)
        a = np.zeros(n)
        a[m.support_index] = m.alphas
        K = gram(spec, X, X)
        worst = max(worst, abs(dual_objective(a, y, K) - svm_dual_optimum(K, y, c)[0]))
    return worst <= SMO_TOL, f"max dual gap {worst:.2e}"


def _check_6c():
    r = np.random.default_rng(63)
    worst = 0.0
    for _ in range(200):
        docs, words = int(r.integers(2, NB_MAX_DOCS + 1)), int(r.integers(2, 6))
        X = r.integers(0, 4, size=(docs, words))
        y = np.arange(docs) % 2
        x = r.integers(0, 4, size=words)
        got_m = log_posterior(mnb_fit(X, y), [x])[0]
        got_b = log_posterior(bnb_fit(X, y), [x])[0]
        worst = max(worst, np.abs(got_m - mnb_exact_log_posterior(X, y, x)).max(),
                    np.abs(got_b - bnb_exact_log_posterior(X, y, x)).max())
    return worst <= NB_TOL, f"max log-posterior error {worst:.1e}"


def _check_6d():
    r = np.random.default_rng(0)
    X = r.poisson(1.0, size=(200, 8)).astype(float)
    y = (X[:, 0] + 2 * X[:, 1] - X[:, 2] + r.normal(size=200) > 1.5).astype(int)
    bg = make_background(X, 20, seed=1)
    worst, per = 0.0, {}
    for kind in ("logreg", "rf", "bnb", "mlp", "knn"):
        m = fit(ClassifierSpec(kind, seed=0), X, y)
        err = np.abs(shapley_exact(m, X[17], bg).values
                     - shapley_sample(m, X[17], bg, SHAP_PERMUTATIONS, seed=5).values).max()
        per[kind] = err
        worst = max(worst, err)
    # three-way interactions; antithetic sampling is exact on purely pairwise games
    f = lambda Z: (np.tanh(Z[:, 0] * Z[:, 1] * Z[:, 5]) + 0.5 * Z[:, 2] ** 2
                   - np.maximum.reduce([Z[:, 3], Z[:, 4], Z[:, 6]]) + np.sin(Z[:, 7] + Z[:, 8] * Z[:, 9]))
    bgz, xz = r.normal(size=(10, SHAP_MAX_FEATURES)), r.normal(size=SHAP_MAX_FEATURES)
    phi, _, _ = shapley_bruteforce(f, xz, bgz)
    per["synthetic10"] = np.abs(phi - shapley_sample(f, xz, bgz, SHAP_PERMUTATIONS, seed=1).values).max()
    worst = max(worst, per["synthetic10"])
    # raw boosting margins are on a log-odds scale; reported, see the decisions ledger
    xgb = fit(ClassifierSpec("xgb", seed=0), X, y)
    xgb_err = np.abs(shapley_exact(xgb, X[17], bg).values
                     - shapley_sample(xgb, X[17], bg, SHAP_PERMUTATIONS, seed=5).values).max()
    detail = "max |sampled-exact| " + ", ".join(f"{k} {v:.4f}" for k, v in per.items()) + \
             f"; xgb raw margin {xgb_err:.4f} (reported only)"
    return worst <= SHAP_TOL, detail


def _check_6e():
    r = np.random.default_rng(65)
    worst = 0.0
    for trial in range(AUC_SETS):
        n = int(r.integers(2, 300))
        y = r.integers(0, 2, size=n)
        y[0], y[1] = 0, 1
        s = r.integers(0, 6, size=n).astype(float) if trial % 2 else r.normal(size=n)
        worst = max(worst, abs(roc_curve(s, y).auc - mann_whitney_auc(s, y)))
    return worst <= AUC_MW_TOL, f"max |AUC - U/(PN)| {worst:.1e}"


def _check_6f():
    r = np.random.default_rng(66)
    worst = 0.0
    for _ in range(200):
        df, t = int(r.integers(1, 60)), float(r.uniform(-6, 6))
        worst = max(worst, abs(student_t_two_sided_p(t, df) - t_two_sided_quadrature(t, df)))
    p = student_t_two_sided_p(T_REF, DF_REF)
    return worst <= T_QUAD_TOL and abs(p - P_REF) <= P_REF_TOL, f"max |p - quadrature| {worst:.1e}; p(2.086, 20) = {p:.5f}"


def test_criterion_6_oracle_suite():
    t0 = time.perf_counter()
    parts = {}
    for name, check in (("a", _check_6a), ("b", _check_6b), ("c", _check_6c), ("d", _check_6d),
                        ("e", _check_6e), ("f", _check_6f)):
        s = time.perf_counter()
        ok, detail = check()
        parts[name] = ok
        record_criterion(f"6{name}", "PASS" if ok else "FAIL", f"{detail} ({time.perf_counter() - s:.1f} s)")
    total = time.perf_counter() - t0
    verdict("6", all(parts.values()) and total < ORACLE_BUDGET_S,
            f"parts {''.join(k for k, v in parts.items() if v)} pass; total {total:.1f} s (budget {ORACLE_BUDGET_S:.0f} s)")


# -- 7: numerical health -------------------------------------------------------------------

def _rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)


def test_criterion_7_numerical_health():
    r = np.random.default_rng(7)
    X = r.normal(size=(40, 6))
    y = (r.random(40) < 0.5).astype(float)
    lr_err = max(_rel(logreg_objective(th, X, y, 0.5)[1],
                      finite_diff_gradient(lambda t: logreg_objective(t, X, y, 0.5)[0], th, h=1e-6))
                 for th in r.normal(size=(GRAD_POINTS, 7)))
    sizes = [6, 5, 1]
    mlp_err = max(_rel(mlp_objective(th, X, y, sizes, 0.1)[1],
                       finite_diff_gradient(lambda t: mlp_objective(t, X, y, sizes, 0.1)[0], th, h=1e-6))
                  for th in r.normal(size=(GRAD_POINTS, n_params(sizes))))

    worst_iter, worst_gnorm, default_iter = 0, 0.0, 0
    for dim in range(2, LBFGS_MAX_DIM + 1, 3):
        for s in range(5):
            g = np.random.default_rng(1000 * dim + s)
            M = g.normal(size=(dim, dim))
            A, b = M @ M.T + 0.5 * np.eye(dim), g.normal(size=dim)
            prob = SmoothProblem.from_value_and_grad(lambda x: (0.5 * x @ A @ x - b @ x, A @ x - b), dim)
            res = lbfgs_minimize(prob, np.zeros(dim), memory=dim, c2=0.1, max_iter=LBFGS_MAX_ITER,
                                 grad_tol=LBFGS_GTOL)
            worst_iter, worst_gnorm = max(worst_iter, res.iterations), max(worst_gnorm, res.gradient_norm)
            if dim == 20:
                dres = lbfgs_minimize(prob, np.zeros(dim), max_iter=500, grad_tol=LBFGS_GTOL)
                default_iter = max(default_iter, dres.iterations)
    min_eig = np.inf
    for _ in range(20):
        Z = r.normal(size=(int(r.integers(5, 80)), 5))
        Z[1] = Z[0] + 1e-9   # near-duplicate rows push the Gram matrix towards singular
        K = gram(KernelSpec(KernelKind.RBF, gamma=float(r.uniform(0.01, 5))), Z, Z)
        min_eig = min(min_eig, np.linalg.eigvalsh(K).min())
    ok = (lr_err < GRAD_REL_TOL and mlp_err < GRAD_REL_TOL and worst_gnorm < LBFGS_GTOL
          and worst_iter <= LBFGS_MAX_ITER and min_eig >= RBF_MIN_EIG)
    verdict("7", ok, f"LR grad rel err {lr_err:.1e}, MLP {mlp_err:.1e}; L-BFGS (m=dim, c2=0.1) worst "
                     f"{worst_iter} iters, |g| {worst_gnorm:.1e}; default constants dim 20: {default_iter} iters; "
                     f"RBF min eig {min_eig:.1e}")


# -- 8: metric identities ----------------------------------------------------------------------

def test_criterion_8_metric_identities():
    r = np.random.default_rng(8)
    worst = 0.0
    for _ in range(HARMONIC_TRIALS):
        c = Confusion(*map(int, r.integers(1, 100, size=4)))
        p, q = precision(c), recall(c)
        worst = max(worst, abs(fscore(c) - 2 * p * q / (p + q)))
    curve = roc_curve(r.normal(size=200), r.integers(0, 2, size=200))
    ends = (curve.fpr[0], curve.tpr[0], curve.fpr[-1], curve.tpr[-1]) == (0.0, 0.0, 1.0, 1.0)
    rr = np.random.default_rng(2024)
    auc = roc_curve(rr.random(RANDOM_AUC_N), rr.integers(0, 2, size=RANDOM_AUC_N)).auc
    ok = worst < 1e-12 and ends and abs(auc - 0.5) <= RANDOM_AUC_BAND
    verdict("8", ok, f"max |F - harmonic mean(P, R)| {worst:.1e}; endpoints exact: {ends}; random AUC {auc:.4f}")


# -- 9: determinism ------------------------------------------------------------------------------

def test_criterion_9_determinism(toy_root, toy_matrix, tmp_path):
    runs = []
    for i in range(2):
        cfg = RunConfig(corpus_root=str(toy_root), output_dir=str(tmp_path / f"r{i}"), seed=0)
        runs.append(run_pipeline(cfg))
    same_metrics = (tmp_path / "r0" / "metrics.csv").read_bytes() == (tmp_path / "r1" / "metrics.csv").read_bytes()
    same_manifest = runs[0].manifest == runs[1].manifest
    diffs = [s.kind.value for s in default_specs(0) if fit(s, toy_matrix).to_json() != fit(s, toy_matrix).to_json()]
    round_trip = all(TrainedModel.from_json(fit(s, toy_matrix).to_json()).to_json() == fit(s, toy_matrix).to_json()
                     for s in default_specs(0))
    ok = same_metrics and same_manifest and not diffs and round_trip
    verdict("9", ok, f"metrics.csv identical: {same_metrics}; manifests identical: {same_manifest}; "
                     f"model JSON identical for {12 - len(diffs)}/12 kinds; JSON round trip: {round_trip}")
