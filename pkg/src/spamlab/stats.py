"""Paired two-sided t-tests with Bonferroni correction.

The Student t tail is evaluated through the regularized incomplete beta
function::

    p = I_x(df/2, 1/2),   x = df / (df + t^2)

with the beta function's continued fraction evaluated by the modified
Lentz method.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

_TINY = 1e-300


def _betacf(a: float, b: float, x: float, eps: float = 1e-16, max_terms: int = 10000) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > _TINY else _TINY)
    h = d
    for m in range(1, max_terms + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """``I_x(a, b)`` for ``a, b > 0`` and ``0 <= x <= 1``."""
    if a <= 0 or b <= 0:
        raise ValueError("beta parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    # the fraction converges fast below the mean; use the symmetry otherwise
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_sided_p(t: float, df: float) -> float:
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if math.isnan(t):
        raise ValueError("t is NaN")
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return min(1.0, max(0.0, regularized_incomplete_beta(df / 2.0, 0.5, x)))


@dataclass(frozen=True)
class PairedSamples:
    model_a: str
    model_b: str
    scores_a: tuple[float, ...]
    scores_b: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "scores_a", tuple(float(v) for v in self.scores_a))
        object.__setattr__(self, "scores_b", tuple(float(v) for v in self.scores_b))
        if len(self.scores_a) != len(self.scores_b):
            raise ValueError("paired samples must have equal length")
        if len(self.scores_a) < 2:
            raise ValueError("a paired t-test needs at least 2 pairs")


@dataclass(frozen=True)
class TTestResult:
    model_a: str
    model_b: str
    t_statistic: float
    degrees_of_freedom: int
    p_two_sided: float
    p_adjusted: float

    @property
    def significant(self) -> bool:
        return self.p_adjusted < 0.05


def paired_ttest(s: PairedSamples) -> tuple[float, int]:
    """``t = mean(d) / (sd(d) / sqrt(n))`` on the differences ``a - b``.

    Constant nonzero differences give an infinite t; all-zero differences
    give t = 0.
    """
    d = [a - b for a, b in zip(s.scores_a, s.scores_b)]
    n = len(d)
    mean = math.fsum(d) / n
    var = math.fsum((v - mean) ** 2 for v in d) / (n - 1)
    if var == 0.0:
        if mean == 0.0:
            return 0.0, n - 1
        return math.copysign(math.inf, mean), n - 1
    return mean / math.sqrt(var / n), n - 1


def ttest(s: PairedSamples, m: int = 1) -> TTestResult:
    """Paired test with a Bonferroni factor of ``m`` comparisons."""
    if m < 1:
        raise ValueError("number of comparisons must be >= 1")
    t, df = paired_ttest(s)
    p = student_t_two_sided_p(t, df)
    return TTestResult(s.model_a, s.model_b, t, df, p, min(1.0, p * m))


@dataclass(frozen=True)
class SignificanceMatrix:
    models: tuple[str, ...]
    results: tuple[TTestResult, ...]   # one per unordered pair, a before b in ``models`` order

    @property
    def n_comparisons(self) -> int:
        return len(self.results)

    def get(self, a: str, b: str) -> TTestResult:
        """Result for ``(a, b)``; the diagonal is t = 0, p = 1, and swapping negates t."""
        if a == b:
            return TTestResult(a, b, 0.0, 0, 1.0, 1.0)
        for r in self.results:
            if (r.model_a, r.model_b) == (a, b):
                return r
            if (r.model_a, r.model_b) == (b, a):
                return TTestResult(a, b, -r.t_statistic, r.degrees_of_freedom, r.p_two_sided, r.p_adjusted)
        raise KeyError((a, b))

    def matrix(self, field: str = "p_adjusted") -> list[list[float]]:
        return [[getattr(self.get(a, b), field) for b in self.models] for a in self.models]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["pair", "model_a", "model_b", "t", "df", "p_raw", "p_adjusted", "significant"])
        for r in self.results:
            w.writerow([f"{r.model_a} vs {r.model_b}", r.model_a, r.model_b, repr(r.t_statistic),
                        r.degrees_of_freedom, repr(r.p_two_sided), repr(r.p_adjusted), str(r.significant).lower()])
        return buf.getvalue()


def compare_all(fscores: Mapping[str, Sequence[float]]) -> SignificanceMatrix:
    """Test every pair of models; Bonferroni ``m`` is the number of pairs."""
    models = tuple(fscores)
    if len(models) < 2:
        raise ValueError("need at least two models to compare")
    pairs = list(itertools.combinations(models, 2))
    m = len(pairs)
    results = tuple(ttest(PairedSamples(a, b, fscores[a], fscores[b]), m) for a, b in pairs)
    return SignificanceMatrix(models, results)
