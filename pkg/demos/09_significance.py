"""
Paired t-tests with a Bonferroni correction
===========================================

Every pair of models is compared on per-fold scores; the p-values are
multiplied by the number of pairs before the 0.05 cut.
"""
import numpy as np

from spamlab.stats import PairedSamples, compare_all, student_t_two_sided_p, ttest

print("p(|T| > 2.086 | 20 df) =", round(student_t_two_sided_p(2.086, 20), 4))

a = [0.91, 0.93, 0.90, 0.95, 0.92, 0.94]
b = [0.89, 0.90, 0.91, 0.92, 0.90, 0.91]
res = ttest(PairedSamples("A", "B", a, b))
print(f"A vs B: t={res.t_statistic:.3f}, p={res.p_two_sided:.4f}")

r = np.random.default_rng(0)
scores = {"strong": r.normal(0.95, 0.005, 20), "middle": r.normal(0.93, 0.005, 20),
          "twin": r.normal(0.93, 0.005, 20), "weak": r.normal(0.85, 0.01, 20)}
sig = compare_all({k: v.tolist() for k, v in scores.items()})
print(sig.n_comparisons, "comparisons")
for res in sig.results:
    print(f"  {res.model_a:7s} vs {res.model_b:7s} adjusted p {res.p_adjusted:.2e}  significant {res.significant}")
