"""
Kernel SVMs trained by sequential minimal optimisation
======================================================

Fit the four kernels on a ring problem that no line can separate and
compare the number of support vectors and training accuracy.
"""
import numpy as np

from spamlab.models.svm import KernelKind, KernelSpec, dual_objective, gram, smo_fit, svm_predict

r = np.random.default_rng(1)
X = r.normal(size=(200, 2))
y = np.where(np.hypot(X[:, 0], X[:, 1]) > 1.1, 1.0, -1.0)

kernels = {"linear": KernelSpec(KernelKind.LINEAR), "poly": KernelSpec(KernelKind.POLY, degree=2),
           "rbf": KernelSpec(KernelKind.RBF, gamma=1.0), "sigmoid": KernelSpec(KernelKind.SIGMOID, gamma=0.1)}
for name, spec in kernels.items():
    model = smo_fit(X, y, spec, c=1.0, epoch_cap=None)
    acc = np.mean(svm_predict(model, X) == y)
    print(f"{name:8s} support vectors {len(model.alphas):3d}  accuracy {acc:.2f}  converged {model.converged}")

# the dual objective is what SMO maximises; check it on the RBF fit
model = smo_fit(X, y, kernels["rbf"], c=1.0, epoch_cap=None)
alphas = np.zeros(len(y))
alphas[model.support_index] = model.alphas
print("rbf dual objective:", dual_objective(alphas, y, gram(kernels["rbf"], X, X)))
