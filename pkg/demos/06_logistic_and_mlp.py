"""
Logistic regression and a multilayer perceptron
===============================================

Both are trained with L-BFGS on the mean cross-entropy. XOR shows what a
hidden layer adds.
"""
import numpy as np

from spamlab.models.gradient_models import logreg_fit, logreg_proba, mlp_fit, mlp_proba

X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]] * 10)
y = np.array([0, 1, 1, 0] * 10)

lr = logreg_fit(X, y, l2_strength=1e-3)
print("logistic regression on XOR:", np.round(logreg_proba(lr, X[:4]), 2))

mlp = mlp_fit(X, y, hidden=[8], l2=1e-4, seed=0)
print("MLP with 8 hidden units   :", np.round(mlp_proba(mlp, X[:4]), 2))

# a linearly separable problem is easy for both
r = np.random.default_rng(0)
Z = r.normal(size=(300, 5))
t = (Z @ np.array([1.0, -2.0, 0.5, 0.0, 0.0]) > 0).astype(int)
print("separable accuracy: LR", np.mean((logreg_proba(logreg_fit(Z, t), Z) > 0.5) == t),
      "MLP", np.mean((mlp_proba(mlp_fit(Z, t, seed=0), Z) > 0.5) == t))
