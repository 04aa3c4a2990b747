"""
The outlier regularization map
==============================

Points inside a ball of radius delta around their prediction are kept,
points outside are pulled back onto the sphere. The same map is the
solution of a small convex problem, solved here column by column.
"""

import numpy as np

from vorpca import prox_l2, vor_regularize, vor_variational_solve

F = np.zeros((2, 4))
X = np.array([[0.5, 3.0, 30.0, -1.0],
              [0.5, 4.0, 40.0, 0.0]])
delta = 2.0

Xt, flags = vor_regularize(X, F, delta)
print("regularized columns\n", Xt)
print("flagged as outliers", flags)

# a point 10x farther along the same ray lands on the same spot
print("columns 1 and 2 agree:", np.allclose(Xt[:, 1], Xt[:, 2]))

# variational form: Z = X + prox(F - X)
Z = vor_variational_solve(X, F, delta)
print("variational form matches:", np.allclose(Z, Xt, rtol=0, atol=1e-12))

# the prox itself: shrink the norm by delta, or to zero
a = np.array([6.0, 8.0])
for d in (1.0, 5.0, 10.0, 20.0):
    print(d, prox_l2(a, d))
