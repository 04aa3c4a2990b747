"""
Eight points on a line, two outliers
====================================

Least squares PCA tilts toward the outliers. R1-PCA and VORPCA stay on
the inliers, and VORPCA flags the outliers for moderate tolerances.
"""

import numpy as np

from vorpca import (VorpcaConfig, gen_toy_line, pca_fit, principal_angles, r1pca_fit,
                    vorpca_fit)

ds = gen_toy_line()
X = ds.data
horizontal = np.array([[1.0], [0.0]])


def tilt(U):
    return principal_angles(U, horizontal).max()


print("PCA tilt    %.4f rad" % tilt(pca_fit(X, 1).U))
print("R1-PCA tilt %.4f rad" % tilt(r1pca_fit(X, 1).U))

for delta in (2.0, 1.0, 0.5, 0.2):
    sol = vorpca_fit(X, VorpcaConfig(k=1, delta=delta))
    print("delta %-4g tilt %.4f  flagged %s  rounds %d"
          % (delta, tilt(sol.U), np.flatnonzero(sol.flags).tolist(), sol.iterations))

# very large delta is plain PCA, very small delta is R1-PCA
big = vorpca_fit(X, VorpcaConfig(k=1, delta=1e4))
small = vorpca_fit(X, VorpcaConfig(k=1, delta=1e-6))
print("large delta vs PCA    %.1e rad" % principal_angles(big.U, pca_fit(X, 1).U).max())
print("small delta vs R1-PCA %.1e rad" % principal_angles(small.U, r1pca_fit(X, 1).U).max())
