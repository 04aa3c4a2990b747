"""Default settings used by the experiment pipeline and the CLI."""

RESTARTS = 50
KMEANS_MAX_ITERS = 300
SEED = 0

VORPCA = dict(max_outer_iters=500, max_inner_iters=30, rel_tol=1e-8)
R1PCA = dict(max_iters=500, tol=1e-10)
TRL21 = dict(penalty=1.0, max_iters=5000, primal_tol=1e-6, dual_tol=1e-6)

# Occlusion recipe: 10% of the columns get a 4x5 block.
OCCLUSION = dict(block_rows=4, block_cols=5, fraction=0.1)

TABLE = {
    "restarts": RESTARTS,
    "kmeans_max_iters": KMEANS_MAX_ITERS,
    "seed": SEED,
    "vorpca": VORPCA,
    "r1pca": R1PCA,
    "trl21": TRL21,
    "occlusion": OCCLUSION,
}
