"""Vector outlier regularization, VORPCA and robust PCA baselines."""

__version__ = "0.1.0"

from ._errors import FormatError, MonotonicityError, ParameterError
from .linalg import (FactorPair, frobenius_norm, l21_norm, principal_angles,
                     singular_spectrum, solve_gram, thin_svd)
from .vor import (prox_l2, vor_regularize, vor_regularize_point,
                  vor_variational_solve)
from .solver import (VorpcaConfig, VorpcaSolution, suggest_delta, vorpca_fit,
                     vorpca_limit_pca, vorpca_objective)
from .baselines import (Trl21Config, e2_objective, e21_objective, pca_fit,
                        r1pca_fit, svt_shrink, trl21pca_fit)
from .datasets import (LabeledDataset, OcclusionSpec, ToyLineSpec, gen_lowrank_blobs,
                       gen_toy_line, inject_occlusion)
from .evaluation import (clustering_accuracy, kmeans, noise_free_residual,
                         run_comparison, spectrum_report)
from .io import read_labels, read_matrix, write_labels, write_matrix
