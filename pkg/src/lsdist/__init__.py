"""Level-set based distances between probability measures, estimated from
finite samples.

The core object is a weighted Jaccard distance over estimated density
level-set bands.  The package also ships baseline statistical distances,
a reproducible permutation-test engine, discrimination-threshold benchmark
protocols, and a shape-comparison pipeline with classical MDS.
"""

__version__ = "0.1.0"

from .baselines import (
    chi2_stat,
    energy_distance,
    hotelling_t2,
    kl_knn,
    ks_stat,
    mmd,
    wilcoxon_stat,
)
from .cloud import LevelGrid, PointCloud, read_csv, write_csv
from .distance import DistanceReport, WeightScheme, distance_matrix, ls_distance
from .errors import DegeneracyWarning, InputFormatError
from .generate import Gamma, Normal, NormalUniformMixture, SyntheticSpec, generate
from .inference import (
    GroupTestReport,
    PermutationReport,
    ThresholdSearchReport,
    group_test,
    permutation_test,
    threshold_search,
)
from .levelsets import LevelBand, LevelSetModel, band_radius, fit_bands, minimum_volume_set
from .rng import RngSpec
from .setops import SetOverlapStats, covering_indicator, hausdorff, overlap
from .shapes import EmbeddingResult, GrayImage, classical_mds, image_to_cloud, read_pgm, write_pgm
from .sparsity import SparsityProfile, default_neighbor_count, knn_query, knn_sparsity

__all__ = [
    "DegeneracyWarning",
    "DistanceReport",
    "EmbeddingResult",
    "Gamma",
    "GrayImage",
    "GroupTestReport",
    "InputFormatError",
    "LevelBand",
    "LevelGrid",
    "LevelSetModel",
    "Normal",
    "NormalUniformMixture",
    "PermutationReport",
    "PointCloud",
    "RngSpec",
    "SetOverlapStats",
    "SparsityProfile",
    "SyntheticSpec",
    "ThresholdSearchReport",
    "WeightScheme",
    "band_radius",
    "chi2_stat",
    "classical_mds",
    "covering_indicator",
    "default_neighbor_count",
    "distance_matrix",
    "energy_distance",
    "fit_bands",
    "generate",
    "group_test",
    "hausdorff",
    "hotelling_t2",
    "image_to_cloud",
    "kl_knn",
    "knn_query",
    "knn_sparsity",
    "ks_stat",
    "ls_distance",
    "minimum_volume_set",
    "mmd",
    "overlap",
    "permutation_test",
    "read_csv",
    "read_pgm",
    "threshold_search",
    "wilcoxon_stat",
    "write_csv",
    "write_pgm",
]
