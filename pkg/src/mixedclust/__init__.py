"""Significance-driven clustering of mixed categorical and continuous data.

Clusters are pulled out one at a time: every remaining row is scored by how
strongly its Hamming and Euclidean distance profiles depart from a
structureless reference, and the best row seeds a cluster if its score beats
a Monte-Carlo critical value.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .bench import (LabeledDataset, SynthConfig, classification_rate, gen_mixed,
                    information_gain)
from .cluster import Cluster, ClusterResult, run_clustering
from .config import ClusterConfig
from .dataset import (CategoricalAttr, DataError, MixedDataset, Schema, SchemaError,
                      load_dataset, parse_schema, read_dataset, read_schema, serialize,
                      validate)
from .distance import distance_profile, euclidean, hamming
from .nullmodel import sample_null, uhd_vector
from .stat import (calibrate_threshold, chisq_categorical, chisq_continuous,
                   chisq_weighted, cutoff_categorical, cutoff_continuous)

__all__ = [
    "BACKEND", "CategoricalAttr", "Cluster", "ClusterConfig", "ClusterResult", "DataError",
    "LabeledDataset", "MixedDataset", "Schema", "SchemaError", "SynthConfig",
    "calibrate_threshold", "chisq_categorical", "chisq_continuous", "chisq_weighted",
    "classification_rate", "cutoff_categorical", "cutoff_continuous", "distance_profile",
    "euclidean", "gen_mixed", "hamming", "information_gain", "load_dataset", "parse_schema",
    "read_dataset", "read_schema", "run_clustering", "sample_null", "serialize",
    "uhd_vector", "validate",
]
