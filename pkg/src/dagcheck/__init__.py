"""dagcheck: causal diagrams for engineering analyses.

Parse DAGs from a small text format, classify paths and variable roles,
decide d-separation and backdoor adjustment, and check the graphical claims
numerically with a linear-Gaussian structural model and regression diagnostics.
"""

from .dataset import Dataset
from .diagnostics import DiagnosticsReport, check_assumptions, shear_dataset, shear_strength, vif
from .dsl import DagDocument, parse, serialize, to_dot
from .errors import DagError
from .estimate import RegressionFit, iv_estimate, ols, population_ols
from .graph import Dag, Moderation, Node, build_dag
from .identify import (
    AdjustmentResult,
    RoleReport,
    backdoor_paths,
    check_instrument,
    classify_roles,
    find_adjustment_sets,
)
from .paths import CausalQuery, Path, Traversal, classify_path, d_separated, enumerate_paths, is_blocked
from .scm import (
    CovMatrix,
    Scm,
    implied_covariance,
    partial_correlation,
    path_tracing_covariance,
    simulate,
    total_effect,
)

__version__ = "0.1.0"

__all__ = [
    "AdjustmentResult",
    "CausalQuery",
    "CovMatrix",
    "Dag",
    "DagDocument",
    "DagError",
    "Dataset",
    "DiagnosticsReport",
    "Moderation",
    "Node",
    "Path",
    "RegressionFit",
    "RoleReport",
    "Scm",
    "Traversal",
    "backdoor_paths",
    "build_dag",
    "check_assumptions",
    "check_instrument",
    "classify_path",
    "classify_roles",
    "d_separated",
    "enumerate_paths",
    "find_adjustment_sets",
    "implied_covariance",
    "is_blocked",
    "iv_estimate",
    "ols",
    "parse",
    "partial_correlation",
    "path_tracing_covariance",
    "population_ols",
    "serialize",
    "shear_dataset",
    "shear_strength",
    "simulate",
    "to_dot",
    "total_effect",
    "vif",
]
