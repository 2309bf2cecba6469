"""Parameter-free K-dimensional data-grid coclustering.

The package estimates the joint distribution of mixed-type variables by MAP
selection over grid models (simultaneous partitions of every variable), then
offers exploitation tools: agglomerative simplification with an information
ratio, typicality rankings, and mutual-information matrices.
"""

from .dataset import (CATEGORICAL, MISSING_CATEGORY, NUMERICAL, Dataset,
                      Schema, Variable, from_rows, load_table, value_counts,
                      write_table)
from .grid import (GridModel, Interval, ValueGroup, VariablePartition,
                   initial_model, merge_parts, model_from_assignments,
                   move_boundary, move_value, null_model)
from .cost import (CostBreakdown, cost, delta_boundary, delta_merge,
                   delta_move, log_B, log_binomial, log_factorial)
from .optimizer import (OptimizationReport, OptimizerConfig,
                        greedy_merge_optimize, post_optimize, vns_optimize)
from .hierarchy import (MergeHierarchy, MergeRecord, build_hierarchy,
                        information_ratio, model_at, pareto_curve)
from .insights import (InsightMatrix, TypicalityRanking, cmi_matrix,
                       contrast_matrix, frequency_matrix, typicality)
from .synthetic import (GroundTruth, PlantSpec, PlantVariable,
                        adjusted_rand_index, generate, planted_model)

__version__ = "0.1.0"

__all__ = [
    "CATEGORICAL", "NUMERICAL", "MISSING_CATEGORY",
    "Schema", "Variable", "Dataset", "load_table", "from_rows",
    "write_table", "value_counts",
    "GridModel", "Interval", "ValueGroup", "VariablePartition",
    "null_model", "initial_model", "model_from_assignments",
    "merge_parts", "move_value", "move_boundary",
    "CostBreakdown", "cost", "delta_merge", "delta_move", "delta_boundary",
    "log_factorial", "log_binomial", "log_B",
    "OptimizerConfig", "OptimizationReport",
    "greedy_merge_optimize", "post_optimize", "vns_optimize",
    "MergeRecord", "MergeHierarchy", "build_hierarchy",
    "information_ratio", "model_at", "pareto_curve",
    "TypicalityRanking", "InsightMatrix", "typicality",
    "cmi_matrix", "contrast_matrix", "frequency_matrix",
    "PlantSpec", "PlantVariable", "GroundTruth", "generate",
    "planted_model", "adjusted_rand_index",
]
