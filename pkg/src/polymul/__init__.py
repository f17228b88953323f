"""Sparse multivariate polynomial arithmetic with lock-free parallel
multiplication, a simulated-cluster variant, and an HTTP service front end."""

from .core import (
    ExponentOverflowError,
    Layout,
    Polynomial,
    SENTINEL,
    VarTable,
    canonicalize,
    check_product_fits,
    default_layout,
    naive_mul,
)
from .io import (
    ExprSyntaxError,
    PolyIOError,
    eval_expr,
    format_poly,
    parse_expr,
    parse_poly,
    poly_from_expr,
    read_poly,
    write_poly,
)
from .split import Edge, GridParams, SplitSet, count_ops, find_edge, select_grid
from .merge import RadixTree, concat, heap_merge, tree_merge
from .parmul import MulConfig, TuneReport, mul, random_sparse, tune_l
from .cluster import (
    ClusterError,
    ClusterPlan,
    ClusterResult,
    LocalTransport,
    TransportError,
    TransportStats,
    cluster_mul,
    cluster_run,
    partition_by_ops,
)

__version__ = "0.1.0"

__all__ = [
    "ExponentOverflowError", "Layout", "Polynomial", "SENTINEL", "VarTable",
    "canonicalize", "check_product_fits", "default_layout", "naive_mul",
    "ExprSyntaxError", "PolyIOError", "eval_expr", "format_poly", "parse_expr",
    "parse_poly", "poly_from_expr", "read_poly", "write_poly",
    "Edge", "GridParams", "SplitSet", "count_ops", "find_edge", "select_grid",
    "RadixTree", "concat", "heap_merge", "tree_merge",
    "MulConfig", "TuneReport", "mul", "random_sparse", "tune_l",
    "ClusterError", "ClusterPlan", "ClusterResult", "LocalTransport",
    "TransportError", "TransportStats", "cluster_mul", "cluster_run",
    "partition_by_ops",
    "__version__",
]
