"""Exact colored local statistics of finite bounded-degree graphs."""

from .canonical import BallCode, CherryType, StarType, ball_type, canonical_form, theta
from .consistency import (
    BallModel,
    StarModel,
    average_degree_audit,
    cherry_injection,
    closed_walk_comparison,
    consistency_defect_set,
    is_cherry_consistent_at,
    is_consistent_at,
    lift_walk,
    reconstruct_ball,
    true_model,
    true_star_model,
)
from .distribution import Distribution, DistributionSet, Universe, hausdorff, tv_distance
from .graph import Coloring, Graph, generate, load_coloring, load_graph
from .search import (
    SearchConfig,
    approx_realize,
    approx_stat_set,
    compare_graphs,
    enumerate_stat_set,
    separated_coloring,
)
from .statistics import chi, sigma, tau_r, theta_pushforward, walk_counts

__version__ = "0.1.0"

__all__ = [
    "BallCode",
    "CherryType",
    "StarType",
    "ball_type",
    "canonical_form",
    "theta",
    "BallModel",
    "StarModel",
    "average_degree_audit",
    "cherry_injection",
    "closed_walk_comparison",
    "consistency_defect_set",
    "is_cherry_consistent_at",
    "is_consistent_at",
    "lift_walk",
    "reconstruct_ball",
    "true_model",
    "true_star_model",
    "Distribution",
    "DistributionSet",
    "Universe",
    "hausdorff",
    "tv_distance",
    "Coloring",
    "Graph",
    "generate",
    "load_coloring",
    "load_graph",
    "SearchConfig",
    "approx_realize",
    "approx_stat_set",
    "compare_graphs",
    "enumerate_stat_set",
    "separated_coloring",
    "chi",
    "sigma",
    "tau_r",
    "theta_pushforward",
    "walk_counts",
]
