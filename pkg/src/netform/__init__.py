"""Strategic network formation: utilities, efficient and stable structures, and link-formation dynamics."""

__version__ = "0.1.0"

from .community import ModularityResult, detect_communities, modularity_q
from .dynamics import AgentProfile, EnvironmentConfig, heterogeneity_sweep, run, step
from .efficiency import (
    Regime,
    classify_homogeneous,
    construct_efficient_homogeneous,
    construct_efficient_separable,
    enumerate_efficient,
    verify_efficiency,
)
from .graph import Graph, complete_graph, distances, empty_graph, star_graph
from .model import EPS, BenefitFunction, Homogeneous, Matrix, Separable, StateDependent, node_utility, total_utility
from .scenario import Scenario, emit_report, export_graph, parse_scenario
from .stability import check_pairwise_stable, enumerate_stable, price_of_anarchy
