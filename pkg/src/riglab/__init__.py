"""riglab: a simulation laboratory for random intersection graphs.

Individuals join communities independently with probability p; two
individuals are adjacent in the intersection graph when they share a
community. The package samples the underlying bipartite graph at and around
the critical probability 1/sqrt(n*m), runs the two-step exploration whose
walk encodes component structure, applies the window scaling laws, and
drives replica experiments comparing the result against a matched
Erdos-Renyi reference.
"""

from .components import (ComponentList, ComponentRecord, UnionFind,
                         component_csv, components_bipartite, components_rig,
                         components_simple, largest_k)
from .exploration import (DoobDecomposition, ExcursionRecord,
                          ExplorationTrace, conditional_moments,
                          doob_decomposition, excursion_csv, excursions,
                          explore, trace_csv)
from .experiments import (BatchResult, ComparisonReport, ConfigError,
                          ExperimentConfig, RankComparison, compare_to_errg,
                          emit_figures, exponent_study, ks_two_sample,
                          parse_config_file, phase_sweep, replica_seed,
                          run_batch)
from .graphs import (BipartiteGraph, CommunityStats, Params,
                     ResourceCapError, SimpleGraph, community_size_stats,
                     critical_p, errg_match, intersection_graph, resolve_p,
                     sample_bipartite, sample_errg, window_p)
from .scaling import (DiagnosticSummary, ExponentFit, RescaledSeries,
                      ScalingLaw, drift_diagnostic, edge_concentration,
                      exponent_fit, exponent_table_csv, opposite_concentration,
                      pow23, reflect, rescale_walk, rescaled_components,
                      series_csv, time_index, variance_diagnostic)

__version__ = "0.1.0"

__all__ = [
    "BatchResult", "BipartiteGraph", "CommunityStats", "ComparisonReport",
    "ComponentList", "ComponentRecord", "ConfigError", "DiagnosticSummary",
    "DoobDecomposition", "ExcursionRecord", "ExperimentConfig",
    "ExplorationTrace", "ExponentFit", "Params", "RankComparison",
    "RescaledSeries", "ResourceCapError", "ScalingLaw", "SimpleGraph",
    "UnionFind", "community_size_stats", "compare_to_errg",
    "component_csv", "components_bipartite", "components_rig",
    "components_simple", "conditional_moments", "critical_p",
    "doob_decomposition", "drift_diagnostic", "edge_concentration",
    "emit_figures", "errg_match", "excursion_csv", "excursions", "explore",
    "exponent_fit", "exponent_study", "exponent_table_csv",
    "intersection_graph", "ks_two_sample", "largest_k",
    "opposite_concentration", "parse_config_file", "phase_sweep", "pow23",
    "reflect", "replica_seed", "rescale_walk", "rescaled_components",
    "resolve_p", "run_batch", "sample_bipartite", "sample_errg",
    "series_csv", "time_index", "trace_csv", "variance_diagnostic",
    "window_p", "__version__",
]
