"""Experiment harness: configs, seeded replica batches, model comparison,
sweeps and figure emission."""

from .compare import (ComparisonReport, RankComparison, compare_to_errg,
                      ks_two_sample)
from .config import (SCHEMA, ConfigError, ExperimentConfig,
                     parse_config_file)
from .figures import emit_figures, exponent_figure, ks_figure, walk_figure
from .runner import (RANK_KEEP, BatchResult, batch_manifest, replica_seed,
                     run_batch, write_csv)
from .sweep import exponent_study, phase_sweep

__all__ = [
    "BatchResult", "ComparisonReport", "ConfigError", "ExperimentConfig",
    "RankComparison", "RANK_KEEP", "SCHEMA", "batch_manifest",
    "compare_to_errg", "emit_figures", "exponent_figure", "exponent_study",
    "ks_figure", "ks_two_sample", "parse_config_file", "phase_sweep",
    "replica_seed", "run_batch", "walk_figure", "write_csv",
]
