"""Experiment configuration: flat key=value files mirrored 1:1 by CLI flags.

A config file holds one `key = value` pair per line; `#` starts a comment.
Keys use the same spelling as the CLI flags with hyphens turned into
underscores. The resolved configuration (with every derived quantity filled
in) is logged verbatim into each output manifest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

from ..graphs import Params, critical_p, errg_match, resolve_p


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def _parse_grid(s: str) -> list[float]:
    return [float(tok) for tok in s.replace(",", " ").split()]


# every key a config file may carry, with its converter; 'lambda' maps to the
# attribute 'lam'
SCHEMA = {
    "model": str,
    "task": str,
    "n": int,
    "m": int,
    "alpha": float,
    "lambda": float,
    "mu": float,
    "regime": str,
    "start_side": str,
    "replicas": int,
    "master_seed": int,
    "step_budget_T": float,
    "ds": float,
    "ranks": int,
    "count_edges": _parse_bool,
    "sampler": str,
    "out_dir": str,
    "threads": int,
    "max_expected_edges": float,
    "pair_cap": float,
    # grid keys consumed by the sweep and exponent subcommands
    "mu_grid": _parse_grid,
    "n_grid": _parse_grid,
    "m_grid": _parse_grid,
}

_EXTRA_KEYS = ("mu_grid", "n_grid", "m_grid")


def parse_config_file(path) -> dict:
    """Read a key=value file into a dict of converted values."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in SCHEMA:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = SCHEMA[key](value)
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return out


@dataclass
class ExperimentConfig:
    """Full description of one replica batch."""

    n: int
    model: str = "rig"
    task: str = "components"
    m: int | None = None
    alpha: float | None = None
    lam: float | None = None
    mu: float | None = None
    regime: str | None = None
    start_side: str = "U"
    replicas: int = 1
    master_seed: int = 0
    step_budget_T: float = 2.0
    ds: float = 0.01
    ranks: int = 3
    count_edges: bool = False
    sampler: str = "auto"
    out_dir: str | None = None
    threads: int = 1
    max_expected_edges: float = 100_000_000.0
    pair_cap: float = 100_000_000.0

    def __post_init__(self):
        if self.model not in ("rig", "bipartite", "errg"):
            raise ConfigError(f"model must be rig, bipartite or errg, got {self.model!r}")
        if self.task not in ("components", "explore"):
            raise ConfigError(f"task must be components or explore, got {self.task!r}")
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if self.replicas < 1:
            raise ConfigError("replicas must be at least 1")
        if self.model != "errg":
            if (self.m is None) == (self.alpha is None):
                raise ConfigError("exactly one of m, alpha must be set")
        if (self.lam is None) == (self.mu is None):
            raise ConfigError("exactly one of lambda, mu must be set")
        if self.regime not in (None, "alpha_gt_1", "alpha_lt_1"):
            raise ConfigError(f"unknown regime {self.regime!r}")
        if self.start_side not in ("U", "W"):
            raise ConfigError("start_side must be U or W")
        if self.sampler not in ("auto", "full", "min2"):
            raise ConfigError("sampler must be auto, full or min2")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if self.task == "explore" and self.model == "errg":
            raise ConfigError("the exploration task runs on the bipartite model only")

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        """Build from a parsed config mapping; grid keys are rejected here."""
        kwargs = {}
        for key, value in mapping.items():
            if key in _EXTRA_KEYS:
                raise ConfigError(f"key {key!r} belongs to a sweep/exponent run, "
                                  "not a single batch")
            if key not in SCHEMA:
                raise ConfigError(f"unknown key {key!r}")
            kwargs["lam" if key == "lambda" else key] = value
        if "n" not in kwargs:
            raise ConfigError("n is required")
        return cls(**kwargs)

    def m_effective(self) -> int | None:
        if self.m is not None:
            return self.m
        if self.alpha is not None:
            return Params.from_alpha(self.n, self.alpha).m
        return None

    def regime_effective(self) -> str:
        if self.regime is not None:
            return self.regime
        m = self.m_effective()
        if m is None:
            return "alpha_gt_1"
        return "alpha_gt_1" if m >= self.n else "alpha_lt_1"

    def params(self) -> Params:
        m = self.m_effective()
        if m is None:
            raise ConfigError(f"model {self.model} carries no community side")
        return Params(n=self.n, m=m, alpha=self.alpha, lam=self.lam, mu=self.mu)

    def p_effective(self) -> float:
        if self.model == "errg":
            if self.lam is not None:
                return errg_match(self.n, self.lam)
            return min(self.mu / self.n, 1.0)
        return resolve_p(self.params(), self.regime_effective())

    def use_min2(self) -> bool:
        """Whether the reduced (two or more members) sampler applies."""
        if self.model != "rig" or self.task != "components":
            return False
        if self.sampler == "min2":
            return True
        if self.sampler == "full":
            return False
        # worth it only when communities are small; exact either way
        return self.p_effective() * self.n < 0.5

    def resolved(self) -> dict:
        """Everything, derived values included, for the manifest."""
        out = asdict(self)
        out["lambda"] = out.pop("lam")
        out["m_effective"] = self.m_effective()
        out["regime_effective"] = self.regime_effective()
        out["p_effective"] = self.p_effective()
        if self.model != "errg":
            m = self.m_effective()
            out["critical_p"] = critical_p(self.n, m)
            out["realized_alpha"] = (math.log(m) / math.log(self.n)
                                     if self.n > 1 and m else None)
        out["sampler_effective"] = "min2" if self.use_min2() else "full"
        return out
