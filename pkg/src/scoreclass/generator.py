"""Deterministic random instance generation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Instance, validate_instance

__all__ = ["GeneratorSpec", "InfeasibleSpec", "gen_instance"]

COST_DISTS = ("uniform", "loguniform")
INTERVAL_SCHEMES = ("random", "equal")


class InfeasibleSpec(ValueError):
    """No valid instance matches the requested generator parameters."""


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for one instance; same spec always yields the same instance."""

    n: int
    num_blocks: int
    cost_dist: str = "uniform"
    cost_lo: float = 0.5
    cost_hi: float = 10.0
    prob_eps: float = 0.01
    interval_scheme: str = "random"
    seed: int = 0

    @property
    def instance_id(self) -> str:
        return f"n{self.n}B{self.num_blocks}s{self.seed}"


def _check_spec(spec: GeneratorSpec) -> None:
    problems = []
    if spec.n < 1:
        problems.append(f"n={spec.n} must be >= 1")
    if spec.num_blocks < 2:
        problems.append(f"num_blocks={spec.num_blocks} must be >= 2")
    if spec.num_blocks > spec.n + 1:
        problems.append(
            f"num_blocks={spec.num_blocks} needs {spec.num_blocks - 1} interior"
            f" cut points but only 1..{spec.n} are available"
        )
    if spec.cost_dist not in COST_DISTS:
        problems.append(f"unknown cost_dist {spec.cost_dist!r}")
    if not 0.0 < spec.cost_lo <= spec.cost_hi:
        problems.append(f"cost range ({spec.cost_lo}, {spec.cost_hi}) must be positive")
    if not 0.0 < spec.prob_eps < 0.5:
        problems.append(f"prob_eps={spec.prob_eps} must be in (0, 0.5)")
    if spec.interval_scheme not in INTERVAL_SCHEMES:
        problems.append(f"unknown interval_scheme {spec.interval_scheme!r}")
    if problems:
        raise InfeasibleSpec("; ".join(problems))


def gen_instance(spec: GeneratorSpec) -> Instance:
    """Draw an instance; always passes validation."""
    _check_spec(spec)
    rng = np.random.default_rng((spec.seed, spec.n, spec.num_blocks))

    if spec.cost_dist == "uniform":
        costs = rng.uniform(spec.cost_lo, spec.cost_hi, size=spec.n)
    else:
        costs = np.exp(rng.uniform(np.log(spec.cost_lo), np.log(spec.cost_hi), size=spec.n))
    probs = rng.uniform(spec.prob_eps, 1.0 - spec.prob_eps, size=spec.n)

    if spec.interval_scheme == "random":
        interior = np.sort(
            rng.choice(np.arange(1, spec.n + 1), size=spec.num_blocks - 1, replace=False)
        )
    else:
        step = (spec.n + 1) / spec.num_blocks
        interior = np.array(
            [round(j * step) for j in range(1, spec.num_blocks)], dtype=np.int64
        )
    alphas = (0, *(int(a) for a in interior), spec.n + 1)
    return validate_instance(costs, probs, alphas)
