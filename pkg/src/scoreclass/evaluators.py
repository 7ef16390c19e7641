"""Expected-cost computation and optimal-strategy oracles.

Three independent routes to every number:

* closed-form sequential DP over the observed 1s count
  (:func:`exact_eval_cost`, :func:`exact_verification_cost`), exact up to
  floating point and O(n^2)-ish per strategy;
* full enumeration of realizations through the real executor
  (:func:`enum_eval_cost`, :func:`enum_verification_cost`), exponential but
  independent of the DP route — the reference the DP is tested against;
* bitmask subset DP for the optimal *adaptive* strategies
  (:func:`opt_adaptive_eval`, :func:`opt_adaptive_verification`), the
  brute-force optima that approximation ratios are measured against.

Verification costs are charged only on realizations that belong to the
block being verified; runs on other realizations execute (to exhaustion)
but contribute nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence, Union

import numpy as np

from . import kernels
from .model import Instance, realization_prob
from .sequences import Permutation
from .strategies import (
    BlockVerifyPolicy,
    EvaluationStop,
    PermutationPolicy,
    Policy,
    StoppingRule,
    run_policy,
    verification_stop,
)

__all__ = [
    "CostReport",
    "DEFAULT_EXACT_MAX_N",
    "DEFAULT_ORACLE_MAX_N",
    "InstanceTooLarge",
    "MonteCarloEstimate",
    "OnesDistribution",
    "TablePolicy",
    "UnsupportedStrategyShape",
    "enum_eval_cost",
    "enum_verification_cost",
    "exact_eval_cost",
    "exact_verification_cost",
    "monte_carlo_cost",
    "opt_adaptive_eval",
    "opt_adaptive_verification",
    "opt_eval_policy",
    "poisson_binomial_pmf",
    "trial_bits",
]

DEFAULT_EXACT_MAX_N = 20
DEFAULT_ORACLE_MAX_N = 14


class InstanceTooLarge(ValueError):
    """The instance exceeds the configured size bound of an exact routine."""


class UnsupportedStrategyShape(TypeError):
    """The strategy's decisions depend on more than the count summary, so
    the closed-form evaluator cannot handle it (enumeration still can)."""


# ---------------------------------------------------------------------------
# 1s-count distributions


def _pb_update(pmf: np.ndarray, p: float) -> np.ndarray:
    out = np.zeros(pmf.shape[0] + 1)
    out[:-1] = pmf * (1.0 - p)
    out[1:] += pmf * p
    return out


def poisson_binomial_pmf(probs: Sequence[float]) -> np.ndarray:
    """P[exactly k ones] for k = 0..len(probs) over independent tests."""
    pmf = np.ones(1)
    for p in probs:
        pmf = _pb_update(pmf, float(p))
    return pmf


@dataclass(frozen=True, eq=False)
class OnesDistribution:
    """Distribution of the 1s count over a fixed variable set."""

    pmf: np.ndarray

    @classmethod
    def from_probs(cls, probs: Sequence[float]) -> "OnesDistribution":
        return cls(poisson_binomial_pmf(probs))

    @property
    def m(self) -> int:
        return self.pmf.shape[0] - 1

    def window_mass(self, lo: int, hi: int) -> float:
        """P[lo <= count <= hi], window clipped to the support."""
        lo, hi = max(lo, 0), min(hi, self.m)
        return float(self.pmf[lo : hi + 1].sum()) if lo <= hi else 0.0


# ---------------------------------------------------------------------------
# Exact expected costs (sequential count DP)


def _as_order(perm, n: int) -> tuple[int, ...]:
    order = tuple(int(i) for i in perm)
    if sorted(order) != list(range(n)):
        raise ValueError("strategy order is not a permutation of all test indices")
    return order


def exact_eval_cost(perm: Permutation, instance: Instance) -> float:
    """Expected cost to pin down the block when testing in a fixed order.

    Step t is paid exactly when the state after t-1 tests is still
    undetermined; determination is monotone along a fixed order, so the
    per-state check is sufficient.  The 1s-count distribution of each
    prefix is maintained by sequential convolution.
    """
    n = instance.n
    order = _as_order(perm, n)
    c, p = instance.costs_arr, instance.probs_arr
    blk = np.searchsorted(instance.alphas_arr, np.arange(n + 1), side="right")
    pmf = np.ones(1)
    total = 0.0
    for t, idx in enumerate(order):
        ones = np.arange(t + 1)
        undetermined = blk[ones] != blk[n - (t - ones)]
        total += c[idx] * float(pmf @ undetermined)
        pmf = _pb_update(pmf, p[idx])
    return total


def _segment_verification_cost(
    instance: Instance,
    order: tuple[int, ...],
    start: int,
    pmf_start: np.ndarray,
    needed_ones: int,
    needed_zeros: int,
    lo: int,
    hi: int,
    end: int | None = None,
) -> tuple[float, np.ndarray]:
    """Charged cost of steps start..end-1 along a full test order.

    ``pmf_start`` is the absolute 1s-count distribution after the first
    ``start`` tests.  Step t is charged on the mass that is still unstopped
    at state (t, ones) *and* whose total count can only land in [lo, hi]
    weighted by the untested variables' count distribution.  Returns the
    accumulated cost and the 1s-count distribution after ``end`` tests.
    """
    n = instance.n
    c, p = instance.costs_arr, instance.probs_arr
    if end is None:
        end = n

    suffixes: dict[int, np.ndarray] = {n: np.ones(1)}
    for t in range(n - 1, start - 1, -1):
        suffixes[t] = _pb_update(suffixes[t + 1], p[order[t]])

    pmf = np.asarray(pmf_start, dtype=np.float64)
    total = 0.0
    for t in range(start, end):
        ones = np.arange(pmf.shape[0])
        zeros = t - ones
        active = ~((ones >= needed_ones) & (zeros >= needed_zeros))
        u = n - t
        csum = np.concatenate(([0.0], np.cumsum(suffixes[t])))
        win_lo = np.clip(lo - ones, 0, None)
        win_hi = np.minimum(hi - ones, u)
        empty = win_hi < win_lo
        mass = np.where(
            empty,
            0.0,
            csum[np.where(empty, 0, win_hi + 1)] - csum[np.where(empty, 0, win_lo)],
        )
        total += c[order[t]] * float(np.sum(pmf * active * mass))
        pmf = _pb_update(pmf, p[order[t]])
    return total, pmf


def exact_verification_cost(strategy, j: int, instance: Instance) -> float:
    """Expected cost of verifying block ``j``, charged on block-``j`` mass.

    Accepts a fixed order (any permutation-like, or a
    :class:`PermutationPolicy`) or a :class:`BlockVerifyPolicy` for the same
    block.  Other policies raise :class:`UnsupportedStrategyShape`; use
    :func:`enum_verification_cost` for those.
    """
    th = instance.block_thresholds(j)
    lo, hi = instance.alphas[j - 1], instance.alphas[j] - 1
    n = instance.n

    if isinstance(strategy, PermutationPolicy):
        strategy = strategy.order
    if isinstance(strategy, (tuple, list, np.ndarray)):
        order = _as_order(strategy, n)
        cost, _ = _segment_verification_cost(
            instance, order, 0, np.ones(1), th.needed_ones, th.needed_zeros, lo, hi
        )
        return cost

    if isinstance(strategy, BlockVerifyPolicy):
        if (strategy.stop.needed_ones, strategy.stop.needed_zeros) != (
            th.needed_ones,
            th.needed_zeros,
        ):
            raise ValueError(f"policy verifies different quotas than block {j}")
        prefix = strategy.prefix
        m = len(prefix)
        in_prefix = frozenset(prefix)
        # Phase-1 accounting only needs the untested *sets*, which are the
        # same whatever completes the order; phase 2 is computed per branch.
        filler = tuple(i for i in range(n) if i not in in_prefix)
        phase1_cost, pmf_m = _segment_verification_cost(
            instance,
            prefix + filler,
            0,
            np.ones(1),
            th.needed_ones,
            th.needed_zeros,
            lo,
            hi,
            end=m,
        )
        total = phase1_cost
        for o_star in range(m + 1):
            weight = float(pmf_m[o_star])
            if weight == 0.0 or (o_star >= th.needed_ones and m - o_star >= th.needed_zeros):
                continue
            hunt = (
                strategy.zeros_hunt if o_star >= th.needed_ones else strategy.ones_hunt
            )
            continuation = tuple(i for i in hunt if i not in in_prefix)
            onehot = np.zeros(m + 1)
            onehot[o_star] = 1.0
            branch_cost, _ = _segment_verification_cost(
                instance,
                prefix + continuation,
                m,
                onehot,
                th.needed_ones,
                th.needed_zeros,
                lo,
                hi,
            )
            total += weight * branch_cost
        return total

    raise UnsupportedStrategyShape(
        f"cannot evaluate strategy of type {type(strategy).__name__} in closed form"
    )


# ---------------------------------------------------------------------------
# Brute-force enumeration through the real executor


def _iter_realizations(n: int) -> Iterator[tuple[int, ...]]:
    for m in range(1 << n):
        yield tuple((m >> i) & 1 for i in range(n))


def _as_policy(strategy, instance: Instance, stop: StoppingRule) -> Policy:
    if isinstance(strategy, (tuple, list, np.ndarray)):
        return PermutationPolicy(_as_order(strategy, instance.n), stop)
    if isinstance(strategy, Policy):
        return strategy
    raise UnsupportedStrategyShape(
        f"cannot execute strategy of type {type(strategy).__name__}"
    )


def enum_eval_cost(strategy, instance: Instance) -> float:
    """E(S) by running the executor on every realization."""
    policy = _as_policy(strategy, instance, EvaluationStop(instance))
    total = 0.0
    for bits in _iter_realizations(instance.n):
        total += run_policy(policy, bits, instance).cost * realization_prob(bits, instance)
    return total


def enum_verification_cost(strategy, j: int, instance: Instance) -> float:
    """E_j(S) by running the executor on every block-``j`` realization."""
    instance.block_thresholds(j)
    policy = _as_policy(strategy, instance, verification_stop(instance, j))
    total = 0.0
    for bits in _iter_realizations(instance.n):
        if instance.block_of(sum(bits)) != j:
            continue
        total += run_policy(policy, bits, instance).cost * realization_prob(bits, instance)
    return total


# ---------------------------------------------------------------------------
# Optimal-strategy oracles (subset DP kernels)


def _check_oracle_size(instance: Instance, max_n: int, what: str) -> None:
    if instance.n > max_n:
        raise InstanceTooLarge(
            f"n={instance.n} exceeds max_n={max_n} for the {what} oracle"
        )


def opt_adaptive_eval(instance: Instance, max_n: int = DEFAULT_EXACT_MAX_N) -> float:
    """Expected cost of the optimal adaptive evaluation strategy.

    Exact: for the symmetric block structure the cost-to-go of any decision
    tree depends on history only through (tested set, 1s count), so the
    subset DP minimizes over all adaptive strategies.
    """
    _check_oracle_size(instance, max_n, "evaluation")
    return kernels.opt_evaluation_cost(
        instance.costs_arr, instance.probs_arr, instance.alphas_arr
    )


@dataclass(frozen=True, eq=False)
class TablePolicy:
    """Policy backed by a (mask, ones) -> next-test table; -1 means stop."""

    choices: np.ndarray
    stop: StoppingRule

    def next_index(self, state) -> int | None:
        mask = 0
        for i in state.tested:
            mask |= 1 << i
        nxt = int(self.choices[mask, state.ones])
        return None if nxt < 0 else nxt


def opt_eval_policy(
    instance: Instance, max_n: int = DEFAULT_ORACLE_MAX_N
) -> tuple[float, TablePolicy]:
    """The optimal adaptive evaluation strategy itself (value and policy).

    Materializes the dense argmin table, so the bound is the tighter oracle
    one by default.
    """
    _check_oracle_size(instance, max_n, "evaluation-policy")
    value, choices = kernels.opt_evaluation_cost(
        instance.costs_arr, instance.probs_arr, instance.alphas_arr, return_choices=True
    )
    return value, TablePolicy(choices, EvaluationStop(instance))


def opt_adaptive_verification(
    instance: Instance, j: int, max_n: int = DEFAULT_ORACLE_MAX_N
) -> float:
    """Expected charged cost of the optimal adaptive verifier for block j."""
    _check_oracle_size(instance, max_n, "verification")
    instance.block_thresholds(j)
    lo, hi = instance.alphas[j - 1], instance.alphas[j] - 1
    return kernels.opt_verification_cost(
        instance.costs_arr, instance.probs_arr, int(lo), int(hi)
    )


# ---------------------------------------------------------------------------
# Monte-Carlo estimation


class MonteCarloEstimate(NamedTuple):
    estimate: float
    stderr: float


def trial_bits(instance: Instance, trials: int, seed: int) -> np.ndarray:
    """Realization matrix, one row per trial.

    Rows are a pure function of (seed, trial index): a counter-based
    generator fills the matrix in row order, so any row split across
    workers reproduces the serial stream bit for bit.
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    u = rng.random((trials, instance.n))
    return (u < instance.probs_arr).astype(np.uint8)


def _vectorized_order_costs(
    order: tuple[int, ...], stop: StoppingRule, instance: Instance, bits: np.ndarray
) -> np.ndarray:
    n = instance.n
    cum = np.zeros((bits.shape[0], n + 1), dtype=np.int64)
    np.cumsum(bits[:, list(order)], axis=1, out=cum[:, 1:])
    table = np.zeros((n + 1, n + 1), dtype=bool)
    for t in range(n + 1):
        for o in range(t + 1):
            table[t, o] = stop(o, t - o)
    stopped = table[np.arange(n + 1)[None, :], cum]
    first = np.where(stopped.any(axis=1), np.argmax(stopped, axis=1), n)
    cum_cost = np.zeros(n + 1)
    np.cumsum(instance.costs_arr[list(order)], out=cum_cost[1:])
    return cum_cost[first]


def monte_carlo_cost(
    strategy,
    instance: Instance,
    trials: int,
    seed: int,
    stop: StoppingRule | None = None,
) -> MonteCarloEstimate:
    """Sample mean and standard error of the strategy's trace cost.

    Reproducible: identical (seed, trials) always yield identical output,
    for both the vectorized permutation path and the generic policy loop.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if stop is None:
        stop = EvaluationStop(instance)
    policy = _as_policy(strategy, instance, stop)
    bits = trial_bits(instance, trials, seed)
    if isinstance(policy, PermutationPolicy):
        samples = _vectorized_order_costs(policy.order, policy.stop, instance, bits)
    else:
        samples = np.array(
            [run_policy(policy, row, instance).cost for row in bits]
        )
    estimate = float(samples.mean())
    stderr = float(samples.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return MonteCarloEstimate(estimate, stderr)


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class CostReport:
    """Costs of one strategy on one instance, optionally with oracle ratios.

    ``eval_cost`` is None for block verifiers, which have no evaluation
    cost; ``block_costs`` maps each block label to the strategy's expected
    verification cost for that block.
    """

    strategy: str
    eval_cost: float | None
    kind: str  # "exact" | "mc" | "blocks-only"
    stderr: float | None = None
    block_costs: dict[int, float] | None = None
    opt_eval: float | None = None
    opt_block_costs: dict[int, float] | None = None

    @property
    def eval_ratio(self) -> float | None:
        if self.eval_cost is None or not self.opt_eval:
            return None
        return self.eval_cost / self.opt_eval

    @property
    def worst_block_ratio(self) -> float | None:
        if not self.block_costs or not self.opt_block_costs:
            return None
        ratios = [
            cost / self.opt_block_costs[j]
            for j, cost in self.block_costs.items()
            if self.opt_block_costs.get(j)
        ]
        return max(ratios) if ratios else None

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "eval_cost": self.eval_cost,
            "kind": self.kind,
            "stderr": self.stderr,
            "block_costs": {str(j): v for j, v in (self.block_costs or {}).items()} or None,
            "opt_eval": self.opt_eval,
            "opt_block_costs": {str(j): v for j, v in (self.opt_block_costs or {}).items()}
            or None,
            "eval_ratio": self.eval_ratio,
            "worst_block_ratio": self.worst_block_ratio,
        }
