"""Test-selection strategies and their execution engine.

Two strategy families live here:

* non-adaptive permutations produced by round-robin merges of the
  cost-ratio sequences (:func:`rr3_permutation`, :func:`rr2_permutation`);
* two-phase block verifiers (:func:`block_verify_policy`,
  :func:`rr2_verify_policy`), adaptive only through the observed 1s/0s
  counts.

Execution adds the stopping rule.  Evaluation runs stop once every
completion of the untested variables lands in the same block; verification
runs for block ``j`` stop once both count quotas of the block are met.
A strategy order never depends on outcomes, only the stopping point (and,
for the verifiers, the phase-2 branch) does.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Union, runtime_checkable

from .model import Instance, TestState
from .sequences import Permutation, build_sequences

__all__ = [
    "BlockVerifyPolicy",
    "EvaluationStop",
    "ExecutionTrace",
    "PermutationPolicy",
    "Policy",
    "RoundRobinStep",
    "TraceStep",
    "VerificationStop",
    "block_verify_policy",
    "rr2_permutation",
    "rr2_schedule",
    "rr2_verify_policy",
    "rr3_permutation",
    "rr3_schedule",
    "run_nonadaptive",
    "run_policy",
    "verification_stop",
]


@dataclass(frozen=True)
class EvaluationStop:
    """Stop once the block is a foregone conclusion."""

    instance: Instance

    def __call__(self, ones: int, zeros: int) -> bool:
        return self.instance.is_determined(ones, zeros)


@dataclass(frozen=True)
class VerificationStop:
    """Stop once both count quotas of one block are met."""

    needed_ones: int
    needed_zeros: int

    def __call__(self, ones: int, zeros: int) -> bool:
        return ones >= self.needed_ones and zeros >= self.needed_zeros


StoppingRule = Union[EvaluationStop, VerificationStop]


def verification_stop(instance: Instance, j: int) -> VerificationStop:
    th = instance.block_thresholds(j)
    return VerificationStop(th.needed_ones, th.needed_zeros)


# ---------------------------------------------------------------------------
# Round-robin merges


@dataclass(frozen=True)
class RoundRobinStep:
    """One pick of a round-robin merge: the chosen index, which sequence
    supplied it, and the per-sequence accumulated costs after the pick."""

    index: int
    source: str
    spent: tuple[float, ...]


def _round_robin(instance: Instance, orders, labels) -> tuple[RoundRobinStep, ...]:
    # Each step charges the chosen head to its sequence's accumulator and
    # picks the sequence minimizing accumulated-plus-head cost; ties go to
    # the earliest listed sequence.
    c = instance.costs
    spent = [0.0] * len(orders)
    ptrs = [0] * len(orders)
    tested: set[int] = set()
    steps: list[RoundRobinStep] = []
    for _ in range(instance.n):
        heads = []
        for s, order in enumerate(orders):
            while order[ptrs[s]] in tested:
                ptrs[s] += 1
            heads.append(order[ptrs[s]])
        totals = [spent[s] + c[heads[s]] for s in range(len(orders))]
        s = min(range(len(orders)), key=lambda s: totals[s])
        spent[s] = totals[s]
        tested.add(heads[s])
        steps.append(RoundRobinStep(heads[s], labels[s], tuple(spent)))
    return tuple(steps)


def rr3_schedule(instance: Instance) -> tuple[RoundRobinStep, ...]:
    """3-way round-robin over (for_zeros, for_ones, by_cost), stopping ignored."""
    seqs = build_sequences(instance)
    return _round_robin(
        instance,
        (seqs.for_zeros, seqs.for_ones, seqs.by_cost),
        ("for_zeros", "for_ones", "by_cost"),
    )


def rr3_permutation(instance: Instance) -> Permutation:
    return tuple(step.index for step in rr3_schedule(instance))


def rr2_schedule(instance: Instance) -> tuple[RoundRobinStep, ...]:
    """2-way round-robin over (for_zeros, for_ones), stopping ignored."""
    seqs = build_sequences(instance)
    return _round_robin(
        instance, (seqs.for_zeros, seqs.for_ones), ("for_zeros", "for_ones")
    )


def rr2_permutation(instance: Instance) -> Permutation:
    return tuple(step.index for step in rr2_schedule(instance))


# ---------------------------------------------------------------------------
# Policies


@runtime_checkable
class Policy(Protocol):
    """Deterministic test-selection rule plus its stopping predicate.

    Decisions may depend on the state only through the tested set and the
    observed 1s/0s counts, never on outcome order.
    """

    stop: StoppingRule

    def next_index(self, state: TestState) -> int | None: ...


@dataclass(frozen=True)
class PermutationPolicy:
    """Non-adaptive policy: walk a fixed order until the stop fires."""

    order: Permutation
    stop: StoppingRule

    def next_index(self, state: TestState) -> int | None:
        for i in self.order:
            if i not in state.tested:
                return i
        return None


@dataclass(frozen=True)
class BlockVerifyPolicy:
    """Two-phase block verifier.

    Phase 1 walks ``prefix``.  Once the prefix is exhausted an unstopped
    state is short of exactly one resource: if the 1s quota is already met
    the policy hunts 0s along ``zeros_hunt``, otherwise it hunts 1s along
    ``ones_hunt`` (skipping tested variables).  The branch can never switch
    because the hunted count is the only one still growing toward its quota.
    """

    prefix: Permutation
    zeros_hunt: Permutation
    ones_hunt: Permutation
    stop: VerificationStop

    def next_index(self, state: TestState) -> int | None:
        for i in self.prefix:
            if i not in state.tested:
                return i
        hunt = (
            self.zeros_hunt
            if state.ones >= self.stop.needed_ones
            else self.ones_hunt
        )
        for i in hunt:
            if i not in state.tested:
                return i
        return None


def block_verify_policy(instance: Instance, j: int) -> BlockVerifyPolicy:
    """Verifier for block ``j``: cheapest-first phase 1, ratio-ordered phase 2.

    Phase 1 covers the ``needed_ones + needed_zeros`` cheapest tests; that
    many tests are necessary for any verification, which is what makes this
    policy's expected cost at most twice the adaptive optimum.
    """
    th = instance.block_thresholds(j)
    seqs = build_sequences(instance)
    m = th.needed_ones + th.needed_zeros
    return BlockVerifyPolicy(
        prefix=seqs.by_cost[:m],
        zeros_hunt=seqs.for_zeros,
        ones_hunt=seqs.for_ones,
        stop=VerificationStop(th.needed_ones, th.needed_zeros),
    )


def rr2_verify_policy(instance: Instance, j: int) -> BlockVerifyPolicy:
    """Verifier for block ``j`` whose phase 1 follows the 2-way round-robin
    order instead of the raw cheapest tests; phase 2 as in
    :func:`block_verify_policy`."""
    th = instance.block_thresholds(j)
    seqs = build_sequences(instance)
    m = th.needed_ones + th.needed_zeros
    return BlockVerifyPolicy(
        prefix=rr2_permutation(instance)[:m],
        zeros_hunt=seqs.for_zeros,
        ones_hunt=seqs.for_ones,
        stop=VerificationStop(th.needed_ones, th.needed_zeros),
    )


# ---------------------------------------------------------------------------
# Execution


@dataclass(frozen=True)
class TraceStep:
    index: int
    outcome: int
    cumulative_cost: float


@dataclass(frozen=True)
class ExecutionTrace:
    """Record of one strategy run on one realization.

    ``block`` is set by evaluation runs, ``verified`` by verification runs.
    """

    steps: tuple[TraceStep, ...]
    block: int | None
    verified: bool | None

    @property
    def cost(self) -> float:
        return self.steps[-1].cumulative_cost if self.steps else 0.0

    @property
    def tested_indices(self) -> tuple[int, ...]:
        return tuple(step.index for step in self.steps)


def run_policy(policy: Policy, bits, instance: Instance) -> ExecutionTrace:
    """Execute a policy on a full realization until its stop fires or no
    untested variable remains."""
    costs = instance.costs
    state = TestState.empty()
    steps: list[TraceStep] = []
    total = 0.0
    while not policy.stop(state.ones, state.zeros):
        i = policy.next_index(state)
        if i is None:
            break
        outcome = 1 if bits[i] else 0
        total += costs[i]
        steps.append(TraceStep(i, outcome, total))
        state = state.after(i, outcome)
    if isinstance(policy.stop, EvaluationStop):
        done = policy.stop(state.ones, state.zeros)
        return ExecutionTrace(
            steps=tuple(steps),
            block=instance.block_of(state.ones) if done else None,
            verified=None,
        )
    return ExecutionTrace(
        steps=tuple(steps),
        block=None,
        verified=policy.stop(state.ones, state.zeros),
    )


def run_nonadaptive(
    perm: Permutation, bits, stop: StoppingRule, instance: Instance
) -> ExecutionTrace:
    """Execute a fixed test order under the given stopping rule."""
    return run_policy(PermutationPolicy(tuple(perm), stop), bits, instance)
