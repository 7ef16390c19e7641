"""Problem model for cost-aware score classification.

An instance bundles ``n`` independent binary tests.  Running test ``i``
costs ``costs[i]`` and comes up 1 with probability ``probs[i]``.  The
*score* of a hidden realization is the number of 1s among all tests, and
the integer cut points in ``alphas`` split the possible scores ``0..n``
into ``B`` consecutive blocks.  Every strategy in this package keeps
testing until the block of the hidden realization is pinned down, i.e.
until every completion of the untested variables lands in the same block.

Indices are 0-based throughout the library.  ``alphas`` lists all ``B+1``
cut points including both sentinels, ``alphas[0] == 0`` and
``alphas[-1] == n+1``, so the (1-based) block label ``j`` covers scores
``alphas[j-1] .. alphas[j]-1``.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BlockThresholds",
    "Instance",
    "InvalidInstance",
    "TestState",
    "block_of",
    "instance_from_json",
    "instance_to_json",
    "is_determined",
    "realization_prob",
    "validate_instance",
]


class InvalidInstance(ValueError):
    """Candidate instance data violates at least one invariant.

    ``violations`` lists every failed check, not just the first one, so a
    caller can report all problems in a single round trip.
    """

    def __init__(self, violations: Iterable[str]):
        self.violations = tuple(violations)
        super().__init__("invalid instance: " + "; ".join(self.violations))


@dataclass(frozen=True)
class BlockThresholds:
    """Counts that certify membership in one block.

    A realization belongs to block ``j`` exactly when it contains at least
    ``needed_ones`` 1s and at least ``needed_zeros`` 0s.
    """

    j: int
    needed_ones: int
    needed_zeros: int


@dataclass(frozen=True)
class Instance:
    """Immutable problem instance; build via :func:`validate_instance`."""

    costs: tuple[float, ...]
    probs: tuple[float, ...]
    alphas: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.costs)

    @property
    def num_blocks(self) -> int:
        return len(self.alphas) - 1

    @cached_property
    def costs_arr(self) -> np.ndarray:
        arr = np.asarray(self.costs, dtype=np.float64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def probs_arr(self) -> np.ndarray:
        arr = np.asarray(self.probs, dtype=np.float64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def alphas_arr(self) -> np.ndarray:
        arr = np.asarray(self.alphas, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def block_of(self, score: int) -> int:
        """Block label (1-based) of a realization with the given score."""
        if not 0 <= score <= self.n:
            raise ValueError(f"score {score} out of range 0..{self.n}")
        return bisect_right(self.alphas, score)

    def block_thresholds(self, j: int) -> BlockThresholds:
        if not 1 <= j <= self.num_blocks:
            raise ValueError(f"block {j} out of range 1..{self.num_blocks}")
        return BlockThresholds(
            j=j,
            needed_ones=self.alphas[j - 1],
            needed_zeros=self.n - (self.alphas[j] - 1),
        )

    def is_determined(self, ones: int, zeros: int) -> bool:
        """True iff every completion of the untested variables has the
        same block, given ``ones`` observed 1s and ``zeros`` observed 0s."""
        return self.block_of(ones) == self.block_of(self.n - zeros)


@dataclass(frozen=True, slots=True)
class TestState:
    """Execution state: which tests ran and how many 1s/0s they showed."""

    tested: frozenset[int]
    ones: int
    zeros: int

    def __post_init__(self):
        if self.ones < 0 or self.zeros < 0 or self.ones + self.zeros != len(self.tested):
            raise ValueError("inconsistent test state")

    @classmethod
    def empty(cls) -> "TestState":
        return cls(frozenset(), 0, 0)

    def after(self, index: int, outcome: int) -> "TestState":
        if index in self.tested:
            raise ValueError(f"test {index} already ran")
        return TestState(
            tested=self.tested | {index},
            ones=self.ones + (1 if outcome else 0),
            zeros=self.zeros + (0 if outcome else 1),
        )


def validate_instance(
    costs: Sequence[float],
    probs: Sequence[float],
    alphas: Sequence[int],
    n: int | None = None,
) -> Instance:
    """Check every instance invariant and return the validated instance.

    Raises :class:`InvalidInstance` carrying the full list of violations.
    """
    violations: list[str] = []
    costs = tuple(float(c) for c in costs)
    probs = tuple(float(p) for p in probs)

    if len(costs) == 0:
        violations.append("instance must contain at least one test")
    if len(probs) != len(costs):
        violations.append(
            f"length mismatch: {len(costs)} costs vs {len(probs)} probabilities"
        )
    if n is not None and n != len(costs):
        violations.append(f"length mismatch: declared n={n} but {len(costs)} costs")

    for i, c in enumerate(costs):
        if not (np.isfinite(c) and c > 0):
            violations.append(f"non-positive cost at index {i}: {c}")
    for i, p in enumerate(probs):
        if not (np.isfinite(p) and 0.0 < p < 1.0):
            violations.append(f"probability out of open interval (0,1) at index {i}: {p}")

    cuts: list[int] = []
    for a in alphas:
        if float(a) != int(a):
            violations.append(f"alphas must be integers, got {a}")
            break
        cuts.append(int(a))
    else:
        if len(cuts) < 2:
            violations.append("alphas must contain at least two endpoints")
        else:
            if any(b <= a for a, b in zip(cuts, cuts[1:])):
                violations.append(f"alphas not strictly increasing: {tuple(cuts)}")
            if cuts[0] != 0:
                violations.append(f"alpha endpoint mismatch: alphas[0]={cuts[0]}, expected 0")
            if cuts[-1] != len(costs) + 1:
                violations.append(
                    f"alpha endpoint mismatch: alphas[-1]={cuts[-1]}, expected n+1={len(costs) + 1}"
                )

    if violations:
        raise InvalidInstance(violations)
    return Instance(costs=costs, probs=probs, alphas=tuple(cuts))


def block_of(score: int, instance: Instance) -> int:
    return instance.block_of(score)


def is_determined(state: TestState, instance: Instance) -> bool:
    if len(state.tested) > instance.n:
        raise ValueError("state tests more variables than the instance has")
    return instance.is_determined(state.ones, state.zeros)


def realization_prob(bits: Sequence[int], instance: Instance) -> float:
    """Probability of one full realization under the independent test model."""
    arr = np.asarray(bits)
    if arr.shape != (instance.n,):
        raise ValueError(f"realization must have length {instance.n}")
    p = instance.probs_arr
    return float(np.prod(np.where(arr != 0, p, 1.0 - p)))


def instance_to_json(instance: Instance) -> str:
    """Serialize to the on-disk schema: keys n, costs, probs, alphas."""
    return json.dumps(
        {
            "n": instance.n,
            "costs": list(instance.costs),
            "probs": list(instance.probs),
            "alphas": list(instance.alphas),
        }
    )


def instance_from_json(text: str) -> Instance:
    data = json.loads(text)
    missing = {"n", "costs", "probs", "alphas"} - set(data)
    if missing:
        raise InvalidInstance([f"missing key: {k}" for k in sorted(missing)])
    return validate_instance(data["costs"], data["probs"], data["alphas"], n=data["n"])
