"""Cost-ratio test orderings and the prefix families built from them.

Three global orderings drive every strategy in this package:

* ``for_zeros`` — ascending ``cost / (1 - prob)``, the cheapest way to
  collect 0s in expectation;
* ``for_ones`` — ascending ``cost / prob``, the cheapest way to collect 1s;
* ``by_cost`` — ascending raw cost.

The three k-element prefix families (:func:`cheapest_prefix`,
:func:`greedy_head_prefix`, :func:`round_robin_prefix`) are the objects the
round-robin cost bounds are stated on: the greedy head-merge prefix costs
at most twice the cheapest prefix, and the round-robin prefix at most twice
the greedy one, hence at most four times the cheapest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .model import Instance

__all__ = [
    "Permutation",
    "SequenceTriple",
    "build_sequences",
    "cheapest_prefix",
    "greedy_head_order",
    "greedy_head_prefix",
    "round_robin_prefix",
    "subset_cost",
]

Permutation = tuple[int, ...]


@dataclass(frozen=True)
class SequenceTriple:
    """The three sort orders, each a permutation of ``range(n)``.

    Ties in any sort key are broken by ascending index (stable sort), so
    identical inputs always produce identical sequences.
    """

    for_zeros: Permutation
    for_ones: Permutation
    by_cost: Permutation


def build_sequences(instance: Instance) -> SequenceTriple:
    c, p = instance.costs, instance.probs
    idx = range(instance.n)
    return SequenceTriple(
        for_zeros=tuple(sorted(idx, key=lambda i: c[i] / (1.0 - p[i]))),
        for_ones=tuple(sorted(idx, key=lambda i: c[i] / p[i])),
        by_cost=tuple(sorted(idx, key=lambda i: c[i])),
    )


def _check_k(instance: Instance, k: int) -> None:
    if not 0 <= k <= instance.n:
        raise ValueError(f"k={k} out of range 0..{instance.n}")


def cheapest_prefix(instance: Instance, k: int) -> frozenset[int]:
    """The k cheapest test indices."""
    _check_k(instance, k)
    return frozenset(build_sequences(instance).by_cost[:k])


def greedy_head_order(instance: Instance) -> Permutation:
    """Order produced by repeatedly taking the cheaper of the two current
    heads of ``for_zeros`` and ``for_ones`` (removing the pick from both).

    Cost ties between the two heads go to the ``for_zeros`` head.
    """
    seqs = build_sequences(instance)
    c = instance.costs
    taken: set[int] = set()
    order: list[int] = []
    i0 = i1 = 0
    for _ in range(instance.n):
        while seqs.for_zeros[i0] in taken:
            i0 += 1
        while seqs.for_ones[i1] in taken:
            i1 += 1
        x0, x1 = seqs.for_zeros[i0], seqs.for_ones[i1]
        pick = x0 if c[x0] <= c[x1] else x1
        taken.add(pick)
        order.append(pick)
    return tuple(order)


def greedy_head_prefix(instance: Instance, k: int) -> frozenset[int]:
    """First k picks of the greedy head-merge construction."""
    _check_k(instance, k)
    return frozenset(greedy_head_order(instance)[:k])


def round_robin_prefix(instance: Instance, k: int) -> frozenset[int]:
    """First k picks of the 2-way round-robin order (stopping ignored)."""
    from .strategies import rr2_permutation

    _check_k(instance, k)
    return frozenset(rr2_permutation(instance)[:k])


def subset_cost(instance: Instance, indices: Iterable[int]) -> float:
    return float(sum(instance.costs[i] for i in indices))
