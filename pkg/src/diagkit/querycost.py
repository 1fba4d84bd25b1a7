"""Phase 2: cost-optimal explicit-entailments query for a fixed q-partition.

The queries over the discrimination sentences that produce a given canonical
q-partition are exactly the hitting sets of the D- traits, so the cheapest
one is found by uniform-cost search over the subset-minimal traits.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable

from .dpi import Diagnosis, Dpi, QPartition, Query
from .qpartition import union_ids

SUM = "SUM"
MAX = "MAX"
CARD = "CARD"


@dataclass(frozen=True)
class QcmConfig:
    """Which query cost to minimize; costs maps sentence id to a non-negative
    real (ignored for CARD)."""
    measure: str = SUM
    costs: tuple = ()

    def __post_init__(self):
        if self.measure not in (SUM, MAX, CARD):
            raise ValueError("unknown measure %r" % (self.measure,))
        object.__setattr__(self, "costs", tuple(sorted(dict(self.costs).items())))

    @staticmethod
    def of(measure: str, costs: dict) -> "QcmConfig":
        return QcmConfig(measure, tuple(costs.items()))

    def cost(self, ids: Iterable[int]) -> float:
        """Monotonic set cost: SUM adds, MAX takes the dearest, CARD counts."""
        ids = list(ids)
        if self.measure == CARD:
            return float(len(ids))
        table = dict(self.costs)
        values = [table.get(sid, 1.0) for sid in ids]
        if self.measure == MAX:
            return max(values, default=0.0)
        return sum(values)


def traits(qp: QPartition) -> dict:
    """Trait of each D- diagnosis: its ids not covered by U_{D+}."""
    u_plus = union_ids(qp.dplus)
    return {d: frozenset(d.ids - u_plus) for d in qp.dminus}


def min_traits(qp: QPartition) -> list[frozenset]:
    """The subset-minimal traits; dropping the supersets keeps the minimal
    hitting sets unchanged."""
    all_traits = set(traits(qp).values())
    keep = [t for t in all_traits
            if not any(o < t for o in all_traits)]
    return sorted(keep, key=sorted)


def is_hitting_set(hs: frozenset, trait_sets: Iterable[frozenset]) -> bool:
    return all(hs & t for t in trait_sets)


def _minimal_hs(hs: frozenset, trait_sets: list[frozenset]) -> bool:
    return all(not is_hitting_set(hs - {sid}, trait_sets) for sid in hs)


def optimal_hitting_set(trait_sets: list[frozenset], qcm: QcmConfig) -> frozenset:
    """Cheapest minimal hitting set of the traits, uniform-cost search.

    The cost function is monotone, so the first complete set popped has
    globally minimal cost; equal-cost ties fall to the lexicographically
    smallest id tuple.  A popped complete set can still be a superset of a
    cheaper-tied minimal one, so minimality is verified before returning.
    """
    if any(not t for t in trait_sets):
        raise ValueError("traits must be non-empty")
    if not trait_sets:
        return frozenset()
    heap = [(0.0, (), frozenset())]
    seen = {frozenset()}
    while heap:
        _, _, hs = heapq.heappop(heap)
        unhit = [t for t in trait_sets if not hs & t]
        if not unhit:
            if _minimal_hs(hs, trait_sets):
                return hs
            continue
        for sid in sorted(unhit[0]):
            child = hs | {sid}
            if child in seen:
                continue
            seen.add(child)
            heapq.heappush(heap, (qcm.cost(child), tuple(sorted(child)), child))
    raise ValueError("no hitting set found")  # unreachable for non-empty traits


def optimal_query_for_qp(dpi: Dpi, qp: QPartition,
                         qcm: QcmConfig) -> Query:
    """The qcm-cheapest explicit-entailments query whose q-partition is qp."""
    hs = optimal_hitting_set(min_traits(qp), qcm)
    return Query(frozenset(dpi.sentences(hs)))


def optimal_query_ids(qp: QPartition, qcm: QcmConfig) -> frozenset:
    """Like optimal_query_for_qp but returning sentence ids."""
    return optimal_hitting_set(min_traits(qp), qcm)
