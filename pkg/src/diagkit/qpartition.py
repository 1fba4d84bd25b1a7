"""Phase 1: reasoner-free search for a good canonical q-partition.

All reasoning is replaced by set arithmetic on diagnosis id-sets: the
canonical query of a seed D+ is U_D minus the seed's union, a partition is
canonical iff every remaining diagnosis keeps a non-empty trait, and
successors move whole trait-equivalence classes from D- to D+.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .diagnoses import LeadingDiagnoses
from .dpi import Diagnosis, Dpi, DpiError, QPartition, Query


def union_ids(diagnoses: Iterable[Diagnosis]) -> frozenset:
    out: frozenset = frozenset()
    for d in diagnoses:
        out |= d.ids
    return out


def intersection_ids(diagnoses: Iterable[Diagnosis]) -> frozenset:
    diagnoses = list(diagnoses)
    out = frozenset(diagnoses[0].ids)
    for d in diagnoses[1:]:
        out &= d.ids
    return out


def discrimination_ids(leading: Iterable[Diagnosis]) -> frozenset:
    """Disc_D: sentences in some but not all leading diagnoses — the only
    KB sentences able to discriminate among them."""
    leading = list(leading)
    return union_ids(leading) - intersection_ids(leading)


def canonical_query_ids(leading: Iterable[Diagnosis],
                        seed: Iterable[Diagnosis]) -> frozenset:
    """Ids of the canonical query for the seed, possibly empty.

    Defined as (K \\ U_seed) restricted to the discrimination sentences,
    which collapses to U_D \\ U_seed.
    """
    leading, seed = list(leading), list(seed)
    if not seed or len(seed) >= len(leading):
        raise ValueError("seed must be a non-empty proper subset of the "
                         "leading diagnoses")
    return union_ids(leading) - union_ids(seed)


def canonical_query(dpi: Dpi, leading: Iterable[Diagnosis],
                    seed: Iterable[Diagnosis]) -> Optional[Query]:
    ids = canonical_query_ids(leading, seed)
    if not ids:
        return None
    return Query(frozenset(dpi.sentences(ids)))


def is_cqp(leading: Iterable[Diagnosis], dplus: Iterable[Diagnosis],
           dminus: Iterable[Diagnosis]) -> bool:
    """True iff <dplus, dminus, {}> is a canonical q-partition: the canonical
    query of dplus exists and produces exactly this split."""
    dplus, dminus = list(dplus), list(dminus)
    u_plus = union_ids(dplus)
    u_all = union_ids(list(leading))
    if not u_plus < u_all:
        return False
    return all(not d.ids <= u_plus for d in dminus)


# ---------------------------------------------------------------------------
# search nodes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CqpNode:
    """A canonical q-partition under construction.

    traits maps each D- diagnosis to its trait (the ids not covered by
    U_{D+}); diagnoses with equal traits form one equivalence class and are
    always moved together.
    """
    dplus: frozenset
    dminus: frozenset
    union_dplus: frozenset
    traits: tuple  # ((Diagnosis, frozenset), ...) sorted for determinism
    heuristic: float = 0.0

    def trait_of(self, d: Diagnosis) -> frozenset:
        return dict(self.traits)[d]

    def as_qpartition(self) -> QPartition:
        return QPartition(self.dplus, self.dminus, frozenset())


def _make_node(dplus: Iterable[Diagnosis], dminus: Iterable[Diagnosis],
               heuristic: float = 0.0) -> CqpNode:
    dplus, dminus = frozenset(dplus), frozenset(dminus)
    u_plus = union_ids(dplus)
    traits = tuple(sorted(((d, frozenset(d.ids - u_plus)) for d in dminus),
                          key=lambda kv: kv[0].sort_key()))
    return CqpNode(dplus, dminus, u_plus, traits, heuristic)


def s_init(leading: Iterable[Diagnosis]) -> list[CqpNode]:
    """The root successors: one single-diagnosis seed per leading diagnosis.
    Every one of them is a canonical q-partition."""
    leading = sorted(leading, key=Diagnosis.sort_key)
    return [_make_node({d}, set(leading) - {d}) for d in leading]


def _equivalence_classes(node: CqpNode) -> list[tuple[frozenset, list[Diagnosis]]]:
    """Group D- diagnoses by trait; returns (trait, members) pairs."""
    groups: dict = {}
    for d, trait in node.traits:
        groups.setdefault(trait, []).append(d)
    return [(t, sorted(ms, key=Diagnosis.sort_key)) for t, ms in groups.items()]


def s_next(node: CqpNode, forbidden: frozenset = frozenset()) -> list[CqpNode]:
    """Successors of a canonical q-partition.

    One successor per trait-equivalence class whose trait is subset-minimal
    among all traits; the whole class moves from D- to D+.  No successors if
    only a single class remains (the move would empty D-).  Classes containing
    a forbidden diagnosis are skipped.
    """
    classes = _equivalence_classes(node)
    if len(classes) <= 1:
        return []
    all_traits = [t for t, _ in classes]
    out = []
    for trait, members in classes:
        if any(t < trait for t in all_traits):
            continue  # not subset-minimal
        if forbidden & frozenset(members):
            continue
        out.append(_make_node(node.dplus | frozenset(members),
                              node.dminus - frozenset(members)))
    return out


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

ENT = "ENT"
SPL = "SPL"


@dataclass(frozen=True)
class QsmConfig:
    """Which q-partition score to optimize and how close counts as done."""
    measure: str = ENT
    threshold: float = 0.01

    def __post_init__(self):
        if self.measure not in (ENT, SPL):
            raise ValueError("unknown measure %r" % (self.measure,))
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")


def qsm_value(measure: str, qp: QPartition, probs: dict) -> float:
    """Score of a q-partition; 0 is optimal, lower is better.

    ENT: 1 + p(t) log2 p(t) + p(f) log2 p(f) where p(t) is the probability of
    a positive answer (D+ mass plus half the D0 mass).
    SPL: | |D+| - |D-| | + |D0|.
    """
    if measure == SPL:
        return abs(len(qp.dplus) - len(qp.dminus)) + len(qp.dzero)
    p_plus = sum(probs[d] for d in qp.dplus)
    p_zero = sum(probs[d] for d in qp.dzero)
    p_t = p_plus + p_zero / 2.0
    p_f = 1.0 - p_t
    value = 1.0
    for p in (p_t, p_f):
        if p > 0:
            value += p * math.log2(p)
    return value


def _heuristic(measure: str, dplus: frozenset, probs: dict, n_leading: int) -> float:
    if measure == SPL:
        return abs(len(dplus) - n_leading / 2.0)
    return abs(sum(probs[d] for d in dplus) - 0.5)


def _pruned(measure: str, dplus: frozenset, probs: dict, n_leading: int) -> bool:
    if measure == SPL:
        return len(dplus) >= n_leading / 2.0
    return sum(probs[d] for d in dplus) >= 0.5


@dataclass
class SearchStats:
    generated: int = 0
    expanded: int = 0


def search_optimal_qp(leading: LeadingDiagnoses, qsm: QsmConfig,
                      excluded: Iterable[frozenset] = (),
                      stats: Optional[SearchStats] = None,
                      prune: bool = True) -> tuple[QPartition, float]:
    """Depth-first, locally best-first search over canonical q-partitions.

    Returns the first partition whose measure is within the threshold of the
    optimum (0), otherwise the best one seen during the whole (pruned)
    exploration.  Partitions whose D+ is listed in `excluded` are neither
    returned nor treated as goals (used to offer alternatives after a skipped
    query).  Duplicate partitions are detected globally by their D+ set.
    """
    diagnoses = list(leading)
    if len(diagnoses) < 2:
        raise DpiError("need at least two leading diagnoses to discriminate")
    probs = leading.probs
    n = len(diagnoses)
    measure = qsm.measure
    excluded = set(excluded)
    visited: set = set()
    stats = stats if stats is not None else SearchStats()

    best: Optional[tuple[float, CqpNode]] = None

    def consider(node: CqpNode) -> bool:
        """Track the candidate; True if it meets the goal threshold."""
        nonlocal best
        if node.dplus in excluded:
            return False
        value = qsm_value(measure, node.as_qpartition(), probs)
        # strict improvement beyond rounding noise: on an exact tie the
        # first-visited partition is kept
        if best is None or value < best[0] - 1e-9:
            best = (value, node)
        return abs(value - 0.0) <= qsm.threshold

    def visit(node: CqpNode) -> Optional[CqpNode]:
        visited.add(node.dplus)
        if consider(node):
            return node
        if prune and _pruned(measure, node.dplus, probs, n):
            return None
        stats.expanded += 1
        succs = [s for s in s_next(node) if s.dplus not in visited]
        stats.generated += len(succs)
        succs.sort(key=lambda s: (_heuristic(measure, s.dplus, probs, n),
                                  len(s.dplus - node.dplus),
                                  tuple(sorted(d.sort_key()
                                               for d in s.dplus - node.dplus))))
        for s in succs:
            if s.dplus in visited:
                continue
            result = visit(s)
            if result is not None:
                return result
        return None

    roots = s_init(diagnoses)
    stats.generated += len(roots)
    roots.sort(key=lambda s: (_heuristic(measure, s.dplus, probs, n),
                              len(s.dplus),
                              tuple(sorted(d.sort_key() for d in s.dplus))))
    for root in roots:
        result = visit(root)
        if result is not None:
            return result.as_qpartition(), qsm_value(measure, result.as_qpartition(), probs)
    if best is None:
        raise DpiError("no canonical q-partition available")
    return best[1].as_qpartition(), best[0]


def enumerate_cqps(leading: Iterable[Diagnosis], cap: int = 20) -> set[QPartition]:
    """All canonical q-partitions, by brute force over the distinct unions
    U_{D+} of non-empty proper subsets of the leading diagnoses."""
    diagnoses = sorted(leading, key=Diagnosis.sort_key)
    n = len(diagnoses)
    if n > cap:
        raise ValueError("refusing brute-force enumeration for %d diagnoses "
                         "(cap %d)" % (n, cap))
    u_all = union_ids(diagnoses)
    unions: set = set()
    for mask in range(1, 2 ** n - 1):
        subset = [diagnoses[i] for i in range(n) if mask >> i & 1]
        unions.add(union_ids(subset))
    unions.discard(u_all)
    out = set()
    for u in unions:
        dplus = frozenset(d for d in diagnoses if d.ids <= u)
        dminus = frozenset(d for d in diagnoses if not d.ids <= u)
        out.add(QPartition(dplus, dminus, frozenset()))
    return out
