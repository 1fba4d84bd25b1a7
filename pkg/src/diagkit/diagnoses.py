"""Minimal conflicts and minimal diagnoses.

Conflicts are found with the divide-and-conquer contraction scheme (halving
at each level); diagnoses are the minimal hitting sets of the minimal
conflicts, enumerated with a probability-ordered hitting-set tree.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass
from typing import Iterable, Optional

from . import logic
from .dpi import Diagnosis, Dpi, DpiError, solution_kb


@dataclass(frozen=True)
class Conflict:
    """A subset of K that cannot all be correct given B, P, N and R."""
    ids: frozenset

    def __repr__(self) -> str:
        return "Conflict(%s)" % sorted(self.ids)


def is_conflict(dpi: Dpi, ids: Iterable[int]) -> bool:
    """True iff the given KB sentences plus background and positive tests
    violate the requirements or entail a negative test case."""
    kb = dpi.sentences(ids) | set(dpi.background) | dpi.positive_union()
    return logic.violates(kb, dpi.requirements, dpi.negative_sentence_sets())


def min_conflict(dpi: Dpi, candidate: Optional[Iterable[int]] = None) -> Optional[Conflict]:
    """A subset-minimal conflict inside `candidate` (default: all of K),
    or None if the candidate is no conflict.

    Divide and conquer: split the suspect list at the midpoint, keep halves
    whole while the rest already conflicts.
    """
    ids = sorted(dpi.ids if candidate is None else candidate)
    base = set(dpi.background) | dpi.positive_union()
    negs = dpi.negative_sentence_sets()

    def violating(subset: list[int]) -> bool:
        kb = dpi.sentences(subset) | base
        return logic.violates(kb, dpi.requirements, negs)

    if not violating(ids):
        return None

    def reduce(background: list[int], suspects: list[int], delta_added: bool) -> list[int]:
        if delta_added and violating(background):
            return []
        if len(suspects) == 1:
            return suspects
        half = math.ceil(len(suspects) / 2)
        left, right = suspects[:half], suspects[half:]
        d2 = reduce(background + left, right, bool(left))
        d1 = reduce(background + d2, left, bool(d2))
        return d1 + d2

    return Conflict(frozenset(reduce([], ids, False)))


def diagnosis_prob(dpi: Dpi, d: Diagnosis) -> float:
    """Prior probability that exactly the sentences of d are faulty."""
    p = 1.0
    for sid in dpi.ids:
        p *= dpi.fault_probs[sid] if sid in d.ids else 1.0 - dpi.fault_probs[sid]
    return p


@dataclass
class LeadingDiagnoses:
    """The most probable minimal diagnoses, probabilities normalized to 1."""
    diagnoses: list
    probs: dict

    def __post_init__(self):
        total = sum(self.probs[d] for d in self.diagnoses)
        if total > 0:
            self.probs = {d: self.probs[d] / total for d in self.diagnoses}

    def __len__(self) -> int:
        return len(self.diagnoses)

    def __iter__(self):
        return iter(self.diagnoses)

    def prob(self, d: Diagnosis) -> float:
        return self.probs[d]


class NoDiagnosisError(DpiError):
    pass


def hs_tree(dpi: Dpi, limit_n: int = 10,
            time_budget: Optional[float] = None) -> LeadingDiagnoses:
    """Up to limit_n minimal diagnoses in descending probability order.

    Classic hitting-set tree: nodes are id-sets hitting the conflicts found
    so far; a node whose set hits every conflict of the instance is a
    diagnosis.  Nodes are expanded most-probable-first so the produced
    diagnoses arrive in descending prior probability (ties broken by the
    sorted id tuple, smallest first).
    """
    if not dpi.is_valid():
        raise NoDiagnosisError("no diagnosis exists for this problem instance")

    deadline = None if time_budget is None else time.monotonic() + time_budget

    def priority(ids: frozenset) -> tuple:
        # heapq pops smallest: negate the probability, then sorted ids
        return (-_path_prob(dpi, ids), tuple(sorted(ids)))

    root = frozenset()
    heap = [(priority(root), root)]
    seen = {root}
    conflicts: list[frozenset] = []
    found: list[Diagnosis] = []
    probs: dict = {}

    while heap and len(found) < limit_n:
        if deadline is not None and time.monotonic() > deadline:
            if len(found) >= 2:
                break
            raise NoDiagnosisError("time budget exhausted before two diagnoses "
                                   "were found")
        _, path = heapq.heappop(heap)
        if any(d.ids <= path for d in found):
            continue  # superset of a known diagnosis: not minimal
        label = None
        for c in conflicts:
            if not c & path:
                label = c
                break
        if label is None:
            remaining = [sid for sid in dpi.ids if sid not in path]
            conflict = min_conflict(dpi, remaining)
            if conflict is None:
                # with fault probabilities above 0.5 the expansion order is
                # not subset-monotone, so double-check minimality directly
                minimal = all(
                    is_conflict(dpi, [s for s in dpi.ids
                                      if s not in path or s == sid])
                    for sid in path)
                if minimal:
                    d = Diagnosis(path)
                    found.append(d)
                    probs[d] = _path_prob(dpi, path)
                continue
            conflicts.append(conflict.ids)
            label = conflict.ids
        for sid in sorted(label):
            child = path | {sid}
            if child not in seen:
                seen.add(child)
                heapq.heappush(heap, (priority(child), child))

    order = sorted(found, key=lambda d: (-probs[d], d.sort_key()))
    return LeadingDiagnoses(order, probs)


def _path_prob(dpi: Dpi, ids: frozenset) -> float:
    return diagnosis_prob(dpi, Diagnosis(ids))
