"""The outer interactive loop: diagnose, ask, update, repeat.

Each round computes the leading minimal diagnoses, checks the diagnostic
goal, produces the next query (partition search, then either the hitting-set
query or the enriched one), and folds the oracle's answer back into the
problem instance and the diagnosis probabilities.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from . import logic
from .diagnoses import LeadingDiagnoses, diagnosis_prob, hs_tree
from .dpi import (Diagnosis, Dpi, DpiError, QPartition, Query, TestCase,
                  is_diagnosis, partition)
from .qpartition import QsmConfig, search_optimal_qp
from .querycost import QcmConfig, optimal_query_for_qp
from .queryexpand import DEFAULT_FILTER, EntailmentTypeFilter, enriched_query

G1_SINGLE = "G1_SINGLE"
G2_THRESHOLD = "G2_THRESHOLD"
G3_RATIO = "G3_RATIO"

ANSWERS = ("true", "false", "skip")


@dataclass(frozen=True)
class Goal:
    """When to stop asking: a single minimal diagnosis remains, the best one
    exceeds a probability threshold, or it dominates the runner-up by a
    factor."""
    kind: str = G1_SINGLE
    threshold: float = 0.0
    ratio: float = 1.0

    def __post_init__(self):
        if self.kind not in (G1_SINGLE, G2_THRESHOLD, G3_RATIO):
            raise ValueError("unknown goal kind %r" % (self.kind,))
        if self.kind == G2_THRESHOLD and not 0.0 < self.threshold <= 1.0:
            raise ValueError("threshold must be in (0, 1]")
        if self.kind == G3_RATIO and self.ratio < 1.0:
            raise ValueError("ratio must be at least 1")

    def met(self, leading: LeadingDiagnoses) -> bool:
        if len(leading) <= 1:
            return True
        if self.kind == G1_SINGLE:
            return False
        ps = sorted((leading.prob(d) for d in leading), reverse=True)
        if self.kind == G2_THRESHOLD:
            return ps[0] >= self.threshold
        return ps[0] >= self.ratio * ps[1]


@dataclass(frozen=True)
class EngineConfig:
    n_leading: int = 10
    qsm: QsmConfig = QsmConfig()
    qcm: QcmConfig = QcmConfig()
    enhance: bool = False
    goal: Goal = Goal()
    et: EntailmentTypeFilter = DEFAULT_FILTER


@dataclass
class HistoryEntry:
    iteration: int
    leading: list        # (sorted-id tuple, probability) pairs
    query: Query
    qpartition: QPartition
    answer: Optional[str] = None  # "true" | "false" | "skip" | None (pending)
    elapsed: float = 0.0

    def as_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "leading": [{"ids": list(ids), "probability": round(p, 6)}
                        for ids, p in self.leading],
            "query": sorted(logic.serialize(f) for f in self.query.sentences),
            "qpartition": {
                "dplus": sorted(sorted(d.ids) for d in self.qpartition.dplus),
                "dminus": sorted(sorted(d.ids) for d in self.qpartition.dminus),
            },
            "answer": self.answer,
            "timings": {"seconds": round(self.elapsed, 6)},
        }


RUNNING = "RUNNING"
DONE = "DONE"


def answer_probability(qp: QPartition, probs: dict) -> tuple[float, float]:
    """Chance of each answer: D+ mass plus half the D0 mass says yes."""
    p_true = sum(probs[d] for d in qp.dplus) + \
        sum(probs[d] for d in qp.dzero) / 2.0
    return p_true, 1.0 - p_true


class SessionState:
    """One interactive diagnosis session.

    Mutable; all transitions go through step().  The pending query (if any)
    is the one awaiting an oracle answer.
    """

    def __init__(self, dpi: Dpi, config: EngineConfig = EngineConfig()):
        if not dpi.is_valid():
            raise DpiError("no diagnosis exists for this problem instance")
        self.dpi = dpi
        self.config = config
        self.history: list[HistoryEntry] = []
        self.iteration = 0
        self.status = RUNNING
        self.result: Optional[Diagnosis] = None
        self.pending_query: Optional[Query] = None
        self.pending_qp: Optional[QPartition] = None
        self._skipped: set[frozenset] = set()
        self.leading = hs_tree(dpi, config.n_leading)
        self._start_round()

    # -- round bookkeeping --------------------------------------------------

    def _start_round(self) -> None:
        self._skipped = set()
        if self.config.goal.met(self.leading):
            self.status = DONE
            self.result = self.leading.diagnoses[0]
            self.pending_query = None
            self.pending_qp = None
            return
        self._compute_query()

    def _compute_query(self) -> None:
        t0 = time.monotonic()
        query, qp = calc_query(self.dpi, self.leading, self.config,
                               excluded=self._skipped)
        self.iteration += 1
        self.pending_query, self.pending_qp = query, qp
        snapshot = [(tuple(sorted(d.ids)), self.leading.prob(d))
                    for d in self.leading]
        self.history.append(HistoryEntry(self.iteration, snapshot, query, qp,
                                         elapsed=time.monotonic() - t0))

    # -- transitions --------------------------------------------------------

    def step(self, answer: str) -> "SessionState":
        if self.status == DONE:
            raise DpiError("session is finished")
        if self.pending_query is None:
            raise DpiError("no pending query")
        if answer not in ANSWERS:
            raise DpiError("answer must be one of %s" % (ANSWERS,))
        self.history[-1].answer = answer
        if answer == "skip":
            self._skipped.add(self.pending_qp.dplus)
            self._compute_query()
            return self

        qp = self.pending_qp
        tc = TestCase(self.pending_query.sentences)
        if answer == "true":
            new_dpi = self.dpi.with_positive(tc)
            survivors = qp.dplus | qp.dzero
        else:
            new_dpi = self.dpi.with_negative(tc)
            survivors = qp.dminus | qp.dzero
        posterior = _bayes_posterior(self.leading, qp, answer)
        self.dpi = new_dpi
        self.leading = _merged_leading(new_dpi, self.config.n_leading,
                                       survivors, posterior)
        self.pending_query = None
        self.pending_qp = None
        self._start_round()
        return self

    # -- views --------------------------------------------------------------

    def answer_probabilities(self) -> Optional[tuple[float, float]]:
        if self.pending_qp is None:
            return None
        return answer_probability(self.pending_qp, self.leading.probs)

    def transcript(self) -> list[dict]:
        return [h.as_dict() for h in self.history]


def _bayes_posterior(leading: LeadingDiagnoses, qp: QPartition,
                     answer: str) -> dict:
    """Posterior over the surviving leading diagnoses: likelihood 1 for the
    set predicting the answer, 1/2 for the undecided, 0 for the rest."""
    if answer == "true":
        full, half = qp.dplus, qp.dzero
    else:
        full, half = qp.dminus, qp.dzero
    raw = {d: leading.prob(d) * (1.0 if d in full else 0.5)
           for d in leading if d in full or d in half}
    total = sum(raw.values())
    return {d: p / total for d, p in raw.items()} if total else raw


def _merged_leading(dpi: Dpi, n: int, survivors: frozenset,
                    posterior: dict) -> LeadingDiagnoses:
    """Recompute the leading diagnoses and blend in the survivors' updated
    weights: survivors keep their Bayes posterior share, newcomers enter with
    their prior product weight, then everything renormalizes."""
    fresh = hs_tree(dpi, n)
    weights = {}
    for d in fresh:
        if d in survivors and d in posterior:
            weights[d] = posterior[d]
        else:
            weights[d] = diagnosis_prob(dpi, d)
    order = sorted(fresh, key=lambda d: (-weights[d], d.sort_key()))
    return LeadingDiagnoses(order, weights)


def calc_query(dpi: Dpi, leading: LeadingDiagnoses, config: EngineConfig,
               excluded: Iterable[frozenset] = ()) -> tuple[Query, QPartition]:
    """The next question to ask: partition search, then query selection.

    The enriched pipeline falls back to the hitting-set query when no new
    consequences exist.
    """
    if len(leading) < 2:
        raise DpiError("need at least two leading diagnoses to discriminate")
    qp, _ = search_optimal_qp(leading, config.qsm, excluded=excluded)
    query = None
    if config.enhance:
        query = enriched_query(dpi, list(leading), qp, config.et)
    if query is None:
        query = optimal_query_for_qp(dpi, qp, config.qcm)
    return query, qp


# ---------------------------------------------------------------------------
# oracles and batch driving
# ---------------------------------------------------------------------------

class SimulatedOracle:
    """Answers queries against a reference model: true iff the reference
    entails every query sentence."""

    def __init__(self, reference: Iterable[logic.Formula]):
        self.reference = set(reference)

    @staticmethod
    def for_target(dpi: Dpi, target: Diagnosis) -> "SimulatedOracle":
        from .dpi import solution_kb
        return SimulatedOracle(solution_kb(dpi, target))

    def __call__(self, query: Query) -> str:
        return "true" if logic.entails(self.reference, query.sentences) \
            else "false"


def run(dpi: Dpi, oracle: Callable[[Query], str],
        config: EngineConfig = EngineConfig()) -> tuple[Diagnosis, list[dict]]:
    """Drive a session to completion with an automatic oracle."""
    state = SessionState(dpi, config)
    while state.status == RUNNING:
        state.step(oracle(state.pending_query))
    return state.result, state.transcript()
