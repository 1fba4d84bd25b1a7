"""Phase 3: query enrichment and preferred minimization.

Step 1 widens the canonical query with implicit consequences of simple,
easy-to-answer shapes (literals and variable-to-literal implications).
Step 2 contracts the widened query back to a subset-minimal one that keeps
the q-partition, preferring sentences early in a given total order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from . import logic
from .logic import Formula, Implies, Not, Var, variables_of
from .dpi import Diagnosis, Dpi, QPartition, Query, partition, solution_kb
from .qpartition import canonical_query_ids, union_ids

LITERAL = "LITERAL"
VAR_TO_LITERAL_IMPLICATION = "VAR_TO_LITERAL_IMPLICATION"


@dataclass(frozen=True)
class EntailmentTypeFilter:
    """Which consequence shapes to generate, over which vocabulary.

    With an empty vocabulary the pool defaults to the variables of
    K union B union the positive test cases of the instance at hand.
    """
    kinds: frozenset = frozenset({LITERAL, VAR_TO_LITERAL_IMPLICATION})
    vocabulary: frozenset = frozenset()

    def __post_init__(self):
        unknown = self.kinds - {LITERAL, VAR_TO_LITERAL_IMPLICATION}
        if unknown:
            raise ValueError("unknown entailment kinds: %s" % sorted(unknown))

    def pool(self, vocabulary: Iterable[str]) -> list[Formula]:
        """All candidate sentences: every literal over the vocabulary, plus
        every implication from a variable to a literal of another variable."""
        names = sorted(self.vocabulary or vocabulary)
        out: list[Formula] = []
        if LITERAL in self.kinds:
            for v in names:
                out.append(Var(v))
                out.append(Not(Var(v)))
        if VAR_TO_LITERAL_IMPLICATION in self.kinds:
            for a in names:
                for b in names:
                    if a == b:
                        continue
                    out.append(Implies(Var(a), Var(b)))
                    out.append(Implies(Var(a), Not(Var(b))))
        return out


DEFAULT_FILTER = EntailmentTypeFilter()


def ent_et(kb: Iterable[Formula],
           et: EntailmentTypeFilter = DEFAULT_FILTER,
           vocabulary: Optional[Iterable[str]] = None) -> set[Formula]:
    """All candidate-pool sentences entailed by kb.

    Sound by the entailment test, type-sound by pool construction, monotone
    and superset-stable because the pool depends on the vocabulary only.
    """
    kb = set(kb)
    if not logic.is_consistent(kb):
        raise ValueError("inconsistent premises entail everything")
    vocab = variables_of(kb) if vocabulary is None else set(vocabulary)
    return {e for e in et.pool(vocab) if logic.entails(kb, [e])}


def expand_query(dpi: Dpi, leading: Iterable[Diagnosis], qp: QPartition,
                 et: EntailmentTypeFilter = DEFAULT_FILTER) -> tuple[Query, frozenset]:
    """Widen the canonical query of qp's D+ with its implicit consequences.

    Returns (Q', Q_exp) where Q' = Q union Q_exp and Q_exp holds the new
    sentences: consequences of the agreed KB core plus Q that the core alone
    does not yield, minus Q itself.  Q' produces the same q-partition as Q.
    An empty Q_exp signals the caller to fall back on the hitting-set query.
    """
    leading = list(leading)
    q_ids = canonical_query_ids(leading, qp.dplus)
    q = dpi.sentences(q_ids)
    core = dpi.sentences(set(dpi.ids) - union_ids(leading)) | \
        set(dpi.background) | dpi.positive_union()
    vocab = variables_of(core | q | {f for _, f in dpi.kb})
    with_q = ent_et(core | q, et, vocab)
    without_q = ent_et(core, et, vocab)
    q_exp = frozenset((with_q - without_q) - q)
    return Query(frozenset(q) | q_exp), q_exp


def is_qp_const(dpi: Dpi, qp: QPartition, q_sub: Iterable[Formula]) -> bool:
    """True iff shrinking the query to q_sub keeps qp intact.

    For subsets of a query with partition qp (empty D0) it suffices that
    every D- diagnosis still rejects q_sub: D+ membership only grows when
    sentences are dropped.
    """
    q_sub = set(q_sub)
    negs = dpi.negative_sentence_sets()
    return all(
        logic.violates(solution_kb(dpi, d) | q_sub, dpi.requirements, negs)
        for d in qp.dminus)


@dataclass
class MinQTrace:
    """Predicate calls made during minimization, for inspection."""
    calls: list = None

    def __post_init__(self):
        if self.calls is None:
            self.calls = []

    def record(self, subset: list[Formula], verdict: bool) -> None:
        self.calls.append((tuple(subset), verdict))

    @property
    def verdicts(self) -> list[bool]:
        return [v for _, v in self.calls]


def min_q(dpi: Dpi, qp: QPartition, q_sorted: list[Formula],
          trace: Optional[MinQTrace] = None) -> Query:
    """Divide-and-conquer contraction to a subset-minimal query for qp.

    Splits the still-relevant sublist at the midpoint (left half rounded up)
    and keeps whichever sentences are indispensable; because earlier list
    positions are probed for removal later, the result is the most preferred
    minimal subquery with respect to the input order.
    """
    q_sorted = list(q_sorted)
    got = partition(dpi, list(qp.dplus | qp.dminus | qp.dzero), q_sorted)
    if got != qp:
        raise ValueError("q_sorted does not produce the expected q-partition")

    def pred(subset: list[Formula]) -> bool:
        verdict = is_qp_const(dpi, qp, subset)
        if trace is not None:
            trace.record(subset, verdict)
        return verdict

    def rec(soft: list[Formula], hard: list[Formula],
            delta: list[Formula]) -> list[Formula]:
        if delta and pred(hard):
            return []
        if len(soft) == 1:
            return soft
        half = (len(soft) + 1) // 2
        left, right = soft[:half], soft[half:]
        d2 = rec(right, hard + left, left)
        d1 = rec(left, hard + d2, d2)
        return d1 + d2

    return Query(frozenset(rec(q_sorted, [], [])))


@dataclass(frozen=True)
class PreferenceOrder:
    """Total order on an expanded query: most preferred first."""
    preferred: tuple

    @staticmethod
    def default(dpi: Dpi, q_exp: Iterable[Formula], q_can_ids: Iterable[int],
                dplus_union: Iterable[int] = ()) -> "PreferenceOrder":
        """Expansion sentences first, then the canonical-query sentences
        cheapest-first.

        Within the expansion: single literals before implications (simpler to
        check for the oracle), and sentences talking only about the disputed
        D+ sentences' variables before the rest — probing right at the
        suspect beats probing an equivalent remote consequence.
        """
        suspect_vars = variables_of(dpi.sentences(dplus_union))

        def key(e: Formula) -> tuple:
            return (0 if isinstance(e, (Var, Not)) else 1,
                    0 if variables_of([e]) <= suspect_vars else 1,
                    logic.serialize(e))

        exp = sorted(q_exp, key=key)
        can = sorted(q_can_ids, key=lambda sid: (dpi.costs[sid], sid))
        return PreferenceOrder(tuple(exp) + tuple(dpi.sentence(s) for s in can))

    def sorted(self) -> list[Formula]:
        return list(self.preferred)


def enriched_query(dpi: Dpi, leading: Iterable[Diagnosis], qp: QPartition,
                   et: EntailmentTypeFilter = DEFAULT_FILTER) -> Optional[Query]:
    """Full enrichment pipeline: expand, order, minimize.

    Returns None when no new consequences exist, signalling the caller to use
    the hitting-set query instead.
    """
    leading = list(leading)
    q_prime, q_exp = expand_query(dpi, leading, qp, et)
    if not q_exp:
        return None
    q_can_ids = canonical_query_ids(leading, qp.dplus)
    order = PreferenceOrder.default(dpi, q_exp, q_can_ids,
                                    union_ids(qp.dplus))
    return min_q(dpi, qp, order.sorted())
