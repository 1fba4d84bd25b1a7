"""Diagnosis problem instances and q-partitions.

A problem instance bundles an indexed knowledge base K (the suspect
sentences), trusted background knowledge B, positive and negative test cases
P / N, the requirement set R, and per-sentence fault probabilities and
measurement costs.  Sentence ids are 1-based integers in file order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import logic
from .logic import Formula, parse, serialize


@dataclass(frozen=True)
class TestCase:
    """A test case: a non-empty set of sentences read as their conjunction."""
    sentences: frozenset

    __test__ = False  # not a pytest class, despite the name

    def __post_init__(self):
        if not self.sentences:
            raise ValueError("test case must be non-empty")

    @staticmethod
    def of(*formulas: Formula) -> "TestCase":
        return TestCase(frozenset(formulas))


@dataclass(frozen=True)
class Diagnosis:
    """A candidate repair: the ids of the KB sentences assumed faulty."""
    ids: frozenset

    @staticmethod
    def of(*ids: int) -> "Diagnosis":
        return Diagnosis(frozenset(ids))

    def sort_key(self) -> tuple:
        return tuple(sorted(self.ids))

    def __lt__(self, other: "Diagnosis") -> bool:
        return self.sort_key() < other.sort_key()

    def __repr__(self) -> str:
        return "Diagnosis(%s)" % sorted(self.ids)


@dataclass(frozen=True)
class Query:
    """A non-empty set of sentences put to the oracle."""
    sentences: frozenset

    def __post_init__(self):
        if not self.sentences:
            raise ValueError("query must be non-empty")

    @staticmethod
    def of(*formulas: Formula) -> "Query":
        return Query(frozenset(formulas))

    def texts(self) -> list[str]:
        return sorted(serialize(f) for f in self.sentences)


@dataclass(frozen=True)
class QPartition:
    """How the leading diagnoses split on a query: D+ predicts a positive
    answer, D- a negative one, D0 neither."""
    dplus: frozenset
    dminus: frozenset
    dzero: frozenset

    @staticmethod
    def of(dplus: Iterable[Diagnosis], dminus: Iterable[Diagnosis],
           dzero: Iterable[Diagnosis] = ()) -> "QPartition":
        return QPartition(frozenset(dplus), frozenset(dminus), frozenset(dzero))

    def is_query_partition(self) -> bool:
        return bool(self.dplus) and bool(self.dminus)


class DpiError(ValueError):
    pass


class Dpi:
    """Immutable diagnosis problem instance <K, B, P, N>_R."""

    def __init__(self, kb: Sequence[tuple[int, Formula]],
                 background: Iterable[Formula] = (),
                 positive_tests: Iterable[TestCase] = (),
                 negative_tests: Iterable[TestCase] = (),
                 requirements: Iterable[str] = ("consistency",),
                 fault_probs: Optional[dict] = None,
                 costs: Optional[dict] = None):
        self.kb = tuple(kb)
        self.background = frozenset(background)
        self.positive_tests = tuple(positive_tests)
        self.negative_tests = tuple(negative_tests)
        self.requirements = frozenset(requirements)
        self._by_id = dict(self.kb)
        if len(self._by_id) != len(self.kb):
            raise DpiError("duplicate sentence ids in K")
        overlap = {f for _, f in self.kb} & self.background
        if overlap:
            raise DpiError("K and B overlap: %s" % sorted(map(serialize, overlap)))
        unsupported = self.requirements - logic.SUPPORTED_REQUIREMENTS
        if unsupported:
            raise DpiError("unsupported requirements: %s" % sorted(unsupported))
        if "consistency" not in self.requirements:
            raise DpiError("the consistency requirement is mandatory")

        probs = dict(fault_probs or {})
        cost_map = dict(costs or {})
        for sid, _ in self.kb:
            probs.setdefault(sid, 0.1)
            cost_map.setdefault(sid, 1.0)
        for sid, p in probs.items():
            if sid not in self._by_id:
                raise DpiError("probability for unknown sentence id %r" % (sid,))
            if not 0.0 < p < 1.0:
                raise DpiError("fault probability of sentence %s must be in (0,1)" % sid)
        for sid, c in cost_map.items():
            if sid not in self._by_id:
                raise DpiError("cost for unknown sentence id %r" % (sid,))
            if c < 0:
                raise DpiError("cost of sentence %s must be non-negative" % sid)
        self.fault_probs = probs
        self.costs = cost_map

    # -- basic accessors ----------------------------------------------------

    @property
    def ids(self) -> list[int]:
        return [sid for sid, _ in self.kb]

    def sentence(self, sid: int) -> Formula:
        try:
            return self._by_id[sid]
        except KeyError:
            raise DpiError("unknown sentence id %r" % (sid,))

    def sentences(self, ids: Iterable[int]) -> set[Formula]:
        return {self.sentence(sid) for sid in ids}

    def positive_union(self) -> set[Formula]:
        """U_P: the union of all positive test cases."""
        out: set[Formula] = set()
        for tc in self.positive_tests:
            out |= tc.sentences
        return out

    def negative_sentence_sets(self) -> list[frozenset]:
        return [tc.sentences for tc in self.negative_tests]

    def is_valid(self) -> bool:
        """A diagnosis exists iff B plus the positive tests is itself sound."""
        base = set(self.background) | self.positive_union()
        return not logic.violates(base, self.requirements,
                                  self.negative_sentence_sets())

    def replace(self, positive_tests=None, negative_tests=None) -> "Dpi":
        return Dpi(self.kb, self.background,
                   self.positive_tests if positive_tests is None else positive_tests,
                   self.negative_tests if negative_tests is None else negative_tests,
                   self.requirements, self.fault_probs, self.costs)

    def with_positive(self, tc: TestCase) -> "Dpi":
        return self.replace(positive_tests=self.positive_tests + (tc,))

    def with_negative(self, tc: TestCase) -> "Dpi":
        return self.replace(negative_tests=self.negative_tests + (tc,))


# ---------------------------------------------------------------------------
# diagnosis semantics
# ---------------------------------------------------------------------------

def solution_kb(dpi: Dpi, d: Diagnosis) -> set[Formula]:
    """(K \\ D) union B union U_P: the repaired KB under diagnosis d."""
    out = {f for sid, f in dpi.kb if sid not in d.ids}
    for sid in d.ids:
        dpi.sentence(sid)  # raises on unknown id
    return out | set(dpi.background) | dpi.positive_union()


def is_diagnosis(dpi: Dpi, d: Diagnosis) -> bool:
    """True iff removing d's sentences makes the KB sound: the repaired KB
    meets all requirements and entails no negative test case."""
    return not logic.violates(solution_kb(dpi, d), dpi.requirements,
                              dpi.negative_sentence_sets())


def partition(dpi: Dpi, leading: Iterable[Diagnosis],
              x: Iterable[Formula]) -> QPartition:
    """Split the leading diagnoses by how their repaired KBs treat x."""
    x = list(x)
    negs = dpi.negative_sentence_sets()
    dplus, dminus, dzero = [], [], []
    for d in leading:
        kb = solution_kb(dpi, d)
        if logic.entails(kb, x):
            dplus.append(d)
        elif logic.violates(kb | set(x), dpi.requirements, negs):
            dminus.append(d)
        else:
            dzero.append(d)
    return QPartition.of(dplus, dminus, dzero)


def is_query(dpi: Dpi, leading: Iterable[Diagnosis],
             x: Iterable[Formula]) -> bool:
    """A query must be non-empty and eliminate at least one leading diagnosis
    whichever way it is answered."""
    x = list(x)
    if not x:
        return False
    return partition(dpi, leading, x).is_query_partition()


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

_SECTIONS = ("K", "B", "P", "N", "R")


def parse_dpi(text: str, check_validity: bool = True) -> Dpi:
    """Parse the line-based DPI file format.

    Sections [K] [B] [P] [N] [R]; each K line is `id: formula` with optional
    `@p=` / `@c=` annotations; test cases may hold several sentences
    separated by `;`.
    """
    section = None
    kb: list[tuple[int, Formula]] = []
    background: list[Formula] = []
    positive: list[TestCase] = []
    negative: list[TestCase] = []
    requirements: list[str] = []
    fault_probs: dict = {}
    costs: dict = {}

    def parse_annotations(raw: str) -> tuple[str, Optional[float], Optional[float]]:
        p = c = None
        while "@" in raw:
            raw, _, ann = raw.rpartition("@")
            key, _, value = ann.partition("=")
            key = key.strip()
            try:
                num = float(value)
            except ValueError:
                raise DpiError("bad annotation value in %r" % ann)
            if key == "p":
                p = num
            elif key == "c":
                c = num
            else:
                raise DpiError("unknown annotation @%s" % key)
        return raw.strip(), p, c

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise DpiError("line %d: unknown section [%s]" % (lineno, name))
            section = name
            continue
        if section is None:
            raise DpiError("line %d: content before any section header" % lineno)
        if section == "R":
            requirements.append(line)
            continue
        label, colon, body = line.partition(":")
        if not colon:
            body, label = line, ""
        body, p, c = parse_annotations(body)
        if not body:
            raise DpiError("line %d: missing formula" % lineno)
        try:
            if section in ("P", "N"):
                tc = TestCase(frozenset(parse(part) for part in body.split(";")))
            else:
                formula = parse(body)
        except logic.ParseError as exc:
            raise DpiError("line %d: %s" % (lineno, exc))
        if section == "K":
            sid = len(kb) + 1
            if label.strip() and label.strip() != str(sid):
                raise DpiError("line %d: sentence id %r out of order (expected %d)"
                               % (lineno, label.strip(), sid))
            kb.append((sid, formula))
            if p is not None:
                fault_probs[sid] = p
            if c is not None:
                costs[sid] = c
        elif section == "B":
            background.append(formula)
        elif section == "P":
            positive.append(tc)
        else:
            negative.append(tc)

    dpi = Dpi(kb, background, positive, negative,
              requirements or ("consistency",), fault_probs, costs)
    if check_validity and not dpi.is_valid():
        raise DpiError("no diagnosis exists: background plus positive tests "
                       "already violates the requirements or a negative test")
    return dpi


def serialize_dpi(dpi: Dpi) -> str:
    lines = ["[K]"]
    for sid, f in dpi.kb:
        ann = ""
        if dpi.fault_probs[sid] != 0.1:
            ann += " @p=%g" % dpi.fault_probs[sid]
        if dpi.costs[sid] != 1.0:
            ann += " @c=%g" % dpi.costs[sid]
        lines.append("%d: %s%s" % (sid, serialize(f), ann))
    lines.append("[B]")
    for f in sorted(dpi.background, key=serialize):
        lines.append(serialize(f))
    lines.append("[P]")
    for i, tc in enumerate(dpi.positive_tests, 1):
        lines.append("p%d: %s" % (i, " ; ".join(sorted(map(serialize, tc.sentences)))))
    lines.append("[N]")
    for i, tc in enumerate(dpi.negative_tests, 1):
        lines.append("n%d: %s" % (i, " ; ".join(sorted(map(serialize, tc.sentences)))))
    lines.append("[R]")
    for r in sorted(dpi.requirements):
        lines.append(r)
    return "\n".join(lines) + "\n"
