"""Interactive sequential diagnosis for propositional knowledge bases.

Computes minimal diagnoses for an inconsistent KB (or a reduced circuit
problem), then repeatedly asks an oracle cost- and information-optimized
queries until the actual fault is isolated.
"""

from .diagnoses import LeadingDiagnoses, diagnosis_prob, hs_tree, min_conflict
from .dpi import (Diagnosis, Dpi, QPartition, Query, TestCase, is_diagnosis,
                  parse_dpi, partition, serialize_dpi, solution_kb)
from .engine import (EngineConfig, Goal, SessionState, SimulatedOracle,
                     answer_probability, calc_query, run)
from .logic import Formula, entails, is_consistent, parse, serialize, violates
from .qpartition import QsmConfig, canonical_query, enumerate_cqps, search_optimal_qp
from .querycost import QcmConfig, min_traits, optimal_query_for_qp
from .queryexpand import (EntailmentTypeFilter, PreferenceOrder,
                          enriched_query, ent_et, expand_query, min_q)

__all__ = [
    "Diagnosis", "Dpi", "QPartition", "Query", "TestCase",
    "parse_dpi", "serialize_dpi", "partition", "solution_kb", "is_diagnosis",
    "Formula", "entails", "is_consistent", "parse", "serialize", "violates",
    "LeadingDiagnoses", "diagnosis_prob", "hs_tree", "min_conflict",
    "QsmConfig", "canonical_query", "enumerate_cqps", "search_optimal_qp",
    "QcmConfig", "min_traits", "optimal_query_for_qp",
    "EntailmentTypeFilter", "PreferenceOrder", "enriched_query", "ent_et",
    "expand_query", "min_q",
    "EngineConfig", "Goal", "SessionState", "SimulatedOracle",
    "answer_probability", "calc_query", "run",
]
