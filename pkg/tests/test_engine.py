import math
import random

import pytest

from diagkit import logic
from diagkit.circuit import circuit_dpi
from diagkit.diagnoses import LeadingDiagnoses, hs_tree
from diagkit.dpi import (Diagnosis, DpiError, QPartition, Query, TestCase,
                         parse_dpi, partition, solution_kb)
from diagkit.engine import (DONE, G2_THRESHOLD, G3_RATIO, RUNNING,
                            EngineConfig, Goal, SessionState, SimulatedOracle,
                            answer_probability, calc_query, run)
from diagkit.fixtures import exk_dpi
from diagkit.logic import parse
from diagkit.qpartition import ENT, QsmConfig
from diagkit.querycost import CARD, SUM, QcmConfig
from oracles import all_diagnoses, brute_min_diagnoses

D1 = Diagnosis.of(2, 3)
D2 = Diagnosis.of(2, 5)
D3 = Diagnosis.of(2, 6)
D4 = Diagnosis.of(2, 7)
D5 = Diagnosis.of(1, 4, 7)
D6 = Diagnosis.of(3, 4, 7)
ALL = [D1, D2, D3, D4, D5, D6]
EX17_PROBS = {D1: 0.01, D2: 0.33, D3: 0.14, D4: 0.07, D5: 0.41, D6: 0.04}

C1 = Diagnosis.of(1)
C2 = Diagnosis.of(2, 4)
C3 = Diagnosis.of(2, 5)


@pytest.fixture(scope="module")
def exk():
    return exk_dpi()


@pytest.fixture(scope="module")
def circuit():
    return circuit_dpi()[0]


def leading_with(probs):
    return LeadingDiagnoses(sorted(probs, key=lambda d: (-probs[d], d.sort_key())),
                            dict(probs))


class TestGoal:
    def test_validation(self):
        with pytest.raises(ValueError):
            Goal(G2_THRESHOLD, threshold=0.0)
        with pytest.raises(ValueError):
            Goal(G3_RATIO, ratio=0.5)
        with pytest.raises(ValueError):
            Goal("G4")

    def test_single(self):
        assert Goal().met(leading_with({D1: 1.0}))
        assert not Goal().met(leading_with({D1: 0.6, D2: 0.4}))

    def test_threshold(self):
        g = Goal(G2_THRESHOLD, threshold=0.9)
        assert g.met(leading_with({D1: 0.95, D2: 0.05}))
        assert not g.met(leading_with({D1: 0.85, D2: 0.15}))

    def test_ratio(self):
        g = Goal(G3_RATIO, ratio=3.0)
        assert g.met(leading_with({D1: 0.8, D2: 0.2}))
        assert not g.met(leading_with({D1: 0.6, D2: 0.4}))


class TestAnswerProbability:
    def test_reference_qp(self):
        qp = QPartition.of({D4, D5}, {D1, D2, D3, D6})
        p_true, p_false = answer_probability(qp, EX17_PROBS)
        assert math.isclose(p_true, 0.48) and math.isclose(p_false, 0.52)

    def test_circuit_bias(self, circuit):
        leading = hs_tree(circuit, 10)
        qp = QPartition.of({C1}, {C2, C3})
        p_true, _ = answer_probability(qp, leading.probs)
        assert abs(p_true - 0.93) <= 0.005

    def test_all_undecided(self):
        qp = QPartition.of((), (), {D1, D2})
        assert answer_probability(qp, {D1: 0.7, D2: 0.3}) == (0.5, 0.5)


class TestCalcQuery:
    def test_exk_hitting_set_route(self, exk):
        config = EngineConfig(qsm=QsmConfig(ENT, 0.01), qcm=QcmConfig(CARD))
        query, qp = calc_query(exk, leading_with(EX17_PROBS), config)
        assert qp.dplus == {D4, D5}
        assert query.sentences == frozenset(exk.sentences({3, 5, 6}))

    def test_circuit_enriched_route(self, circuit):
        leading = hs_tree(circuit, 10)
        config = EngineConfig(qsm=QsmConfig(ENT, 0.01),
                              qcm=QcmConfig.of(SUM, circuit.costs),
                              enhance=True)
        query, qp = calc_query(circuit, leading, config)
        assert qp.dplus == {C1} and qp.dminus == {C2, C3}
        assert query.sentences == frozenset({parse("!outX1")})

    def test_two_leading_has_query(self, exk):
        leading = leading_with({D1: 0.6, D5: 0.4})
        query, qp = calc_query(exk, leading, EngineConfig())
        assert qp.is_query_partition()
        got = partition(exk, [D1, D5], query.sentences)
        assert got == qp

    def test_single_leading_rejected(self, exk):
        with pytest.raises(DpiError):
            calc_query(exk, leading_with({D1: 1.0}), EngineConfig())


class TestBayesStep:
    def test_elimination_on_positive_answer(self, exk):
        # answering the single-sentence query {M -> B} positively rules out
        # the diagnoses that keep sentence 7 removable
        four = [D1, D2, D3, D4]
        q = [parse("M -> B")]
        qp = partition(exk, four, q)
        assert qp.dplus == {D1, D2} and qp.dminus == {D3, D4}
        updated = exk.with_positive(TestCase.of(*q))
        remaining = brute_min_diagnoses(updated)
        assert frozenset({2, 6}) not in remaining
        assert frozenset({2, 7}) not in remaining

    def test_zero_likelihood_renormalization(self, exk):
        state = SessionState(exk, EngineConfig(qsm=QsmConfig(ENT, 0.01)))
        qp = state.pending_qp
        state.step("false")
        assert math.isclose(sum(state.leading.probs.values()), 1.0)
        for d in qp.dplus:
            assert d not in set(state.leading)


class TestSession:
    def test_initial_state(self, exk):
        state = SessionState(exk)
        assert state.status == RUNNING
        assert len(state.leading) == 6
        assert state.pending_query is not None
        assert len(state.history) == 1
        assert state.history[-1].answer is None

    def test_invalid_dpi(self):
        dpi = parse_dpi("[K]\n1: A\n[B]\nQ\n[N]\nn1: Q\n", check_validity=False)
        with pytest.raises(DpiError):
            SessionState(dpi)

    def test_skip_offers_different_partition(self, exk):
        state = SessionState(exk)
        first = state.pending_qp
        state.step("skip")
        assert state.status == RUNNING
        assert state.pending_qp.dplus != first.dplus
        assert state.history[0].answer == "skip"

    def test_answer_after_done(self, circuit):
        result, _ = run(circuit, SimulatedOracle.for_target(circuit, C1),
                        EngineConfig(enhance=True))
        state = SessionState(circuit, EngineConfig(enhance=True))
        state.step("true")
        assert state.status == DONE
        with pytest.raises(DpiError):
            state.step("true")

    def test_bad_answer(self, exk):
        with pytest.raises(DpiError):
            SessionState(exk).step("maybe")

    def test_done_without_queries_on_unique_diagnosis(self):
        dpi = parse_dpi("[K]\n1: A\n[N]\nn1: A\n")
        state = SessionState(dpi)
        assert state.status == DONE
        assert state.result == Diagnosis.of(1)
        assert state.history == []


class TestRun:
    def test_circuit_single_measurement(self, circuit):
        oracle = SimulatedOracle.for_target(circuit, C1)
        result, transcript = run(circuit, oracle, EngineConfig(enhance=True))
        assert result == C1
        answered = [h for h in transcript if h["answer"] in ("true", "false")]
        assert len(answered) == 1
        assert answered[0]["query"] == ["!outX1"]
        assert answered[0]["answer"] == "true"

    def test_exk_reference_d5(self, exk):
        reference = solution_kb(exk, D5)
        oracle = SimulatedOracle(reference)
        result, transcript = run(exk, oracle, EngineConfig())
        assert result == D5
        for h in transcript:
            q = [parse(t) for t in h["query"]]
            expected = "true" if logic.entails(reference, q) else "false"
            assert h["answer"] == expected

    def test_exk_all_targets_recovered(self, exk):
        for target in ALL:
            oracle = SimulatedOracle.for_target(exk, target)
            result, _ = run(exk, oracle, EngineConfig())
            # the target stays consistent with every simulated answer, so it
            # must be the one diagnosis left standing
            assert result == target

    def test_threshold_goal_stops_early(self, circuit):
        config = EngineConfig(goal=Goal(G2_THRESHOLD, threshold=0.9))
        state = SessionState(circuit, config)
        assert state.status == DONE  # 0.93 already exceeds the bar
        assert state.result == C1


SMALL_DPIS = [
    "[K]\n1: A\n2: A -> B\n3: B -> C\n4: C\n[N]\nn1: C\n",
    "[K]\n1: A\n2: !A | B\n3: !B\n4: B -> D\n[B]\nE\n[N]\nn1: D\n",
    "[K]\n1: P -> Q\n2: P\n3: Q -> R\n4: !R\n5: Q\n[N]\nn1: R & P\n",
    "[K]\n1: X\n2: Y\n3: X & Y -> Z\n4: Z -> W\n[N]\nn1: W\nn2: Z & X\n",
]


class TestProperties:
    def test_posterior_normalized_throughout(self, exk):
        rng = random.Random(19)
        state = SessionState(exk)
        while state.status == RUNNING:
            assert math.isclose(sum(state.leading.probs.values()), 1.0)
            p_true, p_false = state.answer_probabilities()
            assert math.isclose(p_true + p_false, 1.0)
            state.step(rng.choice(["true", "false"]))
        assert state.result is not None

    def test_answered_queries_shrink_all_diagnoses(self):
        rng = random.Random(29)
        for text in SMALL_DPIS:
            dpi = parse_dpi(text)
            state = SessionState(dpi, EngineConfig(qsm=QsmConfig(ENT, 0.0)))
            while state.status == RUNNING:
                before = set(all_diagnoses(state.dpi))
                state.step(rng.choice(["true", "false"]))
                after = set(all_diagnoses(state.dpi))
                assert after < before

    def test_posed_queries_discriminate_everything(self, exk):
        rng = random.Random(37)
        state = SessionState(exk)
        while state.status == RUNNING:
            qp = state.pending_qp
            assert qp.dzero == frozenset()
            assert qp.dplus | qp.dminus == frozenset(state.leading)
            state.step(rng.choice(["true", "false"]))
