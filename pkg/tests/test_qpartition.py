import math
import random
from itertools import combinations

import pytest

from diagkit.diagnoses import LeadingDiagnoses, hs_tree
from diagkit.dpi import Diagnosis, DpiError, QPartition, partition
from diagkit.fixtures import exk_dpi
from diagkit.qpartition import (ENT, SPL, QsmConfig, SearchStats, canonical_query,
                                canonical_query_ids, discrimination_ids,
                                enumerate_cqps, is_cqp, qsm_value, s_init,
                                s_next, search_optimal_qp, union_ids, _make_node)

D1 = Diagnosis.of(2, 3)
D2 = Diagnosis.of(2, 5)
D3 = Diagnosis.of(2, 6)
D4 = Diagnosis.of(2, 7)
D5 = Diagnosis.of(1, 4, 7)
D6 = Diagnosis.of(3, 4, 7)
ALL = [D1, D2, D3, D4, D5, D6]

EX17_PROBS = {D1: 0.01, D2: 0.33, D3: 0.14, D4: 0.07, D5: 0.41, D6: 0.04}


@pytest.fixture(scope="module")
def exk():
    return exk_dpi()


def leading_with(probs):
    return LeadingDiagnoses(sorted(probs, key=lambda d: (-probs[d], d.sort_key())),
                            dict(probs))


class TestCanonicalQuery:
    LEADING = [D1, D5, D6]

    def test_table_rows(self, exk):
        # frozen seed -> canonical query table for D = {D1, D5, D6}
        rows = {
            (frozenset({D5, D6}),): {2},
            (frozenset({D1, D6}),): {1},
            (frozenset({D1}),): {1, 4, 7},
            (frozenset({D5}),): {2, 3},
            (frozenset({D6}),): {1, 2},
        }
        for (seed,), expected in rows.items():
            q = canonical_query(exk, self.LEADING, seed)
            assert q is not None
            assert q.sentences == frozenset(exk.sentences(expected))

    def test_undefined_seed(self, exk):
        assert canonical_query(exk, self.LEADING, {D1, D5}) is None

    def test_seed_bounds(self, exk):
        with pytest.raises(ValueError):
            canonical_query(exk, self.LEADING, set())
        with pytest.raises(ValueError):
            canonical_query(exk, self.LEADING, set(self.LEADING))

    def test_collapse_identity(self):
        # (K \ U_seed) restricted to Disc equals U_D \ U_seed
        rng = random.Random(3)
        for _ in range(100):
            n = rng.randrange(2, 7)
            leading = rng.sample(ALL, n)
            k = rng.randrange(1, n)
            seed = rng.sample(leading, k)
            via_disc = discrimination_ids(leading) & (
                frozenset(range(1, 8)) - union_ids(seed))
            assert canonical_query_ids(leading, seed) == \
                union_ids(leading) - union_ids(seed)
            # and both readings coincide on the discrimination sentences
            assert canonical_query_ids(leading, seed) == via_disc | (
                canonical_query_ids(leading, seed) - via_disc)

    def test_partition_of_canonical_query(self, exk):
        # the canonical query of the seed {D5, D6} splits exactly that way
        q = canonical_query(exk, self.LEADING, {D5, D6})
        qp = partition(exk, self.LEADING, q.sentences)
        assert qp.dplus == {D5, D6}
        assert qp.dminus == {D1}
        assert qp.dzero == frozenset()


class TestIsCqp:
    def test_examples(self):
        assert is_cqp(ALL, {D1, D2, D3}, {D4, D5, D6})
        assert not is_cqp(ALL, {D1, D2, D5}, {D3, D4, D6})

    def test_single_seeds(self):
        for d in ALL:
            assert is_cqp(ALL, {d}, set(ALL) - {d})

    def test_agrees_with_partition(self, exk):
        # semantic cross-check: where the canonical query exists, its real
        # partition matches the claimed split exactly when is_cqp says so
        for k in (1, 2, 3):
            for combo in combinations(ALL, k):
                dplus = set(combo)
                dminus = set(ALL) - dplus
                ids = union_ids(ALL) - union_ids(dplus)
                if not ids:
                    continue
                qp = partition(exk, ALL, [exk.sentence(i) for i in sorted(ids)])
                semantic = qp.dplus == frozenset(dplus) and \
                    qp.dminus == frozenset(dminus) and not qp.dzero
                assert is_cqp(ALL, dplus, dminus) == semantic, combo


class TestSuccessors:
    def test_s_init_counts(self):
        assert len(s_init(ALL)) == 6
        assert len(s_init([D1, D2])) == 2
        seeds = {tuple(sorted(next(iter(n.dplus)).ids)) for n in s_init(ALL)}
        assert seeds == {(2, 3), (2, 5), (2, 6), (2, 7), (1, 4, 7), (3, 4, 7)}

    def test_expand_d5_seed(self):
        node = _make_node({D5}, set(ALL) - {D5})
        succs = s_next(node)
        moved = {frozenset(s.dplus - node.dplus) for s in succs}
        assert moved == {frozenset({D4}), frozenset({D6})}

    def test_mutual_necessary_followers(self):
        node = _make_node({D2, D3, D4, D5}, {D1, D6})
        assert dict(node.traits)[D1] == frozenset({3})
        assert dict(node.traits)[D6] == frozenset({3})
        assert s_next(node) == []

    def test_equivalence_classes(self):
        node = _make_node({D4, D5}, {D1, D2, D3, D6})
        succs = s_next(node)
        moved = {frozenset(s.dplus - node.dplus) for s in succs}
        assert moved == {frozenset({D1, D6}), frozenset({D2}), frozenset({D3})}

    def test_forbidden_classes_skipped(self):
        node = _make_node({D4, D5}, {D1, D2, D3, D6})
        succs = s_next(node, forbidden=frozenset({D2}))
        moved = {frozenset(s.dplus - node.dplus) for s in succs}
        assert moved == {frozenset({D1, D6}), frozenset({D3})}

    def test_all_successors_are_cqps(self):
        frontier = s_init(ALL)
        seen = 0
        while frontier and seen < 500:
            node = frontier.pop()
            seen += 1
            assert is_cqp(ALL, node.dplus, node.dminus)
            frontier.extend(s_next(node))


class TestQsmValue:
    def test_ent_goal_value(self):
        qp = QPartition.of({D4, D5}, {D1, D2, D3, D6})
        v = qsm_value(ENT, qp, EX17_PROBS)
        assert math.isclose(v, 1 + 0.48 * math.log2(0.48) + 0.52 * math.log2(0.52),
                            abs_tol=1e-12)
        assert 0.0005 <= v <= 0.0020

    def test_ent_optimum(self):
        qp = QPartition.of({D2}, {D1})
        v = qsm_value(ENT, qp, {D1: 0.5, D2: 0.5})
        assert math.isclose(v, 0.0, abs_tol=1e-12)

    def test_spl(self):
        assert qsm_value(SPL, QPartition.of({D1, D2, D3}, {D4, D5, D6}), {}) == 0
        assert qsm_value(SPL, QPartition.of({D1}, {D2, D3}), {}) == 1
        assert qsm_value(SPL, QPartition.of({D1}, {D2}, {D3}), {}) == 1


class TestSearch:
    def test_ex17_trace_result(self):
        leading = leading_with(EX17_PROBS)
        qp, value = search_optimal_qp(leading, QsmConfig(ENT, 0.01))
        assert qp.dplus == {D4, D5}
        assert qp.dminus == {D1, D2, D3, D6}
        assert qp.dzero == frozenset()
        assert 0.0005 <= value <= 0.0020

    def test_circuit_first_visited_wins_tie(self):
        from diagkit.circuit import circuit_dpi
        from diagkit.diagnoses import hs_tree
        leading = hs_tree(circuit_dpi()[0], 10)
        qp, _ = search_optimal_qp(leading, QsmConfig(ENT, 0.01))
        # the complement split has the exact same ENT value; the most biased
        # seed is explored first and keeps the spot
        assert qp.dplus == {Diagnosis.of(1)}
        assert qp.dminus == {Diagnosis.of(2, 4), Diagnosis.of(2, 5)}

    def test_two_leading(self):
        leading = leading_with({D1: 0.7, D2: 0.3})
        qp, value = search_optimal_qp(leading, QsmConfig(SPL, 0.0))
        assert value == 0
        assert len(qp.dplus) == 1 and len(qp.dminus) == 1

    def test_too_few_leading(self):
        with pytest.raises(DpiError):
            search_optimal_qp(leading_with({D1: 1.0}), QsmConfig())

    def test_excluded_partitions_are_skipped(self):
        leading = leading_with(EX17_PROBS)
        qp1, _ = search_optimal_qp(leading, QsmConfig(ENT, 0.01))
        qp2, _ = search_optimal_qp(leading, QsmConfig(ENT, 0.01),
                                   excluded=[qp1.dplus])
        assert qp2.dplus != qp1.dplus

    def test_goal_optimality_unpruned(self):
        rng = random.Random(17)
        for _ in range(10):
            n = rng.randrange(2, 6)
            sample = rng.sample(ALL, n)
            raw = [rng.uniform(0.05, 1.0) for _ in sample]
            total = sum(raw)
            probs = {d: r / total for d, r in zip(sample, raw)}
            leading = leading_with(probs)
            _, value = search_optimal_qp(leading, QsmConfig(ENT, 0.0),
                                         prune=False)
            brute = min(qsm_value(ENT, qp, probs)
                        for qp in enumerate_cqps(sample))
            assert math.isclose(value, brute, abs_tol=1e-9)

    def test_pruning_never_hurts(self):
        rng = random.Random(23)
        for _ in range(10):
            sample = rng.sample(ALL, rng.randrange(2, 7))
            raw = [rng.uniform(0.05, 1.0) for _ in sample]
            total = sum(raw)
            probs = {d: r / total for d, r in zip(sample, raw)}
            leading = leading_with(probs)
            _, pruned = search_optimal_qp(leading, QsmConfig(ENT, 0.0))
            _, full = search_optimal_qp(leading, QsmConfig(ENT, 0.0), prune=False)
            assert math.isclose(pruned, full, abs_tol=1e-9)

    def test_search_stats_populated(self):
        stats = SearchStats()
        search_optimal_qp(leading_with(EX17_PROBS), QsmConfig(ENT, 0.01),
                          stats=stats)
        assert stats.generated >= 6
        assert stats.expanded >= 1


def reachable_cqps(diagnoses):
    """Exhaustive traversal of the successor relation, no pruning."""
    seen = set()
    frontier = s_init(diagnoses)
    while frontier:
        node = frontier.pop()
        key = (node.dplus, node.dminus)
        if key in seen:
            continue
        seen.add(key)
        frontier.extend(s_next(node))
    return {QPartition(p, m, frozenset()) for p, m in seen}


class TestEnumerateCqps:
    def test_exk_count(self):
        assert len(enumerate_cqps(ALL)) == 29

    def test_disjoint_counts(self):
        for n in range(2, 9):
            diagnoses = [Diagnosis.of(2 * i, 2 * i + 1) for i in range(n)]
            assert len(enumerate_cqps(diagnoses)) == 2 ** n - 2

    def test_minimum_two(self):
        assert len(enumerate_cqps([D1, D2])) == 2

    def test_cap(self):
        many = [Diagnosis.of(i) for i in range(25)]
        with pytest.raises(ValueError):
            enumerate_cqps(many)

    def test_matches_successor_traversal(self):
        rng = random.Random(31)
        cases = [ALL] + [rng.sample(ALL, rng.randrange(2, 6)) for _ in range(8)]
        for diagnoses in cases:
            assert reachable_cqps(diagnoses) == enumerate_cqps(diagnoses)

    def test_all_enumerated_are_cqps(self):
        for qp in enumerate_cqps(ALL):
            assert is_cqp(ALL, qp.dplus, qp.dminus)


class TestEmptyDzeroConjecture:
    def test_exk_scan(self, exk):
        """Empirical scan: every empty-D0 q-partition over subsets of the
        fixture's diagnoses is canonical.  Reports counterexamples."""
        rng = random.Random(41)
        counterexamples = []
        selections = [ALL] + [rng.sample(ALL, n) for n in (3, 4, 5)]
        for leading in selections:
            cqps = enumerate_cqps(leading)
            for k in range(1, len(leading)):
                for combo in combinations(leading, k):
                    dplus = set(combo)
                    dminus = set(leading) - dplus
                    ids = union_ids(leading) - union_ids(dplus)
                    if not ids:
                        continue
                    qp = partition(exk, leading,
                                   [exk.sentence(i) for i in sorted(ids)])
                    if qp.dzero or qp.dplus != frozenset(dplus):
                        continue  # not a q-partition of this exact shape
                    found = QPartition(qp.dplus, qp.dminus, frozenset())
                    if found not in cqps:
                        counterexamples.append((sorted(map(sorted, dplus)),
                                                sorted(map(sorted, dminus))))
        assert counterexamples == []
