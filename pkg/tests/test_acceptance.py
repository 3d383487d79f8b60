"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line with its wall time
and budget, and fails when the check fails or the budget is exceeded. Run on
its own with ``pytest tests/test_acceptance.py -q`` or as a script.
"""

import itertools
import math
import random
import sys
import time
from fractions import Fraction

import pytest

from abelnet import algebra, dynamics, enumeration, recurrence, zoo
from abelnet.core import (
    Configuration,
    Digraph,
    Stable,
    exchange_join,
    execute_vector,
    execute_word,
    firing_counts,
    is_legal,
    remove,
    stabilize,
)
from oracles import c3, c3_inverse, gapless_network, two_vertex_multigraph

F = Fraction


class Criterion:
    def __init__(self, capsys, number, title, budget):
        self.capsys, self.number, self.title, self.budget = capsys, number, title, budget

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        passed = exc_type is None and elapsed < self.budget
        with self.capsys.disabled():
            verdict = "PASS" if passed else "FAIL"
            print(f"\ncriterion {self.number}: {verdict}  {elapsed:7.2f}s of {self.budget}s  {self.title}")
        if exc_type is None:
            assert elapsed < self.budget, f"took {elapsed:.2f}s, budget {self.budget}s"
        return False


@pytest.fixture
def criterion(capsys):
    return lambda number, title, budget: Criterion(capsys, number, title, budget)


def test_criterion_1_toppling_groups(criterion):
    with criterion(1, "toppling groups on C3", 1.0):
        groups = {t: algebra.torsion_group(zoo.toppling(c3(), [t] * 3)) for t in (1, 2, 3)}
        assert groups[3].divisors == (4, 4) and groups[3].free_rank == 0
        assert groups[2].divisors == (3,)
        assert algebra.grothendieck_invariants(zoo.toppling(c3(), [2] * 3)).free_rank == 1
        assert groups[1].divisors == (2, 2) and groups[1].free_rank == 0


def test_criterion_2_weight_table(criterion):
    with criterion(2, "rotor weight-class table n = 3..5", 30.0):
        assert enumeration.weight_class_counts(3, 3) == [26, 24, 24]
        assert enumeration.weight_class_counts(4, 4) == [122, 120, 118, 120]
        assert enumeration.weight_class_counts(5, 5) == [642, 640, 640, 640, 640]


def test_criterion_3_determinantal_identity(criterion):
    with criterion(3, "determinant equals enumeration to degree 5", 60.0):
        for g in (c3(), Digraph.bidirected_cycle(4)):
            net = zoo.rotor(g)
            det = enumeration.series_determinant(net, 5)
            assert det.differences(enumeration.series_bruteforce(net, 5)) == []
        assert enumeration.series_determinant(zoo.rotor(c3()), 3).univariate()[3] == 74


def test_criterion_4_burning_tests(criterion):
    with criterion(4, "critical and subcritical burning tests", 1.0):
        sand = zoo.sandpile(c3())
        cert = recurrence.burning_test_critical(sand, sand.config((2, 1, 0), (0, 0, 0)))
        assert cert.verdict and cert.counts == (2, 2, 2) and cert.state_returned
        sink = zoo.sandpile(c3(), [0])
        q = (0, 1, 1)
        assert recurrence.burning_test_subcritical(sink, q, (2, 2, 2))
        res = recurrence.stabilize_subcritical(sink, Configuration((2, 0, 0), q))
        assert res.config == Configuration((0, 0, 0), q)


def test_criterion_5_row_chip_firing(criterion):
    with criterion(5, "row chip-firing example", 1.0):
        net = zoo.row_chip_firing(two_vertex_multigraph())
        assert algebra.production_matrix(net) == [[0, F(2, 3)], [F(3, 2), 0]]
        assert algebra.exchange_rate(net) == (3, 2)
        assert sorted(recurrence.state_levels(net).values()) == [0, 2, 3, 4, 5, 7]
        assert recurrence.network_capacity(net) == 7
        assert recurrence.stoppable_levels(net) == {0, 1, 2, 3, 4, 5, 7}


def test_criterion_6_capacity_closed_forms(criterion):
    with criterion(6, "capacity by bounded search", 10.0):
        g = c3()
        assert recurrence.capacity(zoo.rotor(g)) == 0
        assert recurrence.capacity(zoo.sandpile(g)) == 3 == len(g.edges()) - len(g.vertices)
        tau = [1, 2, 2]
        assert recurrence.capacity(zoo.height_arrow(g, tau)) == sum(t - 1 for t in tau)


def test_criterion_7_activity(criterion):
    with criterion(7, "activity vectors and the monotonicity counterexample", 1.0):
        sand = zoo.sandpile(c3())
        par = dynamics.activity_vector(sand, sand.config((0, 0, 1), (1, 1, 1)), dynamics.parallel())
        assert par == (1, 1, 1)
        sav = dynamics.activity_vector(sand, sand.config((1, 1, 1), (0, 1, 1)), dynamics.savings([0]))
        assert sav == (F(2, 3),) * 3
        report = dynamics.check_H1_H2(dynamics.savings([0, 1]), sand, samples=0)
        assert not report.h2_ok


def _random_walk(net, cfg, rng, limit):
    w, cur = [], cfg
    for _ in range(limit):
        live = [a for a, c in zip(net.alphabet, cur.x) if c >= 1]
        if not live:
            break
        a = rng.choice(live)
        w.append(a)
        cur = execute_word(net, cur, [a])[0]
    return w, cur


def test_criterion_8_property_suites(criterion):
    nets = [zoo.sandpile(c3()), zoo.rotor(c3()), gapless_network(), c3_inverse(),
            zoo.row_chip_firing(two_vertex_multigraph()), zoo.height_arrow(c3(), [1, 2, 2])]
    with criterion(8, "property suites with zero violations", 300.0):
        rng = random.Random(2024)
        for net in nets:
            states = list(net.all_states())
            for _ in range(300):
                cfg = Configuration(tuple(rng.randint(0, 3) for _ in net.alphabet), rng.choice(states))
                w = [rng.choice(net.alphabet) for _ in range(rng.randint(0, 10))]
                shuffled = rng.sample(w, len(w))
                assert execute_word(net, cfg, w)[0] == execute_word(net, cfg, shuffled)[0]
                legal, _ = _random_walk(net, cfg, rng, 20)
                n = tuple(rng.randint(0, 2) for _ in net.alphabet)
                assert is_legal(net, execute_vector(net, cfg, n), remove(legal, net.as_mapping(n)))
                w1, _ = _random_walk(net, cfg, rng, 8)
                w2, _ = _random_walk(net, cfg, rng, 8)
                join = exchange_join(net, cfg, w1, w2)
                assert is_legal(net, cfg, w1 + join)
                assert firing_counts(net, w1 + join) == tuple(
                    max(a, b) for a, b in zip(firing_counts(net, w1), firing_counts(net, w2)))
        for net in (zoo.sandpile(c3()), zoo.toppling(c3(), [3, 3, 3]), zoo.sandpile(c3(), [0])):
            states = list(net.all_states())
            for _ in range(300):
                cfg = Configuration(tuple(rng.randint(0, 3) for _ in net.alphabet), rng.choice(states))
                res = stabilize(net, cfg, step_cap=10**4)
                if isinstance(res, Stable):
                    w, _ = _random_walk(net, cfg, rng, 20)
                    assert all(a <= b for a, b in zip(firing_counts(net, w), res.counts))
        for net in (zoo.rotor(c3()), c3_inverse()):
            for q in net.all_states():
                for x in itertools.product(range(4), repeat=len(net.alphabet)):
                    if sum(x) <= 3:
                        cfg = Configuration(x, q)
                        assert recurrence.cycle_test(net, cfg) == recurrence.burning_test_critical(net, cfg).verdict
        critical = [n for n in nets if algebra.classify(n).tag == algebra.CRITICAL]
        executions = 0
        while executions < 10_000:
            net = critical[executions % len(critical)]
            loc = net._memo.setdefault("acceptance_loc", list(itertools.product(*algebra.locally_recurrent_states(net))))
            start = Configuration(tuple(rng.randint(0, 4) for _ in net.alphabet), rng.choice(loc))
            w, end = _random_walk(net, start, rng, rng.randint(0, 30))
            assert dynamics.balance_check(net, start, end, w).ok
            lv = recurrence.level(net, start)
            assert recurrence.level(net, end) == lv
            executions += 1


def test_criterion_9_components_per_level(criterion):
    with criterion(9, "recurrent components of rotor C3 per level", 60.0):
        net = zoo.rotor(c3())
        tor = algebra.torsion_group(net).torsion_order
        assert tor == math.gcd(3, 3, 3) == 3
        for m in range(1, 5):
            res = enumeration.components_per_level(net, m)
            assert res.count == 3 == tor


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
