import itertools
import random

import pytest
from hypothesis import given, strategies as st

from abelnet import algebra, recurrence, zoo
from abelnet.core import Configuration, Digraph, execute_word
from abelnet.errors import BadWitnessVector, BoxTooSmall, NotAgentNetwork, NotLocallyRecurrent
from oracles import (
    c3,
    c3_inverse,
    capacity_bruteforce,
    gapless_network,
    loop_inverse,
    recurrent_by_definition,
    recurrent_states_by_monoid,
    two_vertex_multigraph,
)

SAND = zoo.sandpile(c3())
ROTOR = zoo.rotor(c3())
ROTOR4 = zoo.rotor(Digraph.bidirected_cycle(4))
RCF = zoo.row_chip_firing(two_vertex_multigraph())
CRITICAL_NETS = [SAND, ROTOR, gapless_network(), RCF, zoo.height_arrow(c3(), [1, 2, 2])]


# ------------------------------------------------------------ critical burning


def test_burning_examples():
    cert = recurrence.burning_test_critical(SAND, SAND.config((2, 1, 0), (0, 0, 0)))
    assert cert.verdict and cert.counts == (2, 2, 2) and cert.state_returned
    end, legal = execute_word(SAND, SAND.config((2, 1, 0)), cert.witness)
    assert legal and end == SAND.config((2, 1, 0))
    assert not recurrence.burning_test_critical(SAND, SAND.config((1, 2, -1), (0, 1, 0))).verdict


@pytest.mark.parametrize("net", CRITICAL_NETS, ids=lambda n: n.family)
def test_burning_test_matches_definition(net):
    box = range(-1, 3)
    for q in net.all_states():
        if not algebra.is_locally_recurrent(net, q):
            continue
        for x in itertools.product(box, repeat=len(net.alphabet)):
            cfg = Configuration(x, q)
            verdict = recurrence.burning_test_critical(net, cfg).verdict
            assert verdict == recurrent_by_definition(net, cfg), cfg


@pytest.mark.parametrize("net", CRITICAL_NETS, ids=lambda n: n.family)
def test_burning_verdict_is_order_independent(net):
    rng = random.Random(3)
    rev = list(reversed(net.alphabet))
    for _ in range(300):
        cfg = Configuration(tuple(rng.randint(-1, 4) for _ in net.alphabet), rng.choice(list(net.all_states())))
        a = recurrence.burning_test_critical(net, cfg).verdict
        assert a == recurrence.burning_test_critical(net, cfg, order=rev).verdict


@pytest.mark.parametrize("net", CRITICAL_NETS, ids=lambda n: n.family)
def test_recurrence_is_monotone(net):
    rng = random.Random(8)
    for _ in range(300):
        cfg = Configuration(tuple(rng.randint(0, 3) for _ in net.alphabet), rng.choice(list(net.all_states())))
        if recurrence.is_recurrent(net, cfg):
            more = Configuration(tuple(c + rng.randint(0, 2) for c in cfg.x), cfg.q)
            assert recurrence.is_recurrent(net, more)


# ---------------------------------------------------------- subcritical burning


def test_sink_network_examples():
    net = zoo.sandpile(c3(), [0])
    assert len(list(net.all_states())) == 8
    assert recurrence.burning_test_subcritical(net, (0, 1, 1), (2, 2, 2))
    assert not recurrence.burning_test_subcritical(net, (0, 0, 0), (2, 2, 2))
    assert recurrence.default_witness(net) == (2, 6, 6)


@pytest.mark.parametrize("net", [zoo.sandpile(c3(), [0]), zoo.toppling(c3(), [3, 3, 3]),
                                 zoo.height_arrow(c3(), [2, 2, 2], [1]),
                                 zoo.thief(c3_inverse(), ["a0", "b0", "a1", "b1", "a2"]),
                                 zoo.toppling(Digraph.complete(4), [4, 3, 4, 5])], ids=str)
def test_subcritical_test_matches_monoid(net):
    expected = recurrent_states_by_monoid(net)
    k = recurrence.default_witness(net)
    found = {q for q in net.all_states() if recurrence.burning_test_subcritical(net, q, k)}
    assert found == expected
    doubled = tuple(2 * c for c in k)
    assert {q for q in net.all_states() if recurrence.burning_test_subcritical(net, q, doubled)} == expected


def test_bad_witness():
    net = zoo.sandpile(c3(), [0])
    with pytest.raises(BadWitnessVector):
        recurrence.burning_test_subcritical(net, (0, 1, 1), (1, 1, 1))
    with pytest.raises(BadWitnessVector):
        recurrence.burning_test_subcritical(net, (0, 1, 1), (0, 2, 2))


@pytest.mark.parametrize("base", [SAND, ROTOR, gapless_network(), c3_inverse()], ids=lambda n: n.family)
def test_thief_recurrence_links_to_base(base):
    r = algebra.period_vector(base)
    alphabet = list(base.alphabet)
    subsets = [set(c) for k in range(1, len(alphabet)) for c in itertools.combinations(alphabet, k)]
    random.Random(0).shuffle(subsets)
    for keep in subsets[:10]:
        thief = zoo.thief(base, keep)
        if not algebra.is_strongly_connected(thief) and algebra.classify(thief).tag != algebra.SUBCRITICAL:
            continue
        x = tuple(0 if a in keep else c for a, c in zip(alphabet, r))
        agent = recurrence.is_agent(base)
        for q in itertools.product(*algebra.locally_recurrent_states(base)):
            on_thief = q in recurrent_states_by_monoid(thief) if len(alphabet) <= 3 else \
                recurrence.burning_test_subcritical(thief, q)
            assert on_thief == recurrence.is_recurrent(base, Configuration(x, q))
            if agent:
                cycles = recurrence.rotor_digraph(base, q).cycles()
                assert on_thief == all(set(c) - keep for c in cycles)


# -------------------------------------------------------------------- agents


def test_agent_detection():
    assert recurrence.is_agent(ROTOR) and recurrence.is_agent(c3_inverse())
    assert not recurrence.is_agent(SAND) and not recurrence.is_agent(RCF)
    with pytest.raises(NotAgentNetwork):
        recurrence.cycle_test(SAND, SAND.config((1, 1, 1)))
    with pytest.raises(NotLocallyRecurrent):
        recurrence.rotor_digraph(zoo.rotor(c3()), (0, 0, 0))


def test_rotor_digraph_of_rotor_network_is_the_rotors():
    g = Digraph.bidirected_cycle(4)
    targets = {e: t for e, _, t in g.edges()}
    for q in ROTOR4.all_states():
        succ = recurrence.rotor_digraph(ROTOR4, q).successor
        assert succ == {v: targets[e] for v, e in zip(g.vertices, q)}


def test_chip_on_rotor_cycle_is_recurrent():
    # rotors 0->1, 1->0, 2->1, 3->2: the only cycle is 0 <-> 1
    q = (1, 2, 4, 6)
    assert recurrence.cycle_test(ROTOR4, ROTOR4.config((1, 0, 0, 0), q))
    assert not recurrence.cycle_test(ROTOR4, ROTOR4.config((0, 0, 0, 1), q))
    assert not recurrence.cycle_test(ROTOR4, ROTOR4.config((0, 0, 0, 0), q))


def test_inverse_states_share_rotor_digraph():
    net = c3_inverse()
    a = recurrence.rotor_digraph(net, (1, 1, 1))
    b = recurrence.rotor_digraph(net, (2, 2, 2))
    assert a == b
    assert sorted(sorted(c) for c in a.cycles()) == [["a0", "a1", "a2"], ["b0", "b1", "b2"]]


def test_single_loop_rotor_digraph():
    net = loop_inverse()
    for q in net.all_states():
        succ = recurrence.rotor_digraph(net, q).successor
        assert set(succ) == {"a", "b"}


@pytest.mark.parametrize("net", [ROTOR, c3_inverse(), loop_inverse()], ids=lambda n: n.family)
def test_cycle_test_matches_burning_test(net):
    for q in net.all_states():
        for x in itertools.product(range(4), repeat=len(net.alphabet)):
            if sum(x) > 3:
                continue
            cfg = Configuration(x, q)
            assert recurrence.cycle_test(net, cfg) == recurrence.burning_test_critical(net, cfg).verdict


def test_recurrence_depends_on_support_for_agents():
    rng = random.Random(6)
    net = c3_inverse()
    states = list(net.all_states())
    for _ in range(300):
        x = [rng.choice([0, 0, 1, 2, 3]) for _ in net.alphabet]
        y = [rng.randint(1, 4) if c else 0 for c in x]
        q = rng.choice(states)
        assert recurrence.cycle_test(net, Configuration(x, q)) == \
            recurrence.burning_test_critical(net, Configuration(y, q)).verdict


# -------------------------------------------------------------- halting, capacity


def test_halts():
    assert recurrence.halts(SAND, SAND.config((1, 1, 1))) is True
    assert recurrence.halts(SAND, SAND.config((2, 1, 1))) is False
    assert recurrence.halts(ROTOR, ROTOR.config((1, 0, 0))) is False
    assert recurrence.halts(ROTOR, ROTOR.config((0, -3, 0))) is True


def test_capacity_closed_forms():
    assert recurrence.capacity(ROTOR) == 0
    assert recurrence.capacity(SAND) == 3
    c4 = Digraph.bidirected_cycle(4)
    sand4 = zoo.sandpile(c4)
    assert recurrence.capacity(sand4, sand4.config().q) == 4
    assert recurrence.capacity(zoo.height_arrow(c3(), [1, 2, 2])) == 2
    arrows = zoo.height_arrow(c4, [2, 1, 2, 2])
    low = max(arrows.all_states(), key=lambda q: recurrence.state_capacity(arrows, q))
    assert recurrence.capacity(arrows, low) == recurrence.network_capacity(arrows) == 3
    assert recurrence.capacity(zoo.toppling(c3(), [3, 3, 3])) is recurrence.UNBOUNDED


def test_capacity_search_matches_bruteforce():
    for net, q in ((SAND, (0, 0, 0)), (SAND, (1, 0, 1)), (RCF, (1, 2)), (gapless_network(), (0, 1))):
        res = recurrence.capacity_search(net, q, box=4)
        assert res.value == capacity_bruteforce(net, q, algebra.exchange_rate(net), 4)


def test_capacity_matches_potential():
    for net in (SAND, RCF, gapless_network(), zoo.height_arrow(c3(), [2, 2, 1])):
        assert recurrence.capacity(net, box=5) == recurrence.network_capacity(net)
        for q in itertools.product(*algebra.locally_recurrent_states(net)):
            assert recurrence.capacity(net, q, box=5) == recurrence.state_capacity(net, q)


def test_box_too_small_is_reported():
    with pytest.raises(BoxTooSmall) as info:
        recurrence.capacity_search(RCF, (0, 0), box=1)
    assert info.value.value <= 7


# ----------------------------------------------------------- levels and stops


def test_row_chip_firing_levels():
    assert recurrence.state_levels(RCF) == {(0, 0): 0, (0, 1): 2, (0, 2): 4, (1, 0): 3, (1, 1): 5, (1, 2): 7}
    assert recurrence.network_capacity(RCF) == 7
    assert recurrence.stoppable_levels(RCF) == {0, 1, 2, 3, 4, 5, 7}


def test_gapless_network_levels():
    net = gapless_network()
    assert recurrence.state_levels(net) == {(0, 0): 0, (0, 1): 2, (0, 2): 1, (1, 0): 1, (1, 1): 3, (1, 2): 2}
    assert recurrence.network_capacity(net) == 3
    assert recurrence.stoppable_levels(net) == {0, 1, 2, 3}


def test_height_arrow_level_counts_all_chips():
    net = zoo.height_arrow(c3(), [1, 2, 2])
    for q in net.all_states():
        for x in itertools.product(range(-1, 3), repeat=3):
            assert recurrence.level(net, Configuration(x, q)) == sum(x) + sum(c for _, c in q)


def test_agent_stop_set_is_zero():
    for net in (ROTOR, c3_inverse(), loop_inverse()):
        assert recurrence.network_capacity(net) == 0
        assert recurrence.stoppable_levels(net) == {0}


@pytest.mark.parametrize("net", CRITICAL_NETS + [c3_inverse()], ids=lambda n: n.family)
def test_stop_set_bounds(net):
    stop = recurrence.stoppable_levels(net)
    cpt = recurrence.network_capacity(net)
    assert stop <= set(range(cpt + 1))
    if 1 in algebra.exchange_rate(net):
        assert stop == set(range(cpt + 1))


@pytest.mark.parametrize("net", CRITICAL_NETS + [c3_inverse()], ids=lambda n: n.family)
def test_stop_set_by_halting_configurations(net):
    # levels of halted configurations x.q with x <= 0 and q locally recurrent
    found = set()
    loc = list(itertools.product(*algebra.locally_recurrent_states(net)))
    low = -4 if len(net.alphabet) <= 3 else -1
    for q in loc:
        for x in itertools.product(range(low, 1), repeat=len(net.alphabet)):
            lv = recurrence.level(net, Configuration(x, q))
            if lv >= 0:
                found.add(lv)
    assert found == recurrence.stoppable_levels(net)


@pytest.mark.parametrize("net", CRITICAL_NETS + [c3_inverse()], ids=lambda n: n.family)
def test_level_is_conserved(net):
    rng = random.Random(12)
    loc = list(itertools.product(*algebra.locally_recurrent_states(net)))
    for _ in range(200):
        cfg = Configuration(tuple(rng.randint(-1, 3) for _ in net.alphabet), rng.choice(loc))
        lv = recurrence.level(net, cfg)
        for _ in range(15):
            live = [a for a, c in zip(net.alphabet, cfg.x) if c >= 1]
            if not live:
                break
            cfg = execute_word(net, cfg, [rng.choice(live)])[0]
            assert recurrence.level(net, cfg) == lv


def test_semigroup_members():
    assert recurrence.semigroup_members([3, 2], 7) == {0, 2, 3, 4, 5, 6, 7}
    assert recurrence.semigroup_members([5], 11) == {0, 5, 10}


INV = c3_inverse()


@given(st.lists(st.integers(0, 3), min_size=6, max_size=6),
       st.tuples(*[st.integers(0, 5)] * 3))
def test_cycle_test_agrees_with_burning_property(x, q):
    cfg = Configuration(tuple(x), q)
    assert recurrence.cycle_test(INV, cfg) == recurrence.burning_test_critical(INV, cfg).verdict
