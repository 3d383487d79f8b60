from fractions import Fraction

import pytest

from abelnet import zoo
from abelnet.algebra import production_matrix
from abelnet.core import Digraph, Network, Processor
from abelnet.errors import InvalidSpec
from abelnet.netfile import dumps, loads
from oracles import c3, c3_inverse, gapless_network, loop_inverse, two_vertex_multigraph

GRAPHS = {"C3": c3(), "C4": Digraph.bidirected_cycle(4), "K4": Digraph.complete(4),
          "multi": two_vertex_multigraph()}


def all_builtins():
    out = []
    for name, g in GRAPHS.items():
        out += [zoo.rotor(g), zoo.sandpile(g), zoo.branching_rotor(g)]
        degs = [len(r) for r in g.out_edges]
        out += [zoo.height_arrow(g, [max(1, d - 1) for d in degs]), zoo.toppling(g, [d + 1 for d in degs])]
    out += [zoo.sandpile(c3(), [0]), zoo.height_arrow(c3(), [2, 2, 2], [1]), loop_inverse(), c3_inverse(),
            zoo.arithmetical(c3(), [1, 3, 3], [2, 1, 1]), zoo.row_chip_firing(two_vertex_multigraph())]
    return out


BUILTINS = all_builtins()


@pytest.mark.parametrize("net", BUILTINS, ids=lambda n: f"{n.family}-{len(n.vertices)}")
def test_builtins_are_abelian(net):
    assert zoo.validate_abelian(net).ok


@pytest.mark.parametrize("net", BUILTINS, ids=lambda n: f"{n.family}-{len(n.vertices)}")
def test_builtins_round_trip(net):
    assert zoo.build(zoo.spec_of(net)) == net
    assert loads(dumps(net)) == net
    assert loads(dumps(net, explicit=True)) == net


def test_single_loop_inverse_table_is_abelian():
    net = loop_inverse()
    assert zoo.validate_abelian(net).violations == []
    p = net.processors[0]
    for i in range(7):
        assert p.emit[(i, "a")] != p.emit[((i + 1) % 7, "b")]


def _mutated_inverse():
    base = loop_inverse()
    p = base.processors[0]
    emit = dict(p.emit)
    emit[(3, "a")] = {"b": 1} if emit[(3, "a")] == {"a": 1} else {"a": 1}
    return Network(base.digraph, [Processor(p.vertex, p.letters, p.states, p.next, emit)])


def test_mutation_is_flagged_exactly():
    net = _mutated_inverse()
    found = {(v.vertex, v.state, v.first, v.second, v.kind) for v in zoo.validate_abelian(net).violations}
    # emit(3, a) enters the check at state 3 directly and at state 4 through next(4, b) = 3
    assert found == {("v", 3, "a", "b", "message"), ("v", 4, "a", "b", "message")}


def test_transition_mutation_is_flagged():
    base = loop_inverse()
    p = base.processors[0]
    nxt = dict(p.next)
    nxt[(2, "a")] = 5
    net = Network(base.digraph, [Processor(p.vertex, p.letters, p.states, nxt, p.emit)])
    kinds = {v.kind for v in zoo.validate_abelian(net).violations}
    assert "transition" in kinds


def test_unary_mutation_cannot_break_the_axioms():
    # with a single letter per vertex both conditions compare a letter with itself
    base = zoo.sandpile(c3())
    p = base.processors[0]
    emit = dict(p.emit)
    emit[(0, 0)] = {1: 1}
    net = Network(base.digraph, [Processor(p.vertex, p.letters, p.states, p.next, emit)] + list(base.processors[1:]))
    assert zoo.validate_abelian(net).ok


@pytest.mark.parametrize("name", ["C3", "C4", "K4", "multi"])
def test_production_matrix_is_adjacency_over_degree(name):
    g = GRAPHS[name]
    adj = g.adjacency()
    deg = [len(r) for r in g.out_edges]
    expected = [[Fraction(adj[i][j], deg[j]) for j in range(len(deg))] for i in range(len(deg))]
    for net in (zoo.rotor(g), zoo.sandpile(g), zoo.height_arrow(g, [1] * len(deg)),
                zoo.height_arrow(g, deg)):
        assert production_matrix(net) == expected
    assert production_matrix(zoo.branching_rotor(g)) == [[2 * c for c in row] for row in expected]


def test_branching_rotor_columns_sum_to_two():
    for g in GRAPHS.values():
        p = production_matrix(zoo.branching_rotor(g))
        assert all(sum(p[i][j] for i in range(len(p))) == 2 for j in range(len(p)))


def test_branching_rotor_visits_the_next_two_edges():
    g = Digraph.complete(5)
    net = zoo.branching_rotor(g)
    p = net.processors[0]
    row = g.out_edges[0]
    assert p.states == (row[0][0], row[2][0])
    assert p.next[(row[0][0], 0)] == row[2][0]
    assert p.emit[(row[0][0], 0)] == {row[1][1]: 1, row[2][1]: 1}
    assert len(zoo.branching_rotor(Digraph.complete(4)).states[0]) == 3


def test_toppling_two_is_sandpile():
    assert zoo.toppling(c3(), [2, 2, 2]) == zoo.sandpile(c3())


def test_arithmetical_validation():
    zoo.arithmetical(c3(), [1, 3, 3], [2, 1, 1])
    with pytest.raises(InvalidSpec):
        zoo.arithmetical(c3(), [1, 3, 3], [1, 1, 1])
    with pytest.raises(InvalidSpec):
        zoo.arithmetical(c3(), [2, 2, 2], [2, 2, 2])


def test_row_chip_firing_vector():
    net = zoo.row_chip_firing(two_vertex_multigraph())
    assert net.params == {"D": [2, 3], "b": [1, 1]}


def test_height_arrow_state_space():
    net = zoo.height_arrow(Digraph.complete(4), [2, 2, 2, 2])
    # arrows move by two on three out-edges, so every arrow position is reachable
    assert len(net.states[0]) == 3 * 2
    net = zoo.height_arrow(Digraph.bidirected_cycle(4), [2, 2, 2, 2])
    assert net.states[0] == ((0, 0), (0, 1))
    with pytest.raises(InvalidSpec):
        zoo.height_arrow(c3(), [3, 1, 1])


def test_builder_errors():
    with pytest.raises(InvalidSpec):
        zoo.sandpile(c3(), ["nope"])
    with pytest.raises(InvalidSpec):
        zoo.build(zoo.NetworkSpec("height_arrow_sinked", c3(), {"tau": [1, 1, 1]}))
    with pytest.raises(InvalidSpec):
        zoo.build(zoo.NetworkSpec("weird", c3(), {}))
    with pytest.raises(InvalidSpec):
        zoo.toppling(c3(), [2, 2])
    with pytest.raises(InvalidSpec):
        zoo.inverse(c3(), [2, 2, 2], [["a1", "a1"]] * 3)


# ------------------------------------------------------------------------ thief


def test_thief_full_alphabet_is_identity():
    net = zoo.sandpile(c3())
    assert zoo.thief(net, net.alphabet) == net


def test_sinked_height_arrow_is_a_thief():
    base = zoo.height_arrow(c3(), [2, 2, 2])
    sinked = zoo.height_arrow(c3(), [2, 2, 2], [0])
    assert zoo.thief(base, [1, 2]) == sinked
    assert zoo.thief(zoo.sandpile(c3()), [1, 2]) == zoo.sandpile(c3(), [0])


@pytest.mark.parametrize("keep", [[0], [1, 2], [0, 2]])
def test_thief_production_matrix(keep):
    net = zoo.sandpile(c3())
    p = production_matrix(net)
    t = production_matrix(zoo.thief(net, keep))
    for i in range(3):
        assert t[i] == (p[i] if i in keep else [0, 0, 0])


def test_thief_composes_by_intersection():
    net = c3_inverse()
    r1, r2 = ["a0", "b0", "a1", "b2"], ["a0", "a1", "a2"]
    assert zoo.thief(zoo.thief(net, r1), r2) == zoo.thief(net, set(r1) & set(r2))
    assert zoo.thief(zoo.thief(net, r1), r1) == zoo.thief(net, r1)
    with pytest.raises(InvalidSpec):
        zoo.thief(net, ["zz"])


def test_gapless_network_is_abelian():
    assert zoo.validate_abelian(gapless_network()).ok
