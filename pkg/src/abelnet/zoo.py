"""Builders for the standard network families, an axiom validator, and thief networks.

Every builder takes a :class:`~abelnet.core.Digraph`; per-vertex parameters
may be given either as a mapping keyed by vertex or as a list in vertex order.
Unary families use the vertex id itself as the vertex's only letter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Any, Iterable, Mapping, Sequence

from .core import Digraph, Network, Processor
from .errors import InvalidSpec

FAMILIES = (
    "rotor",
    "sandpile",
    "height_arrow",
    "height_arrow_sinked",
    "toppling",
    "arithmetical",
    "branching_rotor",
    "inverse",
    "explicit",
)


@dataclass
class NetworkSpec:
    """Family tag, digraph and family parameters.

    For ``explicit`` networks ``params["processors"]`` holds the processors.
    """

    family: str
    digraph: Digraph
    params: dict = field(default_factory=dict)


def _per_vertex(g: Digraph, value, name: str) -> list:
    if value is None:
        raise InvalidSpec(f"missing parameter {name!r}")
    if isinstance(value, Mapping):
        missing = [v for v in g.vertices if v not in value]
        if missing:
            raise InvalidSpec(f"parameter {name!r} missing vertices {missing}")
        return [value[v] for v in g.vertices]
    value = list(value)
    if len(value) != len(g.vertices):
        raise InvalidSpec(f"parameter {name!r} needs one entry per vertex")
    return value


def _targets(g: Digraph, i: int) -> list:
    return [t for _, t in g.out_edges[i]]


def _tally(letters: Iterable) -> dict:
    out: dict = {}
    for b in letters:
        out[b] = out.get(b, 0) + 1
    return out


def _cyclic_unary(g: Digraph, period: Sequence[int], sinks=frozenset()) -> list[Processor]:
    """Counter processors: fire one chip per out-edge when wrapping around."""
    procs = []
    for i, v in enumerate(g.vertices):
        m = int(period[i])
        if m < 1:
            raise InvalidSpec(f"vertex {v!r}: period must be positive, got {m}")
        fire = _tally(t for t in _targets(g, i) if t not in sinks)
        nxt = {(s, v): (s + 1) % m for s in range(m)}
        emit = {(s, v): (fire if s == m - 1 else {}) for s in range(m)}
        procs.append(Processor(v, (v,), tuple(range(m)), nxt, emit))
    return procs


def _need_outdeg(g: Digraph):
    for i, v in enumerate(g.vertices):
        if not g.out_edges[i]:
            raise InvalidSpec(f"vertex {v!r} has no outgoing edge")


def rotor(g: Digraph) -> Network:
    """Rotor network: the state is an out-edge; a chip advances it and follows it."""
    _need_outdeg(g)
    procs = []
    for i, v in enumerate(g.vertices):
        row = g.out_edges[i]
        d = len(row)
        states = tuple(e for e, _ in row)
        nxt = {(row[j][0], v): row[(j + 1) % d][0] for j in range(d)}
        emit = {(row[j][0], v): {row[(j + 1) % d][1]: 1} for j in range(d)}
        procs.append(Processor(v, (v,), states, nxt, emit))
    return Network(g, procs, "rotor", {})


def sandpile(g: Digraph, sinks: Iterable = ()) -> Network:
    """Sandpile network; chips sent towards a vertex in ``sinks`` are dropped."""
    _need_outdeg(g)
    sinks = frozenset(sinks)
    if not sinks <= set(g.vertices):
        raise InvalidSpec("sinks must be vertices")
    procs = _cyclic_unary(g, [len(r) for r in g.out_edges], sinks)
    return Network(g, procs, "sandpile", {"sinks": [v for v in g.vertices if v in sinks]})


def height_arrow(g: Digraph, tau, sinks: Iterable = ()) -> Network:
    """Height-arrow network with thresholds ``tau``, restricted to its irreducible states.

    The state ``(d, c)`` is an arrow index ``d`` (a multiple of ``tau`` modulo
    the out-degree) and a height ``c < tau``.
    """
    _need_outdeg(g)
    taus = [int(t) for t in _per_vertex(g, tau, "tau")]
    sinks = frozenset(sinks)
    if not sinks <= set(g.vertices):
        raise InvalidSpec("sinks must be vertices")
    procs = []
    for i, v in enumerate(g.vertices):
        targets = _targets(g, i)
        deg, t = len(targets), taus[i]
        if not 1 <= t <= deg:
            raise InvalidSpec(f"vertex {v!r}: threshold {t} outside 1..{deg}")
        step = gcd(t, deg)
        states = tuple((d, c) for d in range(0, deg, step) for c in range(t))
        nxt, emit = {}, {}
        for d, c in states:
            if c < t - 1:
                nxt[((d, c), v)] = (d, c + 1)
                emit[((d, c), v)] = {}
            else:
                nxt[((d, c), v)] = ((d + t) % deg, 0)
                emit[((d, c), v)] = _tally(
                    targets[(d + j) % deg] for j in range(1, t + 1) if targets[(d + j) % deg] not in sinks
                )
        procs.append(Processor(v, (v,), states, nxt, emit))
    if sinks:
        return Network(g, procs, "height_arrow_sinked",
                       {"tau": taus, "sinks": [v for v in g.vertices if v in sinks]})
    return Network(g, procs, "height_arrow", {"tau": taus})


def toppling(g: Digraph, thresholds) -> Network:
    ts = [int(t) for t in _per_vertex(g, thresholds, "thresholds")]
    return Network(g, _cyclic_unary(g, ts), "toppling", {"thresholds": ts})


def _adjacency_check(g: Digraph, diag: Sequence[int], b: Sequence[int]):
    adj = g.adjacency()
    for i, v in enumerate(g.vertices):
        if diag[i] * b[i] != sum(adj[i][j] * b[j] for j in range(len(b))):
            raise InvalidSpec(f"(D - A)b is nonzero at vertex {v!r}")


def arithmetical(g: Digraph, D, b) -> Network:
    """Arithmetical network for the pair (D, b); requires (D - A)b = 0, b > 0, gcd(b) = 1."""
    diag = [int(x) for x in _per_vertex(g, D, "D")]
    bv = [int(x) for x in _per_vertex(g, b, "b")]
    if any(x <= 0 for x in diag):
        raise InvalidSpec("D must have positive diagonal entries")
    if any(x <= 0 for x in bv):
        raise InvalidSpec("b must be positive")
    g0 = 0
    for x in bv:
        g0 = gcd(g0, x)
    if g0 != 1:
        raise InvalidSpec("entries of b must have gcd 1")
    _adjacency_check(g, diag, bv)
    return Network(g, _cyclic_unary(g, diag), "arithmetical", {"D": diag, "b": bv})


def row_chip_firing(g: Digraph) -> Network:
    """Arithmetical network with D the indegree matrix; b is computed."""
    from .linalg import nullspace, primitive_integer_vector

    diag = [g.indegree(v) for v in g.vertices]
    adj = g.adjacency()
    lap = [[(diag[i] if i == j else 0) - adj[i][j] for j in range(len(diag))] for i in range(len(diag))]
    ker = nullspace(lap)
    if len(ker) != 1:
        raise InvalidSpec("indegree Laplacian must have a one-dimensional kernel")
    return arithmetical(g, diag, primitive_integer_vector(ker[0]))


def branching_rotor(g: Digraph) -> Network:
    """Branching rotor: the rotor jumps two edges and drops a chip along each edge it visits."""
    _need_outdeg(g)
    procs = []
    for i, v in enumerate(g.vertices):
        row = g.out_edges[i]
        d = len(row)
        idx = sorted({(2 * k) % d for k in range(d)})
        states = tuple(row[j][0] for j in idx)
        nxt, emit = {}, {}
        for j in idx:
            nxt[(row[j][0], v)] = row[(j + 2) % d][0]
            emit[(row[j][0], v)] = _tally([row[(j + 1) % d][1], row[(j + 2) % d][1]])
        procs.append(Processor(v, (v,), states, nxt, emit))
    return Network(g, procs, "branching_rotor", {})


def inverse_letters(g: Digraph, letters=None) -> list[tuple]:
    if letters is None:
        return [(f"a{v}", f"b{v}") for v in g.vertices]
    return [tuple(p) for p in _per_vertex(g, letters, "letters")]


def inverse(g: Digraph, periods, messages, pairs=None, letters=None) -> Network:
    """Inverse network: ``a_v`` counts up and ``b_v`` counts down modulo ``m_v``.

    ``messages[v][i]`` is the letter produced by ``a_v`` at state ``i``;
    ``b_v`` at state ``i`` produces the partner of ``messages[v][i-1]``
    within ``pairs[v]``. When ``pairs`` is omitted each vertex's messages must
    use exactly two letters.
    """
    ms = [int(m) for m in _per_vertex(g, periods, "periods")]
    msgs = [list(x) for x in _per_vertex(g, messages, "messages")]
    names = inverse_letters(g, letters)
    if pairs is None:
        prs = []
        for v, x in zip(g.vertices, msgs):
            used = list(dict.fromkeys(x))
            if len(used) != 2:
                raise InvalidSpec(f"vertex {v!r}: give pairs explicitly, messages use {len(used)} letters")
            prs.append(tuple(used))
    else:
        prs = [tuple(p) for p in _per_vertex(g, pairs, "pairs")]
    procs = []
    for i, v in enumerate(g.vertices):
        m, x, (c, d) = ms[i], msgs[i], prs[i]
        a, b = names[i]
        if m < 1 or len(x) != m:
            raise InvalidSpec(f"vertex {v!r}: need exactly m_v = {m} messages")
        if c == d or any(y not in (c, d) for y in x):
            raise InvalidSpec(f"vertex {v!r}: messages must come from two distinct letters")
        partner = {c: d, d: c}
        nxt, emit = {}, {}
        for s in range(m):
            nxt[(s, a)] = (s + 1) % m
            nxt[(s, b)] = (s - 1) % m
            emit[(s, a)] = {x[s]: 1}
            emit[(s, b)] = {partner[x[(s - 1) % m]]: 1}
        procs.append(Processor(v, (a, b), tuple(range(m)), nxt, emit))
    return Network(g, procs, "inverse",
                   {"periods": ms, "messages": msgs, "pairs": [list(p) for p in prs],
                    "letters": [list(p) for p in names]})


def build(spec: NetworkSpec) -> Network:
    g, p, fam = spec.digraph, dict(spec.params), spec.family
    if fam == "rotor":
        return rotor(g)
    if fam == "sandpile":
        return sandpile(g, p.get("sinks", ()))
    if fam == "height_arrow":
        return height_arrow(g, p.get("tau"))
    if fam == "height_arrow_sinked":
        if not p.get("sinks"):
            raise InvalidSpec("height_arrow_sinked needs a nonempty sink set")
        return height_arrow(g, p.get("tau"), p["sinks"])
    if fam == "toppling":
        return toppling(g, p.get("thresholds"))
    if fam == "arithmetical":
        return arithmetical(g, p.get("D"), p.get("b"))
    if fam == "branching_rotor":
        return branching_rotor(g)
    if fam == "inverse":
        return inverse(g, p.get("periods"), p.get("messages"), p.get("pairs"), p.get("letters"))
    if fam == "explicit":
        return Network(g, p["processors"], "explicit", {})
    raise InvalidSpec(f"unknown family {fam!r}")


def spec_of(net: Network) -> NetworkSpec:
    """Inverse of :func:`build` for networks that came from a builder."""
    if net.family in FAMILIES and net.family != "explicit":
        return NetworkSpec(net.family, net.digraph, dict(net.params))
    return NetworkSpec("explicit", net.digraph, {"processors": list(net.processors)})


# ---------------------------------------------------------------- validator


@dataclass(frozen=True)
class Violation:
    vertex: Any
    state: Any
    first: Any
    second: Any
    kind: str  # "transition" or "message"


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_abelian(net: Network) -> ValidationReport:
    """Check both commutation conditions for every state and letter pair of every processor."""
    found = []
    for p in net.processors:
        for s in p.states:
            for i, a in enumerate(p.letters):
                for b in p.letters[i + 1:]:
                    sa, sb = p.next[(s, a)], p.next[(s, b)]
                    if p.next[(sa, b)] != p.next[(sb, a)]:
                        found.append(Violation(p.vertex, s, a, b, "transition"))
                    left = dict(p.emit[(s, a)])
                    for k, c in p.emit[(sa, b)].items():
                        left[k] = left.get(k, 0) + c
                    right = dict(p.emit[(s, b)])
                    for k, c in p.emit[(sb, a)].items():
                        right[k] = right.get(k, 0) + c
                    if left != right:
                        found.append(Violation(p.vertex, s, a, b, "message"))
    return ValidationReport(found)


# -------------------------------------------------------------------- thief


def thief(net: Network, keep: Iterable) -> Network:
    """Same network with every emitted letter outside ``keep`` deleted."""
    keep = set(keep)
    unknown = keep - set(net.alphabet)
    if unknown:
        raise InvalidSpec(f"letters not in the alphabet: {sorted(map(repr, unknown))}")
    procs = []
    for p in net.processors:
        emit = {k: {b: c for b, c in vec.items() if b in keep} for k, vec in p.emit.items()}
        procs.append(Processor(p.vertex, p.letters, p.states, p.next, emit))
    if keep == set(net.alphabet):
        return Network(net.digraph, procs, net.family, net.params)
    kept = [a for a in net.alphabet if a in keep]
    return Network(net.digraph, procs, "thief", {"base": net.family, "base_params": net.params, "keep": kept})
