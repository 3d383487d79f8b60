"""Execution engine: digraphs, processors, networks and configurations.

A network is a digraph with one abelian processor per vertex. Processing a
letter ``a`` at total state ``q`` consumes one copy of ``a``, moves the owner
processor to ``next(q_v, a)`` and emits the message vector ``emit(q_v, a)``.
All execution funnels through the flat tables compiled in :class:`Network`,
which the kernels in ``_kernel`` consume.
"""

from __future__ import annotations

from array import array
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from . import _kernel
from .errors import IllegalInput, InvalidSpec, UnknownLetter

Letter = Hashable
State = Hashable
Word = Sequence[Letter]

DEFAULT_STEP_CAP = 10**7
TRACE_KEEP = 100_000


# ------------------------------------------------------------------ digraph


@dataclass(frozen=True)
class Digraph:
    """Finite digraph with ordered out-edge lists.

    ``out_edges[i]`` lists ``(edge_id, target)`` for ``vertices[i]``; the list
    order is the cyclic order used by rotor-like builders.
    """

    vertices: tuple
    out_edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "out_edges", tuple(tuple((e, t) for e, t in row) for row in self.out_edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidSpec("duplicate vertex ids")
        if len(self.out_edges) != len(self.vertices):
            raise InvalidSpec("one out-edge list per vertex is required")
        known = set(self.vertices)
        ids = set()
        for row in self.out_edges:
            for e, t in row:
                if t not in known:
                    raise InvalidSpec(f"edge {e!r} targets unknown vertex {t!r}")
                if e in ids:
                    raise InvalidSpec(f"duplicate edge id {e!r}")
                ids.add(e)

    @classmethod
    def from_edge_list(cls, vertices: Iterable, edges: Iterable[tuple]) -> "Digraph":
        """Build from ``(source, target)`` pairs; edge ids are list positions."""
        vertices = tuple(vertices)
        rows: dict = {v: [] for v in vertices}
        for i, (s, t) in enumerate(edges):
            if s not in rows:
                raise InvalidSpec(f"edge {i} has unknown source {s!r}")
            rows[s].append((i, t))
        return cls(vertices, tuple(tuple(rows[v]) for v in vertices))

    @classmethod
    def bidirected_cycle(cls, n: int) -> "Digraph":
        """Cycle on ``0..n-1``; vertex k lists (k, k-1) before (k, k+1)."""
        edges = []
        for k in range(n):
            edges.append((k, (k - 1) % n))
            edges.append((k, (k + 1) % n))
        return cls.from_edge_list(range(n), edges)

    @classmethod
    def complete(cls, n: int) -> "Digraph":
        edges = [(i, j) for i in range(n) for j in range(n) if i != j]
        return cls.from_edge_list(range(n), edges)

    def index(self, v) -> int:
        return self.vertices.index(v)

    def outdeg(self, v) -> int:
        return len(self.out_edges[self.index(v)])

    def edges(self) -> list[tuple]:
        """All edges as ``(edge_id, source, target)`` in listing order."""
        return [(e, v, t) for v, row in zip(self.vertices, self.out_edges) for e, t in row]

    def edge_list(self) -> list[tuple]:
        return [(s, t) for _, s, t in self.edges()]

    def indegree(self, v) -> int:
        return sum(1 for _, _, t in self.edges() if t == v)

    def adjacency(self) -> list[list[int]]:
        """``A[i][j]`` = number of edges from ``vertices[j]`` to ``vertices[i]``."""
        n = len(self.vertices)
        pos = {v: i for i, v in enumerate(self.vertices)}
        a = [[0] * n for _ in range(n)]
        for _, s, t in self.edges():
            a[pos[t]][pos[s]] += 1
        return a

    def is_strongly_connected(self) -> bool:
        n = len(self.vertices)
        if n == 0:
            return True
        pos = {v: i for i, v in enumerate(self.vertices)}
        fwd = [[pos[t] for _, t in row] for row in self.out_edges]
        back: list[list[int]] = [[] for _ in range(n)]
        for i, row in enumerate(fwd):
            for j in row:
                back[j].append(i)
        return all(len(_reach(g, 0)) == n for g in (fwd, back))


def _reach(graph: Sequence[Sequence[int]], start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in graph[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


# ---------------------------------------------------------------- processor


@dataclass(frozen=True)
class Processor:
    """Local automaton at one vertex.

    ``next[(state, letter)]`` is the new state and ``emit[(state, letter)]`` the
    message vector (a mapping letter -> count over the total alphabet), both
    computed from the state before the transition.
    """

    vertex: Any
    letters: tuple
    states: tuple
    next: Mapping
    emit: Mapping

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        object.__setattr__(self, "states", tuple(self.states))
        emit = {}
        for key, vec in dict(self.emit).items():
            emit[key] = {b: int(c) for b, c in dict(vec).items() if c}
        object.__setattr__(self, "emit", emit)
        object.__setattr__(self, "next", dict(self.next))
        if len(set(self.letters)) != len(self.letters) or len(set(self.states)) != len(self.states):
            raise InvalidSpec(f"processor {self.vertex!r} has duplicate letters or states")
        for s in self.states:
            for a in self.letters:
                if (s, a) not in self.next or (s, a) not in self.emit:
                    raise InvalidSpec(f"processor {self.vertex!r}: missing table entry for {(s, a)!r}")
                if self.next[(s, a)] not in self.states:
                    raise InvalidSpec(f"processor {self.vertex!r}: next{(s, a)!r} is not a state")
                if any(c < 0 for c in self.emit[(s, a)].values()):
                    raise InvalidSpec(f"processor {self.vertex!r}: negative emission at {(s, a)!r}")


# ------------------------------------------------------------------ network


@dataclass(frozen=True)
class Configuration:
    """Letter counts ``x`` (canonical letter order) and local states ``q`` (vertex order)."""

    x: tuple
    q: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(int(v) for v in self.x))
        object.__setattr__(self, "q", tuple(self.q))

    def __str__(self):
        return f"{list(self.x)}.{list(self.q)}"


class Network:
    """An abelian network: a digraph with one processor per vertex.

    The total alphabet is ordered by vertex listing order, then by each
    processor's letter order. ``family`` and ``params`` record how the network
    was built so that later analyses can use closed forms.
    """

    def __init__(self, digraph: Digraph, processors: Iterable[Processor], family: str = "explicit",
                 params: Mapping | None = None):
        procs = {p.vertex: p for p in processors}
        if set(procs) != set(digraph.vertices) or len(procs) != len(digraph.vertices):
            raise InvalidSpec("every vertex needs exactly one processor")
        self.digraph = digraph
        self.processors = tuple(procs[v] for v in digraph.vertices)
        self.family = family
        self.params = dict(params or {})
        self.vertices = digraph.vertices
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        alphabet = []
        owner = []
        for i, p in enumerate(self.processors):
            alphabet.extend(p.letters)
            owner.extend([i] * len(p.letters))
        if len(set(alphabet)) != len(alphabet):
            raise InvalidSpec("local alphabets must be pairwise disjoint")
        self.alphabet = tuple(alphabet)
        self.index = {a: i for i, a in enumerate(alphabet)}
        self.owner = tuple(owner)
        self.states = tuple(p.states for p in self.processors)
        self.state_index = tuple({s: j for j, s in enumerate(st)} for st in self.states)
        self._check_targets()
        self._compile()
        self._memo: dict = {}

    def _check_targets(self):
        for i, p in enumerate(self.processors):
            allowed = set()
            for _, t in self.digraph.out_edges[i]:
                allowed.update(self.processors[self.vertex_index[t]].letters)
            for key, vec in p.emit.items():
                for b in vec:
                    if b not in self.index:
                        raise InvalidSpec(f"processor {p.vertex!r} emits unknown letter {b!r}")
                    if b not in allowed:
                        raise InvalidSpec(f"processor {p.vertex!r} emits {b!r} to a non-neighbour")

    def _compile(self):
        nxt, stoff, ebeg, etgt, ecnt = [], [], [0], [], []
        for ai, a in enumerate(self.alphabet):
            v = self.owner[ai]
            p = self.processors[v]
            sidx = self.state_index[v]
            stoff.append(len(nxt))
            for s in p.states:
                nxt.append(sidx[p.next[(s, a)]])
                for b, c in sorted(p.emit[(s, a)].items(), key=lambda kv: self.index[kv[0]]):
                    etgt.append(self.index[b])
                    ecnt.append(c)
                ebeg.append(len(etgt))
        self._tables = tuple(array("q", t) for t in (nxt, stoff, array("q", self.owner), ebeg, etgt, ecnt))

    # ---- table access by indices
    def next_index(self, a: int, s: int) -> int:
        """Local state index after processing letter index ``a`` at local index ``s``."""
        return self._tables[0][self._tables[1][a] + s]

    def emit_items(self, a: int, s: int) -> list[tuple[int, int]]:
        """``(letter index, count)`` pairs emitted by letter index ``a`` at local index ``s``."""
        nxt, stoff, _, ebeg, etgt, ecnt = self._tables
        row = stoff[a] + s
        return [(etgt[k], ecnt[k]) for k in range(ebeg[row], ebeg[row + 1])]

    # ---- conversions
    def letter_index(self, a: Letter) -> int:
        try:
            return self.index[a]
        except (KeyError, TypeError):
            raise UnknownLetter(a) from None

    def vector(self, n: Mapping | Sequence[int] | None) -> tuple[int, ...]:
        """Canonical tuple from a letter mapping or an already ordered sequence."""
        if n is None:
            return (0,) * len(self.alphabet)
        if isinstance(n, Mapping):
            out = [0] * len(self.alphabet)
            for a, c in n.items():
                out[self.letter_index(a)] += int(c)
            return tuple(out)
        out = tuple(int(c) for c in n)
        if len(out) != len(self.alphabet):
            raise InvalidSpec(f"vector has length {len(out)}, alphabet has {len(self.alphabet)}")
        return out

    def as_mapping(self, vec: Sequence[int]) -> dict:
        return {a: c for a, c in zip(self.alphabet, vec) if c}

    def config(self, x: Mapping | Sequence[int] | None = None, q: Mapping | Sequence | None = None) -> Configuration:
        """Build a configuration; ``q`` defaults to each processor's first state."""
        if q is None:
            qt = tuple(st[0] for st in self.states)
        elif isinstance(q, Mapping):
            qt = tuple(q.get(v, st[0]) for v, st in zip(self.vertices, self.states))
        else:
            qt = tuple(q)
        if len(qt) != len(self.vertices):
            raise InvalidSpec("q needs one state per vertex")
        for s, idx, v in zip(qt, self.state_index, self.vertices):
            if s not in idx:
                raise InvalidSpec(f"{s!r} is not a state of vertex {v!r}")
        return Configuration(self.vector(x), qt)

    def q_indices(self, q: Sequence) -> list[int]:
        return [idx[s] for idx, s in zip(self.state_index, q)]

    def q_values(self, qi: Sequence[int]) -> tuple:
        return tuple(st[j] for st, j in zip(self.states, qi))

    def all_states(self) -> Iterable[tuple]:
        """Every total state, in lexicographic order of local indices."""
        from itertools import product

        return product(*self.states)

    # ---- identity
    def signature(self) -> tuple:
        return (self.vertices, self.alphabet, self.states, tuple(tuple(t) for t in self._tables))

    def __eq__(self, other):
        return isinstance(other, Network) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    def __repr__(self):
        return f"Network(family={self.family!r}, vertices={len(self.vertices)}, letters={len(self.alphabet)})"


# --------------------------------------------------------------- execution


def _buffers(net: Network, cfg: Configuration):
    return array("q", cfg.x), array("q", net.q_indices(cfg.q))


def _finish(net: Network, x, qi) -> Configuration:
    return Configuration(tuple(x), net.q_values(qi))


def _word_indices(net: Network, w: Iterable[Letter]) -> list[int]:
    return [net.letter_index(a) for a in w]


def step(net: Network, cfg: Configuration, a: Letter) -> Configuration:
    """Process one letter; legality is not required."""
    return execute_word(net, cfg, [a])[0]


def execute_word(net: Network, cfg: Configuration, w: Word) -> tuple[Configuration, bool]:
    """Process ``w`` letter by letter; also report whether every step was legal."""
    idx = _word_indices(net, w)
    x, qi = _buffers(net, cfg)
    legal = _kernel.run_word(*net._tables, x, qi, idx)
    return _finish(net, x, qi), bool(legal)


def is_legal(net: Network, cfg: Configuration, w: Word) -> bool:
    return execute_word(net, cfg, w)[1]


def counts_to_word(net: Network, n: Sequence[int]) -> list:
    """Canonical word for a firing vector: letters in index order, repeated."""
    word = []
    for a, c in zip(net.alphabet, n):
        if c < 0:
            raise InvalidSpec("firing vectors must be nonnegative")
        word.extend([a] * c)
    return word


def execute_vector(net: Network, cfg: Configuration, n: Mapping | Sequence[int]) -> Configuration:
    vec = net.vector(n)
    x, qi = _buffers(net, cfg)
    idx = [a for a, c in enumerate(vec) for _ in range(c)]
    if any(c < 0 for c in vec):
        raise InvalidSpec("firing vectors must be nonnegative")
    _kernel.run_word(*net._tables, x, qi, idx)
    return _finish(net, x, qi)


def firing_counts(net: Network, w: Word) -> tuple[int, ...]:
    """The vector |w|."""
    out = [0] * len(net.alphabet)
    for a in w:
        out[net.letter_index(a)] += 1
    return tuple(out)


def messages(net: Network, q: Sequence, w: Word) -> tuple[int, ...]:
    """Accumulated emissions N_w(q) of processing ``w`` from state ``q``."""
    zero = Configuration((0,) * len(net.alphabet), tuple(q))
    end, _ = execute_word(net, zero, w)
    counts = firing_counts(net, w)
    return tuple(e + c for e, c in zip(end.x, counts))


def remove(w: Word, n: Mapping) -> list:
    """Delete the first ``n[a]`` occurrences of every letter ``a`` from ``w``."""
    budget = Counter({a: int(c) for a, c in dict(n).items() if c > 0})
    out = []
    for a in w:
        if budget[a] > 0:
            budget[a] -= 1
        else:
            out.append(a)
    return out


@dataclass(frozen=True)
class Stable:
    """Stabilization reached a configuration with ``x <= 0``."""

    config: Configuration
    counts: tuple
    steps: int


@dataclass(frozen=True)
class NonHalting:
    """The step cap ran out before stabilization.

    ``trace`` keeps the first letters fired (at most ``TRACE_KEEP`` of them);
    ``counts`` is the full firing vector.
    """

    config: Configuration
    counts: tuple
    steps: int
    trace: tuple = field(repr=False, default=())


Policy = Callable[[list[int]], int]


def stabilize(net: Network, cfg: Configuration, step_cap: int = DEFAULT_STEP_CAP,
              policy: Policy | None = None, keep_trace: bool = False) -> Stable | NonHalting:
    """Run a greedy legal execution until stable or ``step_cap`` letters.

    The default policy fires the lowest-index letter with ``x(a) >= 1``. A
    custom ``policy`` receives the eligible letter indices and returns one.
    """
    if step_cap <= 0:
        raise InvalidSpec("step_cap must be positive")
    if policy is None:
        x, qi = _buffers(net, cfg)
        counts = array("q", bytes(8 * len(x)))
        limit = array("q", [-1] * len(x))
        trace: list | None = [] if keep_trace else None
        if trace is not None and step_cap > TRACE_KEEP:
            steps, status = _kernel.greedy_run(*net._tables, x, qi, counts, limit, TRACE_KEEP, trace)
            if status == 1:
                more, status = _kernel.greedy_run(*net._tables, x, qi, counts, limit, step_cap - steps, None)
                steps += more
        else:
            steps, status = _kernel.greedy_run(*net._tables, x, qi, counts, limit, step_cap, trace)
        end = _finish(net, x, qi)
        if status == 0:
            return Stable(end, tuple(counts), steps)
        return NonHalting(end, tuple(counts), steps, tuple(net.alphabet[a] for a in trace or ()))
    x, qi = _buffers(net, cfg)
    counts = [0] * len(x)
    trace_l = []
    steps = 0
    while True:
        eligible = [a for a, c in enumerate(x) if c >= 1]
        if not eligible:
            return Stable(_finish(net, x, qi), tuple(counts), steps)
        if steps >= step_cap:
            return NonHalting(_finish(net, x, qi), tuple(counts), steps, tuple(trace_l))
        a = policy(eligible)
        if a not in eligible:
            raise InvalidSpec("policy chose an ineligible letter")
        _kernel.run_word(*net._tables, x, qi, [a])
        counts[a] += 1
        steps += 1
        if len(trace_l) < TRACE_KEEP:
            trace_l.append(net.alphabet[a])


def exchange_join(net: Network, cfg: Configuration, w1: Word, w2: Word) -> list:
    """Return ``w2 \\ |w1|``: appended to ``w1`` it stays legal and reaches max(|w1|, |w2|)."""
    if not is_legal(net, cfg, w1):
        raise IllegalInput("first word is not legal for the configuration")
    if not is_legal(net, cfg, w2):
        raise IllegalInput("second word is not legal for the configuration")
    return remove(w2, Counter(w1))
