"""Counting recurrent configurations and checking the determinantal identities."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Mapping, Sequence

from . import linalg
from .algebra import (
    classify,
    exchange_rate,
    is_strongly_connected,
    kernel_index,
    locally_recurrent_states,
    production_matrix,
    torsion_group,
)
from .core import Configuration, Digraph, Network
from .errors import NotAgentNetwork, NotStronglyConnected, PreconditionViolated
from .recurrence import is_agent, is_recurrent, rotor_digraph, state_levels
from .series import SeriesTable, monomials
from .zoo import rotor


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("ABELNET_JOBS", "1")))
    except ValueError:
        return 1


def _map(func, items, jobs):
    if jobs <= 1 or len(items) < 2:
        return [func(i) for i in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * jobs))))


def _require_agent(net: Network):
    if not is_agent(net):
        raise NotAgentNetwork("needs an agent network")
    if not is_strongly_connected(net):
        raise NotStronglyConnected("the production digraph is not strongly connected")


def _cycle_sets(net: Network, q) -> list[frozenset[int]]:
    cycles = rotor_digraph(net, q).cycles()
    return [frozenset(net.index[a] for a in cyc) for cyc in cycles]


def _covers(x: Sequence[int], cycles) -> bool:
    return all(any(x[a] > 0 for a in cyc) for cyc in cycles)


# ---------------------------------------------------------------- brute force


def count_recurrent_for_input(net: Network, n: Mapping | Sequence[int]) -> int:
    """Number of locally recurrent q for which n.q passes the cycle test."""
    _require_agent(net)
    x = net.vector(n)
    if any(c < 0 for c in x):
        return 0
    return sum(1 for q in product(*locally_recurrent_states(net)) if _covers(x, _cycle_sets(net, q)))


class _BruteWorker:
    def __init__(self, net, exps):
        self.net, self.exps = net, exps

    def __call__(self, q):
        cycles = _cycle_sets(self.net, q)
        return [e for e in self.exps if _covers(e, cycles)]


def series_bruteforce(net: Network, maxdeg: int, jobs: int | None = None) -> SeriesTable:
    """Sum over recurrent x.q with x >= 0 of z^x, by per-state cycle tests."""
    _require_agent(net)
    jobs = default_jobs() if jobs is None else jobs
    exps = list(monomials(len(net.alphabet), maxdeg))
    states = list(product(*locally_recurrent_states(net)))
    out: dict = {}
    for hits in _map(_BruteWorker(net, exps), states, jobs):
        for e in hits:
            out[e] = out.get(e, 0) + 1
    return SeriesTable(len(net.alphabet), maxdeg, out)


# ---------------------------------------------------------------- determinant


def _diagonal_expansion(diag: Sequence, m: Sequence[Sequence], maxdeg: int) -> SeriesTable:
    """det(diag(d_i / (1 - z_i)) - m) as a truncated series.

    Expands along the diagonal: the sum over subsets T of prod_{i in T} d_i/(1 - z_i)
    times the principal minor of -m on the complement of T.
    """
    n = len(diag)
    total = SeriesTable(n, maxdeg)
    for k in range(n + 1):
        for subset in combinations(range(n), k):
            rest = [i for i in range(n) if i not in subset]
            minor = linalg.det([[-m[i][j] for j in rest] for i in rest]) if rest else Fraction(1)
            weight = minor
            for i in subset:
                weight *= diag[i]
            if weight:
                total = total + SeriesTable.geometric(n, maxdeg, subset).scale(weight)
    return total


def series_determinant(net: Network, maxdeg: int) -> SeriesTable:
    """|Z^A/K| det(I(z) - P) with I(z) = diag(1/(1 - z_a)), truncated at maxdeg."""
    _require_agent(net)
    p = production_matrix(net)
    return _diagonal_expansion([1] * len(p), p, maxdeg).scale(kernel_index(net)).integral()


# -------------------------------------------------------- rotor identities


def weighted_laplacian_parts(g: Digraph, y: Mapping) -> tuple[list, list[list]]:
    """Out-weight vector and weighted adjacency A(y)[u][v] = sum of y_e over edges v -> u."""
    pos = {v: i for i, v in enumerate(g.vertices)}
    n = len(pos)
    out = [0] * n
    adj = [[0] * n for _ in range(n)]
    for e, s, t in g.edges():
        out[pos[s]] += y[e]
        adj[pos[t]][pos[s]] += y[e]
    return out, adj


@dataclass
class IdentityReport:
    determinant: SeriesTable
    combinatorial: SeriesTable

    @property
    def mismatches(self) -> list:
        return self.determinant.differences(self.combinatorial)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def master_identity_check(g: Digraph, y: Mapping | None, maxdeg: int) -> IdentityReport:
    """Compare det(D(y,z) - A(y)) with the sum over recurrent rotor configurations of z^x prod y_q(v)."""
    if not g.is_strongly_connected():
        raise NotStronglyConnected("digraph must be strongly connected")
    if y is None:
        y = {e: 1 for e, _, _ in g.edges()}
    outw, adj = weighted_laplacian_parts(g, y)
    det_side = _diagonal_expansion(outw, adj, maxdeg).integral()
    net = rotor(g)
    exps = list(monomials(len(net.alphabet), maxdeg))
    comb: dict = {}
    for q in product(*net.states):
        weight = 1
        for e in q:
            weight *= y[e]
        cycles = _cycle_sets(net, q)
        for e in exps:
            if _covers(e, cycles):
                comb[e] = comb.get(e, 0) + weight
    return IdentityReport(det_side, SeriesTable(len(net.alphabet), maxdeg, {e: c for e, c in comb.items() if c}))


def forests_rooted_at(g: Digraph, roots, y: Mapping | None = None) -> int:
    """Weighted count of spanning forests oriented towards ``roots``, by determinant."""
    if y is None:
        y = {e: 1 for e, _, _ in g.edges()}
    outw, adj = weighted_laplacian_parts(g, y)
    roots = set(roots)
    keep = [i for i, v in enumerate(g.vertices) if v not in roots]
    if not keep:
        return 1
    return int(linalg.det([[(outw[i] if i == j else 0) - adj[i][j] for j in keep] for i in keep]))


def forests_bruteforce(g: Digraph, roots, y: Mapping | None = None) -> int:
    """Same count by enumerating one out-edge per non-root vertex."""
    if y is None:
        y = {e: 1 for e, _, _ in g.edges()}
    roots = set(roots)
    free = [(v, row) for v, row in zip(g.vertices, g.out_edges) if v not in roots]
    total = 0
    for choice in product(*(row for _, row in free)):
        succ = {v: t for (v, _), (_, t) in zip(free, choice)}
        ok = True
        for v in succ:
            seen = set()
            u = v
            while u not in roots:
                if u in seen:
                    ok = False
                    break
                seen.add(u)
                u = succ[u]
            if not ok:
                break
        if ok:
            w = 1
            for e, _ in choice:
                w *= y[e]
            total += w
    return total


# ---------------------------------------------------------- recurrent classes


@dataclass(frozen=True)
class ComponentCount:
    count: int
    predicted: int | None
    configurations: int


def recurrent_at_level(net: Network, m: int) -> list[Configuration]:
    """Recurrent configurations x.q with x >= 0, q locally recurrent and level m."""
    s = exchange_rate(net)
    out = []
    for q, lv in state_levels(net).items():
        room = m - lv
        if room < 0:
            continue
        for x in product(*(range(room // si + 1) for si in s)):
            if sum(a * b for a, b in zip(s, x)) != room:
                continue
            cfg = Configuration(x, q)
            if is_recurrent(net, cfg):
                out.append(cfg)
    return out


def components_per_level(net: Network, m: int, budget: int = 200_000) -> ComponentCount:
    """Number of recurrent components at level m, by reachability partition."""
    from .dynamics import reachable

    configs = recurrent_at_level(net, m)
    pending = set(configs)
    count = 0
    for cfg in configs:
        if cfg not in pending:
            continue
        reach, complete = reachable(net, cfg, budget)
        if not complete:
            raise PreconditionViolated("reachability budget exhausted")
        pending -= reach
        count += 1
    predicted = None
    if is_agent(net):
        predicted = torsion_group(net).torsion_order if m >= 1 else 0
    return ComponentCount(count, predicted, len(configs))


# ------------------------------------------------------------ cycle weights


def cycle_weight(n: int, cfg: Configuration) -> int:
    """Weight of a rotor configuration on the bidirected cycle built by ``Digraph.bidirected_cycle``.

    Edge ``2k`` is (v_k, v_{k-1}) and has weight 1; edge ``2k+1`` has weight 0.
    """
    total = 0
    for k in range(n):
        total += cfg.x[k] * k + (1 if cfg.q[k] == 2 * k else 0)
    return total % n


class _WeightWorker:
    def __init__(self, net, n, xs):
        self.net, self.n, self.xs = net, n, xs

    def __call__(self, q):
        counts = [0] * self.n
        cycles = _cycle_sets(self.net, q)
        base = sum(1 for k in range(self.n) if q[k] == 2 * k)
        for x, xw in self.xs:
            if _covers(x, cycles):
                counts[(xw + base) % self.n] += 1
        return counts


def weight_class_counts(n: int, m: int, jobs: int | None = None) -> list[int]:
    """Recurrent configurations of the rotor network on C_n with m chips, by weight class."""
    jobs = default_jobs() if jobs is None else jobs
    net = rotor(Digraph.bidirected_cycle(n))
    xs = [(x, sum(c * k for k, c in enumerate(x))) for x in product(range(m + 1), repeat=n) if sum(x) == m]
    totals = [0] * n
    for counts in _map(_WeightWorker(net, n, xs), list(product(*net.states)), jobs):
        for i, c in enumerate(counts):
            totals[i] += c
    return totals
