"""Recurrence tests, rotor digraphs, capacity, levels and stoppable levels."""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import ceil, lcm
from typing import Sequence

from . import _kernel, linalg
from .algebra import (
    CRITICAL,
    SUBCRITICAL,
    _local_data,
    acts_trivially,
    classify,
    exchange_rate,
    idempotent_vector,
    is_locally_recurrent,
    is_strongly_connected,
    letter_orders,
    locally_recurrent_states,
    period_vector,
    production_matrix,
)
from .core import Configuration, Network, NonHalting, stabilize
from .errors import (
    BadWitnessVector,
    BoxTooSmall,
    NotAgentNetwork,
    NotCritical,
    NotLocallyRecurrent,
    NotStronglyConnected,
    PreconditionViolated,
)

HARD_CAP = 10**7


# ----------------------------------------------------------- burning tests


@dataclass(frozen=True)
class RecurrenceCertificate:
    """Verdict of the critical burning test with its maximal execution."""

    verdict: bool
    witness: tuple
    counts: tuple
    state_returned: bool

    def __bool__(self):
        return self.verdict


def _require_critical(net: Network):
    if not is_strongly_connected(net):
        raise NotStronglyConnected("the production digraph is not strongly connected")
    if classify(net).tag != CRITICAL:
        raise NotCritical(f"network is {classify(net).tag}")


def _bounded_greedy(net: Network, cfg: Configuration, limit: Sequence[int], order: Sequence[int] | None):
    """Greedy legal execution where letter ``a`` fires at most ``limit[a]`` times."""
    x = array("q", cfg.x)
    qi = array("q", net.q_indices(cfg.q))
    counts = array("q", bytes(8 * len(x)))
    trace: list = []
    if order is None:
        _kernel.greedy_run(*net._tables, x, qi, counts, array("q", limit), HARD_CAP, trace)
    else:
        while True:
            a = next((a for a in order if x[a] >= 1 and counts[a] < limit[a]), None)
            if a is None:
                break
            _kernel.run_word(*net._tables, x, qi, [a])
            counts[a] += 1
            trace.append(a)
    return x, qi, counts, trace


def burning_test_critical(net: Network, cfg: Configuration, order: Sequence | None = None) -> RecurrenceCertificate:
    """Build an r-maximal legal execution greedily; recurrent iff it uses all of r and returns q.

    ``order`` is an optional priority list of letters; by default the lowest
    canonical index is fired first.
    """
    _require_critical(net)
    r = period_vector(net)
    idx = None if order is None else [net.letter_index(a) for a in order]
    x, qi, counts, trace = _bounded_greedy(net, cfg, r, idx)
    returned = net.q_values(qi) == tuple(cfg.q)
    full = tuple(counts) == tuple(r)
    return RecurrenceCertificate(full and returned, tuple(net.alphabet[a] for a in trace), tuple(counts), returned)


def _positive_part(v):
    return [max(c, 0) for c in v]


def _subcritical_cap(net: Network, x: Sequence[int]) -> int:
    """Least-action bound on the stabilizing firing vector of ``x.q``."""
    p = production_matrix(net)
    n = len(p)
    slack = [m - 1 + e for m, e in zip(letter_orders(net), idempotent_vector(net))]
    rhs = [a + b for a, b in zip(_positive_part(x), linalg.mat_vec(p, slack))]
    inv = linalg.inverse([[(1 if i == j else 0) - p[i][j] for j in range(n)] for i in range(n)])
    bound = linalg.mat_vec(inv, rhs)
    return min(HARD_CAP, max(1, sum(ceil(b) for b in bound) + n))


def stabilize_subcritical(net: Network, cfg: Configuration):
    """Stabilize a configuration of a subcritical network with a derived step cap."""
    res = stabilize(net, cfg, _subcritical_cap(net, cfg.x))
    if isinstance(res, NonHalting):
        res = stabilize(net, cfg, HARD_CAP)
        if isinstance(res, NonHalting):
            raise PreconditionViolated("configuration did not stabilize within the hard cap")
    return res


def default_witness(net: Network) -> tuple[int, ...]:
    """A valid ``k`` for the subcritical test: a multiple of (I - P)^-1 1 lying in K."""
    p = production_matrix(net)
    n = len(p)
    base = linalg.solve([[(1 if i == j else 0) - p[i][j] for j in range(n)] for i in range(n)], [1] * n)
    k = linalg.primitive_integer_vector(base)
    m = 1
    for o in letter_orders(net):
        m = lcm(m, o)
    return tuple(m * c for c in k)


def burning_test_subcritical(net: Network, q: Sequence, k: Sequence[int] | None = None) -> bool:
    """Whether ``(I - P)k . q`` stabilizes to ``0 . q``."""
    if classify(net).tag != SUBCRITICAL:
        raise PreconditionViolated(f"network is {classify(net).tag}, not subcritical")
    k = default_witness(net) if k is None else tuple(int(c) for c in k)
    p = production_matrix(net)
    pk = linalg.mat_vec(p, k)
    if any(c < 1 for c in k):
        raise BadWitnessVector("k must be at least 1 in every coordinate")
    if not acts_trivially(net, k):
        raise BadWitnessVector("k is not in the total kernel")
    if any(a > b for a, b in zip(pk, k)):
        raise BadWitnessVector("Pk <= k fails")
    x = [int(b - a) for a, b in zip(pk, k)]
    res = stabilize_subcritical(net, Configuration(x, tuple(q)))
    return res.config == Configuration((0,) * len(x), tuple(q))


# ----------------------------------------------------------- agent networks


def is_agent(net: Network) -> bool:
    """Every letter, at every state, produces exactly one letter."""
    return all(
        sum(c for _, c in net.emit_items(a, s)) == 1
        for a in range(len(net.alphabet))
        for s in range(len(net.states[net.owner[a]]))
    )


@dataclass(frozen=True)
class RotorDigraph:
    successor: dict

    def cycles(self) -> list[list]:
        """The cycles of the functional digraph, each starting at its first-listed letter."""
        state: dict = {}
        out = []
        for start in self.successor:
            if start in state:
                continue
            path = []
            u = start
            while u not in state:
                state[u] = start
                path.append(u)
                u = self.successor[u]
            if state[u] == start:
                out.append(path[path.index(u):])
        return out


def _inverse_step(d, a: int, s: int) -> int:
    t = s
    while d.perm[a][t] != s:
        t = d.perm[a][t]
    return t


def rotor_digraph(net: Network, q: Sequence) -> RotorDigraph:
    """Map each letter to the letter it produced on the way into state ``q``."""
    if not is_agent(net):
        raise NotAgentNetwork("rotor digraphs need an agent network")
    if not is_locally_recurrent(net, q):
        raise NotLocallyRecurrent("state is not locally recurrent")
    data = _local_data(net)
    qi = net.q_indices(q)
    succ = {}
    for a, letter in enumerate(net.alphabet):
        v = net.owner[a]
        ((b, _),) = net.emit_items(a, _inverse_step(data[v], a, qi[v]))
        succ[letter] = net.alphabet[b]
    return RotorDigraph(succ)


def cycle_test(net: Network, cfg: Configuration) -> bool:
    """Recurrence for agent networks: x >= 0, q locally recurrent, every cycle meets supp(x)."""
    if not is_agent(net):
        raise NotAgentNetwork("the cycle test needs an agent network")
    if any(c < 0 for c in cfg.x) or not is_locally_recurrent(net, cfg.q):
        return False
    support = {net.alphabet[a] for a, c in enumerate(cfg.x) if c > 0}
    return all(support.intersection(cyc) for cyc in rotor_digraph(net, cfg.q).cycles())


def is_recurrent(net: Network, cfg: Configuration) -> bool:
    """Dispatch to the appropriate recurrence test for a critical network."""
    if is_agent(net):
        return cycle_test(net, cfg)
    return burning_test_critical(net, cfg).verdict


# --------------------------------------------------------- halting/capacity


def halts(net: Network, cfg: Configuration, cap: int = 10**6) -> bool | None:
    """Decide whether ``cfg`` halts.

    For critical networks the answer is exact: the greedy execution either
    stabilizes or reaches a recurrent configuration, which never halts.
    Otherwise ``None`` is returned if the cap is reached.
    """
    critical = is_strongly_connected(net) and classify(net).tag == CRITICAL
    if not critical:
        res = stabilize(net, cfg, cap)
        return None if isinstance(res, NonHalting) else True
    chunk = 4 * sum(period_vector(net)) + 64
    done = 0
    while done < cap:
        res = stabilize(net, cfg, chunk)
        if not isinstance(res, NonHalting):
            return True
        cfg = res.config
        done += res.steps
        if burning_test_critical(net, cfg).verdict:
            return False
    return None


class _Unbounded:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Unbounded"

    __str__ = __repr__


UNBOUNDED = _Unbounded()


@dataclass(frozen=True)
class CapacitySearch:
    """Outcome of the bounded capacity search.

    ``boundary`` is True when some coordinate of the maximizer sits on the box
    boundary; ``undecided`` counts halting checks that hit the step cap.
    """

    value: int
    maximizer: tuple
    box: int
    boundary: bool
    undecided: int


def _family_capacity_bound(net: Network) -> int | None:
    g = net.digraph
    if net.family == "rotor":
        return 0
    if net.family == "sandpile" and not net.params.get("sinks"):
        return len(g.edges()) - len(g.vertices)
    if net.family == "height_arrow":
        return sum(t - 1 for t in net.params["tau"])
    return None


def default_box(net: Network) -> int:
    """Box half-width: max period entry plus a capacity bound."""
    bound = _family_capacity_bound(net)
    if bound is None:
        try:
            bound = potential_capacity(net)
        except PreconditionViolated:
            bound = sum(len(st) for st in net.states)
    try:
        rmax = max(period_vector(net))
    except (NotCritical, NotStronglyConnected):
        rmax = max(letter_orders(net))
    return rmax + bound


def capacity_search(net: Network, q: Sequence, box: int | None = None, cap: int = 10**6) -> CapacitySearch:
    """Maximize s.z over z in [-box, box]^A with z.q halting.

    Halting is monotone in z, so for each prefix of coordinates the last one
    is found by binary search. Among maximizers the one with the smallest
    max-norm (then lexicographically smallest) is reported.
    """
    if box is None:
        box = default_box(net)
    s = exchange_rate(net)
    n = len(s)
    q = tuple(q)
    undecided = 0

    def ok(z):
        nonlocal undecided
        h = halts(net, Configuration(z, q), cap)
        if h is None:
            undecided += 1
            return False
        return h

    best = None
    best_key = None
    for prefix in product(range(-box, box + 1), repeat=n - 1):
        head = sum(a * b for a, b in zip(s, prefix))
        if best is not None and head + s[-1] * box < best:
            continue
        if not ok(prefix + (-box,)):
            continue
        lo, hi = -box, box
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if ok(prefix + (mid,)):
                lo = mid
            else:
                hi = mid - 1
        val = head + s[-1] * lo
        z = prefix + (lo,)
        key = (-val, max(map(abs, z)), z)
        if best_key is None or key < best_key:
            best, best_key = val, key
    z = best_key[2]
    for i in range(n):
        if z[i] == box:
            bumped = tuple(c + (1 if j == i else 0) for j, c in enumerate(z))
            if ok(bumped):
                raise BoxTooSmall(f"maximizer touches +{box} in coordinate {i} and can grow", best, z)
    return CapacitySearch(best, z, box, any(abs(c) == box for c in z), undecided)


def capacity(net: Network, q: Sequence | None = None, box: int | None = None):
    """Capacity of a state (or of the network when ``q`` is None) by bounded search."""
    if not is_strongly_connected(net):
        raise NotStronglyConnected("the production digraph is not strongly connected")
    if classify(net).tag == SUBCRITICAL:
        return UNBOUNDED
    if q is not None:
        return capacity_search(net, q, box).value
    return max(capacity_search(net, qq, box).value for qq in net.all_states())


# --------------------------------------------------------- exact potential


def level_potential(net: Network) -> list[dict]:
    """Per vertex, a potential on locally recurrent states whose sum tracks the level.

    Processing ``a`` at ``q`` changes the potential by s(a) - s.N_a(q).
    """

    def compute():
        _require_critical(net)
        s = exchange_rate(net)
        out = []
        for d in _local_data(net):
            phi = {d.base: 0}
            queue = [d.base]
            for u in queue:
                for a in d.letters:
                    t = d.perm[a][u]
                    val = phi[u] + s[a] - sum(s[b] * c for b, c in net.emit_items(a, u))
                    if t not in phi:
                        phi[t] = val
                        queue.append(t)
                    elif phi[t] != val:
                        raise PreconditionViolated("inconsistent level potential")
            out.append(phi)
        return out

    if "potential" not in net._memo:
        net._memo["potential"] = compute()
    return net._memo["potential"]


def _phi(net: Network, q: Sequence) -> int:
    pot = level_potential(net)
    return sum(p[i] for p, i in zip(pot, net.q_indices(q)))


def potential_capacity(net: Network) -> int:
    """cpt(N) from the exact potential; needs every state to be locally recurrent."""
    pot = level_potential(net)
    if any(len(p) != len(st) for p, st in zip(pot, net.states)):
        raise PreconditionViolated("some states are not locally recurrent")
    return sum(max(p.values()) - min(p.values()) for p in pot)


def state_capacity(net: Network, q: Sequence) -> int:
    """cpt(q): exact on locally recurrent states, bounded search otherwise."""
    if is_locally_recurrent(net, q):
        return sum(max(p.values()) for p in level_potential(net)) - _phi(net, q)
    return capacity_search(net, q).value


def network_capacity(net: Network) -> int:
    def compute():
        _require_critical(net)
        try:
            return potential_capacity(net)
        except PreconditionViolated:
            return max(state_capacity(net, q) for q in net.all_states())

    if "cpt" not in net._memo:
        net._memo["cpt"] = compute()
    return net._memo["cpt"]


def level(net: Network, cfg: Configuration) -> int:
    """lvl(x.q) = cpt(N) - cpt(q) + s.x."""
    s = exchange_rate(net)
    return network_capacity(net) - state_capacity(net, cfg.q) + sum(a * b for a, b in zip(s, cfg.x))


def state_levels(net: Network) -> dict:
    """Level of every locally recurrent state."""
    loc = locally_recurrent_states(net)
    zero = (0,) * len(net.alphabet)
    return {q: level(net, Configuration(zero, q)) for q in product(*loc)}


def semigroup_members(gens: Sequence[int], upto: int) -> set[int]:
    """Elements of the numerical semigroup generated by ``gens`` that are <= upto."""
    member = [False] * (upto + 1)
    member[0] = True
    for m in range(1, upto + 1):
        member[m] = any(g <= m and member[m - g] for g in gens)
    return {m for m, ok in enumerate(member) if ok}


def stoppable_levels(net: Network) -> set[int]:
    """Levels reached by some x <= 0 on a locally recurrent state."""
    levels = state_levels(net)
    top = max(levels.values())
    sg = semigroup_members(exchange_rate(net), top)
    return {lv - m for lv in levels.values() for m in sg if lv - m >= 0}
