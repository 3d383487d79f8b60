"""Exact algebraic invariants of a network.

Transitions of a letter only touch its owner's state, so the locally
recurrent states, the total kernel and the letter orders are all computed
one processor at a time and then assembled. Results are cached on the
network (networks are immutable, so the cache never goes stale).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from . import linalg
from .core import Network
from .errors import (
    NotCritical,
    NotLocallyIrreducible,
    NotLocallyRecurrent,
    NotStronglyConnected,
    PreconditionViolated,
)
from .linalg import smith_normal_form  # noqa: F401  (re-exported)

SUBCRITICAL, CRITICAL, SUPERCRITICAL = "subcritical", "critical", "supercritical"
_RANK = {SUBCRITICAL: 0, CRITICAL: 1, SUPERCRITICAL: 2}


def _cached(net: Network, key, compute):
    if key not in net._memo:
        net._memo[key] = compute()
    return net._memo[key]


# ------------------------------------------------------- local recurrence


def _vertex_letters(net: Network, v: int) -> list[int]:
    return [a for a, o in enumerate(net.owner) if o == v]


def _apply_all(net: Network, v: int, s: int) -> int:
    for a in _vertex_letters(net, v):
        s = net.next_index(a, s)
    return s


def idempotent_vector(net: Network) -> tuple[int, ...]:
    """A vector ``k * 1`` whose transition map is idempotent on every processor."""

    def compute():
        maps = [[_apply_all(net, v, s) for s in range(len(st))] for v, st in enumerate(net.states)]
        k = 1
        while True:
            ok = True
            for f in maps:
                fk = list(range(len(f)))
                for _ in range(k):
                    fk = [f[s] for s in fk]
                if any(fk[fk[s]] != fk[s] for s in range(len(f))):
                    ok = False
                    break
            if ok:
                return (k,) * len(net.alphabet)
            k += 1

    return _cached(net, "idempotent", compute)


@dataclass(frozen=True)
class LocalData:
    """Per-processor view of the group acting on its locally recurrent states.

    ``loc`` lists local state indices; ``perm[a]`` maps each of them under
    letter ``a``; ``reps[s]`` is an exponent vector (over the vertex's letters)
    carrying ``base`` to ``s``; ``kernel`` is a lattice basis (rows) of the
    vertex's part of the total kernel.
    """

    letters: tuple
    loc: tuple
    base: int
    perm: dict
    orders: dict
    reps: dict
    kernel: tuple


def _local_data(net: Network) -> tuple[LocalData, ...]:
    def compute():
        k = idempotent_vector(net)[0] if net.alphabet else 1
        out = []
        for v, st in enumerate(net.states):
            letters = tuple(_vertex_letters(net, v))
            image = set()
            for s in range(len(st)):
                t = s
                for _ in range(k):
                    t = _apply_all(net, v, t)
                image.add(t)
            loc = tuple(sorted(image))
            perm = {a: {s: net.next_index(a, s) for s in loc} for a in letters}
            for a in letters:
                if set(perm[a].values()) != image:
                    raise NotLocallyIrreducible(f"letter {net.alphabet[a]!r} does not permute the recurrent states")
            base = loc[0]
            reps = {base: (0,) * len(letters)}
            queue = [base]
            for s in queue:
                for j, a in enumerate(letters):
                    t = perm[a][s]
                    if t not in reps:
                        reps[t] = tuple(c + (1 if i == j else 0) for i, c in enumerate(reps[s]))
                        queue.append(t)
            if len(reps) != len(loc):
                raise NotLocallyIrreducible(f"vertex {net.vertices[v]!r} has more than one recurrent orbit")
            orders = {}
            for a in letters:
                seen, t, m = base, perm[a][base], 1
                while t != seen:
                    t, m = perm[a][t], m + 1
                orders[a] = m
            gens = []
            for s in loc:
                for j, a in enumerate(letters):
                    t = perm[a][s]
                    gens.append([reps[s][i] + (1 if i == j else 0) - reps[t][i] for i in range(len(letters))])
            kernel = tuple(tuple(r) for r in linalg.lattice_basis(gens, len(letters)))
            out.append(LocalData(letters, loc, base, perm, orders, reps, kernel))
        return tuple(out)

    return _cached(net, "local", compute)


def locally_recurrent_states(net: Network) -> tuple[tuple, ...]:
    """Per vertex, the locally recurrent local states (in state order)."""
    return tuple(tuple(net.states[v][s] for s in d.loc) for v, d in enumerate(_local_data(net)))


def is_locally_irreducible(net: Network) -> bool:
    try:
        _local_data(net)
    except NotLocallyIrreducible:
        return False
    return True


def is_locally_recurrent(net: Network, q: Sequence) -> bool:
    loc = locally_recurrent_states(net)
    return all(s in allowed for s, allowed in zip(q, loc))


def letter_orders(net: Network) -> tuple[int, ...]:
    """Order of each letter's permutation on the locally recurrent states."""
    data = _local_data(net)
    return tuple(data[net.owner[a]].orders[a] for a in range(len(net.alphabet)))


def connecting_vector(net: Network, q_from: Sequence, q_to: Sequence) -> tuple[int, ...]:
    """A nonnegative ``n`` with ``t_n q_from = q_to``, both locally recurrent."""
    data = _local_data(net)
    out = [0] * len(net.alphabet)
    qf, qt = net.q_indices(q_from), net.q_indices(q_to)
    for v, d in enumerate(data):
        if qf[v] not in d.reps or qt[v] not in d.reps:
            raise NotLocallyRecurrent(f"state at vertex {net.vertices[v]!r} is not locally recurrent")
        for j, a in enumerate(d.letters):
            out[a] = (d.reps[qt[v]][j] - d.reps[qf[v]][j]) % d.orders[a]
    return tuple(out)


# ------------------------------------------------------------ total kernel


@dataclass(frozen=True)
class IntegerLattice:
    """Finite-index sublattice of Z^A; ``basis`` is square with the generators as columns."""

    basis: tuple
    _net: Network

    def index(self) -> int:
        return abs(int(linalg.det(self.basis)))

    def contains(self, z: Sequence[int]) -> bool:
        return acts_trivially(self._net, z)

    def columns(self) -> list[list[int]]:
        return linalg.transpose(self.basis)


def acts_trivially(net: Network, z: Sequence[int]) -> bool:
    """Whether ``t_{z+} = t_{z-}`` on the locally recurrent states."""
    for d in _local_data(net):
        s = d.base
        for a in d.letters:
            for _ in range(z[a] % d.orders[a]):
                s = d.perm[a][s]
        if s != d.base:
            return False
    return True


def total_kernel(net: Network) -> IntegerLattice:
    def compute():
        n = len(net.alphabet)
        cols = []
        for d in _local_data(net):
            for row in d.kernel:
                col = [0] * n
                for a, c in zip(d.letters, row):
                    col[a] = c
                cols.append(col)
        return IntegerLattice(tuple(tuple(r) for r in linalg.transpose(cols)) if cols else (), net)

    return _cached(net, "kernel", compute)


def kernel_index(net: Network) -> int:
    """|Z^A / K|, the product of the local orbit sizes."""
    out = 1
    for d in _local_data(net):
        out *= len(d.loc)
    return out


# ------------------------------------------------------- production matrix


def production_matrix(net: Network) -> list[list[Fraction]]:
    """``P[b][a]``: average number of ``b`` produced per ``a`` processed on recurrent states."""

    def compute():
        n = len(net.alphabet)
        data = _local_data(net)
        p = [[Fraction(0)] * n for _ in range(n)]
        for a in range(n):
            d = data[net.owner[a]]
            s = d.base
            for _ in range(d.orders[a]):
                for b, c in net.emit_items(a, s):
                    p[b][a] += c
                s = net.next_index(a, s)
            for b in range(n):
                p[b][a] /= d.orders[a]
        return p

    return [row[:] for row in _cached(net, "production", compute)]


def production_digraph(net: Network) -> list[list[int]]:
    """Adjacency lists: ``a -> b`` when processing ``a`` eventually produces ``b``."""
    p = production_matrix(net)
    n = len(p)
    return [[b for b in range(n) if p[b][a] > 0] for a in range(n)]


def strong_components(graph: Sequence[Sequence[int]]) -> list[list[int]]:
    """Strongly connected components, each sorted, in order of smallest member."""
    from .core import _reach

    n = len(graph)
    back: list[list[int]] = [[] for _ in range(n)]
    for u, row in enumerate(graph):
        for w in row:
            back[w].append(u)
    done = [False] * n
    comps = []
    for u in range(n):
        if not done[u]:
            comp = sorted(_reach(graph, u) & _reach(back, u))
            for w in comp:
                done[w] = True
            comps.append(comp)
    return comps


def is_strongly_connected(net: Network) -> bool:
    return len(strong_components(production_digraph(net))) == 1


def _one_signed(v: Sequence[Fraction]) -> bool:
    return all(x > 0 for x in v) or all(x < 0 for x in v)


def _positive_kernel_vector(m: Sequence[Sequence[Fraction]]) -> list[Fraction] | None:
    ker = linalg.nullspace(m)
    if len(ker) == 1 and _one_signed(ker[0]):
        return ker[0] if ker[0][0] > 0 else [-x for x in ker[0]]
    return None


def _i_minus(p: Sequence[Sequence[Fraction]], scale=1) -> list[list[Fraction]]:
    n = len(p)
    return [[(scale if i == j else 0) - p[i][j] for j in range(n)] for i in range(n)]


def _classify_block(p: Sequence[Sequence[Fraction]]) -> str:
    m = _i_minus(p)
    if _positive_kernel_vector(m) is not None:
        return CRITICAL
    try:
        inv = linalg.inverse(m)
    except ZeroDivisionError:
        return SUPERCRITICAL
    return SUBCRITICAL if all(x >= 0 for row in inv for x in row) else SUPERCRITICAL


@dataclass(frozen=True)
class NetworkClass:
    """Overall tag (the worst component) plus one tag per strong component."""

    tag: str
    components: tuple  # ((letters...), tag)

    def __str__(self):
        return self.tag


def classify(net: Network) -> NetworkClass:
    def compute():
        p = production_matrix(net)
        comps = []
        for comp in strong_components(production_digraph(net)):
            block = [[p[i][j] for j in comp] for i in comp]
            comps.append((tuple(net.alphabet[a] for a in comp), _classify_block(block)))
        worst = max((t for _, t in comps), key=_RANK.__getitem__, default=SUBCRITICAL)
        return NetworkClass(worst, tuple(comps))

    return _cached(net, "class", compute)


def _require_strongly_connected(net: Network):
    if not is_strongly_connected(net):
        raise NotStronglyConnected("the production digraph is not strongly connected")


def _require_critical(net: Network):
    _require_strongly_connected(net)
    if classify(net).tag != CRITICAL:
        raise NotCritical(f"network is {classify(net).tag}")


def period_vector(net: Network) -> tuple[int, ...]:
    """Smallest positive vector in K on the 1-eigenline of P."""

    def compute():
        _require_critical(net)
        r0 = linalg.primitive_integer_vector(_positive_kernel_vector(_i_minus(production_matrix(net))))
        k = 1
        for d in _local_data(net):
            s, m = d.base, 0
            while True:
                for a in d.letters:
                    for _ in range(r0[a] % d.orders[a]):
                        s = d.perm[a][s]
                m += 1
                if s == d.base:
                    break
            k = lcm(k, m)
        return tuple(k * c for c in r0)

    return _cached(net, "period", compute)


def perron_root(net: Network) -> Fraction:
    """The Perron eigenvalue of P for a strongly connected network, when rational."""
    _require_strongly_connected(net)
    if classify(net).tag == CRITICAL:
        return Fraction(1)
    p = production_matrix(net)
    pt = linalg.transpose(p)
    for mu in sorted(linalg.rational_roots(linalg.char_poly(p)), reverse=True):
        if mu > 0 and _positive_kernel_vector(_i_minus(pt, mu)) is not None:
            return mu
    raise PreconditionViolated("the Perron eigenvalue of the production matrix is irrational")


def exchange_rate(net: Network) -> tuple[int, ...]:
    """Primitive positive integer left Perron eigenvector of P."""

    def compute():
        mu = perron_root(net)
        pt = linalg.transpose(production_matrix(net))
        return tuple(linalg.primitive_integer_vector(_positive_kernel_vector(_i_minus(pt, mu))))

    return _cached(net, "exchange", compute)


# ------------------------------------------------------------------ groups


@dataclass(frozen=True)
class GroupInvariants:
    """Z^free_rank plus the cyclic factors Z_d for d in ``divisors``."""

    free_rank: int
    divisors: tuple

    @property
    def torsion_order(self) -> int:
        out = 1
        for d in self.divisors:
            out *= d
        return out

    def __str__(self):
        parts = [f"Z{d}" for d in self.divisors] + ["Z"] * self.free_rank
        return " x ".join(parts) if parts else "0"


def _integer_matrix(m: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    out = []
    for row in m:
        if any(Fraction(x).denominator != 1 for x in row):
            raise PreconditionViolated("expected an integer matrix")
        out.append([int(x) for x in row])
    return out


def _image_of_kernel(net: Network) -> list[list[int]]:
    """Columns are (I - P) applied to the total-kernel basis."""
    return _integer_matrix(linalg.mat_mul(_i_minus(production_matrix(net)), total_kernel(net).basis))


def _invariants(m: Sequence[Sequence[int]], dim: int) -> GroupInvariants:
    diag, rk = linalg.elementary_divisors(m) if m and m[0] else ([], 0)
    return GroupInvariants(dim - rk, tuple(d for d in diag if d > 1))


def grothendieck_invariants(net: Network) -> GroupInvariants:
    """Invariants of Z^A / (I - P)K."""
    return _cached(net, "grothendieck", lambda: _invariants(_image_of_kernel(net), len(net.alphabet)))


def zero_sum_basis(s: Sequence[int]) -> tuple[list[list[int]], list[list[int]]]:
    """Unimodular V whose columns 2.. span {z : s.z = 0}, together with V^-1."""
    _, _, v = linalg.smith_normal_form([list(s)])
    vinv = _integer_matrix(linalg.inverse(v))
    return v, vinv


def torsion_group(net: Network) -> GroupInvariants:
    """The torsion group; computed inside the zero-level lattice for critical networks."""

    def compute():
        if not (is_strongly_connected(net) and classify(net).tag == CRITICAL):
            g = grothendieck_invariants(net)
            return GroupInvariants(0, g.divisors)
        _, vinv = zero_sum_basis(exchange_rate(net))
        image = _image_of_kernel(net)
        coords = linalg.mat_mul(vinv, image)[1:]
        return _invariants(coords, len(net.alphabet) - 1)

    return _cached(net, "torsion", compute)
