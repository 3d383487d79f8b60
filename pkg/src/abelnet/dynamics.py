"""Update rules, activity vectors, component equivalence and execution balance."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

from . import linalg
from .algebra import (
    CRITICAL,
    classify,
    connecting_vector,
    exchange_rate,
    is_locally_recurrent,
    is_strongly_connected,
    letter_orders,
    locally_recurrent_states,
    period_vector,
    production_matrix,
)
from .core import Configuration, Network, counts_to_word, execute_word, firing_counts, messages, step
from .errors import NotCritical, OrbitCapExceeded, PreconditionViolated, RuleNotApplicable

# ------------------------------------------------------------ update rules


@dataclass(frozen=True)
class UpdateRule:
    """An update rule: ``parallel``, ``sequential``, ``savings`` or ``custom``.

    ``params`` holds the vertex order for sequential, the reserved vertex set
    for savings, and the word-producing callable for custom rules.
    """

    tag: str
    params: dict = field(default_factory=dict, compare=False)
    name: str = ""

    def __str__(self):
        return self.name or self.tag


def parallel() -> UpdateRule:
    return UpdateRule("parallel", {}, "parallel")


def sequential(order: Sequence | None = None) -> UpdateRule:
    return UpdateRule("sequential", {"order": None if order is None else list(order)}, "sequential")


def savings(reserve: Sequence) -> UpdateRule:
    reserve = list(reserve)
    if not reserve:
        raise RuleNotApplicable("savings needs a nonempty reserve set")
    return UpdateRule("savings", {"reserve": reserve}, f"savings{reserve}")


def custom(func: Callable[[Network, Configuration], Sequence], name: str = "custom") -> UpdateRule:
    return UpdateRule("custom", {"func": func}, name)


def ladder() -> UpdateRule:
    """Fire every vertex twice if all hold two letters; else the lowest vertex holding two,
    twice; else the lowest vertex holding one, once.

    It breaks the monotonicity hypothesis and makes activity depend on the
    configuration within a component.
    """

    def word(net: Network, cfg: Configuration):
        x = cfg.x
        if x and all(c >= 2 for c in x):
            return [a for a in net.alphabet for _ in range(2)]
        for need in (2, 1):
            for a, c in zip(net.alphabet, x):
                if c >= need:
                    return [a] * need
        return []

    return custom(word, "ladder")


def _firing_sizes(net: Network) -> list[int]:
    if any(len(p.letters) != 1 for p in net.processors):
        raise RuleNotApplicable(f"rule needs a unary network")
    return list(letter_orders(net))


def _parallel_counts(x: Sequence[int], sizes: Sequence[int], allowed: Sequence[bool]) -> list[int]:
    return [min(max(c, 0), d) if ok else 0 for c, d, ok in zip(x, sizes, allowed)]


def update_word(rule: UpdateRule, net: Network, cfg: Configuration) -> list:
    """The update word of ``cfg``; it is always legal."""
    if rule.tag == "custom":
        w = list(rule.params["func"](net, cfg))
        if not execute_word(net, cfg, w)[1]:
            raise RuleNotApplicable(f"rule {rule} produced an illegal word")
        return w
    sizes = _firing_sizes(net)
    n = len(net.alphabet)
    if rule.tag == "parallel":
        return counts_to_word(net, _parallel_counts(cfg.x, sizes, [True] * n))
    if rule.tag == "savings":
        reserve = {net.letter_index(v) for v in rule.params["reserve"]}
        others = [a not in reserve for a in range(n)]
        if any(cfg.x[a] >= 1 for a in range(n) if others[a]):
            return counts_to_word(net, _parallel_counts(cfg.x, sizes, others))
        return counts_to_word(net, _parallel_counts(cfg.x, sizes, [not o for o in others]))
    if rule.tag == "sequential":
        order = rule.params["order"]
        idx = list(range(n)) if order is None else [net.letter_index(v) for v in order]
        word = []
        cur = cfg
        for a in idx:
            k = min(max(cur.x[a], 0), sizes[a])
            chunk = [net.alphabet[a]] * k
            cur = execute_word(net, cur, chunk)[0]
            word.extend(chunk)
        return word
    raise RuleNotApplicable(f"unknown rule {rule.tag!r}")


def update(rule: UpdateRule, net: Network, cfg: Configuration) -> tuple[Configuration, list]:
    w = update_word(rule, net, cfg)
    return execute_word(net, cfg, w)[0], w


# ---------------------------------------------------------------- activity


@dataclass(frozen=True)
class Orbit:
    """Update orbit: ``configs[0]`` is the start, the cycle begins at ``tail``."""

    configs: tuple
    words: tuple
    tail: int

    @property
    def period(self) -> int:
        return len(self.configs) - self.tail


def update_orbit(rule: UpdateRule, net: Network, cfg: Configuration, cap: int = 100_000) -> Orbit:
    seen = {cfg: 0}
    configs = [cfg]
    words = []
    cur = cfg
    for i in range(1, cap + 1):
        cur, w = update(rule, net, cur)
        words.append(tuple(w))
        if cur in seen:
            return Orbit(tuple(configs), tuple(words), seen[cur])
        seen[cur] = i
        configs.append(cur)
    raise OrbitCapExceeded(f"no repeated configuration within {cap} updates")


def activity_vector(net: Network, cfg: Configuration, rule: UpdateRule, cap: int = 100_000) -> tuple[Fraction, ...]:
    """Exact long-run average of |u_i| over the periodic part of the update orbit."""
    if not (is_strongly_connected(net) and classify(net).tag == CRITICAL):
        raise NotCritical("activity vectors need a strongly connected critical network")
    orb = update_orbit(rule, net, cfg, cap)
    total = [0] * len(net.alphabet)
    for w in orb.words[orb.tail:]:
        for a, c in enumerate(firing_counts(net, w)):
            total[a] += c
    return tuple(Fraction(t, orb.period) for t in total)


# -------------------------------------------------------------- H1 and H2


@dataclass(frozen=True)
class HypothesisViolation:
    kind: str  # "H1" or "H2"
    config: Configuration
    letter: object = None
    word: tuple = ()
    next_word: tuple = ()


@dataclass
class HypothesisReport:
    violations: list
    checked: int

    @property
    def h1_ok(self) -> bool:
        return not any(v.kind == "H1" for v in self.violations)

    @property
    def h2_ok(self) -> bool:
        return not any(v.kind == "H2" for v in self.violations)


def _check_one(rule, net, cfg, out):
    u = update_word(rule, net, cfg)
    if any(c > 0 for c in cfg.x) and all(c >= 0 for c in cfg.x) and not u:
        out.append(HypothesisViolation("H1", cfg))
    cu = firing_counts(net, u)
    for a, c in zip(net.alphabet, cfg.x):
        if c < 1:
            continue
        nxt = step(net, cfg, a)
        u2 = update_word(rule, net, nxt)
        bound = firing_counts(net, u2)
        ai = net.index[a]
        if any(cu[b] > bound[b] + (1 if b == ai else 0) for b in range(len(cu))):
            out.append(HypothesisViolation("H2", cfg, a, tuple(u), tuple(u2)))


def check_H1_H2(rule: UpdateRule, net: Network, samples: int = 2000, max_letters: int | None = None,
                seed: int = 0) -> HypothesisReport:
    """Falsification search: every config with 0 <= x <= max_letters, then random samples."""
    if max_letters is None:
        max_letters = max(letter_orders(net)) + 1
    out: list = []
    checked = 0
    loc = locally_recurrent_states(net)
    states = list(product(*loc))
    space = (max_letters + 1) ** len(net.alphabet) * len(states)
    if space <= 50_000:
        for q in states:
            for x in product(range(max_letters + 1), repeat=len(net.alphabet)):
                _check_one(rule, net, Configuration(x, q), out)
                checked += 1
    rng = random.Random(seed)
    for _ in range(samples):
        x = tuple(rng.randint(0, 2 * max_letters + 2) for _ in net.alphabet)
        q = tuple(rng.choice(st) for st in loc)
        _check_one(rule, net, Configuration(x, q), out)
        checked += 1
    return HypothesisReport(out, checked)


# ------------------------------------------------------------- components


class _Inconclusive:
    def __repr__(self):
        return "Inconclusive"

    def __bool__(self):
        raise TypeError("Inconclusive has no truth value")


INCONCLUSIVE = _Inconclusive()


def legal_successors(net: Network, cfg: Configuration):
    for a, c in zip(net.alphabet, cfg.x):
        if c >= 1:
            yield step(net, cfg, a)


def reachable(net: Network, cfg: Configuration, budget: int = 100_000) -> tuple[set, bool]:
    """Configurations reachable by legal executions; flag says whether the set is complete."""
    seen = {cfg}
    queue = deque([cfg])
    while queue:
        if len(seen) > budget:
            return seen, False
        cur = queue.popleft()
        for nxt in legal_successors(net, cur):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen, True


def _critical(net: Network) -> bool:
    return is_strongly_connected(net) and classify(net).tag == CRITICAL


def same_component(net: Network, c1: Configuration, c2: Configuration, budget: int = 100_000):
    """Whether some configuration is legally reachable from both; may be Inconclusive."""
    if c1 == c2:
        return True
    if _critical(net) and is_locally_recurrent(net, c1.q) and is_locally_recurrent(net, c2.q):
        from .recurrence import is_recurrent, level

        if level(net, c1) != level(net, c2):
            return False
        for rec, other in ((c2, c1), (c1, c2)):
            if is_recurrent(net, rec):
                seen, complete = _search_for(net, other, rec, budget)
                if seen:
                    return True
                return False if complete else INCONCLUSIVE
    r1, done1 = reachable(net, c1, budget)
    if c2 in r1:
        return True
    r2, done2 = reachable(net, c2, budget)
    if r1 & r2:
        return True
    return False if done1 and done2 else INCONCLUSIVE


def _search_for(net, start, target, budget):
    seen = {start}
    queue = deque([start])
    while queue:
        if len(seen) > budget:
            return False, False
        cur = queue.popleft()
        for nxt in legal_successors(net, cur):
            if nxt == target:
                return True, True
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False, True


# ------------------------------------------------------ voltage and balance


def _require_critical(net: Network):
    if not _critical(net):
        raise NotCritical("needs a strongly connected critical network")


def transition_matrix(net: Network) -> list[list[Fraction]]:
    """p(a, b) = s(b) P(b, a) / s(a), a stochastic matrix for critical networks."""
    _require_critical(net)
    s = exchange_rate(net)
    p = production_matrix(net)
    n = len(s)
    return [[Fraction(s[b]) * p[b][a] / s[a] for b in range(n)] for a in range(n)]


def voltage_vector(net: Network, a, z) -> tuple[Fraction, ...]:
    """v_{a,z}(b) = s(b)/s(a) times the expected visits to a, from b, before hitting z."""
    ai, zi = net.letter_index(a), net.letter_index(z)
    n = len(net.alphabet)
    if ai == zi:
        _require_critical(net)
        return (Fraction(0),) * n
    key = ("voltage", ai, zi)
    if key not in net._memo:
        p = transition_matrix(net)
        s = exchange_rate(net)
        rest = [b for b in range(n) if b != zi]
        m = [[(1 if i == j else 0) - p[i][j] for j in rest] for i in rest]
        green = linalg.inverse(m)
        col = rest.index(ai)
        v = [Fraction(0)] * n
        for row, b in enumerate(rest):
            v[b] = Fraction(s[b], s[ai]) * green[row][col]
        net._memo[key] = tuple(v)
    return net._memo[key]


def state_difference(net: Network, a, z, q_from: Sequence, q_to: Sequence) -> Fraction:
    """diff_{a,z}(q_from, q_to) via the connecting word from order arithmetic."""
    n = connecting_vector(net, q_from, q_to)
    word = counts_to_word(net, n)
    pw = linalg.mat_vec(production_matrix(net), n)
    emitted = messages(net, q_from, word)
    v = voltage_vector(net, a, z)
    return sum(vi * (x - y) for vi, x, y in zip(v, pw, emitted))


@dataclass
class BalanceReport:
    """Per-letter slack in the two-sided execution bound, plus exactness of the balance identity."""

    length: int
    c: tuple
    lower_slack: tuple
    upper_slack: tuple
    identity_failures: list

    @property
    def ok(self) -> bool:
        return all(x > 0 for x in self.lower_slack) and all(x > 0 for x in self.upper_slack) \
            and not self.identity_failures


def balance_check(net: Network, start: Configuration, end: Configuration, w: Sequence) -> BalanceReport:
    """Check the confluence bound and the per-pair balance identity for a legal word."""
    _require_critical(net)
    if not (is_locally_recurrent(net, start.q) and is_locally_recurrent(net, end.q)):
        raise PreconditionViolated("both states must be locally recurrent")
    got, legal = execute_word(net, start, w)
    if not legal or got != end:
        raise PreconditionViolated("word is not a legal execution from start to end")
    r = period_vector(net)
    counts = firing_counts(net, w)
    dx = [a - b for a, b in zip(start.x, end.x)]
    n = len(net.alphabet)
    rhs = [[None] * n for _ in range(n)]
    failures = []
    for ai, a in enumerate(net.alphabet):
        for zi, z in enumerate(net.alphabet):
            v = voltage_vector(net, a, z)
            val = sum(vi * d for vi, d in zip(v, dx)) + state_difference(net, a, z, end.q, start.q)
            rhs[ai][zi] = val
            if counts[ai] != val + Fraction(r[ai], r[zi]) * counts[zi]:
                failures.append((a, z))
    c = tuple(max(row) for row in rhs)
    length = len(w)
    rn = sum(r)
    cn = sum(c)
    mid = [counts[a] - Fraction(length * r[a], rn) for a in range(n)]
    lower = tuple(mid[a] + Fraction(cn, rn) * r[a] + r[a] for a in range(n))
    upper = tuple(r[a] + c[a] - mid[a] for a in range(n))
    return BalanceReport(length, c, lower, upper, failures)
