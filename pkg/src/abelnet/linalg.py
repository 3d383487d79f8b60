"""Exact linear algebra over the rationals and the integers.

Matrices are plain lists of rows. Rational work uses :class:`fractions.Fraction`
and integer work uses Python's unbounded ``int``, so no decision anywhere in
the package depends on floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Matrix = list[list]


def identity(n: int, one=1) -> Matrix:
    zero = one - one
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def to_fractions(m: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in m]


def transpose(m: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*m)] if m else []


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def vec_mat(v: Sequence, a: Sequence[Sequence]) -> list:
    return [sum(v[i] * a[i][j] for i in range(len(v))) for j in range(len(a[0]))]


def rref(m: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = to_fractions(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    return len(rref(m)[1]) if m else 0


def nullspace(m: Sequence[Sequence]) -> list[list[Fraction]]:
    """Basis of the right kernel {v : m v = 0}."""
    a, pivots = rref(m)
    cols = len(m[0])
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for row, p in zip(a, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def det(m: Sequence[Sequence]) -> Fraction:
    a = to_fractions(m)
    n = len(a)
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            result = -result
        result *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return result


def inverse(m: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(m)
    aug = [list(row) + ident for row, ident in zip(to_fractions(m), identity(n, Fraction(1)))]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def solve(m: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Unique solution of m x = b for square nonsingular m."""
    return mat_vec(inverse(m), [Fraction(v) for v in b])


def primitive_integer_vector(v: Sequence) -> list[int]:
    """Scale a rational vector to an integer vector whose entries have gcd 1.

    The sign is chosen so that the first nonzero entry is positive.
    """
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    ints = [x // g for x in ints]
    first = next(x for x in ints if x != 0)
    return ints if first > 0 else [-x for x in ints]


def char_poly(m: Sequence[Sequence]) -> list[Fraction]:
    """Coefficients c_0..c_n of det(xI - m), lowest degree first.

    Obtained by exact Lagrange interpolation at x = 0..n.
    """
    n = len(m)
    a = to_fractions(m)
    xs = list(range(n + 1))
    ys = [det([[(x if i == j else 0) - a[i][j] for j in range(n)] for i in range(n)]) for x in xs]
    coeffs = [Fraction(0)] * (n + 1)
    for k, xk in enumerate(xs):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == k:
                continue
            basis = [Fraction(0)] + basis
            for i in range(len(basis) - 1):
                basis[i] -= xj * basis[i + 1]
            denom *= xk - xj
        for i, c in enumerate(basis):
            coeffs[i] += ys[k] * c / denom
    return coeffs


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def rational_roots(coeffs: Sequence) -> list[Fraction]:
    """Distinct rational roots of a polynomial given lowest degree first."""
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    roots: set[Fraction] = set()
    while c and c[0] == 0:
        roots.add(Fraction(0))
        c.pop(0)
    if len(c) <= 1:
        return sorted(roots)
    den = 1
    for x in c:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in c]
    for p in _divisors(ints[0]):
        for q in _divisors(ints[-1]):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if sum(coef * cand**i for i, coef in enumerate(ints)) == 0:
                    roots.add(cand)
    return sorted(roots)


# ---------------------------------------------------------------- integers


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, S, V) with U*m*V = S diagonal, U and V unimodular.

    The nonzero diagonal entries of S are positive and each divides the next.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    s = [[int(v) for v in row] for row in m]
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for mat in (s, v):
            for row in mat:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        s[dst] = [a - k * b for a, b in zip(s[dst], s[src])]
        u[dst] = [a - k * b for a, b in zip(u[dst], u[src])]

    def add_col(dst, src, k):
        for mat in (s, v):
            for row in mat:
                row[dst] -= k * row[src]

    for t in range(min(rows, cols)):
        entries = [(abs(s[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if s[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            clean = True
            for i in range(t + 1, rows):
                if s[i][t]:
                    add_row(i, t, s[i][t] // s[t][t])
                    clean = clean and s[i][t] == 0
            for j in range(t + 1, cols):
                if s[t][j]:
                    add_col(j, t, s[t][j] // s[t][t])
                    clean = clean and s[t][j] == 0
            if not clean:
                cands = [(abs(s[i][t]), i, t) for i in range(t + 1, rows) if s[i][t]]
                cands += [(abs(s[t][j]), t, j) for j in range(t + 1, cols) if s[t][j]]
                _, i, j = min(cands)
                if j == t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(
                ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if s[i][j] % s[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], -1)
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
    return u, s, v


def elementary_divisors(m: Sequence[Sequence[int]]) -> tuple[list[int], int]:
    """Nonzero diagonal of the Smith form and the rank of m."""
    _, s, _ = smith_normal_form(m)
    diag = [s[i][i] for i in range(min(len(s), len(s[0]) if s else 0)) if s[i][i]]
    return diag, len(diag)


def lattice_basis(generators: Iterable[Sequence[int]], dim: int) -> list[list[int]]:
    """Echelon basis (as rows) of the integer lattice spanned by the generators."""
    pool = [list(map(int, g)) for g in generators if any(g)]
    basis = []
    for c in range(dim):
        while True:
            live = [r for r in pool if r[c]]
            if len(live) <= 1:
                break
            piv = min(live, key=lambda r: abs(r[c]))
            for r in live:
                if r is not piv:
                    k = r[c] // piv[c]
                    for j in range(dim):
                        r[j] -= k * piv[j]
            pool = [r for r in pool if any(r)]
        live = [r for r in pool if r[c]]
        if live:
            piv = live[0]
            if piv[c] < 0:
                piv[:] = [-x for x in piv]
            basis.append(piv)
            pool = [r for r in pool if r is not piv]
    return basis


def integer_coordinates(basis_cols: Sequence[Sequence[int]], v: Sequence[int]) -> list[int] | None:
    """Coordinates of v in a square lattice basis (given as columns), or None."""
    coords = solve(basis_cols, v)
    if any(c.denominator != 1 for c in coords):
        return None
    return [int(c) for c in coords]
