"""Truncated multivariate power series with exact coefficients."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable


def monomials(nvars: int, maxdeg: int) -> Iterable[tuple[int, ...]]:
    """All exponent vectors of total degree <= maxdeg, by degree then lexicographically."""
    for deg in range(maxdeg + 1):
        found = set()
        for combo in combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            found.add(tuple(e))
        yield from sorted(found, reverse=True)


@dataclass
class SeriesTable:
    """Coefficients of a series in ``nvars`` variables, truncated at total degree ``maxdeg``.

    Only nonzero coefficients are stored.
    """

    nvars: int
    maxdeg: int
    coeffs: dict = field(default_factory=dict)

    @classmethod
    def constant(cls, nvars: int, maxdeg: int, c=1) -> "SeriesTable":
        return cls(nvars, maxdeg, {(0,) * nvars: c} if c else {})

    @classmethod
    def geometric(cls, nvars: int, maxdeg: int, variables: Iterable[int]) -> "SeriesTable":
        """Product of 1/(1 - z_i) over the given variables."""
        vs = set(variables)
        out = {}
        for e in monomials(nvars, maxdeg):
            if all(c == 0 or i in vs for i, c in enumerate(e)):
                out[e] = 1
        return cls(nvars, maxdeg, out)

    def __getitem__(self, e) -> int:
        return self.coeffs.get(tuple(e), 0)

    def __add__(self, other: "SeriesTable") -> "SeriesTable":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return SeriesTable(self.nvars, min(self.maxdeg, other.maxdeg),
                           {e: c for e, c in out.items() if c and sum(e) <= min(self.maxdeg, other.maxdeg)})

    def scale(self, k) -> "SeriesTable":
        return SeriesTable(self.nvars, self.maxdeg, {e: c * k for e, c in self.coeffs.items() if c * k})

    def __mul__(self, other: "SeriesTable") -> "SeriesTable":
        deg = min(self.maxdeg, other.maxdeg)
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            d1 = sum(e1)
            for e2, c2 in other.coeffs.items():
                if d1 + sum(e2) <= deg:
                    e = tuple(a + b for a, b in zip(e1, e2))
                    out[e] = out.get(e, 0) + c1 * c2
        return SeriesTable(self.nvars, deg, {e: c for e, c in out.items() if c})

    def __eq__(self, other):
        return (isinstance(other, SeriesTable) and self.nvars == other.nvars
                and self.maxdeg == other.maxdeg and self.coeffs == other.coeffs)

    def integral(self) -> "SeriesTable":
        """Same table with coefficients converted to int; fails on non-integers."""
        out = {}
        for e, c in self.coeffs.items():
            c = Fraction(c)
            if c.denominator != 1:
                raise ValueError(f"coefficient of {e} is not an integer: {c}")
            out[e] = int(c)
        return SeriesTable(self.nvars, self.maxdeg, out)

    def univariate(self) -> list:
        """Coefficients after setting every variable to the same z."""
        out = [0] * (self.maxdeg + 1)
        for e, c in self.coeffs.items():
            out[sum(e)] += c
        return out

    def differences(self, other: "SeriesTable") -> list[tuple]:
        keys = sorted(set(self.coeffs) | set(other.coeffs), key=lambda e: (sum(e), tuple(-x for x in e)))
        return [(e, self[e], other[e]) for e in keys if self[e] != other[e]]

    def to_text(self) -> str:
        """One ``e1,e2,... : c`` line per nonzero coefficient, by degree then exponent."""
        keys = sorted(self.coeffs, key=lambda e: (sum(e), tuple(-x for x in e)))
        return "".join(f"{','.join(map(str, e))} : {self.coeffs[e]}\n" for e in keys)

    @classmethod
    def from_text(cls, text: str, nvars: int, maxdeg: int) -> "SeriesTable":
        out = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            exp, coef = line.split(":")
            out[tuple(int(t) for t in exp.split(","))] = Fraction(coef.strip())
        return cls(nvars, maxdeg, {e: (int(c) if c.denominator == 1 else c) for e, c in out.items()})
