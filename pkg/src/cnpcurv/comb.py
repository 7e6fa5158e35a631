"""Exact multi-index combinatorics.

Multi-indices, multinomial coefficients, graded monomial counts q_m(n), and
the exact rational identity that underpins the graded trace formulas.  This
module is floating-point free: everything is integer or `fractions.Fraction`
arithmetic so identities can be asserted exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .errors import IndexDegreeError

# Exact rational carrier used across the package.
Rational = Fraction


@dataclass(frozen=True)
class MultiIndex:
    """A d-tuple of non-negative integers with its total degree cached."""

    entries: tuple[int, ...]
    degree: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        entries = tuple(int(e) for e in self.entries)
        if len(entries) == 0:
            raise ValueError("multi-index needs at least one entry")
        if any(e < 0 for e in entries):
            raise ValueError(f"multi-index entries must be non-negative: {entries}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "degree", sum(entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        if len(other) != len(self):
            raise ValueError("cannot add multi-indices of different lengths")
        return MultiIndex(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __str__(self) -> str:
        return "(" + ",".join(str(e) for e in self.entries) + ")"


def as_multi_index(alpha) -> MultiIndex:
    """Coerce a tuple/list of ints (or a MultiIndex) to a MultiIndex."""
    if isinstance(alpha, MultiIndex):
        return alpha
    return MultiIndex(tuple(alpha))


def enumerate_degree(d: int, n: int) -> list[MultiIndex]:
    """All multi-indices of length d with total degree n, lexicographically.

    The length of the result is q(d-1, n); this ordering is the canonical
    layout for every graded vector and matrix in the package.
    """
    if d < 1:
        raise ValueError("dimension d must be >= 1")
    if n < 0:
        raise ValueError("degree n must be >= 0")

    def rec(dim: int, total: int) -> Iterator[tuple[int, ...]]:
        if dim == 1:
            yield (total,)
            return
        for head in range(total + 1):
            for tail in rec(dim - 1, total - head):
                yield (head,) + tail

    return [MultiIndex(t) for t in rec(d, n)]


def enumerate_up_to_degree(d: int, n: int) -> list[MultiIndex]:
    """All multi-indices of length d with degree <= n, by degree then lex."""
    out: list[MultiIndex] = []
    for m in range(n + 1):
        out.extend(enumerate_degree(d, m))
    return out


def multinomial(alpha) -> int:
    """Exact multinomial coefficient |alpha|! / (alpha_1! ... alpha_d!)."""
    a = as_multi_index(alpha)
    num = math.factorial(a.degree)
    den = math.prod(math.factorial(e) for e in a.entries)
    return num // den


def q(m: int, n: int) -> int:
    """Exact binomial binom(m+n, m), with q(0, n) = 1.

    q(d-1, n) counts monomials of degree n in d variables; q(d, n) counts
    those of degree <= n.
    """
    if m < 0 or n < 0:
        raise ValueError("q(m, n) requires m, n >= 0")
    return math.comb(m + n, m)


@dataclass(frozen=True)
class Id2Check:
    lhs: Rational
    rhs: Rational
    equal: bool


def verify_id2(d: int, n: int, beta) -> Id2Check:
    """Exactly evaluate both sides of the multinomial-ratio identity

        sum_{|alpha| = n - |beta|} binom(|alpha|, alpha) binom(|beta|, beta)
                                   / binom(|alpha+beta|, alpha+beta)
            =  q(d-1, n) / q(d-1, |beta|)

    and report whether they agree (they always should).
    """
    b = as_multi_index(beta)
    if len(b) != d:
        raise ValueError(f"beta has length {len(b)}, expected {d}")
    if b.degree > n:
        raise IndexDegreeError(f"|beta| = {b.degree} exceeds n = {n}")
    mb = multinomial(b)
    lhs = Rational(0)
    for a in enumerate_degree(d, n - b.degree):
        lhs += Rational(multinomial(a) * mb, multinomial(a + b))
    rhs = Rational(q(d - 1, n), q(d - 1, b.degree))
    return Id2Check(lhs=lhs, rhs=rhs, equal=lhs == rhs)
