"""Exact polynomials and piecewise polynomials on a closed interval.

A polynomial is a tuple of :class:`Fraction` coefficients, constant term
first, with trailing zeros trimmed (the zero polynomial is ``()``).

A piecewise polynomial on ``[0, L]`` is a :class:`Pieces` value: the sorted
interior breakpoints plus one polynomial per piece, each written in the
global coordinate of the interval.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Poly = tuple

ZERO: Poly = ()


def poly(*coeffs) -> Poly:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return poly(*((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)))


def scale(p: Poly, c) -> Poly:
    return poly(*(c * a for a in p))


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ZERO
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return poly(*out)


def evaluate(p: Poly, s) -> Fraction:
    acc = Fraction(0)
    for a in reversed(p):
        acc = acc * s + a
    return acc


def derivative(p: Poly) -> Poly:
    return poly(*(k * p[k] for k in range(1, len(p))))


def antiderivative(p: Poly) -> Poly:
    return poly(0, *(Fraction(a) / (k + 1) for k, a in enumerate(p)))


def integral(p: Poly, a, b) -> Fraction:
    big = antiderivative(p)
    return evaluate(big, b) - evaluate(big, a)


def shift(p: Poly, d) -> Poly:
    """Return ``q`` with ``q(s) = p(s + d)``."""
    out = ZERO
    power = poly(1)
    base = poly(d, 1)
    for a in p:
        out = add(out, scale(power, a))
        power = mul(power, base)
    return out


def reflect(p: Poly, length) -> Poly:
    """Return ``q`` with ``q(s) = p(length - s)``."""
    out = ZERO
    power = poly(1)
    base = poly(length, -1)
    for a in p:
        out = add(out, scale(power, a))
        power = mul(power, base)
    return out


def degree(p: Poly) -> int:
    return len(p) - 1


@dataclass(frozen=True)
class Pieces:
    """Piecewise polynomial on ``[0, length]``."""

    length: Fraction
    cuts: tuple[Fraction, ...]
    polys: tuple[Poly, ...]

    def __post_init__(self):
        if len(self.polys) != len(self.cuts) + 1:
            raise ValueError("need one polynomial per piece")
        if any(not (0 < c < self.length) for c in self.cuts) or list(self.cuts) != sorted(set(self.cuts)):
            raise ValueError("cuts must be sorted, distinct and interior")

    @classmethod
    def single(cls, length, p: Poly) -> "Pieces":
        return cls(Fraction(length), (), (p,))

    @property
    def bounds(self) -> list[tuple[Fraction, Fraction]]:
        pts = [Fraction(0), *self.cuts, self.length]
        return list(zip(pts[:-1], pts[1:]))

    def piece(self, s, side: str = "right") -> Poly:
        """Polynomial governing ``s``; at a cut, ``side`` picks the piece."""
        if side == "right":
            k = bisect_right(self.cuts, s)
            return self.polys[min(k, len(self.polys) - 1)]
        k = bisect_left(self.cuts, s)
        return self.polys[k]

    def __call__(self, s) -> Fraction:
        return evaluate(self.piece(s), s)

    def refine(self, cuts: Iterable) -> "Pieces":
        new = tuple(sorted(set(self.cuts) | {Fraction(c) for c in cuts if 0 < c < self.length}))
        pts = [Fraction(0), *new, self.length]
        polys = tuple(self.piece((a + b) / 2) for a, b in zip(pts[:-1], pts[1:]))
        return Pieces(self.length, new, polys)

    def combine(self, other: "Pieces", op) -> "Pieces":
        if self.length != other.length:
            raise ValueError("interval lengths differ")
        a = self.refine(other.cuts)
        b = other.refine(self.cuts)
        return Pieces(a.length, a.cuts, tuple(op(p, q) for p, q in zip(a.polys, b.polys))).simplified()

    def __add__(self, other: "Pieces") -> "Pieces":
        return self.combine(other, add)

    def map(self, fn) -> "Pieces":
        return Pieces(self.length, self.cuts, tuple(fn(p) for p in self.polys)).simplified()

    def simplified(self) -> "Pieces":
        """Merge neighbouring pieces carrying the same polynomial."""
        cuts: list[Fraction] = []
        polys: list[Poly] = [self.polys[0]]
        for c, p in zip(self.cuts, self.polys[1:]):
            if p == polys[-1]:
                continue
            cuts.append(c)
            polys.append(p)
        return Pieces(self.length, tuple(cuts), tuple(polys))

    def integral_against(self, other: "Pieces") -> Fraction:
        a = self.refine(other.cuts)
        b = other.refine(self.cuts)
        return sum(
            (integral(mul(p, q), lo, hi) for (lo, hi), p, q in zip(a.bounds, a.polys, b.polys)),
            Fraction(0),
        )

    def integral(self) -> Fraction:
        return sum((integral(p, lo, hi) for (lo, hi), p in zip(self.bounds, self.polys)), Fraction(0))

    def is_zero(self) -> bool:
        return all(p == ZERO for p in self.polys)

    def max_degree(self) -> int:
        return max(degree(p) for p in self.polys)


def concatenate(lengths: Sequence[Fraction], parts: Sequence[Pieces]) -> Pieces:
    """Glue ``parts`` (each on ``[0, lengths[k]]``) end to end."""
    offset = Fraction(0)
    cuts: list[Fraction] = []
    polys: list[Poly] = []
    for k, (ln, part) in enumerate(zip(lengths, parts)):
        if k:
            cuts.append(offset)
        for c in part.cuts:
            cuts.append(c + offset)
        polys.extend(shift(p, -offset) for p in part.polys)
        offset += ln
    return Pieces(offset, tuple(cuts), tuple(polys)).simplified()
