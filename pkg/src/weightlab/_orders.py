"""Exact asymptotic orders ``T**e * (log T)**k`` for radial power profiles.

A point of the (|x_B|, R) plane is followed along ``|x_B| = T**u``,
``R = T**t`` with ``T -> inf``.  Every quantity built from (piecewise) powers
then behaves like ``T**e (log T)**k`` with rational ``e`` and ``k``.
``None`` as an order means the quantity is infinite.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

NEG_INF = None  # sentinel for an open lower end at radius 0
POS_INF = "inf"


@dataclass(frozen=True, order=True)
class Order:
    exp: Fraction
    log: Fraction = Fraction(0)

    def __add__(self, other: "Order") -> "Order":
        return Order(self.exp + other.exp, self.log + other.log)

    def __sub__(self, other: "Order") -> "Order":
        return Order(self.exp - other.exp, self.log - other.log)

    def scale(self, c) -> "Order":
        c = Fraction(c)
        return Order(self.exp * c, self.log * c)

    @property
    def bounded(self) -> bool:
        return self.exp < 0 or (self.exp == 0 and self.log <= 0)

    def __str__(self):
        s = f"T^{self.exp}"
        if self.log:
            s += f" (log T)^{self.log}"
        return s


ONE = Order(Fraction(0))


def mono(e) -> Order:
    return Order(Fraction(e))


def omax(*orders):
    """Order of a sum: the largest term, or ``None`` if any term is infinite."""
    if any(o is None for o in orders):
        return None
    return max(orders)


@dataclass(frozen=True)
class Profile:
    """Radial profile ``|y|**inner`` for ``|y| < 1`` and ``|y|**outer`` beyond."""

    inner: Fraction
    outer: Fraction

    def at(self, s: Fraction) -> Fraction:
        """Exponent of ``T`` of the profile at ``|y| = T**s``."""
        if s < 0:
            return self.inner * s
        return self.outer * s

    def shift(self, c) -> "Profile":
        c = Fraction(c)
        return Profile(self.inner + c, self.outer + c)

    def scale(self, c) -> "Profile":
        c = Fraction(c)
        return Profile(self.inner * c, self.outer * c)


def _split(lo, hi, prof: Profile):
    """Pieces of ``[lo, hi]`` (log radii) on which the profile is one power."""
    if lo is not NEG_INF and hi != POS_INF and lo >= hi:
        return []
    pieces = []
    if lo is NEG_INF or lo < 0:
        top = 0 if hi == POS_INF or hi > 0 else hi
        pieces.append((lo, top, prof.inner))
    if hi == POS_INF or hi > 0:
        bot = 0 if lo is NEG_INF or lo < 0 else lo
        pieces.append((bot, hi, prof.outer))
    return [(a, b, e) for a, b, e in pieces if a is NEG_INF or b == POS_INF or a < b]


def radial_mass(prof: Profile, n: int, lo, hi) -> Order | None:
    """Order of ``int_{T**lo < |y| < T**hi} prof(|y|) dy``.

    ``lo == hi`` denotes a shell of fixed ratio at scale ``T**lo``.  Ends may
    be ``NEG_INF`` (radius 0) or ``POS_INF``; divergent integrals give ``None``.
    """
    if lo is not NEG_INF and hi != POS_INF and lo == hi:
        return Order(prof.at(lo) + n * lo)
    terms = []
    for a, b, e in _split(lo, hi, prof):
        k = e + n
        if a is NEG_INF:
            if k <= 0:
                return None
            terms.append(Order(k * b))
        elif b == POS_INF:
            if k >= 0:
                return None
            terms.append(Order(k * a))
        elif k > 0:
            terms.append(Order(k * b))
        elif k < 0:
            terms.append(Order(k * a))
        else:
            terms.append(Order(Fraction(0), Fraction(1)))
    return omax(*terms) if terms else None


def radial_sup(prof: Profile, lo, hi) -> Order | None:
    """Order of ``sup_{T**lo < |y| < T**hi} prof(|y|)``; ``None`` if infinite."""
    if lo is not NEG_INF and hi != POS_INF and lo == hi:
        return Order(prof.at(lo))
    terms = []
    for a, b, e in _split(lo, hi, prof):
        if a is NEG_INF:
            if e < 0:
                return None
            terms.append(Order(e * b))
        elif b == POS_INF:
            if e > 0:
                return None
            terms.append(Order(e * a))
        else:
            terms.append(Order(max(e * a, e * b)))
    return omax(*terms)


def radial_inf(prof: Profile, lo, hi) -> Order | None:
    """Order of ``inf`` over the shell; ``None`` when the infimum is 0."""
    if lo is not NEG_INF and hi != POS_INF and lo == hi:
        return Order(prof.at(lo))
    terms = []
    for a, b, e in _split(lo, hi, prof):
        if a is NEG_INF:
            if e > 0:
                return None
            terms.append(Order(e * b))
        elif b == POS_INF:
            if e < 0:
                return None
            terms.append(Order(e * a))
        else:
            terms.append(Order(min(e * a, e * b)))
    return min(terms)
