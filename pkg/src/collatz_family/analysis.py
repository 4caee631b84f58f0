"""Parity vectors, odd/even counts and the exact closed forms of k-th iterates.

For T the indicator marks odd terms; for F_n it marks even terms. Either
way the k-th iterate equals ``3**count / 2**k * start + adjustment`` with
``count`` the number of marked terms among the first k.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dynamics import CollatzT, MapKind


@dataclass(frozen=True)
class ParityVector:
    kind: MapKind
    start: int
    bits: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def count(self) -> int:
        return sum(self.bits)


def parity_bits(kind: MapKind, terms) -> tuple[int, ...]:
    if isinstance(kind, CollatzT):
        return tuple(t & 1 for t in terms)
    return tuple(1 - (t & 1) for t in terms)


def parity_vector(kind: MapKind, start: int, k: int) -> ParityVector:
    """Indicators for terms 0..k-1 of the orbit of ``start``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return ParityVector(kind, start, ())
    terms = kind.orbit(start, k - 1)
    return ParityVector(kind, start, parity_bits(kind, terms))


def count_indicators(pv: ParityVector) -> int:
    return sum(pv.bits)


@dataclass(frozen=True)
class ClosedForm:
    """``lead * start + adjustment`` reproduces the k-th iterate exactly."""

    lead: Fraction
    adjustment: Fraction
    count: int
    k: int

    def evaluate(self, start: int) -> Fraction:
        return self.lead * start + self.adjustment


def closed_form(kind: MapKind, start: int, k: int) -> ClosedForm:
    # The adjustment is defined extensionally: iterate, then subtract the
    # leading term. No recurrence for it is assumed.
    if k < 0:
        raise ValueError("k must be >= 0")
    terms = kind.orbit(start, k)
    count = sum(parity_bits(kind, terms[:k]))
    lead = Fraction(3**count, 2**k)
    return ClosedForm(lead, terms[k] - lead * start, count, k)


def format_fraction(q: Fraction) -> str:
    """Always ``p/q``, including integers (``0/1``, ``5/1``)."""
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def closed_forms(kind: MapKind, start: int, k_max: int) -> list[ClosedForm]:
    """Closed forms for every k in 0..k_max from a single orbit."""
    terms = kind.orbit(start, k_max)
    bits = parity_bits(kind, terms[:k_max])
    out = []
    count = 0
    for k in range(k_max + 1):
        lead = Fraction(3**count, 2**k)
        out.append(ClosedForm(lead, terms[k] - lead * start, count, k))
        if k < k_max:
            count += bits[k]
    return out
