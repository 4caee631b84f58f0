"""The Collatz map T, the translated family F_n, orbits and cycle detection.

All arithmetic is on Python ints, so orbits never overflow. Both maps are
total on their integer domains; whether a start lies in D(n) only matters
for the anchor (reach) semantics of :func:`run_until`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

DEFAULT_MAX_STEPS = 10_000


class DomainError(ValueError):
    """Raised when a map is applied outside the integers it accepts."""


@dataclass(frozen=True)
class MapParam:
    """Index n of F_n together with its three characteristic points."""

    n: int

    @property
    def shift(self) -> int:
        """Conjugation shift A_n = 2n + 1 (always odd)."""
        return 2 * self.n + 1

    @property
    def anchor(self) -> int:
        """Lower point of the stable pair, 2n + 2."""
        return 2 * self.n + 2

    @property
    def partner(self) -> int:
        """Upper point of the stable pair, 2n + 3."""
        return 2 * self.n + 3


class Domain(enum.Enum):
    D = "D"  # P >= 2n+2
    D_MINUS = "D-"  # P < 2n+2


def classify(n: int, p: int) -> Domain:
    return Domain.D if p >= 2 * n + 2 else Domain.D_MINUS


def t_step(x: int) -> int:
    """Shortcut Collatz map: x/2 for even x, (3x+1)/2 for odd x.

    Zero is rejected; it is a degenerate fixed point of the even branch.
    """
    if x == 0:
        raise DomainError("T is not applied to 0")
    if x & 1:
        return (3 * x + 1) >> 1
    return x >> 1


def f_step(n: int, p: int) -> int:
    """F_n(p): (3p - 2n)/2 for even p, (p + 2n + 1)/2 for odd p."""
    if p & 1:
        return (p + 2 * n + 1) >> 1
    return (3 * p - 2 * n) >> 1


@dataclass(frozen=True)
class CollatzT:
    """The Collatz map T; anchor 1."""

    name = "T"

    def step(self, x: int) -> int:
        return t_step(x)

    @property
    def anchor(self) -> int:
        return 1

    def in_domain(self, x: int) -> bool:
        return x >= 1

    def orbit(self, start: int, k: int) -> list[int]:
        return t_orbit(start, k)


@dataclass(frozen=True)
class FamilyF:
    """The map F_n for a fixed index n; anchor 2n + 2."""

    param: MapParam
    name = "F"

    @classmethod
    def of(cls, n: int) -> "FamilyF":
        return cls(MapParam(n))

    @property
    def n(self) -> int:
        return self.param.n

    def step(self, p: int) -> int:
        return f_step(self.param.n, p)

    @property
    def anchor(self) -> int:
        return self.param.anchor

    def in_domain(self, p: int) -> bool:
        return p >= self.param.anchor

    def orbit(self, start: int, k: int) -> list[int]:
        return f_orbit(self.param.n, start, k)


MapKind = Union[CollatzT, FamilyF]


def t_orbit(x: int, k: int) -> list[int]:
    """[x, T(x), ..., T^k(x)]; hot path of the sweeps, so the step is inlined."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if x == 0:
        raise DomainError("T is not applied to 0")
    # T(x) == 0 only for x == 0, so checking the start is enough.
    out = [x]
    append = out.append
    for _ in range(k):
        x = (3 * x + 1) >> 1 if x & 1 else x >> 1
        append(x)
    return out


def f_orbit(n: int, p: int, k: int) -> list[int]:
    """[p, F_n(p), ..., F_n^k(p)]."""
    if k < 0:
        raise ValueError("k must be >= 0")
    odd_add = 2 * n + 1
    even_sub = 2 * n
    out = [p]
    append = out.append
    for _ in range(k):
        p = (p + odd_add) >> 1 if p & 1 else (3 * p - even_sub) >> 1
        append(p)
    return out


class StopReason(enum.Enum):
    REACHED_ANCHOR = "reached_anchor"
    CYCLE_DETECTED = "cycle_detected"
    BUDGET_EXHAUSTED = "budget_exhausted"
    FIXED_LENGTH = "fixed_length"  # plain iterate(), no stopping rule


@dataclass(frozen=True)
class Trajectory:
    kind: MapKind
    start: int
    terms: tuple[int, ...]
    stop: StopReason
    # Orbit order, beginning at the first element of the cycle that was reached.
    cycle: tuple[int, ...] | None = field(default=None)

    @property
    def steps(self) -> int:
        return len(self.terms) - 1


def canonical_cycle(cycle: tuple[int, ...] | list[int]) -> tuple[int, ...]:
    """Rotation of ``cycle`` that starts at its smallest element."""
    if not cycle:
        return ()
    i = min(range(len(cycle)), key=cycle.__getitem__)
    return tuple(cycle[i:]) + tuple(cycle[:i])


def same_cycle(a, b) -> bool:
    return canonical_cycle(tuple(a)) == canonical_cycle(tuple(b))


def iterate(kind: MapKind, start: int, k: int) -> Trajectory:
    """Exactly k steps of ``kind`` from ``start``; no early stop."""
    return Trajectory(kind, start, tuple(kind.orbit(start, k)), StopReason.FIXED_LENGTH)


def run_until(kind: MapKind, start: int, max_steps: int = DEFAULT_MAX_STEPS) -> Trajectory:
    """Iterate until the anchor is hit, a cycle closes, or the budget runs out.

    The anchor only counts for starts inside the map's domain (N >= 1 for T,
    P >= 2n+2 for F_n). Every visited term is remembered, so any cycle is
    reported exactly, including fixed points below the domain.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    watch_anchor = kind.in_domain(start)
    anchor = kind.anchor
    step = kind.step
    terms = [start]
    seen = {start: 0}
    x = start
    if watch_anchor and x == anchor:
        return Trajectory(kind, start, (x,), StopReason.REACHED_ANCHOR)
    for i in range(1, max_steps + 1):
        x = step(x)
        terms.append(x)
        if watch_anchor and x == anchor:
            return Trajectory(kind, start, tuple(terms), StopReason.REACHED_ANCHOR)
        first = seen.get(x)
        if first is not None:
            return Trajectory(
                kind, start, tuple(terms), StopReason.CYCLE_DETECTED, tuple(terms[first:i])
            )
        seen[x] = i
    return Trajectory(kind, start, tuple(terms), StopReason.BUDGET_EXHAUSTED)


def stopping_time(kind: MapKind, start: int, max_steps: int = DEFAULT_MAX_STEPS) -> int | None:
    """Steps needed to reach the anchor, or None if not reached within budget.

    Cheaper than :func:`run_until` for sweeps inside the domain: no orbit is
    stored and no cycle bookkeeping is done.
    """
    anchor = kind.anchor
    x = start
    if isinstance(kind, FamilyF):
        odd_add = 2 * kind.n + 1
        even_sub = 2 * kind.n
        for i in range(max_steps + 1):
            if x == anchor:
                return i
            x = (x + odd_add) >> 1 if x & 1 else (3 * x - even_sub) >> 1
        return None
    for i in range(max_steps + 1):
        if x == anchor:
            return i
        x = t_step(x)
    return None
