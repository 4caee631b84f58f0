"""Generalized Collatz matrices and their residue-class ("chromatic") colouring.

A matrix has one row per start 2n+2 .. 2n+M and k columns holding the
first k terms of each F_n orbit. In symbolic form every cell is ``2n + c``
and only the integer offset ``c`` is stored; the offsets follow the
Collatz shadow ``c -> T(c - 1) + 1``. Substituting an integer n gives the
concrete F_n matrix, and n = -1/2 collapses it onto the classical Collatz
matrix with starts 1 .. M-1.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .conjugacy import Identity, VerificationReport
from .dynamics import f_orbit, t_orbit

HALF = Fraction(-1, 2)

COLORS = ("green", "blue", "yellow", "red")


@dataclass(frozen=True, order=True)
class AffineEntry:
    """The symbolic value ``2n + offset``."""

    offset: int

    def at(self, n: Union[int, Fraction]) -> int:
        value = 2 * Fraction(n) + self.offset
        if value.denominator != 1:
            raise ValueError(f"2n+{self.offset} is not an integer at n={n}")
        return int(value)

    def __str__(self) -> str:
        c = self.offset
        if c == 0:
            return "2n"
        return f"2n+{c}" if c > 0 else f"2n-{-c}"

    @classmethod
    def parse(cls, text: str) -> "AffineEntry":
        text = text.strip().replace(" ", "")
        if not text.startswith("2n"):
            raise ValueError(f"not an affine entry: {text!r}")
        rest = text[2:]
        return cls(int(rest) if rest else 0)


@dataclass(frozen=True)
class ChromaClass:
    residue: int

    @property
    def color(self) -> str:
        return COLORS[self.residue]


def chroma(cell: Union[int, AffineEntry]) -> ChromaClass:
    """Residue class of a cell: V mod 4 for a Collatz value, (c - 1) mod 4 for 2n+c."""
    if isinstance(cell, AffineEntry):
        return ChromaClass((cell.offset - 1) % 4)
    return ChromaClass(cell % 4)


def chroma_concrete(value: int, n: int) -> ChromaClass:
    """Class of a concrete F_n cell, read through its offset value - 2n."""
    return chroma(AffineEntry(value - 2 * n))


class Mode(str, enum.Enum):
    SYMBOLIC = "symbolic"
    CONCRETE = "concrete"
    COLLATZ_HALF = "collatz-half"


@dataclass(frozen=True)
class MatrixRow:
    start: Union[int, AffineEntry]
    cells: tuple


@dataclass(frozen=True)
class GenMatrix:
    mode: Mode
    M: int
    k: int
    rows: tuple[MatrixRow, ...]
    n: Union[int, Fraction, None] = None
    descending: bool = True

    @property
    def first_column(self) -> list:
        return [row.start for row in self.rows]

    def grid(self) -> list[list]:
        return [list(row.cells) for row in self.rows]

    def row_for(self, start) -> MatrixRow:
        for row in self.rows:
            if row.start == start:
                return row
        raise KeyError(start)

    def ascending(self) -> "GenMatrix":
        return reorder(self, descending=False)


def _check_dims(M: int, k: int) -> None:
    if M < 3:
        raise ValueError("M must be >= 3 (rows 2n+2 and 2n+3 at least)")
    if k < 1:
        raise ValueError("k must be >= 1")


def shadow_orbit(offset: int, k: int) -> list[int]:
    """Offsets of the first k cells of the symbolic row starting at 2n + offset."""
    return [x + 1 for x in t_orbit(offset - 1, k - 1)]


def _order(offsets, descending):
    return sorted(offsets, reverse=descending)


def build_matrix(
    mode: Mode, M: int, k: int, n: Union[int, None] = None, descending: bool = True
) -> GenMatrix:
    """Build the M-1 rows by k columns matrix in the requested mode.

    SYMBOLIC: cells are :class:`AffineEntry`; CONCRETE: F_n orbits of
    2n+2 .. 2n+M (``n`` required); COLLATZ_HALF: T orbits of 1 .. M-1.
    """
    _check_dims(M, k)
    offsets = _order(range(2, M + 1), descending)
    if mode is Mode.SYMBOLIC:
        rows = tuple(
            MatrixRow(AffineEntry(c), tuple(AffineEntry(x) for x in shadow_orbit(c, k))) for c in offsets
        )
        return GenMatrix(mode, M, k, rows, None, descending)
    if mode is Mode.CONCRETE:
        if n is None:
            raise ValueError("concrete matrices need n")
        rows = []
        for c in offsets:
            orbit = f_orbit(n, 2 * n + c, k - 1)
            rows.append(MatrixRow(orbit[0], tuple(orbit)))
        return GenMatrix(mode, M, k, tuple(rows), n, descending)
    if mode is Mode.COLLATZ_HALF:
        rows = []
        for c in offsets:
            orbit = t_orbit(c - 1, k - 1)
            rows.append(MatrixRow(orbit[0], tuple(orbit)))
        return GenMatrix(mode, M, k, tuple(rows), HALF, descending)
    raise ValueError(f"unknown mode {mode!r}")


def parse_substitution(text: str) -> Union[int, Fraction]:
    """Integer n, or the literal ``-1/2``; no other rational is accepted."""
    text = text.strip()
    if text == "-1/2":
        return HALF
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"substitution must be an integer or -1/2, got {text!r}") from None


def substitute(m: GenMatrix, value: Union[int, Fraction]) -> GenMatrix:
    """Evaluate every ``2n + c`` cell at n = ``value`` (an integer or -1/2)."""
    if m.mode is not Mode.SYMBOLIC:
        raise ValueError("only symbolic matrices can be substituted")
    value = Fraction(value)
    if value == HALF:
        mode, n = Mode.COLLATZ_HALF, HALF
    elif value.denominator == 1:
        mode, n = Mode.CONCRETE, int(value)
    else:
        raise ValueError("n must be an integer or -1/2")
    rows = tuple(
        MatrixRow(row.start.at(value), tuple(cell.at(value) for cell in row.cells)) for row in m.rows
    )
    return GenMatrix(mode, m.M, m.k, rows, n, m.descending)


def reorder(m: GenMatrix, descending: bool) -> GenMatrix:
    if m.descending == descending:
        return m
    return GenMatrix(m.mode, m.M, m.k, tuple(reversed(m.rows)), m.n, descending)


def cell_chroma(m: GenMatrix, cell) -> ChromaClass:
    if m.mode is Mode.CONCRETE:
        return chroma_concrete(cell, m.n)
    return chroma(cell)


def verify_chromatic_equivalence(M: int, k: int, n_samples=(-3, -2, -1, 0, 1, 2, 3)) -> VerificationReport:
    """Cell-by-cell class agreement between the symbolic matrix, its n = -1/2
    substitution, an independently built Collatz matrix, and concrete F_n
    matrices for the sampled n.

    Failure tuples are ``(source, row, column, expected class, found class)``.
    """
    _check_dims(M, k)
    n_samples = list(n_samples)
    report = VerificationReport(Identity.CHROMA, {"M": str(M), "k": str(k), "n_samples": n_samples})
    symbolic = build_matrix(Mode.SYMBOLIC, M, k)
    collatz = build_matrix(Mode.COLLATZ_HALF, M, k)
    collapsed = substitute(symbolic, HALF)
    concretes = {n: build_matrix(Mode.CONCRETE, M, k, n) for n in n_samples}
    for r, row in enumerate(symbolic.rows):
        for j, cell in enumerate(row.cells):
            want = chroma(cell).residue
            direct = collatz.rows[r].cells[j]
            if collapsed.rows[r].cells[j] != direct:
                report.fail("collatz-value", r, j, direct, collapsed.rows[r].cells[j])
            got = chroma(direct).residue
            if got != want:
                report.fail("collatz", r, j, want, got)
            for n, conc in concretes.items():
                got = chroma_concrete(conc.rows[r].cells[j], n).residue
                if got != want:
                    report.fail(f"n={n}", r, j, want, got)
            report.checked += 1
    return report
