"""Angular momentum sector bookkeeping for m spin-1/2 particles.

The collective Hilbert space of m spins decomposes into irreps labelled
(Lambda, J, M_J) where J runs over m/2, m/2-1, ..., (m mod 2)/2 and the
number of equivalent copies (the Lambda degeneracy) is the multiplicity

    c^m_J = (2J+1) / (m/2 + J + 1) * binom(m, m/2 - J),

computable by Young tableau counting.  All fidelity sums in this package
depend on the sector structure only through these integer weights, so
Lambda labels are never enumerated.

Half-integer spins are represented throughout as *twice* their value
(``two_j``, ``two_m``) so that all sector arithmetic is exact integer
arithmetic and no float comparison ever occurs.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb


@dataclass(frozen=True)
class SectorLabel:
    """One (J, M_J) sector of an m-spin system, stored as doubled integers."""

    m: int
    two_j: int
    two_m: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"spin count must be >= 1, got {self.m}")
        _check_two_j(self.m, self.two_j)
        if (self.two_m - self.two_j) % 2 != 0 or abs(self.two_m) > self.two_j:
            raise ValueError(
                f"projection two_m={self.two_m} invalid for two_j={self.two_j}"
            )

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def m_j(self) -> float:
        return self.two_m / 2


@dataclass(frozen=True)
class MultiplicityRow:
    """Multiplicity c^m_J of the spin-J irrep, J stored as two_j."""

    two_j: int
    count: int


def _check_two_j(m: int, two_j: int) -> None:
    if two_j < 0 or two_j > m:
        raise ValueError(f"two_j={two_j} outside [0, m={m}]")
    if (m - two_j) % 2 != 0:
        raise ValueError(f"two_j={two_j} has wrong parity for m={m}")


def multiplicity(m: int, two_j: int) -> int:
    """Number of spin-J irreps in the decomposition of m spin-1/2 particles.

    Exact integer evaluation of (2J+1)/(m/2+J+1) * binom(m, m/2-J); the
    division is exact (ballot-number identity), which is asserted.
    """
    if m < 1:
        raise ValueError(f"spin count must be >= 1, got {m}")
    _check_two_j(m, two_j)
    k = (m - two_j) // 2
    num = (two_j + 1) * comb(m, k)
    den = (m + two_j) // 2 + 1
    q, r = divmod(num, den)
    assert r == 0, f"multiplicity not integral for m={m}, two_j={two_j}"
    return q


def enumerate_sectors(m: int) -> list[MultiplicityRow]:
    """All (J, c^m_J) rows for m spins, ordered by descending J."""
    if m < 1:
        raise ValueError(f"spin count must be >= 1, got {m}")
    return [
        MultiplicityRow(two_j=two_j, count=multiplicity(m, two_j))
        for two_j in range(m, -1, -2)
        if two_j >= 0
    ]


def projections(two_j: int) -> range:
    """All two_m values of a spin-J multiplet, ascending."""
    return range(-two_j, two_j + 1, 2)


def projection_phase(two_m: int) -> complex:
    """exp(-i pi M_J) evaluated exactly as a power of -i.

    For two_m even this is +/-1, for two_m odd it is -/+i; no floating
    point trigonometry is involved.
    """
    return (-1j) ** (two_m % 4)


def dimension(m: int) -> int:
    """Total dimension sum_J c^m_J (2J+1); equals 2**m by completeness."""
    return sum(row.count * (row.two_j + 1) for row in enumerate_sectors(m))
