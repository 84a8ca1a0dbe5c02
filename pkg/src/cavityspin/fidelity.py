"""Process fidelity assembly from per-sector coefficient tables.

For a noisy map that multiplies every operator basis element
|Lambda,J,M><Lambda',J',M'| by a complex number R_{M,M'} (= Q V* for the
gate protocols), the Jamiolkowski-Choi overlap with the target unitary
collapses to a multiplicity-weighted double sum

    F_pro = 2^{-2m} sum_{J,J'} c^m_J c^m_{J'}
            sum_{M_J} sum_{M'_J} Re R_{M_J,M'_J},

and converts to the average fidelity over pure states via
F_ave = (F_pro D + 1)/(D + 1) with D = 2^m.

Sums are accumulated with math.fsum (exactly rounded compensated
summation); at m = 25 the 2^{50} normalization otherwise stresses
cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import fsum

from . import sectors


@dataclass
class CoefficientTable:
    """Map (two_m, two_mp) -> R value over all projection pairs of m spins.

    Valid tables are Hermitian: R[(b, a)] = conj(R[(a, b)]), with real
    diagonal entries.
    """

    m: int
    entries: dict[tuple[int, int], complex] = field(default_factory=dict)

    def all_pairs(self) -> list[tuple[int, int]]:
        vals = list(range(-self.m, self.m + 1, 2))
        return [(a, b) for a in vals for b in vals]

    def is_complete(self) -> bool:
        return all(pair in self.entries for pair in self.all_pairs())

    def check_hermitian(self, tol: float = 1e-12) -> None:
        for (a, b), v in self.entries.items():
            w = self.entries.get((b, a))
            if w is None or abs(v - w.conjugate()) > tol:
                raise ValueError(f"table not Hermitian at pair ({a},{b})")


def process_fidelity(m: int, table: CoefficientTable) -> float:
    """Multiplicity-weighted Choi overlap; raw (unclamped) value."""
    if table.m != m:
        raise ValueError(f"table built for m={table.m}, requested m={m}")
    if not table.is_complete():
        raise ValueError("coefficient table incomplete over sector pairs")
    rows = sectors.enumerate_sectors(m)
    terms = []
    for row_j in rows:
        for row_jp in rows:
            w = row_j.count * row_jp.count
            for two_m in sectors.projections(row_j.two_j):
                for two_mp in sectors.projections(row_jp.two_j):
                    terms.append(w * table.entries[(two_m, two_mp)].real)
    return fsum(terms) / 4.0**m


def clamp_unit(x: float) -> float:
    """Clamp to [0, 1] for reporting; callers keep the raw value."""
    return min(1.0, max(0.0, x))


def average_fidelity(f_pro: float, dim: int) -> float:
    """F_ave = (F_pro * D + 1) / (D + 1) for a D-dimensional target unitary."""
    if dim < 2:
        raise ValueError(f"Hilbert dimension must be >= 2, got {dim}")
    return (f_pro * dim + 1.0) / (dim + 1.0)
