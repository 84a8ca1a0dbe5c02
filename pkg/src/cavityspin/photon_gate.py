"""Single-photon teleported many-body gate under cavity decay.

Protocol: prepare the probe (|0> + |1>)/sqrt(2), couple for g*tau = pi/2,
measure the probe in a rotated basis with theta_+ = chi, and apply the
product correction S^z_C on the -1 outcome.  On each operator basis
element |M><M'| the ideal gate multiplies by the unimodular

    V_{M,M'} = (cos chi + sin chi e^{-i pi M})(cos chi + sin chi e^{+i pi M'})

(m odd; for m even the probe is measured in the x-rotated basis and the
per-sector phase is cos chi - i sin chi (-1)^M), while the noisy protocol
multiplies by Q_{M,M'} assembled from the decayed Fock block.  Q -> V as
kappa -> 0.  The process fidelity is the multiplicity-weighted sum of
Re[R], R = Q V*, and obeys the closed lower bound

    F_pro >= 1 - (pi/2) * kappa / (2 |g|).

All projections enter as doubled integers (two_m) and the coupling enters
only through the dimensionless ratio kappa/|g| (g > 0 convention).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fidelity import CoefficientTable, process_fidelity
from .lindblad import DecayParams, FockBlock, evolve_fock_block
from .sectors import projection_phase, projections, enumerate_sectors

GATE_TIME = math.pi / 2  # g * tau for the protocol, in units of 1/g

SERIES_DOMAIN = 0.3  # validity cap on kappa/|g| for the small-decay series


@dataclass(frozen=True)
class GateTarget:
    """Target gate U = exp(-i chi S^z_C) on m spins, measurement angle chi."""

    m: int
    chi: float
    theta_plus: float | None = None

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not (-math.pi < self.chi <= math.pi):
            raise ValueError("chi must lie in (-pi, pi]")
        if self.theta_plus is None:
            object.__setattr__(self, "theta_plus", self.chi)


def _check_pair(two_m: int, two_mp: int) -> None:
    if (two_m - two_mp) % 2 != 0:
        raise ValueError("two_m and two_mp must have equal parity (same m)")


def target_phase(two_m: int, chi: float) -> complex:
    """Per-sector eigenphase of the effective target unitary.

    Odd m (half-integer M): cos chi + sin chi e^{-i pi M}; even m:
    cos chi - i sin chi (-1)^M.  Unimodular in both cases.
    """
    c, s = math.cos(chi), math.sin(chi)
    if two_m % 2:
        return c + s * projection_phase(two_m)
    return c - 1j * s * projection_phase(two_m)


def v_coeff(two_m: int, two_mp: int, chi: float) -> complex:
    """Ideal-gate multiplier V_{M,M'} on |M><M'|."""
    _check_pair(two_m, two_mp)
    return target_phase(two_m, chi) * np.conj(target_phase(two_mp, chi))


def _evolved_probe_block(two_m: int, two_mp: int, kappa_over_g: float) -> FockBlock:
    """Probe outer product evolved for g*tau = pi/2 at decay kappa/|g|."""
    params = DecayParams(g=1.0, kappa=kappa_over_g, t=GATE_TIME)
    init = FockBlock(two_m, two_mp, np.full((2, 2), 0.5, dtype=complex))
    return evolve_fock_block(init, params)


def measurement_coefficient(
    entries: np.ndarray, theta: float, m_odd: bool
) -> complex:
    """<probe_theta| block |probe_theta> for the parity-appropriate basis.

    Odd m measures |y_theta> = cos theta |0> + sin theta |1>; even m
    measures |x_theta> = cos theta |0> + i sin theta |1>.
    """
    c, s = math.cos(theta), math.sin(theta)
    if m_odd:
        return (
            c * c * entries[0, 0]
            + c * s * (entries[0, 1] + entries[1, 0])
            + s * s * entries[1, 1]
        )
    return (
        c * c * entries[0, 0]
        + 1j * c * s * (entries[0, 1] - entries[1, 0])
        + s * s * entries[1, 1]
    )


def q_coeff(two_m: int, two_mp: int, chi: float, kappa_over_g: float) -> complex:
    """Noisy-protocol multiplier Q_{M,M'}; equals V exactly at kappa = 0.

    Sum of the theta_+ measurement branch and the S^z_C-corrected theta_-
    branch; the correction contributes the factor (-1)^(M-M').
    """
    _check_pair(two_m, two_mp)
    block = _evolved_probe_block(two_m, two_mp, kappa_over_g)
    m_odd = bool(two_m % 2)
    corr = float((-1) ** ((two_m - two_mp) // 2))
    plus = measurement_coefficient(block.entries, chi, m_odd)
    minus = measurement_coefficient(block.entries, chi + math.pi / 2, m_odd)
    return plus + corr * minus


def noise_map_probabilities(
    theta_plus: float, kappa: float, tau: float
) -> tuple[float, float]:
    """Measurement outcome probabilities (p_+, p_-).

    p_+ - p_- = (1 - e^{-kappa tau}) cos(2 theta_+); equal at kappa = 0.
    """
    if not 0.0 <= theta_plus <= math.pi / 2:
        raise ValueError("theta_plus must lie in [0, pi/2]")
    diff = (1.0 - math.exp(-kappa * tau)) * math.cos(2.0 * theta_plus)
    return (1.0 + diff) / 2.0, (1.0 - diff) / 2.0


def coefficient_table(m: int, chi: float, kappa_over_g: float) -> CoefficientTable:
    """R = Q V* over all projection pairs of m spins."""
    table = CoefficientTable(m=m)
    for two_m in range(-m, m + 1, 2):
        for two_mp in range(-m, m + 1, 2):
            q = q_coeff(two_m, two_mp, chi, kappa_over_g)
            v = v_coeff(two_m, two_mp, chi)
            table.entries[(two_m, two_mp)] = q * np.conj(v)
    return table


def process_fidelity_single_photon(
    m: int, chi: float, kappa_over_g: float
) -> float:
    """Exact process fidelity of the single-photon protocol."""
    return process_fidelity(m, coefficient_table(m, chi, kappa_over_g))


def lower_bound_single_photon(kappa_over_g: float) -> float:
    """Closed-form fidelity floor 1 - (pi/2)(kappa/2|g|)."""
    if kappa_over_g < 0:
        raise ValueError("kappa/|g| must be >= 0")
    return 1.0 - (math.pi / 2.0) * (kappa_over_g / 2.0)


def series_re_r(
    two_m: int, two_mp: int, chi: float, kappa_over_g: float
) -> float:
    """Second-order small-decay expansion of Re[R_{M,M'}].

    Branches on the parity of M - M'.  Diagonal pairs return exactly 1
    (R_{M,M} = 1 for all kappa; the expansion covers off-diagonal pairs).
    The odd-branch k^2 cross term carries a factor pi that the published
    display omits; the coefficient here matches the exact formula to
    O(k^3), as the tests verify symbolically and numerically.
    """
    _check_pair(two_m, two_mp)
    if kappa_over_g < 0 or kappa_over_g > SERIES_DOMAIN:
        raise ValueError(f"series valid for kappa/|g| in [0, {SERIES_DOMAIN}]")
    k = kappa_over_g / 2.0
    delta = (two_m - two_mp) // 2
    if delta == 0:
        return 1.0
    if delta % 2 == 0:
        return 1.0 - (math.pi / 2.0) * k + (math.pi**2 / 4.0) * k * k
    if two_m % 2:
        sgn = float((-1) ** ((two_m + 1) // 2))  # (-1)^(M + 1/2)
    else:
        sgn = float((-1) ** (two_m // 2 + 1))  # -(-1)^M, even-m x-basis
    s4, c4 = math.sin(4.0 * chi), math.cos(4.0 * chi)
    first = math.pi / 2.0 + sgn * s4 / (2.0 * delta)
    second = (
        math.pi * sgn * s4 / (4.0 * delta)
        + (c4 + 1.0) / (2.0 * delta * delta)
        + math.pi**2 * (3.0 + c4) / 16.0
    )
    return 1.0 - first * k + second * k * k


def sector_pairs(m: int):
    """Iterate (two_j, c_J, two_jp, c_J', two_m, two_mp) over the full sum."""
    rows = enumerate_sectors(m)
    for row in rows:
        for rowp in rows:
            for two_m in projections(row.two_j):
                for two_mp in projections(rowp.two_j):
                    yield row.two_j, row.count, rowp.two_j, rowp.count, two_m, two_mp
