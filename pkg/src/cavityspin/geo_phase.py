"""Geometric phase gate: displacement algebra, the 7-step sequence, the
non-destructive <S^z_C> measurement, and decay-induced dephasing.

Displacements D(a) = exp(a ad - a* a) and rotations R(th) = exp(i th ad a)
obey D(b)D(a) = e^{i Im(b a*)/2} D(a+b) and R(th)D(a)R(-th) = D(a e^{i th}).
Chaining controlled rotations (the spin coupling V_Z for time tau_1 with
g tau_1 = pi/2) and four displacements realizes a per-sector geometric
phase chi_eff * sin(pi M - phi), phi = arg(alpha) - arg(beta).

With cavity decay at kappa the protocol used here is

    D(alpha), leg(+g), D(beta), leg(-g),
    D(-alpha e^{-kappa tau_1}), leg(+g), D(-beta e^{-kappa tau_1}),

where the last two displacement amplitudes are rescaled so the cavity
returns exactly to vacuum (the published text for this choice is garbled;
the rescaling is recovered from the vacuum-return constraint and verified
against the dense oracle).  Each coupling leg contributes a weight
exp(d(t)) from the coherent-pair kernel; their product is the dephasing
factor R_{M,M'}, for which the closed double-exponential form is
implemented and checked against the kernel composition to 1e-12.  The
effective rotation angle shrinks to

    chi_eff = |alpha|^2 (e^{-3 pi kappa/4|g|} + e^{-pi kappa/4|g|}) / 2

(|alpha| = |beta|), inverted for amplitude calibration.  Process fidelity
is the multiplicity-weighted sum of Re R and obeys

    F >= 1 - 4 pi chi (kappa/|g|) / (e^{-3 pi kappa/4|g|} + e^{-pi kappa/4|g|}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fidelity import CoefficientTable, process_fidelity
from .lindblad import (
    DecayParams,
    annihilation,
    coherent_weight,
    displacement,
    evolve_sector_field_op,
)

LEG_TIME = math.pi / 2  # g * tau_1


@dataclass(frozen=True)
class FieldOp:
    """One primitive of a gate sequence acting on the cavity field.

    kind "displacement": amplitude applies; kind "rotation": angle per
    photon; kind "interaction": coupling leg of the given duration with
    sign * g (sign -1 models the reversed-detuning leg).
    """

    kind: str
    amplitude: complex = 0.0
    angle: float = 0.0
    duration: float = 0.0
    sign: int = +1

    def __post_init__(self) -> None:
        if self.kind not in ("displacement", "rotation", "interaction"):
            raise ValueError(f"unknown field op kind {self.kind!r}")


@dataclass(frozen=True)
class GeoGateParams:
    """Protocol parameters; phi = arg(alpha) - arg(beta) selects the parity
    branch (phi in {0, pi} for m odd, +-pi/2 for m even)."""

    m: int
    alpha: complex
    beta: complex
    kappa_over_g: float

    @property
    def phi(self) -> float:
        return float(np.angle(self.alpha) - np.angle(self.beta))

    @property
    def tau1(self) -> float:
        return LEG_TIME


def compose_displacements(alpha: complex, beta: complex) -> tuple[float, complex]:
    """D(beta)D(alpha) = e^{i phase} D(amplitude)."""
    return float(np.imag(beta * np.conj(alpha))) / 2.0, alpha + beta


def effective_phase(
    alpha: complex,
    beta: complex,
    theta: float,
    c_eigenvalue: float,
    phi: float | None = None,
) -> float:
    """Accumulated phase |alpha beta| sin(theta c + phi) of the 8-op loop."""
    if phi is None:
        phi = float(np.angle(alpha) - np.angle(beta))
    return abs(alpha * beta) * math.sin(theta * c_eigenvalue + phi)


def controlled_displacement(beta: complex) -> list[tuple[str, complex | float, bool]]:
    """Sequence realizing |0><0| x 1 + |1><1| x D(beta) on ancilla + field.

    Entries are (kind, value, conditioned_on_ancilla); rotations are per
    photon number.  Verified on the dense ancilla x Fock space in tests.
    """
    return [
        ("rotation", -math.pi, True),
        ("displacement", -beta / 2.0, False),
        ("rotation", math.pi, True),
        ("displacement", beta / 2.0, False),
    ]


def angle_gate_displacements(theta: float, x_eigenvalue: int) -> list[complex]:
    """Four displacement amplitudes of e^{-i theta X} per X-eigenvalue branch.

    Composition D(-b) D(-a e^{i pi x/2}) D(b) D(a e^{i pi x/2}) with
    |a b| = |theta| yields the scalar e^{-i theta x}; listed in
    application order (first op first).  Valid at kappa = 0 only.
    """
    root = math.sqrt(abs(theta))
    a = root * np.exp(1j * math.pi * x_eigenvalue / 2.0)
    b = root if theta >= 0 else -root
    return [a, b, -a, -b]


def f_sign(m: int) -> int:
    """Measurement sign f(m): (-1)^(m/2) even m, (-1)^((m-1)/2) odd m."""
    if m % 2 == 0:
        return (-1) ** (m // 2)
    return (-1) ** ((m - 1) // 2)


def measure_sz_protocol(m: int, sz_expectation: float) -> tuple[float, float]:
    """Outcome probabilities P(s_x = +-1) = (1 +- f(m) <S^z_C>)/2."""
    if not -1.0 <= sz_expectation <= 1.0:
        raise ValueError("<S^z_C> must lie in [-1, 1]")
    val = f_sign(m) * sz_expectation
    return (1.0 + val) / 2.0, (1.0 - val) / 2.0


# ---------------------------------------------------------------------------
# dephasing under cavity decay
# ---------------------------------------------------------------------------


def gate_sequence(alpha: complex, beta: complex, kappa_over_g: float) -> list[FieldOp]:
    """The 7-step dissipative protocol with vacuum-return rescaling."""
    eps2 = math.exp(-kappa_over_g * LEG_TIME)  # e^{-kappa tau_1}, g = 1 units
    return [
        FieldOp("displacement", amplitude=alpha),
        FieldOp("interaction", duration=LEG_TIME, sign=+1),
        FieldOp("displacement", amplitude=beta),
        FieldOp("interaction", duration=LEG_TIME, sign=-1),
        FieldOp("displacement", amplitude=-alpha * eps2),
        FieldOp("interaction", duration=LEG_TIME, sign=+1),
        FieldOp("displacement", amplitude=-beta * eps2),
    ]


def sequence_coefficient(
    alpha: complex, beta: complex, two_m: int, two_mp: int, kappa_over_g: float
) -> complex:
    """Exact per-sector multiplier of the 7-step sequence on |M><M'|.

    Composes the coherent-pair kernel through the three coupling legs and
    the displacement phases; the final field state is the vacuum (asserted)
    and the returned value is dephasing x geometric phase.
    """
    weight = 1.0 + 0.0j
    a_ket = 0.0 + 0.0j
    a_bra = 0.0 + 0.0j
    for op in gate_sequence(alpha, beta, kappa_over_g):
        if op.kind == "displacement":
            d = op.amplitude
            weight *= np.exp(1j * np.imag(d * np.conj(a_ket)) / 2.0)
            weight *= np.exp(-1j * np.imag(d * np.conj(a_bra)) / 2.0)
            a_ket += d
            a_bra += d
        else:
            params = DecayParams(g=float(op.sign), kappa=kappa_over_g, t=op.duration)
            w, a_ket, a_bra = coherent_weight(a_ket, a_bra, params, two_m, two_mp)
            weight *= w
    assert abs(a_ket) < 1e-12 and abs(a_bra) < 1e-12, "cavity did not return to vacuum"
    return weight


def leg_dephasing(
    alpha: complex, beta: complex, two_m: int, two_mp: int, kappa_over_g: float
) -> complex:
    """Dephasing-only part of the sequence: the geometric phases divided out."""
    full = sequence_coefficient(alpha, beta, two_m, two_mp, kappa_over_g)
    pk = gate_phase(alpha, beta, two_m, kappa_over_g)
    pb = gate_phase(alpha, beta, two_mp, kappa_over_g)
    return full * np.exp(-1j * (pk - pb))


def gate_phase(
    alpha: complex, beta: complex, two_m: int, kappa_over_g: float
) -> float:
    """Geometric phase chi_eff sin(pi M - phi) acquired by sector M."""
    eps = math.exp(-kappa_over_g * LEG_TIME / 2.0)
    pref = (eps + eps**3) / 2.0
    return pref * float(np.imag(beta * np.conj(alpha) * np.exp(1j * math.pi * two_m / 2.0)))


def _shifted_m(two_m: int) -> int:
    """Integer index of Eq.-deph: M for m even, M - 1/2 for m odd."""
    if two_m % 2:
        return (two_m - 1) // 2
    return two_m // 2


def dephasing_factor(
    two_m: int,
    two_mp: int,
    alpha_mag: float,
    kappa_over_g: float,
    sign_choice: int = +1,
) -> complex:
    """Closed-form dephasing R_{M,M'} of the calibrated sequence
    (|alpha| = |beta|, g tau_1 = pi/2).

    The double-exponential form with the odd-m index shift M -> M - 1/2;
    sign_choice = -+1 tracks the protocol phase phi (+1 for phi = -pi/2 /
    0, -1 for phi = +pi/2 / pi).  Hermitian, |R| <= 1, R(kappa=0) = 1.
    """
    if (two_m - two_mp) % 2:
        raise ValueError("two_m and two_mp must have equal parity")
    if sign_choice not in (+1, -1):
        raise ValueError("sign_choice must be +-1")
    mt, mtp = _shifted_m(two_m), _shifted_m(two_mp)
    d = mt - mtp
    k = kappa_over_g / 2.0
    a2 = alpha_mag * alpha_mag
    if d == 0:
        return 1.0 + 0.0j
    e_pi = math.exp(-2.0 * math.pi * k)
    e_half = math.exp(math.pi * k)
    e_quart = math.exp(math.pi * k / 2.0)
    e_3q = math.exp(-1.5 * math.pi * k)
    s_m = (-1.0) ** mt
    s_mp = (-1.0) ** mtp
    den = d * d + k * k
    ex_re = (
        d
        * a2
        * e_pi
        * (1.0 + e_half)
        * (2.0 * (1.0 - e_half) * d + sign_choice * (s_m - s_mp) * e_quart * k)
        / den
    )
    ex_im = -sign_choice * (s_m - s_mp) * a2 * e_3q * (1.0 + e_half) * k * k / den
    return complex(math.exp(ex_re) * math.cos(ex_im), math.exp(ex_re) * math.sin(ex_im))


def chi_effective(alpha_mag: float, kappa_over_g: float) -> float:
    """Rotation angle |alpha|^2 (e^{-3 pi kappa/4|g|} + e^{-pi kappa/4|g|})/2."""
    q = math.pi * kappa_over_g / 4.0
    return alpha_mag**2 * (math.exp(-3.0 * q) + math.exp(-q)) / 2.0


def amplitude_for_chi(chi: float, kappa_over_g: float) -> float:
    """Inverse amplitude calibration: |alpha| giving chi_effective = chi."""
    if chi <= 0:
        raise ValueError("target angle must be positive")
    q = math.pi * kappa_over_g / 4.0
    return math.sqrt(2.0 * chi / (math.exp(-3.0 * q) + math.exp(-q)))


def series_re_r_geo(
    two_m: int,
    two_mp: int,
    alpha_mag: float,
    kappa_over_g: float,
    sign_choice: int = +1,
) -> float:
    """Second-order small-decay expansion of Re R_{M,M'} (geometric gate).

    Even M-M' branch as published; the odd branch carries the parity sign
    sigma = sign_choice * (-1)^M and its first-order coefficient is
    -(4|a|^2/d)(pi d - sigma) -- the published display drops the 1/pi on
    the correction term; the second-order factor matches the display for
    sigma = +1.  Diagonal pairs are invariant (returns 1).
    """
    mt, mtp = _shifted_m(two_m), _shifted_m(two_mp)
    d = mt - mtp
    k = kappa_over_g / 2.0
    a2 = alpha_mag * alpha_mag
    if d == 0:
        return 1.0
    if d % 2 == 0:
        return 1.0 - 4.0 * math.pi * a2 * k + 4.0 * math.pi**2 * a2 * (1.0 + 2.0 * a2) * k * k
    sigma = sign_choice * (-1.0) ** mt
    first = (4.0 * a2 / d) * (math.pi * d - sigma)
    second = (4.0 * a2 / d**2) * (math.pi * d - sigma) * (
        math.pi * d * (2.0 * a2 + 1.0) - 2.0 * sigma * a2
    )
    return 1.0 - first * k + second * k * k


def coefficient_table_geo(
    m: int, chi: float, kappa_over_g: float, sign_choice: int = +1
) -> CoefficientTable:
    """Dephasing table with |alpha| calibrated so chi_effective = chi."""
    amp = amplitude_for_chi(chi, kappa_over_g)
    table = CoefficientTable(m=m)
    for two_m in range(-m, m + 1, 2):
        for two_mp in range(-m, m + 1, 2):
            table.entries[(two_m, two_mp)] = dephasing_factor(
                two_m, two_mp, amp, kappa_over_g, sign_choice
            )
    return table


def process_fidelity_geo(
    m: int, chi: float, kappa_over_g: float, sign_choice: int = +1
) -> float:
    """Exact process fidelity of the calibrated geometric phase gate."""
    return process_fidelity(m, coefficient_table_geo(m, chi, kappa_over_g, sign_choice))


def lower_bound_geo(chi: float, kappa_over_g: float) -> float:
    """Fidelity floor 1 - 4 pi chi (kappa/|g|)/(e^{-3pi kappa/4|g|} + e^{-pi kappa/4|g|}).

    Implied weaker form: 1 - (4 pi chi kappa/2|g|)(1 + pi kappa/2|g|).
    """
    q = math.pi * kappa_over_g / 4.0
    return 1.0 - 4.0 * math.pi * chi * kappa_over_g / (
        math.exp(-3.0 * q) + math.exp(-q)
    )


# ---------------------------------------------------------------------------
# dense-oracle executors
# ---------------------------------------------------------------------------


def sequence_field_operator(
    alpha: complex,
    beta: complex,
    two_m: int,
    two_mp: int,
    kappa_over_g: float,
    n_max: int,
    step_scale: float = 1.0,
) -> np.ndarray:
    """Brute-force per-sector evolution of the 7-step sequence.

    Starts from the vacuum projector, applies exact truncated displacement
    matrices and RK4 master-equation legs, returns the final field operator
    (ideally coefficient x |0><0|).
    """
    op = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    op[0, 0] = 1.0
    for step in gate_sequence(alpha, beta, kappa_over_g):
        if step.kind == "displacement":
            dmat = displacement(step.amplitude, n_max)
            op = dmat @ op @ dmat.conj().T
        else:
            params = DecayParams(
                g=float(step.sign), kappa=kappa_over_g, t=step.duration
            )
            op = evolve_sector_field_op(
                op, two_m, two_mp, params, n_max, step_scale=step_scale
            )
    return op


def kappa0_sequence_unitary(
    alpha: complex, beta: complex, jz_two_m: np.ndarray, n_max: int
) -> np.ndarray:
    """Exact unitary of the decay-free sequence on (spin x field).

    Interaction legs are diagonal phases; displacements act on the field
    factor only.  jz_two_m lists doubled J^z eigenvalues of the spin basis.
    """
    sdim = len(jz_two_m)
    fdim = n_max + 1
    dim = sdim * fdim
    u = np.eye(dim, dtype=complex)
    ns = np.arange(fdim)
    for step in gate_sequence(alpha, beta, 0.0):
        if step.kind == "displacement":
            mat = np.kron(np.eye(sdim), displacement(step.amplitude, n_max))
        else:
            phases = np.exp(
                -1j * step.sign * step.duration * np.kron(jz_two_m, ns)
            )
            mat = np.diag(phases)
        u = mat @ u
    return u
