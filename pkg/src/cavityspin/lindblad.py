"""Dissipative evolution of spin-cavity operator basis elements.

During a coupling stage the joint state obeys

    drho/dt = -i[V_Z, rho] + (kappa/2)(2 a rho a+ - a+a rho - rho a+a),

with V_Z = g a+a sum_j sigma^z_j = 2 g a+a J^z.  The evolution conserves
the (Lambda, J) quantum numbers, so it acts block-wise on operator basis
elements |M_J><M'_J| (x) field-part.  This module provides the exact
closed-form kernels for the two field cases used by the gate protocols:

- Fock blocks spanned by {|0>, |1>} (exact truncation: V_Z conserves
  photon number and the jump operator only lowers it);
- coherent-state pairs |alpha><beta| with a scalar weight exp(d(t)).

The common ingredient is

    b_{M,M'}(t) = kappa (1 - exp(-[kappa + 2ig(M-M')]t)) / (kappa + 2ig(M-M')).

Two independent brute-force oracles validate every closed form: a dense
fixed-step RK4 master-equation integrator and a Monte Carlo wavefunction
(trajectory) engine with jump operator sqrt(kappa) a.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class CapabilityError(Exception):
    """Requested oracle dimension exceeds what the dense integrator supports."""


@dataclass(frozen=True)
class DecayParams:
    """Dispersive coupling g (sign-carrying), cavity decay kappa, duration t."""

    g: float
    kappa: float
    t: float

    def __post_init__(self) -> None:
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.t < 0:
            raise ValueError(f"duration must be >= 0, got {self.t}")


@dataclass
class FockBlock:
    """Operator-basis element on one sector pair with a 2x2 field part.

    ``entries[i, j]`` is the coefficient of |i><j| for field states
    i, j in {0, 1}.
    """

    two_m: int
    two_mp: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.shape != (2, 2):
            raise ValueError("Fock block must be 2x2")


@dataclass
class CoherentPair:
    """|alpha><beta| on one sector pair, carrying a scalar weight."""

    two_m: int
    two_mp: int
    alpha: complex
    beta: complex
    weight: complex = 1.0 + 0.0j


def b_coeff(params: DecayParams, two_m: int, two_mp: int) -> complex:
    """Decay kernel b_{M,M'}(t); analytic limits at kappa=0 and M=M'."""
    kappa, g, t = params.kappa, params.g, params.t
    if kappa == 0.0:
        return 0.0 + 0.0j
    if two_m == two_mp:
        return complex(1.0 - np.exp(-kappa * t))
    z = kappa + 1j * g * (two_m - two_mp)  # 2g(M - M') = g(two_m - two_mp)
    return kappa * (1.0 - np.exp(-z * t)) / z


def evolve_fock_block(block: FockBlock, params: DecayParams) -> FockBlock:
    """Exact evolution of a {|0>,|1>} field block on a sector pair.

    Linear map: the |1><1| entry feeds the |0><0| entry through one jump
    (coefficient b), off-diagonal entries acquire the half-decayed phases
    exp((+-2igM - kappa/2)t), and |1><1| decays as exp((-2ig(M-M')-kappa)t).
    """
    g, kappa, t = params.g, params.kappa, params.t
    two_m, two_mp = block.two_m, block.two_mp
    b = b_coeff(params, two_m, two_mp)
    a = block.entries
    out = np.empty((2, 2), dtype=complex)
    out[0, 0] = a[0, 0] + b * a[1, 1]
    out[0, 1] = np.exp((1j * g * two_mp - kappa / 2) * t) * a[0, 1]
    out[1, 0] = np.exp((-1j * g * two_m - kappa / 2) * t) * a[1, 0]
    out[1, 1] = np.exp((-1j * g * (two_m - two_mp) - kappa) * t) * a[1, 1]
    return FockBlock(two_m=two_m, two_mp=two_mp, entries=out)


def c_coeff(
    alpha: complex, beta: complex, params: DecayParams, two_m: int, two_mp: int
) -> complex:
    """Characteristic-function integration constant c(t).

    Equals alpha beta* (b(t) - (1 - e^{-kappa t})); vanishes for g = 0
    (pure decay) and for M = M'.
    """
    ekt = np.exp(-params.kappa * params.t)
    return alpha * np.conj(beta) * (b_coeff(params, two_m, two_mp) - (1.0 - ekt))


def coherent_weight(
    alpha: complex, beta: complex, params: DecayParams, two_m: int, two_mp: int
) -> tuple[complex, complex, complex]:
    """Evolve |alpha><beta| on sector pair (M, M') for time t.

    Returns (w, alpha_out, beta_out) such that the evolved element is
    w |alpha_out><beta_out| with normalized coherent states, where
    w = exp(d(t)) and

        d(t) = alpha beta* b(t) - (|alpha|^2 + |beta|^2)(1 - e^{-kappa t})/2,
        alpha_out = alpha exp(-(2igM + kappa/2) t),
        beta_out  = beta  exp(-(2igM' + kappa/2) t).
    """
    g, kappa, t = params.g, params.kappa, params.t
    ekt = np.exp(-kappa * t)
    d = alpha * np.conj(beta) * b_coeff(params, two_m, two_mp) - (
        abs(alpha) ** 2 + abs(beta) ** 2
    ) * (1.0 - ekt) / 2.0
    alpha_out = alpha * np.exp((-1j * g * two_m - kappa / 2) * t)
    beta_out = beta * np.exp((-1j * g * two_mp - kappa / 2) * t)
    return np.exp(d), alpha_out, beta_out


# ---------------------------------------------------------------------------
# dense master-equation oracle
# ---------------------------------------------------------------------------

MAX_ORACLE_SPINS = 5


def spin_jz_values(m_sub: int) -> np.ndarray:
    """J^z eigenvalues of the 2**m_sub computational basis states.

    Basis state index s is read as a bit string, bit q set meaning spin q
    down; M = (#up - #down)/2.
    """
    if m_sub < 1:
        raise ValueError("need at least one spin")
    if m_sub > MAX_ORACLE_SPINS:
        raise CapabilityError(
            f"dense oracle limited to {MAX_ORACLE_SPINS} spins, got {m_sub}"
        )
    s = np.arange(2**m_sub)
    ndown = np.array([int(x).bit_count() for x in s])
    return (m_sub - 2 * ndown) / 2.0


@dataclass
class DenseState:
    """Operator on (spin x truncated Fock) space for the oracle integrators.

    ``jz_diag`` lists the J^z eigenvalue of each spin basis state; the full
    matrix is indexed by flat index spin * (n_max+1) + photon.
    """

    matrix: np.ndarray
    jz_diag: np.ndarray
    n_max: int

    def __post_init__(self) -> None:
        self.matrix = np.asarray(self.matrix, dtype=complex)
        self.jz_diag = np.asarray(self.jz_diag, dtype=float)
        dim = len(self.jz_diag) * (self.n_max + 1)
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"matrix shape {self.matrix.shape} != ({dim},{dim})")

    @property
    def spin_dim(self) -> int:
        return len(self.jz_diag)

    @property
    def field_dim(self) -> int:
        return self.n_max + 1

    def check_density(self, tol: float = 1e-9) -> None:
        """Assert Hermiticity, unit trace and positivity up to tol."""
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise ValueError("density matrix not Hermitian")
        if abs(np.trace(m).real - 1.0) > tol or abs(np.trace(m).imag) > tol:
            raise ValueError("density matrix trace != 1")
        w = np.linalg.eigvalsh(m)
        if w.min() < -tol:
            raise ValueError(f"density matrix not PSD, min eigenvalue {w.min()}")


def annihilation(n_max: int) -> np.ndarray:
    """Field annihilation operator on the (n_max+1)-dim truncated space."""
    a = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    n = np.arange(1, n_max + 1)
    a[n - 1, n] = np.sqrt(n)
    return a


def displacement(amp: complex, n_max: int) -> np.ndarray:
    """D(amp) = exp(amp a+ - amp* a) on the truncated field space."""
    from scipy.linalg import expm

    a = annihilation(n_max)
    return expm(amp * a.conj().T - np.conj(amp) * a)


def _lindblad_rhs(
    mat: np.ndarray, jz: np.ndarray, g: float, kappa: float, n_max: int
) -> np.ndarray:
    """Right-hand side -i[V_Z, .] + kappa D[a] on the flat spin x field space.

    V_Z is diagonal (2 g M n per basis state) so the commutator is a
    Hadamard product; the jump term shifts photon indices.
    """
    fdim = n_max + 1
    ns = np.arange(fdim)
    hdiag = 2.0 * g * np.kron(jz, ns)  # V_Z eigenvalues
    out = -1j * (hdiag[:, None] - hdiag[None, :]) * mat
    if kappa != 0.0:
        nkron = np.tile(ns, len(jz)).astype(float)
        out -= (kappa / 2.0) * (nkron[:, None] + nkron[None, :]) * mat
        sdim = len(jz)
        m4 = mat.reshape(sdim, fdim, sdim, fdim)
        jump = np.zeros_like(m4)
        w = np.sqrt(ns[1:, None] * ns[None, 1:])
        jump[:, :-1, :, :-1] = m4[:, 1:, :, 1:] * w[None, :, None, :]
        out += kappa * jump.reshape(mat.shape)
    return out


def integrate_master(
    state: DenseState,
    params: DecayParams,
    field_kind: str = "fock",
    step_scale: float = 1.0,
) -> DenseState:
    """Fixed-step RK4 integration of the master equation.

    Step h = step_scale * 1e-3 / max(|g|, kappa, 1); halving step_scale is
    the convergence check.  Works on arbitrary (also non-Hermitian)
    operator-valued initial conditions since the map is linear.  For
    field_kind="coherent" the top Fock level is monitored for truncation
    leakage and the run aborts above 1e-8.
    """
    if state.spin_dim > 2**MAX_ORACLE_SPINS:
        raise CapabilityError(
            f"spin dimension {state.spin_dim} exceeds oracle limit"
        )
    g, kappa, t = params.g, params.kappa, params.t
    if t == 0.0:
        return DenseState(state.matrix.copy(), state.jz_diag, state.n_max)
    h_target = step_scale * 1e-3 / max(abs(g), kappa, 1.0)
    nsteps = max(1, int(np.ceil(t / h_target)))
    h = t / nsteps
    jz, n_max = state.jz_diag, state.n_max
    mat = state.matrix.copy()
    for _ in range(nsteps):
        k1 = _lindblad_rhs(mat, jz, g, kappa, n_max)
        k2 = _lindblad_rhs(mat + 0.5 * h * k1, jz, g, kappa, n_max)
        k3 = _lindblad_rhs(mat + 0.5 * h * k2, jz, g, kappa, n_max)
        k4 = _lindblad_rhs(mat + h * k3, jz, g, kappa, n_max)
        mat += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if field_kind == "coherent":
        fdim = n_max + 1
        m4 = mat.reshape(state.spin_dim, fdim, state.spin_dim, fdim)
        leak = np.max(np.abs(m4[:, n_max, :, :])) + np.max(np.abs(m4[:, :, :, n_max]))
        if leak > 1e-8:
            raise CapabilityError(
                f"Fock truncation leakage {leak:.2e} > 1e-8; raise n_max"
            )
    return DenseState(mat, jz, n_max)


def evolve_sector_field_op(
    field_op: np.ndarray,
    two_m: int,
    two_mp: int,
    params: DecayParams,
    n_max: int,
    step_scale: float = 1.0,
) -> np.ndarray:
    """Dense-oracle evolution of a field operator on a fixed sector pair.

    The spin part of |M><M'| enters only through the constant eigenvalues
    M, M', so the master equation closes on the field operator alone.
    Implemented by placing the field operator in the |M><M'| corner of a
    two-level spin space with jz_diag = (M, M').
    """
    jz = np.array([two_m / 2.0, two_mp / 2.0])
    big = np.zeros((2 * (n_max + 1), 2 * (n_max + 1)), dtype=complex)
    big[: n_max + 1, n_max + 1 :] = field_op
    out = integrate_master(
        DenseState(big, jz, n_max), params, field_kind="fock", step_scale=step_scale
    )
    return out.matrix[: n_max + 1, n_max + 1 :]


# ---------------------------------------------------------------------------
# Monte Carlo wavefunction (trajectory) oracle
# ---------------------------------------------------------------------------


@dataclass
class TrajectoryRecord:
    """Jump times and final (normalized) state of one quantum trajectory."""

    jump_times: list[float] = field(default_factory=list)
    final_state: np.ndarray | None = None


def _no_jump_propagate(
    psi: np.ndarray, jz: np.ndarray, g: float, kappa: float, n_max: int, t: float
) -> np.ndarray:
    """Exact non-Hermitian propagation exp(-i(V_Z - i kappa/2 a+a) t) psi.

    The effective Hamiltonian is diagonal in the spin x Fock product basis,
    so no stepping error is incurred between jumps.
    """
    ns = np.arange(n_max + 1)
    lam = -1j * 2.0 * g * np.kron(jz, ns) - (kappa / 2.0) * np.kron(
        np.ones_like(jz), ns
    )
    return psi * np.exp(lam * t)


def _solve_jump_time(
    psi: np.ndarray, jz: np.ndarray, kappa: float, n_max: int, target: float, t_hi: float
) -> float:
    """Bisect ||psi(t)||^2 = target on [0, t_hi]; the norm is monotone."""
    ns = np.arange(n_max + 1)
    nk = np.kron(np.ones_like(jz), ns)
    w = np.abs(psi) ** 2

    def norm2(t: float) -> float:
        return float(np.sum(w * np.exp(-kappa * nk * t)))

    lo, hi = 0.0, t_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if norm2(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * max(t_hi, 1.0):
            break
    return 0.5 * (lo + hi)


def mcwf_run(
    psi0: np.ndarray,
    jz_diag: np.ndarray,
    params: DecayParams,
    rng: np.random.Generator,
    t_max: float,
) -> TrajectoryRecord:
    """One quantum trajectory with jump operator sqrt(kappa) a.

    Norm-threshold jump detection: draw r ~ U(0,1), propagate the
    un-normalized state under the non-Hermitian Hamiltonian until
    ||psi||^2 = r, apply the jump, renormalize, redraw.
    """
    jz = np.asarray(jz_diag, dtype=float)
    n_max = len(psi0) // len(jz) - 1
    kappa = params.kappa
    psi = psi0.astype(complex) / np.linalg.norm(psi0)
    rec = TrajectoryRecord()
    t = 0.0
    if kappa == 0.0:
        rec.final_state = _no_jump_propagate(psi, jz, params.g, 0.0, n_max, t_max)
        return rec
    a = annihilation(n_max)
    while t < t_max:
        r = rng.uniform()
        psi_end = _no_jump_propagate(psi, jz, params.g, kappa, n_max, t_max - t)
        if np.sum(np.abs(psi_end) ** 2) > r:
            psi = psi_end / np.linalg.norm(psi_end)
            t = t_max
            break
        dt = _solve_jump_time(psi, jz, kappa, n_max, r, t_max - t)
        psi = _no_jump_propagate(psi, jz, params.g, kappa, n_max, dt)
        psi = psi.reshape(len(jz), n_max + 1) @ a.T
        psi = psi.reshape(-1)
        nrm = np.linalg.norm(psi)
        if nrm == 0.0:
            raise RuntimeError("jump applied to vacuum component")
        psi /= nrm
        t += dt
        rec.jump_times.append(t)
    rec.final_state = psi
    return rec
