"""Collective and independent depolarization channels.

Collective depolarization applies one random SU(2) rotation to every
qubit with probability p:

    E_cd(rho) = (1-p) rho + p sum_J [rho^J] (x) 1_(2J+1)/(2J+1),

erasing inter-J coherence and maximally mixing each J block.  It commutes
with the cavity-decay gate channel, giving the composite fidelity

    F(E_cd o E_g, U) = (1-p) F(E_g, U) + p 2^{-2m} sum_J (c^m_J)^2,

where the second term is an exact integer sum (no hypergeometric
evaluation) and for large m falls off like (p/5)(m/2)^{-3/2}.

Independent depolarization with per-particle strength p,
effective rate gamma_eff = gamma nbar g^2/Delta^2, gives to first order

    E_id(rho) = (1 - m p) rho + p sum_k Tr_k[rho] (x) 1/2,

which does NOT commute with the gate channel; the composite fidelity is
lower bounded by (1 - m p) F(E_g, U) in the perturbative regime.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import sectors


@dataclass(frozen=True)
class DepolarizationParams:
    """Channel strength p = 1 - e^{-rate * t} and its physical inputs."""

    p: float
    gamma: float = 0.0
    n_bar: float = 1.0
    g_over_delta: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")

    @property
    def gamma_eff(self) -> float:
        return self.gamma * self.n_bar * self.g_over_delta**2


def effective_rate(gamma: float, n_bar: float, g_over_delta: float) -> float:
    """gamma_eff = gamma * nbar * (g/Delta)^2."""
    return gamma * n_bar * g_over_delta**2


def sum_multiplicity_squares(m: int) -> int:
    """Exact integer sum_J (c^m_J)^2 (equals the m-th Catalan number)."""
    return sum(row.count**2 for row in sectors.enumerate_sectors(m))


def collective_tail_term(m: int) -> float:
    """2^{-2m} sum_J (c^m_J)^2 evaluated exactly then rounded once."""
    num = sum_multiplicity_squares(m)
    # exact rational -> float; 4**m is exact in binary so one rounding only
    return num / 4.0**m if m < 500 else float(num) / float(4**m)


def tail_asymptote(m: int) -> float:
    """Large-m estimate (1/5)(m/2)^{-3/2} of the collective tail term."""
    return (m / 2.0) ** -1.5 / 5.0


def collective_fidelity(p: float, m: int, f_gate: float) -> float:
    """(1-p) F_gate + p * 2^{-2m} sum_J (c^m_J)^2, exact second term."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if not 0.0 <= f_gate <= 1.0:
        raise ValueError("F_gate must lie in [0, 1]")
    return (1.0 - p) * f_gate + p * collective_tail_term(m)


def independent_bound(p: float, m: int, f_gate: float) -> float:
    """Perturbative floor (1 - m p) F_gate, clipped at 0.

    Warns outside the validity regime m*p <= 0.2.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if m * p > 0.2:
        warnings.warn(
            f"m*p = {m * p:.3f} outside perturbative regime (> 0.2)",
            stacklevel=2,
        )
    return max(0.0, (1.0 - m * p) * f_gate)


# ---------------------------------------------------------------------------
# dense channel oracles (small m_sub)
# ---------------------------------------------------------------------------

MAX_TWIRL_SPINS = 4


def _spin_operators(m_sub: int) -> tuple[np.ndarray, np.ndarray]:
    """(J^2, J^z) dense matrices on the 2**m_sub computational space."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex) / 2
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
    sz = np.array([[1, 0], [0, -1]], dtype=complex) / 2
    dim = 2**m_sub
    jx = np.zeros((dim, dim), dtype=complex)
    jy = np.zeros_like(jx)
    jz = np.zeros_like(jx)
    for q in range(m_sub):
        left = np.eye(2**q)
        right = np.eye(2 ** (m_sub - q - 1))
        jx += np.kron(np.kron(left, sx), right)
        jy += np.kron(np.kron(left, sy), right)
        jz += np.kron(np.kron(left, sz), right)
    j2 = jx @ jx + jy @ jy + jz @ jz
    return j2, jz


def _jminus(m_sub: int) -> np.ndarray:
    sm = np.array([[0, 0], [1, 0]], dtype=complex)
    dim = 2**m_sub
    out = np.zeros((dim, dim), dtype=complex)
    for q in range(m_sub):
        out += np.kron(
            np.kron(np.eye(2**q), sm), np.eye(2 ** (m_sub - q - 1))
        )
    return out


def collective_basis(m_sub: int) -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    """Orthonormal (J, Lambda, M) basis of m_sub spins.

    Returns (B, labels) with columns of B the basis vectors in the
    computational-basis ordering and labels[col] = (two_j, lam, two_m).
    Highest-weight vectors are the joint kernel of (J^2 - j(j+1)) and
    (J^z - j); lowering builds each multiplet.
    """
    if m_sub > MAX_TWIRL_SPINS:
        raise ValueError(f"collective basis limited to {MAX_TWIRL_SPINS} spins")
    j2, jz = _spin_operators(m_sub)
    jm = _jminus(m_sub)
    dim = 2**m_sub
    cols: list[np.ndarray] = []
    labels: list[tuple[int, int, int]] = []
    for row in sectors.enumerate_sectors(m_sub):
        two_j = row.two_j
        j = two_j / 2.0
        stack = np.vstack([j2 - j * (j + 1) * np.eye(dim), jz - j * np.eye(dim)])
        _, svals, vh = np.linalg.svd(stack)
        hw = vh[svals < 1e-9].conj().T  # columns span the highest-weight space
        assert hw.shape[1] == row.count, (two_j, hw.shape, row.count)
        for lam in range(row.count):
            vec = hw[:, lam]
            for two_m in range(two_j, -two_j - 2, -2):
                cols.append(vec)
                labels.append((two_j, lam, two_m))
                if two_m > -two_j:
                    vec = jm @ vec
                    vec = vec / np.linalg.norm(vec)
    basis = np.column_stack(cols)
    return basis, labels


def apply_collective(rho: np.ndarray, p: float, m_sub: int) -> np.ndarray:
    """Collective depolarization channel on a dense m_sub-spin state.

    Exact block form in the (J, Lambda, M) basis; trace preserving for
    any input.
    """
    basis, labels = collective_basis(m_sub)
    rt = basis.conj().T @ rho @ basis
    tw = np.zeros_like(rt)
    by_sector: dict[tuple[int, int], dict[int, int]] = {}
    for col, (two_j, lam, two_m) in enumerate(labels):
        by_sector.setdefault((two_j, lam), {})[two_m] = col
    groups: dict[int, list[int]] = {}
    for (two_j, lam), _ in by_sector.items():
        groups.setdefault(two_j, []).append(lam)
    for two_j, lams in groups.items():
        dimj = two_j + 1
        for lam in lams:
            for lamp in lams:
                colmap = by_sector[(two_j, lam)]
                colmapp = by_sector[(two_j, lamp)]
                block = sum(
                    rt[colmap[two_m], colmapp[two_m]]
                    for two_m in range(-two_j, two_j + 1, 2)
                )
                for two_m in range(-two_j, two_j + 1, 2):
                    tw[colmap[two_m], colmapp[two_m]] = block / dimj
    return (1.0 - p) * rho + p * basis @ tw @ basis.conj().T


def apply_independent(rho: np.ndarray, p: float, m_sub: int) -> np.ndarray:
    """First-order independent depolarization (1-mp) rho + p sum Tr_k (x) 1/2."""
    dim = 2**m_sub
    out = (1.0 - m_sub * p) * rho.astype(complex)
    for q in range(m_sub):
        left, right = 2**q, 2 ** (m_sub - q - 1)
        r4 = rho.reshape(left, 2, right, left, 2, right)
        partial = np.einsum("aibajb->abab", r4.reshape(left, 2, right, left, 2, right))
        # Tr_k over qubit q, reinserting identity/2 at its slot
        traced = np.trace(r4, axis1=1, axis2=4)  # (left, right, left, right)
        for i in range(2):
            block = np.zeros((left, 2, right, left, 2, right), dtype=complex)
        ins = np.zeros((left, 2, right, left, 2, right), dtype=complex)
        for i in range(2):
            ins[:, i, :, :, i, :] = traced / 2.0
        out += p * ins.reshape(dim, dim)
    return out


def sector_diagonal_channel(
    rho: np.ndarray, m_sub: int, coeff_fn
) -> np.ndarray:
    """Channel multiplying |J,L,M><J',L',M'| by coeff_fn(two_m, two_mp).

    This is the dense form of the cavity-mediated gate maps (their
    coefficients depend on the projections only).
    """
    basis, labels = collective_basis(m_sub)
    rt = basis.conj().T @ rho @ basis
    for i, (_, _, two_m) in enumerate(labels):
        for jcol, (_, _, two_mp) in enumerate(labels):
            rt[i, jcol] *= coeff_fn(two_m, two_mp)
    return basis @ rt @ basis.conj().T


def haar_su2(rng: np.random.Generator) -> np.ndarray:
    """Haar-random SU(2) element via QR of a complex Gaussian matrix."""
    zmat = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(zmat)
    q = q @ np.diag(np.diag(r) / np.abs(np.diag(r)))
    return q / np.sqrt(np.linalg.det(q))


def haar_twirl_mc(
    rho: np.ndarray, m_sub: int, samples: int, rng: np.random.Generator
) -> np.ndarray:
    """Monte Carlo collective twirl: average of U^(x)m rho U+^(x)m."""
    acc = np.zeros_like(rho, dtype=complex)
    for _ in range(samples):
        u1 = haar_su2(rng)
        u = u1
        for _ in range(m_sub - 1):
            u = np.kron(u, u1)
        acc += u @ rho @ u.conj().T
    return acc / samples
