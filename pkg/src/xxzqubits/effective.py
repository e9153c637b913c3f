"""Second-order effective two-qubit Hamiltonian obtained by projecting the
probe-chain interaction onto the chain ground state."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import (
    ALL_SITES,
    END_SITES,
    PAULI_DOT,
    SPIN_HALF_DOT,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ChainSpec,
    CouplingSpec,
    build_chain_hamiltonian,
    build_interaction,
)
from .spectra import Spectrum, eig_hermitian, ground_state

# Frobenius-orthogonal basis elements used by the g fit.
_IDENTITY_4 = np.eye(4, dtype=complex)
_XXYY = np.kron(SIGMA_X, SIGMA_X) + np.kron(SIGMA_Y, SIGMA_Y)
_Z_TOTAL = np.kron(SIGMA_Z, np.eye(2)) + np.kron(np.eye(2), SIGMA_Z)


def effective_hamiltonian(
    chain_spectrum: Spectrum,
    h_int: np.ndarray,
    exclude_degenerate: bool = True,
) -> tuple[np.ndarray, list[int]]:
    """Project a probe-chain interaction onto the chain ground state.

    For each excited chain eigenstate j the 4x4 block
    A_j = (<psi_j| x I_4) H_int (|psi_0> x I_4) contributes
    -A_j^dagger A_j / (E_j - E_0); the standard second-order sign makes every
    term negative semidefinite.

    Returns the Hermitian 4x4 operator together with the indices of excited
    levels that sat within the degeneracy tolerance of the ground energy and
    were therefore excluded (with exclude_degenerate=False such levels raise
    instead).

    Raises ValueError when the chain ground state itself is degenerate: the
    projection formula is not valid there.
    """
    evals = chain_spectrum.eigenvalues
    dim_chain = chain_spectrum.dim
    h_int = np.asarray(h_int, dtype=complex)
    if h_int.shape != (4 * dim_chain, 4 * dim_chain):
        raise ValueError(
            f"interaction must act on chain x qubits "
            f"({4 * dim_chain} dims), got {h_int.shape}"
        )
    e0, psi0, degenerate = ground_state(chain_spectrum)
    if degenerate:
        raise ValueError(
            "chain ground state is degenerate; the second-order projection "
            "is not valid at a level crossing"
        )
    tol = chain_spectrum.degeneracy_tol
    blocks = h_int.reshape(dim_chain, 4, dim_chain, 4)
    # v0[c, a, b] = sum_d H[c, a, d, b] psi0[d]
    v0 = np.einsum("cadb,d->cab", blocks, psi0)
    heff = np.zeros((4, 4), dtype=complex)
    excluded: list[int] = []
    for j in range(1, dim_chain):
        gap = evals[j] - e0
        if gap < tol:
            if not exclude_degenerate:
                raise ValueError(
                    f"excited level {j} lies within the degeneracy tolerance "
                    f"of the ground energy (gap {gap:.3e})"
                )
            excluded.append(j)
            continue
        a_j = np.einsum("c,cab->ab", chain_spectrum.eigenvectors[:, j].conj(), v0)
        heff -= (a_j.conj().T @ a_j) / gap
    heff = 0.5 * (heff + heff.conj().T)
    return heff, excluded


def effective_for(
    chain: ChainSpec, coupling: CouplingSpec
) -> tuple[np.ndarray, list[int]]:
    """Convenience wrapper: diagonalize the chain and project the interaction."""
    spectrum = eig_hermitian(build_chain_hamiltonian(chain))
    h_int = build_interaction(chain, coupling)
    return effective_hamiltonian(spectrum, h_int)


@dataclass(frozen=True)
class GExtraction:
    """Frobenius projection of a 4x4 operator onto span{I, xx+yy}.

    ``g_offdiag`` is half the (|01>,|10>) matrix element; ``residual`` is the
    spectral norm of what the fitted form leaves behind.
    """

    g_diag: float
    g_offdiag: float
    residual: float


def extract_g(heff: np.ndarray) -> GExtraction:
    h = np.asarray(heff, dtype=complex)
    if float(np.max(np.abs(h - h.conj().T))) > 1e-10:
        raise ValueError("extract_g expects a Hermitian operator")
    g_diag = float(np.trace(h).real) / 4.0
    g_off = float(np.trace(h @ _XXYY).real) / 8.0
    rest = h - g_diag * _IDENTITY_4 - g_off * _XXYY
    return GExtraction(g_diag, g_off, float(np.linalg.norm(rest, 2)))


def axial_z_coefficient(heff: np.ndarray) -> float:
    """Coefficient of (z_a + z_b) in a 4x4 operator, reported separately from
    the two-parameter g fit."""
    return float(np.trace(np.asarray(heff, dtype=complex) @ _Z_TOTAL).real) / 8.0


def reference_g_n2(delta: float, field: float, jp: float) -> float:
    """Published closed-form coupling constant for the two-site chain above its
    critical field; the adjudication report compares every built variant
    against this value."""
    x = field - delta
    return jp**2 * (delta - field) / ((x + 1.0) * (x - 1.0))


@dataclass(frozen=True)
class GComparisonRow:
    topology: str
    convention: str
    g_diag: float
    g_offdiag: float
    g_z: float
    residual: float
    residual_beyond_z: float
    reference: float
    x_preserving: bool


def g_comparison(chain: ChainSpec, jp: float) -> list[GComparisonRow]:
    """Adjudication report: the fitted g parameters of every
    (topology, convention) interaction variant, against the published
    two-site closed form.

    Every row also records whether the built operator preserves the X shape
    (its only off-diagonal element connects |01> and |10>).
    """
    spectrum = eig_hermitian(build_chain_hamiltonian(chain))
    reference = reference_g_n2(chain.delta, chain.field, jp)
    rows = []
    for topology in (END_SITES, ALL_SITES):
        for convention in (PAULI_DOT, SPIN_HALF_DOT):
            coupling = CouplingSpec(jp=jp, topology=topology, convention=convention)
            h_int = build_interaction(chain, coupling)
            heff, _ = effective_hamiltonian(spectrum, h_int)
            fit = extract_g(heff)
            g_z = axial_z_coefficient(heff)
            beyond = heff - fit.g_diag * _IDENTITY_4 - fit.g_offdiag * _XXYY - g_z * _Z_TOTAL
            off_mask = ~np.eye(4, dtype=bool)
            off_mask[1, 2] = off_mask[2, 1] = False
            x_preserving = bool(np.max(np.abs(heff[off_mask])) < 1e-12)
            rows.append(
                GComparisonRow(
                    topology=topology,
                    convention=convention,
                    g_diag=fit.g_diag,
                    g_offdiag=fit.g_offdiag,
                    g_z=g_z,
                    residual=fit.residual,
                    residual_beyond_z=float(np.linalg.norm(beyond, 2)),
                    reference=reference,
                    x_preserving=x_preserving,
                )
            )
    return rows
