"""Unitary time evolution, reduced density matrices and Wootters concurrence."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import (
    SIGMA_Y,
    ChainSpec,
    CouplingSpec,
    build_chain_hamiltonian,
    build_interaction,
    build_full_hamiltonian,
)
from .spectra import eig_hermitian, ground_state
from .effective import effective_hamiltonian

_YY = np.kron(SIGMA_Y, SIGMA_Y)

X_FORM_TOL = 1e-12
_X_CROSSCHECK_TOL = 1e-10


def evolve_state(h: np.ndarray, psi0: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) |psi0> via eigendecomposition (exact for Hermitian H)."""
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ValueError("psi0 must be normalized")
    s = eig_hermitian(h)
    coeffs = s.eigenvectors.conj().T @ psi0
    return s.eigenvectors @ (np.exp(-1j * s.eigenvalues * t) * coeffs)


def evolve_many(h: np.ndarray, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """States at several times, one eigendecomposition; rows follow ``times``."""
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ValueError("psi0 must be normalized")
    s = eig_hermitian(h)
    coeffs = s.eigenvectors.conj().T @ psi0
    phases = np.exp(-1j * np.outer(np.asarray(times, float), s.eigenvalues))
    return (phases * coeffs) @ s.eigenvectors.T


def density_from_state(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def partial_trace_chain(rho_full: np.ndarray, n_sites: int) -> np.ndarray:
    """Trace the N chain sites out of a density matrix on chain x qubits."""
    rho_full = np.asarray(rho_full, dtype=complex)
    dim = 2 ** (n_sites + 2)
    if rho_full.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} density matrix, got {rho_full.shape}")
    dim_chain = 2**n_sites
    reshaped = rho_full.reshape(dim_chain, 4, dim_chain, 4)
    return np.trace(reshaped, axis1=0, axis2=2)


def reduced_qubit_density(psi_full: np.ndarray, n_sites: int) -> np.ndarray:
    """Two-qubit reduced density matrix of a pure chain x qubits state,
    contracted without forming the full density matrix."""
    mat = np.asarray(psi_full, dtype=complex).reshape(2**n_sites, 4)
    return mat.T @ mat.conj()


def validate_two_qubit_density(rho: np.ndarray) -> None:
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError("two-qubit density matrix must be 4x4")
    if float(np.max(np.abs(rho - rho.conj().T))) > 1e-12:
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise ValueError("density matrix must have unit trace")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValueError("density matrix must be positive semidefinite")


def concurrence_general(rho: np.ndarray, validate: bool = True) -> float:
    """Wootters concurrence of an arbitrary two-qubit density matrix.

    The spin-flipped companion is (y x y) rho* (y x y); the concurrence is
    max(0, l1 - l2 - l3 - l4) with l_i the descending square roots of the
    eigenvalues of rho rho~, clamped at zero before the square root.
    """
    rho = np.asarray(rho, dtype=complex)
    if validate:
        validate_two_qubit_density(rho)
    # With rho = M M^dag (M = eigenvectors scaled by sqrt of clamped
    # eigenvalues), the nonzero spectrum of rho rho~ equals the squared
    # singular values of the symmetric matrix M^T (y x y) M.  Tiny spurious
    # eigenvalues of rho enter that matrix quadratically, so near-pure states
    # lose no precision to the square roots.
    evals, evecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    m = evecs * np.sqrt(np.clip(evals, 0.0, None))
    k = m.T @ _YY @ m
    lam = np.linalg.svd(k, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


@dataclass(frozen=True)
class XStateElements:
    """Entries of an X-shaped two-qubit density matrix: populations
    (u, w1, w2, v) on the diagonal and the central coherence y."""

    u: float
    w1: float
    w2: float
    v: float
    y: complex

    def __post_init__(self):
        if abs(self.u + self.w1 + self.w2 + self.v - 1.0) > 1e-10:
            raise ValueError("populations must sum to 1")
        if min(self.u, self.w1, self.w2, self.v) < -1e-10:
            raise ValueError("populations must be nonnegative")
        if abs(self.y) ** 2 > self.w1 * self.w2 + 1e-10:
            raise ValueError("|y|^2 must not exceed w1*w2")


def concurrence_xstate(x: XStateElements) -> float:
    """Fast path for X states: C = 2 max(|y| - sqrt(u v), 0)."""
    return float(2.0 * max(abs(x.y) - np.sqrt(max(x.u * x.v, 0.0)), 0.0))


def xstate_from_density(rho: np.ndarray, tol: float = X_FORM_TOL) -> XStateElements | None:
    """Read off X-state elements, or None when off-X entries exceed ``tol``.

    Only the central-coherence X form is recognised: every off-diagonal entry
    other than (|01>,|10>) must vanish.
    """
    rho = np.asarray(rho, dtype=complex)
    mask = ~np.eye(4, dtype=bool)
    mask[1, 2] = mask[2, 1] = False
    if float(np.max(np.abs(rho[mask]))) > tol:
        return None
    return XStateElements(
        u=float(rho[0, 0].real),
        w1=float(rho[1, 1].real),
        w2=float(rho[2, 2].real),
        v=float(rho[3, 3].real),
        y=complex(rho[1, 2]),
    )


@dataclass(frozen=True)
class ConcurrenceTrace:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly ascending")


def concurrence_trace(
    h4: np.ndarray, psi0_ab: np.ndarray, times: np.ndarray
) -> ConcurrenceTrace:
    """Concurrence of a two-qubit pure state evolved under a 4x4 Hamiltonian.

    When the instantaneous density matrix is X-shaped the fast X-state value
    is cross-checked against the general Wootters value.
    """
    times = np.asarray(times, dtype=float)
    states = evolve_many(h4, psi0_ab, times)
    values = np.empty(times.size)
    for k in range(times.size):
        rho = density_from_state(states[k])
        c = concurrence_general(rho, validate=False)
        x = xstate_from_density(rho)
        if x is not None:
            cx = concurrence_xstate(x)
            if abs(cx - c) > _X_CROSSCHECK_TOL:
                raise AssertionError(
                    f"X-state fast path disagrees with Wootters value: "
                    f"{cx} vs {c} at t={times[k]}"
                )
        values[k] = c
    return ConcurrenceTrace(times, values)


def full_vs_effective(
    chain: ChainSpec,
    coupling: CouplingSpec,
    psi0_ab: np.ndarray,
    times: np.ndarray,
) -> tuple[ConcurrenceTrace, ConcurrenceTrace, float]:
    """Exact reduced dynamics of chain x qubits against the effective model.

    The full run starts from (chain ground state) x psi0_ab, evolves under the
    complete Hamiltonian and traces the chain out at every time; the effective
    run evolves psi0_ab under the projected 4x4 operator.  Returns both traces
    and their largest pointwise deviation.
    """
    times = np.asarray(times, dtype=float)
    spectrum = eig_hermitian(build_chain_hamiltonian(chain))
    _, psi_chain, degenerate = ground_state(spectrum)
    if degenerate:
        raise ValueError("chain ground state is degenerate at this field")
    h_int = build_interaction(chain, coupling)
    heff, _ = effective_hamiltonian(spectrum, h_int)

    psi0_ab = np.asarray(psi0_ab, dtype=complex)
    h_full = build_full_hamiltonian(chain, coupling)
    psi0_full = np.kron(psi_chain, psi0_ab)
    states = evolve_many(h_full, psi0_full, times)
    c_full = np.empty(times.size)
    for k in range(times.size):
        rho = reduced_qubit_density(states[k], chain.n_sites)
        c_full[k] = concurrence_general(rho, validate=False)
    trace_full = ConcurrenceTrace(times, c_full)
    trace_eff = concurrence_trace(heff, psi0_ab, times)
    max_dev = float(np.max(np.abs(trace_full.values - trace_eff.values)))
    return trace_full, trace_eff, max_dev
