"""Exact Hermitian eigendecomposition and ground-state level-crossing location."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import ChainSpec, build_chain_hamiltonian, total_sz

HERMITICITY_TOL = 1e-10
DEGENERACY_TOL = 1e-9
BRACKET_TOL = 1e-6
GRID_STEP = 0.01

_MAX_BISECTIONS = 80


@dataclass(frozen=True)
class Spectrum:
    """Full eigendecomposition of a Hermitian operator.

    Eigenvalues ascend; eigenvector columns align with them and carry a
    deterministic phase (first component of magnitude above 1e-10 made real
    positive).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degeneracy_tol: float = DEGENERACY_TOL

    @property
    def dim(self) -> int:
        return self.eigenvalues.size


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-10)
        if idx.size:
            pivot = col[idx[0]]
            out[:, k] = col * (np.conj(pivot) / np.abs(pivot))
    return out


def eig_hermitian(h: np.ndarray, degeneracy_tol: float = DEGENERACY_TOL) -> Spectrum:
    """Diagonalize a Hermitian matrix into a :class:`Spectrum`.

    Raises ValueError when the input deviates from Hermiticity by more than
    1e-10 entrywise.
    """
    h = np.asarray(h, dtype=complex)
    defect = float(np.max(np.abs(h - h.conj().T)))
    if defect > HERMITICITY_TOL:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")
    evals, evecs = np.linalg.eigh(h)
    return Spectrum(evals, _fix_phases(evecs), degeneracy_tol)


def ground_state(s: Spectrum) -> tuple[float, np.ndarray, bool]:
    """Ground energy, ground vector and a flag for degeneracy within tolerance."""
    e0 = float(s.eigenvalues[0])
    degenerate = bool(s.eigenvalues[1] - s.eigenvalues[0] < s.degeneracy_tol)
    return e0, s.eigenvectors[:, 0].copy(), degenerate


def _sector_evaluator(template: ChainSpec):
    """Ground-sector lookup over the field axis.

    The chain Hamiltonian commutes with total sigma^z exactly, so H(B) is
    block diagonal in the magnetization basis and within each sector the
    spectrum only shifts by B * m.  Diagonalizing each exchange block once
    therefore gives the exact ground sector at every field as
    argmin_m(eps_m + B * m).
    """
    h_ex = build_chain_hamiltonian(template.replace_field(0.0))
    m_diag = np.rint(np.real(np.diagonal(total_sz(template.n_sites)))).astype(int)
    ms = np.array(sorted(set(m_diag.tolist())))
    eps = np.empty(ms.size)
    for k, m in enumerate(ms):
        idx = np.flatnonzero(m_diag == m)
        eps[k] = float(np.linalg.eigvalsh(h_ex[np.ix_(idx, idx)])[0])

    def sector(b: float) -> int:
        return int(ms[np.argmin(eps + b * ms)])

    return sector


def ground_sector(spec: ChainSpec) -> int:
    """Total-magnetization label of the chain ground state at the spec's field,
    via a direct dense diagonalization of the full Hamiltonian."""
    h = build_chain_hamiltonian(spec)
    _, psi, _ = ground_state(eig_hermitian(h))
    m = np.real(psi.conj() @ (total_sz(spec.n_sites) @ psi))
    return int(np.rint(m))


@dataclass(frozen=True)
class Crossing:
    field: float
    sector_below: int
    sector_above: int


@dataclass(frozen=True)
class CriticalFieldScan:
    template: ChainSpec
    crossings: tuple[Crossing, ...] = ()
    bracket_tol: float = BRACKET_TOL

    @property
    def fields(self) -> list[float]:
        return [c.field for c in self.crossings]


def _bisect_first_change(
    sector_of, lo: float, hi: float, sector_lo: int, tol: float
) -> tuple[float, float]:
    """Shrink [lo, hi] around the first field where the sector leaves sector_lo."""
    for _ in range(_MAX_BISECTIONS):
        if hi - lo <= tol:
            return lo, hi
        mid = 0.5 * (lo + hi)
        if sector_of(mid) == sector_lo:
            lo = mid
        else:
            hi = mid
    raise ValueError(
        f"could not resolve a sector change inside ({lo}, {hi}) after "
        f"{_MAX_BISECTIONS} bisections"
    )


def find_level_crossings(
    template: ChainSpec,
    b_range: tuple[float, float],
    bracket_tol: float = BRACKET_TOL,
    grid_step: float = GRID_STEP,
) -> CriticalFieldScan:
    """Locate every field where the chain ground state changes magnetization sector.

    A coarse grid scan brackets candidate changes; each bracket is bisected to
    ``bracket_tol``.  Cells hiding several crossings are handled by re-entering
    the remainder of the cell after each located crossing.
    """
    b_lo, b_hi = b_range
    if not b_hi > b_lo:
        raise ValueError("b_range must be increasing")
    grid = np.arange(b_lo, b_hi + 0.5 * grid_step, grid_step)
    grid[-1] = min(grid[-1], b_hi)
    if grid[-1] < b_hi:
        grid = np.append(grid, b_hi)
    sector_of = _sector_evaluator(template)
    sectors = [sector_of(b) for b in grid]

    crossings: list[Crossing] = []
    for (b0, s0), (b1, s1) in zip(zip(grid, sectors), zip(grid[1:], sectors[1:])):
        if s0 == s1:
            continue
        lo, hi, sec_lo = float(b0), float(b1), s0
        while sec_lo != s1:
            lo_f, hi_f = _bisect_first_change(sector_of, lo, hi, sec_lo, bracket_tol)
            sec_hi = sector_of(hi_f)
            crossings.append(Crossing(0.5 * (lo_f + hi_f), sec_lo, sec_hi))
            lo, sec_lo = hi_f, sec_hi
    return CriticalFieldScan(template, tuple(crossings), bracket_tol)
