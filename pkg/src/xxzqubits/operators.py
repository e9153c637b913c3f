"""Dense spin operators and Hamiltonians for an XXZ chain plus two probe qubits.

Conventions, fixed once for the whole package:

* sites are numbered 1..N and site 1 is the most significant qubit of the
  computational basis index,
* |0> is the sigma^z = +1 state, |1> the sigma^z = -1 state,
* the combined Hilbert space is ordered (chain sites 1..N, qubit a, qubit b),
* all operators are dense complex matrices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPEN = "open"
PERIODIC = "periodic"

ALL_SITES = "all"
END_SITES = "end"
EXPLICIT = "explicit"

PAULI_DOT = "pauli"
SPIN_HALF_DOT = "spinhalf"

MAX_TOTAL_SPINS = 12

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

_PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


@dataclass(frozen=True)
class ChainSpec:
    """Parameters of the spin-chain environment.

    ``boundary=None`` resolves to open for n_sites == 2 (the two-site chain has
    a single bond) and periodic otherwise.
    """

    n_sites: int
    j: float = 1.0
    delta: float = 0.25
    field: float = 0.0
    boundary: str | None = None

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be >= 2, got {self.n_sites}")
        if self.n_sites > MAX_TOTAL_SPINS:
            raise ValueError(
                f"n_sites={self.n_sites} exceeds the dense-matrix limit of "
                f"{MAX_TOTAL_SPINS} spins"
            )
        if self.j == 0:
            raise ValueError("j must be nonzero")
        if self.boundary is None:
            object.__setattr__(
                self, "boundary", OPEN if self.n_sites == 2 else PERIODIC
            )
        if self.boundary not in (OPEN, PERIODIC):
            raise ValueError(f"boundary must be '{OPEN}' or '{PERIODIC}'")

    def bonds(self) -> list[tuple[int, int]]:
        pairs = [(i, i + 1) for i in range(1, self.n_sites)]
        if self.boundary == PERIODIC:
            pairs.append((self.n_sites, 1))
        return pairs

    def replace_field(self, b: float) -> "ChainSpec":
        return ChainSpec(self.n_sites, self.j, self.delta, b, self.boundary)


@dataclass(frozen=True)
class CouplingSpec:
    """Probe-qubit interaction parameters.

    ``topology`` selects which chain sites each qubit touches: every site
    (``"all"``), the two ends (``"end"``: qubit a -> site 1, qubit b -> site N),
    or explicit site lists.  ``convention`` picks the operator normalisation:
    bare Pauli matrices or spin-1/2 operators sigma/2.
    """

    jp: float = 0.2
    topology: str = END_SITES
    convention: str = PAULI_DOT
    sites_a: tuple[int, ...] = ()
    sites_b: tuple[int, ...] = ()

    def __post_init__(self):
        if self.topology not in (ALL_SITES, END_SITES, EXPLICIT):
            raise ValueError(f"unknown topology {self.topology!r}")
        if self.convention not in (PAULI_DOT, SPIN_HALF_DOT):
            raise ValueError(f"unknown convention {self.convention!r}")
        if self.topology == EXPLICIT and not (self.sites_a and self.sites_b):
            raise ValueError("explicit topology requires sites_a and sites_b")

    def resolved_sites(self, n_sites: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        if self.topology == ALL_SITES:
            every = tuple(range(1, n_sites + 1))
            return every, every
        if self.topology == END_SITES:
            return (1,), (n_sites,)
        for s in self.sites_a + self.sites_b:
            if not 1 <= s <= n_sites:
                raise ValueError(f"site {s} outside 1..{n_sites}")
        return tuple(self.sites_a), tuple(self.sites_b)


def pauli_on_site(axis: str, site: int, total_sites: int) -> np.ndarray:
    """Embed a single-site Pauli matrix: I x ... x sigma^axis x ... x I.

    ``site`` is 1-based and site 1 is the most significant factor of the
    Kronecker product.
    """
    if axis not in _PAULI:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}")
    if not 1 <= site <= total_sites:
        raise ValueError(f"site {site} outside 1..{total_sites}")
    left = 2 ** (site - 1)
    right = 2 ** (total_sites - site)
    return np.kron(np.kron(np.eye(left), _PAULI[axis]), np.eye(right)).astype(complex)


def total_sz(total_sites: int) -> np.ndarray:
    """Sum of sigma^z over all sites (diagonal magnetization operator)."""
    out = np.zeros((2**total_sites, 2**total_sites), dtype=complex)
    for i in range(1, total_sites + 1):
        out += pauli_on_site("z", i, total_sites)
    return out


def _two_site(axis: str, i: int, j: int, n: int) -> np.ndarray:
    return pauli_on_site(axis, i, n) @ pauli_on_site(axis, j, n)


def build_chain_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """XXZ chain with field:  J * sum_bonds (xx + yy + Delta zz) + B * sum_i z_i."""
    n = spec.n_sites
    dim = 2**n
    h = np.zeros((dim, dim), dtype=complex)
    for (i, j) in spec.bonds():
        h += spec.j * (
            _two_site("x", i, j, n)
            + _two_site("y", i, j, n)
            + spec.delta * _two_site("z", i, j, n)
        )
    if spec.field != 0.0:
        h += spec.field * total_sz(n)
    return h


def build_interaction(chain: ChainSpec, coupling: CouplingSpec) -> np.ndarray:
    """Probe-chain interaction on the (chain, qubit a, qubit b) product space.

    Isotropic dot coupling: Jp * sum_{i in sites(q)} sum_alpha v^alpha_q v^alpha_i
    with v = sigma (pauli convention) or sigma/2 (spinhalf convention).
    """
    n = chain.n_sites
    total = n + 2
    if total > MAX_TOTAL_SPINS:
        raise ValueError(
            f"{total} total spins exceeds the dense-matrix limit of {MAX_TOTAL_SPINS}"
        )
    sites_a, sites_b = coupling.resolved_sites(n)
    if not sites_a or not sites_b:
        raise ValueError("each qubit needs at least one coupled site")
    scale = coupling.jp * (0.25 if coupling.convention == SPIN_HALF_DOT else 1.0)
    dim = 2**total
    h = np.zeros((dim, dim), dtype=complex)
    qubit_a, qubit_b = n + 1, n + 2
    for qubit, sites in ((qubit_a, sites_a), (qubit_b, sites_b)):
        for axis in "xyz":
            op_q = pauli_on_site(axis, qubit, total)
            for i in sites:
                h += scale * (op_q @ pauli_on_site(axis, i, total))
    return h


def build_full_hamiltonian(chain: ChainSpec, coupling: CouplingSpec) -> np.ndarray:
    """Chain Hamiltonian tensored with the qubit identity, plus the interaction."""
    h0 = build_chain_hamiltonian(chain)
    h_int = build_interaction(chain, coupling)
    return np.kron(h0, np.eye(4, dtype=complex)) + h_int


def hermiticity_defect(h: np.ndarray) -> float:
    """Largest entrywise deviation from H = H^dagger."""
    return float(np.max(np.abs(h - h.conj().T)))
