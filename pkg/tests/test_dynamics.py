import numpy as np
import pytest

from xxzqubits.operators import ChainSpec, CouplingSpec, SIGMA_X, SIGMA_Y
from xxzqubits.dynamics import (
    ConcurrenceTrace,
    XStateElements,
    concurrence_general,
    concurrence_trace,
    concurrence_xstate,
    density_from_state,
    evolve_many,
    evolve_state,
    full_vs_effective,
    partial_trace_chain,
    reduced_qubit_density,
    validate_two_qubit_density,
    xstate_from_density,
)

XXYY = np.kron(SIGMA_X, SIGMA_X) + np.kron(SIGMA_Y, SIGMA_Y)
BELL_0110 = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)


def haar_unitary(rng, n=2):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_density(rng, dim=4, rank=None):
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def brute_force_concurrence(rho):
    """Direct eigenvalue route on the non-Hermitian product rho rho~."""
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    lam = np.sqrt(np.clip(np.linalg.eigvals(rho @ yy @ rho.conj() @ yy).real, 0, None))
    lam = np.sort(lam)[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def test_evolve_identity_at_t0():
    psi = np.array([0.6, 0.8j, 0, 0])
    out = evolve_state(np.zeros((4, 4)), psi, 0.0)
    assert np.allclose(out, psi)


def test_evolve_diagonal_phases():
    h = np.diag([1.0, 2.0, -0.5, 0.0])
    psi = np.array([0, 1.0, 0, 0], dtype=complex)
    out = evolve_state(h, psi, 1.3)
    expected = np.zeros(4, dtype=complex)
    expected[1] = np.exp(-1j * 2.0 * 1.3)
    assert np.allclose(out, expected, atol=1e-12)


def test_evolve_requires_normalized_state():
    with pytest.raises(ValueError):
        evolve_state(np.zeros((2, 2)), np.array([1.0, 1.0]), 1.0)


def test_evolution_composition_and_unitarity():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = a + a.conj().T
    psi = rng.normal(size=6) + 1j * rng.normal(size=6)
    psi /= np.linalg.norm(psi)
    for _ in range(5):
        t1, t2 = rng.uniform(0, 50, size=2)
        once = evolve_state(h, psi, t1 + t2)
        twice = evolve_state(h, evolve_state(h, psi, t1), t2)
        assert np.max(np.abs(once - twice)) < 1e-9
        assert abs(np.linalg.norm(once) - 1.0) < 1e-9


def test_effective_form_amplitudes():
    # under g(I + xx + yy) from |01>:  <01|psi(t)> = e^{-igt} cos(2gt),
    # <10|psi(t)> = -i e^{-igt} sin(2gt)
    g = -0.07536231884057971
    h = g * (np.eye(4) + XXYY)
    psi0 = np.array([0, 1.0, 0, 0], dtype=complex)
    for t in (0.7, 3.1, 12.9):
        psi = evolve_state(h, psi0, t)
        assert abs(psi[1] - np.exp(-1j * g * t) * np.cos(2 * g * t)) < 1e-12
        assert abs(psi[2] - (-1j) * np.exp(-1j * g * t) * np.sin(2 * g * t)) < 1e-12


def test_density_examples():
    rho = density_from_state(np.array([0, 1.0, 0, 0]))
    expected = np.zeros((4, 4))
    expected[1, 1] = 1.0
    assert np.allclose(rho, expected)
    rho_bell = density_from_state(BELL_0110)
    assert np.allclose(rho_bell[1:3, 1:3], 0.5 * np.ones((2, 2)))
    rng = np.random.default_rng(1)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    rho = density_from_state(psi)
    assert abs(np.trace(rho @ rho).real - 1.0) < 1e-10


def brute_force_partial_trace(rho, n_sites):
    dim_chain = 2**n_sites
    out = np.zeros((4, 4), dtype=complex)
    for a in range(4):
        for b in range(4):
            for c in range(dim_chain):
                out[a, b] += rho[c * 4 + a, c * 4 + b]
    return out


def test_partial_trace_product_state():
    rng = np.random.default_rng(2)
    rho_chain = random_density(rng, dim=4)
    rho_ab = random_density(rng, dim=4)
    got = partial_trace_chain(np.kron(rho_chain, rho_ab), 2)
    assert np.max(np.abs(got - rho_ab)) < 1e-12


def test_partial_trace_maximally_mixed():
    n = 2
    dim = 2 ** (n + 2)
    got = partial_trace_chain(np.eye(dim) / dim, n)
    assert np.allclose(got, np.eye(4) / 4)


def test_partial_trace_ghz_diagonal():
    # (|0...0> + |1...1>)/sqrt2 across chain+qubits: reduced state is diagonal
    n = 2
    dim = 2 ** (n + 2)
    psi = np.zeros(dim, dtype=complex)
    psi[0] = psi[-1] = 1 / np.sqrt(2)
    got = partial_trace_chain(density_from_state(psi), n)
    assert np.max(np.abs(got - np.diag(np.diagonal(got)))) < 1e-14
    assert np.allclose(np.diagonal(got).real, [0.5, 0, 0, 0.5])


def test_partial_trace_matches_nested_loop_oracle():
    rng = np.random.default_rng(3)
    for n in (2, 3):
        rho = random_density(rng, dim=2 ** (n + 2))
        fast = partial_trace_chain(rho, n)
        slow = brute_force_partial_trace(rho, n)
        assert np.max(np.abs(fast - slow)) < 1e-12
        assert abs(np.trace(fast).real - 1.0) < 1e-12


def test_partial_trace_dimension_guard():
    with pytest.raises(ValueError):
        partial_trace_chain(np.eye(8) / 8, 2)


def test_reduced_pure_state_agrees_with_partial_trace():
    rng = np.random.default_rng(4)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi /= np.linalg.norm(psi)
    direct = reduced_qubit_density(psi, 2)
    via_full = partial_trace_chain(density_from_state(psi), 2)
    assert np.max(np.abs(direct - via_full)) < 1e-12


def test_concurrence_product_state():
    assert concurrence_general(np.diag([0, 1.0, 0, 0])) == 0.0


def test_concurrence_bell_state():
    assert abs(concurrence_general(density_from_state(BELL_0110)) - 1.0) < 1e-12


def test_concurrence_werner_closed_form():
    # p Bell + (1-p) I/4 has concurrence max(0, (3p-1)/2)
    for p in (0.2, 0.5, 0.9):
        rho = p * density_from_state(BELL_0110) + (1 - p) * np.eye(4) / 4
        expected = max(0.0, (3 * p - 1) / 2)
        assert abs(concurrence_general(rho) - expected) < 1e-10


def test_concurrence_matches_brute_force_on_random_states():
    # the direct eigvals(rho rho~) route itself carries sqrt-amplified noise
    # of order 1e-8 near zero eigenvalues, hence the looser comparison
    rng = np.random.default_rng(5)
    for _ in range(50):
        rho = random_density(rng, rank=rng.integers(1, 5))
        assert abs(concurrence_general(rho) - brute_force_concurrence(rho)) < 2e-8


def test_concurrence_local_unitary_invariance():
    rng = np.random.default_rng(6)
    rho = random_density(rng, rank=2)
    base = concurrence_general(rho)
    for _ in range(100):
        u = np.kron(haar_unitary(rng), haar_unitary(rng))
        rotated = u @ rho @ u.conj().T
        assert abs(concurrence_general(rotated, validate=False) - base) <= 1e-9


def test_concurrence_range_and_validation():
    rng = np.random.default_rng(7)
    for _ in range(50):
        c = concurrence_general(random_density(rng))
        assert -1e-12 <= c <= 1 + 1e-9
    with pytest.raises(ValueError):
        concurrence_general(np.diag([0.5, 0.5, 0.5, -0.5]))
    with pytest.raises(ValueError):
        validate_two_qubit_density(np.eye(4))


def test_xstate_examples():
    assert concurrence_xstate(XStateElements(0, 0.5, 0.5, 0, 0.5)) == 1.0
    assert concurrence_xstate(XStateElements(0.25, 0.25, 0.25, 0.25, 0.0)) == 0.0
    g, t = -0.0754, 7.3
    y = 0.5j * np.sin(4 * g * t)
    x = XStateElements(0.0, 0.5 + 0.5 * np.cos(4 * g * t) / 1, 0.5 - 0.5 * np.cos(4 * g * t), 0.0, y)
    assert abs(concurrence_xstate(x) - abs(np.sin(4 * g * t))) < 1e-12


def test_xstate_invariants_enforced():
    with pytest.raises(ValueError):
        XStateElements(0.5, 0.5, 0.5, -0.5, 0.0)
    with pytest.raises(ValueError):
        XStateElements(0.25, 0.25, 0.25, 0.25, 0.4)


def test_xstate_agreement_with_general_on_random_xstates():
    rng = np.random.default_rng(8)
    for _ in range(100):
        pops = np.abs(rng.normal(size=4))
        pops /= pops.sum()
        u, w1, w2, v = pops
        y = rng.uniform(0, 1) * np.sqrt(w1 * w2) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        rho = np.diag([u, w1, w2, v]).astype(complex)
        rho[1, 2], rho[2, 1] = y, np.conj(y)
        x = xstate_from_density(rho)
        assert x is not None
        assert abs(concurrence_xstate(x) - concurrence_general(rho)) <= 1e-10


def test_xstate_detection_rejects_generic_density():
    rng = np.random.default_rng(9)
    rho = random_density(rng)
    assert xstate_from_density(rho) is None


def test_trace_no_dynamics():
    times = np.linspace(0, 10, 50)
    trace = concurrence_trace(np.zeros((4, 4)), np.array([0, 1.0, 0, 0]), times)
    assert np.max(trace.values) == 0.0
    trace_bell = concurrence_trace(np.zeros((4, 4)), BELL_0110, times)
    assert np.max(np.abs(trace_bell.values - 1.0)) < 1e-12


def test_trace_reproduces_sine_law():
    rng = np.random.default_rng(10)
    for _ in range(3):
        delta = rng.uniform(0.05, 0.95)
        b = delta + rng.uniform(1.05, 2.0)
        g = 0.04 * (delta - b) / ((b - delta + 1) * (b - delta - 1))
        h = g * (np.eye(4) + XXYY)
        period = np.pi / (4 * abs(g))
        times = np.linspace(0, 3 * period, 600)
        trace = concurrence_trace(h, np.array([0, 1.0, 0, 0]), times)
        assert np.max(np.abs(trace.values - np.abs(np.sin(4 * g * times)))) <= 1e-8


def test_trace_requires_ascending_times():
    with pytest.raises(ValueError):
        ConcurrenceTrace(np.array([0.0, 0.0]), np.array([0.0, 0.0]))


def test_full_vs_effective_decoupled():
    times = np.linspace(0, 20, 60)
    _, _, max_dev = full_vs_effective(
        ChainSpec(2, delta=0.25, field=2.0),
        CouplingSpec(jp=0.0),
        np.array([0, 1.0, 0, 0]),
        times,
    )
    assert max_dev <= 1e-12


def test_full_vs_effective_bell_storage_below_crossing():
    # small probe coupling, field below the crossing: exact dynamics keeps the
    # Bell pair within 0.1 of full concurrence
    times = np.linspace(0, 40, 160)
    trace_full, _, _ = full_vs_effective(
        ChainSpec(2, delta=0.25, field=0.8),
        CouplingSpec(jp=0.05, topology="all"),
        BELL_0110,
        times,
    )
    assert trace_full.values.min() > 0.9


def test_full_vs_effective_degenerate_rejected():
    with pytest.raises(ValueError):
        full_vs_effective(
            ChainSpec(2, delta=0.25, field=1.25),
            CouplingSpec(jp=0.1),
            BELL_0110,
            np.linspace(0, 5, 10),
        )


def test_evolve_many_matches_single_steps():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    times = np.array([0.0, 0.9, 2.7])
    batch = evolve_many(h, psi, times)
    for k, t in enumerate(times):
        assert np.max(np.abs(batch[k] - evolve_state(h, psi, t))) < 1e-12
