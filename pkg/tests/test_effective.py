import numpy as np
import pytest

from xxzqubits.operators import (
    ChainSpec,
    CouplingSpec,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    build_chain_hamiltonian,
    build_interaction,
)
from xxzqubits.spectra import eig_hermitian
from xxzqubits.effective import (
    axial_z_coefficient,
    effective_for,
    effective_hamiltonian,
    extract_g,
    g_comparison,
    reference_g_n2,
)

PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}
XXYY = np.kron(SIGMA_X, SIGMA_X) + np.kron(SIGMA_Y, SIGMA_Y)


def analytic_n2_second_order(delta, b, jp, sites_a, sites_b):
    """Independent oracle for the two-site chain: build each A_j from the
    analytic eigenstates {|11>, |00>, (|01>+|10>)/sqrt2, (|01>-|10>)/sqrt2}
    with analytic energies, then sum -A_j^dag A_j / (E_j - E_0)."""
    r = 1 / np.sqrt(2)
    states = {
        "pol_down": (np.array([0, 0, 0, 1.0]), delta - 2 * b),
        "pol_up": (np.array([1.0, 0, 0, 0]), delta + 2 * b),
        "triplet": (np.array([0, r, r, 0]), -delta + 2),
        "singlet": (np.array([0, r, -r, 0]), -delta - 2),
    }
    ground = "pol_down" if b - delta > 1 else "singlet"
    psi0, e0 = states[ground]
    site_ops = {  # chain-only operators, site 1 most significant
        (ax, 1): np.kron(PAULI[ax], np.eye(2)) for ax in "xyz"
    } | {(ax, 2): np.kron(np.eye(2), PAULI[ax]) for ax in "xyz"}
    heff = np.zeros((4, 4), dtype=complex)
    for name, (psi_j, e_j) in states.items():
        if name == ground:
            continue
        a_j = np.zeros((4, 4), dtype=complex)
        for ax in "xyz":
            qa = np.kron(PAULI[ax], np.eye(2))
            qb = np.kron(np.eye(2), PAULI[ax])
            for i in sites_a:
                a_j += jp * (psi_j.conj() @ site_ops[(ax, i)] @ psi0) * qa
            for i in sites_b:
                a_j += jp * (psi_j.conj() @ site_ops[(ax, i)] @ psi0) * qb
        heff -= (a_j.conj().T @ a_j) / (e_j - e0)
    return heff


def test_zero_coupling_gives_zero_operator():
    heff, excluded = effective_for(ChainSpec(2, field=2.0), CouplingSpec(jp=0.0))
    assert np.max(np.abs(heff)) == 0.0
    assert excluded == []


def test_end_sites_closed_form_polarized():
    delta, b, jp = 0.2, 1.5, 0.2
    x = b - delta
    heff, _ = effective_for(
        ChainSpec(2, delta=delta, field=b), CouplingSpec(jp=jp, topology="end")
    )
    off = 2 * jp**2 / (x**2 - 1)
    diag_center = -2 * jp**2 * x / (x**2 - 1)
    expected = np.zeros((4, 4))
    expected[0, 0] = 2 * diag_center
    expected[1, 1] = expected[2, 2] = diag_center
    expected[1, 2] = expected[2, 1] = off
    assert np.max(np.abs(heff - expected)) < 1e-12


def test_all_sites_closed_form_polarized():
    delta, b, jp = 0.2, 1.5, 0.2
    x = b - delta
    heff, _ = effective_for(
        ChainSpec(2, delta=delta, field=b), CouplingSpec(jp=jp, topology="all")
    )
    c = 4 * jp**2 / (x + 1)
    expected = np.zeros((4, 4))
    expected[0, 0] = -2 * c
    expected[1, 1] = expected[2, 2] = -c
    expected[1, 2] = expected[2, 1] = -c
    assert np.max(np.abs(heff - expected)) < 1e-12


@pytest.mark.parametrize("topology,sites", [("end", ((1,), (2,))), ("all", ((1, 2), (1, 2)))])
@pytest.mark.parametrize("b", [0.5, 1.5, 2.5])
def test_matches_analytic_state_sum(topology, sites, b):
    delta, jp = 0.25, 0.2
    heff, _ = effective_for(
        ChainSpec(2, delta=delta, field=b), CouplingSpec(jp=jp, topology=topology)
    )
    oracle = analytic_n2_second_order(delta, b, jp, *sites)
    assert np.max(np.abs(heff - oracle)) < 1e-12


def test_all_sites_vanishes_below_crossing():
    # the two-site singlet is annihilated by every total-spin operator
    heff, _ = effective_for(
        ChainSpec(2, delta=0.25, field=0.5), CouplingSpec(jp=0.2, topology="all")
    )
    assert np.max(np.abs(heff)) < 1e-14


def test_end_sites_couples_below_crossing():
    heff, _ = effective_for(
        ChainSpec(2, delta=0.25, field=0.5), CouplingSpec(jp=0.2, topology="end")
    )
    assert abs(heff[1, 2]) > 1e-3


def test_hermitian_block_structure_and_negativity():
    for b in (0.4, 1.8, 3.0):
        heff, _ = effective_for(
            ChainSpec(2, delta=0.25, field=b), CouplingSpec(jp=0.2, topology="end")
        )
        assert np.max(np.abs(heff - heff.conj().T)) <= 1e-12
        z = np.kron(SIGMA_Z, np.eye(2)) + np.kron(np.eye(2), SIGMA_Z)
        assert np.max(np.abs(heff @ z - z @ heff)) <= 1e-12
        assert np.linalg.eigvalsh(-heff).min() > -1e-12


def test_scale_covariance_in_probe_coupling():
    chain = ChainSpec(2, delta=0.25, field=2.0)
    h1, _ = effective_for(chain, CouplingSpec(jp=0.1, topology="end"))
    h3, _ = effective_for(chain, CouplingSpec(jp=0.3, topology="end"))
    assert np.max(np.abs(h3 - 9.0 * h1)) < 1e-13


def test_degenerate_ground_state_rejected():
    chain = ChainSpec(2, delta=0.25, field=1.25)
    spectrum = eig_hermitian(build_chain_hamiltonian(chain))
    h_int = build_interaction(chain, CouplingSpec())
    with pytest.raises(ValueError, match="not valid"):
        effective_hamiltonian(spectrum, h_int)


def test_interaction_shape_checked():
    spectrum = eig_hermitian(build_chain_hamiltonian(ChainSpec(2, field=2.0)))
    with pytest.raises(ValueError):
        effective_hamiltonian(spectrum, np.zeros((8, 8)))


def test_extract_g_exact_form():
    g = -0.075
    fit = extract_g(g * (np.eye(4) + XXYY))
    assert abs(fit.g_diag - g) < 1e-15
    assert abs(fit.g_offdiag - g) < 1e-15
    assert fit.residual < 1e-15


def test_extract_g_identity():
    fit = extract_g(np.eye(4))
    assert (fit.g_diag, fit.g_offdiag, fit.residual) == (1.0, 0.0, 0.0)


def test_extract_g_residual_is_axial_for_polarized_chain():
    heff, _ = effective_for(
        ChainSpec(2, delta=0.2, field=1.5), CouplingSpec(jp=0.2, topology="end")
    )
    fit = extract_g(heff)
    g_z = axial_z_coefficient(heff)
    z = np.kron(SIGMA_Z, np.eye(2)) + np.kron(np.eye(2), SIGMA_Z)
    leftover = heff - fit.g_diag * np.eye(4) - fit.g_offdiag * XXYY - g_z * z
    assert fit.residual > 1e-3  # the axial part is genuinely outside the fit span
    assert np.max(np.abs(leftover)) < 1e-12


def test_reference_value():
    assert abs(reference_g_n2(0.2, 1.5, 0.2) - (-0.07536231884057971)) < 1e-15


def test_axial_coefficient_matches_reference_for_end_sites():
    # closed-form identity: the (z_a + z_b) coefficient of the end-coupled
    # effective operator equals the published g for every B - Delta > 1
    rng = np.random.default_rng(5)
    for _ in range(10):
        delta = rng.uniform(0.05, 0.95)
        b = delta + rng.uniform(1.05, 2.5)
        heff, _ = effective_for(
            ChainSpec(2, delta=delta, field=b), CouplingSpec(jp=0.2, topology="end")
        )
        assert abs(axial_z_coefficient(heff) - reference_g_n2(delta, b, 0.2)) < 1e-12


def test_g_comparison_report_complete():
    rows = g_comparison(ChainSpec(2, delta=0.2, field=1.5), jp=0.2)
    assert len(rows) == 4
    combos = {(r.topology, r.convention) for r in rows}
    assert combos == {
        ("end", "pauli"),
        ("end", "spinhalf"),
        ("all", "pauli"),
        ("all", "spinhalf"),
    }
    for r in rows:
        assert r.x_preserving
        assert abs(r.reference - reference_g_n2(0.2, 1.5, 0.2)) < 1e-15
        assert r.residual >= 0.0
        assert r.residual_beyond_z < 1e-12
        assert np.isfinite(r.g_diag) and np.isfinite(r.g_offdiag)
