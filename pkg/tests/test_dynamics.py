"""Grid, wavefunction, potential evaluation, eigensolver, and propagation."""

import numpy as np
import pytest

from ferrogate import (
    BARIUM_TITANATE,
    CONSTANTS,
    DEFAULT_LASER,
    EdgeAmplitudeError,
    Grid1D,
    ParameterError,
    PotentialModel,
    PulseEnvelope,
    TransientTerm,
    Wavefunction,
    evaluate_potential,
    propagate,
    rectified_polarization_peak,
    stationary_states,
)

HBAR = CONSTANTS.hbar
M_E = CONSTANTS.m_e
MEV = 1e-3 * CONSTANTS.e_charge


def _double_well(depth_mev=80.0, center=8e-9, width=3e-9, barrier_mev=0.0):
    return PotentialModel(
        well_depth=depth_mev * MEV,
        well_center=center,
        well_width=width,
        barrier_height=barrier_mev * MEV,
        barrier_width=4e-9,
        lever_arm=0.0,
        transients=(),
    )


def test_grid_fields_and_validation():
    g = Grid1D(-1e-8, 1e-8, 101)
    assert g.dx == pytest.approx(2e-8 / 100)
    assert g.x.shape == (101,)
    assert g.x[0] == -1e-8 and g.x[-1] == 1e-8
    with pytest.raises(ParameterError):
        Grid1D(1e-8, -1e-8, 101)
    with pytest.raises(ParameterError):
        Grid1D(-1e-8, 1e-8, 8)


def test_wavefunction_normalization_enforced():
    g = Grid1D(-1e-8, 1e-8, 64)
    vals = np.ones(64, dtype=complex)
    with pytest.raises(ParameterError):
        Wavefunction(grid=g, values=vals)
    psi = Wavefunction.gaussian_packet(g, 0.0, 2e-9)
    assert psi.norm() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ParameterError):
        Wavefunction(grid=g, values=np.ones(32, dtype=complex))


def test_gaussian_packet_moments():
    g = Grid1D(-2e-8, 2e-8, 512)
    psi = Wavefunction.gaussian_packet(g, 3e-9, 1.5e-9)
    assert psi.mean_position() == pytest.approx(3e-9, abs=1e-12)
    assert psi.position_spread() == pytest.approx(1.5e-9, rel=1e-6)


def test_static_potential_shape():
    model = _double_well(depth_mev=100.0, center=1e-8, width=3e-9, barrier_mev=20.0)
    x = np.linspace(-4e-8, 4e-8, 801)
    v = model.static_potential(x)
    # wells at +-x0, barrier bump at 0, vanishes far away
    i0 = np.argmin(np.abs(x - 1e-8))
    assert v[i0] == pytest.approx(-100.0 * MEV, rel=0.05)
    assert v[400] > 0.0
    assert abs(v[0]) < 1e-3 * MEV
    np.testing.assert_allclose(v, v[::-1], atol=1e-30)


def test_evaluate_potential_static_before_pulses():
    env = PulseEnvelope(t0=0.0, tau=1e-13)
    term = TransientTerm(envelope=env, center=0.0, width=1e-8, polarity=1, scale=1.0)
    model = _double_well()
    driven = PotentialModel(
        well_depth=model.well_depth,
        well_center=model.well_center,
        well_width=model.well_width,
        barrier_height=model.barrier_height,
        barrier_width=model.barrier_width,
        lever_arm=5e-17,
        transients=(term,),
    )
    x = np.linspace(-3e-8, 3e-8, 201)
    early = evaluate_potential(driven, BARIUM_TITANATE, DEFAULT_LASER, x, -1e-11)
    np.testing.assert_allclose(early, model.static_potential(x), atol=1e-40)


def test_evaluate_potential_peak_depression():
    """polarity +1 lowers the potential at the pulse center by alpha * P_max."""
    env = PulseEnvelope(t0=0.0, tau=1e-13)
    term = TransientTerm(envelope=env, center=2e-9, width=1e-8, polarity=1, scale=1.0)
    alpha = 5e-17
    model = PotentialModel(
        well_depth=0.0, well_center=1e-8, well_width=3e-9,
        barrier_height=0.0, barrier_width=4e-9,
        lever_arm=alpha, transients=(term,),
    )
    p_max = rectified_polarization_peak(BARIUM_TITANATE, DEFAULT_LASER)
    v = evaluate_potential(model, BARIUM_TITANATE, DEFAULT_LASER, np.array([2e-9]), 0.0)
    assert v[0] == pytest.approx(-alpha * p_max, rel=1e-12)
    flipped = TransientTerm(envelope=env, center=2e-9, width=1e-8, polarity=-1, scale=1.0)
    model2 = PotentialModel(
        well_depth=0.0, well_center=1e-8, well_width=3e-9,
        barrier_height=0.0, barrier_width=4e-9,
        lever_arm=alpha, transients=(flipped,),
    )
    v2 = evaluate_potential(model2, BARIUM_TITANATE, DEFAULT_LASER, np.array([2e-9]), 0.0)
    assert v2[0] == pytest.approx(alpha * p_max, rel=1e-12)


def test_evaluate_potential_symmetric_transients_even():
    env = PulseEnvelope(t0=0.0, tau=1e-13)
    terms = (
        TransientTerm(envelope=env, center=-6e-9, width=8e-9, polarity=1, scale=1.0),
        TransientTerm(envelope=env, center=6e-9, width=8e-9, polarity=1, scale=1.0),
    )
    model = PotentialModel(
        well_depth=50.0 * MEV, well_center=1e-8, well_width=3e-9,
        barrier_height=10.0 * MEV, barrier_width=4e-9,
        lever_arm=5e-17, transients=terms,
    )
    x = np.linspace(-4e-8, 4e-8, 401)
    v = evaluate_potential(model, BARIUM_TITANATE, DEFAULT_LASER, x, 0.0)
    np.testing.assert_allclose(v, v[::-1], rtol=1e-12)
    assert np.all(np.isfinite(v))


def test_box_spectrum():
    """Empty potential between hard walls: E_n = n^2 pi^2 hbar^2 / (2 m L^2)."""
    L = 2e-8
    g = Grid1D(0.0, L, 512)
    states = stationary_states(np.zeros(512), g, M_E, 3)
    for n, (energy, psi) in enumerate(states, start=1):
        exact = n**2 * np.pi**2 * HBAR**2 / (2.0 * M_E * L**2)
        assert energy == pytest.approx(exact, rel=0.01)
        assert psi.norm() == pytest.approx(1.0, abs=1e-10)


def test_harmonic_spectrum():
    omega = 1e14
    ell = np.sqrt(HBAR / (M_E * omega))
    g = Grid1D(-12.0 * ell, 12.0 * ell, 1024)
    v = 0.5 * M_E * omega**2 * g.x**2
    states = stationary_states(v, g, M_E, 4)
    for n, (energy, _) in enumerate(states):
        assert energy == pytest.approx(HBAR * omega * (n + 0.5), rel=0.005)


def test_eigenstates_orthonormal_and_sign_convention():
    omega = 1e14
    ell = np.sqrt(HBAR / (M_E * omega))
    g = Grid1D(-12.0 * ell, 12.0 * ell, 512)
    v = 0.5 * M_E * omega**2 * g.x**2
    states = stationary_states(v, g, M_E, 5)
    for i, (_, a) in enumerate(states):
        assert np.max(np.abs(a.values.imag)) == 0.0
        lobe = a.values.real[np.argmax(np.abs(a.values.real) > 1e-3 * np.abs(a.values.real).max())]
        assert lobe > 0.0
        for j, (_, b) in enumerate(states):
            want = 1.0 if i == j else 0.0
            assert abs(a.overlap(b)) == pytest.approx(want, abs=1e-8)


def test_double_well_parity():
    model = _double_well(depth_mev=100.0, center=8e-9, width=3e-9, barrier_mev=10.0)
    g = Grid1D(-4e-8, 4e-8, 513)
    mass = 0.19 * M_E
    states = stationary_states(model, g, mass, 4)
    for idx, (_, psi) in enumerate(states):
        reflected = psi.values[::-1]
        sym = np.sum(np.conj(reflected) * psi.values).real * g.dx
        want = 1.0 if idx % 2 == 0 else -1.0
        assert sym == pytest.approx(want, abs=1e-8)
    # tunnel splitting is positive and small against the level spacing
    e0, e1, e2 = states[0][0], states[1][0], states[2][0]
    assert 0.0 < e1 - e0 < 0.1 * (e2 - e1)


def test_stationary_states_k_limit():
    g = Grid1D(-1e-8, 1e-8, 64)
    with pytest.raises(ParameterError):
        stationary_states(np.zeros(64), g, M_E, 16)


def test_eigenstate_phase_evolution():
    """Propagated eigenstate only acquires the phase e^{-i E T / hbar}."""
    omega = 1e14
    ell = np.sqrt(HBAR / (M_E * omega))
    g = Grid1D(-12.0 * ell, 12.0 * ell, 512)
    v = 0.5 * M_E * omega**2 * g.x**2
    energy, psi0 = stationary_states(v, g, M_E, 1)[0]
    T = 1e-13
    traj = propagate(psi0, v, M_E, 0.0, T, 1e-16)
    expected = psi0.values * np.exp(-1j * energy * T / HBAR)
    overlap = np.sum(np.conj(expected) * traj.final.values) * g.dx
    assert 1.0 - overlap.real < 1e-6
    assert abs(overlap.imag) < 1e-3


def test_free_gaussian_spreading():
    sigma0 = 5e-10
    g = Grid1D(-8e-9, 8e-9, 768)
    psi = Wavefunction.gaussian_packet(g, 0.0, sigma0)
    t_final = np.sqrt(3.0) * 2.0 * M_E * sigma0**2 / HBAR  # doubles the width
    traj = propagate(psi, np.zeros(768), M_E, 0.0, t_final, t_final / 800.0)
    want = sigma0 * np.sqrt(1.0 + (HBAR * t_final / (2.0 * M_E * sigma0**2)) ** 2)
    assert traj.final.position_spread() == pytest.approx(want, rel=0.01)
    assert want == pytest.approx(2.0 * sigma0, rel=1e-12)


def test_norm_and_energy_drift_over_1e4_steps():
    omega = 1e14
    ell = np.sqrt(HBAR / (M_E * omega))
    g = Grid1D(-10.0 * ell, 10.0 * ell, 256)
    v = 0.5 * M_E * omega**2 * g.x**2
    rng = np.random.default_rng(5)
    mix = np.exp(-((g.x - 0.7 * ell) ** 2) / (2.0 * (1.3 * ell) ** 2)) * (
        1.0 + 0.1 * rng.normal(size=256)
    )
    mix[0] = mix[-1] = 0.0
    mix = mix / np.sqrt(np.sum(np.abs(mix) ** 2) * g.dx)
    psi = Wavefunction(grid=g, values=mix.astype(complex))

    def energy_of(w):
        lap = np.zeros_like(w.values)
        lap[1:-1] = (w.values[2:] - 2.0 * w.values[1:-1] + w.values[:-2]) / g.dx**2
        h_psi = -(HBAR**2) / (2.0 * M_E) * lap + v * w.values
        return float(np.sum(np.conj(w.values) * h_psi).real * g.dx)

    e_start = energy_of(psi)
    traj = propagate(psi, v, M_E, 0.0, 1e4 * 1e-17, 1e-17)
    assert abs(traj.final.norm() - 1.0) <= 1e-10
    assert abs(energy_of(traj.final) - e_start) <= 1e-8 * abs(e_start)


def test_grid_refinement_second_order():
    """Tunnel splitting converges at second order: successive changes shrink 4x."""
    model = _double_well(depth_mev=80.0, center=8e-9, width=3e-9, barrier_mev=5.0)
    mass = 0.19 * M_E
    splittings = []
    for n in (129, 257, 513, 1025):
        g = Grid1D(-4e-8, 4e-8, n)
        states = stationary_states(model, g, mass, 2)
        splittings.append(states[1][0] - states[0][0])
    d1 = splittings[1] - splittings[0]
    d2 = splittings[2] - splittings[1]
    d3 = splittings[3] - splittings[2]
    assert d1 / d2 == pytest.approx(4.0, rel=0.2)
    assert d2 / d3 == pytest.approx(4.0, rel=0.2)


def test_propagation_dt_warning_for_fast_transient():
    env = PulseEnvelope(t0=0.0, tau=1e-14)
    term = TransientTerm(envelope=env, center=0.0, width=1e-8, polarity=1, scale=1.0)
    model = PotentialModel(
        well_depth=50.0 * MEV, well_center=8e-9, well_width=3e-9,
        barrier_height=0.0, barrier_width=4e-9,
        lever_arm=1e-18, transients=(term,),
    )
    g = Grid1D(-4e-8, 4e-8, 128)
    psi = Wavefunction.gaussian_packet(g, 8e-9, 3e-9)
    with pytest.warns(UserWarning, match="does not resolve"):
        traj = propagate(
            psi, model, 0.19 * M_E, -5e-14, 5e-14, 1e-15,
            mat=BARIUM_TITANATE, laser=DEFAULT_LASER,
        )
    assert any("does not resolve" in w for w in traj.warnings)
    quiet = propagate(
        psi, model, 0.19 * M_E, -5e-14, 5e-14, 1e-16,
        mat=BARIUM_TITANATE, laser=DEFAULT_LASER,
    )
    assert quiet.warnings == ()


def test_edge_amplitude_check_trips_on_escaping_packet():
    g = Grid1D(-2e-8, 2e-8, 256)
    k0 = 5e9  # fast packet aimed at the right wall
    psi = Wavefunction.gaussian_packet(g, 0.0, 2e-9, k0=k0)
    with pytest.raises(EdgeAmplitudeError):
        propagate(psi, np.zeros(256), M_E, 0.0, 5e-13, 1e-16, edge_tol=1e-8)
    # same run without the bound completes
    traj = propagate(psi, np.zeros(256), M_E, 0.0, 5e-13, 1e-15)
    assert traj.final.norm() == pytest.approx(1.0, abs=1e-10)


def test_snapshots_land_on_requested_times():
    g = Grid1D(-2e-8, 2e-8, 128)
    psi = Wavefunction.gaussian_packet(g, 0.0, 3e-9)
    req = [1e-14, 2.5e-14, 7e-14]
    traj = propagate(psi, np.zeros(128), M_E, 0.0, 7e-14, 1e-15, snapshot_times=req)
    np.testing.assert_allclose(traj.times, req, rtol=0.0, atol=1e-25)
    assert len(traj.states) == 3
    with pytest.raises(ParameterError):
        propagate(psi, np.zeros(128), M_E, 0.0, 7e-14, 1e-15, snapshot_times=[8e-14])
    with pytest.raises(ParameterError):
        propagate(psi, np.zeros(128), M_E, 0.0, 7e-14, 1e-15, snapshot_times=[3e-14, 1e-14])
