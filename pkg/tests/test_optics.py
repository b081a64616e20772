"""Rectified-polarization transient and displacement-current field estimators."""

import numpy as np
import pytest

from ferrogate import (
    BARIUM_TITANATE,
    CONSTANTS,
    DEFAULT_LASER,
    DomainError,
    ParameterError,
    PulseEnvelope,
    TransientPolarization,
    dfg_polarization,
    displacement_b_profile,
    displacement_bmax,
    peak_intensity,
    rectified_polarization_peak,
    rectified_polarization_profile,
    sheet_density,
)


def test_gaussian_envelope_peak_and_fwhm():
    env = PulseEnvelope(t0=2e-13, tau=1e-13, shape="gaussian")
    assert env(2e-13) == pytest.approx(1.0, abs=1e-15)
    # tau is the FWHM of the envelope
    assert env(2e-13 + 0.5e-13) == pytest.approx(0.5, rel=1e-12)
    assert env(2e-13 - 0.5e-13) == pytest.approx(0.5, rel=1e-12)


def test_rectangular_envelope_support():
    env = PulseEnvelope(t0=0.0, tau=2.0, shape="rectangular")
    t = np.array([-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5])
    np.testing.assert_array_equal(env(t), [0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0])


def test_envelope_scalar_in_scalar_out():
    env = PulseEnvelope(t0=0.0, tau=1.0)
    assert isinstance(env(0.3), float)
    assert isinstance(env(np.array([0.3])), np.ndarray)


def test_envelope_validation():
    with pytest.raises(ParameterError):
        PulseEnvelope(t0=0.0, tau=0.0)
    with pytest.raises(ParameterError):
        PulseEnvelope(t0=0.0, tau=1.0, shape="triangle")


def test_transient_polarization_validation():
    t = np.linspace(0.0, 1.0, 8)
    TransientPolarization(times=t, values=np.zeros(8))
    with pytest.raises(ParameterError):
        TransientPolarization(times=t[::-1], values=np.zeros(8))
    with pytest.raises(ParameterError):
        TransientPolarization(times=np.array([0.0, 0.1, 0.3]), values=np.zeros(3))
    bad = np.zeros(8)
    bad[3] = np.nan
    with pytest.raises(ParameterError):
        TransientPolarization(times=t, values=bad)
    assert TransientPolarization(times=t, values=np.ones(8)).dt == pytest.approx(1.0 / 7.0)


def test_dfg_polarization_conjugates_second_field():
    p = dfg_polarization(3.0e-22, 1.0 + 2.0j, 0.5 - 1.0j)
    assert p == pytest.approx(2.0 * 3.0e-22 * (1.0 + 2.0j) * (0.5 + 1.0j), rel=1e-14)


def test_dfg_polarization_common_phase_cancels():
    # P(omega1 - omega2) is insensitive to a phase shared by both fields
    rng = np.random.default_rng(3)
    for _ in range(20):
        e1 = rng.normal() + 1j * rng.normal()
        e2 = rng.normal() + 1j * rng.normal()
        phi = rng.uniform(0.0, 2.0 * np.pi)
        base = dfg_polarization(1e-22, e1, e2)
        shifted = dfg_polarization(1e-22, e1 * np.exp(1j * phi), e2 * np.exp(1j * phi))
        assert shifted == pytest.approx(base, rel=1e-12)


def test_rectified_peak_value():
    """P_max = (r n^3 / 2c) I_peak for the default film and laser."""
    p_max = rectified_polarization_peak(BARIUM_TITANATE, DEFAULT_LASER)
    i_peak = peak_intensity(DEFAULT_LASER)
    want = BARIUM_TITANATE.r * BARIUM_TITANATE.n**3 / (2.0 * CONSTANTS.c) * i_peak
    assert p_max == pytest.approx(want, rel=1e-12)
    # order of magnitude: a few 1e-4 C/m^2
    assert 5e-4 < p_max < 8e-4


def test_rectified_profile_is_peak_times_envelope():
    env = PulseEnvelope(t0=0.0, tau=1e-13)
    t = np.linspace(-4e-13, 4e-13, 101)
    prof = rectified_polarization_profile(BARIUM_TITANATE, DEFAULT_LASER, env, t)
    p_max = rectified_polarization_peak(BARIUM_TITANATE, DEFAULT_LASER)
    np.testing.assert_allclose(prof.values, p_max * env(t), rtol=1e-13)
    assert prof.values.max() == pytest.approx(p_max, rel=1e-12)


def test_sheet_density_is_polarization_over_charge():
    p_max = rectified_polarization_peak(BARIUM_TITANATE, DEFAULT_LASER)
    n_s = sheet_density(p_max)
    assert n_s == pytest.approx(p_max / CONSTANTS.e_charge, rel=1e-12)
    assert sheet_density(-p_max) == n_s
    # a few 1e15 m^-2 (1e11 cm^-2) for the defaults
    assert 1e15 < n_s < 1e16


def test_bmax_scaling_estimate():
    b = displacement_bmax(0.5e-6, 6e-4, 1e-13)
    assert b == pytest.approx(CONSTANTS.mu0 * 0.5e-6 * 6e-4 / 1e-13, rel=1e-12)
    # millitesla scale for film-scale parameters
    assert 1e-3 < b < 1e-2
    with pytest.raises(DomainError):
        displacement_bmax(-1e-6, 6e-4, 1e-13)
    with pytest.raises(DomainError):
        displacement_bmax(1e-6, 6e-4, 0.0)


def test_b_profile_half_of_bmax_at_edge():
    """Ampere's law at rho = R carries a factor 1/2 relative to the bare estimate.

    A rectangular pulse sampled at dt = tau/2 makes the central-difference
    derivative exactly P_max / tau, isolating the geometric factor.
    """
    tau, p_max, radius = 2e-13, 6e-4, 0.5e-6
    env = PulseEnvelope(t0=0.0, tau=tau, shape="rectangular")
    t = np.arange(-6, 7) * (tau / 2.0)
    b = displacement_b_profile(radius, p_max, env, radius, t)
    ratio = np.abs(b).max() / displacement_bmax(radius, p_max, tau)
    assert ratio == pytest.approx(0.5, abs=1e-6)


def test_b_profile_piecewise_in_radius():
    env = PulseEnvelope(t0=0.0, tau=1e-13)
    t = np.linspace(-4e-13, 4e-13, 401)
    radius = 1e-6
    inner = displacement_b_profile(radius, 6e-4, env, 0.25 * radius, t)
    edge = displacement_b_profile(radius, 6e-4, env, radius, t)
    outer = displacement_b_profile(radius, 6e-4, env, 4.0 * radius, t)
    # linear growth inside, 1/rho decay outside, continuous at the edge
    np.testing.assert_allclose(inner, 0.25 * edge, rtol=1e-12, atol=0.0)
    np.testing.assert_allclose(outer, 0.25 * edge, rtol=1e-12, atol=0.0)
    np.testing.assert_allclose(
        displacement_b_profile(radius, 6e-4, env, radius * (1.0 + 1e-12), t), edge, rtol=1e-9
    )


def test_b_profile_time_integral_vanishes():
    # the displacement current is a pure derivative, so its time integral
    # over a pulse that starts and ends at zero must cancel
    env = PulseEnvelope(t0=0.0, tau=1e-13)
    t = np.linspace(-8e-13, 8e-13, 1601)
    b = displacement_b_profile(1e-6, 6e-4, env, 1e-6, t)
    area = np.trapezoid(b, t)
    assert abs(area) < 1e-12 * np.abs(b).max() * (t[-1] - t[0])


def test_b_profile_rejects_bad_geometry():
    env = PulseEnvelope(t0=0.0, tau=1e-13)
    t = np.linspace(-1e-13, 1e-13, 16)
    with pytest.raises(DomainError):
        displacement_b_profile(1e-6, 6e-4, env, -0.1e-6, t)
    with pytest.raises(DomainError):
        displacement_b_profile(0.0, 6e-4, env, 0.0, t)
