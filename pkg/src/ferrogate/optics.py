"""Nonlinear-optics field model.

Difference-frequency generation, the optically rectified polarization
transient of the ferroelectric film, sheet-density conversion, and the
magnetic field of the displacement current.

Two magnetic-field estimators are exposed on purpose.  ``displacement_bmax``
computes mu0 * R * P_max / tau verbatim, the headline scaling estimate.
``displacement_b_profile`` applies Ampere's law to a uniform displacement
current in a cylinder of radius R, which carries an extra factor 1/2 at
rho = R.  The two differ by exactly that factor; neither is silently
"corrected" into the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError, ParameterError
from .physics import CONSTANTS, LaserParams, MaterialParams, PhysicalConstants, peak_intensity

_GAUSS_FWHM = 4.0 * np.log(2.0)


@dataclass(frozen=True)
class PulseEnvelope:
    """Normalized temporal intensity envelope, peak value 1.

    Attributes:
        t0: center time, s.
        tau: full width, s.  For the gaussian shape tau is the FWHM of the
            intensity envelope; for the rectangular shape it is the full
            duration of the flat top.
        shape: "rectangular" or "gaussian".
    """

    t0: float
    tau: float
    shape: Literal["rectangular", "gaussian"] = "gaussian"

    def __post_init__(self):
        if not self.tau > 0.0:
            raise ParameterError("envelope width tau must be > 0")
        if self.shape not in ("rectangular", "gaussian"):
            raise ParameterError(f"unknown envelope shape {self.shape!r}")

    def __call__(self, t):
        """Envelope value at time(s) t, dimensionless in [0, 1]."""
        t = np.asarray(t, dtype=float)
        if self.shape == "rectangular":
            out = np.where(np.abs(t - self.t0) <= 0.5 * self.tau, 1.0, 0.0)
        else:
            out = np.exp(-_GAUSS_FWHM * ((t - self.t0) / self.tau) ** 2)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class TransientPolarization:
    """Sampled film polarization transient P(t) on a uniform time grid."""

    times: np.ndarray   # s, uniformly spaced, increasing
    values: np.ndarray  # C/m^2

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.size < 2 or values.shape != times.shape:
            raise ParameterError("times and values must be matching 1-D arrays, length >= 2")
        steps = np.diff(times)
        if not np.all(steps > 0.0):
            raise ParameterError("time samples must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ParameterError("time samples must be uniform")
        if not np.all(np.isfinite(values)):
            raise ParameterError("polarization values must be finite")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def dfg_polarization(chi2: float, E1: complex, E2: complex) -> complex:
    """Difference-frequency polarization amplitude 2 * chi2 * E1 * conj(E2).

    chi2 carries units of polarization per squared field (C/m^2 per (V/m)^2),
    i.e. the vacuum permittivity is absorbed into chi2.
    """
    return 2.0 * chi2 * E1 * np.conj(E2)


def rectified_polarization_peak(
    mat: MaterialParams, laser: LaserParams, constants: PhysicalConstants = CONSTANTS
) -> float:
    """Peak rectified polarization (r n^3 / 2c) * I_peak, C/m^2."""
    return mat.r * mat.n**3 / (2.0 * constants.c) * peak_intensity(laser)


def rectified_polarization_profile(
    mat: MaterialParams,
    laser: LaserParams,
    env: PulseEnvelope,
    t_samples,
    constants: PhysicalConstants = CONSTANTS,
) -> TransientPolarization:
    """Rectified polarization transient P(t) = P_max * envelope(t).

    t_samples must be uniform; TransientPolarization enforces this.
    """
    t = np.asarray(t_samples, dtype=float)
    p_max = rectified_polarization_peak(mat, laser, constants)
    return TransientPolarization(times=t, values=p_max * env(t))


def sheet_density(P: float, constants: PhysicalConstants = CONSTANTS) -> float:
    """Areal density |P| / e of the electrons screening a bound polarization charge, m^-2."""
    return abs(P) / constants.e_charge


def displacement_bmax(
    R: float, P_max: float, tau_opt: float, constants: PhysicalConstants = CONSTANTS
) -> float:
    """Scaling estimate mu0 * R * P_max / tau_opt for the transient field, T.

    This is the bare estimator; see the module docstring for its relation to
    the Ampere-law profile.
    """
    if not R >= 0.0:
        raise DomainError("radius R must be >= 0")
    if not tau_opt > 0.0:
        raise DomainError("tau_opt must be > 0")
    return constants.mu0 * R * P_max / tau_opt


def displacement_b_profile(
    R: float,
    P_max: float,
    env: PulseEnvelope,
    rho: float,
    t_samples,
    constants: PhysicalConstants = CONSTANTS,
) -> np.ndarray:
    """Azimuthal magnetic field B(rho, t) of the displacement current, T.

    The film polarization P(t) = P_max * envelope(t) inside radius R gives a
    uniform displacement current density J_d(t) = dP/dt, differentiated here
    by second-order central differences on the sample grid.  Ampere's law
    then gives B = mu0 J_d rho / 2 inside and mu0 J_d R^2 / (2 rho) outside.
    """
    if rho < 0.0:
        raise DomainError("radial coordinate rho must be >= 0")
    if not R > 0.0:
        raise DomainError("radius R must be > 0")
    t = np.asarray(t_samples, dtype=float)
    profile = TransientPolarization(times=t, values=P_max * env(t))
    j_d = np.gradient(profile.values, profile.dt, edge_order=2)
    if rho <= R:
        return constants.mu0 * j_d * rho / 2.0
    return constants.mu0 * j_d * R**2 / (2.0 * rho)
