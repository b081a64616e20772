"""Physical constants, material and laser parameter types, and spin thermodynamics.

All computations in this package run in strict SI units.  Human-friendly
units (uC/cm^2, gauss, mW, fs, nm) appear only at the CLI boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Final

from .errors import DomainError, ParameterError


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants, CODATA 2018, frozen at build time."""

    c: float = 299792458.0              # speed of light, m/s
    mu0: float = 1.25663706212e-6       # vacuum permeability, H/m
    hbar: float = 1.054571817e-34       # reduced Planck constant, J*s
    e_charge: float = 1.602176634e-19   # elementary charge, C
    k_B: float = 1.380649e-23           # Boltzmann constant, J/K
    mu_B: float = 9.2740100783e-24      # Bohr magneton, J/T
    m_e: float = 9.1093837015e-31       # electron mass, kg

    def __post_init__(self):
        for name in ("c", "mu0", "hbar", "e_charge", "k_B", "mu_B", "m_e"):
            if not getattr(self, name) > 0.0:
                raise ParameterError(f"constant {name} must be strictly positive")


CONSTANTS: Final[PhysicalConstants] = PhysicalConstants()

# Vacuum permittivity follows from the frozen c and mu0.
EPSILON_0: Final[float] = 1.0 / (CONSTANTS.mu0 * CONSTANTS.c**2)


@dataclass(frozen=True)
class MaterialParams:
    """Electrooptic/ferroelectric film constants plus the channel effective mass.

    Attributes:
        r: electrooptic coefficient, m/V.
        n: refractive index (dimensionless).
        P_s: spontaneous polarization, C/m^2.
        effective_mass_ratio: channel electron effective mass over m_e.
        label: free-text name of the material system.
    """

    r: float
    n: float
    P_s: float
    effective_mass_ratio: float
    label: str = ""

    def __post_init__(self):
        if not self.r > 0.0:
            raise ParameterError("electrooptic coefficient r must be > 0")
        if not self.n >= 1.0:
            raise ParameterError("refractive index n must be >= 1")
        if self.P_s < 0.0:
            raise ParameterError("spontaneous polarization P_s must be >= 0")
        if not self.effective_mass_ratio > 0.0:
            raise ParameterError("effective_mass_ratio must be > 0")


# Film constants for a barium titanate layer over a silicon channel.
# 26 uC/cm^2 = 0.26 C/m^2; the mass ratio is the Si transverse valley value.
BARIUM_TITANATE: Final[MaterialParams] = MaterialParams(
    r=1.95e-11,
    n=2.45,
    P_s=0.26,
    effective_mass_ratio=0.19,
    label="BaTiO3 film / Si channel",
)


@dataclass(frozen=True)
class LaserParams:
    """Mode-locked laser drive parameters.

    Attributes:
        I_avg: average power, W.
        D: spot diameter, m.
        rep_rate: repetition rate, Hz.
        tau_opt: optical pulse width, s.
    """

    I_avg: float
    D: float
    rep_rate: float
    tau_opt: float

    def __post_init__(self):
        for name in ("I_avg", "D", "rep_rate", "tau_opt"):
            if not getattr(self, name) > 0.0:
                raise ParameterError(f"laser parameter {name} must be strictly positive")


# 10 mW average power focused to a 1 um spot, 76 MHz repetition, 100 fs pulses.
DEFAULT_LASER: Final[LaserParams] = LaserParams(
    I_avg=10e-3,
    D=1e-6,
    rep_rate=76e6,
    tau_opt=100e-15,
)


def peak_intensity(laser: LaserParams) -> float:
    """Peak intensity of one pulse, W/m^2.

    Convention: square spot of area D^2 and a rectangular temporal profile,
    so the pulse energy I_avg/rep_rate spreads uniformly over tau_opt * D^2.
    """
    return laser.I_avg / (laser.rep_rate * laser.tau_opt * laser.D**2)


def equilibrium_polarization(
    g: float, B: float, T: float, constants: PhysicalConstants = CONSTANTS
) -> float:
    """Thermal spin polarization tanh(g mu_B B / (2 k_B T)) of a two-level spin.

    Args:
        g: electron g-factor (dimensionless).
        B: magnetic field, T.
        T: temperature, K; must be > 0.

    Returns:
        Polarization fraction in [-1, 1].
    """
    if not T > 0.0:
        raise DomainError("temperature must be > 0")
    return math.tanh(g * constants.mu_B * B / (2.0 * constants.k_B * T))
