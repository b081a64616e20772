"""1-D quantum dynamics along the polarization-defined nanowire channel.

Spatial discretization is a uniform grid with hard-wall (Dirichlet)
boundaries: the wavefunction is pinned to zero at both endpoints and only
interior points carry degrees of freedom.  The Hamiltonian is the standard
three-point finite-difference form

    H psi_i = -hbar^2/(2 m dx^2) (psi_{i+1} - 2 psi_i + psi_{i-1}) + V_i psi_i

Time propagation uses the Cayley form of the implicit midpoint rule
(Crank-Nicolson),

    (1 + i dt H(t + dt/2) / 2 hbar) psi' = (1 - i dt H(t + dt/2) / 2 hbar) psi,

which is unconditionally stable, second-order accurate, and exactly unitary
up to the tridiagonal-solver roundoff, so the norm drifts at the 1e-15 per
step level rather than systematically.

Scenario potentials are a static double well (two negative gaussians plus a
positive gaussian barrier) with transient terms driven by the optically
rectified film polarization.  The lever arm alpha converts film polarization
(C/m^2) to a local channel potential shift (J); the transient at pulse peak
is -alpha * polarity * scale * P_max, gaussian in x around the pulse spot.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, EdgeAmplitudeError, ParameterError
from .optics import PulseEnvelope, rectified_polarization_peak
from .physics import CONSTANTS, LaserParams, MaterialParams, PhysicalConstants

NORM_TOLERANCE = 1e-10


@dataclass(frozen=True)
class Grid1D:
    """Uniform spatial grid on [x_min, x_max] with n_points samples."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ParameterError("grid requires x_max > x_min")
        if self.n_points < 16:
            raise ParameterError("grid requires n_points >= 16")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)


class Wavefunction:
    """Complex amplitudes on a Grid1D, normalized so sum |psi|^2 dx = 1."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid1D, values, *, normalize: bool = False):
        values = np.asarray(values, dtype=complex)
        if values.shape != (grid.n_points,):
            raise ParameterError("wavefunction length must match grid.n_points")
        if not np.all(np.isfinite(values.real)) or not np.all(np.isfinite(values.imag)):
            raise ParameterError("wavefunction amplitudes must be finite")
        norm = float(np.sqrt(np.sum(np.abs(values) ** 2) * grid.dx))
        if normalize:
            if norm == 0.0:
                raise ParameterError("cannot normalize the zero wavefunction")
            values = values / norm
        elif abs(norm - 1.0) > NORM_TOLERANCE:
            raise ParameterError(
                f"wavefunction norm {norm!r} violates the unit-norm invariant; "
                "pass normalize=True to rescale"
            )
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    @classmethod
    def gaussian_packet(
        cls, grid: Grid1D, center: float, sigma: float, k0: float = 0.0
    ) -> "Wavefunction":
        """Normalized gaussian packet; sigma is the position std deviation."""
        if not sigma > 0.0:
            raise ParameterError("packet sigma must be > 0")
        x = grid.x
        psi = np.exp(-((x - center) ** 2) / (4.0 * sigma**2) + 1j * k0 * x)
        return cls(grid, psi, normalize=True)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.dx))

    def overlap(self, other: "Wavefunction") -> complex:
        """Grid inner product <self|other>."""
        return complex(np.vdot(self.values, other.values) * self.grid.dx)

    def probability_density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def mean_position(self) -> float:
        return float(np.sum(self.grid.x * self.probability_density()) * self.grid.dx)

    def position_spread(self) -> float:
        """Std deviation of the position distribution."""
        mean = self.mean_position()
        var = np.sum((self.grid.x - mean) ** 2 * self.probability_density()) * self.grid.dx
        return float(np.sqrt(var))


@dataclass(frozen=True)
class TransientTerm:
    """One optically driven potential transient: a time envelope at a spot.

    polarity +1 with a positive lever arm lowers the potential at the spot
    center while the pulse is on; polarity -1 raises it.
    """

    envelope: PulseEnvelope
    center: float        # spot center x_c, m
    width: float         # spatial gaussian sigma_x, m
    polarity: float = 1.0
    scale: float = 1.0   # relative amplitude multiplier, >= 0

    def __post_init__(self):
        if not self.width > 0.0:
            raise ParameterError("transient spatial width must be > 0")
        if self.polarity not in (1.0, -1.0):
            raise ParameterError("transient polarity must be +1 or -1")
        if self.scale < 0.0:
            raise ParameterError("transient scale must be >= 0")


@dataclass(frozen=True)
class PotentialModel:
    """Static double well plus barrier, with optional transient terms.

    V_static(x) = -well_depth * [g(x - x0) + g(x + x0)] + barrier_height * b(x)
    where g and b are unit-peak gaussians of widths well_width and
    barrier_width, and x0 = well_center.
    """

    well_depth: float       # J, depth of each (negative) well
    well_center: float      # m, wells sit at +/- well_center
    well_width: float       # m, gaussian sigma of each well
    barrier_height: float   # J, positive barrier between the wells
    barrier_width: float    # m, gaussian sigma of the barrier
    lever_arm: float        # J per C/m^2, film polarization -> channel shift
    transients: tuple[TransientTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.well_width > 0.0 or not self.barrier_width > 0.0:
            raise ParameterError("potential widths must be > 0")
        object.__setattr__(self, "transients", tuple(self.transients))

    def static_potential(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        wells = np.exp(-((x - self.well_center) ** 2) / (2.0 * self.well_width**2))
        wells += np.exp(-((x + self.well_center) ** 2) / (2.0 * self.well_width**2))
        barrier = np.exp(-(x**2) / (2.0 * self.barrier_width**2))
        return -self.well_depth * wells + self.barrier_height * barrier


def evaluate_potential(
    model: PotentialModel,
    mat: MaterialParams | None,
    laser: LaserParams | None,
    x,
    t: float,
    constants: PhysicalConstants = CONSTANTS,
) -> np.ndarray:
    """Channel potential V(x, t) in J.

    mat and laser set the rectified polarization driving the transient terms
    and may be None when the model has no transients.
    """
    x = np.asarray(x, dtype=float)
    v = model.static_potential(x)
    if model.transients:
        if mat is None or laser is None:
            raise ParameterError("transient terms require material and laser parameters")
        p_max = rectified_polarization_peak(mat, laser, constants)
        for term in model.transients:
            amp = -model.lever_arm * term.polarity * term.scale * p_max
            shape = np.exp(-((x - term.center) ** 2) / (2.0 * term.width**2))
            v = v + amp * term.envelope(t) * shape
    return v


def _potential_samples(potential, grid, mat, laser, t, constants) -> np.ndarray:
    if isinstance(potential, PotentialModel):
        if t is None:
            return potential.static_potential(grid.x)
        return evaluate_potential(potential, mat, laser, grid.x, t, constants)
    v = np.asarray(potential, dtype=float)
    if v.shape != (grid.n_points,):
        raise ParameterError("potential samples must match grid.n_points")
    return v


def stationary_states(
    potential,
    grid: Grid1D,
    mass: float,
    k: int,
    *,
    mat: MaterialParams | None = None,
    laser: LaserParams | None = None,
    t: float | None = None,
    constants: PhysicalConstants = CONSTANTS,
) -> list[tuple[float, Wavefunction]]:
    """k lowest eigenpairs of the finite-difference Hamiltonian.

    potential is either an array of V samples on the grid or a
    PotentialModel evaluated at time t (static part only if t is None).
    Energies ascend; eigenfunctions are orthonormal under the grid inner
    product, real, and sign-fixed so the leading lobe is positive.
    """
    if not k >= 1:
        raise ParameterError("k must be >= 1")
    if not k < grid.n_points / 4:
        raise ParameterError("k must be < n_points / 4")
    v = _potential_samples(potential, grid, mat, laser, t, constants)
    dx = grid.dx
    t_kin = constants.hbar**2 / (2.0 * mass * dx**2)
    diag = v[1:-1] + 2.0 * t_kin
    offdiag = np.full(grid.n_points - 3, -t_kin)
    try:
        energies, vectors = scipy.linalg.eigh_tridiagonal(
            diag, offdiag, select="i", select_range=(0, k - 1)
        )
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise ConvergenceError(
            f"tridiagonal eigensolver failed for n_points={grid.n_points}, k={k}: {exc}"
        ) from exc
    out = []
    for idx in range(k):
        full = np.zeros(grid.n_points)
        full[1:-1] = vectors[:, idx]
        lead = np.flatnonzero(np.abs(full) > 1e-8 * np.max(np.abs(full)))[0]
        if full[lead] < 0.0:
            full = -full
        out.append((float(energies[idx]), Wavefunction(grid, full, normalize=True)))
    return out


def expectation_energy(
    psi: Wavefunction, potential_samples, mass: float, constants: PhysicalConstants = CONSTANTS
) -> float:
    """<psi|H|psi> for the finite-difference Hamiltonian with Dirichlet walls, J."""
    v = np.asarray(potential_samples, dtype=float)
    dx = psi.grid.dx
    u = psi.values
    lap = np.zeros_like(u)
    lap[1:-1] = u[2:] - 2.0 * u[1:-1] + u[:-2]
    lap[0] = u[1] - 2.0 * u[0]
    lap[-1] = u[-2] - 2.0 * u[-1]
    h_u = -constants.hbar**2 / (2.0 * mass * dx**2) * lap + v * u
    return float(np.real(np.vdot(u, h_u)) * dx)


@dataclass(frozen=True)
class Trajectory:
    """Snapshots of a propagated wavefunction at requested times."""

    times: tuple[float, ...]
    states: tuple[Wavefunction, ...]
    warnings: tuple[str, ...] = ()

    @property
    def final(self) -> Wavefunction:
        return self.states[-1]


def _cn_step(psi_int, v_int, beta, dt, dx, hbar):
    """One Cayley step on interior amplitudes for potential v_int at midstep."""
    diag = v_int - 2.0 * beta
    r = 1j * dt / (2.0 * hbar)
    # rhs = (1 - r H) psi
    rhs = (1.0 - r * diag) * psi_int
    rhs[:-1] -= r * beta * psi_int[1:]
    rhs[1:] -= r * beta * psi_int[:-1]
    n = psi_int.size
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = r * beta
    ab[1, :] = 1.0 + r * diag
    ab[2, :-1] = r * beta
    return scipy.linalg.solve_banded((1, 1), ab, rhs)


def propagate(
    psi: Wavefunction,
    potential,
    mass: float,
    t_start: float,
    t_end: float,
    dt: float,
    *,
    mat: MaterialParams | None = None,
    laser: LaserParams | None = None,
    snapshot_times=None,
    edge_tol: float | None = None,
    constants: PhysicalConstants = CONSTANTS,
) -> Trajectory:
    """Propagate psi from t_start to t_end, returning requested snapshots.

    potential is a static sample array or a PotentialModel (time-dependent
    through its transient terms; mat/laser required in that case).  dt is a
    target step; each inter-snapshot segment uses the nearest integer step
    count, so snapshots land exactly on the requested times.

    edge_tol, when set, bounds the dimensionless edge-cell amplitude
    |psi| sqrt(dx) at the outermost interior points at every step (so the
    probability in an edge cell stays below edge_tol^2); exceeding it raises
    EdgeAmplitudeError.  Scenario runs use 1e-8.
    """
    if not dt > 0.0:
        raise ParameterError("dt must be > 0")
    if not t_end >= t_start:
        raise ParameterError("t_end must be >= t_start")
    grid = psi.grid
    dx = grid.dx
    x = grid.x

    run_warnings: list[str] = []
    time_dependent = isinstance(potential, PotentialModel) and potential.transients
    if time_dependent:
        tau_min = min(term.envelope.tau for term in potential.transients)
        if dt > tau_min / 50.0:
            msg = (
                f"dt={dt:.3e} s does not resolve the fastest transient "
                f"(tau={tau_min:.3e} s); expect degraded accuracy"
            )
            warnings.warn(msg)
            run_warnings.append(msg)
        if mat is None or laser is None:
            raise ParameterError("transient terms require material and laser parameters")
        v_static = potential.static_potential(x)
        p_max = rectified_polarization_peak(mat, laser, constants)
        spatial_parts = [
            (
                -potential.lever_arm * term.polarity * term.scale * p_max
                * np.exp(-((x - term.center) ** 2) / (2.0 * term.width**2)),
                term.envelope,
            )
            for term in potential.transients
        ]

        def v_at(t):
            v = v_static.copy()
            for shape, env in spatial_parts:
                v += shape * env(t)
            return v

    else:
        v_fixed = _potential_samples(potential, grid, mat, laser, None, constants)

        def v_at(t):
            return v_fixed

    if snapshot_times is None:
        snapshot_times = [t_end]
    snaps = [float(ts) for ts in snapshot_times]
    if snaps != sorted(snaps):
        raise ParameterError("snapshot times must be ascending")
    if snaps and (snaps[0] < t_start - 1e-18 or snaps[-1] > t_end + 1e-18):
        raise ParameterError("snapshot times must lie within [t_start, t_end]")

    beta = -constants.hbar**2 / (2.0 * mass * dx**2)
    cur = psi.values.copy()
    cur_t = t_start

    sqrt_dx = np.sqrt(dx)

    def check_edges(values, t_now):
        if edge_tol is None:
            return
        edge = max(abs(values[1]), abs(values[-2])) * sqrt_dx
        if edge > edge_tol:
            raise EdgeAmplitudeError(
                f"edge-cell amplitude {edge:.3e} exceeds {edge_tol:.3e} at "
                f"t={t_now:.3e} s; enlarge the grid domain"
            )

    check_edges(cur, cur_t)
    out_states: list[Wavefunction] = []
    out_times: list[float] = []
    for target in snaps:
        span = target - cur_t
        if span > 0.0:
            n_steps = max(1, round(span / dt))
            h = span / n_steps
            interior = cur[1:-1]
            for step in range(n_steps):
                t_mid = cur_t + (step + 0.5) * h
                interior = _cn_step(interior, v_at(t_mid)[1:-1], beta, h, dx, constants.hbar)
                if edge_tol is not None:
                    edge = max(abs(interior[0]), abs(interior[-1])) * sqrt_dx
                    if edge > edge_tol:
                        raise EdgeAmplitudeError(
                            f"edge-cell amplitude {edge:.3e} exceeds {edge_tol:.3e} "
                            f"at t={cur_t + (step + 1) * h:.3e} s; enlarge the grid domain"
                        )
            cur = np.zeros_like(cur)
            cur[1:-1] = interior
            cur_t = target
        out_times.append(cur_t)
        out_states.append(Wavefunction(grid, cur.copy()))
    return Trajectory(times=tuple(out_times), states=tuple(out_states), warnings=tuple(run_warnings))
