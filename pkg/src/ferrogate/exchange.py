"""Two-electron exchange physics and the end-to-end swap scenario.

Sign convention: the exchange splitting is J = E_triplet - E_singlet, where
E_singlet is the lowest eigenvalue of the two-electron Hamiltonian restricted
to spatially symmetric wavefunctions and E_triplet the lowest over
antisymmetric ones.  With this convention the generic double-dot ground
state is the singlet and J > 0.  The literature is split on the sign; every
consumer in this package assumes this one.

The exact method diagonalizes H = h(1) + h(2) + u(x1 - x2) in the sector
bases built from the product grid: dimension m(m+1)/2 symmetric and
m(m-1)/2 antisymmetric for m interior points, so the grid budget is capped.

J(t) during a pulse sequence uses the adiabatic approximation: the
instantaneous potential is frozen at sampled times, J is computed exactly
at each sample, and a cubic spline interpolates between samples.  The
leakage diagnostic (propagated state vs instantaneous bound state) flags
runs where that approximation is untrustworthy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sparse
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .dynamics import (
    Grid1D,
    PotentialModel,
    Trajectory,
    TransientTerm,
    Wavefunction,
    evaluate_potential,
    propagate,
    stationary_states,
)
from .errors import BudgetError, ConvergenceError, ParameterError
from .optics import PulseEnvelope
from .physics import (
    BARIUM_TITANATE,
    CONSTANTS,
    DEFAULT_LASER,
    EPSILON_0,
    LaserParams,
    MaterialParams,
    PhysicalConstants,
)
from . import schedule as sched_mod

MAX_EXCHANGE_POINTS = 256
_DENSE_SECTOR_LIMIT = 1024


@dataclass(frozen=True)
class TwoElectronProblem:
    """Two electrons on a shared 1-D grid with a softened Coulomb repulsion.

    The pair interaction is
        u(d) = interaction_strength * e^2 / (4 pi eps0 sqrt(d^2 + a^2))
    with a = max(softening, 2 dx); interaction_strength folds in dielectric
    screening (1/eps_r) and is dimensionless.
    """

    grid: Grid1D
    potential: PotentialModel
    mass: float
    interaction_strength: float = 1.0
    softening: float = 0.0
    mat: MaterialParams | None = None
    laser: LaserParams | None = None

    def __post_init__(self):
        if not self.mass > 0.0:
            raise ParameterError("mass must be > 0")
        if self.interaction_strength < 0.0:
            raise ParameterError("interaction_strength must be >= 0 (repulsive)")
        if self.softening < 0.0:
            raise ParameterError("softening length must be >= 0")

    @property
    def effective_softening(self) -> float:
        """Softening length actually used: never below the 2 dx grid scale."""
        return max(self.softening, 2.0 * self.grid.dx)


def _sector_isometries(m: int) -> tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """Sparse isometries from the symmetric / antisymmetric sectors into the product basis."""
    iu, ju = np.triu_indices(m, k=0)
    n_sym = iu.size
    coef = np.where(iu == ju, 1.0, 1.0 / math.sqrt(2.0))
    rows = np.concatenate([iu * m + ju, ju * m + iu])
    cols = np.concatenate([np.arange(n_sym), np.arange(n_sym)])
    data = np.concatenate([coef, np.where(iu == ju, 0.0, coef)])
    s_sym = sparse.csr_matrix((data, (rows, cols)), shape=(m * m, n_sym))

    ia, ja = np.triu_indices(m, k=1)
    n_asym = ia.size
    rows = np.concatenate([ia * m + ja, ja * m + ia])
    cols = np.concatenate([np.arange(n_asym), np.arange(n_asym)])
    data = np.concatenate(
        [np.full(n_asym, 1.0 / math.sqrt(2.0)), np.full(n_asym, -1.0 / math.sqrt(2.0))]
    )
    s_asym = sparse.csr_matrix((data, (rows, cols)), shape=(m * m, n_asym))
    return s_sym, s_asym


def _lowest_eigenvalue(h_sector: sparse.csr_matrix) -> float:
    dim = h_sector.shape[0]
    if dim <= _DENSE_SECTOR_LIMIT:
        w = scipy.linalg.eigh(
            h_sector.toarray(), subset_by_index=[0, 0], eigvals_only=True
        )
        return float(w[0])
    v0 = np.full(dim, 1.0 / math.sqrt(dim))
    try:
        w = eigsh(h_sector, k=1, which="SA", v0=v0, tol=0, return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        raise ConvergenceError(
            f"sector eigensolver failed to converge (dim={dim}): {exc}"
        ) from exc
    return float(w[0])


def singlet_triplet_energies(
    prob: TwoElectronProblem, t: float | None = None, constants: PhysicalConstants = CONSTANTS
) -> tuple[float, float]:
    """Lowest symmetric-sector and antisymmetric-sector energies at time t, J.

    t = None evaluates the static potential only.
    """
    n = prob.grid.n_points
    if n > MAX_EXCHANGE_POINTS:
        raise BudgetError(
            f"two-electron grid has {n} points; the exact method is capped at "
            f"{MAX_EXCHANGE_POINTS} (the sector dimension grows as n^2/2) - use a coarser grid"
        )
    x = prob.grid.x
    if t is None:
        v = prob.potential.static_potential(x)
    else:
        v = evaluate_potential(prob.potential, prob.mat, prob.laser, x, t, constants)
    xi = x[1:-1]
    vi = v[1:-1]
    m = xi.size
    dx = prob.grid.dx
    t_kin = constants.hbar**2 / (2.0 * prob.mass * dx**2)
    h1 = sparse.diags(
        [np.full(m - 1, -t_kin), vi + 2.0 * t_kin, np.full(m - 1, -t_kin)],
        offsets=[-1, 0, 1],
        format="csr",
    )
    a_eff = prob.effective_softening
    x1, x2 = np.meshgrid(xi, xi, indexing="ij")
    u = prob.interaction_strength * constants.e_charge**2 / (
        4.0 * np.pi * EPSILON_0 * np.sqrt((x1 - x2) ** 2 + a_eff**2)
    )
    eye = sparse.identity(m, format="csr")
    h2 = sparse.kron(h1, eye, format="csr") + sparse.kron(eye, h1, format="csr")
    h2 = h2 + sparse.diags(u.ravel())
    s_sym, s_asym = _sector_isometries(m)
    e_singlet = _lowest_eigenvalue((s_sym.T @ h2 @ s_sym).tocsr())
    e_triplet = _lowest_eigenvalue((s_asym.T @ h2 @ s_asym).tocsr())
    return e_singlet, e_triplet


def exchange_splitting(
    prob: TwoElectronProblem, t: float | None = None, constants: PhysicalConstants = CONSTANTS
) -> float:
    """Exchange splitting J = E_triplet - E_singlet at time t, J."""
    e_singlet, e_triplet = singlet_triplet_energies(prob, t, constants)
    return e_triplet - e_singlet


@dataclass(frozen=True)
class ExchangeTrace:
    """J(t) on a uniform time grid and the accumulated exchange angle."""

    times: np.ndarray          # s, uniform
    j_values: np.ndarray       # J
    theta_running: np.ndarray  # rad

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        j_values = np.asarray(self.j_values, dtype=float)
        theta_running = np.asarray(self.theta_running, dtype=float)
        if times.ndim != 1 or j_values.shape != times.shape or theta_running.shape != times.shape:
            raise ParameterError("trace arrays must be matching 1-D arrays")
        if not np.all(np.isfinite(theta_running)):
            raise ParameterError("accumulated angle must be finite")
        for arr in (times, j_values, theta_running):
            arr.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "j_values", j_values)
        object.__setattr__(self, "theta_running", theta_running)

    @property
    def theta(self) -> float:
        return float(self.theta_running[-1])


def exchange_angle(
    times, j_values, constants: PhysicalConstants = CONSTANTS
) -> ExchangeTrace:
    """Accumulated exchange angle theta(t) = (1/hbar) integral J dt, composite trapezoid.

    Requires uniform time samples.
    """
    times = np.asarray(times, dtype=float)
    j_values = np.asarray(j_values, dtype=float)
    if times.ndim != 1 or times.size < 2 or j_values.shape != times.shape:
        raise ParameterError("need matching 1-D time and J arrays, length >= 2")
    steps = np.diff(times)
    if not np.all(steps > 0.0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise ParameterError("time samples must be uniform and increasing")
    theta_running = cumulative_trapezoid(j_values, times, initial=0.0) / constants.hbar
    return ExchangeTrace(times=times, j_values=j_values, theta_running=theta_running)


_SINGLET = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2.0)
_P_SINGLET = np.outer(_SINGLET, _SINGLET)
_P_TRIPLET = np.eye(4) - _P_SINGLET


def exchange_unitary(theta: float) -> np.ndarray:
    """exp(-i theta S1.S2) on two spins by spectral decomposition.

    S1.S2 has eigenvalue +1/4 on the triplet sector and -3/4 on the singlet,
    so U = exp(-i theta/4) P_T + exp(+3 i theta/4) P_S.  theta = pi gives
    exp(-i pi/4) * SWAP; theta = 2 pi gives -i times the identity.
    """
    return np.exp(-0.25j * theta) * _P_TRIPLET + np.exp(0.75j * theta) * _P_SINGLET


def gate_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """Phase-insensitive gate fidelity |Tr(u^dagger v)| / dim."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ParameterError("gate fidelity needs two square matrices of equal shape")
    return float(abs(np.trace(u.conj().T @ v)) / u.shape[0])


def adiabatic_leakage(
    trajectory: Trajectory,
    potential,
    mass: float,
    *,
    state_index: int = 0,
    mat: MaterialParams | None = None,
    laser: LaserParams | None = None,
    constants: PhysicalConstants = CONSTANTS,
) -> float:
    """Population outside the target instantaneous bound state at the end of a run.

    Returns 1 - sum_j |<phi_j | psi(t_final)>|^2 over the numerically
    degenerate multiplet containing eigenstate state_index of the potential
    frozen at the trajectory's final time.  For well-separated wells the
    low-lying levels are degenerate to machine precision and the individual
    eigenvectors returned by the solver are basis-arbitrary within the
    multiplet; the projector onto the multiplet span is the conditioned
    quantity, so population is summed over it.
    """
    final = trajectory.final
    k = min(state_index + 3, max(state_index + 1, final.grid.n_points // 4 - 1))
    states = stationary_states(
        potential,
        final.grid,
        mass,
        k,
        mat=mat,
        laser=laser,
        t=trajectory.times[-1],
        constants=constants,
    )
    e_target = states[state_index][0]
    t_kin = constants.hbar**2 / (2.0 * mass * final.grid.dx**2)
    tol = 1e-9 * (abs(e_target) + t_kin)
    population = sum(
        abs(phi.overlap(final)) ** 2
        for energy, phi in states
        if abs(energy - e_target) <= tol
    )
    return float(min(1.0, max(0.0, 1.0 - population)))


# --- pulse-driven scenario ---------------------------------------------------


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to run a pulse-driven exchange scenario.

    t_start / t_end are the schedule's reporting window (where snapshots are
    emitted).  Propagation must begin from a stationary state of the static
    potential, so runs integrate over padded_window(), which extends the
    reporting window far enough (3 tau beyond every pulse center) that all
    transients are negligible at both ends.
    """

    grid: Grid1D              # fine grid for propagation
    exchange_grid: Grid1D     # coarse grid for the exact two-electron solve
    model: PotentialModel
    mass: float
    interaction_strength: float
    softening: float
    mat: MaterialParams
    laser: LaserParams
    t_start: float
    t_end: float
    dt: float
    leak_threshold: float
    edge_tol: float = 1e-8

    def two_electron_problem(self) -> TwoElectronProblem:
        return TwoElectronProblem(
            grid=self.exchange_grid,
            potential=self.model,
            mass=self.mass,
            interaction_strength=self.interaction_strength,
            softening=self.softening,
            mat=self.mat,
            laser=self.laser,
        )

    def padded_window(self) -> tuple[float, float]:
        """Integration window: reporting window extended past all pulse tails."""
        t_pre, t_post = self.t_start, self.t_end
        for term in self.model.transients:
            if term.scale == 0.0:
                continue
            t_pre = min(t_pre, term.envelope.t0 - 3.0 * term.envelope.tau)
            t_post = max(t_post, term.envelope.t0 + 3.0 * term.envelope.tau)
        return t_pre, t_post


@dataclass(frozen=True)
class ScenarioReport:
    """Result of one scenario run; angles in rad, leakage/fidelity unitless."""

    theta: float
    leakage: float
    swap_fidelity: float
    flags: tuple[str, ...]
    j_static: float
    trace: ExchangeTrace
    trajectories: tuple[Trajectory, ...]

    def summary(self) -> dict:
        return {
            "theta_rad": self.theta,
            "leakage": self.leakage,
            "swap_fidelity": self.swap_fidelity,
            "flags": list(self.flags),
            "j_static_joule": self.j_static,
        }


def scenario_from_schedule(
    sched: "sched_mod.Schedule",
    mat: MaterialParams = BARIUM_TITANATE,
    laser: LaserParams = DEFAULT_LASER,
) -> ScenarioConfig:
    """Assemble grids, potential model, and run window from a parsed schedule."""
    dev = dict(sched.device)
    grid_params = dict(sched.grid)
    well = dict(sched.well)

    def need(table: dict, key: str, block: str) -> float:
        if key not in table:
            raise ParameterError(f"schedule {block} block is missing key {key!r}")
        return table[key]

    x_min = need(grid_params, "x_min", "grid")
    x_max = need(grid_params, "x_max", "grid")
    n = int(need(grid_params, "n", "grid"))
    exchange_n = int(grid_params.get("exchange_n", min(n, 34)))
    fine = Grid1D(x_min, x_max, n)
    coarse = Grid1D(
        grid_params.get("exchange_x_min", x_min),
        grid_params.get("exchange_x_max", x_max),
        exchange_n,
    )

    transients = tuple(
        TransientTerm(
            envelope=PulseEnvelope(t0=p.t0, tau=p.tau, shape="gaussian"),
            center=p.x0,
            width=p.sigma_x,
            polarity=p.polarity,
            scale=p.scale,
        )
        for p in sched.pulses
    )
    model = PotentialModel(
        well_depth=need(well, "depth", "well"),
        well_center=need(well, "center", "well"),
        well_width=need(well, "width", "well"),
        barrier_height=need(well, "barrier", "well"),
        barrier_width=need(well, "barrier_width", "well"),
        lever_arm=need(dev, "alpha", "device"),
        transients=transients,
    )
    mass = dev.get("mass_ratio", mat.effective_mass_ratio) * CONSTANTS.m_e
    return ScenarioConfig(
        grid=fine,
        exchange_grid=coarse,
        model=model,
        mass=mass,
        interaction_strength=dev.get("interaction_strength", 1.0),
        softening=dev.get("softening", 0.0),
        mat=mat,
        laser=laser,
        t_start=need(dev, "t_start", "device"),
        t_end=need(dev, "t_end", "device"),
        dt=need(dev, "dt", "device"),
        leak_threshold=dev.get("leak_threshold", 0.05),
        edge_tol=dev.get("edge_tol", 1e-8),
    )


def _j_sample_times(config: ScenarioConfig, per_pulse: int = 41, baseline: int = 9) -> np.ndarray:
    """Sampling times for J(t): dense windows around each pulse plus a coarse baseline."""
    t_pre, t_post = config.padded_window()
    pieces = [np.linspace(t_pre, t_post, baseline)]
    for term in config.model.transients:
        if term.scale == 0.0:
            continue
        lo = max(t_pre, term.envelope.t0 - 1.5 * term.envelope.tau)
        hi = min(t_post, term.envelope.t0 + 1.5 * term.envelope.tau)
        if hi > lo:
            pieces.append(np.linspace(lo, hi, per_pulse))
    times = np.concatenate(pieces)
    # dedupe with a tolerance well below any pulse timescale
    times = np.unique(np.round(times, decimals=20))
    return np.sort(times)


def scenario_exchange_trace(
    config: ScenarioConfig,
    fine_points: int = 2001,
    constants: PhysicalConstants = CONSTANTS,
) -> ExchangeTrace:
    """Adiabatic J(t) trace over the padded run window, splined onto a uniform grid."""
    prob = config.two_electron_problem()
    sample_times = _j_sample_times(config)
    j_samples = np.array(
        [exchange_splitting(prob, t, constants) for t in sample_times]
    )
    t_pre, t_post = config.padded_window()
    if sample_times.size >= 4:
        spline = CubicSpline(sample_times, j_samples)
        t_fine = np.linspace(t_pre, t_post, fine_points)
        j_fine = spline(t_fine)
    else:
        t_fine = sample_times
        j_fine = j_samples
    return exchange_angle(t_fine, j_fine, constants)


def run_swap_scenario(
    config: "ScenarioConfig | sched_mod.Schedule",
    target_theta: float = math.pi,
    constants: PhysicalConstants = CONSTANTS,
) -> ScenarioReport:
    """Run the pulse-driven exchange scenario end to end.

    Propagates the two lowest single-particle orbitals through the transient
    potential, accumulates the exchange angle from the adiabatic J(t) trace,
    and scores the resulting gate exchange_unitary(theta) against the target
    gate exchange_unitary(target_theta) with the phase-insensitive fidelity.
    Leakage is the worst instantaneous-state population loss over the two
    propagated orbitals; exceeding the configured threshold flags the run
    "non-adiabatic" rather than failing it.
    """
    if isinstance(config, sched_mod.Schedule):
        config = scenario_from_schedule(config)
    trace = scenario_exchange_trace(config, constants=constants)
    prob_static = config.two_electron_problem()
    j_static = exchange_splitting(prob_static, None, constants)

    initial = stationary_states(
        config.model, config.grid, config.mass, 2, t=None, constants=constants
    )
    t_pre, t_post = config.padded_window()
    trajectories = []
    leakages = []
    flags: list[str] = []
    for idx, (_, psi0) in enumerate(initial):
        traj = propagate(
            psi0,
            config.model,
            config.mass,
            t_pre,
            t_post,
            config.dt,
            mat=config.mat,
            laser=config.laser,
            snapshot_times=[t_post],
            edge_tol=config.edge_tol,
            constants=constants,
        )
        trajectories.append(traj)
        leakages.append(
            adiabatic_leakage(
                traj,
                config.model,
                config.mass,
                state_index=idx,
                mat=config.mat,
                laser=config.laser,
                constants=constants,
            )
        )
        for warning in traj.warnings:
            if warning not in flags:
                flags.append(warning)
    leakage = max(leakages)
    if leakage > config.leak_threshold:
        flags.append("non-adiabatic")
    fidelity = gate_fidelity(exchange_unitary(target_theta), exchange_unitary(trace.theta))
    return ScenarioReport(
        theta=trace.theta,
        leakage=leakage,
        swap_fidelity=fidelity,
        flags=tuple(flags),
        j_static=j_static,
        trace=trace,
        trajectories=tuple(trajectories),
    )


def calibrate_swap_schedule(
    template: "sched_mod.Schedule",
    target_theta: float = math.pi,
    scale_bounds: tuple[float, float] = (0.25, 4.0),
    tolerance: float = 1e-3,
    max_evaluations: int = 40,
    mat: MaterialParams = BARIUM_TITANATE,
    laser: LaserParams = DEFAULT_LASER,
) -> "sched_mod.CalibrationResult":
    """Calibrate the template's overall pulse amplitude to a target exchange angle.

    Only the angle pipeline runs during calibration (no propagation), which
    keeps each evaluation cheap; run_swap_scenario afterwards for the full
    report at the calibrated scale.
    """

    def theta_of_scale(scale: float) -> float:
        scaled = sched_mod.scale_pulses(template, scale)
        config = scenario_from_schedule(scaled, mat=mat, laser=laser)
        return scenario_exchange_trace(config).theta

    return sched_mod.calibrate_pulse(
        target_theta,
        theta_of_scale,
        scale_bounds,
        tolerance=tolerance,
        max_evaluations=max_evaluations,
    )
