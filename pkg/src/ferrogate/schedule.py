"""Pulse-schedule file format (.fgs), canonical scenario template, and calibration.

Grammar: line-oriented, one directive per line,

    keyword key=value [key=value ...]

with keywords device, grid, well, pulse, gate.  '#' starts a comment, blank
lines are ignored.  Values are decimal numbers with an optional SI-suffix
unit, converted to SI on parse: s/fs/ps/ns, m/nm/um, W/mW, Hz/MHz, rad/pi,
eV/meV.  Suffixes are plain multiplicative factors (meV converts through the
elementary charge to joules).  Duplicate keys within a line keep the last
value and emit a warning.  At most one device, grid, and well line each.

The serializer emits bare SI values (no suffixes) via repr, so
parse(serialize(schedule)) reproduces every field exactly.

Block keys consumed by the scenario assembly:
    device  alpha, mass_ratio, interaction_strength, softening,
            leak_threshold, edge_tol, t_start, t_end, dt, qubits
    grid    x_min, x_max, n, exchange_n, exchange_x_min, exchange_x_max
    well    depth, center, width, barrier, barrier_width
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

from .errors import CalibrationError, ParameterError, ScheduleError
from .physics import CONSTANTS
from .spinreg import ExchangeEvent

_UNIT_FACTORS = {
    "": 1.0,
    "s": 1.0,
    "fs": 1e-15,
    "ps": 1e-12,
    "ns": 1e-9,
    "m": 1.0,
    "nm": 1e-9,
    "um": 1e-6,
    "W": 1.0,
    "mW": 1e-3,
    "Hz": 1.0,
    "MHz": 1e6,
    "rad": 1.0,
    "pi": math.pi,
    "eV": CONSTANTS.e_charge,
    "meV": 1e-3 * CONSTANTS.e_charge,
}

_NUMBER_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)([A-Za-z]*)$")

_PULSE_REQUIRED = ("t0", "x0", "sigma_x", "tau", "scale")
_GATE_REQUIRED = ("i", "j", "theta")


@dataclass(frozen=True)
class PulseSpec:
    """One shaped optical pulse: when, where, how wide, how strong."""

    t0: float        # s
    x0: float        # m
    sigma_x: float   # m
    tau: float       # s
    scale: float     # relative amplitude, >= 0
    polarity: float = 1.0

    def __post_init__(self):
        if not self.sigma_x > 0.0:
            raise ParameterError("pulse sigma_x must be > 0")
        if not self.tau > 0.0:
            raise ParameterError("pulse tau must be > 0")
        if self.scale < 0.0:
            raise ParameterError("pulse scale must be >= 0")
        if self.polarity not in (1.0, -1.0):
            raise ParameterError("pulse polarity must be +1 or -1")


@dataclass(frozen=True)
class Schedule:
    """Parsed schedule: parameter blocks plus ordered pulses and gates."""

    device: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    well: dict = field(default_factory=dict)
    pulses: tuple[PulseSpec, ...] = ()
    gates: tuple[ExchangeEvent, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(sorted(self.pulses, key=lambda p: p.t0)))
        object.__setattr__(self, "gates", tuple(self.gates))


def _parse_value(token: str, line_number: int) -> float:
    match = _NUMBER_RE.match(token)
    if not match:
        raise ScheduleError(f"malformed number {token!r}", line_number)
    number, suffix = match.groups()
    if suffix not in _UNIT_FACTORS:
        raise ScheduleError(f"unknown unit suffix {suffix!r} in {token!r}", line_number)
    return float(number) * _UNIT_FACTORS[suffix]


def _parse_pairs(tokens, line_number: int) -> dict:
    out: dict[str, float] = {}
    for token in tokens:
        if "=" not in token:
            raise ScheduleError(f"expected key=value, got {token!r}", line_number)
        key, _, value = token.partition("=")
        if not key.isidentifier():
            raise ScheduleError(f"bad key {key!r}", line_number)
        if key in out:
            warnings.warn(f"line {line_number}: duplicate key {key!r}, last value wins")
        out[key] = _parse_value(value, line_number)
    return out


def _require(pairs: dict, keys, keyword: str, line_number: int) -> None:
    for key in keys:
        if key not in pairs:
            raise ScheduleError(f"{keyword} line is missing required key {key!r}", line_number)


def _int_field(pairs: dict, key: str, line_number: int) -> int:
    value = pairs[key]
    if value != int(value):
        raise ScheduleError(f"key {key!r} must be an integer, got {value!r}", line_number)
    return int(value)


def parse_schedule(text: str) -> Schedule:
    """Parse schedule text; raises ScheduleError with a line number on bad input."""
    blocks: dict[str, dict] = {}
    pulses: list[PulseSpec] = []
    gates: list[ExchangeEvent] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *tokens = line.split()
        if keyword in ("device", "grid", "well"):
            if keyword in blocks:
                raise ScheduleError(f"repeated {keyword} line (at most one allowed)", line_number)
            blocks[keyword] = _parse_pairs(tokens, line_number)
        elif keyword == "pulse":
            pairs = _parse_pairs(tokens, line_number)
            _require(pairs, _PULSE_REQUIRED, "pulse", line_number)
            known = set(_PULSE_REQUIRED) | {"polarity"}
            extra = set(pairs) - known
            if extra:
                raise ScheduleError(f"pulse line has unknown keys {sorted(extra)}", line_number)
            try:
                pulses.append(
                    PulseSpec(
                        t0=pairs["t0"],
                        x0=pairs["x0"],
                        sigma_x=pairs["sigma_x"],
                        tau=pairs["tau"],
                        scale=pairs["scale"],
                        polarity=pairs.get("polarity", 1.0),
                    )
                )
            except ParameterError as exc:
                raise ScheduleError(str(exc), line_number) from exc
        elif keyword == "gate":
            pairs = _parse_pairs(tokens, line_number)
            _require(pairs, _GATE_REQUIRED, "gate", line_number)
            extra = set(pairs) - set(_GATE_REQUIRED)
            if extra:
                raise ScheduleError(f"gate line has unknown keys {sorted(extra)}", line_number)
            try:
                gates.append(
                    ExchangeEvent(
                        i=_int_field(pairs, "i", line_number),
                        j=_int_field(pairs, "j", line_number),
                        theta=pairs["theta"],
                    )
                )
            except ParameterError as exc:
                raise ScheduleError(str(exc), line_number) from exc
        else:
            raise ScheduleError(f"unknown keyword {keyword!r}", line_number)
    return Schedule(
        device=blocks.get("device", {}),
        grid=blocks.get("grid", {}),
        well=blocks.get("well", {}),
        pulses=tuple(pulses),
        gates=tuple(gates),
    )


def load_schedule(path) -> Schedule:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_schedule(handle.read())


def serialize_schedule(sched: Schedule) -> str:
    """Emit schedule text with bare SI values; exact round trip under parse."""
    lines = []
    for keyword, block in (("device", sched.device), ("grid", sched.grid), ("well", sched.well)):
        if block:
            pairs = " ".join(f"{key}={_format(block[key])}" for key in sorted(block))
            lines.append(f"{keyword} {pairs}")
    for p in sched.pulses:
        lines.append(
            f"pulse t0={_format(p.t0)} x0={_format(p.x0)} sigma_x={_format(p.sigma_x)} "
            f"tau={_format(p.tau)} scale={_format(p.scale)} polarity={_format(p.polarity)}"
        )
    for g in sched.gates:
        lines.append(f"gate i={g.i} j={g.j} theta={_format(g.theta)}")
    return "\n".join(lines) + "\n"


def _format(value: float) -> str:
    return repr(float(value))


def save_schedule(sched: Schedule, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(serialize_schedule(sched))


def scale_pulses(sched: Schedule, factor: float) -> Schedule:
    """Multiply every pulse amplitude by factor (calibration knob)."""
    if factor < 0.0:
        raise ParameterError("scale factor must be >= 0")
    return replace(
        sched, pulses=tuple(replace(p, scale=p.scale * factor) for p in sched.pulses)
    )


def reverse_schedule(sched: Schedule) -> Schedule:
    """Mirror all pulses in time about the center of the run window."""
    for key in ("t_start", "t_end"):
        if key not in sched.device:
            raise ParameterError(f"reverse_schedule needs device key {key!r}")
    pivot = sched.device["t_start"] + sched.device["t_end"]
    return replace(
        sched, pulses=tuple(replace(p, t0=pivot - p.t0) for p in sched.pulses)
    )


# --- canonical three-pulse scenario ----------------------------------------


@dataclass(frozen=True)
class Fig3Params:
    """Defaults for the canonical three-pulse exchange scenario.

    Two side pulses (polarity +1) straddle the barrier and merge the wells;
    a weaker center pulse (polarity -1, amplitude weaker_ratio * scale)
    re-splits them later.  All values are invented scenario defaults tuned
    for this simulator; the geometry is schematic, not measured.
    """

    scale: float = 1.0
    weaker_ratio: float = 0.3
    side_t0: float = -100e-15
    center_t0: float = 450e-15
    side_position: float = 6e-9
    sigma_x: float = 12e-9
    tau: float = 400e-15
    center_tau: float | None = 150e-15   # None: same as the side pulses
    t_start: float = -200e-15
    t_end: float = 600e-15
    dt: float = 1e-15
    # channel / device
    alpha: float = 6.6e-17         # J per C/m^2, film polarization lever arm
    mass_ratio: float = 0.19
    interaction_strength: float = 1.0 / 11.7
    softening: float = 0.0
    leak_threshold: float = 0.05
    edge_tol: float = 1e-8
    # static potential
    well_depth: float = 320e-3 * CONSTANTS.e_charge
    well_center: float = 24e-9
    well_width: float = 3.2e-9
    barrier_height: float = 10e-3 * CONSTANTS.e_charge
    barrier_width: float = 6e-9
    # grids; the propagation box is much wider than the dots so that the
    # faint flux shed during the merge never reaches the hard walls inside
    # the padded window, and the two-electron solve uses a narrower domain
    # (the exchange physics is local to the dots)
    x_min: float = -400e-9
    x_max: float = 400e-9
    n_points: int = 2731
    exchange_points: int = 34
    exchange_x_min: float | None = -75e-9   # None: same as x_min
    exchange_x_max: float | None = 75e-9


def canonical_fig3_schedule(params: Fig3Params = Fig3Params()) -> Schedule:
    """Three-pulse template: two side pulses, then a weaker center pulse."""
    device = {
        "alpha": params.alpha,
        "mass_ratio": params.mass_ratio,
        "interaction_strength": params.interaction_strength,
        "softening": params.softening,
        "leak_threshold": params.leak_threshold,
        "edge_tol": params.edge_tol,
        "t_start": params.t_start,
        "t_end": params.t_end,
        "dt": params.dt,
    }
    grid = {
        "x_min": params.x_min,
        "x_max": params.x_max,
        "n": float(params.n_points),
        "exchange_n": float(params.exchange_points),
        "exchange_x_min": (
            params.exchange_x_min if params.exchange_x_min is not None else params.x_min
        ),
        "exchange_x_max": (
            params.exchange_x_max if params.exchange_x_max is not None else params.x_max
        ),
    }
    well = {
        "depth": params.well_depth,
        "center": params.well_center,
        "width": params.well_width,
        "barrier": params.barrier_height,
        "barrier_width": params.barrier_width,
    }
    pulses = (
        PulseSpec(
            t0=params.side_t0,
            x0=-params.side_position,
            sigma_x=params.sigma_x,
            tau=params.tau,
            scale=params.scale,
            polarity=1.0,
        ),
        PulseSpec(
            t0=params.side_t0,
            x0=params.side_position,
            sigma_x=params.sigma_x,
            tau=params.tau,
            scale=params.scale,
            polarity=1.0,
        ),
        PulseSpec(
            t0=params.center_t0,
            x0=0.0,
            sigma_x=params.sigma_x,
            tau=params.center_tau if params.center_tau is not None else params.tau,
            scale=params.weaker_ratio * params.scale,
            polarity=-1.0,
        ),
    )
    return Schedule(device=device, grid=grid, well=well, pulses=pulses)


# --- calibration ------------------------------------------------------------


@dataclass(frozen=True)
class CalibrationResult:
    scale: float
    theta: float
    evaluations: int


def calibrate_pulse(
    target_theta: float,
    theta_of_scale: Callable[[float], float],
    scale_bounds: tuple[float, float],
    tolerance: float = 1e-3,
    max_evaluations: int = 40,
) -> CalibrationResult:
    """Bisect the pulse amplitude until |theta(scale) - target| < tolerance.

    theta_of_scale is the (expensive) simulation pipeline; it is treated as
    a black box.  The initial bracket expands geometrically (hi doubles, lo
    halves) until the target is straddled; no monotonicity is assumed beyond
    that.  Exceeding max_evaluations raises CalibrationError, as does a
    bracket that never straddles the target.
    """
    lo, hi = scale_bounds
    if not 0.0 <= lo < hi:
        raise ParameterError("scale bounds must satisfy 0 <= lo < hi")
    if not tolerance > 0.0:
        raise ParameterError("tolerance must be > 0")

    evaluations = 0

    def evaluate(scale: float) -> float:
        nonlocal evaluations
        if evaluations >= max_evaluations:
            raise CalibrationError(
                f"calibration budget of {max_evaluations} evaluations exhausted "
                f"before reaching |theta - {target_theta!r}| < {tolerance!r}"
            )
        evaluations += 1
        return theta_of_scale(scale)

    theta_lo = evaluate(lo)
    if abs(theta_lo - target_theta) < tolerance:
        return CalibrationResult(scale=lo, theta=theta_lo, evaluations=evaluations)
    theta_hi = evaluate(hi)
    if abs(theta_hi - target_theta) < tolerance:
        return CalibrationResult(scale=hi, theta=theta_hi, evaluations=evaluations)

    expansions = 0
    while (theta_lo - target_theta) * (theta_hi - target_theta) > 0.0:
        expansions += 1
        if expansions > 12:
            raise CalibrationError(
                f"target theta={target_theta!r} rad unreachable within scale bounds "
                f"[{lo!r}, {hi!r}] after geometric expansion"
            )
        if lo > 0.0:
            lo = lo / 2.0
            theta_lo = evaluate(lo)
            if abs(theta_lo - target_theta) < tolerance:
                return CalibrationResult(scale=lo, theta=theta_lo, evaluations=evaluations)
            if (theta_lo - target_theta) * (theta_hi - target_theta) <= 0.0:
                break
        hi = hi * 2.0
        theta_hi = evaluate(hi)
        if abs(theta_hi - target_theta) < tolerance:
            return CalibrationResult(scale=hi, theta=theta_hi, evaluations=evaluations)

    while True:
        mid = 0.5 * (lo + hi)
        theta_mid = evaluate(mid)
        if abs(theta_mid - target_theta) < tolerance:
            return CalibrationResult(scale=mid, theta=theta_mid, evaluations=evaluations)
        if (theta_lo - target_theta) * (theta_mid - target_theta) <= 0.0:
            hi, theta_hi = mid, theta_mid
        else:
            lo, theta_lo = mid, theta_mid
