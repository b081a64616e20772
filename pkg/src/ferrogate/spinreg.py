"""Dense n-spin register with pairwise exchange gates.

Basis convention (fixed, documented): basis states are indexed little-endian,
qubit 0 is the least significant bit, and bit value 0 means spin up (+1/2).
So |up up ... up> is index 0 and string position k of a bit pattern refers
to qubit k.

Gate coefficients are derived locally from the spectral decomposition of
exp(-i theta S1.S2): both spins aligned (equal bits) picks up the triplet
phase exp(-i theta/4); the anti-aligned pair {|01>, |10>} mixes through
a * I + b * X with a, b the half sum/difference of the triplet and singlet
phases.  A cross-module test pins these against the 4x4 exchange unitary.
Global phases are never stripped; fidelity helpers take moduli instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

NORM_TOLERANCE = 1e-10
MAX_QUBITS = 20


@dataclass(frozen=True)
class ExchangeEvent:
    """One pairwise exchange gate: qubits (i, j) through angle theta (rad)."""

    i: int
    j: int
    theta: float

    def __post_init__(self):
        if self.i < 0 or self.j < 0:
            raise ParameterError("qubit indices must be >= 0")
        if self.i == self.j:
            raise ParameterError("exchange requires two distinct qubits")


class SpinState:
    """2^n complex amplitudes, unit norm."""

    __slots__ = ("n", "amplitudes")

    def __init__(self, n: int, amplitudes, *, normalize: bool = False):
        if not 2 <= n <= MAX_QUBITS:
            raise ParameterError(f"qubit count must be in [2, {MAX_QUBITS}]")
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (2**n,):
            raise ParameterError(f"amplitude vector must have length 2^{n}")
        if not np.all(np.isfinite(amplitudes.real)) or not np.all(np.isfinite(amplitudes.imag)):
            raise ParameterError("amplitudes must be finite")
        norm = float(np.linalg.norm(amplitudes))
        if normalize:
            if norm == 0.0:
                raise ParameterError("cannot normalize the zero state")
            amplitudes = amplitudes / norm
        elif abs(norm - 1.0) > NORM_TOLERANCE:
            raise ParameterError(
                f"state norm {norm!r} violates the unit-norm invariant; "
                "pass normalize=True to rescale"
            )
        amplitudes.setflags(write=False)
        self.n = n
        self.amplitudes = amplitudes

    @classmethod
    def basis_state(cls, n: int, index: int = 0) -> "SpinState":
        if not 0 <= index < 2**n:
            raise ParameterError("basis index out of range")
        amps = np.zeros(2**n, dtype=complex)
        amps[index] = 1.0
        return cls(n, amps)

    @classmethod
    def from_bits(cls, bits: str) -> "SpinState":
        """Basis state from a pattern like 'ud' or '01'; position k is qubit k, u/0 = up."""
        index = 0
        for k, ch in enumerate(bits):
            if ch in ("u", "0"):
                continue
            if ch in ("d", "1"):
                index |= 1 << k
            else:
                raise ParameterError(f"bit pattern may contain only u/d or 0/1, got {ch!r}")
        return cls.basis_state(len(bits), index)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def fidelity(self, other: "SpinState") -> float:
        """Phase-insensitive overlap |<self|other>|."""
        if other.n != self.n:
            raise ParameterError("states live on different register sizes")
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)))

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SpinState":
        try:
            payload = json.loads(text)
            n = int(payload["n"])
            amps = np.array([complex(re, im) for re, im in payload["amplitudes"]])
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ParameterError(f"malformed spin-state JSON: {exc}") from exc
        return cls(n, amps)


def apply_exchange(state: SpinState, event: ExchangeEvent) -> SpinState:
    """Apply exp(-i theta S1.S2) to qubits (event.i, event.j)."""
    if event.i >= state.n or event.j >= state.n:
        raise ParameterError(
            f"event touches qubit {max(event.i, event.j)} but the register has {state.n}"
        )
    phase_t = np.exp(-0.25j * event.theta)
    phase_s = np.exp(0.75j * event.theta)
    stay = 0.5 * (phase_t + phase_s)
    cross = 0.5 * (phase_t - phase_s)

    old = state.amplitudes
    idx = np.arange(old.size)
    bit_i = (idx >> event.i) & 1
    bit_j = (idx >> event.j) & 1
    new = np.where(bit_i == bit_j, phase_t * old, 0.0 + 0.0j)
    lo = np.flatnonzero((bit_i == 0) & (bit_j == 1))
    hi = lo ^ (1 << event.i) ^ (1 << event.j)
    new[lo] = stay * old[lo] + cross * old[hi]
    new[hi] = cross * old[lo] + stay * old[hi]
    return SpinState(state.n, new)


def route_swap(state: SpinState, path) -> tuple[SpinState, list[ExchangeEvent]]:
    """Move the logical content of path[0] to path[-1] by consecutive swaps.

    Returns the final state and the emitted theta = pi exchange events.
    """
    path = [int(q) for q in path]
    if len(path) < 2:
        raise ParameterError("routing path needs at least two qubits")
    if len(set(path)) != len(path):
        raise ParameterError("routing path may not repeat a qubit")
    events = [ExchangeEvent(a, b, np.pi) for a, b in zip(path[:-1], path[1:])]
    for event in events:
        state = apply_exchange(state, event)
    return state, events


def spin_expectations(state: SpinState) -> dict:
    """Per-qubit <S_z>, total <S_z>, and total <S^2>, hbar = 1 units."""
    probs = np.abs(state.amplitudes) ** 2
    idx = np.arange(probs.size)
    sz = []
    for q in range(state.n):
        bit = (idx >> q) & 1
        sz.append(float(np.sum(probs * (0.5 - bit))))
    s2 = 0.75 * state.n
    amps = state.amplitudes
    for i in range(state.n):
        bit_i = (idx >> i) & 1
        for j in range(i + 1, state.n):
            bit_j = (idx >> j) & 1
            mask = (1 << i) | (1 << j)
            swapped = np.where(bit_i != bit_j, idx ^ mask, idx)
            swap_expect = float(np.real(np.vdot(amps, amps[swapped])))
            s2 += swap_expect - 0.5
    return {
        "sz_per_qubit": sz,
        "sz_total": float(sum(sz)),
        "s_squared_total": float(s2),
    }


def run_sequence(state: SpinState, events) -> tuple[SpinState, list[dict]]:
    """Apply events left to right, logging norm and conserved totals per step."""
    expect = spin_expectations(state)
    log = [
        {
            "step": 0,
            "i": None,
            "j": None,
            "theta": 0.0,
            "norm": state.norm(),
            "sz_total": expect["sz_total"],
            "s_squared_total": expect["s_squared_total"],
        }
    ]
    for step, event in enumerate(events, start=1):
        state = apply_exchange(state, event)
        expect = spin_expectations(state)
        log.append(
            {
                "step": step,
                "i": event.i,
                "j": event.j,
                "theta": event.theta,
                "norm": state.norm(),
                "sz_total": expect["sz_total"],
                "s_squared_total": expect["s_squared_total"],
            }
        )
    return state, log
