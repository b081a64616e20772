"""Spin-register state, pairwise exchange application, routing, and logging."""

import numpy as np
import pytest

from ferrogate import (
    ExchangeEvent,
    ParameterError,
    SpinState,
    apply_exchange,
    exchange_unitary,
    route_swap,
    run_sequence,
    spin_expectations,
)
from ferrogate.spinreg import MAX_QUBITS

import oracles


def _random_state(rng, n):
    amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return SpinState(n, amps, normalize=True)


def test_bits_and_basis_index_conventions():
    # qubit 0 is the least significant bit; bit '1' means spin down
    s = SpinState.from_bits("0110")
    assert s.n == 4
    idx = np.argmax(np.abs(s.amplitudes))
    assert idx == 0b0110  # qubits 1 and 2 set
    assert s.amplitudes[idx] == pytest.approx(1.0)
    assert spin_expectations(s)["sz_per_qubit"] == pytest.approx([0.5, -0.5, -0.5, 0.5])
    assert SpinState.basis_state(3, 5).amplitudes[5] == pytest.approx(1.0)


def test_state_validation():
    with pytest.raises(ParameterError):
        SpinState(2, np.ones(4))  # unnormalized without normalize=True
    with pytest.raises(ParameterError):
        SpinState(2, np.ones(3), normalize=True)
    with pytest.raises(ParameterError):
        SpinState(MAX_QUBITS + 1, np.zeros(2 ** (MAX_QUBITS + 1)))
    with pytest.raises(ParameterError):
        SpinState.from_bits("01x0")
    assert SpinState(2, np.ones(4), normalize=True).norm() == pytest.approx(1.0)


def test_exchange_event_validation():
    with pytest.raises(ParameterError):
        ExchangeEvent(i=1, j=1, theta=0.5)
    with pytest.raises(ParameterError):
        ExchangeEvent(i=-1, j=0, theta=0.5)
    s = SpinState.from_bits("01")
    with pytest.raises(ParameterError):
        apply_exchange(s, ExchangeEvent(i=0, j=5, theta=0.5))


def test_full_swap_on_basis_state():
    s = SpinState.from_bits("10")
    out = apply_exchange(s, ExchangeEvent(i=0, j=1, theta=np.pi))
    # theta = pi is SWAP times the global phase e^{-i pi / 4}
    want = SpinState.from_bits("01")
    assert out.fidelity(want) == pytest.approx(1.0, abs=1e-12)
    idx = np.argmax(np.abs(out.amplitudes))
    assert out.amplitudes[idx] == pytest.approx(np.exp(-0.25j * np.pi), abs=1e-12)


def test_sqrt_swap_entangles_and_squares_to_swap():
    s = SpinState.from_bits("10")
    half = ExchangeEvent(i=0, j=1, theta=np.pi / 2.0)
    once = apply_exchange(s, half)
    probs = np.abs(once.amplitudes) ** 2
    assert probs[0b01] == pytest.approx(0.5, abs=1e-12)
    assert probs[0b10] == pytest.approx(0.5, abs=1e-12)
    twice = apply_exchange(once, half)
    assert twice.fidelity(SpinState.from_bits("01")) == pytest.approx(1.0, abs=1e-12)


def test_random_sequences_match_dense_oracle():
    """20-event random circuits on four qubits against dense composition."""
    rng = np.random.default_rng(101)
    for _ in range(5):
        n = 4
        state = _random_state(rng, n)
        events = []
        for _ in range(20):
            i, j = rng.choice(n, size=2, replace=False)
            events.append(ExchangeEvent(i=int(i), j=int(j), theta=float(rng.uniform(-2 * np.pi, 2 * np.pi))))
        final, _ = run_sequence(state, events)
        u = oracles.compose_sequence(n, [(e.i, e.j, e.theta) for e in events])
        want = u @ state.amplitudes
        overlap = abs(np.vdot(want, final.amplitudes)) ** 2
        assert 1.0 - overlap < 1e-10


def test_exchange_conserves_total_spin():
    rng = np.random.default_rng(57)
    for _ in range(6):
        n = int(rng.integers(2, 6))
        state = _random_state(rng, n)
        before = spin_expectations(state)
        events = [
            ExchangeEvent(
                i=int(a), j=int(b), theta=float(rng.uniform(-6.0, 6.0))
            )
            for a, b in (rng.choice(n, size=2, replace=False) for _ in range(8))
        ]
        after_state, log = run_sequence(state, events)
        after = spin_expectations(after_state)
        assert after["sz_total"] == pytest.approx(before["sz_total"], abs=1e-10)
        assert after["s_squared_total"] == pytest.approx(before["s_squared_total"], abs=1e-10)
        assert all(row["norm"] == pytest.approx(1.0, abs=1e-10) for row in log)


def test_theta_shifts_by_two_pi_are_global_phase():
    rng = np.random.default_rng(73)
    state = _random_state(rng, 3)
    for k in (1, 2, -1):
        base = apply_exchange(state, ExchangeEvent(i=0, j=2, theta=0.8))
        shifted = apply_exchange(
            state, ExchangeEvent(i=0, j=2, theta=0.8 + 2.0 * np.pi * k)
        )
        assert shifted.fidelity(base) == pytest.approx(1.0, abs=1e-12)


def test_apply_exchange_matches_embedded_gate():
    rng = np.random.default_rng(91)
    state = _random_state(rng, 5)
    theta = 1.234
    out = apply_exchange(state, ExchangeEvent(i=1, j=4, theta=theta))
    dense = oracles.embed_pair_gate(5, 1, 4, exchange_unitary(theta))
    want = dense @ state.amplitudes
    np.testing.assert_allclose(out.amplitudes, want, atol=1e-12)


def test_route_swap_moves_a_marked_spin():
    s = SpinState.from_bits("1000")
    routed, events = route_swap(s, [0, 1, 2, 3])
    assert [(e.i, e.j) for e in events] == [(0, 1), (1, 2), (2, 3)]
    assert all(e.theta == pytest.approx(np.pi) for e in events)
    assert routed.fidelity(SpinState.from_bits("0001")) == pytest.approx(1.0, abs=1e-12)
    assert spin_expectations(routed)["sz_per_qubit"] == pytest.approx([0.5, 0.5, 0.5, -0.5])


def test_route_swap_then_reverse_is_identity():
    rng = np.random.default_rng(19)
    state = _random_state(rng, 4)
    path = [2, 1, 0, 3]
    there, fwd = route_swap(state, path)
    back, _ = route_swap(there, path[::-1])
    assert back.fidelity(state) == pytest.approx(1.0, abs=1e-12)
    assert len(fwd) == len(path) - 1


def test_route_swap_validation():
    s = SpinState.from_bits("000")
    with pytest.raises(ParameterError):
        route_swap(s, [0])
    with pytest.raises(ParameterError):
        route_swap(s, [0, 0, 1])
    with pytest.raises(ParameterError):
        route_swap(s, [0, 1, 7])


def test_run_sequence_log_shape():
    s = SpinState.from_bits("01")
    final, log = run_sequence(s, [ExchangeEvent(i=0, j=1, theta=np.pi)])
    assert [row["step"] for row in log] == [0, 1]
    assert log[0]["i"] is None and log[1]["i"] == 0
    assert log[1]["theta"] == pytest.approx(np.pi)
    assert final.fidelity(SpinState.from_bits("10")) == pytest.approx(1.0, abs=1e-12)


def test_json_round_trip():
    rng = np.random.default_rng(7)
    state = _random_state(rng, 3)
    text = state.to_json()
    back = SpinState.from_json(text)
    assert back.n == 3
    np.testing.assert_allclose(back.amplitudes, state.amplitudes, atol=1e-15)
