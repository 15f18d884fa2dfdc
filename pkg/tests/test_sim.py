import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fixtures import TEMPLATES, lexicon
from qdisco import sim
from qdisco.circuit import Circuit, Gate, Param, ParamTable, bind
from qdisco.errors import MissingParam, SimulationTooLarge
from qdisco.pipeline import Config, compile_sentence


def test_bell_pair_and_big_endian_order():
    c = Circuit(2, (Gate("X", (0,)),), (), (0, 1))
    state, prob, _ = sim.run(c)
    assert np.allclose(state.amplitudes, [0, 0, 1, 0])
    assert prob == pytest.approx(1.0)
    bell = Circuit(2, (Gate("H", (0,)), Gate("CNOT", (0, 1))), (), (0, 1))
    assert np.allclose(sim.run(bell)[0].amplitudes, np.array([1, 0, 0, 1]) / math.sqrt(2))


def test_postselection_does_not_renormalise():
    c = Circuit(2, (Gate("H", (0,)), Gate("CNOT", (0, 1))), ((1, "Z", 0),), (0,))
    state, prob, _ = sim.run(c)
    assert np.allclose(state.amplitudes, [1 / math.sqrt(2), 0])
    assert prob == pytest.approx(0.5)


def test_x_basis_postselection():
    c = Circuit(1, (Gate("H", (0,)),), ((0, "X", 1),), ())
    _, prob, _ = sim.run(c)
    assert prob == pytest.approx(0.0, abs=1e-15)


def test_rotation_conventions():
    t = 0.7
    c = Circuit(1, (Gate("RX", (0,), t),), (), (0,))
    assert np.allclose(sim.run(c)[0].amplitudes, [math.cos(t / 2), -1j * math.sin(t / 2)])
    c = Circuit(1, (Gate("H", (0,)), Gate("RZ", (0,), t)), (), (0,))
    amps = sim.run(c)[0].amplitudes
    assert np.allclose(amps, np.array([np.exp(-1j * t / 2), np.exp(1j * t / 2)]) / math.sqrt(2))


def test_unlisted_qubit_rejected():
    with pytest.raises(ValueError):
        sim.run(Circuit(2, (), (), (0,)))


def test_unbound_circuit_rejected():
    with pytest.raises(ValueError):
        sim.run(Circuit(1, (Gate("RZ", (0,), Param("w", 0)),), (), (0,)))


def test_qubit_cap():
    with pytest.raises(SimulationTooLarge):
        sim.evolve(Circuit(sim.MAX_QUBITS + 1))


def test_overlap_and_similarity():
    a = sim.State(np.array([1, 0], dtype=complex), 1)
    b = sim.State(np.array([1, 1], dtype=complex) / math.sqrt(2), 1)
    assert sim.similarity(a, b) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        sim.overlap(a, sim.State(np.ones(4, dtype=complex), 2))


def test_dump_lists_nonzero_amplitudes():
    s = sim.State(np.array([0, 1j, 0, 0.5]), 2)
    assert s.dump() == "1 0.0 1.0\n3 0.5 0.0\n"


def _random_case(sentence, ansatz, mode, seed):
    cfg = Config(ansatz=ansatz, mode=mode)
    c = compile_sentence(sentence, lexicon(), cfg, truth=False)
    rng = np.random.default_rng(seed)
    table = ParamTable({k: rng.uniform(0, 2 * math.pi) for k in sorted(c.params())})
    return c, table, rng


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(TEMPLATES[1:]), st.sampled_from(["euler", "svd", "basis:euler"]),
       st.sampled_from(["parallel", "sequential"]), st.integers(0, 2**32 - 1))
def test_parameter_shift_matches_finite_differences(sentence, ansatz, mode, seed):
    c, table, rng = _random_case(sentence, ansatz, mode, seed)
    dim = 2 ** len(c.outputs)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    target = sim.State(v / np.linalg.norm(v), len(c.outputs))
    for tgt in (None, target):
        g = sim.grad(c, table, tgt)
        fd = sim.finite_difference(c, table, tgt)
        a = np.array([g[k] for k in sorted(table)])
        b = np.array([fd[k] for k in sorted(table)])
        assert np.linalg.norm(a - b) <= 1e-6 * max(np.linalg.norm(a), 1.0)


def test_gradient_counts_repeated_and_negated_parameters():
    # RZ(t) then RZ(-t) cancels, so the objective is flat in t
    c = Circuit(1, (Gate("H", (0,)), Gate("RZ", (0,), Param("w", 0)), Gate("RZ", (0,), Param("w", 0, -1)),
                    Gate("H", (0,))), ((0, "Z", 0),), ())
    g = sim.grad(c, {("w", 0): 0.4, ("z", 0): 1.0})
    assert g[("w", 0)] == pytest.approx(0.0, abs=1e-12)
    assert g[("z", 0)] == 0.0


def test_gradient_needs_every_parameter():
    c = Circuit(1, (Gate("RX", (0,), Param("w", 0)),), (), (0,))
    with pytest.raises(MissingParam):
        sim.grad(c, {})


def test_bound_circuit_has_zero_gradient_entries():
    c, table, _ = _random_case("Alice hates Bob", "euler", "parallel", 0)
    g = sim.grad(bind(c, table), table)
    assert all(v == 0.0 for v in g.values())


def test_empty_circuit():
    state, prob, scalar = sim.run(Circuit(1, (), (), (0,)))
    assert np.allclose(state.amplitudes, [1, 0]) and prob == 1.0 and scalar == 1.0


def test_logic_gate_teleportation():
    # Bell pair on (1, 2) with eta on 2, Bell effect on (0, 1): output is eta|psi> / 2
    t, u = 0.9, 0.4
    gates = (Gate("RX", (0,), t), Gate("H", (1,)), Gate("CNOT", (1, 2)), Gate("RX", (2,), u),
             Gate("CNOT", (0, 1)), Gate("H", (0,)))
    c = Circuit(3, gates, ((0, "Z", 0), (1, "Z", 0)), (2,))
    psi = np.array([math.cos(t / 2), -1j * math.sin(t / 2)])
    eta = np.array([[math.cos(u / 2), -1j * math.sin(u / 2)], [-1j * math.sin(u / 2), math.cos(u / 2)]])
    assert np.allclose(sim.run(c)[0].amplitudes, eta @ psi / 2, atol=1e-12)


def test_closed_form_gradient():
    c = Circuit(1, (Gate("RX", (0,), Param("w", 0)),), (), (0,))
    one = sim.State(np.array([0, 1], dtype=complex), 1)
    assert sim.grad(c, {("w", 0): math.pi / 2}, one)[("w", 0)] == pytest.approx(0.5, abs=1e-12)


def test_overlap_conventions():
    zero = sim.State(np.array([1, 0], dtype=complex), 1)
    plus = sim.State(np.array([1, 1], dtype=complex) / math.sqrt(2), 1)
    assert sim.overlap(plus, zero) == pytest.approx(1 / math.sqrt(2))
    s = sim.State(np.array([0.3, 0.4j]), 1)
    assert sim.overlap(s, s) == pytest.approx(s.norm2)
    # conjugate-linear in the first argument
    assert sim.overlap(sim.State(1j * s.amplitudes, 1), s) == pytest.approx(-1j * s.norm2)


@given(st.integers(0, 2**32 - 1))
def test_gate_identities_on_random_states(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    v /= np.linalg.norm(v)
    psi = v.reshape(2, 2)
    twice = sim._apply(sim._apply(psi, sim.gate_matrix("CNOT"), (0, 1)), sim.gate_matrix("CNOT"), (0, 1))
    assert np.allclose(twice, psi)
    h = sim.gate_matrix("H")
    assert np.allclose(sim._apply(sim._apply(psi, h, (1,)), h, (1,)), psi)
    a, b = rng.uniform(-4, 4, size=2)
    rz2 = sim._apply(sim._apply(psi, sim.gate_matrix("RZ", a), (0,)), sim.gate_matrix("RZ", b), (0,))
    assert np.allclose(rz2, sim._apply(psi, sim.gate_matrix("RZ", a + b), (0,)))
    assert np.linalg.norm(rz2) == pytest.approx(1.0, abs=1e-12)
