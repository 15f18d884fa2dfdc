"""Dense statevector simulation with postselection and parameter-shift gradients."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .circuit import ROTATIONS, Circuit, Param, bind, rx, rz
from .errors import MissingParam, NonShiftable, SimulationTooLarge

MAX_QUBITS = 24

_FIXED = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
}
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex).reshape(2, 2, 2, 2)
_EFFECT = {
    ("Z", 0): np.array([1, 0], dtype=complex),
    ("Z", 1): np.array([0, 1], dtype=complex),
    ("X", 0): np.array([1, 1], dtype=complex) / math.sqrt(2),
    ("X", 1): np.array([1, -1], dtype=complex) / math.sqrt(2),
}


@dataclass(frozen=True)
class State:
    amplitudes: np.ndarray
    n_qubits: int

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def dump(self, eps: float = 1e-14) -> str:
        return "".join(
            f"{i} {float(a.real)!r} {float(a.imag)!r}\n" for i, a in enumerate(self.amplitudes) if abs(a) > eps
        )


def _apply(psi: np.ndarray, mat: np.ndarray, qubits) -> np.ndarray:
    k = len(qubits)
    out = np.tensordot(mat, psi, axes=(list(range(k, 2 * k)), list(qubits)))
    return np.moveaxis(out, list(range(k)), list(qubits))


def gate_matrix(kind: str, param=None) -> np.ndarray:
    if kind == "RZ":
        return rz(param)
    if kind == "RX":
        return rx(param)
    if kind == "CNOT":
        return _CNOT
    return _FIXED[kind]


def evolve(c: Circuit) -> np.ndarray:
    """Apply the gates to |0...0>; returns the tensor with one axis per qubit."""
    if c.n_qubits > MAX_QUBITS:
        raise SimulationTooLarge(f"{c.n_qubits} qubits exceeds the {MAX_QUBITS}-qubit cap")
    if not c.is_bound:
        raise ValueError("circuit has unbound parameters")
    psi = np.zeros((2,) * c.n_qubits, dtype=complex)
    psi[(0,) * c.n_qubits] = 1.0
    for g in c.gates:
        psi = _apply(psi, gate_matrix(g.kind, g.param), g.qubits)
    return psi


def run(c: Circuit) -> tuple[State, float, complex]:
    """Simulate, postselect without renormalising, reduce to the output qubits.

    Returns ``(state, post_prob, scalar)`` where ``post_prob`` is the squared
    norm left after all projections and ``scalar`` is the circuit's recorded
    global factor.
    """
    listed = {q for q, _, _ in c.postselects} | set(c.outputs)
    if listed != set(range(c.n_qubits)):
        raise ValueError("every qubit must be an output or postselected")
    psi = evolve(c)
    axes = list(range(c.n_qubits))
    for q, basis, outcome in sorted(c.postselects, reverse=True):
        psi = np.tensordot(_EFFECT[(basis, outcome)].conj(), psi, axes=([0], [axes.index(q)]))
        axes.remove(q)
    psi = np.transpose(psi, [axes.index(q) for q in c.outputs]) if c.outputs else psi
    amps = np.asarray(psi, dtype=complex).reshape(-1)
    state = State(amps, len(c.outputs))
    return state, state.norm2, c.scalar


def overlap(s1: State, s2: State) -> complex:
    if s1.n_qubits != s2.n_qubits:
        raise ValueError("states live on different numbers of qubits")
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def similarity(s1: State, s2: State) -> float:
    return abs(overlap(s1, s2)) ** 2


def objective(c: Circuit, table: Mapping | None = None, target: State | None = None) -> float:
    """``|<target|out>|^2`` on the unnormalised output; the post probability if no target."""
    bound = bind(c, table) if table is not None else c
    state, prob, _ = run(bound)
    if target is None:
        return prob
    return similarity(target, state)


def grad(c: Circuit, table: Mapping, target: State | None = None) -> dict[tuple[str, int], float]:
    """Parameter-shift gradient of :func:`objective` for every key in ``table``."""
    out = {key: 0.0 for key in table}
    for idx, g in enumerate(c.gates):
        if not isinstance(g.param, Param):
            continue
        if g.kind not in ROTATIONS:
            raise NonShiftable(f"parameter {g.param} sits on a {g.kind} gate")
        if g.param.key not in table:
            raise MissingParam(*g.param.key)
        base = g.param.sign * float(table[g.param.key])
        terms = []
        for shift in (math.pi / 2, -math.pi / 2):
            gates = list(c.gates)
            gates[idx] = replace(g, param=base + shift)
            terms.append(objective(replace(c, gates=tuple(gates)), table, target))
        out[g.param.key] = out.get(g.param.key, 0.0) + g.param.sign * (terms[0] - terms[1]) / 2
    return out


def finite_difference(c: Circuit, table: Mapping, target: State | None = None, h: float = 1e-5):
    """Central differences of :func:`objective`, for cross-checking :func:`grad`."""
    out = {}
    for key in table:
        up = dict(table)
        down = dict(table)
        up[key] = table[key] + h
        down[key] = table[key] - h
        out[key] = (objective(c, up, target) - objective(c, down, target)) / (2 * h)
    return out
