"""Parameterised circuit IR, the word ansatz library and parameter tables.

Qubit 0 is the most significant bit. Rotations follow the usual convention
``RZ(t) = diag(exp(-it/2), exp(it/2))`` and ``RX(t) = exp(-itX/2)``.
"""
from __future__ import annotations

import json
import math
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

import numpy as np

from .errors import LexiconError, MissingParam, UnknownClass

ROTATIONS = ("RZ", "RX")
GATE_ARITY = {"CNOT": 2, "RZ": 1, "RX": 1, "H": 1, "X": 1}
BASIS_WORD = "__basis__"


@dataclass(frozen=True, order=True)
class Param:
    word: str
    slot: int
    sign: int = 1

    @property
    def key(self) -> tuple[str, int]:
        return (self.word, self.slot)

    def __str__(self):
        return ("-" if self.sign < 0 else "") + f"${self.word}.{self.slot}"


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    param: float | Param | None = None
    word: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != GATE_ARITY[self.kind] or len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind} needs {GATE_ARITY[self.kind]} distinct qubits")
        if (self.kind in ROTATIONS) != (self.param is not None):
            raise ValueError(f"{self.kind} parameter mismatch")

    def shifted(self, offset: int) -> Gate:
        return replace(self, qubits=tuple(q + offset for q in self.qubits))

    def remap(self, mapping: Sequence[int]) -> Gate:
        return replace(self, qubits=tuple(mapping[q] for q in self.qubits))


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    postselects: tuple[tuple[int, str, int], ...] = ()
    outputs: tuple[int, ...] = ()
    scalar: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "postselects", tuple((int(q), b, int(o)) for q, b, o in self.postselects))
        object.__setattr__(self, "outputs", tuple(int(q) for q in self.outputs))
        object.__setattr__(self, "scalar", complex(self.scalar))
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits:
                raise ValueError(f"gate {g} outside {self.n_qubits} qubits")
        posted = [q for q, _, _ in self.postselects]
        if len(set(posted)) != len(posted) or set(posted) & set(self.outputs):
            raise ValueError("each qubit is postselected at most once and never also an output")
        for q, b, o in self.postselects:
            if b not in ("Z", "X") or o not in (0, 1):
                raise ValueError(f"bad postselection {(q, b, o)}")

    def params(self) -> set[tuple[str, int]]:
        return {g.param.key for g in self.gates if isinstance(g.param, Param)}

    @property
    def is_bound(self) -> bool:
        return not any(isinstance(g.param, Param) for g in self.gates)


# parameter tables -------------------------------------------------------------

class ParamTable(Mapping):
    """Immutable map ``(word, slot) -> radians`` plus ansatz metadata per word."""

    def __init__(self, values=None, kinds=None):
        self._values = {(str(w), int(s)): float(v) for (w, s), v in dict(values or {}).items()}
        for key, v in self._values.items():
            if not math.isfinite(v):
                raise ValueError(f"parameter {key} is not finite")
        self.kinds = dict(kinds or {})

    def __getitem__(self, key):
        return self._values[key]

    def __iter__(self) -> Iterator[tuple[str, int]]:
        return iter(sorted(self._values))

    def __len__(self):
        return len(self._values)

    def __repr__(self):
        return f"ParamTable({dict(self.items())})"

    def updated(self, changes: Mapping) -> ParamTable:
        vals = dict(self._values)
        vals.update({k: float(v) for k, v in changes.items()})
        return ParamTable(vals, self.kinds)

    def to_json(self) -> str:
        return json.dumps({f"{w}.{s}": v for (w, s), v in sorted(self._values.items())}, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ParamTable:
        raw = json.loads(text)
        vals = {}
        for key, v in raw.items():
            word, _, slot = key.rpartition(".")
            if not word or not slot.isdigit():
                raise ValueError(f"bad parameter key {key!r}")
            vals[(word, int(slot))] = v
        return cls(vals)


def bind(c: Circuit, table: Mapping) -> Circuit:
    """Replace every symbolic parameter by its value from ``table``."""
    gates = []
    for g in c.gates:
        if isinstance(g.param, Param):
            if g.param.key not in table:
                raise MissingParam(*g.param.key)
            g = replace(g, param=g.param.sign * float(table[g.param.key]))
        gates.append(g)
    return replace(c, gates=tuple(gates))


def elide_zero_rotations(c: Circuit) -> Circuit:
    return replace(c, gates=tuple(g for g in c.gates if not (g.kind in ROTATIONS and g.param == 0.0)))


# ansatz library -----------------------------------------------------------------

VERB_ANSATZE = ("bell", "euler", "svd")
STRIDE = {"bell": 0, "euler": 3, "svd": 5, "noun": 2}
STATE_CLASSES = ("noun", "adj", "tverb", "dtverb")
PORTS = {"noun": 1, "adj": 1, "tverb": 2, "dtverb": 3, "relpron": 0, "does": 0, "not": 0}


@dataclass(frozen=True)
class AnsatzKind:
    inner: str
    basis: bool = False
    basis_scope: str = "global"

    @classmethod
    def parse(cls, text: str, basis_scope: str = "global") -> AnsatzKind:
        basis = text.startswith("basis:")
        inner = text[len("basis:"):] if basis else text
        if inner not in STRIDE:
            raise LexiconError(f"unknown ansatz {text!r}")
        if basis_scope not in ("global", "word"):
            raise LexiconError(f"basis scope must be global or word, not {basis_scope!r}")
        return cls(inner, basis, basis_scope)

    def __str__(self):
        return ("basis:" if self.basis else "") + self.inner


@dataclass(frozen=True)
class Block:
    """Gates on local qubits: ``ports`` carry the word wires, the rest are ancillas."""

    n_qubits: int
    gates: tuple[Gate, ...]
    ports: tuple[int, ...]
    postselects: tuple[tuple[int, str, int], ...] = ()
    scalar: complex = 1.0


@dataclass(frozen=True)
class WordTemplate:
    name: str
    cls: str
    ansatz: AnsatzKind | None
    layers: int

    @property
    def ports(self) -> int:
        return PORTS[self.cls]

    @property
    def stride(self) -> int:
        if self.ansatz is None:
            return 0
        n_maps = self.ports - 1 if self.cls in ("tverb", "dtverb") else 1
        return STRIDE[self.ansatz.inner] * n_maps

    def slots(self) -> list[tuple[str, int]]:
        keys = [(self.name, s) for s in range(self.stride * self.layers)]
        if self.ansatz is not None and self.ansatz.basis:
            if self.ansatz.basis_scope == "word":
                base = self.stride * self.layers
                keys += [(self.name, base + s) for s in range(2 * self.layers)]
            else:
                keys += [(BASIS_WORD, s) for s in range(2 * self.layers)]
        return keys

    def _p(self, layer: int, local: int) -> Param:
        return Param(self.name, layer * self.stride + local)

    def _basis_params(self, layer: int) -> tuple[Param, Param]:
        if self.ansatz.basis_scope == "word":
            base = self.stride * self.layers + 2 * layer
            return Param(self.name, base), Param(self.name, base + 1)
        return Param(BASIS_WORD, 2 * layer), Param(BASIS_WORD, 2 * layer + 1)

    def _basis(self, q: int, layer: int, transpose: bool = False) -> list[Gate]:
        if self.ansatz is None or not self.ansatz.basis:
            return []
        a, b = self._basis_params(layer)
        gates = [Gate("RZ", (q,), a, self.name), Gate("RX", (q,), b, self.name)]
        return gates[::-1] if transpose else gates

    def _map(self, q: int, layer: int, offset: int, anc: list[int]) -> tuple[list[Gate], list]:
        """Gates for one verb map on qubit ``q``; may claim an ancilla."""
        kind = self.ansatz.inner
        w = self.name
        if kind == "bell":
            return [], []
        p = lambda k: self._p(layer, offset + k)  # noqa: E731
        euler = [Gate("RZ", (q,), p(0), w), Gate("RX", (q,), p(1), w), Gate("RZ", (q,), p(2), w)]
        if kind == "euler":
            return euler, []
        a = anc.pop(0)
        diag = [Gate("H", (a,), None, w)]
        for k, flip in ((3, False), (4, True)):
            if flip:
                diag.append(Gate("X", (q,), None, w))
            diag += [
                Gate("RZ", (a,), p(k), w),
                Gate("CNOT", (q, a), None, w),
                Gate("RZ", (a,), p(k), w),
                Gate("CNOT", (q, a), None, w),
            ]
            if flip:
                diag.append(Gate("X", (q,), None, w))
        diag.append(Gate("H", (a,), None, w))
        return diag + euler, [(a, "Z", 0)]

    def _n_anc(self) -> int:
        if self.ansatz is not None and self.ansatz.inner == "svd" and self.cls in ("tverb", "dtverb"):
            return self.ports - 1
        return 0

    def state_layer(self, layer: int) -> Block:
        """Prepare this layer's slice of the word state from |0...0>."""
        w = self.name
        if self.cls in ("noun", "adj"):
            gates = [Gate("RX", (0,), self._p(layer, 0), w), Gate("RZ", (0,), self._p(layer, 1), w)]
            return Block(1, tuple(gates + self._basis(0, layer)), (0,))
        if self.cls in ("tverb", "dtverb"):
            n = self.ports
            anc = list(range(n, n + self._n_anc()))
            gates = [Gate("H", (0,), None, w)] + [Gate("CNOT", (0, k), None, w) for k in range(1, n)]
            posts = []
            per_map = STRIDE[self.ansatz.inner]
            for k in range(1, n):
                g, ps = self._map(k, layer, (k - 1) * per_map, anc)
                gates += g
                posts += ps
            for k in range(n):
                gates += self._basis(k, layer)
            return Block(n + self._n_anc(), tuple(gates), tuple(range(n)), tuple(posts), math.sqrt(2))
        return Block(0, (), ())

    def map_layer(self, layer: int) -> Block:
        """Verb slice bent into a map: local qubit 0 receives a copy of the input.

        The ports are the remaining core wires, ancillas follow them.
        """
        if self.cls not in ("tverb", "dtverb"):
            raise UnknownClass(f"{self.cls} words have no map form")
        w = self.name
        n = self.ports - 1
        anc = list(range(n, n + self._n_anc()))
        gates = self._basis(0, layer, transpose=True)
        gates += [Gate("CNOT", (0, k), None, w) for k in range(1, n)]
        posts = []
        per_map = STRIDE[self.ansatz.inner]
        for k in range(n):
            g, ps = self._map(k, layer, k * per_map, anc)
            gates += g
            posts += ps
        for k in range(n):
            gates += self._basis(k, layer)
        return Block(n + self._n_anc(), tuple(gates), tuple(range(n)), tuple(posts), 1.0)

    def state_circuit(self) -> tuple[Circuit, list[list[int]]]:
        """Whole-word state circuit; returns it with ``ports[p][layer] -> qubit``."""
        blocks = [self.state_layer(k) for k in range(self.layers)]
        n_ports = self.ports
        port_q = [[p * self.layers + k for k in range(self.layers)] for p in range(n_ports)]
        next_anc = n_ports * self.layers
        gates, posts, scalar = [], [], 1.0
        for k, blk in enumerate(blocks):
            mapping = {}
            for p, local in enumerate(blk.ports):
                mapping[local] = port_q[p][k]
            for local in range(blk.n_qubits):
                if local not in mapping:
                    mapping[local] = next_anc
                    next_anc += 1
            m = [mapping[i] for i in range(blk.n_qubits)]
            gates += [g.remap(m) for g in blk.gates]
            posts += [(m[q], b, o) for q, b, o in blk.postselects]
            scalar *= blk.scalar
        outputs = [q for ports in port_q for q in ports]
        return Circuit(next_anc, tuple(gates), tuple(posts), tuple(outputs), scalar), port_q


def default_ansatz(cls: str, verb_ansatz: str = "euler") -> str | None:
    if cls in ("noun", "adj"):
        return "noun"
    if cls in ("tverb", "dtverb"):
        return verb_ansatz
    return None


def instantiate_word(name: str, cls: str, ansatz: str | AnsatzKind | None, layers: int,
                     basis_scope: str = "global") -> WordTemplate:
    if cls not in PORTS:
        raise UnknownClass(f"unknown word class {cls!r}")
    if layers < 1:
        raise ValueError("layers must be positive")
    if cls not in STATE_CLASSES:
        return WordTemplate(name, cls, None, layers)
    if ansatz is None:
        ansatz = default_ansatz(cls)
    if isinstance(ansatz, str):
        ansatz = AnsatzKind.parse(ansatz, basis_scope)
    verb = cls in ("tverb", "dtverb")
    if verb != (ansatz.inner in VERB_ANSATZE):
        raise LexiconError(f"ansatz {ansatz} does not fit class {cls}")
    return WordTemplate(name, cls, ansatz, layers)


# explicit matrices (independent of the simulator) ----------------------------------

def rz(t: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def rx(t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def euler_matrix(a: float, b: float, g: float) -> np.ndarray:
    """``RZ(g) RX(b) RZ(a)``: the gates RZ(a), RX(b), RZ(g) in circuit order."""
    return rz(g) @ rx(b) @ rz(a)


def word_tensor(t: WordTemplate, params: Mapping) -> np.ndarray:
    """Core tensor the template stands for, one axis of size 2**layers per port."""

    def val(key):
        if key not in params:
            raise MissingParam(*key)
        return float(params[key])

    per_layer = []
    for k in range(t.layers):
        p = lambda j: val((t.name, k * t.stride + j))  # noqa: E731
        if t.cls in ("noun", "adj"):
            v = rz(p(1)) @ rx(p(0)) @ np.array([1, 0], dtype=complex)
            tens = v
        elif t.cls in ("tverb", "dtverb"):
            per_map = STRIDE[t.ansatz.inner]
            mats = []
            for m in range(t.ports - 1):
                if t.ansatz.inner == "bell":
                    mats.append(np.eye(2, dtype=complex))
                    continue
                mat = euler_matrix(p(m * per_map), p(m * per_map + 1), p(m * per_map + 2))
                if t.ansatz.inner == "svd":
                    mat = mat @ np.diag([math.cos(p(m * per_map + 3)), math.cos(p(m * per_map + 4))])
                mats.append(mat)
            if len(mats) == 1:
                tens = np.einsum("ji->ij", mats[0])
            else:
                tens = np.einsum("ji,ki->ijk", mats[0], mats[1])
        else:
            raise UnknownClass(f"{t.cls} words carry no state")
        if t.ansatz.basis:
            if t.ansatz.basis_scope == "word":
                base = t.stride * t.layers + 2 * k
                a, b = val((t.name, base)), val((t.name, base + 1))
            else:
                a, b = val((BASIS_WORD, 2 * k)), val((BASIS_WORD, 2 * k + 1))
            bm = rx(b) @ rz(a)
            for axis in range(tens.ndim):
                tens = np.moveaxis(np.tensordot(bm, tens, axes=([1], [axis])), 0, axis)
        per_layer.append(tens)
    return layer_product(per_layer)


def layer_product(per_layer: Sequence[np.ndarray]) -> np.ndarray:
    """Combine per-layer tensors so layer k is qubit k of every port wire."""
    n_layers = len(per_layer)
    ports = per_layer[0].ndim
    full = per_layer[0]
    for t in per_layer[1:]:
        full = np.multiply.outer(full, t)
    # axes are (layer, port); reorder to (port, layer)
    perm = [k * ports + p for p in range(ports) for k in range(n_layers)]
    full = np.transpose(full, perm)
    return full.reshape((2 ** n_layers,) * ports)


# statistics -------------------------------------------------------------------------

def _depth(gates: Sequence[Gate], n: int) -> int:
    level = [0] * n
    for g in gates:
        d = max(level[q] for q in g.qubits) + 1
        for q in g.qubits:
            level[q] = d
    return max(level, default=0)


def stats(c: Circuit) -> dict:
    cnots = [g for g in c.gates if g.kind == "CNOT"]
    grammar = [g for g in cnots if g.word is None]
    return {
        "qubits": c.n_qubits,
        "cnot_count": len(cnots),
        "cnot_depth": _depth(cnots, c.n_qubits),
        "depth": _depth(c.gates, c.n_qubits),
        "grammar_cnot_count": len(grammar),
        "grammar_cnot_depth": _depth(grammar, c.n_qubits),
    }


# text format -------------------------------------------------------------------------

def _fmt_param(p) -> str:
    return str(p) if isinstance(p, Param) else repr(float(p))


def to_text(c: Circuit) -> str:
    lines = [f"QUBITS {c.n_qubits}", f"SCALAR {c.scalar.real!r} {c.scalar.imag!r}"]
    for g in c.gates:
        parts = [g.kind, *map(str, g.qubits)]
        if g.param is not None:
            parts.append(_fmt_param(g.param))
        if g.word is not None:
            parts.append("@" + g.word)
        lines.append(" ".join(parts))
    for q, b, o in c.postselects:
        lines.append(f"POST {q} {b} {o}")
    lines.append("OUTPUT" + "".join(f" {q}" for q in c.outputs))
    return "\n".join(lines) + "\n"


def _parse_param(tok: str):
    sign = 1
    if tok.startswith("-$"):
        sign, tok = -1, tok[1:]
    if tok.startswith("$"):
        word, _, slot = tok[1:].rpartition(".")
        return Param(word, int(slot), sign)
    return float(tok)


def from_text(text: str) -> Circuit:
    n, scalar, gates, posts, outputs = None, 1.0, [], [], ()
    for raw in text.splitlines():
        toks = raw.split()
        if not toks or toks[0].startswith("#"):
            continue
        head = toks[0]
        if head == "QUBITS":
            n = int(toks[1])
        elif head == "SCALAR":
            scalar = complex(float(toks[1]), float(toks[2]))
        elif head == "POST":
            posts.append((int(toks[1]), toks[2], int(toks[3])))
        elif head == "OUTPUT":
            outputs = tuple(int(t) for t in toks[1:])
        elif head in GATE_ARITY:
            word = None
            if toks[-1].startswith("@"):
                word = toks.pop()[1:]
            arity = GATE_ARITY[head]
            qubits = tuple(int(t) for t in toks[1:1 + arity])
            rest = toks[1 + arity:]
            param = _parse_param(rest[0]) if rest else None
            gates.append(Gate(head, qubits, param, word))
        else:
            raise ValueError(f"unknown circuit line {raw!r}")
    if n is None:
        raise ValueError("missing QUBITS header")
    return Circuit(n, tuple(gates), tuple(posts), outputs, scalar)
