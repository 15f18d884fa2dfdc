"""String diagrams for sentences and their exact tensor semantics.

A diagram is read top to bottom. Every wire has one producer (a generator
output or a diagram input) and one consumer (a generator input or a diagram
output). Evaluation contracts dense tensors, so it doubles as the numerical
oracle for everything built on top of it.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from ._contract import contract
from .errors import ShapeMismatch, TypeMismatch, UnknownClass
from .pregroup import PregroupType, Reduction

NOUN = "noun"
SENTENCE = "sentence"
_KIND_OF_BASE = {"n": NOUN, "s": SENTENCE}


@dataclass(frozen=True)
class WireType:
    kind: str
    qubits: int

    def __post_init__(self):
        if self.qubits < 1:
            raise ValueError("a wire carries at least one qubit")

    @property
    def dim(self) -> int:
        return 2 ** self.qubits


# generators -----------------------------------------------------------------

@dataclass(frozen=True)
class WordState:
    name: str
    cod: tuple[WireType, ...]
    cls: str | None = None
    ansatz: str | None = None
    core: bool = False

    @property
    def dom(self):
        return ()


@dataclass(frozen=True)
class Cap:
    wire: WireType

    @property
    def dom(self):
        return ()

    @property
    def cod(self):
        return (self.wire, self.wire)


@dataclass(frozen=True)
class Cup:
    wire: WireType

    @property
    def dom(self):
        return (self.wire, self.wire)

    @property
    def cod(self):
        return ()


@dataclass(frozen=True)
class Spider:
    """Z spider acting qubit-wise on a wire; ``phase`` is applied per qubit."""

    n_in: int
    n_out: int
    wire: WireType
    phase: float = 0.0
    color: str = "Z"

    def __post_init__(self):
        if self.color != "Z":
            raise ValueError("diagram spiders are Z spiders")
        if self.n_in + self.n_out < 1:
            raise ValueError("a spider needs at least one leg")

    @property
    def dom(self):
        return (self.wire,) * self.n_in

    @property
    def cod(self):
        return (self.wire,) * self.n_out


@dataclass(frozen=True)
class Effect:
    """Named effect; ``delete`` is the all-ones covector, others are bound."""

    name: str
    dom: tuple[WireType, ...]

    @property
    def cod(self):
        return ()


@dataclass(frozen=True)
class Box:
    """Linear map. ``fixed`` selects a built-in tensor: identity or pauli_x."""

    name: str
    dom: tuple[WireType, ...]
    cod: tuple[WireType, ...]
    fixed: str | None = None


@dataclass(frozen=True)
class Node:
    gen: object
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]


@dataclass(frozen=True, eq=True)
class Diagram:
    wires: Mapping[str, WireType]
    nodes: tuple[Node, ...] = ()
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    _order: tuple[int, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "wires", dict(self.wires))
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        self._validate()

    def _validate(self):
        producers = {w: 0 for w in self.wires}
        consumers = {w: 0 for w in self.wires}
        for w in self.inputs:
            producers[self._known(w)] += 1
        for w in self.outputs:
            consumers[self._known(w)] += 1
        for node in self.nodes:
            gen = node.gen
            if len(node.inputs) != len(gen.dom) or len(node.outputs) != len(gen.cod):
                raise TypeMismatch(f"{gen} wired with the wrong number of ports")
            for w, t in zip(node.inputs, gen.dom):
                consumers[self._known(w)] += 1
                if self.wires[w] != t:
                    raise TypeMismatch(f"wire {w} is {self.wires[w]}, port expects {t}")
            for w, t in zip(node.outputs, gen.cod):
                producers[self._known(w)] += 1
                if self.wires[w] != t:
                    raise TypeMismatch(f"wire {w} is {self.wires[w]}, port expects {t}")
        for w in self.wires:
            if producers[w] != 1 or consumers[w] != 1:
                raise ValueError(f"wire {w} must have exactly two endpoints")
        object.__setattr__(self, "_order", self._toposort())

    def _known(self, w):
        if w not in self.wires:
            raise ValueError(f"unknown wire {w}")
        return w

    def _toposort(self):
        produced_by = {w: k for k, n in enumerate(self.nodes) for w in n.outputs}
        deps = [{produced_by[w] for w in n.inputs if w in produced_by} for n in self.nodes]
        done, order = set(), []
        while len(order) < len(self.nodes):
            ready = [k for k in range(len(self.nodes)) if k not in done and deps[k] <= done]
            if not ready:
                raise ValueError("diagram contains a cycle")
            done.add(ready[0])
            order.append(ready[0])
        return tuple(order)

    @property
    def dom(self) -> tuple[WireType, ...]:
        return tuple(self.wires[w] for w in self.inputs)

    @property
    def cod(self) -> tuple[WireType, ...]:
        return tuple(self.wires[w] for w in self.outputs)

    def words(self) -> list[WordState]:
        return [n.gen for n in self.nodes if isinstance(n.gen, WordState)]


# construction ----------------------------------------------------------------

def wire_type(base: str, dims: Mapping[str, int]) -> WireType:
    if base not in dims:
        raise TypeMismatch(f"no wire dimension for basic type {base!r}")
    return WireType(_KIND_OF_BASE.get(base, base), dims[base])


def from_reduction(
    words: Sequence[tuple[str, PregroupType]],
    red: Reduction,
    dims: Mapping[str, int] | None = None,
    classes: Sequence[str | None] | None = None,
    ansatze: Sequence[str | None] | None = None,
) -> Diagram:
    """Word states for every word, one cup per reduction cup, open wires out."""
    dims = dict(dims or {"n": 1, "s": 1})
    classes = list(classes) if classes is not None else [None] * len(words)
    ansatze = list(ansatze) if ansatze is not None else [None] * len(words)
    if tuple(t for _, t in words) != red.word_types:
        raise TypeMismatch("reduction does not belong to these word types")
    flat = red.flat
    wires = {f"w{i}": wire_type(s.base.name, dims) for i, s in enumerate(flat)}
    nodes = []
    for (name, t), off, cls, anz in zip(words, red.offsets, classes, ansatze):
        outs = tuple(f"w{off + k}" for k in range(len(t)))
        nodes.append(Node(WordState(name, tuple(wires[w] for w in outs), cls, anz), (), outs))
    for i, j in red.cups:
        if wires[f"w{i}"] != wires[f"w{j}"]:
            raise TypeMismatch(f"cup joins {wires[f'w{i}']} and {wires[f'w{j}']}")
        nodes.append(Node(Cup(wires[f"w{i}"]), (f"w{i}", f"w{j}"), ()))
    return Diagram(wires, tuple(nodes), (), tuple(f"w{i}" for i in red.open))


class _Builder:
    def __init__(self, d: Diagram):
        self.wires = dict(d.wires)
        self.nodes: list[Node] = []
        self.count = 0

    def fresh(self, t: WireType, hint: str) -> str:
        while True:
            name = f"{hint}{self.count}"
            self.count += 1
            if name not in self.wires:
                self.wires[name] = t
                return name

    def add(self, gen, inputs=(), outputs=()):
        self.nodes.append(Node(gen, tuple(inputs), tuple(outputs)))


def _wire_word(b: _Builder, node: Node):
    w = node.gen
    outs = node.outputs
    cod = w.cod
    core = lambda n: replace(w, cod=n, core=True)  # noqa: E731
    cls = w.cls
    if cls in (None, "noun") or w.core:
        b.add(w, (), outs)
    elif cls == "adj":
        n = cod[0]
        c = b.fresh(n, "c")
        b.add(core((n,)), (), (c,))
        b.add(Spider(1, 2, n), (c,), (outs[0], outs[1]))
    elif cls in ("tverb", "dtverb"):
        n = cod[0]
        nouns = [0, 2] if cls == "tverb" else [0, 2, 3]
        s = cod[1]
        if s.qubits != len(nouns) * n.qubits:
            raise TypeMismatch(
                f"{w.name}: sentence wire has {s.qubits} qubits, wiring needs {len(nouns) * n.qubits}"
            )
        cs = [b.fresh(n, "c") for _ in nouns]
        b.add(core((n,) * len(nouns)), (), cs)
        bundle = []
        for k, (c, port) in enumerate(zip(cs, nouns)):
            x = b.fresh(n, "x")
            bundle.append(x)
            pair = (outs[port], x) if k == 0 else (x, outs[port])
            b.add(Spider(1, 2, n), (c,), pair)
        b.add(Box("bundle", (n,) * len(nouns), (s,), fixed="identity"), bundle, (outs[1],))
    elif cls == "relpron":
        n, s = cod[0], cod[2]
        b.add(Spider(0, 3, n), (), (outs[0], outs[1], outs[3]))
        b.add(Spider(0, 1, s), (), (outs[2],))
    elif cls == "does":
        b.add(Cap(cod[0]), (), (outs[0], outs[3]))
        b.add(Cap(cod[1]), (), (outs[1], outs[2]))
    elif cls == "not":
        s = cod[1]
        b.add(Cap(cod[0]), (), (outs[0], outs[3]))
        x = b.fresh(s, "x")
        b.add(Cap(s), (), (x, outs[2]))
        b.add(Box("not", (s,), (s,), fixed="pauli_x"), (x,), (outs[1],))
    else:
        raise UnknownClass(f"no internal wiring for class {cls!r} of {w.name!r}")


def apply_internal_wirings(d: Diagram) -> Diagram:
    """Replace word states by their class-specific internal wiring."""
    b = _Builder(d)
    for node in d.nodes:
        if isinstance(node.gen, WordState):
            _wire_word(b, node)
        else:
            b.add(node.gen, node.inputs, node.outputs)
    return Diagram(b.wires, tuple(b.nodes), d.inputs, d.outputs)


def with_deletes(d: Diagram) -> Diagram:
    """Close every output with the delete effect (truth-value readout)."""
    nodes = list(d.nodes) + [Node(Effect("delete", (d.wires[w],)), (w,), ()) for w in d.outputs]
    return Diagram(d.wires, tuple(nodes), d.inputs, ())


def unbundle(d: Diagram) -> Diagram:
    """Expose the noun wires behind every bundled sentence output."""
    bundles = {
        n.outputs[0]: n
        for n in d.nodes
        if isinstance(n.gen, Box) and n.gen.fixed == "identity" and n.gen.name == "bundle"
    }
    outputs, drop = [], set()
    for w in d.outputs:
        if w in bundles:
            outputs.extend(bundles[w].inputs)
            drop.add(w)
        else:
            outputs.append(w)
    nodes = tuple(n for n in d.nodes if not (n.outputs and n.outputs[0] in drop and n in bundles.values()))
    wires = {w: t for w, t in d.wires.items() if w not in drop}
    return Diagram(wires, nodes, d.inputs, tuple(outputs))


def compose_sentences(d1: Diagram, d2: Diagram, shared: Mapping[str, str]) -> Diagram:
    """Feed d1's unbundled outputs into d2 in place of repeated noun states.

    ``shared`` maps a noun name in d2 to the d1 output wire that carries it.
    The result has d1's unconsumed outputs followed by d2's unbundled ones.
    """
    if not d2.nodes and not d2.wires:
        return d1
    a, b = unbundle(d1), unbundle(d2)
    ren1 = {w: f"a.{w}" for w in a.wires}
    ren2 = {w: f"b.{w}" for w in b.wires}
    consumed = set()
    nodes2 = []
    for node in b.nodes:
        gen = node.gen
        if isinstance(gen, WordState) and gen.name in shared and gen.cls in (None, "noun") \
                and gen.name not in {n for n, _ in consumed}:
            src = shared[gen.name]
            if src not in a.outputs:
                raise TypeMismatch(f"{src!r} is not an output of the first diagram")
            if a.wires[src] != b.wires[node.outputs[0]] or len(node.outputs) != 1:
                raise TypeMismatch(f"cannot identify {gen.name!r} with wire {src!r}")
            ren2[node.outputs[0]] = ren1[src]
            consumed.add((gen.name, src))
            continue
        nodes2.append(node)
    missing = set(shared) - {n for n, _ in consumed}
    if missing:
        raise TypeMismatch(f"no noun state named {sorted(missing)} in the second diagram")
    used = {src for _, src in consumed}
    wires = {ren1[w]: t for w, t in a.wires.items()}
    wires.update({ren2[w]: t for w, t in b.wires.items() if ren2[w] not in wires})
    nodes = [Node(n.gen, tuple(ren1[w] for w in n.inputs), tuple(ren1[w] for w in n.outputs)) for n in a.nodes]
    nodes += [Node(n.gen, tuple(ren2[w] for w in n.inputs), tuple(ren2[w] for w in n.outputs)) for n in nodes2]
    outputs = [ren1[w] for w in a.outputs if w not in used] + [ren2[w] for w in b.outputs]
    inputs = [ren1[w] for w in a.inputs] + [ren2[w] for w in b.inputs]
    return Diagram(wires, tuple(nodes), tuple(inputs), tuple(outputs))


# semantics ---------------------------------------------------------------------

def spider_tensor(n_legs: int, dim: int, phase: float = 0.0) -> np.ndarray:
    t = np.zeros((dim,) * n_legs, dtype=complex)
    for i in range(dim):
        t[(i,) * n_legs] += np.exp(1j * phase * bin(i).count("1"))
    return t


def pauli_x_power(qubits: int) -> np.ndarray:
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    out = np.ones((1, 1), dtype=complex)
    for _ in range(qubits):
        out = np.kron(out, x)
    return out


def _bound(bindings, name, shape):
    if name not in bindings:
        raise ShapeMismatch(f"no tensor bound for {name!r}")
    t = np.asarray(bindings[name], dtype=complex)
    if t.size != int(np.prod(shape)):
        raise ShapeMismatch(f"{name!r} bound to shape {t.shape}, expected {shape}")
    return t.reshape(shape)


def generator_tensor(gen, bindings: Mapping[str, np.ndarray]) -> np.ndarray:
    """Tensor with axes ordered outputs then inputs."""
    cod = tuple(t.dim for t in gen.cod)
    dom = tuple(t.dim for t in gen.dom)
    if isinstance(gen, WordState):
        return _bound(bindings, gen.name, cod)
    if isinstance(gen, (Cap, Cup)):
        return np.eye(gen.wire.dim, dtype=complex)
    if isinstance(gen, Spider):
        t = spider_tensor(gen.n_in + gen.n_out, gen.wire.dim, gen.phase)
        return t
    if isinstance(gen, Effect):
        if gen.name == "delete":
            return np.ones(dom, dtype=complex)
        return _bound(bindings, gen.name, dom)
    if isinstance(gen, Box):
        size_out, size_in = int(np.prod(cod)), int(np.prod(dom))
        if gen.fixed == "identity":
            if size_out != size_in:
                raise ShapeMismatch(f"identity box {gen.name!r} changes dimension")
            return np.eye(size_out, dtype=complex).reshape(cod + dom)
        if gen.fixed == "pauli_x":
            q = sum(t.qubits for t in gen.cod)
            return pauli_x_power(q).reshape(cod + dom)
        if gen.fixed is not None:
            raise ShapeMismatch(f"unknown fixed box {gen.fixed!r}")
        return _bound(bindings, gen.name, cod + dom)
    raise TypeError(f"not a generator: {gen!r}")


def evaluate(d: Diagram, bindings: Mapping[str, np.ndarray] | None = None, order=None) -> np.ndarray:
    """Contract the diagram; axes are the output wires then the input wires."""
    bindings = bindings or {}
    tensors, labels = [], []
    for node in d.nodes:
        tensors.append(generator_tensor(node.gen, bindings))
        labels.append(list(node.outputs) + list(node.inputs))
    in_labels = []
    for w in d.inputs:
        if w in d.outputs:
            tensors.append(np.eye(d.wires[w].dim, dtype=complex))
            labels.append([w, ("in", w)])
            in_labels.append(("in", w))
        else:
            in_labels.append(w)
    return contract(tensors, labels, list(d.outputs) + in_labels, order=order)


def _check_same_cod(d1: Diagram, d2: Diagram):
    if d1.cod != d2.cod or d1.dom != d2.dom:
        raise TypeMismatch("diagrams have different boundary types")


def compare(d1: Diagram, d2: Diagram, bindings=None) -> float:
    """Raw similarity ``|<d1|d2>|^2`` over the flattened outputs."""
    _check_same_cod(d1, d2)
    v1, v2 = evaluate(d1, bindings).ravel(), evaluate(d2, bindings).ravel()
    return float(abs(np.vdot(v1, v2)) ** 2)


def compare_cosine(d1: Diagram, d2: Diagram, bindings=None) -> float:
    """Similarity normalised by both norms; 0 when either side vanishes."""
    _check_same_cod(d1, d2)
    v1, v2 = evaluate(d1, bindings).ravel(), evaluate(d2, bindings).ravel()
    n = np.vdot(v1, v1).real * np.vdot(v2, v2).real
    return float(abs(np.vdot(v1, v2)) ** 2 / n) if n > 0 else 0.0


# Choi-Jamiolkowski bending ----------------------------------------------------

def state_to_map(psi: np.ndarray) -> np.ndarray:
    """Bend the first leg of a bipartite state down with a cup."""
    psi = np.asarray(psi, dtype=complex)
    q = int(np.log2(psi.shape[0]))
    n = WireType(NOUN, q)
    d = Diagram(
        {"x": n, "a": n, "b": n},
        (Node(WordState("psi", (n, n)), (), ("a", "b")), Node(Cup(n), ("x", "a"), ())),
        ("x",),
        ("b",),
    )
    return evaluate(d, {"psi": psi})


def map_to_state(m: np.ndarray) -> np.ndarray:
    """Feed one leg of a cap through a map."""
    m = np.asarray(m, dtype=complex)
    q = int(np.log2(m.shape[0]))
    n = WireType(NOUN, q)
    d = Diagram(
        {"a": n, "b": n, "c": n},
        (Node(Cap(n), (), ("a", "b")), Node(Box("m", (n,), (n,)), ("b",), ("c",))),
        (),
        ("a", "c"),
    )
    return evaluate(d, {"m": m})


# text format -------------------------------------------------------------------

def _ws(ws):
    return " ".join(ws)


def to_text(d: Diagram) -> str:
    lines = [f"WIRE {w} {t.kind} {t.qubits}" for w, t in d.wires.items()]
    if d.inputs:
        lines.append("INPUT " + _ws(d.inputs))
    for node in d.nodes:
        g, ins, outs = node.gen, _ws(node.inputs), _ws(node.outputs)
        if isinstance(g, WordState):
            lines.append(f"WORD {g.name} {g.cls or '-'} {g.ansatz or '-'} {int(g.core)} -> {outs}")
        elif isinstance(g, Cap):
            lines.append(f"CAP -> {outs}")
        elif isinstance(g, Cup):
            lines.append(f"CUP {ins} ->")
        elif isinstance(g, Spider):
            lines.append(f"SPIDER {g.color} {float(g.phase)!r} {ins} -> {outs}")
        elif isinstance(g, Effect):
            lines.append(f"EFFECT {g.name} {ins} ->")
        elif isinstance(g, Box):
            lines.append(f"BOX {g.name} {g.fixed or '-'} {ins} -> {outs}")
    if d.outputs:
        lines.append("OUTPUT " + _ws(d.outputs))
    return "\n".join(l.rstrip() for l in lines) + "\n"


def from_text(text: str) -> Diagram:
    wires: dict[str, WireType] = {}
    nodes, inputs, outputs = [], (), ()
    for raw in text.splitlines():
        if not raw.strip() or raw.startswith("#"):
            continue
        head, _, rest = raw.partition(" ")
        if head == "WIRE":
            w, kind, q = rest.split()
            wires[w] = WireType(kind, int(q))
            continue
        if head == "INPUT":
            inputs = tuple(rest.split())
            continue
        if head == "OUTPUT":
            outputs = tuple(rest.split())
            continue
        left, _, right = rest.partition("->")
        args, outs = left.split(), tuple(right.split())
        if head == "WORD":
            name, cls, anz, core = args
            gen = WordState(name, tuple(wires[w] for w in outs), None if cls == "-" else cls,
                            None if anz == "-" else anz, bool(int(core)))
            ins = ()
        elif head == "CAP":
            gen, ins = Cap(wires[outs[0]]), ()
        elif head == "CUP":
            ins = tuple(args)
            gen = Cup(wires[ins[0]])
        elif head == "SPIDER":
            color, phase, *ins = args
            ins = tuple(ins)
            wire = wires[(ins + outs)[0]]
            gen = Spider(len(ins), len(outs), wire, float(phase), color)
        elif head == "EFFECT":
            name, *ins = args
            ins = tuple(ins)
            gen = Effect(name, tuple(wires[w] for w in ins))
        elif head == "BOX":
            name, fixed, *ins = args
            ins = tuple(ins)
            gen = Box(name, tuple(wires[w] for w in ins), tuple(wires[w] for w in outs),
                      None if fixed == "-" else fixed)
        else:
            raise ValueError(f"unknown diagram line {raw!r}")
        nodes.append(Node(gen, ins, outs))
    return Diagram(wires, tuple(nodes), inputs, outputs)


def to_dot(d: Diagram) -> str:
    lines = ["digraph diagram {", "  rankdir=TB;"]
    endpoint = {}
    for k, node in enumerate(d.nodes):
        g = node.gen
        label = type(g).__name__
        if isinstance(g, (WordState, Effect, Box)):
            label += f" {g.name}"
        elif isinstance(g, Spider):
            label += f" {g.phase:g}"
        lines.append(f'  n{k} [label="{label}"];')
        for w in node.outputs:
            endpoint.setdefault(w, [None, None])[0] = f"n{k}"
        for w in node.inputs:
            endpoint.setdefault(w, [None, None])[1] = f"n{k}"
    for w in d.inputs:
        lines.append(f'  in_{w} [shape=point];')
        endpoint.setdefault(w, [None, None])[0] = f"in_{w}"
    for w in d.outputs:
        lines.append(f'  out_{w} [shape=point];')
        endpoint.setdefault(w, [None, None])[1] = f"out_{w}"
    for w, (src, dst) in endpoint.items():
        t = d.wires[w]
        lines.append(f'  {src} -> {dst} [label="{w}:{t.kind}/{t.qubits}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
