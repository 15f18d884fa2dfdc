"""Phased Z/X spider graphs: translation from diagrams, fusion, and extraction.

Every graph carries a global scalar ``const * exp(i * phase)`` so that its
tensor equals the diagram it came from exactly. Word states are translated
gate by gate into nodes owned by that word; fusion only touches grammar nodes
(owner ``None``), so word blocks stay recognisable for extraction.
"""
from __future__ import annotations

import cmath
import copy
import itertools
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import diagram as dg
from ._contract import contract
from .circuit import Circuit, Gate, Param, instantiate_word
from .errors import ExtractionFailed, MissingParam, Unsupported

TWO_PI = 2 * math.pi
SQRT2 = math.sqrt(2)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2


@dataclass(frozen=True)
class Phase:
    """Linear phase ``const + sum(coeff * param)`` in radians."""

    const: float = 0.0
    terms: tuple[tuple[tuple[str, int], float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "const", float(self.const))
        object.__setattr__(self, "terms", tuple((tuple(k), float(c)) for k, c in self.terms))

    @classmethod
    def of(cls, value) -> Phase:
        if isinstance(value, Phase):
            return value
        if isinstance(value, Param):
            return cls(0.0, ((value.key, float(value.sign)),))
        return cls(float(value) % TWO_PI)

    def _norm(self, const, terms) -> Phase:
        acc: dict = {}
        for key, c in terms:
            acc[key] = acc.get(key, 0.0) + c
        kept = tuple(sorted((k, c) for k, c in acc.items() if c != 0.0))
        return Phase(const % TWO_PI, kept)

    def __add__(self, other) -> Phase:
        other = Phase.of(other)
        return self._norm(self.const + other.const, self.terms + other.terms)

    def scale(self, k: float) -> Phase:
        return self._norm(self.const * k, tuple((key, c * k) for key, c in self.terms))

    def __neg__(self) -> Phase:
        return self.scale(-1.0)

    def __sub__(self, other) -> Phase:
        return self + (-Phase.of(other))

    @property
    def is_constant(self) -> bool:
        return not self.terms

    def is_zero(self, tol: float = 1e-12) -> bool:
        c = self.const % TWO_PI
        return self.is_constant and min(c, TWO_PI - c) < tol

    def value(self, params: Mapping | None = None) -> float:
        total = self.const
        for key, c in self.terms:
            if params is None or key not in params:
                raise MissingParam(*key)
            total += c * float(params[key])
        return total

    def __str__(self):
        parts = [repr(self.const)] + [f"{w}.{s}:{c!r}" for (w, s), c in self.terms]
        return ";".join(parts)

    @classmethod
    def parse(cls, text: str) -> Phase:
        const, *rest = text.split(";")
        terms = []
        for item in rest:
            key, _, coeff = item.rpartition(":")
            word, _, slot = key.rpartition(".")
            terms.append(((word, int(slot)), float(coeff)))
        return cls(float(const), tuple(terms))


@dataclass
class ZxNode:
    color: str  # Z, X, H, in, out
    phase: Phase = Phase()
    owner: str | None = None


class ZxGraph:
    def __init__(self):
        self.nodes: dict[int, ZxNode] = {}
        self.edges: dict[int, tuple[int, int]] = {}
        self.inputs: list[int] = []
        self.outputs: list[int] = []
        self.scalar_const: complex = 1.0
        self.scalar_phase: Phase = Phase()
        self.words: dict[str, dict] = {}
        self.boxes: dict[str, str] = {}
        self._ids = itertools.count()
        self._eids = itertools.count()

    # structure ---------------------------------------------------------------
    def add_node(self, color: str, phase=0.0, owner: str | None = None) -> int:
        nid = next(self._ids)
        self.nodes[nid] = ZxNode(color, Phase.of(phase), owner)
        return nid

    def add_edge(self, u: int, v: int) -> int:
        eid = next(self._eids)
        self.edges[eid] = (u, v)
        return eid

    def remove_edge(self, eid: int):
        del self.edges[eid]

    def remove_node(self, nid: int):
        for eid in self.incident(nid):
            del self.edges[eid]
        del self.nodes[nid]

    def incident(self, nid: int) -> list[int]:
        return [e for e, (u, v) in self.edges.items() if nid in (u, v)]

    def degree(self, nid: int) -> int:
        return sum((u == nid) + (v == nid) for u, v in self.edges.values())

    def other(self, eid: int, nid: int) -> int:
        u, v = self.edges[eid]
        return v if u == nid else u

    def neighbours(self, nid: int) -> list[int]:
        return [self.other(e, nid) for e in self.incident(nid)]

    def multiply_scalar(self, const: complex = 1.0, phase=0.0):
        self.scalar_const *= const
        self.scalar_phase = self.scalar_phase + Phase.of(phase)

    def copy(self) -> ZxGraph:
        return copy.deepcopy(self)

    def scalar(self, params: Mapping | None = None) -> complex:
        return self.scalar_const * cmath.exp(1j * self.scalar_phase.value(params))

    # semantics ------------------------------------------------------------------
    def tensor(self, params: Mapping | None = None) -> np.ndarray:
        """Dense tensor, one axis per output then per input boundary."""
        tensors, labels = [], []
        for nid, node in self.nodes.items():
            legs = []
            for e, (u, v) in self.edges.items():
                if u == nid:
                    legs.append(e)
                if v == nid:
                    legs.append(e)
            if node.color in ("in", "out"):
                if len(legs) != 1:
                    raise ValueError(f"boundary {nid} must have degree 1")
                tensors.append(np.eye(2, dtype=complex))
                labels.append([("b", nid), legs[0]])
                continue
            if node.color == "H":
                if len(legs) != 2:
                    raise ValueError("H nodes have degree 2")
                tensors.append(_H)
                labels.append(legs)
                continue
            alpha = node.phase.value(params)
            t = dg.spider_tensor(len(legs), 2, alpha)
            if node.color == "X":
                for axis in range(len(legs)):
                    t = np.moveaxis(np.tensordot(_H, t, axes=([1], [axis])), 0, axis)
            tensors.append(t)
            labels.append(legs)
        out = [("b", n) for n in self.outputs] + [("b", n) for n in self.inputs]
        return self.scalar(params) * contract(tensors, labels, out)

    # text ------------------------------------------------------------------------
    def to_text(self) -> str:
        c = complex(self.scalar_const)
        lines = [f"SCALAR {c.real!r} {c.imag!r} {self.scalar_phase}"]
        for nid, n in sorted(self.nodes.items()):
            lines.append(f"NODE {nid} {n.color} {n.phase} {n.owner or '-'}")
        for eid, (u, v) in sorted(self.edges.items()):
            lines.append(f"EDGE {u} {v}")
        lines.append("INPUT" + "".join(f" {n}" for n in self.inputs))
        lines.append("OUTPUT" + "".join(f" {n}" for n in self.outputs))
        for owner, w in self.words.items():
            ports = "|".join(",".join(map(str, p)) for p in w["ports"])
            tc, tp = w["translation"]
            lines.append(
                f"WORD {owner} {w['name']} {w['cls']} {w['ansatz']} {w['layers']} {w['basis_scope']} "
                f"{w['template_scalar']!r} {tc.real!r} {tc.imag!r} {tp} {ports or '-'}"
            )
        for owner, name in self.boxes.items():
            lines.append(f"BOX {owner} {name}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> ZxGraph:
        g = cls()
        top = -1
        for raw in text.splitlines():
            t = raw.split()
            if not t:
                continue
            head = t[0]
            if head == "SCALAR":
                g.scalar_const = complex(float(t[1]), float(t[2]))
                g.scalar_phase = Phase.parse(t[3])
            elif head == "NODE":
                nid = int(t[1])
                g.nodes[nid] = ZxNode(t[2], Phase.parse(t[3]), None if t[4] == "-" else t[4])
                top = max(top, nid)
            elif head == "EDGE":
                g.add_edge(int(t[1]), int(t[2]))
            elif head == "INPUT":
                g.inputs = [int(x) for x in t[1:]]
            elif head == "OUTPUT":
                g.outputs = [int(x) for x in t[1:]]
            elif head == "WORD":
                owner, name, wcls, anz, layers, scope, tmpl, tre, tim, tph, ports = t[1:]
                g.words[owner] = {
                    "name": name, "cls": wcls, "ansatz": anz, "layers": int(layers),
                    "basis_scope": scope, "template_scalar": float(tmpl),
                    "translation": (complex(float(tre), float(tim)), Phase.parse(tph)),
                    "ports": [] if ports == "-" else [[int(x) for x in p.split(",")] for p in ports.split("|")],
                }
            elif head == "BOX":
                g.boxes[t[1]] = t[2]
            else:
                raise ValueError(f"unknown zx line {raw!r}")
        g._ids = itertools.count(top + 1)
        return g

    def to_dot(self) -> str:
        colors = {"Z": "white", "X": "gray", "H": "yellow", "in": "black", "out": "black"}
        lines = ["graph zx {"]
        for nid, n in sorted(self.nodes.items()):
            label = n.color if n.phase.is_zero() else f"{n.color} {n.phase}"
            shape = "box" if n.color == "H" else "circle"
            lines.append(f'  n{nid} [label="{label}", style=filled, fillcolor={colors[n.color]}, shape={shape}];')
        for u, v in self.edges.values():
            lines.append(f"  n{u} -- n{v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


# fragments ---------------------------------------------------------------------

def _half_neg(angle) -> Phase:
    """``-angle/2``; constants are halved before any reduction mod 2pi."""
    if isinstance(angle, (Phase, Param)):
        return Phase.of(angle).scale(-0.5)
    return Phase.of(-float(angle) / 2)


def cnot() -> ZxGraph:
    """Z spider on the control joined to an X spider on the target."""
    g = ZxGraph()
    i0, i1 = g.add_node("in"), g.add_node("in")
    z, x = g.add_node("Z"), g.add_node("X")
    o0, o1 = g.add_node("out"), g.add_node("out")
    g.add_edge(i0, z)
    g.add_edge(z, o0)
    g.add_edge(i1, x)
    g.add_edge(x, o1)
    g.add_edge(z, x)
    g.inputs, g.outputs = [i0, i1], [o0, o1]
    g.multiply_scalar(SQRT2)
    return g


def euler(alpha, beta, gamma) -> ZxGraph:
    """Z(alpha), X(beta), Z(gamma) in sequence; equals ``RZ(gamma) RX(beta) RZ(alpha)``."""
    g = ZxGraph()
    i = g.add_node("in")
    a, b, c = g.add_node("Z", alpha), g.add_node("X", beta), g.add_node("Z", gamma)
    o = g.add_node("out")
    for u, v in ((i, a), (a, b), (b, c), (c, o)):
        g.add_edge(u, v)
    g.inputs, g.outputs = [i], [o]
    g.multiply_scalar(1.0, _half_neg(alpha) + _half_neg(beta) + _half_neg(gamma))
    return g


# translation from diagrams ----------------------------------------------------------

class _Translator:
    def __init__(self, g: ZxGraph, owner: str):
        self.g = g
        self.owner = owner
        self.frontier: dict[int, int] = {}
        self.const = 1.0 + 0j
        self.phase = Phase()

    def prep(self, q: int):
        self.frontier[q] = self.g.add_node("X", 0.0, self.owner)
        self.const /= SQRT2

    def _step(self, q: int, nid: int):
        self.g.add_edge(self.frontier[q], nid)
        self.frontier[q] = nid

    def gate(self, gate: Gate):
        g, o = self.g, self.owner
        if gate.kind == "CNOT":
            c, t = gate.qubits
            z, x = g.add_node("Z", 0.0, o), g.add_node("X", 0.0, o)
            self._step(c, z)
            self._step(t, x)
            g.add_edge(z, x)
            self.const *= SQRT2
        elif gate.kind in ("RZ", "RX"):
            (q,) = gate.qubits
            self._step(q, g.add_node("Z" if gate.kind == "RZ" else "X", gate.param, o))
            self.phase = self.phase + _half_neg(gate.param)
        elif gate.kind == "H":
            self._step(gate.qubits[0], g.add_node("H", 0.0, o))
        elif gate.kind == "X":
            self._step(gate.qubits[0], g.add_node("X", math.pi, o))
        else:
            raise Unsupported(f"gate {gate.kind}")

    def post(self, q: int, basis: str, outcome: int):
        color = "X" if basis == "Z" else "Z"
        self._step(q, self.g.add_node(color, math.pi * outcome, self.owner))
        self.const /= SQRT2


def _translate_word(g: ZxGraph, owner: str, ws: dg.WordState, basis_scope: str) -> list[list[int]]:
    layers = ws.cod[0].qubits
    if any(t.qubits != layers for t in ws.cod):
        raise Unsupported(f"{ws.name}: ports of unequal width")
    tmpl = instantiate_word(ws.name, ws.cls, ws.ansatz, layers, basis_scope)
    if tmpl.ports != len(ws.cod):
        raise Unsupported(f"{ws.name}: class {ws.cls} expects {tmpl.ports} wires, got {len(ws.cod)}")
    circ, port_q = tmpl.state_circuit()
    tr = _Translator(g, owner)
    for q in range(circ.n_qubits):
        tr.prep(q)
    for gate in circ.gates:
        tr.gate(gate)
    for q, b, o in circ.postselects:
        tr.post(q, b, o)
    ports = [[tr.frontier[q] for q in qs] for qs in port_q]
    g.words[owner] = {
        "name": ws.name, "cls": ws.cls, "ansatz": str(tmpl.ansatz), "layers": layers,
        "basis_scope": basis_scope, "template_scalar": float(circ.scalar.real),
        "translation": (tr.const, tr.phase), "ports": ports,
    }
    g.multiply_scalar(tr.const * circ.scalar, tr.phase)
    return ports


def from_diagram(d: dg.Diagram, basis_scope: str = "global") -> ZxGraph:
    """Translate a diagram qubit by qubit; the tensors agree exactly."""
    g = ZxGraph()
    # attach[(wire, qubit, end)] is the node holding that end of the qubit line
    attach: dict[tuple[str, int, str], int] = {}

    def ports_of(wires, end, nodes_for):
        for w in wires:
            for k in range(d.wires[w].qubits):
                attach[(w, k, end)] = nodes_for(w, k)

    for w in d.inputs:
        for k in range(d.wires[w].qubits):
            nid = g.add_node("in")
            g.inputs.append(nid)
            attach[(w, k, "src")] = nid
    for idx, node in enumerate(d.nodes):
        gen = node.gen
        if isinstance(gen, dg.WordState):
            if gen.cls not in ("noun", "adj", "tverb", "dtverb"):
                raise Unsupported(f"word {gen.name!r} of class {gen.cls!r} has no ansatz")
            owner = f"{gen.name}@{idx}"
            ports = _translate_word(g, owner, gen, basis_scope)
            for p, w in enumerate(node.outputs):
                for k in range(d.wires[w].qubits):
                    attach[(w, k, "src")] = ports[p][k]
        elif isinstance(gen, (dg.Cap, dg.Cup)):
            for k in range(gen.wire.qubits):
                nid = g.add_node("Z")
                for w in node.inputs:
                    attach[(w, k, "dst")] = nid
                for w in node.outputs:
                    attach[(w, k, "src")] = nid
        elif isinstance(gen, dg.Spider):
            for k in range(gen.wire.qubits):
                nid = g.add_node("Z", gen.phase)
                for w in node.inputs:
                    attach[(w, k, "dst")] = nid
                for w in node.outputs:
                    attach[(w, k, "src")] = nid
        elif isinstance(gen, dg.Effect):
            if gen.name != "delete":
                raise Unsupported(f"effect {gen.name!r}")
            ports_of(node.inputs, "dst", lambda w, k: g.add_node("Z"))
        elif isinstance(gen, dg.Box) and gen.fixed in ("identity", "pauli_x"):
            ins = [(w, k) for w in node.inputs for k in range(d.wires[w].qubits)]
            outs = [(w, k) for w in node.outputs for k in range(d.wires[w].qubits)]
            if len(ins) != len(outs):
                raise Unsupported(f"box {gen.name!r} changes width")
            owner = None
            if gen.fixed == "pauli_x":
                owner = f"{gen.name}@{idx}"
                g.boxes[owner] = gen.name
            for a, b in zip(ins, outs):
                nid = g.add_node("Z" if owner is None else "X", 0.0 if owner is None else math.pi, owner)
                attach[(a[0], a[1], "dst")] = nid
                attach[(b[0], b[1], "src")] = nid
        else:
            raise Unsupported(f"generator {gen!r}")
    for w in d.outputs:
        for k in range(d.wires[w].qubits):
            nid = g.add_node("out")
            g.outputs.append(nid)
            attach[(w, k, "dst")] = nid
    for w, t in d.wires.items():
        for k in range(t.qubits):
            g.add_edge(attach[(w, k, "src")], attach[(w, k, "dst")])
    return g


# rewriting ------------------------------------------------------------------------

def _grammar(g: ZxGraph, nid: int) -> bool:
    n = g.nodes[nid]
    return n.owner is None and n.color in ("Z", "X")


def fuse(g: ZxGraph) -> ZxGraph:
    """Spider fusion, self-loop and identity removal on grammar nodes."""
    g = g.copy()
    changed = True
    while changed:
        changed = False
        for nid in sorted(g.nodes):
            if nid not in g.nodes or not _grammar(g, nid):
                continue
            node = g.nodes[nid]
            loops = [e for e in g.incident(nid) if g.edges[e] == (nid, nid)]
            if loops:
                for e in loops:
                    g.remove_edge(e)
                changed = True
                continue
            deg = g.degree(nid)
            if deg == 0 and node.phase.is_constant:
                g.multiply_scalar(1 + cmath.exp(1j * node.phase.const))
                g.remove_node(nid)
                changed = True
                continue
            partner = next(
                (
                    m for m in g.neighbours(nid)
                    if m != nid and _grammar(g, m) and g.nodes[m].color == node.color
                ),
                None,
            )
            if partner is not None:
                _merge(g, nid, partner)
                changed = True
                continue
            if deg == 2 and node.phase.is_zero():
                e1, e2 = g.incident(nid)
                a, b = g.other(e1, nid), g.other(e2, nid)
                g.remove_node(nid)
                g.add_edge(a, b)
                changed = True
    return g


def _merge(g: ZxGraph, keep: int, gone: int):
    g.nodes[keep].phase = g.nodes[keep].phase + g.nodes[gone].phase
    for e in g.incident(gone):
        u, v = g.edges[e]
        g.edges[e] = (keep if u == gone else u, keep if v == gone else v)
    del g.nodes[gone]


def color_change(g: ZxGraph, nid: int) -> ZxGraph:
    """Swap a spider's colour and put a Hadamard on each of its legs."""
    g = g.copy()
    node = g.nodes[nid]
    if node.color not in ("Z", "X"):
        raise ValueError("only spiders change colour")
    node.color = "X" if node.color == "Z" else "Z"
    for e in g.incident(nid):
        u, v = g.edges[e]
        if u == v:
            continue
        h = g.add_node("H", 0.0, node.owner)
        other = v if u == nid else u
        g.remove_edge(e)
        g.add_edge(nid, h)
        g.add_edge(h, other)
    return g


def cancel_hadamards(g: ZxGraph) -> ZxGraph:
    """Remove adjacent pairs of Hadamard nodes with the same owner."""
    g = g.copy()
    changed = True
    while changed:
        changed = False
        for nid in sorted(g.nodes):
            if nid not in g.nodes or g.nodes[nid].color != "H":
                continue
            for m in g.neighbours(nid):
                if m != nid and g.nodes[m].color == "H" and g.nodes[m].owner == g.nodes[nid].owner:
                    outer = [x for x in g.neighbours(nid) if x != m] + [x for x in g.neighbours(m) if x != nid]
                    if len(outer) != 2:
                        continue
                    g.remove_node(nid)
                    g.remove_node(m)
                    g.add_edge(*outer)
                    changed = True
                    break
            if changed:
                break
    return g


# extraction -------------------------------------------------------------------------

_NOUNLIKE = ("noun",)


class _Extractor:
    def __init__(self, g: ZxGraph, mode: str):
        if mode not in ("parallel", "sequential"):
            raise ValueError(f"unknown mode {mode!r}")
        if g.inputs:
            raise ExtractionFailed("graphs with open inputs are outside the template family")
        self.g, self.mode = g, mode
        self.n = 0
        self.gates: list[Gate] = []
        self.posts: list[tuple[int, str, int]] = []
        self.scalar = 1.0 + 0j
        self.terminal: dict[int, tuple[str, int, int]] = {}
        for owner, w in g.words.items():
            for p, nodes in enumerate(w["ports"]):
                for k, nid in enumerate(nodes):
                    self.terminal[nid] = (owner, p, k)
        self.have: dict[int, int] = {}
        self.templates = {
            owner: instantiate_word(w["name"], w["cls"], w["ansatz"], w["layers"], w["basis_scope"])
            for owner, w in g.words.items()
        }
        self.bent = {
            owner for owner, w in g.words.items()
            if mode == "sequential" and w["cls"] in ("tverb", "dtverb")
        }

    def new_qubit(self) -> int:
        self.n += 1
        return self.n - 1

    def emit_block(self, blk, qubit_of_local: dict[int, int], word: str):
        m = {}
        for local in range(blk.n_qubits):
            m[local] = qubit_of_local[local] if local in qubit_of_local else self.new_qubit()
        self.gates += [gt.remap([m[i] for i in range(blk.n_qubits)]) for gt in blk.gates]
        self.posts += [(m[q], b, o) for q, b, o in blk.postselects]
        self.scalar *= blk.scalar
        return m

    def chain_gates(self, chain: list[int], q: int):
        for nid in chain:
            node = self.g.nodes[nid]
            if node.color == "H":
                self.gates.append(Gate("H", (q,)))
                continue
            if not node.phase.is_constant:
                raise ExtractionFailed("symbolic phase on a grammar wire")
            a = node.phase.const
            if node.color == "X" and abs(a - math.pi) < 1e-12:
                self.gates.append(Gate("X", (q,)))
            elif not node.phase.is_zero():
                self.gates.append(Gate("RZ" if node.color == "Z" else "RX", (q,), a))
                self.scalar *= cmath.exp(0.5j * a)

    # graph walking
    def site(self, nid):
        if nid in self.terminal:
            return ("t", nid)
        node = self.g.nodes[nid]
        if node.color == "out":
            return ("o", nid)
        if node.owner is None and node.color == "Z":
            return ("s", nid)
        return None

    def links(self):
        g = self.g
        seen, out = set(), []
        for nid in sorted(g.nodes):
            here = self.site(nid)
            if here is None:
                continue
            for e in g.incident(nid):
                if e in seen:
                    continue
                if here[0] == "t" and g.nodes[g.other(e, nid)].owner == g.nodes[nid].owner:
                    continue
                seen.add(e)
                chain, prev, cur, edge = [], nid, g.other(e, nid), e
                while self.site(cur) is None:
                    node = g.nodes[cur]
                    if node.owner in g.words:
                        raise ExtractionFailed("word-internal node reached from the grammar")
                    if node.color == "X" and node.owner is None:
                        raise ExtractionFailed("grammar X spiders are outside the template family")
                    if g.degree(cur) != 2:
                        raise ExtractionFailed(f"node {cur} of degree {g.degree(cur)} on a grammar wire")
                    chain.append(cur)
                    nxt = [x for x in g.incident(cur) if x != edge]
                    edge = nxt[0]
                    prev, cur = cur, g.other(edge, cur)
                seen.add(edge)
                there = self.site(cur)
                if there == here:
                    raise ExtractionFailed("grammar wire loops back to its spider")
                out.append((here, there, chain))
        return out

    def run(self) -> Circuit:
        g = self.g
        # state-form words first, in sentence order
        for owner, tmpl in self.templates.items():
            if owner in self.bent:
                continue
            circ, port_q = tmpl.state_circuit()
            base = self.n
            self.n += circ.n_qubits
            self.gates += [gt.shifted(base) for gt in circ.gates]
            self.posts += [(q + base, b, o) for q, b, o in circ.postselects]
            self.scalar *= circ.scalar
            for p, qs in enumerate(port_q):
                for k, q in enumerate(qs):
                    self.have[g.words[owner]["ports"][p][k]] = q + base
        # normalise links so every one touches a spider
        spiders: dict = {}
        vcount = itertools.count()
        for nid, node in g.nodes.items():
            if node.owner is None and node.color == "Z":
                spiders[(0, nid)] = {"phase": node.phase, "legs": []}
        for k, (a, b, chain) in enumerate(self.links()):
            if a[0] != "s" and b[0] != "s":
                if a[0] == "o" and b[0] == "o":
                    raise ExtractionFailed("bare wire between two outputs")
                v = ("v", next(vcount))
                spiders[(1, v[1])] = {"phase": Phase(), "legs": []}
                self._leg(spiders, v, a, chain, k, "a")
                self._leg(spiders, v, b, [], k, "b")
                continue
            if a[0] == "s":
                self._leg(spiders, a, b, list(reversed(chain)), k, "a")
            if b[0] == "s":
                self._leg(spiders, b, a, chain, k, "b")
        handoff: dict = {}
        done: set = set()
        out_qubit: dict[int, int] = {}
        while len(done) < len(spiders):
            ready = [s for s in sorted(spiders, key=str) if s not in done and self._ready(spiders[s])]
            ready.sort(key=lambda s: (s[0], s[1]))
            if not ready:
                raise ExtractionFailed("no spider can be scheduled; dependency cycle")
            s = ready[0]
            self._process(s, spiders, handoff, done, out_qubit)
            done.add(s)
        outputs = []
        for o in g.outputs:
            if o not in out_qubit:
                raise ExtractionFailed(f"output {o} not reached")
            outputs.append(out_qubit[o])
        # constant remainder of the graph scalar after removing word translations
        const, phase = g.scalar_const, g.scalar_phase
        for w in g.words.values():
            tc, tp = w["translation"]
            const /= tc * w["template_scalar"]
            phase = phase - tp
        if not phase.is_constant:
            raise ExtractionFailed("graph scalar depends on parameters")
        self.scalar *= const * cmath.exp(1j * phase.const)
        used = {q for q, _, _ in self.posts} | set(outputs)
        if used != set(range(self.n)):
            raise ExtractionFailed("some qubits are neither measured nor output")
        return Circuit(self.n, tuple(self.gates), tuple(self.posts), tuple(outputs), self.scalar)

    @staticmethod
    def _key(site):
        kind, nid = site
        return (1, nid) if kind == "v" else (0, nid)

    def _leg(self, spiders, s, other, chain_toward, link, side):
        spiders[self._key(s)]["legs"].append(
            {"other": other if other[0] != "s" else ("s", self._key(other)), "chain": chain_toward, "link": link}
        )

    def _is_bent_input(self, nid) -> bool:
        owner, p, _ = self.terminal[nid]
        return owner in self.bent and p == 0

    def _ready(self, spider) -> bool:
        for leg in spider["legs"]:
            kind, nid = leg["other"]
            if kind == "t" and not self._is_bent_input(nid) and nid not in self.have:
                return False
        return True

    def _priority(self, nid) -> int:
        owner = self.terminal[nid][0]
        return 2 if self.g.words[owner]["cls"] in _NOUNLIKE else 0

    def _process(self, s, spiders, handoff, done, out_qubit):
        spider = spiders[s]
        incoming, outgoing = [], []
        for leg in spider["legs"]:
            kind, ref = leg["other"]
            if kind == "t" and not self._is_bent_input(ref):
                q = self.have.pop(ref)
                self.chain_gates(leg["chain"], q)
                incoming.append((self._priority(ref), q))
            elif kind == "s" and ref in done:
                incoming.append((1, handoff.pop(leg["link"])))
            else:
                outgoing.append(leg)
        incoming.sort()
        if incoming:
            carrier = incoming[0][1]
        else:
            carrier = self.new_qubit()
            self.gates.append(Gate("H", (carrier,)))
            self.scalar *= SQRT2
        phase = spider["phase"]
        if not phase.is_constant:
            raise ExtractionFailed("symbolic grammar phase")
        if not phase.is_zero():
            self.gates.append(Gate("RZ", (carrier,), phase.const))
            self.scalar *= cmath.exp(0.5j * phase.const)
        for _, q in incoming[1:]:
            self.gates.append(Gate("CNOT", (carrier, q)))
            self.posts.append((q, "Z", 0))
        outputs = [leg for leg in outgoing if leg["other"][0] == "o"]
        for leg in outgoing:
            kind, ref = leg["other"]
            if kind == "o":
                continue
            x = self.new_qubit()
            self.gates.append(Gate("CNOT", (carrier, x)))
            chain_out = list(reversed(leg["chain"]))
            self.chain_gates(chain_out, x)
            if kind == "s":
                handoff[leg["link"]] = x
            else:
                owner, _, layer = self.terminal[ref]
                blk = self.templates[owner].map_layer(layer)
                m = self.emit_block(blk, {0: x}, owner)
                for j, local in enumerate(blk.ports):
                    self.have[self.g.words[owner]["ports"][j + 1][layer]] = m[local]
        for i, leg in enumerate(outputs):
            q = carrier
            if i < len(outputs) - 1:
                q = self.new_qubit()
                self.gates.append(Gate("CNOT", (carrier, q)))
            self.chain_gates(list(reversed(leg["chain"])), q)
            out_qubit[leg["other"][1]] = q
        if not outputs:
            self.posts.append((carrier, "X", 0))
            self.scalar *= SQRT2


def extract_circuit(g: ZxGraph, mode: str = "parallel") -> Circuit:
    """Read a fused sentence graph back as a circuit; the scalar is recorded."""
    return _Extractor(g, mode).run()
