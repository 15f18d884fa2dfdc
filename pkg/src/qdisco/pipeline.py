"""Sentence to diagram to ZX graph to circuit, with the shared configuration."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import diagram as dg
from . import zx
from .circuit import Circuit, WordTemplate, default_ansatz, instantiate_word, word_tensor
from .errors import NoReduction, TypeMismatch, UsageError
from .lexicon import Lexicon
from .pregroup import Reduction, reduce, ty

ARITY = {"tverb": 2, "dtverb": 3}


@dataclass(frozen=True)
class Config:
    mode: str = "parallel"
    ansatz: str = "euler"
    noun_qubits: int = 1
    s_qubits: int | None = None
    basis_scope: str = "global"

    def __post_init__(self):
        if self.mode not in ("parallel", "sequential"):
            raise UsageError(f"mode must be parallel or sequential, not {self.mode!r}")
        if self.noun_qubits < 1:
            raise UsageError("noun_qubits must be positive")


def tokenize(sentence: str | Sequence[str]) -> list[str]:
    toks = sentence.split() if isinstance(sentence, str) else list(sentence)
    if not toks:
        raise UsageError("empty sentence")
    return toks


def sentence_qubits(classes: Sequence[str], cfg: Config) -> int:
    """Sentence width follows from the verbs: one noun wire copy per argument."""
    arities = {ARITY[c] for c in classes if c in ARITY}
    if len(arities) > 1:
        raise TypeMismatch("transitive and ditransitive verbs would need different sentence widths")
    derived = arities.pop() * cfg.noun_qubits if arities else (cfg.s_qubits or cfg.noun_qubits)
    if cfg.s_qubits is not None and cfg.s_qubits != derived:
        raise TypeMismatch(f"s_qubits={cfg.s_qubits} but the verb wiring needs {derived}")
    return derived


def parse(tokens: Sequence[str], lex: Lexicon, target: str | None = None) -> Reduction:
    """Reduce to ``s``; without an explicit target a noun phrase may reduce to ``n``."""
    types = [lex[t].type for t in tokens]
    if target is not None:
        return reduce(types, ty(*target.split()))
    try:
        return reduce(types, ty("s"))
    except NoReduction as first:
        try:
            return reduce(types, ty("n"))
        except NoReduction:
            raise first from None


def sentence_diagram(sentence, lex: Lexicon, cfg: Config = Config(), truth: bool = False,
                     target: str | None = None, wired: bool = True) -> dg.Diagram:
    tokens = tokenize(sentence)
    red = parse(tokens, lex, target)
    entries = [lex[t] for t in tokens]
    classes = [e.cls for e in entries]
    dims = {"n": cfg.noun_qubits, "s": sentence_qubits(classes, cfg)}
    ansatze = [e.ansatz or default_ansatz(e.cls, cfg.ansatz) for e in entries]
    d = dg.from_reduction([(e.token, e.type) for e in entries], red, dims, classes, ansatze)
    if wired:
        d = dg.apply_internal_wirings(d)
    return dg.with_deletes(d) if truth else d


def templates(d: dg.Diagram, cfg: Config) -> dict[str, WordTemplate]:
    out = {}
    for w in d.words():
        if w.cls in ("noun", "adj", "tverb", "dtverb"):
            out[w.name] = instantiate_word(w.name, w.cls, w.ansatz, cfg.noun_qubits, cfg.basis_scope)
    return out


def slots(d: dg.Diagram, cfg: Config) -> list[tuple[str, int]]:
    keys = set()
    for t in templates(d, cfg).values():
        keys.update(t.slots())
    return sorted(keys)


def bindings(d: dg.Diagram, cfg: Config, params: Mapping) -> dict[str, np.ndarray]:
    return {name: word_tensor(t, params) for name, t in templates(d, cfg).items()}


def compile_diagram(d: dg.Diagram, cfg: Config = Config()) -> Circuit:
    g = zx.fuse(zx.from_diagram(d, cfg.basis_scope))
    return zx.extract_circuit(g, cfg.mode)


def compile_sentence(sentence, lex: Lexicon, cfg: Config = Config(), truth: bool = True,
                     target: str | None = None) -> Circuit:
    return compile_diagram(sentence_diagram(sentence, lex, cfg, truth, target), cfg)


def word_diagram(token: str, lex: Lexicon, cfg: Config = Config(), arity: int = 2) -> dg.Diagram:
    """A single word with all its wires left open, internally wired."""
    e = lex[token]
    t = e.type
    red = Reduction((t,), (), tuple(range(len(t))))
    dims = {"n": cfg.noun_qubits, "s": cfg.s_qubits or ARITY.get(e.cls, arity) * cfg.noun_qubits}
    d = dg.from_reduction([(e.token, t)], red, dims, [e.cls], [e.ansatz or default_ansatz(e.cls, cfg.ansatz)])
    return dg.apply_internal_wirings(d)
