"""Question answering and classification by exhaustive closest-vector search."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import diagram as dg
from . import sim
from .circuit import bind
from .errors import ClassMismatch, EmptyCandidates, NoReduction, TypeMismatch, Unsupported
from .lexicon import CLASS_TYPES, Lexicon
from .pipeline import Config, bindings, compile_diagram, parse, sentence_diagram, tokenize
from .pregroup import parse_type, reduce, ty

HOLE = "HOLE"
WH_WORDS = ("who", "what", "which", "whom")
TIE_DECIMALS = 12


@dataclass(frozen=True)
class Question:
    tokens: tuple[str, ...]

    def __post_init__(self):
        if self.tokens.count(HOLE) > 1:
            raise Unsupported("questions with more than one hole are not supported")

    @classmethod
    def parse(cls, text: str) -> Question:
        toks = tokenize(text.replace("?", " "))
        if toks[0].lower() in WH_WORDS:
            toks[0] = HOLE
        return cls(tuple(toks))

    @property
    def hole(self) -> int | None:
        return self.tokens.index(HOLE) if HOLE in self.tokens else None

    def fill(self, candidate: str) -> tuple[str, ...]:
        if self.hole is None:
            return self.tokens
        toks = list(self.tokens)
        toks[self.hole] = candidate
        return tuple(toks)

    def hole_classes(self, lex: Lexicon) -> set[str]:
        """Word classes whose type lets the question reduce to a sentence."""
        if self.hole is None:
            return set()
        fits = set()
        for wcls, tstr in CLASS_TYPES.items():
            types = [parse_type(tstr) if t == HOLE else lex[t].type for t in self.tokens]
            for target in ("s", "n"):
                try:
                    reduce(types, ty(target))
                except NoReduction:
                    continue
                fits.add(wcls)
        return fits

    def kind(self, lex: Lexicon) -> str:
        classes = self.hole_classes(lex)
        if not classes:
            return "none"
        if classes & {"tverb", "dtverb"}:
            return "verb-hole"
        verb_at = next((i for i, t in enumerate(self.tokens) if t != HOLE and lex[t].cls in ("tverb", "dtverb")), None)
        return "subject-hole" if verb_at is None or self.hole < verb_at else "object-hole"


class ParamModel:
    """Scores through compiled circuits with trained parameters."""

    def __init__(self, lex: Lexicon, params: Mapping, cfg: Config = Config()):
        self.lex, self.params, self.cfg = lex, params, cfg

    def amplitude(self, d: dg.Diagram) -> complex:
        c = compile_diagram(d, self.cfg)
        state, _, scalar = sim.run(bind(c, self.params))
        return complex(scalar * state.amplitudes[0])

    def oracle_amplitude(self, d: dg.Diagram) -> complex:
        return complex(dg.evaluate(d, bindings(d, self.cfg, self.params)))


class StateModel:
    """Scores by contracting diagrams against explicit word tensors."""

    def __init__(self, lex: Lexicon, states: Mapping[str, np.ndarray], cfg: Config = Config()):
        self.lex, self.states, self.cfg = lex, dict(states), cfg

    def amplitude(self, d: dg.Diagram) -> complex:
        return complex(dg.evaluate(d, self.states))

    oracle_amplitude = amplitude


def _check_class(q: Question, candidate: str, lex: Lexicon):
    if q.hole is None:
        return
    if lex[candidate].cls not in q.hole_classes(lex):
        raise ClassMismatch(f"{candidate!r} ({lex[candidate].cls}) cannot fill this hole")


def truth_diagram(tokens: Sequence[str], model) -> dg.Diagram:
    return sentence_diagram(tokens, model.lex, model.cfg, truth=True)


def score(q: Question, candidate: str | None, model, oracle: bool = False) -> float:
    """Truth value of the question with the hole filled by ``candidate``."""
    if candidate is not None:
        _check_class(q, candidate, model.lex)
    d = truth_diagram(q.fill(candidate) if candidate else q.tokens, model)
    amp = model.oracle_amplitude(d) if oracle else model.amplitude(d)
    return abs(amp) ** 2


def rank(scores: Mapping[str, float]) -> list[tuple[str, float]]:
    # scores equal to 12 decimals count as ties and fall back to name order
    return sorted(scores.items(), key=lambda kv: (-round(kv[1], TIE_DECIMALS), kv[0]))


def answer(q: Question, candidates: Sequence[str], model, oracle: bool = False) -> list[tuple[str, float]]:
    if not candidates:
        raise EmptyCandidates("no candidates to rank")
    classes = {model.lex[c].cls for c in candidates}
    if len(classes) != 1:
        raise ClassMismatch(f"candidates mix classes {sorted(classes)}")
    return rank({c: score(q, c, model, oracle) for c in candidates})


def classification_diagram(tokens: Sequence[str], label: str, side: str, model) -> dg.Diagram:
    """Plug ``label`` into the subject or object copy of the sentence, delete the rest."""
    if side not in ("subject", "object"):
        raise ValueError("side must be subject or object")
    entry = model.lex[label]
    if entry.cls != "noun":
        raise ClassMismatch(f"label {label!r} is not a noun")
    d = dg.unbundle(sentence_diagram(tokens, model.lex, model.cfg, truth=False))
    if len(d.outputs) < 2:
        raise TypeMismatch("classification needs a sentence with a subject and an object")
    chosen = d.outputs[0] if side == "subject" else d.outputs[-1]
    wire = d.wires[chosen]
    wires = dict(d.wires)
    lw = "label0"
    wires[lw] = wire
    nodes = list(d.nodes)
    nodes.append(dg.Node(dg.WordState(label, (wire,), "noun", entry.ansatz or "noun"), (), (lw,)))
    nodes.append(dg.Node(dg.Cup(wire), (chosen, lw), ()))
    for w in d.outputs:
        if w != chosen:
            nodes.append(dg.Node(dg.Effect("delete", (d.wires[w],)), (w,), ()))
    return dg.Diagram(wires, tuple(nodes), d.inputs, ())


def classify(sentence, labels: Sequence[str], side: str, model, oracle: bool = False) -> list[tuple[str, float]]:
    if not labels:
        raise EmptyCandidates("no labels to rank")
    tokens = tokenize(sentence)
    parse(tokens, model.lex)
    scores = {}
    for label in labels:
        d = classification_diagram(tokens, label, side, model)
        amp = model.oracle_amplitude(d) if oracle else model.amplitude(d)
        scores[label] = abs(amp) ** 2
    return rank(scores)


def parse_queries(text: str) -> list[tuple[Question, list[str]]]:
    """``QUESTION ...`` lines, each followed by a ``CANDIDATES ...`` line."""
    out, pending = [], None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "QUESTION":
            if pending is not None:
                raise ValueError("QUESTION without CANDIDATES")
            pending = Question.parse(rest)
        elif head == "CANDIDATES":
            if pending is None:
                raise ValueError("CANDIDATES before any QUESTION")
            out.append((pending, rest.split()))
            pending = None
        else:
            raise ValueError(f"unknown query line {raw!r}")
    if pending is not None:
        raise ValueError("QUESTION without CANDIDATES")
    return out


def ranking_tsv(ranking: Sequence[tuple[str, float]]) -> str:
    return "".join(f"{i}\t{c}\t{s!r}\n" for i, (c, s) in enumerate(ranking, 1))
