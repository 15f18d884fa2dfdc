"""Variational training of word parameters against labelled sentences."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import sim
from .circuit import Circuit, ParamTable, bind
from .errors import EmptyCorpus, NoParams, UsageError
from .lexicon import Lexicon
from .pipeline import Config, compile_diagram, sentence_diagram, slots, tokenize


@dataclass(frozen=True)
class TrainConfig:
    optimizer: str = "gd"
    learning_rate: float = 0.5
    iterations: int = 500
    seed: int = 0
    compile: Config = Config()
    spsa_a: float = 0.1
    spsa_c: float = 0.1

    def __post_init__(self):
        if self.optimizer not in ("gd", "spsa"):
            raise UsageError(f"optimizer must be gd or spsa, not {self.optimizer!r}")
        if self.iterations < 1:
            raise UsageError("iterations must be at least 1")
        if not self.learning_rate > 0:
            raise UsageError("learning_rate must be positive")


@dataclass(frozen=True)
class Corpus:
    items: tuple[tuple[tuple[str, ...], float], ...]

    def __post_init__(self):
        for toks, label in self.items:
            if not math.isfinite(label) or not 0.0 <= label <= 1.0:
                raise ValueError(f"label {label} outside [0, 1]")

    @classmethod
    def parse(cls, text: str) -> Corpus:
        items = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            sent, sep, label = line.rpartition("\t")
            if not sep:
                raise ValueError(f"line {lineno}: expected sentence<TAB>label")
            items.append((tuple(tokenize(sent)), float(label)))
        return cls(tuple(items))

    def __len__(self):
        return len(self.items)


class Model:
    """Compiled truth-value circuits for a corpus, sharing one parameter table."""

    def __init__(self, corpus: Corpus, lex: Lexicon, cfg: Config = Config()):
        self.corpus = corpus
        self.cfg = cfg
        self.circuits: list[Circuit] = []
        keys: set = set()
        for toks, _ in corpus.items:
            d = sentence_diagram(toks, lex, cfg, truth=True)
            keys.update(slots(d, cfg))
            self.circuits.append(compile_diagram(d, cfg))
        self.keys = sorted(keys)

    def outputs(self, params) -> list[float]:
        return [circuit_output(c, params) for c in self.circuits]

    def loss(self, params, qs=None) -> float:
        qs = self.outputs(params) if qs is None else qs
        return math.fsum((label - q) ** 2 for (_, label), q in zip(self.corpus.items, qs))

    def accuracy(self, params, threshold: float = 0.5, qs=None) -> float:
        if not self.corpus.items:
            raise EmptyCorpus("accuracy of an empty corpus")
        qs = self.outputs(params) if qs is None else qs
        hits = sum((q > threshold) == (label > threshold) for (_, label), q in zip(self.corpus.items, qs))
        return hits / len(self.corpus.items)

    def row(self, k: int, params) -> tuple[int, float, float]:
        qs = self.outputs(params)
        return (k, self.loss(params, qs), self.accuracy(params, qs=qs))

    def loss_grad(self, params) -> dict:
        parts: dict = {k: [] for k in self.keys}
        for c, (_, label) in zip(self.circuits, self.corpus.items):
            weight = abs(c.scalar) ** 2
            q = circuit_output(c, params)
            g = sim.grad(c, {k: params[k] for k in c.params()})
            for k, v in g.items():
                parts[k].append(-2.0 * (label - q) * weight * v)
        return {k: math.fsum(v) for k, v in parts.items()}


def circuit_output(c: Circuit, params) -> float:
    """Scalar-corrected truth value ``|scalar|^2 * post_prob`` clamped to [0, 1]."""
    _, prob, scalar = sim.run(bind(c, params))
    return min(1.0, max(0.0, abs(scalar) ** 2 * prob))


def model_output(sentence, params, lex: Lexicon, cfg: Config = Config()) -> float:
    c = compile_diagram(sentence_diagram(sentence, lex, cfg, truth=True), cfg)
    return circuit_output(c, params)


def loss(params, corpus: Corpus, lex: Lexicon, cfg: Config = Config()) -> float:
    if not corpus.items:
        return 0.0
    return Model(corpus, lex, cfg).loss(params)


def accuracy(params, corpus: Corpus, lex: Lexicon, cfg: Config = Config(), threshold: float = 0.5) -> float:
    if not corpus.items:
        raise EmptyCorpus("accuracy of an empty corpus")
    return Model(corpus, lex, cfg).accuracy(params, threshold)


def init_params(keys: Sequence, seed: int) -> tuple[ParamTable, np.random.Generator]:
    rng = np.random.default_rng(seed)
    keys = sorted(keys)
    values = rng.uniform(0.0, 2 * math.pi, size=len(keys))
    return ParamTable(dict(zip(keys, values.tolist()))), rng


def fit(corpus: Corpus, lex: Lexicon, tcfg: TrainConfig = TrainConfig()):
    """Returns the trained table and the trace ``[(iter, loss, accuracy), ...]``.

    Row 0 is the initial table; row k follows the k-th update.
    """
    if not corpus.items:
        raise EmptyCorpus("cannot train on an empty corpus")
    model = Model(corpus, lex, tcfg.compile)
    if not model.keys:
        raise NoParams("no word in the corpus carries trainable parameters")
    table, rng = init_params(model.keys, tcfg.seed)
    trace = [model.row(0, table)]
    big_a = 0.1 * tcfg.iterations
    for k in range(tcfg.iterations):
        if tcfg.optimizer == "gd":
            g = model.loss_grad(table)
            table = table.updated({key: table[key] - tcfg.learning_rate * g[key] for key in model.keys})
        else:
            ak = tcfg.spsa_a / (k + 1 + big_a) ** 0.602
            ck = tcfg.spsa_c / (k + 1) ** 0.101
            delta = rng.choice([-1.0, 1.0], size=len(model.keys))
            plus = table.updated({key: table[key] + ck * d for key, d in zip(model.keys, delta)})
            minus = table.updated({key: table[key] - ck * d for key, d in zip(model.keys, delta)})
            diff = (model.loss(plus) - model.loss(minus)) / (2 * ck)
            table = table.updated({key: table[key] - ak * diff * d for key, d in zip(model.keys, delta)})
        trace.append(model.row(k + 1, table))
    return table, trace


def trace_csv(trace) -> str:
    return "iter,loss,accuracy\n" + "".join(f"{i},{l!r},{a!r}\n" for i, l, a in trace)
