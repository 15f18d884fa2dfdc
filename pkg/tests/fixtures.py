"""Shared fixture data: lexicon, reduction cup sets and hand-built word states."""
import math

import numpy as np

from qdisco.circuit import ParamTable
from qdisco.lexicon import Lexicon
from qdisco.pipeline import Config

LEXICON_TEXT = """\
# nouns
Alice\tn\tnoun
Bob\tn\tnoun
Claire\tn\tnoun
beer\tn\tnoun
hat\tn\tnoun
flowers\tn\tnoun
# adjectives
black\tn n.l\tadj
red\tn n.l\tadj
# verbs
hates\tn.r s n.l\ttverb
likes\tn.r s n.l\ttverb
like\tn.r s n.l\ttverb
hate\tn.r s n.l\ttverb
gives\tn.r s n.l n.l\tdtverb
# function words
who\tn.r n s.l n\trelpron
does\tn.r s s.l n\tdoes
not\tn.r s s.l n\tnot
"""


def lexicon() -> Lexicon:
    return Lexicon.parse(LEXICON_TEXT)


# sentence, target, cups, open; each worked through the stack by hand
REDUCTIONS = [
    ("Alice hates Bob", "s", {(0, 1), (3, 4)}, (2,)),
    ("black hat", "n", {(1, 2)}, (0,)),
    ("Alice gives Bob flowers", "s", {(0, 1), (3, 6), (4, 5)}, (2,)),
    ("Bob who likes beer", "n", {(0, 1), (3, 6), (4, 5), (7, 8)}, (2,)),
    ("Alice does not like Bob", "s", {(0, 1), (3, 6), (4, 5), (7, 10), (8, 9), (11, 12)}, (2,)),
    ("Alice does like Bob", "s", {(0, 1), (3, 6), (4, 5), (7, 8)}, (2,)),
    ("Alice hates black hat", "s", {(0, 1), (3, 4), (5, 6)}, (2,)),
    ("red Bob likes beer", "s", {(1, 2), (0, 3), (5, 6)}, (4,)),
    ("Claire gives Alice red flowers", "s", {(0, 1), (4, 5), (3, 6), (7, 8)}, (2,)),
    ("Bob who likes beer hates Alice", "s",
     {(0, 1), (4, 5), (3, 6), (7, 8), (2, 9), (11, 12)}, (10,)),
    ("Bob who does not like beer", "n",
     {(0, 1), (4, 5), (3, 6), (8, 9), (7, 10), (12, 13), (11, 14), (15, 16)}, (2,)),
]

NO_REDUCTION = ("hates Alice", "n.r s")

# compilable templates, one per grammatical construction
TEMPLATES = [
    "Alice",
    "black hat",
    "Alice hates Bob",
    "Alice hates black hat",
    "Alice gives Bob flowers",
    "Bob who likes beer",
    "Alice does like Bob",
    "Alice does not like Bob",
]

# single-verb sentences used for the qubit/depth comparison
TRADEOFF = [
    "Alice hates Bob",
    "Alice hates black hat",
    "Alice gives Bob flowers",
    "Bob who likes beer",
    "Alice does like Bob",
    "Alice does not like Bob",
]


# hand-built hates world on 4-qubit basis nouns ---------------------------------

WORLD_NOUNS = [
    "Alice", "Bob", "WickedQueen", "SnowWhite", "Romeo", "Juliette",
    "EnglishWeather", "EnglishBeer", "EnglishChocolate", "ManUfan", "LiverpoolFan",
]
HATES_PAIRS = [
    ("Alice", "Bob", 1.0),
    ("WickedQueen", "SnowWhite", 1.0),
    ("ManUfan", "LiverpoolFan", 1.0),
    ("Bob", "EnglishWeather", 1 / 3),
    ("Bob", "EnglishBeer", 1 / 2),
    ("Bob", "EnglishChocolate", 2 / 3),
]


def world_lexicon() -> Lexicon:
    rows = [f"{n}\tn\tnoun" for n in WORLD_NOUNS] + ["hates\tn.r s n.l\ttverb"]
    return Lexicon.parse("\n".join(rows) + "\n")


def world_config() -> Config:
    return Config(noun_qubits=4)


def world_states() -> dict:
    basis = np.eye(16)
    states = {n: basis[i] for i, n in enumerate(WORLD_NOUNS)}
    hates = np.zeros((16, 16))
    for subj, obj, w in HATES_PAIRS:
        hates += w * np.outer(states[subj], states[obj])
    states["hates"] = hates
    return states


# circuit-level QA world: 2-qubit nouns set by rotation angles -------------------

_NOUN_ANGLES = {"0": (0.0, 0.0), "1": (math.pi, 0.0), "+": (math.pi / 2, math.pi / 2)}
QA_WORLD = {"WickedQueen": "00", "SnowWhite": "01", "Romeo": "10", "Juliette": "11", "Alice": "++"}


def qa_lexicon() -> Lexicon:
    rows = [f"{n}\tn\tnoun" for n in QA_WORLD] + ["hates\tn.r s n.l\ttverb"]
    return Lexicon.parse("\n".join(rows) + "\n")


def qa_config(mode: str = "parallel") -> Config:
    return Config(noun_qubits=2, mode=mode)


def qa_params() -> ParamTable:
    """Noun layers are |0>, |1> or |+> up to phase; hates acts as I on layer 0 and X on layer 1."""
    values = {}
    for name, bits in QA_WORLD.items():
        for k, b in enumerate(bits):
            values[(name, 2 * k)], values[(name, 2 * k + 1)] = _NOUN_ANGLES[b]
    for slot, v in enumerate([0.0, 0.0, 0.0, 0.0, math.pi, 0.0]):
        values[("hates", slot)] = v
    return ParamTable(values)


# classification world: an svd verb whose map sends |0> to |1> and kills |1> ----

def rank_lexicon() -> Lexicon:
    rows = ["Alice\tn\tnoun", "Bob\tn\tnoun", "winner\tn\tnoun", "loser\tn\tnoun",
            "outperforms\tn.r s n.l\ttverb\tsvd"]
    return Lexicon.parse("\n".join(rows) + "\n")


def rank_params() -> ParamTable:
    plus = (math.pi / 2, math.pi / 2)
    values = {
        ("Alice", 0): plus[0], ("Alice", 1): plus[1],
        ("Bob", 0): plus[0], ("Bob", 1): plus[1],
        ("winner", 0): 0.0, ("winner", 1): 0.0,
        ("loser", 0): math.pi, ("loser", 1): 0.0,
    }
    # U = X up to phase, diagonal (cos 0, cos pi/2) = diag(1, 0)
    for slot, v in enumerate([0.0, math.pi, 0.0, 0.0, math.pi / 2]):
        values[("outperforms", slot)] = v
    return ParamTable(values)
