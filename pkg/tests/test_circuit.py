import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fixtures import TEMPLATES, lexicon
from qdisco import circuit as circ
from qdisco import sim
from qdisco.errors import LexiconError, MissingParam, UnknownClass
from qdisco.pipeline import Config, compile_sentence


def table_for(keys, seed):
    rng = np.random.default_rng(seed)
    return circ.ParamTable({k: rng.uniform(0, 2 * math.pi) for k in keys})


def test_gate_invariants():
    with pytest.raises(ValueError):
        circ.Gate("RZ", (0,))
    with pytest.raises(ValueError):
        circ.Gate("CNOT", (0, 0))
    with pytest.raises(ValueError):
        circ.Gate("H", (0,), 0.5)


def test_postselected_qubit_cannot_be_output():
    with pytest.raises(ValueError):
        circ.Circuit(2, (), ((0, "Z", 0),), (0, 1))


def test_noun_template_layer_gates():
    t = circ.instantiate_word("w", "noun", "noun", 1)
    c, ports = t.state_circuit()
    assert [(g.kind, str(g.param)) for g in c.gates] == [("RX", "$w.0"), ("RZ", "$w.1")]
    assert ports == [[0]]


def test_bell_verb_has_no_parameters():
    t = circ.instantiate_word("hates", "tverb", "bell", 1)
    assert t.slots() == []


def test_bell_verbs_coincide():
    lex = lexicon()
    cfg = Config(ansatz="bell")
    a = compile_sentence("Alice hates Bob", lex, cfg, truth=False)
    b = compile_sentence("Alice likes Bob", lex, cfg, truth=False)
    assert a.gates == b.gates and a.scalar == b.scalar


@pytest.mark.parametrize("ansatz,layers,count", [("euler", 2, 6), ("euler", 1, 3), ("svd", 1, 5), ("svd", 2, 10)])
def test_verb_slot_counts(ansatz, layers, count):
    t = circ.instantiate_word("v", "tverb", ansatz, layers)
    assert t.slots() == [("v", k) for k in range(count)]


def test_ditransitive_slots_scale_with_maps():
    t = circ.instantiate_word("v", "dtverb", "euler", 1)
    assert len(t.slots()) == 6


def test_unknown_class_and_bad_ansatz():
    with pytest.raises(UnknownClass):
        circ.instantiate_word("v", "adverb", "euler", 1)
    with pytest.raises(LexiconError):
        circ.instantiate_word("v", "noun", "svd", 1)


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from([("noun", "noun"), ("adj", "noun"), ("tverb", "bell"), ("tverb", "euler"),
                     ("tverb", "svd"), ("dtverb", "euler"), ("dtverb", "svd"), ("tverb", "basis:euler")]),
    st.integers(1, 2),
    st.sampled_from(["global", "word"]),
    st.integers(0, 2**32 - 1),
)
def test_state_circuit_matches_word_tensor(kind, layers, scope, seed):
    cls, ansatz = kind
    t = circ.instantiate_word("w", cls, ansatz, layers, scope)
    table = table_for(t.slots(), seed)
    c, _ = t.state_circuit()
    state, _, scalar = sim.run(circ.bind(c, table))
    ref = circ.word_tensor(t, table).ravel()
    assert np.allclose(scalar * state.amplitudes, ref, atol=1e-10)


def test_euler_matrix_is_unitary_and_ordered():
    a, b, g = 0.3, 1.1, -0.7
    m = circ.euler_matrix(a, b, g)
    assert np.allclose(m @ m.conj().T, np.eye(2))
    assert np.allclose(m, circ.rz(g) @ circ.rx(b) @ circ.rz(a))


def test_basis_phases_zero_elide_to_inner():
    lex = lexicon()
    inner = compile_sentence("Alice hates Bob", lex, Config(ansatz="euler"), truth=False)
    wrapped = compile_sentence("Alice hates Bob", lex, Config(ansatz="basis:euler"), truth=False)
    zero = {k: 0.0 for k in wrapped.params() if k[0] == circ.BASIS_WORD}
    rest = {k: 0.25 * (i + 1) for i, k in enumerate(sorted(inner.params()))}
    a = circ.elide_zero_rotations(circ.bind(inner, rest))
    b = circ.elide_zero_rotations(circ.bind(wrapped, {**rest, **zero}))
    assert a.gates == b.gates and a.n_qubits == b.n_qubits


def test_bind_is_idempotent_and_checks_missing():
    c = compile_sentence("Alice hates Bob", lexicon(), Config(), truth=False)
    table = table_for(c.params(), 3)
    once = circ.bind(c, table)
    assert once.is_bound
    assert circ.bind(once, table) == once
    plain = circ.Circuit(1, (circ.Gate("H", (0,)),), (), (0,))
    assert circ.bind(plain, {}) == plain
    with pytest.raises(MissingParam):
        circ.bind(c, {})


@pytest.mark.parametrize("sentence", TEMPLATES)
@pytest.mark.parametrize("mode", ["parallel", "sequential"])
def test_circuit_text_round_trip(sentence, mode):
    c = compile_sentence(sentence, lexicon(), Config(mode=mode, ansatz="svd"), truth=False)
    text = circ.to_text(c)
    back = circ.from_text(text)
    assert back == c
    assert [g.word for g in back.gates] == [g.word for g in c.gates]
    assert circ.to_text(back) == text
    bound = circ.bind(c, table_for(c.params(), 0))
    assert circ.from_text(circ.to_text(bound)) == bound


def test_param_table_json_round_trip():
    t = circ.ParamTable({("Alice", 0): 0.1, ("a.b", 1): -2.5, ("Bob", 10): math.pi})
    text = t.to_json()
    assert circ.ParamTable.from_json(text) == t
    assert circ.ParamTable.from_json(text).to_json() == text
    assert list(json.loads(text)) == sorted(json.loads(text))


def test_param_table_rejects_non_finite():
    with pytest.raises(ValueError):
        circ.ParamTable({("a", 0): float("nan")})


def test_stats_parallel_and_sequential_forms():
    lex = lexicon()
    par = circ.stats(compile_sentence("Alice hates Bob", lex, Config(ansatz="bell"), truth=False))
    seq = circ.stats(compile_sentence("Alice hates Bob", lex, Config(ansatz="bell", mode="sequential"), truth=False))
    assert (par["qubits"], par["grammar_cnot_count"], par["grammar_cnot_depth"]) == (4, 2, 1)
    assert (seq["qubits"], seq["grammar_cnot_depth"]) == (3, 2)


def test_stats_of_empty_circuit():
    s = circ.stats(circ.Circuit(3))
    assert (s["qubits"], s["cnot_count"], s["depth"]) == (3, 0, 0)
