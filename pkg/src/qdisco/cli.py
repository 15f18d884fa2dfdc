"""Batch command-line frontend.

Exit codes: 0 success, 2 usage, 3 parse/reduction/compilation failure,
4 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import circuit as circ
from . import diagram as dg
from . import qa, zx
from .errors import NoReduction, QdiscoError, UsageError
from .lexicon import Lexicon
from .pipeline import Config, compile_diagram, parse, sentence_diagram, tokenize
from .train import Corpus, TrainConfig, fit, trace_csv


def _read(path: str, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {what} file {path!r}: {exc.strerror}") from None


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _lexicon(args) -> Lexicon:
    try:
        return Lexicon.parse(_read(args.lexicon, "lexicon"))
    except ValueError as exc:
        if isinstance(exc, QdiscoError):
            raise
        raise UsageError(f"bad lexicon file: {exc}") from None


def _params(args) -> circ.ParamTable:
    try:
        return circ.ParamTable.from_json(_read(args.params, "params"))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad params file: {exc}") from None


def _config(args) -> Config:
    return Config(
        mode=args.mode,
        ansatz=args.ansatz,
        noun_qubits=args.noun_qubits,
        s_qubits=args.s_qubits,
        basis_scope=args.basis_scope,
    )


def _compile_flags(p: argparse.ArgumentParser):
    p.add_argument("--mode", choices=("parallel", "sequential"), default="parallel")
    p.add_argument("--ansatz", default="euler", help="bell, euler or svd, optionally prefixed basis:")
    p.add_argument("--noun-qubits", type=int, default=1)
    p.add_argument("--s-qubits", type=int, default=None)
    p.add_argument("--basis-scope", choices=("global", "word"), default="global")


# commands ---------------------------------------------------------------------

def cmd_parse(args) -> int:
    lex = _lexicon(args)
    red = parse(tokenize(args.sentence), lex, args.target)
    flat = red.flat
    lines = [f"RESULT {red.result}"]
    lines += [f"CUP {i} {j} {flat[i]} {flat[j]}" for i, j in red.cups]
    lines += [f"OPEN {i} {flat[i]}" for i in red.open]
    _write(None, "\n".join(lines) + "\n")
    return 0


def cmd_compile(args) -> int:
    lex = _lexicon(args)
    cfg = _config(args)
    d = sentence_diagram(args.sentence, lex, cfg, truth=args.readout == "truth")
    c = compile_diagram(d, cfg)
    _write(args.out, circ.to_text(c))
    if args.stats:
        sys.stderr.write("".join(f"{k} {v}\n" for k, v in circ.stats(c).items()))
    return 0


def cmd_train(args) -> int:
    lex = _lexicon(args)
    try:
        corpus = Corpus.parse(_read(args.corpus, "corpus"))
    except ValueError as exc:
        raise UsageError(f"bad corpus file: {exc}") from None
    tcfg = TrainConfig(
        optimizer=args.optimizer,
        learning_rate=args.learning_rate,
        iterations=args.iterations,
        seed=args.seed,
        compile=_config(args),
    )
    table, trace = fit(corpus, lex, tcfg)
    _write(args.params_out, table.to_json())
    if args.trace_out:
        _write(args.trace_out, trace_csv(trace))
    _, loss, acc = trace[-1]
    sys.stderr.write(f"final loss {loss!r} accuracy {acc!r}\n")
    return 0


def cmd_ask(args) -> int:
    lex = _lexicon(args)
    model = qa.ParamModel(lex, _params(args), _config(args))
    try:
        queries = qa.parse_queries(_read(args.queries, "question"))
    except ValueError as exc:
        if isinstance(exc, QdiscoError):
            raise
        raise UsageError(f"bad question file: {exc}") from None
    out = []
    for q, cands in queries:
        out.append(f"# QUESTION {' '.join(q.tokens)}\n")
        out.append(qa.ranking_tsv(qa.answer(q, cands, model)))
    _write(args.out, "".join(out))
    return 0


def cmd_classify(args) -> int:
    lex = _lexicon(args)
    model = qa.ParamModel(lex, _params(args), _config(args))
    labels = [x for x in args.labels.split(",") if x]
    _write(args.out, qa.ranking_tsv(qa.classify(args.sentence, labels, args.side, model)))
    return 0


def cmd_export(args) -> int:
    lex = _lexicon(args)
    cfg = _config(args)
    d = sentence_diagram(args.sentence, lex, cfg, truth=args.readout == "truth")
    if args.format == "text":
        text = dg.to_text(d)
    elif args.format == "dot":
        text = dg.to_dot(d)
    else:
        g = zx.from_diagram(d, cfg.basis_scope)
        text = (zx.fuse(g) if args.fuse else g).to_text()
    _write(args.out, text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qdisco", description="Sentences to parameterised circuits.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="pregroup reduction report")
    p.add_argument("lexicon")
    p.add_argument("sentence")
    p.add_argument("--target", default=None, help="target type, e.g. 's' or 'n'")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("compile", help="compile a sentence to a circuit text file")
    p.add_argument("lexicon")
    p.add_argument("sentence")
    _compile_flags(p)
    p.add_argument("--readout", choices=("state", "truth"), default="state")
    p.add_argument("--out", default=None)
    p.add_argument("--stats", action="store_true", help="gate statistics on stderr")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("train", help="fit word parameters to a labelled corpus")
    p.add_argument("lexicon")
    p.add_argument("corpus")
    _compile_flags(p)
    p.add_argument("--optimizer", choices=("gd", "spsa"), default="gd")
    p.add_argument("--learning-rate", type=float, default=0.5)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--params-out", default=None)
    p.add_argument("--trace-out", default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("ask", help="rank candidate answers to questions")
    p.add_argument("lexicon")
    p.add_argument("params")
    p.add_argument("queries")
    _compile_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ask)

    p = sub.add_parser("classify", help="rank noun labels against a sentence")
    p.add_argument("lexicon")
    p.add_argument("params")
    p.add_argument("sentence")
    p.add_argument("--labels", required=True, help="comma separated nouns")
    p.add_argument("--side", choices=("subject", "object"), default="subject")
    _compile_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("export", help="dump the diagram or its ZX graph")
    p.add_argument("lexicon")
    p.add_argument("sentence")
    p.add_argument("--format", choices=("dot", "text", "zx"), default="text")
    p.add_argument("--readout", choices=("state", "truth"), default="state")
    p.add_argument("--fuse", action="store_true", help="apply spider fusion before a zx dump")
    _compile_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NoReduction as exc:
        residue = " ".join(map(str, exc.residue))
        sys.stderr.write(f"error: {exc}\nresidue: {residue}\n")
        return exc.exit_code
    except QdiscoError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
