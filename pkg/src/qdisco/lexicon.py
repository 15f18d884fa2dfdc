"""Lexicon files: ``token<TAB>type<TAB>class[<TAB>ansatz]`` with ``#`` comments."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .circuit import AnsatzKind
from .errors import LexiconError, PregroupSyntaxError, UnknownClass
from .pregroup import PregroupType, parse_type

CLASS_TYPES = {
    "noun": "n",
    "adj": "n n.l",
    "tverb": "n.r s n.l",
    "dtverb": "n.r s n.l n.l",
    "relpron": "n.r n s.l n",
    "does": "n.r s s.l n",
    "not": "n.r s s.l n",
}


@dataclass(frozen=True)
class Entry:
    token: str
    type: PregroupType
    cls: str
    ansatz: str | None = None


class Lexicon:
    def __init__(self, entries: Iterable[Entry] = ()):
        self.entries: dict[str, Entry] = {}
        for e in entries:
            self.add(e)

    def add(self, e: Entry):
        if e.token in self.entries:
            raise LexiconError(f"duplicate token {e.token!r}")
        if e.cls not in CLASS_TYPES:
            raise UnknownClass(f"unknown class {e.cls!r} for {e.token!r}")
        if e.type != parse_type(CLASS_TYPES[e.cls]):
            raise LexiconError(f"{e.token!r}: class {e.cls} needs type {CLASS_TYPES[e.cls]!r}, got {str(e.type)!r}")
        if e.ansatz is not None:
            AnsatzKind.parse(e.ansatz)
        self.entries[e.token] = e

    def __getitem__(self, token: str) -> Entry:
        try:
            return self.entries[token]
        except KeyError:
            raise LexiconError(f"unknown word {token!r}") from None

    def __contains__(self, token):
        return token in self.entries

    def __iter__(self):
        return iter(self.entries.values())

    def of_class(self, *classes: str) -> list[str]:
        return [e.token for e in self.entries.values() if e.cls in classes]

    @classmethod
    def parse(cls, text: str) -> Lexicon:
        lex = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) not in (3, 4):
                raise LexiconError(f"line {lineno}: expected 3 or 4 tab-separated fields")
            token, tystr, wcls = fields[:3]
            try:
                t = parse_type(tystr)
            except PregroupSyntaxError as err:
                raise LexiconError(f"line {lineno}: {err}") from err
            lex.add(Entry(token, t, wcls, fields[3] if len(fields) == 4 else None))
        return lex

    def to_text(self) -> str:
        rows = []
        for e in self.entries.values():
            row = [e.token, str(e.type), e.cls] + ([e.ansatz] if e.ansatz else [])
            rows.append("\t".join(row))
        return "\n".join(rows) + "\n"
