"""Pregroup types and the lazy stack reduction that produces cup patterns."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NoReduction, PregroupSyntaxError

_BASE = re.compile(r"[^\s.]+")


@dataclass(frozen=True, order=True)
class BasicType:
    name: str

    def __post_init__(self):
        if not self.name or not _BASE.fullmatch(self.name):
            raise ValueError(f"invalid basic type name {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class SimpleType:
    """A basic type with an adjoint winding: -1 is ``x.l``, +1 is ``x.r``."""

    base: BasicType
    winding: int = 0

    @property
    def l(self) -> SimpleType:
        return SimpleType(self.base, self.winding - 1)

    @property
    def r(self) -> SimpleType:
        return SimpleType(self.base, self.winding + 1)

    def __str__(self):
        suffix = ".l" if self.winding < 0 else ".r"
        return self.base.name + suffix * abs(self.winding)


@dataclass(frozen=True)
class PregroupType:
    simples: tuple[SimpleType, ...] = ()

    def __len__(self):
        return len(self.simples)

    def __iter__(self):
        return iter(self.simples)

    def __getitem__(self, i):
        return self.simples[i]

    def __matmul__(self, other: PregroupType) -> PregroupType:
        return PregroupType(self.simples + other.simples)

    @property
    def is_plain(self) -> bool:
        return all(s.winding == 0 for s in self.simples)

    def __str__(self):
        return " ".join(map(str, self.simples))


def ty(*names: str) -> PregroupType:
    """Plain type from base names, e.g. ``ty('n', 's')``."""
    return PregroupType(tuple(SimpleType(BasicType(n)) for n in names))


def left_adjoint(t: PregroupType) -> PregroupType:
    return PregroupType(tuple(s.l for s in reversed(t.simples)))


def right_adjoint(t: PregroupType) -> PregroupType:
    return PregroupType(tuple(s.r for s in reversed(t.simples)))


def parse_type(text: str) -> PregroupType:
    """Parse ``n.r s n.l`` style type syntax; the empty string is the unit type.

    Suffixes apply innermost first, so ``n.l.l`` has winding -2 and
    ``n.r.l`` is plain ``n``.
    """
    raw = text.encode("utf-8")
    if not raw:
        return PregroupType()
    simples = []
    pos = 0
    for chunk in raw.split(b" "):
        if not chunk:
            raise PregroupSyntaxError("expected a simple type", pos)
        base, *suffixes = chunk.split(b".")
        if not base or not _BASE.fullmatch(base.decode("utf-8")):
            raise PregroupSyntaxError(f"bad basic type in {chunk.decode('utf-8')!r}", pos)
        winding = 0
        offset = pos + len(base)
        for suffix in suffixes:
            if suffix == b"l":
                winding -= 1
            elif suffix == b"r":
                winding += 1
            else:
                raise PregroupSyntaxError("adjoint suffix must be 'l' or 'r'", offset + 1)
            offset += 1 + len(suffix)
        simples.append(SimpleType(BasicType(base.decode("utf-8")), winding))
        pos += len(chunk) + 1
    return PregroupType(tuple(simples))


@dataclass(frozen=True)
class Reduction:
    """Planar cup pattern over the flattened simple types of a sentence."""

    word_types: tuple[PregroupType, ...]
    cups: tuple[tuple[int, int], ...]
    open: tuple[int, ...]

    @property
    def flat(self) -> tuple[SimpleType, ...]:
        return tuple(s for t in self.word_types for s in t)

    @property
    def offsets(self) -> tuple[int, ...]:
        """Flat index of the first simple type of each word."""
        out, k = [], 0
        for t in self.word_types:
            out.append(k)
            k += len(t)
        return tuple(out)

    @property
    def result(self) -> PregroupType:
        flat = self.flat
        return PregroupType(tuple(flat[i] for i in self.open))


def _cancels(left: SimpleType, right: SimpleType) -> bool:
    return left.base == right.base and right.winding == left.winding + 1


def reduce(types: Sequence[PregroupType], target: PregroupType | None = None) -> Reduction:
    """Reduce word types with the leftmost-innermost stack strategy.

    Scanning left to right, each simple type either cancels against the top
    of the stack or is pushed. The survivors must spell ``target`` exactly.
    """
    types = tuple(types)
    if not types:
        raise NoReduction("nothing to reduce")
    if target is None:
        target = PregroupType((SimpleType(BasicType("s")),))
    if not target.is_plain:
        raise ValueError(f"target type must be plain, got {target}")
    flat = [s for t in types for s in t]
    stack: list[int] = []
    cups = []
    for i, s in enumerate(flat):
        if stack and _cancels(flat[stack[-1]], s):
            cups.append((stack.pop(), i))
        else:
            stack.append(i)
    residue = tuple(flat[i] for i in stack)
    if residue != target.simples:
        shown = " ".join(map(str, residue)) or "1"
        raise NoReduction(f"residue {shown!r} does not match target {str(target) or '1'!r}", residue)
    return Reduction(types, tuple(sorted(cups)), tuple(stack))


def is_planar(cups: Iterable[tuple[int, int]]) -> bool:
    cups = list(cups)
    for i, j in cups:
        for k, l in cups:
            if i < k < j < l:
                return False
    return True
