"""Pairwise contraction of small tensor networks with hashable index labels."""
from __future__ import annotations

import math
from collections import Counter
from typing import Hashable, Sequence

import numpy as np

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _einsum(ops: Sequence[tuple[np.ndarray, list]], keep: list) -> np.ndarray:
    local: dict = {}
    for _, labels in ops:
        for lab in labels:
            local.setdefault(lab, _LETTERS[len(local)])
    for lab in keep:
        local.setdefault(lab, _LETTERS[len(local)])
    subscripts = ",".join("".join(local[l] for l in labels) for _, labels in ops)
    subscripts += "->" + "".join(local[l] for l in keep)
    return np.einsum(subscripts, *(t for t, _ in ops))


def contract(
    tensors: Sequence[np.ndarray],
    labels: Sequence[Sequence[Hashable]],
    output: Sequence[Hashable],
    order: Sequence[tuple[int, int]] | None = None,
) -> np.ndarray:
    """Contract ``tensors`` whose axes carry ``labels``.

    A label shared by two axes is summed over; a label repeated inside one
    tensor is traced. Labels listed in ``output`` stay open, in that order.
    ``order`` optionally fixes the pairwise schedule as positions into the
    current working list (the merged tensor is appended at the end);
    otherwise a greedy smallest-intermediate schedule is used.
    """
    output = list(output)
    work = []
    for t, labs in zip(tensors, labels):
        t = np.asarray(t, dtype=complex)
        labs = list(labs)
        if t.ndim != len(labs):
            raise ValueError(f"tensor of rank {t.ndim} given {len(labs)} labels")
        work.append((t, labs))

    out_set = set(output)

    def open_after(i, j, counts):
        li, lj = work[i][1], work[j][1]
        keep = []
        for lab in li + lj:
            if lab in keep:
                continue
            if lab in out_set or counts[lab] > li.count(lab) + lj.count(lab):
                keep.append(lab)
        return keep

    # self traces first
    for k, (t, labs) in enumerate(work):
        if len(set(labs)) != len(labs):
            keep = [l for l in labs if labs.count(l) == 1]
            work[k] = (_einsum([(t, labs)], keep), keep)

    schedule = list(order) if order is not None else None
    while len(work) > 1:
        counts = Counter(l for _, ls in work for l in ls)
        if schedule:
            i, j = schedule.pop(0)
        else:
            dims = {l: t.shape[a] for t, ls in work for a, l in enumerate(ls)}
            holders: dict = {}
            for k, (_, ls) in enumerate(work):
                for l in set(ls):
                    holders.setdefault(l, []).append(k)
            pairs = {tuple(sorted((h[0], h[1]))) for h in holders.values() if len(h) == 2}
            if not pairs:
                # disconnected pieces: outer product of the two smallest
                i, j = sorted(sorted(range(len(work)), key=lambda k: (work[k][0].size, k))[:2])
            else:
                best = None
                for i0, j0 in pairs:
                    keep = open_after(i0, j0, counts)
                    size = math.prod(dims[l] for l in keep)
                    key = (size, i0, j0)
                    if best is None or key < best:
                        best = key
                _, i, j = best
        keep = open_after(i, j, counts)
        merged = (_einsum([work[i], work[j]], keep), keep)
        work = [w for k, w in enumerate(work) if k not in (i, j)] + [merged]

    if not work:
        return np.ones((), dtype=complex)
    t, labs = work[0]
    missing = [l for l in output if l not in labs]
    if missing:
        raise ValueError(f"output labels {missing} not present")
    return _einsum([(t, labs)], output)
