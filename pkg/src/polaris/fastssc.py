"""Single-path execution of unrolled schedules.

This is the list-size-one fast path: every leaf takes its most likely
decision directly (threshold, repetition sign, Wagner rule for parity
nodes), so the whole program is branch-free and runs batched over any
number of frames at once.  The list decoder reproduces these outputs
bit for bit when run with a single path.
"""

from __future__ import annotations

import numpy as np

from .kernels import clamp_llr, f_op, g_op
from .schedule import NodeKind, Schedule

__all__ = ["execute_schedule"]


def execute_schedule(llrs, schedule: Schedule) -> tuple[np.ndarray, np.ndarray]:
    """Run ``schedule`` on a batch of channel LLR frames at list size one.

    Parameters
    ----------
    llrs : array_like
        Shape (frames, N) or (N,); clamped and converted to float32.
    schedule : Schedule
        Unrolled program from :func:`polaris.schedule.build_schedule`.

    Returns
    -------
    (numpy.ndarray, numpy.ndarray)
        Codeword estimates, shape (frames, N) uint8, and the accumulated
        path metric per frame (never positive).
    """
    spec = schedule.spec
    llrs = clamp_llr(np.atleast_2d(np.asarray(llrs)))
    if llrs.shape[1] != spec.N:
        raise ValueError(f"LLR frames have {llrs.shape[1]} values, spec wants {spec.N}")
    batch, n = llrs.shape[0], spec.n
    alpha = [np.empty((batch, 1 << s), dtype=np.float32) for s in range(n)]
    beta = [
        [np.empty((batch, 1 << s), dtype=np.uint8) for _ in range(2)] for s in range(n)
    ]
    root = np.empty((batch, spec.N), dtype=np.uint8)
    pm = np.zeros(batch, dtype=np.float64)

    for op in schedule.ops:
        s, m, h = op.stage, op.size, op.size >> 1
        src = llrs if m == spec.N else alpha[s]
        if op.kind is NodeKind.F:
            alpha[s - 1][:] = f_op(src)
            continue
        if op.kind is NodeKind.G:
            alpha[s - 1][:] = g_op(src, beta[s - 1][0])
            continue
        dst = root if m == spec.N else beta[s][op.side]
        if op.kind is NodeKind.COMBINE:
            left, right = beta[s - 1]
            dst[:, :h] = left ^ right
            dst[:, h:] = right
        elif op.kind is NodeKind.RATE0:
            dst[:] = 0
            pm += np.minimum(src, 0.0).sum(axis=1)
        elif op.kind is NodeKind.RATE1:
            dst[:] = src < 0
        elif op.kind is NodeKind.REP:
            negative = np.minimum(src, 0.0).sum(axis=1)
            positive = np.maximum(src, 0.0).sum(axis=1)
            ones = src.sum(axis=1) < 0
            dst[:] = ones[:, None]
            pm += np.where(ones, -positive, negative)
        elif op.kind is NodeKind.SPC:
            word = (src < 0).astype(np.uint8)
            magnitude = np.abs(src)
            weakest = magnitude.argmin(axis=1)
            odd = np.flatnonzero((word.sum(axis=1) & 1) == 1)
            word[odd, weakest[odd]] ^= 1
            dst[:] = word
            pm[odd] -= magnitude[odd, weakest[odd]]
        else:
            raise RuntimeError(f"unexpected op {op.kind} in schedule")
    return root, pm
