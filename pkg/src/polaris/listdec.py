"""CRC-aided successive-cancellation list decoding of unrolled schedules.

Paths live in per-stage row pools: each stage of each path is one row of
a (2L x width) array, shared between paths through reference counts.
Forking a path only bumps refcounts; because every schedule write covers
a whole stage, a shared row is never modified in place, it is replaced
by a fresh row for the writing path.  Candidate selection at each
constituent leaf follows the two-pass scheme: most likely decisions are
recorded per source path first, then a bounded heap admits the best
``list_size`` candidates overall, breaking ties toward the earlier
source path and candidate.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .encode import extract_payload, polar_encode
from .kernels import clamp_llr, f_op, g_op
from .schedule import NodeKind, Schedule
from . import fastssc

__all__ = [
    "DecodeResult",
    "PathOutcome",
    "select_candidates",
    "ListDecoder",
    "AdaptiveDecoder",
    "decode",
    "adaptive_decode",
]


@dataclass(eq=False)
class DecodeResult:
    """Outcome of one frame.

    ``crc_ok`` is False when the spec has no CRC.  ``invoked_list`` is
    False only for adaptive decodes resolved by the single-path pass.
    """

    info_bits: np.ndarray
    crc_ok: bool
    chosen_pm: float
    paths_used: int
    invoked_list: bool


@dataclass(eq=False)
class PathOutcome:
    """One surviving path, finalized: codeword, u estimate, payload."""

    codeword: np.ndarray
    u: np.ndarray
    info_bits: np.ndarray
    pm: float
    crc_ok: bool


def select_candidates(pools, list_size: int):
    """Pick the surviving candidates across all source paths.

    Parameters
    ----------
    pools : sequence of (float, sequence of float)
        Per source path, its metric and the candidate deltas in
        generation order; index 0 is the path's most likely decision.
    list_size : int
        Number of survivors to keep.

    Returns
    -------
    list of (int, int)
        (source index, candidate index) pairs of the survivors, ordered
        by source then candidate.  Exactly ``min(list_size, total)``
        entries; ties on the updated metric keep the earlier source path
        (then the earlier candidate).
    """
    if list_size < 1:
        raise ValueError(f"list size {list_size} must be >= 1")
    # pass 1: record each source's most likely decision, defer the rest
    stream = []
    for si, (pm, deltas) in enumerate(pools):
        if len(deltas) == 0:
            raise ValueError(f"source path {si} offered no candidates")
        stream.append((pm + deltas[0], si, 0))
        stream.extend((pm + d, si, ci) for ci, d in enumerate(deltas) if ci > 0)
    # pass 2: admit while under capacity, then replace the strict minimum;
    # heap keys break metric ties by evicting the latest entry first, so
    # earlier sources/candidates win
    heap = []
    for seq, (pm_new, si, ci) in enumerate(stream):
        if len(heap) < list_size:
            heapq.heappush(heap, (pm_new, -seq, si, ci))
        elif pm_new > heap[0][0]:
            heapq.heapreplace(heap, (pm_new, -seq, si, ci))
    return [(si, ci) for _, _, si, ci in sorted(heap, key=lambda t: -t[1])]


class _RowPool:
    """Refcounted rows of one stage buffer bank.

    Rows are only ever written whole, so a shared row never needs a data
    copy: the writer releases its reference and takes a fresh row.
    """

    __slots__ = ("data", "refs", "free")

    def __init__(self, rows: int, width: int, dtype):
        self.data = np.zeros((rows, width), dtype=dtype)
        self.refs = [0] * rows
        self.free = list(range(rows - 1, -1, -1))

    def alloc(self) -> int:
        if not self.free:
            raise RuntimeError("path buffer pool exhausted (internal error)")
        row = self.free.pop()
        self.refs[row] = 1
        return row

    def share(self, row: int) -> None:
        self.refs[row] += 1

    def release(self, row: int) -> None:
        count = self.refs[row] - 1
        self.refs[row] = count
        if count == 0:
            self.free.append(row)

    def detach(self, row: int) -> int:
        """Return a row this holder may overwrite (the same row when it
        is privately owned, else a fresh one)."""
        if self.refs[row] == 1:
            return row
        self.refs[row] -= 1
        return self.alloc()

    def reset(self) -> None:
        self.refs = [0] * len(self.refs)
        self.free = list(range(len(self.refs) - 1, -1, -1))


class _Path:
    __slots__ = ("pm", "alpha", "beta", "root")

    def __init__(self, pm, alpha, beta, root):
        self.pm = pm
        self.alpha = alpha  # row per stage 0..n-1
        self.beta = beta  # row per (stage, side), flat index 2*stage + side
        self.root = root


# candidate flip pairs over the four least reliable bits, emission order
_SPC_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 1, 2, 3))


class ListDecoder:
    """List decoder over one schedule, reusable across frames.

    Parameters
    ----------
    schedule : Schedule
        Unrolled program; its spec supplies frozen mask and CRC.
    list_size : int
        Maximum number of paths kept alive.
    """

    def __init__(self, schedule: Schedule, list_size: int):
        if list_size < 1:
            raise ValueError(f"list size {list_size} must be >= 1")
        self.schedule = schedule
        self.spec = schedule.spec
        self.list_size = list_size
        n = self.spec.n
        v = schedule.config.lane_width
        rows = 2 * list_size
        self._apool = [_RowPool(rows, max(1 << s, v), np.float32) for s in range(n)]
        self._bpool = [
            _RowPool(rows, max(1 << (i // 2), v), np.uint8) for i in range(2 * n)
        ]
        self._rpool = _RowPool(rows, self.spec.N, np.uint8)
        self._channel = np.empty(self.spec.N, dtype=np.float32)

    # -- pool plumbing -------------------------------------------------

    def _reset(self) -> None:
        for pool in self._apool:
            pool.reset()
        for pool in self._bpool:
            pool.reset()
        self._rpool.reset()

    def _new_root_path(self) -> _Path:
        alpha = [pool.alloc() for pool in self._apool]
        beta = [pool.alloc() for pool in self._bpool]
        return _Path(0.0, alpha, beta, self._rpool.alloc())

    def _fork(self, path: _Path) -> _Path:
        for s, pool in enumerate(self._apool):
            pool.share(path.alpha[s])
        for i, pool in enumerate(self._bpool):
            pool.share(path.beta[i])
        self._rpool.share(path.root)
        return _Path(path.pm, list(path.alpha), list(path.beta), path.root)

    def _drop(self, path: _Path) -> None:
        for s, pool in enumerate(self._apool):
            pool.release(path.alpha[s])
        for i, pool in enumerate(self._bpool):
            pool.release(path.beta[i])
        self._rpool.release(path.root)

    def _gather_alpha(self, paths, stage: int, size: int) -> np.ndarray:
        if size == self.spec.N:
            return np.broadcast_to(self._channel, (len(paths), size))
        data = self._apool[stage].data
        if len(paths) == 1:
            row = paths[0].alpha[stage]
            return data[row : row + 1, :size]
        return data[[p.alpha[stage] for p in paths], :size]

    def _write_alpha(self, paths, stage: int, size: int, values) -> None:
        pool = self._apool[stage]
        if len(paths) == 1:
            p = paths[0]
            p.alpha[stage] = row = pool.detach(p.alpha[stage])
            pool.data[row, :size] = values[0]
            return
        rows = []
        for p in paths:
            p.alpha[stage] = row = pool.detach(p.alpha[stage])
            rows.append(row)
        pool.data[rows, :size] = values

    def _gather_beta(self, paths, stage: int, side: int, size: int) -> np.ndarray:
        data = self._bpool[2 * stage + side].data
        if len(paths) == 1:
            row = paths[0].beta[2 * stage + side]
            return data[row : row + 1, :size]
        return data[[p.beta[2 * stage + side] for p in paths], :size]

    def _write_beta(self, paths, op, words) -> None:
        """Store each path's beta output for ``op``; one row per path."""
        size = op.size
        if size == self.spec.N:
            pool = self._rpool
            if len(paths) == 1:
                p = paths[0]
                p.root = row = pool.detach(p.root)
                pool.data[row, :size] = words[0]
                return
            rows = []
            for p in paths:
                p.root = row = pool.detach(p.root)
                rows.append(row)
        else:
            slot = 2 * op.stage + op.side
            pool = self._bpool[slot]
            if len(paths) == 1:
                p = paths[0]
                p.beta[slot] = row = pool.detach(p.beta[slot])
                pool.data[row, :size] = words[0]
                return
            rows = []
            for p in paths:
                p.beta[slot] = row = pool.detach(p.beta[slot])
                rows.append(row)
        pool.data[rows, :size] = words

    # -- decoding ------------------------------------------------------

    def decode_paths(self, llr) -> list[PathOutcome]:
        """Decode one frame and finalize every surviving path."""
        paths = self._run(llr)
        outcomes = []
        for p in paths:
            codeword = self._rpool.data[p.root].copy()
            u = polar_encode(codeword)
            payload, ok = extract_payload(u, self.spec)
            outcomes.append(
                PathOutcome(codeword=codeword, u=u, info_bits=payload, pm=p.pm,
                            crc_ok=ok)
            )
        return outcomes

    def decode(self, llr) -> DecodeResult:
        """Decode one frame to the best path.

        A CRC-passing path wins over any metric; among equals the better
        metric, then the earlier survivor, is kept.  Without a CRC (or
        with no passing path) the best metric decides.
        """
        outcomes = self.decode_paths(llr)
        pool = [o for o in outcomes if o.crc_ok] or outcomes
        best = pool[0]
        for o in pool[1:]:
            if o.pm > best.pm:
                best = o
        return DecodeResult(
            info_bits=best.info_bits,
            crc_ok=best.crc_ok,
            chosen_pm=best.pm,
            paths_used=len(outcomes),
            invoked_list=True,
        )

    def _run(self, llr) -> list[_Path]:
        llr = np.asarray(llr).ravel()
        if llr.size != self.spec.N:
            raise ValueError(f"LLR frame has {llr.size} values, spec wants {self.spec.N}")
        self._reset()
        self._channel[:] = clamp_llr(llr)
        paths = [self._new_root_path()]
        for op in self.schedule.ops:
            kind = op.kind
            if kind is NodeKind.F:
                alpha = self._gather_alpha(paths, op.stage, op.size)
                self._write_alpha(paths, op.stage - 1, op.size >> 1, f_op(alpha))
            elif kind is NodeKind.G:
                alpha = self._gather_alpha(paths, op.stage, op.size)
                h = op.size >> 1
                left = self._gather_beta(paths, op.stage - 1, 0, h)
                self._write_alpha(paths, op.stage - 1, h, g_op(alpha, left))
            elif kind is NodeKind.COMBINE:
                h = op.size >> 1
                left = self._gather_beta(paths, op.stage - 1, 0, h)
                right = self._gather_beta(paths, op.stage - 1, 1, h)
                merged = np.concatenate([left ^ right, right], axis=1)
                self._write_beta(paths, op, merged)
            else:
                paths = self._leaf(op, paths)
        return paths

    def _leaf(self, op, paths) -> list[_Path]:
        alpha = self._gather_alpha(paths, op.stage, op.size)
        kind = op.kind
        if kind is NodeKind.RATE0:
            deltas = np.minimum(alpha, 0.0).sum(axis=1).tolist()
            for t, p in enumerate(paths):
                p.pm += deltas[t]
            zero = np.zeros(op.size, dtype=np.uint8)
            self._write_beta(paths, op, np.broadcast_to(zero, alpha.shape))
            return paths
        if kind is NodeKind.REP or (kind is NodeKind.RATE1 and op.size == 1):
            negative = np.minimum(alpha, 0.0).sum(axis=1).tolist()
            positive = np.maximum(alpha, 0.0).sum(axis=1).tolist()
            ones_first = (alpha.sum(axis=1) < 0).tolist()
            pools, descs = [], []
            for t, p in enumerate(paths):
                if ones_first[t]:
                    pools.append((p.pm, (-positive[t], negative[t])))
                    descs.append(("ones", "zeros"))
                else:
                    pools.append((p.pm, (negative[t], -positive[t])))
                    descs.append(("zeros", "ones"))
            return self._materialize(op, paths, pools, descs, None)
        if kind is NodeKind.RATE1:
            magnitude = np.abs(alpha)
            order = np.argsort(magnitude, axis=1, kind="stable")[:, :2]
            mags = np.take_along_axis(magnitude, order, axis=1).tolist()
            idx = order.tolist()
            pools, descs = [], []
            for t, p in enumerate(paths):
                b1, b2 = idx[t]
                m1, m2 = mags[t]
                pools.append((p.pm, (0.0, -m1, -m2, -(m1 + m2))))
                descs.append(((), (b1,), (b2,), (b1, b2)))
            hard = (alpha < 0).astype(np.uint8)
            return self._materialize(op, paths, pools, descs, hard)
        if kind is NodeKind.SPC:
            magnitude = np.abs(alpha)
            order = np.argsort(magnitude, axis=1, kind="stable")[:, :4]
            mags = np.take_along_axis(magnitude, order, axis=1).tolist()
            idx = order.tolist()
            hard = (alpha < 0).astype(np.uint8)
            odd = ((hard.sum(axis=1) & 1) == 1).tolist()
            pools, descs = [], []
            for t, p in enumerate(paths):
                lrb = idx[t]
                weight = dict(zip(lrb, mags[t]))
                ml = (lrb[0],) if odd[t] else ()
                deltas = [-sum(weight[i] for i in ml)]
                flips = [ml]
                pairs = _SPC_PAIRS if self.list_size != 2 else _SPC_PAIRS[:1]
                for pair in pairs:
                    net = tuple(sorted({lrb[j] for j in pair} ^ set(ml)))
                    flips.append(net)
                    deltas.append(-sum(weight[i] for i in net))
                pools.append((p.pm, deltas))
                descs.append(flips)
            return self._materialize(op, paths, pools, descs, hard)
        raise RuntimeError(f"unexpected op {op.kind} in schedule")

    def _materialize(self, op, paths, pools, descs, hard) -> list[_Path]:
        chosen = select_candidates(pools, self.list_size)
        survivors: list[_Path] = []
        sources: list[int] = []
        picks: list = []
        cursor = 0
        for si, p in enumerate(paths):
            group = []
            while cursor < len(chosen) and chosen[cursor][0] == si:
                group.append(chosen[cursor][1])
                cursor += 1
            if not group:
                self._drop(p)
                continue
            base_pm = pools[si][0]
            deltas = pools[si][1]
            hosts = [p] + [self._fork(p) for _ in group[1:]]
            for host, ci in zip(hosts, group):
                host.pm = base_pm + deltas[ci]
                survivors.append(host)
                sources.append(si)
                picks.append(descs[si][ci])
        if len(paths) + len(survivors) > 2 * self.list_size:
            raise RuntimeError("path count exceeded pool capacity (internal error)")
        if hard is None:
            # decisions are all-zero / all-one words
            words = np.zeros((len(survivors), op.size), dtype=np.uint8)
            ones = [t for t, d in enumerate(picks) if d == "ones"]
            if ones:
                words[ones] = 1
        else:
            words = hard[sources]
            flip_rows = [t for t, flips in enumerate(picks) for _ in flips]
            if flip_rows:
                flip_cols = [i for flips in picks for i in flips]
                words[flip_rows, flip_cols] ^= 1
        self._write_beta(survivors, op, words)
        return survivors


class AdaptiveDecoder:
    """Single-path pass first; the full list only on CRC failure."""

    def __init__(self, schedule: Schedule, list_size: int):
        if schedule.spec.crc is None:
            raise ValueError("adaptive decoding needs a CRC in the code spec")
        self.schedule = schedule
        self.list_size = list_size
        self._list = ListDecoder(schedule, list_size)

    def decode(self, llr) -> DecodeResult:
        codewords, pms = fastssc.execute_schedule(llr, self.schedule)
        u = polar_encode(codewords[0])
        payload, ok = extract_payload(u, self.schedule.spec)
        if ok:
            return DecodeResult(
                info_bits=payload,
                crc_ok=True,
                chosen_pm=float(pms[0]),
                paths_used=1,
                invoked_list=False,
            )
        return self._list.decode(llr)


def decode(llr, schedule: Schedule, list_size: int) -> DecodeResult:
    """One-shot list decode of a single frame.

    Builds a fresh decoder; reuse :class:`ListDecoder` when decoding
    many frames.
    """
    return ListDecoder(schedule, list_size).decode(llr)


def adaptive_decode(llr, schedule: Schedule, list_size: int) -> DecodeResult:
    """One-shot adaptive decode of a single frame."""
    return AdaptiveDecoder(schedule, list_size).decode(llr)
