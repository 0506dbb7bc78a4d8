"""Reference decoders: per-bit successive cancellation, list or plain.

These stay deliberately textbook: one decision per u index, full state
copies when paths fork, plain sort-based pruning.  They share nothing
with the schedule machinery, so the unrolled decoders can be checked
against them.
"""

from __future__ import annotations

import numpy as np

from .codes import CodeSpec
from .encode import extract_payload
from .listdec import DecodeResult

__all__ = ["PerBitSCList", "sc_decode_batch"]


def _f(left, right):
    return np.sign(left) * np.sign(right) * np.minimum(np.abs(left), np.abs(right))


def _g(left, right, bits):
    return right + (1.0 - 2.0 * bits).astype(right.dtype) * left


class _Path:
    __slots__ = ("alpha", "beta", "u", "pm")

    def __init__(self, n):
        # alpha[s] / beta[s][side] hold the working vectors of stage s
        self.alpha = [np.empty(1 << s, dtype=np.float32) for s in range(n)]
        self.beta = [
            [np.zeros(1 << s, dtype=np.uint8) for _ in range(2)] for s in range(n)
        ]
        self.u = np.zeros(1 << n, dtype=np.uint8)
        self.pm = 0.0

    def clone(self):
        other = _Path.__new__(_Path)
        other.alpha = [a.copy() for a in self.alpha]
        other.beta = [[b.copy() for b in pair] for pair in self.beta]
        other.u = self.u.copy()
        other.pm = self.pm
        return other


class PerBitSCList:
    """Successive-cancellation list decoder, one bit at a time.

    Parameters
    ----------
    spec : CodeSpec
        Code description; its CRC (when present) picks the output path.
    list_size : int
        Maximum number of paths kept alive.
    """

    def __init__(self, spec: CodeSpec, list_size: int = 1):
        if list_size < 1:
            raise ValueError(f"list size {list_size} must be >= 1")
        self.spec = spec
        self.list_size = list_size

    def decode_paths(self, llr) -> list[tuple[np.ndarray, float]]:
        """Run the list pass and return every survivor as (u, path metric)."""
        spec = self.spec
        llr = np.clip(np.asarray(llr, dtype=np.float32).ravel(), -2.0 ** 20, 2.0 ** 20)
        if llr.size != spec.N:
            raise ValueError(f"LLR frame has {llr.size} values, spec wants {spec.N}")
        n = spec.n
        paths = [_Path(n)]
        for i in range(spec.N):
            # refresh LLR stages: after bit i-1, stages below the lowest
            # set bit of i switch to the right-child update
            if i == 0:
                start = n
            else:
                start = (i & -i).bit_length() - 1
                for p in paths:
                    upper = llr if start + 1 == n else p.alpha[start + 1]
                    p.alpha[start] = _g(
                        upper[: 1 << start], upper[1 << start :], p.beta[start][0]
                    )
            for s in range(start - 1, -1, -1):
                for p in paths:
                    upper = llr if s + 1 == n else p.alpha[s + 1]
                    p.alpha[s] = _f(upper[: 1 << s], upper[1 << s :])

            if spec.frozen_mask[i]:
                for p in paths:
                    a = float(p.alpha[0][0])
                    if a < 0.0:
                        p.pm -= -a
                    self._store_bit(p, i, 0, llr)
            else:
                # every path offers both bit values; keep the best list_size
                options = []
                for pi, p in enumerate(paths):
                    a = float(p.alpha[0][0])
                    penalty = abs(a)
                    hard = 1 if a < 0.0 else 0
                    options.append((p.pm - (penalty if hard != 0 else 0.0), pi, 0))
                    options.append((p.pm - (penalty if hard != 1 else 0.0), pi, 1))
                options.sort(key=lambda t: (-t[0], t[1], t[2]))
                chosen = options[: self.list_size]
                used = [False] * len(paths)
                survivors = []
                for pm_new, pi, bit in sorted(chosen, key=lambda t: (t[1], t[2])):
                    p = paths[pi] if not used[pi] else paths[pi].clone()
                    used[pi] = True
                    p.pm = pm_new
                    self._store_bit(p, i, bit, llr)
                    survivors.append(p)
                paths = survivors
        return [(p.u.copy(), p.pm) for p in paths]

    def decode(self, llr) -> DecodeResult:
        return self._pick(self.decode_paths(llr))

    def _store_bit(self, p: _Path, i: int, bit: int, llr) -> None:
        p.u[i] = bit
        word = np.array([bit], dtype=np.uint8)
        s = 0
        while True:
            side = (i >> s) & 1
            if s == p.u.size.bit_length() - 1:
                break
            if side == 0:
                p.beta[s][0][:] = word
                break
            p.beta[s][1][:] = word
            word = np.concatenate([p.beta[s][0] ^ word, word])
            s += 1

    def _pick(self, paths) -> DecodeResult:
        outcomes = []
        for u, pm in paths:
            payload, ok = extract_payload(u, self.spec)
            outcomes.append((payload, ok, pm))
        pool = [o for o in outcomes if o[1]] or outcomes
        best = pool[0]
        for o in pool[1:]:
            if o[2] > best[2]:
                best = o
        return DecodeResult(
            info_bits=best[0],
            crc_ok=best[1],
            chosen_pm=best[2],
            paths_used=len(paths),
            invoked_list=True,
        )


def sc_decode_batch(llrs, frozen_mask) -> np.ndarray:
    """Plain successive cancellation over a batch of frames.

    Decides each u index in order with the threshold rule (frozen indices
    forced to zero) and returns the u-domain estimates, shape (frames, N).
    """
    llrs = np.atleast_2d(np.asarray(llrs, dtype=np.float32))
    mask = np.asarray(frozen_mask, dtype=np.uint8).ravel()
    if llrs.shape[1] != mask.size:
        raise ValueError(f"LLR width {llrs.shape[1]} != mask length {mask.size}")
    decisions = []

    def descend(alpha, lo, hi):
        m = hi - lo
        if m == 1:
            if mask[lo]:
                bit = np.zeros(alpha.shape[0], dtype=np.uint8)
            else:
                bit = (alpha[:, 0] < 0).astype(np.uint8)
            decisions.append(bit)
            return bit[:, None]
        h = m // 2
        left = descend(_f(alpha[:, :h], alpha[:, h:]), lo, lo + h)
        right = descend(_g(alpha[:, :h], alpha[:, h:], left), lo + h, hi)
        return np.concatenate([left ^ right, right], axis=1)

    descend(llrs, 0, mask.size)
    return np.stack(decisions, axis=1)
