"""Node computation kernels.

F / G / Combine are the min-sum tree updates; the candidate generators
implement the constituent decoders.  Every generator returns candidates
ordered most likely first, each carrying a path-metric delta that is never
positive: the penalty for the codeword bits that disagree with the
element-wise hard decision, weighted by |LLR|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LLR_CLAMP",
    "clamp_llr",
    "f_op",
    "g_op",
    "combine_op",
    "hard_decision",
    "NodeCandidate",
    "rate0_delta",
    "rep_candidates",
    "rate1_candidates",
    "spc_candidates",
]

# channel LLR saturation bound
LLR_CLAMP = float(2 ** 20)


def clamp_llr(a) -> np.ndarray:
    """Saturate LLRs to +/- 2^20 and convert to float32."""
    return np.clip(a, -LLR_CLAMP, LLR_CLAMP).astype(np.float32)


def f_op(a) -> np.ndarray:
    """Min-sum F: pairwise sign product times minimum magnitude.

    Pairs element i of the first half of the last axis with element i of
    the second half.  A zero input yields a zero output.
    """
    a = np.asarray(a)
    h = a.shape[-1] // 2
    lo, hi = a[..., :h], a[..., h:]
    return np.sign(lo) * np.sign(hi) * np.minimum(np.abs(lo), np.abs(hi))


def g_op(a, beta_left) -> np.ndarray:
    """G update: out[i] = a[i + half] - (2*beta - 1) * a[i]."""
    a = np.asarray(a)
    h = a.shape[-1] // 2
    sign = 1.0 - 2.0 * np.asarray(beta_left)
    return a[..., h:] + sign.astype(a.dtype) * a[..., :h]


def combine_op(beta_left, beta_right) -> np.ndarray:
    """Merge child estimates: XOR into the first half, copy the second."""
    beta_left = np.asarray(beta_left, dtype=np.uint8)
    beta_right = np.asarray(beta_right, dtype=np.uint8)
    return np.concatenate([beta_left ^ beta_right, beta_right], axis=-1)


def hard_decision(a) -> np.ndarray:
    """Threshold: 0 for a >= 0, else 1."""
    return (np.asarray(a) < 0).astype(np.uint8)


@dataclass(frozen=True)
class NodeCandidate:
    """One constituent-decoder candidate.

    ``decision`` is "zeros", "ones", or "flips"; for "flips" the codeword
    is the element-wise hard decision with the listed positions inverted
    (net flips, so ``delta`` is minus the sum of |LLR| over ``flips``).
    """

    delta: float
    decision: str
    flips: tuple[int, ...] = ()

    def apply(self, alpha) -> np.ndarray:
        """Materialize the candidate codeword for the node LLRs ``alpha``."""
        alpha = np.asarray(alpha)
        if self.decision == "zeros":
            return np.zeros(alpha.shape[-1], dtype=np.uint8)
        if self.decision == "ones":
            return np.ones(alpha.shape[-1], dtype=np.uint8)
        word = hard_decision(alpha)
        for i in self.flips:
            word[i] ^= 1
        return word


def rate0_delta(a) -> float:
    """Metric delta of the all-zero word: sum of the negative LLR parts."""
    a = np.asarray(a)
    return float(np.minimum(a, 0.0).sum())


def rep_candidates(a) -> list[NodeCandidate]:
    """Both repetition codewords, most likely first.

    The all-one word is most likely exactly when the LLR sum is negative;
    a zero sum ties and keeps all-zero first, matching the threshold rule.
    """
    a = np.asarray(a)
    delta_zero = float(np.minimum(a, 0.0).sum())
    delta_one = -float(np.maximum(a, 0.0).sum())
    zero = NodeCandidate(delta=delta_zero, decision="zeros")
    one = NodeCandidate(delta=delta_one, decision="ones")
    return [one, zero] if float(a.sum()) < 0.0 else [zero, one]


def rate1_candidates(a) -> list[NodeCandidate]:
    """Chase set for a rate-1 node: hard decision plus the three words
    flipping one or both of the two least reliable bits.

    Ties on |LLR| resolve to the lower index.  Size-1 nodes are handled as
    repetition nodes, not here.
    """
    a = np.asarray(a)
    if a.shape[-1] < 2:
        raise ValueError("rate-1 generator needs at least 2 positions")
    order = np.argsort(np.abs(a), kind="stable")
    b1, b2 = int(order[0]), int(order[1])
    m1, m2 = float(abs(a[b1])), float(abs(a[b2]))
    return [
        NodeCandidate(delta=0.0, decision="flips"),
        NodeCandidate(delta=-m1, decision="flips", flips=(b1,)),
        NodeCandidate(delta=-m2, decision="flips", flips=(b2,)),
        NodeCandidate(delta=-(m1 + m2), decision="flips", flips=(b1, b2)),
    ]


# flip sets relative to the ML word, in emission order
_SPC_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 1, 2, 3))


def spc_candidates(a, list_limit: int | None = None) -> list[NodeCandidate]:
    """Candidates for a single-parity-check node.

    The ML word is the hard decision, with the least reliable bit flipped
    when the hard parity is odd (q = 0).  The remaining candidates flip
    pairs of the four least reliable bits (and all four) relative to the
    ML word; every emitted word satisfies even parity.  Deltas weigh the
    net flips against the hard decision, so with q = 0 the shared least
    reliable bit is charged only where it actually differs.

    With ``list_limit == 2`` only the first two candidates are emitted.
    """
    a = np.asarray(a)
    if a.shape[-1] < 4:
        raise ValueError(
            f"SPC generator needs at least 4 positions, got {a.shape[-1]}"
            " (a size-2 SPC is a repetition node)"
        )
    mag = np.abs(a)
    order = np.argsort(mag, kind="stable")
    lrb = tuple(int(i) for i in order[:4])
    parity_even = int(hard_decision(a).sum()) % 2 == 0
    ml_flips = () if parity_even else (lrb[0],)

    def net(pair: tuple[int, ...]) -> tuple[int, ...]:
        flips = set(lrb[j] for j in pair) ^ set(ml_flips)
        return tuple(sorted(flips))

    def cand(flips: tuple[int, ...]) -> NodeCandidate:
        delta = -float(sum(mag[i] for i in flips))
        return NodeCandidate(delta=delta, decision="flips", flips=flips)

    out = [cand(ml_flips), cand(net(_SPC_PAIRS[0]))]
    if list_limit == 2:
        return out
    out.extend(cand(net(pair)) for pair in _SPC_PAIRS[1:])
    return out
