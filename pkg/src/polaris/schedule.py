"""Decoding schedule compiler.

A schedule is the flat, branch-free program a decoder replays for every
frame: the frozen mask is classified once into constituent-code leaves
(Rate-0, Rate-1, repetition, single-parity-check) and the surrounding
F / G / Combine operator sequence is unrolled ahead of time.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .codes import CodeSpec

__all__ = [
    "NodeKind",
    "NodeOp",
    "ScheduleConfig",
    "Schedule",
    "classify",
    "build_schedule",
    "emit_source",
]


class NodeKind(enum.Enum):
    F = "F"
    G = "G"
    COMBINE = "Combine"
    RATE0 = "Rate0"
    RATE1 = "Rate1"
    REP = "Rep"
    SPC = "SPC"
    RATE_R = "RateR"  # internal node, never emitted as an op

    @property
    def is_leaf(self) -> bool:
        return self not in (NodeKind.F, NodeKind.G, NodeKind.COMBINE, NodeKind.RATE_R)


@dataclass(frozen=True)
class NodeOp:
    """One schedule step.

    ``stage`` is log2(size).  ``side`` records whether the node writes the
    left (0) or right (1) child slot of its parent's stage; the root uses 0.
    ``spc_truncated`` marks SPC leaves wider than four whose candidate
    enumeration stays restricted to the four least reliable bits.
    """

    kind: NodeKind
    size: int
    stage: int
    side: int = 0
    spc_truncated: bool = False


@dataclass(frozen=True)
class ScheduleConfig:
    """Specialization limits for the schedule compiler.

    ``spc_cap`` is the widest SPC pattern emitted as a single leaf: 4 keeps
    the exactly-enumerated size, None lifts the bound (wider leaves are
    flagged truncated), 0 disables SPC leaves entirely.  The per-kind caps
    bound the other leaf sizes (None = unbounded); capping everything at 1
    yields the per-bit schedule with no specialization.  ``lane_width`` is
    the vector lane count V used to pad stage buffers.
    """

    spc_cap: int | None = 4
    rate0_max: int | None = None
    rate1_max: int | None = None
    rep_max: int | None = None
    lane_width: int = 8

    def __post_init__(self):
        for name in ("spc_cap", "rate0_max", "rate1_max", "rep_max"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be None or >= 0, got {value}")
        v = self.lane_width
        if v < 1 or v & (v - 1):
            raise ValueError(f"lane_width {v} is not a power of two >= 1")

    @classmethod
    def unspecialized(cls, lane_width: int = 8) -> "ScheduleConfig":
        """Per-bit baseline: every leaf has size one."""
        return cls(spc_cap=0, rate0_max=1, rate1_max=1, rep_max=1,
                   lane_width=lane_width)


def classify(mask) -> NodeKind:
    """Classify a frozen-mask slice into a node kind.

    Rules, in order: all frozen -> Rate0; none frozen -> Rate1; only the
    last position unfrozen -> Rep; only the first position frozen (size at
    least 4) -> SPC; anything else -> RateR.  A size-2 slice [1, 0] is Rep:
    the size-2 SPC is the same code.
    """
    mask = np.asarray(mask, dtype=np.uint8).ravel()
    m = mask.size
    if m < 1 or m & (m - 1):
        raise ValueError(f"mask slice length {m} is not a power of two")
    frozen = int(mask.sum())
    if frozen == m:
        return NodeKind.RATE0
    if frozen == 0:
        return NodeKind.RATE1
    if frozen == m - 1 and mask[-1] == 0:
        return NodeKind.REP
    if frozen == 1 and mask[0] == 1 and m >= 4:
        return NodeKind.SPC
    return NodeKind.RATE_R


@dataclass(eq=False)
class Schedule:
    """Unrolled op sequence for one code spec and config."""

    spec: CodeSpec
    config: ScheduleConfig
    ops: list[NodeOp] = field(default_factory=list)

    @property
    def num_ops(self) -> int:
        return len(self.ops)

    def leaf_spans(self) -> list[tuple[NodeOp, int]]:
        """Leaf ops with their leaf-index offsets, in emission order.

        Leaves appear left to right, so their (offset, offset + size)
        ranges partition [0, N).
        """
        spans, cursor = [], 0
        for op in self.ops:
            if op.kind.is_leaf:
                spans.append((op, cursor))
                cursor += op.size
        return spans

    def _stage_pad(self) -> int:
        v = self.config.lane_width
        return sum(max(1 << s, v) for s in range(self.spec.n))

    def alpha_element_budget(self, list_size: int) -> int:
        """LLR elements: shared channel stage plus one lane-padded buffer
        per stage per path."""
        return self.spec.N + list_size * self._stage_pad()

    def beta_element_budget(self, list_size: int) -> int:
        """Bit elements: per path, the root estimate plus left and right
        child slots per stage."""
        return list_size * (self.spec.N + 2 * self._stage_pad())


def build_schedule(spec: CodeSpec, config: ScheduleConfig | None = None) -> Schedule:
    """Unroll the decoding program for ``spec`` under ``config``.

    Nodes whose class survives the config's size caps become single leaf
    ops; everything else expands to F, left subtree, G, right subtree,
    Combine.  Size-1 nodes always terminate (Rate0 or Rate1).
    """
    if config is None:
        config = ScheduleConfig()
    mask = spec.frozen_mask
    ops: list[NodeOp] = []

    def emit(lo: int, hi: int, side: int) -> None:
        m = hi - lo
        stage = m.bit_length() - 1
        kind = classify(mask[lo:hi])
        truncated = False
        if kind is NodeKind.RATE0:
            if config.rate0_max is not None and m > config.rate0_max:
                kind = NodeKind.RATE_R
        elif kind is NodeKind.RATE1:
            if config.rate1_max is not None and m > config.rate1_max:
                kind = NodeKind.RATE_R
        elif kind is NodeKind.REP:
            if config.rep_max is not None and m > config.rep_max:
                kind = NodeKind.RATE_R
        elif kind is NodeKind.SPC:
            if config.spc_cap is not None and m > config.spc_cap:
                kind = NodeKind.RATE_R
            else:
                truncated = m > 4
        if kind is not NodeKind.RATE_R:
            ops.append(NodeOp(kind, m, stage, side, truncated))
            return
        h = m // 2
        ops.append(NodeOp(NodeKind.F, m, stage, side))
        emit(lo, lo + h, 0)
        ops.append(NodeOp(NodeKind.G, m, stage, side))
        emit(lo + h, hi, 1)
        ops.append(NodeOp(NodeKind.COMBINE, m, stage, side))

    emit(0, spec.N, 0)
    return Schedule(spec=spec, config=config, ops=ops)


def emit_source(schedule: Schedule) -> str:
    """Render the schedule as text, one ``<KIND> <size>`` line per op."""
    return "".join(f"{op.kind.value} {op.size}\n" for op in schedule.ops)
