"""Polar code toolkit.

Construction, encoding, unrolled fast-SSC schedules, CRC-aided
successive-cancellation list decoding, and a Monte-Carlo simulation
harness.
"""

from .codes import (
    CRC8,
    CRC16,
    CRC32,
    CodeSpec,
    CrcConfig,
    construct_frozen_set,
    crc_check,
    crc_checksum_bits,
    crc_compute,
)
from .encode import MessageFrame, attach_and_encode, extract_payload, polar_encode
from .schedule import (
    NodeKind,
    NodeOp,
    Schedule,
    ScheduleConfig,
    build_schedule,
    classify,
    emit_source,
)
from .kernels import (
    LLR_CLAMP,
    NodeCandidate,
    clamp_llr,
    combine_op,
    f_op,
    g_op,
    hard_decision,
    rate0_delta,
    rate1_candidates,
    rep_candidates,
    spc_candidates,
)
from .fastssc import execute_schedule
from .listdec import (
    AdaptiveDecoder,
    DecodeResult,
    ListDecoder,
    PathOutcome,
    adaptive_decode,
    decode,
    select_candidates,
)
from .reference import PerBitSCList, sc_decode_batch
from .sim import (
    BenchRecord,
    ChannelConfig,
    SimRecord,
    bench,
    run_sweep,
    transmit,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "CRC8",
    "CRC16",
    "CRC32",
    "CodeSpec",
    "CrcConfig",
    "construct_frozen_set",
    "crc_check",
    "crc_checksum_bits",
    "crc_compute",
    "MessageFrame",
    "attach_and_encode",
    "extract_payload",
    "polar_encode",
    "NodeKind",
    "NodeOp",
    "Schedule",
    "ScheduleConfig",
    "build_schedule",
    "classify",
    "emit_source",
    "LLR_CLAMP",
    "NodeCandidate",
    "clamp_llr",
    "combine_op",
    "f_op",
    "g_op",
    "hard_decision",
    "rate0_delta",
    "rate1_candidates",
    "rep_candidates",
    "spc_candidates",
    "execute_schedule",
    "AdaptiveDecoder",
    "DecodeResult",
    "ListDecoder",
    "PathOutcome",
    "adaptive_decode",
    "decode",
    "select_candidates",
    "PerBitSCList",
    "sc_decode_batch",
    "BenchRecord",
    "ChannelConfig",
    "SimRecord",
    "bench",
    "run_sweep",
    "transmit",
    "write_csv",
    "__version__",
]
