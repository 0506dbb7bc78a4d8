"""Monte-Carlo simulation and latency benchmarking.

Every frame owns a counter-based RNG substream keyed by (seed, frame
index), so results are reproducible and independent of how frames are
distributed across workers.  Latency statistics exclude the first 100
frames each worker decodes; error counts never exclude anything.
"""

from __future__ import annotations

import csv
import math
import os
import statistics
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .codes import CodeSpec
from .encode import attach_and_encode
from .kernels import clamp_llr
from .listdec import AdaptiveDecoder, ListDecoder
from .reference import PerBitSCList
from .schedule import Schedule, ScheduleConfig, build_schedule

__all__ = [
    "ChannelConfig",
    "SimRecord",
    "BenchRecord",
    "transmit",
    "run_sweep",
    "bench",
    "write_csv",
    "CSV_FIELDS",
]

CSV_FIELDS = (
    "snr_db",
    "frames",
    "frame_errors",
    "bit_errors",
    "FER",
    "BER",
    "mean_latency_us",
    "info_throughput_mbps",
    "invoked_list_fraction",
)

_WARMUP_FRAMES = 100


@dataclass(frozen=True)
class ChannelConfig:
    """BPSK over AWGN at a given information-bit Eb/N0."""

    eb_n0_db: float
    rate: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError(f"code rate {self.rate} outside (0, 1]")

    @property
    def sigma(self) -> float:
        """Noise standard deviation per dimension."""
        return math.sqrt(1.0 / (2.0 * self.rate * 10.0 ** (self.eb_n0_db / 10.0)))


def frame_rng(seed: int, frame: int) -> np.random.Generator:
    """Counter-based substream for one frame: payload bits are drawn
    first, then the noise samples."""
    return np.random.Generator(np.random.Philox(key=[seed, frame]))


def transmit(codeword, cfg: ChannelConfig, frame: int = 0, rng=None) -> np.ndarray:
    """Map a codeword to channel LLRs: BPSK (0 -> +1), AWGN, 2y/sigma^2.

    LLRs saturate at +/- 2^20, so a noiseless channel (sigma -> 0) still
    produces finite values whose signs encode the bits.
    """
    if rng is None:
        rng = frame_rng(cfg.seed, frame)
    symbols = 1.0 - 2.0 * np.asarray(codeword, dtype=np.float64)
    received = symbols + rng.normal(0.0, cfg.sigma, symbols.shape)
    with np.errstate(divide="ignore", over="ignore"):
        llr = np.divide(2.0 * received, cfg.sigma ** 2)
    return clamp_llr(llr)


@dataclass
class SimRecord:
    """One sweep point.  ``hit_max_frames`` flags a stop forced by the
    frame budget before the error target; it is not a CSV column."""

    snr_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    mean_latency_us: float
    info_throughput_mbps: float
    invoked_list_fraction: float
    hit_max_frames: bool = False


@dataclass
class BenchRecord:
    variant: str
    list_size: int
    frames: int
    mean_latency_us: float
    median_latency_us: float


def write_csv(records, target) -> None:
    """Write sweep records with the fixed 9-column header."""

    def _dump(fh):
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for r in records:
            writer.writerow(
                [
                    f"{r.snr_db:g}",
                    r.frames,
                    r.frame_errors,
                    r.bit_errors,
                    f"{r.fer:.6g}",
                    f"{r.ber:.6g}",
                    f"{r.mean_latency_us:.3f}",
                    f"{r.info_throughput_mbps:.4f}",
                    f"{r.invoked_list_fraction:.6g}",
                ]
            )

    if hasattr(target, "write"):
        _dump(target)
    else:
        with open(target, "w", newline="", encoding="ascii") as fh:
            _dump(fh)


# worker-process state: decoder built once per worker, plus the count of
# frames it has timed so far (for warm-up exclusion)
_WORKER: dict = {}


def _build_decoder(schedule: Schedule, list_size: int, adaptive: bool):
    if adaptive:
        return AdaptiveDecoder(schedule, list_size)
    return ListDecoder(schedule, list_size)


def _init_worker(schedule, list_size, adaptive):
    _WORKER["decoder"] = _build_decoder(schedule, list_size, adaptive)
    _WORKER["spec"] = schedule.spec
    _WORKER["timed"] = 0


def _chunk_counts(decoder, spec, state, snr_db, seed, start, count):
    cfg = ChannelConfig(eb_n0_db=snr_db, rate=spec.rate, seed=seed)
    frame_errors = bit_errors = invoked = 0
    lat_sum = 0.0
    lat_timed = 0
    lat_all_sum = 0.0
    for frame in range(start, start + count):
        rng = frame_rng(seed, frame)
        payload = rng.integers(0, 2, spec.k, dtype=np.uint8)
        sent = attach_and_encode(payload, spec)
        llr = transmit(sent.codeword, cfg, rng=rng)
        t0 = time.perf_counter_ns()
        result = decoder.decode(llr)
        dt_us = (time.perf_counter_ns() - t0) / 1000.0
        lat_all_sum += dt_us
        if state["timed"] >= _WARMUP_FRAMES:
            lat_sum += dt_us
            lat_timed += 1
        state["timed"] += 1
        if result.invoked_list:
            invoked += 1
        errors = int(np.count_nonzero(result.info_bits != payload))
        bit_errors += errors
        if errors:
            frame_errors += 1
    return count, frame_errors, bit_errors, invoked, lat_sum, lat_timed, lat_all_sum


def _sim_chunk(args):
    snr_db, seed, start, count = args
    return _chunk_counts(
        _WORKER["decoder"], _WORKER["spec"], _WORKER, snr_db, seed, start, count
    )


def _sweep_point(schedule, list_size, adaptive, snr_db, min_errors, max_frames,
                 seed, workers, chunk_size) -> SimRecord:
    spec = schedule.spec
    totals = dict(frames=0, ferr=0, berr=0, invoked=0, lat=0.0, timed=0, lat_all=0.0)

    def absorb(res) -> None:
        frames, ferr, berr, invoked, lat, timed, lat_all = res
        totals["frames"] += frames
        totals["ferr"] += ferr
        totals["berr"] += berr
        totals["invoked"] += invoked
        totals["lat"] += lat
        totals["timed"] += timed
        totals["lat_all"] += lat_all

    def stop() -> bool:
        if min_errors > 0 and totals["ferr"] >= min_errors:
            return True
        return totals["frames"] >= max_frames

    def chunks():
        start = 0
        while start < max_frames:
            size = min(chunk_size, max_frames - start)
            yield (snr_db, seed, start, size)
            start += size

    if workers <= 1:
        decoder = _build_decoder(schedule, list_size, adaptive)
        state = {"timed": 0}
        for task in chunks():
            absorb(_chunk_counts(decoder, spec, state, *task))
            if stop():
                break
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(schedule, list_size, adaptive),
        ) as pool:
            # futures resolve out of order, but results are absorbed in
            # submission order so the stop decision (hence every count)
            # is independent of the worker split
            pending = deque()
            task_iter = chunks()
            done = False
            while not done:
                while len(pending) < workers + 2:
                    task = next(task_iter, None)
                    if task is None:
                        break
                    pending.append(pool.submit(_sim_chunk, task))
                if not pending:
                    break
                absorb(pending.popleft().result())
                if stop():
                    done = True
            for fut in pending:
                fut.cancel()

    frames = totals["frames"]
    ferr = totals["ferr"]
    mean_lat = (
        totals["lat"] / totals["timed"]
        if totals["timed"]
        else totals["lat_all"] / max(frames, 1)
    )
    return SimRecord(
        snr_db=snr_db,
        frames=frames,
        frame_errors=ferr,
        bit_errors=totals["berr"],
        fer=ferr / frames if frames else 0.0,
        ber=totals["berr"] / (frames * spec.k) if frames else 0.0,
        mean_latency_us=mean_lat,
        info_throughput_mbps=spec.k / mean_lat if mean_lat > 0 else 0.0,
        invoked_list_fraction=(
            totals["invoked"] / frames if (adaptive and frames) else 1.0
        ),
        hit_max_frames=frames >= max_frames and (min_errors > 0 and ferr < min_errors),
    )


def run_sweep(schedule: Schedule, list_size: int, snr_dbs, *, adaptive: bool = False,
              min_errors: int = 100, max_frames: int = 1_000_000, seed: int = 0,
              workers: int = 1, chunk_size: int = 256) -> list[SimRecord]:
    """Measure FER/BER and latency over a set of SNR points.

    Each point accumulates frames until ``min_errors`` frame errors (or
    ``max_frames``; a forced stop sets ``hit_max_frames``).  With
    ``min_errors=0`` exactly ``max_frames`` frames run.  Counts are
    bit-reproducible for a given (seed, chunk_size) regardless of
    ``workers``.
    """
    if min_errors < 0 or max_frames < 1:
        raise ValueError("min_errors must be >= 0 and max_frames >= 1")
    if chunk_size < 1:
        raise ValueError(f"chunk_size {chunk_size} must be >= 1")
    return [
        _sweep_point(schedule, list_size, adaptive, float(snr), min_errors,
                     max_frames, seed, workers, chunk_size)
        for snr in snr_dbs
    ]


_BENCH_VARIANTS = ("scl", "unrolled", "spc4", "spc4+")


def _bench_decoder(variant: str, spec: CodeSpec, list_size: int):
    if variant == "scl":
        return PerBitSCList(spec, list_size)
    if variant == "unrolled":
        return ListDecoder(build_schedule(spec, ScheduleConfig.unspecialized()),
                           list_size)
    if variant == "spc4":
        return ListDecoder(build_schedule(spec, ScheduleConfig()), list_size)
    if variant == "spc4+":
        return ListDecoder(build_schedule(spec, ScheduleConfig(spc_cap=None)),
                           list_size)
    raise ValueError(f"unknown bench variant '{variant}' (pick from {_BENCH_VARIANTS})")


def bench(spec: CodeSpec, variants, list_sizes, *, frames: int = 10,
          warmup: int = 2, snr_db: float = 3.5, seed: int = 0) -> list[BenchRecord]:
    """Per-frame decode latency of the decoder variants.

    Variants: "scl" (per-bit reference), "unrolled" (per-bit schedule),
    "spc4" (constituent leaves, SPC capped at 4), "spc4+" (uncapped SPC).
    All variants decode the same noisy frames; the first ``warmup``
    decodes per variant are untimed.
    """
    if frames < 1:
        raise ValueError(f"frames {frames} must be >= 1")
    cfg = ChannelConfig(eb_n0_db=snr_db, rate=spec.rate, seed=seed)
    llrs = []
    for frame in range(frames + warmup):
        rng = frame_rng(seed, frame)
        payload = rng.integers(0, 2, spec.k, dtype=np.uint8)
        sent = attach_and_encode(payload, spec)
        llrs.append(transmit(sent.codeword, cfg, rng=rng))
    records = []
    for variant in variants:
        for list_size in list_sizes:
            decoder = _bench_decoder(variant, spec, list_size)
            times = []
            for idx, llr in enumerate(llrs):
                t0 = time.perf_counter_ns()
                decoder.decode(llr)
                dt_us = (time.perf_counter_ns() - t0) / 1000.0
                if idx >= warmup:
                    times.append(dt_us)
            records.append(
                BenchRecord(
                    variant=variant,
                    list_size=list_size,
                    frames=len(times),
                    mean_latency_us=statistics.fmean(times),
                    median_latency_us=statistics.median(times),
                )
            )
    return records


def worker_cap() -> int:
    """Worker limit from the POLARIS_THREADS environment variable."""
    raw = os.environ.get("POLARIS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"POLARIS_THREADS must be an integer, got '{raw}'") from None
