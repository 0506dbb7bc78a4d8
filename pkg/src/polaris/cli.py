"""Command-line front end.

Subcommands: construct, encode, decode, emit, simulate, bench.
Exit codes: 0 on success, 1 on usage errors, 2 on runtime failures
(one-line diagnostic on stderr).  POLARIS_THREADS caps sweep workers.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .codes import CRC8, CRC32, CodeSpec
from .encode import attach_and_encode
from .listdec import AdaptiveDecoder, ListDecoder
from .schedule import ScheduleConfig, build_schedule, emit_source
from . import sim

_CRC_CHOICES = {"8": CRC8, "32": CRC32, "none": None}


def _read_bit_lines(path):
    frames = []
    with open(path, "r", encoding="ascii") as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if set(line) - {"0", "1"}:
                raise ValueError(f"{path}:{ln}: bit line has characters outside 0/1")
            frames.append(np.frombuffer(line.encode("ascii"), dtype=np.uint8) - ord("0"))
    if not frames:
        raise ValueError(f"{path}: no frames found")
    return frames


def _write_bit_lines(path, frames):
    with open(path, "w", encoding="ascii") as fh:
        for bits in frames:
            fh.write("".join("1" if b else "0" for b in bits) + "\n")


def _read_llr_lines(path):
    frames = []
    with open(path, "r", encoding="ascii") as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                frames.append(np.array([float(tok) for tok in line.split()],
                                       dtype=np.float64))
            except ValueError:
                raise ValueError(f"{path}:{ln}: malformed LLR value") from None
    if not frames:
        raise ValueError(f"{path}: no frames found")
    return frames


def _parse_snr(text):
    parts = text.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ValueError(f"SNR range '{text}' is not <start>:<stop>:<step>")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError(f"SNR step {step} must be positive")
    points, value, i = [], start, 0
    while value <= stop + 1e-9:
        points.append(round(value, 10))
        i += 1
        value = start + i * step
    if not points:
        raise ValueError(f"SNR range '{text}' contains no points")
    return points


def _cmd_construct(args):
    spec = CodeSpec.construct(args.n, args.k, crc=_CRC_CHOICES[args.crc],
                              design_param=args.eps)
    spec.save(args.out)
    return 0


def _cmd_encode(args):
    spec = CodeSpec.load(args.spec)
    frames = _read_bit_lines(args.infile)
    out = []
    for bits in frames:
        out.append(attach_and_encode(bits, spec).codeword)
    _write_bit_lines(args.out, out)
    return 0


def _cmd_decode(args):
    spec = CodeSpec.load(args.spec)
    schedule = build_schedule(spec)
    if args.adaptive:
        decoder = AdaptiveDecoder(schedule, args.list_size)
    else:
        decoder = ListDecoder(schedule, args.list_size)
    out = []
    for llr in _read_llr_lines(args.infile):
        if llr.size != spec.N:
            raise ValueError(f"LLR frame has {llr.size} values, spec wants {spec.N}")
        out.append(decoder.decode(llr).info_bits)
    _write_bit_lines(args.out, out)
    return 0


def _cmd_emit(args):
    spec = CodeSpec.load(args.spec)
    cap = None if args.spc_cap == "inf" else int(args.spc_cap)
    text = emit_source(build_schedule(spec, ScheduleConfig(spc_cap=cap)))
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_simulate(args):
    spec = CodeSpec.load(args.spec)
    schedule = build_schedule(spec)
    records = sim.run_sweep(
        schedule,
        args.list_size,
        _parse_snr(args.snr),
        adaptive=args.adaptive,
        min_errors=args.min_errors,
        max_frames=args.max_frames,
        seed=args.seed,
        workers=sim.worker_cap(),
    )
    if args.out:
        sim.write_csv(records, args.out)
    else:
        sim.write_csv(records, sys.stdout)
    return 0


def _cmd_bench(args):
    spec = CodeSpec.load(args.spec)
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    list_sizes = [int(v) for v in args.list_sizes.split(",") if v.strip()]
    if not variants or not list_sizes:
        raise ValueError("bench needs at least one variant and one list size")
    records = sim.bench(spec, variants, list_sizes, frames=args.frames,
                        snr_db=args.snr, seed=args.seed)
    print(f"{'variant':<10} {'L':>4} {'frames':>7} {'mean_us':>12} {'median_us':>12}")
    for r in records:
        print(f"{r.variant:<10} {r.list_size:>4} {r.frames:>7} "
              f"{r.mean_latency_us:>12.1f} {r.median_latency_us:>12.1f}")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="polaris",
        description="Polar code toolkit: construction, encoding, list decoding, "
        "schedules, simulation, benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", metavar="<command>")

    p = sub.add_parser("construct", help="build a code spec and write its mask file")
    p.add_argument("--n", type=int, required=True, help="block length (power of two)")
    p.add_argument("--k", type=int, required=True, help="payload bits per frame")
    p.add_argument("--crc", choices=sorted(_CRC_CHOICES), default="none")
    p.add_argument("--eps", type=float, default=0.5, help="design erasure probability")
    p.add_argument("--out", required=True, help="mask file to write")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("encode", help="encode payload bit lines into codewords")
    p.add_argument("--spec", required=True, help="mask file from construct")
    p.add_argument("--in", dest="infile", required=True, help="payload bit lines")
    p.add_argument("--out", required=True, help="codeword bit lines to write")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="decode LLR lines to payload bits")
    p.add_argument("--spec", required=True)
    p.add_argument("--list", dest="list_size", type=int, default=1,
                   help="list size (paths kept alive)")
    p.add_argument("--adaptive", action="store_true",
                   help="single-path first, list only on CRC failure")
    p.add_argument("--in", dest="infile", required=True,
                   help="whitespace-separated LLRs, one frame per line")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("emit", help="print the unrolled schedule, one op per line")
    p.add_argument("--spec", required=True)
    p.add_argument("--spc-cap", choices=("4", "inf"), default="4",
                   help="widest SPC leaf (inf = unbounded)")
    p.add_argument("--out", help="write here instead of stdout")
    p.set_defaults(func=_cmd_emit)

    p = sub.add_parser("simulate", help="Monte-Carlo FER/BER sweep, CSV output")
    p.add_argument("--spec", required=True)
    p.add_argument("--list", dest="list_size", type=int, default=1)
    p.add_argument("--adaptive", action="store_true")
    p.add_argument("--snr", required=True,
                   help="Eb/N0 in dB: a single value or <start>:<stop>:<step>")
    p.add_argument("--min-errors", type=int, default=100,
                   help="frame errors per point (0 = run max-frames exactly)")
    p.add_argument("--max-frames", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (stdout when omitted)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bench", help="per-frame decode latency of decoder variants")
    p.add_argument("--spec", required=True)
    p.add_argument("--variants", default="scl,unrolled,spc4,spc4+",
                   help="comma list from: scl,unrolled,spc4,spc4+")
    p.add_argument("--list", dest="list_sizes", default="2,8,32",
                   help="comma list of list sizes")
    p.add_argument("--frames", type=int, default=10)
    p.add_argument("--snr", type=float, default=3.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = _build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 1
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args) or 0
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run():
    raise SystemExit(main())
