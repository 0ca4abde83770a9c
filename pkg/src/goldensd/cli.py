"""Command-line frontend: single-shot encode/decode, sweeps, traces, tables.

Every subcommand echoes its fully resolved configuration (defaults
included) to stderr before doing any work, keeps machine-readable output
(JSON/CSV) on stdout, and exits nonzero with a one-line diagnostic on
invalid input.  Randomized subcommands require a seed or generate one and
print it, so any run can be reproduced exactly.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys

import numpy as np

from . import archmodel, decoder, fxp, harness, model, preproc
from .validation import check_format, check_qam

_MODE_NAMES = {"golden": "golden_2x2", "uncoded": "uncoded_4x4"}


def _echo_config(name: str, cfg: dict) -> None:
    print(f"config {name}: {json.dumps(cfg, sort_keys=True)}", file=sys.stderr)


def _parse_snr_list(text: str) -> tuple[float, ...]:
    """SNR grid: 'start:step:stop' (inclusive) or comma-separated values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"SNR range must be start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("SNR range step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        if n < 1:
            raise ValueError(f"empty SNR range {text!r}")
        return tuple(start + k * step for k in range(n))
    return tuple(float(p) for p in text.split(","))


def _parse_symbols(text: str) -> np.ndarray:
    vals = [float(v) for v in text.split(",")]
    if len(vals) != model.N_DIM:
        raise ValueError(f"--symbols needs {model.N_DIM} comma-separated values, got {len(vals)}")
    return np.asarray(vals)


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    seed = secrets.randbits(32)
    print(f"seed: {seed} (generated; pass --seed {seed} to reproduce)", file=sys.stderr)
    return seed


def _default_workers() -> int:
    env = os.environ.get("GOLDENSD_WORKERS")
    if env is None:
        return 1
    try:
        return max(1, int(env))
    except ValueError:
        raise ValueError(f"GOLDENSD_WORKERS must be an integer, got {env!r}") from None


def _write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _add_common_mod_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mod", type=int, default=16, help="QAM size: 4, 16 or 64")
    p.add_argument("--mode", choices=sorted(_MODE_NAMES), default="golden",
                   help="golden (2x2 Golden code) or uncoded (4x4 MIMO)")


def _cmd_encode(args) -> int:
    qam = check_qam(args.mod)
    mode = _MODE_NAMES[args.mode]
    seed = _resolve_seed(args.seed)
    const = model.constellation_for_qam(qam)
    if args.n0 is not None and args.snr is not None:
        raise ValueError("give at most one of --snr and --n0")
    n0 = args.n0 if args.n0 is not None else (
        model.snr_to_n0(args.snr, const, mode) if args.snr is not None else 0.0
    )
    cfg = {"mod": qam, "mode": mode, "seed": seed, "n0": n0,
           "symbols": args.symbols, "out": args.out}
    _echo_config("encode", cfg)

    rng = np.random.default_rng(seed)
    h = model.draw_channel(mode, rng)
    if args.symbols is not None:
        s = _parse_symbols(args.symbols)
        if not const.contains(s):
            raise ValueError(f"symbols must be points of the {qam}-QAM PAM alphabet")
    else:
        s = model.draw_symbols(const, rng)
    system = model.build_system(mode, h, n0=n0)
    y = model.transmit(s, system, rng)
    payload = {
        "mode": mode,
        "qam": qam,
        "seed": seed,
        "n0": n0,
        "symbols": s.tolist(),
        "channel_re": h.real.tolist(),
        "channel_im": h.imag.tolist(),
        "received": y.tolist(),
    }
    _write_output(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _cmd_decode(args) -> int:
    fmt = check_format(args.fmt)
    cfg = {"in": args.infile, "fmt": str(fmt) if fmt else None, "out": args.out}
    _echo_config("decode", cfg)
    if args.infile is None or args.infile == "-":
        payload = json.load(sys.stdin)
    else:
        with open(args.infile) as fh:
            payload = json.load(fh)
    for key in ("mode", "qam", "channel_re", "channel_im", "received"):
        if key not in payload:
            raise ValueError(f"decode input is missing field {key!r}")
    qam = check_qam(int(payload["qam"]))
    mode = payload["mode"]
    const = model.constellation_for_qam(qam)
    h = np.asarray(payload["channel_re"], dtype=float) + 1j * np.asarray(payload["channel_im"], dtype=float)
    system = model.build_system(mode, h)
    factors = preproc.qr_givens(system.lattice)
    y = np.asarray(payload["received"], dtype=float)
    if fmt is None:
        res = decoder.decode(y, factors, const)
    else:
        res = fxp.decode_fxp(y, factors, const, fmt)
    out = {
        "mode": mode,
        "qam": qam,
        "fmt": str(fmt) if fmt else None,
        "symbols_hat": res.s_hat.tolist(),
        "metric": res.metric,
        "visited_nodes": res.visited_nodes,
        "radius_updates": res.radius_updates,
    }
    _write_output(json.dumps(out, indent=2) + "\n", args.out)
    return 0


def _build_sweep_config(args, need_fmt: bool) -> harness.SweepConfig:
    qam = check_qam(args.mod)
    fmt = check_format(args.fmt)
    if need_fmt and fmt is None:
        raise ValueError("this subcommand needs --fmt Qm.f")
    seed = _resolve_seed(args.seed)
    workers = args.workers if args.workers is not None else _default_workers()
    return harness.SweepConfig(
        snr_points_db=_parse_snr_list(args.snr),
        trials_per_point=args.trials,
        mode=_MODE_NAMES[args.mode],
        qam=qam,
        fmt=fmt,
        seed=seed,
        max_trials=args.max_trials,
        target_errors=args.target_errors,
        clock_hz=args.clock_mhz * 1e6,
        workers=workers,
        chunk_size=args.chunk_size,
    )


def _cmd_sweep(args) -> int:
    cfg = _build_sweep_config(args, need_fmt=False)
    _echo_config("sweep", cfg.describe())
    stats = harness.run_sweep(cfg)
    _write_output(stats.to_csv(), args.out)
    if args.summary:
        _write_output(stats.summary_json() + "\n", args.summary)
    return 0


def _cmd_compare_fxp(args) -> int:
    cfg = _build_sweep_config(args, need_fmt=True)
    _echo_config("compare-fxp", cfg.describe())
    stats = harness.compare_fxp_float(cfg)
    _write_output(stats.to_csv(), args.out)
    if args.summary:
        _write_output(json.dumps(stats.summary(), indent=2) + "\n", args.summary)
    return 0


def _cmd_divider_trace(args) -> int:
    if args.q not in (2, 4, 8):
        raise ValueError(f"--q must be 2, 4 or 8, got {args.q}")
    fmt = check_format(args.fmt)
    if fmt is None:
        raise ValueError("divider-trace needs --fmt Qm.f")
    cfg = {"q": args.q, "psi": args.psi, "r": args.r, "fmt": str(fmt)}
    _echo_config("divider-trace", cfg)
    dividend = fxp.quantize(args.psi, fmt)
    r = fxp.quantize(args.r, fmt)
    if r.raw <= 0:
        raise ValueError(f"--r must quantize to a positive value in {fmt}")
    trace = archmodel.dichotomic_divide(dividend, r, args.q)
    _write_output("\n".join(trace.lines()) + "\n", args.out)
    return 0


def _cmd_qr_latency(args) -> int:
    cfg = {"kind": args.kind, "n": args.n}
    _echo_config("qr-latency", cfg)
    lat = preproc.array_latency(args.kind, args.n)
    lo, hi = lat.latency
    lat_txt = str(lo) if lo == hi else f"{lo}..{hi}"
    tlo, thi = lat.throughput
    thr_txt = str(tlo) if tlo == thi else f"{tlo}..{thi}"
    _write_output(f"PEs={lat.pe_count} latency={lat_txt} throughput={thr_txt}\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="goldensd",
        description="Sphere decoding of the Golden code and uncoded 4x4 MIMO: "
        "single-shot encode/decode, BER sweeps, fixed-point comparisons, "
        "divider traces and QR array latency tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="draw a channel, encode symbols, emit received vector as JSON")
    _add_common_mod_args(p)
    p.add_argument("--seed", type=int, default=None, help="RNG seed (generated and printed if omitted)")
    p.add_argument("--symbols", type=str, default=None,
                   help="eight comma-separated PAM points (random if omitted)")
    p.add_argument("--snr", type=float, default=None, help="SNR in dB (default: noiseless)")
    p.add_argument("--n0", type=float, default=None, help="noise variance per complex dimension")
    p.add_argument("--out", type=str, default=None, help="output file (default stdout)")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="sphere-decode a JSON payload produced by encode")
    p.add_argument("--in", dest="infile", type=str, default=None, help="input file (default stdin)")
    p.add_argument("--fmt", type=str, default=None, help="fixed-point format Qm.f (default: floating point)")
    p.add_argument("--out", type=str, default=None, help="output file (default stdout)")
    p.set_defaults(func=_cmd_decode)

    for name, helptext, func, need_fmt in (
        ("sweep", "Monte Carlo BER/CER sweep over an SNR grid (CSV to stdout)", _cmd_sweep, False),
        ("compare-fxp", "paired fixed-point vs floating-point sweep", _cmd_compare_fxp, True),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_common_mod_args(p)
        p.add_argument("--snr", type=str, required=True,
                       help="SNR grid in dB: start:step:stop or comma-separated list")
        p.add_argument("--trials", type=int, required=True, help="trials per SNR point")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (generated and printed if omitted)")
        p.add_argument("--fmt", type=str, default=None,
                       help="fixed-point format Qm.f" + ("" if need_fmt else " (default: floating point)"))
        p.add_argument("--max-trials", type=int, default=None, help="hard cap on trials per point")
        p.add_argument("--target-errors", type=int, default=None,
                       help="stop a point early after this many codeword errors")
        p.add_argument("--clock-mhz", type=float, default=250.0, help="clock for throughput estimates")
        p.add_argument("--workers", type=int, default=None,
                       help="parallel workers (default: $GOLDENSD_WORKERS or 1)")
        p.add_argument("--chunk-size", type=int, default=512, help="trials per scheduling chunk")
        p.add_argument("--out", type=str, default=None, help="CSV output file (default stdout)")
        p.add_argument("--summary", type=str, default=None, help="also write a JSON summary here")
        p.set_defaults(func=func)

    p = sub.add_parser("divider-trace", help="step-by-step trace of the shift-subtract divider")
    p.add_argument("--q", type=int, required=True, help="PAM order: 2, 4 or 8")
    p.add_argument("--psi", type=float, required=True, help="dividend (observation value)")
    p.add_argument("--r", type=float, required=True, help="divisor (diagonal of R), must be positive")
    p.add_argument("--fmt", type=str, required=True, help="fixed-point format Qm.f")
    p.add_argument("--out", type=str, default=None, help="output file (default stdout)")
    p.set_defaults(func=_cmd_divider_trace)

    p = sub.add_parser("qr-latency", help="systolic-array cost of one QR factorization")
    p.add_argument("--kind", choices=sorted(preproc.ARRAY_KINDS), required=True)
    p.add_argument("--n", type=int, required=True, help="matrix dimension")
    p.add_argument("--out", type=str, default=None, help="output file (default stdout)")
    p.set_defaults(func=_cmd_qr_latency)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"goldensd: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
