"""Seeded Monte Carlo engine: BER/CER sweeps, node statistics, fxp-vs-float.

Every trial owns an independent random stream derived from the master
seed and the (SNR point, trial index) pair, so results are bitwise
reproducible no matter how trials are distributed over workers.  Trials
are processed in fixed-size chunks; the early-stop rule is evaluated at
chunk boundaries in trial order, which keeps the set of tallied trials
identical for any worker count.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import archmodel, decoder, fxp, model, preproc

CSV_HEADER = "snr_db,trials,bit_errors,ber,cer,mean_nodes,p95_nodes,mean_cycles,est_mbps"


@dataclass(frozen=True)
class SweepConfig:
    """One sweep: modulation, SNR grid, trial budget and stop rule.

    ``trials_per_point`` is the planned trial count per SNR point,
    optionally capped by ``max_trials`` and cut short once
    ``target_errors`` codeword errors have been seen (checked at
    ``chunk_size`` boundaries).  ``fmt`` switches the decoder to
    fixed-point arithmetic.
    """

    snr_points_db: tuple[float, ...]
    trials_per_point: int
    mode: str = "golden_2x2"
    qam: int = 16
    fmt: fxp.FxpFormat | None = None
    seed: int = 0
    max_trials: int | None = None
    target_errors: int | None = None
    clock_hz: float = 250e6
    workers: int = 1
    chunk_size: int = 512

    def __post_init__(self) -> None:
        snrs = tuple(float(v) for v in self.snr_points_db)
        object.__setattr__(self, "snr_points_db", snrs)
        if len(snrs) == 0:
            raise ValueError("snr_points_db must not be empty")
        if any(b <= a for a, b in zip(snrs, snrs[1:])):
            raise ValueError("snr_points_db must be strictly increasing")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        if self.mode not in model.MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        self.constellation  # validates qam
        if self.max_trials is not None and self.max_trials < 1:
            raise ValueError("max_trials must be >= 1")
        if self.target_errors is not None and self.target_errors < 1:
            raise ValueError("target_errors must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")

    @property
    def constellation(self) -> model.Constellation:
        return model.constellation_for_qam(self.qam)

    @property
    def effective_max_trials(self) -> int:
        if self.max_trials is None:
            return self.trials_per_point
        return min(self.trials_per_point, self.max_trials)

    def describe(self) -> dict:
        """Fully resolved configuration, defaults included, for echoing."""
        return {
            "mode": self.mode,
            "qam": self.qam,
            "snr_points_db": list(self.snr_points_db),
            "trials_per_point": self.trials_per_point,
            "fmt": str(self.fmt) if self.fmt is not None else None,
            "seed": self.seed,
            "max_trials": self.max_trials,
            "target_errors": self.target_errors,
            "clock_hz": self.clock_hz,
            "workers": self.workers,
            "chunk_size": self.chunk_size,
        }


@dataclass(frozen=True)
class PointStats:
    """Tally of one SNR point."""

    snr_db: float
    trials: int
    bit_errors: int
    codeword_errors: int
    ber: float
    cer: float
    mean_nodes: float
    p95_nodes: float
    mean_cycles: float
    est_mbps: float
    wall_time_s: float

    def csv_row(self) -> str:
        return ",".join(
            [
                f"{self.snr_db:g}",
                str(self.trials),
                str(self.bit_errors),
                f"{self.ber:.10g}",
                f"{self.cer:.10g}",
                f"{self.mean_nodes:.10g}",
                f"{self.p95_nodes:.10g}",
                f"{self.mean_cycles:.10g}",
                f"{self.est_mbps:.10g}",
            ]
        )


@dataclass(frozen=True)
class SweepStats:
    """All SNR points of one sweep plus the configuration that produced them."""

    config: SweepConfig
    points: tuple[PointStats, ...]

    def to_csv(self) -> str:
        return "\n".join([CSV_HEADER] + [p.csv_row() for p in self.points]) + "\n"

    def summary(self) -> dict:
        rows = []
        for p in self.points:
            rows.append(
                {
                    "snr_db": p.snr_db,
                    "trials": p.trials,
                    "bit_errors": p.bit_errors,
                    "codeword_errors": p.codeword_errors,
                    "ber": p.ber,
                    "cer": p.cer,
                    "mean_nodes": p.mean_nodes,
                    "p95_nodes": p.p95_nodes,
                    "mean_cycles": p.mean_cycles,
                    "est_mbps": p.est_mbps,
                    "wall_time_s": p.wall_time_s,
                }
            )
        return {"config": self.config.describe(), "points": rows}

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2)


def trial_rng(seed: int, point_idx: int, trial_idx: int) -> np.random.Generator:
    """Independent stream for one trial; the scheme makes worker splits moot."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(point_idx, trial_idx))
    return np.random.default_rng(ss)


def draw_trial(cfg: SweepConfig, point_idx: int, trial_idx: int, n0: float):
    """Channel, symbols and received vector of one trial (block fading)."""
    rng = trial_rng(cfg.seed, point_idx, trial_idx)
    const = cfg.constellation
    h = model.draw_channel(cfg.mode, rng)
    system = model.build_system(cfg.mode, h, n0=n0)
    s = model.draw_symbols(const, rng)
    y = model.transmit(s, system, rng)
    return system, s, y


def _sweep_chunk(args) -> tuple[int, int, int, list[int]]:
    """Tally one chunk of trials; returns (start, bit_errs, cw_errs, visited)."""
    cfg, point_idx, n0, start, stop = args
    const = cfg.constellation
    bit_errs = 0
    cw_errs = 0
    visited: list[int] = []
    for trial_idx in range(start, stop):
        system, s, y = draw_trial(cfg, point_idx, trial_idx, n0)
        factors = preproc.qr_givens(system.lattice)
        if cfg.fmt is None:
            res = decoder.decode(y, factors, const)
        else:
            res = fxp.decode_fxp(y, factors, const, cfg.fmt)
        visited.append(res.visited_nodes)
        be = const.bit_errors(s, res.s_hat)
        bit_errs += be
        cw_errs += int(be > 0)
    return start, bit_errs, cw_errs, visited


def _compare_chunk(args) -> tuple[int, int, int, int, int, list[int], list[int], int]:
    """Paired float/fxp tallies on identical realizations."""
    cfg, point_idx, n0, start, stop = args
    const = cfg.constellation
    bit_f = cw_f = bit_x = cw_x = diverged = 0
    vis_f: list[int] = []
    vis_x: list[int] = []
    for trial_idx in range(start, stop):
        system, s, y = draw_trial(cfg, point_idx, trial_idx, n0)
        factors = preproc.qr_givens(system.lattice)
        rf = decoder.decode(y, factors, const)
        rx = fxp.decode_fxp(y, factors, const, cfg.fmt)
        ef = const.bit_errors(s, rf.s_hat)
        ex = const.bit_errors(s, rx.s_hat)
        bit_f += ef
        cw_f += int(ef > 0)
        bit_x += ex
        cw_x += int(ex > 0)
        vis_f.append(rf.visited_nodes)
        vis_x.append(rx.visited_nodes)
        diverged += int(not np.array_equal(rf.s_hat, rx.s_hat))
    return start, bit_f, cw_f, bit_x, cw_x, vis_f, vis_x, diverged


def _run_chunks_ordered(worker, jobs: list, workers: int) -> Iterator:
    """Yield chunk results in submission order, fanning out across workers.

    Results are consumed strictly in order so that early-stop decisions
    depend only on the trial prefix, never on the worker count.  The
    caller may stop iterating early; speculative results are discarded.
    """
    if workers <= 1:
        for job in jobs:
            yield worker(job)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        pending = []
        it = iter(jobs)
        try:
            for job in it:
                pending.append(pool.submit(worker, job))
                if len(pending) >= workers + 2:
                    yield pending.pop(0).result()
            while pending:
                yield pending.pop(0).result()
        finally:
            for f in pending:
                f.cancel()


def _point_chunks(cfg: SweepConfig, point_idx: int, n0: float) -> list:
    total = cfg.effective_max_trials
    return [
        (cfg, point_idx, n0, start, min(start + cfg.chunk_size, total))
        for start in range(0, total, cfg.chunk_size)
    ]


def run_sweep(cfg: SweepConfig) -> SweepStats:
    """BER/CER and node-count statistics over the configured SNR grid."""
    const = cfg.constellation
    bits = archmodel.bits_per_codeword(const)
    points = []
    for point_idx, snr_db in enumerate(cfg.snr_points_db):
        n0 = model.snr_to_n0(snr_db, const, cfg.mode)
        t0 = time.perf_counter()
        bit_errs = cw_errs = trials = 0
        visited: list[int] = []
        for start, be, ce, vis in _run_chunks_ordered(
            _sweep_chunk, _point_chunks(cfg, point_idx, n0), cfg.workers
        ):
            bit_errs += be
            cw_errs += ce
            visited.extend(vis)
            trials += len(vis)
            if cfg.target_errors is not None and cw_errs >= cfg.target_errors:
                break
        wall = time.perf_counter() - t0
        vis_arr = np.asarray(visited, dtype=np.int64)
        mean_nodes = float(vis_arr.mean())
        points.append(
            PointStats(
                snr_db=snr_db,
                trials=trials,
                bit_errors=bit_errs,
                codeword_errors=cw_errs,
                ber=bit_errs / (trials * bits),
                cer=cw_errs / trials,
                mean_nodes=mean_nodes,
                p95_nodes=float(np.percentile(vis_arr, 95)),
                mean_cycles=mean_nodes,
                est_mbps=archmodel.estimate_throughput(mean_nodes, cfg.clock_hz, const, cfg.mode),
                wall_time_s=wall,
            )
        )
    return SweepStats(config=cfg, points=tuple(points))


@dataclass(frozen=True)
class ComparePoint:
    """Paired float/fixed-point tallies at one SNR point."""

    snr_db: float
    trials: int
    ber_float: float
    ber_fxp: float
    cer_float: float
    cer_fxp: float
    mean_nodes_float: float
    mean_nodes_fxp: float
    diverged_fraction: float
    wall_time_s: float


@dataclass(frozen=True)
class CompareStats:
    config: SweepConfig
    points: tuple[ComparePoint, ...]

    CSV_HEADER = (
        "snr_db,trials,ber_float,ber_fxp,cer_float,cer_fxp,"
        "mean_nodes_float,mean_nodes_fxp,diverged_fraction"
    )

    def to_csv(self) -> str:
        rows = [self.CSV_HEADER]
        for p in self.points:
            rows.append(
                ",".join(
                    [
                        f"{p.snr_db:g}",
                        str(p.trials),
                        f"{p.ber_float:.10g}",
                        f"{p.ber_fxp:.10g}",
                        f"{p.cer_float:.10g}",
                        f"{p.cer_fxp:.10g}",
                        f"{p.mean_nodes_float:.10g}",
                        f"{p.mean_nodes_fxp:.10g}",
                        f"{p.diverged_fraction:.10g}",
                    ]
                )
            )
        return "\n".join(rows) + "\n"

    def summary(self) -> dict:
        rows = [
            {
                "snr_db": p.snr_db,
                "trials": p.trials,
                "ber_float": p.ber_float,
                "ber_fxp": p.ber_fxp,
                "cer_float": p.cer_float,
                "cer_fxp": p.cer_fxp,
                "mean_nodes_float": p.mean_nodes_float,
                "mean_nodes_fxp": p.mean_nodes_fxp,
                "diverged_fraction": p.diverged_fraction,
                "wall_time_s": p.wall_time_s,
            }
            for p in self.points
        ]
        return {"config": self.config.describe(), "points": rows}


def compare_fxp_float(cfg: SweepConfig) -> CompareStats:
    """Run float and fixed-point decoders on identical noise/channel draws."""
    if cfg.fmt is None:
        raise ValueError("compare_fxp_float needs cfg.fmt set")
    const = cfg.constellation
    bits = archmodel.bits_per_codeword(const)
    points = []
    for point_idx, snr_db in enumerate(cfg.snr_points_db):
        n0 = model.snr_to_n0(snr_db, const, cfg.mode)
        t0 = time.perf_counter()
        bit_f = cw_f = bit_x = cw_x = diverged = trials = 0
        vis_f_sum = vis_x_sum = 0
        for start, bf, cf, bx, cx, vf, vx, dv in _run_chunks_ordered(
            _compare_chunk, _point_chunks(cfg, point_idx, n0), cfg.workers
        ):
            bit_f += bf
            cw_f += cf
            bit_x += bx
            cw_x += cx
            diverged += dv
            vis_f_sum += sum(vf)
            vis_x_sum += sum(vx)
            trials += len(vf)
            if cfg.target_errors is not None and min(cw_f, cw_x) >= cfg.target_errors:
                break
        wall = time.perf_counter() - t0
        points.append(
            ComparePoint(
                snr_db=snr_db,
                trials=trials,
                ber_float=bit_f / (trials * bits),
                ber_fxp=bit_x / (trials * bits),
                cer_float=cw_f / trials,
                cer_fxp=cw_x / trials,
                mean_nodes_float=vis_f_sum / trials,
                mean_nodes_fxp=vis_x_sum / trials,
                diverged_fraction=diverged / trials,
                wall_time_s=wall,
            )
        )
    return CompareStats(config=cfg, points=tuple(points))
