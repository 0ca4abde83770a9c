"""Bit-level divider model and the one-node-per-cycle throughput model.

The decoder never needs a full divider: the only quotients of interest
are the odd-integer alphabet points.  A log2(Q)-step shift-subtract unit
performs a dichotomic search over the even decision boundaries, emitting
one result bit per step and a final defect/excess flag.  Throughput
follows from the pipelined ideal of one expanded node per clock cycle,
so mean cycles per codeword is read directly off the decoder's visited
node count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .fxp import FxpValue
from .model import MODES, Constellation


@dataclass(frozen=True)
class DividerStep:
    """One shift-subtract iteration of the divider."""

    shift: int
    subtract_taken: bool
    bit: int


@dataclass(frozen=True)
class DividerTrace:
    """Full record of one division: log2(Q) steps, MSB first."""

    steps: tuple[DividerStep, ...]
    result: int
    delta_sign: int

    def lines(self) -> list[str]:
        """Trace as text, one step per line, for divider debugging."""
        out = [
            f"step {i + 1}: shift={st.shift} subtract={'yes' if st.subtract_taken else 'no'} bit={st.bit}"
            for i, st in enumerate(self.steps)
        ]
        sign_txt = {1: "excess", -1: "defect", 0: "exact"}[self.delta_sign]
        out.append(f"result: s={self.result} ({sign_txt})")
        return out


def divide_to_grid_raw(dividend_raw: int, r_raw: int, q: int) -> tuple[int, int, tuple[DividerStep, ...]]:
    """Shift-subtract search for the alphabet point nearest ``dividend_raw / r_raw``.

    Operates on the raw integer representations (any common scaling
    cancels in the ratio).  Each of the log2(Q) steps compares the running
    remainder against the divisor shifted by log2(Q)-1 down to 0, which
    walks the even decision boundaries of the odd-integer grid; the
    accumulated quotient is therefore always an in-range odd integer.  A
    zero remainder is a tie and resolves toward the smaller-magnitude
    (then negative) point, matching the floating-point rounding rule.

    Returns ``(s, delta_sign, steps)`` where ``delta_sign`` is the sign of
    ``s - dividend/r`` (0 on an exact fit).
    """
    if r_raw <= 0:
        raise ValueError(f"divisor must be positive, got raw {r_raw}")
    if q not in (2, 4, 8):
        raise ValueError(f"PAM order must be 2, 4 or 8, got {q}")
    n_steps = q.bit_length() - 1  # log2(q)
    rem = dividend_raw
    acc = 0
    steps = []
    for shift in range(n_steps - 1, -1, -1):
        subtract = rem > 0 or (rem == 0 and acc < 0)
        if subtract:
            rem -= r_raw << shift
            acc += 1 << shift
        else:
            rem += r_raw << shift
            acc -= 1 << shift
        steps.append(DividerStep(shift=shift, subtract_taken=subtract, bit=int(subtract)))
    delta_sign = 0 if rem == 0 else (1 if rem < 0 else -1)  # delta = s - psi/r
    return acc, delta_sign, tuple(steps)


def dichotomic_divide(dividend: FxpValue, r_ll: FxpValue, q: int) -> DividerTrace:
    """Nearest-alphabet-point division on fixed-point operands."""
    if dividend.fmt != r_ll.fmt:
        raise ValueError(f"format mismatch: {dividend.fmt} vs {r_ll.fmt}")
    s, delta_sign, steps = divide_to_grid_raw(dividend.raw, r_ll.raw, q)
    return DividerTrace(steps=steps, result=s, delta_sign=delta_sign)


@dataclass(frozen=True)
class ThroughputModel:
    """Decoded bits per second under one expanded node per clock cycle."""

    clock_hz: float
    bits_per_codeword: int
    mean_cycles_per_codeword: float

    @property
    def bits_per_second(self) -> float:
        return self.clock_hz * self.bits_per_codeword / self.mean_cycles_per_codeword

    @property
    def mbps(self) -> float:
        return self.bits_per_second / 1e6


def bits_per_codeword(constellation: Constellation) -> int:
    """Information bits per decoded vector: eight PAM symbols of log2(Q) bits."""
    return 8 * constellation.bits_per_pam


def estimate_throughput(
    mean_visited_nodes: float,
    clock_hz: float,
    constellation: Constellation,
    mode: str = "golden_2x2",
) -> float:
    """Decoder throughput in Mbps for a measured mean node count.

    Both modes decode eight Q-PAM symbols per vector (the Golden code
    spends two channel uses, the uncoded 4x4 system one), so the bit
    count per codeword is the same.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    if not mean_visited_nodes > 0:
        raise ValueError(f"mean cycle count must be positive, got {mean_visited_nodes}")
    if not math.isfinite(clock_hz) or clock_hz <= 0:
        raise ValueError(f"clock must be a positive frequency, got {clock_hz}")
    model = ThroughputModel(
        clock_hz=clock_hz,
        bits_per_codeword=bits_per_codeword(constellation),
        mean_cycles_per_codeword=float(mean_visited_nodes),
    )
    return model.mbps
