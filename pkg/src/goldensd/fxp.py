"""Bit-exact two's-complement fixed-point emulation of the decoder datapath.

Values are stored as signed integers scaled by ``2**frac_bits``.  All
arithmetic rounds to nearest (ties away from zero) and saturates at the
format bounds instead of wrapping, since a wrapped metric would corrupt
the tree search silently.  :func:`decode_fxp` reruns the sphere decoder
with every datapath quantity (rotated observation, R, running
observations, metrics) held in one such format, with the child-selecting
division performed by the shift-subtract divider model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decoder import DecodeResult
from .model import Constellation
from .preproc import QRFactors, zf_point


@dataclass(frozen=True)
class FxpFormat:
    """Signed fixed-point format: ``total_bits`` wide, ``frac_bits`` fractional.

    The integer part (sign included) is ``total_bits - frac_bits`` and must
    hold at least the sign bit.  The string form ``Qm.f`` gives the integer
    bits ``m`` (sign included) and fraction bits ``f``.
    """

    total_bits: int
    frac_bits: int

    def __post_init__(self) -> None:
        if not 8 <= self.total_bits <= 32:
            raise ValueError(f"total_bits must be in [8, 32], got {self.total_bits}")
        if not 0 <= self.frac_bits <= self.total_bits - 1:
            raise ValueError(
                f"frac_bits must leave at least a sign bit: got {self.frac_bits}"
                f" of {self.total_bits}"
            )

    @property
    def int_bits(self) -> int:
        return self.total_bits - self.frac_bits

    @property
    def max_raw(self) -> int:
        return (1 << (self.total_bits - 1)) - 1

    @property
    def min_raw(self) -> int:
        return -(1 << (self.total_bits - 1))

    @property
    def resolution(self) -> float:
        return 2.0 ** (-self.frac_bits)

    @classmethod
    def from_string(cls, text: str) -> "FxpFormat":
        """Parse a ``Qm.f`` format string, e.g. ``Q5.7`` -> 12 bits total."""
        t = text.strip()
        if not t or t[0] not in "Qq":
            raise ValueError(f"format string must look like 'Qm.f', got {text!r}")
        try:
            m_txt, f_txt = t[1:].split(".", 1)
            m, f = int(m_txt), int(f_txt)
        except ValueError:
            raise ValueError(f"format string must look like 'Qm.f', got {text!r}") from None
        return cls(total_bits=m + f, frac_bits=f)

    def __str__(self) -> str:
        return f"Q{self.int_bits}.{self.frac_bits}"


@dataclass(frozen=True)
class FxpValue:
    """One quantized value; ``saturated`` records clipping at the bounds."""

    raw: int
    fmt: FxpFormat
    saturated: bool = False

    @property
    def value(self) -> float:
        return self.raw * self.fmt.resolution


def _round_half_away(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def _saturate(raw: int, fmt: FxpFormat) -> tuple[int, bool]:
    if raw > fmt.max_raw:
        return fmt.max_raw, True
    if raw < fmt.min_raw:
        return fmt.min_raw, True
    return raw, False


def _shift_round(raw: int, shift: int) -> int:
    """Right shift with round-to-nearest, ties away from zero."""
    if shift == 0:
        return raw
    half = 1 << (shift - 1)
    if raw >= 0:
        return (raw + half) >> shift
    return -((-raw + half) >> shift)


def quantize(x: float, fmt: FxpFormat) -> FxpValue:
    """Round ``x`` to the nearest representable value, saturating at the bounds."""
    raw = _round_half_away(float(x) * (1 << fmt.frac_bits))
    raw, sat = _saturate(raw, fmt)
    return FxpValue(raw=raw, fmt=fmt, saturated=sat)


def _require_same_format(a: FxpValue, b: FxpValue) -> FxpFormat:
    if a.fmt != b.fmt:
        raise ValueError(f"format mismatch: {a.fmt} vs {b.fmt}")
    return a.fmt


def fxp_add(a: FxpValue, b: FxpValue) -> FxpValue:
    fmt = _require_same_format(a, b)
    raw, sat = _saturate(a.raw + b.raw, fmt)
    return FxpValue(raw, fmt, sat)


def fxp_sub(a: FxpValue, b: FxpValue) -> FxpValue:
    fmt = _require_same_format(a, b)
    raw, sat = _saturate(a.raw - b.raw, fmt)
    return FxpValue(raw, fmt, sat)


def fxp_mul(a: FxpValue, b: FxpValue) -> FxpValue:
    """Full-precision product, rescaled back to the format with rounding."""
    fmt = _require_same_format(a, b)
    raw = _shift_round(a.raw * b.raw, fmt.frac_bits)
    raw, sat = _saturate(raw, fmt)
    return FxpValue(raw, fmt, sat)


def decode_fxp(
    y,
    factors: QRFactors,
    constellation: Constellation,
    fmt: FxpFormat,
    metric_guard_bits: int = 0,
) -> DecodeResult:
    """Sphere decoding with the whole datapath held in ``fmt``.

    Same traversal contract as :func:`goldensd.decoder.decode`, but the
    rotated observation, R, the running observation vectors and the
    metrics are quantized, every operation saturates, and the best child
    is found by the dichotomic shift-subtract divider instead of a real
    division.  The metric format may carry ``metric_guard_bits`` extra
    integer bits (off by default: one uniform datapath width).
    """
    from .archmodel import divide_to_grid_raw

    q = constellation.q
    scale = constellation.spacing / 2.0
    ytilde = zf_point(factors.q, y)
    r = factors.r if scale == 1.0 else factors.r * scale
    n = len(ytilde)
    qmax = q - 1
    frac = fmt.frac_bits
    lo_v, hi_v = fmt.min_raw, fmt.max_raw
    t_fmt = FxpFormat(min(fmt.total_bits + metric_guard_bits, 32), frac) if metric_guard_bits else fmt
    lo_t, hi_t = t_fmt.min_raw, t_fmt.max_raw

    rows = [[quantize(v, fmt).raw for v in row] for row in np.asarray(r, dtype=float)]
    diag = [rows[i][i] for i in range(n)]
    obs = [[0] * n for _ in range(n)] + [[quantize(v, fmt).raw for v in ytilde]]
    t_above = [0] * (n + 1)
    path = [0] * n
    val = [0] * n
    sign = [1] * n
    count = [0] * n
    k_raw = [0] * n
    s_raw = [0] * n
    s_cur = [0] * n
    t_last = [0] * n

    def enter(lv: int) -> None:
        v = obs[lv + 1][lv]
        rd = diag[lv]
        if rd > 0:
            s, delta_sign, _ = divide_to_grid_raw(v, rd, q)
            sign[lv] = 1 if delta_sign >= 0 else -1
        else:
            s = -1
            sign[lv] = 1
        val[lv] = v
        count[lv] = 1
        k_raw[lv] = 1
        s_raw[lv] = s
        s_cur[lv] = s

    def advance(lv: int) -> bool:
        if count[lv] >= q:
            return False
        k = k_raw[lv]
        s = s_raw[lv]
        sg = sign[lv]
        while True:
            k += 1
            stride = sg * (k - 1) * 2
            s = s - stride if k % 2 == 0 else s + stride
            if -qmax <= s <= qmax:
                break
        k_raw[lv] = k
        s_raw[lv] = s
        s_cur[lv] = s
        count[lv] += 1
        return True

    best_metric = None
    best_path = [0] * n
    visited = 0
    updates = 0

    lv = n - 1
    enter(lv)
    while True:
        # multiplier output, subtractor output and metric adder all
        # saturate separately, as the per-unit datapath width implies
        p = diag[lv] * s_cur[lv]
        if p > hi_v:
            p = hi_v
        elif p < lo_v:
            p = lo_v
        d = val[lv] - p
        if d > hi_v:
            d = hi_v
        elif d < lo_v:
            d = lo_v
        inc = _shift_round(d * d, frac)
        if inc > hi_t:
            inc = hi_t
        t = t_above[lv + 1] + inc
        if t > hi_t:
            t = hi_t
        visited += 1
        if best_metric is None or t < best_metric:
            t_last[lv] = t
            path[lv] = s_cur[lv]
            if lv > 0:
                t_above[lv] = t
                src = obs[lv + 1]
                dst = obs[lv]
                s = s_cur[lv]
                row_col = lv
                for i in range(lv):
                    p = s * rows[i][row_col]
                    if p > hi_v:
                        p = hi_v
                    elif p < lo_v:
                        p = lo_v
                    d = src[i] - p
                    if d > hi_v:
                        d = hi_v
                    elif d < lo_v:
                        d = lo_v
                    dst[i] = d
                lv -= 1
                enter(lv)
                continue
            best_metric = t
            best_path = path.copy()
            updates += 1
        while True:
            lv += 1
            if lv == n:
                return DecodeResult(
                    s_hat=np.asarray(best_path, dtype=float) * scale,
                    metric=best_metric * t_fmt.resolution,
                    visited_nodes=visited,
                    radius_updates=updates,
                )
            if t_last[lv] < best_metric and advance(lv):
                break
