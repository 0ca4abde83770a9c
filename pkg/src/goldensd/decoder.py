"""Depth-first sphere decoder with division-based child selection.

The search walks an n-level tree (n = 8) in Schnorr-Euchner order.  At
each node the best child is picked by a single division against the
diagonal of R, rounded to the nearest odd integer; further siblings are
produced by a zig-zag walk around that first choice whose direction is
set by the sign of the rounding correction.  A running vector of
interference-cancelled observations is updated once per descent, so the
per-node cost does not grow with the constellation size.

Pruning uses ``T >= C0`` against the best leaf metric found so far.
Because siblings are generated in non-decreasing order of their metric
increment (out-of-alphabet points are skipped, never reordered), a pruned
node also prunes all of its remaining siblings; the search still returns
exactly the maximum-likelihood point, which the exhaustive oracle below
verifies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .model import Constellation
from .preproc import QRFactors, zf_point

#: Default cap on the exhaustive-search space (Q^n candidates).
EXHAUSTIVE_CAP = 2**24


@dataclass(frozen=True)
class NearestPoint:
    """Result of rounding a ratio to the PAM grid."""

    s: int
    delta: float
    clamped: bool


def nearest_pam(ratio: float, constellation: Constellation) -> NearestPoint:
    """Nearest alphabet point to ``ratio`` on the unit-spacing odd grid.

    ``delta = s - ratio`` is computed against the unclamped nearest odd
    integer, so its sign stays meaningful when the returned point is
    clamped to the alphabet boundary.  Ties (ratio exactly between two odd
    integers) resolve toward the smaller magnitude, and toward the
    negative point at ratio zero.
    """
    if not math.isfinite(ratio):
        raise ValueError(f"ratio must be finite, got {ratio}")
    m = math.floor((ratio + 1.0) / 2.0)
    lo, hi = 2 * m - 1, 2 * m + 1
    d_lo = ratio - lo
    d_hi = hi - ratio
    if d_lo < d_hi:
        s = lo
    elif d_hi < d_lo:
        s = hi
    else:
        s = lo if m >= 0 else hi
    qmax = constellation.q - 1
    s_clamped = min(max(s, -qmax), qmax)
    return NearestPoint(s=s_clamped, delta=float(s - ratio), clamped=s_clamped != s)


def select_child(obs_value: float, r_diag: float, constellation: Constellation) -> tuple[int, float]:
    """Best child symbol at one tree level, by division.

    Minimizes |obs_value - r_diag * s| over the alphabet.  A zero diagonal
    makes every child equidistant; the smallest-magnitude (negative)
    point is returned with delta 0 and enumeration proceeds in the
    standard zig-zag order from there.
    """
    if r_diag < 0:
        raise ValueError("r_diag must be nonnegative")
    if r_diag == 0.0:
        return -1, 0.0
    ratio = obs_value / r_diag
    if not math.isfinite(ratio):
        # overflowing ratio: the boundary point on the observation's side
        return int(math.copysign(constellation.q - 1, obs_value)), 0.0
    p = nearest_pam(ratio, constellation)
    return p.s, p.delta


def sibling_order(first_s: int, delta: float, q: int) -> Iterator[int]:
    """Zig-zag enumeration of all in-alphabet siblings at one level.

    Starting from the best child, the walk alternates around it with
    growing stride,  s_(k) = s_(k-1) - (-1)^k sign(delta) (k-1) A,  and
    skips points outside the alphabet so that enumeration continues on
    the feasible side only.  Exactly ``q`` distinct points are produced.
    ``delta == 0`` follows the positive-delta direction.
    """
    qmax = q - 1
    sign = 1 if delta >= 0 else -1
    yield first_s
    produced = 1
    s_raw = first_s
    for k in range(2, 2 * q + 2):
        stride = sign * (k - 1) * 2
        s_raw = s_raw - stride if k % 2 == 0 else s_raw + stride
        if -qmax <= s_raw <= qmax:
            yield s_raw
            produced += 1
            if produced == q:
                return


def cancel_interference(obs_vec, r_col, s: float) -> np.ndarray:
    """One level of the interference-cancellation recursion.

    The running observation vector carried from the level above loses the
    contribution of the newly fixed symbol:  out = obs_vec - s * r_col,
    where ``r_col`` is the R column of the level being descended.
    """
    return np.asarray(obs_vec, dtype=float) - float(s) * np.asarray(r_col, dtype=float)


def metric_step(t_parent: float, obs_value: float, r_diag: float, s: float) -> float:
    """Accumulated partial metric after fixing one more symbol."""
    if t_parent < 0:
        raise ValueError("parent metric must be nonnegative")
    d = obs_value - r_diag * s
    return t_parent + d * d


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of one detection: symbols, metric and search-effort counters.

    ``visited_nodes`` counts every node whose partial metric was evaluated;
    ``radius_updates`` counts the leaves that improved the search radius.
    """

    s_hat: np.ndarray
    metric: float
    visited_nodes: int
    radius_updates: int


def decode(y, factors: QRFactors, constellation: Constellation) -> DecodeResult:
    """Maximum-likelihood detection of one received vector.

    Rotates ``y`` by Q^T and finds the exact argmin of ||ytilde - R s||^2
    over the alphabet by depth-first search, starting from an infinite
    radius and shrinking it at every improved leaf.
    """
    ytilde = zf_point(factors.q, y)
    scale = constellation.spacing / 2.0
    r = factors.r if scale == 1.0 else factors.r * scale
    s_hat, metric, visited, updates = _search(ytilde, r, constellation.q)
    return DecodeResult(
        s_hat=np.asarray(s_hat, dtype=float) * scale,
        metric=metric,
        visited_nodes=visited,
        radius_updates=updates,
    )


def _search(ytilde, r, q: int) -> tuple[list[int], float, int, int]:
    """Inner tree search on the canonical odd-integer alphabet."""
    n = len(ytilde)
    qmax = q - 1
    rows = [[float(v) for v in row] for row in np.asarray(r, dtype=float)]
    diag = [rows[i][i] for i in range(n)]

    # obs[lv] is the observation vector produced when descending past
    # level lv; obs[n] is ytilde itself.  Only entries below lv are read.
    obs = [[0.0] * n for _ in range(n)] + [[float(v) for v in ytilde]]
    t_above = [0.0] * (n + 1)  # partial metric of the path above each level
    path = [0] * n
    # per-level sibling enumerator state
    val = [0.0] * n  # observation value seen by the level
    sign = [1] * n
    count = [0] * n
    k_raw = [0] * n
    s_raw = [0] * n
    s_cur = [0] * n

    def enter(lv: int) -> None:
        """Initialize the enumerator at a freshly entered level."""
        v = obs[lv + 1][lv]
        rd = diag[lv]
        if rd > 0.0 and math.isfinite(ratio := v / rd):
            m = math.floor((ratio + 1.0) / 2.0)
            lo, hi = 2 * m - 1, 2 * m + 1
            d_lo = ratio - lo
            d_hi = hi - ratio
            if d_lo < d_hi:
                s = lo
            elif d_hi < d_lo:
                s = hi
            else:
                s = lo if m >= 0 else hi
            sign[lv] = 1 if s >= ratio else -1
            s = min(max(s, -qmax), qmax)
        elif rd > 0.0:
            # ratio overflowed: clamp to the observation's side, walk inward
            s = qmax if v > 0 else -qmax
            sign[lv] = 1
        else:
            s = -1  # zero diagonal: every child equidistant, canonical order
            sign[lv] = 1
        val[lv] = v
        count[lv] = 1
        k_raw[lv] = 1
        s_raw[lv] = s
        s_cur[lv] = s

    def advance(lv: int) -> bool:
        """Step the level to its next in-alphabet zig-zag sibling."""
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

    best_metric = math.inf
    best_path: list[int] = [0] * n
    visited = 0
    updates = 0

    # t_last[lv]: metric of the last sibling evaluated at the level that
    # was not pruned.  Later siblings at the same level can only do worse,
    # so once t_last[lv] >= C0 the level is dead without more evaluations.
    t_last = [0.0] * n

    lv = n - 1
    enter(lv)
    while True:
        d = val[lv] - diag[lv] * s_cur[lv]
        t = t_above[lv + 1] + d * d
        visited += 1
        if t < best_metric:
            t_last[lv] = t
            path[lv] = s_cur[lv]
            if lv > 0:
                # expand: fix the symbol, cancel it from the observations
                t_above[lv] = t
                src = obs[lv + 1]
                dst = obs[lv]
                s = float(s_cur[lv])
                for i in range(lv):
                    dst[i] = src[i] - s * rows[i][lv]
                lv -= 1
                enter(lv)
                continue
            # improved leaf: it becomes the radius, so its remaining
            # siblings are already out; fall through to the ancestors
            best_metric = t
            best_path = path.copy()
            updates += 1
        # abandon this level (pruned node, or a leaf that just became the
        # radius) and resume at the first ancestor that can still improve
        while True:
            lv += 1
            if lv == n:
                return best_path, best_metric, visited, updates
            if t_last[lv] < best_metric and advance(lv):
                break


def exhaustive_ml(
    y,
    factors: QRFactors,
    constellation: Constellation,
    cap: int = EXHAUSTIVE_CAP,
    chunk: int = 1 << 16,
) -> DecodeResult:
    """ML detection by full enumeration; the reference the tree search is held to.

    Walks all Q^8 candidates in lexicographic symbol order and returns the
    first one attaining the minimum metric, so ties break toward the
    lexicographically smallest vector.  ``visited_nodes`` reports the
    number of candidates examined.
    """
    q = constellation.q
    n = factors.r.shape[0]
    total = q**n
    if total > cap:
        raise ValueError(f"search space {q}^{n} = {total} exceeds cap {cap}")
    ytilde = zf_point(factors.q, y)
    points = constellation.points
    place = q ** np.arange(n - 1, -1, -1, dtype=np.int64)  # first symbol most significant

    best_metric = math.inf
    best_idx = -1
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (idx[None, :] // place[:, None]) % q
        cand = points[digits]  # (n, chunk)
        resid = ytilde[:, None] - factors.r @ cand
        metrics = np.einsum("ij,ij->j", resid, resid)
        k = int(np.argmin(metrics))
        if metrics[k] < best_metric:
            best_metric = float(metrics[k])
            best_idx = start + k
    digits = (best_idx // place) % q
    return DecodeResult(
        s_hat=points[digits],
        metric=best_metric,
        visited_nodes=total,
        radius_updates=0,
    )
