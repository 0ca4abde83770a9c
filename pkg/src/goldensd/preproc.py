"""Channel preprocessing: Givens-rotation QR and systolic-array latency.

QR runs once per channel update and turns the lattice generator into an
upper-triangular system the tree search can walk level by level.  The
latency estimator reproduces the closed-form cost of mapping the rotation
schedule onto triangular, linear or single-element processor arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

ARRAY_KINDS = ("triangular", "linear", "single_element")


@dataclass(frozen=True)
class QRFactors:
    """Orthogonal Q and upper-triangular R with nonnegative diagonal."""

    q: np.ndarray
    r: np.ndarray

    @property
    def zero_diagonal_levels(self) -> tuple[int, ...]:
        """Indices of exactly-zero diagonal entries (rank-deficient input)."""
        return tuple(int(i) for i in np.flatnonzero(np.diag(self.r) == 0.0))


def qr_givens(m) -> QRFactors:
    """QR decomposition by plane rotations.

    Subdiagonal entries are annihilated column by column, bottom up: within
    column ``j`` the rotation acting on rows (i-1, i) zeroes entry (i, j)
    for i = n-1 down to j+1.  Diagonal entries of R are made nonnegative
    (rows of R and columns of Q flip sign together), and the subdiagonal is
    set to exact zeros.  Rank-deficient input is allowed; a zero diagonal
    entry is reported through :attr:`QRFactors.zero_diagonal_levels`.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    n = m.shape[0]
    r = m.copy()
    q = np.eye(n)
    for j in range(n - 1):
        for i in range(n - 1, j, -1):
            a, b = r[i - 1, j], r[i, j]
            if b == 0.0:
                continue
            rad = math.hypot(a, b)
            c, s = a / rad, b / rad
            # rows i-1, i carry zeros left of column j at this point
            top = c * r[i - 1, j:] + s * r[i, j:]
            bot = -s * r[i - 1, j:] + c * r[i, j:]
            r[i - 1, j:], r[i, j:] = top, bot
            qtop = c * q[:, i - 1] + s * q[:, i]
            qbot = -s * q[:, i - 1] + c * q[:, i]
            q[:, i - 1], q[:, i] = qtop, qbot
    for l in range(n):
        if r[l, l] < 0.0:
            r[l, :] = -r[l, :]
            q[:, l] = -q[:, l]
    r[np.tril_indices(n, k=-1)] = 0.0
    return QRFactors(q=q, r=r)


def zf_point(q, y) -> np.ndarray:
    """Rotated received vector Q^T y (the zero-forcing point)."""
    q = np.asarray(q, dtype=float)
    y = np.asarray(y, dtype=float)
    return q.T @ y


@dataclass(frozen=True)
class ArrayLatency:
    """Cost of one QR on a systolic array of the given organization.

    ``latency`` and ``throughput`` are (low, high) bounds; for the
    triangular and single-element organizations both bounds coincide.
    Throughput is in factorizations per cycle, kept exact as fractions.
    """

    kind: str
    n: int
    pe_count: int
    latency: tuple[int, int]
    throughput: tuple[Fraction, Fraction]

    @property
    def latency_cycles(self) -> int:
        """Single latency figure; raises when only a range is known."""
        lo, hi = self.latency
        if lo != hi:
            raise ValueError(f"latency of the {self.kind} array is a range [{lo}, {hi}]")
        return lo


def array_latency(kind: str, n: int) -> ArrayLatency:
    """Processing elements, latency and throughput of a rotation array.

    Closed forms for an n x n input:

    ==============  =========== =========================== ============
    organization    PEs         latency [cycles]            throughput
    ==============  =========== =========================== ============
    triangular      n(n+1)/2    n(n+1)/2                    1/n
    linear          n           (2n-1)+(n/2-1)(n+1) .. 2n^2-n   reciprocal
    single_element  1           n^2(n+1)/2                  reciprocal
    ==============  =========== =========================== ============
    """
    if kind not in ARRAY_KINDS:
        raise ValueError(f"unknown array kind {kind!r}, expected one of {ARRAY_KINDS}")
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"matrix dimension must be an integer >= 2, got {n!r}")
    if kind == "triangular":
        lat = n * (n + 1) // 2
        return ArrayLatency(kind, n, pe_count=lat, latency=(lat, lat),
                            throughput=(Fraction(1, n), Fraction(1, n)))
    if kind == "linear":
        # (2n-1) + (n/2 - 1)(n + 1), written over integers
        lo = (2 * n - 1) + (n * n - n - 2) // 2
        hi = 2 * n * n - n
        return ArrayLatency(kind, n, pe_count=n, latency=(lo, hi),
                            throughput=(Fraction(1, hi), Fraction(1, lo)))
    lat = n * n * (n + 1) // 2
    return ArrayLatency(kind, n, pe_count=1, latency=(lat, lat),
                        throughput=(Fraction(1, lat), Fraction(1, lat)))
