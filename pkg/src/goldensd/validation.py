"""Input validation helpers shared by the estimator, harness and CLI."""

from __future__ import annotations

import numpy as np

from .fxp import FxpFormat
from .model import MODES, N_DIM


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    return mode


def check_qam(qam: int) -> int:
    if qam not in (4, 16, 64):
        raise ValueError(f"modulation must be 4-, 16- or 64-QAM, got {qam}")
    return qam


def check_channel(channel, mode: str) -> np.ndarray:
    """Complex channel matrix of the shape the mode requires."""
    check_mode(mode)
    h = np.asarray(channel, dtype=complex)
    m = 2 if mode == "golden_2x2" else 4
    if h.shape != (m, m):
        raise ValueError(f"channel must be {m}x{m} complex for mode {mode!r}, got shape {h.shape}")
    if not np.all(np.isfinite(h.real)) or not np.all(np.isfinite(h.imag)):
        raise ValueError("channel entries must be finite")
    return h


def check_received(received) -> tuple[np.ndarray, bool]:
    """Received vectors as a (m, 8) float array.

    Accepts a single length-8 vector or a stack of them; returns the 2-D
    array and whether the input was a single vector.
    """
    y = np.asarray(received, dtype=float)
    single = y.ndim == 1
    y = np.atleast_2d(y)
    if y.ndim != 2 or y.shape[1] != N_DIM:
        raise ValueError(f"received vectors must have {N_DIM} real entries, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise ValueError("received entries must be finite")
    return y, single


def check_format(fixed_point) -> FxpFormat | None:
    """Normalize a fixed-point spec: None, 'Qm.f' string, or FxpFormat."""
    if fixed_point is None:
        return None
    if isinstance(fixed_point, FxpFormat):
        return fixed_point
    if isinstance(fixed_point, str):
        return FxpFormat.from_string(fixed_point)
    raise ValueError(f"fixed_point must be None, 'Qm.f' or FxpFormat, got {fixed_point!r}")
