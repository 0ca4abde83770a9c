"""Sphere decoding of the Golden code and uncoded 4x4 MIMO.

Library layout:

- :mod:`goldensd.model` -- constellations, codeword map, real lattice model
- :mod:`goldensd.preproc` -- Givens QR, zero-forcing point, array latency
- :mod:`goldensd.decoder` -- depth-first ML tree search plus exhaustive oracle
- :mod:`goldensd.fxp` -- saturating fixed-point emulation of the datapath
- :mod:`goldensd.archmodel` -- shift-subtract divider and throughput model
- :mod:`goldensd.harness` -- seeded Monte Carlo sweeps (BER/CER, node counts)
- :mod:`goldensd.estimator` -- scikit-learn style fit/predict facade
- :mod:`goldensd.cli` -- ``goldensd`` command-line frontend
"""

from .archmodel import DividerTrace, ThroughputModel, dichotomic_divide, estimate_throughput
from .decoder import (
    DecodeResult,
    cancel_interference,
    decode,
    exhaustive_ml,
    metric_step,
    nearest_pam,
    select_child,
)
from .estimator import SphereDecoder
from .fxp import FxpFormat, FxpValue, decode_fxp, fxp_add, fxp_mul, fxp_sub, quantize
from .harness import CompareStats, SweepConfig, SweepStats, compare_fxp_float, run_sweep
from .model import (
    Constellation,
    GoldenConstants,
    SystemModel,
    build_golden_generator,
    build_system,
    constellation_for_qam,
    draw_channel,
    encode,
    snr_to_n0,
    transmit,
    vectorize,
)
from .preproc import ArrayLatency, QRFactors, array_latency, qr_givens, zf_point

__version__ = "0.1.0"

__all__ = [
    "ArrayLatency",
    "CompareStats",
    "Constellation",
    "DecodeResult",
    "DividerTrace",
    "FxpFormat",
    "FxpValue",
    "GoldenConstants",
    "QRFactors",
    "SphereDecoder",
    "SweepConfig",
    "SweepStats",
    "SystemModel",
    "ThroughputModel",
    "array_latency",
    "build_golden_generator",
    "build_system",
    "cancel_interference",
    "compare_fxp_float",
    "constellation_for_qam",
    "decode",
    "decode_fxp",
    "dichotomic_divide",
    "draw_channel",
    "encode",
    "estimate_throughput",
    "exhaustive_ml",
    "fxp_add",
    "fxp_mul",
    "fxp_sub",
    "metric_step",
    "nearest_pam",
    "qr_givens",
    "quantize",
    "run_sweep",
    "select_child",
    "snr_to_n0",
    "transmit",
    "vectorize",
    "zf_point",
    "__version__",
]
