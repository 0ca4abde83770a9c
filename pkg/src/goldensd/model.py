"""Signal model: constellations, Golden-code encoding and the real-valued lattice.

The transmit chain is modeled entirely over the reals.  A codeword (2x2
complex matrix for the Golden code, length-4 complex vector for uncoded
4x4 MIMO) is flattened to a length-8 real vector, the channel becomes an
8x8 real matrix ``H``, and the code generator an 8x8 orthogonal matrix
``G``, so that the received vector is ``y = H G s + z`` with ``s`` holding
the eight PAM coordinates of the four QAM information symbols.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MODES = ("golden_2x2", "uncoded_4x4")

#: Real dimension of the lattice (eight PAM coordinates per codeword).
N_DIM = 8


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    return mode


@dataclass(frozen=True)
class Constellation:
    """Q-PAM alphabet (one axis of a Q^2-QAM constellation).

    Points are the odd multiples of ``spacing / 2``;  with the canonical
    spacing of 2 they are plain odd integers -(q-1), ..., -1, +1, ..., q-1.
    """

    q: int
    spacing: float = 2.0

    def __post_init__(self) -> None:
        if self.q not in (2, 4, 8):
            raise ValueError(f"PAM order must be 2, 4 or 8, got {self.q}")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")

    @property
    def points(self) -> np.ndarray:
        """Alphabet points in strictly increasing order."""
        odd = np.arange(-(self.q - 1), self.q, 2, dtype=float)
        return odd * (self.spacing / 2.0)

    @property
    def qam_size(self) -> int:
        return self.q * self.q

    @property
    def bits_per_pam(self) -> int:
        return int(math.log2(self.q))

    @property
    def energy_per_dim(self) -> float:
        """Mean squared value of a uniformly drawn alphabet point."""
        return (self.spacing / 2.0) ** 2 * (self.q * self.q - 1) / 3.0

    def contains(self, values) -> bool:
        """True when every entry of ``values`` is an alphabet point."""
        pts = self.points
        v = np.atleast_1d(np.asarray(values, dtype=float))
        return bool(np.all(np.isclose(v[:, None], pts[None, :], atol=1e-9).any(axis=1)))

    def gray_index(self, symbols) -> np.ndarray:
        """Gray-coded bit label of each symbol (per-axis Gray mapping)."""
        u = np.asarray(symbols, dtype=float) / (self.spacing / 2.0)
        idx = np.rint((u + (self.q - 1)) / 2.0).astype(np.int64)
        if np.any(idx < 0) or np.any(idx >= self.q):
            raise ValueError("symbol outside the alphabet")
        return idx ^ (idx >> 1)

    def bit_errors(self, sent, decided) -> int:
        """Hamming distance between the Gray labels of two symbol arrays."""
        x = self.gray_index(sent) ^ self.gray_index(decided)
        return int(sum(int(v).bit_count() for v in x.ravel()))


def constellation_for_qam(qam_size: int) -> Constellation:
    """Constellation from the QAM size used on the wire (4, 16 or 64)."""
    q = int(round(math.sqrt(qam_size)))
    if q * q != qam_size:
        raise ValueError(f"QAM size must be a perfect square, got {qam_size}")
    return Constellation(q=q)


@dataclass(frozen=True)
class GoldenConstants:
    """Algebraic constants of the Golden code."""

    theta: float = (1.0 + math.sqrt(5.0)) / 2.0
    sigma_theta: float = (1.0 - math.sqrt(5.0)) / 2.0
    alpha: complex = complex(1.0, 1.0 - (1.0 + math.sqrt(5.0)) / 2.0)
    sigma_alpha: complex = complex(1.0, (1.0 + math.sqrt(5.0)) / 2.0)
    scale: float = 1.0 / math.sqrt(5.0)


GOLDEN = GoldenConstants()


def encode(s, constants: GoldenConstants = GOLDEN, constellation: Constellation | None = None) -> np.ndarray:
    """Encode eight PAM coordinates into a 2x2 Golden codeword.

    ``s`` is ordered (Re a, Im a, Re b, Im b, Re c, Im c, Re d, Im d).  The
    map is linear over the reals, so arbitrary real inputs are accepted;
    pass ``constellation`` to enforce alphabet membership.
    """
    s = np.asarray(s, dtype=float)
    if s.shape != (N_DIM,):
        raise ValueError(f"symbol vector must have shape ({N_DIM},), got {s.shape}")
    if constellation is not None and not constellation.contains(s):
        raise ValueError("symbol vector contains points outside the alphabet")
    a = complex(s[0], s[1])
    b = complex(s[2], s[3])
    c = complex(s[4], s[5])
    d = complex(s[6], s[7])
    th, sth = constants.theta, constants.sigma_theta
    al, sal = constants.alpha, constants.sigma_alpha
    x = np.array(
        [
            [al * (a + b * th), al * (c + d * th)],
            [1j * sal * (c + d * sth), sal * (a + b * sth)],
        ],
        dtype=complex,
    )
    return constants.scale * x


def vectorize(x) -> np.ndarray:
    """Flatten a codeword to a length-8 real vector.

    Complex entries are taken column-major (channel use 1, then channel
    use 2) and each expands to an adjacent (Re, Im) pair.  For the uncoded
    mode ``x`` is already a length-4 complex vector.
    """
    x = np.asarray(x, dtype=complex)
    if x.shape == (2, 2):
        flat = x.flatten(order="F")
    elif x.shape == (4,):
        flat = x
    else:
        raise ValueError(f"codeword must be 2x2 or length-4, got shape {x.shape}")
    out = np.empty(N_DIM, dtype=float)
    out[0::2] = flat.real
    out[1::2] = flat.imag
    return out


def devectorize(v, mode: str = "golden_2x2") -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    _check_mode(mode)
    v = np.asarray(v, dtype=float)
    if v.shape != (N_DIM,):
        raise ValueError(f"expected shape ({N_DIM},), got {v.shape}")
    flat = v[0::2] + 1j * v[1::2]
    if mode == "golden_2x2":
        return flat.reshape((2, 2), order="F")
    return flat


def build_golden_generator(constants: GoldenConstants = GOLDEN) -> np.ndarray:
    """8x8 real generator G with columns vectorize(encode(e_k)).

    Built numerically from the codeword map so that orthogonality is a
    genuine property of the construction rather than of hard-coded data.
    """
    g = np.empty((N_DIM, N_DIM), dtype=float)
    for k in range(N_DIM):
        e = np.zeros(N_DIM)
        e[k] = 1.0
        g[:, k] = vectorize(encode(e, constants))
    return g


def complex_to_real_block(h: complex) -> np.ndarray:
    """2x2 real image of multiplication by the complex scalar ``h``."""
    return np.array([[h.real, -h.imag], [h.imag, h.real]])


def real_expansion(h_complex, mode: str = "golden_2x2") -> np.ndarray:
    """8x8 real channel matrix acting on vectorized codewords.

    In Golden mode the two channel uses of one codeword see the same 2x2
    matrix, so the expansion is block diagonal with two identical 4x4
    blocks; in uncoded mode the 4x4 complex matrix expands directly.
    """
    _check_mode(mode)
    h = np.asarray(h_complex, dtype=complex)
    m = 2 if mode == "golden_2x2" else 4
    if h.shape != (m, m):
        raise ValueError(f"channel must be {m}x{m} for mode {mode!r}, got {h.shape}")
    block = np.zeros((2 * m, 2 * m))
    for i in range(m):
        for j in range(m):
            block[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = complex_to_real_block(h[i, j])
    if mode == "uncoded_4x4":
        return block
    out = np.zeros((N_DIM, N_DIM))
    out[:4, :4] = block
    out[4:, 4:] = block
    return out


def draw_channel(mode: str, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. circularly-symmetric complex Gaussian channel, unit variance."""
    _check_mode(mode)
    m = 2 if mode == "golden_2x2" else 4
    re = rng.standard_normal((m, m))
    im = rng.standard_normal((m, m))
    return (re + 1j * im) / math.sqrt(2.0)


@dataclass(frozen=True)
class SystemModel:
    """Real-valued lattice model of one channel realization.

    ``lattice = h_real @ generator`` is the generator matrix of the
    8-dimensional lattice the detector searches.
    """

    mode: str
    generator: np.ndarray
    h_complex: np.ndarray
    h_real: np.ndarray
    lattice: np.ndarray
    n0: float


@lru_cache(maxsize=None)
def _cached_generator(mode: str) -> np.ndarray:
    g = build_golden_generator() if mode == "golden_2x2" else np.eye(N_DIM)
    g.setflags(write=False)
    return g


def build_system(mode: str, h_complex, n0: float = 0.0) -> SystemModel:
    """Assemble the lattice model M = H G for one channel realization."""
    _check_mode(mode)
    if n0 < 0:
        raise ValueError("noise variance must be nonnegative")
    h_complex = np.asarray(h_complex, dtype=complex)
    h_real = real_expansion(h_complex, mode)
    generator = _cached_generator(mode)
    return SystemModel(
        mode=mode,
        generator=generator,
        h_complex=h_complex,
        h_real=h_real,
        lattice=h_real @ generator,
        n0=float(n0),
    )


def transmit(s, system: SystemModel, rng) -> np.ndarray:
    """Received vector y = M s + z for one codeword.

    ``rng`` is a seed or a numpy Generator; noise is i.i.d. Gaussian with
    variance ``n0 / 2`` per real dimension (complex variance n0).
    """
    s = np.asarray(s, dtype=float)
    if s.shape != (N_DIM,):
        raise ValueError(f"symbol vector must have shape ({N_DIM},), got {s.shape}")
    y = system.lattice @ s
    if system.n0 > 0:
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        y = y + rng.standard_normal(N_DIM) * math.sqrt(system.n0 / 2.0)
    return y


#: Mean Frobenius-norm energy of the real channel expansion, per mode.
_CHANNEL_ENERGY = {"golden_2x2": 16.0, "uncoded_4x4": 32.0}

#: dB value at and above which the noise variance is treated as exactly zero.
SNR_DB_CAP = 300.0


def snr_to_n0(snr_db: float, constellation: Constellation, mode: str = "golden_2x2") -> float:
    """Noise variance n0 for a target SNR.

    SNR is defined as E||M s||^2 / E||z||^2 with expectation over symbols
    and channel.  With E_s the per-dimension symbol energy and F the mean
    squared Frobenius norm of the real channel expansion (16 in Golden
    mode, 32 uncoded), E||M s||^2 = E_s * F and E||z||^2 = 8 * n0 / 2,
    giving  n0 = E_s * F / (4 * snr).
    """
    _check_mode(mode)
    if math.isinf(snr_db) or snr_db >= SNR_DB_CAP:
        return 0.0
    if not math.isfinite(snr_db):
        raise ValueError("snr_db must be finite (or +inf for the noiseless cap)")
    snr_lin = 10.0 ** (snr_db / 10.0)
    return constellation.energy_per_dim * _CHANNEL_ENERGY[mode] / (4.0 * snr_lin)


def draw_symbols(constellation: Constellation, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random length-8 symbol vector."""
    return constellation.points[rng.integers(0, constellation.q, size=N_DIM)]


def min_codeword_det(box: int = 4, chunk: int = 512) -> float:
    """Minimum |det X(v)|^2 over nonzero Gaussian-integer difference vectors.

    ``v = (a, b, c, d)`` ranges over Z[i]^4 with real and imaginary parts
    in [-box, box].  Difference vectors of unit-spaced QAM symbols are
    exactly such Gaussian integers, so this measures the worst-case coding
    gain independently of the constellation size.  The determinant is
    evaluated directly through the codeword map, exploiting only that the
    two diagonal products depend on (a, b) and (c, d) separately.
    """
    vals = np.arange(-box, box + 1, dtype=float)
    re, im = np.meshgrid(vals, vals, indexing="ij")
    zs = (re + 1j * im).ravel()  # all Gaussian integers in the box
    z1 = np.repeat(zs, zs.size)  # all ordered pairs (z1, z2) of box integers
    z2 = np.tile(zs, zs.size)

    th, sth = GOLDEN.theta, GOLDEN.sigma_theta
    al, sal = GOLDEN.alpha, GOLDEN.sigma_alpha
    scale2 = GOLDEN.scale**2
    # det X = x11*x22 - x12*x21 with x11*x22 a function of (a, b) only and
    # x12*x21 of (c, d) only.
    diag = scale2 * (al * (z1 + z2 * th)) * (sal * (z1 + z2 * sth))
    anti = scale2 * (al * (z1 + z2 * th)) * (1j * sal * (z1 + z2 * sth))

    zero_idx = int(np.flatnonzero((z1 == 0) & (z2 == 0))[0])
    best = math.inf
    for start in range(0, diag.size, chunk):
        d_chunk = diag[start : start + chunk, None] - anti[None, :]
        mag = np.abs(d_chunk) ** 2
        if start <= zero_idx < start + chunk:
            mag[zero_idx - start, zero_idx] = math.inf  # the all-zero vector
        best = min(best, float(mag.min()))
    return best
