"""Bit/QAM mapping and the multicarrier modulation chain.

The weighted-prefix system modulates with an extra elementwise scaling by
the inverse psi power ramp before transmission and by the ramp itself at
the receiver; psi = 1 recovers the plain IDFT/DFT chain used with a
cyclic prefix.
"""

from dataclasses import dataclass, field

import numpy as np

from .transforms import dft, idft, psi_powers

__all__ = [
    "QamConstellation",
    "OfdmConfig",
    "map_bits",
    "demap_symbols",
    "ofdm_modulate",
    "ofdm_demodulate",
]

UNIT_MODULUS_TOL = 1e-9


def _gray_decode(g):
    b = g
    shift = 1
    while (g >> shift) > 0:
        b ^= g >> shift
        shift += 1
    return b


def _build_constellation(order):
    """Square QAM points indexed by their bit label (MSB first).

    Gray coding is applied independently per quadrature axis: the first
    half of each label selects the in-phase level, the second half the
    quadrature level.  Average symbol energy is exactly 1.
    """
    bits = int(np.log2(order))
    if 2**bits != order or bits % 2 != 0 or order < 4:
        raise ValueError(f"unsupported QAM order {order}: need 4, 16, 64, ...")
    half = bits // 2
    levels = 2**half
    norm = np.sqrt(2.0 * (order - 1) / 3.0)
    points = np.empty(order, dtype=complex)
    for label in range(order):
        gi = label >> half
        gq = label & (levels - 1)
        li = 2 * _gray_decode(gi) - (levels - 1)
        lq = 2 * _gray_decode(gq) - (levels - 1)
        points[label] = (li + 1j * lq) / norm
    return points


@dataclass(frozen=True)
class QamConstellation:
    """Gray-coded square QAM with unit average energy.

    ``points[label]`` is the symbol whose bit pattern is the binary
    expansion of ``label`` (MSB first).
    """

    order: int
    points: np.ndarray = field(repr=False)

    @classmethod
    def from_order(cls, order):
        return cls(order=order, points=_build_constellation(order))

    @property
    def bits_per_symbol(self):
        return int(np.log2(self.order))


@dataclass(frozen=True)
class OfdmConfig:
    """Static system parameters: subcarrier count, guard length, mapping."""

    n: int
    k: int
    constellation: QamConstellation

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("OfdmConfig: need at least 2 subcarriers")
        if not 0 < self.k < self.n:
            raise ValueError("OfdmConfig: guard length must satisfy 0 < k < n")

    @property
    def overhead_factor(self):
        """Fraction of the block carrying data, n/(n+k)."""
        return self.n / (self.n + self.k)


def map_bits(bits, constellation):
    """Map a bit sequence onto Gray-coded QAM symbols.

    The bit count must be divisible by log2(M); an empty input yields an
    empty symbol sequence.
    """
    bits = np.asarray(bits, dtype=np.int64)
    b = constellation.bits_per_symbol
    if bits.size % b != 0:
        raise ValueError(f"bit count {bits.size} not divisible by {b}")
    if bits.size == 0:
        return np.empty(0, dtype=complex)
    weights = 1 << np.arange(b - 1, -1, -1)
    labels = bits.reshape(-1, b) @ weights
    return constellation.points[labels]


def demap_symbols(symbols, constellation):
    """Hard-decision demapping to the nearest constellation point.

    A symbol exactly midway between points resolves deterministically to
    the lexicographically smallest bit label (argmin over label order).
    """
    symbols = np.asarray(symbols, dtype=complex)
    if symbols.size == 0:
        return np.empty(0, dtype=np.int64)
    d2 = np.abs(symbols[:, None] - constellation.points[None, :]) ** 2
    labels = np.argmin(d2, axis=1)
    b = constellation.bits_per_symbol
    shifts = np.arange(b - 1, -1, -1)
    return ((labels[:, None] >> shifts) & 1).reshape(-1)


def _check_unit_modulus(psi):
    if abs(abs(psi) - 1.0) > UNIT_MODULUS_TOL:
        raise ValueError(
            f"prefix weight root must lie on the unit circle, got |psi|={abs(psi):.6g}"
        )


def ofdm_modulate(x_freq, psi=1.0):
    """Multicarrier modulation: inverse DFT then inverse psi-ramp scaling.

    Pass psi = 1 for cyclic-prefix or zero-padded systems.  |psi| != 1 is
    rejected: it would change the PAPR and make the ramp numerically
    unstable.
    """
    _check_unit_modulus(psi)
    x = idft(x_freq)
    if psi == 1.0:
        return x
    return x * psi_powers(np.conj(psi), x.size)


def ofdm_demodulate(y_time, psi=1.0):
    """Receiver-side psi-ramp scaling followed by the forward DFT."""
    _check_unit_modulus(psi)
    y = np.asarray(y_time, dtype=complex)
    if psi == 1.0:
        return dft(y)
    return dft(psi_powers(psi, y.size) * y)
