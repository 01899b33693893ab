"""Pilot-based least-squares channel estimation.

Block-type estimation dedicates a whole OFDM symbol to pilots and divides
per bin.  Comb-type estimation spreads pilots uniformly over the
subcarriers of every symbol and fills in the remaining bins by transform-
domain low-pass interpolation, which is exact whenever the channel has no
more taps than there are pilots.
"""

from dataclasses import dataclass

import numpy as np

from .transforms import dft, idft

__all__ = [
    "BlockPilots",
    "CombPilots",
    "ls_estimate_block",
    "ls_estimate_comb",
    "truncate_to_taps",
]


@dataclass(frozen=True)
class BlockPilots:
    """Full pilot symbol leading each slot of OFDM symbols."""

    symbols_per_slot: int = 7

    def __post_init__(self):
        if self.symbols_per_slot < 2:
            raise ValueError("BlockPilots: slot needs the pilot plus data symbols")


@dataclass(frozen=True)
class CombPilots:
    """Uniform pilot bins every ``spacing`` subcarriers (1:spacing rate)."""

    spacing: int = 4
    pilot_value: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.spacing < 2:
            raise ValueError("CombPilots: spacing must be at least 2")
        if abs(abs(self.pilot_value) - 1.0) > 1e-9:
            raise ValueError("CombPilots: pilot value must have unit magnitude")

    def pilot_bins(self, n):
        if n % self.spacing != 0:
            raise ValueError(f"CombPilots: spacing {self.spacing} does not divide N={n}")
        return np.arange(0, n, self.spacing)

    def data_bins(self, n):
        mask = np.ones(n, dtype=bool)
        mask[self.pilot_bins(n)] = False
        return np.nonzero(mask)[0]


def ls_estimate_block(y_freq, pilots):
    """Per-bin least squares on a full pilot symbol: H_hat[k] = Y[k]/P[k]."""
    y = np.asarray(y_freq, dtype=complex)
    p = np.asarray(pilots, dtype=complex)
    if y.shape != p.shape:
        raise ValueError("ls_estimate_block: pilot and observation shapes differ")
    if np.any(np.abs(p) == 0):
        raise ValueError("ls_estimate_block: zero-magnitude pilot")
    return y / p


def ls_estimate_comb(y_freq, plan):
    """LS at the comb pilot bins, low-pass interpolated to all N bins.

    The pilot-bin estimates are an (N/spacing)-point DFT of the impulse
    response, so inverse-transforming them, zero-padding in the tap
    domain, and transforming back reconstructs the full response exactly
    when the channel is short enough (L <= number of pilots).
    """
    y = np.asarray(y_freq, dtype=complex)
    n = y.size
    bins = plan.pilot_bins(n)
    h_at_pilots = y[bins] / plan.pilot_value
    taps = idft(h_at_pilots)
    padded = np.zeros(n, dtype=complex)
    padded[: taps.size] = taps
    return dft(padded)


def truncate_to_taps(h_freq, max_taps):
    """Tap-domain truncation of a frequency-response estimate.

    Keeps the first ``max_taps`` entries of the inverse transform, which
    discards estimation noise outside the guard-interval support.
    """
    taps = idft(np.asarray(h_freq, dtype=complex))
    if max_taps < 1 or max_taps > taps.size:
        raise ValueError(f"truncate_to_taps: max_taps {max_taps} out of range")
    return taps[:max_taps]
