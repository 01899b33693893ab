"""Multipath FIR channel models, AWGN, and frequency responses.

Power delay profiles are configuration data: they can be loaded from a
small structured text format, and the two COST-207 12-tap urban profiles
(sampled onto the 5 MHz grid, 0.2 us per sample) ship with the package.
Every stochastic operation takes an explicit ``numpy.random.Generator``;
there is no hidden global RNG state.
"""

import warnings
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.special import j0

from .transforms import dft, psi_powers

__all__ = [
    "PowerDelayProfile",
    "ChannelRealization",
    "NoiseConfig",
    "load_pdp",
    "standard_profile",
    "TWO_TAP_PROFILE",
    "draw_realization",
    "apply_channel",
    "frequency_response",
    "shifted_frequency_response",
    "evolve_doppler",
]

PDP_SUM_TOL = 1e-9


@dataclass(frozen=True)
class PowerDelayProfile:
    """Mean tap powers at integer sample delays, unit total energy."""

    name: str
    tap_delays: tuple
    tap_powers: tuple

    def __post_init__(self):
        delays = tuple(int(d) for d in self.tap_delays)
        powers = tuple(float(p) for p in self.tap_powers)
        if len(delays) != len(powers) or not delays:
            raise ValueError("PDP: delays and powers must be non-empty and matched")
        if delays[0] != 0:
            raise ValueError("PDP: first delay must be 0")
        if any(b <= a for a, b in zip(delays, delays[1:])):
            raise ValueError("PDP: delays must be strictly increasing")
        if any(p <= 0 for p in powers):
            raise ValueError("PDP: powers must be positive")
        total = sum(powers)
        if abs(total - 1.0) > PDP_SUM_TOL:
            warnings.warn(
                f"PDP '{self.name}': powers sum to {total:.6g}, normalizing to 1",
                stacklevel=2,
            )
            powers = tuple(p / total for p in powers)
        object.__setattr__(self, "tap_delays", delays)
        object.__setattr__(self, "tap_powers", powers)

    @property
    def length(self):
        """FIR length: highest delay plus one."""
        return self.tap_delays[-1] + 1


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the FIR channel: complex taps h[0..L-1]."""

    taps: np.ndarray

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=complex)
        if taps.ndim != 1 or taps.size == 0:
            raise ValueError("ChannelRealization: taps must be a non-empty vector")
        object.__setattr__(self, "taps", taps)

    @property
    def length(self):
        return self.taps.size


@dataclass(frozen=True)
class NoiseConfig:
    """Eb/N0 operating point and the factors mapping it to a noise density.

    With unit-energy transmit samples, the single-sided density N0 makes
    the effective per-bit SNR at the detector equal to
    ``overhead_factor * Eb/N0`` on a flat unit channel, i.e. the guard
    interval is charged as pure overhead.
    """

    ebno_db: float
    bits_per_symbol: int
    overhead_factor: float

    def __post_init__(self):
        if self.bits_per_symbol < 1:
            raise ValueError("NoiseConfig: bits_per_symbol must be >= 1")
        if not 0 < self.overhead_factor <= 1:
            raise ValueError("NoiseConfig: overhead_factor must be in (0, 1]")

    @property
    def n0(self):
        """Complex noise variance per sample (N0; per-dimension N0/2)."""
        ebno = 10.0 ** (self.ebno_db / 10.0)
        return 1.0 / (self.bits_per_symbol * self.overhead_factor * ebno)


def load_pdp(path):
    """Parse a PDP text file.

    Format: ``name:`` and optional ``sample_period_us:`` header lines,
    then one ``delay_samples power_linear`` pair per line.  ``#`` starts
    a comment.  Powers are normalized (with a warning) if they do not
    already sum to 1.
    """
    name = None
    delays, powers = [], []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if ":" in line:
                key, value = (part.strip() for part in line.split(":", 1))
                if key == "name":
                    name = value
                # sample_period_us is informational only
                continue
            fields = line.split()
            if len(fields) != 2:
                raise ValueError(f"PDP file {path}: bad line {raw!r}")
            delays.append(int(fields[0]))
            powers.append(float(fields[1]))
    if name is None:
        raise ValueError(f"PDP file {path}: missing 'name:' header")
    return PowerDelayProfile(name, tuple(delays), tuple(powers))


def standard_profile(name):
    """Built-in profile by name: 'tu12', 'bu12', or 'two-tap'."""
    key = name.lower()
    if key == "two-tap":
        return TWO_TAP_PROFILE
    if key in ("tu12", "bu12"):
        ref = resources.files("ofdmlink.data").joinpath(f"{key}.pdp")
        with resources.as_file(ref) as path:
            return load_pdp(path)
    raise ValueError(f"unknown channel profile {name!r}")


TWO_TAP_PROFILE = PowerDelayProfile("two-tap", (0, 1), (0.5, 0.5))


def draw_realization(pdp, rng):
    """Draw an independent Rayleigh-fading realization of the profile.

    Each tap is circularly-symmetric complex Gaussian with variance equal
    to its PDP power; taps sit at their delay indices, zeros elsewhere.
    """
    taps = np.zeros(pdp.length, dtype=complex)
    scale = np.sqrt(np.asarray(pdp.tap_powers) / 2.0)
    gains = scale * (rng.standard_normal(len(scale)) + 1j * rng.standard_normal(len(scale)))
    taps[list(pdp.tap_delays)] = gains
    return ChannelRealization(taps)


def apply_channel(x, h, noise=None, rng=None):
    """Full linear convolution with the channel taps, plus optional AWGN.

    The output has length ``len(x) + L - 1``.  When a NoiseConfig is
    given, i.i.d. complex Gaussian noise with per-dimension variance
    N0/2 is added to every output sample.
    """
    x = np.asarray(x, dtype=complex)
    y = np.convolve(x, h.taps)
    if noise is not None:
        if rng is None:
            raise ValueError("apply_channel: noise requested but no rng given")
        sigma = np.sqrt(noise.n0 / 2.0)
        y = y + sigma * (rng.standard_normal(y.size) + 1j * rng.standard_normal(y.size))
    return y


def frequency_response(h, n):
    """n-point DFT of the zero-padded impulse response."""
    if h.length > n:
        raise ValueError(f"channel length {h.length} exceeds DFT size {n}")
    padded = np.zeros(n, dtype=complex)
    padded[: h.length] = h.taps
    return dft(padded)


def shifted_frequency_response(h, n, psi):
    """Frequency response of the weighted-prefix equivalent channel.

    Multiplying tap l by psi**l shifts the transfer function: with
    psi = exp(1j*alpha) the result samples H at (omega_k - alpha), so a
    spectral null can be moved off the subcarrier grid.
    """
    if abs(abs(psi) - 1.0) > 1e-9:
        raise ValueError(f"shifted_frequency_response: |psi| must be 1, got {abs(psi):.6g}")
    if h.length > n:
        raise ValueError(f"channel length {h.length} exceeds DFT size {n}")
    padded = np.zeros(n, dtype=complex)
    padded[: h.length] = h.taps * psi_powers(psi, h.length)
    return dft(padded)


def evolve_doppler(h_prev, pdp, doppler_hz, dt_s, rng):
    """First-order Gauss-Markov tap evolution under a Doppler spread.

    The per-step correlation is the Jakes autocorrelation
    rho = J0(2*pi*f_d*dt); innovations are scaled so each tap keeps its
    PDP power.  doppler_hz = 0 returns the input unchanged.
    """
    if doppler_hz < 0 or dt_s <= 0:
        raise ValueError("evolve_doppler: need doppler_hz >= 0 and dt_s > 0")
    if doppler_hz == 0:
        return h_prev
    rho = float(j0(2.0 * np.pi * doppler_hz * dt_s))
    fresh = draw_realization(pdp, rng)
    taps = rho * h_prev.taps + np.sqrt(1.0 - rho * rho) * fresh.taps
    return ChannelRealization(taps)
