"""Guard-interval construction and the weighted circular convolution.

Three schemes are supported: the classical cyclic prefix, zero padding,
and the weighted prefix in which the copied samples are scaled by
phi = psi**N before being prepended.  After the receiver discards the
first K samples, the weighted prefix turns the linear channel
convolution into a circular convolution whose wrapped terms carry phi.
"""

from dataclasses import dataclass

import numpy as np

from .modem import UNIT_MODULUS_TOL

__all__ = [
    "CyclicPrefix",
    "ZeroPadding",
    "WeightedPrefix",
    "add_prefix",
    "strip_guard",
    "weighted_circular_convolve",
]


@dataclass(frozen=True)
class CyclicPrefix:
    """Copy of the last K samples prepended unchanged."""


@dataclass(frozen=True)
class ZeroPadding:
    """Guard of K zeros appended after the block."""


@dataclass(frozen=True)
class WeightedPrefix:
    """Last K samples scaled by phi = psi**N, then prepended.

    Only the root psi is stored; phi is derived from the block length at
    use time.  |psi| must be 1 (PAPR / numerical-stability constraint).
    """

    psi: complex

    def __post_init__(self):
        if abs(abs(self.psi) - 1.0) > UNIT_MODULUS_TOL:
            raise ValueError(f"WeightedPrefix: |psi| must be 1, got {abs(self.psi):.6g}")

    def phi(self, n):
        return self.psi**n


def add_prefix(x, k, scheme):
    """Extend an N-sample block with a K-sample guard interval.

    Cyclic and weighted schemes prepend (a scaled copy of) the block
    tail; zero padding appends k zeros instead.
    """
    x = np.asarray(x, dtype=complex)
    n = x.size
    if not 0 < k < n:
        raise ValueError(f"guard length {k} out of range for block of {n}")
    if isinstance(scheme, CyclicPrefix):
        return np.concatenate([x[n - k :], x])
    if isinstance(scheme, WeightedPrefix):
        return np.concatenate([scheme.phi(n) * x[n - k :], x])
    if isinstance(scheme, ZeroPadding):
        return np.concatenate([x, np.zeros(k, dtype=complex)])
    raise TypeError(f"unknown prefix scheme {scheme!r}")


def strip_guard(y, n, k):
    """Keep received samples k .. n+k-1, discarding the guard window.

    The same rule applies to every scheme, including zero padding.
    """
    y = np.asarray(y, dtype=complex)
    if y.size < n + k:
        raise ValueError(f"received block of {y.size} shorter than n+k={n + k}")
    return y[k : n + k]


def weighted_circular_convolve(x, h, phi):
    """Circular convolution whose wrapped terms are weighted by phi.

    y[m] = sum_l h[l] * u[m-l] * x[(m-l) mod N] with u = 1 for a
    nonnegative argument and phi for a negative one.  phi = 1 is the
    ordinary circular convolution, phi = -1 the skew-circular one.
    Matches the prefix -> linear convolution -> guard-strip pipeline
    sample for sample.
    """
    x = np.asarray(x, dtype=complex)
    h = np.asarray(h, dtype=complex)
    if phi == 0:
        raise ValueError("weighted_circular_convolve: phi must be nonzero")
    if h.size > x.size:
        raise ValueError(f"channel length {h.size} exceeds block length {x.size}")
    full = np.convolve(x, h)
    y = full[: x.size].copy()
    tail = full[x.size :]
    y[: tail.size] += phi * tail
    return y
