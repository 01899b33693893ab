"""Complex-vector transforms and structured channel matrices.

DFT convention used throughout the package: the forward transform is
unnormalized, ``X[k] = sum_n x[n] exp(-2j*pi*k*n/N)``, and the inverse
carries the ``1/N`` factor.  All matrix builders return dense complex
arrays; only the shapes needed by the OFDM chain are provided.
"""

import numpy as np

__all__ = [
    "dft",
    "idft",
    "circulant_matrix",
    "weighted_circulant_matrix",
    "zero_pad_channel_matrix",
    "pseudoinverse",
    "psi_powers",
]

# Singular-value ratio below which a matrix is treated as rank deficient.
RANK_TOL = 1e-12


def dft(x):
    """Unnormalized forward DFT of a 1-D sequence."""
    x = np.asarray(x)
    if x.size == 0:
        raise ValueError("dft: input must be non-empty")
    return np.fft.fft(x)


def idft(x):
    """Inverse DFT, carrying the 1/N normalization."""
    x = np.asarray(x)
    if x.size == 0:
        raise ValueError("idft: input must be non-empty")
    return np.fft.ifft(x)


def _padded_taps(h, n):
    h = np.asarray(h, dtype=complex)
    if h.ndim != 1 or h.size == 0:
        raise ValueError("tap vector must be a non-empty 1-D sequence")
    if h.size > n:
        raise ValueError(f"tap count {h.size} exceeds matrix size {n}")
    out = np.zeros(n, dtype=complex)
    out[: h.size] = h
    return out


def circulant_matrix(h, n):
    """n-by-n circulant matrix whose first column is ``h`` zero-padded to n.

    Each column is the cyclic down-shift of the previous one, so entry
    (i, j) is ``h[(i - j) mod n]``.
    """
    c = _padded_taps(h, n)
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return c[idx]


def weighted_circulant_matrix(h, n, phi):
    """Toeplitz channel matrix whose wrapped entries carry the weight ``phi``.

    Entry (i, j) is ``h[i-j]`` on and below the diagonal and
    ``phi * h[n+i-j]`` above it (taps beyond the channel length are zero).
    ``phi = 1`` reduces to :func:`circulant_matrix`; ``phi = -1`` gives the
    classical skew-circulant.
    """
    if phi == 0:
        raise ValueError("weighted_circulant_matrix: phi must be nonzero")
    m = circulant_matrix(h, n)
    i, j = np.indices((n, n))
    m[i < j] *= phi
    return m


def zero_pad_channel_matrix(h, n):
    """Tall (n+L-1)-by-n banded Toeplitz matrix of linear convolution.

    Column j holds the channel taps starting at row j.  Full column rank
    whenever h[0] != 0, regardless of spectral nulls.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 1 or h.size == 0:
        raise ValueError("tap vector must be a non-empty 1-D sequence")
    if n < 1:
        raise ValueError("matrix width must be positive")
    L = h.size
    m = np.zeros((n + L - 1, n), dtype=complex)
    for j in range(n):
        m[j : j + L, j] = h
    return m


def pseudoinverse(m):
    """Moore-Penrose pseudoinverse via SVD.

    Raises ``numpy.linalg.LinAlgError`` when the smallest singular value
    falls below RANK_TOL times the largest (rank-deficient input).
    """
    m = np.asarray(m, dtype=complex)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    if s[0] == 0 or s[-1] < RANK_TOL * s[0]:
        raise np.linalg.LinAlgError(
            f"pseudoinverse: rank-deficient matrix (singular-value ratio "
            f"{0.0 if s[0] == 0 else s[-1] / s[0]:.3e})"
        )
    return (vh.conj().T / s) @ u.conj().T


def psi_powers(psi, n):
    """Geometric sequence (1, psi, psi^2, ..., psi^(n-1)).

    Applied elementwise, this is the diagonal weighting that turns the
    weighted-prefix channel into a circulant one; with |psi| = 1 it is an
    isometry, so noise statistics are unchanged by the receiver-side
    weighting.
    """
    if psi == 0:
        raise ValueError("psi_powers: psi must be nonzero")
    return np.asarray(psi, dtype=complex) ** np.arange(n)
