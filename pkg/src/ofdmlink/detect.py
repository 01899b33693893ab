"""Symbol detection: per-subcarrier zero forcing and the zero-padding
matrix-inversion receiver."""

import numpy as np
from scipy.signal import lfilter

from .transforms import RANK_TOL, dft, pseudoinverse, zero_pad_channel_matrix

__all__ = ["zf_detect", "zp_detect", "ZF_NULL_EPS"]

# Below this magnitude a per-subcarrier division is meaningless in double
# precision; the bin is zeroed and flagged instead.
ZF_NULL_EPS = 1e-15


def zf_detect(y_freq, h_freq):
    """Per-subcarrier zero forcing, X_hat[k] = Y[k] / H[k].

    Returns (symbol estimates, null-bin mask).  Bins where |H[k]| falls
    below ZF_NULL_EPS are set to 0 and flagged rather than raising: the
    bit-error consequence of a spectral null is the quantity of interest,
    not an exception.
    """
    y = np.asarray(y_freq, dtype=complex)
    h = np.asarray(h_freq, dtype=complex)
    nulls = np.abs(h) < ZF_NULL_EPS
    out = np.zeros_like(y)
    ok = ~nulls
    out[ok] = y[ok] / h[ok]
    return out, nulls


def zp_detect(y_window, h, n):
    """Zero-padding receiver: channel-matrix inversion then forward DFT.

    ``y_window`` holds the n+L-1 received samples spanned by one
    zero-padded block (the guard ahead of the payload is already
    discarded, so sample 0 is where the payload support starts).  The
    first n samples obey the square lower-triangular sub-matrix of the
    tall convolution matrix, which is invertible whenever h[0] != 0; the
    detector solves that system with one back-substitution per block.
    When the leading tap is (numerically) zero the square system is
    singular and the full tall-matrix least-squares path over the whole
    window is used instead.  Either way the transmitted symbols are
    recovered exactly in the noiseless case, even when the channel
    frequency response has nulls.  Raises on a rank-deficient tall
    matrix (all taps zero).
    """
    y = np.asarray(y_window, dtype=complex)
    taps = np.asarray(h.taps, dtype=complex)
    expected = n + taps.size - 1
    if y.size != expected:
        raise ValueError(
            f"zp_detect: expected window of {expected} samples (n+L-1), got {y.size}"
        )
    taps_max = np.abs(taps).max()
    if taps_max > 0 and np.abs(taps[0]) >= RANK_TOL * taps_max:
        # square system: y[:n] = T x with T lower-triangular Toeplitz,
        # solved by the inverse filter 1/H(z)
        x_time = lfilter(np.ones(1), taps, y[:n])
    else:
        h_zp = zero_pad_channel_matrix(taps, n)
        x_time = pseudoinverse(h_zp) @ y
    return dft(x_time)
