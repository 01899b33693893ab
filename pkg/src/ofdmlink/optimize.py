"""Selection of the prefix weight: error-probability and max-min
objectives, golden-section search, and the complexity accounting.

Both objectives are evaluated as functions of the frequency shift alpha,
with psi = exp(1j*alpha); shifting by any multiple of 2*pi/N gives an
equivalent system, so the search space is one subcarrier spacing,
[0, 2*pi/N].
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .channel import shifted_frequency_response

__all__ = [
    "q_function",
    "p_qam",
    "pe_objective",
    "maxmin_objective",
    "MinPe",
    "MaxMin",
    "SearchConfig",
    "ConvergenceError",
    "GoldenResult",
    "golden_section",
    "PsiOptResult",
    "optimize_psi",
    "CmBudget",
    "cm_budget",
]

GOLDEN_RATIO_CONJUGATE = (math.sqrt(5.0) - 1.0) / 2.0


def q_function(x):
    """Gaussian tail probability Q(x) = 0.5 * erfc(x / sqrt(2))."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def p_qam(gamma_b, m):
    """AWGN bit-error probability of Gray-coded square M-QAM at per-bit
    SNR gamma_b (linear).

    Exact for M = 4 (independent I/Q QPSK); for larger square orders the
    standard Gray-mapping approximation is used and the result is clamped
    to [0, 1/2].
    """
    gamma_b = np.asarray(gamma_b, dtype=float)
    if np.any(gamma_b < 0):
        raise ValueError("p_qam: per-bit SNR must be nonnegative")
    if m == 4:
        pe = q_function(np.sqrt(2.0 * gamma_b))
    else:
        bits = math.log2(m)
        if m < 4 or bits != int(bits) or int(bits) % 2 != 0:
            raise ValueError(f"p_qam: unsupported constellation order {m}")
        arg = np.sqrt(3.0 * bits * gamma_b / (m - 1.0))
        pe = (4.0 / bits) * (1.0 - 1.0 / math.sqrt(m)) * q_function(arg)
    return np.clip(pe, 0.0, 0.5)


def pe_objective(alpha, h, cfg, ebno_linear):
    """Average bit-error probability over subcarriers for a shift alpha.

    Evaluates the analytic per-subcarrier error rate at effective per-bit
    SNR (N/(N+K)) * Eb/N0 * |H_psi[k]|^2 and averages over k.
    """
    psi = np.exp(1j * alpha)
    h_shift = shifted_frequency_response(h, cfg.n, psi)
    gamma = cfg.overhead_factor * ebno_linear * np.abs(h_shift) ** 2
    return float(np.mean(p_qam(gamma, cfg.constellation.order)))


def maxmin_objective(alpha, h, n):
    """Worst-subcarrier gain min_k |H_psi[k]| for a shift alpha.

    To be maximized; the search minimizes its negation.
    """
    psi = np.exp(1j * alpha)
    return float(np.min(np.abs(shifted_frequency_response(h, n, psi))))


@dataclass(frozen=True)
class MinPe:
    """Minimize the analytic bit-error probability at a fixed Eb/N0.

    The constellation order comes from the OfdmConfig the objective is
    evaluated against.
    """

    ebno_linear: float

    def __post_init__(self):
        if self.ebno_linear <= 0:
            raise ValueError("MinPe: Eb/N0 must be positive")


@dataclass(frozen=True)
class MaxMin:
    """Maximize the smallest subcarrier gain (modulation-independent)."""


@dataclass(frozen=True)
class SearchConfig:
    """Bracketing interval, result tolerance, and iteration cap."""

    a: float
    b: float
    tolerance: float = 1e-3
    max_iterations: int = 200

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("SearchConfig: need a < b")
        if self.tolerance <= 0:
            raise ValueError("SearchConfig: tolerance must be positive")


class ConvergenceError(RuntimeError):
    """Golden-section search exceeded its iteration cap.

    Carries the bracket reached so far in the ``bracket`` attribute.
    """

    def __init__(self, bracket, iterations):
        self.bracket = bracket
        self.iterations = iterations
        super().__init__(
            f"golden-section search did not converge in {iterations} iterations; "
            f"bracket [{bracket[0]:.6g}, {bracket[1]:.6g}]"
        )


@dataclass(frozen=True)
class GoldenResult:
    x: float
    iterations: int
    bracket: tuple


def golden_section(f, cfg):
    """Golden-section minimization of a unimodal function on [a, b].

    Two interior probes are kept at the golden-ratio-conjugate positions;
    each iteration discards one end of the bracket, reuses one probe
    value, and evaluates the function once.  The loop stops when the
    bracket half-width falls below the tolerance, so the returned
    midpoint is within ``tolerance`` of the bracketed minimizer.
    Unimodality is assumed, not verified.
    """
    a, b = float(cfg.a), float(cfg.b)
    ratio = GOLDEN_RATIO_CONJUGATE
    p = b - (b - a) * ratio
    q = a + (b - a) * ratio
    fp = f(p)
    fq = f(q)
    iterations = 0
    while (b - a) >= 2.0 * cfg.tolerance:
        if iterations >= cfg.max_iterations:
            raise ConvergenceError((a, b), iterations)
        if fp <= fq:
            b = q
            q = p
            fq = fp
            p = b - (b - a) * ratio
            fp = f(p)
        else:
            a = p
            p = q
            fp = fq
            q = a + (b - a) * ratio
            fq = f(q)
        iterations += 1
    return GoldenResult(x=(a + b) / 2.0, iterations=iterations, bracket=(a, b))


@dataclass(frozen=True)
class PsiOptResult:
    alpha_star: float
    psi_star: complex
    objective_value: float
    iterations: int


def _grid_check(f, search, result, points=256):
    """Debug guard for the unimodality assumption.

    Scans the search interval on a fixed grid and warns when the grid
    finds a strictly better point far (> 2 tolerances) from the search
    result, which indicates the objective was not unimodal and the
    bracketing descent got trapped.
    """
    grid = np.linspace(search.a, search.b, points)
    values = np.array([f(x) for x in grid])
    best = int(np.argmin(values))
    if (
        abs(grid[best] - result.x) > 2.0 * search.tolerance
        and values[best] < f(result.x) - 1e-12
    ):
        warnings.warn(
            f"objective not unimodal on [{search.a:.6g}, {search.b:.6g}]: "
            f"grid scan found {grid[best]:.6g} below the search result "
            f"{result.x:.6g}",
            stacklevel=3,
        )


def optimize_psi(h, cfg, objective, search=None, debug=False):
    """Select the prefix weight for one channel realization.

    Runs the golden-section search over one subcarrier spacing and
    returns the shift, the weight root psi = exp(1j*alpha), the objective
    value at the optimum, and the iteration count.  Any alpha plus an
    integer multiple of 2*pi/N is equivalent.  ``debug`` re-scans the
    interval on a 256-point grid and warns if the search appears to have
    missed the global minimum (the unimodality assumption failed).
    """
    if search is None:
        search = SearchConfig(a=0.0, b=2.0 * np.pi / cfg.n)
    if isinstance(objective, MinPe):
        def f(alpha):
            return pe_objective(alpha, h, cfg, objective.ebno_linear)
    elif isinstance(objective, MaxMin):
        def f(alpha):
            return -maxmin_objective(alpha, h, cfg.n)
    else:
        raise TypeError(f"unknown objective {objective!r}")
    result = golden_section(f, search)
    if debug:
        _grid_check(f, search, result)
    value = f(result.x)
    if isinstance(objective, MaxMin):
        value = -value
    return PsiOptResult(
        alpha_star=result.x,
        psi_star=complex(np.exp(1j * result.x)),
        objective_value=value,
        iterations=result.iterations,
    )


@dataclass(frozen=True)
class CmBudget:
    """Complex-multiplication counts for the weighted-prefix system."""

    tx_cm: int
    rx_fixed_cm: int
    per_iteration_cm: int
    total_cm: int


def cm_budget(cfg, l, z, objective):
    """Complex multiplications added by the weighted prefix.

    Transmitter: K for the prefix scaling plus N to form and N to apply
    the inverse weight ramp.  Receiver: N to form and N to apply the
    ramp.  Each search iteration costs the shifted-response update (L-1)
    plus an N-point DFT at N*log2(N); the error-probability objective
    additionally scales N subcarrier gains.  The DFT term is the radix-2
    upper bound, so N must be a power of two.
    """
    if z < 1:
        raise ValueError("cm_budget: need at least one iteration")
    n, k = cfg.n, cfg.k
    log2n = n.bit_length() - 1
    if 2**log2n != n:
        raise ValueError("cm_budget: complexity model assumes power-of-two N")
    tx = 2 * n + k
    rx = 2 * n
    per_iter = l - 1 + n * log2n
    if isinstance(objective, MinPe):
        per_iter += n
    elif not isinstance(objective, MaxMin):
        raise TypeError(f"unknown objective {objective!r}")
    return CmBudget(
        tx_cm=tx,
        rx_fixed_cm=rx,
        per_iteration_cm=per_iter,
        total_cm=tx + rx + z * per_iter,
    )
