"""Acceptance gate: one test per acceptance criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Criterion 9's 3 dB clause is implemented exactly as stated and is
expected to fail: a semi-analytic computation (averaging the closed-form
subcarrier BER over fading draws, i.e. the best any weight-selection rule
can do) caps the BU-channel gain at BER 1e-3 near 0.8 dB.  The gain does
exceed 3 dB at BER 1e-4 and approaches 9 dB toward BER 1e-5, which the
supplementary trend test below criterion 9 demonstrates.  See the
failure message for details.
"""

import time

import numpy as np
import pytest
from scipy.linalg import dft as dft_matrix

from ofdmlink.channel import ChannelRealization
from ofdmlink.detect import zp_detect
from ofdmlink.guard import WeightedPrefix, add_prefix, strip_guard, weighted_circular_convolve
from ofdmlink.harness import SimConfig, analytic_ber, run_sweep, write_results
from ofdmlink.modem import OfdmConfig, QamConstellation
from ofdmlink.optimize import MaxMin, MinPe, cm_budget, optimize_psi
from ofdmlink.transforms import dft, idft, psi_powers, weighted_circulant_matrix

INV_SQRT2 = 2**-0.5
TWO_TAP = ChannelRealization(np.array([INV_SQRT2, INV_SQRT2]))
CFG64 = OfdmConfig(64, 16, QamConstellation.from_order(4))


def _report(cid, ok, detail):
    print(f"ACCEPTANCE {cid}: {'PASS' if ok else 'FAIL'} — {detail}")


def ebno_at(curve, target):
    """Eb/N0 where the measured curve crosses the target BER
    (log-linear interpolation between bracketing grid points)."""
    pts = [(p.ebno_db, p.ber) for p in curve.points if p.ber > 0]
    for (e1, b1), (e2, b2) in zip(pts, pts[1:]):
        if b1 >= target >= b2:
            frac = (np.log10(target) - np.log10(b1)) / (np.log10(b2) - np.log10(b1))
            return e1 + frac * (e2 - e1)
    raise AssertionError(f"curve does not cross BER {target:g}")


def test_c01_diagonalization_suite():
    """1,000 random (h, N, psi) cases: the ramp similarity plus DFT
    diagonalizes the weighted-circulant channel matrix."""
    rng = np.random.default_rng(2024)
    start = time.monotonic()
    dft_mats = {n: dft_matrix(n) for n in (4, 8, 16, 64)}
    worst_off = 0.0
    worst_diag = 0.0
    for _ in range(1000):
        n = int(rng.choice([4, 8, 16, 64]))
        L = int(rng.integers(1, n + 1))
        h = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        psi = np.exp(1j * rng.uniform(0, 2 * np.pi))
        m = weighted_circulant_matrix(h, n, psi**n)
        d = psi_powers(psi, n)
        f = dft_mats[n]
        out = f @ (d[:, None] * m * (1.0 / d)[None, :]) @ f.conj().T / n
        hp = np.zeros(n, dtype=complex)
        hp[:L] = h * d[:L]
        expected = dft(hp)
        diag = np.diag(out).copy()
        np.fill_diagonal(out, 0.0)
        worst_off = max(worst_off, np.abs(out).max() / np.linalg.norm(h))
        worst_diag = max(worst_diag, np.abs(diag / expected - 1.0).max())
    elapsed = time.monotonic() - start
    ok = worst_off < 1e-9 and worst_diag < 1e-9 and elapsed < 10.0
    _report(
        1, ok,
        f"diagonalization: off-diag {worst_off:.2e}, diag rel {worst_diag:.2e}, "
        f"{elapsed:.1f}s (< 10 s)",
    )
    assert worst_off < 1e-9
    assert worst_diag < 1e-9
    assert elapsed < 10.0


def test_c02_convolution_oracle():
    """1,000 random cases: weighted circular convolution == matrix product
    == prefix/linear-convolution/strip pipeline, < 1e-12 relative."""
    rng = np.random.default_rng(2025)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.choice([8, 16, 64]))
        k = int(rng.integers(2, n))
        L = int(rng.integers(1, k + 2))
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        h = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        psi = np.exp(1j * rng.uniform(0, 2 * np.pi))
        direct = weighted_circular_convolve(x, h, psi**n)
        scale = np.abs(direct).max()
        via_matrix = weighted_circulant_matrix(h, n, psi**n) @ x
        pipeline = strip_guard(
            np.convolve(add_prefix(x, k, WeightedPrefix(psi)), h), n, k
        )
        worst = max(
            worst,
            np.abs(direct - via_matrix).max() / scale,
            np.abs(direct - pipeline).max() / scale,
        )
    ok = worst < 1e-12
    _report(2, ok, f"convolution agreement worst rel {worst:.2e} (< 1e-12)")
    assert ok


def test_c03_example1_error_floor():
    """CP-OFDM, N=64, K=16, 4-QAM, two-tap null channel, 35 dB, >= 1e6
    bits: BER lands on the 1/(2N) floor."""
    start = time.monotonic()
    cfg = SimConfig(
        n=64, k=16, order=4, scheme="cyclic", taps=(INV_SQRT2, INV_SQRT2),
        ebno_grid_db=(35.0,), symbols_per_trial=1,
        min_errors=10**9, max_trials=7813, seed=101,
    )
    point = run_sweep(cfg).points[0]
    elapsed = time.monotonic() - start
    ok = point.bits >= 10**6 and 0.006 <= point.ber <= 0.010 and elapsed < 120.0
    _report(
        3, ok,
        f"error floor: ber {point.ber:.5f} in [0.006, 0.010] vs 1/128 = 0.0078125, "
        f"{point.bits} bits, {elapsed:.0f}s (< 120 s)",
    )
    assert point.bits >= 10**6
    assert 0.006 <= point.ber <= 0.010
    assert elapsed < 120.0


def test_c04_optimal_shift_both_objectives():
    """Both objectives locate the half-subcarrier shift pi/64 within 2*eps
    in under 10 golden-section iterations."""
    results = {
        "minpe": optimize_psi(TWO_TAP, CFG64, MinPe(10**3.5)),
        "maxmin": optimize_psi(TWO_TAP, CFG64, MaxMin()),
    }
    target = np.pi / 64
    ok = all(
        abs(r.alpha_star - target) < 2e-3 and r.iterations < 10
        for r in results.values()
    )
    detail = ", ".join(
        f"{name}: alpha* {r.alpha_star:.6f} ({r.iterations} iters)"
        for name, r in results.items()
    )
    _report(4, ok, f"{detail}; target pi/64 = {target:.6f} +- 2e-3")
    for r in results.values():
        assert abs(r.alpha_star - target) < 2e-3
        assert r.iterations < 10


def test_c05_optimized_vs_zero_padding():
    """Example 1 at BER 1e-4: the optimized weight reaches the target at
    least 3 dB earlier than zero padding (paper reports about 5 dB)."""
    start = time.monotonic()
    grid = (32.0, 34.0, 36.0, 38.0, 40.0, 42.0)
    curves = {}
    for scheme in ("optimized", "zero-pad"):
        cfg = SimConfig(
            n=64, k=16, order=4, scheme=scheme, taps=(INV_SQRT2, INV_SQRT2),
            ebno_grid_db=grid, symbols_per_trial=1,
            min_errors=10**9, max_trials=7813, seed=102,
        )
        curves[scheme] = run_sweep(cfg)
    opt = ebno_at(curves["optimized"], 1e-4)
    zp = ebno_at(curves["zero-pad"], 1e-4)
    elapsed = time.monotonic() - start
    gain = zp - opt
    ok = gain >= 3.0 and elapsed < 600.0
    _report(
        5, ok,
        f"BER 1e-4 at {opt:.2f} dB (optimized) vs {zp:.2f} dB (zero padding): "
        f"gain {gain:.2f} dB (>= 3), {elapsed:.0f}s (< 600 s)",
    )
    assert all(p.bits >= 10**6 for c in curves.values() for p in c.points)
    assert gain >= 3.0
    assert elapsed < 600.0


def test_c06_analytic_matches_monte_carlo():
    """Closed-form subcarrier averaging agrees with the simulated chain
    within 3 binomial standard deviations on the fixed two-tap channel."""
    details = []
    ok = True
    for ebno_db in (10.0, 20.0, 25.0):
        cfg = SimConfig(
            n=64, k=16, order=4, scheme="cyclic", taps=(INV_SQRT2, INV_SQRT2),
            ebno_grid_db=(ebno_db,), symbols_per_trial=1,
            min_errors=10**9, max_trials=7813, seed=103,
        )
        point = run_sweep(cfg).points[0]
        predicted = analytic_ber(TWO_TAP, CFG64, 1.0, ebno_db)
        sigma = np.sqrt(predicted * (1 - predicted) / point.bits)
        dev = abs(point.ber - predicted) / sigma
        details.append(f"{ebno_db:.0f} dB: {dev:.2f} sigma")
        ok = ok and dev < 3.0
    _report(6, ok, "analytic vs Monte Carlo deviations: " + ", ".join(details))
    assert ok


def test_c07_zero_padding_noiseless_exactness():
    """The zero-padding receiver recovers the symbols exactly on the null
    channel for every block size up to 64."""
    rng = np.random.default_rng(2026)
    worst = 0.0
    for n in (4, 8, 16, 32, 64):
        x_freq = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        block = np.concatenate([idft(x_freq), np.zeros(max(4, n // 4), dtype=complex)])
        y = np.convolve(block, TWO_TAP.taps)
        x_hat = zp_detect(y[: n + 1], TWO_TAP, n)
        worst = max(worst, np.abs(x_hat - x_freq).max())
    ok = worst < 1e-9
    _report(7, ok, f"null-channel recovery worst error {worst:.2e} (< 1e-9)")
    assert ok


def test_c08_complexity_accounting():
    """Complex-multiplication counts for N=512, K=64, L=12 match the
    reference arithmetic exactly."""
    cfg = OfdmConfig(512, 64, QamConstellation.from_order(4))
    minpe = cm_budget(cfg, l=12, z=10, objective=MinPe(1.0))
    maxmin = cm_budget(cfg, l=12, z=10, objective=MaxMin())
    ok = (
        minpe.tx_cm == 1088
        and minpe.rx_fixed_cm == 1024
        and minpe.per_iteration_cm == 5131
        and minpe.total_cm == 1088 + 1024 + 10 * 5131
        and maxmin.per_iteration_cm == 5131 - 512
    )
    _report(
        8, ok,
        f"tx {minpe.tx_cm} (=1088), per-iteration {minpe.per_iteration_cm} (=5131), "
        f"maxmin per-iteration {maxmin.per_iteration_cm} (=4619)",
    )
    assert ok


# --- criterion 9/10 share six COST-207 sweeps (paired seeds) -------------

COST207_GRID = tuple(float(e) for e in range(16, 33, 2))
COST207_TRIALS = 163  # 163 * 6 symbols * 1024 bits > 1e6 bits/point


@pytest.fixture(scope="module")
def cost207_curves():
    start = time.monotonic()
    curves = {}
    for pdp, scheme, estimation in (
        ("bu12", "cyclic", "perfect"),
        ("bu12", "optimized", "perfect"),
        ("tu12", "cyclic", "perfect"),
        ("tu12", "optimized", "perfect"),
        ("bu12", "cyclic", "block"),
        ("bu12", "optimized", "block"),
    ):
        cfg = SimConfig(
            n=512, k=64, order=4, scheme=scheme, pdp=pdp,
            ebno_grid_db=COST207_GRID, objective="minpe", estimation=estimation,
            symbols_per_trial=6, min_errors=10**9, max_trials=COST207_TRIALS,
            seed=111,
        )
        curves[(pdp, scheme, estimation)] = run_sweep(cfg)
    curves["elapsed"] = time.monotonic() - start
    return curves


def test_c09a_cost207_gain_at_1e3(cost207_curves):
    """Verbatim criterion: >= 3 dB optimized-vs-CP gain on the bad-urban
    channel at BER 1e-3.  Expected to fail: the per-realization optimum
    (genie bound, computed semi-analytically from the closed-form
    subcarrier BER over 4000 fading draws) yields only about 0.8 dB at
    this BER; the >= 3 dB separation emerges at BER 1e-4 and grows to the
    reported 7-9 dB toward 1e-5.  See notes in the repository README and
    the supplementary trend test."""
    cp = ebno_at(cost207_curves[("bu12", "cyclic", "perfect")], 1e-3)
    opt = ebno_at(cost207_curves[("bu12", "optimized", "perfect")], 1e-3)
    gain = cp - opt
    elapsed = cost207_curves["elapsed"]
    ok = gain >= 3.0 and elapsed < 1800.0
    _report(
        "9a", ok,
        f"BU gain at BER 1e-3: {gain:.2f} dB (criterion: >= 3 dB; "
        f"semi-analytic genie bound at this BER is ~0.8 dB), {elapsed:.0f}s",
    )
    assert elapsed < 1800.0
    assert gain >= 3.0, (
        f"measured BU gain at BER 1e-3 is {gain:.2f} dB, below the required 3 dB. "
        "This is not a simulator shortfall: averaging the closed-form per-subcarrier "
        "error rate over fading draws with the per-realization optimal shift (the "
        "best any weight-selection rule can achieve) gives a 0.76 dB gain at BER "
        "1e-3, 3.8 dB at 1e-4, and ~9 dB toward 1e-5, matching the separations the "
        "original study reports at 1e-5. The 3 dB threshold is unreachable at the "
        "1e-3 operating point; see the decisions ledger and the supplementary "
        "trend test (test_c09_supplementary_gain_at_1e4)."
    )


def test_c09b_bad_urban_gain_exceeds_typical_urban(cost207_curves):
    """Second clause of criterion 9: the longer-delay-spread bad-urban
    profile benefits more from the weight optimization than typical urban."""
    gain_bu = ebno_at(cost207_curves[("bu12", "cyclic", "perfect")], 1e-3) - ebno_at(
        cost207_curves[("bu12", "optimized", "perfect")], 1e-3
    )
    gain_tu = ebno_at(cost207_curves[("tu12", "cyclic", "perfect")], 1e-3) - ebno_at(
        cost207_curves[("tu12", "optimized", "perfect")], 1e-3
    )
    ok = gain_bu > gain_tu
    _report(
        "9b", ok,
        f"gain at BER 1e-3: BU {gain_bu:.2f} dB > TU {gain_tu:.2f} dB",
    )
    assert ok


def test_c09_supplementary_gain_at_1e4():
    """Supplementary trend check (not a criterion): at BER 1e-4 the
    optimized system does clear 3 dB over CP-OFDM on the bad-urban
    channel.  Fresh sweeps at a deeper operating point."""
    grid = tuple(float(e) for e in range(24, 39, 2))
    curves = {}
    for scheme in ("cyclic", "optimized"):
        cfg = SimConfig(
            n=512, k=64, order=4, scheme=scheme, pdp="bu12",
            ebno_grid_db=grid, objective="minpe", estimation="perfect",
            symbols_per_trial=6, min_errors=10**9, max_trials=1700, seed=112,
        )
        curves[scheme] = run_sweep(cfg)
    gain = ebno_at(curves["cyclic"], 1e-4) - ebno_at(curves["optimized"], 1e-4)
    _report("9-supplementary", gain >= 3.0, f"BU gain at BER 1e-4: {gain:.2f} dB (>= 3)")
    assert gain >= 3.0


def test_c10_estimation_robustness_ordering(cost207_curves):
    """Block-LS estimation costs CP-OFDM more than it costs the optimized
    system (ordering only, measured at BER 1e-3 on bad urban)."""
    cp_pen = ebno_at(cost207_curves[("bu12", "cyclic", "block")], 1e-3) - ebno_at(
        cost207_curves[("bu12", "cyclic", "perfect")], 1e-3
    )
    opt_pen = ebno_at(cost207_curves[("bu12", "optimized", "block")], 1e-3) - ebno_at(
        cost207_curves[("bu12", "optimized", "perfect")], 1e-3
    )
    ok = cp_pen > opt_pen
    _report(
        10, ok,
        f"estimation penalty: CP {cp_pen:.2f} dB > optimized {opt_pen:.2f} dB",
    )
    assert ok


def test_c11_determinism(tmp_path):
    """Identical seed and config produce byte-identical result files
    across repeated runs and across worker-thread counts."""
    cfg = SimConfig(
        n=64, k=16, order=4, scheme="optimized", taps=(INV_SQRT2, INV_SQRT2),
        ebno_grid_db=(10.0, 20.0, 30.0), symbols_per_trial=1,
        min_errors=500, max_trials=400, seed=104,
    )
    payloads = []
    for run, threads in enumerate((1, 1, 4)):
        out = tmp_path / f"run{run}.tsv"
        write_results(run_sweep(cfg, threads=threads), out)
        payloads.append(out.read_bytes() + (tmp_path / f"run{run}.tsv.meta.json").read_bytes())
    ok = payloads[0] == payloads[1] == payloads[2]
    _report(11, ok, "byte-identical results across repeated runs and thread counts")
    assert ok
