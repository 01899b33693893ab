"""Monte Carlo bit-error-rate experiments and result serialization.

A trial is one channel draw: the configured number of data symbols runs
through map -> modulate -> prefix -> channel -> detect -> demap, with an
optional pilot-based estimation stage and an optional per-realization
prefix-weight optimization.  Sweeps accumulate trials per Eb/N0 grid
point until an error or trial budget is reached.  Every stochastic
quantity derives from the sweep seed, the grid-point index, and the
trial index, so results are reproducible bit for bit regardless of how
many worker threads execute the trials.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .channel import (
    ChannelRealization,
    NoiseConfig,
    PowerDelayProfile,
    apply_channel,
    draw_realization,
    evolve_doppler,
    shifted_frequency_response,
    standard_profile,
)
from .detect import zf_detect, zp_detect
from .estimation import CombPilots, ls_estimate_block, ls_estimate_comb, truncate_to_taps
from .guard import CyclicPrefix, WeightedPrefix, ZeroPadding, add_prefix, strip_guard
from .modem import OfdmConfig, QamConstellation, demap_symbols, map_bits, ofdm_demodulate, ofdm_modulate
from .optimize import MaxMin, MinPe, optimize_psi
from .transforms import psi_powers

__all__ = [
    "Mobility",
    "SimConfig",
    "TrialResult",
    "BerPoint",
    "BerCurve",
    "run_trial",
    "run_sweep",
    "analytic_ber",
    "write_results",
    "read_results",
    "preset",
    "PRESET_NAMES",
]

SAMPLE_PERIOD_S = 0.2e-6  # 5 MHz baseband grid
SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_CARRIER_HZ = 2.4e9  # implied by 44.44 Hz Doppler at 20 km/h

# Trials are dispatched in fixed-size chunks so that the set of trials
# actually accumulated is independent of the worker-thread count.
_CHUNK = 64


@dataclass(frozen=True)
class Mobility:
    """Terminal speed and the resulting Doppler spread."""

    speed_kmh: float
    doppler_hz: float = None
    carrier_hz: float = DEFAULT_CARRIER_HZ

    def __post_init__(self):
        if self.doppler_hz is None:
            fd = (self.speed_kmh / 3.6) * self.carrier_hz / SPEED_OF_LIGHT
            object.__setattr__(self, "doppler_hz", fd)


@dataclass(frozen=True)
class SimConfig:
    """Full description of one BER experiment.

    ``scheme`` is one of ``cyclic``, ``zero-pad``, ``optimized``, or
    ``weighted:<alpha>`` (fixed shift in radians).  Exactly one of
    ``taps`` (fixed channel) or ``pdp`` (random fading) must be given;
    ``pdp`` may be a profile name or a PowerDelayProfile.  ``estimation``
    is ``perfect``, ``block`` (one pilot symbol per trial), or ``comb``
    (pilot bins in every symbol).
    """

    n: int
    k: int
    order: int
    scheme: str
    ebno_grid_db: tuple
    taps: tuple = None
    pdp: object = None
    objective: str = "minpe"
    estimation: str = "perfect"
    pilot_spacing: int = 4
    symbols_per_trial: int = 6
    mobility: Mobility = None
    min_errors: int = 200
    max_trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if (self.taps is None) == (self.pdp is None):
            raise ValueError("SimConfig: give exactly one of taps or pdp")
        grid = tuple(float(e) for e in self.ebno_grid_db)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("SimConfig: Eb/N0 grid must be non-empty and increasing")
        object.__setattr__(self, "ebno_grid_db", grid)
        if self.taps is not None:
            object.__setattr__(self, "taps", tuple(complex(t) for t in self.taps))
        if self.min_errors < 1:
            raise ValueError("SimConfig: min_errors must be >= 1")
        if self.max_trials < 1:
            raise ValueError("SimConfig: max_trials must be >= 1")
        if self.symbols_per_trial < 1:
            raise ValueError("SimConfig: symbols_per_trial must be >= 1")
        if self.scheme not in ("cyclic", "zero-pad", "optimized") and not self.scheme.startswith(
            "weighted:"
        ):
            raise ValueError(f"SimConfig: unknown scheme {self.scheme!r}")
        if self.objective not in ("minpe", "maxmin"):
            raise ValueError(f"SimConfig: unknown objective {self.objective!r}")
        if self.estimation not in ("perfect", "block", "comb"):
            raise ValueError(f"SimConfig: unknown estimation {self.estimation!r}")
        if self.scheme == "zero-pad" and self.estimation == "comb":
            raise ValueError("SimConfig: comb estimation is not defined for zero padding")

    def ofdm(self):
        return OfdmConfig(self.n, self.k, QamConstellation.from_order(self.order))

    def resolve_pdp(self):
        if self.pdp is None:
            return None
        if isinstance(self.pdp, PowerDelayProfile):
            return self.pdp
        return standard_profile(self.pdp)

    def symbol_period_s(self):
        return (self.n + self.k) * SAMPLE_PERIOD_S

    def to_dict(self):
        d = {
            "n": self.n,
            "k": self.k,
            "order": self.order,
            "scheme": self.scheme,
            "ebno_grid_db": list(self.ebno_grid_db),
            "objective": self.objective,
            "estimation": self.estimation,
            "pilot_spacing": self.pilot_spacing,
            "symbols_per_trial": self.symbols_per_trial,
            "min_errors": self.min_errors,
            "max_trials": self.max_trials,
            "seed": self.seed,
        }
        if self.taps is not None:
            d["taps"] = [[t.real, t.imag] for t in self.taps]
        if self.pdp is not None:
            p = self.resolve_pdp()
            d["pdp"] = {
                "name": p.name,
                "tap_delays": list(p.tap_delays),
                "tap_powers": list(p.tap_powers),
            }
        if self.mobility is not None:
            d["mobility"] = {
                "speed_kmh": self.mobility.speed_kmh,
                "doppler_hz": self.mobility.doppler_hz,
                "carrier_hz": self.mobility.carrier_hz,
            }
        return d

    @classmethod
    def from_dict(cls, d):
        kwargs = dict(d)
        if "taps" in kwargs:
            kwargs["taps"] = tuple(complex(re, im) for re, im in kwargs["taps"])
        if "pdp" in kwargs and isinstance(kwargs["pdp"], dict):
            p = kwargs["pdp"]
            kwargs["pdp"] = PowerDelayProfile(
                p["name"], tuple(p["tap_delays"]), tuple(p["tap_powers"])
            )
        if kwargs.get("mobility") is not None:
            kwargs["mobility"] = Mobility(**kwargs["mobility"])
        kwargs["ebno_grid_db"] = tuple(kwargs["ebno_grid_db"])
        return cls(**kwargs)


@dataclass(frozen=True)
class TrialResult:
    bit_errors: int
    bits: int


@dataclass(frozen=True)
class BerPoint:
    """One Monte Carlo measurement.  ``upper_bound`` marks a point that
    exhausted its trial budget without observing a single error."""

    ebno_db: float
    ber: float
    bit_errors: int
    bits: int
    upper_bound: bool = False


@dataclass(frozen=True)
class BerCurve:
    points: tuple
    config: SimConfig
    version: str = field(default=__version__)


def _objective_for(cfg, ebno_db):
    if cfg.objective == "maxmin":
        return MaxMin()
    return MinPe(10.0 ** (ebno_db / 10.0))


def _resolve_scheme(cfg, ofdm, h_csi, ebno_db):
    """Prefix scheme and weight root for the current channel knowledge."""
    if cfg.scheme == "cyclic":
        return CyclicPrefix(), 1.0
    if cfg.scheme == "zero-pad":
        return ZeroPadding(), 1.0
    if cfg.scheme.startswith("weighted:"):
        alpha = float(cfg.scheme.split(":", 1)[1])
        psi = complex(np.exp(1j * alpha))
        return WeightedPrefix(psi), psi
    opt = optimize_psi(h_csi, ofdm, _objective_for(cfg, ebno_db))
    return WeightedPrefix(opt.psi_star), opt.psi_star


def _send_symbol(x_freq, cfg, scheme, psi, h, noise, rng_noise):
    """TX chain for one OFDM symbol; returns the raw channel output.

    Time samples are scaled to unit average energy before the channel so
    that the NoiseConfig density applies directly.
    """
    tx = ofdm_modulate(x_freq, psi) * np.sqrt(cfg.n)
    block = add_prefix(tx, cfg.k, scheme)
    return apply_channel(block, h, noise, rng_noise)


def _recv_zf(y, cfg, psi, h_div):
    win = strip_guard(y, cfg.n, cfg.k) / np.sqrt(cfg.n)
    y_freq = ofdm_demodulate(win, psi)
    x_hat, _ = zf_detect(y_freq, h_div)
    return x_hat, y_freq


def _recv_zp(y, cfg, taps):
    h = ChannelRealization(taps)
    win = y[: cfg.n + h.length - 1] / np.sqrt(cfg.n)
    return zp_detect(win, h, cfg.n)


def _trial_channel(cfg, rng_ch):
    if cfg.taps is not None:
        return ChannelRealization(np.asarray(cfg.taps, dtype=complex))
    return draw_realization(cfg.resolve_pdp(), rng_ch)


def _maybe_evolve(cfg, h, rng_ch):
    if cfg.mobility is None or cfg.pdp is None:
        return h
    return evolve_doppler(
        h, cfg.resolve_pdp(), cfg.mobility.doppler_hz, cfg.symbol_period_s(), rng_ch
    )


def run_trial(cfg, ebno_db, seed_seq):
    """One channel draw and its block of OFDM symbols; returns counts.

    Separate child streams drive the channel draw, the data bits, and the
    noise, so paired configurations (same seed, different scheme or
    estimation) see identical channels and payloads.
    """
    rng_ch, rng_bits, rng_noise = (np.random.default_rng(s) for s in seed_seq.spawn(3))
    ofdm = cfg.ofdm()
    const = ofdm.constellation
    b = const.bits_per_symbol
    noise = NoiseConfig(ebno_db, b, ofdm.overhead_factor)
    h = _trial_channel(cfg, rng_ch)

    if cfg.estimation == "comb":
        return _trial_comb(cfg, ofdm, h, noise, rng_ch, rng_bits, rng_noise, ebno_db)

    h_freq_raw = None
    if cfg.estimation == "block":
        # Pilot symbol rides a plain cyclic prefix; its estimate (and the
        # optimized weight) is frozen for the rest of the slot.
        pilots = np.ones(cfg.n, dtype=complex)
        y = _send_symbol(pilots, cfg, CyclicPrefix(), 1.0, h, noise, rng_noise)
        win = strip_guard(y, cfg.n, cfg.k) / np.sqrt(cfg.n)
        h_freq_raw = ls_estimate_block(ofdm_demodulate(win, 1.0), pilots)
        # weight optimization and the weighted/ZP receivers work in the
        # tap domain, so they see the guard-truncated estimate
        h_csi = ChannelRealization(truncate_to_taps(h_freq_raw, cfg.k + 1))
    else:
        h_csi = h

    scheme, psi = _resolve_scheme(cfg, ofdm, h_csi, ebno_db)
    zp = isinstance(scheme, ZeroPadding)
    if not zp:
        if cfg.estimation == "block" and isinstance(scheme, CyclicPrefix):
            # classic CP receiver divides by the raw per-bin LS estimate
            h_div = h_freq_raw
        else:
            h_div = shifted_frequency_response(h_csi, cfg.n, psi)

    errors = 0
    bits_total = 0
    for s in range(cfg.symbols_per_trial):
        if s > 0 and cfg.mobility is not None and cfg.pdp is not None:
            h = _maybe_evolve(cfg, h, rng_ch)
            if cfg.estimation == "perfect":
                # receiver tracks the true channel; re-optimize for it
                h_csi = h
                scheme, psi = _resolve_scheme(cfg, ofdm, h_csi, ebno_db)
                if not zp:
                    h_div = shifted_frequency_response(h_csi, cfg.n, psi)
            # block estimation stays frozen: staleness is the effect
        bits = rng_bits.integers(0, 2, cfg.n * b)
        x_freq = map_bits(bits, const)
        y = _send_symbol(x_freq, cfg, scheme, psi, h, noise, rng_noise)
        if zp:
            x_hat = _recv_zp(y, cfg, h_csi.taps)
        else:
            x_hat, _ = _recv_zf(y, cfg, psi, h_div)
        decided = demap_symbols(x_hat, const)
        errors += int(np.count_nonzero(decided != bits))
        bits_total += bits.size
    return TrialResult(errors, bits_total)


def _trial_comb(cfg, ofdm, h, noise, rng_ch, rng_bits, rng_noise, ebno_db):
    """Comb-type slot: estimate and re-optimize on every OFDM symbol.

    The comb pilots travel through the same weighted chain as the data,
    so the LS estimate is the equivalent (weighted) channel and feeds the
    zero-forcing divisor directly; de-rotating its taps recovers the raw
    channel for the next symbol's weight optimization.
    """
    const = ofdm.constellation
    b = const.bits_per_symbol
    plan = CombPilots(cfg.pilot_spacing)
    pilot_bins = plan.pilot_bins(cfg.n)
    data_bins = plan.data_bins(cfg.n)
    fixed_alpha = None
    if cfg.scheme.startswith("weighted:"):
        fixed_alpha = float(cfg.scheme.split(":", 1)[1])
    psi = complex(np.exp(1j * fixed_alpha)) if fixed_alpha is not None else 1.0

    errors = 0
    bits_total = 0
    for s in range(cfg.symbols_per_trial):
        if s > 0:
            h = _maybe_evolve(cfg, h, rng_ch)
        bits = rng_bits.integers(0, 2, data_bins.size * b)
        x_freq = np.empty(cfg.n, dtype=complex)
        x_freq[pilot_bins] = plan.pilot_value
        x_freq[data_bins] = map_bits(bits, const)
        scheme = CyclicPrefix() if psi == 1.0 else WeightedPrefix(psi)
        y = _send_symbol(x_freq, cfg, scheme, psi, h, noise, rng_noise)
        win = strip_guard(y, cfg.n, cfg.k) / np.sqrt(cfg.n)
        y_freq = ofdm_demodulate(win, psi)
        h_eq_est = ls_estimate_comb(y_freq, plan)
        x_hat, _ = zf_detect(y_freq, h_eq_est)
        decided = demap_symbols(x_hat[data_bins], const)
        errors += int(np.count_nonzero(decided != bits))
        bits_total += bits.size
        if cfg.scheme == "optimized":
            eq_taps = truncate_to_taps(h_eq_est, cfg.k + 1)
            raw_taps = eq_taps * psi_powers(np.conj(psi), eq_taps.size)
            opt = optimize_psi(
                ChannelRealization(raw_taps), ofdm, _objective_for(cfg, ebno_db)
            )
            psi = opt.psi_star
    return TrialResult(errors, bits_total)


def run_sweep(cfg, threads=1):
    """Run the Monte Carlo sweep over the Eb/N0 grid.

    Per grid point, trials accumulate in index order until min_errors bit
    errors have been seen or max_trials have run.  Trial i of point p is
    seeded from (seed, p, i), so the outcome is independent of execution
    order and thread count.
    """
    points = []
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for p_idx, ebno_db in enumerate(cfg.ebno_grid_db):
            errors = 0
            bits = 0
            trial_idx = 0
            while trial_idx < cfg.max_trials and errors < cfg.min_errors:
                todo = min(_CHUNK, cfg.max_trials - trial_idx)
                seeds = [
                    np.random.SeedSequence([cfg.seed, p_idx, trial_idx + i])
                    for i in range(todo)
                ]
                if pool is not None:
                    results = list(pool.map(lambda s: run_trial(cfg, ebno_db, s), seeds))
                else:
                    results = [run_trial(cfg, ebno_db, s) for s in seeds]
                for res in results:
                    errors += res.bit_errors
                    bits += res.bits
                    trial_idx += 1
                    if errors >= cfg.min_errors:
                        break
            points.append(
                BerPoint(
                    ebno_db=float(ebno_db),
                    ber=errors / bits,
                    bit_errors=errors,
                    bits=bits,
                    upper_bound=(errors == 0),
                )
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return BerCurve(points=tuple(points), config=cfg)


def analytic_ber(h, cfg, psi, ebno_db):
    """Closed-form average bit-error probability on a known channel.

    Evaluates the per-subcarrier AWGN error rate at the effective SNR
    (N/(N+K)) * Eb/N0 * |H_psi[k]|^2 and averages over the subcarriers;
    psi = 1 gives the cyclic-prefix system.
    """
    from .optimize import p_qam

    if abs(abs(psi) - 1.0) > 1e-9:
        raise ValueError("analytic_ber: |psi| must be 1")
    ebno = 10.0 ** (ebno_db / 10.0)
    h_shift = shifted_frequency_response(h, cfg.n, psi)
    gamma = cfg.overhead_factor * ebno * np.abs(h_shift) ** 2
    return float(np.mean(p_qam(gamma, cfg.constellation.order)))


def write_results(curve, path):
    """Write the BER table and its metadata sidecar.

    The table is tab-separated with columns ebno_db, ber, bit_errors,
    bits; the sidecar (<path>.meta.json) carries the full configuration,
    the artifact version, and per-point flags.  Output bytes are stable
    for identical inputs.
    """
    path = Path(path)
    lines = ["# ebno_db\tber\tbit_errors\tbits"]
    for p in curve.points:
        lines.append(f"{p.ebno_db:.6g}\t{p.ber:.10e}\t{p.bit_errors}\t{p.bits}")
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        meta = {
            "version": curve.version,
            "config": curve.config.to_dict(),
            "points": [
                {
                    "ebno_db": p.ebno_db,
                    "ber": p.ber,
                    "bit_errors": p.bit_errors,
                    "bits": p.bits,
                    "upper_bound": p.upper_bound,
                }
                for p in curve.points
            ],
        }
        sidecar = path.with_name(path.name + ".meta.json")
        sidecar.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"writing results to {path}: {exc}") from exc


def read_results(path):
    """Load a result pair written by :func:`write_results`."""
    path = Path(path)
    sidecar = path.with_name(path.name + ".meta.json")
    meta = json.loads(sidecar.read_text(encoding="utf-8"))
    points = tuple(
        BerPoint(
            ebno_db=p["ebno_db"],
            ber=p["ber"],
            bit_errors=p["bit_errors"],
            bits=p["bits"],
            upper_bound=p["upper_bound"],
        )
        for p in meta["points"]
    )
    return BerCurve(points=points, config=SimConfig.from_dict(meta["config"]), version=meta["version"])


_INV_SQRT2 = 1.0 / np.sqrt(2.0)

PRESET_NAMES = ("example1", "example2-tu", "example2-bu")


def preset(name):
    """Named experiment configurations for the desk-scale figures.

    ``example1``: N=64, K=16, 4-QAM on the fixed two-tap null channel.
    ``example2-tu`` / ``example2-bu``: N=512, K=64, QPSK over the
    COST-207 12-tap urban profiles, quasi-static slots of 6 data symbols.
    """
    if name == "example1":
        return SimConfig(
            n=64,
            k=16,
            order=4,
            scheme="optimized",
            taps=(_INV_SQRT2, _INV_SQRT2),
            ebno_grid_db=tuple(range(0, 45, 5)),
            objective="minpe",
            estimation="perfect",
            symbols_per_trial=1,
            min_errors=200,
            max_trials=8000,
            seed=1,
        )
    if name in ("example2-tu", "example2-bu"):
        return SimConfig(
            n=512,
            k=64,
            order=4,
            scheme="optimized",
            pdp="tu12" if name.endswith("tu") else "bu12",
            ebno_grid_db=tuple(range(0, 41, 4)),
            objective="minpe",
            estimation="perfect",
            symbols_per_trial=6,
            min_errors=200,
            max_trials=400,
            seed=1,
        )
    raise ValueError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
