"""Link-level OFDM simulation library.

Guard-interval schemes (cyclic prefix, zero padding, and the weighted
prefix whose copied samples carry a unit-modulus factor), per-realization
prefix-weight optimization, pilot-based LS channel estimation, and a
reproducible Monte Carlo bit-error-rate harness.
"""

__version__ = "0.1.0"

from .channel import (
    ChannelRealization,
    NoiseConfig,
    PowerDelayProfile,
    apply_channel,
    draw_realization,
    evolve_doppler,
    frequency_response,
    load_pdp,
    shifted_frequency_response,
    standard_profile,
)
from .detect import zf_detect, zp_detect
from .estimation import BlockPilots, CombPilots, ls_estimate_block, ls_estimate_comb
from .guard import CyclicPrefix, WeightedPrefix, ZeroPadding, add_prefix, strip_guard, weighted_circular_convolve
from .modem import OfdmConfig, QamConstellation, demap_symbols, map_bits, ofdm_demodulate, ofdm_modulate
from .optimize import (
    MaxMin,
    MinPe,
    SearchConfig,
    cm_budget,
    golden_section,
    maxmin_objective,
    optimize_psi,
    p_qam,
    pe_objective,
    q_function,
)
from .transforms import (
    circulant_matrix,
    dft,
    idft,
    pseudoinverse,
    psi_powers,
    weighted_circulant_matrix,
    zero_pad_channel_matrix,
)
from .harness import (
    BerCurve,
    BerPoint,
    Mobility,
    SimConfig,
    analytic_ber,
    preset,
    read_results,
    run_sweep,
    run_trial,
    write_results,
)
