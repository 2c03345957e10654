"""Anti-jamming OFDM link simulation library.

Spread-spectrum-style symbol spreading across subcarriers, joint
symbol/jamming maximum-likelihood detection, analytical BER bounds with
modulation-order optimization, a two-phase jamming-adaptive framework, and
a seeded Monte Carlo harness with QAM-OFDM and OFDM-IM baselines.
"""

from .adaptive import JammingEstimate, estimate_j_avg, estimate_sigma_z2_avg, run_adaptive
from .analysis import (
    BerBoundReport,
    ber_upper,
    ber_upper_avg,
    candidate_orders,
    optimize_order,
    pep_average,
    pep_conditional,
    q_approx,
)
from .baselines import OfdmImConfig, ofdmim_detect, ofdmim_modulate, qamofdm_detect, qamofdm_modulate
from .channel import (
    ChannelRealization,
    JammingPattern,
    JammingRealization,
    Role,
    apply_channel,
    draw_channel,
    draw_jamming,
    snr_sjr_to_variances,
    substream,
)
from .constellations import (
    Constellation,
    ConstellationKind,
    bits_to_symbols,
    build_constellation,
    build_default,
    hamming_distance,
    symbols_to_bits,
)
from .detectors import (
    DetectionResult,
    approx_mld,
    estimate_sigma_z2,
    full_mld,
    lowcomp_mld,
    sort_residuals,
)
from .errors import ConfigurationError, InputError
from .frame import SystemConfig, deinterleave, from_time_domain, interleave, to_time_domain
from .harness import BerCurvePoint, Scenario, analytic_ber, run_scenario, run_sweep, run_trial
from .spreading import SpreadingMatrix, build_base_unitary, build_spreading, modulate_block

__version__ = "0.1.0"
