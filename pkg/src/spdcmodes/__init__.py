"""Laguerre-Gauss spatial-mode decomposition of collinear bulk-crystal SPDC.

Computes frequency-resolved overlaps of the down-converted field with
radial LG modes and derives relative brightness, heralding efficiency and
spectral purity.
"""
__version__ = "0.1.0"

from .lg_modes import LGModeSpec, lg_amplitude, t_coefficient, t_coefficients  # noqa: E402
from .phase_match import (DispersionModel, MatchingType, MatchingTypeError,  # noqa: E402
                          PolingProfile, delta_k_cw, delta_k_general, delta_k_sgvm,
                          longitudinal_amplitude, sinc)
from .overlap import (ModeAmplitudeTable, SourceConfig, build_table,  # noqa: E402
                      normalized_overlap, spectral_amplitude)
from .metrics import (EfficiencyReport, FilterWindow, heralding, pair_collection,  # noqa: E402
                      relative_brightness, singles)
from .purity import (JSAGrid, PumpSpectrum, PurityResult, build_jsa,  # noqa: E402
                     optimize_pump_bandwidth, schmidt_purity)
from .sweep import (SweepResult, TradeoffFit, fit_tradeoff, grid_sweep,  # noqa: E402
                    length_scaling, peak_density_optimum, strategy_fixed_collection,
                    strategy_fixed_pump, strategy_max_H_at_B)
from .materials import (MATERIALS, dispersion_from_material, get_material,  # noqa: E402
                        ktp_source, refractive_index, to_dimensionless)
