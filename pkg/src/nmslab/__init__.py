"""Normal-mode splitting in an optomechanical cavity with an intracavity OPA
and a coherent-feedback loop: steady state, stability, normal modes, noise
spectra, a time-domain oracle and a CLI for sweeps and figures.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    InstabilityError,
    NMSLabError,
    NoOnsetError,
    NumericalError,
    ParameterError,
    ThresholdError,
)
from .params import DerivedParams, SystemParams, derive_constants, load_config, paper_parameters, validate
from .steadystate import OperatingPoint, SteadyState, operating_point, steady_state
from .dynamics import DriftMatrix, StabilityReport, drift_matrix, routh_hurwitz, stability
from .modes import ModeSet, d_polynomial, modes_for, nms_onset, normal_modes, sweep_modes
from .response import solve_response
from .spectra import SpectrumSeries, ThermalFactor, output_spectra, s_q, spectrum_series
from .feedback import FeedbackChain, feedback_check
from .timesim import SimConfig, noise_model, psd_estimate, simulate
from .plotting import emit_plot
