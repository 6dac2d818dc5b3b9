"""Memory-kernel optomechanical mean-value dynamics and chaos diagnostics.

Subpackages
-----------
dynamics
    Parameters, states, the exponential memory kernel, the coupled TDC +
    mean-value ODE system, and its adaptive integrator.
kernel_oracle
    Independent two-time kernel-field reconstruction of the TDCs, used to
    validate the closed ODE system.
lyapunov
    Wolf (delay reconstruction) and Benettin (two-trajectory) maximum
    Lyapunov exponent estimators.
experiments
    Preset environment/coupling parameter sweeps with long-format output.
config / csvio / cli
    TOML run configuration, CSV formats, command-line entry point.
"""

__version__ = "0.1.0"

from .dynamics import (EnvParams, FullState, ModelToggles, ObservableState,
                       SystemParams, TdcState, Trajectory, integrate,
                       mean_matrix, ou_correlation, spectral_density, tdc_rhs,
                       coupled_rhs)
from .errors import (ConfigError, DegenerateCloud, EmptyWindow, GridMismatch,
                     GridTooCoarse, NmchaosError, NonFiniteState,
                     NumericalError, ParseError, SeriesTooShort,
                     StepSizeUnderflow, UnknownKeyError, ValidationError)
from .kernel_oracle import compare_tdc, evolve_kernel_field
from .lyapunov import (EmbeddingConfig, LyapunovSeries, benettin_max_le,
                       delay_embed, windowed_mean_le, wolf_max_le)

__all__ = [
    "__version__",
    "SystemParams", "EnvParams", "ModelToggles", "TdcState",
    "ObservableState", "FullState", "Trajectory",
    "ou_correlation", "spectral_density", "tdc_rhs", "mean_matrix",
    "coupled_rhs", "integrate",
    "evolve_kernel_field", "compare_tdc",
    "EmbeddingConfig", "LyapunovSeries", "delay_embed", "wolf_max_le",
    "benettin_max_le", "windowed_mean_le",
    "NmchaosError", "ConfigError", "ParseError", "ValidationError",
    "UnknownKeyError", "NumericalError", "StepSizeUnderflow",
    "NonFiniteState", "GridTooCoarse", "GridMismatch", "SeriesTooShort",
    "DegenerateCloud", "EmptyWindow",
]
