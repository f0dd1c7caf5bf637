"""Unmixing instantaneous mixtures of multivariate time series by
innovations orthogonalization, with the signal-orthogonalization
("leakage correction") comparator and the synthetic experiments that
contrast them.
"""

from .connectivity import (
    SpectralConnectivity,
    coherence_squared,
    envelope_correlation,
    hilbert_envelope,
    icoh,
    lag_zero_correlation,
)
from .core import (
    ConfigError,
    ConvergenceWarning,
    EpochedSeries,
    MatrixParseError,
    NumericalError,
    RankDeficientError,
    SeedSpec,
    SingularMatrixError,
    UnmixioError,
    read_matrix,
    write_matrix,
)
from .generators import (
    AmpModSpec,
    Ar5Spec,
    OscillatorSpec,
    apply_mixing,
    gen_ampmod,
    gen_oscillators,
    gen_var5,
    uniform_mixing,
)
from .procrustes import OrthogonalFactorization, orthogonal_procrustes, procrustes_objective
from .unmixing import (
    UnmixResult,
    estimate_mixing,
    innovations_orthogonalize,
    leakage_correct,
    unmix,
)
from .var_model import VarModel, fit_var, innovation_covariance, select_order_aic, var_transfer

__version__ = "0.1.0"
