"""Vine-copula forecasting for heterogeneous daily time series.

Fits per-series time-series marginals, binds their residuals with an
R-vine copula, and produces one-step-ahead point forecasts and
prediction intervals, with baseline comparison and evaluation.
"""

from .copulas import PairCopula, fit_pair
from .errors import NumericalError, StructureError, ValidationError
from .forecast import (
    ForecastConfig,
    ForecastPoint,
    ForecastTrack,
    fit_marginals,
    forecast_one_step,
    rolling_forecast,
)
from .marginals import (
    ArimaGarchTMarginal,
    ArimaMarginal,
    ArimaSpec,
    ZeroAdjustedGammaMarginal,
    ZeroAdjustedInverseGaussianMarginal,
)
from .metrics import EvaluationTable, dcor, mis, mse, nnse
from .sentiment import Lexicon, aggregate_daily, score_document
from .timeseries import TimeSeriesFrame, ingest
from .vine import RVineCopula, independence_vine

__all__ = [
    "ArimaGarchTMarginal",
    "ArimaMarginal",
    "ArimaSpec",
    "EvaluationTable",
    "ForecastConfig",
    "ForecastPoint",
    "ForecastTrack",
    "Lexicon",
    "NumericalError",
    "PairCopula",
    "RVineCopula",
    "StructureError",
    "TimeSeriesFrame",
    "ValidationError",
    "ZeroAdjustedGammaMarginal",
    "ZeroAdjustedInverseGaussianMarginal",
    "aggregate_daily",
    "dcor",
    "fit_marginals",
    "fit_pair",
    "forecast_one_step",
    "independence_vine",
    "ingest",
    "mis",
    "mse",
    "nnse",
    "rolling_forecast",
    "score_document",
]

__version__ = "0.1.0"
