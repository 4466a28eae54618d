"""Multitaper estimation of evolutionary spectra and stationarity testing."""

__version__ = "0.1.0"

from .backend import backend_name
from .estimator import (SpectralEstimate, TFGrid, build_grid, default_tapers,
                        estimate_at, estimate_grid)
from .simulate import GaussianBump, ModelSpec, TimeSeries, model_catalog, simulate
from .specialfn import chi2_quantile, digamma, trigamma
from .stattest import (LogSpectraTable, McSummary, PsrReport, RsReport,
                       log_table, mc_study, psr_test, rs_test)
from .tapers import (TaperSet, TaperSpec, compute_dpss, l1_concentration,
                     spectral_window, width_Bg)
from .tradeoff import TradeoffPoint, bump_width, mse18, mse19, optimal_K, penalized_K

__all__ = [
    "__version__",
    "backend_name",
    "SpectralEstimate", "TFGrid", "build_grid", "default_tapers",
    "estimate_at", "estimate_grid",
    "GaussianBump", "ModelSpec", "TimeSeries", "model_catalog", "simulate",
    "chi2_quantile", "digamma", "trigamma",
    "LogSpectraTable", "McSummary", "PsrReport", "RsReport",
    "log_table", "mc_study", "psr_test", "rs_test",
    "TaperSet", "TaperSpec", "compute_dpss", "l1_concentration",
    "spectral_window", "width_Bg",
    "TradeoffPoint", "bump_width", "mse18", "mse19", "optimal_K", "penalized_K",
]
