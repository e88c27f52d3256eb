"""Ordered lasso: l1-penalized regression with non-increasing coefficient
magnitudes, for time-lagged, autoregressive and logistic models.

The numerical kernels come from a compiled extension when it was built and
from a pure-Python implementation otherwise; see :mod:`ordlasso._backend`.
"""

__version__ = "0.1.0"

from ordlasso._backend import available_backends, backend_name, set_backend, use_backend
from ordlasso.autoregress import (ArFit, fit_ar_ols_aic, fit_ar_ordered, simulate_ar,
                                  simulate_table1)
from ordlasso.descent import DescentError
from ordlasso.glm import LogisticFit, fit_logistic_ordered, log_likelihood
from ordlasso.isotonic import (IsotonicFit, NearIsoConfig, WeightedSequence, near_iso,
                               pava_nonincreasing)
from ordlasso.modelsel import (CVResult, DfEstimate, LambdaPath, cross_validate,
                               df_monte_carlo, df_plateaus, lambda_max, lambda_path)
from ordlasso.prox import ProxRequest, prox_monotone_nonneg
from ordlasso.solver import (Dataset, FitConfig, OrderedLassoFit, SplitCoefficients,
                             center, fit_ordered_lasso, objective)
from ordlasso.timelag import (BlockFit, LagDesign, LagSpec, build_rolling_design,
                              effective_lags, fit_rolling, fit_static)

__all__ = [
    "ArFit", "BlockFit", "CVResult", "Dataset", "DescentError", "DfEstimate",
    "FitConfig", "IsotonicFit", "LagDesign", "LagSpec", "LambdaPath",
    "LogisticFit", "NearIsoConfig", "OrderedLassoFit", "ProxRequest",
    "SplitCoefficients", "WeightedSequence", "available_backends",
    "backend_name", "build_rolling_design", "center", "cross_validate",
    "df_monte_carlo", "df_plateaus", "effective_lags", "fit_ar_ols_aic",
    "fit_ar_ordered", "fit_logistic_ordered", "fit_ordered_lasso",
    "fit_rolling", "fit_static", "lambda_max", "lambda_path",
    "log_likelihood", "near_iso", "objective", "pava_nonincreasing",
    "prox_monotone_nonneg", "set_backend", "simulate_ar", "simulate_table1",
    "use_backend",
]
