"""Log-log exponent fits"""
from typing import NamedTuple, Sequence

import numpy as np
from scipy.stats import linregress


class LogLogFit(NamedTuple):
    slope: float
    intercept: float
    residual: float


def fit_loglog(x: Sequence[float], y: Sequence[float]) -> LogLogFit:
    """Least-squares line through (log x, log y); residual is the sum of squared residuals"""
    log_x = np.log(np.asarray(x, dtype=np.float64))
    log_y = np.log(np.asarray(y, dtype=np.float64))
    if log_x.size < 2:
        raise ValueError("Need at least two points to fit a slope")
    fit = linregress(log_x, log_y)
    residual = float(np.sum((log_y - (fit.intercept + fit.slope * log_x)) ** 2))
    return LogLogFit(float(fit.slope), float(fit.intercept), residual)
