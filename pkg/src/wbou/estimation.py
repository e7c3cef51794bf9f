"""Empirical second-order pipeline: ACF, rate fitting, realized volatility.

The empirical autocorrelation uses the n-normalized, mean-subtracted
estimator

    rho_hat(h) = sum_{i=1}^{n-h} (x_i - xbar)(x_{i+h} - xbar)
                 / sum_{i=1}^{n} (x_i - xbar)^2,

whose values are bounded by 1 in magnitude (Cauchy-Schwarz with the
full-sample denominator).  The rate lam is fitted separately under the
two competing correlation models

    rho(h) = (1 + lam h) e^{-lam h}     (two-sided kernel)
    rho(h) = e^{-lam h}                 (classical OU)

by least squares over a lag window, with a coarse log-grid scan
followed by golden-section refinement; the residual sums of squares of
the two models are then compared to select between them.  Lags are in
index units — mapping to calendar time is the caller's business.

Realized volatility and the volatility signature plot (realized
volatility recomputed on every k-th observation) complete the pipeline.
CSV readers/writers for series, ACF tables, and signature tables live
here because this module owns those formats.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .analytics import SecondOrderParams, acf_ou, acf_x
from .errors import (
    DegenerateSeries,
    DomainError,
    EmptyRange,
    LagTooLarge,
    SkipTooLarge,
)

__all__ = [
    "Series",
    "AcfEstimate",
    "FitResult",
    "empirical_acf",
    "fit_acf",
    "model_curve",
    "realized_volatility",
    "signature_plot",
    "read_series_csv",
    "write_acf_csv",
    "read_acf_csv",
    "write_signature_csv",
]

LAMBDA_BOUNDS = (1e-6, 1e2)
_GRID_POINTS = 200
_GOLDEN_TOL = 1e-12


@dataclass(frozen=True)
class Series:
    """A finite real-valued series of levels, length at least 2."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or len(vals) < 2:
            raise DomainError("series must be 1-D with at least 2 entries")
        if not np.all(np.isfinite(vals)):
            raise DomainError("series contains non-finite entries")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


def _values(series) -> np.ndarray:
    if isinstance(series, Series):
        return series.values
    return Series(np.asarray(series)).values


@dataclass(frozen=True)
class AcfEstimate:
    """Empirical autocorrelations rho[h] for h = 0..max_lag, sample size n."""

    lags: np.ndarray
    rho: np.ndarray
    n: int


@dataclass(frozen=True)
class FitResult:
    """A fitted rate for one correlation model over a lag window.

    at_boundary flags a minimizer that ran into the search bounds,
    meaning the reported lambda_hat is a constrained optimum.
    """

    model: str
    lambda_hat: float
    rss: float
    lag_range: tuple[int, int]
    at_boundary: bool


def empirical_acf(series, max_lag: int) -> AcfEstimate:
    """n-normalized mean-subtracted autocorrelation up to max_lag."""
    x = _values(series)
    n = len(x)
    if not 0 <= max_lag < n:
        raise LagTooLarge(f"max_lag must be in [0, {n - 1}], got {max_lag}")
    d = x - x.mean()
    scale = max(1.0, float(np.abs(x).max()))
    denom_floor = n * (8.0 * np.finfo(float).eps * scale) ** 2
    # one FFT correlation gives every lag at once; entry h is
    # sum_i d_i d_{i+h}, entry 0 the full-sample denominator
    corr = fftconvolve(d, d[::-1])[n - 1 : n + max_lag]
    if corr[0] <= denom_floor:
        raise DegenerateSeries("series has (numerically) zero variance")
    return AcfEstimate(lags=np.arange(max_lag + 1), rho=corr / corr[0], n=n)


def model_curve(model: str, lam: float, lags) -> np.ndarray:
    """Theoretical correlation curve of the given model at the lags."""
    p = SecondOrderParams(lam)
    lags = np.asarray(lags, dtype=float)
    if model == "wbou":
        return acf_x(p, lags)
    if model == "ou":
        return acf_ou(p, lags)
    raise DomainError(f"unknown model {model!r}; expected 'wbou' or 'ou'")


def _golden(f, a: float, b: float, tol: float) -> float:
    """Golden-section minimization on [a, b] to absolute tolerance tol."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def fit_acf(acf: AcfEstimate, model: str, lag_range: tuple[int, int]) -> FitResult:
    """Least-squares rate fit over the lag window [min_lag, max_lag].

    lambda is searched on [1e-6, 1e2]: a 200-point log-spaced scan picks
    the best cell (smallest lambda on ties), then golden-section narrows
    it down; a minimizer stuck at a search bound is flagged.
    """
    min_lag, max_lag = int(lag_range[0]), int(lag_range[1])
    if min_lag < 1:
        raise EmptyRange("min_lag must be >= 1")
    avail = int(acf.lags[-1])
    if max_lag > avail or min_lag > max_lag:
        raise EmptyRange(
            f"lag window [{min_lag}, {max_lag}] not within available lags "
            f"[0, {avail}]"
        )
    lags = np.arange(min_lag, max_lag + 1, dtype=float)
    rho_hat = acf.rho[min_lag : max_lag + 1]

    def rss(lam: float) -> float:
        return float(np.sum((rho_hat - model_curve(model, lam, lags)) ** 2))

    lo, hi = LAMBDA_BOUNDS
    grid = np.logspace(math.log10(lo), math.log10(hi), _GRID_POINTS)
    vals = [rss(lam) for lam in grid]
    i = int(np.argmin(vals))  # argmin takes the first (smallest) on ties
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, _GRID_POINTS - 1)]
    lam_hat = _golden(rss, a, b, _GOLDEN_TOL)
    # golden returns the midpoint of its final interval, which can sit up
    # to tol/2 inside the bound; flag anything within a few tolerances
    margin = 10.0 * _GOLDEN_TOL
    at_boundary = lam_hat <= lo + margin or lam_hat >= hi - margin
    return FitResult(
        model=model,
        lambda_hat=float(lam_hat),
        rss=rss(lam_hat),
        lag_range=(min_lag, max_lag),
        at_boundary=bool(at_boundary),
    )


def realized_volatility(series) -> float:
    """Sum of squared consecutive differences of the series."""
    x = _values(series)
    return float(np.sum(np.diff(x) ** 2))


def signature_plot(series, max_skip: int) -> np.ndarray:
    """Realized volatility of every k-th observation, k = 1..max_skip.

    Subsampling always starts at offset 0.  Returns an (max_skip, 2)
    array of rows (k, RV_k).
    """
    x = _values(series)
    if not 1 <= max_skip < len(x) / 2:
        raise SkipTooLarge(
            f"max_skip must be in [1, {math.ceil(len(x) / 2) - 1}], got {max_skip}"
        )
    out = np.empty((max_skip, 2))
    for k in range(1, max_skip + 1):
        out[k - 1] = (k, realized_volatility(x[::k]))
    return out


# ---------------------------------------------------------------------------
# CSV formats owned by this module


def read_series_csv(path) -> np.ndarray:
    """Read a level series: single column `x`, or `t,x` with t checked
    to be strictly increasing (and otherwise ignored)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    if "x" not in header:
        raise DomainError(f"{path}: expected a column named 'x'")
    xi = header.index("x")
    body = [r for r in rows[1:] if r]
    x = np.array([float(r[xi]) for r in body])
    if "t" in header:
        t = np.array([float(r[header.index("t")]) for r in body])
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise DomainError(f"{path}: column 't' must be strictly increasing")
    return x


def write_acf_csv(path, acf: AcfEstimate, fit_wbou: FitResult, fit_ou: FitResult):
    """Write lag,rho_hat,rho_wbou_fit,rho_ou_fit at full precision."""
    wbou_curve = model_curve("wbou", fit_wbou.lambda_hat, acf.lags)
    ou_curve = model_curve("ou", fit_ou.lambda_hat, acf.lags)
    with open(path, "w", newline="") as fh:
        fh.write("lag,rho_hat,rho_wbou_fit,rho_ou_fit\n")
        for k in range(len(acf.lags)):
            fh.write(
                f"{int(acf.lags[k])},{float(acf.rho[k])!r},"
                f"{float(wbou_curve[k])!r},{float(ou_curve[k])!r}\n"
            )


def read_acf_csv(path) -> AcfEstimate:
    """Read back an ACF table (columns lag, rho_hat; extras ignored)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    if "lag" not in header or "rho_hat" not in header:
        raise DomainError(f"{path}: expected columns 'lag' and 'rho_hat'")
    li, ri = header.index("lag"), header.index("rho_hat")
    body = [r for r in rows[1:] if r]
    lags = np.array([int(float(r[li])) for r in body])
    rho = np.array([float(r[ri]) for r in body])
    if len(lags) == 0 or lags[0] != 0 or not np.all(np.diff(lags) == 1):
        raise DomainError(f"{path}: lags must be contiguous starting at 0")
    return AcfEstimate(lags=lags, rho=rho, n=0)


def write_signature_csv(path, rows: np.ndarray) -> None:
    """Write skip,rv at full precision."""
    with open(path, "w", newline="") as fh:
        fh.write("skip,rv\n")
        for k, rv in rows:
            fh.write(f"{int(k)},{float(rv)!r}\n")
