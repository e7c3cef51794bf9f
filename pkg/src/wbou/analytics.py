"""Closed-form second-order quantities of the two-sided-kernel process.

Everything here is driven by three numbers: the kernel rate lam and the
driver moments mu = E L(1), V = Var L(1).  The process has

    E X_t = 2 mu / lam,           Var X_t = V / lam,
    Cov(X_{t+h}, X_t) = V h e^{-lam h} + (V / lam) e^{-lam h},
    Corr(X_{t+h}, X_t) = (1 + lam h) e^{-lam h},

a strictly slower decay than the classical OU correlation e^{-lam h}.
Increment autocorrelations come in two flavors: the canonical value via
the covariance identity

    Corr(X_{k+1}-X_k, X_1-X_0)
        = (2 acov(k) - acov(k+1) - acov(k-1)) / (2 (acov(0) - acov(1))),

used everywhere downstream, and a direct bracket expansion of the same
quantity (suffix ``_alt``) retained so the two routes can be compared
term by term in audits.  The first-order value changes sign at a unique
rate lambda* ~= 1.25643; ``lambda_sign_threshold`` computes it.

Also included: quantities for the zero-start variant Y_t = X_t - X_0,
the covariance of the compact-window variant, and the correspondence
between the lag-one autocorrelation and an effective Hurst exponent
(C_H = 2^{2H-1} - 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drivers import DriverSpec
from .errors import BadLag, DomainError, InvalidLambda, NegativeLag

__all__ = [
    "SecondOrderParams",
    "mean_x",
    "var_x",
    "acov_x",
    "acf_x",
    "acf_ou",
    "msd",
    "increment_acf",
    "increment_acf_alt",
    "first_order_increment_acf_alt",
    "increment_acf_ou",
    "lambda_sign_threshold",
    "mean_y",
    "var_y",
    "var_y_alt",
    "compact_cov",
    "hurst_constant",
    "effective_hurst",
]


@dataclass(frozen=True)
class SecondOrderParams:
    """Kernel rate and driver moments (mu, V) behind all formulas here."""

    lam: float
    mu: float = 0.0
    v: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise InvalidLambda(f"lambda must be > 0, got {self.lam}")
        if not self.v > 0:
            raise DomainError("driver variance v must be positive")

    @classmethod
    def from_driver(cls, driver: DriverSpec, lam: float) -> "SecondOrderParams":
        mu, v = driver.moments()
        return cls(lam, mu, v)


def _lag(h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise NegativeLag("lag must be nonnegative")
    return h


def _scalar_ok(h, out):
    return float(out) if np.ndim(h) == 0 else out


def mean_x(p: SecondOrderParams) -> float:
    return 2.0 * p.mu / p.lam


def var_x(p: SecondOrderParams) -> float:
    return p.v / p.lam


def acov_x(p: SecondOrderParams, h):
    """Cov(X_{t+h}, X_t) = V h e^{-lam h} + (V/lam) e^{-lam h}."""
    hh = _lag(h)
    return _scalar_ok(h, (p.v * hh + p.v / p.lam) * np.exp(-p.lam * hh))


def acf_x(p: SecondOrderParams, h):
    """Corr(X_{t+h}, X_t) = (lam h + 1) e^{-lam h}."""
    hh = _lag(h)
    return _scalar_ok(h, (p.lam * hh + 1.0) * np.exp(-p.lam * hh))


def acf_ou(p: SecondOrderParams, h):
    """Classical OU comparison: Corr(U_{t+h}, U_t) = e^{-lam h}."""
    hh = _lag(h)
    return _scalar_ok(h, np.exp(-p.lam * hh))


def msd(p: SecondOrderParams, h):
    """Mean-square displacement E (X_{t+h} - X_t)^2."""
    hh = _lag(h)
    e = np.exp(-p.lam * hh)
    return _scalar_ok(h, (2.0 * p.v / p.lam) * (1.0 - e - p.lam * hh * e))


def _check_k(k) -> np.ndarray:
    kk = np.asarray(k)
    if not np.issubdtype(kk.dtype, np.integer) and not np.all(kk == np.round(kk)):
        raise BadLag("increment lag k must be an integer")
    if np.any(kk < 1):
        raise BadLag("increment lag k must be >= 1")
    return kk.astype(float)


def increment_acf(p: SecondOrderParams, k):
    """Corr(X_{k+1} - X_k, X_1 - X_0) via the covariance identity.

    This canonical route uses only acov_x and is the value every other
    part of the package relies on.  Its range over lam > 0, k >= 1 is
    (-0.5, 1).
    """
    kk = _check_k(k)
    num = 2.0 * acov_x(p, kk) - acov_x(p, kk + 1.0) - acov_x(p, kk - 1.0)
    den = 2.0 * (acov_x(p, 0.0) - acov_x(p, 1.0))
    return _scalar_ok(k, num / den)


def increment_acf_alt(p: SecondOrderParams, k):
    """Bracket-expansion variant of increment_acf, kept for auditing.

    Written as two e^{-lam k} / lam k e^{-lam k} brackets over the common
    denominator 1 - e^{-lam} - lam e^{-lam}; algebraically it agrees with
    the canonical route, and tests surface any numerical discrepancy.
    """
    kk = _check_k(k)
    lam = p.lam
    den = 1.0 - math.exp(-lam) - lam * math.exp(-lam)
    b1 = 0.5 + 0.5 * (1.0 - math.exp(lam) + lam * math.exp(lam)) / den
    b2 = 0.5 + 0.5 * (1.0 - math.exp(lam) + lam * math.exp(-lam)) / den
    out = np.exp(-lam * kk) * b1 + lam * kk * np.exp(-lam * kk) * b2
    return _scalar_ok(k, out)


def first_order_increment_acf_alt(p: SecondOrderParams) -> float:
    """Single-bracket variant of increment_acf at k = 1, kept for auditing."""
    lam = p.lam
    den = 1.0 - math.exp(-lam) - lam * math.exp(-lam)
    return math.exp(-lam) * (
        0.5 * (1.0 + lam)
        + 0.5 * (1.0 + lam - math.exp(lam) + lam**2 * math.exp(-lam)) / den
    )


def increment_acf_ou(p: SecondOrderParams, k):
    """Classical OU increment autocorrelation; always in (-0.5, 0)."""
    kk = _check_k(k)
    lam = p.lam
    bracket = 0.5 + 0.5 * (1.0 - math.exp(lam)) / (1.0 - math.exp(-lam))
    return _scalar_ok(k, np.exp(-lam * kk) * bracket)


def lambda_sign_threshold() -> float:
    """The rate at which the first-order increment autocorrelation
    changes sign: positive below, negative above.

    Root of the canonical increment_acf(., 1) in lam, bracketed in
    [0.5, 3], bisection to 1e-8.  The value does not depend on (mu, V).
    """

    def f(lam: float) -> float:
        return increment_acf(SecondOrderParams(lam), 1)

    lo, hi = 0.5, 3.0
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if flo * fm > 0:
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < 1e-8:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# zero-start variant Y_t = X_t - X_0


def mean_y(p: SecondOrderParams, t) -> float:
    """E Y_t = 0 for all t."""
    _lag(t)
    return 0.0


def var_y(p: SecondOrderParams, t):
    """Var(Y_t): since Y_t = X_t - X_0, this is the mean-square
    displacement (2V/lam)(1 - e^{-lam t} - lam t e^{-lam t})."""
    return msd(p, t)


def var_y_alt(p: SecondOrderParams, t):
    """Variant closed form V t e^{-lam t} + (V/lam) e^{-lam t}, kept for
    auditing; it equals Cov(X_t, X_0), not Var(X_t - X_0), and differs
    from var_y for every t > 0."""
    return acov_x(p, t)


# ---------------------------------------------------------------------------
# compact-window variant


def compact_cov(lam: float, a: float, t: float, s: float) -> float:
    """Cov(X_t, X_s) for the kernel restricted to a window of length a,
    under the centered unit-variance driver convention (mu=0, V=1).

    (e^{-lam(t-s)} - e^{-lam(2a + s - t)}) / (2 lam) for 0 <= t-s <= a,
    and 0 beyond the window.  Scale by V for a general driver.
    """
    if not lam > 0:
        raise InvalidLambda(f"lambda must be > 0, got {lam}")
    if a <= 0:
        raise DomainError("window length a must be positive")
    gap = t - s
    if gap < 0:
        return compact_cov(lam, a, s, t)
    if gap > a:
        return 0.0
    return (math.exp(-lam * gap) - math.exp(-lam * (2 * a + s - t))) / (2 * lam)


# ---------------------------------------------------------------------------
# effective Hurst correspondence


def hurst_constant(h_exp: float) -> float:
    """C_H = 2^(2H-1) - 1, the lag-one increment autocorrelation of
    fractional Brownian motion with Hurst exponent H."""
    if not 0.0 < h_exp <= 1.0:
        raise DomainError("Hurst exponent must lie in (0, 1]")
    return 2.0 ** (2.0 * h_exp - 1.0) - 1.0


def effective_hurst(rho1: float) -> float:
    """Inverse of hurst_constant: H = (1 + log2(1 + rho1)) / 2.

    Maps a lag-one increment autocorrelation in (-0.5, 1] to the Hurst
    exponent whose fBm increments would show the same value.
    """
    if not -0.5 < rho1 <= 1.0:
        raise DomainError("rho1 must lie in (-0.5, 1]")
    return 0.5 * (1.0 + math.log2(1.0 + rho1))
