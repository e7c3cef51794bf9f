"""Shared numerical oracles for the test suite.

Everything here recomputes quantities through a *different* route than the
package uses (direct quadrature against the jump density, finite differences,
Monte Carlo error bars), so agreement between the two is meaningful.
"""

import zlib

import numpy as np
from scipy.integrate import quad

_QUAD = dict(epsabs=1e-12, epsrel=1e-12, limit=400)


def rng_for(*tags):
    """Deterministic generator keyed by arbitrary string-able tags.

    (zlib.crc32 is stable across processes, unlike built-in hash().)
    """
    key = zlib.crc32("/".join(str(t) for t in tags).encode())
    return np.random.default_rng(np.random.SeedSequence(key))


# ---------------------------------------------------------------------------
# quadrature against a Levy measure's density/atoms (ignores closed-form tails)
# ---------------------------------------------------------------------------

def measure_tail_quad(measure, y, side="pos"):
    """Tail mass nu([y, inf)) or nu((-inf, -y]) by direct quadrature."""
    lo, hi = measure.support
    total = 0.0
    if measure.density is not None:
        if side == "pos":
            a, b = max(y, lo), hi
            if b > a:
                total += quad(measure.density, a, b, **_QUAD)[0]
        else:
            a, b = lo, min(-y, hi)
            if b > a:
                total += quad(measure.density, a, b, **_QUAD)[0]
    for c, w in measure.atoms:
        if side == "pos" and c >= y:
            total += w
        elif side == "neg" and c <= -y:
            total += w
    return total


def measure_moment_quad(measure, power, region=(1.0, np.inf)):
    """integral of x^power nu(dx) over |x| in [region[0], region[1])."""
    lo_r, hi_r = region
    lo, hi = measure.support
    total = 0.0
    if measure.density is not None:
        def f(x):
            return x ** power * measure.density(x)
        a, b = max(lo_r, lo), min(hi_r, hi)
        if b > a:
            total += quad(f, a, b, **_QUAD)[0]
        a2, b2 = max(-hi_r, lo), min(-lo_r, hi)
        if b2 > a2:
            total += quad(f, a2, b2, **_QUAD)[0]
    for c, w in measure.atoms:
        if lo_r <= abs(c) < hi_r:
            total += c ** power * w
    return total


def gamma_x_oracle(triplet, lam):
    """Location parameter of the stationary law via the time-change integral.

    Integrates v -> gamma + int_{1 < |x| <= 1/v} x nu(dx) over v in (0, 1]
    and scales by 2/lam.  The inner integral is evaluated as the full
    outside-unit mean minus the tail beyond 1/v, each by direct quadrature.
    """
    meas = triplet.measure
    mean_outside = measure_moment_quad(meas, 1, (1.0, np.inf))

    def tail_mean(y):
        # int_{|x| > y} x nu(dx)
        lo, hi = meas.support
        total = 0.0
        if meas.density is not None:
            def f(x):
                return x * meas.density(x)
            if hi > y:
                total += quad(f, max(y, lo), hi, **_QUAD)[0]
            if lo < -y:
                total += quad(f, lo, min(-y, hi), **_QUAD)[0]
        for c, w in meas.atoms:
            if abs(c) > y:
                total += c * w
        return total

    def integrand(v):
        if v <= 0.0:
            return triplet.gamma + mean_outside
        hi = 1.0 / v
        return triplet.gamma + mean_outside - tail_mean(hi)

    pts = sorted({1.0 / abs(c) for c, w in meas.atoms if abs(c) > 1.0})
    val = quad(integrand, 0.0, 1.0, points=pts or None, **_QUAD)[0]
    return 2.0 * val / lam


def phi_x_oracle(measure, y, lam):
    """Positive tail of the mapped measure via the Fubini form.

    (2/lam) * int_y^inf nubar(w)/w dw with the driver tail nubar computed by
    direct quadrature at every w.
    """
    def f(w):
        return measure_tail_quad(measure, w, "pos") / w

    # scipy rejects break points on infinite intervals, so integrate each
    # inter-atom segment separately and the unbroken remainder to infinity
    pts = sorted({c for c, w in measure.atoms if c > y})
    edges = [y] + pts
    val = sum(quad(f, a, b, **_QUAD)[0] for a, b in zip(edges, edges[1:]))
    val += quad(f, edges[-1], np.inf, **_QUAD)[0]
    return 2.0 / lam * val


# ---------------------------------------------------------------------------
# Levy-Khintchine reconstruction of a characteristic function from a triplet
# ---------------------------------------------------------------------------

def cf_from_triplet(triplet, u):
    """exp(iu*gamma - sigma2 u^2/2 + int (e^{iuy}-1-iuy 1_{|y|<=1}) nu(dy)).

    Integrates the real and imaginary parts separately, splitting the domain
    at +-1 where the compensator switches off.
    """
    gamma, sigma2, meas = triplet.gamma, triplet.sigma2, triplet.measure
    dens = meas.density
    lo, hi = meas.support

    def re_in(y):
        return (np.cos(u * y) - 1.0) * dens(y)

    def im_in(y):
        return (np.sin(u * y) - u * y) * dens(y)

    def re_out(y):
        return (np.cos(u * y) - 1.0) * dens(y)

    def im_out(y):
        return np.sin(u * y) * dens(y)

    ire = iim = 0.0
    if dens is not None:
        segs_in = [(max(lo, -1.0), min(hi, 0.0)), (max(lo, 0.0), min(hi, 1.0))]
        for a, b in segs_in:
            if b > a:
                ire += quad(re_in, a, b, **_QUAD)[0]
                iim += quad(im_in, a, b, **_QUAD)[0]
        segs_out = [(lo, min(hi, -1.0)), (max(lo, 1.0), hi)]
        for a, b in segs_out:
            if b > a:
                ire += quad(re_out, a, b, **_QUAD)[0]
                iim += quad(im_out, a, b, **_QUAD)[0]
    for c, w in meas.atoms:
        comp = u * c if abs(c) <= 1.0 else 0.0
        ire += (np.cos(u * c) - 1.0) * w
        iim += (np.sin(u * c) - comp) * w
    expo = complex(-0.5 * sigma2 * u * u + ire, u * gamma + iim)
    return np.exp(expo)


def ecf(samples, u):
    """Empirical characteristic function at scalar or array u."""
    u = np.asarray(u, dtype=float)
    return np.mean(np.exp(1j * np.multiply.outer(u, np.asarray(samples))), axis=-1)


# ---------------------------------------------------------------------------
# Monte Carlo standard errors
# ---------------------------------------------------------------------------

def mean_se(x):
    x = np.asarray(x, dtype=float)
    return x.std(ddof=1) / np.sqrt(x.size)


def var_se(x):
    """Standard error of the sample variance (delta method)."""
    x = np.asarray(x, dtype=float)
    d = x - x.mean()
    m2 = np.mean(d ** 2)
    m4 = np.mean(d ** 4)
    return np.sqrt(max(m4 - m2 ** 2, 0.0) / x.size)


def corr_se(a, b):
    """Standard error of the sample correlation via its influence function."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    za = (a - a.mean()) / a.std()
    zb = (b - b.mean()) / b.std()
    r = np.mean(za * zb)
    psi = za * zb - 0.5 * r * (za ** 2 + zb ** 2)
    return psi.std(ddof=1) / np.sqrt(a.size)


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

_STENCILS = {
    1: ([(1, 0.5), (-1, -0.5)], 1),
    2: ([(1, 1.0), (0, -2.0), (-1, 1.0)], 2),
    3: ([(2, 0.5), (1, -1.0), (-1, 1.0), (-2, -0.5)], 3),
    4: ([(2, 1.0), (1, -4.0), (0, 6.0), (-1, -4.0), (-2, 1.0)], 4),
}


def fd_derivative(f, x0, n, h=0.05, levels=3):
    """n-th derivative by central differences with Richardson extrapolation.

    The base stencils all have even error expansions, so each Richardson
    level knocks out another factor of h^2.
    """
    offsets, power = _STENCILS[n]

    def base(step):
        acc = 0.0
        for k, c in offsets:
            acc += c * f(x0 + k * step)
        return acc / step ** n

    vals = [base(h / 2 ** j) for j in range(levels)]
    fac = 4.0
    while len(vals) > 1:
        vals = [(fac * vals[j + 1] - vals[j]) / (fac - 1.0)
                for j in range(len(vals) - 1)]
        fac *= 4.0
    return vals[0]


# ---------------------------------------------------------------------------
# misc
# ---------------------------------------------------------------------------

def pairwise_coarsen(dl):
    """Merge adjacent increments pairwise (refinement with common randomness)."""
    dl = np.asarray(dl, dtype=float)
    return dl.reshape(dl.shape[:-1] + (dl.shape[-1] // 2, 2)).sum(axis=-1)
