"""Numeric inner loops shared by the fitters and the EMD sifter.

Every kernel here is written in nopython-compatible style and compiled with
numba unless the environment variable ``DECOMP_NO_NUMBA`` is set to a truthy
value, in which case the plain-Python/numpy versions run as-is.  Both paths
execute identical arithmetic, so results are bit-identical either way.
"""

import os

import numpy as np

NUMBA_ENABLED = os.environ.get("DECOMP_NO_NUMBA", "").strip().lower() not in (
    "1",
    "true",
    "yes",
)

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


@njit(cache=True)
def natural_spline_eval(xk, yk, xq):
    """Evaluate the natural cubic spline through (xk, yk) at points xq.

    Knot abscissae must be strictly increasing.  Second derivatives are zero
    at the first and last knot; queries outside the knot range extend the
    boundary cubic.
    """
    n = xk.shape[0]
    out = np.empty(xq.shape[0])
    if n == 2:
        slope = (yk[1] - yk[0]) / (xk[1] - xk[0])
        for q in range(xq.shape[0]):
            out[q] = yk[0] + slope * (xq[q] - xk[0])
        return out

    h = np.empty(n - 1)
    for i in range(n - 1):
        h[i] = xk[i + 1] - xk[i]

    # Thomas solve for interior second derivatives, natural boundary.
    m = np.zeros(n)
    if n > 2:
        sub = np.empty(n - 2)
        diag = np.empty(n - 2)
        sup = np.empty(n - 2)
        rhs = np.empty(n - 2)
        for i in range(1, n - 1):
            sub[i - 1] = h[i - 1]
            diag[i - 1] = 2.0 * (h[i - 1] + h[i])
            sup[i - 1] = h[i]
            rhs[i - 1] = 6.0 * (
                (yk[i + 1] - yk[i]) / h[i] - (yk[i] - yk[i - 1]) / h[i - 1]
            )
        for i in range(1, n - 2):
            w = sub[i] / diag[i - 1]
            diag[i] -= w * sup[i - 1]
            rhs[i] -= w * rhs[i - 1]
        m[n - 2] = rhs[n - 3] / diag[n - 3]
        for i in range(n - 4, -1, -1):
            m[i + 1] = (rhs[i] - sup[i] * m[i + 2]) / diag[i]

    for q in range(xq.shape[0]):
        x = xq[q]
        # locate interval by binary search
        lo = 0
        hi = n - 2
        if x <= xk[0]:
            i = 0
        elif x >= xk[n - 1]:
            i = n - 2
        else:
            while lo < hi:
                mid = (lo + hi) // 2
                if xk[mid + 1] < x:
                    lo = mid + 1
                else:
                    hi = mid
            i = lo
        hi_ = h[i]
        a = (xk[i + 1] - x) / hi_
        b = (x - xk[i]) / hi_
        out[q] = (
            a * yk[i]
            + b * yk[i + 1]
            + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1])
            * (hi_ * hi_)
            / 6.0
        )
    return out


@njit(cache=True)
def erp_distance(p, a, gap):
    """Edit distance with real penalty between two series, gap reference value."""
    m = p.shape[0]
    n = a.shape[0]
    prev = np.empty(n + 1)
    cur = np.empty(n + 1)
    prev[0] = 0.0
    for j in range(1, n + 1):
        prev[j] = prev[j - 1] + abs(a[j - 1] - gap)
    for i in range(1, m + 1):
        cur[0] = prev[0] + abs(p[i - 1] - gap)
        for j in range(1, n + 1):
            match = prev[j - 1] + abs(p[i - 1] - a[j - 1])
            del_p = prev[j] + abs(p[i - 1] - gap)
            del_a = cur[j - 1] + abs(a[j - 1] - gap)
            best = match
            if del_p < best:
                best = del_p
            if del_a < best:
                best = del_a
            cur[j] = best
        for j in range(n + 1):
            prev[j] = cur[j]
    return prev[n]


@njit(cache=True)
def hwes_filter(y, alpha, beta, gamma, m, level0, trend0, seasonal0):
    """Additive Holt-Winters recursion.

    States are initialized before the first observation; fitted[t] is the
    one-step-ahead prediction of y[t].  Seasonal states are indexed by phase
    t mod m.  Returns (fitted, final_level, final_trend, final_seasonals).
    """
    n = y.shape[0]
    fitted = np.empty(n)
    seas = seasonal0.copy()
    level = level0
    trend = trend0
    for t in range(n):
        ph = t % m
        fitted[t] = level + trend + seas[ph]
        new_level = alpha * (y[t] - seas[ph]) + (1.0 - alpha) * (level + trend)
        trend = beta * (new_level - level) + (1.0 - beta) * trend
        seas[ph] = gamma * (y[t] - new_level) + (1.0 - gamma) * seas[ph]
        level = new_level
    return fitted, level, trend, seas


@njit(cache=True)
def hwes_sse(y, alpha, beta, gamma, m, level0, trend0, seasonal0):
    n = y.shape[0]
    seas = seasonal0.copy()
    level = level0
    trend = trend0
    sse = 0.0
    for t in range(n):
        ph = t % m
        err = y[t] - (level + trend + seas[ph])
        sse += err * err
        new_level = alpha * (y[t] - seas[ph]) + (1.0 - alpha) * (level + trend)
        trend = beta * (new_level - level) + (1.0 - beta) * trend
        seas[ph] = gamma * (y[t] - new_level) + (1.0 - gamma) * seas[ph]
        level = new_level
    return sse


@njit(cache=True)
def loess_fit(y, k):
    """Local linear regression with tricube weights over the k nearest points."""
    n = y.shape[0]
    out = np.empty(n)
    for i in range(n):
        lo = i - k // 2
        if lo < 0:
            lo = 0
        hi = lo + k
        if hi > n:
            hi = n
            lo = n - k
        dmax = max(i - lo, hi - 1 - i)
        if dmax == 0:
            out[i] = y[i]
            continue
        sw = 0.0
        swx = 0.0
        swy = 0.0
        swxx = 0.0
        swxy = 0.0
        for j in range(lo, hi):
            d = abs(j - i) / dmax
            if d >= 1.0:
                w = 0.0
            else:
                u = 1.0 - d * d * d
                w = u * u * u
            x = float(j - i)
            sw += w
            swx += w * x
            swy += w * y[j]
            swxx += w * x * x
            swxy += w * x * y[j]
        det = sw * swxx - swx * swx
        if det == 0.0:
            out[i] = swy / sw
        else:
            # prediction at x = 0 (the centre point)
            out[i] = (swxx * swy - swx * swxy) / det
    return out


def warm_up():
    """Trigger JIT compilation of all kernels on tiny inputs."""
    xk = np.array([0.0, 1.0, 2.0, 3.0])
    yk = np.array([0.0, 1.0, 0.0, 1.0])
    natural_spline_eval(xk, yk, np.linspace(0.0, 3.0, 5))
    erp_distance(np.array([1.0, 2.0]), np.array([1.0, 2.0]), 0.0)
    y = np.arange(12.0)
    seas = np.zeros(3)
    hwes_filter(y, 0.2, 0.1, 0.1, 3, 1.0, 0.1, seas)
    hwes_sse(y, 0.2, 0.1, 0.1, 3, 1.0, 0.1, seas)
    loess_fit(y, 5)
