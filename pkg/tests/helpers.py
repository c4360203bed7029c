"""Independent numerical oracles shared by the test modules.

These deliberately avoid the library's own code paths: the CDF below is
the closed-form antiderivative of the three lifecycle branches, and the
integrator is a plain composite Simpson rule, so agreement with the
package is evidence rather than tautology.
"""

from __future__ import annotations

import math

import numpy as np


def piecewise_density(t, A, tm, alpha):
    """Raw three-branch density, written out directly."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    lo = t < tm
    hi = t >= tm + 1.0 / alpha
    mid = ~lo & ~hi
    out[lo] = np.exp(A * (t[lo] - tm))
    out[mid] = -alpha * A * (t[mid] - tm - 0.5 / alpha) ** 2 + 1.0 + A / (4.0 * alpha)
    out[hi] = (t[hi] - tm - 1.0 / alpha + 1.0) ** (-A)
    return out


def closed_form_mass(t, A, tm, alpha):
    """Exact integral of the raw density from 0 to scalar t."""
    j1 = tm
    j2 = tm + 1.0 / alpha

    def rise_part(x):
        return (math.exp(A * (x - tm)) - math.exp(-A * tm)) / A

    def plateau_part(x):
        u = x - tm
        c = 0.5 / alpha
        return -alpha * A * ((u - c) ** 3 + c**3) / 3.0 + (1.0 + A / (4.0 * alpha)) * u

    def fade_part(x):
        v = x - j2 + 1.0
        if A == 1.0:
            return math.log(v)
        return (v ** (1.0 - A) - 1.0) / (1.0 - A)

    if t <= j1:
        return rise_part(t)
    if t <= j2:
        return rise_part(j1) + plateau_part(t)
    return rise_part(j1) + plateau_part(j2) + fade_part(t)


def closed_form_cdf(t, A, tm, alpha, horizon):
    """Exact normalized CDF over [0, horizon]; accepts scalar or array."""
    total = closed_form_mass(horizon, A, tm, alpha)
    if np.ndim(t) == 0:
        return closed_form_mass(float(t), A, tm, alpha) / total
    return np.array([closed_form_mass(float(x), A, tm, alpha) for x in np.asarray(t)]) / total


def simpson_panels(fn, lo, hi, panels):
    """Composite Simpson with an even number of uniform panels."""
    if panels % 2:
        panels += 1
    x = np.linspace(lo, hi, panels + 1)
    y = fn(x)
    h = (hi - lo) / panels
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-2:2].sum())


def simpson_mass(A, tm, alpha, horizon, panels_per_segment=4096):
    """Simpson integral of the raw density, split at the junctions."""
    j1 = tm
    j2 = tm + 1.0 / alpha
    total = 0.0
    for lo, hi in ((0.0, j1), (j1, j2), (j2, horizon)):
        total += simpson_panels(lambda x: piecewise_density(x, A, tm, alpha), lo, hi, panels_per_segment)
    return total


def ks_statistic(samples, cdf_fn):
    """Two-sided Kolmogorov-Smirnov distance of samples against cdf_fn."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    c = cdf_fn(x)
    upper = np.max(np.arange(1, n + 1) / n - c)
    lower = np.max(c - np.arange(0, n) / n)
    return max(upper, lower)
