"""Independent reference computations used by the test-suite."""

import itertools
import math

import numpy as np
from scipy.integrate import quad, solve_ivp


def danilov_brute(values, measures, budget):
    """Best ``int_T g`` over |T| <= budget by enumerating subsets of cells.

    A best set takes some cells whole and at most one cell partially; every
    subset is tried as the whole part and each remaining cell is tried as the
    partial one.
    """
    values = np.asarray(values, dtype=float)
    measures = np.asarray(measures, dtype=float)
    n = values.size
    masks = np.array(list(itertools.product((0.0, 1.0), repeat=n))).reshape(-1, n)
    used = masks @ measures
    mass = masks @ (values * measures)
    ok = used <= budget + 1e-12
    left = np.maximum(budget - used, 0.0)[:, None]
    extra = np.where(masks == 0.0, values[None, :] * np.minimum(measures[None, :], left), 0.0)
    best_extra = extra.max(axis=1) if n else np.zeros(masks.shape[0])
    return float(np.max(np.where(ok, mass + best_extra, 0.0)))


def window_average_quad(fn, p, xi, l, points=()):
    """``(1/l) int_xi^{xi+l} |fn|^p`` by adaptive quadrature."""
    pts = [x for x in points if xi < x < xi + l]
    val, _ = quad(lambda t: abs(fn(t)) ** p, xi, xi + l, points=pts or None, limit=500)
    return val / l


def linear_convolution_quad(a, fn, t, lower, points=()):
    """``int_lower^t e^{a (t-s)} fn(s) ds``."""
    pts = [x for x in points if lower < x < t]
    val, _ = quad(lambda s: math.exp(a * (t - s)) * fn(s), lower, t, points=pts or None,
                  limit=1000)
    return val


def dense_time_stepping(a, rhs, t_start, t_end, t_eval, u0=0.0):
    """Integrate ``u' = a u + rhs(t, u)`` from ``t_start`` with a tight RK45 tolerance."""
    sol = solve_ivp(lambda t, u: a * u + rhs(t, u), (t_start, t_end), [u0],
                    t_eval=t_eval, rtol=1e-10, atol=1e-12, max_step=0.05)
    return sol.y[0]
