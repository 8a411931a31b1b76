"""Independent reference implementations used for cross-validation.

Everything here is deliberately written from first principles with plain
``math`` loops (no shared code with the solver modules, no use of the
interval kernel), so that agreement between a solver result and its oracle
is evidence rather than tautology. Tolerances here are frozen; tests and the
verification suite compare against these routines, never the reverse.
"""
from __future__ import annotations

import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

TWO_PI = 2.0 * math.pi

#: frozen oracle tolerance for winding ties
ORACLE_TIE_RTOL = 1e-9

#: frozen winding enumeration bound (wider than the solver default)
ORACLE_K = 32


def winding_distance(x, y, K: int = ORACLE_K) -> Tuple[str, float, int, List[int]]:
    """Cylinder distance by exhaustive winding enumeration.

    Returns (relation, d, multiplicity, winding classes attaining d) where
    relation is "chronological", "null", or "none"; d is 0.0 for null pairs
    and nan for unrelated ones.
    """
    dt = float(y[0]) - float(x[0])
    dth = float(y[1]) - float(x[1])
    best = -math.inf
    per_k = []
    for k in range(-K, K + 1):
        sep = dth + TWO_PI * k
        q = dt * dt - sep * sep
        per_k.append((k, q))
        if q > best:
            best = q
    ntol = ORACLE_TIE_RTOL * (1.0 + dt * dt + dth * dth)
    if dt < 0.0 or best < -ntol:
        return "none", math.nan, 0, []
    if abs(best) <= ntol:
        ks = [k for k, q in per_k if abs(q) <= ntol]
        return "null", 0.0, len(ks), ks
    tie = ORACLE_TIE_RTOL * (1.0 + abs(best))
    ks = [k for k, q in per_k if best - q <= tie]
    return "chronological", math.sqrt(best), len(ks), ks


def minkowski_distance(x, y) -> Tuple[str, float, int]:
    """Closed-form Minkowski relation and distance (any dimension)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dt = y[0] - x[0]
    sp = float(np.linalg.norm(y[1:] - x[1:]))
    q = dt * dt - sp * sp
    ntol = ORACLE_TIE_RTOL * (1.0 + dt * dt + sp * sp)
    if dt < 0.0 or q < -ntol:
        return "none", math.nan, 0
    if abs(q) <= ntol:
        return "null", 0.0, 1
    return "chronological", math.sqrt(q), 1


def cylinder_cut_time(w: float) -> float:
    """Cut parameter along v = (1, w) on the flat cylinder.

    The straight segment stops maximizing once its angular advance reaches
    pi, where the mirror winding ties it; infinite along the axis.
    """
    if w == 0.0:
        return math.inf
    if abs(w) > 1.0:
        raise ValueError("direction is not future causal")
    return math.pi / abs(w)


def scalar_jacobi_first_zero(a, da, t0: float, horizon: float,
                             rtol: float = 1e-12) -> Optional[float]:
    """First zero of the transverse Jacobi scalar along a warped t-axis.

    Along the axial geodesic t -> (t0 + t, theta0) the transverse Jacobi
    component j satisfies j'' + 2 (a'/a) j' = 0 with j(0) = 0, j'(0) = 1.
    Returns the first zero in (0, horizon], or None.
    """

    def rhs(t, y):
        T = t0 + t
        return [y[1], -2.0 * (float(da(T)) / float(a(T))) * y[1]]

    sol = solve_ivp(rhs, (0.0, horizon), [0.0, 1.0], method="DOP853",
                    rtol=rtol, atol=rtol * 1e-2, dense_output=True)
    ts = np.linspace(horizon * 1e-6, horizon, 4001)
    js = sol.sol(ts)[0]
    sign = np.sign(js)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if flips.size == 0:
        return None
    from scipy.optimize import brentq

    i = flips[0]
    return float(brentq(lambda t: sol.sol(t)[0], ts[i], ts[i + 1],
                        xtol=1e-12))


def scalar_jacobi_value(a, da, t0: float, t: float,
                        rtol: float = 1e-12) -> float:
    """j(t) for the axial transverse Jacobi scalar (see above)."""

    def rhs(s, y):
        T = t0 + s
        return [y[1], -2.0 * (float(da(T)) / float(a(T))) * y[1]]

    sol = solve_ivp(rhs, (0.0, t), [0.0, 1.0], method="DOP853",
                    rtol=rtol, atol=rtol * 1e-2)
    return float(sol.y[0, -1])


def brute_force_regularized(t: float, s: float, x, y, radius: float,
                            n: int = 161, K: int = ORACLE_K) -> float:
    """Dense-grid evaluation of the cylinder sup-convolution value.

    sup over z in an n-by-n grid on the square of half-width ``radius``
    around y of -sqrt(t) sqrt(d(x,z)) + sqrt(s) sqrt(d(y,z)), computed with
    the exhaustive winding oracle. A lower bound on the true sup that
    converges as the grid refines; z = y is always included.
    """
    best = -math.inf
    for i in range(n):
        tz = y[0] - radius + 2.0 * radius * i / (n - 1)
        for j in range(n):
            thz = y[1] - radius + 2.0 * radius * j / (n - 1)
            relx, dx, _, _ = winding_distance(x, (tz, thz), K)
            if relx == "none":
                continue
            rely, dy, _, _ = winding_distance(y, (tz, thz), K)
            if rely == "none":
                continue
            val = -math.sqrt(t) * math.sqrt(dx) + math.sqrt(s) * math.sqrt(dy)
            if val > best:
                best = val
    relx, dx, _, _ = winding_distance(x, y, K)
    if relx != "none":
        best = max(best, -math.sqrt(t) * math.sqrt(dx))
    return best
