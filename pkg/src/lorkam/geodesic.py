"""Geodesic flow: integration, exponential map, Jacobi fields, conjugate points.

Flat charts (Minkowski, cylinder) use exact straight-line records; warped
products are integrated with an adaptive high-order Runge-Kutta scheme with
dense output. Periodic charts are always integrated in the universal cover
(theta real); the identification is applied only when comparing points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import DomainExceeded, StepFailure
from .spacetime import (SpacetimeSpec, causal_class, metric_eval)

DEFAULT_TOL = 1e-10


@dataclass
class GeodesicRecord:
    """One integrated geodesic with dense state output.

    ``dense(t)`` returns ``(position, velocity)`` for t in ``domain``.
    ``terminated_by`` is "horizon" when the requested span was completed and
    "domain_boundary" when the chart domain ended first.
    """

    spec: SpacetimeSpec
    x0: np.ndarray
    v0: np.ndarray
    domain: tuple
    terminated_by: str
    _dense: Callable = field(repr=False)
    energy_drift: float = 0.0

    def state(self, t: float):
        lo, hi = self.domain
        if not lo - 1e-12 <= t <= hi + 1e-12:
            raise DomainExceeded(hi if t > hi else lo)
        return self._dense(float(np.clip(t, lo, hi)))

    def position(self, t: float) -> np.ndarray:
        return self.state(t)[0]

    def velocity(self, t: float) -> np.ndarray:
        return self.state(t)[1]

    def energy(self, t: float) -> float:
        pos, vel = self.state(t)
        return metric_eval(self.spec, pos, vel)


def _warped_rhs_factory(spec):
    prof = spec.profile

    def rhs(t, y):
        # state [T, TH, vT, vTH]; supports stacked (4, n) input
        y = np.asarray(y)
        T, vT, vTH = y[0], y[2], y[3]
        a = prof.a(T)
        da = prof.da(T)
        return np.stack([vT, vTH, -a * da * vTH * vTH,
                         -2.0 * (da / a) * vT * vTH])

    return rhs


def _domain_events(spec):
    lo, hi = spec.t_domain
    events = []
    if math.isfinite(hi):
        def ev_hi(t, y, hi=hi):
            return hi - y[0]
        ev_hi.terminal = True
        events.append(ev_hi)
    if math.isfinite(lo):
        def ev_lo(t, y, lo=lo):
            return y[0] - lo
        ev_lo.terminal = True
        events.append(ev_lo)
    return events


def _integrate_warped(spec, x0, v0, s_end, tol):
    """Integrate the geodesic ODE from parameter 0 to s_end (signed)."""
    y0 = np.concatenate([x0, v0])
    sol = solve_ivp(_warped_rhs_factory(spec), (0.0, s_end), y0,
                    method="DOP853", rtol=tol, atol=tol * 1e-2,
                    dense_output=True, events=_domain_events(spec))
    if sol.status == -1:
        raise StepFailure(f"integrator failed: {sol.message}")
    reached = sol.t[-1]
    boundary = sol.status == 1
    return sol, reached, boundary


def integrate_geodesic(spec: SpacetimeSpec, x0, v0, t_span,
                       tol: float = DEFAULT_TOL) -> GeodesicRecord:
    """Integrate gamma'' + Gamma(gamma', gamma') = 0 over a parameter span.

    The span may include negative parameters; integration stops early (with
    ``terminated_by="domain_boundary"``) if the chart domain ends.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    spec.check_domain(x0)
    s_lo, s_hi = float(t_span[0]), float(t_span[1])
    if s_lo > s_hi:
        raise ValueError("t_span must be increasing")

    if spec.flat:
        def dense(t, x0=x0, v0=v0):
            return x0 + t * v0, v0.copy()
        return GeodesicRecord(spec, x0, v0, (s_lo, s_hi), "horizon", dense)

    sols = {}
    dom_lo, dom_hi = s_lo, s_hi
    terminated = "horizon"
    if s_hi > 0:
        sol, reached, boundary = _integrate_warped(spec, x0, v0, s_hi, tol)
        sols["fwd"] = sol
        dom_hi = reached
        if boundary:
            terminated = "domain_boundary"
    else:
        dom_hi = 0.0
    if s_lo < 0:
        sol, reached, boundary = _integrate_warped(spec, x0, v0, s_lo, tol)
        sols["bwd"] = sol
        dom_lo = reached
        if boundary:
            terminated = "domain_boundary"
    else:
        dom_lo = 0.0

    def dense(t):
        if t >= 0 and "fwd" in sols:
            y = sols["fwd"].sol(t)
        elif t < 0 and "bwd" in sols:
            y = sols["bwd"].sol(t)
        else:
            y = np.concatenate([x0, v0])
        return y[:2].copy(), y[2:].copy()

    rec = GeodesicRecord(spec, x0, v0, (dom_lo, dom_hi), terminated, dense)
    e0 = metric_eval(spec, x0, v0)
    # sample strictly inside the reached span: the endpoints may sit on the
    # (open) chart boundary where the metric is not defined
    eps = 1e-9 * (1.0 + abs(dom_hi) + abs(dom_lo))
    ts = np.linspace(dom_lo + eps, dom_hi - eps, 33)
    rec.energy_drift = max(abs(rec.energy(t) - e0) for t in ts)
    return rec


def exp_map(spec: SpacetimeSpec, x, v, t: float,
            tol: float = DEFAULT_TOL) -> np.ndarray:
    """gamma(t) for the geodesic with gamma(0)=x, gamma'(0)=v, t >= 0.

    Raises DomainExceeded(t_reach) if the maximal domain ends before t.
    """
    if t < 0:
        raise ValueError("exp_map expects t >= 0")
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if spec.flat:
        return x + t * v
    spec.check_domain(x)
    if t == 0.0:
        return x.copy()
    sol, reached, boundary = _integrate_warped(spec, x, v, t, tol)
    if boundary and reached < t * (1.0 - 1e-12):
        raise DomainExceeded(reached)
    return sol.sol(min(t, reached))[:2].copy()


# ---------------------------------------------------------------------------
# Jacobi fields


@dataclass
class JacobiRecord:
    """A Jacobi field integrated along a geodesic record."""

    along: GeodesicRecord
    J: Callable
    J_prime: Callable
    det_track: Optional[Callable] = None


def _augmented_rhs_factory(spec, n_fields):
    """RHS for geodesic + n linearized (Jacobi) fields, supports stacking.

    State layout per trajectory: [T, TH, vT, vTH, (J, Jdot) * n_fields].
    """
    prof = spec.profile
    width = 4 + 4 * n_fields

    def rhs(t, y):
        y = np.asarray(y)
        flat_in = y.ndim == 1
        Y = y.reshape(width, -1) if flat_in else y
        T, vT, vTH = Y[0], Y[2], Y[3]
        a = prof.a(T)
        da = prof.da(T)
        dda = prof.dda(T)
        out = np.empty_like(Y)
        out[0] = vT
        out[1] = vTH
        out[2] = -a * da * vTH * vTH
        out[3] = -2.0 * (da / a) * vT * vTH
        c_t = da * da + a * dda            # d/dT Gamma^t_{thth}
        c_th = dda / a - (da / a) ** 2     # d/dT Gamma^th_{t th}
        for m in range(n_fields):
            o = 4 + 4 * m
            jT, jTH, jvT, jvTH = Y[o], Y[o + 1], Y[o + 2], Y[o + 3]
            out[o] = jvT
            out[o + 1] = jvTH
            out[o + 2] = -c_t * jT * vTH * vTH - 2.0 * a * da * vTH * jvTH
            out[o + 3] = (-2.0 * c_th * jT * vT * vTH
                          - 2.0 * (da / a) * (jvT * vTH + vT * jvTH))
        return out.ravel() if flat_in else out

    return rhs


def jacobi_transport(spec: SpacetimeSpec, geo: GeodesicRecord, J0, J0p,
                     tol: float = DEFAULT_TOL) -> JacobiRecord:
    """Integrate the Jacobi (geodesic deviation) equation along ``geo``."""
    J0 = np.asarray(J0, dtype=float)
    J0p = np.asarray(J0p, dtype=float)
    if spec.flat:
        return JacobiRecord(geo, lambda t: J0 + t * J0p, lambda t: J0p.copy())

    s_lo, s_hi = geo.domain
    y0 = np.concatenate([geo.x0, geo.v0, J0, J0p])
    rhs = _augmented_rhs_factory(spec, 1)
    sols = {}
    if s_hi > 0:
        sols["fwd"] = solve_ivp(rhs, (0.0, s_hi), y0, method="DOP853",
                                rtol=tol, atol=tol * 1e-2, dense_output=True)
    if s_lo < 0:
        sols["bwd"] = solve_ivp(rhs, (0.0, s_lo), y0, method="DOP853",
                                rtol=tol, atol=tol * 1e-2, dense_output=True)

    def sample(t):
        key = "fwd" if t >= 0 else "bwd"
        return sols[key].sol(t)

    return JacobiRecord(geo, lambda t: sample(t)[4:6],
                        lambda t: sample(t)[6:8])


@dataclass
class ConjugateResult:
    t_star: float
    tangential: bool = False


def first_conjugate_time(spec: SpacetimeSpec, x, v, horizon: float,
                         tol: float = 1e-8,
                         ode_tol: float = DEFAULT_TOL):
    """First parameter in (0, horizon] where d(exp_x) degenerates.

    Tracks the determinant of the Jacobi-field matrix with J(0)=0,
    J'(0)=basis; a sign change is refined by bisection, a near-zero touch
    without sign change is reported with ``tangential=True``. Returns None
    when no conjugate point exists up to the horizon. Flat charts have none.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if spec.flat:
        return None

    spec.check_domain(x)
    dim = spec.dim
    y0 = np.concatenate([x, v,
                         np.zeros(dim), [1.0, 0.0],
                         np.zeros(dim), [0.0, 1.0]])
    rhs = _augmented_rhs_factory(spec, dim)
    sol = solve_ivp(rhs, (0.0, horizon), y0, method="DOP853", rtol=ode_tol,
                    atol=ode_tol * 1e-2, dense_output=True,
                    events=_domain_events(spec))
    if sol.status == -1:
        raise StepFailure(sol.message)
    reached = sol.t[-1]

    def detn(t):
        y = sol.sol(t)
        det = y[4] * y[9] - y[5] * y[8]
        return det / (t * t)

    ts = np.linspace(reached * 1e-4, reached, 2001)
    vals = np.array([detn(t) for t in ts])
    scale = max(1.0, np.max(np.abs(vals[:20])))
    sign_change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if sign_change.size:
        i = sign_change[0]
        t_star = brentq(detn, ts[i], ts[i + 1], xtol=tol)
        return ConjugateResult(float(t_star))
    # tangential touch: |det| dips to ~0 without changing sign
    i_min = int(np.argmin(np.abs(vals)))
    if 0 < i_min < len(ts) - 1 and abs(vals[i_min]) < 1e-9 * scale:
        return ConjugateResult(float(ts[i_min]), tangential=True)
    if reached < horizon * (1.0 - 1e-12):
        raise DomainExceeded(reached)
    return None


# ---------------------------------------------------------------------------
# batched shooting support for the boundary-value solver


def shoot_batch(spec: SpacetimeSpec, x0, V, ode_tol: float = 1e-11):
    """Endpoints exp_x(v_i) and Jacobians d exp_x / dv for a batch of v.

    One stacked ODE solve for all shots; the Jacobian columns are the
    Jacobi fields with J(0)=0, J'(0)=e_j. Profiles are evaluated by their
    formulas even slightly outside a restricted slab (callers enforce chart
    domains on the accepted solutions).
    """
    x0 = np.asarray(x0, dtype=float)
    V = np.atleast_2d(np.asarray(V, dtype=float))
    n = V.shape[0]
    if spec.flat:
        endpoints = x0[None, :] + V
        jac = np.broadcast_to(np.eye(spec.dim), (n, spec.dim, spec.dim))
        return endpoints, jac.copy()

    width = 12  # pos, vel, two jacobi fields
    Y0 = np.zeros((width, n))
    Y0[0:2] = x0[:, None]
    Y0[2:4] = V.T
    Y0[6] = 1.0   # J1'(0) = e_t
    Y0[11] = 1.0  # J2'(0) = e_theta
    rhs = _augmented_rhs_factory(spec, 2)

    def rhs_flat(t, y):
        return rhs(t, y.reshape(width, n)).ravel()

    sol = solve_ivp(rhs_flat, (0.0, 1.0), Y0.ravel(), method="DOP853",
                    rtol=ode_tol, atol=ode_tol * 1e-2)
    if sol.status != 0:
        raise StepFailure(sol.message)
    Y = sol.y[:, -1].reshape(width, n)
    endpoints = Y[0:2].T.copy()
    jac = np.empty((n, 2, 2))
    jac[:, :, 0] = Y[4:6].T   # derivative wrt v_t
    jac[:, :, 1] = Y[8:10].T  # derivative wrt v_theta
    return endpoints, jac
