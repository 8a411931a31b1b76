"""Causal relations, Lorentzian distance, and maximizing connecting geodesics.

Flat charts are handled in closed form through the interval kernel (with
winding enumeration on periodic charts). Warped products go through a
multi-start Newton shooting solver whose Jacobians are exact Jacobi-field
matrices, batched across winding classes in a single stacked ODE solve per
iteration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.integrate import quad

from .errors import (ConvergenceFailure, NotCausallyRelated, NotChronological,
                     SearchBoundaryHit)
from .geodesic import integrate_geodesic, shoot_batch
from .kernels import TIE_RTOL, flat_relation_batch
from .spacetime import (TWO_PI, CausalClass, SpacetimeSpec, causal_class,
                        lorentz_norm)

#: relative tolerance for declaring two connecting velocities distinct
DISTINCT_RTOL = 1e-4

#: relative tolerance for length ties between maximizer candidates
LENGTH_TIE_RTOL = 1e-7


def _flat_offsets(spec: SpacetimeSpec, x, y):
    """(dt, spatial separation) for a flat chart, in kernel convention."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dt = float(y[0] - x[0])
    if spec.periodic:
        dsp = float(y[1] - x[1])
    else:
        dsp = float(np.linalg.norm(y[1:] - x[1:]))
    return dt, dsp


def _warped_null_budget(spec: SpacetimeSpec, tx, ty) -> float:
    """Total angular reach of null curves between time slices: int dt / a."""
    val, _ = quad(lambda t: 1.0 / float(spec.profile.a(t)), tx, ty,
                  epsabs=1e-12, epsrel=1e-12)
    return val


def relation(spec: SpacetimeSpec, x, y) -> str:
    """Causal relation of an ordered pair: "chronological" | "null" | "none".

    "null" means y is on the boundary of the causal future of x (reachable,
    but not by a timelike curve).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    spec.check_domain(x)
    spec.check_domain(y)
    if spec.flat:
        dt, dsp = _flat_offsets(spec, x, y)
        _, _, rel = flat_relation_batch(dt, dsp, spec.winding_bound,
                                        spec.periodic)
        return {0: "none", 1: "null", 2: "chronological"}[int(rel[0])]
    dt = y[0] - x[0]
    if dt < 0:
        return "none"
    budget = _warped_null_budget(spec, x[0], y[0])
    ks = np.arange(-spec.winding_bound, spec.winding_bound + 1)
    gap = np.min(np.abs(y[1] - x[1] + TWO_PI * ks))
    tol = TIE_RTOL * (1.0 + abs(dt) + abs(gap))
    if gap < budget - tol:
        return "chronological"
    if gap <= budget + tol:
        return "null"
    return "none"


@dataclass
class Maximizer:
    """One maximizing connecting geodesic, affinely parameterized on [0, 1]."""

    v0: np.ndarray
    length: float
    winding: Optional[int] = None  # net winding class on periodic charts

    def geodesic(self, spec: SpacetimeSpec, x):
        return integrate_geodesic(spec, x, self.v0, (0.0, 1.0))


@dataclass
class MaximizerSet:
    """All distance-attaining geodesics between a causally related pair."""

    d: float
    rel: str  # "chronological" or "null"
    maximizers: List[Maximizer] = field(default_factory=list)
    candidates: List[Maximizer] = field(default_factory=list)
    residual: float = 0.0

    @property
    def multiplicity(self) -> int:
        return len(self.maximizers)


@dataclass(frozen=True)
class ConnectOptions:
    newton_tol: float = 1e-9
    max_iter: int = 40
    ode_tol: float = 1e-11
    starts_per_winding: int = 3
    distinct_rtol: float = DISTINCT_RTOL
    length_tie_rtol: float = LENGTH_TIE_RTOL
    seed: int = 0


def _winding_interior_check(spec, best_windings):
    K = spec.winding_bound
    for k in best_windings:
        if abs(k) >= K:
            raise SearchBoundaryHit(
                f"maximizing winding k={k} is not interior to [-{K}, {K}]; "
                "increase winding_bound")


def _connect_flat(spec: SpacetimeSpec, x, y, opts: ConnectOptions):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dt, dsp = _flat_offsets(spec, x, y)
    d, _, rel = flat_relation_batch(dt, dsp, spec.winding_bound, spec.periodic)
    rel = int(rel[0])
    if rel == 0:
        raise NotCausallyRelated("pair is not causally related")
    d = float(d[0])

    candidates: List[Maximizer] = []
    if spec.periodic:
        ks = np.arange(-spec.winding_bound, spec.winding_bound + 1)
        seps = y[1] - x[1] + TWO_PI * ks
        ivals = dt * dt - seps ** 2
        for k, sep, q in zip(ks, seps, ivals):
            if q >= -TIE_RTOL * (1.0 + dt * dt + sep * sep):
                length = math.sqrt(max(q, 0.0))
                candidates.append(Maximizer(np.array([dt, sep]), length,
                                            winding=int(k)))
    else:
        candidates.append(Maximizer(y - x, d))

    tie = opts.length_tie_rtol * (1.0 + d)
    maxs = [m for m in candidates if abs(m.length - d) <= tie]
    _winding_interior_check(spec, [m.winding for m in maxs
                                   if m.winding is not None])
    return MaximizerSet(d=d, rel="chronological" if rel == 2 else "null",
                        maximizers=maxs, candidates=candidates)


def _initial_starts(x, target, n, rng):
    chord = target - x
    starts = [chord]
    for _ in range(n - 1):
        pert = 1.0 + 0.35 * rng.standard_normal(chord.shape)
        starts.append(chord * pert)
    return np.array(starts)


def _connect_warped(spec: SpacetimeSpec, x, y, opts: ConnectOptions):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rel = relation(spec, x, y)
    if rel == "none":
        raise NotCausallyRelated("pair is not causally related")

    rng = np.random.default_rng(opts.seed)
    K = spec.winding_bound
    ks = np.arange(-K, K + 1)
    # only windings with enough null budget can carry a causal geodesic
    budget = _warped_null_budget(spec, x[0], y[0])
    gaps = np.abs(y[1] - x[1] + TWO_PI * ks)
    tol = TIE_RTOL * (1.0 + abs(y[0] - x[0]))
    active_ks = [int(k) for k, g in zip(ks, gaps) if g <= budget + tol]

    V, winding_of = [], []
    for k in active_ks:
        target = np.array([y[0], y[1] + TWO_PI * k])
        for s in _initial_starts(x, target, opts.starts_per_winding, rng):
            V.append(s)
            winding_of.append(k)
    if not V:
        raise NotCausallyRelated("no winding class admits a causal curve")
    V = np.array(V)
    targets = np.array([[y[0], y[1] + TWO_PI * k] for k in winding_of])
    scale = 1.0 + np.linalg.norm(targets - x, axis=1)

    active = np.ones(len(V), dtype=bool)
    converged = np.zeros(len(V), dtype=bool)
    for _ in range(opts.max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        endpoints, jac = shoot_batch(spec, x, V[idx], ode_tol=opts.ode_tol)
        res = endpoints - targets[idx]
        rnorm = np.linalg.norm(res, axis=1)
        done = rnorm <= opts.newton_tol * scale[idx]
        converged[idx[done]] = True
        active[idx[done]] = False
        step_idx = idx[~done]
        if step_idx.size == 0:
            break
        try:
            steps = np.linalg.solve(jac[~done], res[~done][..., None])[..., 0]
        except np.linalg.LinAlgError:
            steps = np.array([np.linalg.lstsq(J, r, rcond=None)[0]
                              for J, r in zip(jac[~done], res[~done])])
        # damp large steps to keep the iterates in the solver's basin
        norms = np.linalg.norm(steps, axis=1)
        cap = 2.0 * scale[step_idx]
        big = norms > cap
        steps[big] *= (cap[big] / norms[big])[:, None]
        V[step_idx] -= steps
        diverged = ~np.all(np.isfinite(V[step_idx]), axis=1)
        diverged |= np.linalg.norm(V[step_idx], axis=1) > 50.0 * scale[step_idx]
        active[step_idx[diverged]] = False

    sols: List[Maximizer] = []
    for i in np.nonzero(converged)[0]:
        v = V[i]
        cls = causal_class(spec, x, v)
        if cls not in (CausalClass.FUTURE_TIMELIKE, CausalClass.FUTURE_NULL):
            continue
        length = 0.0 if cls is CausalClass.FUTURE_NULL else lorentz_norm(
            spec, x, v)
        dup = False
        for m in sols:
            if (m.winding == winding_of[i]
                    and np.linalg.norm(m.v0 - v)
                    <= opts.distinct_rtol * (1.0 + np.linalg.norm(v))):
                dup = True
                break
        if not dup:
            sols.append(Maximizer(v.copy(), float(length),
                                  winding=winding_of[i]))

    if not sols:
        if rel == "null":
            return MaximizerSet(d=0.0, rel="null")
        raise ConvergenceFailure(
            "no connecting causal geodesic found for a chronological pair",
            diagnostics={"starts": len(V), "converged": int(converged.sum()),
                         "windings": active_ks})

    d = max(m.length for m in sols)
    tie = opts.length_tie_rtol * (1.0 + d)
    maxs = [m for m in sols if abs(m.length - d) <= tie]
    _winding_interior_check(spec, [m.winding for m in maxs])
    out_rel = "chronological" if d > TIE_RTOL * (1.0 + d) else "null"
    if rel == "null":
        out_rel = "null"
    return MaximizerSet(d=d if out_rel == "chronological" else 0.0,
                        rel=out_rel, maximizers=maxs, candidates=sols)


def connect(spec: SpacetimeSpec, x, y,
            options: Optional[ConnectOptions] = None) -> MaximizerSet:
    """Distance d(x, y) together with every maximizing geodesic.

    Raises NotCausallyRelated when y is outside the causal future of x; a
    null-related pair comes back with d = 0 and the null maximizers.
    """
    opts = options or ConnectOptions()
    spec.check_domain(np.asarray(x, dtype=float))
    spec.check_domain(np.asarray(y, dtype=float))
    if spec.flat:
        return _connect_flat(spec, x, y, opts)
    return _connect_warped(spec, x, y, opts)


def lorentz_distance(spec: SpacetimeSpec, x, y) -> float:
    """d(x, y): sup of lengths of future causal curves, 0 when unrelated."""
    try:
        return connect(spec, x, y).d
    except NotCausallyRelated:
        return 0.0


def relation_d_batch(spec: SpacetimeSpec, x, Y):
    """Vectorized (d, rel) against one base point, for field evaluation.

    ``rel`` uses the kernel encoding: 2 chronological, 1 null, 0 unrelated;
    ``d`` is NaN where unrelated. Flat charts go through the interval
    kernel; warped charts fall back to per-point connect calls.
    """
    x = np.asarray(x, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if spec.flat:
        dt = Y[..., 0] - x[0]
        if spec.periodic:
            dsp = Y[..., 1] - x[1]
        else:
            dsp = np.linalg.norm(Y[..., 1:] - x[1:], axis=-1)
        d, _, rel = flat_relation_batch(dt, dsp, spec.winding_bound,
                                        spec.periodic)
        return d, rel
    flat_Y = Y.reshape(-1, Y.shape[-1])
    d = np.full(flat_Y.shape[0], np.nan)
    rel = np.zeros(flat_Y.shape[0], dtype=np.int8)
    for i, yy in enumerate(flat_Y):
        r = relation(spec, x, yy)
        if r == "none":
            continue
        rel[i] = 2 if r == "chronological" else 1
        d[i] = connect(spec, x, yy).d if r == "chronological" else 0.0
    return d.reshape(Y.shape[:-1]), rel.reshape(Y.shape[:-1])


# ---------------------------------------------------------------------------
# cost / action


def action_cost(spec: SpacetimeSpec, t: float, x, y) -> float:
    """c_t(x, y) = -sqrt(t) * sqrt(d(x, y)); +inf when not causally related."""
    if t <= 0:
        raise ValueError("time horizon t must be positive")
    try:
        ms = connect(spec, x, y)
    except NotCausallyRelated:
        return math.inf
    return -math.sqrt(t) * math.sqrt(ms.d)


def curve_action(spec: SpacetimeSpec, curve, t_span, n_nodes: int = 64):
    """Action integral of -|gamma'(s)|_g^(1/2) along a causal curve.

    ``curve(s)`` must return the position; velocity is taken by central
    differences. The curve must stay future-causal, otherwise +inf.
    """
    lo, hi = t_span
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    ss = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
    h = 1e-6 * (hi - lo)
    total = 0.0
    for s, w in zip(ss, weights):
        pos = np.asarray(curve(s), dtype=float)
        a, b = max(s - h, lo), min(s + h, hi)
        vel = (np.asarray(curve(b), dtype=float)
               - np.asarray(curve(a), dtype=float)) / (b - a)
        cls = causal_class(spec, pos, vel)
        if cls not in (CausalClass.FUTURE_TIMELIKE, CausalClass.FUTURE_NULL,
                       CausalClass.ZERO):
            return math.inf
        total += -w * math.sqrt(lorentz_norm(spec, pos, vel))
    return float(0.5 * (hi - lo) * total)


def superdiff_action(spec: SpacetimeSpec, t: float, x, y) -> List[np.ndarray]:
    """Superdifferential covectors of z -> -sqrt(t) sqrt(d(x, z)) at y.

    One covector per maximizing geodesic: with w the maximizer velocity at
    its endpoint and d = d(x, y) > 0, the gradient of the branch through
    that maximizer is sqrt(t) * g_y w / (2 d^(3/2)). At a singular
    (multi-maximizer) point the returned list has several entries whose
    convex hull is the full superdifferential.
    """
    from .spacetime import metric_tensor

    if t <= 0:
        raise ValueError("time horizon t must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ms = require_chronological(spec, x, y)
    g = metric_tensor(spec, y)
    out = []
    for m in ms.maximizers:
        if spec.flat:
            w = m.v0
        else:
            ray = integrate_geodesic(spec, x, m.v0, (0.0, 1.0))
            w = ray.velocity(1.0)
        out.append(math.sqrt(t) * (g @ w) / (2.0 * ms.d ** 1.5))
    return out


def require_chronological(spec: SpacetimeSpec, x, y) -> MaximizerSet:
    """connect(), but insisting on a timelike relation."""
    ms = connect(spec, x, y)
    if ms.rel != "chronological":
        raise NotChronological("pair is causally but not timelike related")
    return ms
