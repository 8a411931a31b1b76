"""Lax-Oleinik evolution of pointed costs and the smoothing map built on it.

For a base point x and horizons t > s > 0 the forward value is the cost
u(z) = -sqrt(t) sqrt(d(x, z)); the backward half-step regularizes it:

    (reg value at y) = sup_z [ -sqrt(t) sqrt(d(x, z)) + sqrt(s) sqrt(d(y, z)) ]

with z ranging over the common causal future of x and y. The supremum is
attained inside the reference-metric ball of radius C0 sqrt(s) around y;
an argmax pinned to that ball's boundary means the constant C0 is too
small for the input and is reported as an error rather than silently
truncated. Evaluating at z = y shows the regularized value is >= u(y),
and shrinking the curve budget gives the upper bound u_{t-s}(y); both
inequalities are exposed as a checkable sandwich.

The argmax z itself is the smoothing map F(s, x, y); its reparameterized
form with a step budget, F-bar, is what the deformation retractions use.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .distance import action_cost, connect, relation_d_batch
from .errors import NotCausallyRelated, NUCheckFailed, SearchBoundaryHit
from .spacetime import TWO_PI, SpacetimeSpec, reference_distance

DEFAULT_C0 = 10.0
DEFAULT_S_MAX = 0.1


@dataclass(frozen=True)
class LOOptions:
    """Tuning knobs for the inner maximization."""

    C0: float = DEFAULT_C0
    s_max: float = DEFAULT_S_MAX
    grid_n: int = 31          # per-axis resolution of the coarse grid
    levels: int = 3           # successive grid refinements
    polish_xatol: float = 1e-11
    boundary_frac: float = 0.98
    multi_tol: float = 1e-6   # value closeness for the multiplicity flag
    multi_sep: float = 0.05   # separation (fraction of radius) for distinctness
    verify_nu: bool = False
    jitter_seed: Optional[int] = None  # randomize grid placement (restarts)


def _objective_batch(spec, t, s, x, y, Z):
    """Vectorized sup objective; -inf where z leaves J+(x) or J+(y)."""
    dxz, relx = relation_d_batch(spec, x, Z)
    dyz, rely = relation_d_batch(spec, y, Z)
    valid = (relx > 0) & (rely > 0)
    out = np.full(np.shape(dxz), -np.inf)
    if np.any(valid):
        out[valid] = (-math.sqrt(t) * np.sqrt(dxz[valid])
                      + math.sqrt(s) * np.sqrt(dyz[valid]))
    return out


def _cube_offsets(dim, n):
    axes = [np.linspace(-1.0, 1.0, n)] * dim
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    return grid.reshape(-1, dim)


def _in_domain_mask(spec, Z):
    lo, hi = spec.t_domain
    return (Z[:, 0] > lo) & (Z[:, 0] < hi)


def _ridge_candidates(spec, t, s, x, y, radius):
    """Candidates on the equal-winding ridge of a flat periodic chart.

    On the circle the distance from x has a crease at angle theta_x + pi
    (two windings tie); maximizers of the regularized objective often sit
    exactly there, so scan the time coordinate along that line.
    """
    if not (spec.flat and spec.periodic):
        return []
    theta = x[1] + math.pi
    # keep the representative of the crease line nearest to y
    theta += TWO_PI * round((y[1] - theta) / TWO_PI)

    def neg_obj(tz):
        z = np.array([[tz, theta]])
        v = _objective_batch(spec, t, s, x, y, z)[0]
        return -v if np.isfinite(v) else 1e30

    lo = y[0] - radius
    hi = y[0] + radius
    res = minimize_scalar(neg_obj, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    if not np.isfinite(res.fun):
        return []
    return [np.array([res.x, theta])]


def _branch_terms(spec, base, z, k):
    """Value/gradient/Hessian of the squared interval on one winding branch."""
    dt = z[0] - base[0]
    if spec.periodic:
        ds = np.array([z[1] - base[1] + TWO_PI * k])
    else:
        ds = z[1:] - base[1:]
    A = dt * dt - float(ds @ ds)
    gA = np.concatenate([[2.0 * dt], -2.0 * ds])
    hA = np.diag([2.0] + [-2.0] * len(ds))
    return A, gA, hA


def _best_winding(spec, base, z):
    if not spec.periodic:
        return 0
    ks = np.arange(-spec.winding_bound, spec.winding_bound + 1)
    vals = (z[0] - base[0]) ** 2 - (z[1] - base[1] + TWO_PI * ks) ** 2
    return int(ks[np.argmax(vals)])


def _polish_flat(spec, t, s, x, y, z0):
    """Newton ascent on the smooth branch of the objective through z0.

    The branch fixes the maximizing windings at z0; the branch value
    -sqrt(t) A^(1/4) + sqrt(s) B^(1/4) is smooth wherever both squared
    intervals stay positive, with closed-form derivatives. Returns None
    when z0 is not strictly inside both chronological branches.
    """
    kx = _best_winding(spec, x, z0)
    ky = _best_winding(spec, y, z0)
    st, ss = math.sqrt(t), math.sqrt(s)
    z = np.asarray(z0, dtype=float).copy()

    def fgH(z):
        A, gA, hA = _branch_terms(spec, x, z, kx)
        B, gB, hB = _branch_terms(spec, y, z, ky)
        if A <= 1e-14 or B <= 1e-14:
            return None
        f = -st * A ** 0.25 + ss * B ** 0.25
        g = -st * 0.25 * A ** -0.75 * gA + ss * 0.25 * B ** -0.75 * gB
        H = (-st * (0.25 * A ** -0.75 * hA
                    - 0.1875 * A ** -1.75 * np.outer(gA, gA))
             + ss * (0.25 * B ** -0.75 * hB
                     - 0.1875 * B ** -1.75 * np.outer(gB, gB)))
        return f, g, H

    cur = fgH(z)
    if cur is None:
        return None
    for _ in range(60):
        f, g, H = cur
        if np.linalg.norm(g) < 1e-13:
            break
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            step = g  # fall back to plain ascent
        if step @ g < 0:
            step = g
        lam = 1.0
        nxt = None
        for _bt in range(30):
            cand = fgH(z + lam * step)
            if cand is not None and cand[0] >= f - 1e-15:
                nxt = cand
                z = z + lam * step
                break
            lam *= 0.5
        if nxt is None:
            break
        if nxt[0] - f < 1e-16 and np.linalg.norm(lam * step) < 1e-13:
            cur = nxt
            break
        cur = nxt
    return z


@dataclass
class RegularizedValue:
    """One evaluation of the backward half-step at y."""

    value: float
    argmax: np.ndarray
    radius: float
    boundary_distance: float   # reference distance of argmax from y
    multiple_flag: bool
    near_optima: List[np.ndarray]


def regularized_value(spec: SpacetimeSpec, t: float, s: float, x, y,
                      options: Optional[LOOptions] = None) -> RegularizedValue:
    """sup_z [ -sqrt(t) sqrt(d(x,z)) + sqrt(s) sqrt(d(y,z)) ] at one y.

    Requires 0 < s < t and y in the causal future of x. The search covers
    the reference ball of radius C0 sqrt(s) around y by refined grids plus
    a derivative-free polish; z = y is always a candidate, so the result
    is never below the unregularized value.
    """
    opts = options or LOOptions()
    if not 0.0 < s < t:
        raise ValueError("need 0 < s < t")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    spec.check_domain(x)
    spec.check_domain(y)
    base = action_cost(spec, t, x, y)
    if math.isinf(base):
        raise NotCausallyRelated("y is not in the causal future of x")

    radius = opts.C0 * math.sqrt(s)
    dim = spec.dim
    offsets = _cube_offsets(dim, opts.grid_n)

    rng = (np.random.default_rng(opts.jitter_seed)
           if opts.jitter_seed is not None else None)
    center = y.copy()
    width = radius
    best_z, best_f = y.copy(), base
    top: List[np.ndarray] = []
    top_f: List[float] = []
    for _ in range(opts.levels):
        shift = (rng.uniform(-1.0, 1.0, dim) * width / (opts.grid_n - 1)
                 if rng is not None else 0.0)
        Z = center[None, :] + shift + width * offsets
        inball = np.array([reference_distance(spec, y, z) <= radius + 1e-12
                           for z in Z])
        dom = _in_domain_mask(spec, Z)
        Z = Z[inball & dom]
        if Z.size == 0:
            break
        f = _objective_batch(spec, t, s, x, y, Z)
        i = int(np.argmax(f))
        if f[i] > best_f:
            best_f = float(f[i])
            best_z = Z[i].copy()
        # collect well-separated near-optimal grid points for the flag
        order = np.argsort(f)[::-1][:64]
        top = [Z[j].copy() for j in order if np.isfinite(f[j])]
        top_f = [float(f[j]) for j in order if np.isfinite(f[j])]
        center = best_z
        width *= 2.2 / (opts.grid_n - 1)

    candidates = [best_z, y.copy()]
    candidates += _ridge_candidates(spec, t, s, x, y, radius)
    # polish separated near-optima too, so ties are measured accurately
    sep = opts.multi_sep * radius
    for z in top:
        if all(reference_distance(spec, z, c) > sep for c in candidates):
            candidates.append(z)
        if len(candidates) >= 8:
            break

    def neg(z):
        v = _objective_batch(spec, t, s, x, y, z[None, :])[0]
        return -v if np.isfinite(v) else 1e30

    polished = []
    for z0 in candidates:
        # keep the unpolished candidate too: ridge points sit on a crease
        # where the one-branch Newton ascent would walk off the optimum
        f0 = _objective_batch(spec, t, s, x, y, np.asarray(z0)[None, :])[0]
        if np.isfinite(f0):
            polished.append((np.asarray(z0, dtype=float), float(f0)))
        zp = _polish_flat(spec, t, s, x, y, z0) if spec.flat else None
        if zp is None:
            res = minimize(neg, z0, method="Nelder-Mead",
                           options={"xatol": opts.polish_xatol,
                                    "fatol": 1e-14, "maxiter": 400})
            zp = res.x
        fp = _objective_batch(spec, t, s, x, y, np.asarray(zp)[None, :])[0]
        if np.isfinite(fp) and reference_distance(spec, y, zp) <= radius * 1.001:
            polished.append((np.asarray(zp, dtype=float), float(fp)))
    polished.append((y.copy(), base))
    zstar, fstar = max(polished, key=lambda p: p[1])

    near = [zstar]
    tol = opts.multi_tol * (1.0 + abs(fstar))
    for zp, fp in polished:
        if fstar - fp <= tol and all(
                reference_distance(spec, zp, q) > sep for q in near):
            near.append(zp)
    for z, f in zip(top, top_f):
        if fstar - f <= tol and all(
                reference_distance(spec, z, q) > sep for q in near):
            near.append(z)

    bdist = reference_distance(spec, y, zstar)
    if bdist >= opts.boundary_frac * radius:
        raise SearchBoundaryHit(
            f"argmax at reference distance {bdist:.6g} of search radius "
            f"{radius:.6g}; increase C0")
    return RegularizedValue(float(fstar), np.asarray(zstar), radius, bdist,
                            multiple_flag=len(near) > 1, near_optima=near)


@dataclass
class SandwichReport:
    lower_ok: bool
    upper_ok: bool
    value: float
    lower: float
    upper: float
    slack_lower: float
    slack_upper: float


def sandwich_check(spec: SpacetimeSpec, t: float, s: float, x, y,
                   tol: float = 1e-7,
                   options: Optional[LOOptions] = None) -> SandwichReport:
    """Verify cost_t(x,y) <= regularized value <= cost_{t-s}(x,y) at y."""
    rv = regularized_value(spec, t, s, x, y, options)
    lower = action_cost(spec, t, x, y)
    upper = action_cost(spec, t - s, x, y)
    sl = rv.value - lower
    su = upper - rv.value
    scale = 1.0 + abs(lower) + abs(upper)
    return SandwichReport(sl >= -tol * scale, su >= -tol * scale, rv.value,
                          lower, upper, sl, su)


@dataclass
class SmoothingResult:
    z: np.ndarray
    value: float
    s: float
    multiple_flag: bool
    nu_checked: bool = False


def f_map(spec: SpacetimeSpec, s: float, x, y,
          options: Optional[LOOptions] = None) -> SmoothingResult:
    """F(s, x, y): the argmax of the backward half-step with t = 1 + s.

    With ``verify_nu`` set, additionally checks that (x, z) lies in the
    non-uniqueness set (two or more timelike maximizers meet at z), and
    raises NUCheckFailed otherwise.
    """
    opts = options or LOOptions()
    rv = regularized_value(spec, 1.0 + s, s, x, y, opts)
    out = SmoothingResult(rv.argmax, rv.value, s, rv.multiple_flag)
    if opts.verify_nu:
        from .cutlocus import is_nu
        res = is_nu(spec, x, rv.argmax)
        if not res.in_nu:
            raise NUCheckFailed(
                f"smoothed point failed uniqueness check: {res.reason}")
        out.nu_checked = True
    return out


def f_bar(spec: SpacetimeSpec, tau: float, x, y, eps: float = 1.0,
          options: Optional[LOOptions] = None) -> SmoothingResult:
    """F-bar(tau, x, y): smoothing with step budget s = tau * step_cap.

    ``step_cap = min(s_max, (eps / C0)^2)`` guarantees the inner search
    stays inside an eps-ball; tau = 0 is the identity in y.
    """
    opts = options or LOOptions()
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if tau == 0.0:
        y = np.asarray(y, dtype=float)
        return SmoothingResult(y.copy(), action_cost(spec, 1.0, x, y), 0.0,
                               False)
    s = tau * min(opts.s_max, (eps / opts.C0) ** 2)
    return f_map(spec, s, x, y, opts)


def value_field(spec: SpacetimeSpec, t: float, s: float, x, Ys,
                options: Optional[LOOptions] = None) -> np.ndarray:
    """Regularized values on a batch of evaluation points (coarse search).

    Grid-only (no polish) variant for field plots and benchmarks; NaN
    where y is not in the causal future of x.
    """
    opts = options or LOOptions()
    Ys = np.atleast_2d(np.asarray(Ys, dtype=float))
    radius = opts.C0 * math.sqrt(s)
    offsets = _cube_offsets(spec.dim, opts.grid_n) * radius
    out = np.full(Ys.shape[0], np.nan)
    _, rel = relation_d_batch(spec, x, Ys)
    for i, y in enumerate(Ys):
        if rel[i] == 0:
            continue
        Z = y[None, :] + offsets
        Z = Z[_in_domain_mask(spec, Z)]
        f = _objective_batch(spec, t, s, x, y, Z)
        fy = _objective_batch(spec, t, s, x, y, y[None, :])[0]
        out[i] = max(float(np.max(f)), float(fy))
    return out
