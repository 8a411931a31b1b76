"""Deformation retractions onto the cut locus and the Cut -> NU step.

Three homotopies are realized along maximizing geodesics:

* the single-point retraction sliding y to the cut point of its maximizer,
  H(tau, y) = exp_x(((1 - tau) + tau * alpha) v);
* the pair retraction sliding both endpoints to the extremes of the maximal
  maximizing interval, parameterized through the certified extension bounds
  (phi_minus, phi_plus) and the sup parameter beta;
* the step that pushes a cut pair (possibly null or conjugate) into the
  timelike non-uniqueness set by a timelike flow followed by the smoothing
  map.

All maps are pointwise; continuity is validated by trace sampling, not
constructed analytically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .cutlocus import cut_time, is_nu
from .distance import ConnectOptions, connect, lorentz_distance, relation
from .errors import (DomainExceeded, InAubry, InconsistentCut,
                     NUCheckFailed, SafetyBoundHit)
from .geodesic import integrate_geodesic
from .laxoleinik import LOOptions, f_bar
from .spacetime import SpacetimeSpec, reference_distance

#: tolerance for "alpha equals the parameter of y" in degenerate cases
ALPHA_AT_ONE_TOL = 1e-3

#: slack for the "still maximizing on [a, b]" predicate
SEGMENT_SLACK = 1e-7

DEFAULT_HORIZON = 64.0


def _maximizer_velocity(spec, x, y, opts):
    ms = connect(spec, x, y, opts)
    return ms


def retract_point(spec: SpacetimeSpec, x, y, tau: float,
                  horizon: float = DEFAULT_HORIZON,
                  connect_options: Optional[ConnectOptions] = None
                  ) -> np.ndarray:
    """Slide y along its maximizer toward the cut point of that direction.

    With v the maximizer velocity normalized so exp_x(v) = y and alpha its
    cut parameter, returns exp_x(((1 - tau) + tau alpha) v). Multi-maximizer
    inputs are already cut points: each maximizer must then have alpha = 1
    (cross-checked; disagreement raises InconsistentCut) and y is returned
    unchanged for every tau.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    opts = connect_options or ConnectOptions()
    ms = connect(spec, x, y, opts)

    if ms.multiplicity >= 2:
        for m in ms.maximizers:
            res = cut_time(spec, x, m.v0, horizon=horizon,
                           connect_options=opts)
            if res.status != "finite" or abs(res.alpha - 1.0) > ALPHA_AT_ONE_TOL:
                raise InconsistentCut(
                    "multi-maximizer input whose maximizer has cut parameter "
                    f"{res.alpha if res.status == 'finite' else res.status} "
                    "instead of 1")
        return y.copy()

    v = ms.maximizers[0].v0
    res = cut_time(spec, x, v, horizon=horizon, connect_options=opts)
    if res.status == "horizon":
        raise InAubry(f"still maximizing at horizon {res.t_max:.6g}; "
                      "no reachable cut point")
    if res.status == "domain_boundary":
        raise InAubry(f"chart domain ends at parameter {res.t_reach:.6g} "
                      "before any cut point")
    param = (1.0 - tau) + tau * res.alpha
    return integrate_geodesic(spec, x, v, (0.0, param)).position(param)


@dataclass
class PairBounds:
    """Certified interval on which the extended geodesic fails to maximize.

    The witness records how: "length_deficit" (the extended segment is
    strictly shorter than the distance between its endpoints, by ``margin``)
    or "second_maximizer" (the input pair already has two maximizers).
    """

    phi_minus: float
    phi_plus: float
    witness: str
    margin: float = 0.0
    clipped_minus: bool = False
    clipped_plus: bool = False
    v0: Optional[np.ndarray] = None


def _segment_maximizing(spec, ray, a, b, speed, opts):
    """Is the affine segment gamma|[a,b] still distance-maximizing?

    Flat-chart distances are exact (closed form), so the comparison slack
    can sit near machine precision there; warped distances carry the
    shooting residual and need the looser slack.
    """
    pa = ray.position(a)
    pb = ray.position(b)
    length = (b - a) * speed
    d = lorentz_distance(spec, pa, pb)
    rtol = 1e-12 if spec.flat else SEGMENT_SLACK
    slack = rtol * (1.0 + length)
    return d <= length + slack, d - length - slack


def phi_bounds(spec: SpacetimeSpec, x, y,
               horizon: float = DEFAULT_HORIZON,
               connect_options: Optional[ConnectOptions] = None) -> PairBounds:
    """Certified extension parameters (phi_minus <= 0 < 1 < phi_plus).

    Expands b upward from 1.1 and a downward from -0.1 (factor 1.5) until
    the segment gamma|[a, b] is certified non-maximizing; the first hit is
    then widened by a safety factor 1.1 (clipped at the chart domain). A
    two-maximizer input certifies immediately. If the horizon is exhausted
    without certification the pair is reported as InAubry.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    opts = connect_options or ConnectOptions()
    ms = connect(spec, x, y, opts)
    v = ms.maximizers[0].v0
    if ms.multiplicity >= 2:
        return PairBounds(-0.1, 1.1, "second_maximizer",
                          margin=math.inf, v0=v)
    if spec.kind == "minkowski":
        # straight chords maximize globally; no finite certificate exists
        raise InAubry("pair lies on a complete maximizing line")

    speed = ms.maximizers[0].length
    ray = integrate_geodesic(spec, x, v, (-horizon, horizon))
    lo, hi = ray.domain
    clip_lo = lo > -horizon + 1e-9
    clip_hi = hi < horizon - 1e-9
    margin_f = 1e-9
    a, b = -0.1, 1.1
    while True:
        aa = max(a, lo + margin_f * (1 + abs(lo)))
        bb = min(b, hi - margin_f * (1 + abs(hi)))
        ok, margin = _segment_maximizing(spec, ray, aa, bb, speed, opts)
        if not ok:
            a, b = aa, bb
            break
        at_cap = (aa <= lo + 2 * margin_f * (1 + abs(lo)) or not clip_lo
                  and a <= -horizon) and (
                  bb >= hi - 2 * margin_f * (1 + abs(hi)) or not clip_hi
                  and b >= horizon)
        if (a <= max(-horizon, lo) and b >= min(horizon, hi)) or at_cap:
            raise InAubry("extension stays maximizing over the whole "
                          "reachable parameter range")
        a *= 1.5
        b = 1.0 + 1.5 * (b - 1.0)

    # widen the first certified hit, staying inside the chart
    a_s = 1.1 * a
    b_s = 1.0 + 1.1 * (b - 1.0)
    clipped_minus = clipped_plus = False
    if a_s <= lo:
        a_s = a
        clipped_minus = clip_lo
    if b_s >= hi:
        b_s = b
        clipped_plus = clip_hi
    _, final_margin = _segment_maximizing(spec, ray, a_s, b_s, speed, opts)
    return PairBounds(a_s, b_s, "length_deficit", margin=float(final_margin),
                      clipped_minus=clipped_minus, clipped_plus=clipped_plus,
                      v0=v)


def beta_value(spec: SpacetimeSpec, x, y, bounds: Optional[PairBounds] = None,
               tol: float = 1e-10,
               connect_options: Optional[ConnectOptions] = None) -> float:
    """sup of tau in [0, 1) with gamma maximizing on the interpolated interval.

    The interval is [tau phi_minus, (1 - tau) + tau phi_plus]; the sup is
    found by bisection. Pairs with two maximizers have beta = 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    opts = connect_options or ConnectOptions()
    if bounds is None:
        bounds = phi_bounds(spec, x, y, connect_options=opts)
    if bounds.witness == "second_maximizer":
        return 0.0
    v = bounds.v0
    if v is None:
        v = connect(spec, x, y, opts).maximizers[0].v0
    ms = connect(spec, x, y, opts)
    if ms.multiplicity >= 2:
        return 0.0
    speed = ms.maximizers[0].length
    ray = integrate_geodesic(spec, x, v, (min(bounds.phi_minus, 0.0) - 1e-9,
                                          bounds.phi_plus + 1e-9))

    def pred(tau):
        a = tau * bounds.phi_minus
        b = (1.0 - tau) + tau * bounds.phi_plus
        ok, _ = _segment_maximizing(spec, ray, a, b, speed, opts)
        return ok

    lo_t, hi_t = 0.0, 1.0
    if pred(1.0 - 1e-12):
        return 1.0 - 1e-12  # certified bounds should preclude this
    while hi_t - lo_t > tol:
        mid = 0.5 * (lo_t + hi_t)
        if pred(mid):
            lo_t = mid
        else:
            hi_t = mid
    return 0.5 * (lo_t + hi_t)


def retract_pair(spec: SpacetimeSpec, x, y, tau: float,
                 horizon: float = DEFAULT_HORIZON,
                 connect_options: Optional[ConnectOptions] = None
                 ) -> Tuple[np.ndarray, np.ndarray]:
    """Slide a pair to the extremes of its maximal maximizing interval.

    H(tau) = (exp_x(tau beta phi_minus v), exp_x(((1 - tau beta) +
    tau beta phi_plus) v)). Inputs with two maximizers have beta = 0 and
    are fixed for every tau; tau = 1 lands on a pair whose endpoints are
    mutually cut-related.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    opts = connect_options or ConnectOptions()
    ms = connect(spec, x, y, opts)
    if ms.multiplicity >= 2:
        return x.copy(), y.copy()
    bounds = phi_bounds(spec, x, y, horizon=horizon, connect_options=opts)
    beta = beta_value(spec, x, y, bounds, connect_options=opts)
    if beta == 0.0 or tau == 0.0:
        return x.copy(), y.copy()
    v = bounds.v0
    a = tau * beta * bounds.phi_minus
    b = (1.0 - tau * beta) + tau * beta * bounds.phi_plus
    ray = integrate_geodesic(spec, x, v, (min(a, 0.0) - 1e-12, b + 1e-12))
    return ray.position(a), ray.position(b)


def _pair_not_in_aubry(spec, x, y, opts):
    try:
        ms = connect(spec, x, y, opts)
    except Exception:  # noqa: BLE001
        return False
    if ms.rel != "chronological":
        return False
    if ms.multiplicity >= 2:
        return True
    try:
        phi_bounds(spec, x, y, connect_options=opts)
        return True
    except (InAubry, DomainExceeded):
        return False


def cut_to_nu_step(spec: SpacetimeSpec, x, y, tau: float,
                   horizon: float = DEFAULT_HORIZON, eps: float = 1.0,
                   lo_options: Optional[LOOptions] = None,
                   connect_options: Optional[ConnectOptions] = None
                   ) -> Tuple[np.ndarray, np.ndarray]:
    """Push a cut pair into the timelike non-uniqueness set.

    Flows y up the timelike coordinate field for time tau * T (T the
    largest flow time <= 1 keeping the flowed pair off complete maximizing
    lines, found by bisection at 1e-3 resolution), retracts the flowed
    pair, then applies the step-budgeted smoothing map. tau = 0 is the
    identity; tau > 0 outputs are certified to lie in the timelike
    non-uniqueness set (two or more timelike maximizers).
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if tau == 0.0:
        return x.copy(), y.copy()
    opts = connect_options or ConnectOptions()
    lopts = lo_options or LOOptions()

    def flowed(delta):
        return y + np.array([delta] + [0.0] * (spec.dim - 1))

    lo_d, hi_d = 0.0, 1.0
    lo_dom, hi_dom = spec.t_domain
    hi_d = min(hi_d, 0.5 * (hi_dom - y[0])) if math.isfinite(hi_dom) else hi_d
    if hi_d <= 0 or not _pair_not_in_aubry(spec, x, flowed(hi_d), opts):
        # shrink until a working flow time appears
        ok = False
        d = hi_d if hi_d > 0 else 1.0
        for _ in range(12):
            d *= 0.5
            if d > 0 and _pair_not_in_aubry(spec, x, flowed(d), opts):
                ok = True
                break
        if not ok:
            raise SafetyBoundHit("no positive flow time keeps the flowed "
                                 "pair off complete maximizing lines")
        T = d
    else:
        # largest admissible flow time by bisection at 1e-3 resolution
        while hi_d - lo_d > 1e-3:
            mid = 0.5 * (lo_d + hi_d)
            if _pair_not_in_aubry(spec, x, flowed(mid), opts):
                lo_d = mid
            else:
                hi_d = mid
        T = hi_d if _pair_not_in_aubry(spec, x, flowed(hi_d), opts) else lo_d
        if T <= 0:
            raise SafetyBoundHit("no positive flow time keeps the flowed "
                                 "pair off complete maximizing lines")

    yf = flowed(tau * T)
    xp, yp = retract_pair(spec, x, yf, 1.0, horizon=horizon,
                          connect_options=opts)
    sm = f_bar(spec, tau, xp, yp, eps=eps, options=lopts)
    z = sm.z
    verdict = is_nu(spec, xp, z, connect_options=opts)
    if not verdict.in_nu:
        raise NUCheckFailed(f"step output failed certification: "
                            f"{verdict.reason}")
    return xp, z


# ---------------------------------------------------------------------------
# trace sampling


@dataclass
class RetractionTrace:
    """Sampled homotopy with per-sample certification summaries."""

    taus: np.ndarray
    images: List  # points or point-pairs
    max_step: float
    certifications: List[dict] = field(default_factory=list)


def _image_distance(spec, im0, im1):
    if isinstance(im0, tuple):
        return max(reference_distance(spec, im0[0], im1[0]),
                   reference_distance(spec, im0[1], im1[1]))
    return reference_distance(spec, im0, im1)


def sample_trace(spec: SpacetimeSpec, x, y, mode: str, n: int = 100,
                 horizon: float = DEFAULT_HORIZON, eps: float = 1.0,
                 certify: bool = False) -> RetractionTrace:
    """Evaluate a retraction on n equally spaced parameters in [0, 1]."""
    taus = np.linspace(0.0, 1.0, n)
    images = []
    certs = []
    for tau in taus:
        if mode == "point":
            im = retract_point(spec, x, y, tau, horizon=horizon)
        elif mode == "pair":
            im = retract_pair(spec, x, y, tau, horizon=horizon)
        elif mode == "cut2nu":
            im = cut_to_nu_step(spec, x, y, tau, horizon=horizon, eps=eps)
        else:
            raise ValueError(f"unknown trace mode {mode!r}")
        images.append(im)
        if certify:
            if isinstance(im, tuple):
                certs.append({"rel": relation(spec, im[0], im[1])})
            else:
                certs.append({"rel": relation(spec, np.asarray(x, float), im)})
    steps = [_image_distance(spec, images[i], images[i + 1])
             for i in range(len(images) - 1)]
    return RetractionTrace(taus, images, float(max(steps)) if steps else 0.0,
                           certs)
