"""Cut times along causal geodesics, cut classification, and Aubry membership.

The cut time alpha(x, v) is the supremum of parameters t such that the
geodesic s -> exp_x(s v) is distance-maximizing on [0, t]. Maximality is a
monotone property of t, so alpha is located by an expanding search followed
by bisection on the predicate

    d(x, exp_x(t v)) <= t |v|_g + slack(t)

(the reverse inequality always holds). Null directions use the analogous
predicate "exp_x(t v) is still null-related to x".
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distance import ConnectOptions, MaximizerSet, connect, relation
from .errors import ClassificationGap, LorkamError, NotTimelike
from .geodesic import (GeodesicRecord, first_conjugate_time,
                       integrate_geodesic)
from .spacetime import CausalClass, SpacetimeSpec, causal_class, lorentz_norm

DEFAULT_HORIZON = 64.0

#: bisection stops once the bracket is narrower than this (relative)
ALPHA_RTOL = 1e-9

#: relative slack allowed between d(x, gamma(t)) and t |v|_g; flat-chart
#: distances are closed-form, so their slack can sit near machine precision,
#: while warped distances carry the shooting residual
MAXIMALITY_SLACK = 1e-7
MAXIMALITY_SLACK_FLAT = 1e-12


def _slack(spec, t, speed):
    rtol = MAXIMALITY_SLACK_FLAT if spec.flat else MAXIMALITY_SLACK
    return rtol * (1.0 + t * speed)


@dataclass
class CutResult:
    """Outcome of the cut-time search along one causal direction.

    ``status`` is "finite" (alpha found), "horizon" (still maximizing at the
    search horizon) or "domain_boundary" (chart ended first, at ``t_reach``).
    """

    status: str
    alpha: Optional[float] = None
    t_max: float = 0.0
    t_reach: Optional[float] = None
    speed: float = 0.0


def cut_time(spec: SpacetimeSpec, x, v, horizon: float = DEFAULT_HORIZON,
             connect_options: Optional[ConnectOptions] = None) -> CutResult:
    """Cut parameter alpha(x, v) of a future causal direction, if reachable."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    spec.check_domain(x)
    cls = causal_class(spec, x, v)
    if cls not in (CausalClass.FUTURE_TIMELIKE, CausalClass.FUTURE_NULL):
        raise NotTimelike("cut time needs a future causal direction")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    null_ray = cls is CausalClass.FUTURE_NULL
    speed = 0.0 if null_ray else lorentz_norm(spec, x, v)
    opts = connect_options or ConnectOptions()

    ray = integrate_geodesic(spec, x, v, (0.0, horizon))
    t_reach = ray.domain[1]
    boundary = ray.terminated_by == "domain_boundary"
    t_top = t_reach - 1e-9 * (1.0 + abs(t_reach)) if boundary else t_reach

    def maximizing(t: float) -> bool:
        y = ray.position(t)
        if null_ray:
            return relation(spec, x, y) == "null"
        d = connect(spec, x, y, opts).d
        return d <= t * speed + _slack(spec, t, speed)

    # expanding phase
    t_lo = 0.0
    t_hi = None
    t = min(1.0, t_top)
    while True:
        if maximizing(t):
            t_lo = t
            if t >= t_top * (1.0 - 1e-12):
                status = "domain_boundary" if boundary else "horizon"
                return CutResult(status, t_max=t_lo, t_reach=t_reach,
                                 speed=speed)
            t = min(2.0 * t, t_top)
        else:
            t_hi = t
            break

    # bisection on the monotone predicate
    while t_hi - t_lo > ALPHA_RTOL * (1.0 + t_hi):
        mid = 0.5 * (t_lo + t_hi)
        if maximizing(mid):
            t_lo = mid
        else:
            t_hi = mid
    alpha = 0.5 * (t_lo + t_hi)
    return CutResult("finite", alpha=alpha, t_max=t_lo, t_reach=t_reach,
                     speed=speed)


@dataclass
class CutClassification:
    """Why the geodesic stops maximizing at its cut parameter.

    ``kind`` is "multiple_maximizers", "conjugate", or "both"; at a cut
    point at least one of the two mechanisms must be present.
    """

    kind: str
    alpha: float
    cut_point: np.ndarray
    multiplicity: int
    conjugate_parameter: Optional[float] = None
    maximizers: Optional[MaximizerSet] = None


#: relative agreement required to match the conjugate parameter with alpha
CONJUGATE_MATCH_RTOL = 1e-5


def classify_cut(spec: SpacetimeSpec, x, v, result: Optional[CutResult] = None,
                 horizon: float = DEFAULT_HORIZON,
                 connect_options: Optional[ConnectOptions] = None
                 ) -> CutClassification:
    """Classify the cut point of a timelike direction by its mechanism."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if result is None:
        result = cut_time(spec, x, v, horizon=horizon,
                          connect_options=connect_options)
    if result.status != "finite":
        raise ValueError("direction has no reachable cut point to classify")
    alpha = result.alpha
    y = integrate_geodesic(spec, x, v, (0.0, alpha)).position(alpha)
    ms = connect(spec, x, y, connect_options or ConnectOptions())
    multi = ms.multiplicity >= 2
    multiplicity = ms.multiplicity

    conj = first_conjugate_time(spec, x, v, horizon=1.5 * alpha)
    conj_t = conj.t_star if conj is not None else None
    conjugate = (conj_t is not None
                 and abs(conj_t - alpha) <= CONJUGATE_MATCH_RTOL * (1 + alpha))

    if not (multi or conjugate):
        # The cut parameter carries a small bisection bias, which can break
        # the exact length tie at the computed cut point. Probe just beyond
        # it: if the maximizing branch switches away from the ray's own
        # direction there, two distinct maximizing families meet at the cut.
        delta = 1e3 * ALPHA_RTOL * (1.0 + alpha)
        ray = integrate_geodesic(spec, x, v, (0.0, alpha + delta))
        if ray.domain[1] >= alpha + delta:
            y_plus = ray.position(alpha + delta)
            ms_plus = connect(spec, x, y_plus,
                              connect_options or ConnectOptions())
            v_dir = v / np.linalg.norm(v)
            for m in ms_plus.maximizers:
                m_dir = m.v0 / np.linalg.norm(m.v0)
                if np.linalg.norm(m_dir - v_dir) > 1e-3:
                    multi = True
                    multiplicity = max(multiplicity, 2)
                    break

    if multi and conjugate:
        kind = "both"
    elif multi:
        kind = "multiple_maximizers"
    elif conjugate:
        kind = "conjugate"
    else:
        raise ClassificationGap(
            f"cut at alpha={alpha:.9g} shows neither mechanism "
            f"(multiplicity {ms.multiplicity}, conjugate parameter {conj_t})")
    return CutClassification(kind, alpha, y, multiplicity,
                             conjugate_parameter=conj_t, maximizers=ms)


@dataclass
class AubryVerdict:
    """Membership of a causal direction's ray in the future Aubry set.

    ``status``: "not_in_aubry" (a finite cut parameter was found),
    "in_aubry_up_to_horizon" (maximizing as far as the search went), or
    "domain_incomplete" (the chart ended before any verdict).
    """

    status: str
    alpha: Optional[float] = None
    t_checked: float = 0.0
    t_reach: Optional[float] = None


def in_future_aubry(spec: SpacetimeSpec, x, v,
                    horizon: float = DEFAULT_HORIZON,
                    connect_options: Optional[ConnectOptions] = None
                    ) -> AubryVerdict:
    """Whether the ray t -> exp_x(t v) stays maximizing (is a future ray).

    A finite cut parameter is a definitive exclusion; an unbounded chart
    only ever yields a verdict up to the chosen horizon, and a bounded
    chart that ends before any cut is reported as incomplete.
    """
    res = cut_time(spec, x, v, horizon=horizon,
                   connect_options=connect_options)
    if res.status == "finite":
        return AubryVerdict("not_in_aubry", alpha=res.alpha,
                            t_checked=res.t_max, t_reach=res.t_reach)
    if res.status == "domain_boundary":
        return AubryVerdict("domain_incomplete", t_checked=res.t_max,
                            t_reach=res.t_reach)
    return AubryVerdict("in_aubry_up_to_horizon", t_checked=res.t_max,
                        t_reach=res.t_reach)


@dataclass
class NUResult:
    in_nu: bool
    reason: str
    multiplicity: int = 0
    maximizers: Optional[MaximizerSet] = None


def is_nu(spec: SpacetimeSpec, x, y, timelike: bool = True,
          connect_options: Optional[ConnectOptions] = None) -> NUResult:
    """Whether (x, y) lies in the non-uniqueness set: joined by at least
    two distinct maximizing geodesics (the singular set of the distance).

    With ``timelike`` (the default) the pair must moreover be
    chronologically related — the variant relevant for the smoothing map,
    whose images carry two timelike maximizers.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    try:
        ms = connect(spec, x, y, connect_options or ConnectOptions())
    except LorkamError as exc:
        return NUResult(False, f"not causally related ({exc})")
    if timelike and ms.rel != "chronological":
        return NUResult(False, "pair is null-related, not chronological",
                        multiplicity=ms.multiplicity, maximizers=ms)
    if ms.multiplicity >= 2:
        return NUResult(True, f"{ms.multiplicity} distinct maximizers",
                        multiplicity=ms.multiplicity, maximizers=ms)
    return NUResult(False, "maximizing geodesic is unique",
                    multiplicity=ms.multiplicity, maximizers=ms)
