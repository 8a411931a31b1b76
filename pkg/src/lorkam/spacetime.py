"""Model spacetimes and the pointwise geometric operations on them.

Three chart families are supported, all with time function t stored as
coordinate 0 and metric signature (-, +, ..., +):

* ``minkowski`` in dimension 2 or 3 (flat, topologically trivial),
* ``cylinder``: flat product R_t x S^1 with metric -dt^2 + dtheta^2,
* ``warped``: R_t x S^1 with metric -dt^2 + a(t)^2 dtheta^2 for a
  positive profile a, possibly restricted to an open t-slab.

Angular coordinates are stored as real representatives; the identification
theta ~ theta + 2*pi is handled by the operations, never by mutating points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, NotTimelike

TWO_PI = 2.0 * math.pi

# scale-aware tolerance used to classify a vector as null
NULL_RTOL = 1e-9

DEFAULT_WINDING_BOUND = 8


def wrap_angle(theta):
    """Map an angle (or array of angles) to its representative in (-pi, pi]."""
    w = np.mod(np.asarray(theta) + math.pi, TWO_PI) - math.pi
    return np.where(w == -math.pi, math.pi, w) if np.ndim(w) else (
        math.pi if w == -math.pi else float(w))


class CausalClass(Enum):
    FUTURE_TIMELIKE = "future-timelike"
    FUTURE_NULL = "future-null"
    PAST_TIMELIKE = "past-timelike"
    PAST_NULL = "past-null"
    SPACELIKE = "spacelike"
    ZERO = "zero"


_FUTURE_CAUSAL = (CausalClass.FUTURE_TIMELIKE, CausalClass.FUTURE_NULL,
                  CausalClass.ZERO)


@dataclass(frozen=True)
class WarpProfile:
    """Scale factor a(t) of a warped product, with derivatives and domain."""

    name: str
    a: Callable
    da: Callable
    dda: Callable
    t_domain: tuple  # open interval; +-inf for unbounded

    def contains(self, t, margin=0.0):
        lo, hi = self.t_domain
        return lo + margin < t < hi - margin


def _const_one(t):
    return np.ones_like(np.asarray(t, dtype=float))


def _const_zero(t):
    return np.zeros_like(np.asarray(t, dtype=float))


_BUILTIN_PROFILES = {
    "one": (lambda t: _const_one(t) * 1.0, _const_zero, _const_zero),
    "cosh": (np.cosh, np.sinh, np.cosh),
    "2+cos": (lambda t: 2.0 + np.cos(t), lambda t: -np.sin(t),
              lambda t: -np.cos(t)),
}


def make_profile(name: str, t_domain=None) -> WarpProfile:
    """Build a named warp profile, optionally restricted to an open t-slab."""
    if name not in _BUILTIN_PROFILES:
        raise ValueError(f"unknown profile {name!r}; "
                         f"choose from {sorted(_BUILTIN_PROFILES)}")
    a, da, dda = _BUILTIN_PROFILES[name]
    dom = tuple(t_domain) if t_domain is not None else (-math.inf, math.inf)
    return WarpProfile(name, a, da, dda, dom)


def tabulated_profile(ts: Sequence[float], values: Sequence[float]) -> WarpProfile:
    """Profile interpolated from samples by a cubic spline.

    The valid domain is the open sampling interval.
    """
    from scipy.interpolate import CubicSpline

    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0):
        raise ValueError("warp profile must be strictly positive")
    spl = CubicSpline(ts, values)
    return WarpProfile("tabulated", spl, spl.derivative(1), spl.derivative(2),
                       (float(ts[0]), float(ts[-1])))


@dataclass(frozen=True)
class SpacetimeSpec:
    """Immutable description of one model spacetime.

    All operations taking a spec are pure functions and thread-safe.
    """

    kind: str  # "minkowski" | "cylinder" | "warped"
    dim: int = 2
    profile: Optional[WarpProfile] = None
    winding_bound: int = DEFAULT_WINDING_BOUND

    def __post_init__(self):
        if self.kind not in ("minkowski", "cylinder", "warped"):
            raise ValueError(f"unknown spacetime kind {self.kind!r}")
        if self.kind == "minkowski" and self.dim not in (2, 3):
            raise ValueError("minkowski supports dim 2 or 3")
        if self.kind in ("cylinder", "warped") and self.dim != 2:
            raise ValueError(f"{self.kind} is two-dimensional")
        if self.kind == "warped" and self.profile is None:
            raise ValueError("warped spec needs a profile")
        if self.winding_bound < 1:
            raise ValueError("winding_bound must be >= 1")

    @property
    def periodic(self) -> bool:
        return self.kind in ("cylinder", "warped")

    @property
    def flat(self) -> bool:
        return self.kind in ("minkowski", "cylinder")

    @property
    def t_domain(self) -> tuple:
        if self.kind == "warped":
            return self.profile.t_domain
        return (-math.inf, math.inf)

    def check_domain(self, x) -> None:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected point of dimension {self.dim}, "
                             f"got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise DomainError("point has non-finite coordinates")
        lo, hi = self.t_domain
        if not lo < x[0] < hi:
            raise DomainError(f"t={x[0]:.6g} outside open domain ({lo}, {hi})")


def minkowski(dim: int = 2) -> SpacetimeSpec:
    return SpacetimeSpec("minkowski", dim=dim)


def cylinder(winding_bound: int = DEFAULT_WINDING_BOUND) -> SpacetimeSpec:
    return SpacetimeSpec("cylinder", winding_bound=winding_bound)


def warped(profile, t_domain=None,
           winding_bound: int = DEFAULT_WINDING_BOUND) -> SpacetimeSpec:
    if isinstance(profile, str):
        profile = make_profile(profile, t_domain=t_domain)
    elif t_domain is not None:
        profile = WarpProfile(profile.name, profile.a, profile.da,
                              profile.dda, tuple(t_domain))
    return SpacetimeSpec("warped", profile=profile,
                         winding_bound=winding_bound)


def spec_from_config(config: dict) -> SpacetimeSpec:
    """Build a spec from the JSON-serializable configuration record.

    Schema: ``{kind, dim?, profile?, winding_bound?, t_domain?}``.
    """
    kind = config["kind"]
    kw = int(config.get("winding_bound", DEFAULT_WINDING_BOUND))
    if kind == "minkowski":
        return SpacetimeSpec("minkowski", dim=int(config.get("dim", 2)),
                             winding_bound=kw)
    if kind == "cylinder":
        return cylinder(winding_bound=kw)
    if kind == "warped":
        return warped(config.get("profile", "one"),
                      t_domain=config.get("t_domain"), winding_bound=kw)
    raise ValueError(f"unknown spacetime kind {kind!r}")


def spec_to_config(spec: SpacetimeSpec) -> dict:
    cfg = {"kind": spec.kind, "dim": spec.dim,
           "winding_bound": spec.winding_bound}
    if spec.kind == "warped":
        cfg["profile"] = spec.profile.name
        lo, hi = spec.profile.t_domain
        if math.isfinite(lo) or math.isfinite(hi):
            cfg["t_domain"] = [lo, hi]
    return cfg


# ---------------------------------------------------------------------------
# metric data


def metric_tensor(spec: SpacetimeSpec, x) -> np.ndarray:
    """Metric matrix g_ij at x (symmetric, signature (-,+,...,+))."""
    spec.check_domain(x)
    g = np.eye(spec.dim)
    g[0, 0] = -1.0
    if spec.kind == "warped":
        a = float(spec.profile.a(x[0]))
        g[1, 1] = a * a
    return g


def inverse_metric(spec: SpacetimeSpec, x) -> np.ndarray:
    g = metric_tensor(spec, x)
    inv = np.eye(spec.dim)
    inv[0, 0] = -1.0
    if spec.kind == "warped":
        inv[1, 1] = 1.0 / g[1, 1]
    return inv


def metric_eval(spec: SpacetimeSpec, x, v, w=None) -> float:
    """g_x(v, w); defaults to the quadratic form g_x(v, v)."""
    g = metric_tensor(spec, x)
    v = np.asarray(v, dtype=float)
    w = v if w is None else np.asarray(w, dtype=float)
    return float(v @ g @ w)


def christoffel(spec: SpacetimeSpec, x) -> np.ndarray:
    """Christoffel symbols Gamma^k_{ij} at x, shape (dim, dim, dim)."""
    spec.check_domain(x)
    gam = np.zeros((spec.dim,) * 3)
    if spec.kind == "warped":
        t = x[0]
        a = float(spec.profile.a(t))
        da = float(spec.profile.da(t))
        gam[0, 1, 1] = a * da          # Gamma^t_{theta theta}
        gam[1, 0, 1] = gam[1, 1, 0] = da / a  # Gamma^theta_{t theta}
    return gam


def christoffel_t_derivative(spec: SpacetimeSpec, x) -> np.ndarray:
    """d/dt of the Christoffel symbols at x (zero for flat kinds)."""
    spec.check_domain(x)
    dgam = np.zeros((spec.dim,) * 3)
    if spec.kind == "warped":
        t = x[0]
        a = float(spec.profile.a(t))
        da = float(spec.profile.da(t))
        dda = float(spec.profile.dda(t))
        dgam[0, 1, 1] = da * da + a * dda
        dgam[1, 0, 1] = dgam[1, 1, 0] = dda / a - (da / a) ** 2
    return dgam


# ---------------------------------------------------------------------------
# causal structure


def causal_class(spec: SpacetimeSpec, x, v) -> CausalClass:
    """Classify a tangent vector by the sign of g(v,v) and its dt component.

    The null verdict uses the scale-aware tolerance
    ``|g(v,v)| <= NULL_RTOL * (1 + |v|^2)``; the zero vector is its own class.
    """
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite components")
    if np.all(v == 0.0):
        return CausalClass.ZERO
    q = metric_eval(spec, x, v)
    tol = NULL_RTOL * (1.0 + float(v @ v))
    future = v[0] > 0.0
    if abs(q) <= tol:
        return CausalClass.FUTURE_NULL if future else CausalClass.PAST_NULL
    if q < 0.0:
        return CausalClass.FUTURE_TIMELIKE if future else CausalClass.PAST_TIMELIKE
    return CausalClass.SPACELIKE


def is_future_causal(spec: SpacetimeSpec, x, v) -> bool:
    return causal_class(spec, x, v) in _FUTURE_CAUSAL


def lorentz_norm(spec: SpacetimeSpec, x, v) -> float:
    """|v|_g = sqrt(|g_x(v,v)|)."""
    return math.sqrt(abs(metric_eval(spec, x, v)))


def lagrangian(spec: SpacetimeSpec, x, v) -> float:
    """-|v|_g^(1/2) on the future causal cone, +inf elsewhere."""
    cls = causal_class(spec, x, v)
    if cls not in _FUTURE_CAUSAL:
        return math.inf
    if cls is CausalClass.FUTURE_NULL:
        return 0.0
    return -math.sqrt(lorentz_norm(spec, x, v))


def hamiltonian(spec: SpacetimeSpec, x, p) -> float:
    """1/(4 |p|_g) on the interior of the dual future cone, +inf elsewhere."""
    p = np.asarray(p, dtype=float)
    w = inverse_metric(spec, x) @ p  # raise the index
    if causal_class(spec, x, w) is not CausalClass.FUTURE_TIMELIKE:
        return math.inf
    return 1.0 / (4.0 * math.sqrt(abs(float(p @ w))))


def legendre(spec: SpacetimeSpec, x, v) -> np.ndarray:
    """Fiber derivative of the Lagrangian: p = |v|_g^(-3/2) v_flat / 2."""
    v = np.asarray(v, dtype=float)
    if causal_class(spec, x, v) is not CausalClass.FUTURE_TIMELIKE:
        raise NotTimelike("legendre transform needs a future-timelike vector")
    n = lorentz_norm(spec, x, v)
    return 0.5 * n ** (-1.5) * (metric_tensor(spec, x) @ v)


def legendre_inverse(spec: SpacetimeSpec, x, p) -> np.ndarray:
    """Inverse fiber transform; requires p in the interior dual cone."""
    p = np.asarray(p, dtype=float)
    w = inverse_metric(spec, x) @ p
    if causal_class(spec, x, w) is not CausalClass.FUTURE_TIMELIKE:
        raise NotTimelike("covector is not interior future-causal")
    np_g = math.sqrt(abs(float(p @ w)))
    vnorm = 1.0 / (4.0 * np_g * np_g)
    return 2.0 * vnorm ** 1.5 * w


# ---------------------------------------------------------------------------
# reference (complete Riemannian) metric h


def reference_distance(spec: SpacetimeSpec, x, y) -> float:
    """Distance of the fixed product reference metric dt^2 + dtheta^2.

    Euclidean for Minkowski charts; for periodic charts the angular part is
    the shortest arc on the circle.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if spec.periodic:
        dth = wrap_angle(y[1] - x[1])
        return math.hypot(y[0] - x[0], float(dth))
    return float(np.linalg.norm(y - x))
