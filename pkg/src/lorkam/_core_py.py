"""Pure-numpy fallback for the hot flat-chart distance kernel.

Mirrors the compiled extension in ``_core.pyx``; selected automatically by
``lorkam.kernels`` when the extension is unavailable or LORKAM_PURE is set.
"""
import numpy as np

TWO_PI = 2.0 * np.pi

#: relative tolerance for winding ties and for the null verdict
TIE_RTOL = 1e-9


def flat_relation_batch(dt, dsp, winding_bound, periodic):
    """Causal relation and interval length for batches of flat-chart offsets.

    Parameters
    ----------
    dt, dsp : float arrays (same shape)
        Time offset and spatial offset (angle difference for periodic
        charts, Euclidean spatial norm otherwise).
    winding_bound : int
        Max |k| enumerated for periodic charts; ignored otherwise.
    periodic : bool

    Returns
    -------
    d : float array
        Interval length sqrt(max_k (dt^2 - (dsp+2 pi k)^2)); 0 for
        null-related offsets, NaN where not causally related.
    mult : int array
        Number of windings attaining the maximum within tolerance (1 for
        non-periodic charts when related, 0 when unrelated).
    rel : int8 array
        2 chronological, 1 null, 0 not related.
    """
    dt = np.atleast_1d(np.asarray(dt, dtype=float))
    dsp = np.atleast_1d(np.asarray(dsp, dtype=float))
    if periodic:
        ks = np.arange(-winding_bound, winding_bound + 1, dtype=float)
        sep = dsp[..., None] + TWO_PI * ks
        intervals = dt[..., None] ** 2 - sep ** 2
        best = intervals.max(axis=-1)
        tol = TIE_RTOL * (1.0 + np.abs(intervals))
        mult = np.sum(intervals >= best[..., None] - tol, axis=-1)
    else:
        best = dt ** 2 - dsp ** 2
        mult = np.ones(best.shape, dtype=np.int64)

    ntol = TIE_RTOL * (1.0 + dt * dt + dsp * dsp)
    future = dt >= 0.0
    chrono = future & (best > ntol)
    null = future & ~chrono & (best >= -ntol)
    rel = np.zeros(best.shape, dtype=np.int8)
    rel[null] = 1
    rel[chrono] = 2

    d = np.full(best.shape, np.nan)
    d[chrono] = np.sqrt(best[chrono])
    d[null] = 0.0
    if periodic:
        # for null pairs, count null windings instead of max-ties
        if np.any(null):
            nullticks = np.abs(intervals[null]) <= ntol[null][..., None]
            mult = mult.astype(np.int64)
            mult[null] = np.sum(nullticks, axis=-1)
    mult = np.where(rel == 0, 0, mult)
    return d, mult.astype(np.int64), rel
