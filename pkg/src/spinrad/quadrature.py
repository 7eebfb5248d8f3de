"""Shared adaptive quadrature used by the radiation, statistics and two-body layers.

Panels use the adaptive Gauss-Kronrod rule from ``scipy.integrate.quad_vec``:
nodes are strictly interior, so integrable endpoint singularities (the
removable n(omega - Omega*m) divergence) are never evaluated, and vector
integrands share panels, which keeps linear identities such as
Q = Omega*M - P exact to roundoff.
"""

import numpy as np
from scipy.integrate import quad_vec

from .errors import ConvergenceError


def adaptive_integral(f, a, b, *, epsabs=1e-300, epsrel=1e-9, limit=300):
    """Integrate a scalar or vector integrand over (a, b).

    Returns (value, error_estimate).  Raises :class:`ConvergenceError` when
    the subdivision limit is hit without meeting the tolerance.
    """
    if b <= a:
        probe = np.asarray(f(0.5 * (a + b) if b > a else a))
        return np.zeros_like(probe, dtype=float), 0.0
    val, err, info = quad_vec(
        f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, norm="max", full_output=True
    )
    scale = np.max(np.abs(val)) if np.ndim(val) else abs(val)
    if not info.success and err > max(epsabs, epsrel * scale) * 50:
        raise ConvergenceError(
            f"quadrature on ({a:g}, {b:g}) stalled: err={err:g} after {info.intervals.shape[0]} panels"
        )
    return val, float(err)


def integrate_segments(f, points, **kw):
    """Integrate over consecutive segments defined by sorted breakpoints."""
    points = sorted(points)
    total = None
    err = 0.0
    for a, b in zip(points[:-1], points[1:]):
        if b <= a:
            continue
        val, e = adaptive_integral(f, a, b, **kw)
        total = val if total is None else total + val
        err += e
    if total is None:
        raise ConvergenceError("empty integration domain")
    return total, err
