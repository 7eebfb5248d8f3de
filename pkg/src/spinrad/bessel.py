"""Cylindrical and spherical Bessel/Hankel functions of integer order.

Thin, guarded layer over ``scipy.special`` (AMOS) providing complex
arguments, the exact derivative recurrence C'_m(z) = C_{m-1}(z) - (m/z) C_m(z),
and the Hankel Wronskian used by the disk scattering matrix.  Orders are
capped at |m| <= 200 and arguments at |z| <= 1e4; outside that range, or when
the backend overflows, a :class:`DomainError` is raised instead of returning
NaN.
"""

import numpy as np
import scipy.special as sc

from .errors import DomainError

ORDER_MAX = 200
ARG_MAX = 1.0e4


def _check(m, z, *, nonzero=False):
    if int(m) != m:
        raise DomainError(f"order must be an integer, got {m!r}")
    if abs(m) > ORDER_MAX:
        raise DomainError(f"order |m|={abs(m)} exceeds cap {ORDER_MAX}")
    if abs(z) > ARG_MAX:
        raise DomainError(f"|z|={abs(z):g} exceeds cap {ARG_MAX:g}")
    if nonzero and z == 0:
        raise DomainError("argument z = 0 is singular here")


def _guard(value, what, m, z):
    value = complex(value)
    if not (np.isfinite(value.real) and np.isfinite(value.imag)):
        raise DomainError(f"{what} overflowed at order {m}, argument {z!r}")
    return value


def bessel_j(m, z):
    """Bessel function of the first kind J_m(z), integer m, complex z."""
    _check(m, z)
    if m < 0:
        return (-1) ** (-m) * bessel_j(-m, z)
    if z == 0:
        return complex(1.0 if m == 0 else 0.0)
    z = complex(z)
    if z.imag == 0.0:
        # the complex AMOS path leaves ~1e-18 imaginary crumbs on real input,
        # which would break exact identities (e.g. zero flux at corotation)
        return complex(float(sc.jv(m, z.real)))
    return _guard(sc.jv(m, z), "J", m, z)


def bessel_j_deriv(m, z):
    """dJ_m/dz via the recurrence J'_m = J_{m-1} - (m/z) J_m."""
    _check(m, z)
    if m < 0:
        return (-1) ** (-m) * bessel_j_deriv(-m, z)
    if z == 0:
        # J_m ~ (z/2)^m / m!: derivative at the origin
        return complex(0.5 if m == 1 else 0.0)
    return bessel_j(m - 1, z) - (m / z) * bessel_j(m, z)


def hankel(kind, m, z):
    """Hankel function H^(kind)_m(z) of the first (1) or second (2) kind."""
    if kind not in (1, 2):
        raise DomainError(f"kind must be 1 or 2, got {kind!r}")
    _check(m, z, nonzero=True)
    if m < 0:
        return (-1) ** (-m) * hankel(kind, -m, z)
    fn = sc.hankel1 if kind == 1 else sc.hankel2
    return _guard(fn(m, complex(z)), f"H{kind}", m, z)


def hankel_deriv(kind, m, z):
    """dH^(kind)_m/dz via the recurrence C'_m = C_{m-1} - (m/z) C_m."""
    if kind not in (1, 2):
        raise DomainError(f"kind must be 1 or 2, got {kind!r}")
    _check(m, z, nonzero=True)
    if m < 0:
        return (-1) ** (-m) * hankel_deriv(kind, -m, z)
    return hankel(kind, m - 1, z) - (m / z) * hankel(kind, m, z)


def bessel_y(m, x):
    """Bessel function of the second kind Y_m(x), real x > 0."""
    _check(m, x, nonzero=True)
    if x < 0:
        raise DomainError("Y_m is real only for x > 0")
    if m < 0:
        return (-1) ** (-m) * bessel_y(-m, x)
    return _guard(sc.yv(m, x), "Y", m, x).real


def bessel_y_deriv(m, x):
    """dY_m/dx via the recurrence C'_m = C_{m-1} - (m/x) C_m."""
    _check(m, x, nonzero=True)
    if m < 0:
        return (-1) ** (-m) * bessel_y_deriv(-m, x)
    return bessel_y(m - 1, x) - (m / x) * bessel_y(m, x)


def wronskian_h1h2(m, x):
    """Wronskian H^(1)_m(x) d/dx H^(2)_m(x) - d/dx H^(1)_m(x) H^(2)_m(x).

    Equals -4i/(pi x) for every order.  Expanding H^(1,2) = J +- iY reduces
    the combination to -2i (J_m Y'_m - J'_m Y_m); that form is evaluated
    here because the direct product of Hankel functions loses all digits to
    cancellation once |H_m(x)| is large (high order, small argument).
    """
    if x <= 0:
        raise DomainError(f"Wronskian needs x > 0, got {x!r}")
    j = bessel_j(m, x).real
    y = bessel_y(m, x)
    jp = bessel_j_deriv(m, x).real
    yp = bessel_y_deriv(m, x)
    return -2j * (j * yp - jp * y)


def sph_bessel(kind, l, z):
    """Spherical Bessel j_l(z) (kind 'j') or Hankel h^(1)_l(z) (kind 'h1').

    Complex arguments use the half-order relation f_l(z) =
    sqrt(pi/2z) F_{l+1/2}(z) on the principal square-root branch.
    """
    if l < 0 or int(l) != l:
        raise DomainError(f"spherical order must be an integer l >= 0, got {l!r}")
    if abs(z) > ARG_MAX:
        raise DomainError(f"|z|={abs(z):g} exceeds cap {ARG_MAX:g}")
    if kind == "j":
        if z == 0:
            return complex(1.0 if l == 0 else 0.0)
        if l == 0:
            return complex(np.sin(complex(z)) / complex(z))
        val = sc.jv(l + 0.5, complex(z)) * np.sqrt(np.pi / (2 * complex(z)))
        return _guard(val, "j", l, z)
    if kind == "h1":
        if z == 0:
            raise DomainError("h^(1)_l is singular at z = 0")
        if l == 0:
            return -1j * np.exp(1j * complex(z)) / complex(z)
        val = sc.hankel1(l + 0.5, complex(z)) * np.sqrt(np.pi / (2 * complex(z)))
        return _guard(val, "h1", l, z)
    raise DomainError(f"kind must be 'j' or 'h1', got {kind!r}")
