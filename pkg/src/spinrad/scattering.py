"""Scattering amplitudes for rotating bodies and channel-table plumbing.

Geometries: the exact rotating scalar disk (partial-wave matching of Bessel
solutions), its small-velocity approximation, the EM sphere dipole channel,
the EM cylinder m = 1 polarization block, and user-supplied diagonal channel
tables.  A channel's flux factor 1 - |S|^2 is the per-mode absorptivity;
negative values mark superradiant (amplifying) channels, which for a lossy
rotating body happens exactly in the window 0 < omega < Omega*m.
"""

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from . import bessel
from .errors import DomainError, ResonanceError, TableFormatError
from .material import sphere_polarizability

SMALLVEL_LIMIT = 0.3

UNITARITY_TOL = 1e-10


class SmallVelocityWarning(UserWarning):
    """Emitted when a leading-order-in-velocity formula is pushed past omega*R/c = 0.3."""


@dataclass(frozen=True)
class ModeIndex:
    """Quantum numbers of a radiation channel."""

    omega: float
    m: int
    extra: object = None  # None, k_z (float) or l (int)
    pol: str = "scalar"


@dataclass(frozen=True)
class ChannelAmplitude:
    mode: ModeIndex
    S: object  # complex amplitude, or 2x2 complex block for the cylinder
    flux: float  # 1 - |S|^2, or its polarization-summed analog


def classify_channel(flux, tol=UNITARITY_TOL):
    """'unitary', 'sub-unitary' (absorbing) or 'super-unitary' (amplifying)."""
    if abs(flux) < tol:
        return "unitary"
    return "sub-unitary" if flux > 0 else "super-unitary"


# ---------------------------------------------------------------------------
# rotating scalar disk
# ---------------------------------------------------------------------------

def disk_interior_frequency(model, Omega, omega, m):
    """Interior wavenumber of the rotating disk.

    wt^2 = (eps(omega') - 1) * omega'^2 + omega^2 with omega' = omega - Omega*m.
    The square-root branch is fixed by sgn(Im wt) = sgn(omega'), which encodes
    gain versus loss in the comoving frame; for Im wt = 0 either branch gives
    the same scattering matrix through the parity of J_m.
    """
    om_p = omega - Omega * m
    if om_p == 0.0:
        # the (eps - 1) * omega'^2 product vanishes for any causal model
        wt2 = complex(omega**2)
    else:
        wt2 = (model.epsilon(om_p) - 1.0) * om_p**2 + omega**2
    wt = np.sqrt(complex(wt2))
    if om_p >= 0 and wt.imag < 0:
        wt = -wt
    elif om_p < 0 and wt.imag > 0:
        wt = -wt
    return wt


def disk_smatrix(model, R, Omega, omega, m):
    """Exact partial-wave scattering amplitude of the rotating 2D disk.

    Matches the regular interior solution J_m(wt r) to incoming plus outgoing
    cylindrical waves at r = R:

        S_m = - [d_R J_m(wt R) H2_m(wR) - J_m(wt R) d_R H2_m(wR)]
              / [d_R J_m(wt R) H1_m(wR) - J_m(wt R) d_R H1_m(wR)]

    Unitary for lossless media; sub-unitary for a lossy body at rest;
    super-unitary in the superradiant window of a lossy rotating body.
    """
    if omega <= 0:
        raise DomainError("disk S-matrix needs omega > 0")
    if R <= 0:
        raise DomainError("radius must be > 0")
    wt = disk_interior_frequency(model, Omega, omega, m)
    zj = wt * R
    zh = omega * R
    J = bessel.bessel_j(m, zj)
    Jp = bessel.bessel_j_deriv(m, zj)
    num = wt * Jp * bessel.hankel(2, m, zh) - J * omega * bessel.hankel_deriv(2, m, zh)
    den = wt * Jp * bessel.hankel(1, m, zh) - J * omega * bessel.hankel_deriv(1, m, zh)
    if abs(den) < 1e-300:
        raise ResonanceError(f"disk S-matrix denominator underflow at omega={omega:g}, m={m}")
    return -num / den


def disk_flux(model, R, Omega, omega, m):
    """Flux factor 1 - |S_m|^2 of the disk, in cancellation-free form.

    With den the matching denominator of the scattering matrix and
    H^(2) = conj(H^(1)) at real omega*R, the difference of squared
    magnitudes collapses through the J/Y Wronskian to

        1 - |S|^2 = -(8 / pi R) Im[wt J'_m(wt R) conj(J_m(wt R))] / |den|^2,

    which is exactly zero for real wt (lossless media) and keeps full
    relative precision when |S| is within roundoff of 1.
    """
    if omega <= 0:
        raise DomainError("disk flux needs omega > 0")
    wt = disk_interior_frequency(model, Omega, omega, m)
    zj = wt * R
    zh = omega * R
    J = bessel.bessel_j(m, zj)
    Jp = bessel.bessel_j_deriv(m, zj)
    den = wt * Jp * bessel.hankel(1, m, zh) - J * omega * bessel.hankel_deriv(1, m, zh)
    if abs(den) < 1e-300:
        raise ResonanceError(f"disk S-matrix denominator underflow at omega={omega:g}, m={m}")
    return -(8.0 / (np.pi * R)) * (wt * Jp * np.conj(J)).imag / abs(den) ** 2


def disk_smatrix_smallvel(model, R, Omega, omega):
    """Leading-order deviation |S_1|^2 - 1 of the slowly rotating disk.

    Returns -(pi/8) omega^2 (omega - Omega)^2 R^4 Im eps(omega - Omega),
    valid for omega*R/c << 1 (a warning is emitted past 0.3).  Positive for
    omega < Omega (amplification), negative above, zero at omega = Omega.
    """
    if omega <= 0:
        raise DomainError("needs omega > 0")
    if omega * R >= SMALLVEL_LIMIT:
        warnings.warn(
            f"omega*R/c = {omega * R:.3g} is outside the small-velocity regime",
            SmallVelocityWarning,
            stacklevel=2,
        )
    om_p = omega - Omega
    if om_p == 0.0:
        return 0.0
    return -(np.pi / 8.0) * omega**2 * om_p**2 * R**4 * model.epsilon(om_p).imag


# ---------------------------------------------------------------------------
# EM sphere, dipole channel
# ---------------------------------------------------------------------------

def _dipole_alpha(model, R, om_p):
    # Drude-like responses diverge at omega' = 0 but alpha -> R^3 there
    if om_p == 0.0:
        try:
            return sphere_polarizability(model, R, 0.0)
        except DomainError:
            return complex(R**3)
    return sphere_polarizability(model, R, om_p)


def sphere_smatrix_dipole(model, R, Omega, omega, m):
    """l = 1 electric-dipole scattering amplitude S = 1 + i(4 w^3/3) alpha(w - Omega*m)."""
    if m not in (-1, 0, 1):
        raise DomainError("dipole channel has m in {-1, 0, 1}")
    if omega <= 0:
        raise DomainError("needs omega > 0")
    alpha = _dipole_alpha(model, R, omega - Omega * m)
    return 1.0 + 1j * (4.0 * omega**3 / 3.0) * alpha


def sphere_flux_dipole(model, R, Omega, omega, m, exact=False):
    """Flux factor 1 - |S_{1mE}|^2 of the dipole channel.

    The default keeps the leading order (8 w^3 / 3) Im alpha(w - Omega*m),
    consistent with the closed-form radiation laws; ``exact=True`` adds the
    O(alpha^2) magnitude of the dipole amplitude (computed from the deviation
    X = (4 w^3/3) alpha directly, so no precision is lost near |S| = 1).
    """
    alpha = _dipole_alpha(model, R, omega - Omega * m)
    lead = (8.0 * omega**3 / 3.0) * alpha.imag
    if not exact:
        return lead
    X = (4.0 * omega**3 / 3.0) * alpha
    return lead - abs(X) ** 2  # 1 - |1 + iX|^2 = 2 Im X - |X|^2


# ---------------------------------------------------------------------------
# EM cylinder, m = +-1 polarization block
# ---------------------------------------------------------------------------

def _cyl_response(model, om_p):
    # r = (eps' - 1)/(eps' + 1); -> 1 for diverging (metallic) eps'
    if om_p == 0.0:
        try:
            eps = model.epsilon(0.0)
        except DomainError:
            return 1.0 + 0.0j
    else:
        eps = model.epsilon(om_p)
    den = eps + 1.0
    if abs(den) < 1e-12:
        raise ResonanceError("eps = -1 surface-plasmon pole of the cylinder block")
    return (eps - 1.0) / den


def cylinder_smatrix_block(model, R, Omega, omega, kz, m=1):
    """2x2 scattering block over polarizations (M, E) at |m| = 1.

    Diagonals 1 + (i pi/2) r {w^2, k_z^2} R^2 and symmetric off-diagonal
    (i pi/2) r w k_z R^2, with r = (eps(w - Omega*m) - 1)/(eps(w - Omega*m) + 1).
    Thin-cylinder form: valid for w R/c << 1 (warning past 0.3).
    """
    if m not in (-1, 1):
        raise DomainError("cylinder block is given for m = +-1")
    if omega <= 0:
        raise DomainError("needs omega > 0")
    if abs(kz) > omega:
        raise DomainError(f"|k_z| = {abs(kz):g} exceeds omega = {omega:g} (evanescent)")
    if omega * R >= SMALLVEL_LIMIT:
        warnings.warn(
            f"omega*R/c = {omega * R:.3g} is outside the thin-cylinder regime",
            SmallVelocityWarning,
            stacklevel=2,
        )
    r = _cyl_response(model, omega - Omega * m)
    g = 0.5j * np.pi * r * R**2
    return np.array(
        [
            [1.0 + g * omega**2, g * omega * kz],
            [g * omega * kz, 1.0 + g * kz**2],
        ],
        dtype=complex,
    )


def cylinder_flux_block(model, R, Omega, omega, kz, m=1, exact=False):
    """Polarization-summed flux factor sum_{P,P'} (delta - |S_PP'|^2).

    Default truncates |S|^2 - 1 at O(R^2): pi * Im r * (w^2 + k_z^2) R^2,
    dropping all O(R^4) magnitudes.  ``exact=True`` keeps the full block,
    evaluated from the deviation g = (i pi/2) r R^2 so that the O(R^4)
    magnitudes never pass through a 1 - |1 + small|^2 cancellation.
    """
    if abs(kz) > omega:
        raise DomainError(f"|k_z| = {abs(kz):g} exceeds omega = {omega:g} (evanescent)")
    r = _cyl_response(model, omega - Omega * m)
    lead = np.pi * r.imag * (omega**2 + kz**2) * R**2
    if not exact:
        return lead
    g = 0.5j * np.pi * r * R**2
    return lead - (abs(g * omega**2) ** 2 + abs(g * kz**2) ** 2 + 2 * abs(g * omega * kz) ** 2)


def flux_factor(ch):
    """Flux factor of a channel amplitude: 1 - |S|^2, block-summed if needed."""
    S = ch.S
    if np.ndim(S) == 2:
        return float(np.shape(S)[0] - np.sum(np.abs(S) ** 2))
    return 1.0 - abs(S) ** 2


# ---------------------------------------------------------------------------
# channel tables
# ---------------------------------------------------------------------------

class ChannelTable:
    """Diagonal-in-(omega, m) scattering data consumed by the radiation layer."""

    geometry = "generic"
    provenance = "computed"

    def channel_labels(self, m):
        """(extra, pol) channel descriptors available at angular momentum m."""
        raise NotImplementedError

    def m_values(self, m_max, zero_temperature):
        """Angular momenta to include in a sum truncated at m_max."""
        raise NotImplementedError

    def omega_domain(self, m, extra, pol):
        return (0.0, np.inf)

    def smatrix(self, omega, m, extra, pol, Omega):
        raise NotImplementedError

    def flux(self, omega, m, extra, pol, Omega):
        S = self.smatrix(omega, m, extra, pol, Omega)
        return 1.0 - abs(S) ** 2

    def amplitude(self, mode, Omega):
        S = self.smatrix(mode.omega, mode.m, mode.extra, mode.pol, Omega)
        return ChannelAmplitude(mode, S, self.flux(mode.omega, mode.m, mode.extra, mode.pol, Omega))


class DiskTable(ChannelTable):
    """Exact scalar partial waves of a uniform disk of radius R."""

    geometry = "disk"

    def __init__(self, model, R):
        if R <= 0:
            raise DomainError("radius must be > 0")
        self.model = model
        self.R = R

    def channel_labels(self, m):
        return [(None, "scalar")]

    def m_values(self, m_max, zero_temperature):
        if zero_temperature:
            return list(range(1, m_max + 1))
        return list(range(-m_max, m_max + 1))

    def smatrix(self, omega, m, extra, pol, Omega):
        return disk_smatrix(self.model, self.R, Omega, omega, m)

    def flux(self, omega, m, extra, pol, Omega):
        return disk_flux(self.model, self.R, Omega, omega, m)


class SphereTable(ChannelTable):
    """EM dipole channels (l = 1, polarization E) of a sphere of radius R."""

    geometry = "sphere"

    def __init__(self, model, R, exact=False):
        if R <= 0:
            raise DomainError("radius must be > 0")
        self.model = model
        self.R = R
        self.exact = exact

    def channel_labels(self, m):
        return [(1, "E")]

    def m_values(self, m_max, zero_temperature):
        # only m = 1 radiates at T = 0; m = 0, -1 carry the thermal exchange
        if zero_temperature:
            return [1] if m_max >= 1 else []
        return [m for m in (-1, 0, 1) if abs(m) <= m_max]

    def smatrix(self, omega, m, extra, pol, Omega):
        return sphere_smatrix_dipole(self.model, self.R, Omega, omega, m)

    def flux(self, omega, m, extra, pol, Omega):
        return sphere_flux_dipole(self.model, self.R, Omega, omega, m, exact=self.exact)


class UserTable(ChannelTable):
    """Channels interpolated from user-supplied (omega, m, extra, pol, S) rows.

    The stored amplitudes are taken at face value: the rotation rate used by
    flux integrals only enters the Bose factors, so the table must have been
    generated at the same Omega.
    """

    geometry = "user-table"
    provenance = "user-file"

    def __init__(self, groups):
        # groups: {(m, extra, pol): (omega array, S complex array)}
        if not groups:
            raise TableFormatError("channel table holds no rows")
        self._groups = groups

    def channel_labels(self, m):
        return sorted(
            {(extra, pol) for (mm, extra, pol) in self._groups if mm == m},
            key=lambda t: (repr(t[0]), t[1]),
        )

    def m_values(self, m_max, zero_temperature):
        ms = sorted({mm for (mm, _, _) in self._groups if abs(mm) <= m_max})
        if zero_temperature:
            ms = [mm for mm in ms if mm >= 1]
        return ms

    def omega_domain(self, m, extra, pol):
        om, _ = self._groups[(m, extra, pol)]
        return (float(om[0]), float(om[-1]))

    def smatrix(self, omega, m, extra, pol, Omega):
        try:
            om, S = self._groups[(m, extra, pol)]
        except KeyError:
            raise DomainError(f"no channel (m={m}, extra={extra}, pol={pol}) in table") from None
        if omega < om[0] or omega > om[-1]:
            raise DomainError(f"omega={omega:g} outside the tabulated span of the channel")
        return complex(np.interp(omega, om, S.real), np.interp(omega, om, S.imag))


_POLS = ("scalar", "E", "M")


def _parse_extra(text):
    text = text.strip()
    if not text:
        return None
    try:
        return int(text)
    except ValueError:
        return float(text)


def load_channel_table(path):
    """Load a channel table CSV with header omega,m,extra,pol,ReS,ImS.

    Strict schema: per-channel omega strictly increasing, |k_z| <= omega for
    float 'extra' rows, polarizations limited to scalar/E/M.  Violations raise
    :class:`TableFormatError` carrying the offending row number.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expect = ["omega", "m", "extra", "pol", "ReS", "ImS"]
        if header is None or [h.strip() for h in header] != expect:
            raise TableFormatError(f"expected header {','.join(expect)!r}")
        for i, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 6:
                raise TableFormatError("expected 6 columns", row=i)
            try:
                omega = float(row[0])
                m = int(row[1])
                extra = _parse_extra(row[2])
                pol = row[3].strip()
                S = complex(float(row[4]), float(row[5]))
            except ValueError as exc:
                raise TableFormatError(str(exc), row=i) from exc
            if omega <= 0:
                raise TableFormatError("omega must be > 0", row=i)
            if pol not in _POLS:
                raise TableFormatError(f"pol must be one of {_POLS}", row=i)
            if isinstance(extra, float) and abs(extra) > omega:
                raise TableFormatError(f"|k_z|={abs(extra):g} exceeds omega={omega:g}", row=i)
            rows.append((i, omega, m, extra, pol, S))
    groups = {}
    for i, omega, m, extra, pol, S in rows:
        groups.setdefault((m, extra, pol), []).append((i, omega, S))
    packed = {}
    for key, entries in groups.items():
        for (i0, w0, _), (i1, w1, _) in zip(entries[:-1], entries[1:]):
            if w1 <= w0:
                raise TableFormatError(
                    f"omega grid of channel {key} not strictly increasing", row=i1
                )
        om = np.array([w for (_, w, _) in entries])
        S = np.array([s for (_, _, s) in entries], dtype=complex)
        packed[key] = (om, S)
    return UserTable(packed)
