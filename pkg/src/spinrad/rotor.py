"""Stochastic rotational dynamics driven by radiation back-reaction.

The angular-momentum flux defines a drift Mbar(W) (mean torque / hbar) and a
diffusion strength Mbar2(W) (torque variance / hbar^2).  The probability
density of the angular velocity obeys the master equation whose stationary
driven solution is

    P(W) = C / Mbar2(W) * exp[-(I/hbar) int_0^W (Mbar - Mbar(W0)) / Mbar2 dW'].

The equivalent Ito SDE for that equation carries noise variance
2 * hbar^2 * Mbar2 * dt per step (the master equation's diffusion term reads
d^2/dW^2 (Mbar2 P) with no 1/2), which is what the simulator uses by default
so that ensembles, the stationary closed form and the width formula
I*dW = sqrt(hbar*I*Mbar2/Mbar') are mutually consistent.  Pass
``diffusion_scale=1.0`` for the bare covariance <eta eta'> = hbar^2 Mbar2
delta(t-t') instead; early-time variance growth then follows hbar^2*Mbar2*t.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, cumulative_trapezoid, simpson
from scipy.interpolate import PchipInterpolator

from .errors import ConvergenceError, DomainError, StepSizeError
from .quadrature import integrate_segments
from .radiation import TWO_PI, mode_flux
from .material import ThermalState
from .scattering import ModeIndex

FP_DIFFUSION_SCALE = 2.0

STIFFNESS_LIMIT = 0.1

ADIABATIC_LIMIT = 0.1


@dataclass(frozen=True)
class TorqueLaw:
    """Drift Mbar(W) and diffusion Mbar2(W), both vectorized over W."""

    drift: object
    diffusion: object
    provenance: str = "closed-form"
    drift_derivative_fn: object = None

    @classmethod
    def power_law(cls, coeff, exponent, coeff2=None, exponent2=None):
        """Mbar = coeff * W^exponent, Mbar2 likewise (defaults to the same law)."""
        if coeff < 0 or (coeff2 is not None and coeff2 < 0):
            raise DomainError("torque-law coefficients must be >= 0")
        c2 = coeff if coeff2 is None else coeff2
        k2 = exponent if exponent2 is None else exponent2

        def drift(w):
            return coeff * np.power(w, exponent)

        def diffusion(w):
            return c2 * np.power(w, k2)

        def ddrift(w):
            return coeff * exponent * np.power(w, exponent - 1)

        return cls(drift, diffusion, "closed-form", ddrift)

    def drift_derivative(self, w):
        if self.drift_derivative_fn is not None:
            return self.drift_derivative_fn(w)
        if np.ndim(w) == 0:
            return _centered_derivative(self.drift, w)
        # vectorized slope estimate (stiffness guard): fixed relative step
        w = np.asarray(w, dtype=float)
        h = 1e-5 * (np.abs(w) + 1.0)
        return (self.drift(w + h) - self.drift(np.maximum(w - h, 0.0))) / (2.0 * h)


def _centered_derivative(f, w0, rtol=1e-7):
    """Centered difference with step halving until successive values agree."""
    w0 = float(w0)
    h = max(abs(w0), 1.0) * 1e-2
    prev = None
    for _ in range(24):
        d = (f(w0 + h) - f(w0 - h)) / (2.0 * h)
        if prev is not None and abs(d - prev) <= rtol * max(abs(d), 1e-300):
            return d
        prev = d
        h *= 0.5
        if h < max(abs(w0), 1.0) * 1e-7:
            break
    return prev if prev is not None else d


def torque_law_from_radiation(table, state, omega_range, rtol=1e-6, m_max=5, epsrel=1e-9):
    """Numeric torque law: Mbar, Mbar2 memoized on a refining grid.

    Mbar(W)  = sum_m int dw/2pi m   N_m(w)
    Mbar2(W) = sum_m int dw/2pi m^2 N_m(w) (N_m(w) + 1)

    evaluated at rotation rate W, interpolated monotonically (PCHIP) and
    refined by grid doubling until the interpolant reproduces midpoint
    evaluations to ``rtol`` relative.
    """
    lo, hi = omega_range
    if not 0 <= lo < hi:
        raise DomainError("need 0 <= lo < hi for the tabulation range")

    def moments(W):
        st = ThermalState(state.T_object, state.T_env, W)
        zero_T = st.zero_temperature
        out = np.zeros(2)
        if W == 0.0 and zero_T:
            return out
        cutoff = W * max(m_max, 1) + 40.0 * max(st.T_object, st.T_env)
        for m in table.m_values(m_max, zero_T):
            for extra, pol in table.channel_labels(m):
                a, b = table.omega_domain(m, extra, pol)
                a = max(a, 0.0)
                if zero_T:
                    if m < 1:
                        continue
                    b = min(b, W * m)
                else:
                    b = min(b, cutoff)
                if b <= a:
                    continue

                def f(w, m=m, extra=extra, pol=pol):
                    N = mode_flux(table, st, ModeIndex(w, m, extra, pol))
                    return np.array([m * N, m * m * N * (N + 1.0)]) / TWO_PI

                val, _ = integrate_segments(f, [a, b], epsrel=epsrel)
                out += val
        return out

    return tabulate_torque_law(moments, omega_range, rtol=rtol)


def tabulate_torque_law(moments, omega_range, rtol=1e-6):
    """Memoize a (drift, diffusion) moment function on a refining log grid.

    ``moments(W)`` returns the pair (Mbar, Mbar2) at rotation rate W.  The
    grid doubles until log-log interpolation reproduces geometric-midpoint
    evaluations to ``rtol`` relative.
    """
    lo, hi = omega_range
    if not 0 <= lo < hi:
        raise DomainError("need 0 <= lo < hi for the tabulation range")
    n = 17
    for _ in range(7):
        grid = np.geomspace(max(lo, hi * 1e-4), hi, n)
        vals = np.array([moments(w) for w in grid], dtype=float)
        if np.all(vals == 0.0):
            zero = lambda w: np.zeros_like(np.asarray(w, dtype=float))
            return TorqueLaw(zero, zero, "numeric", zero)
        drift_i = _power_law_interpolant(grid, vals[:, 0])
        diff_i = _power_law_interpolant(grid, vals[:, 1])
        probe = np.sqrt(grid[:-1] * grid[1:])[:: max(1, (n - 1) // 8)]
        direct = np.array([moments(w) for w in probe], dtype=float)
        scale = np.maximum(np.abs(direct), 1e-12 * np.max(np.abs(vals), axis=0))
        err = np.max(np.abs(np.column_stack([drift_i(probe), diff_i(probe)]) - direct) / scale)
        if err < rtol:
            break
        n = 2 * n - 1
    else:
        raise ConvergenceError(f"torque-law tabulation stalled at rel err {err:g}")

    def slope(w):
        h = 1e-6 * (np.abs(w) + 1e-6 * hi)
        return (drift_i(w + h) - drift_i(np.maximum(w - h, 0.0))) / (2.0 * h)

    return TorqueLaw(drift_i, diff_i, "numeric", slope)


def _power_law_interpolant(grid, vals):
    """Monotone interpolation in log-log space; exact zero below the grid foot.

    The radiation moments behave as steep power laws in the rotation rate, so
    log-log PCHIP holds a uniform relative accuracy across decades where a
    linear-space interpolant cannot.
    """
    if np.any(vals < 0.0):  # finite-T drift can change sign: stay in linear space
        lin = PchipInterpolator(grid, vals)
        return lambda w: lin(np.clip(w, grid[0], grid[-1]))
    tiny = np.max(vals) * 1e-290 + 1e-300
    logv = np.log(np.maximum(vals, tiny))
    li = PchipInterpolator(np.log(grid), logv)
    lo = grid[0]

    def f(w):
        arr = np.atleast_1d(np.asarray(w, dtype=float))
        out = np.zeros_like(arr)
        mask = arr > 0
        if np.any(mask):
            # below the tabulated foot this extends the first power-law segment
            out[mask] = np.exp(li(np.log(arr[mask])))
        return float(out[0]) if np.ndim(w) == 0 else out

    return f


def langevin_step(omega, law, I, dt, xi, *, hbar=1.0, drive=0.0,
                  diffusion_scale=FP_DIFFUSION_SCALE):
    """One Euler-Maruyama update; `xi` are standard normals shaped like omega."""
    drift = -(hbar / I) * (law.drift(omega) - drive)
    noise = (hbar / I) * np.sqrt(diffusion_scale * law.diffusion(omega) * dt) * xi
    return omega + drift * dt + noise


@dataclass
class RotorEnsemble:
    """Recorded angular-velocity trajectories and their seed ledger."""

    I: float
    hbar: float
    dt: float
    seed: int
    diffusion_scale: float
    drive_at: float | None
    times: np.ndarray
    omegas: np.ndarray  # (n_traj, n_records)
    adiabaticity_max: float

    @property
    def n_traj(self):
        return self.omegas.shape[0]

    @property
    def final(self):
        return self.omegas[:, -1]

    def trajectory_keys(self):
        """Philox keys (seed, traj_id): the per-trajectory RNG ledger."""
        return [(self.seed, i) for i in range(self.n_traj)]


def simulate_ensemble(law, I, omega0, *, t_total, dt, n_traj, seed=0, drive_at=None,
                      hbar=1.0, diffusion_scale=FP_DIFFUSION_SCALE, n_record=33,
                      block_size=4096, guard_every=25):
    """Evolve an ensemble of rotors by Euler-Maruyama.

    Counter-based RNG: trajectory i draws from Philox(key=(seed, i)), so the
    ensemble is reproducible under any blocking or scheduling.  A reflecting
    boundary keeps W >= 0.  ``drive_at=W0`` applies the constant torque
    hbar*Mbar(W0) that holds the rotor near the set point; ``None`` lets it
    decay freely.  dt must satisfy dt*(hbar/I)*dMbar/dW < 0.1 everywhere the
    ensemble goes (checked every ``guard_every`` steps).
    """
    if dt <= 0 or t_total <= 0:
        raise DomainError("need positive dt and t_total")
    n_steps = int(round(t_total / dt))
    if n_steps < 1:
        raise DomainError("t_total shorter than one step")
    rec_idx = np.unique(np.linspace(0, n_steps, min(n_record, n_steps + 1)).astype(int))
    times = rec_idx * dt
    drive = float(law.drift(drive_at)) if drive_at is not None else 0.0

    omegas = np.empty((n_traj, len(rec_idx)))
    adiab_max = 0.0
    for start in range(0, n_traj, block_size):
        stop = min(start + block_size, n_traj)
        nb = stop - start
        noise = np.empty((nb, n_steps))
        for j in range(nb):
            gen = np.random.Generator(
                np.random.Philox(key=np.array([seed, start + j], dtype=np.uint64))
            )
            noise[j] = gen.standard_normal(n_steps)
        W = np.full(nb, float(omega0))
        rec_pos = 0
        if rec_idx[0] == 0:
            omegas[start:stop, 0] = W
            rec_pos = 1
        for step in range(n_steps):
            if step % guard_every == 0:
                stiff = dt * (hbar / I) * np.max(np.abs(law.drift_derivative(W)))
                if stiff >= STIFFNESS_LIMIT:
                    raise StepSizeError(
                        f"dt*(hbar/I)*dMbar/dW = {stiff:.3g} >= {STIFFNESS_LIMIT}"
                    )
                det = (hbar / I) * np.abs(law.drift(W) - drive)
                wsafe = np.maximum(W, 1e-300)
                adiab_max = max(adiab_max, float(np.max(det / wsafe**2)))
            W = langevin_step(
                W, law, I, dt, noise[:, step], hbar=hbar, drive=drive,
                diffusion_scale=diffusion_scale,
            )
            np.abs(W, out=W)  # reflecting boundary at W = 0
            if rec_pos < len(rec_idx) and step + 1 == rec_idx[rec_pos]:
                omegas[start:stop, rec_pos] = W
                rec_pos += 1

    if adiab_max > ADIABATIC_LIMIT:
        warnings.warn(
            f"adiabaticity monitor |dW/dt|/W^2 reached {adiab_max:.3g} > {ADIABATIC_LIMIT}",
            UserWarning,
            stacklevel=2,
        )
    return RotorEnsemble(
        I, hbar, dt, seed, diffusion_scale, drive_at, times, omegas, adiab_max
    )


@dataclass
class StationaryDistribution:
    """Normalized stationary density of the driven rotor on a grid."""

    omega: np.ndarray
    pdf: np.ndarray
    cdf: np.ndarray = field(init=False)

    def __post_init__(self):
        c = cumulative_trapezoid(self.pdf, self.omega, initial=0.0)
        self.cdf = c / c[-1]

    def mean(self):
        return float(simpson(self.omega * self.pdf, x=self.omega))

    def var(self):
        mu = self.mean()
        return float(simpson((self.omega - mu) ** 2 * self.pdf, x=self.omega))

    def std(self):
        return math.sqrt(self.var())

    def cdf_at(self, x):
        return np.interp(x, self.omega, self.cdf, left=0.0, right=1.0)

    def ks_statistic(self, samples):
        """Kolmogorov-Smirnov sup-distance of an i.i.d. sample to this law."""
        x = np.sort(np.asarray(samples, dtype=float))
        n = len(x)
        F = self.cdf_at(x)
        i = np.arange(1, n + 1)
        return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def fokker_planck_stationary(law, omega0, I, *, hbar=1.0, n_grid=4001, span=16.0,
                             grid=None):
    """Exact stationary density of the rotor driven at the set point omega0.

    P(W) = C/Mbar2(W) exp[-(I/hbar) int (Mbar - Mbar(omega0))/Mbar2], with the
    path integral anchored at omega0 (the divergent constant from the lower
    limit cancels against the normalization).  Raises :class:`DomainError`
    when the density is not normalizable (e.g. free decay, Mbar(omega0) = 0,
    against a diffusion vanishing at W = 0 with exponent >= 1).
    """
    if I <= 0 or hbar <= 0:
        raise DomainError("need I > 0 and hbar > 0")
    drive = float(law.drift(omega0))
    if grid is None:
        try:
            sig = uncertainty(law, omega0, I, hbar=hbar) / I
        except DomainError:
            sig = 0.25 * omega0
        lo = max(omega0 - span * sig, 1e-9 * omega0)
        hi = omega0 + span * sig
        grid = np.linspace(lo, hi, n_grid)
    else:
        grid = np.asarray(grid, dtype=float)
        if grid[0] <= 0:
            raise DomainError("grid must be strictly positive")

    floor = 1e-12 * omega0
    n = len(grid) | 1  # odd count so the half-resolution subsample is Simpson-clean
    grid = np.linspace(grid[0], grid[-1], n)
    for _ in range(60):
        pdf = _fp_density_on(law, omega0, I, hbar, drive, grid)
        ok_left = pdf[0] < 1e-12 or grid[0] <= floor
        ok_right = pdf[-1] < 1e-12
        if ok_left and ok_right:
            break
        lo, hi = grid[0], grid[-1]
        width = hi - lo
        if not ok_left:
            lo = max(lo - 0.75 * width, floor)
        if not ok_right:
            hi = hi + 0.75 * width
        grid = np.linspace(lo, hi, n)
    else:
        raise ConvergenceError("stationary-density support search did not close")
    if grid[0] <= floor and pdf[0] > 1e-6:
        k = _low_end_exponent(law, grid)
        raise DomainError(
            f"stationary density diverges at W -> 0 (diffusion exponent ~{k:.2f}): "
            "not normalizable"
        )

    # refine until the Simpson norm is resolution-independent to ~1e-8
    for _ in range(4):
        norm = simpson(pdf, x=grid)
        if not np.isfinite(norm) or norm <= 0:
            raise DomainError("stationary density is not normalizable on the grid")
        coarse = simpson(pdf[::2], x=grid[::2])
        if abs(coarse / norm - 1.0) < 1.5e-7:  # ~15x the fine-grid error
            return StationaryDistribution(grid, pdf / norm)
        n = 2 * n - 1
        grid = np.linspace(grid[0], grid[-1], n)
        pdf = _fp_density_on(law, omega0, I, hbar, drive, grid)
    raise ConvergenceError("stationary-density quadrature did not reach 1e-8")


def _fp_density_on(law, omega0, I, hbar, drive, grid):
    """Unnormalized stationary density (peak scaled to 1) on a given grid."""
    M2 = np.asarray(law.diffusion(grid), dtype=float)
    if np.any(M2 <= 0):
        raise DomainError("Mbar2 must be > 0 on the integration domain")
    h = (np.asarray(law.drift(grid), dtype=float) - drive) / M2
    # O(h^4) cumulative rule: the exponent is multiplied by I/hbar, so the
    # 1e-8 normalization target needs better than trapezoid accuracy
    G = cumulative_simpson(h, x=grid, initial=0.0)
    G -= np.interp(omega0, grid, G)  # anchor the path integral at omega0
    logp = -np.log(M2) - (I / hbar) * G
    logp -= np.max(logp)
    return np.exp(logp)


def _low_end_exponent(law, grid):
    w1, w2 = grid[0], grid[min(8, len(grid) - 1)]
    d1, d2 = float(law.diffusion(w1)), float(law.diffusion(w2))
    if d1 <= 0 or d2 <= 0 or w1 == w2:
        return float("nan")
    return math.log(d2 / d1) / math.log(w2 / w1)


def uncertainty(law, omega0, I, *, hbar=1.0):
    """Quantum width of the driven steady state: sqrt(hbar I Mbar2 / Mbar').

    The drift slope is taken by adaptive centered differences on the
    (possibly memoized) law; a flat or decreasing torque has no confining
    steady state and raises :class:`DomainError`.
    """
    if I <= 0:
        raise DomainError("need I > 0")
    slope = _centered_derivative(law.drift, omega0)
    if slope is None or slope <= 0:
        raise DomainError(f"dMbar/dW = {slope} at W0={omega0:g}: no confinement")
    M2 = float(law.diffusion(omega0))
    return math.sqrt(hbar * I * M2 / slope)
