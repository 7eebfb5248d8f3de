"""Batch front-end: config-driven scenarios with deterministic emitters.

Config files are INI-style, one section per concern, with strict unknown-key
rejection (a typo in a physics parameter must never be silently ignored).
``units = si`` converts at the boundary only: radius/length/d in m, omega in
rad/s, temperatures in K, conductivity in S/m (converted to the Gaussian
convention used by eps = 1 + 4 pi i sigma/omega), inertia in kg m^2; outputs
come back in W, N m, W/K and s.  Exit codes: 0 ok, 2 config error, 3 numeric
non-convergence.
"""

import argparse
import configparser
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, ConvergenceError, DomainError, SpinradError, StepSizeError
from .material import (
    ConstantEpsilon,
    Drude,
    Lorentz,
    TabulatedEpsilon,
    ThermalState,
    Vacuum,
)
from .photonstats import entropy_generation
from .radiation import (
    MSumPolicy,
    integrate_power,
    integrate_power_cylinder,
    spectral_rows,
)
from .rotor import (
    TorqueLaw,
    fokker_planck_stationary,
    simulate_ensemble,
    tabulate_torque_law,
    torque_law_from_radiation,
    uncertainty,
)
from .scattering import DiskTable, SphereTable, load_channel_table
from .testbody import (
    TwoBodyConfig,
    tangential_force_3d,
    torque_on_test_2d,
    torque_on_test_3d,
    torque_vs_distance,
)
from .units import UnitSystem, si_conductivity_to_gaussian

GEOMETRIES = ("disk", "sphere", "cylinder", "user-table")

_SCHEMA = {
    "scenario": {"geometry", "units"},
    "material": {"model", "sigma", "eps_inf", "omega_p", "omega_0", "gamma",
                 "eps_re", "eps_im", "path"},
    "body": {"radius", "length", "omega", "t_object", "t_env", "inertia", "table"},
    "numerics": {"m_max", "auto_extend", "tail_tol", "rel_tol", "omega_points",
                 "dt", "n_traj", "t_total", "n_record"},
    "rotor": {"law", "coeff", "exponent", "drive", "omega_hi"},
    "stats": {"pn_mean", "pn_n_max"},
    "twobody": {"mode", "d", "test_model", "test_sigma", "test_eps_re",
                "test_eps_im", "test_radius", "sweep", "sweep_points"},
}

_MATERIAL_KEYS = {
    "vacuum": set(),
    "drude": {"sigma"},
    "lorentz": {"eps_inf", "omega_p", "omega_0", "gamma"},
    "constant": {"eps_re", "eps_im"},
    "tabulated": {"path"},
}


class Scenario:
    """Validated, unit-converted inputs of one run."""

    def __init__(self, parser, path, units):
        self.raw = parser
        self.path = path
        self.units = units  # None for natural units


def _get(parser, section, key, cast, default=None, required=False):
    if not parser.has_option(section, key):
        if required:
            raise ConfigError(f"[{section}] {key}: required")
        return default
    text = parser.get(section, key)
    try:
        if cast is bool:
            if text.lower() in ("true", "yes", "1"):
                return True
            if text.lower() in ("false", "no", "0"):
                return False
            raise ValueError("expected a boolean")
        return cast(text)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from exc


def load_config(path):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        unknown = set(parser.options(section)) - _SCHEMA[section]
        if unknown:
            raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")
    return parser


def _build_material(parser, units, section="material"):
    model = _get(parser, section, "model", str, required=True).lower()
    if model not in _MATERIAL_KEYS:
        raise ConfigError(f"[{section}] model: unknown model {model!r}")
    if model == "vacuum":
        return Vacuum()
    if model == "drude":
        sigma = _get(parser, section, "sigma", float, required=True)
        if units is not None:
            sigma = units.conductivity(si_conductivity_to_gaussian(sigma))
        return Drude(sigma)
    if model == "lorentz":
        vals = [
            _get(parser, section, k, float, required=True)
            for k in ("eps_inf", "omega_p", "omega_0", "gamma")
        ]
        if units is not None:
            vals = [vals[0]] + [units.frequency(v) for v in vals[1:]]
        return Lorentz(*vals)
    if model == "constant":
        return ConstantEpsilon(
            _get(parser, section, "eps_re", float, required=True),
            _get(parser, section, "eps_im", float, default=0.0),
        )
    return TabulatedEpsilon.from_csv(_get(parser, section, "path", str, required=True))


def _build_scenario(parser):
    geometry = _get(parser, "scenario", "geometry", str, required=True).lower()
    if geometry not in GEOMETRIES:
        raise ConfigError(f"[scenario] geometry: must be one of {GEOMETRIES}")
    unit_mode = _get(parser, "scenario", "units", str, default="natural").lower()
    if unit_mode not in ("natural", "si"):
        raise ConfigError("[scenario] units: must be 'natural' or 'si'")

    omega = _get(parser, "body", "omega", float, required=True)
    if omega < 0:
        raise ConfigError("[body] omega: must be >= 0")
    units = None
    if unit_mode == "si":
        if omega <= 0:
            raise ConfigError("[body] omega: SI mode needs omega > 0 as the unit anchor")
        units = UnitSystem.from_omega_si(omega)
        omega = 1.0

    def conv(value, fn):
        return value if (units is None or value is None) else fn(value)

    body = {
        "geometry": geometry,
        "omega": omega,
        "radius": conv(_get(parser, "body", "radius", float), lambda v: units.length(v)),
        "length": conv(_get(parser, "body", "length", float), lambda v: units.length(v)),
        "t_object": conv(_get(parser, "body", "t_object", float, default=0.0),
                         lambda v: units.temperature(v)),
        "t_env": conv(_get(parser, "body", "t_env", float, default=0.0),
                      lambda v: units.temperature(v)),
        "inertia": conv(_get(parser, "body", "inertia", float), lambda v: units.inertia(v)),
        "table": _get(parser, "body", "table", str),
    }
    if geometry in ("disk", "sphere", "cylinder") and body["radius"] is None:
        raise ConfigError("[body] radius: required for this geometry")
    if geometry == "cylinder" and body["length"] is None:
        raise ConfigError("[body] length: required for the cylinder")
    if geometry == "user-table" and body["table"] is None:
        raise ConfigError("[body] table: required for user-table geometry")
    for key in ("radius", "length", "inertia"):
        if body[key] is not None and body[key] <= 0:
            raise ConfigError(f"[body] {key}: must be > 0")

    numerics = {
        "m_max": _get(parser, "numerics", "m_max", int, default=5),
        "auto_extend": _get(parser, "numerics", "auto_extend", bool, default=False),
        "tail_tol": _get(parser, "numerics", "tail_tol", float, default=1e-6),
        "rel_tol": _get(parser, "numerics", "rel_tol", float, default=1e-9),
        "omega_points": _get(parser, "numerics", "omega_points", int, default=200),
        "dt": _get(parser, "numerics", "dt", float),
        "n_traj": _get(parser, "numerics", "n_traj", int, default=1000),
        "t_total": _get(parser, "numerics", "t_total", float),
        "n_record": _get(parser, "numerics", "n_record", int, default=33),
    }
    for key in ("tail_tol", "rel_tol"):
        if not 0.0 < numerics[key] < 1.0:
            raise ConfigError(f"[numerics] {key}: must lie in (0, 1)")

    material = None
    if parser.has_section("material"):
        material = _build_material(parser, units)
    elif geometry != "user-table":
        raise ConfigError("[material] section required for computed geometries")

    return geometry, units, material, body, numerics


def _policy(numerics):
    return MSumPolicy(
        m_max=numerics["m_max"],
        auto_extend=numerics["auto_extend"],
        tail_tol=numerics["tail_tol"],
        epsrel=numerics["rel_tol"],
    )


def _make_table(geometry, material, body):
    if geometry == "disk":
        return DiskTable(material, body["radius"])
    if geometry == "sphere":
        return SphereTable(material, body["radius"])
    if geometry == "user-table":
        return load_channel_table(body["table"])
    raise ConfigError(f"geometry {geometry!r} has no channel table")


# ---------------------------------------------------------------------------
# emitters
# ---------------------------------------------------------------------------

def _config_hash(path, seed):
    digest = hashlib.sha256()
    digest.update(Path(path).read_bytes())
    digest.update(str(seed).encode())
    return digest.hexdigest()[:16]


def _meta(args, flags):
    return {
        "generator": f"spinrad {__version__}",
        "config_sha256": _config_hash(args.config, args.seed),
        "seed": args.seed,
        "threads": args.threads,
        "flags": flags,
    }


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _write_csv(path, meta, columns, rows):
    lines = [f"# {k}: {v}" for k, v in _flatten_meta(meta)]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_table(out_dir, stem, fmt, meta, columns, rows):
    """Tabular emitter honoring --format: CSV with a header block, or JSON records."""
    if fmt == "json":
        path = Path(out_dir) / f"{stem}.json"
        payload = {"meta": meta, "columns": list(columns),
                   "rows": [list(r) for r in rows]}
        _write_json(path, payload)
    else:
        path = Path(out_dir) / f"{stem}.csv"
        _write_csv(path, meta, columns, rows)
    return path


def _flatten_meta(meta):
    out = []
    for k, v in meta.items():
        if isinstance(v, dict):
            for kk, vv in v.items():
                out.append((f"{k}.{kk}", _fmt(vv)))
        else:
            out.append((k, _fmt(v)))
    return out


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _state(body):
    return ThermalState(T_object=body["t_object"], T_env=body["t_env"], Omega=body["omega"])


def run_power(args, parser):
    geometry, units, material, body, numerics = _build_scenario(parser)
    state = _state(body)
    if geometry == "cylinder":
        result = integrate_power_cylinder(
            material, body["radius"], body["length"], body["omega"],
            state=state, policy=_policy(numerics),
        )
    else:
        result = integrate_power(_make_table(geometry, material, body), state, _policy(numerics))
    payload = {"meta": _meta(args, result.flags), **result.as_dict()}
    if units is not None:
        payload["si"] = {
            "P_W": units.power_si(result.P),
            "M_Nm": units.torque_si(result.M),
            "Q_W": units.power_si(result.Q),
        }
    out = Path(args.out) / "power.json"
    _write_json(out, payload)
    print(f"power: P={result.P!r} M={result.M!r} Q={result.Q!r} -> {out}")
    return 0


def run_spectrum(args, parser):
    geometry, units, material, body, numerics = _build_scenario(parser)
    state = _state(body)
    if geometry == "cylinder":
        rows = _cylinder_spectral_rows(material, body, state, numerics["omega_points"])
    else:
        table = _make_table(geometry, material, body)
        rows = spectral_rows(table, state, _policy(numerics), numerics["omega_points"])
    flags = {"omega_R_over_c": (body["omega"] * body["radius"]) if body["radius"] else 0.0}
    out = _write_table(
        args.out, "spectrum", args.format, _meta(args, flags),
        ["omega", "m", "extra", "pol", "N", "dP_domega"], rows,
    )
    print(f"spectrum: {len(rows)} rows -> {out}")
    return 0


def _cylinder_spectral_rows(material, body, state, n_points):
    from .scattering import cylinder_flux_block

    Omega, R, L = body["omega"], body["radius"], body["length"]
    if state.zero_temperature and Omega <= 0:
        return []
    hi = Omega if state.zero_temperature else Omega + 40 * max(state.T_object, state.T_env)
    rows = []
    gl_x, gl_w = np.polynomial.legendre.leggauss(8)
    from .radiation import occupation_difference

    for w in np.linspace(0.0, hi, n_points + 2)[1:-1]:
        flux = float(np.sum(gl_w * [cylinder_flux_block(material, R, Omega, w, k)
                                    for k in gl_x * w]) * w)
        if state.zero_temperature:
            N = -flux * (L / (2 * math.pi)) if w < Omega else 0.0
        else:
            N = occupation_difference(w, 1, state) * flux * (L / (2 * math.pi))
        rows.append((float(w), 1, None, "block", N, float(w) * N / (2 * math.pi)))
    return rows


def run_stats(args, parser):
    geometry, units, material, body, numerics = _build_scenario(parser)
    if geometry == "cylinder":
        raise ConfigError("stats: per-mode entropy is available for disk, sphere and user-table")
    state = _state(body)
    table = _make_table(geometry, material, body)
    policy = _policy(numerics)
    report = entropy_generation(table, state, policy)
    radiation = integrate_power(table, state, policy)
    payload = {
        "meta": _meta(args, radiation.flags),
        "perMode": [
            {"m": m, "extra": extra, "pol": pol, "entropyRate": rate}
            for (m, extra, pol, rate) in report.per_mode
        ],
        "totalEntropyRate": report.total_rate,
        "objectEntropyRate": report.object_rate,
        "combinedRate": report.combined_rate,
        "P": radiation.P,
        "M": radiation.M,
        "Q": radiation.Q,
    }
    if units is not None:
        payload["si"] = {"S_W_per_K": units.entropy_rate_si(report.total_rate)}
    out = Path(args.out) / "stats.json"
    _write_json(out, payload)
    pn_mean = _get(parser, "stats", "pn_mean", float)
    if pn_mean is not None:
        from .photonstats import counting_distribution

        n_max = _get(parser, "stats", "pn_n_max", int, default=50)
        probs, tail = counting_distribution(pn_mean, n_max)
        _write_table(
            args.out, "pn", args.format,
            _meta(args, {"N": pn_mean, "tail": float(tail)}),
            ["n", "P"], list(enumerate(map(float, probs))),
        )
    print(f"stats: total entropy rate {report.total_rate!r} -> {out}")
    return 0


def run_rotor(args, parser):
    geometry, units, material, body, numerics = _build_scenario(parser)
    if body["inertia"] is None:
        raise ConfigError("[body] inertia: required for the rotor scenario")
    Omega0, I = body["omega"], body["inertia"]
    law_kind = _get(parser, "rotor", "law", str, default="radiation").lower()
    if law_kind == "powerlaw":
        coeff = _get(parser, "rotor", "coeff", float, required=True)
        exponent = _get(parser, "rotor", "exponent", float, required=True)
        law = TorqueLaw.power_law(coeff, exponent)
    elif law_kind == "radiation":
        state0 = ThermalState(T_object=body["t_object"], T_env=body["t_env"])
        hi = _get(parser, "rotor", "omega_hi", float, default=2.0 * Omega0)
        if geometry == "cylinder":
            # thin-cylinder channels are weakly coupled (N << 1): Mbar2 ~ Mbar
            def moments(W):
                M = integrate_power_cylinder(
                    material, body["radius"], body["length"], float(W)
                ).M
                return (M, M)

            law = tabulate_torque_law(moments, (0.0, hi))
        else:
            table = _make_table(geometry, material, body)
            law = torque_law_from_radiation(
                table, state0, omega_range=(0.0, hi), rtol=1e-6,
                m_max=numerics["m_max"], epsrel=numerics["rel_tol"],
            )
    else:
        raise ConfigError("[rotor] law: must be 'radiation' or 'powerlaw'")

    slope = law.drift_derivative(Omega0)
    if np.ndim(slope):
        slope = float(np.asarray(slope).ravel()[0])
    if slope <= 0:
        raise ConfigError("[rotor]: torque law has no confining slope at omega")
    kappa = slope / I
    dt = numerics["dt"] if numerics["dt"] is not None else 0.02 / kappa
    t_total = numerics["t_total"] if numerics["t_total"] is not None else 30.0 / kappa
    drive = _get(parser, "rotor", "drive", bool, default=True)

    ens = simulate_ensemble(
        law, I=I, omega0=Omega0, t_total=t_total, dt=dt,
        n_traj=numerics["n_traj"], seed=args.seed,
        drive_at=Omega0 if drive else None, n_record=numerics["n_record"],
    )
    meta = _meta(args, {"adiabaticity_max": ens.adiabaticity_max})
    rows = [
        (float(t), j, float(w))
        for j, wrow in enumerate(ens.omegas)
        for t, w in zip(ens.times, wrow)
    ]
    _write_table(args.out, "trajectories", args.format, meta, ["t", "traj_id", "omega"], rows)

    summary = {
        "meta": meta,
        "mean": float(ens.final.mean()),
        "var": float(ens.final.var()),
        "IDeltaOmega_mc": float(I * ens.final.std()),
    }
    if drive:
        dist = fokker_planck_stationary(law, Omega0, I)
        _write_table(
            args.out, "stationary", args.format, meta, ["omega", "pdf"],
            list(zip(map(float, dist.omega), map(float, dist.pdf))),
        )
        summary["IDeltaOmega_analytic"] = uncertainty(law, Omega0, I)
        summary["KS_mc_vs_analytic"] = dist.ks_statistic(ens.final)
    if units is not None:
        summary["si"] = {"mean_rad_per_s": units.frequency_si(summary["mean"])}
    _write_json(Path(args.out) / "rotor.json", summary)
    print(f"rotor: {numerics['n_traj']} trajectories -> {args.out}")
    return 0


def run_twobody(args, parser):
    geometry, units, material, body, numerics = _build_scenario(parser)
    if geometry not in ("disk", "sphere"):
        raise ConfigError("[scenario] geometry: twobody supports disk (2d) and sphere (3d)")
    mode = _get(parser, "twobody", "mode", str, default="3d" if geometry == "sphere" else "2d")
    if mode not in ("2d", "3d"):
        raise ConfigError("[twobody] mode: must be '2d' or '3d'")
    d = _get(parser, "twobody", "d", float, required=True)
    test_radius = _get(parser, "twobody", "test_radius", float, required=True)
    if units is not None:
        d = units.length(d)
        test_radius = units.length(test_radius)
    test_model_name = _get(parser, "twobody", "test_model", str, required=True).lower()
    if test_model_name == "drude":
        ts = _get(parser, "twobody", "test_sigma", float, required=True)
        if units is not None:
            ts = units.conductivity(si_conductivity_to_gaussian(ts))
        test_model = Drude(ts)
    elif test_model_name == "constant":
        test_model = ConstantEpsilon(
            _get(parser, "twobody", "test_eps_re", float, required=True),
            _get(parser, "twobody", "test_eps_im", float, default=0.0),
        )
    elif test_model_name == "vacuum":
        test_model = Vacuum()
    else:
        raise ConfigError("[twobody] test_model: must be drude, constant or vacuum")

    cfg = TwoBodyConfig(d, material, body["radius"], test_model, test_radius)
    Omega = body["omega"]
    payload = {"d": d, "mode": mode}
    if mode == "2d":
        payload["M_transfer"] = torque_on_test_2d(cfg, Omega)
    else:
        payload["M_transfer"] = torque_on_test_3d(cfg, Omega)
        payload["F_y"] = tangential_force_3d(cfg, Omega)
    flags = {"single_reflection": True, "d_over_max_radius": d / max(body["radius"], test_radius)}
    payload = {"meta": _meta(args, flags), **payload}
    if units is not None:
        payload["si"] = {"M_transfer_Nm": units.torque_si(payload["M_transfer"])}
        if "F_y" in payload:
            payload["si"]["F_y_N"] = units.force_si(payload["F_y"])
    _write_json(Path(args.out) / "twobody.json", payload)

    if _get(parser, "twobody", "sweep", bool, default=False):
        n = _get(parser, "twobody", "sweep_points", int, default=7)
        ds = np.geomspace(d, 10 * d, n)
        Ms = torque_vs_distance(cfg, Omega, ds, mode=mode)
        _write_table(
            args.out, "twobody_sweep", args.format, _meta(args, flags),
            ["d", "M_transfer"], list(zip(map(float, ds), map(float, Ms))),
        )
    print(f"twobody: M={payload['M_transfer']!r} -> {args.out}")
    return 0


def run_verify(args, parser):
    from .acceptance import run_all

    results = run_all(include_monte_carlo=args.full)
    for r in results:
        print(r.row())
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} criteria passed")
    return 0 if n_fail == 0 else 1


COMMANDS = {
    "power": run_power,
    "spectrum": run_spectrum,
    "stats": run_stats,
    "rotor": run_rotor,
    "twobody": run_twobody,
    "verify": run_verify,
}


def build_argparser():
    ap = argparse.ArgumentParser(
        prog="spinrad",
        description="Radiation, friction and stochastic rotation of spinning dispersive bodies",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name != "verify":
            p.add_argument("--config", required=True, help="scenario config (INI)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)
        if name == "verify":
            p.add_argument("--full", action="store_true",
                           help="include the Monte-Carlo rotor criteria")
    return ap


def main(argv=None):
    args = build_argparser().parse_args(argv)
    try:
        if args.command == "verify":
            return run_verify(args, None)
        parser = load_config(args.config)
        Path(args.out).mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args, parser)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, StepSizeError) as exc:
        print(f"numeric non-convergence: {exc}", file=sys.stderr)
        return 3
    except SpinradError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
