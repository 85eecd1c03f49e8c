"""Batch command-line front end.

Subcommands: dispersion | film-dispersion | stability | diffract | field |
cerenkov | casimir-du.  Each accepts a JSON config document (--config) whose
keys match the flag names; explicit CLI flags override config values, which
override the built-in defaults.  Exit codes: 0 ok, 2 config error, 3 solver
failure.  METASURF_THREADS (or --threads) sets the worker count; sweep points
are sharded deterministically so output ordering is stable.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import casimir, cerenkov, effective, grating, io, layered
from .constants import c, ev_to_rad_s, hbar, q_e
from .emcore import free_electron

GOLD_OMEGA_P = 2.0 * math.pi * 2.068e15          # rad/s
MERCURY_OMEGA_P_EV = 6.83                        # eV
MERCURY_GAMMA_SF_MEV_A2 = 27.6                   # meV/Angstrom^2


class ConfigError(Exception):
    pass


def _threads(value) -> int:
    if value:
        return int(value)
    env = os.environ.get("METASURF_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _sweep_map(fn, items, threads):
    """Order-preserving parallel map over sweep points."""
    if threads <= 1 or len(items) < 4:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _axis(lo, hi, count, spacing):
    if count < 2:
        raise ConfigError("sweep count must be >= 2")
    if spacing == "log":
        if lo <= 0:
            raise ConfigError("log spacing needs positive bounds")
        return np.geomspace(lo, hi, count)
    if spacing == "linear":
        return np.linspace(lo, hi, count)
    raise ConfigError(f"unknown spacing '{spacing}'")


# ------------------------------------------------------------------ params

PARAMS = {
    "dispersion": [
        ("omega_p", float, GOLD_OMEGA_P, "plasma frequency [rad/s]"),
        ("omega_p_ev", float, None, "plasma frequency [eV] (overrides omega_p)"),
        ("eps_v", float, 1.0, "permittivity above the metal"),
        ("k_min_over_kp", float, 0.02, "lower k bound in units of omega_p/c"),
        ("k_max_over_kp", float, 3.0, "upper k bound in units of omega_p/c"),
        ("count", int, 200, "number of k samples"),
        ("spacing", str, "linear", "k spacing: linear|log"),
    ],
    "film-dispersion": [
        ("omega_p", float, GOLD_OMEGA_P, "plasma frequency [rad/s]"),
        ("omega_p_ev", float, None, "plasma frequency [eV] (overrides omega_p)"),
        ("eps_v", float, 1.0, "permittivity above the film"),
        ("eps_i", float, 1.0, "substrate permittivity"),
        ("d_over_lambda_p", float, 0.1, "film thickness over 2 pi c/omega_p"),
        ("k_min_over_kp", float, 0.02, "lower k bound in omega_p/c units"),
        ("k_max_over_kp", float, 3.0, "upper k bound in omega_p/c units"),
        ("count", int, 200, "number of k samples"),
        ("spacing", str, "linear", "k spacing: linear|log"),
        ("quasistatic", int, 0, "1: solve the c->infinity kernels"),
    ],
    "stability": [
        ("omega_p_ev", float, MERCURY_OMEGA_P_EV, "plasma frequency [eV]"),
        ("gamma_sf_mev_a2", float, MERCURY_GAMMA_SF_MEV_A2,
         "surface tension [meV/A^2]"),
        ("eps_i_list", str, "1.0,2.0,3.0", "substrate permittivities"),
        ("d_min_nm", float, 1.0, "smallest thickness [nm]"),
        ("d_max_nm", float, 300.0, "largest thickness [nm]"),
        ("n_d", int, 64, "thickness samples"),
        ("lambda_min_nm", float, 10.0, "smallest corrugation period [nm]"),
        ("lambda_max_nm", float, 5000.0, "largest corrugation period [nm]"),
        ("n_lambda", int, 64, "period samples"),
        ("spacing", str, "log", "axis spacing: linear|log"),
    ],
    "diffract": [
        ("eps_above", float, 1.0, "permittivity above the boundary"),
        ("eps_below", float, 2.25, "permittivity below the boundary"),
        ("g_rad_per_um", float, 2.0 * math.pi, "modulation wavenumber [rad/um]"),
        ("amplitude_nm", float, 1.0, "modulation depth A [nm]"),
        ("omega_in_over_gc", float, 0.8, "input frequency in units of g c"),
        ("v_ph_over_c", float, 0.0, "modulation phase velocity Omega/(g c)"),
        ("m_cut", int, 3, "Floquet cutoff"),
        ("polarization", str, "s", "input polarization: s|p"),
        ("theta_in_deg", float, 0.0, "incidence angle for non-angle sweeps"),
        ("sweep", str, "angle", "sweep variable: angle|frequency|amplitude"),
        ("sweep_min", float, -80.0, "sweep start (deg | omega/gc | nm)"),
        ("sweep_max", float, 80.0, "sweep end"),
        ("count", int, 161, "sweep samples"),
        ("spacing", str, "linear", "sweep spacing: linear|log"),
        ("oracle", int, 0, "1: add effective-surface intensity column"),
        ("orders", str, "-1,1", "orders to report"),
    ],
    "field": [
        ("eps_above", float, 1.0, "permittivity above the boundary"),
        ("eps_below", float, 2.25, "permittivity below the boundary"),
        ("g_rad_per_um", float, 2.0 * math.pi, "modulation wavenumber [rad/um]"),
        ("amplitude_nm", float, 50.0, "modulation depth A [nm]"),
        ("v_ph_over_c_list", str, "0.2,0.8,1.2", "profile velocities / c"),
        ("omega_in_over_gc", float, 0.0, "input frequency (0 = DC drive)"),
        ("m_cut", int, 10, "Floquet cutoff"),
        ("polarization", str, "s", "input polarization: s|p"),
        ("e_in", float, 1.0, "input field amplitude [V/m]"),
        ("nx", int, 256, "grid points along x (one period)"),
        ("nz", int, 256, "grid points along z in [-3/g, 3/g]"),
        ("time", float, 0.0, "snapshot time [s]"),
        ("format", str, "csv", "output format: csv|bin"),
    ],
    "cerenkov": [
        ("mode", str, "beta", "sweep variable: beta|omega"),
        ("refractive_index", float, 1.5, "medium refractive index"),
        ("beta", float, 0.9, "speed fraction (omega sweep)"),
        ("omega", float, 1.0e15, "angular frequency [rad/s] (beta sweep)"),
        ("sweep_min", float, 0.1, "sweep start (beta | rad/s)"),
        ("sweep_max", float, 0.999, "sweep end"),
        ("count", int, 200, "sweep samples"),
        ("spacing", str, "linear", "sweep spacing"),
    ],
    "casimir-du": [
        ("omega_p", float, GOLD_OMEGA_P, "plasma frequency [rad/s]"),
        ("omega_p_ev", float, None, "plasma frequency [eV] (overrides omega_p)"),
        ("d_list_nm", str, "5,10,50", "film thicknesses [nm]"),
    ],
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="metasurf",
        description="plasmon dispersion, film stability and space-time "
                    "modulated surface diffraction, batch style")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, params in PARAMS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config document")
        p.add_argument("--out", help="output path (or prefix)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker count (default: METASURF_THREADS or cores)")
        for pname, ptype, default, help_text in params:
            p.add_argument(f"--{pname.replace('_', '-')}", dest=pname,
                           type=ptype, default=None,
                           help=f"{help_text} (default {default})")
    return parser


def _resolve(args):
    """defaults < config file < explicit flags."""
    table = PARAMS[args.command]
    merged = {name: default for name, _, default, _ in table}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        types = {name: ptype for name, ptype, _, _ in table}
        for key, val in doc.items():
            if key in ("command", "out", "threads"):
                continue
            if key not in merged:
                raise ConfigError(f"unknown config key '{key}'")
            merged[key] = types[key](val)
    for name, _, _, _ in table:
        cli_val = getattr(args, name)
        if cli_val is not None:
            merged[name] = cli_val
    return merged


def _omega_p(p) -> float:
    if p.get("omega_p_ev") is not None:
        return ev_to_rad_s(p["omega_p_ev"])
    return p["omega_p"]


def _out_path(args, default_name) -> Path:
    out = Path(args.out) if args.out else Path(default_name)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    return out


# ------------------------------------------------------------------ commands

def cmd_dispersion(args, p, threads):
    wp = _omega_p(p)
    model = free_electron(wp)
    ks = _axis(p["k_min_over_kp"], p["k_max_over_kp"], p["count"],
               p["spacing"]) * model.k_p
    rows = []
    for k in ks:
        lo, up = layered.spp_single_explicit(float(k), model, p["eps_v"])
        rows.append((k / model.k_p, lo / wp, "lower"))
        rows.append((k / model.k_p, up / wp, "upper"))
    io.write_csv(_out_path(args, "dispersion.csv"), "dispersion", rows)
    return 0


def cmd_film_dispersion(args, p, threads):
    wp = _omega_p(p)
    model = free_electron(wp)
    d = p["d_over_lambda_p"] * 2.0 * math.pi * c / wp
    stack = layered.FilmStack(p["eps_v"], -1.0, p["eps_i"], d)
    ks = _axis(p["k_min_over_kp"], p["k_max_over_kp"], p["count"],
               p["spacing"]) * model.k_p

    def solve(k):
        return layered.film_dispersion_solve(
            stack, float(k), model, quasistatic=bool(p["quasistatic"]))

    results = _sweep_map(solve, list(ks), threads)
    rows = []
    for k, roots in zip(ks, results):
        for r in roots:
            rows.append((k / model.k_p, r.omega / wp, r.parity))
    io.write_csv(_out_path(args, "film_dispersion.csv"), "dispersion", rows)
    return 0


def cmd_stability(args, p, threads):
    wp = ev_to_rad_s(p["omega_p_ev"])
    gamma_sf = p["gamma_sf_mev_a2"] * 1e-3 * q_e / 1e-20   # meV/A^2 -> J/m^2
    material = casimir.FilmMaterial(wp, gamma_sf)
    d_axis = _axis(p["d_min_nm"], p["d_max_nm"], p["n_d"], p["spacing"]) * 1e-9
    lam_axis = _axis(p["lambda_min_nm"], p["lambda_max_nm"], p["n_lambda"],
                     p["spacing"]) * 1e-9
    out = _out_path(args, "stability")
    for eps_i in [float(s) for s in p["eps_i_list"].split(",")]:
        grid = casimir.stability_map(d_axis, lam_axis, material, eps_i)
        tag = f"eps{eps_i:g}"
        grid_rows = []
        for i, d in enumerate(d_axis):
            for j, lam in enumerate(lam_axis):
                grid_rows.append((d * 1e9, lam * 1e9, grid.gamma_total[i, j]))
        io.write_csv(Path(f"{out}_grid_{tag}.csv"), "stability_grid",
                     grid_rows)
        contour_rows = []
        for j, lam in enumerate(lam_axis):
            dc = grid.critical_d[j]
            contour_rows.append(
                (lam * 1e9, dc * 1e9 if np.isfinite(dc) else float("nan")))
        io.write_csv(Path(f"{out}_contour_{tag}.csv"), "stability_contour",
                     contour_rows)
    return 0


def _grating_config(p, amplitude_m, omega_in, theta_rad):
    g = p["g_rad_per_um"] * 1e6
    return grating.GratingConfig(
        amplitude=amplitude_m, g=g,
        omega_mod=p["v_ph_over_c"] * g * c,
        eps_above=complex(p["eps_above"]), eps_below=complex(p["eps_below"]),
        m_cut=p["m_cut"], omega_in=omega_in, theta_in=theta_rad,
        polarization=p["polarization"])


def cmd_diffract(args, p, threads):
    g = p["g_rad_per_um"] * 1e6
    orders = [int(s) for s in p["orders"].split(",")]
    sweep = p["sweep"]
    xs = _axis(p["sweep_min"], p["sweep_max"], p["count"], p["spacing"])

    def configure(x):
        if sweep == "angle":
            return _grating_config(p, p["amplitude_nm"] * 1e-9,
                                   p["omega_in_over_gc"] * g * c,
                                   math.radians(float(x)))
        if sweep == "frequency":
            return _grating_config(p, p["amplitude_nm"] * 1e-9,
                                   float(x) * g * c,
                                   math.radians(p["theta_in_deg"]))
        if sweep == "amplitude":
            return _grating_config(p, float(x) * 1e-9,
                                   p["omega_in_over_gc"] * g * c,
                                   math.radians(p["theta_in_deg"]))
        raise ConfigError(f"unknown sweep '{sweep}'")

    def solve(x):
        try:
            cfg = configure(x)
            sol = grating.solve_diffraction(cfg)
            eff = effective.solve_effective(cfg) if p["oracle"] else None
            return sol, eff, 0
        except (grating.WoodAnomalyError, grating.SingularReplicaError):
            return None, None, 1

    results = _sweep_map(solve, [float(x) for x in xs], threads)
    rows = []
    nan = float("nan")
    schema = "diffract_oracle" if p["oracle"] else "diffract"
    for x, (sol, eff, flagged) in zip(xs, results):
        for m in orders:
            if flagged:
                row = [x, m, nan, nan, nan] + ([nan] if p["oracle"] else [])
            else:
                amp = sol.transmitted(m)
                row = [x, m, amp.real, amp.imag, abs(amp) ** 2]
                if p["oracle"]:
                    row.append(abs(eff.transmitted(m)) ** 2)
            rows.append(row + [flagged])
    out = _out_path(args, f"diffract_{sweep}.csv")
    io.write_csv(out, schema, rows, extra_columns=["anomaly"])

    if sweep == "amplitude":
        sidecar = {}
        for m in orders:
            pts = [(float(x), r[4]) for x, (sol, _, fl) in zip(xs, results)
                   if not fl
                   for r in [[x, m,
                              sol.transmitted(m).real,
                              sol.transmitted(m).imag,
                              abs(sol.transmitted(m)) ** 2]]]
            xs_fit = np.array([a for a, b in pts])
            ys_fit = np.array([b for a, b in pts])
            good = ys_fit > 0
            slope = float(np.polyfit(np.log(xs_fit[good]),
                                     np.log(ys_fit[good]), 1)[0])
            sidecar[str(m)] = slope
        Path(str(out) + ".json").write_text(
            json.dumps({"fitted_exponent": sidecar}, indent=2) + "\n")
    return 0


def cmd_field(args, p, threads):
    g = p["g_rad_per_um"] * 1e6
    out = _out_path(args, "field")
    x = np.linspace(0.0, 2.0 * math.pi / g, p["nx"], endpoint=False)
    z = np.linspace(-3.0 / g, 3.0 / g, p["nz"])
    for v_over_c in [float(s) for s in p["v_ph_over_c_list"].split(",")]:
        cfg = grating.GratingConfig(
            amplitude=p["amplitude_nm"] * 1e-9, g=g,
            omega_mod=v_over_c * g * c,
            eps_above=complex(p["eps_above"]),
            eps_below=complex(p["eps_below"]),
            m_cut=p["m_cut"], omega_in=p["omega_in_over_gc"] * g * c,
            theta_in=0.0, polarization=p["polarization"], e_in=p["e_in"])
        sol = grating.solve_diffraction(cfg)
        grid = grating.reconstruct_fields(cfg, sol, x, z, t=p["time"])
        tag = f"vph{v_over_c:g}"
        if p["format"] == "bin":
            io.write_binary_grid(Path(f"{out}_{tag}.bin"), grid)
        elif p["format"] == "csv":
            rows = []
            for iz, zv in enumerate(z):
                for ix, xv in enumerate(x):
                    rows.append((xv * g / (2.0 * math.pi), zv * g,
                                 grid[iz, ix]))
            io.write_csv(Path(f"{out}_{tag}.csv"), "field", rows)
        else:
            raise ConfigError(f"unknown format '{p['format']}'")
    return 0


def cmd_cerenkov(args, p, threads):
    n = p["refractive_index"]
    xs = _axis(p["sweep_min"], p["sweep_max"], p["count"], p["spacing"])
    rows = []
    if p["mode"] == "beta":
        for b in xs:
            charge = cerenkov.SwiftCharge(q_e, float(b), n)
            rows.append((b, cerenkov.frank_tamm_spectral_power(
                charge, p["omega"])))
    elif p["mode"] == "omega":
        charge = cerenkov.SwiftCharge(q_e, p["beta"], n)
        for w in xs:
            rows.append((w, cerenkov.frank_tamm_spectral_power(
                charge, float(w))))
    else:
        raise ConfigError(f"unknown mode '{p['mode']}'")
    out = _out_path(args, "cerenkov.csv")
    io.write_csv(out, "cerenkov", rows)
    if p["mode"] == "omega":
        ys = np.array([r[1] for r in rows])
        ws = np.array([r[0] for r in rows])
        if np.all(ys > 0):
            coeff = np.polyfit(ws, ys, 1)
            resid = float(np.max(np.abs(np.polyval(coeff, ws) - ys))
                          / np.max(ys))
            Path(str(out) + ".json").write_text(json.dumps(
                {"slope_W_per_m_per_rad_s2": float(coeff[0]),
                 "linear_residual": resid}, indent=2) + "\n")
    return 0


def cmd_casimir_du(args, p, threads):
    wp = _omega_p(p)
    wsp = wp / math.sqrt(2.0)
    rows = []
    for d_nm in [float(s) for s in p["d_list_nm"].split(",")]:
        d = d_nm * 1e-9
        expanded = casimir.quasistatic_delta_u(d, wsp, expanded=True)
        full = casimir.quasistatic_delta_u(d, wsp, expanded=False)
        closed = -math.pi * hbar * wsp / (32.0 * d * d)
        rows.append((d_nm, expanded, full, closed))
    io.write_csv(_out_path(args, "casimir_du.csv"), "casimir_du", rows)
    return 0


COMMANDS = {
    "dispersion": cmd_dispersion,
    "film-dispersion": cmd_film_dispersion,
    "stability": cmd_stability,
    "diffract": cmd_diffract,
    "field": cmd_field,
    "cerenkov": cmd_cerenkov,
    "casimir-du": cmd_casimir_du,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        params = _resolve(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    threads = _threads(args.threads)
    try:
        return COMMANDS[args.command](args, params, threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:   # solver failures
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
