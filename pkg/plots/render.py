#!/usr/bin/env python3
"""Render publication-style figures from metasurf CLI output files.

Usage:
    python3 plots/render.py RECIPE.json

The recipe is a JSON document:

    {
      "kind": "dispersion" | "stability" | "spectra" | "field",
      "inputs": ["file.csv", ...],
      "output": "figure.png",
      ... kind-specific options (see the KINDS table below)
    }

Rendering is deterministic: fixed style sheet, fixed color maps, no embedded
timestamps, so re-rendering an unchanged recipe reproduces identical bytes.
Inputs are validated against the CLI's CSV header schemas before anything is
drawn; a mismatch aborts naming the offending column.  This package only
reads the CLI's files; it never imports the solver library.
"""
import json
import struct
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np               # noqa: E402

STYLE = {
    "figure.dpi": 150,
    "savefig.dpi": 150,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "grid.linestyle": ":",
    "lines.linewidth": 1.4,
    "image.cmap": "viridis",
}

EXPECTED_HEADERS = {
    "dispersion": ["k_over_kp", "omega_over_omegap", "branch"],
    "stability_grid": ["d_nm", "lambda_nm", "gamma_total_J_per_m2_per_A2"],
    "stability_contour": ["lambda_nm", "d_critical_nm"],
    "spectra": ["sweep_var", "order_m", "re", "im", "intensity"],
    "field": ["x_over_period", "z_times_g", "intensity"],
}


class RecipeError(Exception):
    pass


def read_csv(path):
    text = Path(path).read_text().strip()
    if not text:
        raise RecipeError(f"empty input file: {path}")
    lines = text.splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    if not rows:
        raise RecipeError(f"no data rows in {path}")
    return header, rows


def check_header(header, expected_key, path):
    expected = EXPECTED_HEADERS[expected_key]
    for i, name in enumerate(expected):
        if i >= len(header) or header[i] != name:
            found = header[i] if i < len(header) else "<missing>"
            raise RecipeError(
                f"{path}: column {i} is '{found}', expected '{name}'")


def read_binary_grid(path):
    raw = Path(path).read_bytes()
    if len(raw) < 16 or raw[:4] != b"DGF1":
        raise RecipeError(f"{path}: not a DGF1 grid")
    nx, nz, _ = struct.unpack("<III", raw[4:16])
    payload = np.frombuffer(raw[16:], dtype="<f8")
    if payload.size != nx * nz:
        raise RecipeError(f"{path}: truncated DGF1 payload")
    return payload.reshape(nz, nx)


# ----------------------------------------------------------------- figures

def render_dispersion(recipe):
    """Dispersion curves normalised to (k/k_p, omega/omega_p), with the
    light line omega = c k overlaid."""
    fig, ax = plt.subplots(figsize=(4.2, 3.4))
    colors = {"lower": "C3", "upper": "C0", "even": "C3", "odd": "C0"}
    k_max = 0.0
    for path in recipe["inputs"]:
        header, rows = read_csv(path)
        check_header(header, "dispersion", path)
        branches = {}
        for r in rows:
            branches.setdefault(r[2], []).append((float(r[0]), float(r[1])))
        for name, pts in sorted(branches.items()):
            pts.sort()
            ks = [p[0] for p in pts]
            ws = [p[1] for p in pts]
            ax.plot(ks, ws, color=colors.get(name, "k"),
                    label=f"{Path(path).stem}:{name}")
            k_max = max(k_max, max(ks))
    line = np.linspace(0, k_max, 50)
    ax.plot(line, line, color="orange", lw=1.0, label="light line")
    ax.axhline(1 / np.sqrt(2), color="gray", ls="--", lw=0.8)
    ax.axhline(1.0, color="gray", ls="--", lw=0.8)
    ax.set_xlabel(r"$k_\parallel / k_p$")
    ax.set_ylabel(r"$\omega / \omega_p$")
    ax.set_ylim(0, max(1.3, 1.05))
    ax.legend(fontsize=6, frameon=False)
    return fig


def render_stability(recipe):
    """Signed stiffness map (first grid input) with the zero contour of
    every contour input overlaid and labelled."""
    grids = [p for p in recipe["inputs"] if "contour" not in Path(p).stem]
    contours = [p for p in recipe["inputs"] if "contour" in Path(p).stem]
    if not grids:
        raise RecipeError("stability recipe needs a grid input")
    header, rows = read_csv(grids[0])
    check_header(header, "stability_grid", grids[0])
    d = sorted({float(r[0]) for r in rows})
    lam = sorted({float(r[1]) for r in rows})
    gamma = np.full((len(d), len(lam)), np.nan)
    d_index = {v: i for i, v in enumerate(d)}
    lam_index = {v: j for j, v in enumerate(lam)}
    for r in rows:
        gamma[d_index[float(r[0])], lam_index[float(r[1])]] = float(r[2])

    fig, ax = plt.subplots(figsize=(4.4, 3.4))
    signed = np.sign(gamma) * np.log10(1.0 + np.abs(gamma))
    vmax = np.nanmax(np.abs(signed))
    mesh = ax.pcolormesh(lam, d, signed, cmap="RdBu_r",
                         vmin=-vmax, vmax=vmax, shading="nearest")
    fig.colorbar(mesh, ax=ax,
                 label=r"sign$(\Gamma)\log_{10}(1+|\Gamma|)$")
    for i, path in enumerate(contours):
        h, rs = read_csv(path)
        check_header(h, "stability_contour", path)
        pts = [(float(r[0]), float(r[1])) for r in rs
               if r[1] != "nan"]
        if pts:
            ax.plot([p[0] for p in pts], [p[1] for p in pts],
                    color=f"C{i}", label=Path(path).stem.split("_")[-1])
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"corrugation period $\lambda$ [nm]")
    ax.set_ylabel(r"film thickness $d$ [nm]")
    if contours:
        ax.legend(fontsize=6, frameon=False, title="zero lines")
    return fig


def render_spectra(recipe):
    """First-order diffraction intensities against the sweep variable, one
    curve per order, with effective-surface oracle points overlaid when the
    input carries them."""
    fig, ax = plt.subplots(figsize=(4.4, 3.2))
    markers = {"-1": "^", "1": "o", "+1": "o"}
    for path in recipe["inputs"]:
        header, rows = read_csv(path)
        check_header(header, "spectra", path)
        has_oracle = "intensity_effective" in header
        eff_col = header.index("intensity_effective") if has_oracle else None
        series = {}
        for r in rows:
            if len(header) > 5 and header[-1] == "anomaly" \
                    and r[len(header) - 1] == "1":
                continue
            series.setdefault(r[1], []).append(
                (float(r[0]), float(r[4]),
                 float(r[eff_col]) if has_oracle else None))
        for order, pts in sorted(series.items()):
            pts.sort()
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            color = "C3" if order.lstrip("+").startswith("1") else "C0"
            ax.plot(xs, ys, color=color, label=f"m={order}")
            if has_oracle:
                ax.plot(xs[:: max(1, len(xs) // 24)],
                        [p[2] for p in pts][:: max(1, len(xs) // 24)],
                        linestyle="none", marker=markers.get(order, "s"),
                        markersize=3, markerfacecolor="none", color="k")
    ax.set_yscale(recipe.get("yscale", "log"))
    ax.set_xlabel(recipe.get("xlabel", "sweep variable"))
    ax.set_ylabel(r"$|E_m|^2$ [$\mathrm{V^2 m^{-2}}$]")
    ax.legend(fontsize=6, frameon=False)
    return fig


def render_field(recipe):
    """Field snapshots (one panel per input) with cross-sections above and
    below; panels named in ``shared_scale`` share one color scale (and a
    single colorbar), the rest get their own."""
    inputs = recipe["inputs"]
    shared = set(recipe.get("shared_scale", list(range(1, len(inputs)))))
    grids = []
    for path in inputs:
        if str(path).endswith(".bin"):
            grid = read_binary_grid(path)
            x = np.linspace(0, 1, grid.shape[1], endpoint=False)
            z = np.linspace(-3, 3, grid.shape[0])
        else:
            header, rows = read_csv(path)
            check_header(header, "field", path)
            x = sorted({float(r[0]) for r in rows})
            z = sorted({float(r[1]) for r in rows})
            grid = np.full((len(z), len(x)), np.nan)
            xi = {v: i for i, v in enumerate(x)}
            zi = {v: i for i, v in enumerate(z)}
            for r in rows:
                grid[zi[float(r[1])], xi[float(r[0])]] = float(r[2])
            x, z = np.asarray(x), np.asarray(z)
        grids.append((np.asarray(x), np.asarray(z), grid))

    vmax_shared = max((g[2].max() for i, g in enumerate(grids)
                       if i in shared), default=None)
    n = len(grids)
    fig, axes = plt.subplots(
        3, n, figsize=(3.0 * n, 5.2),
        gridspec_kw={"height_ratios": [1, 2.4, 1]}, squeeze=False)
    mesh_shared = None
    for i, (x, z, grid) in enumerate(grids):
        top, mid, bot = axes[0][i], axes[1][i], axes[2][i]
        vmax = vmax_shared if i in shared else grid.max()
        mesh = mid.pcolormesh(x, z, grid, vmin=0, vmax=vmax,
                              shading="nearest")
        if i in shared:
            mesh_shared = mesh
        mid.set_xlabel(r"$x g / 2\pi$")
        mid.set_ylabel(r"$z g$" if i == 0 else "")
        label = recipe.get("labels", [None] * n)[i]
        if label:
            mid.set_title(label, fontsize=8)
        iz_hi = int(np.argmin(np.abs(z - 1.5)))
        iz_lo = int(np.argmin(np.abs(z + 1.5)))
        top.plot(x, grid[iz_hi], color="C0")
        top.set_ylabel(r"$|E|^2(zg{=}1.5)$" if i == 0 else "", fontsize=7)
        bot.plot(x, grid[iz_lo], color="C3")
        bot.set_ylabel(r"$|E|^2(zg{=}-1.5)$" if i == 0 else "", fontsize=7)
    if mesh_shared is not None:
        fig.colorbar(mesh_shared, ax=[axes[1][i] for i in sorted(shared)],
                     label=r"$|E|^2$", fraction=0.05)
    return fig


KINDS = {
    "dispersion": render_dispersion,
    "stability": render_stability,
    "spectra": render_spectra,
    "field": render_field,
}


def render(recipe_path) -> Path:
    recipe = json.loads(Path(recipe_path).read_text())
    kind = recipe.get("kind")
    if kind not in KINDS:
        raise RecipeError(f"unknown figure kind '{kind}'")
    inputs = recipe.get("inputs", [])
    if not inputs:
        raise RecipeError("recipe lists no inputs")
    for path in inputs:
        if not Path(path).exists():
            raise RecipeError(f"input does not exist: {path}")
    output = recipe.get("output")
    if not output:
        raise RecipeError("recipe lists no output")
    with plt.style.context(STYLE):
        fig = KINDS[kind](recipe)
        fig.savefig(output, metadata={"Software": "metasurf-plots"})
        plt.close(fig)
    return Path(output)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: render.py RECIPE.json", file=sys.stderr)
        return 2
    try:
        out = render(argv[0])
    except (RecipeError, OSError, json.JSONDecodeError) as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
