"""Render the six figure kinds from horizonbattery CSV tables.

Each kind declares the exact CSV header it consumes; a mismatched input
fails up front with the missing/extra column names.  Rendering is
deterministic: fixed figure geometry, fixed colormap, no timestamps in the
output metadata.
"""

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SCHEMAS = {
    "lyapunov": ["x_h", "lambda_fit", "lambda_stderr", "window_lo", "window_hi"],
    "storage-surface": ["x_h0", "x_ht", "e_max_norm", "p_max_norm", "tau_star", "boundary_flag"],
    "power-and-time": ["x_h0", "x_ht", "e_max_norm", "p_max_norm", "tau_star", "boundary_flag"],
    "commutator-ladder": ["x_ht", "k", "norm"],
    "size-scan": ["L", "x_ht", "p_max_norm", "tau_star"],
    "regularized": ["x_ht_eff", "p_max_norm", "tau_star", "t_max"],
}

RCPARAMS = {
    "figure.figsize": (6.0, 4.5),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
}

MARKERS = ["o", "p", "D", "^", "s", "v", "*"]


class SchemaError(ValueError):
    pass


class EmptyDataError(ValueError):
    pass


@dataclass
class FigureSpec:
    kind: str
    input_csv: str
    output_path: str
    title: str = ""
    three_d: bool = False
    labels: dict = field(default_factory=dict)


def load_table(path, kind):
    """Read a CSV whose header must match the kind's schema exactly."""
    if kind not in SCHEMAS:
        raise ValueError(f"unknown figure kind {kind!r}; choose from {sorted(SCHEMAS)}")
    expected = SCHEMAS[kind]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header {expected}")
        if header != expected:
            missing = [c for c in expected if c not in header]
            extra = [c for c in header if c not in expected]
            raise SchemaError(
                f"{path}: header does not match the {kind!r} schema; "
                f"missing columns {missing}, unexpected columns {extra}"
            )
        rows = [[float(cell) for cell in row] for row in reader if row]
    if not rows:
        raise EmptyDataError(f"{path}: no data rows")
    data = np.asarray(rows)
    return {name: data[:, idx] for idx, name in enumerate(expected)}


def _fig_lyapunov(table, spec):
    mask = np.isfinite(table["lambda_fit"])
    if not mask.any():
        raise EmptyDataError("every growth-rate cell is flagged (NaN)")
    x = table["x_h"][mask]
    y = 2.0 * table["lambda_fit"][mask]
    err = 2.0 * table["lambda_stderr"][mask]
    fig, ax = plt.subplots()
    line = np.linspace(0.0, max(x.max() * 1.05, 1e-9), 50)
    ax.plot(line, line, color="tab:blue", label="chaos bound $2\\lambda_L = x_h$")
    ax.errorbar(x, y, yerr=err, fmt="o", color="tab:green", ecolor="tab:red",
                capsize=3, label="fitted exponent")
    ax.set_xlabel("$x_h$")
    ax.set_ylabel("fitted growth exponent")
    ax.legend()
    return fig


def _pivot(table, value):
    xs = np.unique(table["x_h0"])
    ys = np.unique(table["x_ht"])
    grid = np.full((ys.size, xs.size), np.nan)
    for x0, xt, v in zip(table["x_h0"], table["x_ht"], table[value]):
        grid[np.searchsorted(ys, xt), np.searchsorted(xs, x0)] = v
    return xs, ys, grid


def _heatmap(ax, xs, ys, grid, label):
    im = ax.imshow(
        grid, origin="lower", aspect="auto", cmap="coolwarm",
        extent=(xs.min(), xs.max(), ys.min(), ys.max()),
    )
    ax.figure.colorbar(im, ax=ax, label=label)
    ax.set_xlabel("$x_{h0}$")
    ax.set_ylabel("$x_{ht}$")


def _fig_storage_surface(table, spec):
    xs, ys, grid = _pivot(table, "e_max_norm")
    if spec.three_d:
        fig = plt.figure()
        ax = fig.add_subplot(projection="3d")
        xx, yy = np.meshgrid(xs, ys)
        top = grid.ravel()
        norm = plt.Normalize(np.nanmin(top), np.nanmax(top))
        colors = plt.get_cmap("coolwarm")(norm(top))
        dx = (xs[1] - xs[0]) * 0.8 if xs.size > 1 else 0.5
        dy = (ys[1] - ys[0]) * 0.8 if ys.size > 1 else 0.5
        ax.bar3d(xx.ravel(), yy.ravel(), np.zeros_like(top), dx, dy, top,
                 color=colors, shade=True)
        ax.set_xlabel("$x_{h0}$")
        ax.set_ylabel("$x_{ht}$")
        ax.set_zlabel("$E_{max}/E_b$")
    else:
        fig, ax = plt.subplots()
        _heatmap(ax, xs, ys, grid, "$E_{max}/E_b$")
    return fig


def _fig_power_and_time(table, spec):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    xs, ys, pgrid = _pivot(table, "p_max_norm")
    _heatmap(ax1, xs, ys, pgrid, "$P_{max}/E_b$")
    ax1.set_title("maximum charging power")
    _, _, tgrid = _pivot(table, "tau_star")
    _heatmap(ax2, xs, ys, tgrid, "$\\tau_*$")
    ax2.set_title("optimal charging time")
    fig.tight_layout()
    return fig


def _fig_commutator_ladder(table, spec):
    fig, ax = plt.subplots()
    ks = np.unique(table["k"]).astype(int)
    for idx, k in enumerate(ks):
        mask = table["k"] == k
        order = np.argsort(table["x_ht"][mask])
        ax.plot(table["x_ht"][mask][order], table["norm"][mask][order],
                marker=MARKERS[idx % len(MARKERS)], label=f"$k={k}$")
    ax.set_yscale("log")
    ax.set_xlabel("$x_{ht}$")
    ax.set_ylabel("$\\|[H, W]_k\\|$")
    ax.legend()
    return fig


def _fig_size_scan(table, spec):
    fig, ax = plt.subplots()
    ax2 = ax.twinx()
    ax2.grid(False)
    for idx, x_ht in enumerate(np.unique(table["x_ht"])):
        mask = table["x_ht"] == x_ht
        order = np.argsort(table["L"][mask])
        L = table["L"][mask][order]
        m = MARKERS[idx % len(MARKERS)]
        ax.plot(L, table["p_max_norm"][mask][order], marker=m, linestyle="-",
                label=f"$x_{{ht}}={x_ht:g}$")
        ax2.plot(L, table["tau_star"][mask][order], marker=m, linestyle="--",
                 alpha=0.6)
    ax.set_xlabel("$L$")
    ax.set_ylabel("$P_{max}/E_b$ (solid)")
    ax2.set_ylabel("$\\tau_*$ (dashed)")
    ax.legend()
    return fig


def _fig_regularized(table, spec):
    order = np.argsort(table["x_ht_eff"])
    x = table["x_ht_eff"][order]
    fig, ax = plt.subplots()
    ax2 = ax.twinx()
    ax2.grid(False)
    ax.plot(x, table["p_max_norm"][order], "o-", color="tab:blue",
            label="$P_{max}/E_b$")
    ax2.plot(x, table["tau_star"][order], "s", color="tab:red", label="$\\tau_*$")
    ax2.axhline(table["t_max"][0], color="gold", linewidth=2,
                label="total charging time")
    ax.set_xlabel("effective scrambling parameter")
    ax.set_ylabel("$P_{max}/E_b$")
    ax2.set_ylabel("$\\tau_*$")
    h1, l1 = ax.get_legend_handles_labels()
    h2, l2 = ax2.get_legend_handles_labels()
    ax.legend(h1 + h2, l1 + l2, loc="center right")
    return fig


_BUILDERS = {
    "lyapunov": _fig_lyapunov,
    "storage-surface": _fig_storage_surface,
    "power-and-time": _fig_power_and_time,
    "commutator-ladder": _fig_commutator_ladder,
    "size-scan": _fig_size_scan,
    "regularized": _fig_regularized,
}


def build_figure(spec):
    """Validate the input table and return the matplotlib figure."""
    table = load_table(spec.input_csv, spec.kind)
    with plt.rc_context(RCPARAMS):
        fig = _BUILDERS[spec.kind](table, spec)
        if spec.title:
            fig.suptitle(spec.title)
    return fig


def render(spec):
    """Render the figure to spec.output_path; returns the path."""
    fig = build_figure(spec)
    metadata = {"Software": None} if spec.output_path.endswith(".png") else None
    fig.savefig(spec.output_path, metadata=metadata)
    plt.close(fig)
    return spec.output_path
