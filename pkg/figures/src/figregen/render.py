"""Figure renderers: one deterministic PNG per figure id.

Every renderer validates its inputs before any file is created, so a
failed render never leaves a blank image behind.  Inputs are opened
read-only and never rewritten.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .io import (FigureError, read_grid_csv, read_robustness_json,  # noqa: E402
                 read_series_csv)

FIGURE_IDS = ("fig1", "fig3", "fig4", "fig5", "fig6", "fig8", "fidelity")

FLOOR = 1e-16   # display floor before taking log10 of deficits


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input files per role, output path, style options."""

    figure_id: str
    inputs: dict
    output: Path
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise FigureError(f"unknown figure id {self.figure_id!r}; "
                              f"expected one of {FIGURE_IDS}")

    def opt(self, key, default):
        return self.style.get(key, default)


def _save(fig, spec: FigureSpec) -> Path:
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=spec.opt("dpi", 200))
    plt.close(fig)
    return out


def _log10(values):
    return np.log10(np.maximum(np.abs(values), FLOOR))


# --------------------------------------------------------------------------
# Individual figures
# --------------------------------------------------------------------------

def _render_fig1(spec: FigureSpec) -> Path:
    _, fdat = read_series_csv(spec.inputs["field"], ["t", "Bx", "By", "Bz"])
    _, sdat = read_series_csv(spec.inputs["spin"], ["t", "sx", "sy", "sz"])
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 7), sharex=True)
    ax1.plot(fdat[:, 0], fdat[:, 3], "-", label="$B_z/B_0$")
    ax1.plot(fdat[:, 0], fdat[:, 2], "--", label="$B_y/B_0$")
    ax1.plot(fdat[:, 0], fdat[:, 1], ":", label="$B_x/B_0$")
    ax1.set_ylabel("field components")
    ax1.legend(loc="best")
    ax2.plot(sdat[:, 0], sdat[:, 3], "-", label="$S_z$")
    ax2.plot(sdat[:, 0], sdat[:, 2], "--", label="$S_y$")
    ax2.plot(sdat[:, 0], sdat[:, 1], ":", label="$S_x$")
    ax2.set_xlabel("$t/t_f$")
    ax2.set_ylabel("spin components")
    ax2.legend(loc="best")
    fig.suptitle("Engineered flip: field and spin evolution")
    return _save(fig, spec)


def _render_fig3(spec: FigureSpec) -> Path:
    panels = spec.inputs["panels"]
    if not panels:
        raise FigureError("fig3 needs at least one (label, path) panel")
    loaded = [(label, *read_grid_csv(path)) for label, path in panels]
    n = len(loaded)
    ncols = 2 if n > 1 else 1
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(5.2 * ncols, 4.0 * nrows),
                             squeeze=False)
    cmap = spec.opt("colormap", "viridis")
    for ax, (label, ratio, eta, values) in zip(axes.ravel(), loaded):
        mesh = ax.pcolormesh(eta, ratio, _log10(values), cmap=cmap, shading="auto")
        fig.colorbar(mesh, ax=ax, label=r"$\log_{10}\Delta$")
        ax.set_xlabel(r"$\eta$")
        ax.set_ylabel(r"$\gamma_2/\gamma_1$")
        ax.set_title(label)
    for ax in axes.ravel()[n:]:
        ax.set_visible(False)
    fig.suptitle("Flip deficit of the second spin")
    fig.tight_layout()
    return _save(fig, spec)


def _render_fig4(spec: FigureSpec) -> Path:
    spins = spec.inputs["spins"]
    if not spins:
        raise FigureError("fig4 needs (label, path) trajectories")
    loaded = [(label, read_series_csv(path, ["t", "sx", "sy", "sz"])[1])
              for label, path in spins]
    fig = plt.figure(figsize=(4.0 * len(loaded), 4.2))
    elev, azim = spec.opt("view", (18.0, -60.0))
    u = np.linspace(0.0, 2.0 * np.pi, 25)
    v = np.linspace(0.0, np.pi, 13)
    for i, (label, dat) in enumerate(loaded, start=1):
        ax = fig.add_subplot(1, len(loaded), i, projection="3d")
        ax.plot_wireframe(np.outer(np.cos(u), np.sin(v)),
                          np.outer(np.sin(u), np.sin(v)),
                          np.outer(np.ones_like(u), np.cos(v)),
                          color="0.85", linewidth=0.4)
        ax.plot(dat[:, 1], dat[:, 2], dat[:, 3], linewidth=1.2)
        ax.scatter([0.0], [0.0], [1.0], color="tab:green", s=18)
        ax.scatter([0.0], [0.0], [-1.0], color="tab:red", s=18)
        ax.set_title(label)
        ax.set_xlabel("$S_x$")
        ax.set_ylabel("$S_y$")
        ax.set_zlabel("$S_z$")
        ax.view_init(elev=elev, azim=azim)
        ax.set_box_aspect((1, 1, 1))
    fig.suptitle("One field, several spins: trajectories on the Bloch sphere")
    return _save(fig, spec)


def _render_fig5(spec: FigureSpec) -> Path:
    doc = read_robustness_json(spec.inputs["report"])
    kappa = np.asarray(doc["kappa"], dtype=float)
    lam = np.asarray(doc["lambda"], dtype=float)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(kappa, _log10(lam), "-", linewidth=1.0)
    # the markers come from the report, they are not recomputed here
    for point in doc["magic"]:
        ax.plot(point["kappa"], np.log10(max(point["lambda"], FLOOR)), "v",
                color="tab:red", markersize=7)
        ax.annotate(f"{point['kappa']:.4f}",
                    (point["kappa"], np.log10(max(point["lambda"], FLOOR))),
                    textcoords="offset points", xytext=(4, -10), fontsize=8)
    ax.set_xlabel(r"$\kappa$")
    ax.set_ylabel(r"$\log_{10}\Lambda$")
    ax.set_title(f"Robustness scan (eta = {doc.get('eta')}, "
                 f"eps = {doc.get('epsilon')})")
    fig.tight_layout()
    return _save(fig, spec)


_FIG6_STYLE = {"lambda_pi": ("-", "black"), "lambda_se": ("-", "tab:blue")}


def _render_fig6(spec: FigureSpec) -> Path:
    header, dat = read_series_csv(spec.inputs["table"], ["epsilon"])
    if dat.shape[1] < 3:
        raise FigureError(f"comparison table {spec.inputs['table']} has too few columns")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    eps = dat[:, 0]
    for j, name in enumerate(header[1:], start=1):
        ls, color = _FIG6_STYLE.get(name, ("--", None))
        if name.startswith("lambda_k") and name.endswith("0.5"):
            ls = ":"
        ax.plot(eps, _log10(dat[:, j]), ls, color=color, label=name.replace("lambda_", ""))
    ax.set_xlabel(r"$\epsilon$")
    ax.set_ylabel(r"$\log_{10}\Lambda$")
    ax.set_title("Robustness of flip protocols against gyromagnetic spread")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _save(fig, spec)


def _render_fig8(spec: FigureSpec) -> Path:
    eta, kappa, values = read_grid_csv(spec.inputs["map"])
    header, cuts = read_series_csv(spec.inputs["cuts"], ["kappa"])
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))
    mesh = ax1.pcolormesh(kappa, eta, _log10(values),
                          cmap=spec.opt("colormap", "viridis"), shading="auto")
    fig.colorbar(mesh, ax=ax1, label=r"$\log_{10}|S_{2z}|$")
    ax1.set_xlabel(r"$\kappa$")
    ax1.set_ylabel(r"$\eta$")
    ax1.set_title("(a) equatorial deficit of spin 2")
    styles = ["-", "--", ":", "-."]
    for j, name in enumerate(header[1:], start=1):
        ax2.plot(cuts[:, 0], _log10(cuts[:, j]), styles[(j - 1) % len(styles)],
                 label=name.replace("s2z_", ""))
    ax2.set_xlabel(r"$\kappa$")
    ax2.set_ylabel(r"$\log_{10}|S_{2z}|$")
    ax2.set_title("(b) cuts at fixed eta")
    ax2.legend(loc="best")
    fig.tight_layout()
    return _save(fig, spec)


def _render_fidelity(spec: FigureSpec) -> Path:
    _, dat = read_series_csv(spec.inputs["curve"],
                             ["tf_xi", "fidelity_bell", "fidelity_w"])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(dat[:, 0], dat[:, 1], "-", label="pair (Bell target)")
    ax.plot(dat[:, 0], dat[:, 2], "--", label="triangle (W target)")
    ax.set_xlabel(r"$t_f \, \xi$")
    ax.set_ylabel("fidelity")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("Entangled-state fidelity vs drive duration")
    ax.legend(loc="lower right")
    fig.tight_layout()
    return _save(fig, spec)


_RENDERERS = {
    "fig1": _render_fig1,
    "fig3": _render_fig3,
    "fig4": _render_fig4,
    "fig5": _render_fig5,
    "fig6": _render_fig6,
    "fig8": _render_fig8,
    "fidelity": _render_fidelity,
}


def render_figure(spec: FigureSpec) -> Path:
    """Render one figure to its output path and return that path."""
    return _RENDERERS[spec.figure_id](spec)
