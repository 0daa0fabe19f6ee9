"""Driver and per-figure entry points.

`figregen DATA_DIR` renders every figure whose inputs are present in the
directory written by the simulation CLI's `all-figures` command; the
`figregen-figN` scripts render a single figure each.  Exit status is
nonzero on missing or malformed inputs, and no blank image is left
behind.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FIGURE_IDS, FigureError, FigureSpec, render_figure

FIG3_KAPPAS = ("0.5", "2.5", "3.1", "4.5")
FIG4_GAMMAS = ("2", "5.34", "8.94")


def build_spec(figure_id: str, data_dir: Path, out_dir: Path,
               dpi: int = 200) -> FigureSpec:
    """Locate the conventional input files for one figure id."""
    d = Path(data_dir)
    out = Path(out_dir) / f"{figure_id}.png"
    style = {"dpi": dpi}
    if figure_id == "fig1":
        spins = sorted(d.glob("fig1_spin_gamma*.csv"))
        if not spins:
            raise FigureError(f"input file not found: {d / 'fig1_spin_gamma*.csv'}")
        inputs = {"field": d / "fig1_field.csv", "spin": spins[0]}
    elif figure_id == "fig3":
        inputs = {"panels": [(rf"$\kappa = {k}$", d / f"fig3_kappa{k}.csv")
                             for k in FIG3_KAPPAS]}
    elif figure_id == "fig4":
        inputs = {"spins": [(rf"$\gamma = {g}$", d / f"fig4_spin_gamma{g}.csv")
                            for g in FIG4_GAMMAS]}
    elif figure_id == "fig5":
        inputs = {"report": d / "fig5_report.json"}
    elif figure_id == "fig6":
        inputs = {"table": d / "fig6_comparison.csv"}
    elif figure_id == "fig8":
        inputs = {"map": d / "fig8_map.csv", "cuts": d / "fig8_cuts.csv"}
    elif figure_id == "fidelity":
        inputs = {"curve": d / "fidelity_curve.csv"}
    else:
        raise FigureError(f"unknown figure id {figure_id!r}")
    return FigureSpec(figure_id=figure_id, inputs=inputs, output=out, style=style)


def _parser(single: str | None) -> argparse.ArgumentParser:
    name = "figregen" if single is None else f"figregen-{single}"
    p = argparse.ArgumentParser(
        prog=name,
        description="Render figures from exported spin-control data files.")
    p.add_argument("data_dir", help="directory holding the all-figures outputs")
    p.add_argument("--out-dir", default=None,
                   help="image directory (default: data_dir)")
    p.add_argument("--dpi", type=int, default=200)
    if single is None:
        p.add_argument("--figures", default=",".join(FIGURE_IDS),
                       help="comma-separated subset of figure ids")
    return p


def _run(figure_ids, data_dir, out_dir, dpi) -> int:
    data_dir = Path(data_dir)
    out_dir = Path(out_dir) if out_dir else data_dir
    for figure_id in figure_ids:
        try:
            spec = build_spec(figure_id, data_dir, out_dir, dpi)
            path = render_figure(spec)
        except FigureError as exc:
            print(f"figregen: {figure_id}: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    args = _parser(None).parse_args(argv)
    ids = [f.strip() for f in args.figures.split(",") if f.strip()]
    for figure_id in ids:
        if figure_id not in FIGURE_IDS:
            print(f"figregen: unknown figure id {figure_id!r}", file=sys.stderr)
            return 2
    return _run(ids, args.data_dir, args.out_dir, args.dpi)


def _single_main(figure_id: str, argv=None) -> int:
    args = _parser(figure_id).parse_args(argv)
    return _run([figure_id], args.data_dir, args.out_dir, args.dpi)


def main_fig1(argv=None) -> int:
    return _single_main("fig1", argv)


def main_fig3(argv=None) -> int:
    return _single_main("fig3", argv)


def main_fig4(argv=None) -> int:
    return _single_main("fig4", argv)


def main_fig5(argv=None) -> int:
    return _single_main("fig5", argv)


def main_fig6(argv=None) -> int:
    return _single_main("fig6", argv)


def main_fig8(argv=None) -> int:
    return _single_main("fig8", argv)


def main_fidelity(argv=None) -> int:
    return _single_main("fidelity", argv)


if __name__ == "__main__":
    sys.exit(main())
