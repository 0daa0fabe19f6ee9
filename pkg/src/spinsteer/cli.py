"""Command-line front end tying the library into reproducible experiments.

One subcommand per experiment:

    flip        synthesize a flip protocol and trace one or more spins
    synth       synthesize a field by any of the three routes
    scan        2-D deficit maps over (gamma2/gamma1, eta) or (eta, kappa)
    magic       robustness scan Lambda(kappa) plus refined magic minima
    robust      robustness-vs-epsilon comparison of baselines and protocols
    baseline    closed-form pi-pulse / spin-echo survival and robustness
    coupled     isotropic-interaction correction with coupled verification
    bell        Bell / W fidelity sweep of the invariant-designed drive
    all-figures every data file the plotting component consumes

Every run writes its artifacts plus a manifest (config echo, version,
wall-clock duration, SHA-256 digest per file) into --out-dir.  Exit
status: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import analytic_lambda, survival_probability
from .bloch import BlochVector, integrate_bloch
from .config import ExperimentConfig, load_config
from .errors import ConfigError, SpinSteerError
from .exports import (write_columns_csv, write_field_csv, write_manifest,
                      write_protocol_json, write_robustness_json,
                      write_scan_grid_csv, write_scan_grid_json,
                      write_trajectory_csv)
from .interactions import (CoupledSpinsState, bell_fidelity,
                           integrate_coupled_spins, isotropic_corrected_field,
                           w_fidelity)
from .multispin import (delta_map, magic_report, reverse_lambda_curve,
                        superposition_map)
from .synthesis import (EvolutionOperatorPath, MadelungPath, PhiAnsatz,
                        PolarPath, synth_from_evolution_operator,
                        synth_madelung, synth_precession)

NORTH = np.array([0.0, 0.0, 1.0])

# default robustness-comparison protocols: the non-magic kappa = 0.5 drive is
# the triple-flip one (eta = 5); the magic kappas exist in the eta = 20 family
FIG6_KAPPAS = [0.5, 2.0564, 3.262, 9.1892]
FIG6_ETAS = [5.0, 20.0, 20.0, 20.0]
FIDELITY_SWEEP = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 15.0, 20.0, 30.0]


def _float_list(raw: str) -> list[float]:
    try:
        return [float(x) for x in raw.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {raw!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinsteer",
        description="Synthesize and verify magnetic-field protocols for spin control.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="flat key = value config file")
        p.add_argument("--out-dir", dest="out_dir", default=None, help="output directory")
        p.add_argument("--steps", type=int, default=None, help="RK4 steps per t_f")
        p.add_argument("--workers", type=int, default=None,
                       help="process-pool size for scans (default $SPINSTEER_WORKERS or 1)")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
        p.add_argument("--tf", dest="t_f", type=float, default=None)
        p.add_argument("--b0", dest="b0", type=float, default=None)

    p = sub.add_parser("flip", help="flip protocol + spin traces")
    common(p)
    p.add_argument("--gamma", dest="gamma1", type=float, default=None,
                   help="design gyromagnetic factor")
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--extra-gamma", dest="gammas", type=float, action="append",
                   default=None, help="additional spin to trace (repeatable)")

    p = sub.add_parser("synth", help="field synthesis by one of the three routes")
    common(p)
    p.add_argument("--method", choices=("precession", "operator", "madelung"),
                   default="precession")
    p.add_argument("--gamma", dest="gamma1", type=float, default=None)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--margin", type=float, default=0.05,
                   help="population margin for the madelung flip path")

    p = sub.add_parser("scan", help="2-D deficit map")
    common(p)
    p.add_argument("--target", choices=("flip", "superposition"), default="flip")
    p.add_argument("--gamma1", type=float, default=None)
    p.add_argument("--gamma2", type=float, default=None,
                   help="second spin (superposition target)")
    p.add_argument("--kappa", type=float, default=None, help="fixed kappa (flip target)")
    p.add_argument("--ratio-min", dest="ratio_min", type=float, default=None)
    p.add_argument("--ratio-max", dest="ratio_max", type=float, default=None)
    p.add_argument("--ratio-count", dest="ratio_count", type=int, default=None)
    p.add_argument("--eta-min", dest="eta_min", type=float, default=None)
    p.add_argument("--eta-max", dest="eta_max", type=float, default=None)
    p.add_argument("--eta-count", dest="eta_count", type=int, default=None)
    p.add_argument("--kmin", type=float, default=None, help="kappa axis (superposition)")
    p.add_argument("--kmax", type=float, default=None)
    p.add_argument("--kcount", dest="ratio_count", type=int, default=None,
                   help=argparse.SUPPRESS)

    p = sub.add_parser("magic", help="Lambda(kappa) scan and magic minima")
    common(p)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--kmin", type=float, default=None)
    p.add_argument("--kmax", type=float, default=None)
    p.add_argument("--kstep", type=float, default=None)
    p.add_argument("--nquad", dest="n_quad", type=int, default=None)
    p.add_argument("--gamma1", type=float, default=None)

    p = sub.add_parser("robust", help="Lambda(eps) comparison table")
    common(p)
    p.add_argument("--eta", type=float, default=None,
                   help="eta shared by all kappas (overridden by --etas)")
    p.add_argument("--kappas", type=_float_list, default=None,
                   help="comma-separated protocol kappas")
    p.add_argument("--etas", type=_float_list, default=None,
                   help="comma-separated etas paired with --kappas")
    p.add_argument("--epsilons", type=_float_list, default=None)
    p.add_argument("--gamma1", type=float, default=None)
    p.add_argument("--nquad", dest="n_quad", type=int, default=None)

    p = sub.add_parser("baseline", help="closed-form baseline curves")
    common(p)
    p.add_argument("--epsilons", type=_float_list, default=None)

    p = sub.add_parser("coupled", help="isotropic correction + coupled check")
    common(p)
    p.add_argument("--gamma1", type=float, default=None)
    p.add_argument("--gamma2", type=float, default=None)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)

    p = sub.add_parser("bell", help="entangling-drive fidelity sweep")
    common(p)
    p.add_argument("--xi", type=float, default=None)
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--tfxi", type=_float_list, default=None,
                   help="comma-separated t_f values in units of 1/xi")

    p = sub.add_parser("all-figures", help="emit every figure data file")
    common(p)
    p.add_argument("--fast", action="store_true",
                   help="coarser grids for quick runs and tests")

    return parser


# --------------------------------------------------------------------------
# Subcommand pipelines (each returns the list of files written)
# --------------------------------------------------------------------------

def _require(cfg: ExperimentConfig, *names: str) -> None:
    for name in names:
        if getattr(cfg, name) is None:
            raise ConfigError(f"parameter {name!r} is required for '{cfg.subcommand}'")


def _flip_files(cfg: ExperimentConfig, out: Path, prefix: str = "flip",
                gammas=None) -> list[Path]:
    _require(cfg, "kappa", "eta")
    path = PolarPath(phi=PhiAnsatz(cfg.kappa, cfg.eta), b0=cfg.b0, t_f=cfg.t_f)
    field = synth_precession(path, cfg.gamma1)
    files = [out / f"{prefix}_field.csv"]
    write_field_csv(files[0], field)
    for g in gammas if gammas is not None else [cfg.gamma1] + list(cfg.gammas):
        traj = integrate_bloch(NORTH, field, g, cfg.steps)
        f = out / f"{prefix}_spin_gamma{g:g}.csv"
        write_trajectory_csv(f, traj)
        files.append(f)
    return files


def run_flip(cfg: ExperimentConfig, out: Path) -> list[Path]:
    return _flip_files(cfg, out)


def run_synth(cfg: ExperimentConfig, out: Path, method: str = "precession",
              margin: float = 0.05) -> list[Path]:
    if method == "precession":
        _require(cfg, "kappa", "eta")
        field = synth_precession(
            PolarPath(phi=PhiAnsatz(cfg.kappa, cfg.eta), b0=cfg.b0, t_f=cfg.t_f),
            cfg.gamma1)
    elif method == "operator":
        field = synth_from_evolution_operator(
            EvolutionOperatorPath.half_flip(cfg.t_f), cfg.gamma1)
    else:
        field = synth_madelung(MadelungPath.flip(cfg.t_f, margin), cfg.gamma1)
    f_csv = out / f"synth_{method}_field.csv"
    f_json = out / f"synth_{method}_protocol.json"
    write_field_csv(f_csv, field)
    write_protocol_json(f_json, field)
    return [f_csv, f_json]


def _axis(lo, hi, count):
    return np.linspace(lo, hi, count)


def run_scan(cfg: ExperimentConfig, out: Path, target: str = "flip",
             prefix: str | None = None) -> list[Path]:
    if target == "flip":
        _require(cfg, "kappa")
        ratios = _axis(cfg.ratio_min if cfg.ratio_min is not None else 0.25,
                       cfg.ratio_max if cfg.ratio_max is not None else 5.0,
                       cfg.ratio_count if cfg.ratio_count is not None else 41)
        etas = _axis(cfg.eta_min if cfg.eta_min is not None else 0.0,
                     cfg.eta_max if cfg.eta_max is not None else 20.0,
                     cfg.eta_count if cfg.eta_count is not None else 41)
        grid = delta_map(ratios, etas, cfg.kappa, cfg.b0, cfg.t_f,
                         gamma1=cfg.gamma1, n_steps=cfg.steps, workers=cfg.workers)
        name = prefix or f"scan_flip_kappa{cfg.kappa:g}"
    else:
        _require(cfg, "gamma2")
        etas = _axis(cfg.eta_min if cfg.eta_min is not None else 0.5,
                     cfg.eta_max if cfg.eta_max is not None else 10.0,
                     cfg.eta_count if cfg.eta_count is not None else 39)
        kappas = _axis(cfg.kmin if cfg.kmin is not None else 0.5,
                       cfg.kmax if cfg.kmax is not None else 8.0,
                       cfg.ratio_count if cfg.ratio_count is not None else 76)
        grid = superposition_map(etas, kappas, cfg.gamma1, cfg.gamma2,
                                 cfg.b0, cfg.t_f, n_steps=cfg.steps,
                                 workers=cfg.workers)
        name = prefix or "scan_superposition"
    if cfg.fmt == "json":
        f = out / f"{name}.json"
        write_scan_grid_json(f, grid)
    else:
        f = out / f"{name}.csv"
        write_scan_grid_csv(f, grid)
    return [f]


def run_magic(cfg: ExperimentConfig, out: Path, name: str = "magic_report") -> list[Path]:
    _require(cfg, "eta", "epsilon", "kmin", "kmax")
    report = magic_report(cfg.eta, cfg.epsilon, cfg.kmin, cfg.kmax, cfg.kstep,
                          gamma_bar=cfg.gamma1, gamma1=cfg.gamma1, b0=cfg.b0,
                          t_f=cfg.t_f, n_quad=cfg.n_quad, n_steps=cfg.steps,
                          workers=cfg.workers)
    f = out / f"{name}.json"
    write_robustness_json(f, report)
    return [f]


def run_robust(cfg: ExperimentConfig, out: Path, name: str = "robust_comparison") -> list[Path]:
    if cfg.kappas is not None:
        kappas = cfg.kappas
        shared = cfg.eta if cfg.eta is not None else 20.0
        etas = cfg.etas if cfg.etas is not None else [shared] * len(kappas)
    else:
        kappas, etas = FIG6_KAPPAS, FIG6_ETAS
    if len(etas) != len(kappas):
        raise ConfigError("'etas' must pair one value with each entry of 'kappas'")
    eps = np.asarray(cfg.epsilons if cfg.epsilons is not None
                     else np.linspace(0.0025, 0.05, 20))
    cols = [eps,
            np.array([analytic_lambda("pi_pulse", e) for e in eps]),
            np.array([analytic_lambda("spin_echo", e) for e in eps])]
    header = ["epsilon", "lambda_pi", "lambda_se"]
    for kap, eta in zip(kappas, etas):
        cols.append(reverse_lambda_curve(kap, eta, eps, gamma_bar=cfg.gamma1,
                                         gamma1=cfg.gamma1, b0=cfg.b0, t_f=cfg.t_f,
                                         n_quad=cfg.n_quad, n_steps=cfg.steps))
        header.append(f"lambda_k{kap:g}")
    f = out / f"{name}.csv"
    write_columns_csv(f, header, cols)
    return [f]


def run_baseline(cfg: ExperimentConfig, out: Path) -> list[Path]:
    eps = np.asarray(cfg.epsilons if cfg.epsilons is not None
                     else np.linspace(0.0025, 0.05, 20))
    cols = [eps,
            np.array([survival_probability("pi_pulse", e) for e in eps]),
            np.array([survival_probability("spin_echo", e) for e in eps]),
            np.array([analytic_lambda("pi_pulse", e) for e in eps]),
            np.array([analytic_lambda("spin_echo", e) for e in eps])]
    f = out / "baseline_curves.csv"
    write_columns_csv(f, ["epsilon", "survival_pi", "survival_se",
                          "lambda_pi", "lambda_se"], cols)
    return [f]


def run_coupled(cfg: ExperimentConfig, out: Path) -> list[Path]:
    _require(cfg, "kappa", "eta", "gamma2", "mu")
    base = synth_precession(
        PolarPath(phi=PhiAnsatz(cfg.kappa, cfg.eta), b0=cfg.b0, t_f=cfg.t_f),
        cfg.gamma1)
    ref1 = integrate_bloch(NORTH, base, cfg.gamma1, cfg.steps)
    ref2 = integrate_bloch(NORTH, base, cfg.gamma2, cfg.steps)
    corrected = isotropic_corrected_field(base, ref1, ref2, cfg.mu,
                                          cfg.gamma1, cfg.gamma2)
    north = BlochVector(0.0, 0.0, 1.0)
    state = CoupledSpinsState(s1=north, s2=north, mu=cfg.mu)
    t1, t2 = integrate_coupled_spins(state, corrected, cfg.gamma1, cfg.gamma2,
                                     cfg.steps)
    files = [out / "coupled_field.csv", out / "coupled_spin1.csv",
             out / "coupled_spin2.csv", out / "coupled_reference_spin1.csv",
             out / "coupled_reference_spin2.csv"]
    write_field_csv(files[0], corrected)
    write_trajectory_csv(files[1], t1)
    write_trajectory_csv(files[2], t2)
    write_trajectory_csv(files[3], ref1)
    write_trajectory_csv(files[4], ref2)
    dev1 = float(np.abs(t1.vectors - ref1.vectors).max())
    dev2 = float(np.abs(t2.vectors - ref2.vectors).max())
    f = out / "coupled_deviation.json"
    import json
    with open(f, "w", newline="\n") as fh:
        json.dump({"mu": cfg.mu, "max_deviation_spin1": dev1,
                   "max_deviation_spin2": dev2}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    files.append(f)
    return files


def run_bell(cfg: ExperimentConfig, out: Path, name: str = "fidelity_curve") -> list[Path]:
    xi = cfg.xi if cfg.xi is not None else 1.0
    sweep = cfg.tfxi if cfg.tfxi is not None else FIDELITY_SWEEP
    tfxi = np.asarray(sweep, dtype=float)
    bell = np.array([bell_fidelity(t / xi, xi, cfg.omega, cfg.steps) for t in tfxi])
    w = np.array([w_fidelity(t / xi, xi, cfg.omega, cfg.steps) for t in tfxi])
    f = out / f"{name}.csv"
    write_columns_csv(f, ["tf_xi", "fidelity_bell", "fidelity_w"], [tfxi, bell, w])
    return [f]


def run_all_figures(cfg: ExperimentConfig, out: Path, fast: bool = False) -> list[Path]:
    from dataclasses import replace

    files: list[Path] = []

    # fig 1: single-spin flip traces (kappa = 1, eta = 0 reduces to s - s^2)
    fig1 = replace(cfg, kappa=1.0, eta=0.0, gammas=[])
    files += _flip_files(fig1, out, prefix="fig1", gammas=[cfg.gamma1])

    # fig 3: flip-deficit maps for four kappa panels
    n_ratio, n_eta = (31, 21) if fast else (61, 41)
    for kap in (0.5, 2.5, 3.1, 4.5):
        fig3 = replace(cfg, kappa=kap, ratio_min=0.25, ratio_max=5.0,
                       ratio_count=n_ratio, eta_min=0.0, eta_max=20.0,
                       eta_count=n_eta)
        files += run_scan(fig3, out, target="flip", prefix=f"fig3_kappa{kap:g}")

    # fig 4: one field flipping three different spins
    fig4 = replace(cfg, kappa=0.5, eta=5.0)
    files += _flip_files(fig4, out, prefix="fig4",
                         gammas=[cfg.gamma1, 5.34, 8.94])

    # fig 5: robustness scan with magic markers
    kmax = 4.2 if fast else 10.0
    kstep = 0.05 if fast else 0.025
    fig5 = replace(cfg, eta=20.0, epsilon=0.01, kmin=1.5, kmax=kmax, kstep=kstep)
    files += run_magic(fig5, out, name="fig5_report")

    # fig 6: comparison of baselines and reverse protocols
    n_eps = 8 if fast else 20
    fig6 = replace(cfg, kappas=FIG6_KAPPAS, etas=FIG6_ETAS,
                   epsilons=list(np.linspace(0.0025, 0.05, n_eps)))
    files += run_robust(fig6, out, name="fig6_comparison")

    # fig 8: superposition map at gamma2/gamma1 = 0.5 plus the eta = 2, 3 cuts
    n_eta8, n_kap8 = (20, 39) if fast else (39, 76)
    fig8 = replace(cfg, gamma2=0.5 * cfg.gamma1, eta_min=0.5, eta_max=10.0,
                   eta_count=n_eta8, kmin=0.5, kmax=8.0, ratio_count=n_kap8)
    files += run_scan(fig8, out, target="superposition", prefix="fig8_map")
    kcut = np.linspace(0.5, 8.0, 301 if fast else 751)
    from .multispin import spin2_final_sz
    cut_cols = [kcut]
    header = ["kappa"]
    for eta_cut in (2.0, 3.0):
        sz = spin2_final_sz(kcut, eta_cut, [0.5 * cfg.gamma1], cfg.gamma1,
                            cfg.b0, cfg.t_f, cfg.steps)[:, 0]
        cut_cols.append(np.abs(sz))
        header.append(f"s2z_eta{eta_cut:g}")
    f = out / "fig8_cuts.csv"
    write_columns_csv(f, header, cut_cols)
    files.append(f)

    # fidelity curve: Bell and W sweeps
    sweep = [1.0, 2.0, 3.0, 5.0, 10.0, 30.0] if fast else FIDELITY_SWEEP
    figf = replace(cfg, tfxi=sweep, xi=cfg.xi if cfg.xi is not None else 1.0)
    files += run_bell(figf, out, name="fidelity_curve")

    return files


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------

OVERRIDE_KEYS = ("gamma1", "gamma2", "gammas", "b0", "t_f", "kappa", "eta",
                 "mu", "xi", "omega", "epsilon", "steps", "n_quad", "kmin",
                 "kmax", "kstep", "ratio_min", "ratio_max", "ratio_count",
                 "eta_min", "eta_max", "eta_count", "epsilons", "kappas",
                 "etas", "tfxi", "out_dir", "fmt", "workers")


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {k: getattr(args, k, None) for k in OVERRIDE_KEYS}
    return load_config(getattr(args, "config", None), overrides, args.command)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        started = time.monotonic()
        if args.command == "flip":
            files = run_flip(cfg, out)
        elif args.command == "synth":
            files = run_synth(cfg, out, args.method, args.margin)
        elif args.command == "scan":
            files = run_scan(cfg, out, args.target)
        elif args.command == "magic":
            files = run_magic(cfg, out)
        elif args.command == "robust":
            files = run_robust(cfg, out)
        elif args.command == "baseline":
            files = run_baseline(cfg, out)
        elif args.command == "coupled":
            files = run_coupled(cfg, out)
        elif args.command == "bell":
            files = run_bell(cfg, out)
        elif args.command == "all-figures":
            files = run_all_figures(cfg, out, args.fast)
        else:  # pragma: no cover - argparse enforces the choices
            raise ConfigError(f"unknown subcommand {args.command!r}")
        write_manifest(out / "manifest.json", args.command, asdict(cfg),
                       files, time.monotonic() - started, __version__)
    except ConfigError as exc:
        print(f"spinsteer: configuration error: {exc}", file=sys.stderr)
        return 2
    except SpinSteerError as exc:
        print(f"spinsteer: numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
