"""Simultaneous control of several spins: scans, robustness, magic values.

A protocol synthesized for design factor gamma1 with the two-parameter
azimuth ansatz phi(s; kappa, eta) is applied to a second spin of factor
gamma2.  The figures of merit are

    flip deficit          Delta = (1 + S2z(t_f)) / 2
    superposition deficit |S2z(t_f)|            (equator target)
    robustness            Lambda(eps) = 1/(2 gb eps) * integral of
                          Delta(gamma2) over [gb (1-eps), gb (1+eps)]

Lambda is evaluated by Gauss-Legendre quadrature with node doubling
until the result is converged to 1e-12 relative.  "Magic" kappa values
are the discrete deep minima of Lambda(kappa): a coarse scan brackets
local minima, golden-section refinement pins each one to 1e-4 in kappa,
and a candidate is accepted only if it drops at least one decade below
the local background (suppressing shallow numerical ripples).

Integration step counts scale automatically with the peak precession
rate so that deficits down to the 1e-12 scale are resolved; the
requested minimum is never reduced.  Grid cells are independent pure
functions, assembled by index, so scans may be evaluated by a process
pool without affecting the result.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bloch import DEFAULT_STEPS, rk4_spins
from .errors import PreconditionError, SearchError, SpinSteerError
from .synthesis import family_field_nodes

DEFAULT_GAMMA1 = 2.0
DEFAULT_B0 = 1.0
DEFAULT_TF = 1.0
DEFAULT_NQUAD = 64

# target per-step rotation angle <= 1/RATE_RESOLUTION radians
RATE_RESOLUTION = 80.0

# quadrature results within this absolute distance are indistinguishable:
# the deficits feeding the integral carry O(1e-13) integration noise
LAMBDA_ABS_FLOOR = 1e-13

__all__ = [
    "ScanGrid",
    "RobustnessReport",
    "spinflip_deficit",
    "superposition_deficit",
    "spin2_final_sz",
    "delta_map",
    "superposition_map",
    "robustness_lambda",
    "reverse_lambda_curve",
    "lambda_scan",
    "find_magic_kappa",
    "magic_report",
    "find_superposition_kappa",
    "refine_minimum",
]


# --------------------------------------------------------------------------
# Containers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanGrid:
    """2-D scan result; values[i, j] belongs to (axis1[i], axis2[j])."""

    axis1_name: str
    axis1: np.ndarray
    axis2_name: str
    axis2: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != (len(self.axis1), len(self.axis2)):
            raise PreconditionError(
                f"grid shape {self.values.shape} does not match axes "
                f"({len(self.axis1)}, {len(self.axis2)})")
        if not np.isfinite(self.values).all():
            i, j = np.argwhere(~np.isfinite(self.values))[0]
            raise SpinSteerError(
                f"non-finite scan value at {self.axis1_name} = {self.axis1[i]!r}, "
                f"{self.axis2_name} = {self.axis2[j]!r}")


@dataclass(frozen=True)
class RobustnessReport:
    """Lambda(kappa) scan plus refined magic minima for one (eta, epsilon)."""

    eta: float
    epsilon: float
    kappa: np.ndarray
    lam: np.ndarray
    magic: list          # [(kappa_star, lambda_star), ...] ascending in kappa
    n_quad: int

    def __post_init__(self):
        for k_star, l_star in self.magic:
            if not 0.0 <= l_star <= 1.0:
                raise PreconditionError(f"magic Lambda out of [0, 1]: {l_star!r}")


# --------------------------------------------------------------------------
# Batched protocol evaluation
# --------------------------------------------------------------------------

def _auto_steps(requested: int, peak_rate: float, t_f: float) -> int:
    """Step count resolving the fastest precession to 1/RATE_RESOLUTION rad."""
    needed = int(math.ceil(RATE_RESOLUTION * peak_rate * t_f))
    return max(int(requested), needed)


_PROTOCOL_CHUNK = 64


def spin2_final_sz(kappas, etas, gamma2s, gamma1: float = DEFAULT_GAMMA1,
                   b0: float = DEFAULT_B0, t_f: float = DEFAULT_TF,
                   n_steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Final S2z for protocols (kappas, etas) applied to spins gamma2s.

    kappas/etas broadcast to a 1-D protocol batch of length K (scalars
    allowed); gamma2s has shape M.  Returns (K, M) signed final z
    components of spins started at (0, 0, 1).  Large protocol batches
    are processed in fixed chunks to bound the field-sample memory.
    """
    kap, eta = np.broadcast_arrays(np.atleast_1d(np.asarray(kappas, dtype=float)),
                                   np.asarray(etas, dtype=float))
    g2 = np.atleast_1d(np.asarray(gamma2s, dtype=float))
    if kap.size > _PROTOCOL_CHUNK:
        parts = [spin2_final_sz(kap[i:i + _PROTOCOL_CHUNK], eta[i:i + _PROTOCOL_CHUNK],
                                g2, gamma1, b0, t_f, n_steps)
                 for i in range(0, kap.size, _PROTOCOL_CHUNK)]
        return np.concatenate(parts, axis=0)

    bx, by, bz = family_field_nodes(kap, eta, gamma1, b0, t_f, n_steps)
    peak = float(np.abs(g2).max()) * float(np.sqrt(bx**2 + by**2 + bz**2).max())
    n_eff = _auto_steps(n_steps, peak, t_f)
    if n_eff > n_steps:
        bx, by, bz = family_field_nodes(kap, eta, gamma1, b0, t_f, n_eff)

    kshape = bx.shape[:-1]
    s0 = np.zeros(kshape + (len(g2), 3))
    s0[..., 2] = 1.0
    final = rk4_spins(s0,
                      bx[..., np.newaxis, :], by[..., np.newaxis, :], bz[..., np.newaxis, :],
                      g2, t_f / n_eff, n_eff)
    return final[..., 2]


def spinflip_deficit(gamma1: float, gamma2: float, kappa: float, eta: float,
                     b0: float = DEFAULT_B0, t_f: float = DEFAULT_TF,
                     n_steps: int = DEFAULT_STEPS) -> float:
    """Deficit (1 + S2z)/2 of spin gamma2 under the gamma1-designed flip."""
    if gamma2 == 0.0:
        raise PreconditionError("gamma2 must be nonzero")
    sz = spin2_final_sz(kappa, eta, [gamma2], gamma1, b0, t_f, n_steps)
    return float(np.clip((1.0 + sz[0, 0]) / 2.0, 0.0, 1.0))


def superposition_deficit(gamma1: float, gamma2: float, kappa: float, eta: float,
                          b0: float = DEFAULT_B0, t_f: float = DEFAULT_TF,
                          n_steps: int = DEFAULT_STEPS) -> float:
    """|S2z(t_f)| of spin gamma2: distance from the equatorial target."""
    if gamma2 == 0.0:
        raise PreconditionError("gamma2 must be nonzero")
    sz = spin2_final_sz(kappa, eta, [gamma2], gamma1, b0, t_f, n_steps)
    return float(min(abs(sz[0, 0]), 1.0))


# --------------------------------------------------------------------------
# 2-D scans
# --------------------------------------------------------------------------

def _validate_axis(name: str, samples) -> np.ndarray:
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise PreconditionError(f"{name} samples must be a nonempty 1-D array")
    if arr.size > 1 and not (np.diff(arr) > 0.0).all():
        raise PreconditionError(f"{name} samples must be strictly increasing")
    return arr


def _delta_map_columns(args):
    etas, ratios, kappa, gamma1, b0, t_f, n_steps = args
    cols = []
    for eta in etas:
        sz = spin2_final_sz(kappa, eta, ratios * gamma1, gamma1, b0, t_f, n_steps)
        cols.append(np.clip((1.0 + sz[0]) / 2.0, 0.0, 1.0))
    return cols


def _superposition_map_rows(args):
    etas, kappas, gamma1, gamma2, b0, t_f, n_steps = args
    rows = []
    for eta in etas:
        sz = spin2_final_sz(kappas, eta, [gamma2], gamma1, b0, t_f, n_steps)
        rows.append(np.minimum(np.abs(sz[:, 0]), 1.0))
    return rows


def _pool_map(fn, jobs, workers):
    if workers is None:
        workers = int(os.environ.get("SPINSTEER_WORKERS", "1"))
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _chunks(seq, size):
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def delta_map(gamma_ratio_samples, eta_samples, kappa: float,
              b0: float = DEFAULT_B0, t_f: float = DEFAULT_TF,
              gamma1: float = DEFAULT_GAMMA1, n_steps: int = DEFAULT_STEPS,
              workers: int | None = None) -> ScanGrid:
    """Flip deficit of spin 2 over (gamma2/gamma1, eta) at fixed kappa."""
    ratios = _validate_axis("gamma_ratio", gamma_ratio_samples)
    etas = _validate_axis("eta", eta_samples)

    jobs = [(chunk, ratios, kappa, gamma1, b0, t_f, n_steps)
            for chunk in _chunks(etas, 8)]
    try:
        columns = [col for part in _pool_map(_delta_map_columns, jobs, workers)
                   for col in part]
    except SpinSteerError:
        raise
    except Exception as exc:  # pragma: no cover - defensive
        raise SpinSteerError(f"delta map cell evaluation failed: {exc}") from exc

    values = np.column_stack(columns)
    return ScanGrid(axis1_name="gamma_ratio", axis1=ratios,
                    axis2_name="eta", axis2=etas, values=values,
                    metadata={"kind": "flip_deficit", "kappa": kappa,
                              "gamma1": gamma1, "B0": b0, "t_f": t_f,
                              "n_steps": n_steps})


def superposition_map(eta_samples, kappa_samples, gamma1: float, gamma2: float,
                      b0: float = DEFAULT_B0, t_f: float = DEFAULT_TF,
                      n_steps: int = DEFAULT_STEPS,
                      workers: int | None = None) -> ScanGrid:
    """|S2z(t_f)| of spin 2 over (eta, kappa) at fixed gamma1, gamma2."""
    etas = _validate_axis("eta", eta_samples)
    kappas = _validate_axis("kappa", kappa_samples)

    jobs = [(chunk, kappas, gamma1, gamma2, b0, t_f, n_steps)
            for chunk in _chunks(etas, 8)]
    rows = [row for part in _pool_map(_superposition_map_rows, jobs, workers)
            for row in part]
    values = np.vstack(rows)
    return ScanGrid(axis1_name="eta", axis1=etas,
                    axis2_name="kappa", axis2=kappas, values=values,
                    metadata={"kind": "superposition_deficit",
                              "gamma1": gamma1, "gamma2": gamma2,
                              "B0": b0, "t_f": t_f, "n_steps": n_steps})


# --------------------------------------------------------------------------
# Robustness functional
# --------------------------------------------------------------------------

def _gl_nodes(gamma_bar: float, epsilon: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return gamma_bar * (1.0 + epsilon * x), w


def _deficit_values(deficit, gammas: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(deficit(gammas), dtype=float)
        if out.shape == gammas.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(deficit(g)) for g in gammas])


def robustness_lambda(protocol_deficit, gamma_bar: float, epsilon: float,
                      n_quad: int = DEFAULT_NQUAD) -> float:
    """Average deficit over the relative spread [gb(1-eps), gb(1+eps)].

    Gauss-Legendre quadrature; the node count doubles (up to 8x) until
    two successive results agree to 1e-12 relative (or to the absolute
    noise floor of the deficit evaluations).  A residual change above
    1e-9 relative after the cap is reported as a warning and the latest
    (partial) value returned.
    """
    if not 0.0 < epsilon < 1.0:
        raise PreconditionError(f"epsilon must be in (0, 1), got {epsilon}")
    if n_quad < 8:
        raise PreconditionError(f"n_quad must be >= 8, got {n_quad}")

    def quad(n: int) -> float:
        g, w = _gl_nodes(gamma_bar, epsilon, n)
        vals = np.clip(_deficit_values(protocol_deficit, g), 0.0, 1.0)
        # affine map to [-1, 1] turns the prefactor 1/(2 gb eps) into 1/2
        return float(np.sum(w * vals) / 2.0)

    prev = quad(n_quad)
    n = 2 * n_quad
    while True:
        cur = quad(n)
        if abs(cur - prev) <= max(1e-12 * abs(cur), LAMBDA_ABS_FLOOR):
            return cur
        if n >= 8 * n_quad:
            rel = abs(cur - prev) / max(abs(cur), 1e-300)
            if rel > 1e-9:
                warnings.warn(
                    f"robustness quadrature not converged (relative change {rel:.2e} "
                    f"at {n} nodes); returning partial value", stacklevel=2)
            return cur
        prev = cur
        n *= 2


def _lambda_kappa_batch(kappas: np.ndarray, eta: float, epsilon: float,
                        gamma_bar: float, gamma1: float, b0: float, t_f: float,
                        n_quad: int, n_steps: int) -> np.ndarray:
    """Lambda for a batch of kappas, one integration pass per node doubling.

    The n-node and 2n-node Gauss grids share a single batched RK4 pass;
    convergence to 1e-12 relative is checked per kappa, escalating to 4n
    nodes for the whole batch if any entry disagrees.
    """
    kap = np.asarray(kappas, dtype=float)

    def eval_sets(counts):
        node_sets = [_gl_nodes(gamma_bar, epsilon, n) for n in counts]
        all_g = np.concatenate([g for g, _ in node_sets])
        sz = spin2_final_sz(kap, eta, all_g, gamma1, b0, t_f, n_steps)
        deficits = np.clip((1.0 + sz) / 2.0, 0.0, 1.0)
        out = []
        i = 0
        for g, w in node_sets:
            out.append(deficits[..., i:i + g.size] @ (w / 2.0))
            i += g.size
        return out

    lam_a, lam_b = eval_sets([n_quad, 2 * n_quad])
    if np.all(np.abs(lam_b - lam_a)
              <= np.maximum(1e-12 * np.abs(lam_b), LAMBDA_ABS_FLOOR)):
        return lam_b
    lam_c, = eval_sets([4 * n_quad])
    rel = np.abs(lam_c - lam_b) / np.maximum(np.abs(lam_c), 1e-300)
    if rel.max() > 1e-9:
        warnings.warn(
            f"robustness quadrature not converged for some kappa "
            f"(worst relative change {rel.max():.2e}); returning partial values",
            stacklevel=2)
    return lam_c


def reverse_lambda_curve(kappa: float, eta: float, epsilons,
                         gamma_bar: float = DEFAULT_GAMMA1,
                         gamma1: float = DEFAULT_GAMMA1, b0: float = DEFAULT_B0,
                         t_f: float = DEFAULT_TF, n_quad: int = DEFAULT_NQUAD,
                         n_steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Lambda(eps) for one reverse-engineered protocol, all eps in one pass."""
    eps = np.atleast_1d(np.asarray(epsilons, dtype=float))
    if ((eps <= 0.0) | (eps >= 1.0)).any():
        raise PreconditionError("epsilons must lie in (0, 1)")

    node_sets = [(e, n) for e in eps for n in (n_quad, 2 * n_quad)]
    all_g = np.concatenate([_gl_nodes(gamma_bar, e, n)[0] for e, n in node_sets])
    sz = spin2_final_sz(kappa, eta, all_g, gamma1, b0, t_f, n_steps)[0]
    deficits = np.clip((1.0 + sz) / 2.0, 0.0, 1.0)

    out = np.empty(eps.size)
    i = 0
    vals = {}
    for e, n in node_sets:
        w = _gl_nodes(gamma_bar, e, n)[1]
        vals[(e, n)] = float(deficits[i:i + n] @ (w / 2.0))
        i += n
    for j, e in enumerate(eps):
        a, b = vals[(e, n_quad)], vals[(e, 2 * n_quad)]
        if abs(b - a) > max(1e-12 * abs(b), LAMBDA_ABS_FLOOR):
            # rare: fall back to the generic doubling ladder for this eps
            b = robustness_lambda(
                lambda g2: np.clip(
                    (1.0 + spin2_final_sz(kappa, eta, np.atleast_1d(g2),
                                          gamma1, b0, t_f, n_steps)[0]) / 2.0,
                    0.0, 1.0),
                gamma_bar, float(e), n_quad)
        out[j] = b
    return out


def lambda_scan(kappas, eta: float, epsilon: float,
                gamma_bar: float = DEFAULT_GAMMA1, gamma1: float = DEFAULT_GAMMA1,
                b0: float = DEFAULT_B0, t_f: float = DEFAULT_TF,
                n_quad: int = DEFAULT_NQUAD, n_steps: int = DEFAULT_STEPS,
                workers: int | None = None) -> np.ndarray:
    """Lambda over an array of kappa values (chunked batch evaluation)."""
    if not 0.0 < epsilon < 1.0:
        raise PreconditionError(f"epsilon must be in (0, 1), got {epsilon}")
    if n_quad < 8:
        raise PreconditionError(f"n_quad must be >= 8, got {n_quad}")
    kap = np.atleast_1d(np.asarray(kappas, dtype=float))
    jobs = [(chunk, eta, epsilon, gamma_bar, gamma1, b0, t_f, n_quad, n_steps)
            for chunk in _chunks(kap, 48)]
    parts = _pool_map(_lambda_scan_job, jobs, workers)
    return np.concatenate(parts)


def _lambda_scan_job(args):
    chunk, eta, epsilon, gamma_bar, gamma1, b0, t_f, n_quad, n_steps = args
    return _lambda_kappa_batch(chunk, eta, epsilon, gamma_bar, gamma1, b0,
                               t_f, n_quad, n_steps)


# --------------------------------------------------------------------------
# 1-D minimisation
# --------------------------------------------------------------------------

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def refine_minimum(objective, bracket: tuple[float, float], tol: float) -> tuple[float, float]:
    """Golden-section search on a caller-asserted unimodal bracket.

    Shrinks the bracket to width < tol and returns the best evaluated
    point with its value.  Non-finite objective values raise SearchError.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise PreconditionError(f"bracket must satisfy lo < hi, got {bracket}")
    if tol <= 0.0:
        raise PreconditionError(f"tol must be positive, got {tol}")

    def f(x: float) -> float:
        v = float(objective(x))
        if not np.isfinite(v):
            raise SearchError(f"objective returned non-finite value {v!r} at x = {x!r}")
        return v

    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


# --------------------------------------------------------------------------
# Magic-kappa search
# --------------------------------------------------------------------------

MAGIC_DEPTH_DECADES = 1.0
MAGIC_REFINE_TOL = 1e-4


def find_magic_kappa(eta: float, epsilon: float, kappa_min: float, kappa_max: float,
                     scan_step: float = 0.05, gamma_bar: float = DEFAULT_GAMMA1,
                     gamma1: float = DEFAULT_GAMMA1, b0: float = DEFAULT_B0,
                     t_f: float = DEFAULT_TF, n_quad: int = DEFAULT_NQUAD,
                     n_steps: int = DEFAULT_STEPS, workers: int | None = None,
                     scan: tuple[np.ndarray, np.ndarray] | None = None
                     ) -> list[tuple[float, float]]:
    """Locate the deep minima of Lambda(kappa) on [kappa_min, kappa_max].

    Coarse scan at resolution <= scan_step, golden-section refinement of
    every bracketed local minimum to 1e-4 in kappa, then acceptance of
    candidates lying at least one decade below the local background
    (the largest scan value within 3 scan steps, excluding the dip
    itself).  Returns (kappa_star, lambda_star) pairs ascending in
    kappa; an empty list is a valid outcome.
    """
    if not kappa_min < kappa_max:
        raise PreconditionError("kappa_min must be < kappa_max")
    if not 0.0 < scan_step <= 0.05:
        raise PreconditionError(f"scan_step must be in (0, 0.05], got {scan_step}")

    if scan is None:
        n_pts = int(math.ceil((kappa_max - kappa_min) / scan_step)) + 1
        if n_pts < 3:
            return []
        grid = np.linspace(kappa_min, kappa_max, n_pts)
        lams = lambda_scan(grid, eta, epsilon, gamma_bar, gamma1, b0, t_f,
                           n_quad, n_steps, workers)
    else:
        grid, lams = np.asarray(scan[0], dtype=float), np.asarray(scan[1], dtype=float)
        if grid.size < 3:
            return []

    step = float(grid[1] - grid[0])
    log_lam = np.log10(np.maximum(lams, 1e-300))

    def single_lambda(k: float) -> float:
        return float(_lambda_kappa_batch(np.array([k]), eta, epsilon, gamma_bar,
                                         gamma1, b0, t_f, n_quad, n_steps)[0])

    results = []
    for i in range(1, len(grid) - 1):
        if not (lams[i] < lams[i - 1] and lams[i] < lams[i + 1]):
            continue
        k_star, l_star = refine_minimum(single_lambda,
                                        (float(grid[i - 1]), float(grid[i + 1])),
                                        MAGIC_REFINE_TOL)
        window = np.abs(grid - k_star) <= 3.0 * step + 1e-12
        away = np.abs(grid - k_star) > step + 1e-12
        ref = window & away
        background = log_lam[ref].max() if ref.any() else log_lam[window].max()
        if background - math.log10(max(l_star, 1e-300)) >= MAGIC_DEPTH_DECADES:
            results.append((k_star, l_star))

    # merge duplicates from adjacent brackets converging to the same needle
    results.sort()
    merged: list[tuple[float, float]] = []
    for k_star, l_star in results:
        if merged and abs(k_star - merged[-1][0]) < 10.0 * MAGIC_REFINE_TOL:
            if l_star < merged[-1][1]:
                merged[-1] = (k_star, l_star)
        else:
            merged.append((k_star, l_star))
    return merged


def magic_report(eta: float, epsilon: float, kappa_min: float, kappa_max: float,
                 scan_step: float = 0.05, gamma_bar: float = DEFAULT_GAMMA1,
                 gamma1: float = DEFAULT_GAMMA1, b0: float = DEFAULT_B0,
                 t_f: float = DEFAULT_TF, n_quad: int = DEFAULT_NQUAD,
                 n_steps: int = DEFAULT_STEPS, workers: int | None = None
                 ) -> RobustnessReport:
    """Scan Lambda(kappa) and package the magic minima into a report."""
    n_pts = int(math.ceil((kappa_max - kappa_min) / scan_step)) + 1
    grid = np.linspace(kappa_min, kappa_max, max(n_pts, 2))
    lams = lambda_scan(grid, eta, epsilon, gamma_bar, gamma1, b0, t_f,
                       n_quad, n_steps, workers)
    magic = find_magic_kappa(eta, epsilon, kappa_min, kappa_max, scan_step,
                             gamma_bar, gamma1, b0, t_f, n_quad, n_steps,
                             workers, scan=(grid, lams))
    return RobustnessReport(eta=eta, epsilon=epsilon, kappa=grid, lam=lams,
                            magic=magic, n_quad=n_quad)


# --------------------------------------------------------------------------
# Superposition-target search
# --------------------------------------------------------------------------

def find_superposition_kappa(gamma1: float, gamma2: float, eta: float,
                             kappa_min: float, kappa_max: float,
                             scan_step: float = 0.02, b0: float = DEFAULT_B0,
                             t_f: float = DEFAULT_TF, n_steps: int = DEFAULT_STEPS
                             ) -> list[tuple[float, float]]:
    """Refined minima of |S2z(t_f)| over kappa for an equatorial target.

    Each bracketed minimum is refined by golden section; when S2z
    changes sign across the refined point (the typical case) a bisection
    polish drives |S2z| to the 1e-12 scale.  Returns (kappa_star,
    |S2z|_star) pairs ascending in kappa.
    """
    n_pts = int(math.ceil((kappa_max - kappa_min) / scan_step)) + 1
    if n_pts < 3:
        return []
    grid = np.linspace(kappa_min, kappa_max, n_pts)
    sz = spin2_final_sz(grid, eta, [gamma2], gamma1, b0, t_f, n_steps)[:, 0]
    mag = np.abs(sz)

    def signed(k: float) -> float:
        return float(spin2_final_sz(k, eta, [gamma2], gamma1, b0, t_f, n_steps)[0, 0])

    results = []
    for i in range(1, len(grid) - 1):
        if not (mag[i] < mag[i - 1] and mag[i] < mag[i + 1]):
            continue
        lo, hi = float(grid[i - 1]), float(grid[i + 1])
        k_star, v_star = refine_minimum(lambda k: abs(signed(k)), (lo, hi), 1e-6)
        # polish across a sign change with plain bisection
        a, b = max(lo, k_star - 1e-5), min(hi, k_star + 1e-5)
        fa, fb = signed(a), signed(b)
        if fa * fb < 0.0:
            for _ in range(60):
                m = 0.5 * (a + b)
                fm = signed(m)
                if fm == 0.0:
                    a = b = m
                    break
                if fa * fm < 0.0:
                    b, fb = m, fm
                else:
                    a, fa = m, fm
                if b - a < 1e-14:
                    break
            k_star = 0.5 * (a + b)
            v_star = abs(signed(k_star))
        results.append((k_star, v_star))
    return results
