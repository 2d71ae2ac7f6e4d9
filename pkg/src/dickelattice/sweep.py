"""Grid sweeps over (xi, g): phase diagrams, order-parameter cuts,
critical lines, and site profiles.

Cells are independent tasks; each derives its own random stream from
(rng_seed, i, j), so output is bit-identical for any worker count.  All
CSV files start with a '#' comment carrying the parameter set and the
package version.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ._version import __version__
from .errors import NotSettled, ZeroModeMismatch
from .classify import EPS_PATTERN, stable_class_set, label as pattern_label
from .dynamics import RTOL, ATOL, SETTLE_TOL, relax_to_steady
from .model import (LatticeParams, MeanFieldState, params_to_jsonable,
                    validate)
from .spectrum import critical_coupling_np, xi_stability_window
from .stability import EPS_MARGINAL, EPS_ZERO, Verdict, \
    bisect_np_threshold, classify as stability_classify
from .steady_state import DEDUP_TOL, N_RANDOM_SEEDS, find_all

BISECT_BRACKET = (0.05, 2.0)
BISECT_TOL = 1e-6
DEFAULT_STEPS = 140     # per axis, matching the phase-diagram resolution


@dataclass(frozen=True)
class GridAxis:
    min: float
    max: float
    steps: int

    def values(self) -> np.ndarray:
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.steps == 1:
            return np.array([self.min], float)
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True)
class SweepSpec:
    """Base parameters (xi and g ignored) plus the two grid axes."""

    params_base: LatticeParams
    xi_grid: GridAxis
    g_grid: GridAxis
    rng_seed: int = 0
    n_random_seeds: int = N_RANDOM_SEEDS
    dedup_tol: float = DEDUP_TOL
    eps_pattern: float = EPS_PATTERN
    eps_marginal: float = EPS_MARGINAL
    eps_zero: float = EPS_ZERO


@dataclass
class PhaseCell:
    xi: float
    g: float
    stable_classes: dict          # label kind -> multiplicity
    n_roots_total: int
    marginal_flag: bool
    no_stable_state: bool
    seed_metadata: dict
    error: str = ""

    @property
    def n_stable(self) -> int:
        return sum(self.stable_classes.values())


def _cell_seed(rng_seed, i, j) -> int:
    ss = np.random.SeedSequence([int(rng_seed), int(i), int(j)])
    return int(ss.generate_state(1)[0])


def _compute_cell(job):
    spec, i, j, xi, g = job
    params = replace(spec.params_base, xi=float(xi), g=float(g))
    try:
        result = find_all(params, n_random_seeds=spec.n_random_seeds,
                          rng_seed=_cell_seed(spec.rng_seed, i, j),
                          dedup_tol=spec.dedup_tol)
        roots, reports = [], []
        marginal = False
        for fp in result.roots:
            try:
                rep = stability_classify(fp, params,
                                         eps_marginal=spec.eps_marginal,
                                         eps_zero=spec.eps_zero)
            except ZeroModeMismatch:
                continue     # drop degenerate roots from the verdict stage
            marginal = marginal or rep.verdict is Verdict.Marginal
            roots.append(fp)
            reports.append(rep)
        counts = stable_class_set(roots, reports, params,
                                  eps_pattern=spec.eps_pattern)
        return PhaseCell(xi=float(xi), g=float(g),
                         stable_classes=dict(counts),
                         n_roots_total=len(result.roots),
                         marginal_flag=marginal,
                         no_stable_state=(sum(counts.values()) == 0),
                         seed_metadata=result.seed_metadata)
    except Exception as exc:    # record and keep sweeping
        return PhaseCell(xi=float(xi), g=float(g), stable_classes={},
                         n_roots_total=0, marginal_flag=False,
                         no_stable_state=True, seed_metadata={},
                         error=f"{type(exc).__name__}: {exc}")


def phase_diagram(spec: SweepSpec, workers: int = 1):
    """One PhaseCell per grid point, in grid order (xi outer, g inner)."""
    validate(spec.params_base)
    jobs = [(spec, i, j, xi, g)
            for i, xi in enumerate(spec.xi_grid.values())
            for j, g in enumerate(spec.g_grid.values())]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_compute_cell, jobs, chunksize=1))
    else:
        cells = [_compute_cell(job) for job in jobs]
    return cells


# ---------------------------------------------------------------------------
# order-parameter cut

@dataclass
class CutRow:
    g: float
    branches: dict      # label kind -> per-site |a_j| of the class representative
    error: str = ""


def order_parameter_cut(params_base: LatticeParams, xi: float, g_values, *,
                        rng_seed: int = 0,
                        n_random_seeds: int = N_RANDOM_SEEDS,
                        dedup_tol: float = DEDUP_TOL,
                        eps_pattern: float = EPS_PATTERN):
    """Stable-branch amplitudes |a_j| along a fixed-xi cut.

    xi must sit inside the normal-state stability window.  Each row maps
    every stable class to the site amplitudes of its canonical
    representative, so multivalued (multistable) ranges stay visible.
    """
    from .classify import canonicalize
    from .errors import DomainError
    validate(params_base)
    lo, hi = xi_stability_window(params_base.n_sites, params_base.omega_c,
                                 params_base.bc)
    if not lo < xi < hi:
        raise DomainError(
            f"xi={xi} outside the stability window ({lo:.6g}, {hi:.6g})")
    rows = []
    for j, g in enumerate(np.asarray(g_values, float)):
        params = replace(params_base, xi=float(xi), g=float(g))
        try:
            result = find_all(params, n_random_seeds=n_random_seeds,
                              rng_seed=_cell_seed(rng_seed, 0, j),
                              dedup_tol=dedup_tol)
            branches = {}
            seen = []
            for fp in result.roots:
                try:
                    rep = stability_classify(fp, params)
                except ZeroModeMismatch:
                    continue
                if rep.verdict is not Verdict.Stable:
                    continue
                canon = canonicalize(fp, params)
                y = canon.pack()
                if any(np.max(np.abs(y - y0)) < 1e-5 for y0 in seen):
                    continue
                seen.append(y)
                kind = pattern_label(canon, params, eps_pattern).kind.value
                key = kind
                k = 2
                while key in branches:     # two distinct classes, same kind
                    key = f"{kind}#{k}"
                    k += 1
                branches[key] = np.abs(canon.a)
            rows.append(CutRow(g=float(g), branches=branches))
        except Exception as exc:
            rows.append(CutRow(g=float(g), branches={},
                               error=f"{type(exc).__name__}: {exc}"))
    return rows


# ---------------------------------------------------------------------------
# critical lines

@dataclass
class CriticalPoint:
    n_sites: int
    xi: float
    g_c_numeric: float
    g_c_analytic: float
    error: str = ""

    @property
    def abs_error(self) -> float:
        return abs(self.g_c_numeric - self.g_c_analytic)


def critical_line_scan(params_base: LatticeParams, n_list, xi_values, *,
                       bracket=BISECT_BRACKET, tol: float = BISECT_TOL,
                       max_iter: int = 60):
    """Numeric (bisection) vs closed-form thresholds over N and xi.

    The shared fixed bracket keeps the bisection decision sequence, and
    hence the numeric value, identical across any N with the same
    threshold.  Failures are recorded per point, not raised.
    """
    out = []
    for n in n_list:
        for xi in np.asarray(xi_values, float):
            params = replace(params_base, n_sites=int(n), xi=float(xi))
            try:
                analytic = critical_coupling_np(params).g_c
                numeric = bisect_np_threshold(params, bracket=bracket,
                                              tol=tol, max_iter=max_iter)
                out.append(CriticalPoint(n_sites=int(n), xi=float(xi),
                                         g_c_numeric=numeric,
                                         g_c_analytic=analytic))
            except Exception as exc:
                out.append(CriticalPoint(n_sites=int(n), xi=float(xi),
                                         g_c_numeric=float("nan"),
                                         g_c_analytic=float("nan"),
                                         error=f"{type(exc).__name__}: {exc}"))
    return out


# ---------------------------------------------------------------------------
# site profiles

@dataclass
class SiteProfile:
    a: np.ndarray
    z: np.ndarray
    homogeneity: float      # max_{j,k} |a_j - a_k|
    settled: bool
    t_final: float


def site_profile(params_base: LatticeParams, g: float,
                 init_amplitude: float = 0.1, t_end: float = 400.0, *,
                 settle_tol: float = SETTLE_TOL, rtol: float = RTOL,
                 atol: float = ATOL) -> SiteProfile:
    """Relax a spatially homogeneous initial amplitude and read the profile.

    The initial spins sit exactly on the sphere at the inversion the
    coherence equation prefers for that amplitude.  Raises NotSettled
    (with the partial profile attached) when t_end is not enough.
    """
    params = replace(params_base, g=float(g))
    validate(params)
    n = params.n_sites
    u = np.full(n, float(init_amplitude))
    v = (params.kappa / params.omega_c) * u
    z = -0.5 / np.sqrt(1.0 + 16.0 * params.g ** 2 * u ** 2 / params.omega_a ** 2)
    p = 4.0 * params.g * u * z / params.omega_a
    state0 = MeanFieldState(a=u + 1j * v, s=p.astype(complex), z=z)

    res = relax_to_steady(state0, params, t_max=t_end, settle_tol=settle_tol,
                          rtol=rtol, atol=atol)
    a = res.state.a
    homog = float(np.max(np.abs(a[:, None] - a[None, :])))
    profile = SiteProfile(a=a, z=res.state.z.copy(), homogeneity=homog,
                          settled=res.settled, t_final=res.t_final)
    if not res.settled:
        raise NotSettled(
            f"flow norm {res.rhs_norm:.3g} > {settle_tol:g} at t={res.t_final:g}",
            state=res.state, profile=profile)
    return profile


# ---------------------------------------------------------------------------
# CSV output

def _comment(params: LatticeParams, extra: dict) -> str:
    fields = [f"dickelattice {__version__}"]
    fields += [f"{k}={v}" for k, v in params_to_jsonable(params).items()]
    fields += [f"{k}={v}" for k, v in extra.items()]
    return "# " + " ".join(fields)


def phase_diagram_csv(cells, spec: SweepSpec, path) -> None:
    """Columns: xi, g, n_stable, labels, marginal_flag, no_stable_state,
    n_roots_total."""
    extra = {"rng_seed": spec.rng_seed,
             "xi_grid": f"{spec.xi_grid.min}:{spec.xi_grid.max}:{spec.xi_grid.steps}",
             "g_grid": f"{spec.g_grid.min}:{spec.g_grid.max}:{spec.g_grid.steps}"}
    with open(path, "w", newline="") as fh:
        fh.write(_comment(spec.params_base, extra) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["xi", "g", "n_stable", "labels", "marginal_flag",
                         "no_stable_state", "n_roots_total"])
        for c in cells:
            labels = ";".join(sorted(
                k for k, m in c.stable_classes.items() for _ in range(m)))
            writer.writerow([repr(c.xi), repr(c.g), c.n_stable, labels,
                             int(c.marginal_flag), int(c.no_stable_state),
                             c.n_roots_total])


def cut_csv(rows, params_base: LatticeParams, xi: float, path) -> None:
    """Columns: g, then |a_1|..|a_N| per stable class label."""
    n = params_base.n_sites
    labels = []
    for row in rows:
        for key in row.branches:
            if key not in labels:
                labels.append(key)
    labels.sort()
    with open(path, "w", newline="") as fh:
        fh.write(_comment(replace(params_base, xi=xi), {"cut": "fixed xi"}) + "\n")
        writer = csv.writer(fh)
        header = ["g"]
        for lab in labels:
            header += [f"{lab}_abs_a_{j}" for j in range(1, n + 1)]
        writer.writerow(header)
        for row in rows:
            line = [repr(row.g)]
            for lab in labels:
                if lab in row.branches:
                    line += [repr(float(x)) for x in row.branches[lab]]
                else:
                    line += [""] * n
            writer.writerow(line)


def critical_csv(points, params_base: LatticeParams, path) -> None:
    """Columns: N, xi, g_c_numeric, g_c_analytic, abs_error."""
    with open(path, "w", newline="") as fh:
        fh.write(_comment(params_base, {"bracket": BISECT_BRACKET,
                                        "bisect_tol": BISECT_TOL}) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["N", "xi", "g_c_numeric", "g_c_analytic", "abs_error"])
        for pt in points:
            writer.writerow([pt.n_sites, repr(pt.xi), repr(pt.g_c_numeric),
                             repr(pt.g_c_analytic), repr(pt.abs_error)])


def profile_csv(profile: SiteProfile, params: LatticeParams, path) -> None:
    """Columns: j, Re a_j, Im a_j, z_j."""
    with open(path, "w", newline="") as fh:
        fh.write(_comment(params, {"homogeneity": profile.homogeneity,
                                   "settled": profile.settled}) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["j", "re_a", "im_a", "z"])
        for j in range(profile.a.size):
            writer.writerow([j + 1, repr(float(profile.a[j].real)),
                             repr(float(profile.a[j].imag)),
                             repr(float(profile.z[j]))])
