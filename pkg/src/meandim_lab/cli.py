"""Command-line front end.

Subcommands run the library computations, write a JSON report plus CSV
tables (and figures) into the output directory, and return conventional
exit codes: 0 success, 1 verification/computation failure, 2 usage or
configuration error.

    meandim-lab extremal        curve constants, energies, |df| field
    meandim-lab characteristic  T(r) profile and mean-energy estimate
    meandim-lab widim SUB       cover search tables (cube|shift|residual|formula)
    meandim-lab helmholtz       barrier solution and grid demo
    meandim-lab verify          the full reproduction suite

Reports are deterministic for a fixed config and seed; only the `meta`
block (timestamp, runtimes) differs between runs and comparison mode
ignores it.  MEANDIM_LAB_THREADS caps internal parallelism without
affecting results.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import figures
from .elliptic import (BRODY_K, E1, E2, build_extremal_curve, curve_eval,
                       lattice_area)
from .helmholtz import (HelmholtzSolution, barrier_solve, helmholtz_residual,
                        make_grid_problem, max_principle_check, w_eval)
from .nevanlinna import (CharacteristicProfile, characteristic,
                         extremal_handle, mean_energy_limit_estimate,
                         mean_energy_periodic)
from .numerics import (QuadratureConfig, QuadratureError, Rectangle,
                       Singularity, SupSearchConfig, integrate_1d,
                       integrate_parallelogram, sup_search)
from .report import ReportDocument
from .widim import (CoverInstance, WindowSystem, brick_cover, mean_dim_slope,
                    min_multiplicity_cover, residual_fixedpoint_dim,
                    riemann_roch_dim, theorem1_bounds)

__all__ = ["main", "load_config", "default_config", "ConfigError",
           "cmd_extremal", "cmd_characteristic", "cmd_widim",
           "cmd_helmholtz", "cmd_verify", "VERIFY_CRITERIA"]

SCHEMA_VERSION = 1

# Reference constants used as report targets.  The mean energy is
# (2 pi / sqrt 3) * I^-2 with I the elliptic integral below; both decimal
# expansions are pinned independently by the acceptance oracles.
MEAN_ENERGY_REF = 0.6150198678198
LOWER_BOUND_REF = 2.460079471279
SUP_IDENTITY_REF = 1.0 / math.sqrt(8.0)

_DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "seed": 0,
    "quadrature": {"abs_tol": 1e-10, "rel_tol": 1e-10,
                   "max_subdivisions": 400},
    "sup_search": {"initial_grid": 48, "refinement_levels": 28,
                   "shrink_factor": 0.5, "restarts": 6},
    "extremal": {"field_grid": 161},
    "characteristic": {"r_max": 50.0, "samples": 24},
    "widim": {
        "cube": {"d": 2, "N": 3, "s": 2},
        "shift": {"windows": [1, 2], "eps_cells": 2, "extent": 3,
                  "shift_dim": 1},
        "residual": {"windows": [1, 2, 3, 4], "eps_cells": 6, "extent": 12},
        "formula": {"N": 1, "deg": 2, "n": 1},
    },
    "helmholtz": {"lam": 1.0, "stencil_point": [1.0, 1.0],
                  "stencil_h": [0.1, 0.05, 0.025],
                  "barrier": {"half_width": 6.0, "spacing": 0.125,
                              "coefficient": 1.0}},
    "output": {"figures": True},
}


class ConfigError(ValueError):
    pass


def _merge_strict(defaults, override, path=""):
    if not isinstance(override, dict):
        raise ConfigError(f"config section {path or '<root>'} must be an object")
    merged = copy.deepcopy(defaults)
    for key, value in override.items():
        if key not in defaults:
            raise ConfigError(f"unknown config key {path + key!r}")
        if isinstance(defaults[key], dict):
            merged[key] = _merge_strict(defaults[key], value, path + key + ".")
        else:
            merged[key] = value
    return merged


def default_config() -> dict:
    return copy.deepcopy(_DEFAULTS)


def load_config(path: str | None, seed_override: int | None = None) -> dict:
    """Load and validate a config file; unknown keys are rejected."""
    if path is None:
        cfg = default_config()
    else:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        cfg = _merge_strict(_DEFAULTS, raw)
        if cfg["schema_version"] != SCHEMA_VERSION:
            raise ConfigError(
                f"unsupported schema_version {cfg['schema_version']!r}")
    if seed_override is not None:
        cfg["seed"] = int(seed_override)
    try:
        _quad_cfg(cfg)
        _sup_cfg(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def _quad_cfg(cfg, singular=False) -> QuadratureConfig:
    q = cfg["quadrature"]
    return QuadratureConfig(
        abs_tol=float(q["abs_tol"]), rel_tol=float(q["rel_tol"]),
        max_subdivisions=int(q["max_subdivisions"]),
        singularity_substitution=(Singularity.ALGEBRAIC_ENDPOINT if singular
                                  else Singularity.NONE))


def _sup_cfg(cfg) -> SupSearchConfig:
    s = cfg["sup_search"]
    return SupSearchConfig(
        initial_grid=int(s["initial_grid"]),
        refinement_levels=int(s["refinement_levels"]),
        shrink_factor=float(s["shrink_factor"]),
        restarts=int(s["restarts"]), seed=int(cfg["seed"]))


def _new_report(command: str, cfg: dict) -> ReportDocument:
    rep = ReportDocument(command=command)
    rep.meta = {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "seed": cfg["seed"],
        "runtime_seconds": None,
    }
    return rep


def _fundamental_rectangle(curve) -> Rectangle:
    # [0, 2 w1] x [0, sqrt(3) w1] contains exactly one fundamental cell of
    # the hexagonal lattice, and |df| is periodic, so the sup over it is the
    # global sup.
    return Rectangle(0.0, 2.0 * curve.omega1, 0.0,
                     math.sqrt(3.0) * curve.omega1)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_extremal(cfg: dict) -> ReportDocument:
    rep = _new_report("extremal", cfg)
    t0 = time.perf_counter()
    qcfg = _quad_cfg(cfg)
    curve = build_extremal_curve(qcfg)
    handle = extremal_handle(curve)
    area = lattice_area(curve.lattice)

    rep.add_scalar("elliptic_integral", curve.elliptic_integral,
                   tolerance=1e-10, provenance="derived")
    rep.add_scalar("omega1", curve.omega1, tolerance=1e-10,
                   provenance="derived")
    rep.add_scalar("lattice_area", area, target=2.0 * math.sqrt(3.0)
                   * curve.omega1 ** 2, tolerance=1e-12, provenance="trivial",
                   passed=abs(area - 2.0 * math.sqrt(3.0)
                              * curve.omega1 ** 2) <= 1e-12)

    e_degree = curve.degree / area
    e_quad = mean_energy_periodic(handle, qcfg)
    rep.add_scalar("mean_energy_degree_route", e_degree,
                   target=MEAN_ENERGY_REF, tolerance=1e-6,
                   provenance="reference",
                   passed=abs(e_degree - MEAN_ENERGY_REF) <= 1e-6)
    rep.add_scalar("mean_energy_quadrature_route", e_quad,
                   target=MEAN_ENERGY_REF, tolerance=1e-6,
                   provenance="reference",
                   passed=abs(e_quad - MEAN_ENERGY_REF) <= 1e-6)
    rep.add_check("mean_energy_routes_agree",
                  abs(e_degree - e_quad) <= 1e-5,
                  f"|delta| = {abs(e_degree - e_quad):.3e}")

    sup_res = sup_search(curve.spherical_derivative,
                         _fundamental_rectangle(curve), _sup_cfg(cfg))
    rep.add_scalar("sup_spherical_derivative", sup_res.value, target=1.0,
                   tolerance=1e-4, provenance="reference",
                   passed=abs(sup_res.value - 1.0) <= 1e-4,
                   note=f"argmax ~ {sup_res.argmax:.6f} (reported, not "
                        f"asserted); final spacing {sup_res.spacing:.2e}")

    lower = 2.0 * e_degree * 2.0  # N = 1
    rep.add_scalar("mean_dimension_lower_bound_N1", lower,
                   target=LOWER_BOUND_REF, tolerance=4e-6,
                   provenance="reference",
                   passed=abs(lower - LOWER_BOUND_REF) <= 4e-6)

    f0 = curve_eval(curve, 0.0)
    fw2 = curve_eval(curve, curve.omega2)
    rep.add_check("critical_value_e1", abs(f0.value - E1) <= 1e-9,
                  f"f(0) = {f0.value!r}")
    rep.add_check("critical_value_e2", abs(fw2.value - E2) <= 1e-9,
                  f"f(omega2) = {fw2.value!r}")

    rng = np.random.default_rng(cfg["seed"] + 1)
    pts = rng.uniform(-2, 2, 128) + 1j * rng.uniform(-2, 2, 128)
    vals, ders, chart = curve.chart_eval(pts)
    plain = ~chart
    res = np.abs(ders[plain] ** 2
                 - BRODY_K * (vals[plain] ** 3 - 1.0 / math.sqrt(8.0)))
    res_max = float((res / (1.0 + np.abs(vals[plain]) ** 3)).max())
    rep.add_scalar("ode_residual_max", res_max, tolerance=1e-6,
                   provenance="derived", passed=res_max <= 1e-6)

    n = int(cfg["extremal"]["field_grid"])
    xs = np.linspace(0.0, 2.0 * curve.omega1, n)
    ys = np.linspace(0.0, math.sqrt(3.0) * curve.omega1, n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    field = curve.spherical_derivative((X + 1j * Y).ravel()).reshape(n, n)
    rows = [(xs[i], ys[j], field[i, j]) for i in range(n) for j in range(n)]
    rep.add_table("field", ("x", "y", "abs_df"), rows)
    rep.meta["runtime_seconds"] = time.perf_counter() - t0
    rep.artifacts["field_shape"] = (n, n)
    rep.artifacts["argmax"] = sup_res.argmax
    return rep


def cmd_characteristic(cfg: dict) -> ReportDocument:
    rep = _new_report("characteristic", cfg)
    t0 = time.perf_counter()
    qcfg = _quad_cfg(cfg)
    r_max = float(cfg["characteristic"]["r_max"])
    samples = int(cfg["characteristic"]["samples"])

    if r_max == 1.0:
        rep.add_table("profile", ("r", "T", "ratio"), [(1.0, 0.0, 0.0)])
        rep.add_check("characteristic_bound", True, "single zero row")
        rep.meta["runtime_seconds"] = time.perf_counter() - t0
        return rep

    curve = build_extremal_curve(qcfg)
    handle = extremal_handle(curve)
    profile = characteristic(handle, r_max, samples, qcfg)
    rep.add_table("profile", ("r", "T", "ratio"), profile.rows)

    bound_ok = all(t <= math.pi * r * r / 2.0 for r, t, _ in profile.rows)
    rep.add_check("characteristic_bound", bound_ok,
                  "T(r) <= pi r^2 / 2 on every row")
    estimate, uncertainty = mean_energy_limit_estimate(profile)
    rep.add_scalar("mean_energy_estimate", estimate, target=MEAN_ENERGY_REF,
                   tolerance=0.05 * MEAN_ENERGY_REF, provenance="derived",
                   passed=abs(estimate - MEAN_ENERGY_REF)
                   <= 0.05 * MEAN_ENERGY_REF,
                   note="finite-radius lim sup surrogate: ratio at the "
                        "largest radius; heuristic for non-periodic curves")
    rep.add_scalar("mean_energy_uncertainty", uncertainty,
                   provenance="derived",
                   note="spread of ratios over the top quartile of radii")
    rep.meta["runtime_seconds"] = time.perf_counter() - t0
    return rep


def cmd_widim(cfg: dict, subcommand: str) -> ReportDocument:
    rep = _new_report(f"widim_{subcommand}", cfg)
    t0 = time.perf_counter()
    w = cfg["widim"]
    if subcommand == "cube":
        params = w["cube"]
        inst = CoverInstance(dimension=int(params["d"]),
                             extent=int(params["N"]),
                             max_side=int(params["s"]))
        sol = min_multiplicity_cover(inst)
        rep.add_scalar("multiplicity", float(sol.multiplicity),
                       tolerance=0.0, provenance="derived",
                       note="exact search over all admissible boxes")
        rep.add_scalar("widim_bound", float(sol.widim_bound),
                       tolerance=0.0, provenance="derived")
        rep.add_table("boxes", tuple(f"axis{i}" for i in range(1, inst.dimension + 1)),
                      [tuple(f"[{lo},{hi}]" for lo, hi in b)
                       for b in sol.boxes])
        rep.meta["solution"] = sol.to_json_dict(inst)
        rep.artifacts["cover_solution"] = sol
        rep.artifacts["instance_extent"] = inst.extent
    elif subcommand in ("shift", "residual"):
        params = w[subcommand]
        kind = "full_shift" if subcommand == "shift" else "residual"
        sys_ = WindowSystem(kind=kind, window=1,
                            shift_dim=int(params.get("shift_dim", 1)))
        rows = mean_dim_slope(sys_, int(params["eps_cells"]),
                              int(params["extent"]),
                              [int(n) for n in params["windows"]])
        rep.add_table("slope", ("n", "widim_bound", "ratio", "minimal"),
                      [(r.window, r.widim_bound, r.ratio, r.minimal)
                       for r in rows])
        if rows:
            rep.add_scalar("final_ratio", rows[-1].ratio, tolerance=0.0,
                           provenance="derived",
                           note="exact rational count for the last window")
        if subcommand == "residual" and rows:
            ratios = [r.ratio for r in rows]
            rep.add_check("ratios_non_increasing",
                          all(b <= a + 1e-12
                              for a, b in zip(ratios, ratios[1:])))
        rep.artifacts["slope_rows"] = rows
    elif subcommand == "formula":
        params = w["formula"]
        N, deg, n = int(params["N"]), int(params["deg"]), int(params["n"])
        dim = riemann_roch_dim(N, deg, n)
        rep.add_scalar("deformation_dim", float(dim), tolerance=0.0,
                       provenance="trivial",
                       note=f"2 n^2 (N+1) deg with N={N}, deg={deg}, n={n}")
        lower, upper = theorem1_bounds(N, MEAN_ENERGY_REF, 1.0)
        rep.add_table("bounds", ("N", "e_ell", "e_sup", "lower", "upper"),
                      [(N, MEAN_ENERGY_REF, 1.0, lower, upper)])
    else:
        raise ConfigError(f"unknown widim subcommand {subcommand!r}")
    rep.meta["runtime_seconds"] = time.perf_counter() - t0
    return rep


def cmd_helmholtz(cfg: dict) -> ReportDocument:
    rep = _new_report("helmholtz", cfg)
    t0 = time.perf_counter()
    h_cfg = cfg["helmholtz"]
    lam = float(h_cfg["lam"])
    sol = HelmholtzSolution(lam)
    qcfg = _quad_cfg(cfg)

    w0 = w_eval(sol, 0.0, qcfg)
    rep.add_scalar("w_at_origin", w0, target=1.0, tolerance=1e-12,
                   provenance="reference", passed=abs(w0 - 1.0) <= 1e-12)
    # Power-series oracle for the unit-circle value of w_1.
    series = math.fsum(0.25 ** k / math.factorial(k) ** 2 for k in range(30))
    w11 = w_eval(HelmholtzSolution(1.0), 1.0, qcfg)
    rep.add_scalar("w1_at_unit_circle", w11, target=series, tolerance=1e-8,
                   provenance="derived", passed=abs(w11 - series) <= 1e-8)

    radii = np.linspace(0.0, 4.0, 81)
    wvals = [w_eval(sol, r, qcfg) for r in radii]
    rep.add_table("w_radial", ("r", "w"), list(zip(radii, wvals)))

    zp = complex(*[float(v) for v in h_cfg["stencil_point"]])
    hs = [float(h) for h in h_cfg["stencil_h"]]
    res = [abs(helmholtz_residual(sol, zp, h)) for h in hs]
    conv_rows = []
    orders = []
    for i, (h, r) in enumerate(zip(hs, res)):
        ratio = res[i - 1] / r if i > 0 and r > 0 else float("nan")
        if i > 0 and r > 0:
            orders.append(math.log2(ratio))
        conv_rows.append((h, r, ratio))
    rep.add_table("stencil_convergence", ("h", "abs_residual", "ratio"),
                  conv_rows)
    order_ok = all(1.5 <= o <= 2.5 for o in orders) and bool(orders)
    rep.add_check("stencil_order_two", order_ok,
                  f"observed orders {[f'{o:.2f}' for o in orders]}")

    b_cfg = h_cfg["barrier"]
    prob = make_grid_problem(float(b_cfg["half_width"]),
                             float(b_cfg["spacing"]),
                             float(b_cfg["coefficient"]),
                             rhs=float(b_cfg["coefficient"]), boundary=0.0)
    u = barrier_solve(prob)
    mp = max_principle_check(prob, u)
    rep.add_check("barrier_max_principle", mp.ok,
                  f"interior sup {mp.interior_sup:.6f} <= bound {mp.bound:.6f}")
    center = u[u.shape[0] // 2, u.shape[1] // 2]
    rep.add_scalar("barrier_center_value", float(center), provenance="derived",
                   note="approaches 1 as the domain grows (comparison with "
                        "the constant supersolution)")
    ax = prob.axis()
    rows = [(ax[i], ax[j], u[i, j]) for i in range(0, u.shape[0], 2)
            for j in range(0, u.shape[1], 2)]
    rep.add_table("barrier_solution", ("x", "y", "u"), rows)
    rep.meta["runtime_seconds"] = time.perf_counter() - t0
    rep.artifacts["barrier_grid"] = (prob, u)
    rep.artifacts["w_radial_data"] = (radii, wvals, lam)
    return rep


# ---------------------------------------------------------------------------
# Verify
# ---------------------------------------------------------------------------

class _VerifyContext:
    """Shared lazily-built state for the verify criteria."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.qcfg = _quad_cfg(cfg)
        self._curve = None
        self._cell_energy = None
        self._profile = None

    @property
    def curve(self):
        if self._curve is None:
            self._curve = build_extremal_curve(self.qcfg)
        return self._curve

    @property
    def cell_energy(self):
        if self._cell_energy is None:
            self._cell_energy = integrate_parallelogram(
                self.curve.density, self.curve.lattice, self.qcfg)
        return self._cell_energy

    @property
    def profile(self) -> CharacteristicProfile:
        if self._profile is None:
            self._profile = characteristic(extremal_handle(self.curve),
                                           50.0, 24, self.qcfg)
        return self._profile


def _crit_mean_energy(ctx):
    t0 = time.perf_counter()
    area = ctx.curve.lattice.area
    e_degree = 2.0 / area
    e_quad = ctx.cell_energy / area
    elapsed = time.perf_counter() - t0
    ok = (abs(e_degree - MEAN_ENERGY_REF) <= 1e-6
          and abs(e_quad - MEAN_ENERGY_REF) <= 1e-6
          and abs(e_degree - e_quad) <= 1e-5
          and elapsed < 60.0)
    return ok, (f"degree route {e_degree:.12f}, quadrature route "
                f"{e_quad:.12f}, target {MEAN_ENERGY_REF} +- 1e-6, "
                f"routes agree to {abs(e_degree - e_quad):.2e} (<= 1e-5), "
                f"runtime within 60s: {elapsed < 60.0}")


def _crit_lower_bound(ctx):
    lower = 4.0 * (2.0 / ctx.curve.lattice.area)
    ok = abs(lower - LOWER_BOUND_REF) <= 4e-6
    return ok, f"4 e = {lower:.12f} vs {LOWER_BOUND_REF} +- 4e-6"


def _crit_brody_normalisation(ctx):
    t0 = time.perf_counter()
    scfg = _sup_cfg(ctx.cfg)
    sup_df = sup_search(ctx.curve.spherical_derivative,
                        _fundamental_rectangle(ctx.curve), scfg)

    def identity(z):
        z = np.asarray(z, dtype=complex)
        return (np.abs(z ** 3 - 1.0 / math.sqrt(8.0))
                / (1.0 + np.abs(z) ** 2) ** 2)

    sup_id = sup_search(identity, Rectangle(-4.0, 4.0, -4.0, 4.0), scfg)
    elapsed = time.perf_counter() - t0
    ok = (abs(sup_df.value - 1.0) <= 1e-4
          and abs(sup_id.value - SUP_IDENTITY_REF) <= 1e-8
          and elapsed < 30.0)
    return ok, (f"sup|df| = {sup_df.value:.8f} (+-1e-4 of 1), algebraic sup "
                f"{sup_id.value:.12f} vs 1/sqrt(8) +- 1e-8, "
                f"runtime within 30s: {elapsed < 30.0}")


def _crit_degree_energy(ctx):
    ok = abs(ctx.cell_energy - 2.0) <= 1e-6
    return ok, f"cell energy {ctx.cell_energy:.10f} vs 2 +- 1e-6"


def _crit_characteristic(ctx):
    prof = ctx.profile
    bound_ok = all(t <= math.pi * r * r / 2.0 for r, t, _ in prof.rows)
    e_ref = 2.0 / ctx.curve.lattice.area
    final_ratio = prof.rows[-1][2]
    ratio_ok = abs(final_ratio - e_ref) <= 0.05 * e_ref
    return bound_ok and ratio_ok, (
        f"T <= pi r^2/2 on all {len(prof.rows)} rows: {bound_ok}; ratio at "
        f"r=50 is {final_ratio:.6f}, within 5% of {e_ref:.6f}: {ratio_ok}")


def _crit_covers(ctx):
    t0 = time.perf_counter()
    sol1 = min_multiplicity_cover(CoverInstance(1, 4, 2))
    sol2 = min_multiplicity_cover(CoverInstance(2, 3, 2))
    bricks = {d: brick_cover(d, N, s)
              for d, N, s in ((1, 6, 2), (2, 6, 2), (3, 4, 2))}
    elapsed = time.perf_counter() - t0
    ok = (sol1.multiplicity == 2 and sol2.multiplicity == 3
          and all(bricks[d].multiplicity == d + 1 for d in (1, 2, 3))
          and elapsed < 120.0)
    return ok, (f"exact minima: (1,4,2) -> {sol1.multiplicity}, (2,3,2) -> "
                f"{sol2.multiplicity}; brick multiplicities "
                f"{[bricks[d].multiplicity for d in (1, 2, 3)]} = d+1; "
                f"runtime within 120s: {elapsed < 120.0}")


def _crit_residual(ctx):
    dims_ok = all(residual_fixedpoint_dim(n) == n for n in range(1, 8))
    rows = mean_dim_slope(WindowSystem("residual", 1), 6, 12, [1, 2, 3, 4])
    ratios = [r.ratio for r in rows]
    mono = all(b <= a + 1e-12 for a, b in zip(ratios, ratios[1:]))
    ok = dims_ok and mono and ratios[-1] <= 0.5
    return ok, (f"fixed-point dims 1..7 ok: {dims_ok}; residual ratios "
                f"{[f'{r:.3f}' for r in ratios]} non-increasing: {mono}, "
                f"final <= 1/2: {ratios[-1] <= 0.5}")


def _crit_formulas(ctx):
    ok = riemann_roch_dim(1, 2, 1) == 8
    rng = np.random.default_rng(ctx.cfg["seed"] + 8)
    detail = [f"riemann_roch_dim(1,2,1) = {riemann_roch_dim(1, 2, 1)}"]
    for _ in range(3):
        N = int(rng.integers(1, 6))
        e_ell = float(rng.uniform(0.0, 1.0))
        e_sup = float(rng.uniform(e_ell, 1.0))
        lower, upper = theorem1_bounds(N, e_ell, e_sup)
        # independent arithmetic, different association order
        want_lower = 2.0 * e_ell * N + 2.0 * e_ell
        want_upper = e_sup * N * 4.0
        ok = ok and math.isclose(lower, want_lower, rel_tol=1e-14) \
            and math.isclose(upper, want_upper, rel_tol=1e-14)
        detail.append(f"N={N}: ({lower:.6f}, {upper:.6f})")
    return ok, "; ".join(detail)


def _crit_helmholtz(ctx):
    qcfg = ctx.qcfg
    sol1 = HelmholtzSolution(1.0)
    w0 = w_eval(sol1, 0.0, qcfg)
    series = math.fsum(0.25 ** k / math.factorial(k) ** 2 for k in range(30))
    w11 = w_eval(sol1, 1.0, qcfg)
    r1 = abs(helmholtz_residual(sol1, 1.0 + 1.0j, 0.05))
    r2 = abs(helmholtz_residual(sol1, 1.0 + 1.0j, 0.025))
    order = math.log2(r1 / r2)
    prob = make_grid_problem(6.0, 0.125, 1.0, rhs=1.0, boundary=0.0)
    u = barrier_solve(prob)
    mp = max_principle_check(prob, u)
    ok = (abs(w0 - 1.0) <= 1e-12 and abs(w11 - series) <= 1e-8
          and 1.5 <= order <= 2.5 and mp.ok)
    return ok, (f"w(0) = {w0:.15f} (+-1e-12 of 1); w_1(1) vs series oracle "
                f"delta {abs(w11 - series):.2e} <= 1e-8; stencil order "
                f"{order:.2f} in [1.5, 2.5]; max principle "
                f"{mp.interior_sup:.8f} <= {mp.bound:.8f}: {mp.ok}")


def _determinism_probe(cfg):
    qcfg = QuadratureConfig(abs_tol=1e-12, rel_tol=1e-12,
                            max_subdivisions=200,
                            singularity_substitution=Singularity.ALGEBRAIC_ENDPOINT)
    integral = integrate_1d(lambda x: 1.0 / math.sqrt(x ** 3 - 1.0), 1.0,
                            math.inf, qcfg)
    scfg = SupSearchConfig(initial_grid=16, refinement_levels=10,
                           shrink_factor=0.5, restarts=3, seed=cfg["seed"])

    def identity(z):
        z = np.asarray(z, dtype=complex)
        return (np.abs(z ** 3 - 1.0 / math.sqrt(8.0))
                / (1.0 + np.abs(z) ** 2) ** 2)

    sup = sup_search(identity, Rectangle(-4.0, 4.0, -4.0, 4.0), scfg)
    sol = min_multiplicity_cover(CoverInstance(1, 4, 2))
    wv = w_eval(HelmholtzSolution(2.0), 0.7 + 0.3j)
    return (repr(integral), repr(sup.value), repr(sup.argmax),
            repr(sol.boxes), repr(wv))


def _crit_determinism(ctx):
    first = _determinism_probe(ctx.cfg)
    second = _determinism_probe(ctx.cfg)
    ok = first == second
    return ok, ("repeated quadrature, sup search, cover search, and barrier "
                f"evaluations bit-identical: {ok}")


VERIFY_CRITERIA = [
    ("c01_mean_energy", "mean energy, two independent routes",
     _crit_mean_energy),
    ("c02_lower_bound", "mean-dimension lower bound 4e", _crit_lower_bound),
    ("c03_brody_normalisation", "sup|df| = 1 and the algebraic sup identity",
     _crit_brody_normalisation),
    ("c04_degree_energy", "cell energy equals the degree",
     _crit_degree_energy),
    ("c05_characteristic", "characteristic bound and r=50 ratio",
     _crit_characteristic),
    ("c06_covers", "exact cover minima and brick multiplicities",
     _crit_covers),
    ("c07_residual", "fixed-point dimensions and residual window ratios",
     _crit_residual),
    ("c08_formulas", "dimension-count formulas", _crit_formulas),
    ("c09_helmholtz", "barrier solution and discrete maximum principle",
     _crit_helmholtz),
    ("c10_determinism", "bit-identical repeated runs", _crit_determinism),
]


def cmd_verify(cfg: dict, list_only: bool = False,
               stream=None) -> tuple[int, ReportDocument]:
    stream = stream or sys.stdout
    rep = _new_report("verify", cfg)
    if list_only:
        for cid, title, _ in VERIFY_CRITERIA:
            print(f"{cid}: {title}", file=stream)
        return 0, rep

    ctx = _VerifyContext(cfg)
    t0 = time.perf_counter()
    all_ok = True
    first_failure = None
    for cid, title, fn in VERIFY_CRITERIA:
        t_c = time.perf_counter()
        try:
            ok, detail = fn(ctx)
        except (QuadratureError, ValueError, RuntimeError) as exc:
            ok, detail = False, f"error: {exc}"
        rep.add_check(cid, ok, detail)
        status = "PASS" if ok else "FAIL"
        print(f"{status}  {cid}  {title}  [{time.perf_counter() - t_c:.1f}s]",
              file=stream)
        if not ok:
            all_ok = False
            if first_failure is None:
                first_failure = cid
    rep.meta["runtime_seconds"] = time.perf_counter() - t0
    if not all_ok:
        print(f"FAILED: first failing criterion {first_failure}", file=stream)
    return (0 if all_ok else 1), rep


# ---------------------------------------------------------------------------
# Output plumbing and entry point
# ---------------------------------------------------------------------------

def _write_outputs(rep: ReportDocument, outdir: Path, want_json: bool,
                   want_csv: bool, want_figures: bool):
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    if want_json:
        written.append(rep.write_json(outdir / "report.json"))
    if want_csv:
        written.extend(rep.write_csv_tables(outdir))
    if want_figures:
        written.extend(_render_figures(rep, outdir))
    return written


def _render_figures(rep: ReportDocument, outdir: Path):
    paths = []
    try:
        if rep.command == "extremal":
            n_x, n_y = rep.artifacts["field_shape"]
            table = next(t for t in rep.tables if t.name == "field")
            xs = sorted({row[0] for row in table.rows})
            ys = sorted({row[1] for row in table.rows})
            vals = np.array([row[2] for row in table.rows]).reshape(n_x, n_y)
            marker = rep.artifacts["argmax"]
            paths.append(figures.render_field(
                np.array(xs), np.array(ys), vals,
                outdir / "extremal_field.png",
                "spherical derivative over one fundamental cell", marker))
        elif rep.command == "characteristic":
            table = next(t for t in rep.tables if t.name == "profile")
            radii = [r[0] for r in table.rows]
            tvals = [r[1] for r in table.rows]
            ratios = [r[2] for r in table.rows]
            if len(radii) > 1:
                paths.append(figures.render_characteristic(
                    radii, tvals, ratios, MEAN_ENERGY_REF,
                    outdir / "characteristic.png"))
        elif rep.command.startswith("widim"):
            if "slope_rows" in rep.artifacts:
                paths.append(figures.render_slope(
                    rep.artifacts["slope_rows"], outdir / f"{rep.command}.png",
                    rep.command.replace("_", " ")))
            elif "cover_solution" in rep.artifacts:
                sol = rep.artifacts["cover_solution"]
                if sol.boxes and len(sol.boxes[0]) <= 2:
                    paths.append(figures.render_cover(
                        sol, rep.artifacts["instance_extent"],
                        outdir / "widim_cover.png", "minimal cover"))
        elif rep.command == "helmholtz":
            radii, wvals, lam = rep.artifacts["w_radial_data"]
            prob, u = rep.artifacts["barrier_grid"]
            paths.append(figures.render_helmholtz(
                radii, wvals, lam, prob.axis(), u,
                outdir / "helmholtz.png"))
    except Exception as exc:  # figures are best-effort side output
        print(f"warning: figure rendering failed: {exc}", file=sys.stderr)
    return paths


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meandim-lab",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", help="JSON config file (strict schema)")
    parser.add_argument("--out", default="meandim_lab_out",
                        help="output directory (default: meandim_lab_out)")
    parser.add_argument("--json", action="store_true",
                        help="write only the JSON report")
    parser.add_argument("--csv", action="store_true",
                        help="write only the CSV tables "
                             "(columns are listed per command below)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip figure rendering")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("extremal",
                   help="curve constants and the |df| field "
                        "(CSV: field[x, y, abs_df])")
    sub.add_parser("characteristic",
                   help="T(r) profile (CSV: profile[r, T, ratio])")
    widim_p = sub.add_parser("widim", help="cover searches and formulas")
    widim_p.add_argument("subcommand",
                         choices=("cube", "shift", "residual", "formula"))
    sub.add_parser("helmholtz",
                   help="barrier solution and grid demo (CSV: w_radial[r, w],"
                        " barrier_solution[x, y, u])")
    verify_p = sub.add_parser("verify", help="run the reproduction suite")
    verify_p.add_argument("--list", action="store_true",
                          help="list criteria without running")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    outdir = Path(args.out)
    want_json = args.json or not args.csv
    want_csv = args.csv or not args.json
    want_figures = bool(cfg["output"]["figures"]) and not args.no_figures

    try:
        if args.command == "verify":
            code, rep = cmd_verify(cfg, list_only=args.list)
            if not args.list:
                _write_outputs(rep, outdir, want_json, want_csv, False)
            return code
        if args.command == "extremal":
            rep = cmd_extremal(cfg)
        elif args.command == "characteristic":
            rep = cmd_characteristic(cfg)
        elif args.command == "widim":
            rep = cmd_widim(cfg, args.subcommand)
        elif args.command == "helmholtz":
            rep = cmd_helmholtz(cfg)
        else:  # pragma: no cover - argparse enforces choices
            return 2
    except (QuadratureError, ValueError, RuntimeError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1

    _write_outputs(rep, outdir, want_json, want_csv, want_figures)
    if not rep.all_ok:
        failing = [c.name for c in rep.checks if not c.ok]
        failing += [s.name for s in rep.scalars if s.passed is False]
        print(f"checks failed: {', '.join(failing)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
