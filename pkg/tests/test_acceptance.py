"""Acceptance suite: every criterion at its stated tolerance, one printed
pass/fail line each (run pytest -s to see them)."""

import io
import math
import time

import numpy as np
import pytest

from meandim_lab.cli import cmd_verify, default_config
from meandim_lab.elliptic import Lattice
from meandim_lab.helmholtz import (HelmholtzSolution, barrier_solve,
                                   helmholtz_residual, make_grid_problem,
                                   max_principle_check, w_eval)
from meandim_lab.nevanlinna import characteristic, extremal_handle
from meandim_lab.numerics import Rectangle, SupSearchConfig, sup_search
from meandim_lab.report import comparable_json
from meandim_lab.widim import (CoverInstance, WindowSystem, brick_cover,
                               mean_dim_slope, min_multiplicity_cover,
                               residual_fixedpoint_dim, riemann_roch_dim,
                               theorem1_bounds)

MEAN_ENERGY = 0.6150198678198
LOWER_BOUND = 2.460079471279


def _report(num, name, ok, detail=""):
    print(f"ACCEPTANCE {num:02d} [{name}]: {'PASS' if ok else 'FAIL'}"
          + (f"  ({detail})" if detail else ""))
    assert ok, f"criterion {num} ({name}) failed: {detail}"


@pytest.fixture(scope="module")
def profile50(handle):
    return characteristic(handle, 50.0, 24)


def test_criterion_01_mean_energy_two_routes(curve, cell_energy):
    t0 = time.perf_counter()
    area = curve.lattice.area
    e_degree = 2.0 / area          # degree / cell area
    e_quad = cell_energy / area    # 2D quadrature route
    elapsed = time.perf_counter() - t0
    ok = (abs(e_degree - MEAN_ENERGY) <= 1e-6
          and abs(e_quad - MEAN_ENERGY) <= 1e-6
          and abs(e_degree - e_quad) <= 1e-5
          and elapsed < 60.0)
    _report(1, "mean energy", ok,
            f"degree {e_degree:.10f}, quadrature {e_quad:.10f}, "
            f"delta {abs(e_degree - e_quad):.2e}, {elapsed:.2f}s")


def test_criterion_02_lower_bound(curve):
    lower = 4.0 * (2.0 / curve.lattice.area)
    ok = abs(lower - LOWER_BOUND) <= 4e-6
    _report(2, "4e lower bound", ok, f"{lower:.12f} vs {LOWER_BOUND}")


def test_criterion_03_brody_normalisation(curve):
    t0 = time.perf_counter()
    rect = Rectangle(0.0, 2.0 * curve.omega1, 0.0,
                     math.sqrt(3.0) * curve.omega1)
    sup_df = sup_search(curve.spherical_derivative, rect,
                        SupSearchConfig(seed=0))

    def identity(z):
        z = np.asarray(z, dtype=complex)
        return (np.abs(z ** 3 - 1.0 / math.sqrt(8.0))
                / (1.0 + np.abs(z) ** 2) ** 2)

    sup_id = sup_search(identity, Rectangle(-4.0, 4.0, -4.0, 4.0),
                        SupSearchConfig(seed=0))
    elapsed = time.perf_counter() - t0
    ok = (abs(sup_df.value - 1.0) <= 1e-4
          and abs(sup_id.value - 1.0 / math.sqrt(8.0)) <= 1e-8
          and elapsed < 30.0)
    _report(3, "Brody normalisation", ok,
            f"sup|df| {sup_df.value:.8f}, identity {sup_id.value:.12f}, "
            f"{elapsed:.2f}s")


def test_criterion_04_degree_energy(cell_energy):
    ok = abs(cell_energy - 2.0) <= 1e-6
    _report(4, "degree as energy", ok, f"cell energy {cell_energy:.10f}")


def test_criterion_05_characteristic(curve, profile50):
    e_ref = 2.0 / curve.lattice.area
    bound_ok = all(t <= math.pi * r * r / 2.0 for r, t, _ in profile50.rows)
    final_ratio = profile50.rows[-1][2]
    ratio_ok = abs(final_ratio - e_ref) <= 0.05 * e_ref
    _report(5, "characteristic", bound_ok and ratio_ok,
            f"bound on {len(profile50.rows)} rows, ratio(50) "
            f"{final_ratio:.6f} vs {e_ref:.6f}")


def test_criterion_06_cover_combinatorics():
    t0 = time.perf_counter()
    exact1 = min_multiplicity_cover(CoverInstance(1, 4, 2)).multiplicity
    exact2 = min_multiplicity_cover(CoverInstance(2, 3, 2)).multiplicity
    bricks = [brick_cover(d, N, s).multiplicity
              for d, N, s in ((1, 6, 2), (2, 6, 2), (3, 4, 2))]
    elapsed = time.perf_counter() - t0
    ok = (exact1 == 2 and exact2 == 3 and bricks == [2, 3, 4]
          and elapsed < 120.0)
    _report(6, "cover combinatorics", ok,
            f"exact ({exact1}, {exact2}), bricks {bricks}, {elapsed:.2f}s")


def test_criterion_07_residual_example():
    dims = [residual_fixedpoint_dim(n) for n in range(1, 8)]
    rows = mean_dim_slope(WindowSystem("residual", 1), 6, 12, [1, 2, 3, 4])
    ratios = [r.ratio for r in rows]
    mono = all(b <= a + 1e-12 for a, b in zip(ratios, ratios[1:]))
    ok = dims == list(range(1, 8)) and mono and ratios[-1] <= 0.5
    _report(7, "residual example", ok,
            f"dims {dims}, ratios {[f'{r:.3f}' for r in ratios]}")


def test_criterion_08_formula_suite():
    ok = riemann_roch_dim(1, 2, 1) == 8
    rng = np.random.default_rng(2026)
    details = []
    for _ in range(3):
        N = int(rng.integers(1, 6))
        e_ell = float(rng.uniform(0.0, 1.0))
        e_sup = float(rng.uniform(e_ell, 1.0))
        lower, upper = theorem1_bounds(N, e_ell, e_sup)
        want_lower = 2.0 * e_ell * N + 2.0 * e_ell  # independent arithmetic
        want_upper = e_sup * N * 4.0
        ok = ok and math.isclose(lower, want_lower, rel_tol=1e-14)
        ok = ok and math.isclose(upper, want_upper, rel_tol=1e-14)
        details.append(f"N={N}")
    _report(8, "formula suite", ok, ", ".join(details))


def test_criterion_09_helmholtz():
    sol = HelmholtzSolution(1.0)
    w0 = w_eval(sol, 0.0)
    series = math.fsum(0.25 ** k / math.factorial(k) ** 2 for k in range(30))
    w11 = w_eval(sol, 1.0)
    r1 = abs(helmholtz_residual(sol, 1.0 + 1.0j, 0.05))
    r2 = abs(helmholtz_residual(sol, 1.0 + 1.0j, 0.025))
    order = math.log2(r1 / r2)
    prob = make_grid_problem(6.0, 0.125, 1.0, rhs=1.0, boundary=0.0)
    u = barrier_solve(prob)
    mp = max_principle_check(prob, u)
    sup_ok = float(np.abs(u[1:-1, 1:-1]).max()) <= 1.0 + 1e-8
    ok = (abs(w0 - 1.0) <= 1e-12 and abs(w11 - series) <= 1e-8
          and 1.5 <= order <= 2.5 and mp.ok and sup_ok)
    _report(9, "Helmholtz", ok,
            f"w(0)-1 = {w0 - 1.0:.1e}, series delta {abs(w11 - series):.1e}, "
            f"order {order:.2f}, max principle {mp.ok}")


def test_criterion_10_determinism():
    cfg = default_config()
    outputs = []
    for _ in range(2):
        code, rep = cmd_verify(cfg, stream=io.StringIO())
        assert code == 0
        outputs.append(comparable_json(rep.to_json()))
    ok = outputs[0] == outputs[1]
    _report(10, "determinism", ok,
            f"{len(outputs[0])} comparable bytes identical")
