import cmath
import math

import numpy as np
import pytest

from meandim_lab.elliptic import (BRODY_K, E1, E2, ConstructionError, Lattice,
                                  LatticeError, PoleError, WeierstrassP,
                                  build_extremal_curve, curve_eval,
                                  lattice_area, reduce_to_fundamental,
                                  spherical_derivative, wp_eval)
from meandim_lab.numerics import Rectangle, SupSearchConfig, sup_search

G3 = math.pi ** 3 / 2.0


class TestLattice:
    def test_unit_square_area(self):
        assert lattice_area(Lattice(1.0, 1j)) == pytest.approx(1.0)

    def test_hexagonal_area(self, curve):
        # |C/Lambda| = 2 sqrt(3) omega1^2 for the hexagonal cell.
        assert lattice_area(curve.lattice) == pytest.approx(
            2.0 * math.sqrt(3.0) * curve.omega1 ** 2, rel=1e-14)

    def test_scaling_homogeneity(self):
        lat = Lattice(1.3 + 0.2j, 0.1 + 1.7j)
        for c in (0.5, 2.0, 3.7):
            scaled = Lattice(c * lat.omega_a, c * lat.omega_b)
            assert scaled.area == pytest.approx(c * c * lat.area, rel=1e-12)

    def test_degenerate_raises(self):
        with pytest.raises(LatticeError):
            Lattice(1.0, 2.0)
        with pytest.raises(LatticeError):
            Lattice(0.0, 1j)

    def test_orientation_raises(self):
        with pytest.raises(LatticeError):
            Lattice(1j, 1.0)

    def test_reduce_square(self):
        lat = Lattice(1.0, 1j)
        assert reduce_to_fundamental(lat, 2.5 + 3.5j) == pytest.approx(
            0.5 + 0.5j, abs=1e-12)

    def test_reduce_identity(self):
        lat = Lattice(1.0, 1j)
        z = 0.25 + 0.75j
        assert reduce_to_fundamental(lat, z) == pytest.approx(z, abs=1e-15)

    def test_reduce_periodicity(self, curve):
        lat = curve.lattice
        rng = np.random.default_rng(5)
        for _ in range(20):
            z = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
            a = reduce_to_fundamental(lat, z)
            b = reduce_to_fundamental(lat, z + 2.0 * curve.omega1)
            assert abs(a - b) < 1e-10


class TestWeierstrassP:
    def test_leading_laurent_term(self, curve):
        z = 1e-4 * cmath.exp(0.37j)
        p, _ = wp_eval(curve.wp, z)
        assert abs(p * z * z - 1.0) <= 1e-6

    def test_half_period_value(self, curve):
        # g2 = 0, g3 = pi^3/2: the real half-period value is the real root
        # of 4 t^3 = g3, i.e. pi/2.
        p, dp = wp_eval(curve.wp, curve.omega1)
        assert p.real == pytest.approx(math.pi / 2.0, abs=1e-9)
        assert abs(p.imag) < 1e-9
        assert abs(dp) < 1e-9

    def test_half_period_against_lattice_sum_oracle(self, curve):
        # Direct symmetrised lattice sum over |m|, |n| <= 50; the square
        # truncation of the quadratically convergent tail is good to ~1e-4.
        lat = curve.lattice
        z = complex(curve.omega1)
        total = 1.0 / (z * z)
        for m in range(-50, 51):
            for n in range(-50, 51):
                if m == 0 and n == 0:
                    continue
                lam = m * lat.omega_a + n * lat.omega_b
                total += 1.0 / (z - lam) ** 2 - 1.0 / lam ** 2
        p, _ = wp_eval(curve.wp, curve.omega1)
        assert abs(total - p) < 5e-4

    def test_ode_residual_at_random_points(self, curve):
        wp = curve.wp
        rng = np.random.default_rng(99)
        pts = rng.uniform(0.05, 0.95, (100, 2))
        z = pts[:, 0] * wp.lattice.omega_a + pts[:, 1] * wp.lattice.omega_b
        w = wp.lattice.reduce_nearest(z)
        keep = np.abs(w) > 1e-3
        p, dp = wp.eval_reduced(w[keep])
        res = np.abs(dp ** 2 - (4.0 * p ** 3 - wp.g2 * p - wp.g3))
        assert np.all(res <= 1e-8 * (1.0 + np.abs(p) ** 3))

    def test_pole_guard(self, curve):
        with pytest.raises(PoleError):
            wp_eval(curve.wp, 0.0)
        with pytest.raises(PoleError):
            wp_eval(curve.wp, curve.lattice.omega_a)

    def test_series_order_validation(self):
        lat = Lattice(2.0, 2j)
        with pytest.raises(ValueError):
            WeierstrassP(lattice=lat, g2=0.0, g3=1.0, series_order=5)

    def test_inconsistent_invariants_detected(self):
        # Wrong g3 for the square lattice: half-period residual blows up.
        lat = Lattice(2.0, 2j)
        wp = WeierstrassP(lattice=lat, g2=0.0, g3=G3)
        assert wp.half_period_residual() > 1e-3


class TestExtremalCurve:
    def test_omega1_value(self, curve):
        # omega1 = 2^(1/4) I / sqrt(K) with I the elliptic integral.
        assert curve.omega1 == pytest.approx(0.9688914277666871, abs=1e-9)

    def test_invariants(self, curve):
        assert curve.K == BRODY_K
        assert curve.wp.g2 == 0.0
        assert curve.wp.g3 == pytest.approx(G3, rel=1e-14)
        assert abs(curve.omega2 - curve.omega1
                   * cmath.exp(1j * math.pi / 3.0)) < 1e-15

    def test_critical_values(self, curve):
        f0 = curve_eval(curve, 0.0)
        assert not f0.pole_chart
        assert f0.value == pytest.approx(E1, abs=1e-12)
        assert abs(f0.derivative) < 1e-9  # critical point

        fw2 = curve_eval(curve, curve.omega2)
        assert fw2.value == pytest.approx(E2, abs=1e-12)

    def test_pole_at_omega1(self, curve):
        fp = curve_eval(curve, curve.omega1)
        assert fp.pole_chart
        assert abs(fp.value) < 1e-12

    def test_double_periodicity(self, curve):
        rng = np.random.default_rng(7)
        z = rng.uniform(-3, 3, 100) + 1j * rng.uniform(-3, 3, 100)
        v0, d0, c0 = curve.chart_eval(z)
        for period in (2.0 * curve.omega1, 2.0 * curve.omega2):
            v1, d1, c1 = curve.chart_eval(z + period)
            same = c0 == c1
            assert np.all(np.abs(v1[same] - v0[same]) <= 1e-9)

    def test_ode_residual(self, curve):
        rng = np.random.default_rng(13)
        z = rng.uniform(-2, 2, 200) + 1j * rng.uniform(-2, 2, 200)
        v, d, chart = curve.chart_eval(z)
        plain = ~chart
        f, fp = v[plain], d[plain]
        res = np.abs(fp ** 2 - curve.K * (f ** 3 - 1.0 / math.sqrt(8.0)))
        assert np.all(res <= 1e-6 * (1.0 + np.abs(f) ** 3))

    def test_spherical_derivative_at_critical_points(self, curve):
        assert spherical_derivative(curve, 0.0) == pytest.approx(0.0, abs=1e-9)
        # Pole: the reciprocal-chart limit of the spherical derivative is 0.
        assert spherical_derivative(curve, curve.omega1) == pytest.approx(
            0.0, abs=1e-9)

    def test_brody_bound_on_dense_grid(self, curve):
        n = 400
        xs = np.linspace(0.0, 2.0 * curve.omega1, n)
        ys = np.linspace(0.0, math.sqrt(3.0) * curve.omega1, n)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        vals = curve.spherical_derivative((X + 1j * Y).ravel())
        assert float(vals.max()) <= 1.0 + 1e-6

    def test_sup_spherical_derivative_is_one(self, curve):
        rect = Rectangle(0.0, 2.0 * curve.omega1, 0.0,
                         math.sqrt(3.0) * curve.omega1)
        res = sup_search(curve.spherical_derivative, rect,
                         SupSearchConfig(seed=0))
        assert res.value == pytest.approx(1.0, abs=1e-4)

    def test_two_spherical_derivative_formulas_agree(self, curve):
        # |df|^2 = (1/pi) |f'|^2/(1+|f|^2)^2 = (K/pi) |f^3 - 1/sqrt(8)| /
        # (1+|f|^2)^2; both are computed away from poles and compared.
        rng = np.random.default_rng(3)
        z = rng.uniform(-2, 2, 200) + 1j * rng.uniform(-2, 2, 200)
        v, d, chart = curve.chart_eval(z)
        plain = ~chart
        f = v[plain]
        direct = curve.spherical_derivative(z)[plain]
        kform = np.sqrt((curve.K / math.pi)
                        * np.abs(f ** 3 - 1.0 / math.sqrt(8.0))
                        / (1.0 + np.abs(f) ** 2) ** 2)
        assert np.all(np.abs(direct - kform) <= 1e-8)

    def test_construction_is_validated(self, curve):
        # The constructor re-derives everything; just confirm it returns the
        # same lattice constants deterministically.
        again = build_extremal_curve()
        assert repr(again.omega1) == repr(curve.omega1)
        assert repr(again.wp.g3) == repr(curve.wp.g3)

    def test_chart_switch_threshold(self, curve):
        # A point close (but outside the guard) to the pole must come back
        # in the reciprocal chart.
        z = curve.omega1 + 1e-4
        pt = curve_eval(curve, z)
        assert pt.pole_chart
        assert abs(pt.value) < 1e-3
