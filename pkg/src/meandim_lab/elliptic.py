"""Rank-2 lattices, Weierstrass p-function evaluation, and the extremal
elliptic Brody curve.

The curve built here is the degree-2 elliptic function on the hexagonal
lattice whose critical values are the vertices of a regular tetrahedron
inscribed in the Riemann sphere:

    e1 = 1/sqrt(2),  e2 = e^(2*pi*i/3)/sqrt(2),  e3 = e^(4*pi*i/3)/sqrt(2),
    e4 = infinity.

It satisfies (f')^2 = K*(f^3 - 1/sqrt(8)) with K = pi*sqrt(8), which pins
the normalisation sup|df| = 1 exactly.  We evaluate f through the
Weierstrass p-function: coefficient matching in the cubic ODE gives

    f(z) = (4/K) * p(z - omega1)   with invariants g2 = 0, g3 = K^3/(16*sqrt(8)),

a representation that is over-determined by the validation checks run at
construction time (ODE residual, critical values, periodicity, and the
half-period identity p(omega1) = pi/2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import QuadratureConfig, Singularity, integrate_1d

__all__ = [
    "LatticeError",
    "PoleError",
    "ConstructionError",
    "Lattice",
    "WeierstrassP",
    "ExtremalBrodyCurve",
    "CurvePoint",
    "lattice_area",
    "reduce_to_fundamental",
    "wp_eval",
    "build_extremal_curve",
    "curve_eval",
    "spherical_derivative",
    "E1", "E2", "E3",
    "BRODY_K",
]

E1 = 1.0 / math.sqrt(2.0)
E2 = cmath.exp(2j * math.pi / 3.0) / math.sqrt(2.0)
E3 = cmath.exp(4j * math.pi / 3.0) / math.sqrt(2.0)
BRODY_K = math.pi * math.sqrt(8.0)

_CHART_SWITCH = 1e3  # |f| beyond which the reciprocal chart is used


class LatticeError(ValueError):
    pass


class PoleError(ValueError):
    pass


class ConstructionError(RuntimeError):
    pass


@dataclass(frozen=True)
class Lattice:
    """Rank-2 lattice Z*omega_a + Z*omega_b with an oriented basis."""

    omega_a: complex
    omega_b: complex

    def __post_init__(self):
        a, b = complex(self.omega_a), complex(self.omega_b)
        scale = max(abs(a), abs(b))
        if scale == 0.0:
            raise LatticeError("zero lattice generator")
        s = (a.conjugate() * b).imag
        if abs(s) <= 1e-14 * scale * scale:
            raise LatticeError("degenerate generators (collinear over R)")
        if s <= 0:
            raise LatticeError("basis must be oriented: Im(conj(a)*b) > 0")
        m = np.array([[a.real, b.real], [a.imag, b.imag]])
        object.__setattr__(self, "_basis_inv", np.linalg.inv(m))

    @property
    def area(self) -> float:
        a, b = complex(self.omega_a), complex(self.omega_b)
        return abs((a.conjugate() * b).imag)

    @property
    def shortest(self) -> float:
        a, b = complex(self.omega_a), complex(self.omega_b)
        return min(abs(a), abs(b), abs(a + b), abs(a - b))

    def coords(self, z):
        """Real coordinates (s, t) with z = s*omega_a + t*omega_b."""
        z = np.asarray(z, dtype=complex)
        v = np.vstack([z.real.ravel(), z.imag.ravel()])
        st = self._basis_inv @ v
        return st[0].reshape(z.shape), st[1].reshape(z.shape)

    def reduce(self, z):
        """Representative of z mod the lattice with coordinates in [0, 1)."""
        s, t = self.coords(z)
        s -= np.floor(s)
        t -= np.floor(t)
        out = s * self.omega_a + t * self.omega_b
        return out if np.ndim(z) else complex(out)

    def reduce_nearest(self, z):
        """z translated by a lattice vector to lie nearest the origin."""
        zr = np.asarray(self.reduce(z), dtype=complex)
        best = None
        best_abs = None
        for i in (-1, 0, 1, 2):
            for j in (-1, 0, 1, 2):
                w = zr - (i * self.omega_a + j * self.omega_b)
                aw = np.abs(w)
                if best is None:
                    best, best_abs = w, aw
                else:
                    m = aw < best_abs
                    best = np.where(m, w, best)
                    best_abs = np.where(m, aw, best_abs)
        return best if np.ndim(z) else complex(best)


def lattice_area(lat: Lattice) -> float:
    """Area of the fundamental domain, |Im(conj(omega_a) * omega_b)|."""
    return lat.area


def reduce_to_fundamental(lat: Lattice, z: complex) -> complex:
    return lat.reduce(z)


def _laurent_coefficients(g2: complex, g3: complex, order: int) -> np.ndarray:
    """Coefficients c_k of p(w) = w^-2 + sum_{k>=2} c_k w^(2k-2).

    Standard recurrence: c2 = g2/20, c3 = g3/28,
    c_k = 3/((2k+1)(k-3)) * sum_{m=2}^{k-2} c_m c_{k-m}.
    """
    c = np.zeros(order + 1, dtype=complex)
    if order >= 2:
        c[2] = g2 / 20.0
    if order >= 3:
        c[3] = g3 / 28.0
    for k in range(4, order + 1):
        acc = 0.0 + 0.0j
        for m in range(2, k - 1):
            acc += c[m] * c[k - m]
        c[k] = 3.0 * acc / ((2 * k + 1) * (k - 3))
    return c


@dataclass(frozen=True)
class WeierstrassP:
    """Weierstrass p for given invariants, evaluated by Laurent series after
    nearest-lattice-point reduction, with the duplication formula once the
    reduced argument exceeds `reduction_radius`."""

    lattice: Lattice
    g2: complex
    g3: complex
    series_order: int = 26
    reduction_radius: float = 0.0
    pole_guard_factor: float = 1e-6

    def __post_init__(self):
        if self.series_order < 10:
            raise ValueError("series_order must be >= 10")
        if self.reduction_radius <= 0.0:
            object.__setattr__(self, "reduction_radius",
                               0.30 * self.lattice.shortest)
        object.__setattr__(
            self, "_coeffs",
            _laurent_coefficients(self.g2, self.g3, self.series_order))

    @property
    def pole_guard(self) -> float:
        return self.pole_guard_factor * self.lattice.shortest

    def _series(self, w: np.ndarray):
        w2 = w * w
        inv = 1.0 / w2
        p = inv.astype(complex)
        dp = -2.0 * inv / w
        t = w2.copy()
        c = self._coeffs
        for k in range(2, self.series_order + 1):
            p = p + c[k] * t
            dp = dp + (2 * k - 2) * c[k] * t / w
            t = t * w2
        return p, dp

    def _double(self, p, dp):
        # p(2u) = (p''/(2 p'))^2 - 2 p(u),  p'' = 6 p^2 - g2/2; the derivative
        # follows by differentiating, avoiding the sign ambiguity of the ODE.
        A = 6.0 * p * p - 0.5 * self.g2
        q = A / dp
        p2 = 0.25 * q * q - 2.0 * p
        dp2 = A * (12.0 * p * dp * dp - A * A) / (4.0 * dp ** 3) - dp
        return p2, dp2

    def eval_reduced(self, w: np.ndarray):
        """(p, p') at already-reduced arguments w (no pole checks)."""
        w = np.asarray(w, dtype=complex)
        aw = np.abs(w)
        k = np.zeros(w.shape, dtype=np.int64)
        m = aw > self.reduction_radius
        while m.any():
            k[m] += 1
            aw = np.where(m, 0.5 * aw, aw)
            m = aw > self.reduction_radius
        p, dp = self._series(w / np.exp2(k))
        for j in range(int(k.max()) if k.size else 0):
            mask = k > j
            if mask.any():
                p2, dp2 = self._double(p[mask], dp[mask])
                p[mask] = p2
                dp[mask] = dp2
        return p, dp

    def eval(self, z: complex):
        """(p(z), p'(z)); raises PoleError inside the pole guard."""
        w = self.lattice.reduce_nearest(complex(z))
        if abs(w) < self.pole_guard:
            raise PoleError(
                f"argument within pole guard ({abs(w):.3e} < "
                f"{self.pole_guard:.3e}); switch charts")
        p, dp = self.eval_reduced(np.array([w]))
        return complex(p[0]), complex(dp[0])

    def half_period_values(self):
        """p at the three half-periods (roots of 4t^3 - g2 t - g3)."""
        half = (0.5 * self.lattice.omega_a,
                0.5 * self.lattice.omega_b,
                0.5 * (self.lattice.omega_a + self.lattice.omega_b))
        return [self.eval(h)[0] for h in half]

    def half_period_residual(self) -> float:
        """Consistency of (g2, g3) with the lattice: the value at each
        half-period must be a root of 4t^3 - g2 t - g3 and p' must vanish."""
        worst = 0.0
        half = (0.5 * self.lattice.omega_a,
                0.5 * self.lattice.omega_b,
                0.5 * (self.lattice.omega_a + self.lattice.omega_b))
        for h in half:
            p, dp = self.eval(h)
            worst = max(worst, abs(4.0 * p ** 3 - self.g2 * p - self.g3),
                        abs(dp))
        return worst


def wp_eval(wp: WeierstrassP, z: complex):
    """(p(z), p'(z)) for a single point; PoleError inside the pole guard."""
    return wp.eval(z)


@dataclass(frozen=True)
class CurvePoint:
    """Value/derivative pair; in the pole chart both refer to 1/f."""

    value: complex
    derivative: complex
    pole_chart: bool


@dataclass(frozen=True)
class ExtremalBrodyCurve:
    """The extremal elliptic Brody curve f with sup|df| = 1.

    f(z) = (4/K) p(z - omega1), K = pi*sqrt(8), on the hexagonal lattice
    Z(2 omega1) + Z(2 omega2), omega2 = omega1 e^(i pi/3).
    """

    K: float
    omega1: float
    omega2: complex
    lattice: Lattice
    wp: WeierstrassP
    e1: complex = E1
    e2: complex = E2
    e3: complex = E3
    elliptic_integral: float = field(default=0.0)

    @property
    def pole_guard(self) -> float:
        return self.wp.pole_guard

    @property
    def degree(self) -> int:
        return 2

    def chart_eval(self, z):
        """Vectorised chart-aware evaluation.

        Returns (vals, derivs, pole_chart) where entries flagged pole_chart
        hold (1/f, (1/f)') instead of (f, f').  The switch happens inside
        the pole guard (quadratic chart from the Laurent tail) and whenever
        |f| exceeds 1e3.
        """
        z = np.asarray(z, dtype=complex)
        w = np.asarray(self.lattice.reduce_nearest(z - self.omega1),
                       dtype=complex)
        near = np.abs(w) < self.pole_guard
        vals = np.zeros(z.shape, dtype=complex)
        ders = np.zeros(z.shape, dtype=complex)
        chart = np.zeros(z.shape, dtype=bool)

        if near.any():
            wn = w[near]
            # 1/f = (K/4) w^2 (1 + O(w^6)); the correction is below 1e-36
            # at the guard radius.
            vals[near] = 0.25 * self.K * wn * wn
            ders[near] = 0.5 * self.K * wn
            chart[near] = True

        far = ~near
        if far.any():
            p, dp = self.wp.eval_reduced(w[far])
            f = (4.0 / self.K) * p
            fp = (4.0 / self.K) * dp
            big = np.abs(f) > _CHART_SWITCH
            # np.where evaluates both branches; guard the reciprocals at
            # zeros of f (discarded by the mask anyway).
            with np.errstate(divide="ignore", invalid="ignore"):
                fv = np.where(big, 1.0 / f, f)
                fd = np.where(big, -fp / (f * f), fp)
            vals[far] = fv
            ders[far] = fd
            ch = chart[far]
            ch |= big
            chart[far] = ch
        return vals, ders, chart

    def eval(self, z: complex) -> CurvePoint:
        v, d, c = self.chart_eval(np.array([complex(z)]))
        return CurvePoint(complex(v[0]), complex(d[0]), bool(c[0]))

    def spherical_derivative(self, z):
        """|df|(z) = (1/sqrt(pi)) |F'| / (1 + |F|^2), chart-invariant."""
        v, d, _ = self.chart_eval(z)
        out = np.abs(d) / ((1.0 + np.abs(v) ** 2) * math.sqrt(math.pi))
        return out if np.ndim(z) else float(out)

    def density(self, z):
        """Energy density |df|^2."""
        sd = self.spherical_derivative(z)
        return sd * sd if np.ndim(z) else float(sd) ** 2


def build_extremal_curve(cfg: QuadratureConfig | None = None) -> ExtremalBrodyCurve:
    """Construct and validate the extremal curve.

    omega1 = (2^(1/4)/sqrt(K)) * integral_1^inf dx/sqrt(x^3 - 1) with
    K = pi*sqrt(8); the lattice is Z(2 omega1) + Z(2 omega2).  Validation
    over-determines the representation: f(0) = e1, f(omega2) = e2, a pole at
    omega1, the half-period consistency of (g2, g3) with the lattice, and
    the cubic ODE residual at sampled points.
    """
    qcfg = QuadratureConfig(
        abs_tol=1e-13, rel_tol=1e-13,
        max_subdivisions=(cfg.max_subdivisions if cfg else 400),
        singularity_substitution=Singularity.ALGEBRAIC_ENDPOINT)
    integral = integrate_1d(lambda x: 1.0 / math.sqrt(x ** 3 - 1.0),
                            1.0, math.inf, qcfg)
    K = BRODY_K
    omega1 = 2.0 ** 0.25 / math.sqrt(K) * integral
    omega2 = omega1 * cmath.exp(1j * math.pi / 3.0)
    lat = Lattice(2.0 * omega1, 2.0 * omega2)
    g3 = K ** 3 / (16.0 * math.sqrt(8.0))
    wp = WeierstrassP(lattice=lat, g2=0.0, g3=g3)
    curve = ExtremalBrodyCurve(K=K, omega1=omega1, omega2=omega2,
                               lattice=lat, wp=wp,
                               elliptic_integral=integral)

    tol = 1e-6
    f0 = curve.eval(0.0)
    if f0.pole_chart or abs(f0.value - E1) > tol:
        raise ConstructionError(f"f(0) = {f0.value!r} != e1")
    fw2 = curve.eval(omega2)
    if fw2.pole_chart or abs(fw2.value - E2) > tol:
        raise ConstructionError(f"f(omega2) = {fw2.value!r} != e2")
    fpole = curve.eval(omega1)
    if not fpole.pole_chart or abs(fpole.value) > tol:
        raise ConstructionError("missing pole at omega1")
    if wp.half_period_residual() > tol:
        raise ConstructionError("invariants inconsistent with the lattice")

    rng = np.random.default_rng(20260808)
    pts = (rng.uniform(-2, 2, 64) + 1j * rng.uniform(-2, 2, 64))
    vals, ders, chart = curve.chart_eval(pts)
    plain = ~chart
    f, fp = vals[plain], ders[plain]
    res = np.abs(fp ** 2 - K * (f ** 3 - 1.0 / math.sqrt(8.0)))
    if np.any(res > tol * (1.0 + np.abs(f) ** 3)):
        raise ConstructionError("cubic ODE residual too large")
    return curve


def curve_eval(curve: ExtremalBrodyCurve, z: complex) -> CurvePoint:
    """(f(z), f'(z)), switching to the reciprocal chart near poles."""
    return curve.eval(z)


def spherical_derivative(curve: ExtremalBrodyCurve, z):
    return curve.spherical_derivative(z)
