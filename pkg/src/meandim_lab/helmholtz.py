"""Helmholtz barrier solution and a finite-difference minimum-principle demo.

The radial barrier

    w_lam(z) = (1/2pi) \int_0^{2pi} exp(sqrt(lam) (x cos t + y sin t)) dt

solves (-Lap + lam) w = 0 on the plane, equals the modified Bessel value
I_0(sqrt(lam) |z|), has minimum w(0) = 1, and grows to infinity with |z|.
Those are exactly the properties that make it a supersolution for
comparison arguments, and the grid solver below demonstrates the scalar
form of that mechanism: solutions of (-Lap + c) u = g obey

    sup |u| <= sup |g| / c + boundary influence,

which max_principle_check tests directly.  The bundle-valued version of
this comparison (with its 8/a constant) involves curvature positivity that
has no numeric instance here, so only the scalar skeleton is exercised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import QuadratureConfig

__all__ = [
    "HelmholtzSolution",
    "GridProblem",
    "ConvergenceError",
    "MaxPrincipleResult",
    "w_eval",
    "stencil_residual",
    "helmholtz_residual",
    "make_grid_problem",
    "barrier_solve",
    "max_principle_check",
]


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class HelmholtzSolution:
    """The positive radial solution w_lam of (-Lap + lam) w = 0."""

    lam: float

    def __post_init__(self):
        if not (self.lam > 0):
            raise ValueError("lambda must be positive")

    def w(self, z, tol: float = 1e-14) -> float:
        """Angular average by the periodic trapezoid rule.

        The integrand is analytic and 2pi-periodic, so doubling the node
        count converges geometrically; iteration stops after two consecutive
        agreements below tol.
        """
        z = complex(z)
        x, y = z.real, z.imag
        rt = math.sqrt(self.lam)

        def trap(m):
            theta = 2.0 * math.pi * np.arange(m) / m
            return float(np.exp(rt * (x * np.cos(theta)
                                      + y * np.sin(theta))).mean())

        m = 16
        prev = trap(m)
        hits = 0
        while m < 2 ** 15:
            m *= 2
            cur = trap(m)
            if abs(cur - prev) <= tol * (1.0 + abs(cur)):
                hits += 1
                if hits >= 2:
                    return cur
            else:
                hits = 0
            prev = cur
        return prev


def w_eval(sol: HelmholtzSolution, z: complex,
           cfg: QuadratureConfig | None = None) -> float:
    tol = cfg.abs_tol * 1e-2 if cfg else 1e-14
    return sol.w(z, tol=max(1e-15, min(tol, 1e-13)))


def stencil_residual(fn, lam: float, z: complex, h: float) -> float:
    """(-Lap_h + lam) fn at z with the 5-point stencil; O(h^2) accurate."""
    if not (h > 0):
        raise ValueError("h must be positive")
    z = complex(z)
    lap = (fn(z + h) + fn(z - h) + fn(z + 1j * h) + fn(z - 1j * h)
           - 4.0 * fn(z)) / (h * h)
    return -lap + lam * fn(z)


def helmholtz_residual(sol: HelmholtzSolution, z: complex, h: float) -> float:
    return stencil_residual(sol.w, sol.lam, z, h)


@dataclass(frozen=True)
class GridProblem:
    """Dirichlet problem for (-Lap + c) u = g on [-R, R]^2, spacing h.

    `rhs` holds g on the full grid; `boundary` holds the Dirichlet data on
    the full grid (interior entries unused).  Grid axes run from -R to R in
    steps of h, so R/h must be integral.
    """

    half_width: float
    spacing: float
    coefficient: float
    rhs: np.ndarray
    boundary: np.ndarray

    def __post_init__(self):
        if not (self.spacing > 0 and self.half_width > 0):
            raise ValueError("half_width and spacing must be positive")
        ratio = self.half_width / self.spacing
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("half_width must be an integer multiple of spacing")
        if not (self.coefficient > 0):
            raise ValueError("coefficient must be positive")
        n = 2 * int(round(ratio)) + 1
        if self.rhs.shape != (n, n) or self.boundary.shape != (n, n):
            raise ValueError(f"grid arrays must have shape {(n, n)}")

    @property
    def n_nodes(self) -> int:
        return self.rhs.shape[0]

    def axis(self) -> np.ndarray:
        n = self.n_nodes
        return -self.half_width + self.spacing * np.arange(n)


def make_grid_problem(half_width: float, spacing: float, coefficient: float,
                      rhs=0.0, boundary=0.0) -> GridProblem:
    """Build a GridProblem from callables f(x, y) or constants."""
    n = 2 * int(round(half_width / spacing)) + 1
    ax = -half_width + spacing * np.arange(n)
    X, Y = np.meshgrid(ax, ax, indexing="ij")

    def fill(data):
        if callable(data):
            return np.asarray(data(X, Y), dtype=float) * np.ones((n, n))
        return float(data) * np.ones((n, n))

    return GridProblem(half_width=half_width, spacing=spacing,
                       coefficient=coefficient, rhs=fill(rhs),
                       boundary=fill(boundary))


def _apply_operator(u_int: np.ndarray, h: float, c: float) -> np.ndarray:
    """(-Lap_h + c) on interior values with zero-padded neighbours."""
    pad = np.pad(u_int, 1)
    lap = (pad[2:, 1:-1] + pad[:-2, 1:-1] + pad[1:-1, 2:] + pad[1:-1, :-2]
           - 4.0 * u_int) / (h * h)
    return -lap + c * u_int


def barrier_solve(p: GridProblem, tol: float = 1e-10,
                  max_iter: int = 200_000) -> np.ndarray:
    """Solve the 5-point discretisation by conjugate gradients.

    The matrix is symmetric positive definite (c > 0), the initial guess is
    zero, and all reductions are fixed-order array sums, so the iteration is
    deterministic.  Convergence target: max-norm residual of the discrete
    equation <= tol.  Returns u on the full grid including boundary values.
    """
    h, c = p.spacing, p.coefficient
    g = p.rhs[1:-1, 1:-1]
    b = g.copy()
    bd = p.boundary
    b[0, :] += bd[0, 1:-1] / (h * h)
    b[-1, :] += bd[-1, 1:-1] / (h * h)
    b[:, 0] += bd[1:-1, 0] / (h * h)
    b[:, -1] += bd[1:-1, -1] / (h * h)

    x = np.zeros_like(b)
    r = b - _apply_operator(x, h, c)
    pvec = r.copy()
    rs = float((r * r).sum())
    if math.sqrt(rs) == 0.0:
        u = bd.copy()
        u[1:-1, 1:-1] = x
        return u
    it = 0
    while True:
        if it % 32 == 0:
            true_res = b - _apply_operator(x, h, c)
            if float(np.abs(true_res).max()) <= tol:
                break
        if it >= max_iter:
            true_res = float(np.abs(b - _apply_operator(x, h, c)).max())
            raise ConvergenceError(
                f"CG stalled after {it} iterations "
                f"(max residual {true_res:.3e} > {tol:.1e})", true_res)
        Ap = _apply_operator(pvec, h, c)
        alpha = rs / float((pvec * Ap).sum())
        x += alpha * pvec
        r -= alpha * Ap
        rs_new = float((r * r).sum())
        pvec = r + (rs_new / rs) * pvec
        rs = rs_new
        it += 1

    u = bd.copy()
    u[1:-1, 1:-1] = x
    return u


@dataclass(frozen=True)
class MaxPrincipleResult:
    ok: bool
    witness: tuple | None
    interior_sup: float
    bound: float


def max_principle_check(p: GridProblem, u: np.ndarray) -> MaxPrincipleResult:
    """Scalar comparison bound: interior sup|u| <= sup|g|/c + sup|boundary|.

    The witness, if any, is the (x, y) location of the worst violation.
    """
    c = p.coefficient
    interior = np.abs(u[1:-1, 1:-1])
    edge = np.concatenate([p.boundary[0, :], p.boundary[-1, :],
                           p.boundary[:, 0], p.boundary[:, -1]])
    bound = float(np.abs(p.rhs).max()) / c + 1e-8 + float(np.abs(edge).max())
    worst = float(interior.max()) if interior.size else 0.0
    if worst <= bound:
        return MaxPrincipleResult(True, None, worst, bound)
    i, j = np.unravel_index(int(np.argmax(interior)), interior.shape)
    ax = p.axis()
    return MaxPrincipleResult(False, (float(ax[i + 1]), float(ax[j + 1])),
                              worst, bound)
