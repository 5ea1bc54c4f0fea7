"""Shared numerical kernels.

Adaptive 1D quadrature (Gauss-Kronrod panels with substitutions for algebraic
endpoint singularities and infinite tails), deterministic 2D quadrature over
disks and lattice parallelograms, and a seeded multi-start supremum search.

Everything here is pure: identical inputs and configurations produce
bit-identical outputs.  Panel subdivision order, grid layouts, and reduction
order are all fixed; no randomness enters except through explicit seeds.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

__all__ = [
    "Singularity",
    "QuadratureConfig",
    "SupSearchConfig",
    "QuadratureError",
    "Rectangle",
    "SupSearchResult",
    "integrate_1d",
    "integrate_disk",
    "integrate_parallelogram",
    "sup_search",
    "worker_count",
]


class Singularity(Enum):
    """Endpoint treatment for improper 1D integrals."""

    NONE = "none"
    ALGEBRAIC_ENDPOINT = "algebraic_endpoint"


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 400
    singularity_substitution: Singularity = Singularity.NONE

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class SupSearchConfig:
    initial_grid: int = 48
    refinement_levels: int = 28
    shrink_factor: float = 0.5
    restarts: int = 6
    seed: int = 0

    def __post_init__(self):
        if self.initial_grid < 8:
            raise ValueError("initial_grid must be >= 8")
        if self.refinement_levels < 1:
            raise ValueError("refinement_levels must be >= 1")
        if not (0.0 < self.shrink_factor < 1.0):
            raise ValueError("shrink_factor must lie in (0, 1)")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


class QuadratureError(RuntimeError):
    """Raised when the requested tolerance is not met.

    Carries the best value obtained so far and its error estimate.
    """

    def __init__(self, message, value, error_estimate):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned closed rectangle in the plane, z = x + iy."""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("degenerate rectangle")


@dataclass(frozen=True)
class SupSearchResult:
    """Best value found by sampling; a lower bound on the true supremum."""

    value: float
    argmax: complex
    spacing: float


def worker_count() -> int:
    """Internal parallelism cap, from MEANDIM_LAB_THREADS.

    Thread count never affects results: work is chunked at fixed boundaries
    and assembled in index order.
    """
    raw = os.environ.get("MEANDIM_LAB_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    cap = os.cpu_count() or 1
    return min(max(1, n), max(1, cap))


# ---------------------------------------------------------------------------
# 1D adaptive Gauss-Kronrod
# ---------------------------------------------------------------------------

# (G7, K15) node/weight pairs on [-1, 1].
_GK_NODES = np.array([
    0.991455371120813, -0.991455371120813,
    0.949107912342759, -0.949107912342759,
    0.864864423359769, -0.864864423359769,
    0.741531185599394, -0.741531185599394,
    0.586087235467691, -0.586087235467691,
    0.405845151377397, -0.405845151377397,
    0.207784955007898, -0.207784955007898,
    0.000000000000000,
])
_K15_WEIGHTS = np.array([
    0.022935322010529, 0.022935322010529,
    0.063092092629979, 0.063092092629979,
    0.104790010322250, 0.104790010322250,
    0.140653259715525, 0.140653259715525,
    0.169004726639267, 0.169004726639267,
    0.190350578064785, 0.190350578064785,
    0.204432940075298, 0.204432940075298,
    0.209482141084728,
])
_G7_WEIGHTS = np.array([
    0.0, 0.0,
    0.129484966168870, 0.129484966168870,
    0.0, 0.0,
    0.279705391489277, 0.279705391489277,
    0.0, 0.0,
    0.381830050505119, 0.381830050505119,
    0.0, 0.0,
    0.417959183673469,
])


def _gk15(f, a: float, b: float):
    """One Gauss-Kronrod panel; returns (K15 value, conservative error)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _GK_NODES
    y = np.array([float(f(t)) for t in x])
    k15 = half * float(_K15_WEIGHTS @ y)
    g7 = half * float(_G7_WEIGHTS @ y)
    return k15, abs(k15 - g7)


def _adaptive_pieces(pieces, cfg: QuadratureConfig):
    """Adaptive subdivision over a shared pool of (func, lo, hi) pieces."""
    panels = []
    for func, lo, hi in pieces:
        if hi > lo:
            v, e = _gk15(func, lo, hi)
            panels.append([func, lo, hi, v, e])
    splits = 0
    while True:
        total = math.fsum(p[3] for p in panels)
        err = math.fsum(p[4] for p in panels)
        if err <= max(cfg.abs_tol, cfg.rel_tol * abs(total)):
            return total, err
        if splits >= cfg.max_subdivisions:
            raise QuadratureError(
                f"quadrature did not converge after {splits} subdivisions "
                f"(value={total!r}, error~{err:.3e})",
                value=total, error_estimate=err)
        worst = max(range(len(panels)), key=lambda i: panels[i][4])
        func, lo, hi, _, _ = panels[worst]
        mid = 0.5 * (lo + hi)
        vl, el = _gk15(func, lo, mid)
        vr, er = _gk15(func, mid, hi)
        panels[worst] = [func, lo, mid, vl, el]
        panels.append([func, mid, hi, vr, er])
        splits += 1


def integrate_1d(f: Callable[[float], float], a: float, b: float,
                 cfg: QuadratureConfig | None = None) -> float:
    """Integrate f over [a, b]; b may be math.inf.

    With ``singularity_substitution = ALGEBRAIC_ENDPOINT`` the left endpoint
    is mapped by x = a + t^2 (regularises sqrt(x-a)-type singularities), and
    an infinite tail is mapped by x = 1/u^2, which also regularises
    integrands decaying like x^(-3/2).  Gauss-Kronrod nodes are interior, so
    f is never evaluated at a singular endpoint.
    """
    cfg = cfg or QuadratureConfig()
    if a == b:
        return 0.0
    if not (b > a):
        raise ValueError("integration bounds require b > a")
    algebraic = cfg.singularity_substitution is Singularity.ALGEBRAIC_ENDPOINT

    pieces = []
    if math.isinf(b):
        split = max(a + 1.0, 1.0)  # tail inversion needs a positive split
        if algebraic:
            pieces.append((lambda t: 2.0 * t * f(a + t * t),
                           0.0, math.sqrt(split - a)))
            pieces.append((lambda u: 2.0 * f(1.0 / (u * u)) / u ** 3,
                           0.0, 1.0 / math.sqrt(split)))
        else:
            pieces.append((f, a, split))
            pieces.append((lambda u: f(1.0 / u) / (u * u), 0.0, 1.0 / split))
    else:
        if algebraic:
            pieces.append((lambda t: 2.0 * t * f(a + t * t),
                           0.0, math.sqrt(b - a)))
        else:
            pieces.append((f, a, b))

    value, _ = _adaptive_pieces(pieces, cfg)
    return value


# ---------------------------------------------------------------------------
# 2D quadrature
# ---------------------------------------------------------------------------

def _eval_plane(g, z: np.ndarray) -> np.ndarray:
    """Evaluate g on an array of complex points, broadcasting scalars."""
    vals = np.asarray(g(z), dtype=float)
    if vals.shape != z.shape:
        vals = np.broadcast_to(vals, z.shape).copy()
    return vals


def _ring_mean(g, r: float, tol: float, m_start: int = 64,
               m_max: int = 16384) -> float:
    """Mean of g on the circle |z| = r by trapezoid doubling.

    Spectrally accurate for smooth integrands; doubling stops only after two
    consecutive agreements, which guards against aliasing of near-periodic
    integrands.
    """
    m = m_start
    theta = 2.0 * math.pi * np.arange(m) / m
    prev = float(_eval_plane(g, r * np.exp(1j * theta)).mean())
    agreements = 0
    while m < m_max:
        m *= 2
        theta = 2.0 * math.pi * np.arange(m) / m
        cur = float(_eval_plane(g, r * np.exp(1j * theta)).mean())
        if abs(cur - prev) <= tol * (1.0 + abs(cur)):
            agreements += 1
            if agreements >= 2:
                return cur
        else:
            agreements = 0
        prev = cur
    return prev


def integrate_disk(g, R: float, cfg: QuadratureConfig | None = None) -> float:
    """Integrate g over the disk |z| < R via a polar product rule.

    Radial direction: adaptive Gauss-Kronrod on F(r) = 2*pi*r*mean(g on
    circle r).  Angular direction: trapezoid doubling per radius.
    """
    cfg = cfg or QuadratureConfig()
    if not (R > 0):
        raise ValueError("disk radius must be positive")
    ring_tol = max(1e-14, 0.01 * cfg.rel_tol)

    def radial(r):
        if r == 0.0:
            return 0.0
        return 2.0 * math.pi * r * _ring_mean(g, r, ring_tol)

    value, _ = _adaptive_pieces([(radial, 0.0, float(R))], cfg)
    return value


def integrate_parallelogram(g, lat, cfg: QuadratureConfig | None = None) -> float:
    """Integrate g over the fundamental cell {s*a + t*b : s, t in [0, 1)}.

    Uses a midpoint tensor rule with doubling, which is spectrally accurate
    for lattice-periodic real-analytic integrands (the intended use) and
    exact for constants.  Midpoint sampling avoids cell corners and edges,
    where periodic integrands may have removable special points.
    """
    cfg = cfg or QuadratureConfig()
    area = lat.area
    a, b = lat.omega_a, lat.omega_b

    def level(m):
        s = (np.arange(m) + 0.5) / m
        S, T = np.meshgrid(s, s, indexing="ij")
        z = S * a + T * b
        return float(_eval_plane(g, z.ravel()).mean()) * area

    m = 8
    prev = level(m)
    agreements = 0
    levels = 0
    while True:
        m *= 2
        cur = level(m)
        diff = abs(cur - prev)
        if diff <= max(cfg.abs_tol, cfg.rel_tol * abs(cur)):
            agreements += 1
            if agreements >= 2:
                return cur
        else:
            agreements = 0
        prev = cur
        levels += 1
        if m >= 8192 or levels > cfg.max_subdivisions:
            raise QuadratureError(
                f"cell quadrature did not converge (m={m}, diff~{diff:.3e})",
                value=cur, error_estimate=diff)


# ---------------------------------------------------------------------------
# Supremum search
# ---------------------------------------------------------------------------

def sup_search(g, domain: Rectangle,
               cfg: SupSearchConfig | None = None) -> SupSearchResult:
    """Deterministic multi-start supremum search on a closed rectangle.

    Stage one samples cell centres of a uniform grid plus one seeded
    stratified point per cell; stage two refines around the best `restarts`
    cells, shrinking the search box by `shrink_factor` per level.  The
    returned value is the maximum of g over all sampled points, hence a
    lower bound on the true supremum; `spacing` is the final local grid
    spacing around the reported argmax.
    """
    cfg = cfg or SupSearchConfig()
    rng = np.random.default_rng(cfg.seed)
    n = cfg.initial_grid
    wx = (domain.x1 - domain.x0) / n
    wy = (domain.y1 - domain.y0) / n

    cx = domain.x0 + (np.arange(n) + 0.5) * wx
    cy = domain.y0 + (np.arange(n) + 0.5) * wy
    X, Y = np.meshgrid(cx, cy, indexing="ij")
    centers = (X + 1j * Y).ravel()
    jitter = (rng.random((2, centers.size)) - 0.5)
    jittered = centers + jitter[0] * wx + 1j * jitter[1] * wy

    pts = np.concatenate([centers, jittered])
    vals = _eval_plane(g, pts)

    order = np.argsort(-vals, kind="stable")
    seeds = []
    seen_cells = set()
    for idx in order:
        cell = int(idx) % centers.size
        if cell in seen_cells:
            continue
        seen_cells.add(cell)
        seeds.append((float(vals[idx]), complex(pts[idx])))
        if len(seeds) >= cfg.restarts:
            break

    best_val = max(v for v, _ in seeds)
    best_pt = [p for v, p in seeds if v == best_val][0]
    local = 7  # local refinement grid per axis
    final_spacing = max(wx, wy)

    for _, seed_pt in seeds:
        hx, hy = wx, wy
        center = seed_pt
        for _ in range(cfg.refinement_levels):
            gx = np.clip(np.linspace(center.real - hx, center.real + hx, local),
                         domain.x0, domain.x1)
            gy = np.clip(np.linspace(center.imag - hy, center.imag + hy, local),
                         domain.y0, domain.y1)
            GX, GY = np.meshgrid(gx, gy, indexing="ij")
            pts = (GX + 1j * GY).ravel()
            lv = _eval_plane(g, pts)
            k = int(np.argmax(lv))
            if lv[k] > best_val:
                best_val = float(lv[k])
                best_pt = complex(pts[k])
            center = complex(pts[k])
            hx *= cfg.shrink_factor
            hy *= cfg.shrink_factor
        final_spacing = min(final_spacing, 2.0 * max(hx, hy) / (local - 1))

    return SupSearchResult(value=best_val, argmax=best_pt, spacing=final_spacing)
