"""Energy integrals, the Shimizu-Ahlfors characteristic, and mean energy.

A curve enters this module only through its energy density |df|^2, exposed
by a CurveHandle, so constant curves, the extremal elliptic curve, and its
rescalings f(cz) all share the same operations.

    A(t)   = integral of |df|^2 over the disk |z| < t
    T(r)   = integral_1^r A(t)/t dt            (characteristic; <= pi r^2/2
                                                whenever |df| <= 1)
    e      = lim sup 2 T(r) / (pi r^2)         (mean energy)

For a lattice-periodic curve the mean energy equals the cell energy divided
by the cell area, which is the quantity mean_energy_periodic computes; the
profile-based estimator is a finite-radius surrogate for the lim sup and is
labelled as such in reports.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import PchipInterpolator

from .elliptic import ExtremalBrodyCurve, Lattice
from .numerics import (QuadratureConfig, Rectangle, SupSearchConfig,
                       integrate_disk, integrate_parallelogram, sup_search,
                       worker_count)

__all__ = [
    "CurveHandle",
    "DiskRegion",
    "CharacteristicProfile",
    "BrodyResult",
    "constant_curve",
    "extremal_handle",
    "rescaled_handle",
    "energy_integral",
    "characteristic",
    "mean_energy_periodic",
    "mean_energy_limit_estimate",
    "brody_check",
]


@dataclass(frozen=True)
class CurveHandle:
    """Evaluator of |df|^2, plus optional period lattice and feature scale."""

    density: Callable
    lattice: Lattice | None = None
    angular_scale: float | None = None
    label: str = "curve"


@dataclass(frozen=True)
class DiskRegion:
    radius: float

    def __post_init__(self):
        if not (self.radius > 0):
            raise ValueError("disk radius must be positive")


def constant_curve(lattice: Lattice | None = None) -> CurveHandle:
    """Zero-energy curve; any lattice is a period lattice for it."""
    return CurveHandle(density=lambda z: np.zeros(np.shape(z), dtype=float),
                       lattice=lattice, label="constant")


def extremal_handle(curve: ExtremalBrodyCurve) -> CurveHandle:
    return CurveHandle(density=curve.density, lattice=curve.lattice,
                       angular_scale=2.0 * curve.omega1, label="extremal")


def rescaled_handle(base: CurveHandle, c: float) -> CurveHandle:
    """Handle for g(z) = f(c z): |dg|^2(z) = c^2 |df|^2(c z)."""
    if not (c > 0):
        raise ValueError("rescaling factor must be positive")
    lat = None
    if base.lattice is not None:
        lat = Lattice(base.lattice.omega_a / c, base.lattice.omega_b / c)
    scale = None if base.angular_scale is None else base.angular_scale / c
    c2 = c * c

    def density(z):
        return c2 * np.asarray(base.density(np.asarray(z, dtype=complex) * c),
                               dtype=float)

    return CurveHandle(density=density, lattice=lat, angular_scale=scale,
                       label=f"{base.label}(c={c:g})")


@dataclass(frozen=True)
class CharacteristicProfile:
    """Sampled rows (r, T(r), 2T/(pi r^2)) with r strictly increasing."""

    rows: tuple

    def __post_init__(self):
        rs = [row[0] for row in self.rows]
        ts = [row[1] for row in self.rows]
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise ValueError("profile radii must be strictly increasing")
        if any(b < a - 1e-12 for a, b in zip(ts, ts[1:])):
            raise ValueError("characteristic must be non-decreasing")

    @property
    def radii(self):
        return np.array([row[0] for row in self.rows])

    @property
    def characteristic_values(self):
        return np.array([row[1] for row in self.rows])

    @property
    def ratios(self):
        return np.array([row[2] for row in self.rows])


@dataclass(frozen=True)
class BrodyResult:
    ok: bool
    sup_found: float
    argmax: complex


def energy_integral(handle: CurveHandle, region,
                    cfg: QuadratureConfig | None = None) -> float:
    """Integral of |df|^2 over a disk or a lattice fundamental cell."""
    if isinstance(region, DiskRegion):
        return integrate_disk(handle.density, region.radius, cfg)
    if isinstance(region, Lattice):
        return integrate_parallelogram(handle.density, region, cfg)
    raise TypeError("region must be a DiskRegion or a Lattice")


def _ring_point_count(r: float, scale: float | None) -> int:
    if scale is None or r == 0.0:
        return 64
    per = 2.0 * math.pi * r / scale
    m = max(64.0, 16.0 * per)
    return int(min(4096, 2 ** math.ceil(math.log2(m))))


def _ring_energy(handle: CurveHandle, radii: np.ndarray) -> np.ndarray:
    """F(r) = 2*pi*r * mean(|df|^2 on circle r), one value per radius."""
    out = np.zeros(radii.shape)

    def work(chunk):
        lo, hi = chunk
        vals = np.zeros(hi - lo)
        for i in range(lo, hi):
            r = radii[i]
            if r == 0.0:
                continue
            m = _ring_point_count(r, handle.angular_scale)
            theta = 2.0 * math.pi * np.arange(m) / m
            ring = np.asarray(handle.density(r * np.exp(1j * theta)),
                              dtype=float)
            vals[i - lo] = 2.0 * math.pi * r * float(ring.mean())
        return lo, vals

    chunks = [(lo, min(lo + 64, radii.size))
              for lo in range(0, radii.size, 64)]
    n_workers = worker_count()
    if n_workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            for lo, vals in pool.map(work, chunks):
                out[lo:lo + vals.size] = vals
    else:
        for chunk in chunks:
            lo, vals = work(chunk)
            out[lo:lo + vals.size] = vals
    return out


def characteristic(handle: CurveHandle, r_max: float, samples: int,
                   cfg: QuadratureConfig | None = None) -> CharacteristicProfile:
    """Characteristic profile on geometrically spaced radii in [1, r_max].

    The disk energy A(t) is accumulated once on a fixed fine radial grid
    (cumulative Simpson of the ring energy), then T(r) = integral_1^r A/t dt
    is accumulated on the same grid and read off through a monotone
    interpolant.  This avoids a fresh 2D quadrature per row.
    """
    if not (r_max > 1.0):
        raise ValueError("r_max must exceed 1")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    step = 1.0 / 48.0
    n = int(math.floor(r_max / step + 1e-12))
    grid = np.arange(n + 1) * step
    if grid[-1] < r_max - 1e-12:
        grid = np.append(grid, r_max)

    ring = _ring_energy(handle, grid)
    disk_energy = cumulative_simpson(ring, x=grid, initial=0.0)
    i1 = int(np.argmin(np.abs(grid - 1.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.where(grid > 0, disk_energy / np.maximum(grid, 1e-300),
                             0.0)
    t_grid = cumulative_simpson(integrand, x=grid, initial=0.0)
    t_grid = t_grid - t_grid[i1]

    t_of_r = PchipInterpolator(grid[i1:], np.maximum.accumulate(t_grid[i1:]))
    radii = np.exp(np.linspace(0.0, math.log(r_max), samples))
    radii[0], radii[-1] = 1.0, r_max
    rows = []
    for r in radii:
        t_val = float(t_of_r(r)) if r > 1.0 else 0.0
        t_val = max(t_val, 0.0)
        rows.append((float(r), t_val, 2.0 * t_val / (math.pi * r * r)))
    return CharacteristicProfile(rows=tuple(rows))


def mean_energy_periodic(handle: CurveHandle,
                         cfg: QuadratureConfig | None = None) -> float:
    """Cell energy divided by cell area, for a lattice-periodic curve."""
    if handle.lattice is None:
        raise ValueError("mean_energy_periodic requires a periodic curve")
    cell = integrate_parallelogram(handle.density, handle.lattice, cfg)
    return cell / handle.lattice.area


def mean_energy_limit_estimate(profile: CharacteristicProfile):
    """(estimate, uncertainty) from the profile tail.

    The estimate is the ratio at the largest radius; the uncertainty is the
    spread of ratios over the top quartile of radii.  A finite computation
    cannot certify a lim sup, so for non-periodic curves this is a labelled
    heuristic; for periodic curves the limit exists and the estimator is
    consistent.
    """
    if len(profile.rows) < 4:
        raise ValueError("need at least 4 profile rows")
    ratios = profile.ratios
    k = max(1, len(ratios) // 4)
    tail = ratios[-k:]
    return float(ratios[-1]), float(tail.max() - tail.min())


def brody_check(handle: CurveHandle, domain: Rectangle,
                cfg: SupSearchConfig | None = None) -> BrodyResult:
    """ok iff the sampled sup of |df| over the domain is <= 1 + 1e-6."""
    def g(z):
        return np.sqrt(np.asarray(handle.density(z), dtype=float))

    res = sup_search(g, domain, cfg)
    return BrodyResult(ok=res.value <= 1.0 + 1e-6, sup_found=res.value,
                       argmax=res.argmax)
