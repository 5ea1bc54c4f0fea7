"""meandim-lab: desk-scale verification toolkit.

Library surface: elliptic extremal Brody curve construction and evaluation,
Nevanlinna characteristic and mean-energy machinery, exact minimal-
multiplicity cover search for width-dimension bounds, and the Helmholtz
barrier with a finite-difference maximum-principle demonstrator.  The CLI
front end lives in `meandim_lab.cli`.
"""

from .elliptic import (BRODY_K, E1, E2, E3, ConstructionError,
                       ExtremalBrodyCurve, Lattice, LatticeError, PoleError,
                       WeierstrassP, build_extremal_curve, curve_eval,
                       lattice_area, reduce_to_fundamental,
                       spherical_derivative, wp_eval)
from .helmholtz import (ConvergenceError, GridProblem, HelmholtzSolution,
                        barrier_solve, helmholtz_residual, make_grid_problem,
                        max_principle_check, w_eval)
from .nevanlinna import (BrodyResult, CharacteristicProfile, CurveHandle,
                         DiskRegion, brody_check, characteristic,
                         constant_curve, energy_integral, extremal_handle,
                         mean_energy_limit_estimate, mean_energy_periodic,
                         rescaled_handle)
from .numerics import (QuadratureConfig, QuadratureError, Rectangle,
                       Singularity, SupSearchConfig, SupSearchResult,
                       integrate_1d, integrate_disk, integrate_parallelogram,
                       sup_search)
from .widim import (CoverInstance, CoverSizeError, CoverSolution,
                    WindowSystem, brick_cover, mean_dim_slope,
                    meandim_lattice_to_plane, min_multiplicity_cover,
                    residual_fixedpoint_dim, riemann_roch_dim,
                    theorem1_bounds, window_instance)

__version__ = "0.1.0"
