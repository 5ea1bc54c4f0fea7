import itertools
import json
import math

import pytest

from meandim_lab.elliptic import Lattice
from meandim_lab.widim import (CoverInstance, CoverSizeError, WindowSystem,
                               brick_cover, cover_multiplicity,
                               covers_universe, mean_dim_slope,
                               meandim_lattice_to_plane,
                               min_multiplicity_cover, residual_fixedpoint_dim,
                               riemann_roch_dim, theorem1_bounds,
                               window_instance)

MEAN_ENERGY = 0.6150198678198


def brute_force_min_multiplicity(inst):
    """Independent oracle: enumerate every candidate subset."""
    cand = inst.candidate_boxes()
    best = None
    for r in range(1, len(cand) + 1):
        for combo in itertools.combinations(cand, r):
            if covers_universe(combo, inst):
                m = cover_multiplicity(combo, inst)
                if best is None or m < best:
                    best = m
        if best is not None and best <= r:
            # multiplicity >= 1 always; cannot improve below 1
            if best == 1:
                break
    return best


class TestExactSearch:
    def test_segment_needs_overlap(self):
        inst = CoverInstance(1, 4, 2)
        sol = min_multiplicity_cover(inst)
        assert sol.multiplicity == 2 and sol.widim_bound == 1
        assert sol.minimal
        assert covers_universe(sol.boxes, inst)

    def test_segment_against_brute_force(self):
        inst = CoverInstance(1, 4, 2)
        assert len(inst.candidate_boxes()) == 7
        assert brute_force_min_multiplicity(inst) == 2

    def test_single_box_instance(self):
        sol = min_multiplicity_cover(CoverInstance(1, 1, 1))
        assert sol.multiplicity == 1 and sol.widim_bound == 0

    def test_square_covered_by_itself(self):
        # s = N: one box equals the universe; brute force agrees.
        inst = CoverInstance(2, 2, 2)
        assert min_multiplicity_cover(inst).multiplicity == 1
        assert brute_force_min_multiplicity(inst) == 1

    def test_planar_lebesgue_value(self):
        inst = CoverInstance(2, 3, 2)
        assert len(inst.candidate_boxes()) == 25
        sol = min_multiplicity_cover(inst)
        assert sol.multiplicity == 3 and sol.widim_bound == 2

    def test_never_disjoint_for_small_mesh(self):
        # Closed boxes of side < N can never partition the cube.
        for d, n, s in ((1, 3, 2), (1, 4, 2), (2, 3, 2)):
            assert min_multiplicity_cover(CoverInstance(d, n, s)).multiplicity >= 2

    def test_monotone_in_mesh(self):
        loose = min_multiplicity_cover(CoverInstance(1, 4, 2)).multiplicity
        tight = min_multiplicity_cover(CoverInstance(1, 4, 1)).multiplicity
        assert loose <= tight
        assert min_multiplicity_cover(CoverInstance(2, 2, 2)).multiplicity \
            <= min_multiplicity_cover(CoverInstance(2, 2, 1)).multiplicity

    def test_size_limit(self):
        with pytest.raises(CoverSizeError):
            min_multiplicity_cover(CoverInstance(1, 12, 6))

    def test_union_instance_exact(self):
        # Two components sharing the origin corner: a segment and a square.
        inst = CoverInstance(2, 4, 2, components=(
            ((0, 4), (0, 0)), ((0, 2), (0, 2))))
        sol = min_multiplicity_cover(inst)
        assert covers_universe(sol.boxes, inst)
        assert sol.multiplicity == 2

    def test_deterministic(self):
        a = min_multiplicity_cover(CoverInstance(2, 3, 2))
        b = min_multiplicity_cover(CoverInstance(2, 3, 2))
        assert a.boxes == b.boxes

    def test_json_serialisation(self):
        inst = CoverInstance(1, 4, 2)
        sol = min_multiplicity_cover(inst)
        doc = json.loads(sol.to_json(inst))
        assert doc["d"] == 1 and doc["N"] == 4 and doc["s"] == 2
        assert doc["multiplicity"] == 2
        assert all(len(iv) == 2 for box in doc["boxes"] for iv in box)

    def test_instance_validation(self):
        with pytest.raises(ValueError):
            CoverInstance(0, 3, 2)
        with pytest.raises(ValueError):
            CoverInstance(1, 3, 4)
        with pytest.raises(ValueError):
            CoverInstance(2, 3, 2, components=(((0, 5), (0, 0)),))


class TestBrickCover:
    @pytest.mark.parametrize("d,n,s", [(1, 6, 2), (2, 6, 2), (3, 4, 2)])
    def test_multiplicity_is_dim_plus_one(self, d, n, s):
        sol = brick_cover(d, n, s)
        inst = CoverInstance(d, n, s)
        assert covers_universe(sol.boxes, inst)
        assert cover_multiplicity(sol.boxes, inst) == d + 1
        assert sol.multiplicity == d + 1

    @pytest.mark.parametrize("d,n,s", [(1, 9, 3), (2, 7, 3), (2, 9, 4),
                                       (3, 6, 3), (3, 9, 4), (3, 13, 6)])
    def test_other_geometries(self, d, n, s):
        assert brick_cover(d, n, s).multiplicity == d + 1

    def test_never_below_exact_minimum(self):
        for d, n, s in ((1, 4, 2), (2, 3, 2)):
            exact = min_multiplicity_cover(CoverInstance(d, n, s))
            assert brick_cover(d, n, s).multiplicity >= exact.multiplicity

    def test_degenerate_side_raises(self):
        with pytest.raises(ValueError):
            brick_cover(1, 4, 1)

    def test_mesh_must_be_small(self):
        with pytest.raises(ValueError):
            brick_cover(1, 2, 2)

    def test_unsupported_3d_geometry(self):
        with pytest.raises(ValueError):
            brick_cover(3, 7, 3)  # neither pinwheel (N=2s) nor even wall

    def test_dim_four_unsupported(self):
        with pytest.raises(ValueError):
            brick_cover(4, 8, 4)


class TestWindows:
    def test_full_shift_unfolds_to_cube(self):
        sys_ = WindowSystem("full_shift", window=2, shift_dim=1)
        inst = window_instance(sys_, eps_cells=2, extent=3)
        assert inst.dimension == 2 and inst.extent == 3 and inst.max_side == 2
        assert inst.components is None

    def test_residual_single_window(self):
        inst = window_instance(WindowSystem("residual", 1), 2, 4)
        assert inst.components == (((0, 4),),)

    def test_residual_components_shrink(self):
        inst = window_instance(WindowSystem("residual", 4), 6, 12)
        sides = [comp[m - 1][1] for m, comp in enumerate(inst.components, 1)]
        assert sides == [12, 6, 4, 3]
        # period >= 2 components fit in one admissible box at eps = 1/2
        assert all(s <= 6 for s in sides[1:])

    def test_validation(self):
        with pytest.raises(ValueError):
            WindowSystem("diagonal", 1)
        with pytest.raises(ValueError):
            WindowSystem("residual", 0)
        with pytest.raises(ValueError):
            window_instance(WindowSystem("residual", 1), 0, 4)


class TestMeanDimSlope:
    def test_full_shift_ratios_are_one(self):
        rows = mean_dim_slope(WindowSystem("full_shift", 1), 2, 3, [1, 2])
        assert [r.ratio for r in rows] == [1.0, 1.0]
        assert all(r.minimal for r in rows)

    def test_residual_ratios_decay(self):
        rows = mean_dim_slope(WindowSystem("residual", 1), 6, 12,
                              [1, 2, 3, 4])
        ratios = [r.ratio for r in rows]
        assert all(b <= a + 1e-12 for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] <= 0.5
        assert max(r.widim_bound for r in rows) <= 2  # bounded by a constant

    def test_empty_window_list(self):
        assert mean_dim_slope(WindowSystem("residual", 1), 6, 12, []) == []


class TestFormulas:
    def test_residual_fixedpoint_dims(self):
        for n in range(1, 8):
            assert residual_fixedpoint_dim(n) == n
        with pytest.raises(ValueError):
            residual_fixedpoint_dim(0)

    def test_riemann_roch(self):
        assert riemann_roch_dim(1, 2, 1) == 8
        assert riemann_roch_dim(5, 3, 0) == 0
        assert riemann_roch_dim(2, 3, 2) == 72
        assert riemann_roch_dim(1, 2, 3) == 72  # 2 * 9 * 2 * 2
        with pytest.raises(ValueError):
            riemann_roch_dim(0, 2, 1)
        with pytest.raises(ValueError):
            riemann_roch_dim(1, 2, -1)

    def test_theorem_bounds(self):
        lower, upper = theorem1_bounds(1, MEAN_ENERGY, 1.0)
        assert lower == pytest.approx(2.460079471279, abs=4e-6)
        assert theorem1_bounds(1, 0.0, 0.0) == (0.0, 0.0)
        assert theorem1_bounds(3, 0.5, 0.5) == (4.0, 6.0)
        with pytest.raises(ValueError):
            theorem1_bounds(1, 0.8, 0.5)
        with pytest.raises(ValueError):
            theorem1_bounds(1, -0.1, 0.5)

    def test_lattice_to_plane(self, curve):
        assert meandim_lattice_to_plane(4.0, Lattice(1.0, 1j)) == 4.0
        assert meandim_lattice_to_plane(0.0, curve.lattice) == 0.0
        # 2 (N+1) deg / |cell| = 2 (N+1) e for the extremal curve (N=1,
        # deg=2).
        val = meandim_lattice_to_plane(8.0, curve.lattice)
        assert val == pytest.approx(4.0 * MEAN_ENERGY, abs=4e-6)
