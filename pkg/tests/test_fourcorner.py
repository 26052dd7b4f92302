"""The 4-corner self-affine system: conditions, coordinate entropies,
the four-case measure dimension, the natural weights, and rendering."""

import math
import os

import numpy as np
import pytest

from cfsdim import (ConditionsNotMet, FourCornerProb, FourCornerSystem,
                    chis, measure_dimension_4c, natural_p, phi_series,
                    phi_xy, set_dimension_4c, suff_check, validate_4c)
from cfsdim.fourcorner import (chaos_game_points, render_attractor_ppm,
                               render_cylinders_svg, _cylinders)

# Frozen root of sum gamma_i * lambda_i^{s-1} = 1 at the reference
# parameters, from the bisection oracle at tol 1e-14.
S_STAR = 1.64301670663502


@pytest.fixture
def quarters():
    return FourCornerSystem([[0.25, 0.25], [0.25, 0.25]],
                            [[0.25, 0.25], [0.25, 0.25]])


class TestValidate:
    def test_reference_point_passes(self, four_corner_main):
        rep = validate_4c(four_corner_main)
        assert rep["open_set_ok"]
        assert rep["domination_ok"]

    def test_oversized_ratios_fail(self):
        sys = FourCornerSystem([[0.6] * 2] * 2, [[0.6] * 2] * 2)
        rep = validate_4c(sys)
        assert not rep["open_set_ok"]

    def test_symmetric_quarters_ok(self, quarters):
        rep = validate_4c(quarters)
        assert rep["open_set_ok"]


class TestChis:
    def test_all_half(self):
        sys = FourCornerSystem([[0.5, 0.5], [0.5, 0.5]],
                               [[0.5, 0.5], [0.5, 0.5]])
        cx, cy = chis(sys, FourCornerProb.uniform())
        assert cx == pytest.approx(math.log(2))
        assert cy == pytest.approx(math.log(2))

    def test_corner_mass(self, four_corner_main):
        cx, cy = chis(four_corner_main, FourCornerProb([1, 0, 0, 0]))
        assert cx == pytest.approx(-math.log(0.8))
        assert cy == pytest.approx(-math.log(0.45))

    def test_y_pairing(self, four_corner_main):
        # p2 pairs with lambda[2][1], p3 with lambda[1][2]
        _, cy = chis(four_corner_main, FourCornerProb([0, 1, 0, 0]))
        assert cy == pytest.approx(-math.log(0.09))


class TestPhiXY:
    def _generic_phi(self, grouping):
        from cfsdim import CFSystem
        sys = CFSystem([0.0, 1.0], [[0.5, 0.5], [0.5, 0.5]])
        return phi_series(sys, grouping, tol=1e-12)

    def test_matches_generic_series(self):
        p = FourCornerProb([0.4, 0.3, 0.2, 0.1])
        vx, vy = phi_xy(p, tol=1e-12)
        gx = self._generic_phi(p.x_grouping())
        gy = self._generic_phi(p.y_grouping())
        assert vx == pytest.approx(gx.value, abs=1e-10 + gx.tail_bound)
        assert vy == pytest.approx(gy.value, abs=1e-10 + gy.tail_bound)

    def test_nonpositive(self):
        p = FourCornerProb([0.3, 0.3, 0.2, 0.2])
        vx, vy = phi_xy(p)
        assert vx <= 0.0 and vy <= 0.0

    def test_symmetric_p_symmetric_phi(self):
        p = FourCornerProb([0.25, 0.25, 0.25, 0.25])
        vx, vy = phi_xy(p)
        assert vx == pytest.approx(vy, abs=1e-14)


class TestNaturalP:
    def test_symmetric_quarters(self, quarters):
        prob, s = natural_p(quarters)
        assert s == pytest.approx(1.0, abs=1e-10)
        assert prob.p == pytest.approx((0.25,) * 4)

    def test_reference_point(self, four_corner_main):
        prob, s = natural_p(four_corner_main)
        assert s == pytest.approx(S_STAR, abs=1e-10)
        assert sum(prob.p) == pytest.approx(1.0, abs=1e-12)
        assert prob.p[0] == pytest.approx(0.478740137, abs=1e-8)
        assert prob.p[1] == pytest.approx(0.021259863, abs=1e-8)

    def test_root_satisfies_equation(self, four_corner_main):
        _, s = natural_p(four_corner_main)
        g, l = four_corner_main.gamma, four_corner_main.lam
        total = (g[0][0] * l[0][0] ** (s - 1) + g[0][1] * l[1][0] ** (s - 1)
                 + g[1][0] * l[0][1] ** (s - 1) + g[1][1] * l[1][1] ** (s - 1))
        assert total == pytest.approx(1.0, abs=1e-12)


class TestSuffCheck:
    def test_reference_point_holds(self, four_corner_main):
        value, holds = suff_check(four_corner_main)
        assert holds
        assert value == pytest.approx(0.50918, abs=1e-4)

    def test_symmetric_quarters_boundary(self, quarters):
        # every log argument is (1 - 1/4) / 1 < 1 ... evaluate and only
        # assert consistency of the flag with the sign
        value, holds = suff_check(quarters)
        assert holds == (value > 0.0)


class TestMeasureDimension4C:
    def test_reference_point_natural_p(self, four_corner_main):
        prob, s = natural_p(four_corner_main)
        rep = measure_dimension_4c(four_corner_main, prob, tol=1e-12)
        assert rep.diagnostics["case"] == "x-overflow"
        h = rep.diagnostics["entropy"]
        cx = rep.diagnostics["chi_x"]
        cy = rep.diagnostics["chi_y"]
        assert rep.raw == pytest.approx(1.0 + (h - cx) / cy, abs=1e-12)
        assert rep.raw == pytest.approx(s, abs=1e-9)

    def test_corner_mass_is_zero(self, four_corner_main):
        rep = measure_dimension_4c(four_corner_main,
                                   FourCornerProb([1, 0, 0, 0]))
        assert rep.dimension == 0.0

    def test_symmetric_boundary_case_agreement(self, quarters):
        # chi_x == chi_y: both saturating formulas must agree
        p = FourCornerProb([0.4, 0.1, 0.1, 0.4])
        rep = measure_dimension_4c(quarters, p)
        h = rep.diagnostics["entropy"]
        cx, cy = rep.diagnostics["chi_x"], rep.diagnostics["chi_y"]
        px, py = rep.diagnostics["phi_x"], rep.diagnostics["phi_y"]
        assert cx == pytest.approx(cy, abs=1e-12)
        alt = {"x-saturating": (h + py) / cy - py / cx,
               "y-saturating": (h + px) / cx - px / cy}
        case = rep.diagnostics["case"]
        if case in alt:
            assert rep.raw == pytest.approx(alt[case], abs=1e-9)

    def test_open_set_required(self):
        sys = FourCornerSystem([[0.6] * 2] * 2, [[0.6] * 2] * 2)
        with pytest.raises(ConditionsNotMet):
            measure_dimension_4c(sys, FourCornerProb.uniform())

    def test_duality_swap(self, four_corner_main):
        """Exchanging the two coordinates (gamma <-> lambda with the member
        transposition) swaps (chi_x, phi_x) and (chi_y, phi_y)."""
        g, l = four_corner_main.gamma, four_corner_main.lam
        swapped = FourCornerSystem(l, g)
        p = FourCornerProb([0.4, 0.2, 0.2, 0.2])
        # the coordinate swap permutes map roles 2 <-> 3
        q = FourCornerProb([p.p[0], p.p[2], p.p[1], p.p[3]])
        cx, cy = chis(four_corner_main, p)
        cx2, cy2 = chis(swapped, q)
        assert (cx2, cy2) == pytest.approx((cy, cx))
        vx, vy = phi_xy(p)
        vx2, vy2 = phi_xy(q)
        assert (vx2, vy2) == pytest.approx((vy, vx))


class TestSetDimension4C:
    def test_reference_point_certified(self, four_corner_main):
        rep = set_dimension_4c(four_corner_main)
        assert rep.raw == pytest.approx(S_STAR, abs=1e-10)
        assert rep.diagnostics["certified"]

    def test_symmetric_quarters(self, quarters):
        rep = set_dimension_4c(quarters)
        assert rep.raw == pytest.approx(1.0, abs=1e-10)

    def test_domination_failure_flagged(self):
        # lambda11 > gamma11 breaks domination but not the open set condition
        sys = FourCornerSystem([[0.3, 0.1], [0.1, 0.3]],
                               [[0.45, 0.09], [0.09, 0.45]])
        rep = set_dimension_4c(sys)
        assert rep.diagnostics["certified"] is False


class TestRendering:
    def test_depth_one_cylinders(self, four_corner_main):
        rects = _cylinders(four_corner_main, 1)
        assert len(rects) == 4
        assert (0.0, 0.0, 0.8, 0.45) in [tuple(round(v, 12) for v in r)
                                         for r in rects]

    def test_svg_has_four_rects(self, four_corner_main, tmp_path):
        out = str(tmp_path / "cyl.svg")
        render_cylinders_svg(four_corner_main, 1, out)
        text = open(out).read()
        assert text.count("<rect") == 5  # background + 4 cylinders
        assert text.startswith("<svg")

    def test_chaos_game_stays_inside_square(self, four_corner_main):
        pts = chaos_game_points(four_corner_main, 50_000, seed=1)
        assert pts.shape == (50_000, 2)
        assert np.all(pts >= 0.0) and np.all(pts <= 1.0)

    def test_chaos_game_deterministic(self, four_corner_main):
        a = chaos_game_points(four_corner_main, 10_000, seed=9)
        b = chaos_game_points(four_corner_main, 10_000, seed=9)
        assert np.array_equal(a, b)

    def test_weighted_chaos_game(self, four_corner_main):
        prob, _ = natural_p(four_corner_main)
        pts = chaos_game_points(four_corner_main, 10_000, seed=2,
                                weights=prob.p)
        assert np.all(pts >= 0.0) and np.all(pts <= 1.0)

    def test_ppm_header(self, four_corner_main, tmp_path):
        out = str(tmp_path / "att.ppm")
        render_attractor_ppm(four_corner_main, 20_000, 0, out, size=100)
        data = open(out, "rb").read()
        assert data.startswith(b"P6\n100 100\n255\n")
        assert len(data) == len(b"P6\n100 100\n255\n") + 100 * 100 * 3


class TestJsonDescriptor:
    def test_round_trip(self, four_corner_main):
        d = four_corner_main.to_json_dict()
        assert FourCornerSystem.from_json_dict(d) == four_corner_main
