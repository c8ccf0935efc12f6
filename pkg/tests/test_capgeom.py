from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypershadow.capgeom import (
    BallArrangement,
    CapSpec,
    adjacent_vertex_cosine,
    beta_tail_bound,
    cap_area,
    cap_convert,
    disjoint_union_fraction,
    log_sphere_area,
    shadow_half_angle,
    single_shadow_fraction,
    sphere_area,
    steele_inner_radius,
)
from hypershadow.errors import DomainError
from hypershadow.specfun import reg_inc_beta


class TestSphere:
    @pytest.mark.parametrize(
        "n, R, expected",
        [(2, 1.0, 2 * math.pi), (3, 1.0, 4 * math.pi), (4, 2.0, 2 * math.pi**2 * 8)],
    )
    def test_known_areas(self, n, R, expected):
        assert sphere_area(n, R) == pytest.approx(expected, rel=1e-14)

    def test_four_dim_value(self):
        assert sphere_area(4, 2.0) == pytest.approx(157.9137, abs=1e-4)

    @pytest.mark.parametrize("n", [2, 5, 17, 100, 1000])
    def test_log_area_against_mpmath(self, n):
        ref = mp.log(2 * mp.pi ** (mp.mpf(n) / 2) / mp.gamma(mp.mpf(n) / 2))
        assert log_sphere_area(n) == pytest.approx(float(ref), rel=1e-13, abs=1e-13)

    def test_overflow_reported(self):
        with pytest.raises(OverflowError):
            sphere_area(3, 1e200)

    @pytest.mark.parametrize("n, R", [(1, 1.0), (3, 0.0), (3, -1.0), (2.5, 1.0)])
    def test_domain(self, n, R):
        with pytest.raises(DomainError):
            sphere_area(n, R)


class TestCaps:
    @pytest.mark.parametrize(
        "theta, R, eps, chord",
        [(math.pi / 3, 1.0, 0.5, 1.0), (0.0, 2.5, 2.5, 0.0), (math.pi / 2, 3.0, 0.0, 3.0 * math.sqrt(2))],
    )
    def test_convert(self, theta, R, eps, chord):
        e, c = cap_convert(theta, R)
        assert e == pytest.approx(eps, abs=1e-15)
        assert c == pytest.approx(chord, rel=1e-15)

    @given(st.floats(min_value=0.0, max_value=math.pi / 2), st.floats(min_value=1e-3, max_value=1e3))
    def test_three_descriptions_agree(self, theta, R):
        spec = CapSpec(4, R, theta)
        assert math.acos(min(1.0, spec.epsilon / R)) == pytest.approx(theta, abs=1e-7)
        assert CapSpec.from_chord(4, R, spec.chord).theta == pytest.approx(theta, abs=1e-12)
        assert CapSpec.from_epsilon(4, R, spec.epsilon).theta == pytest.approx(theta, abs=1e-7)

    @pytest.mark.parametrize("theta", [-0.1, math.pi / 2 + 1e-9, math.nan])
    def test_convert_domain(self, theta):
        with pytest.raises(DomainError):
            cap_convert(theta, 1.0)

    @pytest.mark.parametrize("n", range(2, 31))
    def test_hemisphere_is_half(self, n):
        spec = CapSpec(n, 1.7, math.pi / 2)
        assert cap_area(spec) / sphere_area(n, 1.7) == pytest.approx(0.5, abs=1e-12)

    def test_empty_cap(self):
        assert cap_area(CapSpec(5, 1.0, 0.0)) == 0.0

    def test_three_dim_example(self):
        assert cap_area(CapSpec(3, 1.0, math.pi / 3)) == pytest.approx(math.pi, rel=1e-13)

    @pytest.mark.parametrize("theta", np.linspace(0.0, math.pi / 2, 41).tolist())
    def test_zone_formula(self, theta):
        R = 1.3
        zone = 2 * math.pi * R * R * (1 - math.cos(theta))
        assert cap_area(CapSpec(3, R, theta)) == pytest.approx(zone, abs=1e-10)


class TestShadow:
    def test_three_dim_unit_ball(self):
        exact = 0.5 * (1 - math.sqrt(2 / 3))
        assert single_shadow_fraction(3, 1.0) == pytest.approx(exact, abs=1e-15)
        assert single_shadow_fraction(3, 1.0) == pytest.approx(0.0917517, abs=1e-7)

    @pytest.mark.parametrize("n", [2, 3, 10, 400])
    def test_extremes(self, n):
        assert single_shadow_fraction(n, 0.0) == 0.0
        assert single_shadow_fraction(n, math.sqrt(n)) == 0.5

    def test_half_angle(self):
        assert shadow_half_angle(3, 1.0) == pytest.approx(math.asin(1 / math.sqrt(3)), rel=1e-15)

    def test_uses_squared_radius(self):
        # sin^2 of the tangent-cone half-angle is r^2 / n
        n, r = 7, 1.8
        assert single_shadow_fraction(n, r) == pytest.approx(
            0.5 * reg_inc_beta(r * r / n, 3.0, 0.5), rel=1e-15)
        theta = shadow_half_angle(n, r)
        assert single_shadow_fraction(n, r) == pytest.approx(CapSpec(n, 1.0, theta).area_fraction(), rel=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 8, 50, 1000])
    def test_monotone_in_r(self, n):
        values = [single_shadow_fraction(n, r) for r in np.linspace(0.0, math.sqrt(n), 300)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("r", [-0.1, 10.0, math.inf])
    def test_radius_domain(self, r):
        with pytest.raises(DomainError):
            single_shadow_fraction(4, r)

    def test_union_three_dim(self):
        assert disjoint_union_fraction(3, 1.0) == pytest.approx(4 * (1 - math.sqrt(2 / 3)), abs=1e-12)
        # the four-significant-figure value; 4 (1 - sqrt(2/3)) = 0.73401368...
        assert disjoint_union_fraction(3, 1.0) == pytest.approx(0.7340, abs=5e-5)

    def test_union_plane_is_total(self):
        assert disjoint_union_fraction(2, 1.0) == pytest.approx(1.0, abs=1e-10)

    def test_union_zero_and_overlap_rejected(self):
        assert disjoint_union_fraction(9, 0.0) == 0.0
        with pytest.raises(DomainError):
            disjoint_union_fraction(4, 1.01)

    def test_union_vanishes(self):
        assert disjoint_union_fraction(40, 1.0) < 1e-6
        values = [disjoint_union_fraction(n, 1.0) for n in range(3, 60)]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_arrangement(self):
        arr = BallArrangement(3, 1.0)
        assert arr.shadows_disjoint
        assert arr.union_fraction() == disjoint_union_fraction(3, 1.0)
        assert not BallArrangement(3, 1.5).shadows_disjoint
        with pytest.raises(DomainError):
            BallArrangement(3, 2.0)


class TestTailBound:
    def test_worked_example(self):
        assert beta_tail_bound(3, 1 / 3) == pytest.approx(1 / (math.sqrt(math.pi) * 3), rel=1e-15)
        assert beta_tail_bound(3, 1 / 3) == pytest.approx(0.1880632, abs=1e-7)
        assert beta_tail_bound(3, 1 / 3) >= reg_inc_beta(1 / 3, 1.0, 0.5)

    def test_zero(self):
        assert beta_tail_bound(12, 0.0) == 0.0

    @pytest.mark.parametrize("n", range(3, 41))
    def test_shadow_bound_at_unit_radius(self, n):
        assert single_shadow_fraction(n, 1.0) <= (1 / (2 * math.sqrt(math.pi))) * (1 / n) ** ((n - 1) / 2)

    def test_dominates_where_provable(self):
        # (1-u)^(-1/2) <= (1-z)^(-1/2) on [0, z] and Gamma(a+1/2)/Gamma(a+1) < a^(-1/2) give
        # F <= z^a / sqrt(pi a (1-z)), which is at most the bound once a (1-z) >= 1
        for n in range(4, 51):
            a = 0.5 * (n - 1)
            for z in np.linspace(0.01, 1.0 - 1.0 / a, 60):
                assert beta_tail_bound(n, z) >= reg_inc_beta(z, a, 0.5)

    def test_domain(self):
        with pytest.raises(DomainError):
            beta_tail_bound(2, 0.5)
        with pytest.raises(DomainError):
            beta_tail_bound(5, 1.5)


class TestAdjacentAndSteele:
    @pytest.mark.parametrize("n", [2, 3, 4, 10, 100])
    def test_adjacent_cosine_and_tangency(self, n):
        u = np.ones(n)
        v = np.ones(n)
        v[0] = -1.0
        assert adjacent_vertex_cosine(n) == pytest.approx(u @ v / n, abs=1e-15)
        # unit-radius shadows of neighbouring vertices touch: twice the half-angle is the centre angle
        centre_angle = math.acos(adjacent_vertex_cosine(n))
        assert 2 * shadow_half_angle(n, 1.0) == pytest.approx(centre_angle, abs=1e-12)
        eps, chord = cap_convert(shadow_half_angle(n, 1.0), 1.0)
        assert 2 * eps * eps - 1 == pytest.approx(adjacent_vertex_cosine(n), abs=1e-12)
        assert chord > 0

    @pytest.mark.parametrize("n, radius, escapes", [(4, 1.0, False), (9, 2.0, False), (16, 3.0, True), (100, 9.0, True)])
    def test_steele(self, n, radius, escapes):
        assert steele_inner_radius(n) == (pytest.approx(radius, abs=1e-15), escapes)

    def test_steele_threshold(self):
        assert [n for n in range(2, 13) if steele_inner_radius(n)[1]] == [10, 11, 12]
