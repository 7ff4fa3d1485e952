import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from _suite import suite
from uct.curve import (
    balance_witness,
    balanced_modification,
    build_curve,
    enumerate_nests,
    export_curve,
    is_locally_balanced,
    local_circumradius,
    min_enclosing_circle,
    nest_angles,
    nest_angles_by_window_sum,
    r_loc_star,
    sigma_U,
    sigma_Z,
    stretched_deriv_left,
    stretched_deriv_right,
    stretched_value,
    window_sum,
)
from uct.errors import NotConvex, UnknownFormat
from uct.measures import EMPTY, TWO_PI, normalize
from uct.trigfun import PiecewiseTrig, add_trig, h_from_measure, max_and_argmax, zero

SQ3 = math.sqrt(3.0)


def mec_oracle(points):
    """Minimize the largest distance numerically, from the centroid."""
    arr = np.asarray(points)
    f = lambda c: float(np.max(np.hypot(arr[:, 0] - c[0], arr[:, 1] - c[1])))  # noqa: E731
    res = minimize(f, arr.mean(axis=0), method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    return res.fun


class TestPolygon:
    def test_triangle(self, triangle):
        poly = build_curve(h_from_measure(triangle, 2))
        assert len(poly.vertices) == 3 and len(poly.edges) == 3
        assert [e.length for e in poly.edges] == pytest.approx([1.0] * 3, abs=1e-12)
        pts = poly.points
        for i in range(3):
            a, b = pts[i], pts[(i + 1) % 3]
            assert math.dist(a, b) == pytest.approx(1.0, abs=1e-12)
        # support direction turns 4 pi / 3 at each vertex
        assert [v.hi - v.lo for v in poly.vertices] == pytest.approx([4 * math.pi / 3] * 3)

    def test_rectangle(self, rectangle):
        poly = build_curve(h_from_measure(rectangle, 3))
        assert sorted(round(e.length, 12) for e in poly.edges) == pytest.approx([1, 1, SQ3, SQ3])

    def test_zero_function(self):
        poly = build_curve(zero(0.75))
        assert poly.points == [(0.0, 0.0)] and poly.edges == ()

    def test_rejects_non_convex(self, triangle):
        h = h_from_measure(triangle, 2)
        neg = PiecewiseTrig(h.order, h.breaks, tuple((-a, -b) for a, b in h.coeffs))
        with pytest.raises(NotConvex):
            build_curve(neg)

    @pytest.mark.parametrize("order, measure", suite(24, seed=3))
    def test_edge_chain_and_support(self, order, measure):
        h = h_from_measure(measure, order)
        poly = build_curve(h)
        for k, e in enumerate(poly.edges):
            end = (e.start[0] + e.length * e.direction[0], e.start[1] + e.length * e.direction[1])
            assert math.dist(end, e.end) < 1e-9
            assert e.length == pytest.approx(TWO_PI * measure.masses[k], abs=1e-9)
        for v in poly.vertices:
            for s in np.linspace(v.lo, v.hi, 5):
                assert v.x * math.cos(s) + v.y * math.sin(s) == pytest.approx(stretched_value(h, s), abs=1e-9)


class TestCircle:
    def test_trivial(self):
        assert min_enclosing_circle([(1.0, 2.0)]) == ((1.0, 2.0), 0.0)
        c, r = min_enclosing_circle([(0, 0), (1, 0)])
        assert c == (0.5, 0.0) and r == 0.5

    def test_equilateral(self):
        pts = [(math.cos(a), math.sin(a)) for a in (0, TWO_PI / 3, 2 * TWO_PI / 3)]
        pts = [(x / SQ3, y / SQ3) for x, y in pts]
        _, r = min_enclosing_circle(pts)
        assert r == pytest.approx(1 / SQ3, abs=1e-15)

    def test_obtuse_uses_diameter(self):
        c, r = min_enclosing_circle([(0, 0), (4, 0), (2, 0.5)])
        assert r == pytest.approx(2.0) and c == pytest.approx((2.0, 0.0))

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=2, max_size=9))
    def test_against_numeric_oracle(self, pts):
        c, r = min_enclosing_circle(pts)
        assert all(math.dist(c, p) <= r + 1e-9 for p in pts)
        assert r <= mec_oracle(pts) + 1e-9
        assert r >= mec_oracle(pts) - 1e-6

    def test_deterministic_under_permutation(self):
        pts = [(0, 0), (1, 0), (0, 1), (1, 1)]
        assert min_enclosing_circle(pts) == min_enclosing_circle(pts[::-1])


class TestTypes:
    def test_triangle(self, triangle):
        h = h_from_measure(triangle, 2)
        assert sigma_Z(h)[0] == pytest.approx(1 / SQ3, abs=1e-9)
        assert sigma_U(h) == pytest.approx(0.5, abs=1e-9)
        nests = enumerate_nests(h)
        assert len(nests) == 3
        assert [n.radius for n in nests] == pytest.approx([0.5] * 3, abs=1e-9)
        assert sorted(n.alpha for n in nests) == pytest.approx([math.pi, 7 * math.pi / 3, 11 * math.pi / 3])
        assert all(len(n.vertices) == 2 for n in nests)
        assert not is_locally_balanced(h).locally_balanced

    def test_rectangle(self, rectangle):
        h = h_from_measure(rectangle, 3)
        assert sigma_Z(h)[0] == pytest.approx(1.0, abs=1e-9)
        assert r_loc_star(h) == pytest.approx(SQ3 / 2, abs=1e-9)
        # the nest over (-pi, pi), i.e. alpha = pi
        n = next(n for n in enumerate_nests(h, dedupe=False) if abs(n.alpha - math.pi) < 1e-9)
        assert local_circumradius(n)[1] == pytest.approx(SQ3 / 2, abs=1e-9)
        assert not is_locally_balanced(h).locally_balanced

    def test_square_is_balanced(self, square):
        h = h_from_measure(square, 2)
        rep = is_locally_balanced(h)
        assert rep.locally_balanced and rep.witness is not None
        assert rep.sigma_U == pytest.approx(rep.sigma_Z, abs=1e-9)
        assert any(abs(n.radius - rep.sigma_Z) < 1e-9 for n in enumerate_nests(h))

    def test_zero_function(self):
        assert sigma_Z(zero(1.5)) == (0.0, (0.0, 0.0))
        assert sigma_U(zero(1.5)) == 0.0

    def test_shift_balances(self, triangle):
        h = h_from_measure(triangle, 2)
        value, shift = sigma_Z(add_trig(h, 0.4, -0.7))
        hat = add_trig(add_trig(h, 0.4, -0.7), *shift)
        assert max_and_argmax(hat).value == pytest.approx(value, abs=1e-12)
        assert np.allclose(balanced_modification(hat).coeffs, hat.coeffs, atol=1e-12)

    def test_witness_pattern(self):
        rho = 2.0
        w = balance_witness([0.0, math.pi / 2], rho)
        assert w is not None
        a, b, g = w
        assert 0 < b - a <= math.pi / rho + 1e-9 and g - a >= math.pi / rho - 1e-9
        assert balance_witness([0.0], 0.75) is None


@pytest.mark.parametrize("order, measure", suite(40, seed=17))
def test_nest_invariants(order, measure):
    h = h_from_measure(measure, order)
    nests = enumerate_nests(h)
    assert nests
    for n in nests:
        assert stretched_value(h, n.alpha - TWO_PI) == pytest.approx(stretched_value(h, n.alpha), abs=1e-9)
        assert stretched_deriv_right(h, n.alpha - TWO_PI) - stretched_deriv_left(h, n.alpha) >= -1e-9
        assert all(math.dist(n.center, p) <= n.radius + 1e-9 for p in n.vertices)
        s = window_sum(h, n.alpha)
        assert abs(s.imag) <= 1e-9 and s.real <= 1e-9
    assert sorted(nest_angles(h)) == pytest.approx(sorted(nest_angles_by_window_sum(h)), abs=1e-9)
    rep = is_locally_balanced(h)
    assert rep.sigma_U <= rep.sigma_Z + 1e-9
    assert rep.locally_balanced == (abs(rep.sigma_U - rep.sigma_Z) <= 1e-9)


class TestExport:
    def test_svg(self, triangle):
        h = h_from_measure(triangle, 2)
        poly = build_curve(h)
        circle = min_enclosing_circle(poly.points)
        svg = export_curve(poly, enumerate_nests(h), "svg", circle).decode()
        assert svg.count('class="edge"') == 3
        assert 'data-uct-version="1"' in svg
        assert svg == export_curve(poly, enumerate_nests(h), "svg", circle).decode()

    def test_csv_row_count(self, rectangle):
        poly = build_curve(h_from_measure(rectangle, 3))
        rows = export_curve(poly, fmt="csv").decode().splitlines()
        assert rows[0] == "kind,x,y,angle,length,radius"
        assert len(rows) == 1 + len(poly.vertices) + len(poly.edges)

    def test_json(self, triangle):
        import json

        poly = build_curve(h_from_measure(triangle, 2))
        obj = json.loads(export_curve(poly, fmt="json"))
        assert len(obj["vertices"]) == 3

    def test_single_point_svg(self):
        svg = export_curve(build_curve(h_from_measure(EMPTY, 0.75))).decode()
        assert "<circle" in svg

    def test_unknown(self, triangle):
        with pytest.raises(UnknownFormat):
            export_curve(build_curve(h_from_measure(triangle, 2)), fmt="png")


def test_small_rho_curve_is_square(triangle):
    h = h_from_measure(triangle, 0.75)
    poly = build_curve(h)
    assert sorted(round(e.length, 9) for e in poly.edges) == [1.0, 1.0, 1.0]
    assert is_locally_balanced(h).locally_balanced


def test_single_atom_nonnegative_order():
    h = h_from_measure(normalize([(1.0, 0.2)]), 1.5)
    assert len(enumerate_nests(h)) >= 1
