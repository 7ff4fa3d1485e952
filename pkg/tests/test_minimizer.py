import json
import math

import numpy as np
import pytest

from _suite import perturbed_triangles, random_measure, unbalanced_small_rho
from uct.curve import is_locally_balanced, sigma_U
from uct.errors import NotRegular, WrongOrder
from uct.measures import EMPTY, TWO_PI, Order, normalize
from uct.minimizer import (
    AnalyzeOptions,
    SearchConfig,
    analyze,
    minimax_search,
    minimize_measure,
    surgery_rho2,
    surgery_small_rho,
    verify_type_minimizing,
)
from uct.trigfun import h_from_measure, is_widely_spaced

SQ3 = math.sqrt(3.0)


def rectangle_family(u):
    psi = (math.atan(2 * u) + math.pi / 2) / 3
    m = math.sqrt(u * u + 0.25) / TWO_PI
    return normalize([(psi, m), (math.pi - psi, m), (math.pi + psi, m), (TWO_PI - psi, m)])


class TestSurgeryRho2:
    def test_triangle(self, triangle):
        res = surgery_rho2(h_from_measure(triangle, 2))
        assert res.method == "surgery-rho2"
        assert res.delta_star.angles == pytest.approx([math.pi / 3, math.pi, 5 * math.pi / 3], abs=1e-9)
        assert res.delta_star.masses == pytest.approx([1 / (4 * math.pi)] * 3, abs=1e-9)
        assert res.achieved == pytest.approx(0.5, abs=1e-9)
        assert verify_type_minimizing(triangle, res.delta_star, 2).passed

    def test_balanced_square(self, square):
        res = surgery_rho2(h_from_measure(square, 2))
        assert res.method == "already-balanced" and res.delta_star == EMPTY

    def test_wrong_order(self, triangle):
        with pytest.raises(WrongOrder):
            surgery_rho2(h_from_measure(triangle, 1.5))

    def test_random_regular(self):
        done = 0
        for _, m in perturbed_triangles(30, seed=4):
            h = h_from_measure(m, 2)
            if is_locally_balanced(h).locally_balanced:
                continue
            res = surgery_rho2(h)
            assert len(res.delta_star) <= 3
            assert is_widely_spaced(res.delta_star.angles, 2.0)
            rep = verify_type_minimizing(m, res.delta_star, 2)
            assert rep.passed and rep.defect <= 1e-9
            done += 1
        assert done >= 3


class TestSurgerySmallRho:
    def test_balanced_triangle(self, triangle):
        res = surgery_small_rho(h_from_measure(triangle, Order.rational(3, 4)))
        assert res.method == "already-balanced" and res.delta_star == EMPTY

    @pytest.mark.parametrize("order, measure", unbalanced_small_rho(6, seed=3))
    def test_single_atom(self, order, measure):
        h = h_from_measure(measure, order)
        res = surgery_small_rho(h)
        assert len(res.delta_star) == 1
        assert res.achieved == pytest.approx(sigma_U(h), abs=1e-9)
        assert verify_type_minimizing(measure, res.delta_star, order).passed

    def test_wrong_order(self, triangle):
        with pytest.raises(WrongOrder):
            surgery_small_rho(h_from_measure(triangle, 1.5))


@pytest.mark.parametrize("u", [(SQ3 - math.sqrt(2)) / 2, 0.5, SQ3 / 2])
def test_rectangle_family(rectangle, u):
    star = rectangle_family(u)
    rep = verify_type_minimizing(rectangle, star, 3)
    assert rep.passed
    assert rep.sigma_Z_total == pytest.approx(SQ3 / 2, abs=1e-9)


def test_verify_fails_without_surgery(triangle):
    rep = verify_type_minimizing(triangle, EMPTY, 2)
    assert not rep.passed
    assert rep.to_obj()["passed"] is False


def test_verify_rejects_irregular_sum(triangle):
    with pytest.raises(NotRegular):
        verify_type_minimizing(triangle, normalize([(0.0, 0.1)]), 2)


class TestMinimax:
    def test_triangle(self, triangle):
        res = minimax_search(h_from_measure(triangle, 2), SearchConfig(restarts=4, seed=1))
        assert res.target - 1e-9 <= res.achieved <= res.target + 1e-4
        assert is_widely_spaced(res.delta_star.angles, 2.0)

    def test_small_rho_agrees_with_surgery(self):
        for order, m in unbalanced_small_rho(4, seed=11):
            h = h_from_measure(m, order)
            mm = minimax_search(h, SearchConfig(restarts=4, seed=1))
            assert mm.achieved == pytest.approx(surgery_small_rho(h).achieved, abs=1e-4)

    def test_deterministic(self):
        m = random_measure(np.random.default_rng(8), 2.5, 4)
        h = h_from_measure(m, 2.5)
        cfg = SearchConfig(restarts=2, seed=3, max_iter=60, stop_at_target=False)
        a, b = minimax_search(h, cfg), minimax_search(h, cfg)
        assert a.achieved == b.achieved and a.delta_star == b.delta_star

    def test_more_restarts_never_worse(self):
        m = random_measure(np.random.default_rng(21), 3, 3)
        h = h_from_measure(m, 3)
        vals = [
            minimax_search(h, SearchConfig(restarts=r, seed=5, max_iter=40, stop_at_target=False)).achieved
            for r in (1, 2, 3)
        ]
        assert vals[0] >= vals[1] >= vals[2]
        assert vals[2] >= sigma_U(h) - 1e-9

    def test_no_admissible_l(self, triangle):
        from uct.errors import NoFeasiblePoint

        with pytest.raises(NoFeasiblePoint):
            minimax_search(h_from_measure(triangle, 2), SearchConfig(L_values=(4,)))


class TestAnalyze:
    def test_triangle_report(self, triangle):
        rep = analyze(triangle, 2)
        obj = rep.to_obj()
        assert obj["sigma_Z"] == pytest.approx(1 / SQ3)
        assert obj["sigma_U"] == pytest.approx(0.5)
        assert obj["method"] == "surgery-rho2"
        assert [n["alpha_over_pi"] for n in obj["nests"]] == pytest.approx([1, 7 / 3, 11 / 3])
        assert len(obj["delta_star"]["atoms"]) == 3
        json.dumps(obj)

    def test_dispatch_minimax(self, rectangle):
        res = minimize_measure(h_from_measure(rectangle, 3), AnalyzeOptions(restarts=4, seed=1))
        assert res.method == "minimax"
        assert res.achieved == pytest.approx(SQ3 / 2, abs=1e-4)

    def test_cross_check(self, triangle):
        res = minimize_measure(h_from_measure(triangle, 2), AnalyzeOptions(cross_check=True, restarts=2))
        assert res.diagnostics["cross_check"]["agrees"]

    def test_not_regular(self):
        with pytest.raises(NotRegular):
            analyze(normalize([(0.0, 1.0)]), 2)
