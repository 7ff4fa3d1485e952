"""Type-minimizing measures.

Two closed geometric constructions (order in (1/2, 1) and order 2) and a
numerical minimax search for every other order.  The search minimizes
``max(h + k)`` over elementary convex ``k`` with widely spaced singular
points; the exact nest computation supplies the target it must reach.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from .curve import (
    Nest,
    is_locally_balanced,
    nest_angles,
    nest_at,
    r_loc_star,
    sigma_U,
    sigma_Z,
)
from .errors import NoFeasiblePoint, NotRegular, SurgeryMismatch, WrongOrder
from .measures import (
    EMPTY,
    TWO_PI,
    AtomicMeasure,
    Order,
    lindelof_defect,
    measure_to_obj,
    normalize,
)
from .trigfun import (
    PiecewiseTrig,
    add,
    add_trig,
    deriv_right,
    h_from_measure,
    is_widely_spaced,
    max_and_argmax,
    measure_of,
    merge_singulars,
    zero,
)

SURGERY_TOL = 1e-9
MINIMAX_TOL = 1e-4
_MASS_FLOOR = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    """Settings of the multi-start search; results depend only on these and the input."""

    restarts: int = 8
    seed: int = 0
    max_iter: int = 400
    step: float = 0.4
    L_values: tuple[int, ...] | None = None
    tol: float = MINIMAX_TOL
    candidates: int | None = None
    stop_at_target: bool = True

    def l_grid(self, rho: float) -> tuple[int, ...]:
        top = math.ceil(2 * rho) - 1
        if self.L_values is not None:
            return tuple(self.L_values)
        return tuple(range(1, top + 1))


@dataclass
class MinimizerResult:
    order: Order
    delta_star: AtomicMeasure
    k_star: PiecewiseTrig | None
    achieved: float
    target: float
    method: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        return self.achieved - self.target


def _balanced_result(h: PiecewiseTrig, rep) -> MinimizerResult:
    return MinimizerResult(
        h.order,
        EMPTY,
        zero(h.order),
        rep.sigma_Z,
        rep.sigma_U,
        "already-balanced",
        {"witness": list(rep.witness) if rep.witness else None},
    )


def _max_of_sum(h: PiecewiseTrig, k: PiecewiseTrig) -> float:
    return max_and_argmax(add(h, k)).value


# --- order in (1/2, 1) -------------------------------------------------------


def surgery_small_rho(h: PiecewiseTrig) -> MinimizerResult:
    """One extra atom that pulls the curve into the circumdisk of a single nest.

    After locating a nest just past a global maximizer, its circumcenter
    ``O_0 = r e^{i theta_0}`` and its copy ``O_1`` rotated by ``2 pi rho`` fix
    the cut direction ``theta_0 + pi rho - pi`` (mod 2 pi) and the inserted
    segment length ``|O_0 O_1| = 2 r sin(pi rho)``.  The atom goes at the
    lift of that direction nearest the maximizer, and the result is checked
    against the nest radius.
    """
    rho = h.rho
    if not 0.5 < rho < 1:
        raise WrongOrder(f"this construction needs 1/2 < rho < 1, got {rho}")
    rep = is_locally_balanced(h)
    if rep.locally_balanced:
        return _balanced_result(h, rep)
    target = rep.sigma_U
    period = TWO_PI * rho
    reach = TWO_PI * (1 - rho)
    t_max = max_and_argmax(h).points[0]
    s_max = rho * t_max
    offsets = sorted(((a - s_max) % period, a) for a in nest_angles(h))
    tried = []
    for off, eta in offsets:
        if off > reach + 1e-9 and period - off > 1e-9:
            continue
        nest = nest_at(h, eta)
        r, theta0 = nest.r, nest.theta
        mu = 2 * r * math.sin(math.pi * rho) / TWO_PI
        # the edge direction fixes the cut angle mod 2 pi only; the lift that
        # lands on the maximizer is the one that cuts the curve there
        zeta0 = theta0 + math.pi * rho - math.pi
        lifts = sorted(
            (zeta0 + TWO_PI * j for j in range(-3, 4)),
            key=lambda z: abs(((z - s_max + period / 2) % period) - period / 2),
        )
        for zeta in lifts:
            delta0 = normalize([(zeta / rho, mu)]) if mu > _MASS_FLOOR else EMPTY
            k = h_from_measure(delta0, h.order)
            achieved = _max_of_sum(h, k)
            tried.append(zeta)
            if abs(achieved - nest.radius) <= SURGERY_TOL and abs(nest.radius - target) <= SURGERY_TOL:
                diag = {
                    "nest_alpha": eta,
                    "center": [nest.center[0], nest.center[1]],
                    "nest_radius": nest.radius,
                    "zeta": zeta % period,
                    "maximizer": s_max,
                    "mass": mu,
                    "center_gap": 2 * r * math.sin(math.pi * rho),
                }
                return MinimizerResult(h.order, delta0, k, achieved, target, "surgery-small-rho", diag)
    raise SurgeryMismatch(f"no nest past the maximizer reproduced the target {target!r}; tried {len(tried)}")


# --- order 2 -----------------------------------------------------------------


def _spread_triple(points: Sequence[float]):
    """Three stretched maximizers in [0, 4 pi) whose cyclic gaps all lie in (pi, 2 pi)."""
    pts = sorted(points)
    tol = 1e-9
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            for k in range(j + 1, len(pts)):
                g1, g2 = pts[j] - pts[i], pts[k] - pts[j]
                g3 = pts[i] + 2 * TWO_PI - pts[k]
                if all(math.pi + tol < g < TWO_PI - tol for g in (g1, g2, g3)):
                    return pts[i], pts[j], pts[k]
    return None


def _nest_in(angles: Sequence[float], lo: float, hi: float, period: float) -> float | None:
    span = hi - lo
    best = None
    for a in angles:
        off = (a - lo) % period
        if off <= span + 1e-9 or period - off <= 1e-9:
            if best is None or off < best[0]:
                best = (off, a)
    return None if best is None else best[1]


def surgery_rho2(h: PiecewiseTrig) -> MinimizerResult:
    """Three atoms from the common tangents of three enlarged nest disks (order 2)."""
    if not (h.order.is_integer and round(h.rho) == 2):
        raise WrongOrder(f"this construction needs rho = 2, got {h.rho}")
    base = measure_of(h)
    d = lindelof_defect(base, h.order)
    if not d.regular:
        raise NotRegular(f"second moment is {d.value:.3e}")
    rep = is_locally_balanced(h)
    if rep.locally_balanced:
        return _balanced_result(h, rep)
    hat = add_trig(h, *rep.shift)
    r_star = rep.sigma_U
    period = 2 * TWO_PI
    gammas = _spread_triple([2 * t for t in rep.maximizers])
    if gammas is None:
        raise SurgeryMismatch("no maximizer triple with gaps in (pi, 2 pi)")
    g1, g2, g3 = gammas
    angles = nest_angles(hat)
    etas = [
        _nest_in(angles, g1, g3 - TWO_PI, period),
        _nest_in(angles, g2, g1 + TWO_PI, period),
        _nest_in(angles, g3, g2 + TWO_PI, period),
    ]
    if any(e is None for e in etas):
        raise SurgeryMismatch("could not locate the three covering nests")
    nests: list[Nest] = [nest_at(hat, e) for e in etas]
    centers = [complex(*n.center) for n in nests]
    atoms = []
    zetas = []
    masses = []
    for j, gamma in enumerate(gammas):
        diff = centers[j] - centers[(j + 1) % 3]
        mu = abs(diff) / TWO_PI
        z = cmath.phase(diff) - math.pi / 2
        # pick the lift (mod 4 pi) next to gamma_j
        cands = [z + k * TWO_PI for k in range(-3, 4)]
        z = min(cands, key=lambda x: abs(((x - gamma + period / 2) % period) - period / 2))
        assert (diff * cmath.exp(-1j * z)).imag >= -1e-12
        zetas.append(z % period)
        masses.append(mu)
        if mu > _MASS_FLOOR:
            atoms.append((z / 2, mu))
    delta0 = normalize(atoms)
    total = base + delta0
    h_total = h_from_measure(total, h.order)
    sz, _ = sigma_Z(h_total)
    su = sigma_U(h_total)
    k = h_from_measure(delta0, h.order) if not delta0.is_empty else zero(h.order)
    diag = {
        "gammas": list(gammas),
        "nest_alphas": etas,
        "centers": [[c.real, c.imag] for c in centers],
        "nest_radii": [n.radius for n in nests],
        "zetas": zetas,
        "masses": masses,
        "defect_after": abs(lindelof_defect(total, h.order).value),
    }
    if abs(sz - r_star) > SURGERY_TOL or abs(su - r_star) > SURGERY_TOL:
        raise SurgeryMismatch(f"after surgery sigma_Z={sz!r}, sigma_U={su!r}, expected {r_star!r}")
    return MinimizerResult(h.order, delta0, k, sz, r_star, "surgery-rho2", diag)


# --- minimax search ----------------------------------------------------------


def _kernel(order: Order, x: np.ndarray, deriv: bool = False) -> np.ndarray:
    """Function generated by a unit derivative jump at 0, at offsets ``x``."""
    rho = order.value
    xb = np.mod(x, TWO_PI)
    if order.is_integer:
        if deriv:
            return -(np.sin(rho * xb) + rho * xb * np.cos(rho * xb)) / (TWO_PI * rho)
        return -xb * np.sin(rho * xb) / (TWO_PI * rho)
    c = math.pi / math.sin(math.pi * rho) / TWO_PI
    if deriv:
        return -c * np.sin(rho * (xb - math.pi))
    return c * np.cos(rho * (xb - math.pi)) / rho


class _Inner:
    """For fixed singular points, the best jumps (and trig shift) by linear programming.

    Constraints ``h(t) + k(t) <= z`` are generated lazily: after each solve the
    exact maximizers of ``h + k`` join the active rows, so the returned value
    is the true maximum rather than a grid approximation.
    """

    def __init__(self, h: PiecewiseTrig, n_start: int = 64, gap: float = 1e-7, max_rounds: int = 12):
        self.gap = gap
        self.max_rounds = max_rounds
        self.h = h
        self.order = h.order
        self.rho = h.rho
        self.integer = h.order.is_integer
        self.h_breaks = np.asarray(h.breaks, dtype=float)
        coarse = np.linspace(0.0, TWO_PI, n_start, endpoint=False)
        self.rows = np.unique(np.concatenate([coarse, maximizer_points(h)]))
        self.base_rows = self.rows
        self.cap = 1e3 * (1.0 + float(np.max(np.abs(h(coarse)))))

    def _columns(self, t: np.ndarray, pos: np.ndarray, deriv: bool = False) -> np.ndarray:
        G = _kernel(self.order, t[:, None] - pos[None, :], deriv)
        if not self.integer:
            return G
        if deriv:
            T = np.c_[-np.sin(self.rho * t), np.cos(self.rho * t)] * self.rho
        else:
            T = np.c_[np.cos(self.rho * t), np.sin(self.rho * t)]
        return np.c_[G, T]

    def exact_max(self, pos: np.ndarray, x: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        """Maximum of ``h + k`` and the local candidate points with their values."""
        rho = self.rho
        cuts = np.unique(np.concatenate([[0.0, TWO_PI], self.h_breaks, np.mod(pos, TWO_PI)]))
        u, v = cuts[:-1], cuts[1:]
        keep = v - u > 1e-13
        u, v = u[keep], v[keep]
        m = 0.5 * (u + v)
        # on each cell the sum is one trig piece; recover it from value and slope
        f = np.asarray(self.h(m)) + self._columns(m, pos) @ x
        df = np.asarray(deriv_right(self.h, m)) + self._columns(m, pos, True) @ x
        c, s = np.cos(rho * m), np.sin(rho * m)
        A = f * c - df / rho * s
        B = f * s + df / rho * c
        theta = np.arctan2(B, A) / rho
        period = TWO_PI / rho
        peak = u + np.mod(theta - u, period)
        inside = peak < v
        pts = np.concatenate([cuts[:-1], peak[inside]])
        vals = np.concatenate([
            np.asarray(self.h(cuts[:-1])) + self._columns(cuts[:-1], pos) @ x,
            np.hypot(A, B)[inside],
        ])
        return float(np.max(vals)), pts, vals

    def solve(self, pos: np.ndarray, gap: float | None = None, max_rounds: int | None = None):
        """Return (exact maximum, jumps, shift).

        Rows are added until the linear program is within ``gap`` of the
        exact maximum; the returned value is exact either way.
        """
        gap = self.gap if gap is None else gap
        max_rounds = self.max_rounds if max_rounds is None else max_rounds
        L = len(pos)
        n_free = 2 if self.integer else 0
        if self.integer:
            A_eq = np.zeros((2, L + n_free + 1))
            A_eq[0, :L] = np.cos(self.rho * pos)
            A_eq[1, :L] = np.sin(self.rho * pos)
            b_eq = np.zeros(2)
        else:
            A_eq = b_eq = None
        cost = np.zeros(L + n_free + 1)
        cost[-1] = 1.0
        cap = self.cap
        bounds = [(0, cap)] * L + [(-cap, cap)] * n_free + [(None, None)]
        rows = self.rows
        best = None
        for _ in range(max_rounds):
            A = np.c_[self._columns(rows, pos), -np.ones(len(rows))]
            res = linprog(
                cost, A_ub=A, b_ub=-np.asarray(self.h(rows)), A_eq=A_eq, b_eq=b_eq, bounds=bounds,
                method="highs",
                options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
            )
            if res.status != 0:
                if best is not None:
                    break
                return math.inf, np.zeros(L), (0.0, 0.0)
            x = res.x
            top, pts, vals = self.exact_max(pos, x[:-1])
            if best is None or top < best[0]:
                best = (top, x)
            new = pts[vals > x[-1] + 1e-12]
            if top <= x[-1] + gap or not len(new):
                break
            grown = np.unique(np.concatenate([rows, new]))
            if len(grown) == len(rows):
                break
            rows = grown
        # carry a bounded set of rows to the next call as a warm start
        self.rows = rows if len(rows) <= 4 * len(self.base_rows) else self.base_rows
        top, x = best
        J = np.maximum(x[:L], 0.0)
        shift = (float(x[L]), float(x[L + 1])) if self.integer else (0.0, 0.0)
        return top, J, shift


def maximizer_points(h: PiecewiseTrig) -> np.ndarray:
    return np.asarray(max_and_argmax(h).points, dtype=float)


def _positions(params: np.ndarray, L: int, rho: float) -> np.ndarray:
    """Widely spaced points: a phase plus softmax-weighted slack over the minimal gap."""
    w = math.pi / rho
    slack = TWO_PI - L * w
    logits = np.concatenate([[0.0], params[1:]])
    e = np.exp(logits - np.max(logits))
    gaps = w + slack * e / e.sum()
    return params[0] + np.concatenate([[0.0], np.cumsum(gaps[:-1])])


def _params_from_positions(pos: np.ndarray, rho: float) -> np.ndarray:
    pos = np.sort(np.mod(pos, TWO_PI))
    L = len(pos)
    w = math.pi / rho
    slack = TWO_PI - L * w
    gaps = np.diff(np.concatenate([pos, [pos[0] + TWO_PI]]))
    frac = np.clip((gaps - w) / slack, 1e-6, None)
    logits = np.log(frac / frac[0])
    return np.concatenate([[pos[0]], logits[1:]])


def _build_k(order: Order, pos: np.ndarray, J: np.ndarray, shift) -> tuple[AtomicMeasure, PiecewiseTrig]:
    rho = order.value
    keep = J > _MASS_FLOOR * max(1.0, float(np.max(J, initial=0.0)))
    pos, J = pos[keep], J[keep]
    if order.is_integer and len(J):
        # remove the tiny moment left by solver tolerances
        A = np.vstack([np.cos(rho * pos), np.sin(rho * pos)])
        J = J - np.linalg.lstsq(A, A @ J, rcond=None)[0]
        J = np.maximum(J, 0.0)
    delta = normalize(zip(pos.tolist(), (J / (TWO_PI * rho)).tolist()))
    if order.is_integer and abs(lindelof_defect(delta, order).value) > 1e-9:
        delta = EMPTY
    k = h_from_measure(delta, order)
    if order.is_integer:
        k = add_trig(k, *shift)
    return delta, k


def _exact_objective(h: PiecewiseTrig, pos, J, shift) -> tuple[float, AtomicMeasure, PiecewiseTrig]:
    delta, k = _build_k(h.order, pos, J, shift)
    total = add(h, k)
    if h.order.is_integer:
        value, (a, b) = sigma_Z(total)
        k = add_trig(k, a, b)
    else:
        value = max_and_argmax(total).value
    return value, delta, k


def _grid_seed(h: PiecewiseTrig, inner: _Inner, n_cand: int) -> np.ndarray:
    """Support of the best measure on a fixed candidate grid, merged to wide spacing."""
    pos = np.linspace(0.0, TWO_PI, n_cand, endpoint=False)
    _, J, shift = inner.solve(pos)
    _, k = _build_k(h.order, pos, J, shift)
    kappa = merge_singulars(k)
    return np.asarray(kappa.breaks, dtype=float)


class _Reached(Exception):
    def __init__(self, params):
        super().__init__()
        self.params = params


def minimax_search(h: PiecewiseTrig, cfg: SearchConfig | None = None) -> MinimizerResult:
    """Multi-start search over widely spaced elementary perturbations.

    Each restart runs Nelder-Mead over the positions of ``L`` singular points
    (a phase and softmax gap weights, so wide spacing holds by construction);
    the jumps, and for integer order a trigonometric shift, come from an
    exact linear program.  A warm start from the best measure on a fixed
    candidate grid, merged down to wide spacing, is tried first.  Restart
    ``r`` for ``L`` points draws from a generator seeded by ``(seed, L, r)``,
    so a larger budget only adds candidates.  The search stops once it is
    within ``tol / 10`` of the nest target.
    """
    cfg = cfg or SearchConfig()
    rho = h.rho
    order = h.order
    target = r_loc_star(h)
    inner = _Inner(h)
    L_grid = [L for L in cfg.l_grid(rho) if L * math.pi / rho < TWO_PI]
    if not L_grid and cfg.L_values:
        raise NoFeasiblePoint(f"no L in {cfg.L_values} admits widely spaced points for rho={rho}")
    stop = target + 0.1 * cfg.tol

    # L = 0: no perturbation beyond a trigonometric shift
    if order.is_integer:
        base_val, shift0 = sigma_Z(h)
        best = (base_val, EMPTY, add_trig(zero(order), *shift0), "L=0")
    else:
        best = (max_and_argmax(h).value, EMPTY, zero(order), "L=0")
    evaluations = 0

    def done() -> bool:
        return cfg.stop_at_target and best[0] <= stop

    def run(L: int, x0: np.ndarray, label: str):
        nonlocal best, evaluations

        def obj(p):
            nonlocal evaluations
            evaluations += 1
            value = inner.solve(_positions(p, L, rho))[0]
            if cfg.stop_at_target and value <= stop:
                raise _Reached(p)
            return value

        dim = len(x0)
        simplex = np.vstack([x0] + [x0 + cfg.step * np.eye(dim)[i] for i in range(dim)])
        try:
            res = minimize(
                obj, x0, method="Nelder-Mead",
                options={"initial_simplex": simplex, "maxfev": cfg.max_iter, "xatol": 1e-10, "fatol": 1e-13},
            )
            p_best = res.x
        except _Reached as hit:
            p_best = hit.params
        pos = _positions(p_best, L, rho)
        _, J, shift = inner.solve(pos, gap=1e-10, max_rounds=60)
        value, delta, k = _exact_objective(h, pos, J, shift)
        if value < best[0] - 1e-15:
            best = (value, delta, k, label)

    if not done():
        n_cand = cfg.candidates or int(48 * max(1.0, math.ceil(2 * rho)))
        seed_pos = _grid_seed(h, inner, n_cand)
        if len(seed_pos) and is_widely_spaced(seed_pos, rho):
            run(len(seed_pos), _params_from_positions(seed_pos, rho), "grid")
    for r in range(cfg.restarts):
        for L in L_grid:
            if done():
                break
            rng = np.random.default_rng([cfg.seed, L, r])
            x0 = np.concatenate([[rng.uniform(0, TWO_PI)], rng.normal(0.0, 1.0, L - 1)])
            run(L, x0, f"restart {r}")

    value, delta, k, label = best
    if not is_widely_spaced(delta.angles, rho):
        raise SurgeryMismatch("search produced an atom set that is not widely spaced")
    diag = {
        "L": len(delta),
        "start": label,
        "evaluations": evaluations,
        "accepted": value <= target + cfg.tol,
    }
    return MinimizerResult(order, delta, k, value, target, "minimax", diag)


# --- verification and orchestration ------------------------------------------


@dataclass(frozen=True)
class VerifyReport:
    sigma_U_base: float
    sigma_Z_total: float
    sigma_U_total: float
    tolerance: float
    defect: float

    @property
    def passed(self) -> bool:
        vals = (self.sigma_U_base, self.sigma_Z_total, self.sigma_U_total)
        return max(vals) - min(vals) <= self.tolerance

    def to_obj(self) -> dict:
        return {
            "passed": self.passed,
            "sigma_U": self.sigma_U_base,
            "sigma_Z_total": self.sigma_Z_total,
            "sigma_U_total": self.sigma_U_total,
            "tolerance": self.tolerance,
            "defect_total": self.defect,
        }


def verify_type_minimizing(
    delta: AtomicMeasure, delta_star: AtomicMeasure, order: Order | float, tol: float = SURGERY_TOL
) -> VerifyReport:
    """Check that adding ``delta_star`` brings the zero type down to the uniqueness type."""
    order = Order.of(order)
    for name, m in (("measure", delta),):
        d = lindelof_defect(m, order)
        if not d.regular:
            raise NotRegular(f"{name} has rho-th moment {d.value:.3e}")
    total = delta + delta_star
    d_total = lindelof_defect(total, order)
    if not d_total.regular:
        raise NotRegular(f"sum has rho-th moment {d_total.value:.3e}")
    h = h_from_measure(delta, order)
    h_total = h_from_measure(total, order)
    return VerifyReport(
        sigma_U(h), sigma_Z(h_total)[0], sigma_U(h_total), tol, abs(d_total.value)
    )


@dataclass(frozen=True)
class AnalyzeOptions:
    seed: int = 0
    restarts: int = 8
    tol: float = MINIMAX_TOL
    cross_check: bool = False


@dataclass
class AnalysisReport:
    order: Order
    sigma_Z: float
    sigma_U: float
    locally_balanced: bool
    nests: list[Nest]
    result: MinimizerResult
    diagnostics: dict

    def to_obj(self) -> dict:
        res = self.result
        star = res.delta_star
        diag = dict(self.diagnostics)
        diag["delta_star_atoms"] = [
            {"angle": a, "angle_over_pi": a / math.pi, "mass": m, "mass_times_2pi": m * TWO_PI} for a, m in star
        ]
        diag["target"] = res.target
        diag["method_details"] = _jsonable(res.diagnostics)
        return {
            "sigma_Z": self.sigma_Z,
            "sigma_U": self.sigma_U,
            "locally_balanced": self.locally_balanced,
            "nests": [
                {
                    "alpha": n.alpha,
                    "alpha_over_pi": n.alpha / math.pi,
                    "radius": n.radius,
                    "center": [n.center[0], n.center[1]],
                }
                for n in self.nests
            ],
            "delta_star": measure_to_obj(self.order, star),
            "method": res.method,
            "achieved": res.achieved,
            "diagnostics": diag,
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def minimize_measure(h: PiecewiseTrig, options: AnalyzeOptions | None = None) -> MinimizerResult:
    """Dispatch to the construction that covers the order of ``h``."""
    options = options or AnalyzeOptions()
    rho = h.rho
    cfg = SearchConfig(restarts=options.restarts, seed=options.seed, tol=options.tol)
    if 0.5 < rho < 1:
        res = surgery_small_rho(h)
    elif h.order.is_integer and round(rho) == 2:
        res = surgery_rho2(h)
    else:
        rep = is_locally_balanced(h)
        if rep.locally_balanced:
            return _balanced_result(h, rep)
        return minimax_search(h, cfg)
    if options.cross_check and res.method != "already-balanced":
        mm = minimax_search(h, cfg)
        res.diagnostics["cross_check"] = {
            "minimax_achieved": mm.achieved,
            "agrees": abs(mm.achieved - res.achieved) <= options.tol,
        }
    return res


def analyze(delta: AtomicMeasure, order: Order | float, options: AnalyzeOptions | None = None) -> AnalysisReport:
    order = Order.of(order)
    d = lindelof_defect(delta, order)
    if not d.regular:
        raise NotRegular(f"rho-th moment is {d.value:.3e}; integer order needs a regular measure")
    from .curve import enumerate_nests

    h = h_from_measure(delta, order)
    rep = is_locally_balanced(h)
    nests = enumerate_nests(h)
    res = minimize_measure(h, options)
    diag = {
        "rho": order.value,
        "atoms": len(delta),
        "defect": [d.value.real, d.value.imag],
        "shift": list(rep.shift),
        "maximizers": list(rep.maximizers),
        "witness": list(rep.witness) if rep.witness else None,
    }
    return AnalysisReport(order, rep.sigma_Z, rep.sigma_U, rep.locally_balanced, nests, res, diag)
