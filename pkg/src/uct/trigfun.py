"""Piecewise rho-trigonometric functions on the circle.

A :class:`PiecewiseTrig` stores breakpoints ``s_0 < ... < s_{L-1}`` in
``[0, 2*pi)`` and one coefficient pair per piece.  Piece ``k`` equals
``a_k cos(rho t) + b_k sin(rho t)`` on ``[s_k, s_{k+1}]`` in absolute ``t``;
the last piece covers ``[s_{L-1}, s_0 + 2*pi]``, so on ``[0, s_0)`` it is
evaluated at ``t + 2*pi``.  A function without breakpoints is a single global
piece, which is only periodic for integer order (or when it is zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BadWindow, IllposedIntegerOrder, NotConvex
from .measures import (
    TWO_PI,
    AtomicMeasure,
    Order,
    lindelof_defect,
    normalize,
)

Coef = tuple[float, float]

SNAP_TOL = 1e-12
JUMP_TOL = 1e-9
_ZERO_JUMP = 1e-11
_MAX_TOL = 1e-9


# --- single pieces ---------------------------------------------------------


def piece_value(c: Coef, t, rho: float):
    return c[0] * np.cos(rho * t) + c[1] * np.sin(rho * t)


def piece_deriv(c: Coef, t, rho: float):
    return rho * (-c[0] * np.sin(rho * t) + c[1] * np.cos(rho * t))


def shift_coef(c: Coef, tau: float, rho: float) -> Coef:
    """Coefficients of ``t -> piece(t + tau)``."""
    ct, st = math.cos(rho * tau), math.sin(rho * tau)
    return (c[0] * ct + c[1] * st, c[1] * ct - c[0] * st)


def amplitude_phase(c: Coef) -> tuple[float, float]:
    """Write the piece as ``R cos(rho t - phi)``."""
    return math.hypot(c[0], c[1]), math.atan2(c[1], c[0])


def _piece_zeros(c: Coef, lo: float, hi: float, rho: float) -> list[float]:
    """Zeros of a pure piece inside ``[lo, hi]`` (empty if the piece vanishes)."""
    r, phi = amplitude_phase(c)
    if r <= 1e-300:
        return []
    base = phi + math.pi / 2
    m_lo = math.ceil((rho * lo - base) / math.pi - 1e-9)
    m_hi = math.floor((rho * hi - base) / math.pi + 1e-9)
    out = []
    for m in range(m_lo, m_hi + 1):
        t = (base + m * math.pi) / rho
        if lo - SNAP_TOL <= t <= hi + SNAP_TOL:
            out.append(min(max(t, lo), hi))
    return out


def _piece_peaks(c: Coef, lo: float, hi: float, rho: float) -> list[float]:
    """Local maximizers of a pure piece inside ``[lo, hi]``."""
    r, phi = amplitude_phase(c)
    if r <= 1e-300:
        return []
    m_lo = math.ceil((rho * lo - phi) / TWO_PI - 1e-9)
    m_hi = math.floor((rho * hi - phi) / TWO_PI + 1e-9)
    out = []
    for m in range(m_lo, m_hi + 1):
        t = (phi + m * TWO_PI) / rho
        if lo - SNAP_TOL <= t <= hi + SNAP_TOL:
            out.append(min(max(t, lo), hi))
    return out


# --- the function type -----------------------------------------------------


@dataclass(frozen=True)
class DerivativeJump:
    s: float
    left: float
    right: float

    @property
    def jump(self) -> float:
        return self.right - self.left


@dataclass(frozen=True)
class PiecewiseTrig:
    """A continuous 2*pi-periodic piecewise rho-trigonometric function."""

    order: Order
    breaks: tuple[float, ...]
    coeffs: tuple[Coef, ...]

    def __post_init__(self) -> None:
        n = max(len(self.breaks), 1)
        if len(self.coeffs) != n:
            raise ValueError(f"expected {n} coefficient pairs, got {len(self.coeffs)}")

    @property
    def rho(self) -> float:
        return self.order.value

    def __call__(self, t):
        return evaluate(self, t)

    def __add__(self, other: "PiecewiseTrig") -> "PiecewiseTrig":
        return add(self, other)

    @property
    def singular_points(self) -> tuple[float, ...]:
        return self.breaks


def zero(order: Order | float) -> PiecewiseTrig:
    return PiecewiseTrig(Order.of(order), (), ((0.0, 0.0),))


def pure(order: Order | float, a: float, b: float) -> PiecewiseTrig:
    """A global piece; only periodic for integer order."""
    order = Order.of(order)
    if not order.is_integer and (a or b):
        raise ValueError("a global trigonometric piece is periodic only for integer order")
    return PiecewiseTrig(order, (), ((float(a), float(b)),))


def _snap(t0: np.ndarray, grid: np.ndarray) -> np.ndarray:
    idx = np.clip(np.searchsorted(grid, t0), 1, len(grid) - 1)
    lo, hi = grid[idx - 1], grid[idx]
    near = np.where(np.abs(t0 - lo) <= np.abs(hi - t0), lo, hi)
    return np.where(np.abs(t0 - near) <= SNAP_TOL, near, t0)


def _locate(f: PiecewiseTrig, t, side: str):
    """Piece index and reduced abscissa for each ``t``.

    ``side`` picks the piece to the right (``"right"``) or to the left
    (``"left"``) when ``t`` sits on a breakpoint.
    """
    t = np.asarray(t, dtype=float)
    br = np.asarray(f.breaks)
    s0 = br[0]
    grid = np.append(br, s0 + TWO_PI)
    if side == "right":
        t0 = s0 + np.mod(t - s0, TWO_PI)
        t0 = _snap(t0, grid)
        t0 = np.where(t0 >= s0 + TWO_PI, t0 - TWO_PI, t0)
        k = np.searchsorted(br, t0, side="right") - 1
    else:
        t0 = s0 + TWO_PI - np.mod(s0 - t, TWO_PI)
        t0 = _snap(t0, grid)
        t0 = np.where(t0 <= s0, t0 + TWO_PI, t0)
        k = np.searchsorted(br, t0, side="left") - 1
    return np.clip(k, 0, len(br) - 1), t0


def _eval(f: PiecewiseTrig, t, side: str, deriv: bool):
    rho = f.rho
    fn = piece_deriv if deriv else piece_value
    if not f.breaks:
        out = fn(f.coeffs[0], np.asarray(t, dtype=float), rho)
    else:
        k, t0 = _locate(f, t, side)
        co = np.asarray(f.coeffs)
        out = fn((co[k, 0], co[k, 1]), t0, rho)
    return out if np.ndim(out) else float(out)


def evaluate(f: PiecewiseTrig, t):
    """Value of ``f`` at ``t`` (scalar or array)."""
    return _eval(f, t, "right", False)


def deriv_left(f: PiecewiseTrig, t):
    return _eval(f, t, "left", True)


def deriv_right(f: PiecewiseTrig, t):
    return _eval(f, t, "right", True)


def piece_at(f: PiecewiseTrig, t: float, side: str = "right") -> Coef:
    """Coefficients, in absolute ``t``, of the piece active at ``t``."""
    if not f.breaks:
        return f.coeffs[0]
    k, t0 = _locate(f, float(t), side)
    c = f.coeffs[int(k)]
    return shift_coef(c, float(t0) - float(t), f.rho)


def jumps(f: PiecewiseTrig) -> list[DerivativeJump]:
    """One-sided derivatives at every breakpoint."""
    out = []
    rho = f.rho
    n = len(f.breaks)
    for k, s in enumerate(f.breaks):
        right = float(piece_deriv(f.coeffs[k], s, rho))
        if k == 0:
            left = float(piece_deriv(f.coeffs[n - 1], s + TWO_PI, rho))
        else:
            left = float(piece_deriv(f.coeffs[k - 1], s, rho))
        out.append(DerivativeJump(s, left, right))
    return out


def continuity_error(f: PiecewiseTrig) -> float:
    """Largest mismatch between adjacent pieces at a breakpoint."""
    worst = 0.0
    rho = f.rho
    n = len(f.breaks)
    for k, s in enumerate(f.breaks):
        right = float(piece_value(f.coeffs[k], s, rho))
        if k == 0:
            left = float(piece_value(f.coeffs[n - 1], s + TWO_PI, rho))
        else:
            left = float(piece_value(f.coeffs[k - 1], s, rho))
        worst = max(worst, abs(right - left))
    return worst


def _scale(coeffs: Iterable[Coef]) -> float:
    return max((max(abs(a), abs(b)) for a, b in coeffs), default=0.0)


def canonical(order: Order, breaks: Sequence[float], coeffs: Sequence[Coef]) -> PiecewiseTrig:
    """Drop breakpoints that carry no derivative jump."""
    order = Order.of(order)
    breaks = [float(s) for s in breaks]
    coeffs = [(float(a), float(b)) for a, b in coeffs]
    if not breaks:
        return PiecewiseTrig(order, (), (coeffs[0],))
    probe = PiecewiseTrig(order, tuple(breaks), tuple(coeffs))
    tol = _ZERO_JUMP * max(1.0, _scale(coeffs)) * order.value
    keep = [k for k, j in enumerate(jumps(probe)) if abs(j.jump) > tol]
    if not keep:
        c = coeffs[0]
        if not order.is_integer:
            if _scale(coeffs) > 1e-9:
                raise ValueError("smooth non-zero function is not periodic for non-integer order")
            c = (0.0, 0.0)
        return PiecewiseTrig(order, (), (c,))
    return PiecewiseTrig(order, tuple(breaks[k] for k in keep), tuple(coeffs[k] for k in keep))


def from_segments(order: Order, starts: Sequence[float], coeffs: Sequence[Coef]) -> PiecewiseTrig:
    """Build a function from segments tiling ``[0, 2*pi)`` with absolute coefficients.

    ``starts[0]`` must be 0; segment ``i`` runs from ``starts[i]`` to the next
    start (or to ``2*pi``).
    """
    if not starts or starts[0] != 0.0:
        raise ValueError("segments must start at 0")
    return canonical(order, starts, coeffs)


def segments(f: PiecewiseTrig) -> list[tuple[float, float, Coef]]:
    """Tile ``[0, 2*pi]`` by ``(u, v, coef)`` with absolute coefficients."""
    if not f.breaks:
        return [(0.0, TWO_PI, f.coeffs[0])]
    br, co = f.breaks, f.coeffs
    out = []
    if br[0] > 0:
        out.append((0.0, br[0], shift_coef(co[-1], TWO_PI, f.rho)))
    for k in range(len(br) - 1):
        out.append((br[k], br[k + 1], co[k]))
    out.append((br[-1], TWO_PI, co[-1]))
    return out


def pieces_between(f: PiecewiseTrig, lo: float, hi: float) -> list[tuple[float, float, Coef]]:
    """Pieces of ``f`` over an arbitrary real interval, absolute coefficients."""
    out = []
    rho = f.rho
    base = segments(f)
    n_lo = math.floor(lo / TWO_PI)
    n_hi = math.floor(hi / TWO_PI)
    for n in range(n_lo, n_hi + 1):
        off = n * TWO_PI
        for u, v, c in base:
            a, b = max(u + off, lo), min(v + off, hi)
            if b - a > SNAP_TOL:
                out.append((a, b, shift_coef(c, -off, rho)))
    return out


# --- envelopes ---------------------------------------------------------------


def _local_envelope(rho: float, p: float, q: float, cands: Sequence[Coef]) -> list[tuple[float, Coef]]:
    """Upper envelope of pure pieces on ``[p, q]`` as ``(start, coef)`` runs."""
    uniq: list[Coef] = []
    for c in cands:
        if not any(abs(c[0] - d[0]) <= 1e-14 and abs(c[1] - d[1]) <= 1e-14 for d in uniq):
            uniq.append(c)
    if len(uniq) == 1:
        return [(p, uniq[0])]
    cuts = {p, q}
    for i in range(len(uniq)):
        for j in range(i + 1, len(uniq)):
            diff = (uniq[i][0] - uniq[j][0], uniq[i][1] - uniq[j][1])
            for z in _piece_zeros(diff, p, q, rho):
                cuts.add(z)
    pts = sorted(cuts)
    runs: list[tuple[float, Coef]] = []
    for u, v in zip(pts[:-1], pts[1:]):
        if v - u <= SNAP_TOL:
            continue
        mid = 0.5 * (u + v)
        vals = [float(piece_value(c, mid, rho)) for c in uniq]
        best = uniq[int(np.argmax(vals))]
        if not runs or runs[-1][1] != best:
            runs.append((u, best))
    if not runs:
        vals = [float(piece_value(c, p, rho)) for c in uniq]
        runs.append((p, uniq[int(np.argmax(vals))]))
    return runs


def envelope(order: Order, items: Sequence[tuple[float, float, Coef]], default: Coef | None = (0.0, 0.0)) -> PiecewiseTrig:
    """Periodic upper envelope of pieces living on real intervals.

    Where no item covers a point (mod 2*pi) the ``default`` piece is used.
    """
    order = Order.of(order)
    rho = order.value
    placed: list[tuple[float, float, Coef]] = []
    for lo, hi, c in items:
        for n in range(math.floor(lo / TWO_PI), math.floor(hi / TWO_PI) + 1):
            off = n * TWO_PI
            u, v = max(lo - off, 0.0), min(hi - off, TWO_PI)
            if v - u > SNAP_TOL:
                placed.append((u, v, shift_coef(c, off, rho)))
    cuts = sorted({0.0, TWO_PI, *(u for u, _, _ in placed), *(v for _, v, _ in placed)})
    merged = [cuts[0]]
    for x in cuts[1:]:
        if x - merged[-1] > SNAP_TOL:
            merged.append(x)
    merged[-1] = TWO_PI
    starts: list[float] = []
    coefs: list[Coef] = []
    for p, q in zip(merged[:-1], merged[1:]):
        active = [c for u, v, c in placed if u <= p + SNAP_TOL and v >= q - SNAP_TOL]
        if not active:
            if default is None:
                raise ValueError(f"no piece covers [{p}, {q}]")
            active = [default]
        for s, c in _local_envelope(rho, p, q, active):
            if coefs and coefs[-1] == c:
                continue
            starts.append(s)
            coefs.append(c)
    starts[0] = 0.0
    return from_segments(order, starts, coefs)


def _combine(f: PiecewiseTrig, g: PiecewiseTrig, sign: float) -> PiecewiseTrig:
    if f.order.value != g.order.value:
        raise ValueError("orders differ")
    fs, gs = segments(f), segments(g)
    cuts = [0.0]
    for x in sorted({u for u, _, _ in fs} | {u for u, _, _ in gs}):
        if x - cuts[-1] > SNAP_TOL:
            cuts.append(x)
    ends = cuts[1:] + [TWO_PI]
    coefs = []
    for x, y in zip(cuts, ends):
        mid = 0.5 * (x + y)
        cf = next(c for u, v, c in fs if u <= mid <= v)
        cg = next(c for u, v, c in gs if u <= mid <= v)
        coefs.append((cf[0] + sign * cg[0], cf[1] + sign * cg[1]))
    return from_segments(f.order, cuts, coefs)


def add(f: PiecewiseTrig, g: PiecewiseTrig) -> PiecewiseTrig:
    """Pointwise sum."""
    return _combine(f, g, 1.0)


def subtract(f: PiecewiseTrig, g: PiecewiseTrig) -> PiecewiseTrig:
    return _combine(f, g, -1.0)


def pointwise_max(f: PiecewiseTrig, g: PiecewiseTrig) -> PiecewiseTrig:
    """Exact representation of ``max(f, g)``."""
    if f.order.value != g.order.value:
        raise ValueError("orders differ")
    return envelope(f.order, segments(f) + segments(g), default=None)


def add_trig(f: PiecewiseTrig, a: float, b: float) -> PiecewiseTrig:
    """Add ``a cos(rho t) + b sin(rho t)`` to every piece.

    Jumps are unchanged for integer order, where this moves ``f`` inside its
    equivalence class.  For non-integer order the coefficient update is still
    applied, but the result is no longer continuous across ``t = 0``.
    """
    coeffs = tuple((c[0] + a, c[1] + b) for c in f.coeffs)
    return PiecewiseTrig(f.order, f.breaks, coeffs)


# --- convexity ---------------------------------------------------------------


@dataclass(frozen=True)
class ConvexityReport:
    convex: bool
    jumps: tuple[DerivativeJump, ...]

    def __bool__(self) -> bool:
        return self.convex


def is_trig_convex(f: PiecewiseTrig, tol: float = JUMP_TOL) -> ConvexityReport:
    """Convex iff no derivative jump is below ``-tol``."""
    js = tuple(jumps(f))
    return ConvexityReport(all(j.jump >= -tol for j in js), js)


def tc_triple_check(f: PiecewiseTrig, samples: int = 10_000, seed: int = 0) -> float:
    """Largest value of the three-point sine determinant over random triples.

    Triples satisfy ``t1 < t2 < t3`` and ``t3 - t1 < pi/rho``.  Half of them
    put ``t2`` on a breakpoint, where a concave corner would show up.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    rho = f.rho
    rng = np.random.default_rng(seed)
    span = math.pi / rho * rng.uniform(1e-6, 1.0, samples) * (1 - 1e-12)
    t1 = rng.uniform(0.0, TWO_PI, samples)
    frac = rng.uniform(0.0, 1.0, samples)
    if f.breaks:
        near = np.arange(samples) % 2 == 1
        pick = rng.integers(0, len(f.breaks), samples)
        t2_bp = np.asarray(f.breaks)[pick]
        t1 = np.where(near, t2_bp - frac * span, t1)
    t2 = t1 + frac * span
    if f.breaks:
        t2 = np.where(near, t2_bp, t2)
    t3 = t1 + span
    lhs = (
        f(t1) * np.sin(rho * (t2 - t3))
        + f(t2) * np.sin(rho * (t3 - t1))
        + f(t3) * np.sin(rho * (t1 - t2))
    )
    return float(np.max(lhs))


def property_c_margin(f: PiecewiseTrig, samples: int = 1000, seed: int = 0) -> float:
    """Smallest ``f(a - pi/(2 rho)) + f(a + pi/(2 rho))`` over random ``a``."""
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, TWO_PI, samples)
    d = math.pi / (2 * f.rho)
    return float(np.min(f(a - d) + f(a + d)))


# --- measures ----------------------------------------------------------------


def measure_of(f: PiecewiseTrig) -> AtomicMeasure:
    """Atoms at the breakpoints with mass ``jump / (2 pi rho)``."""
    atoms = []
    for j in jumps(f):
        if j.jump < -JUMP_TOL:
            raise NotConvex(f"negative derivative jump {j.jump:.3e} at t = {j.s!r}")
        if j.jump > 0:
            atoms.append((j.s, j.jump / (TWO_PI * f.rho)))
    return normalize(atoms)


def h_from_measure(measure: AtomicMeasure, order: Order | float) -> PiecewiseTrig:
    """The function whose derivative jumps reproduce ``measure``.

    Non-integer order gives the unique such function.  Integer order needs a
    regular measure and returns one representative of its class.
    """
    order = Order.of(order)
    rho = order.value
    if measure.is_empty:
        return zero(order)
    if order.is_integer:
        d = lindelof_defect(measure, order)
        if not d.regular:
            raise IllposedIntegerOrder(f"rho-th moment is {d.value:.3e}, measure is not regular")
    phi = np.asarray(measure.angles)
    m = np.asarray(measure.masses)
    n = len(phi)
    coeffs = []
    for k in range(n):
        # window (theta - 2 pi, theta] for theta in [phi_k, phi_{k+1}]
        psi = np.where(np.arange(n) <= k, phi, phi - TWO_PI)
        if order.is_integer:
            a = -float(np.sum(m * psi * np.sin(rho * psi)))
            b = float(np.sum(m * psi * np.cos(rho * psi)))
        else:
            c = math.pi / math.sin(math.pi * rho)
            a = c * float(np.sum(m * np.cos(rho * (psi + math.pi))))
            b = c * float(np.sum(m * np.sin(rho * (psi + math.pi))))
        coeffs.append((a, b))
    return canonical(order, phi.tolist(), coeffs)


# --- maxima ------------------------------------------------------------------


@dataclass(frozen=True)
class MaxInfo:
    value: float
    points: tuple[float, ...]
    intervals: tuple[tuple[float, float], ...] = ()


def _dedupe_circular(xs: Sequence[float], tol: float) -> list[float]:
    out: list[float] = []
    for x in sorted(xs):
        if out and x - out[-1] <= tol:
            continue
        out.append(x)
    if len(out) > 1 and out[0] + TWO_PI - out[-1] <= tol:
        out.pop()
    return out


def max_and_argmax(f: PiecewiseTrig, tol: float = _MAX_TOL) -> MaxInfo:
    """Global maximum over one period and the set where it is attained."""
    rho = f.rho
    cands: list[tuple[float, float]] = []
    plateaus: list[tuple[float, float]] = []
    for u, v, c in segments(f):
        for t in _piece_peaks(c, u, v, rho):
            cands.append((float(piece_value(c, t, rho)), t))
        for t in (u, v):
            cands.append((float(piece_value(c, t, rho)), t))
        if math.hypot(*c) <= 1e-12:
            plateaus.append((u, v))
    best = max(val for val, _ in cands)
    pts = []
    for val, t in cands:
        if val < best - tol:
            continue
        # endpoints only count when they are local maxima
        if f.breaks and any(abs(t - u) <= SNAP_TOL for u in (*f.breaks, 0.0, TWO_PI)):
            if deriv_left(f, t) < -1e-9 or deriv_right(f, t) > 1e-9:
                continue
        pts.append(math.fmod(t, TWO_PI))
    intervals = tuple((u, v) for u, v in plateaus if abs(best) <= tol)
    return MaxInfo(best, tuple(_dedupe_circular(pts, 1e-9)), intervals)


def minimum(f: PiecewiseTrig) -> float:
    neg = PiecewiseTrig(f.order, f.breaks, tuple((-a, -b) for a, b in f.coeffs))
    return -max_and_argmax(neg).value


# --- minorants ---------------------------------------------------------------


@dataclass(frozen=True)
class WindowedTrig:
    """A piecewise function living on the real interval ``[lo, hi]``."""

    order: Order
    lo: float
    hi: float
    pieces: tuple[tuple[float, float, Coef], ...]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, np.nan)
        for u, v, c in self.pieces:
            mask = (t >= u - SNAP_TOL) & (t <= v + SNAP_TOL)
            out = np.where(mask, piece_value(c, t, self.order.value), out)
        return out if out.ndim else float(out)


def tau_ab(alpha: float, A: float, beta: float, B: float, order: Order | float) -> WindowedTrig:
    """The three-branch minorant on ``[alpha - pi/rho, beta + pi/rho]``.

    ``A sin rho(alpha - t)`` on the left, ``B sin rho(t - beta)`` on the right
    and the larger of the two in between.
    """
    order = Order.of(order)
    rho = order.value
    w = math.pi / rho
    if not (0 < beta - alpha <= w + SNAP_TOL):
        raise BadWindow(f"need 0 < beta - alpha <= pi/rho, got {beta - alpha!r}")
    if A < 0 or B < 0:
        raise ValueError("amplitudes must be non-negative")
    left = (A * math.sin(rho * alpha), -A * math.cos(rho * alpha))
    right = (-B * math.sin(rho * beta), B * math.cos(rho * beta))
    pieces = [(alpha - w, alpha, left)]
    runs = _local_envelope(rho, alpha, beta, [left, right])
    ends = [s for s, _ in runs[1:]] + [beta]
    pieces += [(s, e, c) for (s, c), e in zip(runs, ends)]
    pieces.append((beta, beta + w, right))
    return WindowedTrig(order, alpha - w, beta + w, tuple(pieces))


def negative_components(h: PiecewiseTrig) -> list[tuple[float, float]]:
    """Maximal intervals ``(alpha, beta)`` where ``h < 0``, with ``alpha`` in ``[0, 2 pi)``."""
    rho = h.rho
    zs = []
    for u, v, c in segments(h):
        zs.extend(_piece_zeros(c, u, v, rho))
    zs = _dedupe_circular([math.fmod(z, TWO_PI) for z in zs], 1e-12)
    if not zs:
        if float(h(0.0)) < 0:
            raise NotConvex("function is negative everywhere")
        return []
    out = []
    for i, a in enumerate(zs):
        b = zs[i + 1] if i + 1 < len(zs) else zs[0] + TWO_PI
        if float(h(0.5 * (a + b))) < 0:
            out.append((a, b))
    return out


def minorant_elementary(h: PiecewiseTrig) -> PiecewiseTrig:
    """An elementary convex minorant built from the negative components of ``h``."""
    rho = h.rho
    comps = negative_components(h)
    if not comps:
        return zero(h.order)
    items = []
    for a, b in comps:
        A = max(0.0, -float(deriv_right(h, a)) / rho)
        B = max(0.0, float(deriv_left(h, b)) / rho)
        b = min(b, a + math.pi / rho)
        items.extend(tau_ab(a, A, b, B, h.order).pieces)
    return envelope(h.order, items, default=(0.0, 0.0))


def circular_gaps(points: Sequence[float]) -> list[float]:
    pts = sorted(points)
    if len(pts) < 2:
        return []
    return [b - a for a, b in zip(pts, pts[1:])] + [pts[0] + TWO_PI - pts[-1]]


def is_widely_spaced(points: Sequence[float], rho: float, tol: float = 1e-9) -> bool:
    return all(g > math.pi / rho - tol for g in circular_gaps(points))


def _merge_once(tau: PiecewiseTrig, i: int) -> PiecewiseTrig:
    br = tau.breaks
    n = len(br)
    alpha = br[i]
    beta = br[i + 1] if i + 1 < n else br[0] + TWO_PI
    p1 = piece_at(tau, alpha, "left")
    p3 = piece_at(tau, beta, "right")
    items = pieces_between(tau, beta, alpha + TWO_PI)
    items += [(alpha, beta, p1), (alpha, beta, p3)]
    return envelope(tau.order, items, default=None)


def merge_singulars(tau: PiecewiseTrig) -> PiecewiseTrig:
    """Merge close singular points until all gaps exceed ``pi/rho``.

    Each step takes the first adjacent pair at most ``pi/rho`` apart and
    replaces the middle piece by the larger of the two neighbouring pieces
    continued over the gap.
    """
    w = math.pi / tau.rho
    while len(tau.breaks) > 1:
        gaps = circular_gaps(tau.breaks)
        bad = [i for i, g in enumerate(gaps) if g <= w + SNAP_TOL]
        if not bad:
            break
        nxt = _merge_once(tau, bad[0])
        if len(nxt.breaks) >= len(tau.breaks):
            raise RuntimeError("merge did not reduce the singular set")
        tau = nxt
    return tau


def widely_spaced_minorant(h: PiecewiseTrig) -> PiecewiseTrig:
    return merge_singulars(minorant_elementary(h))


def periodized_cos(order: Order | float) -> PiecewiseTrig:
    """``cos(rho t)`` on ``|t| <= T/2`` repeated with period ``T = 2 pi / L``, ``L = ceil(2 rho) - 1``."""
    order = Order.of(order)
    rho = order.value
    L = math.ceil(2 * rho) - 1
    T = TWO_PI / L
    items = []
    for k in range(L):
        c = shift_coef((1.0, 0.0), -k * T, rho)
        items.append((k * T - T / 2, k * T + T / 2, c))
    return envelope(order, items, default=None)


def dump_csv(f: PiecewiseTrig, resolution: int = 1000) -> str:
    """``t,value`` rows on a uniform grid over one period."""
    t = np.linspace(0.0, TWO_PI, resolution, endpoint=False)
    y = f(t)
    lines = ["t,value"] + [f"{a:.12g},{b:.12g}" for a, b in zip(t, y)]
    return "\n".join(lines) + "\n"
