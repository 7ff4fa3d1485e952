"""The locally convex polygon of a piecewise trigonometric function, and its nests.

Everything here works in the stretched variable ``sigma = rho * t``.  A piece
``a cos(rho t) + b sin(rho t)`` is then the support function of the single
point ``(a, b)``, so the polygon's vertices are coefficient pairs and its
edges sit at the stretched breakpoints.  A nest is a window
``(alpha - 2 pi, alpha)`` whose two ends share a support line.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NotConvex, UnknownFormat
from .measures import TWO_PI
from .trigfun import (
    PiecewiseTrig,
    _piece_zeros,
    add_trig,
    deriv_left,
    deriv_right,
    is_trig_convex,
    max_and_argmax,
    measure_of,
    piece_at,
    pieces_between,
)

Point = tuple[float, float]

NEST_TOL = 1e-9
SVG_VERSION = "1"


def _require_convex(h: PiecewiseTrig) -> None:
    rep = is_trig_convex(h)
    if not rep.convex:
        worst = min(j.jump for j in rep.jumps)
        raise NotConvex(f"negative derivative jump {worst:.3e}")


def _rotate(p: Point, ang: float) -> Point:
    c, s = math.cos(ang), math.sin(ang)
    return (c * p[0] - s * p[1], s * p[0] + c * p[1])


# --- stretched evaluation --------------------------------------------------


def stretched_value(h: PiecewiseTrig, sigma: float) -> float:
    return float(h(sigma / h.rho))


def stretched_deriv_left(h: PiecewiseTrig, sigma: float) -> float:
    return float(deriv_left(h, sigma / h.rho)) / h.rho


def stretched_deriv_right(h: PiecewiseTrig, sigma: float) -> float:
    return float(deriv_right(h, sigma / h.rho)) / h.rho


def point_at(h: PiecewiseTrig, sigma: float, side: str = "right") -> Point:
    """The curve vertex supporting direction ``sigma`` (one-sided at breakpoints)."""
    return piece_at(h, sigma / h.rho, side)


def subarc_points(h: PiecewiseTrig, lo: float, hi: float) -> list[Point]:
    """Vertices of the curve whose support interval meets the open window ``(lo, hi)``."""
    rho = h.rho
    pts: list[Point] = []
    for _, _, c in pieces_between(h, lo / rho, hi / rho):
        if pts and abs(pts[-1][0] - c[0]) <= 1e-12 and abs(pts[-1][1] - c[1]) <= 1e-12:
            continue
        pts.append((float(c[0]), float(c[1])))
    return pts


# --- polygon ---------------------------------------------------------------


@dataclass(frozen=True)
class Vertex:
    x: float
    y: float
    lo: float
    hi: float


@dataclass(frozen=True)
class Edge:
    angle: float
    start: Point
    end: Point

    @property
    def length(self) -> float:
        return math.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1])

    @property
    def direction(self) -> Point:
        return (-math.sin(self.angle), math.cos(self.angle))


@dataclass(frozen=True)
class LocallyConvexPolygon:
    """Vertices and edges of the curve over one stretched period.

    Vertex ``k`` supports the directions ``[lo, hi]``; edge ``k`` sits at the
    stretched breakpoint ``rho * s_k`` and joins the previous vertex to vertex
    ``k``.  For non-integer order the edge at the window start leaves the
    previous turn of the curve, i.e. the last vertex rotated by ``-2 pi rho``.
    """

    rho: float
    window: tuple[float, float]
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    @property
    def points(self) -> list[Point]:
        return [(v.x, v.y) for v in self.vertices]


def build_curve(h: PiecewiseTrig) -> LocallyConvexPolygon:
    """The polygon whose support data is the stretched function ``h(sigma / rho)``."""
    _require_convex(h)
    rho = h.rho
    if not h.breaks:
        c = h.coeffs[0]
        v = Vertex(float(c[0]), float(c[1]), 0.0, TWO_PI * rho)
        return LocallyConvexPolygon(rho, (0.0, TWO_PI * rho), (v,), ())
    br = [rho * s for s in h.breaks]
    ends = br[1:] + [br[0] + TWO_PI * rho]
    verts = tuple(Vertex(float(c[0]), float(c[1]), lo, hi) for c, lo, hi in zip(h.coeffs, br, ends))
    edges = []
    for k, sig in enumerate(br):
        end = (verts[k].x, verts[k].y)
        prev = verts[k - 1]
        start = (prev.x, prev.y)
        if k == 0:
            start = _rotate(start, -TWO_PI * rho)
        edges.append(Edge(sig, start, end))
    return LocallyConvexPolygon(rho, (br[0], br[0] + TWO_PI * rho), verts, tuple(edges))


# --- enclosing circles -------------------------------------------------------


def _circumcircle(a: Point, b: Point, c: Point):
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) <= 1e-300:
        return None
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    return (ux, uy), math.hypot(ax - ux, ay - uy)


def min_enclosing_circle(points: Sequence[Point]) -> tuple[Point, float]:
    """Smallest closed disk containing ``points``, by exhaustive search.

    The optimum is fixed by two diametral or three boundary points.  Point
    sets here are small, so every pair and triple is tried; the first
    minimal candidate in lexicographic point order wins.
    """
    if not points:
        raise ValueError("need at least one point")
    pts = sorted({(float(x), float(y)) for x, y in points})
    uniq: list[Point] = []
    for p in pts:
        if not any(abs(p[0] - q[0]) <= 1e-14 and abs(p[1] - q[1]) <= 1e-14 for q in uniq):
            uniq.append(p)
    if len(uniq) == 1:
        return uniq[0], 0.0
    arr = np.asarray(uniq)
    scale = max(1.0, float(np.max(np.abs(arr))))
    slack = 1e-12 * scale

    def encloses(center: Point, r: float) -> bool:
        d = np.hypot(arr[:, 0] - center[0], arr[:, 1] - center[1])
        return bool(np.all(d <= r + slack))

    best: tuple[Point, float] | None = None
    for a, b in itertools.combinations(uniq, 2):
        center = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        r = math.hypot(a[0] - b[0], a[1] - b[1]) / 2
        if (best is None or r < best[1] - slack) and encloses(center, r):
            best = (center, r)
    for a, b, c in itertools.combinations(uniq, 3):
        cc = _circumcircle(a, b, c)
        if cc is None:
            continue
        center, r = cc
        if (best is None or r < best[1] - slack) and encloses(center, r):
            best = (center, r)
    assert best is not None
    return best


# --- nests -------------------------------------------------------------------


@dataclass(frozen=True)
class Nest:
    """A window ``(alpha - 2 pi, alpha)`` with a double support line, and its circumdisk."""

    alpha: float
    value: float
    deriv_left_alpha: float
    deriv_right_back: float
    center: Point
    radius: float
    vertices: tuple[Point, ...] = field(repr=False)

    @property
    def r(self) -> float:
        return math.hypot(*self.center)

    @property
    def theta(self) -> float:
        return math.atan2(self.center[1], self.center[0])


def _wrap(x: float, period: float) -> float:
    y = math.fmod(x, period)
    if y < 0:
        y += period
    if period - y <= 1e-12:
        y = 0.0
    return y


def _dedupe(xs: Sequence[float], period: float, tol: float = NEST_TOL) -> list[float]:
    out: list[float] = []
    for x in sorted(xs):
        if out and x - out[-1] <= tol:
            continue
        out.append(x)
    if len(out) > 1 and out[0] + period - out[-1] <= tol:
        out.pop()
    return out


def _stretched_breaks(h: PiecewiseTrig, lo: float, hi: float) -> list[float]:
    rho = h.rho
    out = []
    for s in h.breaks:
        n_lo = math.floor((lo / rho - s) / TWO_PI) - 1
        n_hi = math.ceil((hi / rho - s) / TWO_PI) + 1
        for n in range(n_lo, n_hi + 1):
            sig = rho * (s + n * TWO_PI)
            if lo - 1e-12 <= sig <= hi + 1e-12:
                out.append(sig)
    return out


def _cells(h: PiecewiseTrig) -> list[float]:
    """Boundaries in ``[0, 2 pi rho]`` where the nest condition can change form."""
    period = TWO_PI * h.rho
    pts = {0.0, period}
    pts.update(_stretched_breaks(h, 0.0, period))
    pts.update(s + TWO_PI for s in _stretched_breaks(h, -TWO_PI, period - TWO_PI))
    cuts = [0.0]
    for x in sorted(pts):
        if 0.0 <= x <= period and x - cuts[-1] > 1e-12:
            cuts.append(x)
    cuts[-1] = period
    return cuts


def _is_nest(h: PiecewiseTrig, alpha: float, tol: float = NEST_TOL) -> bool:
    d = stretched_value(h, alpha - TWO_PI) - stretched_value(h, alpha)
    slope = stretched_deriv_right(h, alpha - TWO_PI) - stretched_deriv_left(h, alpha)
    return abs(d) <= tol and slope >= -tol


def nest_angles(h: PiecewiseTrig) -> list[float]:
    """Stretched angles ``alpha`` in ``[0, 2 pi rho)`` that carry a nest.

    On each cell the gap ``h~(sigma - 2 pi) - h~(sigma)`` is a single
    first-order trigonometric term, so its zeros come in closed form.  A cell
    where it vanishes identically contributes its ends and midpoint.
    """
    period = TWO_PI * h.rho
    cands = []
    cuts = _cells(h)
    for u, v in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (u + v)
        p = point_at(h, mid - TWO_PI)
        q = point_at(h, mid)
        diff = (p[0] - q[0], p[1] - q[1])
        scale = max(1.0, abs(p[0]), abs(p[1]), abs(q[0]), abs(q[1]))
        if math.hypot(*diff) <= 1e-12 * scale:
            cands.extend((u, mid, v))
        else:
            cands.extend(_piece_zeros(diff, u, v, 1.0))
    good = [_wrap(a, period) for a in cands if _is_nest(h, a)]
    return _dedupe(good, period)


def window_sum(h: PiecewiseTrig, alpha: float, atoms: Sequence[tuple[float, float]] | None = None) -> complex:
    """Sum of ``m_j exp(i (sigma_j - alpha))`` over stretched atoms in ``(alpha - 2 pi, alpha)``."""
    if atoms is None:
        atoms = stretched_atoms(h, alpha - TWO_PI, alpha)
    return sum(
        (m * cmath.exp(1j * (s - alpha)) for s, m in atoms if alpha - TWO_PI + 1e-12 < s < alpha - 1e-12),
        0j,
    )


def stretched_atoms(h: PiecewiseTrig, lo: float, hi: float) -> list[tuple[float, float]]:
    """Atoms of the measure of ``h`` at stretched positions in ``[lo, hi]``, repeated periodically."""
    mu = measure_of(h)
    rho = h.rho
    out = []
    for phi, m in mu:
        n_lo = math.floor((lo / rho - phi) / TWO_PI) - 1
        n_hi = math.ceil((hi / rho - phi) / TWO_PI) + 1
        for n in range(n_lo, n_hi + 1):
            s = rho * (phi + n * TWO_PI)
            if lo - 1e-12 <= s <= hi + 1e-12:
                out.append((s, m))
    return sorted(out)


def nest_angles_by_window_sum(h: PiecewiseTrig, tol: float = 1e-10) -> list[float]:
    """Independent nest finder: the window sum must be real and non-positive.

    Between consecutive atom entries and exits the window holds a fixed set
    of atoms with resultant ``C``, and the sum is ``exp(-i alpha) C``; it is
    real and non-positive only for ``alpha = arg C + pi``.
    """
    period = TWO_PI * h.rho
    atoms = stretched_atoms(h, -TWO_PI - 1.0, period + 1.0)
    total = sum(m for _, m in atoms) or 1.0
    pts = {0.0, period}
    for s, _ in atoms:
        for b in (s, s + TWO_PI):
            if 0.0 <= b <= period:
                pts.add(b)
    cuts = [0.0]
    for x in sorted(pts):
        if x - cuts[-1] > 1e-12:
            cuts.append(x)
    cuts[-1] = period
    found = []
    for u, v in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (u + v)
        c = sum((m * cmath.exp(1j * s) for s, m in atoms if mid - TWO_PI < s < mid), 0j)
        if abs(c) <= 1e-12 * total:
            found.extend((u, mid, v))
            continue
        a0 = cmath.phase(c) + math.pi
        k_lo = math.ceil((u - a0) / TWO_PI - 1e-9)
        k_hi = math.floor((v - a0) / TWO_PI + 1e-9)
        for k in range(k_lo, k_hi + 1):
            a = a0 + k * TWO_PI
            if u - 1e-12 <= a <= v + 1e-12:
                found.append(min(max(a, u), v))
    for b in cuts:
        s = window_sum(h, b, atoms)
        if abs(s.imag) <= tol * total and s.real <= tol * total:
            found.append(b)
    return _dedupe([_wrap(a, period) for a in found], period)


def nest_at(h: PiecewiseTrig, alpha: float) -> Nest:
    pts = subarc_points(h, alpha - TWO_PI, alpha)
    if not pts:
        pts = [point_at(h, alpha, "left")]
    center, radius = min_enclosing_circle(pts)
    return Nest(
        alpha=alpha,
        value=stretched_value(h, alpha),
        deriv_left_alpha=stretched_deriv_left(h, alpha),
        deriv_right_back=stretched_deriv_right(h, alpha - TWO_PI),
        center=center,
        radius=radius,
        vertices=tuple(pts),
    )


def enumerate_nests(h: PiecewiseTrig, dedupe: bool = True) -> list[Nest]:
    """All nests with ``alpha`` in ``[0, 2 pi rho)``, one per distinct circumdisk."""
    _require_convex(h)
    nests = [nest_at(h, a) for a in nest_angles(h)]
    if not dedupe:
        return nests
    out: list[Nest] = []
    for n in nests:
        if any(
            abs(n.radius - m.radius) <= NEST_TOL
            and abs(n.center[0] - m.center[0]) <= NEST_TOL
            and abs(n.center[1] - m.center[1]) <= NEST_TOL
            for m in out
        ):
            continue
        out.append(n)
    return out


def local_circumradius(nest: Nest) -> tuple[Point, float]:
    return min_enclosing_circle(nest.vertices)


def r_loc_star(h: PiecewiseTrig) -> float:
    """Largest local circumradius over all nests."""
    return max(n.radius for n in enumerate_nests(h))


def sigma_U(h: PiecewiseTrig) -> float:
    return r_loc_star(h)


def sigma_Z(h: PiecewiseTrig) -> tuple[float, Point]:
    """Critical zero type and the trigonometric shift that balances ``h``.

    Non-integer order: the maximum of ``h`` with no shift.  Integer order: the
    circumradius of the closed curve; adding ``a cos(rho t) + b sin(rho t)``
    translates the curve by ``(a, b)``, so the shift is minus the circumcenter.
    """
    _require_convex(h)
    if not h.order.is_integer:
        return max_and_argmax(h).value, (0.0, 0.0)
    center, radius = min_enclosing_circle([tuple(c) for c in h.coeffs])
    return radius, (-center[0], -center[1])


def balanced_modification(h: PiecewiseTrig) -> PiecewiseTrig:
    if not h.order.is_integer:
        return h
    _, (a, b) = sigma_Z(h)
    return add_trig(h, a, b)


# --- balance -----------------------------------------------------------------


@dataclass(frozen=True)
class BalanceReport:
    sigma_Z: float
    sigma_U: float
    locally_balanced: bool
    shift: Point
    maximizers: tuple[float, ...]
    witness: tuple[float, float, float] | None


def maximizer_set(h: PiecewiseTrig) -> list[float]:
    """Global maximizers of ``h`` in ``[0, 2 pi)``; plateaus are sampled."""
    info = max_and_argmax(h)
    pts = list(info.points)
    for u, v in info.intervals:
        pts.extend(np.linspace(u, v, 17).tolist())
    return sorted({_wrap(p, TWO_PI) for p in pts})


def balance_witness(points: Sequence[float], rho: float, tol: float = NEST_TOL):
    """A triple ``alpha <= beta <= gamma`` from the periodic set with the balancing gap pattern."""
    w = math.pi / rho
    base = sorted(points)
    ext = sorted(p + k * TWO_PI for p in base for k in range(4))
    for a in base:
        for b in ext:
            if not (tol < b - a <= w + tol):
                continue
            for g in ext:
                if -tol <= g - b < w + tol and g - a >= w - tol:
                    return (a, b, g)
    return None


def is_locally_balanced(h: PiecewiseTrig) -> BalanceReport:
    sz, shift = sigma_Z(h)
    su = sigma_U(h)
    hat = add_trig(h, *shift) if h.order.is_integer else h
    pts = maximizer_set(hat)
    witness = balance_witness(pts, h.rho)
    return BalanceReport(sz, su, witness is not None, shift, tuple(pts), witness)


# --- export ------------------------------------------------------------------


def _fmt(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _svg(poly: LocallyConvexPolygon, nests: Sequence[Nest], circle) -> str:
    pts = poly.points + [e.start for e in poly.edges]
    circles = [(n.center, n.radius, "nest") for n in nests]
    if circle is not None:
        circles.append((circle[0], circle[1], "global"))
    xs = [p[0] for p in pts] + [c[0] - r for c, r, _ in circles] + [c[0] + r for c, r, _ in circles]
    ys = [p[1] for p in pts] + [c[1] - r for c, r, _ in circles] + [c[1] + r for c, r, _ in circles]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-6)
    pad = 0.1 * span
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad
    size = 400.0
    k = size / max(x1 - x0, y1 - y0)

    def X(x: float) -> str:
        return _fmt((x - x0) * k)

    def Y(y: float) -> str:
        return _fmt((y1 - y) * k)

    width = _fmt((x1 - x0) * k)
    height = _fmt((y1 - y0) * k)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" data-uct-version="{SVG_VERSION}" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
    ]
    if not poly.edges:
        p = poly.points[0]
        out.append(f'  <circle class="point" cx="{X(p[0])}" cy="{Y(p[1])}" r="3" fill="black"/>')
    for e in poly.edges:
        out.append(
            f'  <line class="edge" x1="{X(e.start[0])}" y1="{Y(e.start[1])}" '
            f'x2="{X(e.end[0])}" y2="{Y(e.end[1])}" stroke="black" stroke-width="1.5"/>'
        )
    for i, (c, r, kind) in enumerate(circles):
        colour = "#c0392b" if kind == "global" else "#2471a3"
        out.append(
            f'  <circle class="{kind}" cx="{X(c[0])}" cy="{Y(c[1])}" r="{_fmt(r * k)}" '
            f'fill="none" stroke="{colour}" stroke-dasharray="4 3"/>'
        )
        label = "R" if kind == "global" else f"N{i + 1}"
        out.append(
            f'  <text x="{X(c[0])}" y="{Y(c[1])}" font-size="10" fill="{colour}">{label} r={r:.6f}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _csv(poly: LocallyConvexPolygon) -> str:
    rows = ["kind,x,y,angle,length,radius"]
    for v in poly.vertices:
        rows.append(f"vertex,{v.x:.12g},{v.y:.12g},{v.lo:.12g},,")
    for e in poly.edges:
        rows.append(f"edge,{e.start[0]:.12g},{e.start[1]:.12g},{e.angle:.12g},{e.length:.12g},")
    return "\n".join(rows) + "\n"


def _json(poly: LocallyConvexPolygon, nests: Sequence[Nest], circle) -> str:
    import json

    obj = {
        "rho": poly.rho,
        "vertices": [{"x": v.x, "y": v.y, "lo": v.lo, "hi": v.hi} for v in poly.vertices],
        "edges": [
            {"angle": e.angle, "start": list(e.start), "end": list(e.end), "length": e.length} for e in poly.edges
        ],
        "nests": [{"alpha": n.alpha, "radius": n.radius, "center": list(n.center)} for n in nests],
        "circumcircle": None if circle is None else {"center": list(circle[0]), "radius": circle[1]},
    }
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def export_curve(poly: LocallyConvexPolygon, nests: Sequence[Nest] = (), fmt: str = "svg", circle=None) -> bytes:
    """Render the polygon as SVG, CSV or JSON bytes.

    ``circle`` is an optional ``(center, radius)`` drawn as the global circumcircle.
    """
    if fmt == "svg":
        text = _svg(poly, nests, circle)
    elif fmt == "csv":
        text = _csv(poly)
    elif fmt == "json":
        text = _json(poly, nests, circle)
    else:
        raise UnknownFormat(f"unknown curve format {fmt!r}; use svg, csv or json")
    return text.encode("utf-8")
