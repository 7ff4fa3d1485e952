"""Orders and finite atomic angular-density measures.

A measure is a finite list of atoms ``(angle, mass)`` on the circle.  Angles
live in ``[0, 2*pi)``, masses are positive and expressed in the same units as
the density itself (not scaled by ``2*pi``).
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import FormatError, NegativeMass, OrderOutOfRange

TWO_PI = 2.0 * math.pi
ANGLE_MERGE_TOL = 1e-12
LINDELOF_TOL = 1e-9
_RATIONAL_TOL = 1e-12
_MAX_DEN = 10_000


@dataclass(frozen=True)
class Order:
    """Growth order rho > 1/2, with an optional exact rational form."""

    value: float
    num: int | None = None
    den: int | None = None

    def __post_init__(self) -> None:
        v = float(self.value)
        if not math.isfinite(v) or v <= 0.5:
            raise OrderOutOfRange(f"order must satisfy rho > 1/2, got {self.value!r}")
        object.__setattr__(self, "value", v)
        if (self.num is None) != (self.den is None):
            raise ValueError("num and den must be given together")
        if self.num is not None:
            if self.den <= 0 or math.gcd(self.num, self.den) != 1:
                raise ValueError(f"rational form {self.num}/{self.den} is not reduced")
            if abs(self.num / self.den - v) > _RATIONAL_TOL:
                raise ValueError(f"rational form {self.num}/{self.den} does not match {v!r}")

    @classmethod
    def of(cls, x: "Order | float | int | Fraction") -> "Order":
        """Build an order, recovering a small rational form when one fits."""
        if isinstance(x, Order):
            return x
        if isinstance(x, Fraction):
            if x <= Fraction(1, 2):
                raise OrderOutOfRange(f"order must satisfy rho > 1/2, got {x}")
            return cls(float(x), x.numerator, x.denominator)
        v = float(x)
        if not math.isfinite(v) or v <= 0.5:
            raise OrderOutOfRange(f"order must satisfy rho > 1/2, got {x!r}")
        frac = Fraction(v).limit_denominator(_MAX_DEN)
        if abs(float(frac) - v) <= _RATIONAL_TOL:
            return cls(v, frac.numerator, frac.denominator)
        return cls(v)

    @classmethod
    def rational(cls, num: int, den: int) -> "Order":
        return cls.of(Fraction(num, den))

    @property
    def is_integer(self) -> bool:
        if self.den is not None:
            return self.den == 1
        return abs(self.value - round(self.value)) <= _RATIONAL_TOL

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class AtomicMeasure:
    """Sorted atoms with pairwise distinct angles in [0, 2*pi) and positive masses."""

    angles: tuple[float, ...] = ()
    masses: tuple[float, ...] = ()

    def __len__(self) -> int:
        return len(self.angles)

    def __iter__(self):
        return iter(zip(self.angles, self.masses))

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        return normalize(list(self) + list(other))

    @property
    def total_mass(self) -> float:
        return math.fsum(self.masses)

    @property
    def is_empty(self) -> bool:
        return not self.angles


EMPTY = AtomicMeasure()


@dataclass(frozen=True)
class LindelofDefect:
    """The complex moment with its tolerance and the derived regularity flag."""

    value: complex
    tolerance: float = LINDELOF_TOL
    regular: bool = True

    @property
    def magnitude(self) -> float:
        return abs(self.value)


def _reduce_angle(a: float) -> float:
    r = math.fmod(a, TWO_PI)
    if r < 0:
        r += TWO_PI
    if r >= TWO_PI - ANGLE_MERGE_TOL:
        r = 0.0
    return r


def normalize(raw_atoms: Iterable[tuple[float, float]]) -> AtomicMeasure:
    """Reduce angles mod 2*pi, merge near-duplicates and drop zero masses."""
    atoms = []
    for angle, mass in raw_atoms:
        angle, mass = float(angle), float(mass)
        if not (math.isfinite(angle) and math.isfinite(mass)):
            raise ValueError(f"non-finite atom ({angle!r}, {mass!r})")
        if mass < 0:
            raise NegativeMass(f"atom at angle {angle!r} has mass {mass!r}")
        if mass > 0:
            atoms.append((_reduce_angle(angle), mass))
    atoms.sort()
    merged: list[list[float]] = []
    for angle, mass in atoms:
        if merged and angle - merged[-1][0] <= ANGLE_MERGE_TOL:
            merged[-1][1] += mass
        else:
            merged.append([angle, mass])
    # the first and last atom may also touch across 2*pi
    if len(merged) > 1 and merged[0][0] + TWO_PI - merged[-1][0] <= ANGLE_MERGE_TOL:
        merged[0][1] += merged.pop()[1]
    return AtomicMeasure(tuple(a for a, _ in merged), tuple(m for _, m in merged))


def lindelof_defect(measure: AtomicMeasure, order: Order | float) -> LindelofDefect:
    """The rho-th trigonometric moment sum of m_j exp(i rho phi_j)."""
    order = Order.of(order)
    value = sum((m * cmath.exp(1j * order.value * a) for a, m in measure), 0j)
    regular = (not order.is_integer) or abs(value) <= LINDELOF_TOL
    return LindelofDefect(value, LINDELOF_TOL, regular)


# --- text format -----------------------------------------------------------

_TOP_KEYS = {"rho", "atoms"}
_ATOM_KEYS = {"angle", "angle_over_pi", "mass", "mass_times_2pi"}


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"{where}: expected a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise FormatError(f"{where}: number must be finite")
    return v


def _parse_order(value) -> Order:
    if isinstance(value, dict):
        extra = set(value) - {"num", "den"}
        if extra or set(value) != {"num", "den"}:
            raise FormatError(f"rho: expected keys num and den, got {sorted(value)}")
        num, den = value["num"], value["den"]
        for name, v in (("num", num), ("den", den)):
            if isinstance(v, bool) or not isinstance(v, int):
                raise FormatError(f"rho.{name}: expected an integer, got {v!r}")
        if den <= 0:
            raise FormatError("rho.den: must be positive")
        return Order.of(Fraction(num, den))
    return Order.of(_number(value, "rho"))


def measure_from_obj(obj) -> tuple[Order, AtomicMeasure]:
    """Validate a decoded JSON object and build (order, measure)."""
    if not isinstance(obj, dict):
        raise FormatError("top level: expected an object")
    extra = set(obj) - _TOP_KEYS
    if extra:
        raise FormatError(f"top level: unknown keys {sorted(extra)}")
    missing = _TOP_KEYS - set(obj)
    if missing:
        raise FormatError(f"top level: missing keys {sorted(missing)}")
    atoms_obj = obj["atoms"]
    if not isinstance(atoms_obj, list):
        raise FormatError("atoms: expected an array")
    raw = []
    for i, atom in enumerate(atoms_obj):
        where = f"atoms[{i}]"
        if not isinstance(atom, dict):
            raise FormatError(f"{where}: expected an object")
        extra = set(atom) - _ATOM_KEYS
        if extra:
            raise FormatError(f"{where}: unknown keys {sorted(extra)}")
        has_angle = ("angle" in atom) + ("angle_over_pi" in atom)
        has_mass = ("mass" in atom) + ("mass_times_2pi" in atom)
        if has_angle != 1:
            raise FormatError(f"{where}: give exactly one of angle, angle_over_pi")
        if has_mass != 1:
            raise FormatError(f"{where}: give exactly one of mass, mass_times_2pi")
        if "angle" in atom:
            angle = _number(atom["angle"], f"{where}.angle")
        else:
            angle = math.pi * _number(atom["angle_over_pi"], f"{where}.angle_over_pi")
        if "mass" in atom:
            mass = _number(atom["mass"], f"{where}.mass")
        else:
            mass = _number(atom["mass_times_2pi"], f"{where}.mass_times_2pi") / TWO_PI
        raw.append((angle, mass))
    order = _parse_order(obj["rho"])
    return order, normalize(raw)


def parse_measure(text: str) -> tuple[Order, AtomicMeasure]:
    """Parse the JSON measure format."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return measure_from_obj(obj)


def order_to_obj(order: Order):
    if order.num is not None and order.den != 1:
        return {"num": order.num, "den": order.den}
    if order.is_integer:
        return int(round(order.value))
    return order.value


def measure_to_obj(order: Order, measure: AtomicMeasure) -> dict:
    return {
        "rho": order_to_obj(order),
        "atoms": [{"angle": a, "mass": m} for a, m in measure],
    }


def serialize_measure(order: Order, measure: AtomicMeasure) -> str:
    return json.dumps(measure_to_obj(order, measure), indent=2, sort_keys=True) + "\n"


def atoms_from_2pi(pairs: Sequence[tuple[float, float]]) -> AtomicMeasure:
    """Build a measure from (angle, 2*pi*mass) pairs."""
    return normalize((a, w / TWO_PI) for a, w in pairs)
