from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Iterable, NamedTuple

from django.conf import settings

from .laurent import check_q


class OrbitRangeError(ValueError):
    """An orbit coordinate overflows the float range."""


class Point3(NamedTuple):
    x1: float
    x2: float
    x3: float


class MapTag(str, Enum):
    F21 = "F21"
    F12 = "F12"
    F22 = "F22"


class OrbitTag(Enum):
    OMEGA_001 = (0, 0, 1)
    OMEGA_110 = (1, 1, 0)
    OMEGA_100 = (1, 0, 0)
    OMEGA_010 = (0, 1, 0)
    OMEGA_000 = (0, 0, 0)

    @classmethod
    def from_text(cls, text: str) -> "OrbitTag":
        try:
            coordinates = tuple(int(part) for part in text.split(","))
            return cls(coordinates)
        except ValueError:
            raise ValueError(f"unknown orbit base {text!r}") from None

    @property
    def base(self) -> Point3:
        return Point3(*(float(x) for x in self.value))

    @property
    def label(self) -> str:
        return ",".join(str(x) for x in self.value)

    @property
    def degenerate_axes(self) -> tuple[bool, bool, bool]:
        """Axes (m, l, k) whose exponent does not move the base point."""
        b1, b2, b3 = self.value
        m_free = b1 + b3 - 1 != 0
        l_free = b2 + b3 - 1 != 0
        k_free = b3 != 1 or m_free or l_free
        return (not m_free, not l_free, not k_free)


@dataclass(frozen=True)
class OrbitPoint:
    base: Point3
    exponents: tuple[int, int, int]
    value: Point3

    @property
    def is_physical(self) -> bool:
        return all(e >= 0 for e in self.exponents)


@dataclass(frozen=True)
class BoundednessReport:
    base: Point3
    q_value: float
    horizon: int
    max_norm: float
    forward_max_norm: float
    forward_in_unit_cube: bool
    constant: bool
    unbounded: bool
    bounded: bool


def _step(tag: MapTag, p: Point3, q2: float) -> Point3:
    x1, x2, x3 = p
    if tag is MapTag.F22:
        return Point3(q2 * x1, q2 * x2, q2 * (x3 - 1.0) + 1.0)
    if tag is MapTag.F21:
        return Point3(q2 * x1 - (1.0 - q2) * (x3 - 1.0), x2, x3)
    return Point3(x1, q2 * x2 - (1.0 - q2) * (x3 - 1.0), x3)


def apply_map(tag: MapTag, power: int, p: Iterable[float], q_value: float) -> Point3:
    """Iterate one of the maps |power| times; a negative power iterates the inverse."""
    q_value = check_q(q_value)
    tag = MapTag(tag)
    q2 = q_value ** 2 if power >= 0 else q_value ** -2
    point = Point3(*p)
    for _ in range(abs(power)):
        point = _step(tag, point, q2)
    return point


def _scaled(q2: float, exponent: int, factor: float) -> float:
    # a zero factor pins the coordinate even where q2 ** exponent overflows
    if factor == 0:
        return 0.0
    return factor * q2 ** exponent


def orbit_value(base: Iterable[float], exponents: tuple[int, int, int], q_value: float) -> Point3:
    x1, x2, x3 = base
    m, l, k = exponents
    q2 = q_value ** 2
    shift = x3 - 1.0
    try:
        point = Point3(
            _scaled(q2, k + m, x1 + shift) - _scaled(q2, k, shift),
            _scaled(q2, k + l, x2 + shift) - _scaled(q2, k, shift),
            _scaled(q2, k, shift) + 1.0,
        )
    except OverflowError:
        point = None
    if point is None or not all(math.isfinite(x) for x in point):
        raise OrbitRangeError(f"orbit point {tuple(exponents)} overflows at q={q_value}")
    return point


def orbit_patch(
    base: OrbitTag,
    range_m: range,
    range_l: range,
    range_k: range,
    q_value: float,
    distinct: bool = False,
) -> list[OrbitPoint]:
    """
    Closed-form orbit points over a box of exponents, enumerated with k fastest.

    With ``distinct`` the degenerate axes of the base are pinned to the first
    value of their range, so each orbit value appears once.
    """
    q_value = check_q(q_value)
    ranges = [range_m, range_l, range_k]
    if distinct:
        for axis, degenerate in enumerate(base.degenerate_axes):
            if degenerate and len(ranges[axis]):
                ranges[axis] = ranges[axis][:1]
    return [
        OrbitPoint(base.base, exponents, orbit_value(base.base, exponents, q_value))
        for exponents in product(*ranges)
    ]


def _exponent(ratio: float, q2: float) -> int | None:
    if not (ratio > 0.0) or not math.isfinite(ratio):
        return None
    return round(math.log(ratio) / math.log(q2))


def orbit_membership(
    p: Iterable[float],
    base: OrbitTag,
    q_value: float,
    tol: float,
    search_box: int | None = None,
) -> tuple[int, int, int] | None:
    """
    Recover integer exponents (m, l, k) with |value(m, l, k) - p| < tol.

    k is read from a degenerate coordinate when the base has one (that
    coordinate equals q^(2k)(1 - x3) and keeps relative precision), otherwise
    from x3.  Degenerate axes get exponent 0.
    """
    q_value = check_q(q_value)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if search_box is None:
        search_box = getattr(settings, "QMB_ORBIT_SEARCH_BOX", 40)
    p = Point3(*p)
    q2 = q_value ** 2
    b1, b2, b3 = base.value
    m_degenerate, l_degenerate, k_degenerate = base.degenerate_axes

    if k_degenerate:
        k = 0
    elif m_degenerate and b3 != 1:
        k = _exponent(p.x1 / (1 - b3), q2)
    elif l_degenerate and b3 != 1:
        k = _exponent(p.x2 / (1 - b3), q2)
    else:
        k = _exponent((p.x3 - 1.0) / (b3 - 1), q2)
    if k is None or abs(k) > search_box:
        return None

    def solve(coordinate: float, b: int, degenerate: bool) -> int | None:
        if degenerate:
            return 0
        return _exponent((coordinate * q2 ** -k + (b3 - 1)) / (b + b3 - 1), q2)

    m = solve(p.x1, b1, m_degenerate)
    l = solve(p.x2, b2, l_degenerate)
    if m is None or l is None:
        return None
    exponents = (m, l, k)
    if any(abs(e) > search_box for e in exponents):
        return None
    value = orbit_value(base.base, exponents, q_value)
    if max(abs(a - b) for a, b in zip(value, p)) < tol:
        return exponents
    return None


def boundedness_probe(base: Iterable[float], q_value: float, horizon: int) -> BoundednessReport:
    q_value = check_q(q_value)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    base = Point3(*base)
    norms = {}
    forward_in_cube = True
    for k in range(-horizon, horizon + 1):
        try:
            point = orbit_value(base, (0, 0, k), q_value)
        except OrbitRangeError:
            norms[k] = math.inf
            continue
        norms[k] = max(abs(x) for x in point)
        if k >= 0 and not all(0.0 <= x <= 1.0 for x in point):
            forward_in_cube = False
    return BoundednessReport(
        base=base,
        q_value=q_value,
        horizon=horizon,
        max_norm=max(norms.values()),
        forward_max_norm=max(norms[k] for k in range(horizon + 1)),
        forward_in_unit_cube=forward_in_cube,
        constant=base == Point3(0.0, 0.0, 1.0),
        unbounded=base.x3 > 1.0,
        bounded=0.0 <= base.x3 <= 1.0,
    )


def admissible_bases() -> tuple[OrbitTag, ...]:
    return tuple(OrbitTag)


def classify_base(point: Iterable[float], q_value: float, horizon: int = 20) -> str:
    point = Point3(*point)
    for tag in OrbitTag:
        if point == tag.base:
            return "admissible"
    if boundedness_probe(point, q_value, horizon).unbounded:
        return "unbounded"
    return "excluded"
