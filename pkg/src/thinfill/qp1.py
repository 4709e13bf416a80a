"""Exact arithmetic on the rational projective line of slopes.

Slopes p/q live on a circle ordered counter-clockwise: 0, positive slopes
ascending, inf, negative slopes ascending, back to 0.  Everything here is
integer or Fraction arithmetic; no floats anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import NamedTuple


class Slope(NamedTuple):
    p: int
    q: int


INF = Slope(1, 0)


def slope(p, q=1) -> Slope:
    """Normalized slope: gcd 1, q >= 0, infinity stored as (1, 0)."""
    if isinstance(p, Fraction):
        p, q = p.numerator, p.denominator * q
    p = int(p)
    q = int(q)
    if q < 0:
        p, q = -p, -q
    if q == 0:
        if p == 0:
            raise ValueError("0/0 is not a slope")
        return INF
    g = gcd(abs(p), q)
    return Slope(p // g, q // g)


def slope_value(s: Slope) -> Fraction:
    if s.q == 0:
        raise ValueError("infinity has no finite value")
    return Fraction(s.p, s.q)


def parse_slope(text: str) -> Slope:
    """Parse 'inf', an integer, or 'p/q'."""
    text = text.strip()
    if text in ("inf", "-inf", "oo"):
        return INF
    if "/" in text:
        num, den = text.split("/", 1)
        return slope(int(num), int(den))
    return slope(int(text))


def format_slope(s: Slope) -> str:
    if s.q == 0:
        return "inf"
    if s.q == 1:
        return str(s.p)
    return f"{s.p}/{s.q}"


def angle_key(s: Slope):
    """Sort key realizing the counter-clockwise order on the slope circle.

    Nonnegative slopes come first (ascending), then inf, then negative
    slopes (ascending).  Keys compare exactly.
    """
    if s.q == 0:
        return (1, Fraction(0))
    v = Fraction(s.p, s.q)
    return (0, v) if v >= 0 else (2, v)


def cyclically_increasing(slopes) -> bool:
    """True iff the tuple reads counter-clockwise around the circle.

    Repeats are allowed, but a tuple that returns to its first entry
    without being constant does not count as increasing.
    """
    seq = list(slopes)
    if not seq:
        raise ValueError("empty tuple")
    if len(seq) == 1:
        return True
    if seq[0] == seq[-1] and any(s != seq[0] for s in seq):
        return False
    keys = [angle_key(s) for s in seq]
    descents = sum(1 for i in range(len(keys)) if keys[i] > keys[(i + 1) % len(keys)])
    return descents <= 1


def strictly_between(a: Slope, s: Slope, b: Slope) -> bool:
    """True iff s lies strictly inside the counter-clockwise arc from a to b."""
    if s == a or s == b:
        return False
    if a == b:
        return True
    return cyclically_increasing((a, s, b))


def distance(a: Slope, b: Slope) -> int:
    """|p s' - q p'|, the geometric intersection number of the two slopes."""
    return abs(a.p * b.q - a.q * b.p)


@dataclass(frozen=True)
class MappingClass:
    """A 2x2 integer matrix of determinant 1, acting on slopes."""

    m: tuple

    def __post_init__(self):
        (a, b), (c, d) = self.m
        if a * d - b * c != 1:
            raise ValueError("matrix must have determinant 1")

    def __call__(self, s: Slope) -> Slope:
        # act on the plane vector (q, p); a slope is the direction p/q
        (a, b), (c, d) = self.m
        x, y = s.q, s.p
        return slope(c * x + d * y, a * x + b * y)


def mapping_class(a, b, c, d) -> MappingClass:
    return MappingClass(((a, b), (c, d)))


def compose(m1: MappingClass, m2: MappingClass) -> MappingClass:
    """The mapping class acting as m1 after m2."""
    (a, b), (c, d) = m1.m
    (e, f), (g, h) = m2.m
    return MappingClass(
        ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))
    )


TWIST_GENERATORS = (
    mapping_class(1, 0, 1, 1),
    mapping_class(1, 0, -1, 1),
    mapping_class(1, 1, 0, 1),
    mapping_class(1, -1, 0, 1),
)


def random_mapping_class(rng, max_entry=5, max_word=8) -> MappingClass:
    """Random word in the twist generators with all matrix entries bounded."""
    while True:
        m = mapping_class(1, 0, 0, 1)
        for _ in range(rng.randint(0, max_word)):
            m = compose(rng.choice(TWIST_GENERATORS), m)
        if all(abs(e) <= max_entry for row in m.m for e in row):
            return m


def mirror_slope(s: Slope) -> Slope:
    return slope(-s.p, s.q)


def sample_interior(a: Slope, b: Slope) -> Slope:
    """Deterministic slope strictly inside the counter-clockwise arc (a, b).

    Returns the representative with minimal denominator, ties broken by
    smaller absolute numerator (Stern-Brocot style search).
    """
    if a == b:
        raise ValueError("arc endpoints must differ")
    if strictly_between(a, INF, b):
        return INF
    # The arc avoids infinity, so it is a plain numeric interval, possibly
    # unbounded on one side.
    lo = None if a == INF else slope_value(a)
    hi = None if b == INF else slope_value(b)
    q_cap = (a.q + b.q) or 1
    for q in range(1, q_cap + 1):
        if lo is None:
            cands = [min(strict_floor_int(hi * q), 0)]
        elif hi is None:
            cands = [max(strict_ceil_int(lo * q), 0)]
        else:
            cands = range(strict_ceil_int(lo * q), strict_floor_int(hi * q) + 1)
        best = None
        for p in cands:
            if gcd(abs(p), q) != 1:
                continue
            if best is None or (abs(p), p) < (abs(best), best):
                best = p
        if best is not None:
            return Slope(best, q)
    raise RuntimeError("no interior slope found")


def strict_ceil_int(x: Fraction) -> int:
    """Smallest integer strictly greater than x."""
    return x.numerator // x.denominator + 1


def strict_floor_int(x: Fraction) -> int:
    """Largest integer strictly less than x."""
    return -((-x.numerator) // x.denominator) - 1


# === filling spaces: cyclic subsets of the slope circle ====================

EMPTY = "empty"
POINTS = "points"
INTERVAL = "interval"
ALL_MINUS_POINT = "all_minus_point"
ALL = "all"


@dataclass(frozen=True)
class FillingSpace:
    shape: str
    points: tuple = ()
    a: Slope | None = None
    a_closed: bool = False
    b: Slope | None = None
    b_closed: bool = False

    def __post_init__(self):
        if self.shape == POINTS:
            if not 1 <= len(self.points) <= 2 or len(set(self.points)) != len(self.points):
                raise ValueError("point set must hold 1 or 2 distinct slopes")
        if self.shape == INTERVAL and self.a == self.b:
            raise ValueError("interval endpoints must differ")


def empty_space() -> FillingSpace:
    return FillingSpace(EMPTY)


def all_space() -> FillingSpace:
    return FillingSpace(ALL)


def point_space(*pts: Slope) -> FillingSpace:
    ordered = tuple(sorted(set(pts), key=angle_key))
    return FillingSpace(POINTS, points=ordered)


def interval_space(a: Slope, a_closed: bool, b: Slope, b_closed: bool) -> FillingSpace:
    return FillingSpace(INTERVAL, a=a, a_closed=a_closed, b=b, b_closed=b_closed)


def all_minus_point(s: Slope) -> FillingSpace:
    return FillingSpace(ALL_MINUS_POINT, a=s)


def contains(space: FillingSpace, s: Slope) -> bool:
    if space.shape == EMPTY:
        return False
    if space.shape == ALL:
        return True
    if space.shape == ALL_MINUS_POINT:
        return s != space.a
    if space.shape == POINTS:
        return s in space.points
    if s == space.a:
        return space.a_closed
    if s == space.b:
        return space.b_closed
    return strictly_between(space.a, s, space.b)


def mirror_space(space: FillingSpace) -> FillingSpace:
    if space.shape in (EMPTY, ALL):
        return space
    if space.shape == ALL_MINUS_POINT:
        return all_minus_point(mirror_slope(space.a))
    if space.shape == POINTS:
        return point_space(*[mirror_slope(s) for s in space.points])
    return interval_space(
        mirror_slope(space.b), space.b_closed, mirror_slope(space.a), space.a_closed
    )


def transform_space(space: FillingSpace, m: MappingClass) -> FillingSpace:
    """Image of a filling space under a mapping class.  Determinant-one maps
    preserve the cyclic orientation, so intervals map endpoint to endpoint."""
    if space.shape in (EMPTY, ALL):
        return space
    if space.shape == ALL_MINUS_POINT:
        return all_minus_point(m(space.a))
    if space.shape == POINTS:
        return point_space(*[m(s) for s in space.points])
    return interval_space(m(space.a), space.a_closed, m(space.b), space.b_closed)


def format_space(space: FillingSpace) -> str:
    if space.shape == EMPTY:
        return "{}"
    if space.shape == ALL:
        return "QP1"
    if space.shape == ALL_MINUS_POINT:
        return "QP1\\{%s}" % format_slope(space.a)
    if space.shape == POINTS:
        return "{%s}" % ",".join(format_slope(s) for s in space.points)
    left = "[" if space.a_closed else "("
    right = "]" if space.b_closed else ")"
    return f"{left}{format_slope(space.a)},{format_slope(space.b)}{right}"


def parse_space(text: str) -> FillingSpace:
    text = text.strip()
    if text == "{}":
        return empty_space()
    if text == "QP1":
        return all_space()
    if text.startswith("QP1\\{") and text.endswith("}"):
        return all_minus_point(parse_slope(text[5:-1]))
    if text.startswith("{") and text.endswith("}"):
        return point_space(*[parse_slope(t) for t in text[1:-1].split(",")])
    if text[0] in "([" and text[-1] in ")]":
        a_txt, b_txt = text[1:-1].split(",")
        return interval_space(
            parse_slope(a_txt), text[0] == "[", parse_slope(b_txt), text[-1] == "]"
        )
    raise ValueError(f"cannot parse filling space {text!r}")
