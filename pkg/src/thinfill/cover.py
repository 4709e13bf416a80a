"""Planar lift geometry: intersection oracle and grading calculus.

Linear curve components lift to the plane minus the integer lattice.
This module builds exact piecewise-linear standard representatives,
counts transverse crossings against the full deck group (translations
by two lattice units and point reflections at lattice points), and
evaluates the combinatorial Euler-measure formulas on domains cut out
by the grid and the lifts.  It is the geometric cross-check for the
closed-form intersection numbers used by the pairing module.

All arithmetic is exact: vertices and crossings are rational points,
Euler measures are quarter integers, gradings half integers.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .multicurve import (
    ARC,
    HF,
    KH,
    RATIONAL,
    SPECIAL,
    CurveComponent,
    delta_h,
    delta_v,
)
from .qp1 import INF, Slope, slope

Point = tuple[Fraction, Fraction]

# Offset scheme for standard representatives.  Strand x-offsets live at
# scale EPS; nesting tiers shift coordinates by small nudges that keep
# every strand order intact, so two curves drawn together stay
# transverse with no shared coordinates.  Heights are measured in ETA.
EPS = Fraction(1, 8)
ETA = Fraction(1, 64)
RHO = Fraction(1, 1024)

_QUARTER = Fraction(1, 4)
_HALF = Fraction(1, 2)


class DegenerateGeometry(ValueError):
    """A configuration violated the transversality the offsets promise."""


# --------------------------------------------------------------------------
# exact primitives


def _frac_point(x, y) -> Point:
    return (Fraction(x), Fraction(y))


def _sub(p: Point, q: Point) -> Point:
    return (p[0] - q[0], p[1] - q[1])


def _add(p: Point, q: Point) -> Point:
    return (p[0] + q[0], p[1] + q[1])


def _cross(u: Point, v: Point) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def _is_lattice(p: Point) -> bool:
    return p[0].denominator == 1 and p[1].denominator == 1


def _seg_cross(a: Point, b: Point, c: Point, d: Point) -> Point | None:
    """Proper interior crossing of segments ab and cd, or None.

    Touching endpoints and collinear overlap raise: the standard
    representatives are chosen so neither happens, and silent handling
    would hide a calibration bug.
    """
    r = _sub(b, a)
    s = _sub(d, c)
    denom = _cross(r, s)
    qp = _sub(c, a)
    if denom == 0:
        if _cross(qp, r) == 0:
            # collinear: overlap is degenerate, disjoint is fine
            rr = r[0] * r[0] + r[1] * r[1]
            t0 = (qp[0] * r[0] + qp[1] * r[1]) / rr
            t1 = t0 + (s[0] * r[0] + s[1] * r[1]) / rr
            lo, hi = min(t0, t1), max(t0, t1)
            if hi > 0 and lo < 1:
                raise DegenerateGeometry("collinear overlapping segments")
        return None
    t = _cross(qp, s) / denom
    u = _cross(qp, r) / denom
    if t <= 0 or t >= 1 or u <= 0 or u >= 1:
        if (0 <= t <= 1 and u in (0, 1)) or (0 <= u <= 1 and t in (0, 1)):
            if 0 < t < 1 or 0 < u < 1:
                raise DegenerateGeometry("segment endpoint touches another segment")
        return None
    return (a[0] + t * r[0], a[1] + t * r[1])


def _seg_cross_t(a: Point, b: Point, c: Point, d: Point):
    """Like _seg_cross but returns (t_ab, t_cd, point)."""
    r = _sub(b, a)
    s = _sub(d, c)
    denom = _cross(r, s)
    if denom == 0:
        if _seg_cross(a, b, c, d) is not None:  # pragma: no cover - defensive
            raise DegenerateGeometry("collinear overlapping segments")
        return None
    qp = _sub(c, a)
    t = _cross(qp, s) / denom
    u = _cross(qp, r) / denom
    if t <= 0 or t >= 1 or u <= 0 or u >= 1:
        _seg_cross(a, b, c, d)  # re-run for the degeneracy checks
        return None
    return (t, u, (a[0] + t * r[0], a[1] + t * r[1]))


def _winding(loop: list[Point], pt: Point) -> int:
    """Winding number of a closed polyline around pt (counterclockwise
    positive).  pt must avoid the polyline."""
    x, y = pt
    w = 0
    for i in range(len(loop)):
        (x1, y1), (x2, y2) = loop[i], loop[(i + 1) % len(loop)]
        if y1 <= y:
            if y2 > y and _cross((x2 - x1, y2 - y1), (x - x1, y - y1)) > 0:
                w += 1
        elif y2 <= y and _cross((x2 - x1, y2 - y1), (x - x1, y - y1)) < 0:
            w -= 1
    return w


# --------------------------------------------------------------------------
# standard lifts


@dataclass(frozen=True)
class PLLift:
    """A piecewise-linear standard representative in the punctured plane.

    vertices spell one period of the base strand; period is the lattice
    translation gluing its ends (None for arcs, whose endpoints are the
    two lattice points they join).  offsets lists the translation of
    each parallel strand, so the full representative is the union of
    offset copies of the base path.  epsilon records the tier scale the
    coordinates were built at.
    """

    vertices: tuple
    period: tuple | None
    offsets: tuple
    epsilon: Fraction

    def strand_points(self, offset_index: int, k0: int, k1: int) -> list[Point]:
        """Vertices of periods k0..k1-1 of one strand, as a single path."""
        off = self.offsets[offset_index]
        if self.period is None:
            return [_add(v, off) for v in self.vertices]
        px, py = self.period
        pts: list[Point] = []
        for k in range(k0, k1):
            shift = (off[0] + k * px, off[1] + k * py)
            pts.extend(_add(v, shift) for v in self.vertices)
        last = (off[0] + k1 * px, off[1] + k1 * py)
        pts.append(_add(self.vertices[0], last))
        return pts


def _transport_matrix(s: Slope):
    """Integer matrix with determinant one sending the vertical direction
    (0,1) to the direction (q,p) of the slope."""
    p, q = s.p, s.q
    if q == 0:
        return ((1, 0), (0, 1)) if p == 1 else ((-1, 0), (0, -1))
    # solve x*p - y*q = 1 by the extended Euclid step
    x, y = _bezout(p, q)
    return ((x, q), (y, p))


def _bezout(p: int, q: int):
    """x, y with x*p - y*q = 1 (p, q coprime, q > 0), with small x."""
    old_r, r = p, q
    old_s, s = 1, 0
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
    # old_s * p ≡ old_r ≡ ±1 (mod q); normalise to +1
    if old_r == -1:
        old_s = -old_s
    x = old_s % q if q > 1 else 0
    if q == 1 and p != 0:
        x = 0 if p > 0 else 0
    y = (x * p - 1) // q
    assert x * p - y * q == 1
    return x, y


def _apply_matrix(m, pt: Point) -> Point:
    (a, b), (c, d) = m
    return (a * pt[0] + b * pt[1], c * pt[0] + d * pt[1])


def _wrapped_base(n: int, nudge: Fraction, kappa: Fraction, shift: int):
    """One period of the wrapped special representative hugging the
    vertical axis: the form that keeps its turns drawn, used for
    same-slope work where the turns carry the count.

    Per two-unit rise the path runs a leg up the left side, a flat roof
    over the next odd lattice point, a leg back down the right side, a
    shallow turn further right, and a long strand two units up on the
    far right, closed off by a low two-segment run back to the left leg
    of the next unit.  The run stays under every turn it passes, the
    long strand stays right of every roof, and both per-unit growth
    rates keep distinct translates of the same curve transverse.  The
    closing vertex of the period is implied by the period vector.
    """
    grow_x = EPS / (32 * n)
    grow_y = ETA / (8 * n)
    mu = EPS / 4 + nudge
    verts = []
    for k in range(n):
        a = EPS * Fraction(3, 2) + k * grow_x + nudge
        b = EPS * Fraction(3, 5) + k * grow_x + nudge
        c = EPS * Fraction(9, 5) + k * grow_x + nudge
        y = 2 * k + shift
        lift_k = k * grow_y + kappa
        roof = y + 1 + 2 * ETA + lift_k
        verts.extend(
            [
                (-a, y + 5 * ETA + lift_k),
                (-a, roof),
                (b, roof),
                (b, y + 2 * ETA + lift_k),
                (c, y + 4 * ETA + lift_k),
                (c, y + 2 + ETA + lift_k),
                (mu, y + 2 + ETA + ETA / 2 + lift_k),
            ]
        )
    return verts


def _wrapped_lift(theory, c: CurveComponent, tier: int = 0) -> PLLift:
    """The wrapped special representative as a periodic lift, turns
    drawn, one strand per conjugate member in the Floer theory."""
    nudge = tier * EPS / 16
    kappa = tier * ETA / 8
    m = _transport_matrix(c.s)
    shift = 1 if (theory == KH and c.s.p % 2 and c.s.q % 2) else 0
    base = _wrapped_base(c.n, nudge, kappa, shift)
    verts = tuple(_apply_matrix(m, v) for v in base)
    period = _apply_matrix(m, (0, 2 * c.n))
    if theory == HF:
        offs = (_frac_point(0, 0), _apply_matrix(m, (1, 0)))
    else:
        offs = (_frac_point(0, 0),)
    return PLLift(verts, period, offs, EPS)


def standard_lift(theory, c: CurveComponent, tier: int = 0) -> PLLift:
    """Canonical exact representative of a linear component, pulled
    tight for counting against curves of other slopes.

    Rational components lift to straight lines (one per cable strand)
    offset from the lattice.  Special components pull tight onto their
    core line, the one through their punctures: what remains is the
    bundle of parallel passes the curve runs along that line, twice the
    length parameter per member, as strands pushed off the core by less
    than any other curve's clearance from it.  The conjugate-pair
    partner in the Floer theory contributes the same bundle one column
    over.  Arcs lift to the straight lattice segment.  The
    slope-infinity template is transported by the integer matrix taking
    the vertical direction to the requested slope.  tier applies a small
    order-preserving nudge so two curves drawn together never share
    coordinates.
    """
    if c.kind not in (RATIONAL, SPECIAL, ARC):
        raise ValueError(f"no standard lift for kind {c.kind!r}")
    nudge = tier * EPS / 16
    kappa = tier * ETA / 8
    m = _transport_matrix(c.s)
    if c.kind == ARC:
        base = [_frac_point(0, 0), _frac_point(0, 1)]
        verts = tuple(_apply_matrix(m, v) for v in base)
        return PLLift(verts, None, (_frac_point(0, 0),), EPS)
    if c.kind == RATIONAL:
        # one vertex per period: the closing point is implied by the
        # period.  The offset band keeps well clear of the lattice, of
        # arc segments, and of the special bundles hugging their cores.
        x0 = 6 * ETA + tier * ETA / 4
        verts = (_apply_matrix(m, (x0, ETA + kappa)),)
        period = _apply_matrix(m, (0, 2))
        if theory == KH and c.n > 1:
            offs = tuple(
                _apply_matrix(m, (ETA * Fraction(k, 8 * c.n), Fraction(0)))
                for k in range(c.n)
            )
        else:
            offs = (_frac_point(0, 0),)
        return PLLift(verts, period, offs, EPS)
    # special: the pulled-tight bundle.  Strand clearances sit far
    # inside the rational offset band, so transported straight lines
    # never thread between a bundle and its core.
    shift = 1 if (theory == KH and c.s.p % 2 and c.s.q % 2) else 0
    nu = tier * RHO / 8
    gap = RHO / (4 * c.n)
    half = [RHO + k * gap for k in range(c.n)]
    sigmas = [-s for s in reversed(half)] + half
    cores = (Fraction(0), Fraction(1)) if theory == HF else (Fraction(0),)
    offs = tuple(
        _apply_matrix(m, (core + sig + nu, Fraction(0)))
        for core in cores
        for sig in sigmas
    )
    verts = (_apply_matrix(m, (Fraction(0), shift + ETA + kappa)),)
    period = _apply_matrix(m, (0, 2))
    return PLLift(verts, period, offs, EPS)


def lift_segments(theory, c: CurveComponent, tier: int = 0, periods: int = 2):
    """Segments of a few periods of every strand, for drawing."""
    lift = standard_lift(theory, c, tier)
    out = []
    for i in range(len(lift.offsets)):
        pts = lift.strand_points(i, 0, periods) if lift.period else lift.strand_points(i, 0, 1)
        out.extend((pts[j], pts[j + 1]) for j in range(len(pts) - 1))
    return out


# --------------------------------------------------------------------------
# deck-group enumeration


def _path_bbox(pts):
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return min(xs), min(ys), max(xs), max(ys)


def _even_range(lo, hi):
    start = 2 * (-((-lo) // 2)) if lo >= 0 else -2 * ((-lo) // 2) - 2
    k = start
    while k <= hi:
        yield k
        k += 2


def _orbit_paths(lift: PLLift, bbox, pad=2, with_keys=False):
    """Deck-orbit images of the lift clipped near bbox, one polyline per
    image.  The deck group is generated by even translations and the
    point reflections at lattice points, i.e. all maps v -> ±v + τ with
    τ even; images differing by the lift's own period are emitted once,
    tagged with their reduced deck element when with_keys is set.
    """
    x0, y0, x1, y1 = bbox
    x0, y0, x1, y1 = x0 - pad, y0 - pad, x1 + pad, y1 + pad
    for idx in range(len(lift.offsets)):
        if lift.period is None:
            base = [_add(v, lift.offsets[idx]) for v in lift.vertices]
            bx0, by0, bx1, by1 = _path_bbox(base)
            for sign in (1, -1):
                sx0, sx1 = (bx0, bx1) if sign == 1 else (-bx1, -bx0)
                sy0, sy1 = (by0, by1) if sign == 1 else (-by1, -by0)
                for tx in _even_range(x0 - sx1, x1 - sx0):
                    for ty in _even_range(y0 - sy1, y1 - sy0):
                        img = [
                            (sign * v[0] + tx, sign * v[1] + ty) for v in base
                        ]
                        yield (img, (sign, tx, ty)) if with_keys else img
            continue
        px, py = lift.period
        base = [_add(v, lift.offsets[idx]) for v in lift.vertices]
        bx0, by0, bx1, by1 = _path_bbox(base)
        seen = set()
        for sign in (1, -1):
            sx0, sx1 = (bx0, bx1) if sign == 1 else (-bx1, -bx0)
            sy0, sy1 = (by0, by1) if sign == 1 else (-by1, -by0)
            spx, spy = sign * px, sign * py
            for tx in _even_range(x0 - sx1 - abs(px), x1 - sx0 + abs(px)):
                for ty in _even_range(y0 - sy1 - abs(py), y1 - sy0 + abs(py)):
                    key = _reduce_translation(sign, tx, ty, px, py)
                    if key in seen:
                        continue
                    seen.add(key)
                    for img in _periodic_image(
                        base, sign, key[1], key[2], (spx, spy), (x0, y0, x1, y1)
                    ):
                        yield (img, key) if with_keys else img


def _reduce_translation(sign, tx, ty, px, py):
    """Canonical translation modulo the image's own period direction."""
    spx, spy = sign * px, sign * py
    norm = spx * spx + spy * spy
    k = (tx * spx + ty * spy) // norm if norm else 0
    return (sign, tx - k * spx, ty - k * spy)


def _periodic_image(base, sign, tx, ty, per, box):
    """The periodic image as one polyline spanning the periods that can
    reach the box; empty if none can."""
    x0, y0, x1, y1 = box
    bx0, by0, bx1, by1 = _path_bbox(base)
    if sign == -1:
        bx0, bx1 = -bx1, -bx0
        by0, by1 = -by1, -by0
    px, py = per
    # one period spans its own points plus the closing step to the next
    bx0, bx1 = bx0 + min(0, px), bx1 + max(0, px)
    by0, by1 = by0 + min(0, py), by1 + max(0, py)
    ks = []
    span = max(abs(px) + abs(py), 1)
    reach = int((x1 - x0 + y1 - y0) / span) + 4
    for k in range(-reach, reach + 1):
        ox0, oy0 = bx0 + tx + k * px, by0 + ty + k * py
        ox1, oy1 = bx1 + tx + k * px, by1 + ty + k * py
        if ox1 >= x0 and ox0 <= x1 and oy1 >= y0 and oy0 <= y1:
            ks.append(k)
    if not ks:
        return
    k0, k1 = min(ks), max(ks) + 1
    pts: list[Point] = []
    for k in range(k0, k1):
        sh = (tx + k * px, ty + k * py)
        pts.extend((sign * v[0] + sh[0], sign * v[1] + sh[1]) for v in base)
    sh = (tx + k1 * px, ty + k1 * py)
    pts.append((sign * base[0][0] + sh[0], sign * base[0][1] + sh[1]))
    yield pts


def _path_crossings(path1, path2):
    """All proper crossings of two polylines as (t1, t2, point) with the
    t's global parameters along each path."""
    out = []
    for i in range(len(path1) - 1):
        a, b = path1[i], path1[i + 1]
        for j in range(len(path2) - 1):
            hit = _seg_cross_t(a, b, path2[j], path2[j + 1])
            if hit is not None:
                t, u, pt = hit
                out.append((i + t, j + u, pt))
    return out


# --------------------------------------------------------------------------
# intersection counting


def intersection_count(theory, c1: CurveComponent, c2: CurveComponent) -> int:
    """Transverse intersection number of the standard representatives of
    two components in the quotient: one period of the first lift against
    the full deck orbit of the second.

    Distinct slopes are counted raw on the pulled-tight lifts: straight
    strands of two different slopes cross at most once per deck image,
    so no bigons exist and the raw count is already minimal.  An arc
    against a same-slope special is counted on the wrapped
    representative after the mechanical bigon-removal pass, in a
    three-period window certified against four.  A same-slope special
    pair meets in the parallel-pair dimension 2*si + 2 per member, with
    the self-intersection number si measured from the wrapped
    representative against its own deck orbit.  Same-slope straight
    families are disjoint.
    """
    if c1.kind == ARC and c2.kind == ARC:
        raise ValueError("two arcs have no transverse standard position")
    for c in (c1, c2):
        if c.kind not in (RATIONAL, SPECIAL, ARC):
            raise ValueError(f"unsupported kind {c.kind!r}")
    if c1.s == c2.s:
        kinds = {c1.kind, c2.kind}
        if kinds == {SPECIAL} or kinds == {ARC, SPECIAL}:
            return _same_slope_count(theory, c1, c2)
        return 0
    return _raw_count(theory, c1, c2)


def _window_paths(lift: PLLift, k0: int, k1: int):
    return [
        lift.strand_points(i, k0, k1) if lift.period else lift.strand_points(i, 0, 1)
        for i in range(len(lift.offsets))
    ]


def _raw_count(theory, c1, c2, window_shift=(0, 0)) -> int:
    lift1 = standard_lift(theory, c1, 0)
    lift2 = standard_lift(theory, c2, 1)
    total = 0
    for path in _window_paths(lift1, 0, 1):
        if window_shift != (0, 0):
            path = [_add(p, window_shift) for p in path]
        bbox = _path_bbox(path)
        for image in _orbit_paths(lift2, bbox):
            total += len(_path_crossings(path, image))
    return total


def _arc_between(path, t_from, t_to):
    """Polyline along path between two global parameters (either order)."""
    rev = t_from > t_to
    if rev:
        t_from, t_to = t_to, t_from
    i0, i1 = int(t_from), int(t_to)

    def _at(t):
        i = int(t)
        frac = t - i
        a, b = path[i], path[i + 1]
        return (a[0] + frac * (b[0] - a[0]), a[1] + frac * (b[1] - a[1]))

    pts = [_at(t_from)]
    pts.extend(path[i] for i in range(i0 + 1, i1 + 1))
    pts.append(_at(t_to))
    out = [p for k, p in enumerate(pts) if k == 0 or p != pts[k - 1]]
    return out[::-1] if rev else out


def _lattice_points_in(loop):
    x0, y0, x1, y1 = _path_bbox(loop)
    for x in range(int(x0) - 1, int(x1) + 2):
        if x < x0 or x > x1:
            continue
        for y in range(int(y0) - 1, int(y1) + 2):
            if y0 <= y <= y1:
                yield (Fraction(x), Fraction(y))


def _remove_bigons(path1, path2, crossings):
    """Delete pairs of crossings bounding an empty lens between the two
    paths, repeatedly, and return the survivors.

    A candidate pair is adjacent along both paths; it is removable when
    the closed loop formed by the two connecting arcs winds around no
    lattice point.
    """
    live = list(crossings)
    changed = True
    while changed and len(live) >= 2:
        changed = False
        by1 = sorted(live, key=lambda c: c[0])
        by2 = sorted(live, key=lambda c: c[1])
        pos2 = {id(c): k for k, c in enumerate(by2)}
        for k in range(len(by1) - 1):
            u, v = by1[k], by1[k + 1]
            if abs(pos2[id(u)] - pos2[id(v)]) != 1:
                continue
            loop = _arc_between(path1, u[0], v[0])
            back = _arc_between(path2, v[1], u[1])
            loop = loop + back[1:-1]
            if any(_winding(loop, q) for q in _lattice_points_in(loop)):
                continue
            live.remove(u)
            live.remove(v)
            changed = True
            break
    return live


def _windowed_orbit_count(lift1: PLLift, lift2: PLLift, skip_identity=False) -> int:
    """Surviving crossings owned by one middle period of lift1's window
    against lift2's deck orbit, certified in a three-period window
    against a four-period one."""
    results = []
    for window in (3, 4):
        middles = [1] if window == 3 else [1, 2]
        paths = _window_paths(lift1, 0, window)
        per_middle = {m: 0 for m in middles}
        for path in paths:
            bbox = _path_bbox(path)
            for image, key in _orbit_paths(lift2, bbox, with_keys=True):
                if skip_identity and key == (1, 0, 0):
                    continue
                xs = _path_crossings(path, image)
                survivors = _remove_bigons(path, image, xs)
                verts_per_period = len(lift1.vertices)
                for t1, _, _ in survivors:
                    period_index = int(t1) // verts_per_period
                    if period_index in per_middle:
                        per_middle[period_index] += 1
        vals = set(per_middle.values())
        if len(vals) != 1:
            raise DegenerateGeometry(
                f"window periods disagree: {sorted(per_middle.items())}"
            )
        results.append(vals.pop())
    if results[0] != results[1]:
        raise DegenerateGeometry(
            f"three- and four-period windows disagree: {results}"
        )
    return results[0]


def special_self_intersections(n: int) -> int:
    """Self-intersection number of the wrapped special representative
    with n turned units, measured in the quotient: one period against
    its own deck orbit minus the identity, halved because each quotient
    double point lifts to two window crossings."""
    base = _wrapped_base(n, Fraction(0), Fraction(0), 0)
    lift = PLLift(tuple(base), _frac_point(0, 2 * n), (_frac_point(0, 0),), EPS)
    doubled = _windowed_orbit_count(lift, lift, skip_identity=True)
    if doubled % 2:
        raise DegenerateGeometry(f"odd self-crossing total {doubled}")
    return doubled // 2


def _same_slope_count(theory, c1, c2) -> int:
    if c1.kind == ARC:
        c1, c2 = c2, c1
    if c2.kind == SPECIAL and c1.kind == SPECIAL:
        # Parallel copies of the same hooked curve: each double point of
        # the smaller curve forces two crossings of the pair, and the
        # closed-up ends force two more.  The Floer member count doubles
        # this once per conjugate partner.
        si = special_self_intersections(min(c1.n, c2.n))
        members = 2 if theory == HF else 1
        return members * (2 * si + 2)
    # arc against a same-slope special: the arc runs along the core the
    # special wraps, so the wrapped representative carries the count
    lift1 = _wrapped_lift(theory, c1, 0)
    lift2 = standard_lift(theory, c2, 1)
    return _windowed_orbit_count(lift1, lift2)


def deck_invariant_count(theory, c1, c2, translate=(2, 2)) -> int:
    """intersection_count recomputed with the fundamental window moved by
    a deck translation; equal to the plain count for valid inputs."""
    tx, ty = translate
    if tx % 2 or ty % 2:
        raise ValueError("window translations live in the even lattice")
    if c1.s == c2.s:
        return intersection_count(theory, c1, c2)
    return _raw_count(theory, c1, c2, window_shift=(Fraction(tx), Fraction(ty)))


# --------------------------------------------------------------------------
# arrangements, faces, Euler measure


@dataclass(frozen=True)
class Face:
    cycle: tuple
    euler: Fraction
    area2: Fraction

    def contains(self, pt: Point) -> bool:
        return _winding(list(self.cycle), pt) != 0


@dataclass(frozen=True)
class Arrangement:
    faces: tuple

    def face_at(self, pt: Point):
        for k, f in enumerate(self.faces):
            if f.contains(pt):
                return k
        return None

    def sample(self, k: int) -> Point:
        return _face_sample(self.faces[k].cycle)


@dataclass(frozen=True)
class Domain:
    """Formal integer combination of bounded faces of an arrangement."""

    arrangement: Arrangement
    multiplicities: tuple

    def __add__(self, other: "Domain") -> "Domain":
        if other.arrangement is not self.arrangement:
            raise ValueError("domains live on one arrangement")
        mults = dict(self.multiplicities)
        for k, m in other.multiplicities:
            mults[k] = mults.get(k, 0) + m
        return Domain(
            self.arrangement, tuple(sorted((k, m) for k, m in mults.items() if m))
        )


def euler_measure(d: Domain) -> Fraction:
    """Sum of per-face Euler measures weighted by multiplicity.

    Each face is a disk with right-angle geometry at its sharp corners:
    its measure is one minus a quarter per convex corner plus a quarter
    per reflex corner, corners being counted only at lattice points and
    transverse crossing vertices (bend vertices of a single curve are
    smooth).
    """
    total = Fraction(0)
    for k, mult in d.multiplicities:
        total += mult * d.arrangement.faces[k].euler
    return total


def _angle_key(d: Point):
    dx, dy = d
    if dx > 0 and dy >= 0:
        return (0, dy / dx)
    if dx <= 0 and dy > 0:
        return (1, -dx / dy)
    if dx < 0 and dy <= 0:
        return (2, dy / dx)
    return (3, -dx / dy)


def build_arrangement(segments) -> Arrangement:
    """Exact planar arrangement of the given segments.

    Segments are split at pairwise crossings and at lattice points lying
    on them; bounded faces are read off with their boundary cycles and
    Euler measures.  Crossing-created vertices and lattice points are
    the sharp corners; shared polyline endpoints are smooth bends.
    """
    segs = []
    for a, b in segments:
        a = (Fraction(a[0]), Fraction(a[1]))
        b = (Fraction(b[0]), Fraction(b[1]))
        if a != b:
            segs.append((a, b))
    sharp: set = set()
    splits: list[list] = [[] for _ in segs]
    for i, (a, b) in enumerate(segs):
        # lattice points interior to the segment
        x0, y0, x1, y1 = _path_bbox([a, b])
        for lp in _lattice_points_in([a, b, a]):
            if lp in (a, b):
                sharp.add(lp)
                continue
            r = _sub(b, a)
            if _cross(r, _sub(lp, a)) == 0:
                t = _param_on(a, b, lp)
                if 0 < t < 1:
                    splits[i].append((t, lp))
                    sharp.add(lp)
        if _is_lattice(a):
            sharp.add(a)
        if _is_lattice(b):
            sharp.add(b)
        for j in range(i + 1, len(segs)):
            c, d = segs[j]
            hit = _split_hit(a, b, c, d)
            if hit is None:
                continue
            t, u, pt, proper = hit
            if 0 < t < 1:
                splits[i].append((t, pt))
            if 0 < u < 1:
                splits[j].append((u, pt))
            if proper:
                sharp.add(pt)
    edges = set()
    for i, (a, b) in enumerate(segs):
        cuts = sorted(set([(Fraction(0), a), (Fraction(1), b)] + splits[i]))
        for k in range(len(cuts) - 1):
            p, q = cuts[k][1], cuts[k + 1][1]
            if p != q:
                edges.add((p, q) if p <= q else (q, p))
    return _faces_from_edges(edges, sharp)


def _param_on(a: Point, b: Point, pt: Point) -> Fraction:
    r = _sub(b, a)
    if r[0] != 0:
        return (pt[0] - a[0]) / r[0]
    return (pt[1] - a[1]) / r[1]


def _split_hit(a, b, c, d):
    """Crossing or touching point of two segments with both parameters,
    plus whether it is a transverse interior crossing."""
    r = _sub(b, a)
    s = _sub(d, c)
    denom = _cross(r, s)
    qp = _sub(c, a)
    if denom == 0:
        return None
    t = _cross(qp, s) / denom
    u = _cross(qp, r) / denom
    if t < 0 or t > 1 or u < 0 or u > 1:
        return None
    pt = (a[0] + t * r[0], a[1] + t * r[1])
    proper = 0 < t < 1 and 0 < u < 1
    return t, u, pt, proper


def _faces_from_edges(edges, sharp) -> Arrangement:
    outgoing: dict = {}
    half = []
    for p, q in edges:
        half.append((p, q))
        half.append((q, p))
        outgoing.setdefault(p, []).append(q)
        outgoing.setdefault(q, []).append(p)
    order = {}
    for v, nbrs in outgoing.items():
        ordered = sorted(set(nbrs), key=lambda w: _angle_key(_sub(w, v)))
        order[v] = {w: k for k, w in enumerate(ordered)}
        outgoing[v] = ordered
    next_he = {}
    for p, q in half:
        nbrs = outgoing[q]
        k = order[q][p]
        next_he[(p, q)] = (q, nbrs[(k - 1) % len(nbrs)])
    faces = []
    seen = set()
    for he in half:
        if he in seen:
            continue
        cycle = []
        cur = he
        while cur not in seen:
            seen.add(cur)
            cycle.append(cur[0])
            cur = next_he[cur]
        if cur != he:
            continue
        area2 = Fraction(0)
        for i in range(len(cycle)):
            p, q = cycle[i], cycle[(i + 1) % len(cycle)]
            area2 += _cross(p, q)
        if area2 <= 0:
            continue
        if len(set(cycle)) != len(cycle):
            continue
        faces.append(Face(tuple(cycle), _face_euler(cycle, sharp), area2))
    return Arrangement(tuple(faces))


def _face_euler(cycle, sharp) -> Fraction:
    e = Fraction(1)
    n = len(cycle)
    for i in range(n):
        v = cycle[i]
        if v not in sharp:
            continue
        u = _sub(v, cycle[(i - 1) % n])
        w = _sub(cycle[(i + 1) % n], v)
        crs = _cross(u, w)
        if crs > 0:
            e -= _QUARTER
        elif crs < 0:
            e += _QUARTER
    return e


def _face_sample(cycle) -> Point:
    n = len(cycle)
    for i in range(n):
        v = cycle[i]
        u = _sub(cycle[(i - 1) % n], v)
        w = _sub(cycle[(i + 1) % n], v)
        if _cross((-u[0], -u[1]), w) <= 0:
            continue
        shrink = Fraction(1, 4)
        for _ in range(64):
            cand = (
                v[0] + shrink * (u[0] + w[0]),
                v[1] + shrink * (u[1] + w[1]),
            )
            if _winding(list(cycle), cand) != 0 and not _on_cycle(cycle, cand):
                return cand
            shrink /= 2
    raise DegenerateGeometry("no interior sample for face")


def _on_cycle(cycle, pt) -> bool:
    n = len(cycle)
    for i in range(n):
        a, b = cycle[i], cycle[(i + 1) % n]
        r = _sub(b, a)
        if _cross(r, _sub(pt, a)) == 0:
            t = _param_on(a, b, pt)
            if 0 <= t <= 1:
                return True
    return False


def domain_from_loop(arr: Arrangement, loop, orientation: int = 1) -> Domain:
    """Domain whose face multiplicities are the winding numbers of the
    closed loop (orientation +1 counterclockwise-positive, -1 clockwise-
    positive) at face samples."""
    mults = []
    for k in range(len(arr.faces)):
        w = _winding(loop, _face_sample(arr.faces[k].cycle))
        if w:
            mults.append((k, orientation * w))
    return Domain(arr, tuple(mults))


# --------------------------------------------------------------------------
# gradings of intersection points


def _locate_on_images(lift: PLLift, pt: Point):
    """The deck image of the lift through pt, as (polyline, t)."""
    bbox = (pt[0], pt[1], pt[0], pt[1])
    for image in _orbit_paths(lift, bbox, pad=3):
        for i in range(len(image) - 1):
            a, b = image[i], image[i + 1]
            r = _sub(b, a)
            if _cross(r, _sub(pt, a)) == 0:
                t = _param_on(a, b, pt)
                if 0 <= t < 1:
                    return image, i + t
    raise ValueError("point does not lie on the standard lift")


def _grid_hits_on_segment(a: Point, b: Point):
    """Grid-line crossings interior to segment ab as (t, point, axis)."""
    hits = []
    r = _sub(b, a)
    if r[0] != 0:
        lo, hi = sorted((a[0], b[0]))
        m = int(lo) if lo == int(lo) else int(lo) + (1 if lo > 0 else 0)
        for x in range(int(lo) - 1, int(hi) + 2):
            if lo < x < hi:
                t = (Fraction(x) - a[0]) / r[0]
                if 0 < t < 1:
                    hits.append((t, (Fraction(x), a[1] + t * r[1]), "v"))
    if r[1] != 0:
        lo, hi = sorted((a[1], b[1]))
        for y in range(int(lo) - 1, int(hi) + 2):
            if lo < y < hi:
                t = (Fraction(y) - a[1]) / r[1]
                if 0 < t < 1:
                    hits.append((t, (a[0] + t * r[0], Fraction(y)), "h"))
    return sorted(hits)


def _next_grid_crossing(path, t0, forward: bool):
    """First grid crossing strictly before/after parameter t0 on path."""
    n = len(path) - 1
    if forward:
        rng = range(int(t0), n)
    else:
        rng = range(int(t0), -1, -1)
    for i in rng:
        hits = _grid_hits_on_segment(path[i], path[i + 1])
        if not forward:
            hits = hits[::-1]
        for t, pt, axis in hits:
            tg = i + t
            if forward and tg > t0:
                return tg, pt, axis
            if not forward and tg < t0:
                return tg, pt, axis
    raise DegenerateGeometry("no grid crossing within the image window")


def _reference_delta(c: CurveComponent, axis: str) -> Fraction:
    # crossing a vertical lattice line is a vertical-arc generator
    return delta_v(c) if axis == "v" else delta_h(c)


def _staircase(a: Point, b: Point):
    """Route from a to b along lattice lines only (each endpoint lies on
    one).  Any two such routes differ by unit grid squares, which carry
    zero Euler measure, so the route choice never changes a grading."""
    av, bv = a[0].denominator == 1, b[0].denominator == 1
    pts = [a]
    if av and not bv:
        pts.append((a[0], b[1]))
    elif not av and bv:
        pts.append((b[0], a[1]))
    elif av and bv:
        if a[0] != b[0]:
            level = Fraction(min(floor(a[1]), floor(b[1])))
            pts.append((a[0], level))
            pts.append((b[0], level))
    else:
        if a[1] != b[1]:
            rail = Fraction(min(floor(a[0]), floor(b[0])))
            pts.append((rail, a[1]))
            pts.append((rail, b[1]))
    pts.append(b)
    return [p for k, p in enumerate(pts) if k == 0 or p != pts[k - 1]]


def grading_of_intersection(theory, c1, c2, point) -> Fraction:
    """Grading of a transverse intersection of the standard lifts, via a
    connecting domain to the nearest generator on each curve.

    The domain runs from the point forward along the first curve to a
    grid crossing, along grid lines to a grid crossing behind the point
    on the second curve, and back; its Euler measure enters the
    two-curve grading formula of the respective theory.  For distinct
    slopes the result agrees with the algebraic pair grading.
    """
    if theory not in (HF, KH):
        raise ValueError("gradings of intersections live in HF or Kh")
    if c1.s == c2.s and c1.kind == c2.kind == RATIONAL:
        raise ValueError("parallel standard lifts do not intersect")
    point = (Fraction(point[0]), Fraction(point[1]))
    lift1 = standard_lift(theory, c1, 0)
    lift2 = standard_lift(theory, c2, 1)
    path1, t1 = _locate_on_images(lift1, point)
    path2, t2 = _locate_on_images(lift2, point)
    tx, x_ref, ax1 = _next_grid_crossing(path1, t1, forward=True)
    ty, y_ref, ax2 = _next_grid_crossing(path2, t2, forward=False)
    dx = _reference_delta(c1, ax1)
    dy = _reference_delta(c2, ax2)
    loop = _arc_between(path1, t1, tx)
    loop += _staircase(x_ref, y_ref)[1:]
    loop += _arc_between(path2, ty, t2)[1:]
    if loop[-1] == loop[0]:
        loop = loop[:-1]
    e = _loop_euler(theory, loop, path1, path2)
    if theory == HF:
        return dy - dx + _HALF - 2 * e
    return dy - dx - _HALF + 2 * e


def _loop_euler(theory, loop, path1, path2) -> Fraction:
    x0, y0, x1, y1 = _path_bbox(loop)
    gx0, gx1 = int(x0) - 1, int(x1) + 2
    gy0, gy1 = int(y0) - 1, int(y1) + 2
    segs = []
    for x in range(gx0, gx1 + 1):
        segs.append(((Fraction(x), Fraction(gy0)), (Fraction(x), Fraction(gy1))))
    for y in range(gy0, gy1 + 1):
        segs.append(((Fraction(gx0), Fraction(y)), (Fraction(gx1), Fraction(y))))
    for path in (path1, path2):
        segs.extend(
            (path[i], path[i + 1])
            for i in range(len(path) - 1)
            if _boxes_meet(path[i], path[i + 1], gx0, gy0, gx1, gy1)
        )
    arr = build_arrangement(segs)
    # positive multiplicities bound clockwise in the Floer convention and
    # counterclockwise in the Khovanov one
    orientation = -1 if theory == HF else 1
    dom = domain_from_loop(arr, loop, orientation)
    return euler_measure(dom)


def _boxes_meet(a, b, gx0, gy0, gx1, gy1) -> bool:
    x0, y0, x1, y1 = _path_bbox([a, b])
    return x1 >= gx0 and x0 <= gx1 and y1 >= gy0 and y0 <= gy1


def same_slope_rational_gradings(theory, c1, c2):
    """The two intersection gradings of a same-slope rational pair, read
    from a perturbed representative with one transverse bump; they are
    consecutive."""
    if c1.s != c2.s or c1.kind != RATIONAL or c2.kind != RATIONAL:
        raise ValueError("expected two rational components of one slope")
    lift1 = standard_lift(theory, c1, 0)
    path1 = lift1.strand_points(0, -1, 3)
    lift2 = standard_lift(theory, c2, 1)
    base2 = lift2.strand_points(0, -1, 3)
    # push one interior vertex of the second curve across the first
    m = _transport_matrix(c1.s)
    normal = _apply_matrix(m, (Fraction(1), Fraction(0)))
    diff = _sub(path1[0], base2[0])
    if normal[0] * diff[0] + normal[1] * diff[1] < 0:
        normal = (-normal[0], -normal[1])
    mid = base2[2]
    bump = (
        mid[0] + Fraction(3, 16) * normal[0],
        mid[1] + Fraction(3, 16) * normal[1],
    )
    path2 = [base2[0], base2[1], bump, base2[3], base2[4]]
    xs = _path_crossings(path1, path2)
    if len(xs) != 2:
        raise DegenerateGeometry(f"expected a two-point bump, got {len(xs)}")
    out = []
    for _, _, pt in xs:
        out.append(_perturbed_grading(theory, c1, c2, path1, path2, pt, xs))
    return tuple(sorted(out))


def _perturbed_grading(theory, c1, c2, path1, path2, point, xs):
    t1 = _param_on_path(path1, point)
    t2 = _param_on_path(path2, point)
    tx, x_ref, ax1 = _next_grid_crossing(path1, t1, forward=True)
    ty, y_ref, ax2 = _next_grid_crossing(path2, t2, forward=False)
    dx = _reference_delta(c1, ax1)
    dy = _reference_delta(c2, ax2)
    loop = _arc_between(path1, t1, tx)
    loop += _staircase(x_ref, y_ref)[1:]
    loop += _arc_between(path2, ty, t2)[1:]
    if loop[-1] == loop[0]:
        loop = loop[:-1]
    e = _loop_euler(theory, loop, path1, path2)
    if theory == HF:
        return dy - dx + _HALF - 2 * e
    return dy - dx - _HALF + 2 * e


def _param_on_path(path, pt) -> Fraction:
    for i in range(len(path) - 1):
        a, b = path[i], path[i + 1]
        r = _sub(b, a)
        if _cross(r, _sub(pt, a)) == 0:
            t = _param_on(a, b, pt)
            if 0 <= t < 1:
                return i + t
    raise ValueError("point not on path")


def intersection_points(theory, c1, c2):
    """The crossing points of one period of the first lift with the deck
    orbit of the second; gradings can be evaluated at each."""
    if c1.s == c2.s:
        raise ValueError("period windows need distinct slopes")
    lift1 = standard_lift(theory, c1, 0)
    lift2 = standard_lift(theory, c2, 1)
    pts = []
    for path in _window_paths(lift1, 0, 1):
        bbox = _path_bbox(path)
        for image in _orbit_paths(lift2, bbox):
            pts.extend(pt for _, _, pt in _path_crossings(path, image))
    return pts
