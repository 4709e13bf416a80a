"""Graded line sets on the slope circle and their thin filling spaces.

A line is a slope with an integer grading (mod 2 in the Z2 group) and a
rational/special flag.  Line sets support the grading difference gr, the
thin-pair test, the filling space theta, exceptionality, the gluing
criterion, and a brute-force verifier for all of the combinatorial
statements these rest on.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import NamedTuple

from .qp1 import (
    ALL,
    ALL_MINUS_POINT,
    EMPTY,
    INF,
    INTERVAL,
    POINTS,
    FillingSpace,
    Slope,
    all_minus_point,
    all_space,
    angle_key,
    contains,
    cyclically_increasing,
    empty_space,
    format_slope,
    interval_space,
    parse_slope,
    point_space,
    sample_interior,
    slope,
    strictly_between,
)

Z = "Z"
Z2 = "Z2"


class Line(NamedTuple):
    s: Slope
    g: int
    eps: int


def make_line(s: Slope, g: int, eps: int, group: str) -> Line:
    if eps not in (0, 1):
        raise ValueError("eps must be 0 (rational) or 1 (special)")
    if group == Z2:
        g %= 2
    return Line(s, g, eps)


@dataclass(frozen=True)
class LineSet:
    lines: frozenset
    group: str

    def __post_init__(self):
        if not self.lines:
            raise ValueError("line set must be non-empty")

    @property
    def slopes(self):
        return sorted({c.s for c in self.lines}, key=angle_key)

    def lines_at(self, s: Slope):
        return [c for c in self.lines if c.s == s]

    def is_rational_at(self, s: Slope) -> bool:
        return all(c.eps == 0 for c in self.lines_at(s))

    def is_special_at(self, s: Slope) -> bool:
        return all(c.eps == 1 for c in self.lines_at(s))

    def is_consistent_at(self, s: Slope) -> bool:
        at = self.lines_at(s)
        return all(
            gr(c, c2, self.group) == 0 for c in at for c2 in at
        )

    def is_consistent(self) -> bool:
        return all(self.is_consistent_at(s) for s in self.slopes)

    def is_trivial(self) -> bool:
        return len(self.slopes) == 1 and all(c.eps == 1 for c in self.lines)


def line_set(lines, group: str) -> LineSet:
    normalized = frozenset(make_line(c[0], c[1], c[2], group) for c in lines)
    return LineSet(normalized, group)


def gr(c: Line, c2: Line, group: str) -> int:
    """Grading difference from c to c2, the floor of the angle lift gap."""
    delta = 0 if angle_key(c2.s) >= angle_key(c.s) else -1
    val = (c2.g - c.g) + delta
    return val % 2 if group == Z2 else val


def shift_line(c: Line, n: int, group: str) -> Line:
    return make_line(c.s, c.g + n, c.eps, group)


def is_thin_pair(C: LineSet, D: LineSet):
    """Whether the pair is thin; returns (flag, witnessing constant or None)."""
    if C.group != D.group:
        raise ValueError("grading group mismatch")
    values = set()
    for c in C.lines:
        for d in D.lines:
            if c.s == d.s:
                if (c.eps, d.eps) not in ((0, 1), (1, 0)):
                    return False, None
            else:
                values.add(gr(c, d, C.group))
    if len(values) > 1:
        return False, None
    return True, (values.pop() if values else None)


def _member(s: Slope, C: LineSet) -> bool:
    probe = line_set([(s, 0, 0)], C.group)
    flag, _ = is_thin_pair(probe, C)
    return flag


def probe_slopes(slopes) -> list:
    """Slopes whose membership determines a filling space supported on the
    given slope list: the slopes themselves plus one sample inside every
    complementary arc."""
    if len(slopes) == 1:
        s0 = slopes[0]
        return [s0, INF if s0 != INF else slope(0)]
    out = list(slopes)
    n = len(slopes)
    for i in range(n):
        out.append(sample_interior(slopes[i], slopes[(i + 1) % n]))
    return out


def theta(C: LineSet) -> FillingSpace:
    """The filling space of C, assembled from finitely many thin tests."""
    slopes = C.slopes
    probes = probe_slopes(slopes)
    if len(slopes) == 1:
        s0 = slopes[0]
        at = _member(probes[0], C)
        off = _member(probes[1], C)
        if at and off:
            return all_space()
        if at:
            return point_space(s0)
        if off:
            return all_minus_point(s0)
        return empty_space()

    n = len(slopes)
    at = [_member(s, C) for s in probes[:n]]
    arcs = [_member(s, C) for s in probes[n:]]

    true_arcs = [i for i in range(n) if arcs[i]]
    if len(true_arcs) == n:
        false_pts = [i for i in range(n) if not at[i]]
        if not false_pts:
            return all_space()
        if len(false_pts) == 1:
            return all_minus_point(slopes[false_pts[0]])
        raise RuntimeError("filling space shape violation: punctured circle")
    if not true_arcs:
        pts = [slopes[i] for i in range(n) if at[i]]
        if not pts:
            return empty_space()
        if len(pts) > 2:
            raise RuntimeError("filling space shape violation: >2 points")
        if len(pts) == 2 and C.group == Z2:
            raise RuntimeError("filling space shape violation: Z2 two points")
        return point_space(*pts)
    if len(true_arcs) != 1:
        raise RuntimeError("filling space shape violation: several arcs")
    i = true_arcs[0]
    a, b = slopes[i], slopes[(i + 1) % n]
    stray = [
        slopes[j]
        for j in range(n)
        if at[j] and slopes[j] not in (a, b)
    ]
    if stray:
        raise RuntimeError("filling space shape violation: stray point")
    return interval_space(a, at[i], b, at[(i + 1) % n])


def is_exceptional(C: LineSet) -> bool:
    if C.group == Z2:
        return False
    slopes = C.slopes
    if len(slopes) != 2:
        return False
    if not C.is_consistent():
        return False
    s, s2 = slopes
    for c in C.lines_at(s):
        for c2 in C.lines_at(s2):
            if gr(c, c2, C.group) != 0 and gr(c2, c, C.group) != 0:
                return True
    return False


class GluingHypothesisError(ValueError):
    pass


def space_boundary(F: FillingSpace):
    if F.shape in (EMPTY, ALL):
        return []
    if F.shape == ALL_MINUS_POINT:
        return [F.a]
    if F.shape == POINTS:
        return list(F.points)
    return [F.a, F.b]


def space_interior_contains(F: FillingSpace, s: Slope) -> bool:
    return contains(F, s) and s not in space_boundary(F)


def space_any_member(F: FillingSpace):
    """Some slope in the space, or None when it is empty."""
    if F.shape == EMPTY:
        return None
    if F.shape == ALL:
        return slope(0)
    if F.shape == ALL_MINUS_POINT:
        return INF if F.a != INF else slope(0)
    if F.shape == POINTS:
        return F.points[0]
    if F.a_closed:
        return F.a
    if F.b_closed:
        return F.b
    return sample_interior(F.a, F.b)


def _covers_circle(spaces, member) -> bool:
    crit = []
    for F in spaces:
        crit.extend(space_boundary(F))
    crit = sorted(set(crit), key=angle_key)
    if not crit:
        crit = [slope(0)]
    probes = list(crit)
    n = len(crit)
    if n == 1:
        probes.append(INF if crit[0] != INF else slope(0))
    else:
        for i in range(n):
            probes.append(sample_interior(crit[i], crit[(i + 1) % n]))
    return all(any(member(F, s) for F in spaces) for s in probes)


def union_covers(F1: FillingSpace, F2: FillingSpace) -> bool:
    return _covers_circle([F1, F2], contains)


def interiors_cover(F1: FillingSpace, F2: FillingSpace) -> bool:
    return _covers_circle([F1, F2], space_interior_contains)


def glue_rhs(C: LineSet, D: LineSet) -> bool:
    """Gluing criterion: filling spaces cover the circle and every shared
    boundary slope is rational on at least one side."""
    if C.group != D.group:
        raise ValueError("grading group mismatch")
    if C.is_trivial() or D.is_trivial():
        raise GluingHypothesisError("trivial line set")
    if is_exceptional(C) and is_exceptional(D):
        raise GluingHypothesisError("both line sets exceptional")
    tc, td = theta(C), theta(D)
    if not union_covers(tc, td):
        return False
    shared = set(space_boundary(tc)) & set(space_boundary(td))
    return all(C.is_rational_at(s) or D.is_rational_at(s) for s in shared)


# === brute-force verification =============================================

FAREY_SLOPES = {}


def farey_slopes(max_level: int):
    """All slopes p/q with |p| <= max_level and q <= max_level, plus inf."""
    if max_level not in FAREY_SLOPES:
        out = {INF}
        for q in range(1, max_level + 1):
            for p in range(-max_level, max_level + 1):
                out.add(slope(p, q))
        FAREY_SLOPES[max_level] = sorted(out, key=angle_key)
    return FAREY_SLOPES[max_level]


@dataclass
class Section2Report:
    cases: int = 0
    checks: dict = field(default_factory=dict)
    excluded_pairs: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def tick(self, name: str):
        self.checks[name] = self.checks.get(name, 0) + 1

    def fail(self, name: str, detail: str):
        self.failures.append(f"{name}: {detail}")


def random_line_set(rng, group, max_level=3, max_size=4, grading_range=(-2, 2)):
    pool = farey_slopes(max_level)
    size = rng.randint(1, max_size)
    lines = []
    for _ in range(size):
        s = rng.choice(pool)
        g = rng.randint(*grading_range)
        eps = rng.randint(0, 1)
        lines.append((s, g, eps))
    return line_set(lines, group)


def _check_gr_axioms(C: LineSet, rep: Section2Report):
    g = C.group
    lines = list(C.lines)
    for c in lines:
        for c2 in lines:
            total = gr(c, c2, g) + gr(c2, c, g)
            want = 0 if c.s == c2.s else -1
            if g == Z2:
                total %= 2
                want %= 2
            if total != want:
                rep.fail("symmetry", f"{c} {c2} in {g}")
            rep.tick("symmetry")
    for c in lines:
        for c2 in lines:
            for c3 in lines:
                if not cyclically_increasing([c.s, c2.s, c3.s]):
                    continue
                lhs = gr(c, c2, g) + gr(c2, c3, g)
                rhs = gr(c, c3, g)
                if g == Z2:
                    lhs %= 2
                if lhs != rhs:
                    rep.fail("transitivity", f"{c} {c2} {c3} in {g}")
                rep.tick("transitivity")
    for c in lines[:2]:
        for c2 in lines[:2]:
            for n in (-2, 0, 3):
                for n2 in (-1, 0, 2):
                    lhs = gr(shift_line(c, n, g), shift_line(c2, n2, g), g)
                    rhs = gr(c, c2, g) + n2 - n
                    if g == Z2:
                        rhs %= 2
                    if lhs != rhs:
                        rep.fail("linearity", f"{c} {c2} {n} {n2} in {g}")
                    rep.tick("linearity")


def _check_single_slope_table(C: LineSet, rep: Section2Report):
    s = C.slopes[0]
    th = theta(C)
    consistent = C.is_consistent_at(s)
    special = C.is_special_at(s)
    if consistent and special:
        want = all_space()
    elif special:
        want = point_space(s)
    elif consistent:
        want = all_minus_point(s)
    else:
        want = empty_space()
    if th != want:
        rep.fail("single_slope_table", f"{C} -> {th}, wanted {want}")
    rep.tick("single_slope_table")


def _check_line_set(C: LineSet, rep: Section2Report):
    _check_gr_axioms(C, rep)
    try:
        th = theta(C)
    except RuntimeError as exc:
        rep.fail("shape", f"{C}: {exc}")
        return
    rep.tick("shape")

    if len(C.slopes) == 1:
        _check_single_slope_table(C, rep)

    for c in C.lines:
        if c.eps == 0 and contains(th, c.s):
            rep.fail("rational_slope_excluded", f"{c} in theta {th}")
        rep.tick("rational_slope_excluded")

    witness = space_any_member(th)
    if witness is not None:
        for s in C.slopes:
            if s != witness and not C.is_consistent_at(s):
                rep.fail("consistency_off_point", f"{C} at {s}")
            rep.tick("consistency_off_point")

    bd = space_boundary(th)
    for s in bd:
        if s not in C.slopes:
            rep.fail("boundary_in_slopes", f"{s} not supporting {C}")
        rep.tick("boundary_in_slopes")
    if not C.is_trivial():
        for s in C.slopes:
            if space_interior_contains(th, s):
                rep.fail("interior_avoids_slopes", f"{s} interior of {th}")
            rep.tick("interior_avoids_slopes")

    if len(C.slopes) > 2 and th.shape in (EMPTY, POINTS):
        inside_supports = th.shape == POINTS and set(th.points) <= set(C.slopes)
        if inside_supports and len(th.points) > 1:
            rep.fail("discrete_theta", f"{C} -> {th}")
        rep.tick("discrete_theta")

    if C.group == Z:
        th2 = theta(line_set(list(C.lines), Z2))
        if th.shape == INTERVAL and th != th2:
            rep.fail("z_interval_matches_z2", f"{th} vs {th2}")
        rep.tick("z_interval_matches_z2")
        if th.shape == POINTS and len(th.points) == 2:
            if set(th.points) != set(C.slopes):
                rep.fail("two_points_slopes", f"{th} vs slopes {C.slopes}")
            rep.tick("two_points_slopes")
            if th2.shape != INTERVAL or set((th2.a, th2.b)) != set(th.points):
                rep.fail("two_points_z2_interval", f"{th} vs {th2}")
            rep.tick("two_points_z2_interval")
    else:
        if th.shape == POINTS and len(th.points) == 2:
            rep.fail("z2_never_two_points", f"{C} -> {th}")
        if is_exceptional(C):
            rep.fail("no_z2_exceptional", f"{C}")
        rep.tick("z2_never_two_points")


def _check_pair(C: LineSet, D: LineSet, rep: Section2Report):
    thin, _ = is_thin_pair(C, D)
    if C.is_trivial() or D.is_trivial():
        return
    if is_exceptional(C) and is_exceptional(D):
        rep.excluded_pairs += 1
        return
    rhs = glue_rhs(C, D)
    if thin != rhs:
        rep.fail("gluing_equivalence", f"{C} | {D}: thin={thin} rhs={rhs}")
    rep.tick("gluing_equivalence")
    if interiors_cover(theta(C), theta(D)) and not thin:
        rep.fail("interior_cover_implies_thin", f"{C} | {D}")
    rep.tick("interior_cover_implies_thin")
    union = union_covers(theta(C), theta(D))
    if union:
        bd = set(space_boundary(theta(C))) & set(space_boundary(theta(D)))
        caps = set(C.slopes) & set(D.slopes)
        if bd != caps:
            rep.fail("caps_match_boundary", f"{C} | {D}: {bd} vs {caps}")
        rep.tick("caps_match_boundary")


def verify_section2(budget: int, seed: int, max_level=3, max_size=4) -> Section2Report:
    """Randomized certification of the combinatorial layer; deterministic in seed."""
    rep = Section2Report()
    for i in range(budget):
        rng = random.Random(seed * 1_000_003 + i)
        group = rng.choice((Z, Z2))
        C = random_line_set(rng, group, max_level, max_size)
        rep.cases += 1
        _check_line_set(C, rep)
        if i % 2 == 0:
            D = random_line_set(rng, group, max_level, max_size)
            _check_pair(C, D, rep)
    return rep


# === text syntax ==========================================================


def parse_line(text: str):
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ValueError(f"cannot parse line {text!r}")
    s_txt, g_txt, e_txt = [t.strip() for t in body[1:-1].split(",")]
    eps = {"r": 0, "s": 1}.get(e_txt)
    if eps is None:
        raise ValueError(f"line flag must be r or s, got {e_txt!r}")
    return parse_slope(s_txt), int(g_txt), eps


def parse_line_set(text: str, group: str) -> LineSet:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ValueError(f"cannot parse line set {text!r}")
    depth = 0
    parts = []
    current = ""
    for ch in body[1:-1]:
        if ch == "(":
            depth += 1
        if ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(current)
            current = ""
        else:
            current += ch
    if current.strip():
        parts.append(current)
    return line_set([parse_line(p) for p in parts], group)


def format_line(c: Line) -> str:
    return f"({format_slope(c.s)},{c.g},{'rs'[c.eps]})"


def format_line_set(C: LineSet) -> str:
    ordered = sorted(C.lines, key=lambda c: (angle_key(c.s), c.g, c.eps))
    return "[" + ",".join(format_line(c) for c in ordered) + "]"
