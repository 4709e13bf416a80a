"""Graded multicurves: linear immersed-curve invariants with exact
half-integer gradings, for the three intersection theories.

Components are rational curves (with local systems), special curves
(length parameter), or arcs.  The stored grading is the horizontal-line
grading except at slope 0, where only the vertical one exists.  The module
provides the pair grading, mirroring, twisting by mapping classes, and the
reduction that forgets geometry and keeps one graded line per component.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from fractions import Fraction

from .lineset import LineSet, Z2, gr, make_line
from .localsys import (
    LocalSystem,
    companion_system,
    format_local_system,
    is_inhibited,
    jordan_system,
    parse_local_system,
    trivial_system,
)
from .qp1 import (
    INF,
    MappingClass,
    Slope,
    angle_key,
    format_slope,
    mirror_slope,
    parse_slope,
    slope,
    slope_value,
    strictly_between,
)

HF = "HF"
KH = "Kh"
BN = "BN"
THEORIES = (HF, KH, BN)

RATIONAL = "rational"
SPECIAL = "special"
ARC = "arc"

HALF = Fraction(1, 2)

PUNCTURE_CLASSES = {1: (0, 0), 2: (0, 1), 3: (1, 1), 4: (1, 0)}
CLASS_PUNCTURES = {v: k for k, v in PUNCTURE_CLASSES.items()}


@dataclass(frozen=True)
class CurveComponent:
    kind: str
    s: Slope
    n: int
    delta: Fraction
    mult: int = 1
    X: LocalSystem | None = None
    punctures: tuple | None = None


def curve_component(kind, s, n, delta, mult=1, X=None, punctures=None) -> CurveComponent:
    delta = Fraction(delta)
    if delta.denominator not in (1, 2):
        raise ValueError("gradings live in half-integers")
    if mult < 1 or n < 1:
        raise ValueError("multiplicity and length must be positive")
    if punctures is not None:
        punctures = tuple(punctures)
        if len(punctures) != 2 or not set(punctures) <= {1, 2, 3, 4}:
            raise ValueError("puncture pair must be two labels from 1..4")
    return CurveComponent(kind, s, int(n), delta, int(mult), X, punctures)


@dataclass(frozen=True)
class Multicurve:
    theory: str
    components: tuple

    def __post_init__(self):
        if self.theory not in THEORIES:
            raise ValueError(f"unknown theory {self.theory!r}")
        if not self.components:
            raise ValueError("multicurve must be non-empty")
        for c in self.components:
            _validate_component(self.theory, c)
        _validate_liftability(self.components)

    @property
    def slopes(self):
        return sorted({c.s for c in self.components}, key=angle_key)


def _validate_component(theory, c):
    if c.kind == ARC:
        if theory != BN:
            raise ValueError("arcs only exist in the arc theory")
        return
    if c.kind == SPECIAL:
        if theory == BN:
            raise ValueError("special components are not part of the arc theory")
        if theory == HF and c.X is not None:
            raise ValueError("special components carry the identity local system")
        if theory == KH and c.punctures is not None:
            raise ValueError("puncture pairs are declared for HF specials only")
        return
    if c.kind == RATIONAL:
        if c.punctures is not None:
            raise ValueError("puncture pairs are declared for HF specials only")
        if theory != HF and c.X is not None and c.X != trivial_system():
            raise ValueError("only trivial local systems are pairable outside HF")
        if theory == HF and c.n != 1:
            raise ValueError("HF rational components use local systems, not cables")
        return
    raise ValueError(f"unknown component kind {c.kind!r}")


def _vertical_residue(c) -> Fraction:
    # the vertical-coordinate residue mod 1, defined for every slope
    if c.s == INF:
        return (c.delta + HALF) % 1
    return delta_v(c) % 1


def _validate_liftability(components):
    residues = {_vertical_residue(c) for c in components}
    if len(residues) > 1:
        raise ValueError(
            "grading data does not lift: mixed half-integer offsets "
            f"{sorted(residues)}"
        )
    if residues.pop() not in (0, HALF):
        raise ValueError("gradings live in half-integers")


def multicurve(theory, components) -> Multicurve:
    merged: dict = {}
    for c in components:
        key = (c.kind, c.s, c.n, c.delta, c.X, c.punctures)
        if key in merged:
            merged[key] = replace(merged[key], mult=merged[key].mult + c.mult)
        else:
            merged[key] = c
    ordered = sorted(
        merged.values(), key=lambda c: (angle_key(c.s), c.kind, c.n, c.delta)
    )
    return Multicurve(theory, tuple(ordered))


def global_offset(G: Multicurve) -> Fraction:
    """The common shift sigma: vertical gradings live in Z + 1/2 + sigma."""
    return (_vertical_residue(G.components[0]) - HALF) % 1


# === grading coordinates ===================================================


def delta_h(c: CurveComponent) -> Fraction:
    if c.s == slope(0):
        raise ValueError("slope 0 has no horizontal grading")
    return c.delta


def delta_v(c: CurveComponent) -> Fraction:
    if c.s == INF:
        raise ValueError("slope infinity has no vertical grading")
    if c.s == slope(0):
        return c.delta
    if slope_value(c.s) > 0:
        return c.delta - HALF
    return c.delta + HALF


def _from_vertical(s: Slope, dv: Fraction) -> Fraction:
    """Stored canonical grading for a component of slope s with vertical dv."""
    if s == INF:
        raise ValueError("slope infinity has no vertical grading")
    if s == slope(0):
        return dv
    if slope_value(s) > 0:
        return dv + HALF
    return dv - HALF


def _positive(s: Slope) -> bool:
    return s != INF and slope_value(s) > 0


def _negative(s: Slope) -> bool:
    return s != INF and slope_value(s) < 0


def _in_branch_one(s: Slope, s2: Slope) -> bool:
    if s2 == INF:
        return s != INF
    if _positive(s2):
        return strictly_between(INF, s, s2)
    if _negative(s2):
        return strictly_between(s2, s, INF)
    return False


def _in_branch_two(s: Slope, s2: Slope) -> bool:
    if s2 == slope(0):
        return s != slope(0)
    if s2 != INF and slope_value(s2) > 0:
        return strictly_between(s2, s, slope(0))
    if s2 != INF and slope_value(s2) < 0:
        return strictly_between(slope(0), s, s2)
    return False


def delta_pair(theory, c: CurveComponent, c2: CurveComponent) -> Fraction:
    """The single grading supporting the pairing of two linear curves."""
    if theory == BN:
        raise ValueError("the arc theory has no pair grading here")
    off = HALF if theory == HF else -HALF
    if c.s == c2.s:
        if c.s == slope(0):
            return delta_v(c2) - delta_v(c)
        return delta_h(c2) - delta_h(c)
    b1 = _in_branch_one(c.s, c2.s)
    b2 = _in_branch_two(c.s, c2.s)
    if b1:
        return delta_h(c2) - delta_v(c) + off
    if b2:
        return delta_v(c2) - delta_h(c) + off
    raise RuntimeError(f"pair grading case split missed {c.s} {c2.s}")


# === mirror and twist ======================================================


def mirror(G: Multicurve) -> Multicurve:
    out = []
    for c in G.components:
        out.append(replace(c, s=mirror_slope(c.s), delta=-c.delta))
    return multicurve(G.theory, out)


def _transform_punctures(punctures, m: MappingClass):
    if punctures is None:
        return None
    (a, b), (c, d) = m.m
    out = []
    for label in punctures:
        x, y = PUNCTURE_CLASSES[label]
        out.append(CLASS_PUNCTURES[((a * x + b * y) % 2, (c * x + d * y) % 2)])
    return tuple(out)


def twist(G: Multicurve, m: MappingClass) -> Multicurve:
    """Transform slopes by the mapping class, transporting gradings so that
    every pair grading is preserved; the minimal-slope component anchors."""
    comps = sorted(
        G.components,
        key=lambda c: (angle_key(c.s), c.delta, c.kind, c.n, c.mult),
    )
    anchor = comps[0]
    new_anchor = replace(
        anchor, s=m(anchor.s), punctures=_transform_punctures(anchor.punctures, m)
    )
    out = {id(anchor): new_anchor}
    for c in comps[1:]:
        target = delta_pair(G.theory, anchor, c) if G.theory != BN else None
        s_new = m(c.s)
        probe = replace(
            c, s=s_new, delta=Fraction(0), punctures=_transform_punctures(c.punctures, m)
        )
        if G.theory == BN:
            # arcs carry no pair grading; keep the stored value
            out[id(c)] = replace(probe, delta=c.delta)
            continue
        base = delta_pair(G.theory, new_anchor, probe)
        out[id(c)] = replace(probe, delta=target - base)
    return multicurve(G.theory, [out[id(c)] for c in comps])


# === reduction to line sets ================================================


def _line_grading(theory, c: CurveComponent, sigma: Fraction) -> int:
    if theory == HF:
        val = delta_v(c) + HALF if c.s == slope(0) else delta_h(c)
    else:
        val = delta_v(c) - HALF if c.s == slope(0) else delta_h(c) - 1
    val -= sigma
    if val.denominator != 1:
        raise ValueError(f"grading {c.delta} at {c.s} does not lift to an integer")
    return int(val)


def _line_eps(theory, c: CurveComponent) -> int:
    if c.kind == SPECIAL:
        return 1
    if theory == HF and c.X is not None and is_inhibited(c.X):
        return 1
    return 0


def reduce_multicurve(G: Multicurve, group: str) -> LineSet:
    """Forget geometry: one graded line per component.

    The grading reads the stored lift in the orientation fixed by the
    theory; the identification is asserted against the pair grading on
    every component pair at construction time.
    """
    if G.theory == BN:
        raise ValueError("the arc theory does not reduce to a line set")
    sigma = global_offset(G)
    built = [
        make_line(c.s, _line_grading(G.theory, c, sigma), _line_eps(G.theory, c), group)
        for c in G.components
    ]
    for c, lc in zip(G.components, built):
        for c2, lc2 in zip(G.components, built):
            if G.theory == HF:
                want = -delta_pair(HF, c2, c)
            else:
                want = delta_pair(KH, c, c2)
            if want.denominator != 1:
                raise RuntimeError(f"non-integral pair grading {want}")
            want = int(want) % 2 if group == Z2 else int(want)
            if gr(lc, lc2, group) != want:
                raise RuntimeError(
                    f"reduction grading mismatch on {c} vs {c2}"
                )
    return LineSet(frozenset(built), group)


def is_exceptional_multicurve(G: Multicurve) -> bool:
    if G.theory == BN:
        return False
    slopes = G.slopes
    if len(slopes) != 2:
        return False
    for s in slopes:
        at = [c for c in G.components if c.s == s]
        for c in at:
            for c2 in at:
                if delta_pair(G.theory, c, c2) != 0:
                    return False
    allowed = {0, 1} if G.theory == HF else {0, -1}
    values = {
        delta_pair(G.theory, c, c2)
        for c in G.components
        if c.s == slopes[0]
        for c2 in G.components
        if c2.s == slopes[1]
    }
    return len(values) == 1 and values.pop() not in allowed


# === the component DSL =====================================================

_CURVE_RE = re.compile(
    r"^(?:(?P<mult>\d+)\s*\*\s*)?(?P<name>[a-z]+)(?P<len>\d*)"
    r"\(\s*(?P<slope>[^)]+)\s*\)\s*(?P<attrs>(?:\[[^]]*(?:\[[^]]*\][^]]*)?\]\s*)*)$"
)
_TERM_RE = re.compile(
    r"^(?:(?P<coeff>\d+)\s*\*\s*)?d\^(?P<exp>\(?-?\d+(?:/\d+)?\)?)(?P<coord>:[hv])?$"
)


def _parse_exponent(text: str) -> Fraction:
    return Fraction(text.strip("()"))


def _split_header(line: str):
    depth = 0
    for i, ch in enumerate(line):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch == ":" and depth == 0:
            return line[:i].strip(), line[i + 1:].strip()
    raise ValueError(f"curve line needs a colon: {line!r}")


def _parse_attrs(text: str):
    attrs = {}
    depth = 0
    start = None
    for i, ch in enumerate(text):
        if ch == "[":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                body = text[start + 1:i]
                key, _, value = body.partition("=")
                attrs[key.strip()] = value.strip()
    return attrs


def _component_name(theory, name, length_txt):
    if name == "a":
        if length_txt:
            raise ValueError("arcs carry no length subscript")
        return ARC, 1
    if name == "r":
        if theory == HF:
            if length_txt:
                raise ValueError("HF rational curves carry no length subscript")
            return RATIONAL, 1
        if not length_txt:
            raise ValueError("rational curves here need a strand count, e.g. r1")
        return RATIONAL, int(length_txt)
    if name == "s":
        if not length_txt:
            raise ValueError("special curves need a length subscript, e.g. s4")
        total = int(length_txt)
        if theory == HF:
            if total % 4:
                raise ValueError("HF special lengths are multiples of 4")
            return SPECIAL, total // 4
        if total % 2:
            raise ValueError("special lengths are even")
        return SPECIAL, total // 2
    raise ValueError(f"unknown component name {name!r}")


def parse_multicurve(text: str) -> Multicurve:
    theory = None
    components = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("theory"):
            theory = line.split()[1]
            if theory not in THEORIES:
                raise ValueError(f"unknown theory {theory!r}")
            continue
        if not line.startswith("curve"):
            raise ValueError(f"cannot parse line {line!r}")
        if theory is None:
            raise ValueError("theory header must come first")
        header, poly = _split_header(line[len("curve"):].strip())
        m = _CURVE_RE.match(header)
        if not m:
            raise ValueError(f"cannot parse curve header {header!r}")
        kind, n = _component_name(theory, m.group("name"), m.group("len"))
        s = parse_slope(m.group("slope"))
        attrs = _parse_attrs(m.group("attrs") or "")
        X = None
        punctures = None
        if "ls" in attrs:
            if kind != RATIONAL:
                raise ValueError("local systems sit on rational components")
            X = parse_local_system(attrs["ls"])
        if "pi" in attrs:
            if not (theory == HF and kind == SPECIAL):
                raise ValueError("puncture pairs are declared for HF specials only")
            punctures = tuple(int(t) for t in attrs["pi"].split(","))
        declared = int(m.group("mult")) if m.group("mult") else None
        total = 0
        for term in poly.split("+"):
            tm = _TERM_RE.match(term.strip())
            if not tm:
                raise ValueError(f"cannot parse grading term {term.strip()!r}")
            coeff = int(tm.group("coeff") or 1)
            exp = _parse_exponent(tm.group("exp"))
            coord = (tm.group("coord") or "")[1:]
            if coord == "v":
                delta = _from_vertical(s, exp)
            elif coord == "h":
                if s == slope(0):
                    raise ValueError("slope 0 has no horizontal grading")
                delta = exp
            else:
                delta = exp
            total += coeff
            components.append(
                curve_component(kind, s, n, delta, coeff, X, punctures)
            )
        if declared is not None and total != declared:
            raise ValueError(
                f"multiplicity {declared} does not match grading coefficients {total}"
            )
    if theory is None:
        raise ValueError("missing theory header")
    return multicurve(theory, components)


def _format_name(theory, c: CurveComponent) -> str:
    if c.kind == ARC:
        return "a"
    if c.kind == RATIONAL:
        return "r" if theory == HF else f"r{c.n}"
    return f"s{4 * c.n}" if theory == HF else f"s{2 * c.n}"


def _format_exponent(exp: Fraction) -> str:
    return str(exp) if exp.denominator == 1 else f"{exp.numerator}/{exp.denominator}"


def format_multicurve(G: Multicurve) -> str:
    groups: dict = {}
    for c in G.components:
        key = (c.kind, c.s, c.n, c.X, c.punctures)
        groups.setdefault(key, []).append(c)
    lines = [f"theory {G.theory}"]
    for key in sorted(groups, key=lambda k: (angle_key(k[1]), k[0], k[2])):
        kind, s, n, X, punctures = key
        members = sorted(groups[key], key=lambda c: c.delta)
        head = _format_name(G.theory, members[0])
        attrs = ""
        if X is not None:
            attrs += f" [ls={format_local_system(X)}]"
        if punctures is not None:
            attrs += f" [pi={punctures[0]},{punctures[1]}]"
        total = sum(c.mult for c in members)
        mult = f"{total}*" if total != 1 else ""
        suffix = ":v" if s == slope(0) else ""
        terms = []
        for c in members:
            coeff = f"{c.mult}*" if c.mult != 1 else ""
            terms.append(f"{coeff}d^{_format_exponent(c.delta)}{suffix}")
        lines.append(
            f"curve {mult}{head}({format_slope(s)}){attrs} : {' + '.join(terms)}"
        )
    return "\n".join(lines)


# === random multicurves ====================================================


def random_multicurve(rng, theory, max_components=3, max_denominator=3):
    """A small random multicurve with uniformly liftable gradings."""
    offset = rng.choice((Fraction(0), HALF))
    comps = []
    for _ in range(rng.randint(1, max_components)):
        if rng.random() < 0.15:
            s = INF
        else:
            q = rng.randint(1, max_denominator)
            p = rng.choice(
                [x for x in range(-2 * q, 2 * q + 1) if Fraction(x, q).denominator == q]
            )
            s = slope(p, q)
        if s == INF:
            delta = rng.randint(-2, 2) - HALF + offset
        else:
            delta = _from_vertical(s, rng.randint(-2, 2) + offset)
        mult = rng.randint(1, 2)
        kind = rng.choice((RATIONAL, SPECIAL)) if theory != BN else rng.choice((RATIONAL, ARC))
        if kind == ARC:
            comps.append(curve_component(ARC, s, 1, delta, mult))
        elif kind == SPECIAL:
            comps.append(curve_component(SPECIAL, s, rng.randint(1, 2), delta, mult))
        else:
            n, X = 1, None
            if theory == HF:
                roll = rng.random()
                if roll < 0.1:
                    X = jordan_system(2)
                elif roll < 0.2:
                    X = companion_system(0b111)
            else:
                n = rng.randint(1, 2)
            comps.append(curve_component(RATIONAL, s, n, delta, mult, X))
    return multicurve(theory, comps)
