"""Graded pairing of curve invariants and the spaces it cuts out.

The pairing of two multicurves is assembled block by block from minimal
intersection counts of single components.  Counts with a straight-line
closed form are evaluated directly; the rest are delegated to an oracle
callable, by default the exact lift-and-count geometry in `cover`.  On
top of the pairing sit the glued link homology (dividing out the spare
two-dimensional tensor factor), thin filling spaces computed along two
independent routes, and the gluing criterion report.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .localsys import is_complementary, pairing_dim, trivial_system
from .lineset import (
    GluingHypothesisError,
    Z,
    Z2,
    probe_slopes,
    space_boundary,
    theta,
    union_covers,
)
from .multicurve import (
    ARC,
    BN,
    HALF,
    HF,
    KH,
    RATIONAL,
    SPECIAL,
    CurveComponent,
    Multicurve,
    curve_component,
    delta_pair,
    is_exceptional_multicurve,
    multicurve,
    reduce_multicurve,
)
from .qp1 import (
    FillingSpace,
    Slope,
    angle_key,
    contains,
    distance,
    format_slope,
    slope,
)


# === graded dimension vectors ==============================================


@dataclass(frozen=True)
class GradedDims:
    """Dimensions indexed by the diagonal grading; zero entries are dropped."""

    dims: tuple

    @property
    def total(self) -> int:
        return sum(d for _, d in self.dims)

    @property
    def support(self) -> tuple:
        return tuple(g for g, _ in self.dims)

    def dim_at(self, g) -> int:
        return dict(self.dims).get(Fraction(g), 0)

    def shift(self, by) -> GradedDims:
        by = Fraction(by)
        return GradedDims(tuple((g + by, d) for g, d in self.dims))

    def scale(self, k: int) -> GradedDims:
        if k == 0:
            return graded_dims({})
        return GradedDims(tuple((g, k * d) for g, d in self.dims))

    def __add__(self, other: GradedDims) -> GradedDims:
        acc = dict(self.dims)
        for g, d in other.dims:
            acc[g] = acc.get(g, 0) + d
        return graded_dims(acc)

    def normalized(self) -> GradedDims:
        """Shift so the lowest supported grading is zero."""
        if not self.dims:
            return self
        return self.shift(-self.dims[0][0])

    def is_thin(self, group: str) -> bool:
        if group == Z:
            return len(self.dims) <= 1
        if group != Z2:
            raise ValueError(f"unknown grading group {group!r}")
        gs = self.support
        return all((g - gs[0]) % 2 == 0 for g in gs)

    def as_mapping(self) -> dict:
        return {str(g): d for g, d in self.dims}


def graded_dims(mapping) -> GradedDims:
    acc: dict = {}
    for g, d in dict(mapping).items():
        g, d = Fraction(g), int(d)
        if d < 0:
            raise ValueError("dimensions must be non-negative")
        if d:
            acc[g] = acc.get(g, 0) + d
    return GradedDims(tuple(sorted(acc.items())))


def format_graded_dims(p: GradedDims) -> str:
    if not p.dims:
        return "0"
    return " + ".join(
        (f"d^{g}" if d == 1 else f"{d}*d^{g}") for g, d in p.dims
    )


# === intersection counts ===================================================


class IntersectionModel:
    """Minimal intersection counts between single curve components.

    Closed forms cover the pairs a straight-line picture settles; the rest
    go to the oracle, a callable (theory, c1, c2) -> int evaluated on
    multiplicity-one components.  Counts never see multiplicities or local
    systems, which scale the pairing afterwards.  A Floer special entry
    stands for its conjugate pair of curves and is counted as the pair.
    """

    def __init__(self, oracle=None):
        self.oracle = oracle
        self._cache: dict = {}

    def closed_form(self, theory, c1, c2):
        if c1.s == c2.s:
            return None
        a, b = sorted((c1, c2), key=lambda c: c.kind)
        d = distance(a.s, b.s)
        if a.kind == RATIONAL and b.kind == RATIONAL:
            return 2 * d * a.n * b.n
        if a.kind == RATIONAL and b.kind == SPECIAL:
            per_wrap = 8 if theory == HF else 4
            return per_wrap * b.n * a.n * d
        if a.kind == ARC and b.kind == RATIONAL:
            return d * b.n
        return None

    def count(self, theory, c1, c2) -> int:
        value = self.closed_form(theory, c1, c2)
        if value is not None:
            return value
        c1, c2 = replace(c1, mult=1), replace(c2, mult=1)
        key = (theory, c1, c2)
        if key not in self._cache:
            if self.oracle is None:
                from .cover import intersection_count

                self.oracle = intersection_count
            value = int(self.oracle(theory, c1, c2))
            if value < 0:
                raise ValueError("oracle produced a negative count")
            self._cache[key] = value
        return self._cache[key]


_default_model: IntersectionModel | None = None


def default_model() -> IntersectionModel:
    global _default_model
    if _default_model is None:
        _default_model = IntersectionModel()
    return _default_model


# === the pairing ===========================================================


def _system(c: CurveComponent):
    return c.X if c.X is not None else trivial_system()


def _system_dim(c: CurveComponent) -> int:
    return c.X.dim if c.X is not None else 1


def _split_same_slope(theory, base, total):
    """Distribute a same-slope block over its two adjacent gradings."""
    if total == 0:
        return []
    other = base + (1 if theory == HF else -1)
    if theory == HF:
        hi = (total + 1) // 2
        return [(base, hi), (other, total - hi)]
    if total % 2:
        raise ValueError("same-slope counts pair up evenly outside HF")
    pairs = total // 2
    hi = 2 * ((pairs + 1) // 2)
    return [(base, hi), (other, total - hi)]


def _block(theory, model, c1, c2):
    mult = c1.mult * c2.mult
    if c1.s != c2.s:
        count = model.count(theory, c1, c2)
        dim = count * mult * _system_dim(c1) * _system_dim(c2)
        return [(delta_pair(theory, c1, c2), dim)]
    kinds = {c1.kind, c2.kind}
    if kinds in ({RATIONAL, SPECIAL}, {ARC, RATIONAL}):
        return []
    base = delta_pair(theory, c1, c2)
    if kinds == {RATIONAL}:
        if theory == HF:
            total = pairing_dim(_system(c1), _system(c2)) * mult
        else:
            total = 4 * min(c1.n, c2.n) * mult
    else:
        total = model.count(theory, c1, c2) * mult
    return _split_same_slope(theory, base, total)


def floer(G1: Multicurve, G2: Multicurve, model: IntersectionModel | None = None) -> GradedDims:
    """Graded dimensions of the pairing of two multicurves.

    Both sides must carry the same homology theory, except that the arc
    theory pairs against Khovanov curves (in either order).
    """
    theories = (G1.theory, G2.theory)
    if theories in ((KH, BN), (BN, KH)):
        pair_theory = KH
    elif G1.theory == G2.theory and G1.theory in (HF, KH):
        pair_theory = G1.theory
    else:
        raise ValueError(f"unsupported theory pairing {theories}")
    if model is None:
        model = default_model()
    acc: dict = {}
    for c1 in G1.components:
        for c2 in G2.components:
            for g, d in _block(pair_theory, model, c1, c2):
                acc[g] = acc.get(g, 0) + d
    return graded_dims(acc)


def _halved(p: GradedDims) -> GradedDims:
    for _, d in p.dims:
        if d % 2:
            raise ValueError("pairing does not split off the spare tensor factor")
    return GradedDims(tuple((g, d // 2) for g, d in p.dims))


def link_homology(
    G1: Multicurve,
    G2: Multicurve,
    merge4: bool | None = None,
    model: IntersectionModel | None = None,
) -> GradedDims:
    """Homology of the glued-up link, from the pairing of its two halves.

    Khovanov against Khovanov always carries a spare two-dimensional tensor
    factor: each graded piece is halved and the result shifted down by one
    half.  A Floer pairing carries the factor exactly when all four tangle
    ends join into a single link component, which the caller reports via
    merge4; the quotient is then returned without a grading shift, so
    compare it up to shift.  A pairing against the arc theory is returned
    unchanged.
    """
    p = floer(G1, G2, model)
    ts = {G1.theory, G2.theory}
    if ts == {KH}:
        return _halved(p).shift(-HALF)
    if ts == {HF}:
        if merge4 is None:
            raise ValueError("a Floer pairing needs the merge4 flag")
        return _halved(p) if merge4 else p
    return p


def rational_gluing_merge4(s1: Slope, s2: Slope) -> bool:
    """Whether gluing two rational tangles of these slopes produces a knot,
    joining all four ends into one component."""
    return distance(s1, s2) % 2 == 1


# === thin filling spaces ===================================================


def filling_probe(theory: str, s: Slope) -> Multicurve:
    """The rational invariant that probes fillings of the given slope."""
    delta = HALF if s == slope(0) else Fraction(0)
    return multicurve(theory, [curve_component(RATIONAL, s, 1, delta)])


def thin_space(
    G: Multicurve, group: str, model: IntersectionModel | None = None
) -> FillingSpace:
    """Slopes whose filling of the tangle is thin over the grading group.

    Computed two independent ways and cross-checked: from the assembled
    filling space of the reduced line set, and by pairing rational probes
    against the multicurve at the assembly's own probe slopes.
    """
    if G.theory not in (HF, KH):
        raise ValueError("thin filling spaces need a closed-curve theory")
    lines = reduce_multicurve(G, group)
    space = theta(lines)
    for s in probe_slopes(lines.slopes):
        direct = floer(filling_probe(G.theory, s), G, model).is_thin(group)
        if direct != contains(space, s):
            raise RuntimeError(
                f"thin filling disagreement at slope {format_slope(s)}"
            )
    return space


# === the gluing criterion ==================================================


def _rationals_at(G: Multicurve, s: Slope):
    return [c for c in G.components if c.s == s and c.kind == RATIONAL]


def _slope_is_rational(G: Multicurve, s: Slope) -> bool:
    return all(c.kind == RATIONAL for c in G.components if c.s == s)


def glue_check(
    G1: Multicurve,
    G2: Multicurve,
    group: str,
    model: IntersectionModel | None = None,
) -> dict:
    """Report on the gluing criterion for a pairing of two multicurves.

    The caller hands in the invariant of one side already mirrored.  The
    report carries the thinness of the pairing together with the criterion
    that predicts it: the two filling spaces cover the whole circle and,
    at every slope on both boundaries, at least one side consists of
    rational components there (for Floer curves additionally with
    complementary local systems on the two sides).
    """
    if G1.theory != G2.theory or G1.theory not in (HF, KH):
        raise ValueError("gluing pairs two invariants of one closed-curve theory")
    L1, L2 = reduce_multicurve(G1, group), reduce_multicurve(G2, group)
    if L1.is_trivial() or L2.is_trivial():
        raise GluingHypothesisError("trivial reduced line set")
    exceptional = (is_exceptional_multicurve(G1), is_exceptional_multicurve(G2))
    if group == Z and all(exceptional):
        raise GluingHypothesisError("both sides exceptional")
    sp1 = thin_space(G1, group, model)
    sp2 = thin_space(G2, group, model)
    covered = union_covers(sp1, sp2)
    shared = sorted(
        set(space_boundary(sp1)) & set(space_boundary(sp2)), key=angle_key
    )
    rational_side = {
        s: _slope_is_rational(G1, s) or _slope_is_rational(G2, s) for s in shared
    }
    report = {
        "group": group,
        "exceptional": exceptional,
        "spaces": (sp1, sp2),
        "union_covers": covered,
        "shared_boundary": tuple(shared),
        "condition_rational": rational_side,
        "thin": floer(G1, G2, model).is_thin(group),
    }
    rhs = covered and all(rational_side.values())
    if G1.theory == HF:
        complementary = {
            s: all(
                is_complementary(_system(c1), _system(c2))
                for c1 in _rationals_at(G1, s)
                for c2 in _rationals_at(G2, s)
            )
            for s in shared
        }
        report["condition_complementary"] = complementary
        rhs = rhs and all(complementary.values())
    report["rhs"] = rhs
    return report
