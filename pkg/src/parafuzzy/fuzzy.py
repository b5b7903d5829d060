"""Piecewise-linear fuzzy sets, Goedel norms, Mamdani max-min inference and
closed-form centroid defuzzification."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Vertex = tuple[float, float]


class DegenerateSetError(ValueError):
    pass


@dataclass(frozen=True)
class PiecewiseLinearMembership:
    """Membership function given by an ordered vertex list.

    Repeated x coordinates describe a vertical edge; the value there is the
    largest y at that x. Outside ``[first x, last x]`` membership is 0.
    """

    vertices: tuple[Vertex, ...]
    name: str = ""

    def __post_init__(self) -> None:
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 2:
            raise ValueError(f"{self.name or 'membership'}: needs at least 2 vertices")
        for i, (x, y) in enumerate(verts):
            if not 0.0 <= y <= 1.0:
                raise ValueError(f"{self.name or 'membership'}: vertex {i + 1} y={y} outside [0, 1]")
            if i and x < verts[i - 1][0]:
                raise ValueError(
                    f"{self.name or 'membership'}: vertex {i + 1} x={x} decreases "
                    f"(previous x={verts[i - 1][0]})"
                )
        object.__setattr__(self, "_xs", tuple(x for x, _ in verts))

    @classmethod
    def parse(cls, text: str, name: str = "") -> PiecewiseLinearMembership:
        """Parse ``"X1,Y1;X2,Y2;..."``.

        The published tables sometimes print the last pair as ``X;Y``; a
        ``;`` inside a pair is accepted when the flattened number count is even.
        """
        numbers = [float(tok) for tok in text.replace(";", ",").replace(" ", "").split(",") if tok]
        if len(numbers) % 2:
            raise ValueError(f"{name or 'membership'}: odd number of coordinates in {text!r}")
        verts = tuple(zip(numbers[0::2], numbers[1::2]))
        return cls(verts, name)

    def format(self) -> str:
        return ";".join(f"{_fmt(x)},{_fmt(y)}" for x, y in self.vertices)

    @property
    def support_hull(self) -> tuple[float, float]:
        return self.vertices[0][0], self.vertices[-1][0]

    def __call__(self, x: float) -> float:
        return membership_at(self, x)

    def left_limit(self, x: float) -> float:
        xs = self._xs  # type: ignore[attr-defined]
        if x <= xs[0] or x > xs[-1]:
            return 0.0
        i = bisect.bisect_left(xs, x)
        if xs[i] == x:
            return self.vertices[i][1]
        return _interp(self.vertices[i - 1], self.vertices[i], x)

    def right_limit(self, x: float) -> float:
        xs = self._xs  # type: ignore[attr-defined]
        if x < xs[0] or x >= xs[-1]:
            return 0.0
        i = bisect.bisect_right(xs, x)
        if xs[i - 1] == x:
            return self.vertices[i - 1][1]
        return _interp(self.vertices[i - 1], self.vertices[i], x)

    def clip(self, level: float) -> PiecewiseLinearMembership:
        """Mamdani implication: min(membership, level), kept exact."""
        level = min(max(level, 0.0), 1.0)
        out: list[Vertex] = [(self.vertices[0][0], min(self.vertices[0][1], level))]
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            if (y0 - level) * (y1 - level) < 0:
                t = (level - y0) / (y1 - y0)
                # Rounding can push the crossing past x1 for tiny levels.
                out.append((min(max(x0 + t * (x1 - x0), x0), x1), level))
            out.append((x1, min(y1, level)))
        return PiecewiseLinearMembership(tuple(out), self.name)


@dataclass(frozen=True)
class FuzzySet:
    membership: PiecewiseLinearMembership
    universe: tuple[float, float]
    unit: str = ""

    def __post_init__(self) -> None:
        lo, hi = self.universe
        s_lo, s_hi = self.membership.support_hull
        if lo > hi or s_lo < lo or s_hi > hi:
            raise ValueError(
                f"universe [{lo}, {hi}] does not contain support [{s_lo}, {s_hi}]"
                f" of {self.membership.name or 'set'}"
            )


@dataclass(frozen=True)
class RuleActivation:
    consequent: FuzzySet
    strength: float
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError(f"activation strength must lie in [0, 1], got {self.strength}")


def membership_at(f: PiecewiseLinearMembership, x: float) -> float:
    xs = f._xs  # type: ignore[attr-defined]
    if x < xs[0] or x > xs[-1]:
        return 0.0
    lo = bisect.bisect_left(xs, x)
    hi = bisect.bisect_right(xs, x)
    if lo < hi:
        return max(y for _, y in f.vertices[lo:hi])
    return _interp(f.vertices[lo - 1], f.vertices[lo], x)


def tnorm_min(a: float, b: float) -> float:
    return a if a < b else b


def tconorm_max(a: float, b: float) -> float:
    return a if a > b else b


def pointwise_max(
    functions: Sequence[PiecewiseLinearMembership], name: str = ""
) -> PiecewiseLinearMembership:
    """Exact upper envelope of piecewise-linear functions."""
    if not functions:
        raise ValueError("no functions to aggregate")
    xs = sorted({x for f in functions for x, _ in f.vertices})
    if len(xs) == 1:
        y = max(membership_at(f, xs[0]) for f in functions)
        return PiecewiseLinearMembership(((xs[0], 0.0), (xs[0], y)), name)

    out: list[Vertex] = []
    for a, b in zip(xs, xs[1:]):
        lines = [(f.right_limit(a), f.left_limit(b)) for f in functions]
        cuts = {0.0, 1.0}
        for i in range(len(lines)):
            for j in range(i + 1, len(lines)):
                da = lines[i][0] - lines[j][0]
                db = lines[i][1] - lines[j][1]
                if da * db < 0:
                    cuts.add(da / (da - db))
        for t in sorted(cuts):
            y = max(ya + t * (yb - ya) for ya, yb in lines)
            x = b if t == 1.0 else min(a + t * (b - a), b)
            _append(out, (x, y))
    # Vertical edges at the hull ends.
    first = max(membership_at(f, xs[0]) for f in functions)
    last = max(membership_at(f, xs[-1]) for f in functions)
    if first > out[0][1]:
        out.insert(0, (xs[0], first))
        out.insert(0, (xs[0], 0.0))
    if last > out[-1][1]:
        out.append((xs[-1], last))
        out.append((xs[-1], 0.0))
    return PiecewiseLinearMembership(tuple(out), name)


def mamdani_infer(activations: Iterable[RuleActivation], name: str = "aggregate") -> FuzzySet:
    """Clip each consequent at its firing strength and take the pointwise max."""
    activations = list(activations)
    if not activations:
        raise ValueError("no active rules")
    universe = activations[0].consequent.universe
    for act in activations[1:]:
        if act.consequent.universe != universe:
            raise ValueError(
                f"consequents span different universes: {universe} vs {act.consequent.universe}"
            )
    clipped = [act.consequent.membership.clip(act.strength) for act in activations]
    return FuzzySet(pointwise_max(clipped, name), universe, activations[0].consequent.unit)


def area(f: PiecewiseLinearMembership) -> float:
    total = 0.0
    for (x0, y0), (x1, y1) in zip(f.vertices, f.vertices[1:]):
        total += (x1 - x0) * (y0 + y1) / 2.0
    return total


def defuzzify_centroid(s: FuzzySet | PiecewiseLinearMembership) -> float:
    """Centre of gravity, integrated exactly strip by strip."""
    f = s.membership if isinstance(s, FuzzySet) else s
    mass = 0.0
    moment = 0.0
    for (x0, y0), (x1, y1) in zip(f.vertices, f.vertices[1:]):
        w = x1 - x0
        if w <= 0.0:
            continue
        mass += w * (y0 + y1) / 2.0
        moment += w * (x0 * (2.0 * y0 + y1) + x1 * (y0 + 2.0 * y1)) / 6.0
    if mass <= 1e-15:
        raise DegenerateSetError("degenerate output set")
    return moment / mass


def _interp(p0: Vertex, p1: Vertex, x: float) -> float:
    (x0, y0), (x1, y1) = p0, p1
    if x1 == x0:
        return max(y0, y1)
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def _append(out: list[Vertex], v: Vertex) -> None:
    if not out or out[-1] != v:
        out.append(v)


def _fmt(v: float) -> str:
    return f"{v:g}"
