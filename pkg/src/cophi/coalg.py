"""Path-truncated quiver coalgebras.

A presentation is a quiver Q (finite, or an infinite pattern materialized
through a finite window) together with a truncation length L >= 1; the
coalgebra is the span of all paths of length <= L.  Simples correspond to
vertices; the injective indecomposable at a vertex v has the paths of
length <= L ending at v as basis, the projective one the paths starting
at v.

Side convention.  Left comodules over the coalgebra of Q are the
representations of Q itself (structure maps run along the declared
arrows); right comodules are the representations of the opposite quiver.
Operationally the tool always acts along the declared arrows of the
presentation it is handed: to work on the right side, present the
opposite quiver and tag the data side="right".  The two A-infinity
templates exist precisely so that both sides of the same interval
coalgebra are available as declared quivers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

TOWARD_ZERO = "a_infinity_toward_zero"
AWAY_FROM_ZERO = "a_infinity_away_from_zero"
CYCLE = "cycle"

SIDES = ("left", "right")


class WindowUnsaturatedError(Exception):
    """A path computation could leave the materialized window."""


@dataclass(frozen=True)
class Arrow:
    name: str
    src: int
    tgt: int


@dataclass(frozen=True)
class QuiverPresentation:
    """A finite quiver with unique vertex and arrow identifiers."""

    vertices: tuple[int, ...]
    arrows: tuple[Arrow, ...]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise ValueError("duplicate arrow ids")
        vset = set(self.vertices)
        for a in self.arrows:
            if a.src not in vset or a.tgt not in vset:
                raise ValueError(f"arrow {a.name} has undeclared endpoints")

    @cached_property
    def arrow_by_name(self) -> dict[str, Arrow]:
        return {a.name: a for a in self.arrows}

    @cached_property
    def arrows_from(self) -> dict[int, tuple[Arrow, ...]]:
        out: dict[int, list[Arrow]] = {v: [] for v in self.vertices}
        for a in self.arrows:
            out[a.src].append(a)
        return {v: tuple(lst) for v, lst in out.items()}

    @cached_property
    def arrows_into(self) -> dict[int, tuple[Arrow, ...]]:
        inc: dict[int, list[Arrow]] = {v: [] for v in self.vertices}
        for a in self.arrows:
            inc[a.tgt].append(a)
        return {v: tuple(lst) for v, lst in inc.items()}

    def opposite(self) -> "QuiverPresentation":
        return QuiverPresentation(
            self.vertices, tuple(Arrow(a.name, a.tgt, a.src) for a in self.arrows)
        )


@dataclass(frozen=True)
class InfiniteTemplate:
    """Rule-based infinite quiver (or a cycle) with a finite window.

    kind is one of the module constants; cycle requires n >= 1 and ignores
    the window when materialized.
    """

    kind: str
    window: int
    n: int | None = None

    def __post_init__(self):
        if self.kind not in (TOWARD_ZERO, AWAY_FROM_ZERO, CYCLE):
            raise ValueError(f"unknown template kind {self.kind!r}")
        if self.window < 0:
            raise ValueError("window must be >= 0")
        if self.kind == CYCLE:
            if self.n is None or self.n < 1:
                raise ValueError("cycle template needs n >= 1")
        elif self.n is not None:
            raise ValueError("n is only meaningful for cycle templates")


def _arrow_name(src: int, tgt: int) -> str:
    return f"a{src}_{tgt}"


def _materialize_template(t: InfiniteTemplate, window: int) -> QuiverPresentation:
    if t.kind == CYCLE:
        n = t.n
        vertices = tuple(range(n))
        arrows = tuple(Arrow(_arrow_name(i, (i + 1) % n), i, (i + 1) % n) for i in range(n))
        return QuiverPresentation(vertices, arrows)
    vertices = tuple(range(window + 1))
    if t.kind == TOWARD_ZERO:
        arrows = tuple(Arrow(_arrow_name(i + 1, i), i + 1, i) for i in range(window))
    else:
        arrows = tuple(Arrow(_arrow_name(i, i + 1), i, i + 1) for i in range(window))
    return QuiverPresentation(vertices, arrows)


@dataclass(frozen=True)
class CoalgebraPresentation:
    """A quiver or template plus a path-truncation length L >= 1."""

    quiver: QuiverPresentation | InfiniteTemplate
    truncation_length: int

    def __post_init__(self):
        if self.truncation_length < 1:
            raise ValueError("truncation_length must be >= 1")

    @property
    def is_template(self) -> bool:
        return isinstance(self.quiver, InfiniteTemplate)

    @property
    def window(self) -> int | None:
        return self.quiver.window if self.is_template else None

    @cached_property
    def family_key(self) -> tuple:
        """Identity of the coalgebra, ignoring the materialization window."""
        if self.is_template:
            return ("template", self.quiver.kind, self.quiver.n, self.truncation_length)
        return ("finite", self.quiver.vertices, self.quiver.arrows, self.truncation_length)

    def finite_quiver(self, min_window: int | None = None) -> QuiverPresentation:
        """The declared quiver, materialized at least up to min_window."""
        if not self.is_template:
            return self.quiver
        w = self.quiver.window
        if min_window is not None:
            w = max(w, min_window)
        return _materialize_template(self.quiver, w)

    def with_window(self, window: int) -> "CoalgebraPresentation":
        """Template presentations grown to cover at least the given window."""
        if not self.is_template or self.quiver.kind == CYCLE:
            return self
        if window <= self.quiver.window:
            return self
        return CoalgebraPresentation(
            InfiniteTemplate(self.quiver.kind, window, self.quiver.n), self.truncation_length
        )

    def opposite(self) -> "CoalgebraPresentation":
        """Presentation with all arrows reversed (templates swap orientation)."""
        if self.is_template:
            t = self.quiver
            if t.kind == TOWARD_ZERO:
                return CoalgebraPresentation(
                    InfiniteTemplate(AWAY_FROM_ZERO, t.window), self.truncation_length
                )
            if t.kind == AWAY_FROM_ZERO:
                return CoalgebraPresentation(
                    InfiniteTemplate(TOWARD_ZERO, t.window), self.truncation_length
                )
            return CoalgebraPresentation(
                _materialize_template(t, t.window).opposite(), self.truncation_length
            )
        return CoalgebraPresentation(self.quiver.opposite(), self.truncation_length)

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        if self.is_template:
            t = self.quiver
            tpl = {"kind": t.kind, "window": t.window}
            if t.n is not None:
                tpl["n"] = t.n
            return {"template": tpl, "truncation_length": self.truncation_length}
        return {
            "quiver": {
                "vertices": list(self.quiver.vertices),
                "arrows": [{"id": a.name, "src": a.src, "tgt": a.tgt} for a in self.quiver.arrows],
            },
            "truncation_length": self.truncation_length,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CoalgebraPresentation":
        if "truncation_length" not in data:
            raise ValueError("missing truncation_length")
        L = int(data["truncation_length"])
        if "template" in data:
            t = data["template"]
            return cls(
                InfiniteTemplate(
                    t["kind"],
                    int(t.get("window", 0)),
                    int(t["n"]) if "n" in t else None,
                ),
                L,
            )
        if "quiver" in data:
            q = data["quiver"]
            vertices = tuple(int(v) for v in q["vertices"])
            arrows = tuple(
                Arrow(str(a["id"]), int(a["src"]), int(a["tgt"])) for a in q.get("arrows", [])
            )
            return cls(QuiverPresentation(vertices, arrows), L)
        raise ValueError("coalgebra data needs a 'quiver' or a 'template'")

    def save(self, path: str) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, path: str) -> "CoalgebraPresentation":
        with open(path) as f:
            return cls.from_dict(json.load(f))


@dataclass(frozen=True)
class SimpleLabel:
    """A simple comodule: one vertex, one side."""

    vertex: int
    side: str

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}, got {self.side!r}")


@dataclass(frozen=True)
class Path:
    """A path in the declared quiver; arrows listed in traversal order."""

    start: int
    end: int
    arrows: tuple[str, ...] = field(default=())

    @property
    def length(self) -> int:
        return len(self.arrows)


def materialize(c: CoalgebraPresentation, window: int) -> CoalgebraPresentation:
    """Finite presentation covering vertices {0..window} of a template.

    Idempotent on already-finite presentations; cycles ignore the window.
    """
    if window < 0:
        raise ValueError("window must be >= 0")
    if not c.is_template:
        return c
    return CoalgebraPresentation(_materialize_template(c.quiver, window), c.truncation_length)


def saturated(c: CoalgebraPresentation, support: Iterable[int], margin: int) -> bool:
    """True iff nothing reachable from the support within `margin` arrows
    (in either orientation) can leave the materialized window.

    Finite quivers and cycles have no boundary, so they are always
    saturated.
    """
    support = list(support)
    if not c.is_template or c.quiver.kind == CYCLE:
        if not c.is_template:
            vset = set(c.quiver.vertices)
            for v in support:
                if v not in vset:
                    raise ValueError(f"support vertex {v} outside the quiver")
        return True
    window = c.quiver.window
    for v in support:
        if v < 0 or v > window:
            raise ValueError(f"support vertex {v} outside the window")
        if v + margin > window:
            return False
    return True


def _paths_into(q: QuiverPresentation, v: int, max_len: int) -> list[Path]:
    """All paths of length <= max_len ending at v, grown by prepending arrows."""
    layer = [Path(v, v)]
    out = [Path(v, v)]
    for _ in range(max_len):
        nxt = []
        for p in layer:
            for a in q.arrows_into[p.start]:
                nxt.append(Path(a.src, v, (a.name,) + p.arrows))
        out.extend(nxt)
        layer = nxt
    return out


def _paths_from(q: QuiverPresentation, v: int, max_len: int) -> list[Path]:
    """All paths of length <= max_len starting at v, grown by appending arrows."""
    layer = [Path(v, v)]
    out = [Path(v, v)]
    for _ in range(max_len):
        nxt = []
        for p in layer:
            for a in q.arrows_from[p.end]:
                nxt.append(Path(v, a.tgt, p.arrows + (a.name,)))
        out.extend(nxt)
        layer = nxt
    return out


def _check_basis_window(c: CoalgebraPresentation, vertex: int, what: str) -> QuiverPresentation:
    q = c.finite_quiver()
    if vertex not in q.vertices:
        raise ValueError(f"vertex {vertex} not in the materialized quiver")
    if not saturated(c, [vertex], c.truncation_length):
        raise WindowUnsaturatedError(
            f"{what} at vertex {vertex} needs margin {c.truncation_length} "
            f"inside window {c.window}"
        )
    return q


def injective_basis(c: CoalgebraPresentation, s: SimpleLabel) -> tuple[Path, ...]:
    """Basis of the injective indecomposable at s: paths of length <= L
    ending at s.vertex, sorted by (length, arrow names).

    Raises WindowUnsaturatedError when a qualifying path could leave the
    window of a template presentation.
    """
    q = _check_basis_window(c, s.vertex, "injective basis")
    paths = _paths_into(q, s.vertex, c.truncation_length)
    return tuple(sorted(paths, key=lambda p: (p.length, p.arrows)))


def projective_basis(c: CoalgebraPresentation, s: SimpleLabel) -> tuple[Path, ...]:
    """Basis of the projective indecomposable at s: paths of length <= L
    starting at s.vertex, sorted by (length, arrow names)."""
    q = _check_basis_window(c, s.vertex, "projective basis")
    paths = _paths_from(q, s.vertex, c.truncation_length)
    return tuple(sorted(paths, key=lambda p: (p.length, p.arrows)))
