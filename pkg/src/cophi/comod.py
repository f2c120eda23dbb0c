"""Finite-dimensional comodules over a path-truncated quiver coalgebra.

A comodule is a finite-support representation of the declared quiver whose
structure maps compose to zero along every path of length L+1 (L the
truncation length).  The module provides morphisms and Hom-spaces, socle,
top, injective envelopes, projective covers, cosyzygies and an injective
dimension probe.

Orientation bookkeeping: the structure map of an arrow a: s -> t is a
matrix of shape dims(t) x dims(s), acting from the vertex space at s into
the vertex space at t.  The `side` tag records which side of the coalgebra
the representation realizes (see cophi.coalg); it does not change the
acting orientation of the presentation at hand.

Worked interval pictures for the length-1 truncation of the half-infinite
line quiver:

  left side (arrows n+1 -> n):   E(S_n) = [ k @ n+1  --1-->  k @ n ]
      socle S_n, top S_{n+1}, cosyzygy of S_n is S_{n+1} (drifts away
      from the sink vertex 0, so simples have infinite injective
      dimension on this side).

  right side (arrows n -> n+1):  E(S_n) = [ k @ n-1  --1-->  k @ n ]
      for n >= 1, while E(S_0) = S_0; the cosyzygy of S_n is S_{n-1},
      so S_n has injective dimension exactly n.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .coalg import (
    CYCLE,
    SIDES,
    Arrow,
    CoalgebraPresentation,
    Path,
    QuiverPresentation,
    SimpleLabel,
    injective_basis,
    projective_basis,
)
from .exactlin import DenseMatrix, FieldContext


class ComoduleError(Exception):
    """Malformed comodule data or incompatible operands."""


def _required_window(c: CoalgebraPresentation, support: Iterable[int], margin: int) -> CoalgebraPresentation:
    """Template presentation grown so support plus margin fits the window."""
    support = list(support)
    if not support or not c.is_template or c.quiver.kind == CYCLE:
        return c
    return c.with_window(max(support) + margin)


class Comodule:
    """Immutable quiver representation with the nilpotency constraint.

    dims maps vertices to dimensions (zero entries are dropped); maps maps
    arrow names to DenseMatrix structure maps (absent arrows act as zero).
    """

    def __init__(
        self,
        coalgebra: CoalgebraPresentation,
        side: str,
        field: FieldContext,
        dims: Mapping[int, int],
        maps: Mapping[str, DenseMatrix | Sequence[Sequence[int]]] | None = None,
        validate: bool = True,
    ):
        if side not in SIDES:
            raise ComoduleError(f"side must be one of {SIDES}")
        norm_dims = {int(v): int(d) for v, d in dims.items() if int(d) != 0}
        if any(d < 0 for d in norm_dims.values()):
            raise ComoduleError("dimensions must be non-negative")
        coalgebra = _required_window(coalgebra, norm_dims.keys(), 0)
        quiver = coalgebra.finite_quiver()
        vset = set(quiver.vertices)
        for v in norm_dims:
            if v not in vset:
                raise ComoduleError(f"support vertex {v} not in the quiver")

        norm_maps: dict[str, DenseMatrix] = {}
        for name, mat in (maps or {}).items():
            name = str(name)
            arrow = quiver.arrow_by_name.get(name)
            if arrow is None:
                raise ComoduleError(f"unknown arrow {name!r}")
            rows = norm_dims.get(arrow.tgt, 0)
            cols = norm_dims.get(arrow.src, 0)
            dm = mat if isinstance(mat, DenseMatrix) else field.matrix(mat, shape=(rows, cols))
            if dm.shape != (rows, cols):
                raise ComoduleError(
                    f"map for arrow {name!r} has shape {dm.shape}, expected {(rows, cols)}"
                )
            if rows and cols and dm.a.any():
                norm_maps[name] = DenseMatrix(np.mod(dm.a, field.p))

        self.coalgebra = coalgebra
        self.side = side
        self.field = field
        self.dims = dict(sorted(norm_dims.items()))
        self.maps = dict(sorted(norm_maps.items()))
        if validate:
            self._check_nilpotency()

    def _check_nilpotency(self) -> None:
        L = self.coalgebra.truncation_length
        quiver = self.coalgebra.finite_quiver()
        live = [a for a in quiver.arrows if self.dim(a.src) and self.dim(a.tgt)]
        out: dict[int, list[Arrow]] = {}
        for a in live:
            out.setdefault(a.src, []).append(a)

        def walk(v: int, acc: DenseMatrix, depth: int) -> None:
            if depth == L + 1:
                if acc.a.any():
                    raise ComoduleError("structure maps violate the length-(L+1) nilpotency")
                return
            for a in out.get(v, ()):  # absent continuations are zero composites
                walk(a.tgt, self.field.matmul(self.map_for(a), acc), depth + 1)

        for v in self.support:
            walk(v, self.field.identity(self.dim(v)), 0)

    # -- basic accessors ---------------------------------------------------

    def dim(self, v: int) -> int:
        return self.dims.get(v, 0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    @property
    def is_zero(self) -> bool:
        return not self.dims

    @cached_property
    def context_key(self) -> tuple:
        return (self.coalgebra.family_key, self.side, self.field.p)

    def map_for(self, arrow: Arrow | str) -> DenseMatrix:
        if isinstance(arrow, str):
            name = arrow
            arrow = self.coalgebra.finite_quiver().arrow_by_name[name]
        else:
            name = arrow.name
        m = self.maps.get(name)
        if m is not None:
            return m
        return self.field.zeros(self.dim(arrow.tgt), self.dim(arrow.src))

    def live_arrows(self, quiver: QuiverPresentation | None = None) -> tuple[Arrow, ...]:
        """Arrows whose structure map has a nonzero shape."""
        q = quiver or self.coalgebra.finite_quiver()
        return tuple(a for a in q.arrows if self.dim(a.src) and self.dim(a.tgt))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Comodule):
            return NotImplemented
        return (
            self.context_key == other.context_key
            and self.dims == other.dims
            and self.maps == other.maps
        )

    def __hash__(self) -> int:
        return hash(
            (self.context_key, tuple(self.dims.items()), tuple(sorted(self.maps.items(), key=lambda kv: kv[0])))
        )

    def __repr__(self) -> str:
        return f"Comodule(side={self.side}, dims={self.dims})"

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "dims": {str(v): d for v, d in self.dims.items()},
            "maps": {name: m.tolist() for name, m in self.maps.items()},
        }

    @classmethod
    def from_dict(
        cls, coalgebra: CoalgebraPresentation, field: FieldContext, data: dict
    ) -> "Comodule":
        if "side" not in data or "dims" not in data:
            raise ComoduleError("comodule data needs 'side' and 'dims'")
        return cls(
            coalgebra,
            data["side"],
            field,
            {int(v): int(d) for v, d in data["dims"].items()},
            data.get("maps", {}),
        )

    def save(self, path: str) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, coalgebra: CoalgebraPresentation, field: FieldContext, path: str) -> "Comodule":
        with open(path) as f:
            return cls.from_dict(coalgebra, field, json.load(f))


def zero_comodule(c: CoalgebraPresentation, side: str, field: FieldContext) -> Comodule:
    return Comodule(c, side, field, {}, validate=False)


def simple_comodule(c: CoalgebraPresentation, side: str, field: FieldContext, vertex: int) -> Comodule:
    return Comodule(c, side, field, {vertex: 1}, validate=False)


def _path_basis_comodule(
    c: CoalgebraPresentation,
    side: str,
    field: FieldContext,
    paths: Sequence[Path],
    grade_by_start: bool,
) -> tuple[Comodule, dict[int, list[Path]]]:
    """Comodule on a path basis with path-stripping/extension structure maps.

    grade_by_start=True places each path at its start vertex and lets an
    arrow strip itself off the front of a path (injective side);
    grade_by_start=False places paths at their end vertex and lets an
    arrow append itself, truncating beyond length L to zero (projective
    side).
    """
    blocks: dict[int, list[Path]] = {}
    for p in sorted(paths, key=lambda p: (p.length, p.arrows)):
        blocks.setdefault(p.start if grade_by_start else p.end, []).append(p)
    dims = {v: len(ps) for v, ps in blocks.items()}
    index = {v: {p: i for i, p in enumerate(ps)} for v, ps in blocks.items()}
    quiver = c.finite_quiver()
    L = c.truncation_length

    maps: dict[str, np.ndarray] = {}

    def put(arrow: Arrow, image: Path, src_vertex: int, p: Path) -> None:
        tgt_vertex = image.start if grade_by_start else image.end
        tgt_block = index.get(tgt_vertex)
        if not tgt_block or image not in tgt_block:
            return
        mat = maps.setdefault(
            arrow.name, np.zeros((dims[arrow.tgt], dims[arrow.src]), dtype=np.int64)
        )
        mat[tgt_block[image], index[src_vertex][p]] = 1

    for v, ps in blocks.items():
        for p in ps:
            if grade_by_start:
                if p.length == 0:
                    continue
                a = quiver.arrow_by_name[p.arrows[0]]
                put(a, Path(a.tgt, p.end, p.arrows[1:]), v, p)
            else:
                if p.length >= L:
                    continue
                for a in quiver.arrows_from[p.end]:
                    put(a, Path(p.start, a.tgt, p.arrows + (a.name,)), v, p)
    com = Comodule(
        c, side, field, dims, {k: field.matrix(m) for k, m in maps.items()}, validate=False
    )
    return com, blocks


def injective_comodule(
    c: CoalgebraPresentation, s: SimpleLabel, field: FieldContext
) -> tuple[Comodule, ComoduleMorphism]:
    """The injective indecomposable E(S) together with its socle embedding S -> E(S)."""
    c = _required_window(c, [s.vertex], c.truncation_length + 1)
    paths = injective_basis(c, s)
    com, blocks = _path_basis_comodule(c, s.side, field, paths, grade_by_start=True)
    simple = simple_comodule(c, s.side, field, s.vertex)
    pos = blocks[s.vertex].index(Path(s.vertex, s.vertex))
    emb = np.zeros((com.dim(s.vertex), 1), dtype=np.int64)
    emb[pos, 0] = 1
    return com, ComoduleMorphism(simple, com, {s.vertex: field.matrix(emb)})


def projective_comodule(
    c: CoalgebraPresentation, s: SimpleLabel, field: FieldContext
) -> tuple[Comodule, ComoduleMorphism]:
    """The projective indecomposable P(S) together with its top projection P(S) -> S."""
    c = _required_window(c, [s.vertex], c.truncation_length + 1)
    paths = projective_basis(c, s)
    com, blocks = _path_basis_comodule(c, s.side, field, paths, grade_by_start=False)
    simple = simple_comodule(c, s.side, field, s.vertex)
    pos = blocks[s.vertex].index(Path(s.vertex, s.vertex))
    proj = np.zeros((1, com.dim(s.vertex)), dtype=np.int64)
    proj[0, pos] = 1
    return com, ComoduleMorphism(com, simple, {s.vertex: field.matrix(proj)})


class ComoduleMorphism:
    """Vertexwise family of matrices intertwining the structure maps."""

    def __init__(
        self,
        source: Comodule,
        target: Comodule,
        components: Mapping[int, DenseMatrix],
        validate: bool = True,
    ):
        if source.context_key != target.context_key:
            raise ComoduleError("morphism endpoints live over different coalgebras or sides")
        self.source = source
        self.target = target
        comps: dict[int, DenseMatrix] = {}
        for v, mat in components.items():
            v = int(v)
            expected = (target.dim(v), source.dim(v))
            if mat.shape != expected:
                raise ComoduleError(f"component at {v} has shape {mat.shape}, expected {expected}")
            if mat.a.any():
                comps[v] = mat
        self.components = dict(sorted(comps.items()))
        if validate:
            self._check_intertwining()

    def _check_intertwining(self) -> None:
        ctx = self.source.field
        quiver = _union_quiver(self.source, self.target)
        for a in quiver.arrows:
            if not self.source.dim(a.src) or not self.target.dim(a.tgt):
                continue
            lhs = ctx.matmul(self.component(a.tgt), self.source.map_for(a))
            rhs = ctx.matmul(self.target.map_for(a), self.component(a.src))
            if lhs != rhs:
                raise ComoduleError(f"components do not intertwine across arrow {a.name!r}")

    def component(self, v: int) -> DenseMatrix:
        m = self.components.get(v)
        if m is not None:
            return m
        return self.source.field.zeros(self.target.dim(v), self.source.dim(v))

    @property
    def is_zero(self) -> bool:
        return not self.components

    def compose(self, other: "ComoduleMorphism") -> "ComoduleMorphism":
        """self after other: (self . other): other.source -> self.target."""
        if other.target.context_key != self.source.context_key:
            raise ComoduleError("composition context mismatch")
        ctx = self.source.field
        comps = {}
        for v in set(self.components) | set(other.components):
            comps[v] = ctx.matmul(self.component(v), other.component(v))
        return ComoduleMorphism(other.source, self.target, comps, validate=False)

    def add(self, other: "ComoduleMorphism") -> "ComoduleMorphism":
        ctx = self.source.field
        comps = {
            v: ctx.add(self.component(v), other.component(v))
            for v in set(self.components) | set(other.components)
        }
        return ComoduleMorphism(self.source, self.target, comps, validate=False)

    def scale(self, c: int) -> "ComoduleMorphism":
        ctx = self.source.field
        comps = {v: ctx.scalar_mul(c, m) for v, m in self.components.items()}
        return ComoduleMorphism(self.source, self.target, comps, validate=False)

    def power(self, k: int) -> "ComoduleMorphism":
        """k-fold composition of an endomorphism."""
        if self.source is not self.target and self.source != self.target:
            raise ComoduleError("powers need an endomorphism")
        result = identity_morphism(self.source)
        base = self
        while k:
            if k & 1:
                result = base.compose(result)
            base = base.compose(base)
            k >>= 1
        return result

    def is_injective(self) -> bool:
        ctx = self.source.field
        return all(ctx.rank(self.component(v)) == self.source.dim(v) for v in self.source.support)

    def is_surjective(self) -> bool:
        ctx = self.source.field
        return all(ctx.rank(self.component(v)) == self.target.dim(v) for v in self.target.support)

    def is_isomorphism(self) -> bool:
        if self.source.dims != self.target.dims:
            return False
        return self.is_injective()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ComoduleMorphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.components == other.components
        )

    def __repr__(self) -> str:
        return f"ComoduleMorphism({self.source!r} -> {self.target!r})"


def identity_morphism(m: Comodule) -> ComoduleMorphism:
    ctx = m.field
    return ComoduleMorphism(m, m, {v: ctx.identity(d) for v, d in m.dims.items()}, validate=False)


def zero_morphism(m: Comodule, n: Comodule) -> ComoduleMorphism:
    return ComoduleMorphism(m, n, {}, validate=False)


@dataclass(frozen=True)
class ShortExactData:
    """A short exact sequence 0 -> A -> B -> C -> 0 given by mono and epi."""

    mono: ComoduleMorphism
    epi: ComoduleMorphism

    def __post_init__(self):
        if self.mono.target != self.epi.source:
            raise ComoduleError("mono target and epi source disagree")
        if not self.mono.is_injective():
            raise ComoduleError("mono is not injective")
        if not self.epi.is_surjective():
            raise ComoduleError("epi is not surjective")
        ctx = self.mono.source.field
        mid = self.mono.target
        for v in mid.support:
            if self.mono.source.dim(v) + self.epi.target.dim(v) != mid.dim(v):
                raise ComoduleError("dimensions are not additive")
            img = ctx.column_space(self.mono.component(v))
            ker = ctx.kernel(self.epi.component(v))
            if img.cols != ker.cols or ctx.rank(ctx.hstack([img, ker])) != img.cols:
                raise ComoduleError("image of mono differs from kernel of epi")


def _union_quiver(*comodules: Comodule) -> QuiverPresentation:
    support = [v for m in comodules for v in m.support]
    c = _required_window(comodules[0].coalgebra, support, 0)
    return c.finite_quiver()


def _shared_context(comodules: Sequence[Comodule]) -> None:
    keys = {m.context_key for m in comodules}
    if len(keys) > 1:
        raise ComoduleError("comodules live over different coalgebras, sides or fields")


# -- block linear systems -------------------------------------------------


def _solve_intertwining(
    ctx: FieldContext,
    m: Comodule,
    n: Comodule,
    extra_rows: list[tuple[dict[int, np.ndarray], np.ndarray]] | None = None,
):
    """Assemble the intertwining system for morphisms m -> n.

    Unknowns are the row-major vectorized components f_v at vertices where
    both m and n are supported.  Returns (blocks, offsets, A, rhs) with A
    the coefficient matrix; callers take its kernel (hom spaces) or solve
    against rhs (extension problems).
    """
    blocks = [v for v in sorted(set(m.support) & set(n.support))]
    sizes = {v: n.dim(v) * m.dim(v) for v in blocks}
    offsets = {}
    total = 0
    for v in blocks:
        offsets[v] = total
        total += sizes[v]

    quiver = _union_quiver(m, n)
    rows: list[np.ndarray] = []
    rhs_rows: list[np.ndarray] = []
    for a in quiver.arrows:
        s, t = a.src, a.tgt
        if not m.dim(s) or not n.dim(t):
            continue
        eq = n.dim(t) * m.dim(s)
        if not eq:
            continue
        block_terms = {}
        if m.dim(t):
            block_terms[t] = np.kron(np.eye(n.dim(t), dtype=np.int64), m.map_for(a).a.T)
        if n.dim(s):
            term = np.kron(n.map_for(a).a, np.eye(m.dim(s), dtype=np.int64))
            block_terms[s] = (block_terms.get(s, 0) - term) % ctx.p
        if not block_terms:
            continue
        chunk = np.zeros((eq, total), dtype=np.int64)
        for v, term in block_terms.items():
            chunk[:, offsets[v] : offsets[v] + sizes[v]] = term % ctx.p
        rows.append(chunk)
        rhs_rows.append(np.zeros((eq, 1), dtype=np.int64))
    for block_terms, rhs in extra_rows or []:
        eq = rhs.shape[0]
        chunk = np.zeros((eq, total), dtype=np.int64)
        for v, term in block_terms.items():
            chunk[:, offsets[v] : offsets[v] + sizes[v]] = term % ctx.p
        rows.append(chunk)
        rhs_rows.append(rhs.reshape(eq, 1) % ctx.p)
    a_mat = np.vstack(rows) if rows else np.zeros((0, total), dtype=np.int64)
    rhs = np.vstack(rhs_rows) if rhs_rows else np.zeros((0, 1), dtype=np.int64)
    return blocks, offsets, sizes, DenseMatrix(a_mat), DenseMatrix(rhs)


def _unvec(ctx: FieldContext, m: Comodule, n: Comodule, blocks, offsets, sizes, flat: np.ndarray):
    comps = {}
    for v in blocks:
        chunk = flat[offsets[v] : offsets[v] + sizes[v]]
        comps[v] = ctx.matrix(chunk.reshape(n.dim(v), m.dim(v)))
    return comps


def hom_basis(m: Comodule, n: Comodule) -> tuple[ComoduleMorphism, ...]:
    """Basis of the space of comodule morphisms m -> n.

    Solves the arrowwise intertwining system over GF(p); the result is
    deterministic in elimination order.
    """
    _shared_context([m, n])
    ctx = m.field
    blocks, offsets, sizes, a_mat, _ = _solve_intertwining(ctx, m, n)
    if a_mat.cols == 0:
        return ()
    kern = ctx.kernel(a_mat)
    out = []
    for j in range(kern.cols):
        comps = _unvec(ctx, m, n, blocks, offsets, sizes, kern.a[:, j])
        out.append(ComoduleMorphism(m, n, comps, validate=False))
    return tuple(out)


def socle(m: Comodule) -> tuple[Comodule, ComoduleMorphism]:
    """Largest semisimple subcomodule with its inclusion.

    At each vertex the socle is the joint kernel of all structure maps
    acting out of that vertex; the result carries zero maps.
    """
    ctx = m.field
    quiver = _union_quiver(m)
    dims = {}
    comps = {}
    for v in m.support:
        outgoing = [m.map_for(a) for a in quiver.arrows_from[v] if m.dim(a.tgt) and m.maps.get(a.name)]
        if not outgoing:
            dims[v] = m.dim(v)
            comps[v] = ctx.identity(m.dim(v))
            continue
        basis = ctx.kernel(ctx.vstack(outgoing))
        if basis.cols:
            dims[v] = basis.cols
            comps[v] = basis
    soc = Comodule(m.coalgebra, m.side, m.field, dims, validate=False)
    return soc, ComoduleMorphism(soc, m, comps, validate=False)


def top(m: Comodule) -> tuple[Comodule, ComoduleMorphism]:
    """Largest semisimple quotient m/rad(m) with its projection.

    rad(m) at a vertex is the sum of images of all structure maps acting
    into that vertex.
    """
    ctx = m.field
    quiver = _union_quiver(m)
    dims = {}
    comps = {}
    for v in m.support:
        incoming = [m.map_for(a) for a in quiver.arrows_into[v] if m.dim(a.src) and m.maps.get(a.name)]
        if not incoming:
            dims[v] = m.dim(v)
            comps[v] = ctx.identity(m.dim(v))
            continue
        rad = ctx.column_space(ctx.hstack(incoming))
        q = ctx.kernel(rad.transpose()).transpose()
        if q.rows:
            dims[v] = q.rows
            comps[v] = q
    quot = Comodule(m.coalgebra, m.side, m.field, dims, validate=False)
    return quot, ComoduleMorphism(m, quot, comps, validate=False)


def sub_comodule(m: Comodule, bases: Mapping[int, DenseMatrix]) -> tuple[Comodule, ComoduleMorphism]:
    """Subcomodule spanned by independent columns at each vertex.

    Raises if the spans are not closed under the structure maps.
    """
    ctx = m.field
    quiver = _union_quiver(m)
    bases = {v: b for v, b in bases.items() if b.cols}
    dims = {v: b.cols for v, b in bases.items()}
    maps = {}
    for a in quiver.arrows:
        bs, bt = bases.get(a.src), bases.get(a.tgt)
        if bs is None or not m.dim(a.src) or not m.dim(a.tgt):
            continue
        mapped = ctx.matmul(m.map_for(a), bs)
        if not mapped.a.any():
            continue
        if bt is None:
            raise ComoduleError(f"span not closed under arrow {a.name!r}")
        coords = ctx.coordinates(bt, mapped)
        if coords is None:
            raise ComoduleError(f"span not closed under arrow {a.name!r}")
        maps[a.name] = coords
    sub = Comodule(m.coalgebra, m.side, m.field, dims, maps, validate=False)
    return sub, ComoduleMorphism(sub, m, dict(bases), validate=False)


def quotient_comodule(m: Comodule, killed: Mapping[int, DenseMatrix]) -> tuple[Comodule, ComoduleMorphism]:
    """Quotient of m by the subcomodule spanned columnwise by `killed`."""
    ctx = m.field
    quiver = _union_quiver(m)
    proj = {}
    dims = {}
    for v in m.support:
        b = killed.get(v)
        if b is None or not b.cols:
            dims[v] = m.dim(v)
            proj[v] = ctx.identity(m.dim(v))
            continue
        span = ctx.column_space(b)
        q = ctx.kernel(span.transpose()).transpose()
        if q.rows:
            dims[v] = q.rows
            proj[v] = q
    maps = {}
    for a in quiver.arrows:
        qs, qt = proj.get(a.src), proj.get(a.tgt)
        if qs is None or qt is None or not qs.rows or not qt.rows:
            continue
        rhs = ctx.matmul(qt, m.map_for(a))
        if not rhs.a.any():
            continue
        # unique X with X qs = qt m_a; transpose to a standard solve
        x_t = ctx.solve(qs.transpose(), rhs.transpose())
        if x_t is None:
            raise ComoduleError(f"killed span not closed under arrow {a.name!r}")
        maps[a.name] = x_t.transpose()
    quot = Comodule(m.coalgebra, m.side, m.field, dims, maps, validate=False)
    comps = {v: q for v, q in proj.items() if q.rows}
    return quot, ComoduleMorphism(m, quot, comps, validate=False)


def kernel_comodule(f: ComoduleMorphism) -> tuple[Comodule, ComoduleMorphism]:
    ctx = f.source.field
    bases = {v: ctx.kernel(f.component(v)) for v in f.source.support}
    return sub_comodule(f.source, bases)


def image_comodule(f: ComoduleMorphism) -> tuple[Comodule, ComoduleMorphism]:
    ctx = f.source.field
    bases = {v: ctx.column_space(f.component(v)) for v in f.target.support if f.source.dim(v)}
    return sub_comodule(f.target, bases)


def cokernel_comodule(f: ComoduleMorphism) -> tuple[Comodule, ComoduleMorphism]:
    killed = {v: f.component(v) for v in f.target.support if f.source.dim(v)}
    return quotient_comodule(f.target, killed)


def direct_sum(parts: Sequence[Comodule]) -> Comodule:
    """Block-diagonal direct sum; dims add vertexwise."""
    total, _, _ = direct_sum_with_maps(parts)
    return total


def direct_sum_with_maps(
    parts: Sequence[Comodule],
) -> tuple[Comodule, list[ComoduleMorphism], list[ComoduleMorphism]]:
    """Direct sum together with the canonical injections and projections."""
    parts = list(parts)
    if not parts:
        raise ComoduleError("direct sum needs at least one part (use a zero comodule)")
    _shared_context(parts)
    ctx = parts[0].field
    dims: dict[int, int] = {}
    for part in parts:
        for v, d in part.dims.items():
            dims[v] = dims.get(v, 0) + d
    offsets: list[dict[int, int]] = []
    running: dict[int, int] = {v: 0 for v in dims}
    for part in parts:
        offsets.append({v: running.get(v, 0) for v in part.support})
        for v in part.support:
            running[v] += part.dim(v)

    coalg = parts[0].coalgebra
    coalg = _required_window(coalg, dims.keys(), 0)
    quiver = coalg.finite_quiver()
    maps: dict[str, np.ndarray] = {}
    for a in quiver.arrows:
        if not dims.get(a.src) or not dims.get(a.tgt):
            continue
        block = None
        for part, off in zip(parts, offsets):
            pm = part.maps.get(a.name)
            if pm is None:
                continue
            if block is None:
                block = np.zeros((dims[a.tgt], dims[a.src]), dtype=np.int64)
            r0, c0 = off[a.tgt], off[a.src]
            block[r0 : r0 + part.dim(a.tgt), c0 : c0 + part.dim(a.src)] = pm.a
        if block is not None:
            maps[a.name] = block
    total = Comodule(
        coalg, parts[0].side, ctx, dims, {k: ctx.matrix(v) for k, v in maps.items()}, validate=False
    )

    injections = []
    projections = []
    for part, off in zip(parts, offsets):
        inj = {}
        proj = {}
        for v in part.support:
            block = np.zeros((dims[v], part.dim(v)), dtype=np.int64)
            block[off[v] : off[v] + part.dim(v), :] = np.eye(part.dim(v), dtype=np.int64)
            inj[v] = DenseMatrix(block)
            proj[v] = DenseMatrix(block.T)
        injections.append(ComoduleMorphism(part, total, inj, validate=False))
        projections.append(ComoduleMorphism(total, part, proj, validate=False))
    return total, injections, projections


def injective_envelope(m: Comodule) -> tuple[Comodule, ComoduleMorphism]:
    """Injective envelope E(m) with an embedding m -> E(m).

    E(m) is the direct sum over the socle of copies of the combinatorial
    injective indecomposables; the embedding extends the canonical socle
    identification, solved in deterministic elimination order.  The
    restriction of the embedding to socles is an isomorphism.
    """
    ctx = m.field
    if m.is_zero:
        return m, zero_morphism(m, m)
    coalg = _required_window(m.coalgebra, m.support, m.coalgebra.truncation_length + 1)
    if coalg is not m.coalgebra:
        m = Comodule(coalg, m.side, m.field, m.dims, m.maps, validate=False)
    soc, incl = socle(m)

    blocks: list[Comodule] = []
    socle_positions: list[tuple[int, int]] = []  # (vertex, index of e_v inside block)
    for v in soc.support:
        e_block, s_emb = injective_comodule(coalg, SimpleLabel(v, m.side), ctx)
        pos = int(np.nonzero(s_emb.component(v).a[:, 0])[0][0])
        for _ in range(soc.dim(v)):
            blocks.append(e_block)
            socle_positions.append((v, pos))
    env, injections, _ = direct_sum_with_maps(blocks)

    # canonical embedding of the socle: copy j of S_v lands on e_v of its block
    emb_cols: dict[int, list[np.ndarray]] = {v: [] for v in soc.support}
    copy_iter = 0
    for v in soc.support:
        for _ in range(soc.dim(v)):
            inj = injections[copy_iter]
            col = np.zeros((env.dim(v),), dtype=np.int64)
            offset_col = inj.component(v).a[:, socle_positions[copy_iter][1]]
            col[:] = offset_col
            emb_cols[v].append(col)
            copy_iter += 1
    emb = {v: ctx.matrix(np.stack(cols, axis=1)) for v, cols in emb_cols.items()}

    if soc.total_dim == m.total_dim:
        # semisimple input: the socle inclusion is invertible vertexwise
        comps = {
            v: ctx.matmul(emb[v], ctx.inverse(incl.component(v))) for v in soc.support
        }
        u = ComoduleMorphism(m, env, comps, validate=False)
        return env, u

    extra = []
    for v in soc.support:
        # u_v @ incl_v = emb_v
        term = np.kron(np.eye(env.dim(v), dtype=np.int64), incl.component(v).a.T)
        extra.append(({v: term}, emb[v].a.reshape(-1)))
    blocks_v, offsets, sizes, a_mat, rhs = _solve_intertwining(ctx, m, env, extra_rows=extra)
    sol = ctx.solve(a_mat, rhs)
    if sol is None:
        raise ComoduleError("envelope extension system is unsolvable; this is a bug")
    comps = _unvec(ctx, m, env, blocks_v, offsets, sizes, sol.a[:, 0])
    u = ComoduleMorphism(m, env, comps, validate=False)
    for v in m.support:
        if ctx.rank(u.component(v)) != m.dim(v):
            raise ComoduleError("envelope embedding failed to be injective; this is a bug")
    return env, u


def envelope_sequence(m: Comodule) -> ShortExactData:
    """The short exact sequence m -> E(m) -> cosyzygy(m)."""
    env, u = injective_envelope(m)
    _, proj = cokernel_comodule(u)
    return ShortExactData(u, proj)


def cosyzygy(m: Comodule, k: int = 1) -> Comodule:
    """k-th cosyzygy: iterated cokernel of the injective envelope embedding."""
    if k < 0:
        raise ValueError("k must be >= 0")
    cur = m
    for _ in range(k):
        env, u = injective_envelope(cur)
        cur, _ = cokernel_comodule(u)
    return cur


@dataclass(frozen=True)
class InjectiveDimension:
    """Outcome of the injective dimension probe."""

    finite: bool
    value: int  # the dimension if finite, otherwise the horizon searched

    def __str__(self) -> str:
        return f"FINITE({self.value})" if self.finite else f"NO_WITNESS({self.value})"


def is_injective_comodule(m: Comodule) -> bool:
    """Injectivity test: the envelope embedding is an isomorphism.

    Dimension equality suffices once the envelope is constructed.
    """
    env, _ = injective_envelope(m)
    return env.total_dim == m.total_dim


def injective_dimension_probe(m: Comodule, horizon: int) -> InjectiveDimension:
    """Least d <= horizon with the d-th cosyzygy injective, else NO_WITNESS."""
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    cur = m
    for d in range(horizon + 1):
        env, u = injective_envelope(cur)
        if env.total_dim == cur.total_dim:
            return InjectiveDimension(True, d)
        cur, _ = cokernel_comodule(u)
    return InjectiveDimension(False, horizon)
