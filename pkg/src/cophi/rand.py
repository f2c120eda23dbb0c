"""Seeded random generators for comodules and morphisms.

Everything takes an explicit numpy Generator so runs are reproducible from
a single recorded seed.  Random comodules are built level-graded: each
basis vector gets a level in 0..L and arrows only map level g into levels
above g, which enforces the length-(L+1) nilpotency by construction; a
final random basis change hides the grading.
"""

from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

from .coalg import CoalgebraPresentation
from .comod import Comodule, ComoduleMorphism
from .exactlin import DenseMatrix, FieldContext


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_invertible(ctx: FieldContext, n: int, rng: np.random.Generator) -> DenseMatrix:
    """Uniformly sampled invertible n x n matrix over GF(p) (rejection)."""
    if n == 0:
        return ctx.zeros(0, 0)
    while True:
        m = ctx.matrix(rng.integers(0, ctx.p, size=(n, n)))
        if ctx.is_invertible(m):
            return m


def random_basis_change(m: Comodule, rng: np.random.Generator) -> tuple[Comodule, ComoduleMorphism]:
    """Conjugate m by random vertexwise basis changes.

    Returns (m', g) with g: m -> m' an isomorphism; the structure maps of
    m' are g_t T_a g_s^{-1}.
    """
    ctx = m.field
    g = {v: random_invertible(ctx, d, rng) for v, d in m.dims.items()}
    g_inv = {v: ctx.inverse(mat) for v, mat in g.items()}
    quiver = m.coalgebra.finite_quiver()
    maps = {}
    for name, mat in m.maps.items():
        a = quiver.arrow_by_name[name]
        maps[name] = ctx.matmul(g[a.tgt], ctx.matmul(mat, g_inv[a.src]))
    shuffled = Comodule(m.coalgebra, m.side, ctx, m.dims, maps, validate=False)
    return shuffled, ComoduleMorphism(m, shuffled, g, validate=False)


def random_comodule(
    c: CoalgebraPresentation,
    side: str,
    ctx: FieldContext,
    rng: np.random.Generator,
    vertices: Sequence[int],
    max_total_dim: int = 12,
    scramble: bool = True,
) -> Comodule:
    """Random nilpotent representation supported inside the given vertices."""
    L = c.truncation_length
    pool = sorted(vertices)
    quiver = c.with_window(max(pool) + 1 if pool else 0).finite_quiver()
    pool = [v for v in pool if v in set(quiver.vertices)]
    if not pool:
        raise ValueError("no usable support vertices")
    dims: dict[int, int] = {}
    levels: dict[int, np.ndarray] = {}
    budget = int(rng.integers(1, max_total_dim + 1))
    while budget > 0:
        v = int(pool[rng.integers(0, len(pool))])
        d = int(rng.integers(1, min(3, budget) + 1))
        dims[v] = dims.get(v, 0) + d
        budget -= d
    for v, d in dims.items():
        levels[v] = rng.integers(0, L + 1, size=d)

    maps = {}
    for a in quiver.arrows:
        if a.src not in dims or a.tgt not in dims:
            continue
        ls, lt = levels[a.src], levels[a.tgt]
        mask = lt[:, None] > ls[None, :]
        if not mask.any():
            continue
        mat = rng.integers(0, ctx.p, size=mask.shape) * mask
        if mat.any():
            maps[a.name] = ctx.matrix(mat)
    m = Comodule(c, side, ctx, dims, maps)
    if scramble:
        m, _ = random_basis_change(m, rng)
    return m


def random_semisimple(
    c: CoalgebraPresentation,
    side: str,
    ctx: FieldContext,
    rng: np.random.Generator,
    vertices: Sequence[int],
    max_total_dim: int = 8,
) -> Comodule:
    """Random cosemisimple comodule (all structure maps zero)."""
    pool = sorted(vertices)
    count = int(rng.integers(1, max_total_dim + 1))
    dims: dict[int, int] = {}
    for _ in range(count):
        v = int(pool[rng.integers(0, len(pool))])
        dims[v] = dims.get(v, 0) + 1
    return Comodule(c, side, ctx, dims, validate=False)


def random_morphism_in_span(
    basis: Sequence[ComoduleMorphism], rng: np.random.Generator
) -> ComoduleMorphism:
    """Random GF(p)-combination of a morphism basis (must be nonempty)."""
    ctx = basis[0].source.field
    coeffs = rng.integers(0, ctx.p, size=len(basis))
    out = basis[0].scale(int(coeffs[0]))
    for c_i, f in zip(coeffs[1:], basis[1:]):
        out = out.add(f.scale(int(c_i)))
    return out


def sample_stream(make_one, rng: np.random.Generator) -> Iterator:
    """Endless stream of samples from a maker taking the generator."""
    while True:
        yield make_one(rng)
