"""Krull-Schmidt machinery for comodules.

Endomorphism algebras, randomized Fitting splits, indecomposability
certification via the trace-form radical, isomorphism testing with
explicit invertible witnesses, and the registry of isomorphism classes
that serves as the free basis of the class group.

Soundness notes.  A True from the isomorphism test always carries an
explicit invertible morphism; a False is randomized but backed by a
decomposition fallback.  Indecomposability certification is exact: it
requires p > dim End(m) so the radical of the trace bilinear form equals
the Jacobson radical, and over a finite field the quotient is a division
algebra precisely when it is a (commutative) finite field, which is
decided through minimal polynomials.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .comod import (
    Comodule,
    ComoduleError,
    ComoduleMorphism,
    direct_sum,
    hom_basis,
    identity_morphism,
    image_comodule,
    injective_envelope,
    kernel_comodule,
    socle,
    top,
    zero_morphism,
)
from .exactlin import DenseMatrix, FieldContext
from .rand import random_morphism_in_span, rng_from_seed


class FieldTooSmallError(Exception):
    """p <= dim End(m): the trace-form radical computation is not valid."""


class DecompositionStuckError(Exception):
    """No split found on a piece that fails indecomposability certification."""


# -- polynomials over GF(p), dense ascending coefficients -------------------


def _ptrim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _psub(f: list[int], g: list[int], p: int) -> list[int]:
    n = max(len(f), len(g))
    out = [((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p for i in range(n)]
    return _ptrim(out)


def _pmul(f: list[int], g: list[int], p: int) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _ptrim(out)


def _pmod(f: list[int], g: list[int], p: int) -> list[int]:
    f = list(f)
    dg = len(g) - 1
    inv = pow(g[-1], p - 2, p)
    while len(f) - 1 >= dg and f:
        c = f[-1] * inv % p
        shift = len(f) - 1 - dg
        for i, b in enumerate(g):
            f[shift + i] = (f[shift + i] - c * b) % p
        _ptrim(f)
    return f


def _pgcd(f: list[int], g: list[int], p: int) -> list[int]:
    f, g = list(f), list(g)
    while g:
        f, g = g, _pmod(f, g, p)
    if f:
        inv = pow(f[-1], p - 2, p)
        f = [c * inv % p for c in f]
    return f


def _plcm(f: list[int], g: list[int], p: int) -> list[int]:
    if not f:
        return list(g)
    if not g:
        return list(f)
    d = _pgcd(f, g, p)
    quot = _pdiv(f, d, p)
    return _pmul(quot, g, p)


def _pdiv(f: list[int], g: list[int], p: int) -> list[int]:
    f = list(f)
    dg = len(g) - 1
    inv = pow(g[-1], p - 2, p)
    out = [0] * max(len(f) - dg, 0)
    while len(f) - 1 >= dg and f:
        c = f[-1] * inv % p
        shift = len(f) - 1 - dg
        out[shift] = c
        for i, b in enumerate(g):
            f[shift + i] = (f[shift + i] - c * b) % p
        _ptrim(f)
    return _ptrim(out)


def _ppow_mod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, mod, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), mod, p)
        base = _pmod(_pmul(base, base, p), mod, p)
        e >>= 1
    return result


def _peval(f: list[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def _min_poly(ctx: FieldContext, f_mat: DenseMatrix) -> list[int]:
    """Minimal polynomial of a square matrix over GF(p) via Krylov chains."""
    d = f_mat.rows
    if d == 0:
        return [1]
    acc: list[int] = [1]
    for i in range(d):
        if len(acc) - 1 == d:
            break
        v = ctx.zeros(d, 1).a.copy()
        v[i, 0] = 1
        cols = [v.reshape(-1)]
        cur = DenseMatrix(v)
        local = None
        while local is None:
            cur = ctx.matmul(f_mat, cur)
            basis = ctx.matrix(np.stack(cols, axis=1))
            sol = ctx.solve(basis, cur)
            if sol is not None:
                k = len(cols)
                local = [(-int(sol.a[j, 0])) % ctx.p for j in range(k)] + [1]
            else:
                cols.append(cur.a.reshape(-1))
        acc = _plcm(acc, local, ctx.p)
    return acc


def _first_distinct_degree(mu: list[int], p: int) -> tuple[int, bool]:
    """Smallest degree d of an irreducible factor of squarefree mu.

    Returns (d, irreducible) where irreducible means the first factors
    found already exhaust mu, i.e. mu is irreducible.
    """
    deg = len(mu) - 1
    w = [0, 1]  # t
    for d in range(1, deg + 1):
        w = _ppow_mod(w, p, mu, p)
        g = _pgcd(_psub(w, [0, 1], p), mu, p)
        if len(g) - 1 > 0:
            return d, d == deg
    return deg, True


def _roots_in_field(mu: list[int], p: int, rng: np.random.Generator) -> list[int]:
    """All roots of mu in GF(p), exact; mu need not be squarefree."""
    if len(mu) - 1 < 1:
        return []
    tp = _ppow_mod([0, 1], p, mu, p)
    g = _pgcd(_psub(tp, [0, 1], p), mu, p)
    if len(g) - 1 < 1:
        return []
    if p <= 4096:
        return sorted(x for x in range(p) if _peval(g, x, p) == 0)

    roots: list[int] = []

    def split(h: list[int]) -> None:
        d = len(h) - 1
        if d == 0:
            return
        if d == 1:
            roots.append((-h[0]) * pow(h[1], p - 2, p) % p)
            return
        while True:
            delta = int(rng.integers(0, p))
            probe = _psub(_ppow_mod([delta, 1], (p - 1) // 2, h, p), [1], p)
            d1 = _pgcd(probe, h, p)
            if 0 < len(d1) - 1 < d:
                split(d1)
                split(_pdiv(h, d1, p))
                return

    split(g)
    return sorted(roots)


# -- endomorphism algebras ---------------------------------------------------


def _vec_morphism(f: ComoduleMorphism, support: Sequence[int]) -> np.ndarray:
    chunks = [f.component(v).a.reshape(-1) for v in support]
    if not chunks:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(chunks)


@dataclass(frozen=True)
class EndoAlgebra:
    """End(m): a morphism basis with structure constants over GF(p).

    mult_table[i, j, k] is the coefficient of basis[k] in
    basis[i] . basis[j]; identity_coords expresses the identity morphism.
    """

    module: Comodule
    basis: tuple[ComoduleMorphism, ...]
    mult_table: np.ndarray
    identity_coords: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.basis)

    def element(self, coords: Sequence[int]) -> ComoduleMorphism:
        ctx = self.module.field
        out = zero_morphism(self.module, self.module)
        for c, b in zip(coords, self.basis):
            if int(c) % ctx.p:
                out = out.add(b.scale(int(c)))
        return out


def endo_algebra(m: Comodule) -> EndoAlgebra:
    """Basis of End(m) plus its multiplication table."""
    if m.is_zero:
        raise ValueError("the zero comodule has trivial endomorphisms")
    ctx = m.field
    basis = hom_basis(m, m)
    e = len(basis)
    support = sorted(m.support)
    bmat = ctx.matrix(np.stack([_vec_morphism(b, support) for b in basis], axis=1))
    prods = []
    for bi in basis:
        for bj in basis:
            prods.append(_vec_morphism(bi.compose(bj), support))
    coords = ctx.solve(bmat, ctx.matrix(np.stack(prods, axis=1)))
    if coords is None:
        raise ComoduleError("endomorphism products left the computed basis; this is a bug")
    table = coords.a.T.reshape(e, e, e)
    ident = ctx.solve(bmat, ctx.matrix(_vec_morphism(identity_morphism(m), support).reshape(-1, 1)))
    if ident is None:
        raise ComoduleError("identity not in the endomorphism basis; this is a bug")
    return EndoAlgebra(m, basis, table, ident.a[:, 0])


def fitting_split(
    m: Comodule,
    attempts: int = 32,
    *,
    seed: int = 0,
    rng: np.random.Generator | None = None,
    endo: EndoAlgebra | None = None,
) -> tuple[Comodule, Comodule] | None:
    """Try to split m as ker(h^d) + im(h^d) for endomorphisms h.

    Basis elements are tried first, then seeded random combinations; each
    candidate f is shifted by its eigenvalues in GF(p) before taking the
    Fitting power, since a generic endomorphism of a decomposable module
    is invertible but has separating eigenvalues.  Returns the two
    nonzero parts, or None after the attempt budget.
    """
    if m.is_zero:
        raise ValueError("cannot split the zero comodule")
    if attempts < 1:
        raise ValueError("attempts must be >= 1")
    endo = endo or endo_algebra(m)
    if endo.dim == 1:
        return None
    ctx = m.field
    rng = rng or rng_from_seed(seed)
    total = m.total_dim
    support = sorted(m.support)

    tried = 0
    idx = 0
    while tried < attempts:
        if idx < endo.dim:
            f = endo.basis[idx]
            idx += 1
        else:
            f = random_morphism_in_span(endo.basis, rng)
        tried += 1
        f_total = FieldContext.block_diag([f.component(v) for v in support])
        mu = _min_poly(ctx, f_total)
        for lam in _roots_in_field(mu, ctx.p, rng):
            h = f.add(identity_morphism(m).scale(-lam))
            power = h.power(total)
            ker, _ = kernel_comodule(power)
            if 0 < ker.total_dim < total:
                img, _ = image_comodule(power)
                return ker, img
    return None


def _trace_form_radical(ctx: FieldContext, table: np.ndarray) -> DenseMatrix:
    """Kernel of the trace form of the left regular representation."""
    e = table.shape[0]
    tr_left = np.einsum("ljj->l", table) % ctx.p
    gram = np.einsum("ijl,l->ij", table, tr_left) % ctx.p
    return ctx.kernel(ctx.matrix(gram))


def certify_indecomposable(
    m: Comodule,
    *,
    seed: int = 0,
    endo: EndoAlgebra | None = None,
) -> bool:
    """Exact test that End(m) is local, i.e. m is indecomposable.

    Computes rad End as the radical of the trace bilinear form (valid for
    p > dim End, enforced), then decides whether End/rad is a division
    algebra.  Over a finite field that forces End/rad to be a finite
    field, so it suffices that the quotient is commutative and that some
    element has an irreducible minimal polynomial of full degree; an
    element with a reducible minimal polynomial exhibits zero divisors.
    """
    if m.is_zero:
        raise ValueError("the zero comodule is not indecomposable")
    endo = endo or endo_algebra(m)
    ctx = m.field
    e = endo.dim
    if ctx.p <= e:
        raise FieldTooSmallError(
            f"p={ctx.p} must exceed dim End = {e}; rerun with a larger field"
        )
    if e == 1:
        return True
    rad = _trace_form_radical(ctx, endo.mult_table)
    r = rad.cols
    q = e - r
    if q == 1:
        return True

    # complement of the radical inside End, greedily from unit vectors
    cols = [rad.a[:, j] for j in range(r)]
    comp: list[np.ndarray] = []
    for j in range(e):
        cand = np.zeros(e, dtype=np.int64)
        cand[j] = 1
        stack = ctx.matrix(np.stack(cols + comp + [cand], axis=1)) if cols or comp else ctx.matrix(cand.reshape(-1, 1))
        if ctx.rank(stack) == len(cols) + len(comp) + 1:
            comp.append(cand)
        if len(comp) == q:
            break
    full = ctx.matrix(np.stack(cols + comp, axis=1)) if cols else ctx.matrix(np.stack(comp, axis=1))

    def q_coords(vec: np.ndarray) -> np.ndarray:
        sol = ctx.solve(full, ctx.matrix(vec.reshape(-1, 1)))
        if sol is None:
            raise ComoduleError("radical complement failed to span; this is a bug")
        return sol.a[r:, 0]

    # structure constants of the quotient algebra
    table = endo.mult_table
    mult_q = np.zeros((q, q, q), dtype=np.int64)
    for i in range(q):
        for j in range(q):
            prod = np.einsum("a,b,abk->k", comp[i], comp[j], table) % ctx.p
            mult_q[i, j] = q_coords(prod)

    for i in range(q):
        for j in range(i + 1, q):
            if not np.array_equal(mult_q[i, j], mult_q[j, i]):
                return False  # noncommutative semisimple quotient: not a division algebra

    rng = rng_from_seed(seed)
    for _ in range(64):
        z = rng.integers(0, ctx.p, size=q)
        l_z = ctx.matrix(np.einsum("i,ijk->kj", z, mult_q) % ctx.p)
        mu = _min_poly(ctx, l_z)
        deg = len(mu) - 1
        if deg == 0:
            continue
        _, irreducible = _first_distinct_degree(mu, ctx.p)
        if not irreducible:
            return False  # reducible minimal polynomial exhibits zero divisors
        if deg == q:
            return True  # the quotient is the field GF(p)[z]
    raise RuntimeError(
        "quotient-algebra analysis inconclusive after 64 samples; raise p and retry"
    )


# -- isomorphism testing -----------------------------------------------------


def _quick_invariants(m: Comodule) -> tuple:
    soc, _ = socle(m)
    quot, _ = top(m)
    return (soc.total_dim, tuple(sorted(soc.dims.items())), quot.total_dim, tuple(sorted(quot.dims.items())))


def iso_witness(
    m: Comodule,
    n: Comodule,
    attempts: int = 32,
    *,
    seed: int = 0,
    rng: np.random.Generator | None = None,
    registry: "IsoRegistry | None" = None,
    _allow_fallback: bool = True,
) -> ComoduleMorphism | None:
    """Explicit isomorphism m -> n, or None.

    Fast-rejects on invariant mismatches, samples random morphisms for an
    invertible one, and (for decomposables) falls back to decomposing both
    sides and comparing registry classes.  A non-None result is always a
    verified invertible morphism.
    """
    if m.context_key != n.context_key:
        raise ComoduleError("isomorphism test across different coalgebras, sides or fields")
    if m.dims != n.dims:
        return None
    if m.is_zero:
        return zero_morphism(m, n)
    if _quick_invariants(m) != _quick_invariants(n):
        return None
    hom_mn = hom_basis(m, n)
    if not hom_mn:
        return None
    end_m = len(hom_basis(m, m))
    if len(hom_mn) != end_m or len(hom_basis(n, n)) != end_m:
        return None
    rng = rng or rng_from_seed(seed)
    for _ in range(attempts):
        h = random_morphism_in_span(hom_mn, rng)
        if h.is_isomorphism():
            return h
    if not _allow_fallback:
        return None
    if registry is None:
        registry = IsoRegistry()
    ids_m = decompose(m, registry, rng=rng, verify=False).multiset()
    ids_n = decompose(n, registry, rng=rng, verify=False).multiset()
    if ids_m != ids_n:
        return None
    for _ in range(attempts * 8):
        h = random_morphism_in_span(hom_mn, rng)
        if h.is_isomorphism():
            return h
    raise RuntimeError("isomorphic by decomposition, but no explicit witness was found")


def is_isomorphic(
    m: Comodule,
    n: Comodule,
    attempts: int = 32,
    *,
    seed: int = 0,
    registry: "IsoRegistry | None" = None,
) -> bool:
    """Randomized isomorphism test; True always has an invertible witness."""
    return iso_witness(m, n, attempts, seed=seed, registry=registry) is not None


# -- the isomorphism-class registry ------------------------------------------


@dataclass(frozen=True)
class RegistryEntry:
    rid: int
    comodule: Comodule
    fingerprint: tuple
    injective: bool


class IsoRegistry:
    """Registry of pairwise non-isomorphic indecomposable representatives.

    Fingerprints (total dimension, dimension data, dim End, dim soc,
    dim top) are a lookup filter only; a fingerprint collision always
    triggers a full isomorphism test.  Single-writer contract: insertions
    are serialized by the caller; reads of returned entries are safe.
    """

    def __init__(self, attempts: int = 32, seed: int = 0):
        self._entries: dict[int, RegistryEntry] = {}
        self._by_fp: dict[tuple, list[int]] = {}
        self._context_key = None
        self._attempts = attempts
        self._rng = rng_from_seed(seed)

    def __len__(self) -> int:
        return len(self._entries)

    def ids(self) -> tuple[int, ...]:
        return tuple(self._entries)

    def entry(self, rid: int) -> RegistryEntry:
        return self._entries[rid]

    def _fingerprint(self, m: Comodule) -> tuple:
        soc, _ = socle(m)
        quot, _ = top(m)
        return (
            m.total_dim,
            tuple(sorted(m.dims.items())),
            len(hom_basis(m, m)),
            soc.total_dim,
            quot.total_dim,
        )

    def lookup_or_insert(self, m: Comodule) -> int:
        """Registry id of the class of m (assumed indecomposable)."""
        if m.is_zero:
            raise ValueError("the zero comodule has no registry class")
        if self._context_key is None:
            self._context_key = m.context_key
        elif self._context_key != m.context_key:
            raise ComoduleError("registry holds classes of a different coalgebra context")
        fp = self._fingerprint(m)
        for rid in self._by_fp.get(fp, ()):  # full test on fingerprint collision
            cand = self._entries[rid].comodule
            if iso_witness(m, cand, self._attempts, rng=self._rng, _allow_fallback=False):
                return rid
        rid = len(self._entries)
        env, _ = injective_envelope(m)
        entry = RegistryEntry(rid, m, fp, env.total_dim == m.total_dim)
        self._entries[rid] = entry
        self._by_fp.setdefault(fp, []).append(rid)
        return rid

    def dump(self) -> list[dict]:
        """One record per entry, for report cross-referencing."""
        return [
            {
                "id": e.rid,
                "fingerprint": list(e.fingerprint[:2]) + list(e.fingerprint[2:]),
                "dims": {str(v): d for v, d in e.comodule.dims.items()},
                "injective": e.injective,
            }
            for e in self._entries.values()
        ]


@dataclass(frozen=True)
class Decomposition:
    """Indecomposable parts with multiplicities, matched into a registry."""

    parts: tuple[tuple[Comodule, int], ...]
    registry_ids: tuple[tuple[int, int], ...]

    def multiset(self) -> tuple[int, ...]:
        out: list[int] = []
        for rid, mult in self.registry_ids:
            out.extend([rid] * mult)
        return tuple(sorted(out))

    @property
    def total_dim(self) -> int:
        return sum(rep.total_dim * mult for rep, mult in self.parts)


def decompose(
    m: Comodule,
    registry: IsoRegistry,
    attempts: int = 32,
    *,
    seed: int = 0,
    rng: np.random.Generator | None = None,
    verify: bool = True,
) -> Decomposition:
    """Full Krull-Schmidt decomposition of m.

    Recursively applies fitting_split; every leaf must pass
    certify_indecomposable, otherwise DecompositionStuckError is raised
    (soundness of everything downstream depends on complete
    decompositions).  With verify=True the reassembled direct sum is
    checked isomorphic to m.
    """
    rng = rng or rng_from_seed(seed)
    stack = [m]
    leaf_ids: list[int] = []
    while stack:
        x = stack.pop()
        if x.is_zero:
            continue
        endo = endo_algebra(x)
        if endo.dim > 1:
            split = fitting_split(x, attempts, rng=rng, endo=endo)
            if split is not None:
                stack.extend(split)
                continue
            if not certify_indecomposable(x, endo=endo):
                raise DecompositionStuckError(
                    f"no split found for a decomposable piece (dims={x.dims}, "
                    f"dim End={endo.dim}); raise attempts or the field size"
                )
        leaf_ids.append(registry.lookup_or_insert(x))
    counts = Counter(leaf_ids)
    ids = tuple(sorted(counts.items()))
    parts = tuple((registry.entry(rid).comodule, mult) for rid, mult in ids)
    if verify and ids:
        pieces: list[Comodule] = []
        for rep, mult in parts:
            pieces.extend([rep] * mult)
        assembled = direct_sum(pieces)
        witness = iso_witness(assembled, m, attempts * 4, rng=rng, _allow_fallback=False)
        if witness is None:
            raise DecompositionStuckError("reassembled direct sum failed the isomorphism check")
    return Decomposition(parts, ids)
