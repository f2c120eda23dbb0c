"""Rank stabilization of the cosyzygy action on the class group.

K is the free abelian group on the isomorphism classes of non-injective
indecomposables (registry entries), with [A + B] = [A] + [B] and injective
classes identified with zero.  The cosyzygy operation induces a group
endomorphism; for a comodule M with generator classes G the invariant
phi(M) is the least n from which the rank of the subgroup generated by
the n-th images of G stays constant forever.

Certification.  Ranks are non-increasing, so a plateau alone proves
nothing (a later drop is possible).  When the orbit closure R of G under
the induced endomorphism is finite with r classes, the endomorphism
restricts to an integer matrix A on Z^R, and the image chain of a single
linear endomorphism of an r-dimensional space is constant from step r
onward: the rank at step r is the eventual rank, and the least n
attaining it is exact.  When the closure grows past the budget the
report is downgraded to a plateau observation up to the horizon, which
is deliberately not called an exact value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import islice
from typing import Iterable, Iterator, Mapping

import numpy as np

from .coalg import CoalgebraPresentation
from .comod import Comodule, cosyzygy, injective_dimension_probe
from .exactlin import IntegerMatrix, rank_int
from .kschmidt import IsoRegistry, decompose
from .rand import rng_from_seed

STATUS_EXACT = "EXACT"
STATUS_FINITE_ID = "FINITE_ID"
STATUS_STABLE = "STABLE_UP_TO_HORIZON"
UNBOUNDED_AT_HORIZON = "UNBOUNDED_AT_HORIZON"


@dataclass(frozen=True)
class ClassVector:
    """Finite-support integer vector over non-injective registry classes."""

    registry: IsoRegistry
    coords: tuple[tuple[int, int], ...]  # (registry id, coefficient), id-sorted

    def __post_init__(self):
        coords = tuple(sorted((rid, c) for rid, c in self.coords if c != 0))
        object.__setattr__(self, "coords", coords)
        for rid, _ in coords:
            if self.registry.entry(rid).injective:
                raise ValueError("class vectors cannot touch injective classes")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(rid for rid, _ in self.coords)

    @property
    def is_zero(self) -> bool:
        return not self.coords

    def coefficient(self, rid: int) -> int:
        return dict(self.coords).get(rid, 0)

    def add(self, other: "ClassVector") -> "ClassVector":
        acc = dict(self.coords)
        for rid, c in other.coords:
            acc[rid] = acc.get(rid, 0) + c
        return ClassVector(self.registry, tuple(acc.items()))

    def scale(self, k: int) -> "ClassVector":
        return ClassVector(self.registry, tuple((rid, k * c) for rid, c in self.coords))

    @classmethod
    def zero(cls, registry: IsoRegistry) -> "ClassVector":
        return cls(registry, ())

    @classmethod
    def unit(cls, registry: IsoRegistry, rid: int) -> "ClassVector":
        return cls(registry, ((rid, 1),))


def class_of(
    m: Comodule,
    registry: IsoRegistry,
    attempts: int = 32,
    *,
    rng: np.random.Generator | None = None,
    seed: int = 0,
) -> ClassVector:
    """Class of m: decompose, then drop the injective summands."""
    dec = decompose(m, registry, attempts, rng=rng, seed=seed)
    coords = [
        (rid, mult) for rid, mult in dec.registry_ids if not registry.entry(rid).injective
    ]
    return ClassVector(registry, tuple(coords))


class OmegaTable:
    """Cached action of the cosyzygy map on registry classes.

    entry(rid) is the class of the first cosyzygy of the representative of
    rid, computed once; injective entries map to zero.  Grows the registry
    as new classes appear.
    """

    def __init__(self, registry: IsoRegistry, attempts: int = 32, seed: int = 0):
        self.registry = registry
        self._attempts = attempts
        self._rng = rng_from_seed(seed)
        self._table: dict[int, ClassVector] = {}

    def entry(self, rid: int) -> ClassVector:
        hit = self._table.get(rid)
        if hit is not None:
            return hit
        reg_entry = self.registry.entry(rid)
        if reg_entry.injective:
            value = ClassVector.zero(self.registry)
        else:
            value = class_of(
                cosyzygy(reg_entry.comodule, 1), self.registry, self._attempts, rng=self._rng
            )
        self._table[rid] = value
        return value

    def known_ids(self) -> tuple[int, ...]:
        return tuple(self._table)


def omega_bar(v: ClassVector, table: OmegaTable) -> ClassVector:
    """Linear extension of the table: additive in v."""
    out = ClassVector.zero(v.registry)
    for rid, c in v.coords:
        out = out.add(table.entry(rid).scale(c))
    return out


def _rank_of_vectors(vectors: Iterable[ClassVector]) -> int:
    vectors = list(vectors)
    support = sorted({rid for v in vectors for rid in v.support})
    rows = [[v.coefficient(rid) for rid in support] for v in vectors]
    return rank_int(IntegerMatrix.from_rows(rows, cols=len(support)))


@dataclass(frozen=True)
class PhiReport:
    """Outcome of a phi computation with its certification status.

    value is exact for EXACT (finite closure certification) and FINITE_ID
    (finite injective dimension); STABLE_UP_TO_HORIZON only records that
    the rank plateau held up to the horizon.
    """

    value: int
    status: str
    rank_sequence: tuple[int, ...]
    closure_size: int | None  # None encodes UNBOUNDED_AT_HORIZON
    generators: tuple[int, ...]
    seed: int
    field: int
    window: int | None
    horizon: int

    def __post_init__(self):
        if self.status not in (STATUS_EXACT, STATUS_FINITE_ID, STATUS_STABLE):
            raise ValueError(f"unknown status {self.status!r}")
        ranks = self.rank_sequence
        if any(a < b for a, b in zip(ranks, ranks[1:])):
            raise ValueError("rank sequence must be non-increasing")

    @property
    def certified(self) -> bool:
        return self.status in (STATUS_EXACT, STATUS_FINITE_ID)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "status": self.status,
            "rank_sequence": list(self.rank_sequence),
            "closure_size": UNBOUNDED_AT_HORIZON if self.closure_size is None else self.closure_size,
            "generators": list(self.generators),
            "seed": self.seed,
            "field": self.field,
            "window": self.window,
            "horizon": self.horizon,
        }


def _ranks_by_iteration(
    gens: tuple[int, ...], table: OmegaTable, steps: int
) -> tuple[list[int], set[int]]:
    """Ranks of the generator images for n = 0..steps, by direct iteration."""
    registry = table.registry
    vectors = [ClassVector.unit(registry, g) for g in gens]
    seen = set(gens)
    ranks = [_rank_of_vectors(vectors)]
    for _ in range(steps):
        if all(v.is_zero for v in vectors):
            ranks.append(0)
            continue
        vectors = [omega_bar(v, table) for v in vectors]
        for v in vectors:
            seen.update(v.support)
        ranks.append(_rank_of_vectors(vectors))
    return ranks, seen


def phi(
    m: Comodule,
    horizon: int = 64,
    *,
    registry: IsoRegistry | None = None,
    table: OmegaTable | None = None,
    attempts: int = 32,
    seed: int = 0,
    closure_budget: int | None = None,
    use_id_probe: bool = True,
) -> PhiReport:
    """The rank-stabilization invariant of m, with certification.

    Strategy: (a) take the deduplicated non-injective indecomposable
    summands of m as generators; (b) if m has finite injective dimension
    d within the horizon, the value is d (the invariant equals the
    injective dimension when finite); (c) otherwise grow the orbit
    closure of the generators; a finite closure of size r certifies the
    eventual rank at step r and gives an EXACT value; (d) if the closure
    exceeds the budget, report the observed plateau onset up to the
    horizon as STABLE_UP_TO_HORIZON.

    Pass use_id_probe=False to force the closure route (c) even when the
    injective dimension is finite.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if registry is None:
        registry = IsoRegistry(attempts=attempts, seed=seed)
    if table is None:
        table = OmegaTable(registry, attempts=attempts, seed=seed + 1)
    rng = rng_from_seed(seed)
    window = m.coalgebra.window

    v0 = class_of(m, registry, attempts, rng=rng)
    gens = tuple(sorted(v0.support))

    if use_id_probe:
        probe = injective_dimension_probe(m, horizon)
        if probe.finite:
            d = probe.value
            ranks, seen = _ranks_by_iteration(gens, table, d)
            if ranks[-1] != 0 or (d > 0 and ranks[d - 1] == 0):
                raise RuntimeError("rank sequence disagrees with the injective dimension")
            return PhiReport(
                value=d,
                status=STATUS_FINITE_ID,
                rank_sequence=tuple(ranks),
                closure_size=len(seen),
                generators=gens,
                seed=seed,
                field=m.field.p,
                window=window,
                horizon=horizon,
            )

    budget = horizon if closure_budget is None else closure_budget
    closure: set[int] = set()
    frontier = list(gens)
    overflow = False
    while frontier:
        x = frontier.pop(0)
        if x in closure:
            continue
        closure.add(x)
        if len(closure) > budget:
            overflow = True
            break
        for y in table.entry(x).support:
            if y not in closure:
                frontier.append(y)

    if not overflow:
        ids = sorted(closure)
        r = len(ids)
        pos = {rid: i for i, rid in enumerate(ids)}
        a_mat = [[0] * r for _ in range(r)]
        for j, rid in enumerate(ids):
            for out_id, c in table.entry(rid).coords:
                a_mat[pos[out_id]][j] = c
        vectors = []
        for g in gens:
            col = [0] * r
            col[pos[g]] = 1
            vectors.append(col)
        ranks = [rank_int(IntegerMatrix.from_rows(vectors, cols=r))]
        for _ in range(r):
            vectors = [
                [sum(a_mat[i][k] * v[k] for k in range(r)) for i in range(r)] for v in vectors
            ]
            ranks.append(rank_int(IntegerMatrix.from_rows(vectors, cols=r)))
        eventual = ranks[r]
        value = next(n for n, rk in enumerate(ranks) if rk == eventual)
        return PhiReport(
            value=value,
            status=STATUS_EXACT,
            rank_sequence=tuple(ranks),
            closure_size=r,
            generators=gens,
            seed=seed,
            field=m.field.p,
            window=window,
            horizon=horizon,
        )

    ranks, _ = _ranks_by_iteration(gens, table, horizon)
    eventual = ranks[horizon]
    value = next(n for n, rk in enumerate(ranks) if rk == eventual)
    return PhiReport(
        value=value,
        status=STATUS_STABLE,
        rank_sequence=tuple(ranks),
        closure_size=None,
        generators=gens,
        seed=seed,
        field=m.field.p,
        window=window,
        horizon=horizon,
    )


@dataclass(frozen=True)
class PhiDimEstimate:
    """Sampled lower bound for the supremum of phi over a comodule family.

    lower_bound is only a lower bound: the supremum ranges over an
    infinite category and is not certified from a finite sample.  Only
    certified (EXACT / FINITE_ID) outcomes contribute.
    """

    lower_bound: int
    witness: Comodule | None
    outcomes: tuple[tuple[int, str], ...]
    evaluated: int


def phi_dim_estimate(
    c: CoalgebraPresentation,
    side: str,
    sampler: Iterator[Comodule] | Iterable[Comodule],
    budget: int,
    *,
    horizon: int = 64,
    attempts: int = 32,
    seed: int = 0,
    registry: IsoRegistry | None = None,
    table: OmegaTable | None = None,
) -> PhiDimEstimate:
    """Max of certified phi values over at most `budget` sampled comodules."""
    if registry is None:
        registry = IsoRegistry(attempts=attempts, seed=seed)
    if table is None:
        table = OmegaTable(registry, attempts=attempts, seed=seed + 1)
    best = 0
    witness: Comodule | None = None
    outcomes: list[tuple[int, str]] = []
    count = 0
    for m in islice(iter(sampler), budget):
        if m.coalgebra.family_key != c.family_key or m.side != side:
            raise ValueError("sampler produced a comodule for a different coalgebra or side")
        count += 1
        report = phi(m, horizon, registry=registry, table=table, attempts=attempts, seed=seed)
        outcomes.append((report.value, report.status))
        if report.certified and report.value >= best:
            if report.value > best or witness is None:
                best = report.value
                witness = m
    return PhiDimEstimate(best, witness, tuple(outcomes), count)
