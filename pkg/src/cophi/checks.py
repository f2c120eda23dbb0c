"""Structural scans of a presented coalgebra from its comodule categories.

All verdicts are asserted only for simples lying deeper than L+1 arrows
from the window boundary of a template presentation; boundary simples are
reported as skipped, since envelopes near a truncated boundary are not
faithful to the infinite coalgebra.  Finite quivers and cycles have no
boundary and nothing is skipped.

Naming caution: the scans describe the comodule category actually handed
to them.  "Semiperfect on this side" means every simple of this
presentation has a finite-dimensional injective envelope; "qcF on this
side" means every such envelope is isomorphic to some projective
indecomposable of the same presentation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .coalg import CoalgebraPresentation, SimpleLabel, injective_basis, saturated
from .comod import (
    Comodule,
    injective_comodule,
    projective_comodule,
    simple_comodule,
    socle,
    top,
)
from .exactlin import FieldContext
from .itfunc import OmegaTable, PhiReport, phi
from .kschmidt import IsoRegistry, iso_witness
from .rand import rng_from_seed

CONSISTENT = "CONSISTENT"
INCONSISTENT = "INCONSISTENT"


class TopNotSimpleError(Exception):
    """Top(E(S)) failed to be simple; the presentation is not qcF."""


class SocleNotSimpleError(Exception):
    """soc(P(S)) failed to be simple."""


def _other_side(side: str) -> str:
    return "right" if side == "left" else "left"


def _scan_vertices(c: CoalgebraPresentation, window: int) -> tuple[list[int], list[int]]:
    """Interior and skipped vertices of the materialized window."""
    c = c.with_window(window)
    margin = c.truncation_length + 1
    interior, skipped = [], []
    for v in c.finite_quiver().vertices:
        (interior if saturated(c, [v], margin) else skipped).append(v)
    return interior, skipped


@dataclass(frozen=True)
class SemiperfectReport:
    verdict: bool
    side: str
    envelope_dims: tuple[tuple[int, int], ...]  # (vertex, dim E(S_v))
    skipped: tuple[int, ...]
    window: int | None

    def to_dict(self) -> dict:
        return {
            "check": "semiperfect",
            "verdict": self.verdict,
            "side": self.side,
            "envelope_dims": {str(v): d for v, d in self.envelope_dims},
            "skipped": list(self.skipped),
            "window": self.window,
        }


def check_semiperfect(
    c: CoalgebraPresentation, side: str, window: int, field: FieldContext
) -> SemiperfectReport:
    """Envelopes of all interior simples are finite dimensional.

    Always true for path-truncated quiver coalgebras; the scan verifies
    constructibility and records the envelope dimensions per simple.
    """
    c = c.with_window(window)
    interior, skipped = _scan_vertices(c, window)
    dims = []
    for v in interior:
        env, _ = injective_comodule(c, SimpleLabel(v, side), field)
        dims.append((v, env.total_dim))
    return SemiperfectReport(True, side, tuple(dims), tuple(skipped), c.window)


@dataclass(frozen=True)
class QcfReport:
    verdict: bool
    side: str
    matches: tuple[tuple[int, int], ...]  # (vertex, vertex of a matching projective)
    failures: tuple[tuple[int, tuple[tuple[int, int], ...]], ...]  # (vertex, dims of E(S))
    skipped: tuple[int, ...]
    window: int | None

    def to_dict(self) -> dict:
        return {
            "check": "qcf",
            "verdict": self.verdict,
            "side": self.side,
            "matches": {str(v): w for v, w in self.matches},
            "failures": [
                {"vertex": v, "envelope_dims": {str(x): d for x, d in dims}}
                for v, dims in self.failures
            ],
            "skipped": list(self.skipped),
            "window": self.window,
        }


def check_qcf(
    c: CoalgebraPresentation,
    side: str,
    window: int,
    field: FieldContext,
    attempts: int = 32,
    seed: int = 0,
) -> QcfReport:
    """Every interior injective envelope is projective.

    Indecomposable projectives are exactly the path covers here, so each
    E(S) is matched against the P(S') of the window by an explicit
    isomorphism; each failure carries (S, dims of E(S)) as witness.
    """
    c = c.with_window(window)
    interior, skipped = _scan_vertices(c, window)
    quiver = c.finite_quiver()
    L = c.truncation_length
    projectives: list[tuple[int, Comodule]] = []
    for w in quiver.vertices:
        if saturated(c, [w], L):
            p_mod, _ = projective_comodule(c, SimpleLabel(w, side), field)
            projectives.append((w, p_mod))
    rng = rng_from_seed(seed)
    matches = []
    failures = []
    for v in interior:
        env, _ = injective_comodule(c, SimpleLabel(v, side), field)
        found = None
        for w, p_mod in projectives:
            if env.dims != p_mod.dims:
                continue
            if iso_witness(env, p_mod, attempts, rng=rng, _allow_fallback=False) is not None:
                found = w
                break
        if found is None:
            failures.append((v, tuple(sorted(env.dims.items()))))
        else:
            matches.append((v, found))
    return QcfReport(not failures, side, tuple(matches), tuple(failures), tuple(skipped), c.window)


@dataclass(frozen=True)
class NakayamaTable:
    """The assignment S -> Top(E(S)) on interior simples, optionally with
    the inverse candidate S -> soc(P(S))."""

    side: str
    nu: tuple[tuple[int, int], ...]
    mu: tuple[tuple[int, int], ...] | None
    skipped: tuple[int, ...]
    window: int | None

    def nu_map(self) -> dict[int, int]:
        return dict(self.nu)

    def mu_map(self) -> dict[int, int] | None:
        return dict(self.mu) if self.mu is not None else None

    def to_dict(self) -> dict:
        return {
            "check": "nakayama",
            "side": self.side,
            "nu": {str(v): w for v, w in self.nu},
            "mu": None if self.mu is None else {str(v): w for v, w in self.mu},
            "skipped": list(self.skipped),
            "window": self.window,
        }


def nakayama_nu(
    c: CoalgebraPresentation,
    side: str,
    window: int,
    field: FieldContext,
    with_mu: bool = False,
) -> NakayamaTable:
    """Table of Top(E(S)) over the interior simples.

    Raises TopNotSimpleError when some Top(E(S)) is not simple, which
    signals a non-qcF presentation.  With with_mu the table also carries
    soc(P(S)); this requires the opposite side to be semiperfect, which
    is checked first.
    """
    c = c.with_window(window)
    interior, skipped = _scan_vertices(c, window)
    nu = []
    for v in interior:
        env, _ = injective_comodule(c, SimpleLabel(v, side), field)
        quot, _ = top(env)
        if quot.total_dim != 1:
            raise TopNotSimpleError(
                f"Top(E(S_{v})) has dimension {quot.total_dim}; not simple"
            )
        nu.append((v, quot.support[0]))
    mu = None
    if with_mu:
        check_semiperfect(c.opposite(), _other_side(side), window, field)
        mu = []
        for v in interior:
            cover, _ = projective_comodule(c, SimpleLabel(v, side), field)
            soc, _ = socle(cover)
            if soc.total_dim != 1:
                raise SocleNotSimpleError(
                    f"soc(P(S_{v})) has dimension {soc.total_dim}; not simple"
                )
            mu.append((v, soc.support[0]))
        mu = tuple(mu)
    return NakayamaTable(side, tuple(nu), mu, tuple(skipped), c.window)


def simple_injectives(
    c: CoalgebraPresentation, side: str, window: int, field: FieldContext
) -> tuple[SimpleLabel, ...]:
    """All interior simples S with E(S) isomorphic to S."""
    c = c.with_window(window)
    interior, _ = _scan_vertices(c, window)
    out = []
    for v in interior:
        if len(injective_basis(c, SimpleLabel(v, side))) == 1:
            out.append(SimpleLabel(v, side))
    return tuple(out)


@dataclass(frozen=True)
class StructureReport:
    """Cross-validation of the qcF characterization on one presentation.

    INCONSISTENT is a bug trap, not a mathematical discovery: it fires
    when the scans contradict "qcF holds exactly when the presentation is
    semiperfect and every certified phi vanishes".
    """

    consistency: str
    semiperfect: SemiperfectReport
    qcf: QcfReport
    phi_outcomes: tuple[tuple[int, str], ...]
    sampler_exhaustive: bool
    dimension_cap: int | None
    window: int | None

    def to_dict(self) -> dict:
        return {
            "check": "theorem",
            "consistency": self.consistency,
            "semiperfect": self.semiperfect.to_dict(),
            "qcf": self.qcf.to_dict(),
            "phi_outcomes": [{"value": v, "status": s} for v, s in self.phi_outcomes],
            "sampler_exhaustive": self.sampler_exhaustive,
            "dimension_cap": self.dimension_cap,
            "window": self.window,
        }


def cross_validate_theorem(
    c: CoalgebraPresentation,
    side: str,
    window: int,
    field: FieldContext,
    sampler: Iterable[Comodule] | Iterator[Comodule],
    horizon: int = 16,
    attempts: int = 32,
    seed: int = 0,
    sampler_exhaustive: bool = False,
    dimension_cap: int | None = None,
    registry: IsoRegistry | None = None,
    table: OmegaTable | None = None,
) -> StructureReport:
    """Run the semiperfect and qcF scans against phi evidence.

    Flags INCONSISTENT when qcF holds but some certified phi is positive,
    or when (with an exhaustive sampler) the presentation is semiperfect,
    every certified phi vanishes, yet qcF fails on an interior simple.
    """
    c = c.with_window(window)
    sp = check_semiperfect(c, side, window, field)
    qcf = check_qcf(c, side, window, field, attempts, seed)
    if registry is None:
        registry = IsoRegistry(attempts=attempts, seed=seed)
    if table is None:
        table = OmegaTable(registry, attempts=attempts, seed=seed + 1)
    outcomes: list[tuple[int, str]] = []
    for m in sampler:
        report = phi(m, horizon, registry=registry, table=table, attempts=attempts, seed=seed)
        outcomes.append((report.value, report.status))

    certified_positive = any(v > 0 for v, s in outcomes if s in ("EXACT", "FINITE_ID"))
    all_zero_exact = bool(outcomes) and all(
        v == 0 and s == "EXACT" for v, s in outcomes
    )
    verdict = CONSISTENT
    if qcf.verdict and certified_positive:
        verdict = INCONSISTENT
    if sp.verdict and sampler_exhaustive and all_zero_exact and not qcf.verdict:
        verdict = INCONSISTENT
    return StructureReport(
        verdict, sp, qcf, tuple(outcomes), sampler_exhaustive, dimension_cap, c.window
    )
