import numpy as np
import pytest

from cophi.coalg import (
    AWAY_FROM_ZERO,
    CYCLE,
    TOWARD_ZERO,
    CoalgebraPresentation,
    InfiniteTemplate,
    SimpleLabel,
)
from cophi.comod import (
    Comodule,
    ComoduleError,
    ComoduleMorphism,
    ShortExactData,
    cokernel_comodule,
    cosyzygy,
    direct_sum,
    direct_sum_with_maps,
    envelope_sequence,
    hom_basis,
    identity_morphism,
    injective_comodule,
    injective_dimension_probe,
    injective_envelope,
    is_injective_comodule,
    kernel_comodule,
    projective_comodule,
    simple_comodule,
    socle,
    top,
    zero_comodule,
)
from cophi.exactlin import FieldContext
from cophi.rand import random_basis_change, random_comodule, random_semisimple, rng_from_seed

F = FieldContext(101)


def ainf_left(window=20, L=1):
    return CoalgebraPresentation(InfiniteTemplate(TOWARD_ZERO, window), L)


def ainf_right(window=20, L=1):
    return CoalgebraPresentation(InfiniteTemplate(AWAY_FROM_ZERO, window), L)


def cycle(n, L=1):
    return CoalgebraPresentation(InfiniteTemplate(CYCLE, 0, n), L)


def interval_left(n):
    """E(S_n) on the left presentation: k at n+1 mapping identically to k at n."""
    c = ainf_left()
    return Comodule(c, "left", F, {n: 1, n + 1: 1}, {f"a{n + 1}_{n}": [[1]]})


def test_comodule_validation():
    c = ainf_left()
    with pytest.raises(ComoduleError):
        Comodule(c, "middle", F, {0: 1})
    with pytest.raises(ComoduleError):
        Comodule(c, "left", F, {0: 1, 1: 1}, {"a1_0": [[1], [2]]})
    # nilpotency: two consecutive identity maps violate T.T' = 0 for L=1
    with pytest.raises(ComoduleError):
        Comodule(c, "left", F, {0: 1, 1: 1, 2: 1}, {"a1_0": [[1]], "a2_1": [[1]]})


def test_comodule_normalizes_zero_data():
    c = ainf_left()
    m = Comodule(c, "left", F, {0: 1, 3: 0}, {"a1_0": [[0], [0]][:0] or []})
    assert m.support == (0,)
    assert not m.maps


def test_hom_simple_to_itself_and_other():
    c = ainf_left()
    s1 = simple_comodule(c, "left", F, 1)
    s2 = simple_comodule(c, "left", F, 2)
    assert len(hom_basis(s1, s1)) == 1
    assert len(hom_basis(s1, s2)) == 0


def test_hom_interval_to_top_simple():
    # The interval at vertices 2,1 maps onto its top S_2; Hom is 1-dimensional.
    c = ainf_left()
    e1 = interval_left(1)
    s2 = simple_comodule(c, "left", F, 2)
    basis = hom_basis(e1, s2)
    assert len(basis) == 1
    # and nothing maps to the socle vertex simple
    s1 = simple_comodule(c, "left", F, 1)
    assert len(hom_basis(e1, s1)) == 0


def test_socle_of_interval_is_bottom_simple():
    e = interval_left(4)
    soc, incl = socle(e)
    assert soc.dims == {4: 1}
    assert incl.is_injective()
    assert not soc.maps


def test_socle_of_semisimple_is_everything():
    c = ainf_left()
    m = Comodule(c, "left", F, {0: 2, 5: 1})
    soc, _ = socle(m)
    assert soc.dims == m.dims


def test_socle_of_interval_plus_simple():
    c = ainf_left()
    m = direct_sum([interval_left(1), simple_comodule(c, "left", F, 3)])
    soc, _ = socle(m)
    assert soc.dims == {1: 1, 3: 1}


def test_top_of_interval():
    quot, proj = top(interval_left(4))
    assert quot.dims == {5: 1}
    assert proj.is_surjective()


def test_top_of_simple():
    c = ainf_left()
    s = simple_comodule(c, "left", F, 2)
    quot, _ = top(s)
    assert quot.dims == {2: 1}


def test_top_of_cycle_interval():
    # E(S_i) on the 3-cycle spans {i-1, i}; its top is S_{i-1}.
    c = cycle(3)
    for i in range(3):
        e, _ = injective_comodule(c, SimpleLabel(i, "right"), F)
        quot, _ = top(e)
        assert quot.dims == {(i - 1) % 3: 1}


def test_injective_comodule_matches_interval():
    c = ainf_left()
    e, s_emb = injective_comodule(c, SimpleLabel(3, "left"), F)
    assert e.dims == {3: 1, 4: 1}
    soc, _ = socle(e)
    assert soc.dims == {3: 1}
    assert s_emb.is_injective()


def test_envelope_of_simple_left():
    c = ainf_left()
    s = simple_comodule(c, "left", F, 6)
    env, u = injective_envelope(s)
    assert env.dims == {6: 1, 7: 1}
    assert u.is_injective()


def test_envelope_of_injective_is_identity_sized():
    e = interval_left(2)
    env, u = injective_envelope(e)
    assert env.total_dim == e.total_dim
    assert u.is_injective() and u.is_surjective()
    assert is_injective_comodule(e)


def test_envelope_of_right_source_simple():
    c = ainf_right()
    s0 = simple_comodule(c, "right", F, 0)
    env, _ = injective_envelope(s0)
    assert env.dims == {0: 1}
    assert is_injective_comodule(s0)


def test_envelope_socle_restriction_is_iso():
    rng = rng_from_seed(5)
    c = ainf_left()
    for _ in range(10):
        m = random_comodule(c, "left", F, rng, vertices=range(0, 8), max_total_dim=8)
        env, u = injective_envelope(m)
        soc_m, incl_m = socle(m)
        soc_e, _ = socle(env)
        assert soc_m.dims == soc_e.dims
        assert u.is_injective()
        restricted = u.compose(incl_m)
        assert restricted.is_injective()


def test_cosyzygy_shifts_semisimple_away_from_sink():
    # Left side: a cosemisimple comodule with spaces at 0..k reappears
    # shifted one vertex up.
    c = ainf_left()
    m = Comodule(c, "left", F, {0: 2, 1: 1, 2: 3})
    om = cosyzygy(m, 1)
    assert om.dims == {1: 2, 2: 1, 3: 3}
    assert not om.maps


def test_cosyzygy_of_injective_is_zero():
    assert cosyzygy(interval_left(3), 1).is_zero


def test_cosyzygy_right_counts_down():
    c = ainf_right()
    m5 = simple_comodule(c, "right", F, 5)
    cur = m5
    for expect in (4, 3, 2, 1, 0):
        cur = cosyzygy(cur, 1)
        assert cur.dims == {expect: 1}
    assert cosyzygy(cur, 1).is_zero


def test_injective_dimension_probe_right_family():
    c = ainf_right()
    for n in range(0, 9):
        probe = injective_dimension_probe(simple_comodule(c, "right", F, n), 12)
        assert probe.finite and probe.value == n


def test_injective_dimension_probe_injective():
    probe = injective_dimension_probe(interval_left(1), 5)
    assert probe.finite and probe.value == 0


def test_injective_dimension_probe_no_witness_on_left():
    c = ainf_left()
    probe = injective_dimension_probe(simple_comodule(c, "left", F, 2), 30)
    assert not probe.finite and probe.value == 30


def test_zero_comodule_conventions():
    c = ainf_left()
    z = zero_comodule(c, "left", F)
    assert z.is_zero
    soc, _ = socle(z)
    assert soc.is_zero
    quot, _ = top(z)
    assert quot.is_zero
    probe = injective_dimension_probe(z, 3)
    assert probe.finite and probe.value == 0


def test_direct_sum_dims_and_maps():
    c = ainf_left()
    s1 = simple_comodule(c, "left", F, 1)
    s2 = simple_comodule(c, "left", F, 2)
    m = direct_sum([s1, s2])
    assert m.dims == {1: 1, 2: 1}
    assert not m.maps
    e = interval_left(1)
    big = direct_sum([e, simple_comodule(c, "left", F, 0), simple_comodule(c, "left", F, 0)])
    assert big.total_dim == 4
    assert big.dims == {0: 2, 1: 1, 2: 1}


def test_direct_sum_with_maps_injections_cover():
    c = ainf_left()
    parts = [interval_left(1), simple_comodule(c, "left", F, 1)]
    total, injections, projections = direct_sum_with_maps(parts)
    for part, inj, proj in zip(parts, injections, projections):
        assert inj.is_injective()
        assert proj.is_surjective()
        assert proj.compose(inj) == identity_morphism(part)


def test_direct_sum_rejects_mixed_context():
    with pytest.raises(ComoduleError):
        direct_sum([
            simple_comodule(ainf_left(), "left", F, 0),
            simple_comodule(ainf_left(), "right", F, 0),
        ])


def test_kernel_and_cokernel_of_projection():
    e = interval_left(2)
    quot, proj = top(e)
    ker, incl = kernel_comodule(proj)
    assert ker.dims == {2: 1}
    assert incl.is_injective()
    coker, _ = cokernel_comodule(incl)
    assert coker.dims == quot.dims


def test_envelope_sequence_is_short_exact():
    c = ainf_left()
    rng = rng_from_seed(11)
    for _ in range(8):
        m = random_comodule(c, "left", F, rng, vertices=range(0, 6), max_total_dim=7)
        seq = envelope_sequence(m)
        assert isinstance(seq, ShortExactData)
        # dimension bookkeeping: dim cosyzygy = dim E - dim m
        assert seq.epi.target.total_dim == seq.mono.target.total_dim - m.total_dim


def test_random_comodules_satisfy_nilpotency():
    rng = rng_from_seed(23)
    for pres, side in ((ainf_left(), "left"), (ainf_right(), "right"), (cycle(3), "right")):
        for _ in range(10):
            m = random_comodule(pres, side, F, rng, vertices=range(0, 6), max_total_dim=8)
            # constructor re-validates
            Comodule(pres, side, F, m.dims, m.maps)


def test_cosyzygy_well_defined_under_basis_change():
    # The cosyzygies of m and of a conjugated copy have equal dimension data.
    rng = rng_from_seed(31)
    c = ainf_right()
    for _ in range(8):
        m = random_comodule(c, "right", F, rng, vertices=range(0, 6), max_total_dim=7)
        shuffled, _ = random_basis_change(m, rng)
        assert cosyzygy(m, 1).dims == cosyzygy(shuffled, 1).dims


def test_envelope_extension_property():
    # Injectivity of E(m): any morphism A -> E(m) extends over a mono A -> B.
    rng = rng_from_seed(41)
    c = ainf_left()
    m = random_comodule(c, "left", F, rng, vertices=range(0, 5), max_total_dim=5)
    env, _ = injective_envelope(m)
    for _ in range(6):
        a = random_comodule(c, "left", F, rng, vertices=range(0, 5), max_total_dim=4)
        b_env, j = injective_envelope(a)  # a mono a -> E(a)
        for g in hom_basis(a, env):
            # want g~ : E(a) -> env with g~ . j = g; solvability check via hom space
            candidates = hom_basis(b_env, env)
            if not candidates:
                assert g.is_zero
                continue
            ctx = F
            cols = []
            for h in candidates:
                comp = h.compose(j)
                vec = np.concatenate(
                    [comp.component(v).a.reshape(-1) for v in sorted(a.support)]
                ) if a.support else np.zeros(0, dtype=np.int64)
                cols.append(vec)
            target = np.concatenate(
                [g.component(v).a.reshape(-1) for v in sorted(a.support)]
            ) if a.support else np.zeros(0, dtype=np.int64)
            mat = ctx.matrix(np.stack(cols, axis=1)) if cols else ctx.zeros(len(target), 0)
            sol = ctx.solve(mat, ctx.matrix(target.reshape(-1, 1)))
            assert sol is not None


def test_morphism_intertwining_validation():
    c = ainf_left()
    e = interval_left(1)
    s2 = simple_comodule(c, "left", F, 2)
    # projection onto the top is fine
    ComoduleMorphism(e, s2, {2: F.matrix([[1]])})
    # but mapping the socle vertex breaks intertwining
    s1 = simple_comodule(c, "left", F, 1)
    with pytest.raises(ComoduleError):
        ComoduleMorphism(e, s1, {1: F.matrix([[1]])})


def test_serialization_roundtrip(tmp_path):
    c = ainf_left()
    m = interval_left(2)
    path = tmp_path / "m.json"
    m.save(str(path))
    back = Comodule.load(c, F, str(path))
    assert back == m
    assert back.to_dict()["side"] == "left"


def test_load_reduces_entries_mod_p():
    c = ainf_left()
    m = Comodule.from_dict(
        c, F, {"side": "left", "dims": {"1": 1, "2": 1}, "maps": {"a2_1": [[102]]}}
    )
    assert m.map_for("a2_1").tolist() == [[1]]


def test_projective_comodule_cycle():
    c = cycle(3)
    for i in range(3):
        p, proj = projective_comodule(c, SimpleLabel(i, "right"), F)
        assert p.dims == {i: 1, (i + 1) % 3: 1}
        assert proj.is_surjective()
        soc, _ = socle(p)
        assert soc.dims == {(i + 1) % 3: 1}


def test_higher_truncation_envelope():
    # L=2 on the left line: E(S_n) spans n, n+1, n+2.
    c = CoalgebraPresentation(InfiniteTemplate(TOWARD_ZERO, 20), 2)
    e, _ = injective_comodule(c, SimpleLabel(3, "left"), F)
    assert e.dims == {3: 1, 4: 1, 5: 1}
    s = simple_comodule(c, "left", F, 3)
    assert cosyzygy(s, 1).dims == {4: 1, 5: 1}


def test_window_auto_extension():
    # Support near the window edge: envelope extends the template window.
    c = ainf_left(window=4)
    s = simple_comodule(c, "left", F, 4)
    env, _ = injective_envelope(s)
    assert env.dims == {4: 1, 5: 1}
    # repeated cosyzygies keep walking beyond the original window
    m = cosyzygy(s, 6)
    assert m.dims == {10: 1}
