import pytest

from cophi.coalg import (
    AWAY_FROM_ZERO,
    CYCLE,
    TOWARD_ZERO,
    CoalgebraPresentation,
    InfiniteTemplate,
    QuiverPresentation,
    SimpleLabel,
)
from cophi.checks import (
    CONSISTENT,
    TopNotSimpleError,
    check_qcf,
    check_semiperfect,
    cross_validate_theorem,
    nakayama_nu,
    simple_injectives,
)
from cophi.comod import direct_sum, injective_comodule, simple_comodule
from cophi.exactlin import FieldContext
from cophi.itfunc import phi
from cophi.kschmidt import IsoRegistry
from cophi.rand import random_comodule, rng_from_seed

F = FieldContext(101)


def ainf_left(window=20, L=1):
    return CoalgebraPresentation(InfiniteTemplate(TOWARD_ZERO, window), L)


def ainf_right(window=20, L=1):
    return CoalgebraPresentation(InfiniteTemplate(AWAY_FROM_ZERO, window), L)


def cycle(n, L=1):
    return CoalgebraPresentation(InfiniteTemplate(CYCLE, 0, n), L)


def no_arrow(n=3):
    return CoalgebraPresentation(QuiverPresentation(tuple(range(n)), ()), 1)


def test_semiperfect_ainf_both_sides():
    for pres, side in ((ainf_left(), "left"), (ainf_right(), "right")):
        rep = check_semiperfect(pres, side, 20, F)
        assert rep.verdict is True
        assert all(d <= 2 for _, d in rep.envelope_dims)
        assert rep.skipped  # template boundary vertices are skipped


def test_semiperfect_cycle_and_no_arrow():
    rep = check_semiperfect(cycle(3), "right", 20, F)
    assert rep.verdict and all(d == 2 for _, d in rep.envelope_dims)
    assert rep.skipped == ()
    rep2 = check_semiperfect(no_arrow(), "right", 20, F)
    assert rep2.verdict and all(d == 1 for _, d in rep2.envelope_dims)


def test_qcf_cycle_true_with_shift_matches():
    rep = check_qcf(cycle(3), "right", 20, F)
    assert rep.verdict is True
    # E(S_i) is the cover of the simple one step back around the cycle
    assert dict(rep.matches) == {0: 2, 1: 0, 2: 1}


def test_qcf_ainf_right_fails_at_source():
    rep = check_qcf(ainf_right(), "right", 20, F)
    assert rep.verdict is False
    assert [v for v, _ in rep.failures] == [0]
    # witness: E(S_0) is the one-dimensional simple
    assert rep.failures[0][1] == ((0, 1),)


def test_qcf_no_arrow_quiver():
    rep = check_qcf(no_arrow(), "left", 20, F)
    assert rep.verdict is True


def test_nakayama_cycle_permutation_and_inverse():
    table = nakayama_nu(cycle(3), "right", 20, F, with_mu=True)
    assert table.nu_map() == {0: 2, 1: 0, 2: 1}
    assert table.mu_map() == {0: 1, 1: 2, 2: 0}
    nu, mu = table.nu_map(), table.mu_map()
    for i in range(3):
        assert mu[nu[i]] == i
        assert nu[mu[i]] == i


def test_nakayama_no_arrow_identity():
    table = nakayama_nu(no_arrow(), "right", 20, F, with_mu=True)
    assert table.nu_map() == {0: 0, 1: 1, 2: 2}
    assert table.mu_map() == table.nu_map()


def test_nakayama_raises_on_non_simple_top():
    # Doubled arrow 0 -> 1: E(S_1) has a two-dimensional top.
    from cophi.coalg import Arrow

    q = QuiverPresentation((0, 1), (Arrow("x", 0, 1), Arrow("y", 0, 1)))
    c = CoalgebraPresentation(q, 1)
    with pytest.raises(TopNotSimpleError):
        nakayama_nu(c, "right", 5, F)


def test_simple_injectives_cycle_empty():
    assert simple_injectives(cycle(3), "right", 20, F) == ()


def test_simple_injectives_ainf_right_is_source():
    out = simple_injectives(ainf_right(), "right", 20, F)
    assert out == (SimpleLabel(0, "right"),)
    assert check_qcf(ainf_right(), "right", 20, F).verdict is False


def test_simple_injectives_no_arrow_all():
    out = simple_injectives(no_arrow(), "right", 20, F)
    assert [s.vertex for s in out] == [0, 1, 2]


def test_theorem_cycles_consistent():
    for n in (2, 3, 5):
        pres = cycle(n)
        sampler = [simple_comodule(pres, "right", F, i) for i in range(n)]
        sampler.append(direct_sum([sampler[0], sampler[1 % n]]))
        rep = cross_validate_theorem(pres, "right", 20, F, sampler, horizon=12)
        assert rep.consistency == CONSISTENT
        assert rep.qcf.verdict is True
        assert all(v == 0 for v, _ in rep.phi_outcomes)


def test_theorem_ainf_right_consistent_with_positive_phi():
    pres = ainf_right()
    m1 = simple_comodule(pres, "right", F, 1)
    rep = cross_validate_theorem(pres, "right", 20, F, [m1], horizon=12)
    assert rep.consistency == CONSISTENT
    assert rep.semiperfect.verdict is True
    assert rep.qcf.verdict is False
    assert rep.phi_outcomes[0] == (1, "FINITE_ID")


def test_theorem_no_arrow_trivial():
    pres = no_arrow()
    sampler = [simple_comodule(pres, "left", F, i) for i in range(3)]
    rep = cross_validate_theorem(pres, "left", 20, F, sampler, horizon=8)
    assert rep.consistency == CONSISTENT


def test_qcf_instances_have_simple_tops_and_socles():
    # On presentations where qcF holds, tops of envelopes and socles of
    # covers are simple and the assignment is injective on the interior.
    for pres, side in ((cycle(2), "right"), (cycle(3), "right"), (cycle(5), "left"), (no_arrow(), "right")):
        if not check_qcf(pres, side, 20, F).verdict:
            continue
        table = nakayama_nu(pres, side, 20, F, with_mu=True)
        nu = table.nu_map()
        assert len(set(nu.values())) == len(nu)
        connected_with_arrows = pres.finite_quiver().arrows
        if connected_with_arrows:
            assert simple_injectives(pres, side, 20, F) == ()


def test_theorem_never_inconsistent_on_random_samples():
    rng = rng_from_seed(71)
    for pres, side in ((ainf_left(), "left"), (ainf_right(), "right"), (cycle(3), "right")):
        sampler = [
            random_comodule(pres, side, F, rng, vertices=range(0, 6), max_total_dim=6)
            for _ in range(5)
        ]
        rep = cross_validate_theorem(pres, side, 20, F, sampler, horizon=10, seed=3)
        assert rep.consistency == CONSISTENT


def test_report_serialization_shapes():
    rep = cross_validate_theorem(
        cycle(3), "right", 20, F, [simple_comodule(cycle(3), "right", F, 0)], horizon=8
    )
    d = rep.to_dict()
    assert d["check"] == "theorem"
    assert d["semiperfect"]["check"] == "semiperfect"
    assert d["qcf"]["check"] == "qcf"
    assert isinstance(d["phi_outcomes"], list)
    table = nakayama_nu(cycle(3), "right", 20, F, with_mu=True)
    td = table.to_dict()
    assert td["nu"] == {"0": 2, "1": 0, "2": 1}
