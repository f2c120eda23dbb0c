import pytest

from cophi.coalg import (
    AWAY_FROM_ZERO,
    CYCLE,
    TOWARD_ZERO,
    Arrow,
    CoalgebraPresentation,
    InfiniteTemplate,
    QuiverPresentation,
    SimpleLabel,
    WindowUnsaturatedError,
    injective_basis,
    materialize,
    projective_basis,
    saturated,
)


def ainf_left(window=20, L=1):
    return CoalgebraPresentation(InfiniteTemplate(TOWARD_ZERO, window), L)


def ainf_right(window=20, L=1):
    return CoalgebraPresentation(InfiniteTemplate(AWAY_FROM_ZERO, window), L)


def cycle(n, L=1):
    return CoalgebraPresentation(InfiniteTemplate(CYCLE, 0, n), L)


def test_materialize_toward_zero_window_3():
    c = materialize(ainf_left(), 3)
    q = c.quiver
    assert q.vertices == (0, 1, 2, 3)
    assert {(a.src, a.tgt) for a in q.arrows} == {(1, 0), (2, 1), (3, 2)}


def test_materialize_cycle_ignores_window():
    for w in (0, 5):
        q = materialize(cycle(3), w).quiver
        assert q.vertices == (0, 1, 2)
        assert {(a.src, a.tgt) for a in q.arrows} == {(0, 1), (1, 2), (2, 0)}


def test_materialize_finite_is_identity():
    q = QuiverPresentation((0, 1), (Arrow("a", 0, 1),))
    c = CoalgebraPresentation(q, 1)
    assert materialize(c, 7) is c


def test_materialize_rejects_negative_window():
    with pytest.raises(ValueError):
        materialize(ainf_left(), -1)


def test_materialize_windows_nest():
    big = materialize(ainf_right(), 9).quiver
    small = materialize(ainf_right(), 4).quiver
    assert set(small.vertices) <= set(big.vertices)
    big_arrows = {(a.name, a.src, a.tgt) for a in big.arrows}
    for a in small.arrows:
        assert (a.name, a.src, a.tgt) in big_arrows


def test_injective_basis_ainf_left_interval():
    # Two-dimensional interval: the trivial path at n plus the arrow n+1 -> n.
    b = injective_basis(ainf_left(), SimpleLabel(4, "left"))
    assert [(p.start, p.end, p.length) for p in b] == [(4, 4, 0), (5, 4, 1)]


def test_injective_basis_ainf_right_source_vertex():
    # Nothing of positive length ends at vertex 0: the simple is injective.
    b = injective_basis(ainf_right(), SimpleLabel(0, "right"))
    assert [(p.start, p.end, p.length) for p in b] == [(0, 0, 0)]


def test_injective_basis_cycle():
    for i in range(3):
        b = injective_basis(cycle(3), SimpleLabel(i, "right"))
        assert [(p.start, p.end, p.length) for p in b] == [(i, i, 0), ((i - 1) % 3, i, 1)]


def test_projective_basis_cycle():
    for i in range(3):
        b = projective_basis(cycle(3), SimpleLabel(i, "right"))
        assert [(p.start, p.end, p.length) for p in b] == [(i, i, 0), (i, (i + 1) % 3, 1)]


def test_projective_basis_ainf_left_sink():
    b = projective_basis(ainf_left(), SimpleLabel(0, "left"))
    assert [(p.start, p.end, p.length) for p in b] == [(0, 0, 0)]


def test_projective_basis_ainf_right():
    b = projective_basis(ainf_right(), SimpleLabel(7, "right"))
    assert [(p.start, p.end, p.length) for p in b] == [(7, 7, 0), (7, 8, 1)]


def test_basis_raises_near_window_boundary():
    with pytest.raises(WindowUnsaturatedError):
        injective_basis(ainf_left(window=5), SimpleLabel(5, "left"))


def test_saturated_examples():
    assert saturated(ainf_left(), [5], 2) is True
    assert saturated(ainf_left(), [20], 1) is False
    assert saturated(cycle(4), [0, 1, 2, 3], 100) is True


def test_saturated_rejects_support_outside_window():
    with pytest.raises(ValueError):
        saturated(ainf_left(window=5), [9], 1)


def test_injective_basis_sizes_on_ainf():
    # L=1: two basis paths at every vertex on the left presentation; on the
    # right presentation the same except at the source vertex 0.
    for v in range(0, 10):
        assert len(injective_basis(ainf_left(), SimpleLabel(v, "left"))) == 2
    assert len(injective_basis(ainf_right(), SimpleLabel(0, "right"))) == 1
    for v in range(1, 10):
        assert len(injective_basis(ainf_right(), SimpleLabel(v, "right"))) == 2


def test_injective_equals_projective_on_opposite():
    # A path into v reads as a path out of v of the reversed quiver; bases
    # match vertexwise as (start, end, length) data.
    for pres, side in ((cycle(4), "right"), (ainf_left(), "left")):
        opp = pres.opposite()
        for v in range(3):
            inj = injective_basis(pres, SimpleLabel(v, side))
            proj = projective_basis(opp, SimpleLabel(v, side))
            assert sorted((p.end, p.start, p.length) for p in inj) == sorted(
                (p.start, p.end, p.length) for p in proj
            )
    # On an explicit finite quiver the reversal keeps arrow names.
    q = QuiverPresentation((0, 1, 2), (Arrow("x", 0, 1), Arrow("y", 1, 2)))
    c = CoalgebraPresentation(q, 2)
    inj = injective_basis(c, SimpleLabel(2, "left"))
    proj = projective_basis(c.opposite(), SimpleLabel(2, "left"))
    assert sorted(tuple(reversed(p.arrows)) for p in inj) == sorted(p.arrows for p in proj)


def test_higher_truncation_lengths():
    c = CoalgebraPresentation(InfiniteTemplate(TOWARD_ZERO, 20), 2)
    b = injective_basis(c, SimpleLabel(3, "left"))
    # e_3, 4->3, 5->4->3
    assert [p.length for p in b] == [0, 1, 2]
    assert b[2].start == 5


def test_quiver_validation():
    with pytest.raises(ValueError):
        QuiverPresentation((0, 0), ())
    with pytest.raises(ValueError):
        QuiverPresentation((0,), (Arrow("a", 0, 1),))
    with pytest.raises(ValueError):
        InfiniteTemplate(CYCLE, 0, None)
    with pytest.raises(ValueError):
        CoalgebraPresentation(QuiverPresentation((0,), ()), 0)


def test_roundtrip_serialization(tmp_path):
    pres = [
        ainf_left(),
        ainf_right(window=7),
        cycle(5),
        CoalgebraPresentation(
            QuiverPresentation((0, 1, 2), (Arrow("x", 0, 1), Arrow("y", 1, 2))), 2
        ),
    ]
    for i, c in enumerate(pres):
        path = tmp_path / f"c{i}.json"
        c.save(str(path))
        back = CoalgebraPresentation.load(str(path))
        assert back == c


def test_from_dict_field_names():
    c = CoalgebraPresentation.from_dict(
        {
            "quiver": {
                "vertices": [0, 1],
                "arrows": [{"id": "a", "src": 0, "tgt": 1}],
            },
            "truncation_length": 1,
        }
    )
    assert c.quiver.arrows[0] == Arrow("a", 0, 1)
    t = CoalgebraPresentation.from_dict(
        {"template": {"kind": "cycle", "n": 3, "window": 0}, "truncation_length": 1}
    )
    assert t.quiver.kind == CYCLE and t.quiver.n == 3
