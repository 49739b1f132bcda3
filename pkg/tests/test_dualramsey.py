import pytest

from app.exceptions import DomainError
from app.services.dualramsey import (
    ColoringKind, MonochromaticWitness, instance_from_json, orbit_coloring, position_mod_coloring,
    search_monochromatic, table_coloring, table_to_json, verify_witness, xk_fattening_coloring, xk_orbit_coloring,
)
from app.services.ellinf import make_xk
from app.services.rigidsurj import FiniteRigidSurjection, compose_finite, enumerate_rigid
from app.services.seqcore import EPSeq, seq_to_json, shift, zero
from app.services.urysohn import make_wr

RS = FiniteRigidSurjection


def constant_table(n, k, color=0, num_colors=2):
    return table_coloring(n, k, num_colors, {f.values: color for f in enumerate_rigid(n, k)})


def test_constant_coloring_takes_first_candidate():
    table = constant_table(4, 2, color=1)
    for m in range(2, 5):
        w = search_monochromatic(table, m)
        assert w.p == enumerate_rigid(4, m)[0]
        assert w.color == 1


def test_full_width_needs_a_monochromatic_table():
    mixed = position_mod_coloring(3, 2, 1, 2)
    assert search_monochromatic(mixed, 3) is None
    w = search_monochromatic(constant_table(3, 2), 3)
    assert w.p == RS.identity(3)


def test_position_coloring_finds_a_witness():
    table = position_mod_coloring(4, 2, 3, 2)
    w = search_monochromatic(table, 3)
    assert w is not None
    assert all(table[compose_finite(r, w.p)] == w.color for r in enumerate_rigid(3, 2))


def test_verify_witness_rejects_perturbed_color():
    table = position_mod_coloring(4, 2, 3, 2)
    w = search_monochromatic(table, 3)
    assert verify_witness(table, w)
    assert not verify_witness(table, MonochromaticWitness(w.p, 1 - w.color))


def test_witness_needs_a_rigid_p():
    with pytest.raises(DomainError):
        MonochromaticWitness(RS((1, 0, 0)), 0)


def test_search_checks_parameter_order():
    table = constant_table(3, 2)
    with pytest.raises(DomainError):
        search_monochromatic(table, 1)
    with pytest.raises(DomainError):
        search_monochromatic(table, 4)


def test_table_must_be_total():
    entries = {f.values: 0 for f in enumerate_rigid(3, 2)[1:]}
    with pytest.raises(DomainError):
        table_coloring(3, 2, 2, entries)
    with pytest.raises(DomainError):
        table_coloring(3, 2, 1, {f.values: 1 for f in enumerate_rigid(3, 2)})


def test_orbit_coloring_buckets_distances():
    table = orbit_coloring(3, 1, make_wr(2), 2, 4)
    assert table.kind is ColoringKind.ORBIT
    # w_2∘f = (1, 1, 1, 1/2, 0, ...) sits at distance 1 from w_2
    assert table[RS((0, 0, 0))] == 3


def test_instance_from_json_variants():
    table, m = instance_from_json({'n': 3, 'k': 2, 'm': 2,
                                   'coloring': {'kind': 'position_mod', 'position': 2, 'modulus': 2}})
    assert m == 2
    assert table.kind is ColoringKind.POSITION_MOD
    entries = [{'values': list(f.values), 'color': 0} for f in enumerate_rigid(3, 2)]
    table, _ = instance_from_json({'n': 3, 'k': 2, 'm': 3, 'coloring': {'kind': 'table', 'entries': entries}})
    assert table.num_colors == 1


@pytest.mark.parametrize("data", [
    {'n': 3, 'k': 2, 'm': 2, 'coloring': {'kind': 'paint'}},
    {'n': 3, 'k': 2, 'm': 4, 'coloring': {'kind': 'position_mod', 'position': 0, 'modulus': 2}},
    {'n': 3, 'k': 2, 'coloring': {'kind': 'position_mod', 'position': 0, 'modulus': 2}},
    {'n': 3, 'k': 2, 'm': 2, 'coloring': {'kind': 'position_mod', 'position': 5, 'modulus': 2}},
])
def test_instance_from_json_rejects_malformed(data):
    with pytest.raises(DomainError):
        instance_from_json(data)


def test_xk_orbit_coloring_buckets_sup_distances():
    table = xk_orbit_coloring(3, 1, make_xk(2).seq, 2, 4)
    assert table.kind is ColoringKind.XK_ORBIT
    # x_2∘f = (0, 0, 0, 1/2, -1/2, 1, -1, 1/2, -1/2, 0, ...) sits at sup distance 1/2 from x_2
    assert table[RS((0, 0, 0))] == 1
    assert xk_orbit_coloring(3, 1, make_xk(2).seq, 2, 1)[RS((0, 0, 0))] == 0
    with pytest.raises(DomainError):
        xk_orbit_coloring(3, 1, EPSeq.of([2], [0]), 2, 4)
    with pytest.raises(DomainError):
        xk_orbit_coloring(3, 1, zero(), 2, 0)


def test_xk_fattening_coloring_marks_near_points():
    assert xk_fattening_coloring(3, 3, [make_xk(2).seq], 2, 0)[RS.identity(3)] == 1
    assert xk_fattening_coloring(3, 3, [zero()], 2, "1/2")[RS.identity(3)] == 0
    table = xk_fattening_coloring(4, 2, [-shift(make_xk(2).seq, 1)], 2, "1/2")
    assert table.kind is ColoringKind.XK_FATTENING
    assert table.num_colors == 2
    with pytest.raises(DomainError):
        xk_fattening_coloring(3, 3, [], 2, 1)


def test_instance_from_json_reads_sup_norm_colorings():
    x2 = seq_to_json(make_xk(2).seq)
    table, _ = instance_from_json({'n': 3, 'k': 1, 'm': 2,
                                   'coloring': {'kind': 'xk_orbit', 'target': x2, 'xk': 2, 'buckets': 4}})
    assert table.colors == xk_orbit_coloring(3, 1, make_xk(2).seq, 2, 4).colors
    table, _ = instance_from_json({'n': 3, 'k': 3, 'm': 3,
                                   'coloring': {'kind': 'xk_fattening', 'centers': [x2], 'xk': 2, 'eps': "0/1"}})
    assert table[RS.identity(3)] == 1
    with pytest.raises(DomainError):
        instance_from_json({'n': 3, 'k': 3, 'm': 3, 'coloring': {'kind': 'xk_fattening', 'xk': 2, 'eps': "0/1"}})


@pytest.mark.parametrize("table", [
    position_mod_coloring(4, 2, 3, 2),
    orbit_coloring(3, 1, make_wr(2), 2, 4),
    xk_orbit_coloring(4, 2, make_xk(2).seq, 2, 3),
])
def test_table_json_is_an_explicit_instance(table):
    instance = {'n': table.n, 'k': table.k, 'm': table.k + 1, 'coloring': table_to_json(table)}
    again, m = instance_from_json(instance)
    assert again.kind is ColoringKind.TABLE
    assert again.num_colors == table.num_colors
    assert again.colors == table.colors
    assert search_monochromatic(again, m) == search_monochromatic(table, m)
