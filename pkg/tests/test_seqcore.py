from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from app.exceptions import DomainError
from app.services.ellinf import make_xk
from app.services.seqcore import (
    OMEGA, EPSeq, UPoint, add_scaled, entry, format_rational, horizon, parse_rational, seq_from_json,
    seq_to_json, shift, sup_abs, to_decimal, to_rational, zero,
)
from tests.strategies import signed_seqs, upoints

F = Fraction


def test_entry_reads_transient_then_period():
    x = EPSeq.of([1], [0])
    assert entry(x, 0) == 1
    assert entry(x, 7) == 0
    assert entry(EPSeq.of([], [F(1, 2), 0]), 5) == 0


def test_entry_rejects_negative_index():
    with pytest.raises(DomainError):
        entry(zero(), -1)


def test_normalize_examples():
    assert EPSeq.of([0], [0]) == EPSeq((), (F(0),))
    assert EPSeq.of([], [F(1, 2), 0, F(1, 2), 0]).period == (F(1, 2), F(0))
    canonical = EPSeq.of([1, F(1, 2)], [0])
    assert canonical.transient == (F(1), F(1, 2))
    assert canonical.period == (F(0),)


def test_normalize_rotates_period_into_transient():
    x = EPSeq.of([1, F(1, 2)], [0, F(1, 2)])
    assert x.transient == (F(1),)
    assert x.period == (F(1, 2), F(0))


def test_empty_period_rejected():
    with pytest.raises(DomainError):
        EPSeq((), ())


def test_floats_are_rejected():
    with pytest.raises(DomainError):
        to_rational(0.5)
    with pytest.raises(DomainError):
        to_rational(True)


def test_sup_abs_examples():
    x2 = make_xk(2).seq
    assert sup_abs(x2) == 1
    assert sup_abs(zero()) == 0
    assert sup_abs(x2 + shift(x2, 1)) == F(1, 2)


def test_add_scaled_examples():
    x2 = make_xk(2).seq
    assert add_scaled(x2, x2, 1, -1) == zero()
    total = add_scaled(x2, shift(x2, 1), 1, 1)
    half = F(1, 2)
    assert total.prefix(10) == [0, half, 0, half, 0, -half, 0, -half, 0, 0]
    assert add_scaled(zero(), x2, 1, 1) == x2


def test_shift_examples():
    x = EPSeq.of([1], [0])
    assert shift(x, 0) == x
    assert shift(x, 2) == EPSeq.of([0, 0, 1], [0])
    with pytest.raises(DomainError):
        shift(x, -1)


def test_upoint_requires_unit_interval_and_liminf_zero():
    UPoint.of([1, F(1, 2)], [0])
    with pytest.raises(DomainError):
        UPoint.of([F(3, 2)], [0])
    with pytest.raises(DomainError):
        UPoint.of([], [F(1, 2)])


def test_shift_keeps_upoints():
    assert isinstance(shift(UPoint.of([1], [0]), 1), UPoint)


def test_omega_is_above_every_index():
    assert OMEGA > 10 ** 9
    assert not OMEGA < 3
    assert repr(OMEGA) == 'ω'


def test_rational_formatting():
    assert format_rational(F(0)) == "0/1"
    assert format_rational(F(-3, 6)) == "-1/2"
    assert parse_rational("2/4") == F(1, 2)
    assert to_decimal(F(1, 3)) == "0.333333"
    assert to_decimal(F(-1, 2), places=2) == "-0.50"
    with pytest.raises(DomainError):
        parse_rational("half")


def test_seq_from_json_validates_shape():
    with pytest.raises(DomainError):
        seq_from_json({'transient': ["1/2"]})
    with pytest.raises(DomainError):
        seq_from_json({'transient': "1/2", 'period': ["0/1"]})
    assert seq_from_json({'period': ["0/1"]}) == zero()


@given(signed_seqs())
def test_normalize_preserves_values(x):
    raw = EPSeq(x.transient + x.period[:1], x.period[1:] + x.period[:1])
    again = EPSeq.of(raw.transient, raw.period)
    span = horizon(x, raw) + 3
    assert again == x
    assert raw.prefix(span) == x.prefix(span)


@given(signed_seqs(), signed_seqs())
def test_add_scaled_is_entrywise(x, y):
    total = add_scaled(x, y, 2, -1)
    span = horizon(x, y) + 2
    assert total.prefix(span) == [2 * a - b for a, b in zip(x.prefix(span), y.prefix(span))]


@given(upoints())
def test_json_keeps_upoints(x):
    assert seq_from_json(seq_to_json(x), cls=UPoint) == x


@given(signed_seqs(), st.integers(min_value=0, max_value=5), st.integers(min_value=0, max_value=5))
def test_shift_is_additive(x, i, j):
    assert shift(shift(x, i), j) == shift(x, i + j)


@given(signed_seqs(), st.integers(min_value=0, max_value=5))
def test_shift_keeps_the_sup(x, j):
    assert sup_abs(shift(x, j)) == sup_abs(x)


@given(signed_seqs(), signed_seqs())
def test_sup_abs_triangle_inequality(x, y):
    assert sup_abs(x + y) <= sup_abs(x) + sup_abs(y)
