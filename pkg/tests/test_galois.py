import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gqkit.galois import FieldError, find_nonsquare, fixed_subfield, frobenius_power, make_field


@pytest.mark.parametrize("p,h", [(3, 1), (5, 1), (3, 2), (3, 3), (7, 1)])
def test_field_size_and_tables(p, h):
    f = make_field(p, h)
    assert f.q == p**h
    q = f.q
    a = np.arange(q)
    # additive and multiplicative groups
    assert np.all(np.sort(f.add, axis=1) == a)
    assert np.all(np.sort(f.mul[1:, 1:], axis=1) == a[1:])
    assert np.all(f.mul[0] == 0)


def test_frobenius_fixes_everything_at_q():
    f = make_field(3, 2)
    assert all(f.pow(a, 9) == a for a in range(9))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 26), st.integers(0, 26), st.integers(0, 26))
def test_field_axioms_gf27(a, b, c):
    f = make_field(3, 3)
    assert f.mul[a, f.add[b, c]] == f.add[f.mul[a, b], f.mul[a, c]]
    assert f.add[a, f.add[b, c]] == f.add[f.add[a, b], c]
    assert f.mul[a, f.mul[b, c]] == f.mul[f.mul[a, b], c]
    if a:
        assert f.mul[a, f.inv[a]] == 1


def test_frobenius_orders():
    f9, f27 = make_field(3, 2), make_field(3, 3)
    assert frobenius_power(f9, 0).is_identity
    s = frobenius_power(f9, 1)
    assert np.array_equal(s.table[s.table], np.arange(9))  # involution
    assert not s.is_identity and s.order == 2
    t = frobenius_power(f27, 1)
    assert not np.array_equal(t.table[t.table], np.arange(27))
    assert t.order == 3
    with pytest.raises(FieldError):
        frobenius_power(f9, 2)


def _nonsquares(f):
    sq = {int(f.mul[y, y]) for y in range(f.q)}
    return [a for a in range(f.q) if a not in sq]


@pytest.mark.parametrize("p,h", [(3, 1), (5, 1), (3, 2), (3, 3)])
def test_nonsquare_is_smallest(p, h):
    f = make_field(p, h)
    ns = _nonsquares(f)
    assert find_nonsquare(f).value == min(ns)
    assert len(ns) == (f.q - 1) // 2


def test_nonsquare_gf3_gf5():
    assert find_nonsquare(make_field(3, 1)).value == 2
    assert find_nonsquare(make_field(5, 1)).value in (2, 3)


def test_fixed_subfields():
    f9, f27 = make_field(3, 2), make_field(3, 3)
    assert fixed_subfield(frobenius_power(f9, 0)).order == 9
    sub = fixed_subfield(frobenius_power(f9, 1))
    assert sub.order == 3 and sub.multiplicative_order == 2
    assert set(sub.elements) == {a for a in range(9) if f9.pow(a, 3) == a}
    assert fixed_subfield(frobenius_power(f27, 1)).order == 3
