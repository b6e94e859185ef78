import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rspadic.local_arith import (
    INF,
    LocalElem,
    LocalMatrix,
    LocalRingDesc,
    NonIntegralError,
    PrecisionError,
    invert,
    iwahori_member,
    make_elem,
    random_iwahori,
    valuation,
)


def test_make_elem_examples():
    x = make_elem(LocalRingDesc(3, 1, 4), 10)
    assert x.digits() == [1, 0, 1, 0] and x.valuation() == 0
    z = make_elem(LocalRingDesc(5, 1, 3), 0)
    assert z.is_exact_zero() and z.valuation() == INF
    y = make_elem(LocalRingDesc(3, 1, 4), Fraction(1, 3))
    assert y.valuation() == -1 and y.digits() == [1, 0, 0, 0]


def test_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        make_elem(LocalRingDesc(3), "1/0")


def test_float_rejected():
    with pytest.raises(TypeError):
        make_elem(LocalRingDesc(3), 0.5)


def test_ring_validation():
    with pytest.raises(ValueError):
        LocalRingDesc(4)
    with pytest.raises(ValueError):
        LocalRingDesc(3, 0)
    with pytest.raises(ValueError):
        LocalRingDesc(3, 1, 0)


def test_moduli():
    assert LocalRingDesc(2, 2).modulus == (1, 1, 1)
    assert LocalRingDesc(3, 2).modulus == (1, 0, 1)
    assert LocalRingDesc(5, 1).q == 5 and LocalRingDesc(2, 3).q == 8


def test_valuation_examples():
    R = LocalRingDesc(3, 1, 10)
    assert valuation(R(9)) == 2
    assert valuation(R(1)) == 0
    assert valuation(R(3) * R(9)) == 3


def test_inexact_zero_threshold():
    R = LocalRingDesc(3, 1, 4)
    z = R(1) - make_elem(R, 1 + 81 * 2)  # agrees to 4 digits
    assert z.is_zero() and not z.is_exact_zero()
    assert z.val_at_least(3)
    with pytest.raises(PrecisionError):
        z.val_at_least(5)


def test_iwahori_examples():
    p = 5
    R = LocalRingDesc(p, 1, 8)
    assert iwahori_member(LocalMatrix.identity(R, 3), 4)
    g = LocalMatrix(R, [[1, 0], [p, 1]])
    assert iwahori_member(g, 1) and not iwahori_member(g, 2)
    assert not iwahori_member(LocalMatrix(R, [[0, 1], [1, 0]]), 1)
    with pytest.raises(NonIntegralError):
        iwahori_member(LocalMatrix(R, [[Fraction(1, p), 0], [0, 1]]), 1)
    assert not iwahori_member(LocalMatrix(R, [[Fraction(1, p), 0], [0, 1]]), 1, strict=False)


def test_invert_examples():
    R = LocalRingDesc(3, 1, 8)
    d = invert(LocalMatrix.diag(R, [3, 1]))
    assert d.equals(LocalMatrix.diag(R, [Fraction(1, 3), 1]))
    a = R(7)
    u = invert(LocalMatrix(R, [[1, a], [0, 1]]))
    assert u.equals(LocalMatrix(R, [[1, -a], [0, 1]]))
    rng = random.Random(3)
    for _ in range(20):
        g = random_iwahori(R, 3, 1, rng)
        prod = g @ invert(g)
        ident = LocalMatrix.identity(R, 3)
        for i in range(3):
            for j in range(3):
                assert (prod[i, j] - ident[i, j]).val_at_least(8)


def test_singular_matrix():
    R = LocalRingDesc(3, 1, 8)
    with pytest.raises((ZeroDivisionError, PrecisionError)):
        invert(LocalMatrix(R, [[1, 2], [2, 4]]))


def test_json_round_trip():
    R = LocalRingDesc(3, 2, 6)
    x = make_elem(R, (Fraction(5, 9), 4))
    data = x.to_json()
    assert set(data) >= {"valuation", "digits", "p", "f", "N"}
    assert LocalElem.from_json(data).identical(x)
    z = R.zero()
    assert LocalElem.from_json(z.to_json()).is_exact_zero()
    M = LocalMatrix(R, [[1, 3], [Fraction(1, 3), (0, 1)]])
    assert LocalMatrix.from_json(M.to_json()).equals(M)


# -- properties --------------------------------------------------------------

rings = st.builds(
    LocalRingDesc,
    st.sampled_from([2, 3, 5]),
    st.sampled_from([1, 2]),
    st.integers(min_value=1, max_value=12),
)
rationals = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 10**6)


def _value(ring, data):
    return make_elem(ring, tuple(data[: ring.f]))


@settings(max_examples=300, deadline=None)
@given(rings, st.lists(rationals, min_size=6, max_size=6))
def test_ring_axioms(R, vals):
    x, y, z = _value(R, vals[0:2]), _value(R, vals[2:4]), _value(R, vals[4:6])
    assert (x + y) == (y + x)
    assert (x * y) == (y * x)
    assert ((x + y) + z) == (x + (y + z))
    assert ((x * y) * z) == (x * (y * z))
    assert (x * (y + z)) == (x * y + x * z)
    assert (x - x).is_zero()
    if not x.is_zero():
        assert (x * x.inverse()) == R.one()


@settings(max_examples=300, deadline=None)
@given(rings, st.lists(rationals, min_size=4, max_size=4))
def test_make_elem_is_homomorphism(R, vals):
    a, b = tuple(vals[0:2][: R.f]), tuple(vals[2:4][: R.f])
    x, y = make_elem(R, a), make_elem(R, b)
    assert x + y == make_elem(R, tuple(s + t for s, t in zip(a, b)))
    if R.f == 1:
        assert x * y == make_elem(R, a[0] * b[0])


@settings(max_examples=200, deadline=None)
@given(rings, st.lists(rationals, min_size=4, max_size=4), st.sampled_from(["+", "-", "*", "/"]))
def test_precision_contract(R, vals, op):
    """Re-running at N+4 and truncating reproduces the N result."""
    big = R.with_precision(R.precision_N + 4)

    def run(ring):
        x, y = _value(ring, vals[0:2]), _value(ring, vals[2:4])
        if op == "+":
            return x + y
        if op == "-":
            return x - y
        if op == "*":
            return x * y
        if y.is_zero():
            return None
        return x / y

    small, large = run(R), run(big)
    if small is None:
        return
    if small.is_zero():
        assert large.val_at_least(small.absprec) if small.absprec != INF else large.is_exact_zero()
        return
    assert large.valuation() == small.valuation()
    trunc = large.with_precision(small.relprec)
    assert trunc.unit == small.unit


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.sampled_from([1, 2]), st.integers(1, 3), st.integers(0, 10**6))
def test_iwahori_subgroup(p, f, m, seed):
    R = LocalRingDesc(p, f, 10)
    rng = random.Random(seed)
    g, h = random_iwahori(R, 3, m, rng), random_iwahori(R, 3, m, rng)
    assert iwahori_member(g, m) and iwahori_member(h, m)
    assert iwahori_member(g @ h, m)
    assert iwahori_member(invert(g), m)


def test_discrete_ring_axioms_bulk():
    """10^4 random triples over the listed residue fields."""
    rng = random.Random(11)
    for trial in range(10**4):
        R = LocalRingDesc(rng.choice([2, 3, 5]), rng.choice([1, 2]), rng.randint(1, 12))
        x, y, z = (R.random_integral(rng) * R.uniformizer() ** rng.randint(-2, 2) for _ in range(3))
        assert (x * (y + z)) == (x * y + x * z)
        assert ((x * y) * z) == (x * (y * z))
        assert (x + y) - y == x
