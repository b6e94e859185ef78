import random
from fractions import Fraction
from itertools import product

import pytest

from rspadic.hecke import (
    SlopeDatum,
    T_from_roots,
    apply_operator,
    apply_tensor,
    check_disjoint,
    classify,
    decompose_V,
    decompose_V_prime,
    dual_roots,
    eta,
    eta_check,
    hecke_polynomial,
    hida_factor,
    index_formula,
    kappa,
    kappa_exponent,
    lattice_key,
    locate,
    projection_factors,
)
from rspadic.local_arith import LocalMatrix, LocalRingDesc, random_iwahori
from rspadic.magic import MagicContext, matrix_t, matrix_t_prime
from rspadic.weights import WeightPair, WeightTuple, rationals

Q = rationals()


def ctx_for(n, p, f=1, m=1, N=10):
    return MagicContext(n, LocalRingDesc(p, f, N), m, 0)


def test_n1_representatives():
    c = ctx_for(1, 3)
    dc = decompose_V(c)
    assert len(dc) == 3 == index_formula(3, 2)
    R = c.ring
    expected = [LocalMatrix(R, [[3, a], [0, 1]]) for a in range(3)]
    for e in expected:
        assert len(locate(dc, e)) == 1


@pytest.mark.parametrize("n,p,f", [(1, 2, 1), (1, 3, 1), (1, 2, 2), (2, 2, 1), (2, 3, 1)])
def test_counts_and_disjointness(n, p, f):
    c = ctx_for(n, p, f)
    V, Vp = decompose_V(c), decompose_V_prime(c)
    q = p**f
    assert len(V) == index_formula(q, n + 1)
    assert len(Vp) == index_formula(q, n)
    if q <= 3:
        assert check_disjoint(V) and check_disjoint(Vp)


def test_count_values():
    assert index_formula(2, 3) == 2**4
    assert index_formula(5, 2) == 5
    assert index_formula(3, 1) == 1


def _iwahori_mod(R, p, e, m):
    """All 2x2 members of K(m) with entries in [0, p^e)."""
    M = p**e
    for a, b, c, d in product(range(M), repeat=4):
        g = LocalMatrix(R, [[a, b], [c, d]])
        if a % p and d % p and c % p**m == 0:
            yield g


@pytest.mark.parametrize("p", [2, 3])
def test_sieve_completeness_n1(p):
    """Every k·t with k in K(1) mod p^2 lands in exactly one representative coset."""
    c = ctx_for(1, p)
    dc = decompose_V(c)
    t = matrix_t(c)
    hits = [0] * len(dc)
    for k in _iwahori_mod(c.ring, p, 2, 1):
        found = locate(dc, k @ t)
        assert len(found) == 1
        hits[found[0]] += 1
    assert all(hits)


@pytest.mark.parametrize("p,f", [(2, 1), (3, 1)])
def test_sieve_completeness_n2_sampled(p, f):
    c = ctx_for(2, p, f)
    rng = random.Random(p)
    V, Vp = decompose_V(c), decompose_V_prime(c)
    for _ in range(60):
        k = random_iwahori(c.ring, 3, 1, rng)
        assert len(locate(V, k @ matrix_t(c))) == 1
        kp = random_iwahori(c.ring, 2, 1, rng)
        assert len(locate(Vp, kp @ matrix_t_prime(c))) == 1


def _toy_f(g):
    return hash(lattice_key(g)) % 7


def test_lattice_key_is_right_invariant():
    R = LocalRingDesc(3, 1, 10)
    rng = random.Random(1)
    g = LocalMatrix(R, [[9, 5, 1], [3, 1, 0], [0, 2, 2]])
    for _ in range(10):
        k = random_iwahori(R, 3, 1, rng)
        assert lattice_key(g @ k) == lattice_key(g)
    assert lattice_key(g) != lattice_key(g @ LocalMatrix.diag(R, [3, 1, 1]))


def test_tensor_action_order_independent():
    c = ctx_for(1, 3)
    V, Vp = decompose_V(c), decompose_V_prime(c)
    R = c.ring

    def F(g, h):
        return (lattice_key(g), lattice_key(h))

    g = LocalMatrix(R, [[1, 2], [0, 1]])
    h = LocalMatrix(R, [[3]])
    assert apply_tensor(V, Vp, F, g, h, "V-first") == apply_tensor(V, Vp, F, g, h, "V'-first")


def test_hida_normalized_operator_is_integral():
    """On integer-valued functions the highest-weight normalized U_p stays integral."""
    c = ctx_for(1, 3)
    V = decompose_V(c)
    pair = WeightPair(WeightTuple(2, Q, {"id": (2, 0)}), WeightTuple(1, Q, {"id": (0,)}))
    scale = Fraction(3) ** int(hida_factor(c, pair))
    g = LocalMatrix.identity(c.ring, 2)
    # highest-weight vector: μ(t)^-1 is the torus action on it along each translate
    val = apply_operator(V, lambda x: Fraction(_toy_f(x)) / scale, g) * scale
    assert val.denominator == 1
    assert scale == 9


def test_hecke_polynomial():
    H1 = hecke_polynomial(1, 5)
    assert H1.coeffs == (1, -1, 5)
    assert str(H1) == "X^2 - T1*X + 5*T2"
    H2 = hecke_polynomial(2, 3)
    assert H2.coeffs[0] == 1 and H2.coeffs[-1] == -27
    # a_p specialization for a weight-2 form: X^2 - a_p X + p
    roots = [Fraction(2), Fraction(3)]
    T = T_from_roots(roots, 3)
    H = hecke_polynomial(1, 3)
    for r in roots:
        assert H.evaluate(T, r) == 0


def test_hecke_polynomial_roots_n2():
    roots = [Fraction(1), Fraction(2), Fraction(5)]
    T = T_from_roots(roots, 7)
    H = hecke_polynomial(2, 7)
    assert all(H.evaluate(T, r) == 0 for r in roots)


def test_kappa_specializations():
    # n = 1: exponent 0, kappa = λ1 λ'1
    assert kappa_exponent(1) == 0
    assert kappa(SlopeDatum(3, 3, (Fraction(2),), (Fraction(5),))) == 10
    # n = 2: exponent -(3*2*1)/3 = -2
    assert kappa_exponent(2) == -2
    assert kappa(SlopeDatum(2, 2, (1, 1), (1, 1))) == Fraction(1, 4)
    # n = 2: λ1^2 λ2 λ'1^2 λ'2 q^-2
    assert kappa(SlopeDatum(3, 3, (2, 5), (7, 1))) == Fraction(4 * 5 * 49, 9)
    assert kappa_exponent(3) == -8


def test_eta():
    assert eta((Fraction(7),), 5) == 7
    assert eta((1, 1), 3) == Fraction(1, 3)
    d = SlopeDatum(3, 3, (2, 5), (7, 1))
    assert eta_check(d, Fraction(7, 3))
    assert not eta_check(d, 7)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dual_roots(n):
    q = 5
    roots = tuple(Fraction(k + 2) for k in range(n))
    d = dual_roots(roots, q, n)
    assert dual_roots(d, q, n) == roots
    assert eta(d, q) == 1 / eta(roots, q)
    big = dual_roots(roots + (Fraction(11),), q, n + 1)
    assert big[-1] == Fraction(q) ** n / roots[0]


def test_classify():
    triv = WeightPair(WeightTuple(2, Q, {"id": (0, 0)}), WeightTuple(1, Q, {"id": (0,)}))
    assert classify(SlopeDatum(3, 3, (Fraction(2),), (Fraction(1),)), triv).kind == "ordinary"
    c = classify(SlopeDatum(3, 3, (Fraction(3),), (Fraction(1),)), triv)
    assert c.kind == "finite-slope" and c.slope == 1
    assert classify(SlopeDatum(3, 3, (Fraction(0),), (Fraction(1),)), triv).kind == "not-finite-slope"
    # weight-k form in the dual highest-weight normalization: slope = v(alpha)
    k = 4
    pair = WeightPair(WeightTuple(2, Q, {"id": (0, 2 - k)}), WeightTuple(1, Q, {"id": (0,)}))
    assert classify(SlopeDatum(5, 5, (Fraction(1, 3),), (1,)), pair).kind == "ordinary"
    assert classify(SlopeDatum(5, 5, (Fraction(25),), (1,)), pair).slope == 2


def test_projection_factors_shape():
    fac = projection_factors(2, 3, (1, 2), (5, 7))
    assert len([f for f in fac if f[0] == "pi"]) == 2 * 2
    assert len([f for f in fac if f[0] == "sigma"]) == 1
    assert projection_factors(1, 3, (2,), (5,)) == [("pi", Fraction(2, 3), 2)]
