import random
from fractions import Fraction

import pytest

from rspadic.local_arith import LocalMatrix, LocalRingDesc, invert, iwahori_member, random_upper_unipotent
from rspadic.magic import (
    EnumerationGuardError,
    FactorizationError,
    MagicContext,
    det_congruence_ok,
    det_map_image,
    magic_factor,
    matrix_a,
    matrix_a_prime,
    matrix_h,
    matrix_h1,
    matrix_t,
    matrix_t_prime,
    random_pair,
    unipotent_coset_count,
    unipotent_coset_reps,
)


def ctx_for(n, p, f=1, v=1, N=10, m=1):
    return MagicContext(n, LocalRingDesc(p, f, N), m, v)


def test_context_validation():
    R = LocalRingDesc(3)
    for bad in [(0, 1, 0), (1, 0, 0), (1, 1, -1)]:
        with pytest.raises(ValueError):
            MagicContext(bad[0], R, bad[1], bad[2])


def test_structural_matrices():
    c1 = ctx_for(1, 3)
    R = c1.ring
    assert matrix_t(c1).equals(LocalMatrix.diag(R, [3, 1]))
    c2 = ctx_for(2, 3)
    assert matrix_t_prime(c2).equals(LocalMatrix.diag(R, [9, 3]))
    assert (matrix_a(c1) @ matrix_t_prime(c1).embed()).equals(LocalMatrix.identity(R, 2))
    assert matrix_a_prime(c2).equals(LocalMatrix.diag(R, [Fraction(1, 9), Fraction(1, 3)]))


def test_magic_matrix():
    c1 = ctx_for(1, 3)
    R = c1.ring
    assert matrix_h1(c1).equals(LocalMatrix(R, [[1, 1], [0, 1]]))
    assert matrix_h(c1, 2).equals(LocalMatrix(R, [[1, Fraction(1, 9)], [0, 1]]))
    c2 = ctx_for(2, 2)
    assert matrix_h1(c2).equals(LocalMatrix(c2.ring, [[0, 1, 1], [1, 0, 1], [0, 0, 1]]))
    d = matrix_h1(c2).det()
    assert d == c2.ring(1) or d == c2.ring(-1)
    for fv in range(4):
        assert matrix_h(c2, fv).min_valuation() >= -2 * fv


def test_n1_closed_form():
    for p in (2, 3, 5):
        for v in (1, 2, 3):
            c = ctx_for(1, p, v=v)
            R = c.ring
            for a in range(p):
                u = LocalMatrix(R, [[1, a], [0, 1]])
                fac = magic_factor(c, u, LocalMatrix.identity(R, 1))
                kp = R(1) + R(a) * R(p) ** v
                assert fac.k_prime.equals(LocalMatrix(R, [[kp]]))
                assert fac.k.equals(LocalMatrix.diag(R, [kp.inverse(), 1]))
                assert fac.identity_ok


@pytest.mark.parametrize("v", [0, 1, 2])
def test_trivial_pair(v):
    c = ctx_for(2, 3, v=v)
    fac = magic_factor(c, LocalMatrix.identity(c.ring, 3), LocalMatrix.identity(c.ring, 2))
    assert fac.k.equals(LocalMatrix.identity(c.ring, 3))
    assert fac.k_prime.equals(LocalMatrix.identity(c.ring, 2))


def test_depth_zero_can_be_infeasible():
    c = ctx_for(1, 2, v=0)
    u = LocalMatrix(c.ring, [[1, 1], [0, 1]])
    with pytest.raises(FactorizationError):
        magic_factor(c, u, LocalMatrix.identity(c.ring, 1))


@pytest.mark.parametrize("n,p,f", [(1, 2, 1), (1, 3, 2), (2, 2, 1), (2, 3, 1), (2, 2, 2)])
def test_random_factorizations(n, p, f):
    for v in (1, 2, 3):
        c = ctx_for(n, p, f, v)
        rng = random.Random(100 * n + 10 * p + v)
        for _ in range(8):
            u, w = random_pair(c, rng)
            fac = magic_factor(c, u, w)
            assert fac.identity_ok
            assert iwahori_member(fac.k, 1) and iwahori_member(fac.k_prime, 1)
            assert det_congruence_ok(c, fac)


def test_higher_iwahori_level():
    c = ctx_for(2, 3, v=2, m=2)
    rng = random.Random(5)
    for _ in range(5):
        u, w = random_pair(c, rng)
        fac = magic_factor(c, u, w)
        assert fac.identity_ok and iwahori_member(fac.k, 2) and iwahori_member(fac.k_prime, 2)


def test_det_depends_only_on_cosets():
    c = ctx_for(2, 3, v=1)
    R = c.ring
    rng = random.Random(8)
    t, tp = matrix_t(c), matrix_t_prime(c)
    for _ in range(6):
        u, w = random_pair(c, rng)
        u2 = u @ t @ random_upper_unipotent(R, 3, rng) @ invert(t)
        w2 = w @ tp @ random_upper_unipotent(R, 2, rng) @ invert(tp)
        d1 = magic_factor(c, u, w).k.det()
        d2 = magic_factor(c, u2, w2).k.det()
        assert (d1 / d2 - 1).val_at_least(c.v + 1)


def test_coset_reps():
    R = LocalRingDesc(2, 1, 8)
    assert unipotent_coset_count(2, 3) == 16
    assert len(list(unipotent_coset_reps(R, 3))) == 16
    assert len(list(unipotent_coset_reps(R, 2))) == 2


@pytest.mark.parametrize("n,p,order", [(1, 2, 2), (1, 3, 3), (2, 2, 2)])
def test_det_map_surjective(n, p, order):
    image = det_map_image(ctx_for(n, p, v=1))
    assert len(image) == order
    assert sum(image.values()) == unipotent_coset_count(p, n + 1) * unipotent_coset_count(p, n)


def test_det_map_guard(monkeypatch):
    monkeypatch.setenv("RM_MAX_ENUM", "10")
    with pytest.raises(EnumerationGuardError):
        det_map_image(ctx_for(2, 2))
