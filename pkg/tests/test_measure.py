import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rspadic.characters import character_group, primitive_characters
from rspadic.measure import (
    Distribution,
    ProviderAxiomError,
    TowerProvider,
    build_distribution,
    cells,
    check_A1,
    check_A2,
    check_A3,
    check_boundedness,
    check_distribution_relation,
    check_tower_involution,
    constant_provider,
    dual_provider,
    generalized_index,
    integrate_character,
    involute,
    slope_provider,
    synthetic_provider,
    tower_involution,
)


def test_generalized_index():
    assert generalized_index(1, 5) == 1
    assert generalized_index(2, 3) == Fraction(3, 3**5)


@pytest.mark.parametrize("n,p", [(1, 2), (1, 3), (2, 2)])
def test_constant_provider(n, p):
    prov = constant_provider(n, p, c=3)
    assert prov.kappa == p
    d = build_distribution(prov, 4)
    assert check_distribution_relation(d).ok
    assert d[(2, 1)] == (Fraction(3, p**2),)


@pytest.mark.parametrize("n,p,depth", [(1, 3, 3), (1, 2, 4), (2, 2, 3)])
def test_synthetic_provider_axioms(n, p, depth):
    prov = synthetic_provider(n, p, depth, seed=5)
    rng = random.Random(1)
    for v in range(1, depth):
        for x in cells(p, v)[:3]:
            assert check_A1(prov, v, x, rng, trials=2)
            assert check_A2(prov, v, x, rng, trials=2)
            assert check_A3(prov, v, x)
    d = build_distribution(prov, depth)
    assert check_distribution_relation(d).ok


def test_axiom_violation_detected():
    bad = TowerProvider(1, 3, Fraction(2), lambda v, x: (Fraction(x + v),))
    assert not check_A3(bad, 1, 1)
    with pytest.raises(ProviderAxiomError):
        build_distribution(bad, 3)
    d = build_distribution(bad, 3, verify_axioms=False)
    rep = check_distribution_relation(d)
    assert not rep.ok and rep.counterexample[0] == 1


def test_zero_kappa_rejected():
    prov = TowerProvider(1, 3, 0, lambda v, x: (Fraction(1),))
    with pytest.raises(ValueError):
        build_distribution(prov, 2)


def test_orbit_search_without_depth_hint():
    prov = synthetic_provider(1, 3, 3, seed=2)
    h, hp = prov.tower_point(2)
    assert prov.evaluate(h, hp, 4) == prov.tower_value(2, 4)


def test_slope_boundedness():
    d = build_distribution(slope_provider(1, 3, 1, 5), 5)
    assert check_distribution_relation(d).ok
    rep = check_boundedness(d, 1)
    assert rep.ok and rep.attained and rep.kind == "distribution"
    assert all(rep.per_depth_min[v] == -v for v in range(1, 6))
    # a slope-2 datum violates the slope-1 bound
    d2 = build_distribution(slope_provider(1, 2, 2, 4), 4)
    assert not check_boundedness(d2, 1).ok


def test_ordinary_is_bounded():
    prov = synthetic_provider(1, 3, 5, seed=3, kappa=Fraction(4, 7))
    d = build_distribution(prov, 5)
    rep = check_boundedness(d, 0)
    assert rep.kind == "measure" and rep.ok


def test_integration_independent_of_level():
    d = build_distribution(synthetic_provider(1, 5, 3, seed=9), 3)
    for chi in character_group(5, 2):
        K = chi.primitive().field()
        vals = [integrate_character(d, chi, lev, K) for lev in range(max(chi.conductor_exponent(), 1), 4)]
        assert all(v == vals[0] for v in vals)
    triv = character_group(5, 0)[0]
    assert integrate_character(d, triv)[0].rational_part() == sum(d[(1, x)][0] for x in cells(5, 1))
    with pytest.raises(ValueError):
        integrate_character(build_distribution(synthetic_provider(1, 5, 3), 1), primitive_characters(5, 2)[0])


def test_tower_involution():
    for p in (2, 3, 5):
        for n in (1, 2):
            assert check_tower_involution(p, n, 5 if p < 5 else 3)
    assert tower_involution(3, 1, 2, 2) == (-5) % 9


def test_dual_provider_involution():
    prov = synthetic_provider(1, 3, 4, seed=4)
    dual = dual_provider(prov, Fraction(3, 11))
    d, dd = build_distribution(prov, 4), build_distribution(dual, 4)
    assert check_distribution_relation(dd).ok
    assert involute(d, dd).ok
    # perturb one cell: detected
    dd.values[(3, 1)] = (dd.values[(3, 1)][0] + 1,)
    rep = involute(d, dd)
    assert not rep.ok


def test_json_round():
    d = build_distribution(constant_provider(1, 3), 2)
    data = json.loads(json.dumps(d.to_json()))
    assert data["kappa"]["valuation"] == "1"
    assert len(data["cells"]) == 1 + 2 + 6
    assert isinstance(d, Distribution)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]))
def test_random_distribution_relation(seed, p):
    d = build_distribution(synthetic_provider(1, p, 3, seed=seed), 3)
    assert check_distribution_relation(d).ok
    assert d.total_mass(3) == d.total_mass(1)
