"""Distributions on the tower Z_p^x built from modular-symbol providers.

A provider assigns values to triples (h, h', x) with h in GL(n+1, Q_p),
h' in GL(n, Q_p) and x a unit residue.  Tower providers are determined by
their values at the tower points ``(h t^v, t'^v, x)`` and extend to every
pair in the orbit of a tower point by right Iwahori invariance (A1) and
diagonal translation (A2); the extension uses the Iwahori congruence solver.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .characters import FiniteOrderCharacter
from .fields import QQ, CyclotomicField, valuation_in
from .local_arith import LocalMatrix, LocalRingDesc, invert
from .magic import (
    FactorizationError,
    MagicContext,
    matrix_h1,
    matrix_t,
    matrix_t_prime,
    solve_iwahori_pair,
    unipotent_coset_count,
    unipotent_coset_reps,
)


class ProviderAxiomError(ValueError):
    pass


def unit_residue(x, v: int) -> int:
    """Class of a p-adic number in (Z/p^v)^x after removing its p-power (f = 1)."""
    fr = x.to_fraction() / Fraction(x.ring.p) ** x.valuation()
    M = x.ring.p**v
    if M == 1:
        return 0
    return fr.numerator * pow(fr.denominator, -1, M) % M


def generalized_index(n: int, q: int) -> Fraction:
    """``I = N(ϖ) / (K(ϖ^v) : K(ϖ^(v+1)))`` with the index a product of unipotent indices."""
    return Fraction(q, unipotent_coset_count(q, n + 1) * unipotent_coset_count(q, n))


def _scale(vec: tuple, c) -> tuple:
    return tuple(c * a for a in vec)


def _add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


class TowerProvider:
    """Provider defined by its tower values ``phi(v, x)`` (tuples over ``coeff``)."""

    def __init__(
        self,
        n: int,
        p: int,
        kappa,
        phi: Callable[[int, int], tuple],
        components: Sequence = (0,),
        coeff=QQ,
        precision: int = 30,
        name: str = "tower",
    ):
        self.n = n
        self.p = p
        self.kappa = kappa
        self._phi = phi
        self.components = tuple(components)
        self.coeff = coeff
        self.ring = LocalRingDesc(p, 1, precision)
        self.ctx = MagicContext(n, self.ring, 1, 0)
        self.name = name
        self._cache: dict = {}

    @property
    def index(self) -> Fraction:
        return generalized_index(self.n, self.p)

    def tower_value(self, v: int, x: int) -> tuple:
        M = self.p**v
        key = (v, x % M if M > 1 else 0)
        if key not in self._cache:
            self._cache[key] = tuple(self._phi(*key))
        return self._cache[key]

    def tower_point(self, v: int) -> tuple[LocalMatrix, LocalMatrix]:
        c = self.ctx
        return matrix_h1(c) @ matrix_t(c, v), matrix_t_prime(c, v)

    def canonicalize(self, h: LocalMatrix, hp: LocalMatrix, v: int) -> tuple:
        """``(k', twist)`` with ``(h, h') = (j(g')h1 t^v k, g' t'^v k')``; twist = unit part of det(g')."""
        c = self.ctx
        A = matrix_t(c, -v) @ invert(matrix_h1(c)) @ matrix_t_prime(c, v).embed()
        B = invert(hp).embed() @ h
        kp, _ = solve_iwahori_pair(A, B, 1)
        dg = hp.det() / kp.det() / matrix_t_prime(c, v).det()
        return kp, dg

    def evaluate(self, h: LocalMatrix, hp: LocalMatrix, x: int, v: int | None = None) -> tuple:
        """Value at (h, h', x); ``v`` is the tower depth of the orbit (searched when None)."""
        depths = [v] if v is not None else range(0, self.ring.precision_N // (self.n + 1))
        for d in depths:
            try:
                _, dg = self.canonicalize(h, hp, d)
            except FactorizationError:
                continue
            return self.tower_value(d, x * unit_residue(dg, d))
        raise ProviderAxiomError("pair is not in the orbit of a tower point")

    def valuation(self, value) -> Fraction | None:
        """Minimal p-adic valuation over nonzero components; None for the zero vector."""
        vals = [valuation_in(self.coeff, a, self.p) for a in value if a != 0]
        return min(vals) if vals else None


# ---------------------------------------------------------------------------
# concrete providers


def constant_provider(n: int, p: int, c=1, precision: int = 30) -> TowerProvider:
    """``evaluate ≡ c``; the eigenvalue is forced to be I·#(u,w) = q."""
    kappa = generalized_index(n, p) * unipotent_coset_count(p, n + 1) * unipotent_coset_count(p, n)
    return TowerProvider(n, p, kappa, lambda v, x: (Fraction(c),), precision=precision, name="constant")


def _random_distribution(p: int, depth: int, rng: random.Random, lo: int = -50, hi: int = 50) -> dict:
    """Random Z-valued distribution on (Z/p^v)^x for v <= depth (sums of leaves)."""
    M = p**depth
    vals = {(depth, x): Fraction(rng.randint(lo, hi)) for x in range(M) if x % p}
    for v in range(depth - 1, -1, -1):
        Mv = p**v
        for x in range(Mv if Mv > 1 else 1):
            if Mv > 1 and x % p == 0:
                continue
            children = [(v + 1, x + a * Mv) for a in range(p)] if v > 0 else [(1, a) for a in range(1, p)]
            vals[(v, x)] = sum((vals[ch] for ch in children), Fraction(0))
    return vals


def synthetic_provider(n: int, p: int, depth: int, seed: int = 0, kappa=Fraction(7, 5), precision: int = 30) -> TowerProvider:
    """Axiom-satisfying provider from a random distribution ν: ``phi(v, x) = κ^v ν(x + p^v)``."""
    rng = random.Random(seed)
    nu = _random_distribution(p, depth, rng)
    kappa = Fraction(kappa)

    def phi(v, x):
        if v > depth:
            raise ProviderAxiomError(f"synthetic provider only defined to depth {depth}")
        return (kappa**v * nu[(v, x)],)

    return TowerProvider(n, p, kappa, phi, precision=precision, name="synthetic")


def slope_provider(n: int, p: int, s: int, depth: int, precision: int = 30) -> TowerProvider:
    """Integral provider with eigenvalue p^s whose cells have valuation exactly ``-s·v``.

    The unnormalized values w(v, x) are units: the child ``x`` of a cell
    carries ``(p^s - p + 1) w`` and the other p-1 children carry ``w``.
    """
    if s < 1:
        raise ValueError("slope must be >= 1")
    kappa = Fraction(p) ** s
    w: dict = {(1, x): Fraction(1) for x in range(1, p)}
    w[(0, 0)] = Fraction(p - 1) / kappa  # total mass, not integral
    for v in range(1, depth):
        M = p**v
        for x in range(M):
            if x % p == 0:
                continue
            base = w[(v, x)]
            w[(v + 1, x)] = (kappa - p + 1) * base
            for a in range(1, p):
                w[(v + 1, x + a * M)] = base

    def phi(v, x):
        if v > depth:
            raise ProviderAxiomError(f"slope provider only defined to depth {depth}")
        # mu(v, x) = kappa^-v * phi = p^(-sv) * w
        return (w[(v, x)],)

    return TowerProvider(n, p, kappa, phi, precision=precision, name=f"slope-{s}")


def zero_provider(n: int, p: int) -> TowerProvider:
    return TowerProvider(n, p, Fraction(1), lambda v, x: (Fraction(0),), name="zero")


# ---------------------------------------------------------------------------
# provider axioms


def check_A1(prov: TowerProvider, v: int, x: int, rng: random.Random, trials: int = 3) -> bool:
    """Right Iwahori invariance at a tower point."""
    from .local_arith import random_iwahori

    h, hp = prov.tower_point(v)
    base = prov.tower_value(v, x)
    for _ in range(trials):
        k = random_iwahori(prov.ring, prov.n + 1, 1, rng)
        kp = random_iwahori(prov.ring, prov.n, 1, rng)
        if prov.evaluate(h @ k, hp @ kp, x, v) != base:
            return False
    return True


def check_A2(prov: TowerProvider, v: int, x: int, rng: random.Random, trials: int = 3) -> bool:
    """``evaluate(j(g')h, g'h', x) = evaluate(h, h', det(g') x)``."""
    from .local_arith import random_iwahori

    h, hp = prov.tower_point(v)
    pi = prov.ring.uniformizer()
    for _ in range(trials):
        g = random_iwahori(prov.ring, prov.n, 1, rng)
        g = g @ LocalMatrix.diag(prov.ring, [pi ** rng.randint(-2, 2) for _ in range(prov.n)])
        lhs = prov.evaluate(g.embed() @ h, g @ hp, x, v)
        rhs = prov.tower_value(v, x * unit_residue(g.det(), v))
        if lhs != rhs:
            return False
    return True


def check_A3(prov: TowerProvider, v: int, x: int) -> bool:
    """``κ·P(h t^v, t'^v, x) = I · Σ_{u,w} P(h t^v u t, t'^v w t', x)``."""
    c = prov.ctx
    h, hp = prov.tower_point(v)
    t, tp = matrix_t(c), matrix_t_prime(c)
    total = None
    for u in unipotent_coset_reps(prov.ring, prov.n + 1):
        for w in unipotent_coset_reps(prov.ring, prov.n):
            val = prov.evaluate(h @ u @ t, hp @ w @ tp, x, v + 1)
            total = val if total is None else _add(total, val)
    return _scale(prov.tower_value(v, x), prov.kappa) == _scale(total, prov.index)


# ---------------------------------------------------------------------------
# distributions


def cells(p: int, v: int) -> list[int]:
    M = p**v
    if M == 1:
        return [0]
    return [x for x in range(M) if x % p]


def children(p: int, v: int, x: int) -> list[int]:
    """Level-(v+1) cells below ``x + p^v``."""
    if v == 0:
        return cells(p, 1)
    M = p**v
    return [x + a * M for a in range(p)]


@dataclass
class Distribution:
    p: int
    n: int
    kappa: Any
    v_max: int
    components: tuple
    values: dict = field(default_factory=dict)  # (v, x) -> tuple
    coeff: Any = QQ

    def __getitem__(self, key):
        return self.values[key]

    def total_mass(self, v: int) -> tuple:
        out = None
        for x in cells(self.p, v):
            out = self.values[(v, x)] if out is None else _add(out, self.values[(v, x)])
        return out

    def to_json(self) -> dict:
        def enc(a):
            return self.coeff.to_json(a)

        kv = None
        if self.kappa != 0:
            kv = str(valuation_in(self.coeff, self.kappa, self.p))
        return {
            "p": self.p,
            "n": self.n,
            "kappa": {"value": enc(self.kappa), "valuation": kv},
            "v_max": self.v_max,
            "components": [str(c) for c in self.components],
            "cells": [
                {"v": v, "rep": x, "value": [enc(a) for a in self.values[(v, x)]]}
                for (v, x) in sorted(self.values)
            ],
        }


def build_distribution(prov: TowerProvider, v_max: int, verify_axioms: bool = True) -> Distribution:
    """``μ̃(x + p^v) = κ^-v · P(h t^v, t'^v, x)`` for all cells with v <= v_max."""
    if prov.kappa == 0:
        raise ValueError("eigenvalue κ must be nonzero (finite slope)")
    if verify_axioms:
        for x in cells(prov.p, 1)[:2]:
            if not check_A3(prov, 1, x):
                raise ProviderAxiomError("provider violates the U_p-eigen summation identity at depth 1")
    d = Distribution(prov.p, prov.n, prov.kappa, v_max, prov.components, coeff=prov.coeff)
    kinv = 1 / prov.kappa if not isinstance(prov.kappa, int) else Fraction(1, prov.kappa)
    for v in range(0, v_max + 1):
        scale = kinv**v
        for x in cells(prov.p, v):
            d.values[(v, x)] = _scale(prov.tower_value(v, x), scale)
    return d


@dataclass
class RelationReport:
    ok: bool
    checked: int
    counterexample: tuple | None = None


def check_distribution_relation(d: Distribution, start: int = 1) -> RelationReport:
    """``μ(x + p^v) = Σ_a μ(x + a p^v + p^(v+1))`` for every cell with start <= v < v_max."""
    checked = 0
    for v in range(start, d.v_max):
        for x in cells(d.p, v):
            total = None
            for y in children(d.p, v, x):
                total = d.values[(v + 1, y)] if total is None else _add(total, d.values[(v + 1, y)])
            checked += 1
            if total != d.values[(v, x)]:
                return RelationReport(False, checked, (v, x))
    return RelationReport(True, checked)


@dataclass
class BoundednessReport:
    kind: str  # "measure" | "distribution"
    order: Fraction
    lattice_bound: Fraction | None
    per_depth_min: dict
    ok: bool
    attained: bool

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "order": str(self.order),
            "lattice_bound": None if self.lattice_bound is None else str(self.lattice_bound),
            "per_depth_min": {str(k): (None if v is None else str(v)) for k, v in self.per_depth_min.items()},
            "ok": self.ok,
            "attained": self.attained,
        }


def check_boundedness(d: Distribution, slope: Fraction, lattice_bound: Fraction | None = None) -> BoundednessReport:
    """Check ``min_x v(μ(x + p^v)) >= c - slope·v``.

    ``c`` (the lattice of the unnormalized symbol values) defaults to the
    minimal valuation of ``κ^v μ`` over the cells of depth >= 1.  ``attained`` reports
    whether the bound is reached at every depth v >= 1.
    """
    per: dict = {}
    symbol_min = None
    for v in range(0, d.v_max + 1):
        vals = []
        for x in cells(d.p, v):
            for a in d.values[(v, x)]:
                if a != 0:
                    vals.append(valuation_in(d.coeff, a, d.p))
        per[v] = min(vals) if vals else None
        if per[v] is not None and (v >= 1 or d.v_max == 0):
            sym = per[v] + v * valuation_in(d.coeff, d.kappa, d.p)
            symbol_min = sym if symbol_min is None else min(symbol_min, sym)
    if symbol_min is None:
        return BoundednessReport("measure", Fraction(0), None, per, True, True)
    c = symbol_min if lattice_bound is None else Fraction(lattice_bound)
    slope = Fraction(slope)
    ok = all(m is None or m >= c - slope * v for v, m in per.items() if v >= 1)
    attained = all(m is not None and m == c - slope * v for v, m in per.items() if v >= 1)
    kind = "measure" if slope == 0 else "distribution"
    return BoundednessReport(kind, slope, c, per, ok, attained)


def integrate_character(d: Distribution, chi: FiniteOrderCharacter, level: int | None = None, target: CyclotomicField | None = None):
    """``Σ_x χ(x) μ(x + p^level)`` per component, in ``target`` (default Q(ζ) over the coefficients)."""
    c = chi.conductor_exponent()
    if c > d.v_max:
        raise ValueError("conductor exceeds the depth of the distribution")
    lev = max(c, 1) if level is None else level
    if lev < c or lev > d.v_max:
        raise ValueError("evaluation level must lie between the conductor and the depth")
    prim = chi.primitive()
    K = target or prim.field(d.coeff)
    out = [K.zero() for _ in d.components]
    for x in cells(d.p, lev):
        cx = prim.value(x % prim.modulus if prim.modulus > 1 else 0, K)
        if cx.is_zero():
            continue
        for i, a in enumerate(d.values[(lev, x)]):
            if a != 0:
                out[i] = out[i] + cx * a
    return tuple(out)


# ---------------------------------------------------------------------------
# functional equation


def tower_involution(p: int, n: int, v: int, x: int) -> int:
    """``x^∨ = (-1)^n x^-1`` on (Z/p^v)^x."""
    M = p**v
    if M == 1:
        return 0
    return (-1) ** n * pow(x, -1, M) % M


def check_tower_involution(p: int, n: int, v_max: int) -> bool:
    """Involution, bijective on each level, compatible with the parent maps."""
    for v in range(0, v_max + 1):
        cs = cells(p, v)
        img = [tower_involution(p, n, v, x) for x in cs]
        if sorted(img) != cs:
            return False
        if any(tower_involution(p, n, v, y) != x for x, y in zip(cs, img)):
            return False
        if v >= 1:
            Mprev = p ** (v - 1)
            for x, y in zip(cs, img):
                if Mprev > 1 and tower_involution(p, n, v - 1, x % Mprev) != y % Mprev:
                    return False
    return True


def dual_provider(prov: TowerProvider, kappa_dual, component_map: Callable | None = None) -> TowerProvider:
    """Provider on the dual side: ``phi^∨(v, y) = (κ^∨/κ)^v phi(v, y^∨)``, components j -> -j.

    This is exactly dual by construction; ``involute`` then checks the
    cell-by-cell functional equation.
    """
    ratio = kappa_dual / prov.kappa
    comps = prov.components
    dual_comps = tuple(-c if isinstance(c, int) else c for c in comps)

    def phi(v, y):
        vals = prov.tower_value(v, tower_involution(prov.p, prov.n, v, y))
        if component_map is not None:
            vals = component_map(vals)
        return _scale(vals, ratio**v)

    return TowerProvider(prov.n, prov.p, kappa_dual, phi, dual_comps, prov.coeff, prov.ring.precision_N, prov.name + "-dual")


@dataclass
class InvolutionReport:
    ok: bool
    checked: int
    counterexample: tuple | None = None


def involute(d: Distribution, dual_d: Distribution, value_dual: Callable | None = None) -> InvolutionReport:
    """``ξ_j(μ(x))^∨ = ξ_{-j}(μ^∨(x^∨))`` on every cell of both distributions."""
    if d.v_max != dual_d.v_max:
        raise ValueError("depth mismatch")
    checked = 0
    for v in range(0, d.v_max + 1):
        for x in cells(d.p, v):
            y = tower_involution(d.p, d.n, v, x)
            lhs = d.values[(v, x)]
            if value_dual is not None:
                lhs = value_dual(lhs)
            rhs = dual_d.values[(v, y)]
            for i, j in enumerate(d.components):
                k = dual_d.components.index(-j) if isinstance(j, int) else i
                checked += 1
                if lhs[i] != rhs[k]:
                    return InvolutionReport(False, checked, (v, x, j))
    return InvolutionReport(True, checked)
