"""Eigen-symbols, p-stabilization and the tower provider for weight-k forms on Γ0(N)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Any

from ..characters import FiniteOrderCharacter, gauss_sum
from ..fields import CyclotomicField, root_field, valuation_in
from ..measure import TowerProvider
from .linalg import charpoly, kernel, rational_roots, rref
from .manin import ManinSymbolSpace, Matrix, act, build_space, hecke_action, moebius, monomial, u_p_action


def restrict(M: list[list], basis: list[list]) -> list[list]:
    """Matrix of M on the invariant subspace spanned by ``basis`` (columns = images)."""
    d = len(basis)
    if d == 0:
        return []
    n = len(basis[0])
    cols = []
    for b in basis:
        img = [sum((M[i][j] * b[j] for j in range(n)), Fraction(0)) for i in range(n)]
        # solve Σ c_t basis_t = img
        aug = [[basis[t][i] for t in range(d)] + [img[i]] for i in range(n)]
        R, piv = rref(aug, d + 1)
        if d in piv:
            raise ValueError("subspace is not invariant")
        c = [Fraction(0)] * d
        for row, pc in zip(R, piv):
            c[pc] = row[d]
        cols.append(c)
    return [list(r) for r in zip(*cols)]


def cuspidal_eigenvalues(space: ManinSymbolSpace, q: int) -> list[Fraction]:
    """Rational eigenvalues (with multiplicity) of T_q on the cuspidal subspace."""
    C = space.cuspidal_basis()
    if not C:
        return []
    return rational_roots(charpoly(restrict(hecke_action(space, q), C)))


@dataclass
class EigenSymbol:
    """Hecke-eigen functional on modular symbols, primitive integral on Manin generators."""

    space: ManinSymbolSpace
    sign: int
    eigenvalues: dict
    gen_values: list  # value on each Manin generator

    @property
    def level(self) -> int:
        return self.space.N

    @property
    def weight(self) -> int:
        return self.space.k

    def value(self, P: list, alpha, beta):
        """``φ(P{α, β})``; cusps in Q, None for ∞."""
        out = Fraction(0)
        for gi, x in self.space.symbol_terms(P, alpha, beta):
            if self.gen_values[gi]:
                out += x * self.gen_values[gi]
        return out

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "weight": self.weight,
            "sign": self.sign,
            "eigenvalues": {str(q): str(a) for q, a in sorted(self.eigenvalues.items())},
            "generator_values": [str(x) for x in self.gen_values],
        }


def eigen_symbol(space: ManinSymbolSpace, sign: int, eigenvalues: dict) -> EigenSymbol:
    """Left eigenvector for the given T_q eigenvalues and star eigenvalue ``sign``."""
    if sign not in (1, -1):
        raise ValueError("sign must be ±1")
    d = space.dim
    rows: list[list[Fraction]] = []
    ops = [(hecke_action(space, q), Fraction(a)) for q, a in eigenvalues.items()]
    ops.append((space.star(), Fraction(sign)))
    for M, a in ops:
        # φ M = a φ  <=>  (M^T - a) φ^T = 0
        for j in range(d):
            rows.append([M[i][j] - (a if i == j else 0) for i in range(d)])
    ker = kernel(rows, d)
    if len(ker) != 1:
        raise ValueError(f"eigenspace has dimension {len(ker)}, expected 1")
    phi = ker[0]
    vals = [sum((phi[t] * space.proj[g][t] for t in range(d)), Fraction(0)) for g in range(space.ngens)]
    den = 1
    for x in vals:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in vals]
    g = 0
    for x in ints:
        g = gcd(g, x)
    vals = [Fraction(x, g) for x in ints]
    return EigenSymbol(space, sign, dict(eigenvalues), vals)


def hecke_eigenvalue(es: EigenSymbol, q: int):
    """``a_q`` read off from the functional: φ(T_q x) / φ(x) at a generator with φ(x) ≠ 0."""
    if q in es.eigenvalues:
        return Fraction(es.eigenvalues[q])
    sp = es.space
    for b in range(sp.dim):
        gi = sp.free[b]
        if es.gen_values[gi]:
            base = es.gen_values[gi]
            total = Fraction(0)
            for g in sp.hecke_matrices(q):
                P, a0, a1 = sp.transform(g, b)
                total += es.value(P, a0, a1)
            return total / base
    raise ValueError("zero functional")


# ---------------------------------------------------------------------------
# stabilization


@dataclass
class StabilizedSymbol:
    """``φ_α(x) = φ(x) - α^-1 φ(diag(p,1)·x)``: U_p-eigen with eigenvalue α at level Np."""

    base: EigenSymbol
    p: int
    alpha: Any
    coeff: Any  # field containing α
    a_p: Fraction
    other_root: Any

    @property
    def sign(self) -> int:
        return self.base.sign

    @property
    def slope(self) -> Fraction:
        return valuation_in(self.coeff, self.alpha, self.p)

    @property
    def ordinary(self) -> bool:
        return self.slope == 0

    def value(self, P: list, alpha, beta):
        delta = (self.p, 0, 0, 1)
        scale = lambda r: None if r is None else self.p * Fraction(r)
        main = self.base.value(P, alpha, beta)
        corr = self.base.value(act(delta, P), scale(alpha), scale(beta))
        return main - corr / self.alpha

    def cell_value(self, v: int, x: int, P0: list):
        """``φ_α(g·(P0{0, ∞}))`` with ``g = [[1, x], [0, p^v]]``, i.e. the path {x/p^v → ∞}."""
        g: Matrix = (1, x, 0, self.p**v)
        return self.value(act(g, P0), Fraction(x, self.p**v), None)


def stabilize(es: EigenSymbol, p: int, root: str = "unit") -> StabilizedSymbol:
    """Choose a root α of ``X^2 - a_p X + p^(k-1)``: the minimal-slope one for ``root='unit'``."""
    if es.level % p == 0:
        raise ValueError("p must not divide the level")
    a_p = hecke_eigenvalue(es, p)
    fld, (r1, r2) = root_field(a_p, Fraction(p) ** (es.weight - 1))
    v1, v2 = valuation_in(fld, r1, p), valuation_in(fld, r2, p)
    lo, hi = (r1, r2) if v1 <= v2 else (r2, r1)
    if root == "unit":
        alpha, other = lo, hi
    elif root == "other":
        alpha, other = hi, lo
    else:
        raise ValueError("root must be 'unit' or 'other'")
    return StabilizedSymbol(es, p, alpha, fld, a_p, other)


@dataclass
class UpCheck:
    well_defined: bool
    eigen: bool
    dim: int


def check_u_p(st: StabilizedSymbol, space_Np: ManinSymbolSpace | None = None) -> UpCheck:
    """φ_α descends to the level-Np Manin quotient and satisfies φ_α U_p = α φ_α there."""
    sp = space_Np or build_space(st.base.level * st.p, st.base.weight)
    w = sp.w
    gen_vals = []
    for gi in range(sp.ngens):
        idx, i = divmod(gi, w + 1)
        h = sp.p1.lift(idx)
        gen_vals.append(st.value(act(h, monomial(i, w)), moebius(h, Fraction(0)), moebius(h, None)))
    f = [gen_vals[sp.free[b]] for b in range(sp.dim)]
    zero = st.alpha * 0
    well = True
    for gi in range(sp.ngens):
        s = zero
        for t in range(sp.dim):
            if sp.proj[gi][t]:
                s = s + f[t] * sp.proj[gi][t]
        if s != gen_vals[gi]:
            well = False
            break
    U = u_p_action(sp, st.p)
    eig = True
    for j in range(sp.dim):
        s = zero
        for i in range(sp.dim):
            if U[i][j]:
                s = s + f[i] * U[i][j]
        if s != st.alpha * f[j]:
            eig = False
            break
    return UpCheck(well, eig, sp.dim)


# ---------------------------------------------------------------------------
# provider and L-values


def critical_js(k: int) -> list[int]:
    return list(range(0, k - 1))


def provider(st: StabilizedSymbol, js: list[int] | None = None, precision: int = 30) -> TowerProvider:
    """Tower provider: component j at (v, x) is ``φ_α({x/p^v → ∞}) ⊗ X^j Y^(k-2-j)``.

    The distribution is ``α^-v`` times these values; A3 is the U_p-sum over a mod p.
    """
    w = st.base.weight - 2
    js = critical_js(st.base.weight) if js is None else js
    P0s = [monomial(j, w) for j in js]

    def phi(v, x):
        return tuple(st.cell_value(v, x, P0) for P0 in P0s)

    return TowerProvider(1, st.p, st.alpha, phi, components=js, coeff=st.coeff, precision=precision, name="gl2")


def birch_sum(es: EigenSymbol, chi: FiniteOrderCharacter, j: int, target: CyclotomicField):
    """``Σ_{a mod f} χ(a) φ(g_a·(P_j{0,∞}))`` for χ primitive of conductor f = p^v."""
    w = es.weight - 2
    f = chi.modulus
    P0 = monomial(j, w)
    total = target.zero()
    if f == 1:
        return target(es.value(P0, Fraction(0), None))
    for a in range(f):
        if gcd(a, f) != 1:
            continue
        val = es.value(act((1, a, 0, f), P0), Fraction(a, f), None)
        if val:
            total = total + chi.value(a, target) * val
    return total


def algebraic_L(es: EigenSymbol, chi: FiniteOrderCharacter, j: int, target: CyclotomicField | None = None):
    """Algebraic part of L(f, χ, j+1) relative to the implicit period: ``B(χ̄) / G(χ̄)``."""
    prim = chi.primitive()
    K = target or prim.field()
    cb = prim.conj()
    return birch_sum(es, cb, j, K) / gauss_sum(cb, K)


# ---------------------------------------------------------------------------
# fixtures


def newform_11a(sign: int = 1) -> EigenSymbol:
    """The weight-2 newform of level 11 (T_2 = -2)."""
    return eigen_symbol(build_space(11, 2), sign, {2: -2})


def delta_symbol(sign: int = 1) -> EigenSymbol:
    """Δ of level 1, weight 12 (T_2 = -24)."""
    return eigen_symbol(build_space(1, 12), sign, {2: -24})
