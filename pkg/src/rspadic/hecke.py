"""Iwahori double cosets, Hecke polynomials and slope bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Any, Callable, Mapping, Sequence

from .local_arith import LocalMatrix, PrecisionError, _vp, invert, iwahori_member
from .magic import (
    MagicContext,
    matrix_t,
    matrix_t_prime,
    unipotent_coset_count,
    unipotent_coset_reps,
)
from .weights import WeightPair


@dataclass(frozen=True)
class DoubleCoset:
    """``K core K = ⊔ reps[i] K`` at Iwahori level m."""

    level: int
    core: LocalMatrix
    reps: tuple[LocalMatrix, ...]

    def __len__(self):
        return len(self.reps)


def index_formula(q: int, size: int) -> int:
    """``(U(O) : t U(O) t^-1)`` for the size x size unipotent group."""
    return unipotent_coset_count(q, size)


def decompose_V(ctx: MagicContext) -> DoubleCoset:
    t = matrix_t(ctx)
    reps = tuple(u @ t for u in unipotent_coset_reps(ctx.ring, ctx.n + 1))
    return DoubleCoset(ctx.m, t, reps)


def decompose_V_prime(ctx: MagicContext) -> DoubleCoset:
    t = matrix_t_prime(ctx)
    reps = tuple(u @ t for u in unipotent_coset_reps(ctx.ring, ctx.n))
    return DoubleCoset(ctx.m, t, reps)


def same_right_coset(g: LocalMatrix, h: LocalMatrix, m: int) -> bool:
    return iwahori_member(invert(g) @ h, m, strict=False)


def locate(dc: DoubleCoset, g: LocalMatrix) -> list[int]:
    """Indices i with ``g ∈ reps[i] K``; a single index for g in the double coset."""
    return [i for i, r in enumerate(dc.reps) if same_right_coset(r, g, dc.level)]


def check_disjoint(dc: DoubleCoset) -> bool:
    reps = dc.reps
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if same_right_coset(reps[i], reps[j], dc.level):
                return False
    return True


# ---------------------------------------------------------------------------
# operators on a toy module of functions on G / GL_n(O)


def lattice_key(g: LocalMatrix) -> tuple:
    """Canonical form of the lattice ``g O^n`` (reduced column Hermite form over O).

    Two matrices give the same key iff their column lattices agree, so the
    key is a function on ``G / GL_n(O)``.
    """
    ring = g.ring
    n = g.rows
    cols = [[g[i, j] for i in range(n)] for j in range(n)]
    pivots: dict[int, list] = {}
    pi = ring.uniformizer()
    for row in range(n - 1, -1, -1):
        live = [c for c in range(len(cols)) if cols[c][row].unit is not None]
        if not live:
            raise PrecisionError("singular matrix to working precision")
        best = min(live, key=lambda c: cols[c][row].val)
        piv = cols.pop(best)
        unit = piv[row] / pi ** piv[row].val
        piv = [x / unit for x in piv]
        for c in range(len(cols)):
            e = cols[c][row]
            if not e.is_exact_zero():
                fct = e / piv[row]
                cols[c] = [x - fct * y for x, y in zip(cols[c], piv)]
        pivots[row] = piv
    key = []
    for k in range(n):
        col = list(pivots[k])
        rems = []
        for r in range(k - 1, -1, -1):
            d = pivots[r][r].val
            rem = _truncate(col[r], d)
            c = (col[r] - rem) / pi**d
            col = [x - c * y for x, y in zip(col, pivots[r])]
            rems.append(_exact_key(rem))
        key.append((pivots[k][k].val, tuple(reversed(rems))))
    return tuple(key)


def _truncate(x, d: int):
    """The ϖ-adic expansion of x with all terms of degree >= d dropped."""
    if x.is_exact_zero() or (x.unit is None and x.val >= d):
        return x.ring.zero()
    if x.absprec < d:
        raise PrecisionError("entry not known to the precision needed for reduction")
    if x.val >= d:
        return x.ring.zero()
    return x._capped(d).with_precision(d - x.val)


def _exact_key(x) -> tuple:
    if x.unit is None:
        return ()
    return (x.val, x.unit)


def apply_operator(dc: DoubleCoset, f: Callable[[LocalMatrix], Any], g: LocalMatrix):
    """``(T f)(g) = Σ_i f(g · reps[i])``."""
    vals = [f(g @ r) for r in dc.reps]
    total = vals[0]
    for v in vals[1:]:
        total = total + v
    return total


def apply_tensor(
    V: DoubleCoset,
    Vp: DoubleCoset,
    F: Callable[[LocalMatrix, LocalMatrix], Any],
    g: LocalMatrix,
    h: LocalMatrix,
    order: str = "V-first",
) -> list:
    """Multiset (sorted list) of summands of ``(V ⊗ V') F`` at (g, h) in either order."""
    terms = []
    if order == "V-first":
        for r in V.reps:
            for s in Vp.reps:
                terms.append(F(g @ r, h @ s))
    else:
        for s in Vp.reps:
            for r in V.reps:
                terms.append(F(g @ r, h @ s))
    return sorted(terms, key=repr)


# ---------------------------------------------------------------------------
# Hecke polynomial


@dataclass(frozen=True)
class HeckePolynomial:
    """``Σ_ν (-1)^ν q^((ν-1)ν/2) T_ν X^(n+1-ν)``, stored as ν -> scalar factor."""

    n: int
    q: int
    coeffs: tuple[int | Fraction, ...]

    def degree_of(self, nu: int) -> int:
        return self.n + 1 - nu

    def specialize(self, T: Mapping[int, Any]) -> list:
        """Coefficients (ν = 0..n+1, i.e. descending powers of X) at scalar T values; T_0 = 1."""
        out = []
        for nu, c in enumerate(self.coeffs):
            t = 1 if nu == 0 else T[nu]
            out.append(c * t)
        return out

    def evaluate(self, T: Mapping[int, Any], X):
        total = 0
        for nu, c in enumerate(self.specialize(T)):
            total = total + c * X ** (self.n + 1 - nu)
        return total

    def __str__(self):
        parts = []
        for nu, c in enumerate(self.coeffs):
            mono = "X" if self.n + 1 - nu == 1 else ("" if nu == self.n + 1 else f"X^{self.n + 1 - nu}")
            tname = "" if nu == 0 else f"T{nu}"
            body = "*".join(x for x in (str(abs(c)) if abs(c) != 1 else "", tname, mono) if x) or "1"
            parts.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else s


def hecke_polynomial(n: int, q: int) -> HeckePolynomial:
    if n < 1:
        raise ValueError("n must be >= 1")
    coeffs = []
    for nu in range(n + 2):
        e = (nu - 1) * nu // 2
        coeffs.append((-1) ** nu * q**e)
    return HeckePolynomial(n, q, tuple(coeffs))


def elementary_symmetric(roots: Sequence, k: int):
    """e_k of the roots (e_0 = 1)."""
    coeffs = [1]
    for r in roots:
        new = coeffs + [0]
        for i in range(len(coeffs), 0, -1):
            new[i] = new[i] + coeffs[i - 1] * r
        coeffs = new
    return coeffs[k]


def T_from_roots(roots: Sequence, q: int) -> dict[int, Any]:
    """Scalar T_ν making ``∏(X - λ)`` the specialized Hecke polynomial."""
    out = {}
    for nu in range(1, len(roots) + 1):
        out[nu] = elementary_symmetric(roots, nu) / Fraction(q) ** ((nu - 1) * nu // 2)
    return out


# ---------------------------------------------------------------------------
# slope data


def fraction_valuation(p: int) -> Callable[[Any], Fraction]:
    def v(x) -> Fraction:
        x = Fraction(x)
        if x == 0:
            raise ValueError("valuation of zero")
        return Fraction(_vp(x.numerator, p) - _vp(x.denominator, p))

    return v


@dataclass(frozen=True)
class SlopeDatum:
    """Hecke roots λ_1..λ_n (for GL(n+1)) and λ'_1..λ'_n (for GL(n)) at one place.

    ``valuation`` is the normalized p-adic valuation on the coefficient
    field; defaults to the valuation of rationals.
    """

    p: int
    q: int
    roots: tuple
    roots_prime: tuple
    valuation: Callable[[Any], Fraction] | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.roots) != len(self.roots_prime):
            raise ValueError("need n roots on each group")
        if self.valuation is None:
            object.__setattr__(self, "valuation", fraction_valuation(self.p))

    @property
    def n(self) -> int:
        return len(self.roots)

    def is_nonvanishing(self) -> bool:
        return all(r != 0 for r in self.roots) and all(r != 0 for r in self.roots_prime)


def kappa_exponent(n: int) -> int:
    return -((n + 1) * n * (n - 1) // 3)


def kappa(datum: SlopeDatum):
    n, q = datum.n, datum.q
    lam = prod((datum.roots[i] ** (n - i) for i in range(n)), start=1)
    lamp = prod((datum.roots_prime[i] ** (n - i) for i in range(n)), start=1)
    return Fraction(q) ** kappa_exponent(n) * lam * lamp


def eta(roots_prime: Sequence, q: int):
    n = len(roots_prime)
    return Fraction(q) ** (-(n * (n - 1) // 2)) * prod(roots_prime, start=1)


def eta_check(datum: SlopeDatum, central_scalar) -> bool:
    """Whether T'_n acts by η_n = q^(-n(n-1)/2) ∏ λ'_ν."""
    return eta(datum.roots_prime, datum.q) == central_scalar


def dual_roots(roots: Sequence, q: int, rank: int) -> tuple:
    """Hecke roots of the dual vector: ``λ^∨_{n+1-i} = q^(rank-1) / λ_i``.

    ``rank`` is the size of the general linear group carrying the roots.
    """
    scale = Fraction(q) ** (rank - 1)
    return tuple(scale / r if isinstance(r, (int, Fraction)) else r.inverse() * scale for r in reversed(roots))


def weight_at_a(pair: WeightPair, embeddings: Sequence[str] | None = None) -> Fraction:
    """``v(μ(a) ν(a'))`` with ``a' = diag(ϖ^-n, ..., ϖ^-1)``, ``a = j(a')``."""
    n = pair.n
    labels = list(embeddings) if embeddings is not None else list(pair.field.embeddings)
    total = 0
    for k in labels:
        mu, nu = pair.mu[k], pair.nu[k]
        total += sum(-(n - i) * mu[i] for i in range(n))  # last entry of a is 1
        total += sum(-(n - i) * nu[i] for i in range(n))
    return Fraction(total)


@dataclass(frozen=True)
class Classification:
    kind: str  # "not-finite-slope" | "finite-slope" | "ordinary"
    slope: Fraction | None

    def to_json(self) -> dict:
        return {"kind": self.kind, "slope": None if self.slope is None else str(self.slope)}


def classify(datum: SlopeDatum, pair: WeightPair, embeddings: Sequence[str] | None = None) -> Classification:
    if not datum.is_nonvanishing():
        return Classification("not-finite-slope", None)
    s = datum.valuation(kappa(datum)) - weight_at_a(pair, embeddings)
    return Classification("ordinary" if s == 0 else "finite-slope", s)


def hida_factor(ctx: MagicContext, pair: WeightPair) -> Fraction:
    """``v(μ(t) ν(t'))``: valuation of Hida's normalizing scalar for U_p."""
    n = pair.n
    total = 0
    for k in pair.field.embeddings:
        mu, nu = pair.mu[k], pair.nu[k]
        total += sum((n - i) * mu[i] for i in range(n + 1))
        total += sum((n - i) * nu[i] for i in range(n))
    return Fraction(total)


def projection_factors(n: int, q: int, roots: Sequence, roots_prime: Sequence) -> list[tuple[str, Any, int]]:
    """Factors of the projection Π⁰ as ("pi"|"sigma", λ_i q^(1-j), j) meaning ``c T_{j-1} - T_j``."""
    out = []
    for i in range(n):
        for j in range(1, n + 2):
            if j != i + 1:
                out.append(("pi", roots[i] * Fraction(q) ** (1 - j), j))
    for i in range(n - 1):
        for j in range(1, n + 1):
            if j != i + 1:
                out.append(("sigma", roots_prime[i] * Fraction(q) ** (1 - j), j))
    return out
