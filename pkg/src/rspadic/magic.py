"""Structural matrices of the tower and the constructive Iwahori factorization.

Notation: ``t = diag(ϖ^n, ..., ϖ, 1)`` in GL(n+1), ``t' = diag(ϖ^n, ..., ϖ)``
in GL(n), ``h`` the magic matrix (antidiagonal block, all-ones last column).
``H_v = t^-v h t^v``.  The factorization finds ``k' ∈ K'(m)``, ``k ∈ K(m)`` with

    t^-1 j(w)^-1 H_v u t = j(k') H_{v+1} k.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator

from .local_arith import (
    LocalElem,
    LocalMatrix,
    LocalRingDesc,
    PrecisionError,
    invert,
    iwahori_member,
    random_upper_unipotent,
)

DEFAULT_MAX_ENUM = 10**6


class EnumerationGuardError(ValueError):
    pass


class FactorizationError(RuntimeError):
    """The factorization solver failed; this indicates a bug, not bad input."""


def max_enum() -> int:
    return int(os.environ.get("RM_MAX_ENUM", DEFAULT_MAX_ENUM))


@dataclass(frozen=True)
class MagicContext:
    n: int
    ring: LocalRingDesc
    m: int = 1
    v: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("rank n must be >= 1")
        if self.m < 1:
            raise ValueError("Iwahori level m must be >= 1")
        if self.v < 0:
            raise ValueError("tower depth v must be >= 0")

    def at_depth(self, v: int) -> "MagicContext":
        return MagicContext(self.n, self.ring, self.m, v)


def _pi_powers(ring: LocalRingDesc, exps) -> list[LocalElem]:
    pi = ring.uniformizer()
    return [pi**e for e in exps]


def matrix_t(ctx: MagicContext, power: int = 1) -> LocalMatrix:
    n = ctx.n
    return LocalMatrix.diag(ctx.ring, _pi_powers(ctx.ring, [power * (n - i) for i in range(n + 1)]))


def matrix_t_prime(ctx: MagicContext, power: int = 1) -> LocalMatrix:
    n = ctx.n
    return LocalMatrix.diag(ctx.ring, _pi_powers(ctx.ring, [power * (n - i) for i in range(n)]))


def matrix_a_prime(ctx: MagicContext) -> LocalMatrix:
    n = ctx.n
    return LocalMatrix.diag(ctx.ring, _pi_powers(ctx.ring, [-(n - i) for i in range(n)]))


def matrix_a(ctx: MagicContext) -> LocalMatrix:
    return matrix_a_prime(ctx).embed()


def longest_weyl(ring: LocalRingDesc, n: int) -> LocalMatrix:
    return LocalMatrix(ring, [[1 if i + j == n - 1 else 0 for j in range(n)] for i in range(n)])


def matrix_h1(ctx: MagicContext) -> LocalMatrix:
    n = ctx.n
    rows = []
    for i in range(n):
        rows.append([1 if i + j == n - 1 else 0 for j in range(n)] + [1])
    rows.append([0] * n + [1])
    return LocalMatrix(ctx.ring, rows)


def matrix_h(ctx: MagicContext, f_valuation: int = 0) -> LocalMatrix:
    """``t_f^-1 h t_f`` for the conductor generator ``f = ϖ^f_valuation``."""
    if f_valuation < 0:
        raise ValueError("f_valuation must be >= 0")
    h = matrix_h1(ctx)
    if f_valuation == 0:
        return h
    return matrix_t(ctx, -f_valuation) @ h @ matrix_t(ctx, f_valuation)


# ---------------------------------------------------------------------------
# linear congruences over the DVR


def _solve_affine_lattice(C: list[list[LocalElem]], D: list[LocalElem], r: int, ring: LocalRingDesc):
    """Solve ``C z + D ∈ O^R`` for ``z ∈ O^r``.

    Returns ``(z0, basis)`` with the solution set ``z0 + Σ O·basis_k``, or
    None when infeasible.  Uses Smith-form elimination with unimodular row
    and column operations.
    """
    R = len(C)
    a = [list(row) + [d] for row, d in zip(C, D)]  # augmented with D
    cols = [[ring.one() if i == j else ring.zero() for j in range(r)] for i in range(r)]  # z = cols · w
    diag: list[LocalElem | None] = []
    row0 = 0
    for c in range(r):
        # pick minimal-valuation pivot in the remaining block
        best = None
        for i in range(row0, R):
            for j in range(c, r):
                e = a[i][j]
                if e.unit is None:
                    continue
                if best is None or e.val < best[0]:
                    best = (e.val, i, j)
        if best is None:
            for i in range(row0, R):
                for j in range(c, r):
                    if not a[i][j].val_at_least(0):
                        raise PrecisionError("coefficient indistinguishable from zero below integrality")
            diag.extend([None] * (r - c))
            break
        _, pi, pj = best
        a[row0], a[pi] = a[pi], a[row0]
        if pj != c:
            for row in a:
                row[c], row[pj] = row[pj], row[c]
            for row in cols:
                row[c], row[pj] = row[pj], row[c]
        piv = a[row0][c]
        inv = piv.inverse()
        for i in range(R):
            if i != row0 and not a[i][c].is_exact_zero():
                fct = a[i][c] * inv  # integral: pivot has minimal valuation
                a[i] = [x - fct * y for x, y in zip(a[i], a[row0])]
        for j in range(c + 1, r):
            if not a[row0][j].is_exact_zero():
                fct = a[row0][j] * inv
                for row in a:
                    row[j] = row[j] - fct * row[c]
                for row in cols:
                    row[j] = row[j] - fct * row[c]
        diag.append(piv)
        row0 += 1
    w0 = []
    lattice_scale = []
    for k in range(r):
        s = diag[k]
        if s is None:
            w0.append(ring.zero())
            lattice_scale.append(0)
            continue
        d = a[k][r]
        if s.val >= 0:
            if not d.val_at_least(0):
                return None
            w0.append(ring.zero())
            lattice_scale.append(0)
        else:
            wk = -(d / s)
            if not wk.val_at_least(0):
                return None
            w0.append(wk)
            lattice_scale.append(-s.val)
    for i in range(row0, R):
        if not a[i][r].val_at_least(0):
            return None
    pi = ring.uniformizer()
    z0 = [sum((cols[i][k] * w0[k] for k in range(r)), ring.zero()) for i in range(r)]
    basis = []
    for k in range(r):
        sc = pi ** lattice_scale[k]
        basis.append([cols[i][k] * sc for i in range(r)])
    return z0, basis


def solve_iwahori_pair(A: LocalMatrix, B: LocalMatrix, m: int) -> tuple[LocalMatrix, LocalMatrix]:
    """Find ``y ∈ K'(m)`` with ``A·j(y)·B ∈ K(m)``; returns ``(y, A·j(y)·B)``.

    Raises FactorizationError if no solution exists.
    """
    ring = A.ring
    N1 = A.rows
    n = N1 - 1
    pi = ring.uniformizer()
    ey = [[m if a > b else 0 for b in range(n)] for a in range(n)]
    ek = [[m if i > j else 0 for j in range(N1)] for i in range(N1)]
    unknowns = [(a, b) for a in range(n) for b in range(n)]
    C, D = [], []
    for i in range(N1):
        for j in range(N1):
            scale = pi ** (-ek[i][j])
            row = []
            for a, b in unknowns:
                coef = A[i, a] * B[b, j]
                if ey[a][b]:
                    coef = coef * pi ** ey[a][b]
                row.append(coef * scale)
            C.append(row)
            D.append(A[i, n] * B[n, j] * scale)
    sol = _solve_affine_lattice(C, D, len(unknowns), ring)
    if sol is None:
        raise FactorizationError("no integral solution of the Iwahori congruences")
    z0, basis = sol
    reps = ring.residue_reps()
    r = len(unknowns)
    for coeffs in _by_weight(len(reps), r):
        z = list(z0)
        for k, ci in enumerate(coeffs):
            if ci:
                c = reps[ci]
                z = [zi + c * bk for zi, bk in zip(z, basis[k])]
        y = LocalMatrix(
            ring,
            [[z[a * n + b] * (pi ** ey[a][b]) if ey[a][b] else z[a * n + b] for b in range(n)] for a in range(n)],
        )
        if not all(y[i, i].is_unit() for i in range(n)):
            continue
        k = A @ y.embed() @ B
        if iwahori_member(y, m, strict=False) and iwahori_member(k, m, strict=False):
            return y, k
    raise FactorizationError("no unit solution found in the solution lattice")


def _by_weight(size: int, r: int) -> Iterator[tuple[int, ...]]:
    """All tuples in range(size)^r, lazily, by increasing number of nonzero entries."""
    for weight in range(r + 1):
        for support in combinations(range(r), weight):
            for vals in product(range(1, size), repeat=weight):
                t = [0] * r
                for pos, x in zip(support, vals):
                    t[pos] = x
                yield tuple(t)


# ---------------------------------------------------------------------------
# the factorization lemma


@dataclass(frozen=True)
class MagicFactorization:
    k: LocalMatrix
    k_prime: LocalMatrix
    lhs: LocalMatrix
    rhs: LocalMatrix

    @property
    def identity_ok(self) -> bool:
        return self.lhs.equals(self.rhs)


def _lhs(ctx: MagicContext, u: LocalMatrix, w: LocalMatrix) -> LocalMatrix:
    v = ctx.v
    Hv = matrix_t(ctx, -v) @ matrix_h1(ctx) @ matrix_t(ctx, v)
    return matrix_t(ctx, -1) @ invert(w).embed() @ Hv @ u @ matrix_t(ctx, 1)


def magic_factor(ctx: MagicContext, u: LocalMatrix, w: LocalMatrix) -> MagicFactorization:
    n = ctx.n
    if u.rows != n + 1 or w.rows != n:
        raise ValueError("u must be (n+1)x(n+1) and w n x n")
    M = _lhs(ctx, u, w)
    Hv1 = matrix_t(ctx, -(ctx.v + 1)) @ matrix_h1(ctx) @ matrix_t(ctx, ctx.v + 1)
    y, k = solve_iwahori_pair(invert(Hv1), M, ctx.m)
    k_prime = invert(y)
    rhs = k_prime.embed() @ Hv1 @ k
    return MagicFactorization(k=k, k_prime=k_prime, lhs=M, rhs=rhs)


def det_congruence_ok(ctx: MagicContext, fac: MagicFactorization) -> bool:
    d = fac.k.det() * fac.k_prime.det() - 1
    return d.val_at_least(ctx.v + 1)


# ---------------------------------------------------------------------------
# coset representatives U(O)/t U(O) t^-1


def unipotent_cells(size: int) -> list[tuple[int, int]]:
    """Above-diagonal positions (i, j) of a size x size matrix."""
    return [(i, j) for i in range(size) for j in range(i + 1, size)]


def unipotent_coset_count(q: int, size: int) -> int:
    return q ** sum(j - i for i, j in unipotent_cells(size))


def unipotent_coset_reps(ring: LocalRingDesc, size: int) -> Iterator[LocalMatrix]:
    """Representatives of U(O)/tU(O)t^-1: entry (i, j) runs over O mod ϖ^(j-i)."""
    cells = unipotent_cells(size)
    total = unipotent_coset_count(ring.q, size)
    if total > max_enum():
        raise EnumerationGuardError(f"{total} coset representatives exceed the guard {max_enum()}")
    digit_reps = ring.residue_reps()
    pi = ring.uniformizer()
    choices = []
    for i, j in cells:
        opts = []
        for ds in product(range(len(digit_reps)), repeat=j - i):
            x = ring.zero()
            for k, d in enumerate(ds):
                if d:
                    x = x + digit_reps[d] * pi**k
            opts.append(x)
        choices.append(opts)
    for combo in product(*choices):
        rows = [[ring.one() if a == b else ring.zero() for b in range(size)] for a in range(size)]
        for (i, j), x in zip(cells, combo):
            rows[i][j] = x
        yield LocalMatrix(ring, rows)


def det_map_image(ctx: MagicContext) -> dict[tuple, int]:
    """Multiset of det(k_{u,w}) in (1+ϖ^v)/(1+ϖ^(v+1)), over all coset pairs.

    Keys are residue tuples ``a`` encoding the class of ``1 + a ϖ^v``.
    """
    q, n = ctx.ring.q, ctx.n
    total = unipotent_coset_count(q, n + 1) * unipotent_coset_count(q, n)
    if total > max_enum():
        raise EnumerationGuardError(f"{total} coset pairs exceed the guard {max_enum()}")
    image: dict[tuple, int] = {}
    pv = ctx.ring.uniformizer() ** ctx.v
    ws = list(unipotent_coset_reps(ctx.ring, n))
    for u in unipotent_coset_reps(ctx.ring, n + 1):
        for w in ws:
            fac = magic_factor(ctx, u, w)
            d = fac.k.det()
            diff = d - 1
            if not diff.val_at_least(ctx.v):
                raise FactorizationError("det(k) not in 1 + (ϖ^v)")
            key = (diff / pv).residue()
            image[key] = image.get(key, 0) + 1
    return image


def random_pair(ctx: MagicContext, rng: random.Random) -> tuple[LocalMatrix, LocalMatrix]:
    return random_upper_unipotent(ctx.ring, ctx.n + 1, rng), random_upper_unipotent(ctx.ring, ctx.n, rng)
