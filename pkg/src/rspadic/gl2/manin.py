"""Weight-k Manin symbols for Γ0(N) with exact rational coefficients.

A Manin symbol ``[P, (c:d)]`` stands for ``g·(P{0, ∞})`` with g in SL2(Z)
of bottom row (c, d).  Matrices act on homogeneous polynomials of degree
k-2 by ``(g·P)(X, Y) = P(dX - bY, -cX + aY)``, on cusps by Möbius
transformations, and on symbols diagonally.  Polynomials are coefficient
lists indexed by i for the monomial ``X^i Y^(k-2-i)``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, gcd

from .linalg import kernel, rank, rref

Matrix = tuple[int, int, int, int]  # (a, b, c, d)

S: Matrix = (0, -1, 1, 0)
T: Matrix = (0, -1, 1, -1)
ETA: Matrix = (-1, 0, 0, 1)


def mat_mul(g: Matrix, h: Matrix) -> Matrix:
    a, b, c, d = g
    e, f, x, y = h
    return (a * e + b * x, a * f + b * y, c * e + d * x, c * f + d * y)


def mat_adj(g: Matrix) -> Matrix:
    a, b, c, d = g
    return (d, -b, -c, a)


def moebius(g: Matrix, r):
    """Action on P^1(Q); ``None`` is ∞."""
    a, b, c, d = g
    if r is None:
        return None if c == 0 else Fraction(a, c)
    num, den = a * r + b, c * r + d
    return None if den == 0 else Fraction(num) / den


# ---------------------------------------------------------------------------
# polynomials


@lru_cache(maxsize=None)
def _act_matrix(g: Matrix, w: int) -> tuple[tuple[int, ...], ...]:
    """Column i = coefficients of g·(X^i Y^(w-i)) = (dX - bY)^i (-cX + aY)^(w-i)."""
    a, b, c, d = g
    cols = []
    for i in range(w + 1):
        # (dX - bY)^i
        p1 = [comb(i, s) * d**s * (-b) ** (i - s) for s in range(i + 1)]  # coefficient of X^s Y^(i-s)
        p2 = [comb(w - i, s) * (-c) ** s * a ** (w - i - s) for s in range(w - i + 1)]
        out = [0] * (w + 1)
        for s1, x1 in enumerate(p1):
            if x1:
                for s2, x2 in enumerate(p2):
                    if x2:
                        out[s1 + s2] += x1 * x2
        cols.append(tuple(out))
    return tuple(cols)


def act(g: Matrix, P: list) -> list:
    w = len(P) - 1
    M = _act_matrix(g, w)
    out = [0] * (w + 1)
    for i, pi in enumerate(P):
        if pi:
            col = M[i]
            for j in range(w + 1):
                if col[j]:
                    out[j] += pi * col[j]
    return out


def monomial(i: int, w: int) -> list:
    P = [0] * (w + 1)
    P[i] = 1
    return P


# ---------------------------------------------------------------------------
# P^1(Z/N)


class P1:
    """P^1(Z/N) with canonical representatives (minimal under unit scaling)."""

    def __init__(self, N: int):
        self.N = N
        units = [u for u in range(1, N + 1) if gcd(u, N) == 1] if N > 1 else [1]
        self._index: dict[tuple[int, int], int] = {}
        self.reps: list[tuple[int, int]] = []
        for c in range(N):
            for d in range(N):
                if gcd(gcd(c, d), N) != 1 or (c, d) in self._index:
                    continue
                orbit = {((u * c) % N, (u * d) % N) for u in units}
                rep = min(orbit)
                idx = len(self.reps)
                self.reps.append(rep)
                for pt in orbit:
                    self._index[pt] = idx
        if N == 1:
            self.reps = [(0, 0)]
            self._index = {(0, 0): 0}

    def __len__(self):
        return len(self.reps)

    def index(self, c: int, d: int) -> int:
        return self._index[(c % self.N, d % self.N)] if self.N > 1 else 0

    def lift(self, i: int) -> Matrix:
        """Matrix in SL2(Z) with bottom row ≡ the i-th representative."""
        c, d = self.reps[i]
        N = self.N
        if N == 1:
            return (1, 0, 0, 1)
        if c == 0:
            c = N
        t = 0
        while gcd(c, d + t * N) != 1:
            t += 1
        d = d + t * N
        _, x, y = _xgcd(d, c)  # x d + y c = 1
        return (x, -y, c, d)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def convergent_matrices(r: Fraction) -> list[Matrix]:
    """Matrices g_j in SL2(Z) with ``{0, r} = Σ g_j{0, ∞}`` (continued fractions)."""
    r = Fraction(r)
    a, b = r.numerator, r.denominator
    pq = [(0, 1), (1, 0)]
    # partial quotients of a/b
    while b:
        q = a // b
        a, b = b, a - q * b
        p_new = q * pq[-1][0] + pq[-2][0]
        q_new = q * pq[-1][1] + pq[-2][1]
        pq.append((p_new, q_new))
    mats = []
    for j in range(1, len(pq)):
        (p0, q0), (p1, q1) = pq[j - 1], pq[j]
        det = p1 * q0 - p0 * q1
        mats.append((det * p1, p0, det * q1, q0))
    return mats


# ---------------------------------------------------------------------------
# the space


def _cusp_equivalent(N: int, a1: int, c1: int, a2: int, c2: int) -> bool:
    """Equivalence of cusps a1/c1 and a2/c2 (reduced) under Γ0(N)."""
    g1, g2 = gcd(c1, N), gcd(c2, N)
    if g1 != g2:
        return False
    s1 = pow(a1, -1, g1) if g1 > 1 else 0
    s2 = pow(a2, -1, g2) if g2 > 1 else 0
    m = gcd(c1 * c2, N)
    return (s1 * c2 - s2 * c1) % m == 0 if m > 1 else True


class ManinSymbolSpace:
    """Quotient of the free space on ``[X^i Y^(k-2-i), (c:d)]`` by the S- and T-relations."""

    def __init__(self, N: int, k: int):
        if N < 1 or k < 2 or k % 2:
            raise ValueError("need N >= 1 and even k >= 2")
        self.N, self.k, self.w = N, k, k - 2
        self.p1 = P1(N)
        self.ngens = (self.w + 1) * len(self.p1)
        self._build()
        self._boundary = None

    def gen(self, i: int, idx: int) -> int:
        return idx * (self.w + 1) + i

    def _symbol_terms(self, g: Matrix, P: list) -> list[tuple[int, object]]:
        idx = self.p1.index(g[2], g[3])
        return [(self.gen(i, idx), x) for i, x in enumerate(P) if x]

    def _build(self):
        w = self.w
        rels = []
        seen = set()
        for idx in range(len(self.p1)):
            g = self.p1.lift(idx)
            for i in range(w + 1):
                P = monomial(i, w)
                T2 = mat_mul(T, T)
                s_rel = [(g, P), (mat_mul(g, S), act(mat_adj(S), P))]
                t_rel = [(g, P), (mat_mul(g, T), act(mat_adj(T), P)), (mat_mul(g, T2), act(mat_adj(T2), P))]
                for rel in (s_rel, t_rel):
                    vec: dict[int, Fraction] = {}
                    for h, Q in rel:
                        for gi, x in self._symbol_terms(h, Q):
                            vec[gi] = vec.get(gi, 0) + x
                    key = tuple(sorted((a, b) for a, b in vec.items() if b))
                    if key and key not in seen:
                        seen.add(key)
                        rels.append(key)
        rows = []
        for key in rels:
            row = [Fraction(0)] * self.ngens
            for gi, x in key:
                row[gi] = Fraction(x)
            rows.append(row)
        R, piv = rref(rows, self.ngens)
        self.free = [c for c in range(self.ngens) if c not in piv]
        pos = {c: t for t, c in enumerate(self.free)}
        self.dim = len(self.free)
        # projection of each generator to free coordinates
        proj = [[Fraction(0)] * self.dim for _ in range(self.ngens)]
        for c in self.free:
            proj[c][pos[c]] = Fraction(1)
        for row, pc in zip(R, piv):
            for c in self.free:
                if row[c]:
                    proj[pc][pos[c]] = -row[c]
        self.proj = proj

    # -- symbols -------------------------------------------------------------

    def manin(self, g: Matrix, P: list) -> list[Fraction]:
        """Coordinates of ``g·(P{0, ∞})`` for g in SL2(Z)."""
        out = [Fraction(0)] * self.dim
        for gi, x in self._symbol_terms(g, P):
            row = self.proj[gi]
            for t in range(self.dim):
                if row[t]:
                    out[t] += x * row[t]
        return out

    def symbol_terms(self, P: list, alpha, beta) -> list[tuple[int, object]]:
        """Generator expansion of ``P{α, β}`` (cusps in Q or None for ∞)."""
        terms: list[tuple[int, object]] = []
        for r, sgn in ((beta, 1), (alpha, -1)):
            for g in self._zero_to(r):
                Q = act(mat_adj(g), P)
                terms.extend((gi, sgn * x) for gi, x in self._symbol_terms(g, Q))
        return terms

    def _zero_to(self, r) -> list[Matrix]:
        if r is None:
            return [(1, 0, 0, 1)]
        return convergent_matrices(r)

    def symbol(self, P: list, alpha, beta) -> list[Fraction]:
        out = [Fraction(0)] * self.dim
        for gi, x in self.symbol_terms(P, alpha, beta):
            row = self.proj[gi]
            for t in range(self.dim):
                if row[t]:
                    out[t] += x * row[t]
        return out

    def transform(self, g: Matrix, basis_index: int) -> tuple[list, object, object]:
        """``g`` applied to the free basis element: (polynomial, g·a, g·b) of ``(gh)(P{0,∞})``."""
        gi = self.free[basis_index]
        idx, i = divmod(gi, self.w + 1)
        h = self.p1.lift(idx)
        gh = mat_mul(g, h)
        return act(gh, monomial(i, self.w)), moebius(gh, Fraction(0)), moebius(gh, None)

    def operator(self, mats: list[Matrix]) -> list[list[Fraction]]:
        """Matrix (columns = images of the free basis) of ``x ↦ Σ_g g·x``."""
        cols = []
        for b in range(self.dim):
            col = [Fraction(0)] * self.dim
            for g in mats:
                P, a0, a1 = self.transform(g, b)
                v = self.symbol(P, a0, a1)
                col = [x + y for x, y in zip(col, v)]
            cols.append(col)
        return [list(r) for r in zip(*cols)]

    def star(self) -> list[list[Fraction]]:
        cols = []
        for b in range(self.dim):
            gi = self.free[b]
            idx, i = divmod(gi, self.w + 1)
            h = self.p1.lift(idx)
            cols.append(self.manin(mat_mul(ETA, mat_mul(h, ETA)), act(ETA, monomial(i, self.w))))
        return [list(r) for r in zip(*cols)]

    # -- boundary ---------------------------------------------------------------

    def _cusp_class(self, a: int, c: int, classes: list[tuple[int, int]]) -> int:
        g = gcd(a, c)
        a, c = a // g, c // g
        for t, (a2, c2) in enumerate(classes):
            if _cusp_equivalent(self.N, a, c, a2, c2):
                return t
        classes.append((a, c))
        return len(classes) - 1

    def boundary_matrix(self) -> tuple[list[list[Fraction]], int]:
        """Boundary map on the free basis; returns (rows indexed by cusp classes, #classes)."""
        if self._boundary is None:
            classes: list[tuple[int, int]] = []
            images = []
            for b in range(self.dim):
                gi = self.free[b]
                idx, i = divmod(gi, self.w + 1)
                a, bb, c, d = self.p1.lift(idx)
                img: dict[int, int] = {}
                # P{g∞} contributes the X^w coefficient, P{g0} the Y^w coefficient
                if i == self.w:
                    t = self._cusp_class(a, c, classes)
                    img[t] = img.get(t, 0) + 1
                if i == 0:
                    t = self._cusp_class(bb, d, classes)
                    img[t] = img.get(t, 0) - 1
                images.append(img)
            ncl = len(classes)
            rows = [[Fraction(images[b].get(t, 0)) for b in range(self.dim)] for t in range(ncl)]
            self._boundary = (rows, ncl)
        return self._boundary

    def cuspidal_basis(self) -> list[list[Fraction]]:
        rows, _ = self.boundary_matrix()
        if not rows:
            return [[Fraction(int(i == j)) for j in range(self.dim)] for i in range(self.dim)]
        return kernel(rows, self.dim)

    @property
    def cuspidal_dim(self) -> int:
        rows, _ = self.boundary_matrix()
        return self.dim - (rank(rows, self.dim) if rows else 0)

    @property
    def cusp_count(self) -> int:
        """Number of Γ0(N)-classes of cusps g∞, g running over coset representatives."""
        classes: list[tuple[int, int]] = []
        for idx in range(len(self.p1)):
            a, _, c, _ = self.p1.lift(idx)
            self._cusp_class(a, c, classes)
        return len(classes)

    def hecke_matrices(self, q: int) -> list[Matrix]:
        if self.N % q == 0:
            return [(1, r, 0, q) for r in range(q)]
        return [(1, r, 0, q) for r in range(q)] + [(q, 0, 0, 1)]


def hecke_action(space: ManinSymbolSpace, q: int) -> list[list[Fraction]]:
    if space.N % q == 0:
        raise ValueError("T_q needs q prime to the level; use u_p_action")
    return space.operator(space.hecke_matrices(q))


def u_p_action(space: ManinSymbolSpace, p: int) -> list[list[Fraction]]:
    if space.N % p:
        raise ValueError("U_p needs p | level")
    return space.operator(space.hecke_matrices(p))


def build_space(N: int, k: int) -> ManinSymbolSpace:
    return ManinSymbolSpace(N, k)
