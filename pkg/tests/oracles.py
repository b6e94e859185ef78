"""Brute-force reference computations used only by the tests."""

import math
from collections import Counter
from itertools import product
from functools import lru_cache


@lru_cache(maxsize=None)
def gl_character(hw: tuple, N: int) -> Counter:
    """Weight multiset of the GL_N irreducible with highest weight ``hw``.

    Built by enumerating semistandard tableaux of the shifted shape.
    """
    base = hw[-1]
    shape = [x - base for x in hw]
    cells = [(r, c) for r in range(N) for c in range(shape[r])]
    out = Counter()
    fill = {}

    def place(idx):
        if idx == len(cells):
            content = [0] * N
            for v in fill.values():
                content[v] += 1
            out[tuple(x + base for x in content)] += 1
            return
        r, c = cells[idx]
        lo = 0
        if c > 0:
            lo = max(lo, fill[(r, c - 1)])
        if r > 0:
            lo = max(lo, fill[(r - 1, c)] + 1)
        for v in range(lo, N):
            fill[(r, c)] = v
            place(idx + 1)
        fill.pop((r, c), None)

    place(0)
    return out


def restrict_drop_last(ch: Counter) -> Counter:
    out = Counter()
    for wt, m in ch.items():
        out[wt[:-1]] += m
    return out


def tensor(a: Counter, b: Counter) -> Counter:
    out = Counter()
    for x, m in a.items():
        for y, k in b.items():
            out[tuple(s + t for s, t in zip(x, y))] += m * k
    return out


def decompose(ch: Counter, N: int) -> Counter:
    """Multiplicities of irreducible constituents by peeling highest weights."""
    ch = Counter({k: v for k, v in ch.items() if v})
    out = Counter()
    while ch:
        top = max(ch)
        m = ch[top]
        out[top] += m
        for wt, k in gl_character(top, N).items():
            ch[wt] -= m * k
            if ch[wt] == 0:
                del ch[wt]
            elif ch[wt] < 0:
                raise AssertionError("negative multiplicity while peeling")
    return out


def det_multiplicities(mu: tuple, nu: tuple) -> dict:
    """j -> dim Hom_{GL_n}(M_mu ⊗ M_nu, det^j) computed from characters."""
    n = len(nu)
    if n == 0:
        return {0: 1}
    ch = tensor(restrict_drop_last(gl_character(mu, n + 1)), gl_character(nu, n))
    dec = decompose(ch, n)
    return {wt[0]: m for wt, m in dec.items() if len(set(wt)) == 1}


# -- classical dimension formulas for Γ0(N) ------------------------------------


def _prime_factors(N):
    out, p = [], 2
    while p * p <= N:
        if N % p == 0:
            out.append(p)
            while N % p == 0:
                N //= p
        p += 1
    if N > 1:
        out.append(N)
    return out


def _legendre(a, p):
    if p == 2:
        return 0 if a % 2 == 0 else (1 if a % 8 in (1, 7) else -1)
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def gamma0_invariants(N):
    """(index, ν2, ν3, #cusps) of Γ0(N)."""
    from math import gcd

    ps = _prime_factors(N)
    mu = N
    for p in ps:
        mu = mu * (p + 1) // p
    nu2 = 0 if N % 4 == 0 else 1
    nu3 = 0 if N % 9 == 0 else 1
    for p in ps:
        if nu2:
            nu2 *= 1 + (_legendre(-1, p) if p != 2 else 0)
        if nu3:
            nu3 *= 1 + (_legendre(-3, p) if p != 3 else 0)

    def phi(n):
        return sum(1 for x in range(1, n + 1) if gcd(x, n) == 1)

    cusps = sum(phi(gcd(d, N // d)) for d in range(1, N + 1) if N % d == 0)
    return mu, nu2, nu3, cusps


def genus0(N):
    mu, nu2, nu3, c = gamma0_invariants(N)
    from fractions import Fraction

    g = 1 + Fraction(mu, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(c, 2)
    assert g.denominator == 1
    return int(g)


def dim_cusp_forms(N, k):
    mu, nu2, nu3, c = gamma0_invariants(N)
    g = genus0(N)
    if k == 2:
        return g
    return (k - 1) * (g - 1) + (k // 2 - 1) * c + nu2 * (k // 4) + nu3 * (k // 3)


# -- invariant counting with a unit-character filter ---------------------------


def oracle_units_allow(fld, j):
    """Whether the character prod ι^(j_ι) kills a finite-index subgroup of units.

    Real quadratic pattern: Q(sqrt 2), unit 1+sqrt 2.  Imaginary quadratic:
    finite unit group, every type survives.  Q: units ±1.
    """
    if not fld.totally_real or len(fld.embeddings) == 1:
        return True
    eps = [1 + math.sqrt(2), 1 - math.sqrt(2)]
    s = sum(j[k] * math.log(abs(e)) for k, e in zip(fld.embeddings, eps))
    return abs(s) < 1e-9


def oracle_dims(fld, mus, nus):
    mults = {k: det_multiplicities(mus[k], nus[k]) for k in fld.embeddings}
    labels = fld.embeddings
    crit = sorted(set.intersection(*(set(mults[k]) for k in labels)))
    inv = 0
    for combo in product(*(mults[k].items() for k in labels)):
        j = {k: c[0] for k, c in zip(labels, combo)}
        if oracle_units_allow(fld, j):
            inv += math.prod(c[1] for c in combo)
    return crit, inv
