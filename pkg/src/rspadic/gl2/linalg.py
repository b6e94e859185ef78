"""Dense exact linear algebra over any field whose elements support + - * / and ``== 0``."""

from __future__ import annotations

from fractions import Fraction


def rref(rows: list[list], ncols: int) -> tuple[list[list], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    A = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c] if not isinstance(A[r][c], int) else Fraction(1, A[r][c])
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def kernel(rows: list[list], ncols: int, zero=Fraction(0), one=Fraction(1)) -> list[list]:
    """Basis of {x : A x = 0}."""
    R, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [zero] * ncols
        x[f] = one
        for row, pc in zip(R, piv):
            x[pc] = -row[f]
        basis.append(x)
    return basis


def rank(rows: list[list], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def transpose(M: list[list]) -> list[list]:
    return [list(c) for c in zip(*M)] if M else []


def matmul(A: list[list], B: list[list]) -> list[list]:
    Bt = transpose(B)
    out = []
    for r in A:
        row = []
        for c in Bt:
            acc = r[0] * c[0]
            for a, b in zip(r[1:], c[1:]):
                acc = acc + a * b
            row.append(acc)
        out.append(row)
    return out


def charpoly(M: list[list]) -> list[Fraction]:
    """Little-endian characteristic polynomial det(X - M) (Faddeev-LeVerrier over Q)."""
    n = len(M)
    coeffs = [Fraction(0)] * n + [Fraction(1)]
    Mk = [[Fraction(0)] * n for _ in range(n)]
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    c = Fraction(1)
    for k in range(1, n + 1):
        Mk = matmul(M, [[Mk[i][j] + c * ident[i][j] for j in range(n)] for i in range(n)])
        c = -sum(Mk[i][i] for i in range(n)) / k
        coeffs[n - k] = c
    return coeffs


def rational_roots(poly: list[Fraction]) -> list[Fraction]:
    """Rational roots (with multiplicity) of a little-endian rational polynomial."""
    from math import gcd

    den = 1
    for a in poly:
        den = den * Fraction(a).denominator // gcd(den, Fraction(a).denominator)
    P = [int(a * den) for a in poly]
    roots: list[Fraction] = []
    while len(P) > 1 and P[0] == 0:
        roots.append(Fraction(0))
        P = P[1:]
    if len(P) <= 1:
        return roots

    def divisors(m: int) -> list[int]:
        m = abs(m)
        return [d for d in range(1, m + 1) if m % d == 0]

    found = True
    while found and len(P) > 1:
        found = False
        for a in divisors(P[0]):
            for b in divisors(P[-1]):
                for s in (1, -1):
                    r = Fraction(s * a, b)
                    if sum(Fraction(c) * r**i for i, c in enumerate(P)) == 0:
                        roots.append(r)
                        # synthetic division
                        out = [Fraction(0)] * (len(P) - 1)
                        acc = Fraction(0)
                        for i in range(len(P) - 1, 0, -1):
                            acc = acc * r + P[i]
                            out[i - 1] = acc
                        d2 = 1
                        for x in out:
                            d2 = d2 * x.denominator // gcd(d2, x.denominator)
                        P = [int(x * d2) for x in out]
                        found = True
                        break
                if found:
                    break
            if found:
                break
    return sorted(roots)
