"""Truncated arithmetic in Z_q = W(F_q) and matrices over it.

Elements carry capped relative precision: ``x = p^val * u`` with ``u`` a unit
known modulo ``p^relprec``.  The unramified extension of degree ``f`` is
modelled as ``Z_p[x]/(F)`` for the lexicographically smallest monic
irreducible ``F`` mod ``p``; the uniformizer is ``p`` itself.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

INF = math.inf


class PrecisionError(ArithmeticError):
    """Raised when a result would claim more precision than is available."""


class NonIntegralError(ValueError):
    pass


def _vp(n: int, p: int) -> int:
    if n == 0:
        return 10**9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _polymod_divides(d: Sequence[int], g: Sequence[int], p: int) -> bool:
    # d, g little-endian, d monic
    r = list(g)
    dd = len(d) - 1
    for i in range(len(r) - 1, dd - 1, -1):
        c = r[i] % p
        if c:
            for j in range(dd + 1):
                r[i - dd + j] = (r[i - dd + j] - c * d[j]) % p
    return all(c % p == 0 for c in r[:dd])


def _smallest_irreducible(p: int, f: int) -> tuple[int, ...]:
    if f == 1:
        return (0, 1)
    for low in product(range(p), repeat=f):
        cand = tuple(low[::-1]) + (1,)
        if cand[0] == 0:
            continue
        reducible = False
        for d in range(1, f // 2 + 1):
            for dlow in product(range(p), repeat=d):
                if _polymod_divides(tuple(dlow) + (1,), cand, p):
                    reducible = True
                    break
            if reducible:
                break
        if not reducible:
            return cand
    raise ValueError(f"no irreducible polynomial of degree {f} mod {p}")


@dataclass(frozen=True)
class LocalRingDesc:
    p: int
    f: int = 1
    precision_N: int = 20

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.f < 1:
            raise ValueError("residue degree f must be >= 1")
        if self.precision_N < 1:
            raise ValueError("precision_N must be >= 1")

    @property
    def q(self) -> int:
        return self.p**self.f

    @cached_property
    def modulus(self) -> tuple[int, ...]:
        """Little-endian coefficients of the defining polynomial (monic)."""
        return _smallest_irreducible(self.p, self.f)

    def with_precision(self, N: int) -> "LocalRingDesc":
        return LocalRingDesc(self.p, self.f, N)

    # -- constructors -------------------------------------------------
    def zero(self) -> "LocalElem":
        return LocalElem(self, INF, None, 0)

    def one(self) -> "LocalElem":
        return make_elem(self, 1)

    def uniformizer(self) -> "LocalElem":
        return make_elem(self, self.p)

    def __call__(self, value) -> "LocalElem":
        return make_elem(self, value)

    def residue_reps(self) -> list["LocalElem"]:
        """Lifts of all elements of F_q with coefficients in [0, p)."""
        return [make_elem(self, tuple(c)) for c in product(range(self.p), repeat=self.f)]

    def residue_tuples(self, count: int) -> Iterable[tuple[int, ...]]:
        return product(range(self.p), repeat=self.f * count)

    def random_integral(self, rng: random.Random, digits: int | None = None) -> "LocalElem":
        d = self.precision_N if digits is None else digits
        M = self.p**d
        return make_elem(self, tuple(rng.randrange(M) for _ in range(self.f)))

    def random_unit(self, rng: random.Random) -> "LocalElem":
        while True:
            x = self.random_integral(rng)
            if x.valuation() == 0:
                return x


def _poly_mul(a: Sequence[int], b: Sequence[int], F: Sequence[int], M: int) -> tuple[int, ...]:
    f = len(F) - 1
    if f == 1:
        return ((a[0] * b[0]) % M,)
    prod_ = [0] * (2 * f - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod_[i + j] += ai * bj
    for i in range(2 * f - 2, f - 1, -1):
        c = prod_[i]
        if c:
            for j in range(f):
                prod_[i - f + j] -= c * F[j]
    return tuple(c % M for c in prod_[:f])


def _unit_inverse(u: Sequence[int], ring: LocalRingDesc, r: int) -> tuple[int, ...]:
    p, f, F = ring.p, ring.f, ring.modulus
    if f == 1:
        return (pow(u[0], -1, p**r),)
    # invert mod p by brute force in F_q, then Newton-lift
    ubar = tuple(c % p for c in u)
    inv = None
    for cand in product(range(p), repeat=f):
        if _poly_mul(ubar, cand, F, p) == (1,) + (0,) * (f - 1):
            inv = cand
            break
    if inv is None:
        raise ZeroDivisionError("not a unit")
    y = inv
    k = 1
    while k < r:
        k = min(2 * k, r)
        M = p**k
        uy = _poly_mul(u, y, F, M)
        two_minus = tuple(((2 if i == 0 else 0) - c) % M for i, c in enumerate(uy))
        y = _poly_mul(y, two_minus, F, M)
    M = p**r
    return tuple(c % M for c in y)


class LocalElem:
    """Element of Q_q with capped relative precision.

    Zero elements have ``unit is None``; ``val`` is then the absolute
    precision of the zero (``INF`` for an exact zero).
    """

    __slots__ = ("ring", "val", "unit", "relprec")

    def __init__(self, ring: LocalRingDesc, val, unit, relprec: int):
        self.ring = ring
        self.val = val
        self.unit = unit
        self.relprec = relprec

    # -- inspection -----------------------------------------------------
    def is_zero(self) -> bool:
        return self.unit is None

    def is_exact_zero(self) -> bool:
        return self.unit is None and self.val == INF

    @property
    def absprec(self):
        if self.unit is None:
            return self.val
        return self.val + self.relprec

    def valuation(self):
        """Valuation; ``INF`` for exact zero, the absolute precision for inexact zero."""
        return self.val

    def val_at_least(self, bound: int) -> bool:
        if self.unit is not None:
            return self.val >= bound
        if self.val >= bound:
            return True
        raise PrecisionError(f"cannot decide valuation >= {bound}: zero known only mod p^{self.val}")

    def is_unit(self) -> bool:
        return self.unit is not None and self.val == 0

    def digits(self) -> list:
        """Little-endian ϖ-adic digits of the unit part (relprec of them)."""
        if self.unit is None:
            return []
        p = self.ring.p
        cols = []
        for c in self.unit:
            ds = []
            for _ in range(self.relprec):
                c, d = divmod(c, p)
                ds.append(d)
            cols.append(ds)
        if self.ring.f == 1:
            return cols[0]
        return [[col[k] for col in cols] for k in range(self.relprec)]

    def residue(self) -> tuple[int, ...]:
        """Reduction mod ϖ of an integral element, as a coefficient tuple."""
        if not self.val_at_least(0):
            raise NonIntegralError("residue of a non-integral element")
        if self.unit is None or self.val > 0:
            return (0,) * self.ring.f
        return tuple(c % self.ring.p for c in self.unit)

    def to_fraction(self) -> Fraction:
        """Rational representative (f = 1 only); exact when the element is."""
        if self.ring.f != 1:
            raise ValueError("to_fraction needs f = 1")
        if self.unit is None:
            return Fraction(0)
        return Fraction(self.unit[0]) * Fraction(self.ring.p) ** self.val

    def to_int_mod(self, e: int) -> tuple[int, ...]:
        """Coefficients of an integral element reduced mod p^e."""
        M = self.ring.p**e
        if self.unit is None:
            if self.val < e:
                raise PrecisionError(f"zero known only mod p^{self.val}, need p^{e}")
            return (0,) * self.ring.f
        if self.val < 0:
            raise NonIntegralError("element is not integral")
        if self.absprec < e:
            raise PrecisionError(f"element known only mod p^{self.absprec}, need p^{e}")
        s = self.ring.p**self.val
        return tuple((c * s) % M for c in self.unit)

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other) -> "LocalElem":
        if isinstance(other, LocalElem):
            if other.ring.p != self.ring.p or other.ring.f != self.ring.f:
                raise ValueError("mixing elements of different local rings")
            return other
        return make_elem(self.ring, other)

    def __add__(self, other):
        o = self._coerce(other)
        if self.unit is None and o.unit is None:
            return LocalElem(self.ring, min(self.val, o.val), None, 0)
        if self.unit is None:
            return o._capped(self.val)
        if o.unit is None:
            return self._capped(o.val)
        p = self.ring.p
        e = min(self.val, o.val)
        a = min(self.absprec, o.absprec)
        M = p ** (a - e)
        sa = p ** (self.val - e)
        sb = p ** (o.val - e)
        c = tuple((x * sa + y * sb) % M for x, y in zip(self.unit, o.unit))
        return _normalize(self.ring, e, c, a)

    __radd__ = __add__

    def _capped(self, absprec) -> "LocalElem":
        if self.unit is None:
            return LocalElem(self.ring, min(self.val, absprec), None, 0)
        if absprec >= self.absprec:
            return self
        if absprec <= self.val:
            return LocalElem(self.ring, absprec, None, 0)
        r = absprec - self.val
        M = self.ring.p**r
        return LocalElem(self.ring, self.val, tuple(c % M for c in self.unit), r)

    def __neg__(self):
        if self.unit is None:
            return self
        M = self.ring.p**self.relprec
        return LocalElem(self.ring, self.val, tuple((-c) % M for c in self.unit), self.relprec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        if self.unit is None or o.unit is None:
            if self.is_exact_zero() or o.is_exact_zero():
                return self.ring.zero()
            if self.unit is None and o.unit is None:
                return LocalElem(self.ring, self.val + o.val, None, 0)
            z, nz = (self, o) if self.unit is None else (o, self)
            return LocalElem(self.ring, z.val + nz.val, None, 0)
        r = min(self.relprec, o.relprec)
        u = _poly_mul(self.unit, o.unit, self.ring.modulus, self.ring.p**r)
        return LocalElem(self.ring, self.val + o.val, u, r)

    __rmul__ = __mul__

    def inverse(self) -> "LocalElem":
        if self.unit is None:
            if self.val == INF:
                raise ZeroDivisionError("inverse of exact zero")
            raise PrecisionError("inverse of an element indistinguishable from zero")
        return LocalElem(self.ring, -self.val, _unit_inverse(self.unit, self.ring, self.relprec), self.relprec)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = make_elem(self.ring, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        """Equality up to the common precision of both operands."""
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return (self - o).is_zero()

    __hash__ = None

    def with_precision(self, relprec: int) -> "LocalElem":
        """Truncate to at most ``relprec`` significant digits."""
        if self.unit is None or relprec >= self.relprec:
            return self
        M = self.ring.p**relprec
        return LocalElem(self.ring, self.val, tuple(c % M for c in self.unit), relprec)

    def identical(self, other: "LocalElem") -> bool:
        """Same valuation, same precision, same digits."""
        return (
            self.val == other.val
            and self.relprec == other.relprec
            and self.unit == other.unit
        )

    def __repr__(self):
        if self.unit is None:
            return "0" if self.val == INF else f"O(p^{self.val})"
        if self.ring.f == 1:
            return f"{self.unit[0]}*{self.ring.p}^{self.val} + O({self.ring.p}^{self.absprec})"
        return f"{list(self.unit)}*{self.ring.p}^{self.val} + O({self.ring.p}^{self.absprec})"

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        r = self.ring
        if self.unit is None:
            return {
                "valuation": None if self.val == INF else self.val,
                "digits": [],
                "zero": True,
                "p": r.p,
                "f": r.f,
                "N": 0,
            }
        return {"valuation": self.val, "digits": self.digits(), "p": r.p, "f": r.f, "N": self.relprec}

    @classmethod
    def from_json(cls, data: dict) -> "LocalElem":
        p, f, N = data["p"], data["f"], data["N"]
        ring = LocalRingDesc(p, f, max(N, 1))
        if data.get("zero"):
            v = data["valuation"]
            return LocalElem(ring, INF if v is None else v, None, 0)
        digits = data["digits"]
        if f == 1:
            cols = [digits]
        else:
            cols = [[d[i] for d in digits] for i in range(f)]
        unit = tuple(sum(d * p**k for k, d in enumerate(col)) for col in cols)
        return LocalElem(ring, data["valuation"], unit, N)


def _normalize(ring: LocalRingDesc, e: int, c: tuple[int, ...], absprec) -> LocalElem:
    p = ring.p
    if all(x == 0 for x in c):
        return LocalElem(ring, absprec, None, 0)
    v = min(_vp(x, p) for x in c if x)
    s = p**v
    val = e + v
    r = absprec - val
    M = p**r
    return LocalElem(ring, val, tuple((x // s) % M for x in c), r)


def make_elem(ring: LocalRingDesc, value, prec: int | None = None) -> LocalElem:
    """Expand an exact integer, rational or Z[x]/(F)-coefficient tuple.

    The result has ``prec`` (default ``ring.precision_N``) significant digits.
    """
    N = ring.precision_N if prec is None else prec
    if isinstance(value, LocalElem):
        return value.with_precision(N)
    if isinstance(value, (list, tuple)):
        coeffs = [Fraction(c) for c in value]
        if len(coeffs) != ring.f:
            raise ValueError(f"expected {ring.f} coefficients, got {len(coeffs)}")
    else:
        if isinstance(value, float):
            raise TypeError("floating-point input is not supported")
        coeffs = [Fraction(value)] + [Fraction(0)] * (ring.f - 1)
    # Fraction raises ZeroDivisionError on a zero denominator
    p = ring.p
    if all(c == 0 for c in coeffs):
        return ring.zero()
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    nums = [int(c * den) for c in coeffs]
    vden = _vp(den, p)
    den_unit = den // p**vden
    vnum = min(_vp(x, p) for x in nums if x)
    s = p**vnum
    M = p**N
    u = tuple((x // s) % M for x in nums)
    inv = pow(den_unit, -1, M)
    u = tuple((x * inv) % M for x in u)
    return LocalElem(ring, vnum - vden, u, N)


def valuation(x: LocalElem):
    return x.valuation()


class LocalMatrix:
    """Dense matrix of LocalElem entries (immutable)."""

    __slots__ = ("ring", "entries")

    def __init__(self, ring: LocalRingDesc, entries: Sequence[Sequence]):
        self.ring = ring
        self.entries = tuple(tuple(e if isinstance(e, LocalElem) else make_elem(ring, e) for e in row) for row in entries)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @classmethod
    def identity(cls, ring: LocalRingDesc, n: int) -> "LocalMatrix":
        return cls(ring, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, ring: LocalRingDesc, values: Sequence) -> "LocalMatrix":
        n = len(values)
        z = ring.zero()
        return cls(ring, [[values[i] if i == j else z for j in range(n)] for i in range(n)])

    def embed(self) -> "LocalMatrix":
        """The block embedding g -> [[g, 0], [0, 1]]."""
        n = self.rows
        z = self.ring.zero()
        rows = [list(r) + [z] for r in self.entries]
        rows.append([z] * n + [self.ring.one()])
        return LocalMatrix(self.ring, rows)

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "LocalMatrix":
        return LocalMatrix(self.ring, [row[c0:c1] for row in self.entries[r0:r1]])

    def __matmul__(self, other: "LocalMatrix") -> "LocalMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = self.ring.zero()
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a.is_exact_zero() or b.is_exact_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return LocalMatrix(self.ring, out)

    def scale(self, c) -> "LocalMatrix":
        return LocalMatrix(self.ring, [[c * e for e in row] for row in self.entries])

    def __sub__(self, other: "LocalMatrix") -> "LocalMatrix":
        return LocalMatrix(self.ring, [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __add__(self, other: "LocalMatrix") -> "LocalMatrix":
        return LocalMatrix(self.ring, [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def transpose(self) -> "LocalMatrix":
        return LocalMatrix(self.ring, list(zip(*self.entries)))

    def equals(self, other: "LocalMatrix") -> bool:
        """Entrywise equality to the available precision."""
        return self.rows == other.rows and self.cols == other.cols and all(
            (a - b).is_zero() for r, s in zip(self.entries, other.entries) for a, b in zip(r, s)
        )

    def min_absprec(self):
        return min(e.absprec for row in self.entries for e in row)

    def min_valuation(self):
        return min(e.valuation() for row in self.entries for e in row)

    def is_integral(self) -> bool:
        return all(e.val_at_least(0) for row in self.entries for e in row)

    def det(self) -> LocalElem:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = [list(r) for r in self.entries]
        det = self.ring.one()
        for c in range(n):
            piv = _pivot(a, c, c)
            if piv is None:
                return _zero_like(a, c)
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                det = -det
            pc = a[c][c]
            det = det * pc
            inv = pc.inverse()
            for r in range(c + 1, n):
                if a[r][c].is_exact_zero():
                    continue
                fct = a[r][c] * inv
                a[r] = [x - fct * y for x, y in zip(a[r], a[c])]
        return det

    def __repr__(self):
        return "LocalMatrix(" + repr([[e for e in r] for r in self.entries]) + ")"

    def to_json(self) -> list:
        return [[e.to_json() for e in row] for row in self.entries]

    @classmethod
    def from_json(cls, data: list) -> "LocalMatrix":
        rows = [[LocalElem.from_json(e) for e in row] for row in data]
        ring = rows[0][0].ring
        return cls(ring, rows)


def _pivot(a, col: int, start: int):
    best, bestv = None, None
    for r in range(start, len(a)):
        e = a[r][col]
        if e.unit is None:
            continue
        if bestv is None or e.val < bestv:
            best, bestv = r, e.val
    return best


def _zero_like(a, c):
    ring = a[0][0].ring
    for r in range(c, len(a)):
        if not a[r][c].is_exact_zero():
            raise PrecisionError("determinant indistinguishable from zero at working precision")
    return ring.zero()


def invert(g: LocalMatrix) -> LocalMatrix:
    """Gauss-Jordan inverse with minimal-valuation pivoting."""
    if g.rows != g.cols:
        raise ValueError("inverse of a non-square matrix")
    n = g.rows
    ring = g.ring
    one, zero = ring.one(), ring.zero()
    a = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(g.entries)]
    for c in range(n):
        piv = _pivot(a, c, c)
        if piv is None:
            if all(a[r][c].is_exact_zero() for r in range(c, n)):
                raise ZeroDivisionError("singular matrix")
            raise PrecisionError("precision exhausted while inverting")
        a[c], a[piv] = a[piv], a[c]
        inv = a[c][c].inverse()
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r == c or a[r][c].is_exact_zero():
                continue
            fct = a[r][c]
            a[r] = [x - fct * y for x, y in zip(a[r], a[c])]
    return LocalMatrix(ring, [row[n:] for row in a])


def iwahori_member(g: LocalMatrix, m: int, strict: bool = True) -> bool:
    """Membership in the mod-ϖ^m Iwahori subgroup.

    With ``strict`` a non-integral entry raises ``NonIntegralError``;
    otherwise it simply yields False.
    """
    if g.rows != g.cols:
        raise ValueError("Iwahori membership needs a square matrix")
    if m < 1:
        raise ValueError("level m must be >= 1")
    n = g.rows
    for i in range(n):
        for j in range(n):
            e = g.entries[i][j]
            if not e.val_at_least(0):
                if strict:
                    raise NonIntegralError(f"entry ({i},{j}) has valuation {e.valuation()}")
                return False
    for i in range(n):
        for j in range(i):
            if not g.entries[i][j].val_at_least(m):
                return False
    return all(g.entries[i][i].is_unit() for i in range(n))


def random_upper_unipotent(ring: LocalRingDesc, n: int, rng: random.Random) -> LocalMatrix:
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(ring.one())
            elif j > i:
                row.append(ring.random_integral(rng))
            else:
                row.append(ring.zero())
        rows.append(row)
    return LocalMatrix(ring, rows)


def random_iwahori(ring: LocalRingDesc, n: int, m: int, rng: random.Random) -> LocalMatrix:
    pm = ring.uniformizer() ** m
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(ring.random_unit(rng))
            elif j > i:
                row.append(ring.random_integral(rng))
            else:
                row.append(pm * ring.random_integral(rng))
        rows.append(row)
    return LocalMatrix(ring, rows)
