"""Exact coefficient fields: Q, quadratic fields with a p-adic place, cyclotomic fields.

Cyclotomic fields may be built over any of the other two, so that character
values and Hecke roots can be combined exactly.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

from .local_arith import LocalElem, LocalRingDesc, PrecisionError, _vp, make_elem


class Rationals:
    """Q as a coefficient field; elements are Fractions."""

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def __call__(self, x) -> Fraction:
        return Fraction(x)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"

    def valuation(self, x, p: int) -> Fraction:
        x = Fraction(x)
        if x == 0:
            raise ValueError("valuation of zero")
        return Fraction(_vp(x.numerator, p) - _vp(x.denominator, p))

    @staticmethod
    def to_json(x) -> str:
        return str(Fraction(x))


QQ = Rationals()


def _is_square(n: Fraction) -> bool:
    if n < 0:
        return False
    return isqrt(n.numerator) ** 2 == n.numerator and isqrt(n.denominator) ** 2 == n.denominator


# ---------------------------------------------------------------------------
# quadratic fields


class QuadraticField:
    """``Q(α)`` with α a root of ``X^2 - aX + b`` (irreducible over Q)."""

    def __init__(self, a, b):
        self.a = Fraction(a)
        self.b = Fraction(b)
        if _is_square(self.a * self.a - 4 * self.b):
            raise ValueError("X^2 - aX + b is reducible over Q")
        self._roots: dict = {}

    def __eq__(self, other):
        return isinstance(other, QuadraticField) and (self.a, self.b) == (other.a, other.b)

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return f"Q(α), α^2 - ({self.a})α + ({self.b}) = 0"

    def zero(self) -> "QuadElem":
        return QuadElem(self, 0, 0)

    def one(self) -> "QuadElem":
        return QuadElem(self, 1, 0)

    def gen(self) -> "QuadElem":
        return QuadElem(self, 0, 1)

    def __call__(self, x) -> "QuadElem":
        if isinstance(x, QuadElem):
            if x.field != self:
                raise ValueError("element of a different quadratic field")
            return x
        return QuadElem(self, Fraction(x), 0)

    # -- p-adic place --------------------------------------------------
    def padic_roots(self, p: int, N: int) -> list[LocalElem]:
        """Both roots of ``X^2 - aX + b`` in an unramified extension of Q_p, to N digits.

        Ordered by valuation (then by residue); raises NotImplementedError
        in the ramified case.
        """
        key = (p, N)
        if key not in self._roots:
            self._roots[key] = _quadratic_padic_roots(self.a, self.b, p, N)
        return self._roots[key]

    def embed(self, x: "QuadElem", root: LocalElem) -> LocalElem:
        R = root.ring
        return make_elem(R, _frac_tuple(x.x, R)) + make_elem(R, _frac_tuple(x.y, R)) * root

    def valuation(self, x: "QuadElem", p: int, root_index: int = 0, N: int = 40) -> Fraction:
        """Valuation at the place where α maps to the chosen p-adic root."""
        if x.is_zero():
            raise ValueError("valuation of zero")
        prec = N
        while prec <= 4000:
            root = self.padic_roots(p, prec)[root_index]
            e = self.embed(x, root)
            if e.unit is not None:
                return Fraction(e.val)
            prec *= 2
        raise PrecisionError("valuation not determined")

    @staticmethod
    def to_json(x) -> list[str]:
        return [str(x.x), str(x.y)]


def _frac_tuple(c: Fraction, R: LocalRingDesc):
    return (c,) + (0,) * (R.f - 1)


def _quadratic_padic_roots(a: Fraction, b: Fraction, p: int, N: int) -> list[LocalElem]:
    if b == 0:
        raise ValueError("zero root")
    vb = _vp(b.numerator, p) - _vp(b.denominator, p)
    va = None if a == 0 else _vp(a.numerator, p) - _vp(a.denominator, p)
    if va is not None and 2 * va < vb:
        # distinct slopes: roots of valuation va and vb - va, both in Q_p
        R = LocalRingDesc(p, 1, N + 4 + abs(vb) + abs(va))
        A, B = make_elem(R, a), make_elem(R, b)
        x = A
        for _ in range(2 * (N + abs(vb)) + 8):
            x = A - B / x
        return [x, B / x]
    if vb % 2:
        raise NotImplementedError("roots generate a ramified extension")
    e = vb // 2
    s = Fraction(p) ** e
    a1, b1 = a / s, b / (s * s)  # unit constant term
    for f in (1, 2):
        R = LocalRingDesc(p, f, N + 4)
        A, B = make_elem(R, a1), make_elem(R, b1)
        reps = R.residue_reps()
        found = []
        for r in reps:
            v = r * r - A * r + B
            if v.val_at_least(1):
                found.append(r)
        if not found:
            continue
        if len(found) == 1 and p != 2:
            raise NotImplementedError("repeated root mod p: ramified or inseparable reduction")
        roots = []
        for r in found:
            x = r
            for _ in range(8 + N.bit_length()):
                fx = x * x - A * x + B
                dfx = 2 * x - A
                if not dfx.is_unit():
                    raise NotImplementedError("repeated root mod p")
                x = x - fx / dfx
            roots.append(x * make_elem(R, s))
        if len(roots) == 1:
            raise NotImplementedError("repeated root mod p")
        return roots
    raise AssertionError("a quadratic has roots in F_{p^2}")


class QuadElem:
    __slots__ = ("field", "x", "y")

    def __init__(self, field: QuadraticField, x, y):
        self.field = field
        self.x = Fraction(x)
        self.y = Fraction(y)

    def _c(self, o) -> "QuadElem":
        if isinstance(o, QuadElem):
            return o
        if isinstance(o, (int, Fraction)):
            return QuadElem(self.field, o, 0)
        return NotImplemented

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def __add__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return NotImplemented
        return QuadElem(self.field, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(self.field, -self.x, -self.y)

    def __sub__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return NotImplemented
        return QuadElem(self.field, self.x - o.x, self.y - o.y)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return NotImplemented
        F = self.field
        # α^2 = aα - b
        yy = self.y * o.y
        return QuadElem(F, self.x * o.x - F.b * yy, self.x * o.y + self.y * o.x + F.a * yy)

    __rmul__ = __mul__

    def conj(self) -> "QuadElem":
        # α' = a - α
        return QuadElem(self.field, self.x + self.field.a * self.y, -self.y)

    def norm(self) -> Fraction:
        F = self.field
        return self.x * self.x + F.a * self.x * self.y + F.b * self.y * self.y

    def trace(self) -> Fraction:
        return 2 * self.x + self.field.a * self.y

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return QuadElem(self.field, c.x / n, c.y / n)

    def __truediv__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self._c(o) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = QuadElem(self.field, 1, 0)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, o):
        if isinstance(o, QuadElem):
            return self.field == o.field and self.x == o.x and self.y == o.y
        if isinstance(o, (int, Fraction)):
            return self.y == 0 and self.x == o
        return NotImplemented

    def __hash__(self):
        return hash((self.x, self.y)) if self.y else hash(self.x)

    def __repr__(self):
        if self.y == 0:
            return str(self.x)
        return f"{self.x} + {self.y}*α"


def root_field(a, b):
    """Field of definition and both roots of ``X^2 - aX + b``.

    Returns ``(field, (α, β))``; the field is QQ when the roots are rational.
    """
    a, b = Fraction(a), Fraction(b)
    d = a * a - 4 * b
    if _is_square(d):
        s = Fraction(isqrt(d.numerator), isqrt(d.denominator))
        return QQ, ((a + s) / 2, (a - s) / 2)
    F = QuadraticField(a, b)
    al = F.gen()
    return F, (al, F(a) - al)


def valuation_in(base, x, p: int, root_index: int = 0) -> Fraction:
    if isinstance(base, Rationals):
        return base.valuation(x, p)
    return base.valuation(base(x), p, root_index)


# ---------------------------------------------------------------------------
# cyclotomic fields


def cyclotomic_polynomial(M: int) -> list[int]:
    """Little-endian integer coefficients of Φ_M."""
    # x^M - 1 = ∏_{d|M} Φ_d
    poly = [-1] + [0] * (M - 1) + [1]
    for d in range(1, M):
        if M % d == 0:
            poly = _poly_exact_div(poly, cyclotomic_polynomial(d))
    return poly


_CYC_CACHE: dict[int, list[int]] = {}


def _cyc(M: int) -> list[int]:
    if M not in _CYC_CACHE:
        _CYC_CACHE[M] = cyclotomic_polynomial(M)
    return _CYC_CACHE[M]


def _poly_exact_div(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    lb = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] // lb
        q[i] = c
        for j, bj in enumerate(b):
            a[i + j] -= c * bj
    if any(a):
        raise ArithmeticError("inexact polynomial division")
    return q


def euler_phi(n: int) -> int:
    out, m, d = n, n, 2
    while d * d <= m:
        if m % d == 0:
            while m % d == 0:
                m //= d
            out -= out // d
        d += 1
    if m > 1:
        out -= out // m
    return out


class CyclotomicField:
    """``K(ζ_M)`` for a base K in {QQ, QuadraticField}; elements reduced mod Φ_M.

    When K already contains part of ``Q(ζ_M)`` (a quadratic subfield), the
    ring is ``K[x]/Φ_M``, which is a product of fields; arithmetic stays
    exact and the only effect is that ``inverse`` may fail on zero divisors.
    """

    def __init__(self, M: int, base=QQ):
        if M < 1:
            raise ValueError("M must be >= 1")
        self.M = M
        self.base = base
        self.phi = _cyc(M)
        self.degree = len(self.phi) - 1

    def __eq__(self, other):
        return isinstance(other, CyclotomicField) and self.M == other.M and self.base == other.base

    def __hash__(self):
        return hash((self.M, self.base))

    def __repr__(self):
        return f"{self.base!r}(ζ_{self.M})"

    def zero(self) -> "CycElem":
        return CycElem(self, [self.base.zero()] * self.degree)

    def one(self) -> "CycElem":
        return self(1)

    def __call__(self, x) -> "CycElem":
        if isinstance(x, CycElem):
            if x.field == self:
                return x
            if x.field.base == self.base and self.M % x.field.M == 0:
                return self._lift(x)
            raise ValueError("cannot coerce between cyclotomic fields")
        c = [self.base.zero()] * self.degree
        c[0] = self.base(x)
        return CycElem(self, c)

    def _lift(self, x: "CycElem") -> "CycElem":
        step = self.M // x.field.M
        c = [self.base.zero()] * (x.field.degree * step + 1)
        for i, a in enumerate(x.coeffs):
            c[i * step] = a
        return CycElem(self, self._reduce(c))

    def zeta(self, k: int = 1) -> "CycElem":
        c = [self.base.zero()] * self.M
        c[k % self.M] = self.base.one()
        return CycElem(self, self._reduce(c))

    def root_of_unity(self, r: Fraction) -> "CycElem":
        """``exp(2πi r)``; for odd M this also covers the 2M-th roots (ζ_2M = -ζ_M^((M+1)/2))."""
        r = Fraction(r) % 1
        if (r * self.M).denominator == 1:
            return self.zeta(int(r * self.M))
        if self.M % 2 and (r * 2 * self.M).denominator == 1:
            k = int(r * 2 * self.M)
            return -self.zeta(k * (self.M + 1) // 2)
        raise ValueError(f"Q(ζ_{self.M}) does not contain exp(2πi·{r})")

    def _reduce(self, c: list) -> list:
        """Reduce a polynomial (any length) modulo Φ_M."""
        M, base = self.M, self.base
        c = list(c)
        if len(c) > M:
            folded = [base.zero()] * M
            for i, a in enumerate(c):
                folded[i % M] = folded[i % M] + a
            c = folded
        d = self.degree
        phi = self.phi
        for i in range(len(c) - 1, d - 1, -1):
            a = c[i]
            if a == 0:
                continue
            for j in range(d + 1):
                if phi[j]:
                    c[i - d + j] = c[i - d + j] - a * phi[j]
        out = c[:d] + [base.zero()] * max(0, d - len(c))
        return out


class CycElem:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: CyclotomicField, coeffs: list):
        self.field = field
        self.coeffs = coeffs

    def _c(self, o) -> "CycElem":
        return self.field(o)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coeffs)

    def __add__(self, o):
        o = self._c(o)
        return CycElem(self.field, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycElem(self.field, [-a for a in self.coeffs])

    def __sub__(self, o):
        o = self._c(o)
        return CycElem(self.field, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, o):
        return self._c(o) - self

    def __mul__(self, o):
        F = self.field
        if not isinstance(o, CycElem):
            s = F.base(o)
            return CycElem(F, [a * s for a in self.coeffs])
        o = self._c(o)
        d = F.degree
        prod = [F.base.zero()] * (2 * d - 1 if d else 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                if b == 0:
                    continue
                prod[i + j] = prod[i + j] + a * b
        return CycElem(F, F._reduce(prod))

    __rmul__ = __mul__

    def inverse(self) -> "CycElem":
        """Inverse via the extended Euclidean algorithm over the base field."""
        F = self.field
        base = F.base
        r0 = [base(c) for c in F.phi]
        r1 = list(self.coeffs)
        s0, s1 = [base.zero()], [base.one()]
        r1 = _strip(r1)
        if not r1:
            raise ZeroDivisionError("inverse of zero")
        while len(r1) > 1:
            q, r = _divmod_poly(r0, r1, base)
            r0, r1 = r1, _strip(r)
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1, base), base)
            if not r1:
                raise ZeroDivisionError("element is a zero divisor")
        c = r1[0]
        inv = [x / c for x in s1]
        return CycElem(F, F._reduce(inv))

    def __truediv__(self, o):
        if not isinstance(o, CycElem):
            s = self.field.base(o)
            return CycElem(self.field, [a / s for a in self.coeffs])
        return self * self._c(o).inverse()

    def __rtruediv__(self, o):
        return self._c(o) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = self.field.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, o):
        try:
            o = self._c(o)
        except (ValueError, TypeError):
            return NotImplemented
        return all(a == b for a, b in zip(self.coeffs, o.coeffs))

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def conj(self) -> "CycElem":
        """Complex conjugation ζ ↦ ζ^-1 (acts trivially on the base)."""
        F = self.field
        c = [F.base.zero()] * F.M
        for i, a in enumerate(self.coeffs):
            c[(-i) % F.M] = c[(-i) % F.M] + a
        return CycElem(F, F._reduce(c))

    def galois(self, k: int) -> "CycElem":
        """The automorphism ζ ↦ ζ^k (gcd(k, M) = 1)."""
        F = self.field
        if gcd(k, F.M) != 1:
            raise ValueError("k must be prime to M")
        c = [F.base.zero()] * F.M
        for i, a in enumerate(self.coeffs):
            c[(i * k) % F.M] = c[(i * k) % F.M] + a
        return CycElem(F, F._reduce(c))

    def is_rational(self) -> bool:
        return all(a == 0 for a in self.coeffs[1:])

    def rational_part(self):
        if not self.is_rational():
            raise ValueError("not in the base field")
        return self.coeffs[0]

    def to_json(self) -> dict:
        base = self.field.base
        return {"M": self.field.M, "coeffs": [base.to_json(a) for a in self.coeffs]}

    def __repr__(self):
        terms = [f"({a})*z^{i}" for i, a in enumerate(self.coeffs) if a != 0]
        return " + ".join(terms) or "0"


def _strip(c: list) -> list:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a: list, b: list, base) -> list:
    if not a or not b:
        return []
    out = [base.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _poly_sub(a: list, b: list, base) -> list:
    n = max(len(a), len(b))
    a = list(a) + [base.zero()] * (n - len(a))
    b = list(b) + [base.zero()] * (n - len(b))
    return _strip([x - y for x, y in zip(a, b)])


def _divmod_poly(a: list, b: list, base):
    a = _strip(a)
    b = _strip(b)
    if len(a) < len(b):
        return [], a
    q = [base.zero()] * (len(a) - len(b) + 1)
    a = list(a)
    lb = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / lb
        q[i] = c
        if c != 0:
            for j, bj in enumerate(b):
                a[i + j] = a[i + j] - c * bj
    return q, _strip(a[: len(b) - 1])

