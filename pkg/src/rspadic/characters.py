"""Characters of (Z/p^v)^x, Gauss sums and interpolation constants.

A character is stored as a discrete-log table: ``χ(x) = ζ_E^table[x]`` where
E is the exponent of the unit group.  Values are realized in a cyclotomic
field on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Any, Mapping

from .fields import QQ, CyclotomicField, CycElem, euler_phi
from .local_arith import is_prime
from .magic import max_enum

TOWER_GUARD = 10**5


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class TowerCell:
    """A class ``x mod p^v`` in (Z/p^v)^x, with an optional sign at infinity."""

    v: int
    x: int
    sign: int | None = None


def _check_tower(p: int, v: int) -> None:
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if v < 0:
        raise ValueError("v must be >= 0")
    if p**v > min(TOWER_GUARD, max_enum()):
        raise ValueError(f"modulus {p}^{v} exceeds the enumeration guard")


def tower_enumerate(p: int, v: int, with_sign: bool = False) -> list[TowerCell]:
    _check_tower(p, v)
    M = p**v
    units = [x for x in range(M) if gcd(x, M) == 1] if M > 1 else [0]
    if with_sign:
        return [TowerCell(v, x, s) for s in (1, -1) for x in units]
    return [TowerCell(v, x) for x in units]


def unit_group_structure(p: int, v: int) -> tuple[int, list[tuple[int, int]]]:
    """Exponent E and generators with orders: [(g, ord)] for (Z/p^v)^x."""
    M = p**v
    if M <= 2:
        return 1, []
    if p == 2:
        if v == 2:
            return 2, [(M - 1, 2)]
        return 2 ** (v - 2), [(M - 1, 2), (5, 2 ** (v - 2))]
    order = euler_phi(M)
    g = _primitive_root(p, v)
    return order, [(g, order)]


def _primitive_root(p: int, v: int) -> int:
    M = p**v
    order = euler_phi(M)
    primes = [r for r in range(2, order + 1) if order % r == 0 and is_prime(r)]
    for g in range(2, M):
        if gcd(g, M) != 1:
            continue
        if all(pow(g, order // r, M) != 1 for r in primes):
            return g
    raise AssertionError("no primitive root")


def _discrete_logs(p: int, v: int) -> dict[int, tuple[int, ...]]:
    """x -> exponent vector in terms of the generators."""
    M = p**v
    E, gens = unit_group_structure(p, v)
    if not gens:
        return {x: () for x in range(M) if gcd(x, M) == 1} if M > 1 else {0: ()}
    logs: dict[int, tuple[int, ...]] = {}
    if len(gens) == 1:
        g, o = gens[0]
        x = 1
        for a in range(o):
            logs[x] = (a,)
            x = x * g % M
    else:
        (g1, o1), (g2, o2) = gens
        for a in range(o1):
            for b in range(o2):
                logs[pow(g1, a, M) * pow(g2, b, M) % M] = (a, b)
    return logs


@dataclass(frozen=True)
class FiniteOrderCharacter:
    """Character of (Z/p^v)^x with values ``ζ_E^table[x]``."""

    p: int
    v: int
    E: int
    table: Mapping[int, int]

    def __hash__(self):
        return hash((self.p, self.v, tuple(self.exponent_at(x) for x in sorted(self.table))))

    def __eq__(self, other):
        return (
            isinstance(other, FiniteOrderCharacter)
            and (self.p, self.v) == (other.p, other.v)
            and all(self.exponent_at(x) == other.exponent_at(x) for x in self.table)
        )

    @property
    def modulus(self) -> int:
        return self.p**self.v

    def exponent_at(self, x: int) -> Fraction | None:
        """χ(x) = exp(2πi·r) with r returned as a fraction mod 1; None when χ(x) = 0."""
        M = self.modulus
        if M == 1:
            return Fraction(0)
        x %= M
        if gcd(x, M) != 1:
            return None
        return Fraction(self.table[x], self.E) % 1

    def order(self) -> int:
        o = 1
        for e in self.table.values():
            o = _lcm(o, self.E // gcd(self.E, e % self.E) if e % self.E else 1)
        return o

    def value(self, x: int, field: CyclotomicField):
        r = self.exponent_at(x)
        if r is None:
            return field.zero()
        return field.root_of_unity(r)

    def sign(self) -> int:
        r = self.exponent_at(-1)
        return 1 if r == 0 else -1

    def is_trivial(self) -> bool:
        return all(e % self.E == 0 for e in self.table.values())

    def conj(self) -> "FiniteOrderCharacter":
        return FiniteOrderCharacter(self.p, self.v, self.E, {x: (-e) % self.E for x, e in self.table.items()})

    def __mul__(self, other: "FiniteOrderCharacter") -> "FiniteOrderCharacter":
        if (self.p, self.v) != (other.p, other.v):
            raise ValueError("characters of different moduli")
        E = _lcm(self.E, other.E)
        a, b = E // self.E, E // other.E
        return FiniteOrderCharacter(self.p, self.v, E, {x: (self.table[x] * a + other.table[x] * b) % E for x in self.table})

    def conductor_exponent(self) -> int:
        """Least c with χ trivial on units ≡ 1 mod p^c."""
        for c in range(0, self.v + 1):
            pc = self.p**c
            if all(self.table[x] % self.E == 0 for x in self.table if (x - 1) % pc == 0):
                return c
        return self.v

    def conductor(self) -> int:
        return self.p ** self.conductor_exponent()

    def is_primitive(self) -> bool:
        return self.conductor_exponent() == self.v

    def primitive(self) -> "FiniteOrderCharacter":
        """The character mod its conductor inducing this one."""
        c = self.conductor_exponent()
        if c == self.v:
            return self
        if c == 0:
            return FiniteOrderCharacter(self.p, 0, 1, {0: 0})
        # a unit y < p^c is already a unit mod p^v
        return FiniteOrderCharacter(self.p, c, self.E, {y: self.table[y] for y in _discrete_logs(self.p, c)})

    def field(self, base=QQ) -> CyclotomicField:
        """Smallest ``Q(ζ_M)`` holding values and ``ψ(a/p^v)``."""
        M = _lcm(self.modulus, self.order()) if self.modulus > 1 else 1
        if M % 4 == 2:
            M //= 2  # Q(ζ_2m) = Q(ζ_m) for odd m
        return CyclotomicField(M, base)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "v": self.v,
            "conductor": self.conductor(),
            "sign": self.sign(),
            "values": {str(x): str(self.exponent_at(x)) for x in sorted(self.table)},
        }


def character_group(p: int, v: int) -> list[FiniteOrderCharacter]:
    """All characters mod p^v, indexed by exponent vectors over the generators."""
    _check_tower(p, v)
    E, gens = unit_group_structure(p, v)
    logs = _discrete_logs(p, v)
    if not gens:
        return [FiniteOrderCharacter(p, v, 1, {x: 0 for x in logs})]
    out = []
    ranges = [range(o) for _, o in gens]
    for ks in product(*ranges):
        table = {}
        for x, ex in logs.items():
            e = 0
            for k, a, (_, o) in zip(ks, ex, gens):
                e += k * a * (E // o)
            table[x] = e % E
        out.append(FiniteOrderCharacter(p, v, E, table))
    return out


def primitive_characters(p: int, v: int) -> list[FiniteOrderCharacter]:
    return [c for c in character_group(p, v) if c.conductor_exponent() == v]


def gauss_sum(chi: FiniteOrderCharacter, field: CyclotomicField | None = None):
    """``G(χ) = Σ_{a mod f} χ(a) ζ_f^a`` for χ primitive mod f = p^v; 1 for f = 1."""
    if chi.conductor_exponent() != chi.v:
        raise ValueError("Gauss sum needs a primitive character; reduce it first")
    K = field or chi.field()
    f = chi.modulus
    if f == 1:
        return K.one()
    if K.M % f:
        raise ValueError("field does not contain ζ_f")
    step = K.M // f
    total = K.zero()
    for a in range(1, f):
        if gcd(a, f) == 1:
            total = total + chi.value(a, K) * K.zeta(a * step)
    return total


# ---------------------------------------------------------------------------
# interpolation constants


def ramified_exponent(n: int, s_crit: Fraction, s_min: Fraction) -> Fraction:
    """Exponent of N(f) in the ramified local factor."""
    return Fraction((n + 1) * n) * (Fraction(s_min) - Fraction(s_crit)) / 2 - Fraction((n + 1) * n * (n - 1), 6)


def gauss_power(n: int) -> int:
    return (n + 1) * n // 2


@dataclass
class InterpolationConstant:
    gauss_factor: Any
    local_factor: Any  # None when an unramified factor is left symbolic
    total: Any
    norm_exponent: Fraction | None
    symbolic: bool

    def to_json(self) -> dict:
        def enc(x):
            if x is None:
                return None
            if isinstance(x, CycElem):
                return x.to_json()
            return str(x)

        return {
            "gauss_factor": enc(self.gauss_factor),
            "local_factor": enc(self.local_factor),
            "total": enc(self.total),
            "norm_exponent": None if self.norm_exponent is None else str(self.norm_exponent),
            "symbolic": self.symbolic,
        }


def _is_half_integer(x: Fraction) -> bool:
    return (2 * Fraction(x)).denominator == 1 and (2 * Fraction(x)).numerator % 2 == 1


def interpolation_constant(
    chi: FiniteOrderCharacter,
    s_crit,
    s_min,
    kappa_p,
    n: int,
    critical_s: list | None = None,
    unramified_factor=None,
    field: CyclotomicField | None = None,
) -> InterpolationConstant:
    """``c(χ, s) = G(χ)^((n+1)n/2) · c(χ_p, s)``.

    For χ of conductor p^c ≠ 1 the local factor is
    ``p^(c·e) · κ_p^c`` with ``e = (n+1)n(s_min - s)/2 - (n+1)n(n-1)/6``.
    For unramified χ the local factor is ``unramified_factor`` (from the
    local zeta integral) or symbolic when absent.
    """
    s_crit, s_min = Fraction(s_crit), Fraction(s_min)
    if not (_is_half_integer(s_crit) and _is_half_integer(s_min)):
        raise ValueError("critical points are half-integers")
    if critical_s is not None and s_crit not in [Fraction(x) for x in critical_s]:
        raise ValueError(f"s = {s_crit} is not critical")
    prim = chi.primitive()
    K = field or prim.field()
    G = gauss_sum(prim, K) ** gauss_power(n)
    c = prim.v
    if c == 0:
        if unramified_factor is None:
            return InterpolationConstant(G, None, None, None, True)
        return InterpolationConstant(G, unramified_factor, G * unramified_factor, None, False)
    e = ramified_exponent(n, s_crit, s_min)
    norm = Fraction(chi.p) ** c
    # N(f)^e: e may be a half-integer only if (n+1)n(s_min-s)/2 is; it is an integer here
    if e.denominator != 1:
        raise ValueError("non-integral norm exponent")
    local = norm ** int(e) * kappa_p**c
    return InterpolationConstant(G, local, G * local, e, False)
