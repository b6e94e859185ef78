"""Unramified GL(2) x GL(1) local zeta integrals via spherical Whittaker values.

Values live in Q(q^(1/2)) so that the unitary shift q^(-m(s-1/2)) stays exact.
As formal series everything is expressed in ``X = q^(-s)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Any

from .fields import QQ, QuadraticField

MAX_TRUNCATION = 200


def sqrt_field(q: int):
    """(field, q^(1/2)) with field = QQ when q is a square."""
    r = isqrt(q)
    if r * r == q:
        return QQ, Fraction(r)
    F = QuadraticField(0, -q)
    return F, F.gen()


@dataclass
class UnramifiedDatum:
    q: int
    alpha: Any
    beta: Any
    chi: Any = 1  # χ(ϖ); 0 for ramified χ

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("residue field size q must be >= 2")
        if self.alpha == 0 and self.beta == 0:
            raise ValueError("Satake parameters α = β = 0")

    @property
    def field(self):
        return sqrt_field(self.q)[0]

    @property
    def sqrt_q(self):
        return sqrt_field(self.q)[1]


def _pow(x, m: int, one):
    out = one
    for _ in range(m):
        out = out * x
    return out


def whittaker_value(datum: UnramifiedDatum, m: int):
    """``W(diag(ϖ^m, 1)) = q^(-m/2) (α^(m+1) - β^(m+1)) / (α - β)``; ``(m+1) α^m`` when α = β."""
    one = datum.field.one()
    if m < 0:
        return datum.field.zero()
    a, b = one * datum.alpha, one * datum.beta
    if a == b:
        num = (m + 1) * _pow(a, m, one)
    else:
        num = (_pow(a, m + 1, one) - _pow(b, m + 1, one)) / (a - b)
    return num / _pow(datum.sqrt_q, m, one)


def l_factor_series(datum: UnramifiedDatum, T: int) -> list:
    """Coefficients of ``1 / ((1 - αχX)(1 - βχX))`` through X^T by power-series division."""
    one = datum.field.one()
    a, b, c = one * datum.alpha, one * datum.beta, one * datum.chi
    # denominator 1 - (α+β)χ X + αβχ^2 X^2
    d1, d2 = -(a + b) * c, a * b * c * c
    out = [one]
    for m in range(1, T + 1):
        x = -(d1 * out[m - 1]) - (d2 * out[m - 2] if m >= 2 else 0 * one)
        out.append(x)
    return out


@dataclass
class LocalIntegral:
    series: list  # coefficients of X^m, m = 0..T
    l_factor: list
    matched_degree: int
    T: int

    @property
    def certified(self) -> bool:
        return self.matched_degree == self.T

    def to_json(self) -> dict:
        enc = lambda x: [str(x.x), str(x.y)] if hasattr(x, "x") else str(x)
        return {
            "T": self.T,
            "matched_degree": self.matched_degree,
            "certified": self.certified,
            "series": [enc(x) for x in self.series],
        }


def local_integral(datum: UnramifiedDatum, T: int = 30) -> LocalIntegral:
    """``Σ_{m<=T} W(m) χ(ϖ)^m q^(-m(s-1/2))`` as a polynomial in X = q^(-s), compared with the L-factor."""
    if not 0 <= T <= MAX_TRUNCATION:
        raise ValueError(f"truncation must lie in [0, {MAX_TRUNCATION}]")
    one = datum.field.one()
    c = one * datum.chi
    series = []
    for m in range(T + 1):
        # q^(-m(s-1/2)) = q^(m/2) X^m
        series.append(whittaker_value(datum, m) * _pow(c, m, one) * _pow(datum.sqrt_q, m, one))
    lf = l_factor_series(datum, T)
    matched = -1
    for m in range(T + 1):
        if series[m] != lf[m]:
            break
        matched = m
    return LocalIntegral(series, lf, matched, T)


def evaluate(datum: UnramifiedDatum, s: Fraction):
    """Exact L-factor value at a half-integral or integral s (rational function, no truncation)."""
    s = Fraction(s)
    if (2 * s).denominator != 1:
        raise ValueError("exact evaluation needs s in (1/2)Z")
    one = datum.field.one()
    X = one / _pow(datum.sqrt_q, abs(int(2 * s)), one)
    if s < 0:
        X = one / X
    a, b, c = one * datum.alpha, one * datum.beta, one * datum.chi
    den = (1 - a * c * X) * (1 - b * c * X)
    if den == 0:
        raise ZeroDivisionError(f"the L-factor has a pole at s = {s}")
    return one / den


def unramified_factor(n: int, datum: UnramifiedDatum | None, s: Fraction):
    """I_p for n = 1 (the L-factor at s); None (symbolic) for n >= 2."""
    if n != 1 or datum is None:
        return None
    return evaluate(datum, s)


def random_datum(q: int, rng: random.Random, chi=1) -> UnramifiedDatum:
    """Random nonzero Satake parameters in Q(q^(1/2))."""
    F, r = sqrt_field(q)

    def elem():
        while True:
            x = Fraction(rng.randint(-9, 9), rng.randint(1, 5)) + Fraction(rng.randint(-9, 9), rng.randint(1, 5)) * r
            if x != 0:
                return x

    return UnramifiedDatum(q, elem(), elem(), chi)
