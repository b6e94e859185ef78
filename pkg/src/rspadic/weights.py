"""Arithmetic weights for res_{k/Q} GL_n and their critical integers.

Weights are stored per field embedding.  A field is described by its real
embedding labels and its complex-conjugate label pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import prod
from typing import Mapping, Sequence


@dataclass(frozen=True)
class NumberFieldDesc:
    """Embedding data of a number field.

    ``cm`` marks a totally imaginary field whose units come (up to finite
    index) from a totally real subfield; this decides which infinity types
    survive on an arithmetic subgroup.  Imaginary quadratic fields are CM
    automatically.
    """

    real: tuple[str, ...] = ()
    pairs: tuple[tuple[str, str], ...] = ()
    cm: bool = False

    def __post_init__(self):
        labels = list(self.real) + [x for pr in self.pairs for x in pr]
        if not labels:
            raise ValueError("a field needs at least one embedding")
        if len(set(labels)) != len(labels):
            raise ValueError("embedding labels must be distinct")
        if self.cm and self.real:
            raise ValueError("a CM field has no real embeddings")
        if not self.real and len(self.pairs) == 1:
            object.__setattr__(self, "cm", True)

    @property
    def embeddings(self) -> tuple[str, ...]:
        return self.real + tuple(x for pr in self.pairs for x in pr)

    @property
    def degree(self) -> int:
        return len(self.embeddings)

    def conj(self, label: str) -> str:
        if label in self.real:
            return label
        for a, b in self.pairs:
            if label == a:
                return b
            if label == b:
                return a
        raise KeyError(label)

    def is_real(self, label: str) -> bool:
        return label in self.real

    @property
    def totally_real(self) -> bool:
        return not self.pairs

    def places(self) -> list[tuple[str, ...]]:
        return [(r,) for r in self.real] + [tuple(pr) for pr in self.pairs]

    def to_json(self) -> dict:
        return {"real": list(self.real), "pairs": [list(p) for p in self.pairs], "cm": self.cm}

    @classmethod
    def from_json(cls, data: Mapping) -> "NumberFieldDesc":
        return cls(tuple(data.get("real", ())), tuple(tuple(p) for p in data.get("pairs", ())), bool(data.get("cm", False)))


def rationals() -> NumberFieldDesc:
    return NumberFieldDesc(real=("id",))


def real_quadratic() -> NumberFieldDesc:
    return NumberFieldDesc(real=("r1", "r2"))


def imaginary_quadratic() -> NumberFieldDesc:
    return NumberFieldDesc(pairs=(("i", "ic"),))


@dataclass(frozen=True)
class WeightTuple:
    n: int
    field: NumberFieldDesc
    mu: Mapping[str, tuple[int, ...]] = field(hash=False)

    def __post_init__(self):
        if set(self.mu) != set(self.field.embeddings):
            raise ValueError("weights must be given for exactly the field embeddings")
        fixed = {}
        for k, vec in self.mu.items():
            vec = tuple(int(x) for x in vec)
            if len(vec) != self.n:
                raise ValueError(f"weight at {k} has length {len(vec)}, expected {self.n}")
            if any(vec[i] < vec[i + 1] for i in range(self.n - 1)):
                raise ValueError(f"weight at {k} is not dominant: {vec}")
            fixed[k] = vec
        object.__setattr__(self, "mu", fixed)

    def __getitem__(self, label: str) -> tuple[int, ...]:
        return self.mu[label]

    def __eq__(self, other):
        return isinstance(other, WeightTuple) and (self.n, self.field, dict(self.mu)) == (other.n, other.field, dict(other.mu))

    def to_json(self) -> dict:
        return {k: list(self.mu[k]) for k in self.field.embeddings}


def uniform(n: int, fld: NumberFieldDesc, vec: Sequence[int]) -> WeightTuple:
    return WeightTuple(n, fld, {k: tuple(vec) for k in fld.embeddings})


@dataclass(frozen=True)
class WeightPair:
    mu: WeightTuple
    nu: WeightTuple

    def __post_init__(self):
        if self.mu.n != self.nu.n + 1:
            raise ValueError("mu must have rank n+1 and nu rank n")
        if self.mu.field != self.nu.field:
            raise ValueError("mu and nu must live on the same field")

    @property
    def n(self) -> int:
        return self.nu.n

    @property
    def field(self) -> NumberFieldDesc:
        return self.mu.field


# ---------------------------------------------------------------------------
# purity and the three operations preserving it


def is_pure(w: WeightTuple) -> tuple[bool, int | None]:
    """``μ_{ι,i} + μ_{ῑ,n+1-i}`` constant over all ι, i; returns (pure, w)."""
    values = set()
    for k in w.field.embeddings:
        a, b = w.mu[k], w.mu[w.field.conj(k)]
        for i in range(w.n):
            values.add(a[i] + b[w.n - 1 - i])
    if len(values) == 1:
        return True, values.pop()
    return False, None


def tate_twist(w: WeightTuple, j: int) -> WeightTuple:
    return WeightTuple(w.n, w.field, {k: tuple(x + j for x in v) for k, v in w.mu.items()})


def dual(w: WeightTuple) -> WeightTuple:
    return WeightTuple(w.n, w.field, {k: tuple(-x for x in reversed(v)) for k, v in w.mu.items()})


def conjugate(w: WeightTuple, sigma: Mapping[str, str] | None = None) -> WeightTuple:
    """``μ^σ``: the weight at ι becomes the weight at σ(ι); default σ = complex conjugation."""
    if sigma is None:
        sigma = {k: w.field.conj(k) for k in w.field.embeddings}
    if sorted(sigma.values()) != sorted(w.field.embeddings):
        raise ValueError("sigma must permute the embeddings")
    return WeightTuple(w.n, w.field, {sigma[k]: v for k, v in w.mu.items()})


def dual_pair(pair: WeightPair) -> WeightPair:
    return WeightPair(dual(pair.mu), dual(pair.nu))


# ---------------------------------------------------------------------------
# criticality


def interlacing_range(mu: Sequence[int], nu: Sequence[int]) -> range:
    """The j with ``μ_i >= j - ν_{n+1-i} >= μ_{i+1}`` for all i (a range)."""
    n = len(nu)
    lo, hi = None, None
    for i in range(n):
        a = mu[i] + nu[n - 1 - i]
        b = mu[i + 1] + nu[n - 1 - i]
        hi = a if hi is None else min(hi, a)
        lo = b if lo is None else max(lo, b)
    return range(lo, hi + 1) if lo <= hi else range(0)


def embedding_ranges(pair: WeightPair) -> dict[str, range]:
    return {k: interlacing_range(pair.mu[k], pair.nu[k]) for k in pair.field.embeddings}


def critical_set(pair: WeightPair) -> list[int]:
    ranges = list(embedding_ranges(pair).values())
    common = set(ranges[0])
    for r in ranges[1:]:
        common &= set(r)
    return sorted(common)


def invariant_types(fld: NumberFieldDesc, per_embedding: Mapping[str, Sequence[int]]) -> list[dict[str, int]]:
    """Infinity types (j_ι) allowed on an arithmetic subgroup, restricted to given candidates.

    Non-CM fields: only constant j (powers of the norm).  CM fields:
    ``j_ι + j_ῑ`` independent of the conjugate pair.
    """
    labels = fld.embeddings
    out = []
    for combo in product(*(per_embedding[k] for k in labels)):
        j = dict(zip(labels, combo))
        if fld.cm:
            sums = {j[a] + j[b] for a, b in fld.pairs}
            ok = len(sums) <= 1
        else:
            ok = len(set(combo)) <= 1
        if ok:
            out.append(j)
    return out


def invariant_dimension(pair: WeightPair) -> int:
    """Dimension of invariants of M_μ ⊗ M_ν under an arithmetic subgroup of GL_n.

    Each embedding contributes a multiplicity-one line for every j in its
    interlacing range; the arithmetic subgroup contains the derived group,
    and the surviving determinant characters are those of ``invariant_types``.
    """
    return len(invariant_types(pair.field, embedding_ranges(pair)))


def derived_invariant_dimension(pair: WeightPair) -> int:
    """Invariants under the derived group alone: product of range lengths."""
    return prod(len(r) for r in embedding_ranges(pair).values())


# ---------------------------------------------------------------------------
# cohomological counting at infinity


def bottom_degree(n: int, fld: NumberFieldDesc) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    return len(fld.real) * (n * n // 4) + len(fld.pairs) * (n * (n - 1) // 2)


def place_is_pure(nu: WeightTuple, place: tuple[str, ...]) -> bool:
    a = place[0]
    b = place[-1]
    x, y = nu.mu[a], nu.mu[b]
    n = nu.n
    return len({x[i] + y[n - 1 - i] for i in range(n)}) == 1


def omega_count(nu: WeightTuple, place: tuple[str, ...], real_even_count: int = 1) -> int:
    """Number of tempered cohomological representations at an archimedean place.

    The real-place rows of the source trichotomy both read "n even"; the
    default ``real_even_count=1`` gives 1 for n even and 2 for n odd, and
    ``real_even_count=2`` swaps the two.
    """
    if real_even_count not in (1, 2):
        raise ValueError("real_even_count must be 1 or 2")
    if not place_is_pure(nu, place):
        return 0
    if len(place) == 2:
        return 1
    even = nu.n % 2 == 0
    if real_even_count == 1:
        return 1 if even else 2
    return 2 if even else 1


def analyze(pair: WeightPair) -> dict:
    pure_mu, w_mu = is_pure(pair.mu)
    pure_nu, w_nu = is_pure(pair.nu)
    crit = critical_set(pair)
    return {
        "n": pair.n,
        "mu_pure": pure_mu,
        "mu_purity_weight": w_mu,
        "nu_pure": pure_nu,
        "nu_purity_weight": w_nu,
        "critical_set": crit,
        "j_min": crit[0] if crit else None,
        "invariant_dimension": invariant_dimension(pair),
        "derived_invariant_dimension": derived_invariant_dimension(pair),
        "phantom_components": invariant_dimension(pair) - len(crit),
        "bottom_degree_mu": bottom_degree(pair.n + 1, pair.field),
        "bottom_degree_nu": bottom_degree(pair.n, pair.field),
    }


def pair_from_json(data: Mapping) -> WeightPair:
    fld = NumberFieldDesc.from_json(data["field"])
    mu = {k: tuple(v) for k, v in data["mu"].items()}
    nu = {k: tuple(v) for k, v in data["nu"].items()}
    n = len(next(iter(nu.values())))
    return WeightPair(WeightTuple(n + 1, fld, mu), WeightTuple(n, fld, nu))
