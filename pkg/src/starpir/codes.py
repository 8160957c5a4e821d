"""Linear codes over fields from :mod:`starpir.gf`.

Covers the code algebra the retrieval schemes are built from:
generalized Reed-Solomon construction and duals, star (coordinatewise)
products, subfield subcodes, trace codes, minimum distances and weight
distributions, information sets, and canonical equality.

A :class:`LinearCode` always stores its generator in reduced
row-echelon form, so two equal codes have byte-identical generators.
Codes built by :func:`grs_code` keep their :class:`GrsSpec` provenance,
which unlocks the exact d = n-k+1 shortcut for distances.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations

import numpy as np

from . import linalg
from ._kernels import weight_histogram
from .gf import Field, FieldMismatchError, check_same_field

__all__ = [
    "DEFAULT_ENUM_BUDGET",
    "EnumerationBudgetError",
    "GrsSpec",
    "LinearCode",
    "code_equals",
    "contains",
    "dual",
    "every_k_subset_informational",
    "from_rows",
    "grs_code",
    "grs_dual",
    "grs_star",
    "is_information_set",
    "lift",
    "min_distance",
    "star_product",
    "subfield_subcode",
    "trace_code",
    "weight_distribution",
]

DEFAULT_ENUM_BUDGET = 10_000_000


class EnumerationBudgetError(ValueError):
    """Codeword enumeration would exceed the budget; use a GRS shortcut."""


@dataclass(frozen=True)
class GrsSpec:
    """GRS_k(alpha, v): evaluations of deg<k polynomials at the support
    alpha, scaled coordinatewise by the nonzero multipliers v."""

    field: Field
    k: int
    alpha: tuple[int, ...]
    v: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))
        object.__setattr__(self, "v", tuple(int(x) for x in self.v))
        n = len(self.alpha)
        if n < 1 or len(self.v) != n:
            raise ValueError(f"support and multipliers must have equal length >= 1")
        if not 0 <= self.k <= n:
            raise ValueError(f"dimension {self.k} out of range for length {n}")
        for a in self.alpha:
            self.field._check(a)
        if len(set(self.alpha)) != n:
            raise ValueError("support entries must be pairwise distinct")
        for x in self.v:
            if self.field._check(x) == 0:
                raise ValueError("multipliers must be nonzero")

    @property
    def n(self) -> int:
        return len(self.alpha)

    def natural_generator(self) -> np.ndarray:
        """Rows v_j * alpha_j^i for i < k, not canonicalized."""
        mul_t = self.field.mul_table
        alpha = np.array(self.alpha, dtype=np.int16)
        rows = np.empty((self.k, self.n), dtype=np.int16)
        power = np.ones(self.n, dtype=np.int16)
        for i in range(self.k):
            rows[i] = mul_t[np.array(self.v, dtype=np.int16), power]
            power = mul_t[power, alpha]
        return rows

    def to_json(self) -> dict:
        f = self.field
        return {
            "field": f.to_json(),
            "k": self.k,
            "alpha": [f.element_str(a) for a in self.alpha],
            "v": [f.element_str(x) for x in self.v],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GrsSpec":
        f = Field.from_json(obj["field"])
        return cls(
            f,
            int(obj["k"]),
            tuple(f.parse_element(s) for s in obj["alpha"]),
            tuple(f.parse_element(s) for s in obj["v"]),
        )


@dataclass(frozen=True, eq=False)
class LinearCode:
    """[n, k] code with an rref-canonical generator matrix."""

    field: Field
    n: int
    k: int
    gen: np.ndarray
    grs: GrsSpec | None = dc_field(default=None, compare=False)

    def __post_init__(self):
        self.gen.setflags(write=False)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearCode) and code_equals(self, other)

    def __repr__(self) -> str:
        return f"LinearCode([{self.n},{self.k}] over {self.field})"

    def to_json(self) -> dict:
        f = self.field
        return {
            "field": f.to_json(),
            "n": self.n,
            "k": self.k,
            "generator": [[f.element_str(a) for a in row] for row in self.gen],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LinearCode":
        f = Field.from_json(obj["field"])
        rows = np.array(
            [[f.parse_element(s) for s in row] for row in obj["generator"]],
            dtype=np.int16,
        ).reshape(len(obj["generator"]), obj["n"])
        code = from_rows(f, rows)
        if code.k != obj["k"]:
            raise ValueError(f"generator has rank {code.k}, expected {obj['k']}")
        return code


def from_rows(field: Field, rows, grs: GrsSpec | None = None) -> LinearCode:
    """Span of the given rows, canonicalized."""
    rows = np.asarray(rows, dtype=np.int16)
    if rows.ndim != 2:
        raise ValueError(f"expected a 2-d row array, got shape {rows.shape}")
    field.check_array(rows)
    reduced, pivots = linalg.rref(field, rows)
    gen = reduced[: len(pivots)].copy()
    return LinearCode(field, rows.shape[1], len(pivots), gen, grs)


def full_space(field: Field, n: int) -> LinearCode:
    return from_rows(field, linalg.identity(n))


def grs_code(spec: GrsSpec) -> LinearCode:
    return from_rows(spec.field, spec.natural_generator(), grs=spec)


def grs_dual(spec: GrsSpec) -> GrsSpec:
    """Dual spec GRS_{n-k}(alpha, w), w_j = 1/(v_j * prod_{i!=j}(a_j - a_i))."""
    f = spec.field
    w = []
    for j, aj in enumerate(spec.alpha):
        prod = 1
        for i, ai in enumerate(spec.alpha):
            if i != j:
                prod = f.mul(prod, f.sub(aj, ai))
        w.append(f.inv(f.mul(spec.v[j], prod)))
    return GrsSpec(f, spec.n - spec.k, spec.alpha, tuple(w))


def dual(code: LinearCode) -> LinearCode:
    """[n, n-k] code orthogonal to every codeword, via the null space."""
    return from_rows(code.field, linalg.null_space_basis(code.field, code.gen))


def star_product(a: LinearCode, b: LinearCode) -> LinearCode:
    """Span of all coordinatewise products of generator rows."""
    check_same_field(a.field, b.field)
    if a.n != b.n:
        raise ValueError(f"length mismatch {a.n} != {b.n}")
    mul_t = a.field.mul_table
    rows = mul_t[a.gen[:, None, :], b.gen[None, :, :]].reshape(-1, a.n)
    if rows.shape[0] == 0:
        rows = rows.reshape(0, a.n)
    return from_rows(a.field, rows)


def grs_star(a: GrsSpec, b: GrsSpec) -> GrsSpec:
    """Closed-form star product of two GRS specs on the same support."""
    check_same_field(a.field, b.field)
    if a.alpha != b.alpha:
        raise ValueError("star-product specs must share the same support")
    mul_t = a.field.mul_table
    v = tuple(int(mul_t[x, y]) for x, y in zip(a.v, b.v))
    k = 0 if a.k == 0 or b.k == 0 else min(a.n, a.k + b.k - 1)
    return GrsSpec(a.field, k, a.alpha, v)


def lift(code: LinearCode, ext: Field) -> LinearCode:
    """Span of a base-field code over the extension field GF(q^m)."""
    if ext.m == 1:
        raise ValueError(f"{ext} is not an extension field")
    if code.field != ext.base_field:
        raise FieldMismatchError(f"{code.field} is not the base field of {ext}")
    return from_rows(ext, code.gen)


def subfield_subcode(code: LinearCode) -> LinearCode:
    """The base-field code D n GF(q)^n (all-base-coordinate codewords).

    Each extension-field parity constraint expands into m base-field
    constraints (one per polynomial-basis coefficient); the subcode is
    the null space of the expanded system over GF(q).
    """
    f = code.field
    if f.m == 1:
        raise ValueError(f"{f} has no proper subfield")
    h = linalg.null_space_basis(f, code.gen)
    expanded = f.digit_table[h].transpose(0, 2, 1).reshape(-1, code.n)
    base = f.base_field
    return from_rows(base, linalg.null_space_basis(base, expanded))


def trace_code(code: LinearCode) -> LinearCode:
    """The base-field code {Tr(d) : d in D}, componentwise trace.

    Spanned by Tr(beta^e * g) for generator rows g and 0 <= e < m, with
    beta the field's primitive element (its powers form a basis over
    GF(q), so the span exhausts the trace image).
    """
    f = code.field
    if f.m == 1:
        raise ValueError(f"{f} has no proper subfield")
    mul_t, trace_t = f.mul_table, f.trace_table
    beta = f.primitive_element
    rows = [trace_t[mul_t[f.pow(beta, e), code.gen]] for e in range(f.m)]
    stacked = np.concatenate(rows, axis=0) if rows else np.zeros((0, code.n), np.int16)
    return from_rows(f.base_field, stacked.reshape(-1, code.n))


def min_distance(code: LinearCode, budget: int = DEFAULT_ENUM_BUDGET) -> int:
    """Minimum Hamming weight over nonzero codewords.

    GRS-built codes use the exact MDS value n-k+1; the zero code gets
    n+1 (the [n,0,n+1] convention); everything else is enumerated, up to
    ``budget`` codewords.
    """
    if code.k == 0:
        return code.n + 1
    if code.grs is not None:
        return code.n - code.k + 1
    if code.k == code.n:
        return 1
    hist = _enumerate_weights(code, budget)
    for w in range(1, code.n + 1):
        if hist[w]:
            return w
    raise AssertionError("nonzero code with no nonzero codeword")


def weight_distribution(code: LinearCode, budget: int = DEFAULT_ENUM_BUDGET) -> tuple[int, ...]:
    """(A_0, ..., A_n): number of codewords of each weight, enumerated."""
    if code.k == 0:
        return (1,) + (0,) * code.n
    return tuple(int(x) for x in _enumerate_weights(code, budget))


def _enumerate_weights(code: LinearCode, budget: int) -> np.ndarray:
    words = code.field.order**code.k
    if words > budget:
        raise EnumerationBudgetError(
            f"{words} codewords exceed the enumeration budget {budget}; "
            "use the GRS shortcut or an equal known code"
        )
    f = code.field
    return weight_histogram(code.gen, f.add_table, f.mul_table, f.order)


def is_information_set(code: LinearCode, positions) -> bool:
    """True iff the k generator columns at ``positions`` are invertible."""
    cols = sorted(set(int(p) for p in positions))
    if len(cols) != code.k:
        return False
    return linalg.rank(code.field, code.gen[:, cols]) == code.k


def every_k_subset_informational(code: LinearCode, positions) -> bool:
    cols = sorted(set(int(p) for p in positions))
    if len(cols) < code.k:
        return False
    return all(
        is_information_set(code, subset) for subset in combinations(cols, code.k)
    )


def code_equals(a: LinearCode, b: LinearCode) -> bool:
    return (
        a.field == b.field
        and a.n == b.n
        and a.k == b.k
        and bool(np.array_equal(a.gen, b.gen))
    )


def contains(outer: LinearCode, inner: LinearCode) -> bool:
    """True iff every codeword of ``inner`` lies in ``outer``."""
    check_same_field(outer.field, inner.field)
    if outer.n != inner.n:
        raise ValueError(f"length mismatch {outer.n} != {inner.n}")
    if inner.k == 0:
        return True
    stacked = np.vstack([outer.gen, inner.gen])
    return linalg.rank(outer.field, stacked) == outer.k
