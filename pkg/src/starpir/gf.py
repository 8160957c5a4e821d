"""Exact arithmetic in GF(q) and GF(q^m), q prime.

An element with coefficient vector (c0, ..., c_{m-1}) over GF(q) in the
polynomial basis (c0 = constant term) is encoded as the integer
c0 + c1*q + ... + c_{m-1}*q^(m-1).  Elements are plain ints (scalars) or
numpy int16 arrays of codes (vectors, matrices); the Field object that
interprets them is passed alongside.  Zero and one are always encoded as
0 and 1, and the base field GF(q) embeds as the codes 0..q-1, so
embedding is the identity on codes.

Ascending code order is the canonical element order: 0, 1, ..., q-1, x,
x+1, ...  "All of GF(q^m)" supports are always taken in this order.

Arithmetic is table-driven: dense add/neg/mul/inv/trace tables are built
once per field (naive O(m^2) polynomial multiplication, matching the
intended cost model).  The tables double as the data plane for the
vectorized linear algebra and the enumeration kernels.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

__all__ = [
    "DEFAULT_MODULI",
    "Field",
    "FieldMismatchError",
    "is_prime",
]

# Smallest-lexicographic irreducible polynomials, coefficients c0..cm.
DEFAULT_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),          # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),       # x^3 + x + 1
    (2, 4): (1, 1, 0, 0, 1),    # x^4 + x + 1
    (3, 2): (1, 0, 1),          # x^2 + 1
}


class FieldMismatchError(ValueError):
    """Two operands belong to different fields."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _poly_trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(a: list[int], b: list[int], q: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % q
    return _poly_trim(out)


def _poly_mod(a: list[int], b: list[int], q: int) -> list[int]:
    # b must be nonzero; leading coefficient inverted mod q
    a = _poly_trim(list(a))
    db = len(b) - 1
    lead_inv = pow(b[-1], -1, q)
    while len(a) - 1 >= db and a:
        shift = len(a) - 1 - db
        factor = (a[-1] * lead_inv) % q
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * bi) % q
        _poly_trim(a)
    return a


def _monic_polys(degree: int, q: int):
    # all monic polynomials of exactly the given degree, as coeff lists
    for low in range(q**degree):
        coeffs = []
        t = low
        for _ in range(degree):
            coeffs.append(t % q)
            t //= q
        yield coeffs + [1]


def _is_irreducible(p: tuple[int, ...], q: int) -> bool:
    degree = len(p) - 1
    if degree < 1 or p[-1] != 1:
        return False
    if degree == 1:
        return True
    poly = list(p)
    for d in range(1, degree // 2 + 1):
        for divisor in _monic_polys(d, q):
            if not _poly_mod(poly, divisor, q):
                return False
    return True


class Field:
    """GF(q^m) with a pinned modulus, plus its dense operation tables.

    Public table attributes (all int16 numpy arrays over element codes):

    - ``add_table[a, b]``, ``mul_table[a, b]``: binary operations
    - ``neg_table[a]``, ``inv_table[a]``: unary (inv of 0 is a 0 sentinel;
      use :meth:`inv` for the checked scalar operation)
    - ``trace_table[a]``: trace onto GF(q), values are codes < q
    - ``digit_table[a, i]``: coefficient of x^i of element a
    """

    def __init__(self, q: int, m: int, modulus: tuple[int, ...] | None = None):
        if not is_prime(q):
            raise ValueError(f"base field size must be prime, got {q}")
        if m < 1:
            raise ValueError(f"extension degree must be >= 1, got {m}")
        if modulus is None:
            if m == 1:
                modulus = (0, 1)  # x: GF(q)[x]/(x) = GF(q)
            else:
                try:
                    modulus = DEFAULT_MODULI[(q, m)]
                except KeyError:
                    raise ValueError(
                        f"no default modulus for GF({q}^{m}); supply one explicitly"
                    ) from None
        modulus = tuple(int(c) % q for c in modulus[:-1]) + (int(modulus[-1]),)
        if len(modulus) != m + 1:
            raise ValueError(f"modulus must have degree {m} ({m + 1} coefficients)")
        if modulus[-1] != 1:
            raise ValueError("modulus must be monic")
        if not _is_irreducible(modulus, q):
            raise ValueError(f"modulus {modulus} is reducible over GF({q})")

        self.q = q
        self.m = m
        self.modulus = modulus
        self.order = q**m
        self._build_tables()

    def _build_tables(self) -> None:
        q, m, order = self.q, self.m, self.order

        digits = np.empty((order, m), dtype=np.int16)
        tmp = np.arange(order)
        for i in range(m):
            digits[:, i] = tmp % q
            tmp //= q
        weights = q ** np.arange(m, dtype=np.int64)

        summed = (digits[:, None, :].astype(np.int64) + digits[None, :, :]) % q
        self.add_table = (summed @ weights).astype(np.int16)
        self.neg_table = ((((-digits.astype(np.int64)) % q) @ weights)).astype(np.int16)

        # x^t mod modulus for t < 2m-1, as coefficient rows
        red = np.zeros((2 * m - 1, m), dtype=np.int64)
        cur = [1] + [0] * (m - 1)
        red[0] = cur
        for t in range(1, 2 * m - 1):
            carry = cur[-1]
            cur = [0] + cur[:-1]
            if carry:
                cur = [(c - carry * self.modulus[i]) % q for i, c in enumerate(cur)]
            red[t] = cur

        conv = np.zeros((order, order, 2 * m - 1), dtype=np.int64)
        d64 = digits.astype(np.int64)
        for i in range(m):
            for j in range(m):
                conv[:, :, i + j] += d64[:, None, i] * d64[None, :, j]
        coeffs = (conv @ red) % q
        self.mul_table = (coeffs @ weights).astype(np.int16)

        inv = (self.mul_table == 1).argmax(axis=1).astype(np.int16)
        inv[0] = 0
        assert all(self.mul_table[a, inv[a]] == 1 for a in range(1, order))
        self.inv_table = inv

        trace = np.zeros(order, dtype=np.int16)
        frob = np.arange(order, dtype=np.int16)  # a^(q^i), starting at i=0
        for _ in range(m):
            trace = self.add_table[trace, frob]
            frob = self._vec_pow(frob, q)
        assert trace.max() < q
        self.trace_table = trace

        self.digit_table = digits

    def _vec_pow(self, v: np.ndarray, e: int) -> np.ndarray:
        result = np.ones_like(v)
        base = v
        while e:
            if e & 1:
                result = self.mul_table[result, base]
            base = self.mul_table[base, base]
            e >>= 1
        return result

    # -- scalar operations ------------------------------------------------

    def _check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise ValueError(f"element code {a} out of range for {self}")
        return a

    def check_array(self, arr) -> None:
        """Validate every entry as an element code of this field."""
        arr = np.asarray(arr)
        if arr.size and (arr.min() < 0 or arr.max() >= self.order):
            raise ValueError(f"array contains codes outside {self}")

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[self._check(a), self._check(b)])

    def sub(self, a: int, b: int) -> int:
        return int(self.add_table[self._check(a), self.neg_table[self._check(b)]])

    def neg(self, a: int) -> int:
        return int(self.neg_table[self._check(a)])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[self._check(a), self._check(b)])

    def inv(self, a: int) -> int:
        if self._check(a) == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self}")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        self._check(a)
        if e < 0:
            a, e = self.inv(a), -e
        result, base = 1, a
        while e:
            if e & 1:
                result = int(self.mul_table[result, base])
            base = int(self.mul_table[base, base])
            e >>= 1
        return result

    def trace(self, a: int) -> int:
        """Trace onto GF(q): sum of a^(q^i) for i < m.  Result is < q."""
        return int(self.trace_table[self._check(a)])

    def base_scalar_mul(self, a: int, s: int) -> int:
        """Scale by a base-field element: coefficientwise, m base muls."""
        if not 0 <= s < self.q:
            raise ValueError(f"scalar {s} not in GF({self.q})")
        return int(self.mul_table[self._check(a), s])

    def embed(self, s: int) -> int:
        """Inclusion GF(q) -> GF(q^m); the identity on codes."""
        if not 0 <= s < self.q:
            raise ValueError(f"{s} not in GF({self.q})")
        return s

    def is_in_base(self, a: int) -> bool:
        return self._check(a) < self.q

    def elements(self) -> range:
        """All q^m element codes in canonical (ascending code) order."""
        return range(self.order)

    def coeffs(self, a: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.digit_table[self._check(a)])

    def from_coeffs(self, coeffs) -> int:
        coeffs = list(coeffs)
        if len(coeffs) != self.m:
            raise ValueError(f"expected {self.m} coefficients, got {len(coeffs)}")
        code = 0
        for c in reversed(coeffs):
            if not 0 <= c < self.q:
                raise ValueError(f"coefficient {c} not in GF({self.q})")
            code = code * self.q + c
        return code

    @cached_property
    def primitive_element(self) -> int:
        """Smallest code generating the multiplicative group."""
        target = self.order - 1
        for a in range(1, self.order):
            x, steps = a, 1
            while x != 1:
                x = int(self.mul_table[x, a])
                steps += 1
            if steps == target or target == 1:
                return a
        raise AssertionError("no primitive element found")

    @cached_property
    def base_field(self) -> "Field":
        return self if self.m == 1 else Field(self.q, 1)

    # -- serialization ----------------------------------------------------

    def element_str(self, a: int) -> str:
        """Little-endian coefficient digit string, e.g. x^2+1 -> "101"."""
        sep = "" if self.q <= 10 else ","
        return sep.join(str(c) for c in self.coeffs(a))

    def parse_element(self, s: str) -> int:
        digits = list(s) if self.q <= 10 else s.split(",")
        try:
            coeffs = [int(d) for d in digits]
        except ValueError:
            raise ValueError(f"bad element string {s!r}") from None
        return self.from_coeffs(coeffs)

    def to_json(self) -> dict:
        return {"q": self.q, "m": self.m, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, obj: dict) -> "Field":
        return cls(int(obj["q"]), int(obj["m"]), tuple(obj["modulus"]) if "modulus" in obj else None)

    # -- identity ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Field)
            and (self.q, self.m, self.modulus) == (other.q, other.m, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.q, self.m, self.modulus))

    def __repr__(self) -> str:
        if self.m == 1:
            return f"GF({self.q})"
        return f"GF({self.q}^{self.m})"


def check_same_field(a: Field, b: Field) -> None:
    if a != b:
        raise FieldMismatchError(f"incompatible fields {a} and {b}")
