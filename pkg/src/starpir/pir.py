"""The coded-storage retrieval scheme and its low-complexity variants.

Files are b x k matrices over GF(q^m), encoded row-wise across n
servers with a GRS storage code C (using its natural v_j*alpha_j^i
generator).  One iteration sends every server j a length mu*b query
vector: per-coordinate samples d_j of mu*b random retrieval codewords,
plus a planted unit at the slot of the wanted (file, row) for the
servers in that iteration's download set.  Server j answers the inner
product <q_j, y_j> with its storage column.  The syndrome of the
response vector under a parity check H of C * retrieval isolates the
planted symbols (any c = d-1 columns of H are independent), and after s
iterations every file row has k recovered symbols to decode against the
storage generator.

Index conventions: servers j, files i, and file rows a are 1-based;
vector coordinates are 0-based.  The query slot of (file i, row a) is
(i-1)*b + (a-1).

Variants: "plain" draws queries over GF(q^m) from the retrieval code D
itself; "subfield" from D n GF(q)^n; "trace" from Tr(D).  For the
base-field variants the planted 1 is a base-field element, so whole
queries stay base-field-valued and servers never multiply two extension
field elements (for q = 2 they only add).

Randomness is a seeded numpy PCG64 generator; a retrieval codeword is
sampled as a uniform message vector times the canonical generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from . import codes, linalg
from .codes import GrsSpec, LinearCode
from .gf import Field

__all__ = [
    "EncodedStorage",
    "FileStore",
    "QuerySet",
    "ResponseVector",
    "SchemeConfig",
    "SchemeDerived",
    "SchemeError",
    "InformationSetError",
    "UnusableSchemeError",
    "Variant",
    "compute_responses",
    "derive_scheme",
    "encode_storage",
    "generate_queries",
    "partition_for_iteration",
    "queries_from_messages",
    "random_files",
    "reconstruct_iteration",
    "retrieve_file",
    "server_response",
]


class Variant(str, Enum):
    PLAIN = "plain"
    SUBFIELD_SUBCODE = "subfield"
    TRACE_CODE = "trace"


class SchemeError(ValueError):
    pass


class UnusableSchemeError(SchemeError):
    """The star product has minimum distance 1: nothing can be retrieved."""


class InformationSetError(SchemeError):
    """Some size-k subset of the download index set is not an
    information set of the storage code, so decoding is not guaranteed."""


@dataclass(frozen=True)
class SchemeConfig:
    storage: GrsSpec
    retrieval_base: GrsSpec
    variant: Variant
    mu: int
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.storage.field != self.retrieval_base.field:
            raise SchemeError("storage and retrieval codes must share a field")
        if self.storage.alpha != self.retrieval_base.alpha:
            raise SchemeError("storage and retrieval codes must share a support")
        if self.mu < 1:
            raise SchemeError(f"file count must be >= 1, got {self.mu}")


@dataclass
class SchemeDerived:
    """Everything :func:`derive_scheme` pins down for a config.

    c symbols are recovered per iteration; b = lcm(c,k)/k rows per file
    and s = lcm(c,k)/c iterations make one retrieval download exactly
    one file.  J = {1..max(k,c)} is the download index set, ``parity``
    a canonical parity check of the star code, rate = c/n, and
    t_protect the dual distance of the retrieval code minus one.
    """

    cfg: SchemeConfig
    field: Field
    alphabet: Field
    n: int
    k: int
    storage_code: LinearCode
    storage_gen: np.ndarray
    retrieval: LinearCode
    retrieval_lifted: LinearCode
    star: LinearCode
    star_equal_plain: bool
    c: int
    b: int
    s: int
    J: tuple[int, ...]
    parity: np.ndarray
    rate: Fraction
    t_protect: int

    @property
    def mu(self) -> int:
        return self.cfg.mu

    @property
    def query_len(self) -> int:
        return self.mu * self.b


@dataclass
class FileStore:
    """mu files, each a b x k matrix over the storage field."""

    files: np.ndarray  # (mu, b, k)

    def __post_init__(self):
        self.files = np.asarray(self.files, dtype=np.int16)
        if self.files.ndim != 3:
            raise ValueError(f"files must be (mu, b, k), got shape {self.files.shape}")

    @property
    def stacked(self) -> np.ndarray:
        mu, b, k = self.files.shape
        return self.files.reshape(mu * b, k)


@dataclass
class EncodedStorage:
    """Y = stacked files x G_C; column j-1 is server j's content."""

    y: np.ndarray  # (mu*b, n)

    def column(self, j: int) -> np.ndarray:
        return self.y[:, j - 1]


@dataclass
class QuerySet:
    """Per-server query vectors for one iteration.

    ``file_index`` is client-side bookkeeping only and is never part of
    the serialized form.
    """

    file_index: int
    iteration: int
    queries: np.ndarray  # (n, mu*b), row j-1 is q_j
    alphabet: Field

    def to_json(self) -> dict:
        return {
            "iteration": self.iteration,
            "queries": [
                [self.alphabet.element_str(int(x)) for x in row] for row in self.queries
            ],
        }


@dataclass
class ResponseVector:
    r: np.ndarray  # (n,)
    field: Field

    def to_json(self) -> list[str]:
        return [self.field.element_str(int(x)) for x in self.r]


def derive_scheme(cfg: SchemeConfig, budget: int = codes.DEFAULT_ENUM_BUDGET) -> SchemeDerived:
    """Derive all protocol constants; raises :class:`SchemeError` flavors
    when the scheme is unusable or its decodability condition fails."""
    field = cfg.storage.field
    n, k = cfg.storage.n, cfg.storage.k
    storage_code = codes.grs_code(cfg.storage)
    d_code = codes.grs_code(cfg.retrieval_base)

    if cfg.variant is Variant.PLAIN:
        retrieval = d_code
        retrieval_lifted = d_code
        alphabet = field
    else:
        if cfg.variant is Variant.SUBFIELD_SUBCODE:
            retrieval = codes.subfield_subcode(d_code)
        else:
            retrieval = codes.trace_code(d_code)
        retrieval_lifted = codes.lift(retrieval, field)
        alphabet = field.base_field

    star = codes.star_product(storage_code, retrieval_lifted)
    plain_star = codes.grs_code(codes.grs_star(cfg.storage, cfg.retrieval_base))
    star_equal_plain = codes.code_equals(star, plain_star)
    if cfg.variant is Variant.PLAIN:
        assert star_equal_plain, "GRS star product disagrees with its closed form"
    if star_equal_plain:
        star = plain_star  # carries the GRS tag, unlocking d = n-k+1

    d_star = codes.min_distance(star, budget)
    c = d_star - 1
    if c == 0:
        raise UnusableSchemeError(
            "star product has minimum distance 1; no symbols can be retrieved"
        )
    b = lcm(c, k) // k
    s = lcm(c, k) // c
    assert c % b == 0 and c // b == gcd(c, k)
    J = tuple(range(1, max(k, c) + 1))

    if not (c <= k or codes.every_k_subset_informational(storage_code, [p - 1 for p in J])):
        raise InformationSetError(
            f"c > k and some size-k subset of J = {{1..{max(k, c)}}} is not an "
            "information set of the storage code; decoding is not guaranteed"
        )

    parity = codes.dual(star).gen

    if cfg.variant is Variant.PLAIN:
        t_protect = codes.min_distance(codes.grs_code(codes.grs_dual(cfg.retrieval_base))) - 1
    else:
        # dual distance of the base-field retrieval code, by enumeration
        t_protect = codes.min_distance(codes.dual(retrieval), budget) - 1

    storage_gen = cfg.storage.natural_generator()
    storage_gen.setflags(write=False)
    derived = SchemeDerived(
        cfg=cfg,
        field=field,
        alphabet=alphabet,
        n=n,
        k=k,
        storage_code=storage_code,
        storage_gen=storage_gen,
        retrieval=retrieval,
        retrieval_lifted=retrieval_lifted,
        star=star,
        star_equal_plain=star_equal_plain,
        c=c,
        b=b,
        s=s,
        J=J,
        parity=parity,
        rate=Fraction(c, n),
        t_protect=t_protect,
    )

    # any c parity-check columns inside an iteration's download set must
    # be independent; guaranteed by d(star) = c+1, so this cannot fail
    for u in range(1, s + 1):
        cols = [p - 1 for block in partition_for_iteration(derived, u) for p in block]
        assert linalg.rank(field, parity[:, sorted(cols)]) == c

    return derived


def partition_for_iteration(derived: SchemeDerived, u: int) -> list[list[int]]:
    """Download sets J_u^1..J_u^b (1-based server positions).

    Iteration 1 splits {1..c} into b consecutive blocks of c/b; each
    following iteration shifts every position by c/b cyclically within
    {1..|J|} (position |J| wraps to c/b, never to 0).
    """
    if not 1 <= u <= derived.s:
        raise SchemeError(f"iteration {u} out of range 1..{derived.s}")
    cb = derived.c // derived.b
    size = len(derived.J)
    shift = (u - 1) * cb
    return [
        sorted(((p - 1 + shift) % size) + 1 for p in range((a - 1) * cb + 1, a * cb + 1))
        for a in range(1, derived.b + 1)
    ]


def random_files(derived: SchemeDerived, rng: np.random.Generator) -> FileStore:
    shape = (derived.mu, derived.b, derived.k)
    return FileStore(rng.integers(0, derived.field.order, size=shape, dtype=np.int64))


def encode_storage(derived: SchemeDerived, files: FileStore) -> EncodedStorage:
    mu, b, k = files.files.shape
    if (mu, b, k) != (derived.mu, derived.b, derived.k):
        raise SchemeError(
            f"files shaped {(mu, b, k)}, scheme needs {(derived.mu, derived.b, derived.k)}"
        )
    derived.field.check_array(files.files)
    return EncodedStorage(linalg.mat_mul(derived.field, files.stacked, derived.storage_gen))


def queries_from_messages(derived: SchemeDerived, i: int, u: int, msgs) -> QuerySet:
    """Deterministic query construction from explicit message vectors
    (one length-dim(retrieval) message per (file, row) slot)."""
    if not 1 <= i <= derived.mu:
        raise SchemeError(f"file index {i} out of range 1..{derived.mu}")
    msgs = np.asarray(msgs, dtype=np.int16).reshape(derived.query_len, derived.retrieval.k)
    derived.alphabet.check_array(msgs)
    codewords = linalg.mat_mul(derived.alphabet, msgs, derived.retrieval.gen)
    queries = codewords.T.copy()  # row j-1 = d_j
    add_t = derived.alphabet.add_table
    for a, block in enumerate(partition_for_iteration(derived, u), start=1):
        col = (i - 1) * derived.b + (a - 1)
        for p in block:
            queries[p - 1, col] = add_t[queries[p - 1, col], 1]
    return QuerySet(i, u, queries, derived.alphabet)


def generate_queries(
    derived: SchemeDerived, i: int, u: int, rng: np.random.Generator
) -> QuerySet:
    msgs = rng.integers(
        0,
        derived.alphabet.order,
        size=(derived.query_len, derived.retrieval.k),
        dtype=np.int64,
    )
    return queries_from_messages(derived, i, u, msgs)


def tally_response_ops(derived: SchemeDerived, counter, length: int) -> None:
    """Structural operation tally for one inner product of the given
    length: length-1 accumulator additions, plus one multiplication per
    term whose kind depends on the query alphabet (none at all for
    base-field queries over characteristic 2, where terms are selected,
    not multiplied).  Counted per slot, zero operands included."""
    if counter is None:
        return
    m = derived.field.m
    counter.tally_ext_add(length - 1, m)
    if derived.cfg.variant is Variant.PLAIN:
        counter.tally_ext_mul(length, m)
    elif derived.field.q > 2:
        counter.tally_ext_base_mul(length, m)


def server_response(derived: SchemeDerived, q_j, y_j, counter=None) -> int:
    """<q_j, y_j> over GF(q^m), tallying operations on ``counter``."""
    q_j = np.asarray(q_j, dtype=np.int16)
    y_j = np.asarray(y_j, dtype=np.int16)
    if q_j.shape != (derived.query_len,) or y_j.shape != (derived.query_len,):
        raise SchemeError(
            f"query/storage length mismatch: {q_j.shape}, {y_j.shape}, "
            f"expected ({derived.query_len},)"
        )
    add_t = derived.field.add_table
    terms = derived.field.mul_table[q_j, y_j]
    acc = 0
    for t in terms:
        acc = add_t[acc, t]
    tally_response_ops(derived, counter, derived.query_len)
    return int(acc)


def compute_responses(
    derived: SchemeDerived, queries: QuerySet, storage: EncodedStorage, counter=None
) -> ResponseVector:
    r = np.array(
        [
            server_response(derived, queries.queries[j], storage.y[:, j], counter)
            for j in range(derived.n)
        ],
        dtype=np.int16,
    )
    return ResponseVector(r, derived.field)


def reconstruct_iteration(
    derived: SchemeDerived, response: ResponseVector, u: int, counter=None
) -> list[tuple[int, int, int]]:
    """Recover the planted symbols of iteration u from honest responses.

    Returns (server j, file row a, symbol) triples: the storage symbols
    y_j^i(a) for j in J_u^a.
    """
    syndrome = linalg.mat_vec(derived.field, derived.parity, response.r, counter)
    row_of = {
        p: a
        for a, block in enumerate(partition_for_iteration(derived, u), start=1)
        for p in block
    }
    positions = sorted(row_of)
    selected = derived.parity[:, [p - 1 for p in positions]]
    symbols = linalg.solve(derived.field, selected, syndrome, counter)
    return [(p, row_of[p], int(sym)) for p, sym in zip(positions, symbols)]


def retrieve_file(
    derived: SchemeDerived,
    storage: EncodedStorage,
    i: int,
    rng: np.random.Generator | None = None,
    response_counter=None,
    recon_counter=None,
) -> np.ndarray:
    """Run all s iterations and decode file i exactly (b x k matrix)."""
    if rng is None:
        rng = np.random.default_rng(derived.cfg.rng_seed)
    recovered: dict[int, dict[int, int]] = {a: {} for a in range(1, derived.b + 1)}
    for u in range(1, derived.s + 1):
        queries = generate_queries(derived, i, u, rng)
        response = compute_responses(derived, queries, storage, response_counter)
        for p, a, sym in reconstruct_iteration(derived, response, u, recon_counter):
            assert p not in recovered[a]
            recovered[a][p] = sym
    out = np.zeros((derived.b, derived.k), dtype=np.int16)
    for a in range(1, derived.b + 1):
        positions = sorted(recovered[a])
        assert len(positions) == derived.k
        cols = [p - 1 for p in positions]
        y_vals = np.array([recovered[a][p] for p in positions], dtype=np.int16)
        out[a - 1] = linalg.solve(
            derived.field, derived.storage_gen[:, cols].T, y_vals, recon_counter
        )
    return out
