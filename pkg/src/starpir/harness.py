"""Instrumented end-to-end runs and scheme verification.

Operation counting is structural: one tally per slot of the response
inner-product loop, including multiplications by zero or one, matching
closed-form per-iteration counts that do not special-case sparse
queries.  The ext_* fields of :class:`OpCounts` are those structural
tallies; base_add/base_mul are the naive polynomial-arithmetic digit
costs they imply (an extension add is m digit adds, an extension mul
m^2 digit muls, an extension-by-base mul m digit muls) and are reported
as derived estimates, not separately measured.

Reconstruction-phase counts are reported for transparency but are not
compared against the closed forms, which model response generation
only.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import codes, linalg, pir
from .codes import GrsSpec
from .pir import SchemeConfig, SchemeDerived, Variant

__all__ = [
    "EXHAUSTIVE_SPACE_LIMIT",
    "BenchReport",
    "CorrectnessReport",
    "OpCounts",
    "PrivacyReport",
    "VariantReport",
    "compare_variants",
    "expected_op_counts",
    "instrumented_retrieve",
    "transcript_retrieve",
    "verify_correctness",
    "verify_privacy",
]

EXHAUSTIVE_SPACE_LIMIT = 1 << 24


@dataclass
class OpCounts:
    """Field-operation tallies (see module docstring for conventions)."""

    ext_add: int = 0
    ext_mul: int = 0
    base_add: int = 0
    base_mul: int = 0
    ext_base_mul: int = 0

    def tally_ext_add(self, n_ops: int, m: int) -> None:
        self.ext_add += n_ops
        self.base_add += n_ops * m

    def tally_ext_mul(self, n_ops: int, m: int) -> None:
        self.ext_mul += n_ops
        self.base_mul += n_ops * m * m

    def tally_ext_base_mul(self, n_ops: int, m: int) -> None:
        self.ext_base_mul += n_ops
        self.base_mul += n_ops * m

    def __add__(self, other: "OpCounts") -> "OpCounts":
        return OpCounts(
            self.ext_add + other.ext_add,
            self.ext_mul + other.ext_mul,
            self.base_add + other.base_add,
            self.base_mul + other.base_mul,
            self.ext_base_mul + other.ext_base_mul,
        )

    def scaled(self, factor: int) -> "OpCounts":
        return OpCounts(
            self.ext_add * factor,
            self.ext_mul * factor,
            self.base_add * factor,
            self.base_mul * factor,
            self.ext_base_mul * factor,
        )

    def as_dict(self) -> dict[str, int]:
        return {
            "ext_add": self.ext_add,
            "ext_mul": self.ext_mul,
            "base_add": self.base_add,
            "base_mul": self.base_mul,
            "ext_base_mul": self.ext_base_mul,
        }


def expected_op_counts(derived: SchemeDerived) -> tuple[OpCounts, OpCounts]:
    """Closed-form response-phase counts: (per iteration, per run).

    Per iteration, n inner products of length mu*b: n(mu*b - 1)
    extension adds plus n*mu*b multiplications whose kind depends on the
    variant (extension-by-extension for plain queries, none for
    base-field queries at q = 2, extension-by-base for q > 2).
    """
    per_iteration = OpCounts()
    for _ in range(derived.n):
        pir.tally_response_ops(derived, per_iteration, derived.query_len)
    return per_iteration, per_iteration.scaled(derived.s)


def instrumented_retrieve(
    derived: SchemeDerived,
    files: pir.FileStore,
    i: int,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, OpCounts, OpCounts]:
    """Retrieve file i, returning (file, response counts, recon counts)."""
    storage = pir.encode_storage(derived, files)
    response_counts, recon_counts = OpCounts(), OpCounts()
    result = pir.retrieve_file(
        derived, storage, i, rng=rng,
        response_counter=response_counts, recon_counter=recon_counts,
    )
    return result, response_counts, recon_counts


def transcript_retrieve(
    derived: SchemeDerived,
    storage: pir.EncodedStorage,
    i: int,
    rng: np.random.Generator | None = None,
):
    """Like retrieve_file, but also returns the per-iteration protocol
    transcript (queries, responses, recovered symbols) and counters."""
    if rng is None:
        rng = np.random.default_rng(derived.cfg.rng_seed)
    response_counts, recon_counts = OpCounts(), OpCounts()
    transcript = []
    recovered: dict[int, dict[int, int]] = {a: {} for a in range(1, derived.b + 1)}
    for u in range(1, derived.s + 1):
        queries = pir.generate_queries(derived, i, u, rng)
        response = pir.compute_responses(derived, queries, storage, response_counts)
        symbols = pir.reconstruct_iteration(derived, response, u, recon_counts)
        for p, a, sym in symbols:
            recovered[a][p] = sym
        transcript.append({"queries": queries, "response": response, "symbols": symbols})
    out = np.zeros((derived.b, derived.k), dtype=np.int16)
    for a in range(1, derived.b + 1):
        positions = sorted(recovered[a])
        cols = [p - 1 for p in positions]
        y_vals = np.array([recovered[a][p] for p in positions], dtype=np.int16)
        out[a - 1] = linalg.solve(
            derived.field, derived.storage_gen[:, cols].T, y_vals, recon_counts
        )
    return out, transcript, response_counts, recon_counts


@dataclass
class PrivacyReport:
    t_checked: int
    rank_condition_ok: bool
    exhaustive_checked: bool
    max_statistical_distance: Fraction | None

    def ok(self) -> bool:
        return self.rank_condition_ok and (
            not self.exhaustive_checked or self.max_statistical_distance == 0
        )


def _rank_condition(derived: SchemeDerived, t: int) -> bool:
    # projection of the retrieval code onto every size-t coordinate set is
    # onto, i.e. the selected generator columns have rank t
    gen = derived.retrieval.gen
    for subset in combinations(range(derived.n), t):
        if linalg.rank(derived.alphabet, gen[:, list(subset)]) != t:
            return False
    return True


def _query_distributions(derived: SchemeDerived, i: int, u: int, subsets) -> list[dict]:
    """Exact distribution of the queries seen by each coordinate subset,
    over the full randomness space, for requested file i."""
    a_field = derived.alphabet
    order = a_field.order
    length = derived.query_len
    kret = derived.retrieval.k
    nmsg = length * kret
    total = order**nmsg
    counters: list[dict] = [defaultdict(int) for _ in subsets]
    chunk = 1 << 14
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        msgs = np.empty((idx.size, nmsg), dtype=np.int16)
        rem = idx
        for slot in range(nmsg):
            msgs[:, slot] = rem % order
            rem = rem // order
        block = msgs.reshape(idx.size * length, kret)
        words = linalg.mat_mul(a_field, block, derived.retrieval.gen)
        queries = words.reshape(idx.size, length, derived.n).transpose(0, 2, 1).copy()
        add_t = a_field.add_table
        for a, dl in enumerate(pir.partition_for_iteration(derived, u), start=1):
            col = (i - 1) * derived.b + (a - 1)
            for p in dl:
                queries[:, p - 1, col] = add_t[queries[:, p - 1, col], 1]
        for si, subset in enumerate(subsets):
            proj = queries[:, list(subset), :].reshape(idx.size, -1).astype(np.int64)
            keys = proj @ (order ** np.arange(proj.shape[1], dtype=np.int64))
            uniq, cnts = np.unique(keys, return_counts=True)
            for key, cnt in zip(uniq, cnts):
                counters[si][int(key)] += int(cnt)
    return counters


def verify_privacy(derived: SchemeDerived, t: int, mode: str = "rank") -> PrivacyReport:
    """Check that no t servers learn anything about the requested index.

    "rank" mode checks the exact criterion: every size-t projection of
    the retrieval code is onto (equivalently, dual distance > t), which
    makes the joint query marginal uniform and index-independent.
    "exhaustive" mode additionally enumerates the entire randomness
    space and compares the projected query distributions across file
    indices (exact statistical distance, expected 0); it refuses spaces
    larger than 2**24.
    """
    if t < 1:
        raise ValueError(f"collusion size must be >= 1, got {t}")
    if t > derived.n:
        raise ValueError(f"collusion size {t} exceeds server count {derived.n}")
    if mode not in ("rank", "exhaustive"):
        raise ValueError(f"mode must be rank|exhaustive, got {mode!r}")

    rank_ok = _rank_condition(derived, t)
    if mode == "rank":
        return PrivacyReport(t, rank_ok, False, None)

    order = derived.alphabet.order
    space = order ** (derived.query_len * derived.retrieval.k)
    if space > EXHAUSTIVE_SPACE_LIMIT:
        raise ValueError(
            f"randomness space {space} exceeds {EXHAUSTIVE_SPACE_LIMIT}; use rank mode"
        )
    subsets = list(combinations(range(derived.n), t))
    max_dist = Fraction(0)
    for u in range(1, derived.s + 1):
        per_index = [
            _query_distributions(derived, i, u, subsets)
            for i in range(1, derived.mu + 1)
        ]
        for si in range(len(subsets)):
            reference = per_index[0][si]
            for other in per_index[1:]:
                keys = set(reference) | set(other[si])
                diff = sum(abs(reference.get(kk, 0) - other[si].get(kk, 0)) for kk in keys)
                max_dist = max(max_dist, Fraction(diff, 2 * space))
    return PrivacyReport(t, rank_ok, True, max_dist)


@dataclass
class CorrectnessReport:
    ok: bool
    trials: int
    failures: list[str] = dc_field(default_factory=list)


def verify_correctness(cfg: SchemeConfig, trials: int, seed: int | None = None) -> CorrectnessReport:
    """Run random (files, index, randomness) retrievals; exact comparison."""
    derived = pir.derive_scheme(cfg)
    rng = np.random.default_rng(cfg.rng_seed if seed is None else seed)
    failures = []
    for trial in range(trials):
        files = pir.random_files(derived, rng)
        storage = pir.encode_storage(derived, files)
        i = int(rng.integers(1, derived.mu + 1))
        got = pir.retrieve_file(derived, storage, i, rng=rng)
        if not np.array_equal(got, files.files[i - 1]):
            failures.append(
                f"trial {trial}: variant={cfg.variant.value} i={i}: "
                f"retrieved {got.tolist()} != stored {files.files[i - 1].tolist()}"
            )
    return CorrectnessReport(not failures, trials, failures)


@dataclass
class VariantReport:
    variant: Variant
    rate: Fraction
    t_protect: int
    c: int
    b: int
    s: int
    op_counts: OpCounts
    star_equal_plain: bool

    def to_json(self) -> dict:
        return {
            "rate": str(self.rate),
            "t_protect": self.t_protect,
            "c": self.c,
            "b": self.b,
            "s": self.s,
            "op_counts": self.op_counts.as_dict(),
            "star_equal_plain": self.star_equal_plain,
        }


@dataclass
class BenchReport:
    """Side-by-side comparison of all variants on shared (C, D, mu, seed).

    ``entries`` maps each variant to a VariantReport, or to a string
    reason when that variant's scheme cannot be derived."""

    mu: int
    seed: int
    entries: dict[Variant, "VariantReport | str"]

    def to_json(self) -> dict:
        return {
            "mu": self.mu,
            "seed": self.seed,
            "variants": {
                v.value: (e.to_json() if isinstance(e, VariantReport) else {"unusable": e})
                for v, e in self.entries.items()
            },
        }

    def format_table(self) -> str:
        header = f"{'variant':<10} {'rate':>6} {'t':>3} {'c':>3} {'b':>3} {'s':>3} " \
                 f"{'ext_add':>8} {'ext_mul':>8} {'extxbase':>9} {'star=plain':>10}"
        lines = [header, "-" * len(header)]
        for v, e in self.entries.items():
            if isinstance(e, VariantReport):
                oc = e.op_counts
                lines.append(
                    f"{v.value:<10} {str(e.rate):>6} {e.t_protect:>3} {e.c:>3} {e.b:>3} "
                    f"{e.s:>3} {oc.ext_add:>8} {oc.ext_mul:>8} {oc.ext_base_mul:>9} "
                    f"{str(e.star_equal_plain).lower():>10}"
                )
            else:
                lines.append(f"{v.value:<10} unusable: {e}")
        return "\n".join(lines)


def compare_variants(storage: GrsSpec, retrieval_base: GrsSpec, mu: int, seed: int) -> BenchReport:
    """Build all three variants on identical inputs and report rates,
    protection levels, and measured per-run response-phase counts."""
    entries: dict[Variant, VariantReport | str] = {}
    for variant in Variant:
        cfg = SchemeConfig(storage, retrieval_base, variant, mu, seed)
        try:
            derived = pir.derive_scheme(cfg)
        except (pir.SchemeError, codes.EnumerationBudgetError) as exc:
            entries[variant] = str(exc)
            continue
        rng = np.random.default_rng(seed)
        files = pir.random_files(derived, rng)
        _, response_counts, _ = instrumented_retrieve(derived, files, 1, rng=rng)
        entries[variant] = VariantReport(
            variant=variant,
            rate=derived.rate,
            t_protect=derived.t_protect,
            c=derived.c,
            b=derived.b,
            s=derived.s,
            op_counts=response_counts,
            star_equal_plain=derived.star_equal_plain,
        )
    return BenchReport(mu, seed, entries)
