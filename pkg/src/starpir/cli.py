"""Command-line interface: reproduce the worked examples, verify a
configured scheme, compare variants, and run single retrievals.

All output is built from exact integers, rationals, and element digit
strings, so identical (config, seed) inputs produce byte-identical
output.  Exit status: 0 on success / all checks passing, 1 when a
verification or reproduction check fails, 2 on usage or config errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import codes, harness, pir
from .codes import GrsSpec
from .gf import Field
from .pir import SchemeConfig, Variant

__all__ = ["ConfigError", "build_scheme_config", "main"]


class ConfigError(ValueError):
    pass


# -- configuration ---------------------------------------------------------


def _require(doc: dict, key: str, kind=int):
    if key not in doc:
        raise ConfigError(f"config field {key!r} is missing")
    value = doc[key]
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise ConfigError(f"config field {key!r} must be an integer, got {value!r}")
    return value


def build_scheme_config(doc: dict, overrides: dict | None = None) -> SchemeConfig:
    """Build a SchemeConfig from a parsed JSON document.

    The support is the first n elements of the field in canonical
    order; multipliers are the preset "ones" or explicit per-code
    element strings.
    """
    overrides = overrides or {}
    try:
        field = Field.from_json(_require(doc, "field", dict))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"config field 'field' is invalid: {exc}") from None
    n = _require(doc, "n")
    if not 1 <= n <= field.order:
        raise ConfigError(f"config field 'n' must be in 1..{field.order}, got {n}")
    alpha = tuple(range(n))
    storage_k = _require(doc, "storage_k")
    retrieval_dim = _require(doc, "retrieval_dim")

    multipliers = doc.get("multipliers", "ones")
    if multipliers == "ones":
        v_storage = v_retrieval = (1,) * n
    elif isinstance(multipliers, dict):
        try:
            v_storage = tuple(field.parse_element(s) for s in multipliers["storage"])
            v_retrieval = tuple(field.parse_element(s) for s in multipliers["retrieval"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"config field 'multipliers' is invalid: {exc}") from None
    else:
        raise ConfigError(
            "config field 'multipliers' must be \"ones\" or "
            "{storage: [...], retrieval: [...]}"
        )

    variant = overrides.get("variant") or doc.get("variant", "plain")
    mu = overrides["mu"] if overrides.get("mu") is not None else doc.get("mu", 1)
    seed = overrides["seed"] if overrides.get("seed") is not None else doc.get("seed", 0)
    if not isinstance(mu, int) or isinstance(mu, bool):
        raise ConfigError(f"config field 'mu' must be an integer, got {mu!r}")
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError(f"config field 'seed' must be an integer, got {seed!r}")

    try:
        storage = GrsSpec(field, storage_k, alpha, v_storage)
    except ValueError as exc:
        raise ConfigError(f"storage code invalid: {exc}") from None
    try:
        retrieval = GrsSpec(field, retrieval_dim, alpha, v_retrieval)
    except ValueError as exc:
        raise ConfigError(f"retrieval code invalid: {exc}") from None
    try:
        return SchemeConfig(storage, retrieval, Variant(variant), mu, seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _load_config(path: str, args) -> SchemeConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    overrides = {"variant": args.variant, "mu": args.mu, "seed": args.seed}
    return build_scheme_config(doc, overrides)


# -- demo -------------------------------------------------------------------

_DEMO = {
    1: dict(q=2, m=2, n=4, retrieval_dim=3, k_max=1, k_default=1,
            sub_params=(4, 3, 2), dual_sub_params=None, plain_t=3, sub_t=3,
            rate_num=lambda k: 1, rate_den=4, self_dual=False, weight_dist=None),
    2: dict(q=2, m=3, n=8, retrieval_dim=5, k_max=3, k_default=3,
            sub_params=(8, 4, 4), dual_sub_params=None, plain_t=5, sub_t=3,
            rate_num=lambda k: 4 - k, rate_den=8, self_dual=True,
            weight_dist=(1, 0, 0, 0, 14, 0, 0, 0, 1)),
    3: dict(q=3, m=2, n=9, retrieval_dim=4, k_max=5, k_default=5,
            sub_params=(9, 3, 6), dual_sub_params=(9, 6, 3), plain_t=4, sub_t=2,
            rate_num=lambda k: 6 - k, rate_den=9, self_dual=False, weight_dist=None),
}


def _cmd_demo(args) -> int:
    info = _DEMO[args.example]
    k = args.k if args.k is not None else info["k_default"]
    if not 1 <= k <= info["k_max"]:
        raise ConfigError(
            f"example {args.example} supports storage dimension 1..{info['k_max']}, got {k}"
        )
    field = Field(info["q"], info["m"])
    alpha = tuple(range(info["n"]))
    ones = (1,) * info["n"]
    storage = GrsSpec(field, k, alpha, ones)
    retrieval = GrsSpec(field, info["retrieval_dim"], alpha, ones)

    d_code = codes.grs_code(retrieval)
    sub = codes.subfield_subcode(d_code)
    sub_params = (sub.n, sub.k, codes.min_distance(sub))
    report = harness.compare_variants(storage, retrieval, args.mu, args.seed)

    checks: list[tuple[str, bool, str]] = []

    def check(name: str, ok: bool, detail: str):
        checks.append((name, bool(ok), detail))

    check("subcode-parameters", sub_params == info["sub_params"],
          f"D|q is [{sub_params[0]},{sub_params[1]},{sub_params[2]}], "
          f"expected {list(info['sub_params'])}")
    if info["self_dual"]:
        check("subcode-self-dual", codes.code_equals(codes.dual(sub), sub),
              "D|q equals its own dual")
    if info["weight_dist"] is not None:
        wd = codes.weight_distribution(sub)
        check("subcode-weight-distribution", wd == info["weight_dist"],
              f"weight distribution {wd}")
    if info["dual_sub_params"] is not None:
        dual_sub = codes.dual(sub)
        dp = (dual_sub.n, dual_sub.k, codes.min_distance(dual_sub))
        check("subcode-dual-parameters", dp == info["dual_sub_params"],
              f"dual of D|q is [{dp[0]},{dp[1]},{dp[2]}], expected {list(info['dual_sub_params'])}")

    expected_rate = Fraction(info["rate_num"](k), info["rate_den"])
    plain = report.entries[Variant.PLAIN]
    subfield = report.entries[Variant.SUBFIELD_SUBCODE]
    plain_ok = isinstance(plain, harness.VariantReport)
    sub_ok = isinstance(subfield, harness.VariantReport)
    check("plain-usable", plain_ok, "plain scheme derives")
    check("subfield-usable", sub_ok, "subfield scheme derives")
    if plain_ok:
        check("plain-rate", plain.rate == expected_rate,
              f"plain rate {plain.rate}, expected {expected_rate}")
        check("plain-protection", plain.t_protect == info["plain_t"],
              f"plain protects {plain.t_protect}, expected {info['plain_t']}")
    if sub_ok:
        check("subfield-rate", subfield.rate == expected_rate,
              f"subfield rate {subfield.rate}, expected {expected_rate}")
        check("subfield-protection", subfield.t_protect == info["sub_t"],
              f"subfield protects {subfield.t_protect}, expected {info['sub_t']}")

    all_ok = all(ok for _, ok, _ in checks)
    if args.json:
        out = {
            "example": args.example,
            "k": k,
            "mu": args.mu,
            "seed": args.seed,
            "subcode": {"n": sub_params[0], "k": sub_params[1], "d": sub_params[2]},
            "bench": report.to_json(),
            "checks": {name: {"ok": ok, "detail": detail} for name, ok, detail in checks},
            "ok": all_ok,
        }
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        print(f"example {args.example}: storage GRS_{k}, retrieval GRS_{info['retrieval_dim']} "
              f"over {field}, mu={args.mu}, seed={args.seed}")
        print(f"subfield subcode D|q: [{sub_params[0]},{sub_params[1]},{sub_params[2]}]")
        print()
        print(report.format_table())
        print()
        for name, ok, detail in checks:
            print(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}")
        print()
        print(f"result: {'PASS' if all_ok else 'FAIL'}")
    return 0 if all_ok else 1


# -- verify -----------------------------------------------------------------


def _cmd_verify(args) -> int:
    cfg = _load_config(args.config, args)
    lines: list[tuple[str, bool, str]] = []

    def check(name: str, ok: bool, detail: str):
        lines.append((name, bool(ok), detail))

    try:
        derived = pir.derive_scheme(cfg)
    except (pir.SchemeError, codes.EnumerationBudgetError) as exc:
        print(f"FAIL derive: {exc}")
        return 1

    check("derive", True,
          f"c={derived.c} b={derived.b} s={derived.s} rate={derived.rate} "
          f"t_protect={derived.t_protect}")

    # rate identity against an independently enumerated distance where feasible
    try:
        d_star = codes.min_distance(
            codes.LinearCode(derived.field, derived.star.n, derived.star.k,
                             derived.star.gen.copy()),
            budget=3_000_000,
        )
        check("rate-identity", derived.rate == Fraction(d_star - 1, derived.n),
              f"enumerated d(star)={d_star}, rate {derived.rate}")
    except codes.EnumerationBudgetError:
        check("rate-identity", derived.rate == Fraction(derived.c, derived.n),
              "star too large to enumerate; GRS closed-form distance used")

    cond = derived.c <= derived.k or codes.every_k_subset_informational(
        derived.storage_code, [p - 1 for p in derived.J])
    check("information-sets", cond,
          "every size-k subset of the download index set decodes")

    correctness = harness.verify_correctness(cfg, trials=args.trials)
    check("correctness", correctness.ok,
          f"{correctness.trials} random retrievals exact"
          + ("" if correctness.ok else f"; first failure: {correctness.failures[0]}"))

    per_it, per_run = harness.expected_op_counts(derived)
    rng = np.random.default_rng(cfg.rng_seed)
    files = pir.random_files(derived, rng)
    _, measured, _ = harness.instrumented_retrieve(derived, files, 1, rng=rng)
    check("op-counts", measured == per_run,
          f"measured {measured.as_dict()} == expected per run {per_run.as_dict()}"
          if measured == per_run else
          f"measured {measured.as_dict()} != expected {per_run.as_dict()}")

    t = derived.t_protect
    if t >= 1:
        rep = harness.verify_privacy(derived, t, mode="rank")
        check("privacy-rank", rep.rank_condition_ok,
              f"uniform projections for every {t}-subset")
    if t + 1 <= derived.n:
        rep = harness.verify_privacy(derived, t + 1, mode="rank")
        check("privacy-sharpness", not rep.rank_condition_ok,
              f"rank criterion fails at t={t + 1} as it must")
    space = derived.alphabet.order ** (derived.query_len * derived.retrieval.k)
    if t >= 1 and space <= 1 << 20:
        rep = harness.verify_privacy(derived, t, mode="exhaustive")
        check("privacy-exhaustive",
              rep.max_statistical_distance == 0,
              f"statistical distance {rep.max_statistical_distance} over "
              f"{space} randomness points per index")

    all_ok = all(ok for _, ok, _ in lines)
    if args.json:
        print(json.dumps(
            {
                "checks": {n: {"ok": ok, "detail": d} for n, ok, d in lines},
                "ok": all_ok,
            },
            indent=2, sort_keys=True))
    else:
        for name, ok, detail in lines:
            print(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}")
        print()
        print(f"result: {'PASS' if all_ok else 'FAIL'}")
    return 0 if all_ok else 1


# -- bench ------------------------------------------------------------------


def _cmd_bench(args) -> int:
    cfg = _load_config(args.config, args)
    report = harness.compare_variants(cfg.storage, cfg.retrieval_base, cfg.mu, cfg.rng_seed)
    if args.json:
        print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    else:
        print(report.format_table())
    return 0


# -- run --------------------------------------------------------------------


def _cmd_run(args) -> int:
    cfg = _load_config(args.config, args)
    if not 1 <= args.file_index <= cfg.mu:
        raise ConfigError(f"file index {args.file_index} out of range 1..{cfg.mu}")
    derived = pir.derive_scheme(cfg)
    rng = np.random.default_rng(cfg.rng_seed)
    files = pir.random_files(derived, rng)
    storage = pir.encode_storage(derived, files)
    got, transcript, response_counts, recon_counts = harness.transcript_retrieve(
        derived, storage, args.file_index, rng=rng)
    exact = bool(np.array_equal(got, files.files[args.file_index - 1]))

    fstr = derived.field.element_str
    if args.json:
        out = {
            "variant": cfg.variant.value,
            "rate": str(derived.rate),
            "t_protect": derived.t_protect,
            "iterations": [
                {
                    **({"queries": step["queries"].to_json()} if args.trace_queries else
                       {"queries": {"iteration": step["queries"].iteration}}),
                    "responses": step["response"].to_json(),
                    "recovered": [
                        {"server": p, "row": a, "symbol": fstr(sym)}
                        for p, a, sym in step["symbols"]
                    ],
                }
                for step in transcript
            ],
            "retrieved": [[fstr(int(x)) for x in row] for row in got],
            "exact": exact,
            "response_op_counts": response_counts.as_dict(),
            "reconstruction_op_counts": recon_counts.as_dict(),
        }
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        print(f"retrieving file {args.file_index} of {cfg.mu} "
              f"({cfg.variant.value} variant, rate {derived.rate}, "
              f"protects {derived.t_protect}-collusion)")
        for step in transcript:
            u = step["queries"].iteration
            print(f"iteration {u}:")
            if args.trace_queries:
                for j, row in enumerate(step["queries"].queries, start=1):
                    qstr = " ".join(derived.alphabet.element_str(int(x)) for x in row)
                    print(f"  query  server {j}: {qstr}")
            print(f"  responses: {' '.join(step['response'].to_json())}")
            for p, a, sym in step["symbols"]:
                print(f"  recovered y_{p}(row {a}) = {fstr(sym)}")
        print(f"retrieved file: {[[fstr(int(x)) for x in row] for row in got]}")
        print(f"exact: {str(exact).lower()}")
        print(f"response ops: {response_counts.as_dict()}")
        print(f"reconstruction ops: {recon_counts.as_dict()}")
    return 0 if exact else 1


# -- entry point -------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starpir",
        description="PIR over star products of GRS codes: worked-example demos, "
                    "scheme verification, variant comparison, single retrievals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", help="reproduce a worked example")
    demo.add_argument("example", type=int, choices=(1, 2, 3))
    demo.add_argument("--k", type=int, default=None, help="storage dimension")
    demo.add_argument("--mu", type=int, default=2, help="number of files")
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--json", action="store_true")
    demo.set_defaults(func=_cmd_demo)

    for name, fn, extra in (
        ("verify", _cmd_verify, "run the invariant suite for a configured scheme"),
        ("bench", _cmd_bench, "compare plain/subfield/trace variants"),
        ("run", _cmd_run, "execute one retrieval"),
    ):
        p = sub.add_parser(name, help=extra)
        p.add_argument("--config", required=True, help="path to a JSON scheme config")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--mu", type=int, default=None, help="override config mu")
        p.add_argument("--variant", choices=[v.value for v in Variant], default=None)
        p.add_argument("--json", action="store_true")
        if name == "verify":
            p.add_argument("--trials", type=int, default=20)
        if name == "run":
            p.add_argument("--file-index", type=int, required=True)
            p.add_argument("--trace-queries", action="store_true")
        p.set_defaults(func=fn)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (pir.SchemeError, codes.EnumerationBudgetError) as exc:
        print(f"scheme error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
