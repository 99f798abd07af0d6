"""Configuration-driven command line entry point.

Commands (selected by the "command" field of a JSON config):
  delta            Fermat-quotient p-derivation of a base-ring element
  lift             solve Frobenius lifts and attempt globalization
  curvature        curvature reports for all prime pairs
  verify-theorems  run the full pipeline and classify against expectations
  classical        randomized symbolic checks of the classical formulas

Exit codes: 0 success, 1 input error, 2 expectation-check mismatch,
3 inconclusive non-vanishing detection.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import classical
from .chern import FormSpec, LiftParams, solve_frobenius_lift
from .curvature import curvature_pair, theorem_checks
from .errors import ArithChernError, ConfigError, NotGlobalAlongIdentity
from .globalize import (
    AmbiguousReconstruction,
    coeff_str,
    global_lift_to_dict,
    reconstruct_global_lift,
    solve_and_globalize,
)
from .reports import render
from .ringcore import CycloRing, frobenius_scalar, p_derivation_scalar
from .tseries import SeriesContext

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_MISMATCH = 2
EXIT_INCONCLUSIVE = 3

DEFAULTS = {"N0": 2, "N": 1, "D": 4, "K": 16, "primes": [3, 5, 7]}


def _parse_form(cfg: dict) -> FormSpec:
    form = cfg.get("form")
    if form is None:
        raise ConfigError("config needs a 'form' entry")
    if isinstance(form, str):
        form = {"kind": form}
    kind = form.get("kind", "custom")
    if kind.startswith("sp"):
        n = form.get("n") or 2 * form.get("r", 1)
        return FormSpec.split_sp(n)
    if kind.startswith("so"):
        n = form.get("n") or (2 * form.get("r", 1) + (1 if "odd" in kind else 0))
        return FormSpec.split_so_odd(n) if n % 2 else FormSpec.split_so_even(n)
    if kind == "rank1":
        return FormSpec.rank1(int(form["q"]))
    if kind == "custom":
        q = form.get("q")
        if q is None:
            raise ConfigError("custom form needs an explicit q matrix")
        epsilon = form.get("epsilon", 1)
        return FormSpec(len(q), epsilon, tuple(map(tuple, q)))
    raise ConfigError(f"unknown form kind {kind!r}")


def _parse_forms(cfg: dict) -> list:
    if "forms" in cfg:
        return [_parse_form({"form": f}) for f in cfg["forms"]]
    return [_parse_form(cfg)]


def _check_primes(cfg: dict) -> list:
    primes = cfg.get("primes", DEFAULTS["primes"])
    if not isinstance(primes, list) or not primes:
        raise ConfigError("'primes' must be a non-empty list")
    return sorted(set(int(p) for p in primes))


def _cyclo_element(ring: CycloRing, spec):
    if isinstance(spec, str):
        return ring.from_rational(Fraction(spec))
    if isinstance(spec, (int, float)):
        return ring.from_rational(Fraction(spec))
    if isinstance(spec, list):
        return ring.element([Fraction(str(c)) for c in spec])
    raise ConfigError(f"cannot parse base-ring element {spec!r}")


# ---------------------------------------------------------------------------
# command implementations


def cmd_delta(cfg: dict) -> tuple[dict, int]:
    ring = CycloRing(cfg.get("N0", DEFAULTS["N0"]), cfg.get("N", DEFAULTS["N"]))
    a = _cyclo_element(ring, cfg.get("a", "0"))
    results = []
    for p in _check_primes(cfg):
        d = p_derivation_scalar(a, p)
        f = frobenius_scalar(a, p)
        results.append({
            "title": f"p={p}",
            "p": p,
            "frobenius": [coeff_str(c) for c in f.coeffs],
            "p_derivation": [coeff_str(c) for c in d.coeffs],
        })
    report = {
        "command": "delta",
        "N0": ring.N0,
        "N": ring.N,
        "input": [coeff_str(c) for c in a.coeffs],
        "results": results,
    }
    return report, EXIT_OK


def cmd_lift(cfg: dict, escalate: bool) -> tuple[dict, int]:
    form = _parse_form(cfg)
    D, K = cfg.get("D", DEFAULTS["D"]), cfg.get("K", DEFAULTS["K"])
    results = []
    for p in _check_primes(cfg):
        params = LiftParams(p=p, K=K, D=D)
        solved = solve_frobenius_lift(form, params)
        item = {
            "title": f"{form.label()} p={p}",
            "p": p,
            "K": K,
            "D": D,
            "form": form.label(),
            "constant_term_identity": solved.constant_term_is_identity(),
            "residual_deficits": [
                solved.residual_report.deficit_identity_I,
                solved.residual_report.deficit_identity_II,
                solved.residual_report.deficit_congruence,
            ],
        }
        try:
            lift = reconstruct_global_lift(solved)
            item["global_along_identity"] = True
            item["lift"] = global_lift_to_dict(lift)
        except NotGlobalAlongIdentity:
            item["global_along_identity"] = False
            ctx = solved.Lambda.ctx
            item["constant_term"] = [
                [coeff_str(_reconstruct_const(solved, i, j)) for j in range(ctx.n)]
                for i in range(ctx.n)
            ]
        except AmbiguousReconstruction as exc:
            if not escalate:
                raise
            lift = solve_and_globalize(form, params, escalate=True)
            item["global_along_identity"] = True
            item["escalated"] = True
            item["lift"] = global_lift_to_dict(lift)
        results.append(item)
    return {"command": "lift", "form": form.label(), "results": results}, EXIT_OK


def _reconstruct_const(solved, i, j):
    from .ringcore import rational_reconstruct

    residue = solved.Lambda.rows[i][j].constant_term()
    val = rational_reconstruct(residue, solved.params.p, solved.params.K)
    return val if val is not None else residue


def cmd_curvature(cfg: dict, escalate: bool) -> tuple[dict, int]:
    form = _parse_form(cfg)
    primes = _check_primes(cfg)
    D, K = cfg.get("D", DEFAULTS["D"]), cfg.get("K", DEFAULTS["K"])
    lifts = {}
    for p in primes:
        lifts[p] = solve_and_globalize(form, LiftParams(p=p, K=K, D=D), escalate=escalate)
    results = []
    for i, p in enumerate(primes):
        for p2 in primes[i + 1 :]:
            rep = curvature_pair(lifts[p], lifts[p2])
            d = rep.as_dict()
            d["title"] = f"{form.label()} ({p},{p2})"
            results.append(d)
    return {"command": "curvature", "form": form.label(), "results": results}, EXIT_OK


def cmd_verify_theorems(cfg: dict, escalate: bool) -> tuple[dict, int]:
    forms = _parse_forms(cfg)
    primes = _check_primes(cfg)
    D, K = cfg.get("D", DEFAULTS["D"]), cfg.get("K", DEFAULTS["K"])
    summary = theorem_checks(forms, primes, K=K, D=D, escalate=escalate)
    report = {"command": "verify-theorems", "status": summary.status,
              "results": [c.as_dict() for c in summary.cases]}
    if summary.status == "fail":
        return report, EXIT_MISMATCH
    if summary.status == "inconclusive":
        return report, EXIT_INCONCLUSIVE
    return report, EXIT_OK


def cmd_classical(cfg: dict) -> tuple[dict, int]:
    import sympy

    seed = cfg.get("seed", 0)
    trials = cfg.get("trials", 5)
    m = cfg.get("m", 2)
    n = cfg.get("n", 2)
    rng = random.Random(seed)
    xs = classical.coords(m)

    def rand_poly():
        return sum(rng.randint(-2, 2) * xs[rng.randrange(m)] ** rng.randint(0, 2)
                   for _ in range(3))

    results = []
    for t in range(trials):
        q = sympy.Matrix(n, n, lambda i, j: 0)
        for i in range(n):
            for j in range(i, n):
                v = rand_poly() + (1 if i == j else 0)
                q[i, j] = v
                q[j, i] = v
        metric = classical.MetricPoly(m, q)
        G = classical.chern_classical(metric)
        ok_chern = (classical.parallelism_holds(metric, G)
                    and classical.chern_symmetry_holds(G, m, n))
        ok_lc = True
        if m == n:
            L = classical.levi_civita_classical(metric)
            ok_lc = (classical.parallelism_holds(metric, L)
                     and classical.torsion_free_holds(L, n))
        A = [sympy.Matrix(n, n, lambda i, j: rand_poly()) for _ in range(m)]
        conn = classical.LinearConn(m, n, A)
        F = classical.curvature_F(conn, 0, 1)
        X = classical.frame_symbols(n)
        ok_f = sympy.expand(classical.commutator_on_frame(conn, 0, 1) - F * X) == sympy.zeros(n, n)
        results.append({
            "title": f"trial {t}",
            "chern_identities": ok_chern,
            "levi_civita_identities": ok_lc,
            "curvature_operator_identity": ok_f,
        })
    all_ok = all(r["chern_identities"] and r["levi_civita_identities"]
                 and r["curvature_operator_identity"] for r in results)
    report = {"command": "classical", "seed": seed, "m": m, "n": n,
              "all_passed": all_ok, "results": results}
    return report, EXIT_OK if all_ok else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# driver


def run(config: dict, escalate: bool = False) -> tuple[dict, int]:
    command = config.get("command")
    if command == "delta":
        return cmd_delta(config)
    if command == "lift":
        return cmd_lift(config, escalate)
    if command == "curvature":
        return cmd_curvature(config, escalate)
    if command == "verify-theorems":
        return cmd_verify_theorems(config, escalate)
    if command == "classical":
        return cmd_classical(config)
    raise ConfigError(f"unknown command {command!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="arithchern",
        description="Exact-arithmetic Chern connections and curvature on GL_n",
    )
    parser.add_argument("--config", required=True, help="path to JSON config")
    parser.add_argument("--output", default=None, help="report output path (default stdout)")
    parser.add_argument("--format", default="json", choices=["json", "csv", "markdown"])
    parser.add_argument("--escalate", action="store_true",
                        help="allow one K/D escalation on reconstruction failure")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker count for independent prime computations")
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        report, status = run(config, escalate=args.escalate)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ArithChernError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT

    text = render(report, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
