"""Analytic continuation along primes.

Reconstructs the p-adic Frobenius lift into an exact rational matrix series
and certifies that it is global along the identity section: constant term 1,
identities (I) and (II') exact over Q, mod-p congruence, and agreement with
the p-adic solve.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from fractions import Fraction

from .chern import FormSpec, FrobeniusLiftResult, LiftParams, alpha_target, solve_frobenius_lift
from .errors import (
    AmbiguousReconstruction,
    CertificateFailure,
    NonUnit,
    NotGlobalAlongIdentity,
)
from .ringcore import rational_reconstruct
from .tseries import EXACT, MatrixSeries, Series, SeriesContext


@dataclass
class GlobalCertificate:
    """Pass/fail record of the four exact checks, plus the precision used."""

    K: int
    constant_term_identity: bool
    identity_I_exact: bool
    identity_II_exact: bool
    congruence_mod_p: bool
    reduction_matches: bool

    def passed(self) -> bool:
        return (
            self.constant_term_identity
            and self.identity_I_exact
            and self.identity_II_exact
            and self.congruence_mod_p
            and self.reduction_matches
        )

    def as_dict(self) -> dict:
        return {
            "K": self.K,
            "constant_term_identity": self.constant_term_identity,
            "identity_I_exact": self.identity_I_exact,
            "identity_II_exact": self.identity_II_exact,
            "congruence_mod_p": self.congruence_mod_p,
            "reduction_matches": self.reduction_matches,
            "passed": self.passed(),
        }


@dataclass
class GlobalLift:
    """Exact-rational lift for one prime, with its certification record."""

    Lambda_exact: MatrixSeries
    p: int
    form: FormSpec
    D: int
    certificate: GlobalCertificate
    solver_result: FrobeniusLiftResult = None


def _rational_valuation(c, p: int) -> int:
    """p-adic valuation of a nonzero int/Fraction (0 maps to a large value)."""
    if c == 0:
        return 10**9
    num = c.numerator if isinstance(c, Fraction) else c
    den = c.denominator if isinstance(c, Fraction) else 1
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _exact_identity_matrices(form: FormSpec, params: LiftParams, ctx: SeriesContext):
    """alpha and X = (1+T)^(p) over the exact ring."""
    x = MatrixSeries.one_plus_T(ctx, EXACT)
    H = x.transpose() * x.scalar_matmul_left(form.q)
    alpha = H.entrywise_pow(params.p)
    X = x.entrywise_pow(params.p)
    return alpha, X


def _compute_certificate(Lambda_exact: MatrixSeries, result: FrobeniusLiftResult) -> GlobalCertificate:
    form, params = result.form, result.params
    ctx = Lambda_exact.ctx
    p, K = params.p, params.K
    n = form.n

    c0 = Lambda_exact.constant_matrix()
    const_ok = all(c0[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))

    alpha, X = _exact_identity_matrices(form, params, ctx)
    qmat = lambda M: M.scalar_matmul_left(form.q)

    identity_I = (Lambda_exact.transpose() * qmat(Lambda_exact) - alpha).is_zero()
    s = X.transpose() * qmat(Lambda_exact)
    identity_II = (s - s.transpose().scale(form.epsilon)).is_zero()

    # mod-p congruence: every coefficient of Lambda - X is p-integral with valuation >= 1
    diff = Lambda_exact - X
    cong = all(
        _rational_valuation(c, p) >= 1
        for row in diff.rows
        for series in row
        for c in series.terms.values()
    )

    try:
        reduction_matches = all(
            Lambda_exact.rows[i][j].to_padic(p, K) == result.Lambda.rows[i][j]
            for i in range(n)
            for j in range(n)
        )
    except NonUnit:
        reduction_matches = False

    return GlobalCertificate(
        K=K,
        constant_term_identity=const_ok,
        identity_I_exact=identity_I,
        identity_II_exact=identity_II,
        congruence_mod_p=cong,
        reduction_matches=reduction_matches,
    )


def reconstruct_global_lift(result: FrobeniusLiftResult) -> GlobalLift:
    """Rational-reconstruct every coefficient and certify the exact lift."""
    params, form = result.params, result.form
    p, K = params.p, params.K
    ctx = result.Lambda.ctx

    def reconstruct_series(s: Series) -> Series:
        out = {}
        for idx, residue in s.terms.items():
            val = rational_reconstruct(residue, p, K)
            if val is None:
                raise AmbiguousReconstruction(
                    f"coefficient of {ctx.monomial_str(idx)} (residue {residue}) "
                    f"fails the height bound at K={K}; escalate precision"
                )
            if val:
                out[idx] = EXACT.normalize(val)
        return Series(ctx, EXACT, out, _trusted=True)

    Lambda_exact = MatrixSeries(ctx, EXACT, [
        [reconstruct_series(s) for s in row] for row in result.Lambda.rows
    ])

    cert = _compute_certificate(Lambda_exact, result)
    if not cert.constant_term_identity:
        raise NotGlobalAlongIdentity(
            f"reconstructed lift has constant term != identity for {form.label()}, p={p}"
        )
    if not cert.passed():
        raise CertificateFailure(
            f"reconstructed lift fails exact checks for {form.label()}, p={p}: {cert.as_dict()}"
        )
    return GlobalLift(
        Lambda_exact=Lambda_exact,
        p=p,
        form=form,
        D=ctx.D,
        certificate=cert,
        solver_result=result,
    )


def certify_global(lift: GlobalLift) -> GlobalCertificate:
    """Re-verify all invariants of a GlobalLift from scratch."""
    return _compute_certificate(lift.Lambda_exact, lift.solver_result)


def solve_and_globalize(
    form: FormSpec, params: LiftParams, escalate: bool = True, escalation: int = 8
) -> GlobalLift:
    """Solve then reconstruct, retrying once at K + escalation on height failure."""
    result = solve_frobenius_lift(form, params)
    try:
        return reconstruct_global_lift(result)
    except (AmbiguousReconstruction, CertificateFailure):
        if not escalate:
            raise
        bigger = replace(params, K=params.K + escalation)
        return reconstruct_global_lift(solve_frobenius_lift(form, bigger))


# ---------------------------------------------------------------------------
# serialization


def coeff_str(c) -> str:
    """Exact rational as '+-num/den', den omitted when 1."""
    f = Fraction(c)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def parse_coeff(s: str) -> Fraction:
    return Fraction(s)


def global_lift_to_dict(lift: GlobalLift) -> dict:
    ctx = lift.Lambda_exact.ctx
    entries = []
    for i in range(ctx.n):
        row = []
        for j in range(ctx.n):
            series = lift.Lambda_exact.rows[i][j]
            row.append([
                {"exponents": list(ctx.exps[idx]), "coeff": coeff_str(c)}
                for idx, c in series.sorted_terms()
            ])
        entries.append(row)
    return {
        "n": ctx.n,
        "D": ctx.D,
        "p": lift.p,
        "form": {
            "kind": lift.form.kind,
            "epsilon": lift.form.epsilon,
            "q": [list(r) for r in lift.form.q],
        },
        "certificate": lift.certificate.as_dict(),
        "entries": entries,
    }


def global_lift_to_json(lift: GlobalLift) -> str:
    return json.dumps(global_lift_to_dict(lift), indent=2, sort_keys=True)
