"""Frobenius lift solver for the arithmetic Chern connection on GL_n.

For an invertible (anti)symmetric q and an admissible odd prime p, solves
for Lambda(T) = phi_p(x) expanded along the identity (x = 1 + T), by
Hensel lifting in p-adic precision. The lift is pinned down by:

  (congruence)  Lambda == (1+T)^(p)  entrywise p-th powers, mod p
  (I)           Lambda^t q Lambda == ((1+T)^t q (1+T))^(p)   mod p^K
  (II')         s := ((1+T)^(p))^t q Lambda  satisfies  s == eps * s^t

where M^(p) means entrywise p-th powers. Each precision step has a unique
correction; if the residual compatibility ever fails we abort rather than
guess.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InadmissiblePrime, InexactDivision, NonUniqueStep, SymmetryViolation
from .ringcore import is_prime, legendre
from .tseries import EXACT, MatrixSeries, PadicRing, Series, SeriesContext


def _int_det(mat) -> int:
    """Determinant of a small integer matrix by fraction-free expansion."""
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = 0
    for j in range(n):
        if mat[0][j]:
            minor = [row[:j] + row[j + 1 :] for row in mat[1:]]
            total += (-1) ** j * mat[0][j] * _int_det(minor)
    return total


@dataclass(frozen=True)
class FormSpec:
    """(Anti)symmetric invertible integer matrix q defining the form."""

    n: int
    epsilon: int
    q: tuple
    kind: str = "custom"

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")
        q = tuple(tuple(int(c) for c in row) for row in self.q)
        object.__setattr__(self, "q", q)
        if len(q) != self.n or any(len(row) != self.n for row in q):
            raise ValueError(f"q must be {self.n}x{self.n}")
        for i in range(self.n):
            for j in range(self.n):
                if q[i][j] != self.epsilon * q[j][i]:
                    raise SymmetryViolation(
                        f"q fails q^t = {self.epsilon:+d}*q at ({i},{j})"
                    )
        if _int_det([list(r) for r in q]) == 0:
            raise ValueError("q is singular")

    @property
    def det(self) -> int:
        return _int_det([list(r) for r in self.q])

    @classmethod
    def split_sp(cls, n: int) -> "FormSpec":
        """Split symplectic form: [[0, 1_r], [-1_r, 0]], n = 2r."""
        if n % 2 or n < 2:
            raise ValueError("sp needs even n >= 2")
        r = n // 2
        q = [[0] * n for _ in range(n)]
        for i in range(r):
            q[i][r + i] = 1
            q[r + i][i] = -1
        return cls(n, -1, tuple(map(tuple, q)), kind=f"sp({n})")

    @classmethod
    def split_so_even(cls, n: int) -> "FormSpec":
        """Split even orthogonal form: [[0, 1_r], [1_r, 0]], n = 2r."""
        if n % 2 or n < 2:
            raise ValueError("so_even needs even n >= 2")
        r = n // 2
        q = [[0] * n for _ in range(n)]
        for i in range(r):
            q[i][r + i] = 1
            q[r + i][i] = 1
        return cls(n, 1, tuple(map(tuple, q)), kind=f"so({n})")

    @classmethod
    def split_so_odd(cls, n: int) -> "FormSpec":
        """Split odd orthogonal form: diag-block [1, hyperbolic r-blocks], n = 2r+1."""
        if n % 2 == 0 or n < 1:
            raise ValueError("so_odd needs odd n >= 1")
        r = n // 2
        q = [[0] * n for _ in range(n)]
        q[0][0] = 1
        for i in range(r):
            q[1 + i][1 + r + i] = 1
            q[1 + r + i][1 + i] = 1
        return cls(n, 1, tuple(map(tuple, q)), kind=f"so({n})")

    @classmethod
    def rank1(cls, q: int) -> "FormSpec":
        return cls(1, 1, ((q,),), kind=f"rank1({q})")

    def label(self) -> str:
        return self.kind


@dataclass(frozen=True)
class LiftParams:
    """Prime, p-adic precision and series truncation degree for one solve."""

    p: int
    K: int
    D: int
    N0: int = 2
    N: int = 1

    def __post_init__(self):
        if not is_prime(self.p) or self.p == 2:
            raise InadmissiblePrime(f"p={self.p} must be an odd prime")
        if (self.N0 * self.N) % self.p == 0:
            raise InadmissiblePrime(f"p={self.p} divides N0*N={self.N0 * self.N}")
        if self.K < 2:
            raise ValueError("K must be >= 2")
        if self.D < 1:
            raise ValueError("D must be >= 1")

    def validate_form(self, form: FormSpec) -> None:
        if form.det % self.p == 0:
            raise InadmissiblePrime(f"p={self.p} divides det(q)={form.det}")


@dataclass
class ResidualReport:
    """Valuation deficits of the defining identities; all zero means verified."""

    deficit_identity_I: int
    deficit_identity_II: int
    deficit_congruence: int

    def all_zero(self) -> bool:
        return (
            self.deficit_identity_I == 0
            and self.deficit_identity_II == 0
            and self.deficit_congruence == 0
        )


@dataclass
class FrobeniusLiftResult:
    """Solved lift Lambda with its parameters and residual report."""

    Lambda: MatrixSeries
    params: LiftParams
    form: FormSpec
    residual_report: ResidualReport = field(default=None)

    def constant_term_is_identity(self) -> bool:
        c = self.Lambda.constant_matrix()
        n = self.form.n
        return all(c[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))


# ---------------------------------------------------------------------------
# building blocks


def _frob_power_matrix(ctx, ring, p: int) -> MatrixSeries:
    """(1 + T)^(p): entrywise p-th powers of the generic matrix."""
    return MatrixSeries.one_plus_T(ctx, ring).entrywise_pow(p)


def alpha_target(form: FormSpec, params: LiftParams, ring=None, ctx=None) -> MatrixSeries:
    """Entrywise p-th power of H = (1+T)^t q (1+T), the image of H_q under phi_{0,p}."""
    params.validate_form(form)
    ctx = ctx or SeriesContext(form.n, params.D)
    ring = ring or PadicRing(params.p, params.K)
    x = MatrixSeries.one_plus_T(ctx, ring)
    H = x.transpose() * x.scalar_matmul_left(form.q)
    return H.entrywise_pow(params.p)


def _matrix_valuation_deficit(M: MatrixSeries, required: int) -> int:
    """max(0, required - min coefficient valuation) over all entries, for padic M."""
    ring = M.ring
    p, K = ring.p, ring.K
    worst = 0
    for row in M.rows:
        for s in row:
            for c in s.terms.values():
                v = 0
                while v < required and c % p == 0:
                    c //= p
                    v += 1
                worst = max(worst, required - v)
                if worst == required:
                    return worst
    return worst


def _divide_exact(M: MatrixSeries, pk: int, new_ring) -> MatrixSeries:
    """Divide every coefficient by p^k (must be exact) and reduce into new_ring."""
    mod = new_ring.modulus

    def div_series(s: Series) -> Series:
        out = {}
        for idx, c in s.terms.items():
            if c % pk:
                raise InexactDivision(f"coefficient {c} not divisible by {pk}")
            r = (c // pk) % mod
            if r:
                out[idx] = r
        return Series(s.ctx, new_ring, out, _trusted=True)

    return MatrixSeries(M.ctx, new_ring, [[div_series(s) for s in row] for row in M.rows])


def _lift_ring(M: MatrixSeries, ring) -> MatrixSeries:
    """Reinterpret residues of a lower-precision padic matrix in a larger ring."""
    def lift_series(s: Series) -> Series:
        return Series(s.ctx, ring, dict(s.terms), _trusted=True)

    return MatrixSeries(M.ctx, ring, [[lift_series(s) for s in row] for row in M.rows])


def _is_eps_symmetric(M: MatrixSeries, eps: int) -> bool:
    n = M.ctx.n
    for i in range(n):
        for j in range(i, n):
            if M.rows[i][j] != M.rows[j][i].scale(M.ring.from_int(eps)):
                return False
    return True


# ---------------------------------------------------------------------------
# the solver


class _Workspace:
    """Shared per-solve state: context, fixed matrices, and the mod-p inverse."""

    def __init__(self, form: FormSpec, params: LiftParams):
        params.validate_form(form)
        self.form = form
        self.params = params
        self.ctx = SeriesContext(form.n, params.D)
        self.ring = PadicRing(params.p, params.K)
        self.alpha = alpha_target(form, params, ring=self.ring, ctx=self.ctx)
        self.X = _frob_power_matrix(self.ctx, self.ring, params.p)
        # M0 = X^t q ; constant term q, invertible mod p
        self.M0 = self.X.transpose() * MatrixSeries.from_scalar_matrix(self.ctx, self.ring, form.q)
        ring1 = PadicRing(params.p, 1)
        M0_mod_p = self.M0.convert(ring1)
        self.M0_inv_mod_p = M0_mod_p.inverse()
        self.ring1 = ring1

    def q_matmul(self, M: MatrixSeries) -> MatrixSeries:
        return M.scalar_matmul_left(self.form.q)


def hensel_step(ws: _Workspace, Lambda: MatrixSeries, k: int) -> MatrixSeries:
    """One precision step: Lambda correct mod p^k -> correct mod p^(k+1)."""
    p = ws.params.p
    eps = ws.form.epsilon
    pk = p**k

    rho1_raw = ws.alpha - Lambda.transpose() * ws.q_matmul(Lambda)
    s_k = ws.M0 * Lambda
    rho2_raw = s_k - s_k.transpose().scale(ws.ring.from_int(eps))

    rho1 = _divide_exact(rho1_raw, pk, ws.ring1)
    rho2 = _divide_exact(rho2_raw, pk, ws.ring1)
    if not _is_eps_symmetric(rho1, eps):
        raise NonUniqueStep(
            f"identity-(I) residual at step k={k} is not eps-symmetric; "
            "the correction would not be unique"
        )
    half = pow(2, -1, p)
    u = (rho1 - rho2).scale(half)
    E = ws.M0_inv_mod_p * u
    return Lambda + _lift_ring(E, ws.ring).scale(pk)


def solve_frobenius_lift(form: FormSpec, params: LiftParams) -> FrobeniusLiftResult:
    """Hensel-lift Lambda from (1+T)^(p) mod p up to precision p^K."""
    ws = _Workspace(form, params)
    Lambda = ws.X
    for k in range(1, params.K):
        Lambda = hensel_step(ws, Lambda, k)
    result = FrobeniusLiftResult(Lambda=Lambda, params=params, form=form)
    result.residual_report = verify_lift_identities(result, _ws=ws)
    return result


def verify_lift_identities(result: FrobeniusLiftResult, _ws: _Workspace = None) -> ResidualReport:
    """Recompute identities (I), (II') and the mod-p congruence from scratch."""
    ws = _ws or _Workspace(result.form, result.params)
    Lambda = result.Lambda
    K, p = ws.params.K, ws.params.p
    eps = ws.form.epsilon

    res_I = ws.alpha - Lambda.transpose() * ws.q_matmul(Lambda)
    s = ws.M0 * Lambda
    res_II = s - s.transpose().scale(ws.ring.from_int(eps))
    res_cong = Lambda - ws.X

    return ResidualReport(
        deficit_identity_I=_matrix_valuation_deficit(res_I, K),
        deficit_identity_II=_matrix_valuation_deficit(res_II, K),
        deficit_congruence=_matrix_valuation_deficit(res_cong, 1),
    )


def closed_form_rank1(q: int, params: LiftParams) -> MatrixSeries:
    """n = 1 closed form: q^((p-1)/2) * (q/p) * (1+T)^p."""
    p = params.p
    if q == 0 or (2 * q) % p == 0:
        raise InadmissiblePrime(f"closed form needs p coprime to 2q, got p={p}, q={q}")
    ctx = SeriesContext(1, params.D)
    ring = PadicRing(p, params.K)
    coef = q ** ((p - 1) // 2) * legendre(q, p)
    x = MatrixSeries.one_plus_T(ctx, ring)
    return x.entrywise_pow(p).scale(ring.from_int(coef))
