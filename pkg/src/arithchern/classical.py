"""Classical symbolic mirror: linear connections, curvature, Chern and Levi-Civita.

Coefficients are multivariate polynomials over Q (sympy), standing in for
smooth functions; every identity checked here is polynomial, so nothing is
lost. Lowered Christoffel symbols G[i][j][k] carry the direction index first.
"""

from __future__ import annotations

import sympy


def coords(m: int):
    """Coordinate symbols x1..xm."""
    return sympy.symbols(f"x1:{m + 1}")


def frame_symbols(n: int):
    """Matrix-entry symbols X[i][j] for the generic frame matrix."""
    return sympy.Matrix(n, n, lambda i, j: sympy.Symbol(f"X{i + 1}{j + 1}"))


class LinearConn:
    """Linear connection given by its coefficient matrices: delta_i x = A_i x."""

    def __init__(self, m: int, n: int, A: list):
        if len(A) != m:
            raise ValueError(f"need {m} coefficient matrices, got {len(A)}")
        self.m = m
        self.n = n
        self.A = [sympy.Matrix(Ai) for Ai in A]
        for Ai in self.A:
            if Ai.shape != (n, n):
                raise ValueError(f"coefficient matrices must be {n}x{n}")

    def delta(self, i: int, expr, xs, X):
        """delta_i acting on a polynomial in coordinates and frame entries.

        Coefficient differentiation plus the linear action on entries:
        delta_i X_jk = (A_i X)_jk.
        """
        AX = self.A[i] * X
        out = sympy.diff(expr, xs[i])
        for j in range(self.n):
            for k in range(self.n):
                out += sympy.diff(expr, X[j, k]) * AX[j, k]
        return sympy.expand(out)


def curvature_F(conn: LinearConn, i: int, j: int):
    """F_ij = delta_i A_j - delta_j A_i - [A_i, A_j]."""
    if not (0 <= i < conn.m and 0 <= j < conn.m):
        raise IndexError(f"direction indices out of range: {i}, {j}")
    xs = coords(conn.m)
    Ai, Aj = conn.A[i], conn.A[j]
    dAj = Aj.applyfunc(lambda e: sympy.diff(e, xs[i]))
    dAi = Ai.applyfunc(lambda e: sympy.diff(e, xs[j]))
    return sympy.expand(dAj - dAi - (Ai * Aj - Aj * Ai))


def commutator_on_frame(conn: LinearConn, i: int, j: int):
    """[delta_i, delta_j] applied entrywise to the frame matrix."""
    xs = coords(conn.m)
    X = frame_symbols(conn.n)
    out = sympy.zeros(conn.n, conn.n)
    for a in range(conn.n):
        for b in range(conn.n):
            e = X[a, b]
            di_dj = conn.delta(i, conn.delta(j, e, xs, X), xs, X)
            dj_di = conn.delta(j, conn.delta(i, e, xs, X), xs, X)
            out[a, b] = sympy.expand(di_dj - dj_di)
    return out


class MetricPoly:
    """(Anti)symmetric polynomial matrix q over m coordinates."""

    def __init__(self, m: int, q, epsilon: int = 1):
        self.m = m
        self.q = sympy.Matrix(q)
        self.n = self.q.shape[0]
        self.epsilon = epsilon
        if self.q.shape != (self.n, self.n):
            raise ValueError("q must be square")
        from .errors import SymmetryViolation

        if sympy.expand(self.q - epsilon * self.q.T) != sympy.zeros(self.n, self.n):
            raise SymmetryViolation(f"q fails q^t = {epsilon:+d} q")


def chern_classical(metric: MetricPoly):
    """Lowered symbols G[i][j][k] = (1/2) d_i q_jk of the classical Chern connection."""
    from .errors import SymmetryViolation

    if metric.epsilon != 1:
        raise SymmetryViolation("classical Chern connection needs a symmetric q")
    xs = coords(metric.m)
    n, m = metric.n, metric.m
    return [
        [
            [sympy.expand(sympy.Rational(1, 2) * sympy.diff(metric.q[j, k], xs[i]))
             for k in range(n)]
            for j in range(n)
        ]
        for i in range(m)
    ]


def levi_civita_classical(metric: MetricPoly):
    """Lowered symbols G[k][i][j] = (1/2)(d_k q_ij + d_i q_jk - d_j q_ki); needs n == m."""
    from .errors import DimensionMismatch, SymmetryViolation

    if metric.epsilon != 1:
        raise SymmetryViolation("Levi-Civita needs a symmetric q")
    if metric.n != metric.m:
        raise DimensionMismatch("Levi-Civita lives on the tangent bundle: n must equal m")
    xs = coords(metric.m)
    n = metric.n
    q = metric.q
    return [
        [
            [sympy.expand(sympy.Rational(1, 2) * (
                sympy.diff(q[i, j], xs[k])
                + sympy.diff(q[j, k], xs[i])
                - sympy.diff(q[k, i], xs[j])
            )) for j in range(n)]
            for i in range(n)
        ]
        for k in range(n)
    ]


# ---------------------------------------------------------------------------
# identity checks


def parallelism_holds(metric: MetricPoly, G) -> bool:
    """d_i q_jk == G_ijk + G_ikj for all indices."""
    xs = coords(metric.m)
    n = metric.n
    for i in range(metric.m):
        for j in range(n):
            for k in range(n):
                if sympy.expand(sympy.diff(metric.q[j, k], xs[i]) - G[i][j][k] - G[i][k][j]) != 0:
                    return False
    return True


def chern_symmetry_holds(G, m: int, n: int) -> bool:
    """G_ijk == G_ikj (last two indices)."""
    return all(
        sympy.expand(G[i][j][k] - G[i][k][j]) == 0
        for i in range(m)
        for j in range(n)
        for k in range(n)
    )


def torsion_free_holds(G, n: int) -> bool:
    """G_ijk == G_jik (first two indices), for n == m."""
    return all(
        sympy.expand(G[i][j][k] - G[j][i][k]) == 0
        for i in range(n)
        for j in range(n)
        for k in range(n)
    )


def solve_connection_from_identities(metric: MetricPoly, torsion_free: bool):
    """Independent oracle: solve the linear symbol equations directly.

    Unknowns g_ijk; equations are parallelism plus either the Chern symmetry
    (last-two-index) or torsion-freeness (first-two-index). Returns the unique
    solution as nested lists, or None if the system is not uniquely solvable.
    """
    m, n = metric.m, metric.n
    if torsion_free and m != n:
        from .errors import DimensionMismatch

        raise DimensionMismatch("torsion-free oracle needs n == m")
    xs = coords(m)
    unknowns = [
        [[sympy.Symbol(f"g_{i}_{j}_{k}") for k in range(n)] for j in range(n)]
        for i in range(m)
    ]
    eqs = []
    for i in range(m):
        for j in range(n):
            for k in range(n):
                eqs.append(sympy.Eq(
                    unknowns[i][j][k] + unknowns[i][k][j],
                    sympy.diff(metric.q[j, k], xs[i]),
                ))
                if torsion_free:
                    eqs.append(sympy.Eq(unknowns[i][j][k], unknowns[j][i][k]))
                else:
                    eqs.append(sympy.Eq(unknowns[i][j][k], unknowns[i][k][j]))
    flat = [unknowns[i][j][k] for i in range(m) for j in range(n) for k in range(n)]
    sol = sympy.solve(eqs, flat, dict=True)
    if len(sol) != 1:
        return None
    s = sol[0]
    if len(s) != len(flat):
        return None  # underdetermined
    return [
        [[sympy.expand(s[unknowns[i][j][k]]) for k in range(n)] for j in range(n)]
        for i in range(m)
    ]
