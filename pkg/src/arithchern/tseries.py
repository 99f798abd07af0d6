"""Truncated multivariate power series in the n^2 variables T_ij.

Sparse term storage keyed by monomial index in a shared SeriesContext;
coefficients are either residues mod p^K (plain ints) or exact rationals
(ints / Fractions). Total-degree truncation at D.

The multiply kernel buckets terms by total degree so a product never
touches pairs whose degrees exceed the truncation; native int arithmetic
in the inner loop carries both coefficient rings.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement

from .errors import (
    NonUnit,
    NonzeroConstantTerm,
    RingMismatch,
    SingularConstantTerm,
)

# ---------------------------------------------------------------------------
# coefficient rings


class ExactRing:
    """Exact rational coefficients, stored as int when the denominator is 1."""

    tag = "exact"

    def normalize(self, c):
        if isinstance(c, Fraction):
            return c.numerator if c.denominator == 1 else c
        return c

    def from_int(self, v: int):
        return v

    def inv(self, c):
        if c == 0:
            raise NonUnit("division by zero")
        return self.normalize(Fraction(1) / c)

    def __eq__(self, other):
        return isinstance(other, ExactRing)

    def __hash__(self):
        return hash("exact")

    def __repr__(self):
        return "ExactRing()"


class PadicRing:
    """Coefficients are residues mod p^K, stored as plain ints in [0, p^K)."""

    tag = "padic"

    def __init__(self, p: int, K: int):
        self.p = p
        self.K = K
        self.modulus = p**K

    def normalize(self, c: int) -> int:
        return c % self.modulus

    def from_int(self, v: int) -> int:
        return v % self.modulus

    def inv(self, c: int) -> int:
        if c % self.p == 0:
            raise NonUnit(f"{c} is not a unit mod {self.p}^{self.K}")
        return pow(c, -1, self.modulus)

    def __eq__(self, other):
        return isinstance(other, PadicRing) and (self.p, self.K) == (other.p, other.K)

    def __hash__(self):
        return hash(("padic", self.p, self.K))

    def __repr__(self):
        return f"PadicRing({self.p}, {self.K})"


EXACT = ExactRing()


# ---------------------------------------------------------------------------
# monomial context


class SeriesContext:
    """Monomial bookkeeping for n x n matrix variables truncated at total degree D.

    Monomials are enumerated in graded lexicographic order; index 0 is the
    constant monomial. Product index pairs are memoized lazily.
    """

    _cache: dict[tuple[int, int], "SeriesContext"] = {}

    def __new__(cls, n: int, D: int):
        key = (n, D)
        if key in cls._cache:
            return cls._cache[key]
        self = super().__new__(cls)
        self.n = n
        self.D = D
        self.nvars = n * n
        exps: list[tuple[int, ...]] = []
        for d in range(D + 1):
            layer = set()
            for combo in combinations_with_replacement(range(self.nvars), d):
                e = [0] * self.nvars
                for v in combo:
                    e[v] += 1
                layer.add(tuple(e))
            exps.extend(sorted(layer, reverse=True))
        self.exps = exps
        self.index = {e: i for i, e in enumerate(exps)}
        self.degree = [sum(e) for e in exps]
        self.count = len(exps)
        self._mul_memo: dict[tuple[int, int], int] = {}
        cls._cache[key] = self
        return self

    def var_index(self, i: int, j: int) -> int:
        """Monomial index of the single variable T_ij (row-major)."""
        e = [0] * self.nvars
        e[i * self.n + j] = 1
        return self.index[tuple(e)]

    def mul_index(self, a: int, b: int) -> int:
        memo = self._mul_memo
        key = (a, b) if a <= b else (b, a)
        k = memo.get(key)
        if k is None:
            ea, eb = self.exps[a], self.exps[b]
            k = self.index[tuple(x + y for x, y in zip(ea, eb))]
            memo[key] = k
        return k

    def monomial_str(self, idx: int) -> str:
        e = self.exps[idx]
        if not any(e):
            return "1"
        parts = []
        for v, exp in enumerate(e):
            if exp:
                i, j = divmod(v, self.n)
                name = f"T{i + 1}{j + 1}"
                parts.append(name if exp == 1 else f"{name}^{exp}")
        return "*".join(parts)

    def __repr__(self):
        return f"SeriesContext(n={self.n}, D={self.D})"


# ---------------------------------------------------------------------------
# series


class Series:
    """One truncated power series over a SeriesContext and coefficient ring."""

    __slots__ = ("ctx", "ring", "terms")

    def __init__(self, ctx: SeriesContext, ring, terms=None, _trusted=False):
        self.ctx = ctx
        self.ring = ring
        if terms is None:
            self.terms = {}
        elif _trusted:
            self.terms = terms
        else:
            clean = {}
            for idx, c in terms.items():
                c = ring.normalize(c)
                if c:
                    clean[idx] = c
            self.terms = clean

    # -- constructors
    @classmethod
    def zero(cls, ctx, ring):
        return cls(ctx, ring, {}, _trusted=True)

    @classmethod
    def constant(cls, ctx, ring, value):
        c = ring.normalize(value if not isinstance(value, int) else ring.from_int(value))
        return cls(ctx, ring, {0: c} if c else {}, _trusted=True)

    @classmethod
    def variable(cls, ctx, ring, i, j):
        return cls(ctx, ring, {ctx.var_index(i, j): ring.from_int(1)})

    # -- queries
    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self):
        return self.terms.get(0, 0)

    def coeff(self, idx: int):
        return self.terms.get(idx, 0)

    def min_degree(self):
        """Lowest total degree with a nonzero coefficient, or None if zero."""
        if not self.terms:
            return None
        deg = self.ctx.degree
        return min(deg[i] for i in self.terms)

    def _compat(self, other: "Series"):
        if self.ctx is not other.ctx or self.ring != other.ring:
            raise RingMismatch(f"incompatible series: {self.ctx}/{self.ring} vs {other.ctx}/{other.ring}")

    # -- linear ops
    def __add__(self, other: "Series") -> "Series":
        self._compat(other)
        norm = self.ring.normalize
        out = dict(self.terms)
        for idx, c in other.terms.items():
            s = norm(out.get(idx, 0) + c)
            if s:
                out[idx] = s
            else:
                out.pop(idx, None)
        return Series(self.ctx, self.ring, out, _trusted=True)

    def __neg__(self) -> "Series":
        norm = self.ring.normalize
        return Series(self.ctx, self.ring, {i: norm(-c) for i, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def scale(self, c) -> "Series":
        c = self.ring.normalize(c)
        if not c:
            return Series.zero(self.ctx, self.ring)
        norm = self.ring.normalize
        out = {}
        for idx, v in self.terms.items():
            s = norm(c * v)
            if s:
                out[idx] = s
        return Series(self.ctx, self.ring, out, _trusted=True)

    # -- multiplicative ops
    def __mul__(self, other: "Series") -> "Series":
        self._compat(other)
        ctx = self.ctx
        D = ctx.D
        deg = ctx.degree
        mul_index = ctx.mul_index
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        # bucket the larger operand by total degree
        buckets: list[list] = [[] for _ in range(D + 1)]
        for idx, c in b.items():
            buckets[deg[idx]].append((idx, c))
        acc: dict[int, object] = {}
        for ia, ca in a.items():
            rem = D - deg[ia]
            for d in range(rem + 1):
                for ib, cb in buckets[d]:
                    k = mul_index(ia, ib)
                    v = acc.get(k)
                    acc[k] = ca * cb if v is None else v + ca * cb
        norm = self.ring.normalize
        out = {}
        for idx, c in acc.items():
            c = norm(c)
            if c:
                out[idx] = c
        return Series(self.ctx, self.ring, out, _trusted=True)

    def pow(self, e: int) -> "Series":
        if e < 0:
            raise ValueError("negative exponent")
        result = Series.constant(self.ctx, self.ring, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "Series":
        """Inverse via geometric series; constant term must be a unit."""
        c0 = self.constant_term()
        try:
            c0inv = self.ring.inv(c0)
        except NonUnit as exc:
            raise SingularConstantTerm(str(exc)) from exc
        # self = c0 (1 + N), inverse = (sum (-N)^k) / c0
        unitized = self.scale(c0inv)
        N = unitized - Series.constant(self.ctx, self.ring, 1)
        result = Series.constant(self.ctx, self.ring, 1)
        power = Series.constant(self.ctx, self.ring, 1)
        for _ in range(self.ctx.D):
            power = power * (-N)
            if power.is_zero():
                break
            result = result + power
        return result.scale(c0inv)

    # -- ring changes
    def to_padic(self, p: int, K: int) -> "Series":
        """Reduce an exact series mod p^K; denominators must be units at p."""
        if self.ring.tag != "exact":
            raise RingMismatch("to_padic expects an exact series")
        ring = PadicRing(p, K)
        pK = ring.modulus
        out = {}
        for idx, c in self.terms.items():
            if isinstance(c, Fraction):
                if c.denominator % p == 0:
                    raise NonUnit(f"coefficient {c} not p-integral at p={p}")
                r = c.numerator * pow(c.denominator, -1, pK) % pK
            else:
                r = c % pK
            if r:
                out[idx] = r
        return Series(self.ctx, ring, out, _trusted=True)

    def map_coeffs(self, func, ring=None) -> "Series":
        ring = ring if ring is not None else self.ring
        out = {}
        for idx, c in self.terms.items():
            v = ring.normalize(func(c))
            if v:
                out[idx] = v
        return Series(self.ctx, ring, out, _trusted=True)

    # -- misc
    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.ctx is other.ctx and self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.ctx), self.ring, tuple(sorted(self.terms.items()))))

    def sorted_terms(self):
        """(monomial index, coefficient) pairs in graded-lex order."""
        return sorted(self.terms.items())

    def __repr__(self):
        if not self.terms:
            return "Series(0)"
        parts = [f"{c}*{self.ctx.monomial_str(i)}" for i, c in self.sorted_terms()[:6]]
        more = "..." if len(self.terms) > 6 else ""
        return f"Series({' + '.join(parts)}{more})"


# ---------------------------------------------------------------------------
# matrices of series


class MatrixSeries:
    """n x n matrix with Series entries sharing one context and ring."""

    __slots__ = ("ctx", "ring", "rows")

    def __init__(self, ctx: SeriesContext, ring, rows):
        self.ctx = ctx
        self.ring = ring
        self.rows = rows
        for row in rows:
            for s in row:
                if s.ctx is not ctx or s.ring != ring:
                    raise RingMismatch("matrix entries disagree in context or ring")

    @classmethod
    def zero(cls, ctx, ring):
        n = ctx.n
        return cls(ctx, ring, [[Series.zero(ctx, ring) for _ in range(n)] for _ in range(n)])

    @classmethod
    def identity(cls, ctx, ring):
        n = ctx.n
        return cls(ctx, ring, [
            [Series.constant(ctx, ring, 1 if i == j else 0) for j in range(n)]
            for i in range(n)
        ])

    @classmethod
    def from_scalar_matrix(cls, ctx, ring, q):
        """Constant MatrixSeries from an n x n matrix of ints/Fractions."""
        return cls(ctx, ring, [
            [Series.constant(ctx, ring, q[i][j]) for j in range(ctx.n)]
            for i in range(ctx.n)
        ])

    @classmethod
    def one_plus_T(cls, ctx, ring):
        """The generic matrix x = 1 + T."""
        n = ctx.n
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                s = Series.variable(ctx, ring, i, j)
                if i == j:
                    s = s + Series.constant(ctx, ring, 1)
                row.append(s)
            rows.append(row)
        return cls(ctx, ring, rows)

    # -- queries
    def entry(self, i, j) -> Series:
        return self.rows[i][j]

    def is_zero(self) -> bool:
        return all(s.is_zero() for row in self.rows for s in row)

    def constant_matrix(self):
        return [[s.constant_term() for s in row] for row in self.rows]

    def lowest_nonzero_degree(self):
        """Minimal total degree with a nonzero coefficient anywhere, or None."""
        degs = [s.min_degree() for row in self.rows for s in row]
        degs = [d for d in degs if d is not None]
        return min(degs) if degs else None

    def _compat(self, other: "MatrixSeries"):
        if self.ctx is not other.ctx or self.ring != other.ring:
            raise RingMismatch("incompatible matrix series")

    # -- algebra
    def __add__(self, other):
        self._compat(other)
        n = self.ctx.n
        return MatrixSeries(self.ctx, self.ring, [
            [self.rows[i][j] + other.rows[i][j] for j in range(n)] for i in range(n)
        ])

    def __neg__(self):
        return MatrixSeries(self.ctx, self.ring, [[-s for s in row] for row in self.rows])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._compat(other)
        n = self.ctx.n
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = Series.zero(self.ctx, self.ring)
                for l in range(n):
                    a = self.rows[i][l]
                    b = other.rows[l][j]
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            rows.append(row)
        return MatrixSeries(self.ctx, self.ring, rows)

    def transpose(self) -> "MatrixSeries":
        n = self.ctx.n
        return MatrixSeries(self.ctx, self.ring, [
            [self.rows[j][i] for j in range(n)] for i in range(n)
        ])

    def scale(self, c) -> "MatrixSeries":
        return MatrixSeries(self.ctx, self.ring, [[s.scale(c) for s in row] for row in self.rows])

    def map_entries(self, func) -> "MatrixSeries":
        return MatrixSeries(self.ctx, self.ring, [[func(s) for s in row] for row in self.rows])

    def convert(self, ring, coeff_func=None) -> "MatrixSeries":
        """Rebuild over another coefficient ring, mapping coefficients through coeff_func."""
        coeff_func = coeff_func or (lambda c: c)
        return MatrixSeries(self.ctx, ring, [
            [Series(self.ctx, ring, {i: coeff_func(c) for i, c in s.terms.items()})
             for s in row]
            for row in self.rows
        ])

    def entrywise_pow(self, e: int) -> "MatrixSeries":
        return self.map_entries(lambda s: s.pow(e))

    def scalar_matmul_left(self, q) -> "MatrixSeries":
        """q . self for a constant n x n matrix q of ints/Fractions."""
        n = self.ctx.n
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = Series.zero(self.ctx, self.ring)
                for l in range(n):
                    if q[i][l]:
                        acc = acc + self.rows[l][j].scale(self.ring.normalize(
                            q[i][l] if not isinstance(q[i][l], int) else self.ring.from_int(q[i][l])))
                row.append(acc)
            rows.append(row)
        return MatrixSeries(self.ctx, self.ring, rows)

    def inverse(self) -> "MatrixSeries":
        """Inverse, requiring an invertible constant term.

        Inverts the constant matrix over the coefficient ring, then sums the
        geometric series in the positive-degree part.
        """
        c0inv = _invert_constant_matrix(self.constant_matrix(), self.ring)
        ctx, ring, n = self.ctx, self.ring, self.ctx.n
        m0inv = MatrixSeries.from_scalar_matrix(ctx, ring, c0inv)
        N = (m0inv * self) - MatrixSeries.identity(ctx, ring)
        result = MatrixSeries.identity(ctx, ring)
        power = MatrixSeries.identity(ctx, ring)
        for _ in range(ctx.D):
            power = power * (-N)
            if power.is_zero():
                break
            result = result + power
        return result * m0inv

    def __eq__(self, other):
        if not isinstance(other, MatrixSeries):
            return NotImplemented
        return self.ctx is other.ctx and self.ring == other.ring and self.rows == other.rows

    def __repr__(self):
        return f"MatrixSeries(n={self.ctx.n}, D={self.ctx.D}, ring={self.ring})"


def _invert_constant_matrix(mat, ring):
    """Gauss-Jordan over the coefficient ring; pivots must be units."""
    n = len(mat)
    a = [[ring.normalize(c) for c in row] + [ring.from_int(1) if i == j else 0 for j in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        pivot_row = None
        for r in range(col, n):
            try:
                inv = ring.inv(a[r][col]) if a[r][col] else None
            except NonUnit:
                inv = None
            if inv is not None:
                pivot_row = r
                break
        if pivot_row is None:
            raise SingularConstantTerm("constant term matrix is not invertible")
        a[col], a[pivot_row] = a[pivot_row], a[col]
        a[col] = [ring.normalize(c * inv) for c in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [ring.normalize(x - f * y) for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


# ---------------------------------------------------------------------------
# substitution


class Substitution:
    """T_ij -> images[ij] on series over one context; images need zero constant term.

    The per-monomial image products are memoized, so applying one substitution
    to many series (e.g. all entries of a matrix) shares the heavy work.
    """

    def __init__(self, ctx: SeriesContext, ring, images: list[Series]):
        if len(images) != ctx.nvars:
            raise ValueError(f"need {ctx.nvars} images, got {len(images)}")
        for im in images:
            if im.ctx is not ctx or im.ring != ring:
                raise RingMismatch("image series incompatible with context/ring")
            if im.constant_term():
                raise NonzeroConstantTerm("substitution image has nonzero constant term")
        self.ctx = ctx
        self.ring = ring
        self.images = images
        self._table: dict[int, Series] = {0: Series.constant(ctx, ring, 1)}

    @classmethod
    def from_matrix(cls, M: "MatrixSeries") -> "Substitution":
        """Images read off a matrix: T_ij -> M[i][j] (row-major)."""
        images = [M.rows[i][j] for i in range(M.ctx.n) for j in range(M.ctx.n)]
        return cls(M.ctx, M.ring, images)

    def _monomial_value(self, idx: int) -> Series:
        table = self._table
        val = table.get(idx)
        if val is None:
            e = self.ctx.exps[idx]
            v = next(i for i, x in enumerate(e) if x)
            parent = list(e)
            parent[v] -= 1
            pidx = self.ctx.index[tuple(parent)]
            val = self._monomial_value(pidx) * self.images[v]
            table[idx] = val
        return val

    def apply(self, f: Series) -> Series:
        if f.ctx is not self.ctx or f.ring != self.ring:
            raise RingMismatch("series incompatible with substitution")
        acc = Series.zero(self.ctx, self.ring)
        for idx, c in f.sorted_terms():
            acc = acc + self._monomial_value(idx).scale(c)
        return acc

    def apply_matrix(self, M: "MatrixSeries") -> "MatrixSeries":
        return M.map_entries(self.apply)


def substitute(f: Series, images: list[Series]) -> Series:
    """One-shot substitution; see Substitution for the shared-table form."""
    return Substitution(f.ctx, f.ring, images).apply(f)
