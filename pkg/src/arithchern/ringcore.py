"""Exact base-ring arithmetic.

Elements of Z[1/N0, zeta_N] in the power basis of the N-th cyclotomic
polynomial, the Fermat-quotient p-derivation and its Frobenius lift,
Legendre symbols, residue arithmetic mod p^K, and rational reconstruction.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

from .errors import (
    DenominatorNotAllowed,
    InadmissiblePrime,
    InexactDivision,
    NonUnit,
    PrecisionMismatch,
)

# ---------------------------------------------------------------------------
# primality / cyclotomic helpers

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond desk scale."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _poly_divmod_int(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # den is monic with integer coefficients
    num = list(num)
    dd = len(den) - 1
    quot = [0] * max(len(num) - dd, 0)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            quot[i - dd] = c
            for j, dj in enumerate(den):
                num[i - dd + j] -= c * dj
    while num and num[-1] == 0:
        num.pop()
    return quot, num


_cyclo_cache: dict[int, list[int]] = {}


def cyclotomic_poly(N: int) -> list[int]:
    """Coefficient list (ascending) of the N-th cyclotomic polynomial."""
    if N in _cyclo_cache:
        return _cyclo_cache[N]
    f = [0] * N + [1]
    f[0] = -1  # x^N - 1
    for d in range(1, N):
        if N % d == 0:
            f, rem = _poly_divmod_int(f, cyclotomic_poly(d))
            assert not rem
    _cyclo_cache[N] = f
    return f


def euler_phi(N: int) -> int:
    result, n, p = N, N, 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


# ---------------------------------------------------------------------------
# base ring

def _norm(c):
    """Collapse Fractions with denominator 1 to plain ints."""
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class CycloRing:
    """Descriptor of A = Z[1/N0, zeta_N].

    N0 must be even (so every admissible prime is odd); N = 1 degenerates
    to plain rationals with N0-restricted denominators.
    """

    def __init__(self, N0: int = 2, N: int = 1):
        if N0 <= 0 or N0 % 2 != 0:
            raise ValueError(f"N0 must be even and positive, got {N0}")
        if N <= 0:
            raise ValueError(f"N must be positive, got {N}")
        self.N0 = N0
        self.N = N
        self.cyclo = cyclotomic_poly(N)
        self.degree = len(self.cyclo) - 1
        assert self.degree == euler_phi(N)
        # x^k reduced mod cyclo, for k up to 2*degree-2 (products)
        self._xpow: list[list[int]] = []

    def __repr__(self):
        return f"CycloRing(N0={self.N0}, N={self.N})"

    def __eq__(self, other):
        return isinstance(other, CycloRing) and (self.N0, self.N) == (other.N0, other.N)

    def __hash__(self):
        return hash((self.N0, self.N))

    def admissible(self, p: int) -> bool:
        return is_prime(p) and (self.N0 * self.N) % p != 0

    def check_prime(self, p: int) -> None:
        if not self.admissible(p):
            raise InadmissiblePrime(f"p={p} is not an admissible prime for {self!r}")

    def check_denominator(self, den: int) -> None:
        den = abs(den)
        while den > 1:
            g = gcd(den, self.N0)
            if g == 1:
                raise DenominatorNotAllowed(
                    f"denominator {den} has a prime factor not dividing N0={self.N0}"
                )
            den //= g

    def _x_power(self, k: int) -> list:
        """Coefficients of x^k reduced modulo the cyclotomic polynomial."""
        d = self.degree
        while len(self._xpow) <= k:
            j = len(self._xpow)
            if j < d:
                row = [0] * d
                row[j] = 1
            else:
                prev = self._xpow[j - 1]
                row = [0] + prev[: d - 1]
                lead = prev[d - 1]
                if lead:
                    for i in range(d):
                        row[i] -= lead * self.cyclo[i]
            self._xpow.append(row)
        return self._xpow[k]

    def reduce(self, coeffs: list) -> tuple:
        """Reduce an arbitrary-length coefficient list modulo the cyclotomic polynomial."""
        d = self.degree
        out = [0] * d
        for k, c in enumerate(coeffs):
            if c:
                if k < d:
                    out[k] += c
                else:
                    for i, xi in enumerate(self._x_power(k)):
                        if xi:
                            out[i] += c * xi
        return tuple(_norm(c) for c in out)

    # constructors
    def element(self, coeffs) -> "CycloScalar":
        return CycloScalar(self, coeffs)

    def from_rational(self, value) -> "CycloScalar":
        c = [0] * self.degree
        c[0] = value
        return CycloScalar(self, c)

    def zero(self) -> "CycloScalar":
        return self.from_rational(0)

    def one(self) -> "CycloScalar":
        return self.from_rational(1)

    def zeta(self) -> "CycloScalar":
        """The chosen primitive N-th root of unity (equals 1 when N = 1)."""
        return CycloScalar(self, self._x_power(1))


class CycloScalar:
    """Immutable element of A in the power basis 1, zeta, ..., zeta^(phi(N)-1)."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: CycloRing, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) > ring.degree:
            coeffs = list(ring.reduce(coeffs))
        elif len(coeffs) < ring.degree:
            coeffs = coeffs + [0] * (ring.degree - len(coeffs))
        norm = []
        for c in coeffs:
            c = _norm(Fraction(c) if not isinstance(c, (int, Fraction)) else c)
            if isinstance(c, Fraction):
                ring.check_denominator(c.denominator)
            norm.append(c)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "coeffs", tuple(norm))

    def __setattr__(self, name, value):
        raise AttributeError("CycloScalar is immutable")

    # -- helpers
    def _check(self, other) -> "CycloScalar":
        if isinstance(other, (int, Fraction)):
            return self.ring.from_rational(other)
        if not isinstance(other, CycloScalar) or other.ring != self.ring:
            raise TypeError(f"cannot combine {self!r} with {other!r}")
        return other

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.coeffs[0])

    # -- arithmetic
    def __add__(self, other):
        other = self._check(other)
        return CycloScalar(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloScalar(self.ring, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        a, b = self.coeffs, other.coeffs
        d = self.ring.degree
        conv = [0] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        conv[i + j] += ai * bj
        return CycloScalar(self.ring, self.ring.reduce(conv))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers not supported")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __truediv__(self, k):
        """Division by a rational scalar; denominators must stay N0-admissible."""
        k = Fraction(k)
        return CycloScalar(self.ring, [Fraction(c) / k for c in self.coeffs])

    def __eq__(self, other):
        try:
            other = self._check(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def __repr__(self):
        if self.ring.N == 1:
            return f"CycloScalar({self.coeffs[0]})"
        return f"CycloScalar({list(self.coeffs)} @ N={self.ring.N})"


def frobenius_scalar(a: CycloScalar, p: int) -> CycloScalar:
    """Image of a under the automorphism phi_p: zeta_N -> zeta_N^p, fixing rationals."""
    ring = a.ring
    ring.check_prime(p)
    out = [0] * ring.degree
    for j, c in enumerate(a.coeffs):
        if c:
            for i, xi in enumerate(ring._x_power((p * j) % ring.N if ring.N > 1 else 0)):
                if xi:
                    out[i] += c * xi
    return CycloScalar(ring, out)


def p_derivation_scalar(a: CycloScalar, p: int) -> CycloScalar:
    """Fermat quotient (phi_p(a) - a^p) / p; exact in A for admissible p."""
    ring = a.ring
    ring.check_prime(p)
    diff = frobenius_scalar(a, p) - a**p
    try:
        return diff / p
    except DenominatorNotAllowed as exc:
        raise InexactDivision(
            f"(phi_p(a) - a^p) not divisible by p={p}; precondition violated"
        ) from exc


def legendre(q: int, p: int) -> int:
    """Legendre symbol (q/p) by Euler's criterion; p an odd prime."""
    if p == 2 or not is_prime(p):
        raise InadmissiblePrime(f"Legendre symbol needs an odd prime, got {p}")
    r = pow(q % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


# ---------------------------------------------------------------------------
# p-adic residues

class PadicScalar:
    """Residue mod p^K with tracked prime and precision."""

    __slots__ = ("p", "K", "residue")

    def __init__(self, p: int, K: int, residue: int):
        if K < 1:
            raise ValueError("precision K must be >= 1")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "residue", residue % p**K)

    def __setattr__(self, name, value):
        raise AttributeError("PadicScalar is immutable")

    @classmethod
    def from_rational(cls, value, p: int, K: int) -> "PadicScalar":
        value = Fraction(value)
        if value.denominator % p == 0:
            raise NonUnit(f"{value} has p in its denominator (p={p})")
        pK = p**K
        return cls(p, K, value.numerator * pow(value.denominator, -1, pK))

    def _check(self, other) -> "PadicScalar":
        if isinstance(other, int):
            return PadicScalar(self.p, self.K, other)
        if not isinstance(other, PadicScalar) or (other.p, other.K) != (self.p, self.K):
            raise PrecisionMismatch(f"cannot mix {self!r} and {other!r}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return PadicScalar(self.p, self.K, self.residue + other.residue)

    __radd__ = __add__

    def __neg__(self):
        return PadicScalar(self.p, self.K, -self.residue)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        other = self._check(other)
        return PadicScalar(self.p, self.K, self.residue * other.residue)

    __rmul__ = __mul__

    def inv(self) -> "PadicScalar":
        if self.residue % self.p == 0:
            raise NonUnit(f"{self!r} is not a unit")
        return PadicScalar(self.p, self.K, pow(self.residue, -1, self.p**self.K))

    def valuation(self) -> int:
        """p-adic valuation, capped at K for the zero residue."""
        if self.residue == 0:
            return self.K
        v, r = 0, self.residue
        while r % self.p == 0:
            r //= self.p
            v += 1
        return v

    def __eq__(self, other):
        try:
            other = self._check(other)
        except PrecisionMismatch:
            return NotImplemented
        return self.residue == other.residue

    def __hash__(self):
        return hash((self.p, self.K, self.residue))

    def __repr__(self):
        return f"PadicScalar({self.residue} mod {self.p}^{self.K})"


def padic_arith(a: PadicScalar, b, op: str) -> PadicScalar:
    """Named-op entry point over PadicScalar; op in {add, mul, neg, inv}."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inv()
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# rational reconstruction

def rational_reconstruct(residue: int, p: int, K: int):
    """Recover u/v with |u|, v <= sqrt(p^K / 2) from its residue mod p^K.

    Half-extended Euclid; returns a Fraction, or None when no admissible
    pair exists under the height bound.
    """
    m = p**K
    if not 0 <= residue < m:
        raise ValueError(f"residue {residue} out of range [0, {m})")
    bound = isqrt(m // 2)
    r0, r1 = m, residue
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    u, v = r1, t1
    if v < 0:
        u, v = -u, -v
    if v == 0 or v > bound or gcd(abs(u), v) != 1 or v % p == 0:
        return None
    if (u - residue * v) % m != 0:
        return None
    return Fraction(u, v)
