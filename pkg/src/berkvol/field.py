"""Exact arithmetic in Eisenstein extensions K_M = Q_p(p^(1/M)).

Elements are represented by their rational coordinates in the basis
1, pi, ..., pi^(M-1) of Q[pi]/(pi^M - p).  Valuations are normalized so
that v(p) = 1; every valuation of a nonzero element is a rational with
denominator dividing M.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

#: Valuation of zero.
INF = float("inf")

Rational = Union[int, Fraction]


class FieldError(Exception):
    pass


class DivisionByZero(FieldError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def padic_valuation(r: Rational, p: int):
    """v_p of a rational, with v_p(0) = INF."""
    r = Fraction(r)
    if r == 0:
        return INF
    v = 0
    n = r.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = r.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return Fraction(v)


@dataclass(frozen=True)
class FieldContext:
    """The extension K_M of Q_p generated by an M-th root pi of p."""

    p: int
    M: int = 1

    def __post_init__(self):
        if not is_prime(self.p):
            raise FieldError(f"p = {self.p} is not prime")
        if self.M < 1:
            raise FieldError(f"ramification index M = {self.M} must be >= 1")

    def element(self, coeffs: Sequence[Rational]) -> "FieldElement":
        if len(coeffs) != self.M:
            raise FieldError(f"expected {self.M} coefficients, got {len(coeffs)}")
        return FieldElement(self, tuple(Fraction(c) for c in coeffs))

    def from_rational(self, r: Rational) -> "FieldElement":
        coeffs = [Fraction(r)] + [Fraction(0)] * (self.M - 1)
        return FieldElement(self, tuple(coeffs))

    def zero(self) -> "FieldElement":
        return self.from_rational(0)

    def one(self) -> "FieldElement":
        return self.from_rational(1)

    def pi_power(self, k: int) -> "FieldElement":
        """pi^k for any integer k (negative powers use pi^M = p)."""
        q, r = divmod(k, self.M)
        coeffs = [Fraction(0)] * self.M
        coeffs[r] = Fraction(self.p) ** q
        return FieldElement(self, tuple(coeffs))

    def uniformizer(self) -> "FieldElement":
        return self.pi_power(1)


@dataclass(frozen=True)
class FieldElement:
    ctx: FieldContext
    coeffs: tuple

    def _check(self, other: "FieldElement") -> None:
        if self.ctx != other.ctx:
            raise FieldError("mixed field contexts; embed explicitly first")

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.ctx, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.ctx, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.ctx, tuple(-a for a in self.coeffs))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        M = self.ctx.M
        p = self.ctx.p
        out = [Fraction(0)] * M
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b == 0:
                    continue
                k = i + j
                if k < M:
                    out[k] += a * b
                else:
                    # pi^M = p
                    out[k - M] += a * b * p
        return FieldElement(self.ctx, tuple(out))

    def scale(self, r: Rational) -> "FieldElement":
        r = Fraction(r)
        return FieldElement(self.ctx, tuple(c * r for c in self.coeffs))

    def inverse(self) -> "FieldElement":
        """Multiplicative inverse, by solving x*y = 1 as a rational linear system."""
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        M = self.ctx.M
        # Column j of the system is x * pi^j in coordinates.
        cols = [(self * self.ctx.pi_power(j)).coeffs for j in range(M)]
        A = [[cols[j][i] for j in range(M)] for i in range(M)]
        rhs = [Fraction(1)] + [Fraction(0)] * (M - 1)
        sol = _solve_rational(A, rhs)
        return FieldElement(self.ctx, tuple(sol))

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return self * other.inverse()

    def valuation(self):
        """min_j (v_p(a_j) + j/M); INF for zero.

        The candidates are pairwise distinct mod 1, so the ultrametric
        minimum is exact.
        """
        M = self.ctx.M
        best = INF
        for j, a in enumerate(self.coeffs):
            if a == 0:
                continue
            v = padic_valuation(a, self.ctx.p) + Fraction(j, M)
            if v < best:
                best = v
        return best

    def embed(self, M2: int) -> "FieldElement":
        """Canonical embedding K_M -> K_M2 (pi -> pi'^(M2/M))."""
        if M2 % self.ctx.M != 0:
            raise FieldError(f"M'={M2} is not a multiple of M={self.ctx.M}")
        step = M2 // self.ctx.M
        ctx2 = FieldContext(self.ctx.p, M2)
        coeffs = [Fraction(0)] * M2
        for j, a in enumerate(self.coeffs):
            coeffs[j * step] = a
        return FieldElement(ctx2, tuple(coeffs))


def _solve_rational(A, b):
    """Solve a square rational linear system by Gaussian elimination."""
    n = len(A)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k] != 0), None)
        if piv is None:
            raise FieldError("singular rational system")
        M[k], M[piv] = M[piv], M[k]
        inv = 1 / M[k][k]
        M[k] = [x * inv for x in M[k]]
        for i in range(n):
            if i != k and M[i][k] != 0:
                f = M[i][k]
                M[i] = [x - f * y for x, y in zip(M[i], M[k])]
    return [M[i][n] for i in range(n)]
