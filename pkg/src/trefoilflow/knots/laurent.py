"""Integer Laurent polynomials in one variable t, with exact fraction-free determinants."""
from __future__ import annotations

from typing import Sequence


class LaurentPoly:
    """sum_k coeffs[k] * t**(low + k) with Python ints (arbitrary precision)."""

    __slots__ = ("low", "coeffs")

    def __init__(self, coeffs: Sequence[int] = (), low: int = 0):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        k = 0
        while k < len(c) and c[k] == 0:
            k += 1
        self.coeffs = tuple(c[k:])
        self.low = low + k if self.coeffs else 0

    @classmethod
    def const(cls, a: int) -> "LaurentPoly":
        return cls([a])

    @classmethod
    def monomial(cls, a: int, k: int) -> "LaurentPoly":
        return cls([a], k)

    @property
    def high(self) -> int:
        return self.low + len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.low == other.low and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.low, self.coeffs))

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, int):
            return LaurentPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other:
            return self
        if not self:
            return other
        lo = min(self.low, other.low)
        hi = max(self.high, other.high)
        out = [0] * (hi - lo + 1)
        for i, a in enumerate(self.coeffs):
            out[self.low - lo + i] += a
        for i, a in enumerate(other.coeffs):
            out[other.low - lo + i] += a
        return LaurentPoly(out, lo)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly([-a for a in self.coeffs], self.low)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self or not other:
            return LaurentPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return LaurentPoly(out, self.low + other.low)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers only for monomials; use shift()")
        out = LaurentPoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by t**k."""
        return LaurentPoly(self.coeffs, self.low + k) if self else self

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        """Quotient when ``other`` divides ``self`` exactly in Z[t, 1/t]; else ValueError."""
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        if not self:
            return LaurentPoly()
        num = list(self.coeffs)
        den = other.coeffs
        lead = den[-1]
        q = [0] * max(0, len(num) - len(den) + 1)
        for k in range(len(q) - 1, -1, -1):
            a = num[k + len(den) - 1]
            if a % lead:
                raise ValueError("inexact polynomial division")
            c = a // lead
            q[k] = c
            if c:
                for j, d in enumerate(den):
                    num[k + j] -= c * d
        if any(num):
            raise ValueError("inexact polynomial division")
        return LaurentPoly(q, self.low - other.low)

    def __call__(self, x):
        return sum(a * x ** (self.low + i) for i, a in enumerate(self.coeffs))

    def reflect(self) -> "LaurentPoly":
        """p(1/t)."""
        return LaurentPoly(self.coeffs[::-1], -self.high) if self else self

    def normalized(self) -> "LaurentPoly":
        """Representative up to units +-t^k: lowest degree 0, positive top coefficient."""
        if not self:
            return self
        c = self.coeffs
        if c[-1] < 0:
            c = tuple(-a for a in c)
        return LaurentPoly(c, 0)

    def __repr__(self):
        return f"LaurentPoly({list(self.coeffs)}, low={self.low})"

    def __str__(self):
        if not self:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[i]
            if not a:
                continue
            k = self.low + i
            mag = abs(a)
            if k == 0:
                body = str(mag)
            else:
                var = "t" if k == 1 else f"t^{k}"
                body = var if mag == 1 else f"{mag}*{var}"
            terms.append(("-" if a < 0 else "+", body))
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s


T = LaurentPoly([1], 1)
ONE = LaurentPoly([1])
ZERO = LaurentPoly()


def determinant(M) -> LaurentPoly:
    """Exact determinant of a square matrix of LaurentPoly entries (Bareiss).

    Rows are first shifted into Z[t]; the shifts are undone at the end so the
    result is the true Laurent determinant.
    """
    n = len(M)
    if n == 0:
        return ONE
    A = [[e if isinstance(e, LaurentPoly) else LaurentPoly.const(e) for e in row] for row in M]
    if any(len(row) != n for row in A):
        raise ValueError("matrix is not square")
    total_shift = 0
    for r in range(n):
        lows = [e.low for e in A[r] if e]
        if not lows:
            return ZERO
        s = -min(lows)
        if s:
            A[r] = [e.shift(s) for e in A[r]]
            total_shift += s
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if not A[k][k]:
            for r in range(k + 1, n):
                if A[r][k]:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return ZERO
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]).exact_div(prev)
        prev = A[k][k]
    det = A[n - 1][n - 1] * sign
    return det.shift(-total_shift)


def matmul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    return [[sum((A[i][k] * B[k][j] for k in range(m)), ZERO) for j in range(p)]
            for i in range(n)]


def identity(n: int):
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
