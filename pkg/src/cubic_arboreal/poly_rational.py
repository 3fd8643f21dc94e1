"""Exact polynomial arithmetic over Q for the cubic f(z) = -2z^3 + 3z^2.

Polynomials are dense little-endian coefficient lists of Fractions (index =
degree), with [] for zero.  The module provides the iterates f^n, exact
resultants/discriminants via fraction-free (Bareiss) elimination over either
Q or Q[x], p-adic coefficient valuations, the Eisenstein certificate, Newton
polygons as exact lower convex hulls, and the local base-point condition at
the primes 2 and 3.

Discriminant convention: Disc(p) = (-1)^(d(d-1)/2) * Res(p, p') / lc(p),
with Res the Sylvester determinant.  Under this convention the second
iterate satisfies the polynomial identity

    Disc(f^2(z) - x) = [2^16 * 3^9 * x^2 (x-1)^2]^2,

which is what pins the sign/normalization choices; `verify_disc_identity`
checks it literally in Q[x].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapabilityError, UsageError

# f^n has degree 3^n; exact coefficients roughly triple their bit size per
# level, so the iterate is capped (configurable per call).
ITERATE_CAP = 8

INF = math.inf


# ---------------------------------------------------------------------------
# Dense polynomial helpers (little-endian lists of Fractions)
# ---------------------------------------------------------------------------


def ptrim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def pdeg(c: list) -> int:
    """Degree, with -1 for the zero polynomial."""
    return len(c) - 1


def padd(a: list, b: list) -> list:
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, v in enumerate(a):
        out[i] += v
    for i, v in enumerate(b):
        out[i] += v
    return ptrim(out)


def psub(a: list, b: list) -> list:
    return padd(a, [-v for v in b])


def pmul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, av in enumerate(a):
        if av:
            for j, bv in enumerate(b):
                out[i + j] += av * bv
    return ptrim(out)


def pscale(a: list, s) -> list:
    return ptrim([v * s for v in a])


def peval(a: list, v):
    out = Fraction(0)
    for c in reversed(a):
        out = out * v + c
    return out


def pderiv(a: list) -> list:
    return ptrim([i * a[i] for i in range(1, len(a))])


def pcompose(outer: list, inner: list) -> list:
    """outer(inner(z)) by Horner."""
    out: list = []
    for c in reversed(outer):
        out = padd(pmul(out, inner), [c] if c else [])
    return out


def pfrac(c) -> list:
    return ptrim([Fraction(v) for v in c])


# ---------------------------------------------------------------------------
# The cubic and its iterates
# ---------------------------------------------------------------------------


def f_poly() -> list:
    """f(z) = -2z^3 + 3z^2."""
    return pfrac([0, 0, 3, -2])


def f_apply(v: Fraction) -> Fraction:
    return -2 * v**3 + 3 * v**2


def f_iterate(n: int, cap: int = ITERATE_CAP) -> list:
    """Exact coefficients of f^n, with f^0(z) = z.  Degree 3^n.

    The composition is done over the integers (f has integer coefficients)
    as g <- g^2 (3 - 2g) per level.
    """
    if n < 0:
        raise UsageError(f"iterate order must be >= 0, got {n}")
    if n > cap:
        raise CapabilityError(f"f^{n} exceeds the iterate cap {cap}")
    g = [0, 1]
    for _ in range(n):
        g2 = _imul(g, g)
        g3 = _imul(g2, g)
        out = [0] * (len(g3))
        for i, v in enumerate(g2):
            out[i] += 3 * v
        for i, v in enumerate(g3):
            out[i] -= 2 * v
        g = out
    return pfrac(g)


def _imul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, av in enumerate(a):
        if av:
            for j, bv in enumerate(b):
                out[i + j] += av * bv
    return out


# ---------------------------------------------------------------------------
# A minimal exact ring Q[x] for the symbolic-base-point discriminant
# ---------------------------------------------------------------------------


class XPoly:
    """Dense polynomial in the auxiliary variable x over Q.

    Supports exactly what fraction-free elimination needs: ring ops, exact
    division, equality, and evaluation.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs):
        c = [Fraction(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def const(cls, v):
        return cls([v])

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def __add__(self, other):
        n = max(len(self.c), len(other.c))
        out = [Fraction(0)] * n
        for i, v in enumerate(self.c):
            out[i] += v
        for i, v in enumerate(other.c):
            out[i] += v
        return XPoly(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return XPoly([-v for v in self.c])

    def __mul__(self, other):
        if not self.c or not other.c:
            return XPoly([])
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, av in enumerate(self.c):
            if av:
                for j, bv in enumerate(other.c):
                    out[i + j] += av * bv
        return XPoly(out)

    def __eq__(self, other):
        return isinstance(other, XPoly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def exact_div(self, other: "XPoly") -> "XPoly":
        """Long division that must leave no remainder (Bareiss guarantees it)."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.c)
        dq, dr = other.degree, self.degree
        if dr < dq:
            if self.is_zero():
                return XPoly([])
            raise ArithmeticError("inexact polynomial division")
        quo = [Fraction(0)] * (dr - dq + 1)
        lead = other.c[-1]
        for k in range(dr - dq, -1, -1):
            coef = rem[k + dq] / lead
            quo[k] = coef
            if coef:
                for j, bv in enumerate(other.c):
                    rem[k + j] -= coef * bv
        if any(rem):
            raise ArithmeticError("inexact polynomial division")
        return XPoly(quo)

    def evaluate(self, v):
        out = Fraction(0)
        for c in reversed(self.c):
            out = out * v + c
        return out

    def __repr__(self):
        return f"XPoly({list(self.c)})"


def _exact_div(a, b):
    if isinstance(a, XPoly):
        return a.exact_div(b)
    return a / b


def _is_zero(a) -> bool:
    return a.is_zero() if isinstance(a, XPoly) else a == 0


# ---------------------------------------------------------------------------
# Resultants and discriminants
# ---------------------------------------------------------------------------


def _sylvester(p: list, q: list, zero):
    """Sylvester matrix with descending-coefficient rows of p and q."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    rows = []
    pd, qd = list(reversed(p)), list(reversed(q))
    for i in range(n):
        rows.append([zero] * i + pd + [zero] * (size - i - m - 1))
    for j in range(m):
        rows.append([zero] * j + qd + [zero] * (size - j - n - 1))
    return rows


def _bareiss_det(mat, one):
    """Fraction-free determinant; exact over any integral domain."""
    n = len(mat)
    if n == 0:
        return one
    sign = 1
    prev = one
    for k in range(n - 1):
        if _is_zero(mat[k][k]):
            for r in range(k + 1, n):
                if not _is_zero(mat[r][k]):
                    mat[k], mat[r] = mat[r], mat[k]
                    sign = -sign
                    break
            else:
                return one - one  # a zero column: determinant vanishes
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                mat[i][j] = _exact_div(
                    mat[i][j] * mat[k][k] - mat[i][k] * mat[k][j], prev
                )
            mat[i][k] = mat[k][k] - mat[k][k]  # exact zero of the right type
        prev = mat[k][k]
    det = mat[n - 1][n - 1]
    return det if sign == 1 else -det


def resultant(p: list, q: list):
    """Res(p, q) over Q (Sylvester determinant convention)."""
    p, q = pfrac(p), pfrac(q)
    if not p or not q:
        raise UsageError("resultant of the zero polynomial is undefined")
    m, n = pdeg(p), pdeg(q)
    if m == 0 and n == 0:
        return Fraction(1)
    if m == 0:
        return p[0] ** n
    if n == 0:
        return q[0] ** m
    return _bareiss_det(_sylvester(p, q, Fraction(0)), Fraction(1))


def discriminant(p: list) -> Fraction:
    """Disc(p) = (-1)^(d(d-1)/2) Res(p, p')/lc(p)."""
    p = pfrac(p)
    if pdeg(p) < 1:
        raise UsageError("discriminant needs degree >= 1")
    d = pdeg(p)
    if d == 1:
        return Fraction(1)
    res = resultant(p, pderiv(p))
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * res / p[-1]


def disc_second_iterate_in_x() -> XPoly:
    """Disc(f^2(z) - x) as an exact element of Q[x] (degree 8)."""
    f2 = f_iterate(2)
    zpoly = [XPoly.const(c) for c in f2]
    zpoly[0] = zpoly[0] - XPoly([0, 1])  # subtract x from the constant term
    dz = [XPoly.const(i) * zpoly[i] for i in range(1, len(zpoly))]
    while dz and dz[-1].is_zero():
        dz.pop()
    res = _bareiss_det(_sylvester(zpoly, dz, XPoly([])), XPoly.const(1))
    d = len(zpoly) - 1
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    lc = zpoly[-1].c[0]
    out = res.exact_div(XPoly.const(lc))
    return out if sign == 1 else -out


def disc_identity_rhs() -> XPoly:
    """[2^16 * 3^9 * x^2 (x-1)^2]^2 expanded in Q[x]."""
    c = (2**16 * 3**9) ** 2
    base = XPoly([0, 1]) * XPoly([-1, 1])  # x(x-1)
    sq = base * base
    return XPoly.const(c) * (sq * sq)


def verify_disc_identity() -> bool:
    """The literal polynomial identity for Disc(f^2(z) - x)."""
    return disc_second_iterate_in_x() == disc_identity_rhs()


# ---------------------------------------------------------------------------
# p-adic valuations, Eisenstein, Newton polygons
# ---------------------------------------------------------------------------


def valuation(x, p: int):
    """v_p of a rational number; +inf for 0."""
    x = Fraction(x)
    if x == 0:
        return INF
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def eisenstein_check(coeffs: list, q: int) -> bool:
    """v_q(lc) = 0, v_q >= 1 on the middle, v_q(constant) = 1."""
    c = pfrac(coeffs)
    if pdeg(c) < 1:
        raise UsageError("Eisenstein needs degree >= 1")
    if valuation(c[-1], q) != 0:
        return False
    if valuation(c[0], q) != 1:
        return False
    return all(valuation(v, q) >= 1 for v in c[1:-1])


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of (i, v_p(c_i)); slopes strictly increasing."""

    prime: int
    z_order: int
    segments: tuple  # of (slope: Fraction, length: int)

    @property
    def total_length(self) -> int:
        return sum(length for _, length in self.segments)


def newton_polygon(coeffs: list, p: int) -> NewtonPolygon:
    """Exact Newton polygon; a z^k factor is split off and reported."""
    c = pfrac(coeffs)
    if not c:
        raise UsageError("Newton polygon of the zero polynomial is undefined")
    z_order = next(i for i, v in enumerate(c) if v)
    pts = [(i - z_order, valuation(v, p)) for i, v in enumerate(c) if v]
    hull: list = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it bends the chain upward
            if (y2 - y1) * (pt[0] - x1) <= (pt[1] - y1) * (x2 - x1):
                break
            hull.pop()
        hull.append(pt)
    segments = tuple(
        (Fraction(y2 - y1, x2 - x1), x2 - x1)
        for (x1, y1), (x2, y2) in zip(hull, hull[1:])
    )
    return NewtonPolygon(p, z_order, segments)


# ---------------------------------------------------------------------------
# The base-point condition at 2 and 3, and self-conjugacy
# ---------------------------------------------------------------------------


def dagger_check(x) -> tuple[bool, dict]:
    """Local condition over Q: v_3(x) = 1 and (v_2(x) = +-1 or v_2(1-x) = 1).

    Returns (holds, certificate); the certificate lists the valuations used.
    """
    x = Fraction(x)
    if x in (0, 1):
        raise UsageError("base point must avoid the fixed critical values 0, 1")
    v3 = valuation(x, 3)
    v2 = valuation(x, 2)
    v2c = valuation(1 - x, 2)
    holds = v3 == 1 and (v2 in (1, -1) or v2c == 1)
    return holds, {"v3(x)": v3, "v2(x)": v2, "v2(1-x)": v2c}


def is_one_minus_conjugate(coeffs: list) -> bool:
    """Exact coefficientwise check of 1 - P(1-z) = P(z)."""
    c = pfrac(coeffs)
    lhs = psub(pfrac([1]), pcompose(c, pfrac([1, -1])))
    return lhs == c


def self_conjugacy_check() -> bool:
    """f itself satisfies 1 - f(1-z) = f(z)."""
    return is_one_minus_conjugate(f_poly())
