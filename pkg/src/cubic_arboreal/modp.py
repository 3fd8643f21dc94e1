"""Dense polynomial arithmetic over prime fields F_p.

Polynomials are little-endian numpy int64 arrays with residues in [0, p);
the empty array is the zero polynomial.  Multiplication is an exact integer
convolution followed by one vector reduction, so primes are bounded by an
overflow guard (p^2 * degree < 2^63), far above every scan bound used here.

Factorization stops at the distinct-degree stage: Frobenius cycle patterns
need only the multiset of irreducible factor degrees, never the factors, so
no equal-degree splitting is implemented.  Non-squarefree inputs are flagged
rather than factored; scan callers skip those primes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapabilityError, UsageError

SIEVE_CAP = 10**8
F_ITER_MOD_CAP = 13  # degree 3^13 still fits memory; cost is quadratic


def _trim(a: np.ndarray) -> np.ndarray:
    i = a.size
    while i > 0 and not a[i - 1]:
        i -= 1
    return a[:i]


def _as_poly(coeffs) -> np.ndarray:
    return _trim(np.asarray(coeffs, dtype=np.int64))


def _conv(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.size == 0 or b.size == 0:
        return a[:0]
    if (p - 1) ** 2 * min(a.size, b.size) >= 2**63:
        raise CapabilityError(f"prime {p} too large for exact convolution here")
    return np.convolve(a, b) % p


def pm_mul(a, b, p: int) -> np.ndarray:
    return _trim(_conv(_as_poly(a), _as_poly(b), p))


def pm_add(a, b, p: int) -> np.ndarray:
    a, b = _as_poly(a), _as_poly(b)
    n = max(a.size, b.size)
    out = np.zeros(n, dtype=np.int64)
    out[: a.size] += a
    out[: b.size] += b
    return _trim(out % p)


def pm_sub(a, b, p: int) -> np.ndarray:
    a, b = _as_poly(a), _as_poly(b)
    n = max(a.size, b.size)
    out = np.zeros(n, dtype=np.int64)
    out[: a.size] += a
    out[: b.size] -= b
    return _trim(out % p)


def pm_divmod(a, b, p: int) -> tuple[np.ndarray, np.ndarray]:
    a, b = _as_poly(a).copy(), _as_poly(b)
    if b.size == 0:
        raise ZeroDivisionError("polynomial division by zero")
    if a.size < b.size:
        return a[:0], a
    lead_inv = pow(int(b[-1]), p - 2, p)
    n = b.size - 1
    quo = np.zeros(a.size - n, dtype=np.int64)
    for k in range(a.size - b.size, -1, -1):
        c = (a[k + n] * lead_inv) % p
        if c:
            quo[k] = c
            a[k : k + b.size] = (a[k : k + b.size] - c * b) % p
    return _trim(quo), _trim(a[:n] if n else a[:0])


def pm_monic(a, p: int) -> np.ndarray:
    a = _as_poly(a)
    if a.size == 0 or a[-1] == 1:
        return a
    return (a * pow(int(a[-1]), p - 2, p)) % p


def pm_gcd(a, b, p: int) -> np.ndarray:
    """Monic gcd by Euclid's algorithm."""
    return _gcd_raw(_as_poly(a), _as_poly(b), p)


def _rem_raw(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Remainder of trimmed a by trimmed nonzero b, minimal bookkeeping."""
    db = b.size - 1
    if a.size - 1 < db:
        return a
    inv = pow(int(b[-1]), p - 2, p)
    a = a.copy()
    for k in range(a.size - b.size, -1, -1):
        c = a[k + db] * inv % p
        if c:
            a[k : k + db] = (a[k : k + db] - c * b[:db]) % p
    return _trim(a[:db])


def _gcd_raw(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    while b.size:
        a, b = b, _rem_raw(a, b, p)
    return pm_monic(a, p)


def pm_deriv(a, p: int) -> np.ndarray:
    a = _as_poly(a)
    if a.size <= 1:
        return a[:0]
    return _trim((a[1:] * np.arange(1, a.size, dtype=np.int64)) % p)


def pm_eval(a, v: int, p: int) -> int:
    out = 0
    for c in reversed(_as_poly(a).tolist()):
        out = (out * v + c) % p
    return out


def _series_inv(c: np.ndarray, k: int, p: int) -> np.ndarray:
    """Inverse of a power series with c[0] = 1, modulo z^k (Newton lifting)."""
    inv = np.ones(1, dtype=np.int64)
    m = 1
    while m < k:
        m = min(2 * m, k)
        t = _conv(c[:m], inv, p)[:m]
        t = (-t) % p
        t[0] = (t[0] + 2) % p
        inv = _conv(inv, t, p)[:m]
    return inv


class ModCtx:
    """Reduction context for a fixed monic modulus: Barrett-style remainders.

    The hot path works on fixed-width (degree n) coefficient blocks without
    trimming; the truncated inverse of the reversed modulus turns each
    reduction into two short convolutions.
    """

    def __init__(self, q, p: int):
        self.p = p
        self.q = pm_monic(q, p)
        if self.q.size < 2:
            raise UsageError("modulus must have degree >= 1")
        if (p - 1) ** 2 * self.q.size * 2 >= 2**63:
            raise CapabilityError(f"prime {p} too large for exact convolution here")
        self.n = self.q.size - 1
        self._prec = max(self.n - 1, 1)
        self._rinv = _series_inv(self.q[::-1].copy(), self._prec, p)

    def rem(self, a) -> np.ndarray:
        a = _as_poly(a)
        if a.size <= self.n:
            return a
        k = a.size - self.n  # quotient coefficient count
        if k > self._prec:
            return pm_divmod(a, self.q, self.p)[1]
        return _trim(self._rem_wide(a))

    def _rem_wide(self, a: np.ndarray) -> np.ndarray:
        """Width-n remainder of an untrimmed block of size <= 2n-1."""
        p, n = self.p, self.n
        if a.size <= n:
            out = np.zeros(n, dtype=np.int64)
            out[: a.size] = a
            return out
        k = a.size - n
        arev = a[::-1]
        t = np.convolve(arev[:k], self._rinv[:k])[:k] % p
        prod = np.convolve(self.q, t[::-1])[:n] % p
        return (a[:n] - prod) % p

    def _mulmod_w(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Product of two width-n blocks, reduced back to width n."""
        return self._rem_wide(np.convolve(a, b) % self.p)

    def _mul_z_w(self, a: np.ndarray) -> np.ndarray:
        """Multiply a width-n block by z and reduce (one shift, one axpy)."""
        p, n = self.p, self.n
        out = np.empty(n, dtype=np.int64)
        out[0] = 0
        out[1:] = a[: n - 1]
        c = a[n - 1]
        if c:
            out = (out - c * self.q[:n]) % p
        return out

    def _widen(self, a: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.int64)
        out[: a.size] = a
        return out

    def mulmod(self, a, b) -> np.ndarray:
        return self.rem(_conv(_as_poly(a), _as_poly(b), self.p))

    def pow_mod(self, base, e: int) -> np.ndarray:
        """base^e mod q by left-to-right square and multiply (trim-free)."""
        base = self.rem(base)
        if e == 0:
            return np.ones(1, dtype=np.int64)
        base_is_z = base.size == 2 and base[0] == 0 and base[1] == 1
        wide = self._widen(base)
        result = wide
        for bit in bin(e)[3:]:
            result = self._mulmod_w(result, result)
            if bit == "1":
                result = self._mul_z_w(result) if base_is_z \
                    else self._mulmod_w(result, wide)
        return _trim(result)


# ---------------------------------------------------------------------------
# Rational reduction and the iterates of f mod p
# ---------------------------------------------------------------------------


def reduce_rational(x, p: int):
    """x mod p, or None when the denominator vanishes (x "reduces to infinity")."""
    x = Fraction(x)
    if x.denominator % p == 0:
        return None
    num = x.numerator % p
    if x.denominator == 1:
        return num
    return num * pow(x.denominator % p, p - 2, p) % p


def reduce_poly(coeffs, p: int):
    """Coefficientwise reduction of a rational polynomial; None if any blows up."""
    out = []
    for c in coeffs:
        r = reduce_rational(c, p)
        if r is None:
            return None
        out.append(r)
    return _trim(np.array(out, dtype=np.int64))


def f_iterate_mod_p(n: int, p: int, cap: int = F_ITER_MOD_CAP) -> np.ndarray:
    """Coefficients of f^n mod p, composed level by level entirely mod p."""
    if n < 0:
        raise UsageError(f"iterate order must be >= 0, got {n}")
    if n > cap:
        raise CapabilityError(f"f^{n} mod p exceeds the cap {cap}")
    g = np.array([0, 1], dtype=np.int64)
    for _ in range(n):
        g2 = _conv(g, g, p)
        g3 = _conv(g2, g, p)
        out = np.zeros(g3.size, dtype=np.int64)
        out[: g2.size] = (3 * g2) % p
        out = (out - 2 * g3) % p
        g = _trim(out)
    return g


# ---------------------------------------------------------------------------
# Squarefree test and distinct-degree factor patterns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FactorPattern:
    """Multiset of irreducible factor degrees of a squarefree polynomial."""

    degrees: tuple  # sorted (degree, count) pairs
    squarefree: bool

    def parts(self) -> tuple[int, ...]:
        out = []
        for d, c in self.degrees:
            out.extend([d] * c)
        return tuple(sorted(out, reverse=True))

    @property
    def total_degree(self) -> int:
        return sum(d * c for d, c in self.degrees)

    def has_linear_factor(self) -> bool:
        return any(d == 1 for d, _ in self.degrees)


def is_squarefree(q, p: int) -> bool:
    q = _as_poly(q)
    dq = pm_deriv(q, p)
    if dq.size == 0:
        return q.size <= 2  # constant/linear, else a p-th power
    return _gcd_raw(q, dq, p).size == 1


def factor_pattern(q, p: int) -> FactorPattern:
    """Distinct-degree factor pattern of q mod p (odd p).

    Counts of degree-d factors come from gcd(z^(p^d) - z, v) on a shrinking
    cofactor v; once deg v < 2(d+1) the remainder is irreducible.  If q is
    not squarefree the pattern is flagged and left empty (callers skip).
    """
    if p == 2:
        raise UsageError("factor patterns are computed for odd primes only")
    q = pm_monic(q, p)
    if q.size == 0:
        raise UsageError("factor pattern of the zero polynomial is undefined")
    if q.size == 1:
        return FactorPattern((), True)
    if not is_squarefree(q, p):
        return FactorPattern((), False)
    counts: dict[int, int] = {}
    v = q
    z = np.array([0, 1], dtype=np.int64)
    h = z
    d = 0
    while v.size > 1:
        d += 1
        deg_v = v.size - 1
        if deg_v < 2 * d:
            counts[deg_v] = counts.get(deg_v, 0) + 1
            break
        ctx = ModCtx(v, p)
        h = ctx.pow_mod(h, p)
        g = _gcd_raw(pm_sub(h, z, p), v, p)
        if g.size > 1:
            counts[d] = counts.get(d, 0) + (g.size - 1) // d
            v = pm_divmod(v, g, p)[0]
            if v.size > 1:
                h = _rem_raw(h, v, p)
    return FactorPattern(tuple(sorted(counts.items())), True)


def count_roots(q, p: int) -> int:
    """Number of distinct roots in F_p: deg gcd(z^p - z, q)."""
    if p == 2:
        raise UsageError("root counts are computed for odd primes only")
    q = pm_monic(q, p)
    if q.size <= 1:
        return 0
    if q.size == 2:
        return 1
    ctx = ModCtx(q, p)
    z = np.array([0, 1], dtype=np.int64)
    frob = ctx.pow_mod(z, p)
    return _gcd_raw(pm_sub(frob, z, p), q, p).size - 1


# ---------------------------------------------------------------------------
# Prime sieves
# ---------------------------------------------------------------------------


def sieve(bound: int, cap: int = SIEVE_CAP) -> np.ndarray:
    """Ascending primes <= bound, by a dense Eratosthenes sieve."""
    if bound > cap:
        raise CapabilityError(f"sieve bound {bound} exceeds the cap {cap}")
    if bound < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(bound + 1, dtype=bool)
    mask[:2] = False
    for q in range(2, int(bound**0.5) + 1):
        if mask[q]:
            mask[q * q :: q] = False
    return np.flatnonzero(mask).astype(np.int64)


def segmented_sieve(bound: int, segment: int = 1 << 20) -> np.ndarray:
    """Independent segmented sieve, kept as an audit oracle for `sieve`."""
    if bound < 2:
        return np.empty(0, dtype=np.int64)
    base = sieve(int(bound**0.5) + 1)
    chunks = [base[base <= bound]]
    lo = int(bound**0.5) + 2
    while lo <= bound:
        hi = min(lo + segment, bound + 1)
        mask = np.ones(hi - lo, dtype=bool)
        for q in base:
            q = int(q)
            start = ((lo + q - 1) // q) * q
            if start < hi:
                mask[start - lo :: q] = False
        chunks.append((lo + np.flatnonzero(mask)).astype(np.int64))
        lo = hi
    return np.concatenate(chunks)
