"""Prime-scan experiments tying the group theory to arithmetic data.

Three scans are provided, all deterministic given (inputs, seed):

* `chebotarev_scan`: factor the reduction of f^n(z) - x mod every retained
  prime p <= B into its distinct-degree pattern and compare the empirical
  pattern frequencies with the cycle-type distribution of the depth-n group
  (exact by enumeration for n <= 2, Monte-Carlo for n = 3).

* `orbit_density_scan`: iterate y <- f(y) mod p from a rational base point
  and record whether the orbit reaches the absorbing values {0, 1}.

* `newton_density_scan`: iterate the Newton map of g(z) = z^3 - z,
  N(z) = 2z^3/(3z^2 - 1), on the projective line over F_p and record whether
  the orbit reaches a root of g.  N is conjugate to f by the Moebius map
  eta(z) = 1/(1-2z)  (eta^{-1} o N o eta = f), so outside finitely many
  convention primes its verdicts must agree prime-by-prime with the orbit
  scan started at eta^{-1}(y0); `scan_agreement` checks exactly that.

Cycle detection uses Brent's power-of-two checkpoint scheme, run either per
prime (scalar reference, plus a hash-set audit variant) or vectorized across
whole batches of primes.  Work is split into fixed-size chunks whose
boundaries do not depend on the worker count, so reports are bit-identical
for any `workers` value.
"""

from __future__ import annotations

import json
import multiprocessing
import time
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import CapabilityError, UsageError
from .modp import f_iterate_mod_p, factor_pattern, reduce_rational, sieve
from .tree_core import cycle_type_str
from .en_groups import cycle_type_distribution

SCHEMA_VERSION = "1"

OUTCOME_NOHIT = 0
OUTCOME_HIT = 1
OUTCOME_SKIP = 2
_OUTCOME_NAMES = {OUTCOME_NOHIT: "nohit", OUTCOME_HIT: "hit", OUTCOME_SKIP: "skip"}

CHEB_CHUNK = 1024
SWEEP_CHUNK = 16384

# Defaults from the arithmetic applications: x = 3/2 satisfies the local
# base-point condition; y0 = 2 is the standard orbit seed.
DEFAULT_BASE_POINT = Fraction(3, 2)
DEFAULT_ORBIT_SEED = Fraction(2)


def tv_distance(d1, d2) -> float:
    """Total variation distance between two distributions over a shared universe."""
    keys = set(d1) | set(d2)
    return 0.5 * sum(abs(float(d1.get(k, 0)) - float(d2.get(k, 0))) for k in keys)


# ---------------------------------------------------------------------------
# Report containers
# ---------------------------------------------------------------------------


@dataclass
class RunMeta:
    """Reproducibility header carried by every report (outside the payload)."""

    command: dict
    seed: int | None
    workers: int
    elapsed_s: float
    version: str = __version__
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "schema_version": self.schema_version,
            "command": self.command,
            "seed": self.seed,
            "workers": self.workers,
            "elapsed_s": self.elapsed_s,
        }


@dataclass
class RangeDensity:
    lo: int
    hi: int
    retained: int
    hits: int

    @property
    def density(self) -> float:
        return self.hits / self.retained if self.retained else 0.0

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "retained": self.retained,
            "hits": self.hits,
            "density": self.density,
        }


@dataclass
class DensityReport:
    kind: str
    base_point: str
    bound: int
    claim: str
    skipped: list
    retained_count: int
    hit_count: int
    ranges: list
    meta: RunMeta | None = None
    primes: np.ndarray = field(default=None, repr=False)
    outcomes: np.ndarray = field(default=None, repr=False)
    steps: np.ndarray = field(default=None, repr=False)

    @property
    def density(self) -> float:
        return self.hit_count / self.retained_count if self.retained_count else 0.0

    def payload_dict(self) -> dict:
        return {
            "kind": self.kind,
            "base_point": self.base_point,
            "bound": self.bound,
            "claim": self.claim,
            "skipped": [[int(p), r] for p, r in self.skipped],
            "retained": self.retained_count,
            "hits": self.hit_count,
            "density": self.density,
            "ranges": [r.to_dict() for r in self.ranges],
        }

    def to_json(self) -> str:
        doc = {"meta": self.meta.to_dict() if self.meta else None,
               "payload": self.payload_dict()}
        return json.dumps(doc, sort_keys=True)

    def csv_rows(self):
        """Per-prime dump rows: prime, outcome, step."""
        yield ("prime", "outcome", "step")
        for p, o, s in zip(self.primes, self.outcomes, self.steps):
            yield (int(p), _OUTCOME_NAMES[int(o)], int(s) if o == OUTCOME_HIT else "")


@dataclass
class ChebotarevReport:
    depth: int
    base_point: str
    bound: int
    claim: str
    group_mode: str
    group_samples: int | None
    skipped: list
    retained_count: int
    empirical_counts: dict
    group_dist: dict
    tv_distance: float
    root_frequency: float
    meta: RunMeta | None = None
    records: list = field(default=None, repr=False)

    @property
    def empirical_freq(self) -> dict:
        n = self.retained_count
        return {k: c / n for k, c in self.empirical_counts.items()} if n else {}

    def payload_dict(self) -> dict:
        return {
            "depth": self.depth,
            "base_point": self.base_point,
            "bound": self.bound,
            "claim": self.claim,
            "group_mode": self.group_mode,
            "group_samples": self.group_samples,
            "skipped": [[int(p), r] for p, r in self.skipped],
            "retained": self.retained_count,
            "empirical_counts": dict(sorted(self.empirical_counts.items())),
            "empirical_freq": dict(sorted(self.empirical_freq.items())),
            "group_dist": dict(sorted(self.group_dist.items())),
            "tv_distance": self.tv_distance,
            "root_frequency": self.root_frequency,
        }

    def to_json(self) -> str:
        doc = {"meta": self.meta.to_dict() if self.meta else None,
               "payload": self.payload_dict()}
        return json.dumps(doc, sort_keys=True)

    def csv_rows(self):
        yield ("prime", "pattern")
        for p, pat in self.records:
            yield (int(p), pat)


@dataclass
class AgreementReport:
    newton_base: str
    orbit_base: str
    bound: int
    excluded: list
    compared: int
    mismatches: list
    meta: RunMeta | None = None

    @property
    def agree(self) -> bool:
        return not self.mismatches

    def payload_dict(self) -> dict:
        return {
            "newton_base": self.newton_base,
            "orbit_base": self.orbit_base,
            "bound": self.bound,
            "excluded": [int(p) for p in self.excluded],
            "compared": self.compared,
            "mismatches": [[int(p), a, b] for p, a, b in self.mismatches],
            "agree": self.agree,
        }

    def to_json(self) -> str:
        doc = {"meta": self.meta.to_dict() if self.meta else None,
               "payload": self.payload_dict()}
        return json.dumps(doc, sort_keys=True)


# ---------------------------------------------------------------------------
# Chunked execution (worker-count independent)
# ---------------------------------------------------------------------------


def _run_chunks(func, chunks: list, workers: int) -> list:
    if workers <= 1 or len(chunks) <= 1:
        return [func(c) for c in chunks]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(min(workers, len(chunks))) as pool:
        return pool.map(func, chunks)


def _chunked(seq, size: int) -> list:
    return [seq[i : i + size] for i in range(0, len(seq), size)]


# ---------------------------------------------------------------------------
# Scalar orbit engines (Brent reference + hash-set audit)
# ---------------------------------------------------------------------------


def _f_mod(y: int, p: int) -> int:
    return (y * y % p) * ((3 - 2 * y) % p) % p


def orbit_outcome(y0: Fraction, p: int) -> tuple[int, int]:
    """(outcome, step) for the f-orbit of y0 mod p; Brent cycle detection."""
    y = reduce_rational(y0, p)
    if y is None:
        return OUTCOME_SKIP, -1
    if y in (0, 1):
        return OUTCOME_HIT, 0
    power = 1
    lam = 0
    tortoise = y
    hare = y
    step = 0
    while True:
        if lam == power:
            tortoise = hare
            power *= 2
            lam = 0
        hare = _f_mod(hare, p)
        step += 1
        lam += 1
        if hare in (0, 1):
            return OUTCOME_HIT, step
        if hare == tortoise:
            return OUTCOME_NOHIT, -1
        if step > 4 * p + 64:  # cycle detection must have fired by now
            raise RuntimeError(f"cycle detection overran at p={p}")


def orbit_outcome_hashset(y0: Fraction, p: int) -> tuple[int, int]:
    """Audit variant of orbit_outcome with an explicit visited set."""
    y = reduce_rational(y0, p)
    if y is None:
        return OUTCOME_SKIP, -1
    seen = set()
    step = 0
    while True:
        if y in (0, 1):
            return OUTCOME_HIT, step
        if y in seen:
            return OUTCOME_NOHIT, -1
        seen.add(y)
        y = _f_mod(y, p)
        step += 1


def _newton_step(Y: int, Z: int, p: int) -> tuple[int, int]:
    Y2 = Y * Y % p
    return (2 * Y2 % p) * Y % p, Z * ((3 * Y2 - Z * Z) % p) % p


def _proj_equal(Y1, Z1, Y2, Z2, p) -> bool:
    return (Y1 * Z2 - Y2 * Z1) % p == 0


def _newton_is_hit(Y: int, Z: int, p: int) -> bool:
    # roots of z^3 - z: 0, 1, -1; the point at infinity is not a root
    return Z != 0 and (Y == 0 or Y == Z or (Y + Z) % p == 0)


def newton_outcome(y0: Fraction, p: int) -> tuple[int, int]:
    """(outcome, step) for the Newton orbit of y0 on P^1(F_p); Brent scheme."""
    if p in (2, 3) or y0.denominator % p == 0:
        return OUTCOME_SKIP, -1
    Y, Z = y0.numerator % p, y0.denominator % p
    if _newton_is_hit(Y, Z, p):
        return OUTCOME_HIT, 0
    power = 1
    lam = 0
    tY, tZ = Y, Z
    step = 0
    while True:
        if lam == power:
            tY, tZ = Y, Z
            power *= 2
            lam = 0
        Y, Z = _newton_step(Y, Z, p)
        step += 1
        lam += 1
        if _newton_is_hit(Y, Z, p):
            return OUTCOME_HIT, step
        if _proj_equal(Y, Z, tY, tZ, p):
            return OUTCOME_NOHIT, -1
        if step > 4 * p + 64:
            raise RuntimeError(f"cycle detection overran at p={p}")


def newton_outcome_hashset(y0: Fraction, p: int) -> tuple[int, int]:
    if p in (2, 3) or y0.denominator % p == 0:
        return OUTCOME_SKIP, -1
    Y, Z = y0.numerator % p, y0.denominator % p
    seen = set()
    step = 0
    while True:
        if _newton_is_hit(Y, Z, p):
            return OUTCOME_HIT, step
        key = Y * pow(Z, p - 2, p) % p if Z else p  # canonical affine value or oo
        if key in seen:
            return OUTCOME_NOHIT, -1
        seen.add(key)
        Y, Z = _newton_step(Y, Z, p)
        step += 1


# ---------------------------------------------------------------------------
# Vectorized sweeps (one batch of primes at a time)
# ---------------------------------------------------------------------------


def _mod_inverse_array(value: int, primes: np.ndarray) -> np.ndarray:
    return np.array([pow(value % int(p), int(p) - 2, int(p)) for p in primes],
                    dtype=np.int64)


def _orbit_sweep(args) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized f-orbit outcomes for a batch of primes."""
    primes, num, den = args
    P = np.asarray(primes, dtype=np.int64)
    out = np.full(P.size, OUTCOME_NOHIT, dtype=np.int8)
    steps = np.full(P.size, -1, dtype=np.int64)
    denr = (den % P).astype(np.int64) if den != 1 else np.ones(P.size, np.int64)
    skip = denr == 0
    out[skip] = OUTCOME_SKIP
    idx = np.flatnonzero(~skip)
    p = P[idx]
    if den == 1:
        y = (num % p).astype(np.int64)
    else:
        y = (num % p) * _mod_inverse_array(den, p) % p
    hit = (y == 0) | (y == 1)
    out[idx[hit]] = OUTCOME_HIT
    steps[idx[hit]] = 0
    keep = ~hit
    idx, p, y = idx[keep], p[keep], y[keep]
    chk = y.copy()
    step = 0
    next_ckpt = 1
    guard = 4 * int(P.max(initial=2)) + 64
    while idx.size:
        step += 1
        if step > guard:
            raise RuntimeError("vectorized cycle detection overran")
        y = (y * y % p) * ((3 - 2 * y) % p) % p
        hit = (y == 0) | (y == 1)
        cyc = (y == chk) & ~hit
        if hit.any():
            out[idx[hit]] = OUTCOME_HIT
            steps[idx[hit]] = step
        keep = ~(hit | cyc)
        if not keep.all():
            idx, p, y, chk = idx[keep], p[keep], y[keep], chk[keep]
        if step == next_ckpt:
            chk = y.copy()
            next_ckpt *= 2
    return out, steps


def _newton_sweep(args) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized Newton-map outcomes on P^1(F_p) for a batch of primes."""
    primes, num, den = args
    P = np.asarray(primes, dtype=np.int64)
    out = np.full(P.size, OUTCOME_NOHIT, dtype=np.int8)
    steps = np.full(P.size, -1, dtype=np.int64)
    skip = (P == 2) | (P == 3) | ((den % P) == 0)
    out[skip] = OUTCOME_SKIP
    idx = np.flatnonzero(~skip)
    p = P[idx]
    Y = (num % p).astype(np.int64)
    Z = (den % p).astype(np.int64)

    def is_hit(Y, Z, p):
        return (Z != 0) & ((Y == 0) | (Y == Z) | ((Y + Z) % p == 0))

    hit = is_hit(Y, Z, p)
    out[idx[hit]] = OUTCOME_HIT
    steps[idx[hit]] = 0
    keep = ~hit
    idx, p, Y, Z = idx[keep], p[keep], Y[keep], Z[keep]
    cY, cZ = Y.copy(), Z.copy()
    step = 0
    next_ckpt = 1
    guard = 4 * int(P.max(initial=2)) + 64
    while idx.size:
        step += 1
        if step > guard:
            raise RuntimeError("vectorized cycle detection overran")
        Y2 = Y * Y % p
        Y, Z = (2 * Y2 % p) * Y % p, Z * ((3 * Y2 - Z * Z) % p) % p
        hit = is_hit(Y, Z, p)
        cyc = ((Y * cZ - cY * Z) % p == 0) & ~hit
        if hit.any():
            out[idx[hit]] = OUTCOME_HIT
            steps[idx[hit]] = step
        keep = ~(hit | cyc)
        if not keep.all():
            idx, p, Y, Z = idx[keep], p[keep], Y[keep], Z[keep]
            cY, cZ = cY[keep], cZ[keep]
        if step == next_ckpt:
            cY, cZ = Y.copy(), Z.copy()
            next_ckpt *= 2
    return out, steps


# ---------------------------------------------------------------------------
# Density scans
# ---------------------------------------------------------------------------


def dyadic_ranges(bound: int) -> list[tuple[int, int]]:
    """Half-open prime ranges (lo, hi] doubling up to the bound."""
    ranges = []
    lo = 1
    while lo < bound:
        hi = min(2 * lo, bound)
        ranges.append((lo, hi))
        lo = hi
    return ranges


def _assemble_density(kind, base_point, bound, claim, primes, out, steps, ranges):
    skip_mask = out == OUTCOME_SKIP
    skipped = [
        (int(p), "convention" if kind == "newton" and int(p) in (2, 3) else "denominator")
        for p in primes[skip_mask]
    ]
    retained = int((~skip_mask).sum())
    hits = int((out == OUTCOME_HIT).sum())
    buckets = []
    for lo, hi in ranges:
        sel = (primes > lo) & (primes <= hi) & ~skip_mask
        buckets.append(
            RangeDensity(lo, hi, int(sel.sum()),
                         int((out[sel] == OUTCOME_HIT).sum()))
        )
    return DensityReport(
        kind=kind, base_point=str(base_point), bound=bound, claim=claim,
        skipped=skipped, retained_count=retained, hit_count=hits,
        ranges=buckets, primes=primes, outcomes=out, steps=steps,
    )


def _sweep_all(sweep, primes: np.ndarray, num: int, den: int,
               workers: int, chunk: int) -> tuple[np.ndarray, np.ndarray]:
    chunks = [(c, num, den) for c in _chunked(primes, chunk)]
    parts = _run_chunks(sweep, chunks, workers)
    out = np.concatenate([o for o, _ in parts]) if parts else np.empty(0, np.int8)
    steps = np.concatenate([s for _, s in parts]) if parts else np.empty(0, np.int64)
    return out, steps


def orbit_density_scan(y0, bound: int, *, ranges=None, workers: int = 1,
                       chunk: int = SWEEP_CHUNK) -> DensityReport:
    """Density of primes p <= bound whose f-orbit of y0 meets {0, 1} mod p."""
    t0 = time.monotonic()
    y0 = Fraction(y0)
    if y0 in (Fraction(0), Fraction(1), Fraction(3, 2), Fraction(-1, 2)):
        raise UsageError(f"orbit seed {y0} is excluded (orbit meets a fixed point)")
    primes = sieve(bound)
    out, steps = _sweep_all(_orbit_sweep, primes, y0.numerator, y0.denominator,
                            workers, chunk)
    report = _assemble_density(
        "orbit", y0, bound,
        "the set of primes dividing some f-orbit value y_i or y_i - 1 has "
        "natural density zero; finite-bound densities shrink with the bound",
        primes, out, steps, ranges or dyadic_ranges(bound),
    )
    report.meta = RunMeta({"y0": str(y0), "bound": bound}, None, workers,
                          time.monotonic() - t0)
    return report


def newton_density_scan(y0, bound: int, *, ranges=None, workers: int = 1,
                        chunk: int = SWEEP_CHUNK) -> DensityReport:
    """Density of primes where the Newton iteration for z^3 - z converges.

    Convergence in the p-adic completion (all but finitely many p) is
    equivalent to the mod-p orbit meeting a root of z^3 - z, so the scan is
    exact and finite per prime.  Primes 2, 3 and denominator primes are
    skipped by convention and listed.
    """
    t0 = time.monotonic()
    y0 = Fraction(y0)
    if y0 in (Fraction(0), Fraction(1), Fraction(-1)):
        raise UsageError(f"Newton seed {y0} is already a root of z^3 - z")
    primes = sieve(bound)
    out, steps = _sweep_all(_newton_sweep, primes, y0.numerator, y0.denominator,
                            workers, chunk)
    report = _assemble_density(
        "newton", y0, bound,
        "the set of primes at which Newton's method for z^3 - z converges "
        "p-adically has natural density zero",
        primes, out, steps, ranges or dyadic_ranges(bound),
    )
    report.meta = RunMeta({"y0": str(y0), "bound": bound}, None, workers,
                          time.monotonic() - t0)
    return report


# ---------------------------------------------------------------------------
# Conjugacy between the Newton map and f
# ---------------------------------------------------------------------------

# N(z) = 2z^3 / (3z^2 - 1), the Newton map z - g(z)/g'(z) of g(z) = z^3 - z.
NEWTON_NUM = (0, 0, 0, 2)
NEWTON_DEN = (-1, 0, 3)

# eta(z) = 1/(1 - 2z) as a Moebius matrix (a, b, c, d) ~ (az + b)/(cz + d)
ETA = (0, 1, -2, 1)


def conjugate_base_point(y0) -> Fraction:
    """eta^{-1}(y0) = (y0 - 1) / (2 y0): the orbit seed conjugate to y0."""
    y0 = Fraction(y0)
    if y0 == 0:
        raise UsageError("eta^{-1} has a pole at 0")
    return (y0 - 1) / (2 * y0)


def _compose_rational(rn, rd, sn, sd):
    """R(S(z)) for R = rn/rd, S = sn/sd, returned cross-multiplied."""
    from .poly_rational import padd, pfrac, pmul, pscale

    d = max(len(rn), len(rd)) - 1
    sn, sd = pfrac(sn), pfrac(sd)
    powers_n = [[Fraction(1)]]
    powers_d = [[Fraction(1)]]
    for _ in range(d):
        powers_n.append(pmul(powers_n[-1], sn))
        powers_d.append(pmul(powers_d[-1], sd))
    num: list = []
    den: list = []
    for i in range(d + 1):
        term = pmul(powers_n[i], powers_d[d - i])
        if i < len(rn) and rn[i]:
            num = padd(num, pscale(term, Fraction(rn[i])))
        if i < len(rd) and rd[i]:
            den = padd(den, pscale(term, Fraction(rd[i])))
    return num, den


def conjugation_identity_holds(mobius=ETA) -> bool:
    """Exact check of mobius^{-1} o N o mobius = f as rational functions."""
    from .poly_rational import f_poly, pfrac, pmul

    a, b, c, d = (Fraction(v) for v in mobius)
    if a * d - b * c == 0:
        raise UsageError("Moebius matrix is singular")
    # N o mobius, cross-multiplied
    n1, d1 = _compose_rational(NEWTON_NUM, NEWTON_DEN, [b, a], [d, c])
    # mobius^{-1}(w) = (dw - b) / (-cw + a), then compose with n1/d1
    n2, d2 = _compose_rational([-b, d], [a, -c], n1, d1)
    lhs = pmul(n2, pfrac([1]))
    rhs = pmul(f_poly(), d2)
    return lhs == rhs


def conjugacy_check(samples: int = 100, seed: int = 0,
                    prime: int = 1_000_003) -> bool:
    """Symbolic identity plus pointwise agreement mod a large prime."""
    if not conjugation_identity_holds():
        return False
    rng = np.random.default_rng(seed)
    p = prime
    checked = 0
    while checked < samples:
        t = int(rng.integers(2, p))
        # eta(t); skip pole of eta and of N, and eta^{-1} pole at 0
        den_eta = (1 - 2 * t) % p
        if den_eta == 0:
            continue
        u = pow(den_eta, p - 2, p)  # eta(t) = 1/(1-2t)
        nden = (3 * u * u - 1) % p
        if nden == 0 or u == 0:
            continue
        w = 2 * u * u % p * u % p * pow(nden, p - 2, p) % p  # N(eta(t))
        if w == 0:
            continue
        lhs = (w - 1) * pow(2 * w % p, p - 2, p) % p  # eta^{-1}(N(eta(t)))
        t2 = t * t % p
        rhs = (3 * t2 - 2 * t2 * t) % p  # f(t) = 3t^2 - 2t^3
        if lhs != rhs:
            return False
        checked += 1
    return True


def _prime_factors(n: int) -> set[int]:
    n = abs(n)
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def scan_agreement(y0, bound: int, *, workers: int = 1,
                   chunk: int = SWEEP_CHUNK) -> AgreementReport:
    """Prime-by-prime agreement of the two scans through the conjugacy.

    Away from 2, 3, and the primes meeting the numerator/denominator of the
    seed, eta reduces to a bijection of P^1(F_p) conjugating N to f, so
    outcome and first-hit step must match exactly.
    """
    t0 = time.monotonic()
    y0 = Fraction(y0)
    w0 = conjugate_base_point(y0)
    newton = newton_density_scan(y0, bound, workers=workers, chunk=chunk)
    orbit = orbit_density_scan(w0, bound, workers=workers, chunk=chunk)
    excluded = {2, 3} | _prime_factors(y0.numerator) | _prime_factors(y0.denominator)
    mismatches = []
    compared = 0
    for p, no, ns, oo, os_ in zip(newton.primes, newton.outcomes, newton.steps,
                                  orbit.outcomes, orbit.steps):
        p = int(p)
        if p in excluded or no == OUTCOME_SKIP or oo == OUTCOME_SKIP:
            continue
        compared += 1
        if no != oo or (no == OUTCOME_HIT and ns != os_):
            mismatches.append((p, f"newton={_OUTCOME_NAMES[int(no)]}@{int(ns)}",
                               f"orbit={_OUTCOME_NAMES[int(oo)]}@{int(os_)}"))
    report = AgreementReport(str(y0), str(w0), bound, sorted(excluded),
                             compared, mismatches)
    report.meta = RunMeta({"y0": str(y0), "bound": bound}, None, workers,
                          time.monotonic() - t0)
    return report


# ---------------------------------------------------------------------------
# Chebotarev-style factorization statistics
# ---------------------------------------------------------------------------


def _chebotarev_chunk(args) -> list:
    primes, depth, num, den = args
    records = []
    for p in primes:
        p = int(p)
        if p == 2:
            records.append((p, None, "even"))
            continue
        x = reduce_rational(Fraction(num, den), p)
        if x is None:
            records.append((p, None, "denominator"))
            continue
        q = f_iterate_mod_p(depth, p)
        const = np.zeros(q.size, dtype=np.int64)
        const[0] = x
        q = (q - const) % p
        pattern = factor_pattern(q, p)
        if not pattern.squarefree:
            records.append((p, None, "non-squarefree"))
            continue
        records.append((p, pattern.parts(), ""))
    return records


def chebotarev_scan(depth: int, x, bound: int, *, workers: int = 1,
                    seed: int = 0, group_samples: int = 1_000_000,
                    chunk: int = CHEB_CHUNK) -> ChebotarevReport:
    """Factor f^depth(z) - x mod retained primes and compare with the group.

    The group side is the exact cycle-type distribution for depth <= 2 and a
    seeded Monte-Carlo estimate at depth 3 (exact enumeration is out of
    reach there).  Retained primes are odd, keep the base point integral,
    and reduce squarefree; the skip list is returned with reasons.
    """
    t0 = time.monotonic()
    if depth > 3:
        raise CapabilityError("factor-pattern scans are capped at depth 3")
    if depth < 1:
        raise UsageError("depth must be >= 1")
    if bound < 1000:
        raise UsageError("bound must be at least 1000 for meaningful statistics")
    x = Fraction(x)
    from .poly_rational import dagger_check

    holds, _ = dagger_check(x)
    if not holds:
        warnings.warn(
            f"base point {x} fails the local condition at 2 and 3; the "
            f"depth-{depth} group side may not match", stacklevel=2)
    primes = sieve(bound)
    chunks = [(c, depth, x.numerator, x.denominator)
              for c in _chunked(primes, chunk)]
    records: list = []
    for part in _run_chunks(_chebotarev_chunk, chunks, workers):
        records.extend(part)

    counts: Counter = Counter()
    skipped = []
    with_root = 0
    for p, parts, reason in records:
        if parts is None:
            skipped.append((p, reason))
        else:
            counts[cycle_type_str(parts)] += 1
            if 1 in parts:
                with_root += 1
    retained = sum(counts.values())

    if depth <= 2:
        dist = cycle_type_distribution("E", depth, "exact")
        group_mode, samples_used = "exact", None
    else:
        dist = cycle_type_distribution("E", depth, "monte_carlo",
                                       samples=group_samples, seed=seed)
        group_mode, samples_used = "monte_carlo", group_samples
    group_dist = {cycle_type_str(t): float(v) for t, v in dist.items()}

    freq = {k: c / retained for k, c in counts.items()} if retained else {}
    tv = tv_distance(freq, group_dist)
    root_freq = with_root / retained if retained else 0.0

    report = ChebotarevReport(
        depth=depth, base_point=str(x), bound=bound,
        claim=(f"factor patterns of the depth-{depth} preimage polynomial "
               f"equidistribute like cycle types of the depth-{depth} group"),
        group_mode=group_mode, group_samples=samples_used, skipped=skipped,
        retained_count=retained, empirical_counts=dict(counts),
        group_dist=group_dist, tv_distance=tv, root_frequency=root_freq,
        records=[(p, cycle_type_str(parts) if parts is not None else f"skip:{reason}")
                 for p, parts, reason in records],
    )
    report.meta = RunMeta(
        {"depth": depth, "x": str(x), "bound": bound, "group_samples": group_samples},
        seed, workers, time.monotonic() - t0)
    return report
