"""The subgroup chain H_n <= E_n <= Aut(T_n) on the ternary tree.

E_1 is all of Aut(T_1) ~ S3; for n >= 2 an element ((a1,a2,a3), b) lies in
E_n iff each a_i lies in E_{n-1} and the restriction to the depth-2 subtree
is an even permutation of its 9 leaves.  Unrolled over the portrait, this is
one linear scan: at every vertex v of level <= n-2, the label at v and the
labels at its three children must have sign product +1.

H_n is the subgroup of portraits whose labels all lie in the cyclic part
{e, (123), (132)}; it is a Sylow 3-subgroup of E_n.

Orders:  |Aut(T_n)| = 6^((3^n-1)/2),   |E_n| = 2^(3^(n-1)) * 3^((3^n-1)/2),
         |H_n| = 3^((3^n-1)/2).

Uniform sampling over E_n needs no rejection: draw the bottom-level labels
uniformly in S3, then walk upward choosing each label uniformly among the
three S3 elements of the sign forced by its children.  Every element is hit
with probability 6^(-3^(n-1)) * 3^(-(3^(n-1)-1)/2) = 1/|E_n|.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from .errors import CapabilityError, UsageError
from .tree_core import (
    MAX_DEPTH,
    Portrait,
    S3_EVEN,
    S3_NAMES,
    S3_ODD,
    S3_SIGN,
    cycle_types_bulk,
    identity,
    leaf_permutation_bulk,
    level_offset,
    signs_bulk,
    tree_size,
    wreath_build,
)

GROUP_KINDS = ("E", "H", "AUT")

# Enumeration is exhaustive only through depth 2 (|E_3| = 2^9 * 3^13).
ENUMERATION_CAP = 2

_EVEN_ARR = np.array(S3_EVEN, dtype=np.int8)
_ODD_ARR = np.array(S3_ODD, dtype=np.int8)
_C3_ARR = _EVEN_ARR  # the cyclic subgroup {e, (123), (132)}
_SIGN_ARR = np.array(S3_SIGN, dtype=np.int8)


def _check_kind(kind: str):
    if kind not in GROUP_KINDS:
        raise UsageError(f"group kind must be one of {GROUP_KINDS}, got {kind!r}")


def _check_depth(n: int):
    if n < 1:
        raise UsageError(f"depth must be >= 1, got {n}")
    if n > MAX_DEPTH:
        raise CapabilityError(f"depth {n} exceeds MAX_DEPTH={MAX_DEPTH}")


# ---------------------------------------------------------------------------
# Membership and orders
# ---------------------------------------------------------------------------


def is_in_E(g: Portrait) -> bool:
    """Linear-scan membership test for E_n (depth-1 portraits always pass)."""
    labels = g.labels
    for level in range(g.depth - 1):
        off, noff = level_offset(level), level_offset(level + 1)
        for v in range(off, noff):
            base = noff + 3 * (v - off)
            s = S3_SIGN[labels[v]]
            for c in range(3):
                s *= S3_SIGN[labels[base + c]]
            if s != 1:
                return False
    return True


def is_in_H(g: Portrait) -> bool:
    """True iff every label lies in the cyclic part {e, (123), (132)}."""
    return all(lab in (0, 4, 5) for lab in g.labels)


def order(kind: str, n: int) -> int:
    """Exact group order by closed formula (arbitrary-precision)."""
    _check_kind(kind)
    if n < 1:
        raise UsageError(f"depth must be >= 1, got {n}")
    half = (3**n - 1) // 2
    if kind == "AUT":
        return 6**half
    if kind == "H":
        return 3**half
    return 2 ** (3 ** (n - 1)) * 3**half


def hausdorff_ratio(kind: str, n: int) -> float:
    """log|G_n| / log|Aut(T_n)|, evaluated from the exact exponents."""
    _check_kind(kind)
    if n < 1:
        raise UsageError(f"depth must be >= 1, got {n}")
    half = (3**n - 1) // 2
    denom = half * math.log(6)
    if kind == "AUT":
        return 1.0
    if kind == "H":
        return half * math.log(3) / denom
    return (3 ** (n - 1) * math.log(2) + half * math.log(3)) / denom


def hausdorff_limit(kind: str) -> float:
    """Limit of hausdorff_ratio(kind, n) as n grows."""
    _check_kind(kind)
    if kind == "AUT":
        return 1.0
    if kind == "H":
        return math.log(3) / math.log(6)
    return 1.0 - math.log(2) / (3.0 * math.log(6))


# ---------------------------------------------------------------------------
# Enumeration (exhaustive only for n <= 2)
# ---------------------------------------------------------------------------


def enumerate_labels(kind: str, n: int) -> np.ndarray:
    """Label matrix of the full group, one row per element (n <= 2 only)."""
    _check_kind(kind)
    _check_depth(n)
    if n > ENUMERATION_CAP:
        raise CapabilityError(
            f"exhaustive enumeration is capped at depth {ENUMERATION_CAP}; "
            f"use sampling for depth {n}"
        )
    alphabet = (0, 4, 5) if kind == "H" else tuple(range(6))
    if n == 1:
        return np.array([[a] for a in alphabet], dtype=np.int8)
    rows = [
        (b, a1, a2, a3)
        for b in alphabet
        for a1 in alphabet
        for a2 in alphabet
        for a3 in alphabet
    ]
    mat = np.array(rows, dtype=np.int8)
    if kind == "E":
        mat = mat[signs_bulk(mat) == 1]
    return mat


def enumerate_group(kind: str, n: int):
    """Yield every element of the group exactly once (n <= 2 only)."""
    for row in enumerate_labels(kind, n):
        yield Portrait(n, bytes(int(v) for v in row))


def enumerate_E(n: int):
    return enumerate_group("E", n)


# ---------------------------------------------------------------------------
# Exact uniform sampling
# ---------------------------------------------------------------------------


def sample_group_labels(kind: str, n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform label rows from the group; (count, (3^n-1)/2) int8 matrix.

    Draw order is fixed (bottom level first, then upward level by level), so
    a given seed always produces the same rows.
    """
    _check_kind(kind)
    _check_depth(n)
    size = tree_size(n)
    if kind == "AUT":
        return rng.integers(0, 6, size=(count, size), dtype=np.int8)
    if kind == "H":
        return _C3_ARR[rng.integers(0, 3, size=(count, size))]
    labels = np.zeros((count, size), dtype=np.int8)
    lo = level_offset(n - 1)
    labels[:, lo:] = rng.integers(0, 6, size=(count, 3 ** (n - 1)), dtype=np.int8)
    for level in range(n - 2, -1, -1):
        lo, hi = level_offset(level), level_offset(level + 1)
        child_hi = level_offset(level + 2)
        children = labels[:, hi:child_hi].reshape(count, hi - lo, 3)
        forced = _SIGN_ARR[children].prod(axis=2, dtype=np.int32)
        draw = rng.integers(0, 3, size=(count, hi - lo))
        labels[:, lo:hi] = np.where(forced == 1, _EVEN_ARR[draw], _ODD_ARR[draw])
    return labels


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_portrait(kind: str, n: int, rng) -> Portrait:
    rng = _as_generator(rng)
    row = sample_group_labels(kind, n, 1, rng)[0]
    return Portrait(n, bytes(int(v) for v in row))


def sample_E_uniform(n: int, rng) -> Portrait:
    """One exactly-uniform element of E_n (no rejection)."""
    return sample_portrait("E", n, rng)


def sample_E_rejection(n: int, rng, max_tries: int = 10000) -> Portrait:
    """Rejection sampler kept as a distribution cross-check.

    Children are drawn uniformly from E_{n-1} and the root label uniformly
    from S3; acceptance (sign condition at the root) is exactly 1/2.
    """
    rng = _as_generator(rng)
    if n == 1:
        return Portrait(1, bytes([int(rng.integers(0, 6))]))
    for _ in range(max_tries):
        subs = [sample_E_uniform(n - 1, rng) for _ in range(3)]
        b = int(rng.integers(0, 6))
        g = wreath_build(subs[0], subs[1], subs[2], b)
        root_sign = S3_SIGN[b]
        for sub in subs:
            root_sign *= S3_SIGN[sub.labels[0]]
        if root_sign == 1:
            return g
    raise RuntimeError("rejection sampler failed to accept; rng is broken")


# ---------------------------------------------------------------------------
# Special elements
# ---------------------------------------------------------------------------


def bottom_swap(n: int) -> Portrait:
    """Transposes one adjacent pair of bottom-level leaves, fixing the rest.

    Its sign is -1, so it lies outside E_n for every n >= 2; conjugating by
    it is the standard witness that E_n is non-normal for n >= 3.
    """
    _check_depth(n)
    labels = bytearray(tree_size(n))
    labels[level_offset(n - 1)] = 1  # (12) at the leftmost deepest vertex
    return Portrait(n, bytes(labels))


def nested_swap(n: int) -> Portrait:
    """Carries the label (12) at every vertex along the leftmost path.

    Lies in E_n for all n (the depth-2 restriction is even) but never in
    H_n, and conjugating by it witnesses that H_n is non-normal in E_n for
    n >= 2.
    """
    _check_depth(n)
    labels = bytearray(tree_size(n))
    for level in range(n):
        labels[level_offset(level)] = 1
    return Portrait(n, bytes(labels))


def _as_s3_index(value) -> int:
    if isinstance(value, str):
        if value not in S3_NAMES:
            raise UsageError(f"unknown S3 name {value!r}")
        return S3_NAMES.index(value)
    value = int(value)
    if not 0 <= value <= 5:
        raise UsageError(f"S3 index out of range: {value}")
    return value


def special_even_block(n: int, bottom_choices) -> Portrait:
    """Element that is trivial above the last level and even on each bottom T_2.

    `bottom_choices` assigns one (c1, c2, c3) triple of S3 labels (names or
    indices) to each vertex of level n-2; each triple must have sign product
    +1.  The result acts trivially on the depth-(n-1) subtree and by an even
    permutation on the 9 leaves below each level-(n-2) vertex, which is
    enough to place it in E_n; membership is re-checked, not assumed.
    """
    if n < 2:
        raise UsageError("special elements need depth >= 2")
    _check_depth(n)
    slots = 3 ** (n - 2)
    choices = list(bottom_choices)
    if len(choices) != slots:
        raise UsageError(f"need {slots} triples for depth {n}, got {len(choices)}")
    labels = bytearray(tree_size(n))
    lo = level_offset(n - 1)
    for j, triple in enumerate(choices):
        triple = tuple(_as_s3_index(c) for c in triple)
        if len(triple) != 3:
            raise UsageError("each bottom choice must be a triple")
        if S3_SIGN[triple[0]] * S3_SIGN[triple[1]] * S3_SIGN[triple[2]] != 1:
            raise UsageError(f"triple {triple} has sign product -1")
        labels[lo + 3 * j : lo + 3 * j + 3] = bytes(triple)
    g = Portrait(n, bytes(labels))
    assert is_in_E(g), "even-block construction must land in E_n"
    return g


# ---------------------------------------------------------------------------
# Normality
# ---------------------------------------------------------------------------


def _parities_bulk(perms: np.ndarray) -> np.ndarray:
    """Parity (+-1) of each row permutation, from per-position cycle lengths."""
    n_rows, n = perms.shape
    ident = np.arange(n, dtype=perms.dtype)
    length = np.zeros((n_rows, n), dtype=np.int16)
    power = perms.copy()
    k = 1
    while True:
        hit = (power == ident) & (length == 0)
        length[hit] = k
        if (length != 0).all():
            break
        k += 1
        power = np.take_along_axis(perms, power, axis=1)
    cycles = (1.0 / length).sum(axis=1).round().astype(np.int64)
    return np.where((n - cycles) % 2 == 0, 1, -1).astype(np.int8)


def _exhaustive_E2_normal_in_aut2() -> bool:
    """Check g s g^-1 in E_2 for every g in Aut(T_2) and s in E_2."""
    aut = enumerate_labels("AUT", 2)
    perms = leaf_permutation_bulk(aut, 2)
    e_perms = perms[signs_bulk(aut) == 1]
    for g in perms:
        g_inv = np.empty_like(g)
        g_inv[g] = np.arange(9, dtype=g.dtype)
        conj = g[e_perms[:, g_inv]]
        if not (_parities_bulk(conj) == 1).all():
            return False
    return True


def _exhaustive_H1_normal_in_E1() -> bool:
    from .tree_core import compose, inverse

    h1 = list(enumerate_group("H", 1))
    for g in enumerate_group("E", 1):
        for s in h1:
            if not is_in_H(compose(compose(g, s), inverse(g))):
                return False
    return True


def normality_witness(mode: str, n: int, exhaustive: bool = False):
    """Witness of non-normality, or None after verifying normality.

    mode "E-in-AUT": E_n inside Aut(T_n) is normal iff n <= 2.
    mode "H-in-E":   H_n inside E_n is normal iff n = 1.

    For the non-normal cases, returns (conjugator, element, conjugate) where
    the element lies in the subgroup and its conjugate does not; these are
    the explicit bottom_swap / nested_swap conjugations.  `exhaustive=True`
    asks for a full pairwise scan, which is only feasible for n <= 2.
    """
    from .tree_core import compose, inverse

    _check_depth(n)
    if mode not in ("E-in-AUT", "H-in-E"):
        raise UsageError(f"unknown normality mode {mode!r}")
    if exhaustive and n > 2:
        raise CapabilityError("exhaustive normality scan is capped at depth 2")

    if mode == "E-in-AUT":
        if n == 1:
            return None  # E_1 is the whole group
        if n == 2:
            assert _exhaustive_E2_normal_in_aut2(), "E_2 must be normal in Aut(T_2)"
            return None
        conjugator = bottom_swap(n)
        element = wreath_build(identity(n - 1), identity(n - 1), identity(n - 1), 4)
        conj = compose(compose(conjugator, element), inverse(conjugator))
        assert is_in_E(element) and not is_in_E(conj)
        return conjugator, element, conj

    if n == 1:
        assert _exhaustive_H1_normal_in_E1(), "H_1 must be normal in E_1"
        return None
    conjugator = nested_swap(n)
    element = wreath_build(identity(n - 1), identity(n - 1), identity(n - 1), 4)
    conj = compose(compose(conjugator, element), inverse(conjugator))
    assert is_in_H(element) and not is_in_H(conj)
    return conjugator, element, conj


# ---------------------------------------------------------------------------
# Cycle-type distributions
# ---------------------------------------------------------------------------


def cycle_type_distribution(kind: str, n: int, mode: str = "exact",
                            samples: int | None = None, seed: int | None = None,
                            batch: int = 200_000) -> dict:
    """Distribution of leaf-permutation cycle types over the group.

    mode "exact" enumerates the group (n <= 2) and returns exact Fractions;
    mode "monte_carlo" draws `samples` uniform elements with the given seed
    and returns empirical frequencies as floats.
    """
    from collections import Counter
    from fractions import Fraction

    if mode == "exact":
        labels = enumerate_labels(kind, n)
        types = cycle_types_bulk(leaf_permutation_bulk(labels, n))
        counts = Counter(types)
        total = len(types)
        return {t: Fraction(c, total) for t, c in sorted(counts.items())}
    if mode != "monte_carlo":
        raise UsageError(f"mode must be 'exact' or 'monte_carlo', got {mode!r}")
    if samples is None or seed is None:
        raise UsageError("monte_carlo mode needs samples and seed")
    rng = np.random.default_rng(seed)
    counts: Counter = Counter()
    done = 0
    while done < samples:
        k = min(batch, samples - done)
        labels = sample_group_labels(kind, n, k, rng)
        counts.update(cycle_types_bulk(leaf_permutation_bulk(labels, n)))
        done += k
    return {t: c / samples for t, c in sorted(counts.items())}


def fixed_leaf_fraction_mc(kind: str, n: int, samples: int, seed: int,
                           batch: int = 200_000) -> float:
    """Monte-Carlo estimate of P(a uniform group element fixes some leaf)."""
    rng = np.random.default_rng(seed)
    n_leaves = 3**n
    ident = np.arange(n_leaves, dtype=np.int32)
    hits = 0
    done = 0
    while done < samples:
        k = min(batch, samples - done)
        labels = sample_group_labels(kind, n, k, rng)
        perms = leaf_permutation_bulk(labels, n)
        hits += int((perms == ident).any(axis=1).sum())
        done += k
    return hits / samples


def fixed_leaf_count_exact(kind: str, n: int) -> int:
    """Number of group elements fixing at least one leaf, by enumeration."""
    labels = enumerate_labels(kind, n)
    perms = leaf_permutation_bulk(labels, n)
    ident = np.arange(3**n, dtype=np.int32)
    return int((perms == ident).any(axis=1).sum())
