"""Automorphisms of the regular ternary rooted tree, stored as portraits.

An automorphism of the depth-n tree carries one S3 label per internal vertex
(levels 0 .. n-1, level order, lexicographic within a level), so the label
array has (3^n - 1)/2 entries.  Vertices are addressed by words over {0,1,2};
a leaf is the integer whose base-3 digits, most significant first, spell its
word.  The element with root label b and child portraits (a1, a2, a3) sends
the leaf (i, rest) to (b(i), a_i(rest)): the child that acts is selected by
the *original* first letter, and the first letter itself is moved by b.

Composition `compose(g, h)` applies h first.  In wreath coordinates this is
((a, b), (a', b')) |-> ((a_{b'(i)} a'_i)_i, b b'), which is derived from, and
property-tested against, the action rule above.

Portraits are immutable values (labels live in a `bytes`), so they hash, can
be shared freely between workers, and every operation here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, UsageError

# Depth guard: label arrays are dense, (3^12 - 1)/2 ~ 2.7e5 entries.
MAX_DEPTH = 12

# ---------------------------------------------------------------------------
# The six elements of S3, acting on {0, 1, 2}.  Index order is fixed:
#   0: e   1: (12)   2: (13)   3: (23)   4: (123)   5: (132)
# where (123) means 1 -> 2 -> 3 -> 1 in 1-based cycle notation.
# ---------------------------------------------------------------------------

S3_IMAGES = ((0, 1, 2), (1, 0, 2), (2, 1, 0), (0, 2, 1), (1, 2, 0), (2, 0, 1))
S3_NAMES = ("e", "(12)", "(13)", "(23)", "(123)", "(132)")
S3_SIGN = (1, -1, -1, -1, 1, 1)
S3_EVEN = (0, 4, 5)
S3_ODD = (1, 2, 3)
S3_BY_NAME = {name: i for i, name in enumerate(S3_NAMES)}

# MUL[a][b] = a o b with b applied first; INV[a] = a^{-1}.
S3_MUL = tuple(
    tuple(
        next(
            k
            for k, img in enumerate(S3_IMAGES)
            if img == tuple(S3_IMAGES[a][S3_IMAGES[b][x]] for x in range(3))
        )
        for b in range(6)
    )
    for a in range(6)
)
S3_INV = tuple(next(k for k in range(6) if S3_MUL[a][k] == 0) for a in range(6))

# numpy views used by the vectorized bulk helpers
_IMG_ARR = np.array(S3_IMAGES, dtype=np.int8)
_SIGN_ARR = np.array(S3_SIGN, dtype=np.int8)
_MUL_ARR = np.array(S3_MUL, dtype=np.int8)


def tree_size(depth: int) -> int:
    """Number of internal vertices of the depth-`depth` tree."""
    return (3**depth - 1) // 2


def level_offset(level: int) -> int:
    """Index of the first vertex of the given level in level order."""
    return (3**level - 1) // 2


@dataclass(frozen=True)
class Portrait:
    """A tree automorphism: depth plus one S3 label per internal vertex."""

    depth: int
    labels: bytes

    def __post_init__(self):
        if not 1 <= self.depth:
            raise UsageError(f"depth must be >= 1, got {self.depth}")
        if self.depth > MAX_DEPTH:
            raise CapabilityError(f"depth {self.depth} exceeds MAX_DEPTH={MAX_DEPTH}")
        if len(self.labels) != tree_size(self.depth):
            raise UsageError(
                f"label array has {len(self.labels)} entries, "
                f"depth {self.depth} needs {tree_size(self.depth)}"
            )
        if len(self.labels) and max(self.labels) > 5:
            raise UsageError("labels must be S3 indices 0..5")

    @property
    def leaf_count(self) -> int:
        return 3**self.depth

    def label_at(self, vertex: int) -> int:
        return self.labels[vertex]

    def is_identity(self) -> bool:
        return not any(self.labels)

    def __repr__(self):
        return f"Portrait({format_portrait(self)!r})"


def identity(depth: int) -> Portrait:
    return Portrait(depth, bytes(tree_size(depth)))


def from_labels(depth: int, labels) -> Portrait:
    return Portrait(depth, bytes(labels))


def _check_same_depth(g: Portrait, h: Portrait):
    if g.depth != h.depth:
        raise UsageError(f"depth mismatch: {g.depth} != {h.depth}")


# ---------------------------------------------------------------------------
# Action on leaves
# ---------------------------------------------------------------------------


def act(g: Portrait, leaf: int) -> int:
    """Image of a leaf (integer in [0, 3^depth)) under g."""
    if not 0 <= leaf < g.leaf_count:
        raise UsageError(f"leaf {leaf} out of range for depth {g.depth}")
    labels = g.labels
    out = 0
    v = 0  # current internal vertex, starting at the root
    for level in range(g.depth):
        digit = (leaf // 3 ** (g.depth - 1 - level)) % 3
        out = 3 * out + S3_IMAGES[labels[v]][digit]
        # descend along the *original* digit; that child's portrait acts next
        v = level_offset(level + 1) + 3 * (v - level_offset(level)) + digit
    return out


def leaf_permutation(g: Portrait) -> np.ndarray:
    """The permutation of all 3^depth leaves, as an int array."""
    return leaf_permutation_bulk(
        np.frombuffer(g.labels, dtype=np.uint8).reshape(1, -1), g.depth
    )[0]


def leaf_permutation_bulk(labels_mat: np.ndarray, depth: int) -> np.ndarray:
    """Leaf permutations for many portraits at once.

    `labels_mat` has one label row per portrait; returns an int32 array of
    shape (rows, 3^depth).  This is the same walk as `act`, run level by
    level over all leaves simultaneously.
    """
    n_rows = labels_mat.shape[0]
    n_leaves = 3**depth
    leaves = np.arange(n_leaves, dtype=np.int32)
    out = np.zeros((n_rows, n_leaves), dtype=np.int32)
    cur = np.zeros((n_rows, n_leaves), dtype=np.int32)  # current vertex
    for level in range(depth):
        digit = ((leaves // 3 ** (depth - 1 - level)) % 3).astype(np.int32)
        lab = np.take_along_axis(labels_mat, cur, axis=1)
        out = 3 * out + _IMG_ARR[lab, digit[None, :]]
        cur = level_offset(level + 1) + 3 * (cur - level_offset(level)) + digit
    return out


# ---------------------------------------------------------------------------
# Group operations
# ---------------------------------------------------------------------------


def vertex_images(g: Portrait) -> list[int]:
    """Image of every internal vertex under g, in level order."""
    img = [0] * len(g.labels)
    labels = g.labels
    for level in range(g.depth - 1):
        off, noff = level_offset(level), level_offset(level + 1)
        for v in range(off, noff):
            base = noff + 3 * (v - off)
            ibase = noff + 3 * (img[v] - off)
            images = S3_IMAGES[labels[v]]
            for c in range(3):
                img[base + c] = ibase + images[c]
    return img


def compose(g: Portrait, h: Portrait) -> Portrait:
    """g o h, applying h first, so act(compose(g,h), x) = act(g, act(h, x))."""
    _check_same_depth(g, h)
    himg = vertex_images(h)
    out = bytes(S3_MUL[g.labels[himg[v]]][h.labels[v]] for v in range(len(h.labels)))
    return Portrait(g.depth, out)


def inverse(g: Portrait) -> Portrait:
    """The inverse automorphism: label at g(v) is labels[v]^{-1}."""
    img = vertex_images(g)
    out = bytearray(len(g.labels))
    for v, lab in enumerate(g.labels):
        out[img[v]] = S3_INV[lab]
    return Portrait(g.depth, bytes(out))


def restrict(g: Portrait, m: int) -> Portrait:
    """Restriction to the depth-m subtree sharing the root: a label prefix."""
    if not 1 <= m <= g.depth:
        raise UsageError(f"restriction level {m} outside 1..{g.depth}")
    return Portrait(m, g.labels[: tree_size(m)])


def wreath_build(a1: Portrait, a2: Portrait, a3: Portrait, b: int) -> Portrait:
    """Assemble ((a1,a2,a3), b) from three equal-depth portraits and b in S3."""
    _check_same_depth(a1, a2)
    _check_same_depth(a1, a3)
    if not 0 <= b <= 5:
        raise UsageError("root label must be an S3 index 0..5")
    parts = [bytes([b])]
    for j in range(a1.depth):
        lo, hi = level_offset(j), level_offset(j + 1)
        parts.append(a1.labels[lo:hi] + a2.labels[lo:hi] + a3.labels[lo:hi])
    return Portrait(a1.depth + 1, b"".join(parts))


def wreath_split(g: Portrait) -> tuple[Portrait, Portrait, Portrait, int]:
    """Inverse of wreath_build; requires depth >= 2."""
    if g.depth < 2:
        raise UsageError("cannot split a depth-1 portrait")
    d = g.depth - 1
    subs = [bytearray(), bytearray(), bytearray()]
    for j in range(d):
        lo, width = level_offset(j + 1), 3**j
        for i in range(3):
            subs[i] += g.labels[lo + i * width : lo + (i + 1) * width]
    a1, a2, a3 = (Portrait(d, bytes(s)) for s in subs)
    return a1, a2, a3, g.labels[0]


# ---------------------------------------------------------------------------
# Signs and cycle structure
# ---------------------------------------------------------------------------


def sign_leaves(g: Portrait) -> int:
    """Parity of g as a permutation of the leaves, from its cycle count."""
    perm = leaf_permutation(g)
    return _sign_from_perm(perm)


def _sign_from_perm(perm: np.ndarray) -> int:
    n = len(perm)
    seen = np.zeros(n, dtype=bool)
    cycles = 0
    for start in range(n):
        if seen[start]:
            continue
        cycles += 1
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
    return 1 if (n - cycles) % 2 == 0 else -1


def sign_recursive(g: Portrait) -> int:
    """Parity via the level rule sgn((a,b)) = sgn(b) * prod sgn(a_i).

    Unrolled, the parity is the product of the signs of all labels.  Kept
    separate from `sign_leaves` so the two serve as mutual oracles.
    """
    neg = sum(1 for lab in g.labels if S3_SIGN[lab] < 0)
    return 1 if neg % 2 == 0 else -1


def sign_at_level(g: Portrait, m: int) -> int:
    """Sign of the restriction of g to the depth-m subtree."""
    if not 1 <= m <= g.depth:
        raise UsageError(f"level {m} outside 1..{g.depth}")
    neg = sum(1 for lab in g.labels[: tree_size(m)] if S3_SIGN[lab] < 0)
    return 1 if neg % 2 == 0 else -1


def cycle_type(g: Portrait) -> tuple[int, ...]:
    """Cycle type of the leaf permutation, parts in descending order."""
    return cycle_type_of_perm(leaf_permutation(g))


def cycle_type_of_perm(perm: np.ndarray) -> tuple[int, ...]:
    n = len(perm)
    seen = np.zeros(n, dtype=bool)
    parts = []
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        parts.append(length)
    parts.sort(reverse=True)
    return tuple(parts)


def cycle_type_str(parts) -> str:
    """Canonical key for a cycle type / factor pattern, e.g. "3+3+3"."""
    return "+".join(str(p) for p in sorted(parts, reverse=True))


def cycle_types_bulk(perms: np.ndarray) -> list[tuple[int, ...]]:
    """Cycle types for a matrix of permutations (one per row).

    Iterated permutation powers give, for every position, the length of the
    cycle through it; dividing positional counts by the length yields the
    multiset of parts.
    """
    n_rows, n = perms.shape
    ident = np.arange(n, dtype=perms.dtype)
    length = np.zeros((n_rows, n), dtype=np.int32)
    power = perms.copy()
    k = 1
    while True:
        hit = (power == ident) & (length == 0)
        length[hit] = k
        if (length != 0).all():
            break
        k += 1
        power = np.take_along_axis(perms, power, axis=1)
    types = []
    for r in range(n_rows):
        counts = np.bincount(length[r], minlength=n + 1)
        parts = []
        for ell in range(n, 0, -1):
            parts.extend([ell] * (counts[ell] // ell))
        types.append(tuple(parts))
    return types


def signs_bulk(labels_mat: np.ndarray) -> np.ndarray:
    """Level-rule parity for every row of a label matrix (+-1 int8)."""
    return _SIGN_ARR[labels_mat].prod(axis=1, dtype=np.int64).astype(np.int8)


# ---------------------------------------------------------------------------
# Textual fixture format
#
#   portrait := s3 | "((" portrait "," portrait "," portrait ")," s3 ")"
#   s3       := "e" | "(12)" | "(13)" | "(23)" | "(123)" | "(132)"
#
# Depth-1 portraits are a bare S3 name; deeper ones mirror ((a1,a2,a3),b).
# Whitespace between tokens is ignored.
# ---------------------------------------------------------------------------


def format_portrait(g: Portrait) -> str:
    if g.depth == 1:
        return S3_NAMES[g.labels[0]]
    a1, a2, a3, b = wreath_split(g)
    return (
        f"(({format_portrait(a1)},{format_portrait(a2)},{format_portrait(a3)}),"
        f"{S3_NAMES[b]})"
    )


def _tokenize_portrait(text: str) -> list[str]:
    import re

    tokens = []
    pos = 0
    pat = re.compile(r"\s*(\(\d+\)|e|\(|\)|,)")
    while pos < len(text):
        m = pat.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise UsageError(f"bad portrait syntax near {text[pos:pos+12]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def parse_portrait(text: str) -> Portrait:
    """Parse the nested-parenthesis fixture format back into a Portrait."""
    tokens = _tokenize_portrait(text)
    pos = 0

    def expect(tok):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != tok:
            got = tokens[pos] if pos < len(tokens) else "<end>"
            raise UsageError(f"expected {tok!r}, got {got!r}")
        pos += 1

    def parse_node() -> Portrait:
        nonlocal pos
        if pos >= len(tokens):
            raise UsageError("unexpected end of portrait text")
        tok = tokens[pos]
        if tok in S3_BY_NAME:
            pos += 1
            return Portrait(1, bytes([S3_BY_NAME[tok]]))
        expect("(")
        expect("(")
        a1 = parse_node()
        expect(",")
        a2 = parse_node()
        expect(",")
        a3 = parse_node()
        expect(")")
        expect(",")
        btok = tokens[pos] if pos < len(tokens) else "<end>"
        if btok not in S3_BY_NAME:
            raise UsageError(f"expected an S3 name, got {btok!r}")
        pos += 1
        expect(")")
        return wreath_build(a1, a2, a3, S3_BY_NAME[btok])

    node = parse_node()
    if pos != len(tokens):
        raise UsageError(f"trailing tokens after portrait: {tokens[pos:]}")
    return node
