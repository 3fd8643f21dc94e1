"""Counting the elements of E_n that fix a leaf.

For i in {1,2,3}, A_{n,i} counts elements of E_n restricting to an order-i
permutation of the three level-1 vertices, and A'_{n,i} counts those that
also fix a leaf.  The base table is

    A_1 = (1, 3, 2),   A'_1 = (1, 3, 0),

A'_{n,3} = 0 always (a 3-cycle on level 1 fixes no leaf), the order-1 slice
satisfies A_{n,1} = |E_n|/6 with |E_{n+1}| = 3|E_n|^3, and the fixer slices
obey the one-step recursions

    A'_{n+1,1} = 54 a^2 (p1+p2) - 9 a (p1+p2)^2 + 3 p1 p2^2 + p1^3
    A'_{n+1,2} = 54 a^2 (p1+p2)

with a = A_{n,1}, p_i = A'_{n,i}.  Every count here is an exact integer.

To reach large n we normalize: alpha_n = A'_{n,1}/A_{n,1} and
beta_n = A'_{n,2}/A_{n,1}.  Dividing the recursions by A_{n+1,1} = 108 a^3
gives the self-contained ratio law

    alpha' = [54(alpha+beta) - 9(alpha+beta)^2 + 3 alpha beta^2 + alpha^3]/108
    beta'  = (alpha+beta)/2,

and the fixing proportion is x_n = (alpha_n + beta_n)/6, starting from
(alpha_1, beta_1) = (1, 3), so x_1 = 2/3 and x_2 = 79/162 (= 316/648, the
depth-2 enumeration count).  x_n is sandwiched by the scalar iterations
rho^n(2/3) <= x_{n+1} <= phi^n(1) for rho(t) = t - t^2/2 and
phi(t) = t - t^2/2 + t^3/3, and n*x_n -> 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CapabilityError, UsageError

# Exact big-integer / big-rational iteration is capped by default; the raw
# counts roughly triple their bit length per step.
EXACT_CAP = 8


# ---------------------------------------------------------------------------
# Exact integer tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ATable:
    """Order-slice counts at one depth: A[i] and fixer counts Aprime[i]."""

    n: int
    A: dict
    Aprime: dict

    @property
    def fix_count(self) -> int:
        return self.Aprime[1] + self.Aprime[2]

    @property
    def group_order(self) -> int:
        return self.A[1] + self.A[2] + self.A[3]


def a_table(n: int, exact_cap: int = EXACT_CAP) -> ATable:
    """Exact slice counts at depth n via the one-step recursions."""
    if n < 1:
        raise UsageError(f"depth must be >= 1, got {n}")
    if n > exact_cap:
        raise CapabilityError(
            f"exact tables are capped at depth {exact_cap}; use ratio_step / "
            f"fix_ratio in float mode beyond it"
        )
    a, p1, p2 = 1, 1, 3
    for _ in range(n - 1):
        s = p1 + p2
        p1, p2 = 54 * a * a * s - 9 * a * s * s + 3 * p1 * p2 * p2 + p1**3, 54 * a * a * s
        a = 108 * a**3
    table = ATable(n, {1: a, 2: 3 * a, 3: 2 * a}, {1: p1, 2: p2, 3: 0})
    from .en_groups import order

    assert table.group_order == order("E", n), "slice counts must sum to |E_n|"
    assert all(table.Aprime[i] <= table.A[i] for i in (1, 2, 3))
    return table


def brute_force_fix_count(n: int, kind: str = "E") -> int:
    """Leaf-fixer count by exhaustive enumeration (depth <= 2 only)."""
    from .en_groups import ENUMERATION_CAP, fixed_leaf_count_exact

    if n > ENUMERATION_CAP:
        raise CapabilityError(f"brute force is capped at depth {ENUMERATION_CAP}")
    return fixed_leaf_count_exact(kind, n)


# ---------------------------------------------------------------------------
# Normalized ratio recursion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioState:
    """Normalized fixer counters at one depth; exact if values are Fractions."""

    n: int
    alpha: object
    beta: object

    @property
    def x(self):
        """Proportion of E_n fixing a leaf."""
        return (self.alpha + self.beta) / 6

    @property
    def mode(self) -> str:
        return "exact" if isinstance(self.alpha, Fraction) else "float"


def initial_ratio_state(mode: str = "exact") -> RatioState:
    if mode == "exact":
        return RatioState(1, Fraction(1), Fraction(3))
    if mode == "float":
        return RatioState(1, 1.0, 3.0)
    raise UsageError(f"mode must be 'exact' or 'float', got {mode!r}")


def ratio_step(state: RatioState) -> RatioState:
    """One depth step of the normalized recursion (type-preserving)."""
    a, b = state.alpha, state.beta
    s = a + b
    alpha = (54 * s - 9 * s * s + 3 * a * b * b + a**3) / 108
    beta = s / 2
    return RatioState(state.n + 1, alpha, beta)


def fix_ratio(n: int, mode: str = "auto", exact_cap: int = EXACT_CAP):
    """x_n = |E_{n,fix}| / |E_n|; exact Fraction within the cap, float beyond."""
    if n < 1:
        raise UsageError(f"depth must be >= 1, got {n}")
    if mode == "auto":
        mode = "exact" if n <= exact_cap else "float"
    if mode == "exact" and n > exact_cap:
        raise CapabilityError(
            f"exact ratios are capped at depth {exact_cap}; use float mode"
        )
    state = initial_ratio_state(mode)
    for _ in range(n - 1):
        state = ratio_step(state)
    return state.x


def fix_ratio_float_sequence(n_max: int) -> list[float]:
    """[x_1, ..., x_{n_max}] in 64-bit floats (the maps contract toward 0)."""
    xs = []
    state = initial_ratio_state("float")
    xs.append(state.x)
    for _ in range(n_max - 1):
        state = ratio_step(state)
        xs.append(state.x)
    return xs


# ---------------------------------------------------------------------------
# Scalar comparison dynamics
# ---------------------------------------------------------------------------


def phi(t):
    """Upper comparison map t - t^2/2 + t^3/3; increasing on (0,1)."""
    return t - t * t / 2 + t * t * t / 3


def rho(t):
    """Lower comparison map t - t^2/2; increasing on (0,1)."""
    return t - t * t / 2


def inv_remainder(z):
    """R(z) = (z+2) / (2(6z^2 - 3z + 2)); satisfies R(z) <= 1/(3z) for z > 0."""
    return (z + 2) / (2 * (6 * z * z - 3 * z + 2))


def psi(z):
    """psi(z) = 1/phi(1/z) = z + 1/2 - R(z); drives the 2/n asymptotic."""
    return z + 0.5 - inv_remainder(z)


def phi_iter(n: int) -> float:
    """phi^n(1) as a float."""
    t = 1.0
    for _ in range(n):
        t = phi(t)
    return t


def rho_iter(n: int) -> float:
    """rho^n(2/3) as a float."""
    t = 2.0 / 3.0
    for _ in range(n):
        t = rho(t)
    return t


def psi_iter(n: int) -> float:
    """psi^n(1) as a float; equals 1/phi^n(1) up to roundoff."""
    z = 1.0
    for _ in range(n):
        z = psi(z)
    return z


def phi_iter_exact(n: int) -> Fraction:
    t = Fraction(1)
    for _ in range(n):
        t = phi(t)
    return t


def rho_iter_exact(n: int) -> Fraction:
    t = Fraction(2, 3)
    for _ in range(n):
        t = rho(t)
    return t


# ---------------------------------------------------------------------------
# Sandwich verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SandwichReport:
    """Verified bounds rho^n(2/3) <= x_{n+1} <= phi^n(1) for 1 <= n <= n_max."""

    n_exact: int
    n_max: int
    slack: float
    exact_rows: tuple  # (n, lower, x_{n+1}, upper) as Fractions
    all_strict: bool


def sandwich_check(n_max: int, n_exact: int = EXACT_CAP, slack: float = 1e-10) -> SandwichReport:
    """Verify the sandwich, exactly up to n_exact and in floats beyond.

    A violation is an implementation bug, not a data condition, so it raises.
    """
    if n_max < 1:
        raise UsageError("n_max must be >= 1")
    n_exact = min(n_exact, n_max)
    exact_rows = []
    all_strict = True
    state = initial_ratio_state("exact")
    lower, upper = Fraction(2, 3), Fraction(1)
    for n in range(1, n_exact + 1):
        state = ratio_step(state)  # state now holds x_{n+1}
        lower, upper = rho(lower), phi(upper)
        x_next = state.x
        if not lower <= x_next <= upper:
            raise RuntimeError(f"exact sandwich failed at n={n}")
        all_strict = all_strict and lower < x_next < upper
        exact_rows.append((n, lower, x_next, upper))
    fl_state = RatioState(state.n, float(state.alpha), float(state.beta))
    fl_lower, fl_upper = float(lower), float(upper)
    for n in range(n_exact + 1, n_max + 1):
        fl_state = ratio_step(fl_state)
        fl_lower, fl_upper = rho(fl_lower), phi(fl_upper)
        x_next = fl_state.x
        if not (fl_lower - slack <= x_next <= fl_upper + slack):
            raise RuntimeError(f"float sandwich failed at n={n}")
    return SandwichReport(n_exact, n_max, slack, tuple(exact_rows), all_strict)
