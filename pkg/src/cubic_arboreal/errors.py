"""Exception types shared across the package.

Two failure modes are distinguished everywhere: a *usage* error means the
caller passed arguments outside an operation's contract (bad leaf index,
depth mismatch, excluded base point); a *capability* error means the request
is well-formed but beyond a configured state-space or memory budget
(exhaustive enumeration above depth 2, exact iteration above the rational
cap).  The CLI maps them to exit codes 2 and 3 respectively.
"""


class UsageError(ValueError):
    """Arguments violate an operation's precondition."""


class CapabilityError(RuntimeError):
    """Request exceeds a configured state-space, memory, or time budget."""
