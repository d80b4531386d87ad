"""Exception types shared across the package."""


class LatticeError(ValueError):
    """Bad input or a violated precondition.  CLI exit code 1."""


class LimitExceeded(LatticeError):
    """A configured search or closure limit was hit before completion."""


class InvariantViolation(RuntimeError):
    """An internal invariant that holds for every valid input failed.

    Raising this is a bug-report trigger: either the input is adversarial
    lattice data with no geometric realization, or the library is wrong.
    CLI exit code 2.
    """
