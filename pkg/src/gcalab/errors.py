"""Exception hierarchy shared by the library and the CLI."""


class GcaError(Exception):
    """Base class for all library errors."""


class StructureError(GcaError, ValueError):
    """Inputs are structurally incompatible (wrong group, bad table, mismatched sizes)."""


class BudgetExceeded(GcaError, RuntimeError):
    """An exhaustive computation would exceed its configured size budget."""

    def __init__(self, what, needed, budget):
        super().__init__(f"{what}: needs {needed}, budget is {budget}")
        self.what = what
        self.needed = needed
        self.budget = budget


class NotEquivariant(GcaError):
    """A function table failed the equivariance test, so it is not a cellular automaton.

    ``counterexample`` is the first ``(h, x)`` pair (element index, config index)
    for which ``h . f(x) != f(phi(h) . x)``.
    """

    def __init__(self, counterexample):
        h, x = counterexample
        super().__init__(f"not phi-equivariant: fails at h={h}, x=config#{x}")
        self.counterexample = counterexample


class NotBijective(GcaError):
    """Inversion was requested for a non-bijective automaton.

    Exactly one of ``collision`` (a pair of distinct config indices with equal
    image) and ``non_image`` (a codomain config index never hit) is set.
    """

    def __init__(self, collision=None, non_image=None):
        if collision is not None:
            msg = f"not injective: configs #{collision[0]} and #{collision[1]} collide"
        else:
            msg = f"not surjective: config #{non_image} has no preimage"
        super().__init__(msg)
        self.collision = collision
        self.non_image = non_image


class TheoremViolation(GcaError, AssertionError):
    """A proved identity failed at runtime. Always a library defect."""
