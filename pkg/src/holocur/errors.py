"""Exception hierarchy.  The three branches map onto the CLI exit codes:
InputError -> 2, MathError -> 1, NumericsError -> 3."""


class HolocurError(Exception):
    pass


class InputError(HolocurError):
    """Malformed or inconsistent input (bad schema, invariant violation)."""


class MathError(HolocurError):
    """A mathematically meaningful failure (e.g. an obstruction is nonzero)."""


class NumericsError(HolocurError):
    """A numerical procedure failed to reach its tolerance."""


class ValidationError(InputError):
    pass


class SizeMismatch(InputError):
    pass


class EvaluationAtPole(InputError):
    pass


class PoleOnPath(InputError):
    pass


class ZeroLevel(InputError):
    pass


class SingularElement(InputError):
    pass


class NonTrivialMonodromy(MathError):
    def __init__(self, generator_index, distance):
        self.generator_index = generator_index
        self.distance = distance
        super().__init__(
            f"monodromy around generator {generator_index} is at distance "
            f"{distance:.3e} from the identity"
        )


class ToleranceNotMet(NumericsError):
    pass


class NonConvergence(NumericsError):
    pass


class NonIntegerWinding(NumericsError):
    pass


class ExpOverflow(NumericsError):
    pass


class NonSemisimple(InputError):
    """ad(h) is not diagonalizable within tolerance."""


class AliasingWarning(UserWarning):
    """Top Fourier coefficient of a loop restriction is not negligible."""
