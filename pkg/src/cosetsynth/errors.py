"""Exception hierarchy shared by every cosetsynth module."""


class CosetSynthError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(CosetSynthError, ValueError):
    """Operand shapes are incompatible, or a dimension is not 2**n."""


class SingularityError(CosetSynthError, ArithmeticError):
    """A matrix that must be inverted is (numerically) singular.

    Attributes:
        sigma_min: estimated smallest singular value of the offending matrix.
    """

    def __init__(self, message: str, sigma_min: float):
        super().__init__(f"{message} (smallest singular value {sigma_min:.3e})")
        self.sigma_min = sigma_min


class SingularBlockError(SingularityError):
    """The top-left block U11 is too close to singular for a coset decomposition."""


class SymmetryError(CosetSynthError, ValueError):
    """Input expected to be Hermitian is not."""


class DefinitenessError(CosetSynthError, ValueError):
    """Input expected to be positive semidefinite has a negative eigenvalue."""


class UnitarityError(CosetSynthError, ValueError):
    """Input expected to be unitary is not."""


class NormalityError(CosetSynthError, ValueError):
    """Input expected to be a normal matrix is not."""


class RangeError(CosetSynthError, ValueError):
    """A value lies outside its admissible range (e.g. singular value above 1)."""


class StructureError(CosetSynthError, ValueError):
    """A matrix lacks a required block structure."""


class ConvergenceError(CosetSynthError, RuntimeError):
    """The middle-extraction iteration did not converge.

    Attributes:
        history: per-iteration residuals recorded before giving up.
    """

    def __init__(self, message: str, history=None):
        super().__init__(message)
        self.history = list(history or [])


class SynthesisError(CosetSynthError, RuntimeError):
    """Synthesis gave up, e.g. after exhausting singular-block retries."""


class VerificationError(CosetSynthError, RuntimeError):
    """An emitted sequence does not reproduce its target.

    Attributes:
        distance: Frobenius distance between evaluated sequence and target.
        sequence: the offending sequence, kept for inspection.
    """

    def __init__(self, message: str, distance: float, sequence=None):
        super().__init__(message)
        self.distance = distance
        self.sequence = sequence


class FormatError(CosetSynthError, ValueError):
    """A matrix or sequence document does not match its JSON schema."""
