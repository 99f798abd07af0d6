"""Exception hierarchy shared across the package."""


class ArithChernError(Exception):
    """Base class for every error raised by this package."""


class InadmissiblePrime(ArithChernError):
    """Prime is 2 or divides N0*N (or det q), so the theory excludes it."""


class InexactDivision(ArithChernError):
    """A division that should be exact left a remainder; internal consistency failure."""


class DenominatorNotAllowed(ArithChernError):
    """A coefficient denominator has a prime factor not dividing N0."""


class PrecisionMismatch(ArithChernError):
    """Mixed p-adic scalars with different (p, K)."""


class NonUnit(ArithChernError):
    """Tried to invert a non-unit (residue divisible by p)."""


class RingMismatch(ArithChernError):
    """Series operands disagree in (n, D) or coefficient ring."""


class NonzeroConstantTerm(ArithChernError):
    """Substitution image has a nonzero constant term."""


class SingularConstantTerm(ArithChernError):
    """Matrix series has a non-invertible constant term."""


class NonUniqueStep(ArithChernError):
    """Hensel residual failed its symmetry compatibility; abort loudly."""


class AmbiguousReconstruction(ArithChernError):
    """Rational reconstruction failed its height bound; caller should escalate K."""


class NotGlobalAlongIdentity(ArithChernError):
    """Reconstructed lift has constant term != identity."""


class CertificateFailure(ArithChernError):
    """Reconstructed lift fails an exact identity; K too small, escalate."""


class CurvatureNotDivisible(ArithChernError):
    """Commutator coefficient not divisible by p*p'; falsifies the setup."""


class FormMismatch(ArithChernError):
    """Curvature pair built from lifts of different forms or degrees."""


class SymmetryViolation(ArithChernError):
    """Matrix fails its declared (anti)symmetry."""


class DimensionMismatch(ArithChernError):
    """Dimensions incompatible (e.g. Levi-Civita needs n == m)."""


class ConfigError(ArithChernError):
    """Invalid run configuration."""
