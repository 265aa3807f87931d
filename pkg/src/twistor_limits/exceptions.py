"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`TwistorError`
and, where it describes bad input, also from :class:`ValueError` so that generic
callers (and scikit-learn style validation code) can catch it as usual.
"""


class TwistorError(Exception):
    pass


# matrix kernel
class NonSquare(TwistorError, ValueError):
    pass


class NonSimpleSpectrum(TwistorError, ValueError):
    pass


# minitwistor family
class OutsideOverlap(TwistorError, ValueError):
    pass


class OutsideDomain(TwistorError, ValueError):
    pass


class ZeroT(TwistorError, ValueError):
    pass


class OutsideHalfSpace(TwistorError, ValueError):
    pass


class NotSigmaInvariant(TwistorError, ValueError):
    pass


class NotARealPoint(TwistorError, ValueError):
    pass


class NoLimit(TwistorError, ArithmeticError):
    pass


# pencils and l-hypercomplex data
class SingularGauge(TwistorError, ValueError):
    pass


class DegeneratePencil(TwistorError, ValueError):
    pass


class NotHypercomplexBase(TwistorError, ValueError):
    pass


class TruncationUnstable(TwistorError, ArithmeticError):
    pass


# monopole curves and bundles
class BranchCut(TwistorError, ValueError):
    pass


class ZeroZeta(TwistorError, ValueError):
    pass


class DegenerateLeading(TwistorError, ArithmeticError):
    pass


class NonSimplePoles(TwistorError, ValueError):
    pass


class NotBased(TwistorError, ValueError):
    pass


# manifest handling
class ManifestError(TwistorError):
    pass


class ParseError(ManifestError):
    pass


class SchemaError(ManifestError):
    pass


class VersionError(ManifestError):
    pass
