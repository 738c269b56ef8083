"""Exception hierarchy shared by every module.

``AnisospecError`` is the common base so front ends can separate computation
failures from usage and I/O errors.
"""


class AnisospecError(Exception):
    """Base class for computation failures."""


class InvalidAnisotropy(AnisospecError, ValueError):
    pass


class ClassificationAmbiguous(AnisospecError):
    pass


class DominationFailed(AnisospecError):
    pass


class DegenerateBody(AnisospecError):
    pass


class OriginNotInterior(AnisospecError):
    pass


class InvalidRing(AnisospecError, ValueError):
    pass


class InvalidParams(AnisospecError, ValueError):
    pass


class InvalidExponent(AnisospecError, ValueError):
    pass


class InvalidLength(AnisospecError, ValueError):
    pass


class NotDegenerate(AnisospecError):
    pass


class NotConvex(AnisospecError):
    pass


class ZeroAnisotropy(AnisospecError):
    pass


class MeshFailure(AnisospecError):
    pass


class ZeroField(AnisospecError):
    pass


class NoConvergence(AnisospecError):
    """Raised when the descent stalls; ``best`` holds the best iterate seen."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class SingularStiffness(AnisospecError):
    pass
