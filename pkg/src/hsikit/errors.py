"""Exception types raised across hsikit."""


class HsikitError(Exception):
    pass


class InvalidParams(HsikitError, ValueError):
    pass


class DomainError(HsikitError, ValueError):
    """Argument outside the domain of a partial function (e.g. log at -I)."""


class UnsupportedDescription(HsikitError):
    pass


class UnknownMarkedWord(HsikitError, KeyError):
    pass


class DisconnectedDiagram(HsikitError, ValueError):
    pass


class NoConvergence(HsikitError):
    """Every restart of the numerical solver stayed above tolerance."""


class InternalError(HsikitError, RuntimeError):
    pass


class InconsistentInputs(HsikitError, ValueError):
    pass


class GenusMismatch(HsikitError, ValueError):
    pass


class SamplingFailure(HsikitError):
    pass


class MoveNotApplicable(HsikitError, ValueError):
    pass


class OpenChain(HsikitError, ValueError):
    pass


class UnsupportedCobordism(HsikitError, ValueError):
    pass
