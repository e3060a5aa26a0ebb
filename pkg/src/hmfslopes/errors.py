"""Exception types shared across the package."""


class HmfError(Exception):
    pass


class RamifiedPrime(HmfError, ValueError):
    pass


class UnsupportedModulus(HmfError, ValueError):
    pass


class NonUnitInverse(HmfError, ZeroDivisionError):
    pass


class PrecisionTooLow(HmfError):
    pass


class NonParitious(HmfError, ValueError):
    pass


class NotAnOrder(HmfError):
    pass


class EnumerationBoundExceeded(HmfError):
    pass


class PrincipalizationFailure(HmfError):
    pass


class CacheVersionMismatch(HmfError):
    pass


class HashMismatch(HmfError):
    pass


class ShapeViolation(HmfError, ValueError):
    pass


class UnstableSubspace(HmfError, ValueError):
    pass


class Infeasible(HmfError):
    pass


class Underdetermined(HmfError):
    pass


class NoStabilization(HmfError):
    pass


class EmptySmallestWeight(HmfError):
    pass


class ConfigInvalid(HmfError, ValueError):
    pass


class IoFailure(HmfError, OSError):
    pass
