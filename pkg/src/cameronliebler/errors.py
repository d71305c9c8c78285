"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class CameronLieblerError(Exception):
    """Base class for every error raised by this package."""


# field construction and arithmetic
class NonPrime(CameronLieblerError, ValueError):
    pass


class CapExceeded(CameronLieblerError, ValueError):
    pass


class NotASubfield(CameronLieblerError, ValueError):
    pass


class EvenCharacteristic(CameronLieblerError, ValueError):
    pass


class ZeroElement(CameronLieblerError, ValueError):
    pass


class BadModulus(CameronLieblerError, ValueError):
    pass


class NotPrimitive(CameronLieblerError, ValueError):
    pass


# character sums
class MixedFields(CameronLieblerError, ValueError):
    pass


class PrincipalChi(CameronLieblerError, ValueError):
    pass


class BadOrder(CameronLieblerError, ValueError):
    pass


class DivisibleByGroupOrder(CameronLieblerError, ValueError):
    pass


# geometry and construction
class NotOnQuadric(CameronLieblerError, ValueError):
    pass


class BadResidue(CameronLieblerError, ValueError):
    pass


class BadBeta(CameronLieblerError, ValueError):
    pass


class BadTangent(CameronLieblerError, ValueError):
    pass


class DecompositionFailure(CameronLieblerError, RuntimeError):
    pass


class SizeMismatch(CameronLieblerError, RuntimeError):
    pass


class TraceInvariantFailure(CameronLieblerError, RuntimeError):
    """Raised when Tr(w^l) != 0 for some l in I_X."""


# affine plane
class GammaInSubfield(CameronLieblerError, ValueError):
    pass


class TraceZero(CameronLieblerError, ValueError):
    pass


# certificate failures; each carries the offending witness
class CertificateViolation(CameronLieblerError, AssertionError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class SpectrumViolation(CertificateViolation):
    pass


class TightSetViolation(CertificateViolation):
    pass


class IntersectionViolation(CertificateViolation):
    pass


class TuViolation(CertificateViolation):
    pass


class SpreadViolation(CertificateViolation):
    pass


class AutomorphismViolation(CertificateViolation):
    pass


class ProfileViolation(CertificateViolation):
    pass


class ModulusViolation(CertificateViolation):
    pass


class SchemeViolation(CertificateViolation):
    pass


class Violation(CertificateViolation):
    pass


# front end
class ConfigError(CameronLieblerError, ValueError):
    pass


class MalformedReport(CameronLieblerError, ValueError):
    pass
