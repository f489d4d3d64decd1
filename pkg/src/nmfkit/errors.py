"""Exception and warning types shared across the package."""


class NmfError(Exception):
    """Base class for all nmfkit errors."""


class DimensionMismatch(NmfError):
    """Operand shapes are inconsistent."""


class SingularSystem(NmfError):
    """A Cholesky pivot fell below tolerance; the system is numerically singular."""


class RankTooLarge(NmfError):
    """Requested rank exceeds min(m, n)."""


class InvalidRank(NmfError):
    """Solver rank is invalid for the given matrix."""


class DegenerateInput(NmfError):
    """Input is degenerate for the requested operation (e.g. too few nonzero columns)."""


class PTooLarge(NmfError):
    """Column-averaging count p exceeds the available column pool."""


class ZeroVector(NmfError):
    """A nonzero vector was required."""


class EmptyCorpus(NmfError):
    """No usable documents were supplied."""


class NonpositiveBaseline(NmfError):
    """SVD baseline error must be positive to normalize against."""


class ResourceLimit(NmfError):
    """An operation exceeded available memory."""


class NetworkError(NmfError):
    """A dataset download failed."""


class ChecksumMismatch(NmfError):
    """Downloaded file does not match its recorded checksum."""


class EmptyDocumentWarning(UserWarning):
    """A document produced no tokens; its column is retained as all zeros."""


class CostWarning(UserWarning):
    """The requested operation is expected to be expensive."""
