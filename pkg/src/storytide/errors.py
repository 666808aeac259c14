"""Exception types shared across the package."""


class StorytideError(Exception):
    """Base class for every error this package raises on purpose."""


class ParseError(StorytideError):
    """A payload document does not follow the canonical schema.

    ``path`` points at the first offending node, e.g.
    ``reels_media[0].items[2].media_type``.
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{message} (at {path})" if path else message)


class FormatError(StorytideError):
    """Input file is not in the expected container format (e.g. not HAR 1.2)."""


class InitRefused(StorytideError):
    """Refusing to initialise an archive over a directory holding foreign files."""


class IncompatibleVersion(StorytideError):
    """Archive on disk was written by an incompatible layout version."""


class UnknownItem(StorytideError):
    """Requested item_id is not present in the archive."""


class UnknownSession(StorytideError):
    """Observation recorded against a session that was never begun."""


class EmptyCandidates(StorytideError):
    """Best-media selection called with no candidates."""


class InvalidInterval(StorytideError):
    """Schedule parameters are out of range."""


class PlanTooShort(StorytideError):
    """Coverage analysis needs a plan with at least two sessions."""


class MissingKey(StorytideError):
    """Pseudonymization requested without a usable key."""
