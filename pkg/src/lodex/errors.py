"""Exception types shared across the package."""


class LodexError(Exception):
    """Base class for all lodex-specific failures."""


class EmptySnapshotError(LodexError):
    """A snapshot locator yielded zero well-formed quads."""


class SnapshotParseError(LodexError):
    """Strict-mode parsing aborted on a malformed line."""


class EmptyDatasetError(LodexError):
    """Index construction requires a non-empty dataset."""


class KindMismatchError(LodexError):
    """A key or index of an incompatible kind was supplied."""


class UniverseMismatchError(LodexError):
    """Distributions must share a single key universe."""


class EmptyUniverseError(LodexError):
    """No keys are available to compare."""


class EmptyGoldError(LodexError):
    """Key recall is undefined for an empty gold key set."""


class ZeroGoldKeysError(LodexError):
    """Normalized perplexity is undefined without gold keys."""


class LengthMismatchError(LodexError):
    """Paired series must have equal length and at least two points."""


class TooFewRowsError(LodexError):
    """Rank correlation needs at least two observation rows."""


class SnapshotError(LodexError):
    """A snapshot inside an evolution run failed to load or process."""
