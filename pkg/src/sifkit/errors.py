"""Exception hierarchy for the toolkit.

Every error raised by sifkit derives from SifkitError so callers can catch
one base class at API boundaries (the CLI maps them to exit codes).
"""


class SifkitError(Exception):
    """Base class for all sifkit errors."""


# --- item records ---------------------------------------------------------

class MalformedJson(SifkitError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingContent(SifkitError):
    pass


class RangeViolation(SifkitError):
    pass


# --- SIF parsing / conversion ---------------------------------------------

class NotSif(SifkitError):
    """Input failed SIF validation where valid SIF was required."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class Unconvertible(SifkitError):
    """to_sif cannot produce valid SIF from this input."""


# --- formula engine --------------------------------------------------------

class LexError(SifkitError):
    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)


class FormulaParseError(SifkitError):
    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)


class MissingArgument(FormulaParseError):
    pass


class UnbalancedBrace(FormulaParseError):
    pass


class UnknownStructure(FormulaParseError):
    pass


class GroupParseError(SifkitError):
    """Aggregated per-formula failures from group parsing."""

    def __init__(self, failures):
        # failures: list of (index, exception)
        self.failures = list(failures)
        detail = "; ".join(f"index {i}: {e}" for i, e in self.failures)
        super().__init__(f"{len(self.failures)} formula(s) failed to parse: {detail}")


# --- tokenization / vocabulary / batching ----------------------------------

class TokenizeError(SifkitError):
    def __init__(self, message, item_id=None):
        self.item_id = item_id
        if item_id is not None:
            message = f"item {item_id!r}: {message}"
        super().__init__(message)


class EmptyCorpus(SifkitError):
    pass


class EmptyBatch(SifkitError):
    pass


class EmptyDataset(SifkitError):
    pass


# --- dataset / assets / models ---------------------------------------------

class DatasetBuildError(SifkitError):
    """Aggregated per-item tokenization failures."""

    def __init__(self, failures):
        # failures: list of (index, message)
        self.failures = list(failures)
        detail = "; ".join(f"index {i}: {m}" for i, m in self.failures)
        super().__init__(f"{len(self.failures)} item(s) failed: {detail}")


class MissingAsset(SifkitError):
    pass


class BadBase64(SifkitError):
    pass


class CorruptModel(SifkitError):
    pass


class IdOutOfRange(SifkitError):
    pass


# --- metrics ----------------------------------------------------------------

class LengthMismatch(SifkitError):
    pass


class ZeroVariance(SifkitError):
    pass


class ZeroNorm(SifkitError):
    pass


class DimMismatch(SifkitError):
    pass


class NoRecords(SifkitError):
    pass


class InsufficientStudents(SifkitError):
    pass


# --- pipeline ----------------------------------------------------------------

class UnknownStep(SifkitError):
    def __init__(self, name, index):
        self.step_name = name
        self.index = index
        super().__init__(f"unknown step {name!r} at index {index}")


class BadParams(SifkitError):
    def __init__(self, message, index=None):
        self.index = index
        if index is not None:
            message = f"step {index}: {message}"
        super().__init__(message)


class BadPosition(SifkitError):
    pass
