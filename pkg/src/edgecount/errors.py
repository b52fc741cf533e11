"""Exception taxonomy shared by the library and the CLI.

The CLI maps these onto exit codes: InvalidArgumentError -> 2 (usage/config),
DataError -> 3 (bad input data), InternalInconsistencyError -> 4.
"""


class EdgecountError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(EdgecountError, ValueError):
    """A caller-supplied argument or configuration value is out of contract."""


class DataError(EdgecountError, ValueError):
    """An input file or dataset is malformed or unreadable."""


class InternalInconsistencyError(EdgecountError, RuntimeError):
    """A computed quantity violated an invariant that should hold by construction."""
