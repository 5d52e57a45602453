"""Exception types shared across the package.

Two failure families matter to callers (and map onto the CLI exit codes):
ParseError for documents that cannot be read in their declared format
(exit 2, together with OSError), and ValidationError for well-formed
inputs that violate a semantic invariant (exit 1).
"""


class ReannotateError(Exception):
    """Base class for every error raised by this package."""


class ParseError(ReannotateError):
    """A document could not be interpreted in its declared format."""


class ValidationError(ReannotateError):
    """Structurally readable input violates a semantic invariant."""
