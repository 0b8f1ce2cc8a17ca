"""Exception hierarchy shared by every pipeline stage.

Each class carries the process exit code the CLI maps it to, so stages can
raise domain errors without knowing they run inside a service or a script.
"""


class RevalError(Exception):
    """Base class for all pipeline errors."""

    exit_code = 1
    kind = "error"


class FormatError(RevalError):
    """Malformed or out-of-domain input: bad file header, bad JSON line,
    fraction outside (0,1), dimension mismatch, zero vector."""

    exit_code = 2
    kind = "format"


class IntegrityError(RevalError):
    """Cross-file references that do not resolve, e.g. a record naming a
    tweet index with no embedding."""

    exit_code = 3
    kind = "integrity"


class DegenerateDataError(RevalError):
    """Data that is structurally valid but unusable: a zero centroid sum,
    an empty corpus."""

    exit_code = 4
    kind = "degenerate"


class MissingHashtagError(LookupError):
    """A hashtag looked up in a dictionary or thesaurus that has no entry.

    Deliberately not a RevalError: callers decide whether a miss is fatal
    (synonym construction) or a soft fallback (metric evaluation).
    """
