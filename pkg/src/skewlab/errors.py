"""Exception types shared across the package."""


class SkewlabError(Exception):
    """Base class for all skewlab errors."""


class DomainError(SkewlabError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PreconditionError(SkewlabError, ValueError):
    """A documented precondition failed; the message names the inequality."""


class InvariantError(SkewlabError, ValueError):
    """A structural invariant (map range, anchoring, concavity) is violated."""


class CoverageError(SkewlabError, LookupError):
    """A graph function cannot be evaluated at a required base point."""


class CapabilityError(SkewlabError):
    """The base system lacks a capability (e.g. predecessors) for the request."""


class ConfigError(SkewlabError, ValueError):
    """A configuration document is malformed; the message names the field."""


class RegistryError(ConfigError):
    """Unknown closed-form name or parameters outside the declared domain."""
