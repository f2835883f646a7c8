"""
Exceptions

This module contains the exception hierarchy raised by the models and numerical services.
The CLI blueprints translate these into exit codes, so every failure a user
can trigger with bad input derives from ValidationError.
"""


class CopmixError(Exception):
    """Base exception for all estimation and clustering errors."""
    pass


class ValidationError(CopmixError, ValueError):
    """Custom exception for invalid inputs and violated preconditions."""
    pass


class DegenerateSupportError(ValidationError):
    """Raised when every observation is identical and no padding is requested."""

    def __init__(self, message="degenerate support: all values are identical"):
        super().__init__(message)


class CopulaFitError(CopmixError):
    """Raised when a copula likelihood cannot be evaluated anywhere in its domain."""

    def __init__(self, family, message="fit failed"):
        self.family = family
        super().__init__(f"{message} ({family})")


class ClusterCollapseError(CopmixError):
    """Raised when a mixture component keeps too little weight to be refit."""

    def __init__(self, cluster, weight, threshold):
        self.cluster = cluster
        self.weight = weight
        self.threshold = threshold
        super().__init__(
            f"cluster collapse: component {cluster} has effective weight "
            f"{weight:.3f} < {threshold}"
        )


class ResponsibilityUnderflowError(CopmixError):
    """Raised when every component density of an observation underflows."""

    def __init__(self, row):
        self.row = row
        super().__init__(f"all component densities underflow for row {row}")


class SchemaViolationError(CopmixError):
    """Raised when an output document does not match its published JSON Schema."""

    def __init__(self, schema, path, reason):
        self.schema = schema
        self.path = path
        super().__init__(f"{schema} document violates its schema at '{path}': {reason}")
