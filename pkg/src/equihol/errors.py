"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a precondition (bad frame, open loop, non-invariant form...)."""


class IntegrationError(ArithmeticError):
    """A numerical integration left its admissible region (drift, chart failure)."""


class ProvenanceError(RuntimeError):
    """A check item was declared without the source of its expected value."""
