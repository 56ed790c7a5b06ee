"""Exception types raised by the library."""


class ParameterError(ValueError):
    """A parameter lies outside the range its type allows."""


class GridMismatchError(ValueError):
    """Two grid functions do not share a grid."""


class NumericalError(ArithmeticError):
    """A numerical evaluation produced a non-finite value."""


class QuadratureError(NumericalError):
    """An integrand returned a non-finite value at a quadrature node.

    Attributes
    ----------
    node : float
        Abscissa at which the integrand failed.
    context : str
        Free-form description of the failing integral (e.g. the ``(alpha, n)``
        pair of a spectral evaluation).
    """

    def __init__(self, node, context=""):
        self.node = node
        self.context = context
        msg = f"non-finite integrand value at node {node!r}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)
