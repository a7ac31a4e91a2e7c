"""Exception hierarchy shared by every evaluator."""


class QSpecialError(Exception):
    """Base class for evaluation failures."""


class DomainError(QSpecialError, ValueError):
    """Argument outside the domain where the function is defined."""


class PoleError(QSpecialError, ValueError):
    """Argument too close to a pole of Gamma_q or psi_q."""

    def __init__(self, nu: float, pole: int):
        self.nu = nu
        self.pole = pole
        super().__init__(f"pole at nu={pole:d} (nu={nu!r})")


class ConvergenceError(QSpecialError, ArithmeticError):
    """Series hit ``max_terms`` before the stop rule fired."""


class NearIntegerError(QSpecialError, ValueError):
    """Generic Neumann formula requested at an (almost) integer order."""


class PreconditionError(QSpecialError, ValueError):
    """Parameters violate the validity region of a product formula."""


class DivergenceError(QSpecialError, ArithmeticError):
    """A bilateral sum kept growing past the growth guard."""
