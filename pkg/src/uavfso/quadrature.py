"""Adaptive Simpson integration over the service disk radius."""
from dataclasses import dataclass

from . import _kernels


class QuadratureError(ArithmeticError):
    def __init__(self, value, error_estimate, panels):
        super().__init__(f"adaptive quadrature did not converge within {panels} panels "
                         f"(estimate {value!r}, error estimate {error_estimate!r})")
        self.value = value
        self.error_estimate = error_estimate
        self.panels = panels


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-9
    max_subdivisions: int = 2 ** 14

    def __post_init__(self):
        if not 0.0 < self.relative_tolerance <= 1e-3:
            raise ValueError("relative_tolerance must lie in (0, 1e-3]")
        if self.max_subdivisions < 16:
            raise ValueError("max_subdivisions must be >= 16")


DEFAULT_QUAD = QuadratureSpec()


def integrate(mode, prm, lo, hi, quad=DEFAULT_QUAD, backend=None):
    """Integrate one of the kernel integrands on [lo, hi].

    Returns ``(value, error_estimate)``; raises QuadratureError when the panel
    budget runs out before every panel meets its local tolerance.
    """
    be = backend or _kernels.backend
    value, err, panels, status = be.integrate(mode, prm, float(lo), float(hi),
                                              quad.relative_tolerance, quad.max_subdivisions)
    if status:
        raise QuadratureError(value, err, panels)
    return value, err
