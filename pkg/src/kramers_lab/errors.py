"""Exception types shared across the package."""


class StructureError(RuntimeError):
    """A potential does not have the expected minimum/barrier structure."""


class WidthCollapseError(RuntimeError):
    """The wavepacket width G reached zero during time integration.

    Carries the step index at which the collapse was detected; a G -> 0
    crossing means the Gaussian variational description broke down and
    must be surfaced, not clamped.
    """

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"width parameter G <= 0 at step {step}")


class EstimationError(RuntimeError):
    """A stochastic estimate could not be formed (e.g. every trajectory censored)."""


class NumericsError(RuntimeError):
    """A simulation produced a non-finite state."""

    def __init__(self, message: str, step: int | None = None):
        self.step = step
        super().__init__(message)


class QuadratureError(RuntimeError):
    """Numerical quadrature failed to converge or would overflow."""


class SingularityError(ValueError):
    """The quantum-corrected diffusion coefficient is singular for these inputs."""


class DiscretizationError(RuntimeError):
    """A PDE grid operator could not be built."""


class ExtractionError(RuntimeError):
    """A decay-rate fit window is empty or otherwise unusable."""


class ScenarioError(ValueError):
    """A scenario document is malformed; the message carries the field path."""
