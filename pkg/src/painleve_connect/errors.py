class SolverError(RuntimeError):
    """Base class for solver failures."""


class NewtonDiverged(SolverError):
    """Residual could not be reduced even at the smallest allowed damping."""


class NonPhysical(SolverError):
    """Converged, but the result violates a sign or monotonicity post-condition."""


class BlowUp(Exception):
    """A shooting trajectory left the bounded regime.

    Expected behaviour for supercritical shooting parameters; carries the
    abscissa where |y| first exceeded the threshold.
    """

    def __init__(self, x: float, k: float):
        super().__init__(f"trajectory with k={k} blew up at x={x:.6g}")
        self.x = x
        self.k = k
