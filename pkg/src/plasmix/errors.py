"""Exception types shared across the solver."""


class CFLViolationError(ValueError):
    """Time step exceeds the explicit-diffusion stability bound."""

    def __init__(self, dt, dt_max, grid_points, time_steps):
        self.dt = dt
        self.dt_max = dt_max
        self.grid_points = grid_points
        self.time_steps = time_steps
        super().__init__(
            f"dt = {dt:.6g} violates the explicit stability bound "
            f"dt <= {dt_max:.6g} for J = {grid_points}, N = {time_steps}"
        )


class FluxSingularityError(ArithmeticError):
    """The 2x2 flux system became (numerically) singular at a grid node."""

    def __init__(self, node, xi1, xi2, denominator):
        self.node = node
        self.xi1 = xi1
        self.xi2 = xi2
        self.denominator = denominator
        super().__init__(
            f"singular flux inversion at node {node}: "
            f"xi1 = {xi1:.6g}, xi2 = {xi2:.6g}, denominator = {denominator:.3g}"
        )


class ConfigError(ValueError):
    """Invalid run configuration; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
