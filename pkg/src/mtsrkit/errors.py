"""Domain exceptions shared across the toolkit."""


class LayoutError(ValueError):
    """Invalid warehouse layout (overlapping cells, disconnected path graph, bad counts)."""


class EnergyModelError(ValueError):
    """Battery model infeasible: average per-order depletion exceeds the usable budget."""


class StabilityError(RuntimeError):
    """Order arrival rate at or above the maximum sustainable throughput."""

    def __init__(self, arrival_rate: float, max_throughput: float):
        self.arrival_rate = arrival_rate
        self.max_throughput = max_throughput
        super().__init__(
            f"unstable: arrival rate {arrival_rate:.6g}/s >= max throughput "
            f"{max_throughput:.6g}/s"
        )


class SampleBudgetError(RuntimeError):
    """Monte Carlo sampling hit its episode cap before the stopping rule was met."""

    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


class ConvergenceError(RuntimeError):
    """Iterative fixed point failed to converge; carries the iteration trace."""

    def __init__(self, message: str, trace=None):
        self.trace = trace or []
        super().__init__(message)


class ConfigError(ValueError):
    """Scenario configuration rejected; carries field-level error records."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "; ".join(f"{e['loc']}: {e['msg']}" for e in self.errors)
        super().__init__(f"invalid scenario config: {lines}")
