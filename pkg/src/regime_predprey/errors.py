"""Exception hierarchy shared by all modules."""


class ScenarioError(ValueError):
    """Base class for invalid model input."""


class NonPositiveParameter(ScenarioError):
    def __init__(self, regime, field, value=None):
        self.regime = regime
        self.field = field
        self.value = value
        # regime is reported 1-based, as in scenario files
        super().__init__(f"regime {regime}: {field} must be > 0 (got {value!r})")


class DimensionMismatch(ScenarioError):
    pass


class InvalidInitialCondition(ScenarioError):
    pass


class InvalidGenerator(ScenarioError):
    pass


class NegativeOffDiagonal(InvalidGenerator):
    pass


class RowSumNonzero(InvalidGenerator):
    pass


class NotIrreducible(InvalidGenerator):
    pass


class SolverFailure(RuntimeError):
    pass


class SimulationError(RuntimeError):
    pass


class StepTooLarge(SimulationError):
    def __init__(self, message, suggested_dt=None):
        self.suggested_dt = suggested_dt
        super().__init__(message)


class NonFiniteState(SimulationError):
    pass


class WindowTooShort(ValueError):
    pass


class TooFewReplicas(ValueError):
    pass


class HypothesisViolated(ValueError):
    pass


class ConditionViolated(ValueError):
    pass
