"""Exception hierarchy. Infeasibility is an outcome, not a bug, so it gets its own branch."""


class SpeedrouteError(Exception):
    pass


class ModelParseError(SpeedrouteError):
    """The document is not well-formed (bad JSON, wrong top-level shape)."""


class ModelValidationError(SpeedrouteError):
    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class InfeasibleError(SpeedrouteError):
    """No route exists under the given model and limits.

    ``kind`` tells callers why: ``"disconnected"`` when the search space was
    exhausted, ``"budget"`` when the state budget ran out first.
    """

    def __init__(self, message: str, kind: str = "disconnected", **info):
        self.kind = kind
        self.info = info
        super().__init__(message)

    def __reduce__(self):
        # keep kind/info across process boundaries
        return (_rebuild_infeasible, (str(self), self.kind, self.info))


def _rebuild_infeasible(message, kind, info):
    return InfeasibleError(message, kind, **info)


class StateBudgetExceeded(InfeasibleError):
    def __init__(self, message: str, partial: int):
        super().__init__(message, kind="budget", partial=partial)
        self.partial = partial


class RouteError(SpeedrouteError):
    """A concrete walk violates the model; carries every violation found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(self.violations[0].message if self.violations else "invalid route")
