import typing


class BalancedGLError(Exception):
    pass


class DimensionMismatch(BalancedGLError, ValueError):
    def __init__(self, expected: typing.Any, actual: typing.Any, what: str = "array") -> None:
        self.expected = expected
        self.actual = actual
        self.what = what
        super().__init__(f"{what} has shape {actual!r}, expected {expected!r}.")

    def __reduce__(self) -> typing.Any:
        return (self.__class__, (self.expected, self.actual, self.what))

    def __repr__(self) -> str:
        class_name = self.__class__.__name__
        return f"{class_name}(expected={self.expected!r}, actual={self.actual!r}, what={self.what!r})"


class InvalidGraph(BalancedGLError, ValueError):
    pass


class InconsistentLaplacian(InvalidGraph):
    def __init__(self, edges: typing.Sequence[typing.Tuple[int, int]]) -> None:
        self.edges = list(edges)
        preview = ", ".join(f"({i}, {j})" for i, j in self.edges[:5])
        super().__init__(
            f"{len(self.edges)} inconsistent edge(s) for the given polarities: {preview}"
        )

    def __reduce__(self) -> typing.Any:
        return (self.__class__, (self.edges,))


class DegenerateCovariance(BalancedGLError, ValueError):
    pass


class NotPositiveDefinite(BalancedGLError):
    pass


class InfeasibleProblem(BalancedGLError):
    def __init__(self, message: str = "The linear program is infeasible.") -> None:
        self.message = message
        super().__init__(message)

    def __repr__(self) -> str:
        class_name = self.__class__.__name__
        return f"{class_name}(message={self.message!r})"


class UnboundedProblem(BalancedGLError):
    pass


class RhoExhausted(BalancedGLError):
    def __init__(self, node: int, rho_max: float) -> None:
        self.node = node
        self.rho_max = rho_max
        super().__init__(f"No feasible rho <= {rho_max!r} for node {node}.")

    def __reduce__(self) -> typing.Any:
        return (self.__class__, (self.node, self.rho_max))

    def __repr__(self) -> str:
        class_name = self.__class__.__name__
        return f"{class_name}(node={self.node!r}, rho_max={self.rho_max!r})"


class BothInfeasible(BalancedGLError):
    def __init__(self, node: int) -> None:
        self.node = node
        super().__init__(f"Both polarity hypotheses are infeasible for node {node}.")

    def __reduce__(self) -> typing.Any:
        return (self.__class__, (self.node,))

    def __repr__(self) -> str:
        class_name = self.__class__.__name__
        return f"{class_name}(node={self.node!r})"
