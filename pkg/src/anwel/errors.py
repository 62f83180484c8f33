"""Exception types shared across the package."""


class AnwelError(Exception):
    pass


class DegreeTooSmall(AnwelError, ValueError):
    pass


class DegreeMismatch(AnwelError, ValueError):
    pass


class BadIndices(AnwelError, ValueError):
    pass


class NonConvergence(AnwelError, ArithmeticError):
    pass


class DegenerateMember(AnwelError):
    """The member curve hit a wall (non-nodal, non-cuspidal singularity)."""


class SingularJacobian(AnwelError, ArithmeticError):
    pass


class PathFailure(AnwelError):
    def __init__(self, count: int, message: str = ""):
        self.count = count
        super().__init__(message or f"{count} path(s) failed")


class PathCollision(AnwelError):
    pass


class TooIllConditioned(AnwelError, ArithmeticError):
    pass


class NonGenericSlice(AnwelError):
    pass
