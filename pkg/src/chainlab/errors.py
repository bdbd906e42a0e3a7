"""Exception types raised by chainlab."""


class StructureError(ValueError):
    """A complex, or a pair of complexes, violates a structural requirement.

    ``face`` names the offending simplex when there is one.
    """

    def __init__(self, message, face=None):
        super().__init__(message)
        self.face = face


class VertexNotFoundError(KeyError):
    def __init__(self, v):
        super().__init__(v)
        self.vertex = v

    def __str__(self):
        return f"vertex {self.vertex} is not in the complex"
