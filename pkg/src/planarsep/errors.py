"""Exception hierarchy shared by every module."""
from __future__ import annotations


class PlanarSepError(Exception):
    """Base class for all library errors."""


# graph construction and I/O
class InfeasibleParams(PlanarSepError, ValueError):
    pass


class AsymmetricAdjacency(PlanarSepError, ValueError):
    pass


class NotPlanarEmbedding(PlanarSepError, ValueError):
    pass


class BadOuterWitness(PlanarSepError, ValueError):
    pass


class SchemaViolation(PlanarSepError, ValueError):
    pass


# engine
class BitBudgetExceeded(PlanarSepError, RuntimeError):
    pass


class RoundLimitExceeded(PlanarSepError, RuntimeError):
    pass


class ProtocolError(PlanarSepError, RuntimeError):
    """A node program broke the engine contract (bad message, unknown edge)."""


# primitives
class OverflowBeyondBudget(PlanarSepError, ArithmeticError):
    pass


class NodeNotInPart(PlanarSepError, ValueError):
    pass


class MultipleSources(PlanarSepError, ValueError):
    pass


# trees
class DisconnectedPart(PlanarSepError, ValueError):
    pass


class CrossPartQuery(PlanarSepError, ValueError):
    pass


# faces
class IsTreeEdge(PlanarSepError, ValueError):
    pass


class NotALeaf(PlanarSepError, ValueError):
    pass


class NotInside(PlanarSepError, ValueError):
    pass


class EmptySet(PlanarSepError, ValueError):
    pass


class PreconditionNotContained(PlanarSepError, ValueError):
    pass


# separator and DFS
class InternalWitnessMismatch(PlanarSepError, AssertionError):
    pass


class NotASeparatorInput(PlanarSepError, ValueError):
    pass


class Disconnected(PlanarSepError, ValueError):
    pass


# oracles
class NotACycle(PlanarSepError, ValueError):
    pass


class NotSpanning(PlanarSepError, ValueError):
    pass
