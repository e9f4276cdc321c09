"""Exception types raised across the package."""

from __future__ import annotations


class NoisyStabError(Exception):
    """Base class for all package errors."""


class UnknownVertexError(NoisyStabError, KeyError):
    """A vertex label is not live in the graph."""

    def __init__(self, vertex: int) -> None:
        super().__init__(vertex)
        self.vertex = vertex

    def __str__(self) -> str:
        return f"vertex {self.vertex} is not live in the graph"


class InvalidOperationError(NoisyStabError, ValueError):
    """An operation's arguments are inconsistent with the graph."""


class GraphFormatError(NoisyStabError, ValueError):
    """A serialized graph is not a simple undirected graph."""


class NonDiagonalChannelError(NoisyStabError, ValueError):
    """The channel has off-diagonal terms in the Pauli basis.

    Only Pauli-diagonal channels can be rewritten as independent Z-product
    maps; with cross terms the phases from Y operators and from Pauli
    commutation no longer cancel, so a simple replacement is no longer
    sufficient.
    """


class ChannelSpecError(NoisyStabError, ValueError):
    """A channel specification is malformed or not normalized."""


class WidthError(NoisyStabError, ValueError):
    """The target register is too wide for dense pattern arithmetic."""


class ScriptError(NoisyStabError):
    """An operation in a manipulation script failed.

    Attributes
    ----------
    index : int
        Zero-based position of the failing operation in the script.
    op : object
        The failing operation.
    """

    def __init__(self, index: int, op: object, cause: Exception) -> None:
        super().__init__(f"operation {index} ({op}) failed: {cause}")
        self.index = index
        self.op = op
        self.cause = cause
