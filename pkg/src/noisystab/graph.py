"""Simple undirected graphs and the pure-graph manipulation rules.

A :class:`Graph` stores one neighbour set per live vertex. Vertex labels are
never reused: once a vertex is measured or merged away it is tombstoned, so
noise bookkeeping can keep naming it while an update step is in flight.

The public functions (:func:`local_complement`, :func:`measure_y_graph`, ...)
return a new graph. The ``*_inplace`` variants mutate their argument and are
what the update engine uses on large inputs.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator

from .errors import InvalidOperationError, UnknownVertexError

__all__ = [
    "Graph",
    "neighbors",
    "local_complement",
    "measure_z_graph",
    "measure_y_graph",
    "measure_x_graph",
    "default_b0",
    "merge_graph",
    "full_merge_graph",
    "local_complement_inplace",
    "measure_z_inplace",
    "measure_y_inplace",
    "measure_x_inplace",
    "merge_inplace",
    "full_merge_inplace",
]


class Graph:
    """Simple undirected graph over integer vertex labels.

    Parameters
    ----------
    vertices : iterable of int, optional
        Initial vertex labels.
    edges : iterable of pairs, optional
        Initial edges; endpoints are added as vertices if missing.

    Examples
    --------
    >>> g = Graph.path(3)
    >>> sorted(g.neighbors(2))
    [1, 3]
    """

    __slots__ = ("_adj", "_dead")

    def __init__(
        self,
        vertices: Iterable[int] = (),
        edges: Iterable[tuple[int, int]] = (),
    ) -> None:
        self._adj: dict[int, set[int]] = {}
        self._dead: set[int] = set()
        for v in vertices:
            self.add_vertex(v)
        for u, v in edges:
            if u not in self._adj:
                self.add_vertex(u)
            if v not in self._adj:
                self.add_vertex(v)
            self.add_edge(u, v)

    # -- constructors -----------------------------------------------------
    @classmethod
    def path(cls, n: int, start: int = 1) -> Graph:
        """1D cluster ``start - start+1 - ... - start+n-1``."""
        vs = range(start, start + n)
        return cls(vs, zip(vs, vs[1:]))

    @classmethod
    def star(cls, center: int, leaves: Iterable[int]) -> Graph:
        leaves = list(leaves)
        return cls([center, *leaves], ((center, b) for b in leaves))

    @classmethod
    def complete(cls, vertices: Iterable[int]) -> Graph:
        vs = list(vertices)
        return cls(vs, ((u, v) for i, u in enumerate(vs) for v in vs[i + 1 :]))

    # -- basic accessors --------------------------------------------------
    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self._adj)

    @property
    def removed(self) -> frozenset[int]:
        """Tombstoned labels that may not be reused."""
        return frozenset(self._dead)

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._adj))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adj == other._adj

    def __repr__(self) -> str:
        return f"Graph(vertices={sorted(self._adj)}, edges={self.edge_list()})"

    def neighbors(self, a: int) -> frozenset[int]:
        """Neighbourhood of ``a`` as an immutable snapshot."""
        return frozenset(self._nbrs(a))

    def degree(self, a: int) -> int:
        return len(self._nbrs(a))

    def _nbrs(self, a: int) -> set[int]:
        try:
            return self._adj[a]
        except KeyError:
            raise UnknownVertexError(a) from None

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._nbrs(u)

    def edges(self) -> frozenset[frozenset[int]]:
        return frozenset(
            frozenset((u, v)) for u, nb in self._adj.items() for v in nb if u < v
        )

    def edge_list(self) -> list[tuple[int, int]]:
        """Sorted list of edges as ``(u, v)`` with ``u < v``."""
        return sorted((u, v) for u, nb in self._adj.items() for v in nb if u < v)

    def num_edges(self) -> int:
        return sum(len(nb) for nb in self._adj.values()) // 2

    def copy(self) -> Graph:
        g = Graph.__new__(Graph)
        g._adj = {v: set(nb) for v, nb in self._adj.items()}
        g._dead = set(self._dead)
        return g

    def subgraph(self, vertices: Iterable[int]) -> Graph:
        keep = set(vertices)
        for v in keep:
            self._nbrs(v)
        g = Graph(sorted(keep))
        for u in keep:
            for v in self._adj[u] & keep:
                g._adj[u].add(v)
        return g

    def connected_components(self) -> list[frozenset[int]]:
        seen: set[int] = set()
        comps = []
        for root in sorted(self._adj):
            if root in seen:
                continue
            comp = {root}
            stack = [root]
            while stack:
                u = stack.pop()
                for v in self._adj[u]:
                    if v not in comp:
                        comp.add(v)
                        stack.append(v)
            seen |= comp
            comps.append(frozenset(comp))
        return comps

    # -- mutation ---------------------------------------------------------
    def add_vertex(self, v: int) -> None:
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise InvalidOperationError(f"vertex labels are non-negative ints, got {v!r}")
        if v in self._adj:
            raise InvalidOperationError(f"vertex {v} already present")
        if v in self._dead:
            raise InvalidOperationError(f"vertex label {v} was removed and cannot be reused")
        self._adj[v] = set()

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise InvalidOperationError(f"self-loop at {u}")
        self._nbrs(u).add(v)
        self._nbrs(v).add(u)

    def toggle_edge(self, u: int, v: int) -> None:
        nu = self._adj[u]
        if v in nu:
            nu.discard(v)
            self._adj[v].discard(u)
        else:
            nu.add(v)
            self._adj[v].add(u)

    def remove_vertex(self, a: int) -> None:
        for b in self._nbrs(a):
            self._adj[b].discard(a)
        del self._adj[a]
        self._dead.add(a)

    def check(self) -> None:
        """Assert the structural invariants (symmetry, no loops, live endpoints)."""
        for u, nb in self._adj.items():
            assert u not in nb, f"self-loop at {u}"
            for v in nb:
                assert v in self._adj, f"edge {u}-{v} to dead vertex"
                assert u in self._adj[v], f"asymmetric edge {u}-{v}"
        assert not (self._dead & self._adj.keys())


def neighbors(g: Graph, a: int) -> frozenset[int]:
    return g.neighbors(a)


# -- in-place rules ---------------------------------------------------------
def local_complement_inplace(g: Graph, a: int) -> None:
    nb = sorted(g._nbrs(a))
    for i, b in enumerate(nb):
        for c in nb[i + 1 :]:
            g.toggle_edge(b, c)


def measure_z_inplace(g: Graph, a: int) -> None:
    g.remove_vertex(a)


def measure_y_inplace(g: Graph, a: int) -> None:
    local_complement_inplace(g, a)
    g.remove_vertex(a)


def default_b0(g: Graph, a: int) -> int | None:
    """Smallest neighbour of ``a``, or ``None`` when ``a`` is isolated."""
    nb = g._nbrs(a)
    return min(nb) if nb else None


def _check_b0(g: Graph, a: int, b0: int | None) -> int | None:
    nb = g._nbrs(a)
    if b0 is None:
        return min(nb) if nb else None
    if b0 not in nb:
        raise InvalidOperationError(f"b0={b0} is not a neighbour of {a}")
    return b0


def measure_x_inplace(g: Graph, a: int, b0: int | None = None) -> int | None:
    """X-measure ``a`` by LC at ``b0``, Y-measure at ``a``, LC at ``b0``.

    An isolated ``a`` is simply removed. Returns the ``b0`` actually used.
    """
    b0 = _check_b0(g, a, b0)
    if b0 is None:
        g.remove_vertex(a)
        return None
    local_complement_inplace(g, b0)
    measure_y_inplace(g, a)
    local_complement_inplace(g, b0)
    return b0


def _check_pair(g: Graph, s: int, t: int) -> None:
    g._nbrs(s)
    g._nbrs(t)
    if s == t:
        raise InvalidOperationError(f"merge source and target are both {s}")


def merge_inplace(g: Graph, s: int, t: int) -> None:
    _check_pair(g, s, t)
    moved = g._adj[t] - {s}
    g.remove_vertex(t)
    for b in moved:
        g.toggle_edge(s, b)


def full_merge_inplace(g: Graph, s: int, t: int) -> None:
    merge_inplace(g, s, t)
    measure_y_inplace(g, s)


# -- functional API ---------------------------------------------------------
def local_complement(g: Graph, a: int) -> Graph:
    """Toggle every edge between two neighbours of ``a``.

    >>> local_complement(Graph.path(3), 2).edge_list()
    [(1, 2), (1, 3), (2, 3)]
    """
    h = g.copy()
    local_complement_inplace(h, a)
    return h


def measure_z_graph(g: Graph, a: int) -> Graph:
    h = g.copy()
    measure_z_inplace(h, a)
    return h


def measure_y_graph(g: Graph, a: int) -> Graph:
    """Complement the neighbourhood of ``a``, then delete ``a``."""
    h = g.copy()
    measure_y_inplace(h, a)
    return h


def measure_x_graph(g: Graph, a: int, b0: int | None = None) -> Graph:
    """Graph after an X measurement of ``a`` with special neighbour ``b0``.

    ``b0`` defaults to the smallest neighbour of ``a``. Different choices give
    graphs related by local complementations at the two candidates.
    """
    h = g.copy()
    measure_x_inplace(h, a, b0)
    return h


def merge_graph(g: Graph, s: int, t: int) -> Graph:
    """CNOT from ``s`` to ``t`` followed by a Z measurement of ``t``.

    The neighbourhood of ``s`` becomes ``N_s ^ N_t`` without ``s`` and ``t``.
    """
    h = g.copy()
    merge_inplace(h, s, t)
    return h


def full_merge_graph(g: Graph, s: int, t: int) -> Graph:
    h = g.copy()
    full_merge_inplace(h, s, t)
    return h
