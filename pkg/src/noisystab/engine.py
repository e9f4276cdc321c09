"""Propagation of Z-product noise through graph manipulations.

Every manipulation (local complementation, Pauli measurement, merge) acts
linearly on Z-products once phases are dropped: it sends each single
``Z_j`` to some Z-product (its *generator image*) and an arbitrary product to
the symmetric difference of the images of its factors. Only the vertices the
operation touches have an image other than themselves, so one operation is
described by a small ``{vertex: image}`` table computed on the graph before
the operation.

:class:`SimulationState` records these tables instead of rewriting every
noise term after every step. Reading out the noise on an ``m``-qubit target
walks the log backwards once per target coordinate, which keeps a whole run
linear in the number of qubits even when every map keeps touching the
measurement frontier.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from . import graph as gc
from .errors import InvalidOperationError, NoisyStabError, ScriptError, UnknownVertexError
from .graph import Graph
from .noise import ChannelSpec, NoiseMap, compile_channel

__all__ = [
    "LocalComplement",
    "MeasureZ",
    "MeasureY",
    "MeasureX",
    "Merge",
    "FullMerge",
    "Operation",
    "SimulationState",
    "resolve",
    "generator_steps",
    "generator_update",
    "update_zproduct",
    "apply_graph_operation",
    "apply_operation",
    "run_script",
    "restrict_maps",
    "parse_operation",
    "parse_script",
]

logger = logging.getLogger(__name__)

Step = Mapping[int, frozenset]


@dataclass(frozen=True)
class LocalComplement:
    a: int
    kind = "lc"

    def vertices(self) -> tuple[int, ...]:
        return (self.a,)

    def to_json(self) -> dict:
        return {"op": "lc", "a": self.a}


@dataclass(frozen=True)
class MeasureZ:
    a: int
    kind = "mz"

    def vertices(self) -> tuple[int, ...]:
        return (self.a,)

    def to_json(self) -> dict:
        return {"op": "mz", "a": self.a}


@dataclass(frozen=True)
class MeasureY:
    a: int
    kind = "my"

    def vertices(self) -> tuple[int, ...]:
        return (self.a,)

    def to_json(self) -> dict:
        return {"op": "my", "a": self.a}


@dataclass(frozen=True)
class MeasureX:
    """X measurement of ``a``; ``b0`` defaults to the smallest neighbour."""

    a: int
    b0: int | None = None
    kind = "mx"

    def vertices(self) -> tuple[int, ...]:
        return (self.a,) if self.b0 is None else (self.a, self.b0)

    def to_json(self) -> dict:
        out = {"op": "mx", "a": self.a}
        if self.b0 is not None:
            out["b0"] = self.b0
        return out


@dataclass(frozen=True)
class Merge:
    s: int
    t: int
    kind = "merge"

    def vertices(self) -> tuple[int, ...]:
        return (self.s, self.t)

    def to_json(self) -> dict:
        return {"op": "merge", "s": self.s, "t": self.t}


@dataclass(frozen=True)
class FullMerge:
    s: int
    t: int
    kind = "full_merge"

    def vertices(self) -> tuple[int, ...]:
        return (self.s, self.t)

    def to_json(self) -> dict:
        return {"op": "full_merge", "s": self.s, "t": self.t}


Operation = LocalComplement | MeasureZ | MeasureY | MeasureX | Merge | FullMerge

_OPS = {
    "lc": (LocalComplement, ("a",)),
    "mz": (MeasureZ, ("a",)),
    "my": (MeasureY, ("a",)),
    "mx": (MeasureX, ("a",)),
    "merge": (Merge, ("s", "t")),
    "full_merge": (FullMerge, ("s", "t")),
}


def parse_operation(obj: Mapping) -> Operation:
    """Decode one entry of the script JSON, e.g. ``{"op": "my", "a": 3}``."""
    if not isinstance(obj, Mapping) or obj.get("op") not in _OPS:
        raise InvalidOperationError(f"unknown operation {obj!r}")
    cls, fields = _OPS[obj["op"]]
    try:
        args = [int(obj[f]) for f in fields]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidOperationError(f"bad arguments in {obj!r}") from exc
    if cls is MeasureX and obj.get("b0") is not None:
        return MeasureX(args[0], int(obj["b0"]))
    return cls(*args)


def parse_script(items: Iterable[Mapping]) -> list[Operation]:
    """Decode a script; failures raise :class:`ScriptError` with the index."""
    out = []
    for i, obj in enumerate(items):
        try:
            out.append(parse_operation(obj))
        except NoisyStabError as exc:
            raise ScriptError(i, obj, exc) from exc
    return out


# -- generator images ------------------------------------------------------------
def resolve(op: Operation, g: Graph) -> Operation:
    """Validate ``op`` against ``g`` and fill in a default ``b0``."""
    for v in op.vertices():
        if v not in g:
            raise UnknownVertexError(v)
    if isinstance(op, MeasureX):
        nb = g.neighbors(op.a)
        if op.b0 is None:
            return MeasureX(op.a, min(nb)) if nb else op
        if op.b0 not in nb:
            raise InvalidOperationError(f"b0={op.b0} is not a neighbour of {op.a}")
    elif isinstance(op, (Merge, FullMerge)) and op.s == op.t:
        raise InvalidOperationError(f"merge source and target are both {op.s}")
    return op


def generator_steps(op: Operation, g: Graph) -> list[dict[int, frozenset]]:
    """Generator-image tables for ``op`` applied to ``g``.

    Each table maps a vertex ``j`` to the support that ``Z_j`` becomes; a
    vertex absent from the table maps to itself. Vertices removed by the
    operation always appear. A full merge yields two tables (merge, then a Y
    measurement of the source on the intermediate graph).
    """
    op = resolve(op, g)
    if isinstance(op, LocalComplement):
        return [{op.a: g.neighbors(op.a) | {op.a}}]
    if isinstance(op, MeasureZ):
        return [{op.a: frozenset()}]
    if isinstance(op, MeasureY):
        return [{op.a: g.neighbors(op.a)}]
    if isinstance(op, MeasureX):
        a, b0 = op.a, op.b0
        if b0 is None:
            return [{a: frozenset()}]
        return [{a: (g.neighbors(b0) | {b0}) - {a}, b0: g.neighbors(a) - {b0}}]
    if isinstance(op, Merge):
        return [{op.t: frozenset((op.s,))}]
    if isinstance(op, FullMerge):
        s, t = op.s, op.t
        merged_ns = (g.neighbors(s) ^ g.neighbors(t)) - {s, t}
        return [{t: frozenset((s,))}, {s: merged_ns}]
    raise TypeError(f"not an operation: {op!r}")


def _push(step: Step, z: frozenset) -> frozenset:
    hit = [j for j in z if j in step]
    if not hit:
        return z
    out = set(z)
    out.difference_update(hit)
    for j in hit:
        out.symmetric_difference_update(step[j])
    return frozenset(out)


def _pull(step: Step, u: set[int]) -> None:
    """Transpose of :func:`_push`, in place on a dual vector ``u``."""
    new = {j: len(img & u) & 1 for j, img in step.items()}
    for j, bit in new.items():
        if bit:
            u.add(j)
        else:
            u.discard(j)


def generator_update(op: Operation, g_before: Graph, j: int) -> frozenset:
    """Image of the single generator ``Z_j`` under ``op`` (phases dropped)."""
    if j not in g_before:
        raise UnknownVertexError(j)
    z = frozenset((j,))
    for step in generator_steps(op, g_before):
        z = _push(step, z)
    return z


def update_zproduct(op: Operation, g_before: Graph, z: Iterable[int]) -> frozenset:
    """Rewrite the Z-product ``z`` so it acts after ``op`` instead of before."""
    z = frozenset(z)
    for v in z:
        if v not in g_before:
            raise UnknownVertexError(v)
    for step in generator_steps(op, g_before):
        z = _push(step, z)
    return z


def apply_graph_operation(g: Graph, op: Operation) -> None:
    """Advance ``g`` in place by ``op``."""
    op = resolve(op, g)
    if isinstance(op, LocalComplement):
        gc.local_complement_inplace(g, op.a)
    elif isinstance(op, MeasureZ):
        gc.measure_z_inplace(g, op.a)
    elif isinstance(op, MeasureY):
        gc.measure_y_inplace(g, op.a)
    elif isinstance(op, MeasureX):
        gc.measure_x_inplace(g, op.a, op.b0)
    elif isinstance(op, Merge):
        gc.merge_inplace(g, op.s, op.t)
    elif isinstance(op, FullMerge):
        gc.full_merge_inplace(g, op.s, op.t)
    else:
        raise TypeError(f"not an operation: {op!r}")


# -- simulation state --------------------------------------------------------------
class SimulationState:
    """A noiseless graph plus the noise maps acting on it.

    Parameters
    ----------
    graph : Graph
        Initial graph (copied).
    maps : iterable of NoiseMap, optional
        Noise maps expressed relative to ``graph``.

    Notes
    -----
    Mutated in place by :func:`apply_operation`; use :meth:`copy` to branch.
    Maps added with :meth:`add_map` after some operations are expressed
    relative to the graph at that moment.
    """

    def __init__(self, graph: Graph, maps: Iterable[NoiseMap] = ()) -> None:
        self.graph = graph.copy()
        self.history: list[Operation] = []
        self._steps: list[Step] = []
        self._born: list[tuple[int, NoiseMap]] = []
        self._cache_pos = 0
        self._cache: list[NoiseMap] = []
        for m in maps:
            self.add_map(m)

    @classmethod
    def from_channels(cls, graph: Graph, channels: Iterable[ChannelSpec]) -> SimulationState:
        return cls(graph, (compile_channel(c, graph) for c in channels))

    def copy(self) -> SimulationState:
        new = SimulationState.__new__(SimulationState)
        new.graph = self.graph.copy()
        new.history = list(self.history)
        new._steps = list(self._steps)
        new._born = list(self._born)
        new._cache_pos = self._cache_pos
        new._cache = list(self._cache)
        return new

    def add_map(self, noise_map: NoiseMap) -> None:
        for v in noise_map.vertices():
            if v not in self.graph:
                raise UnknownVertexError(v)
        self._born.append((len(self._steps), noise_map))

    def add_channel(self, spec: ChannelSpec) -> NoiseMap:
        m = compile_channel(spec, self.graph)
        self.add_map(m)
        return m

    @property
    def num_maps(self) -> int:
        return len(self._born)

    @property
    def num_terms(self) -> int:
        return sum(len(m.terms) for _, m in self._born)

    @property
    def maps(self) -> list[NoiseMap]:
        """Current maps, each rewritten to act on the current graph.

        Materializing is proportional to (terms) x (operations since the last
        call); intended for inspection and small systems.
        """
        n_steps = len(self._steps)
        if self._cache_pos != n_steps:
            pending = self._steps[self._cache_pos :]

            def push_all(s: frozenset) -> frozenset:
                for step in pending:
                    s = _push(step, s)
                return s

            self._cache = [m.map_supports(push_all) for m in self._cache]
            self._cache_pos = n_steps
        for born, m in self._born[len(self._cache) :]:
            steps = self._steps[born:]

            def push_from(s: frozenset, steps=steps) -> frozenset:
                for step in steps:
                    s = _push(step, s)
                return s

            self._cache.append(m.map_supports(push_from))
        return list(self._cache)

    def restrict(self, targets: Iterable[int]) -> list[NoiseMap]:
        return restrict_maps(self, targets)


def apply_operation(state: SimulationState, op: Operation) -> SimulationState:
    """Apply ``op`` to the graph and to every noise map of ``state``.

    The noise update is computed against the graph before ``op``. Mutates and
    returns ``state``.
    """
    op = resolve(op, state.graph)
    steps = generator_steps(op, state.graph)
    apply_graph_operation(state.graph, op)
    state._steps.extend(steps)
    state.history.append(op)
    return state


def run_script(state: SimulationState, script: Sequence[Operation]) -> SimulationState:
    """Apply a script in order; a failure raises :class:`ScriptError`."""
    for i, op in enumerate(script):
        try:
            apply_operation(state, op)
        except NoisyStabError as exc:
            raise ScriptError(i, op, exc) from exc
    return state


def restrict_maps(state: SimulationState, targets: Iterable[int]) -> list[NoiseMap]:
    """Noise maps reduced to ``targets``, dropping those that act trivially.

    ``targets`` must be live and closed under adjacency in the current graph
    (a union of connected components); otherwise the reduced state is not a
    mixture of graph-basis states and has no Z-map description.
    """
    targets = list(dict.fromkeys(targets))
    tset = set(targets)
    g = state.graph
    for t in targets:
        if t not in g:
            raise UnknownVertexError(t)
        outside = g.neighbors(t) - tset
        if outside:
            raise InvalidOperationError(
                f"target {t} has neighbours {sorted(outside)} outside the target set"
            )
    # duals[t] holds the vertices (at the current log position) whose Z
    # reaches target t by the end of the run.
    duals = {t: {t} for t in targets}
    by_birth = sorted(range(len(state._born)), key=lambda i: -state._born[i][0])
    projected: list[NoiseMap | None] = [None] * len(state._born)
    pos = len(state._steps)
    k = 0
    while k < len(by_birth):
        born = state._born[by_birth[k]][0]
        while pos > born:
            pos -= 1
            step = state._steps[pos]
            for u in duals.values():
                _pull(step, u)
        while k < len(by_birth) and state._born[by_birth[k]][0] == born:
            idx = by_birth[k]
            m = state._born[idx][1]

            def project(s: frozenset) -> frozenset:
                return frozenset(t for t in targets if len(duals[t].intersection(s)) & 1)

            projected[idx] = m.map_supports(project)
            k += 1
    return [m for m in projected if m is not None and not m.is_identity()]
