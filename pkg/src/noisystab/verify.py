"""Randomized cross-check of the Z-product engine against the dense oracle."""

from __future__ import annotations

import logging
import random
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .engine import (
    FullMerge,
    LocalComplement,
    MeasureX,
    MeasureY,
    MeasureZ,
    Merge,
    Operation,
    SimulationState,
    apply_graph_operation,
    apply_operation,
    resolve,
    restrict_maps,
)
from .fidelity import combine_maps
from .graph import Graph, merge_graph
from .noise import ChannelSpec, Correlated, Depolarizing, MultiDiagonal, Pauli1, PauliLabel

__all__ = [
    "Case",
    "random_connected_graph",
    "random_channel",
    "random_case",
    "engine_matrix",
    "oracle_matrix",
    "check_case",
    "run_suite",
]

logger = logging.getLogger(__name__)

# (position in script, channel); position 0 means before the first operation
Timeline = list[tuple[int, ChannelSpec]]


@dataclass
class Case:
    graph: Graph
    channels: Timeline
    script: list[Operation]
    targets: tuple[int, ...] = field(default=())


def random_connected_graph(rng: random.Random, n: int, p: float = 0.45) -> Graph:
    """Random spanning tree on ``1..n`` plus extra edges with probability ``p``."""
    verts = list(range(1, n + 1))
    g = Graph(verts)
    order = verts[:]
    rng.shuffle(order)
    for i in range(1, n):
        g.add_edge(order[i], order[rng.randrange(i)])
    for u in verts:
        for v in verts:
            if u < v and not g.has_edge(u, v) and rng.random() < p:
                g.add_edge(u, v)
    return g


def _probs(rng: random.Random, k: int) -> list[float]:
    w = [rng.random() for _ in range(k)]
    s = sum(w)
    w = [x / s for x in w]
    w[-1] = 1.0 - sum(w[:-1])
    return w


def random_channel(rng: random.Random, live: Sequence[int]) -> ChannelSpec:
    live = sorted(live)
    kind = rng.choice(["pauli1", "depolarizing", "correlated", "multi"])
    if kind == "pauli1":
        return Pauli1(tuple(_probs(rng, 4)), rng.choice(live))
    if kind == "depolarizing":
        return Depolarizing(rng.uniform(0.5, 1.0), rng.choice(live))
    if kind == "correlated" and len(live) >= 2:
        k = rng.randint(2, min(3, len(live)))
        return Correlated(rng.uniform(0.5, 1.0), rng.choice(list(PauliLabel)[1:]), tuple(rng.sample(live, k)))
    qs = rng.sample(live, min(len(live), rng.randint(1, 3)))
    ws = _probs(rng, 3)
    terms = tuple((w, {q: PauliLabel(rng.randrange(4)) for q in qs}) for w in ws)
    return MultiDiagonal(terms)


def _random_op(rng: random.Random, g: Graph, allow_lc: bool) -> Operation | None:
    live = sorted(g.vertices)
    kinds = ["mz", "my", "mx", "merge"]
    if len(live) >= 3:
        kinds.append("full_merge")
    if allow_lc:
        kinds.append("lc")
    kind = rng.choice(kinds)
    a = rng.choice(live)
    if kind == "lc":
        return LocalComplement(a)
    if kind == "mz":
        return MeasureZ(a)
    if kind == "my":
        return MeasureY(a)
    if kind == "mx":
        nb = sorted(g.neighbors(a))
        return MeasureX(a, rng.choice(nb) if nb else None)
    s, t = rng.sample(live, 2)
    return Merge(s, t) if kind == "merge" else FullMerge(s, t)


def random_case(rng: random.Random, n_min: int = 2, n_max: int = 8, m_max: int = 3) -> Case:
    """Random connected graph, diagonal channels and a script leaving ``<= m_max`` qubits."""
    n = rng.randint(n_min, n_max)
    g = random_connected_graph(rng, n)
    m_goal = rng.randint(1, min(m_max, n))
    work = g.copy()
    channels: Timeline = [(0, random_channel(rng, work.vertices)) for _ in range(rng.randint(1, 4))]
    script: list[Operation] = []
    while len(work) > m_goal or (len(script) < 1 and n > 1):
        op = _random_op(rng, work, allow_lc=rng.random() < 0.3)
        if op is None:
            continue
        if len(op.vertices()) == 2 and len(work) < 2:
            continue
        if isinstance(op, FullMerge) and len(work) - 2 < 1:
            continue
        op = resolve(op, work)
        apply_graph_operation(work, op)
        script.append(op)
        if len(work) and rng.random() < 0.25:
            channels.append((len(script), random_channel(rng, work.vertices)))
    return Case(g, channels, script, tuple(sorted(work.vertices)))


def engine_matrix(case: Case) -> np.ndarray:
    """Diagonal graph-basis matrix of the engine's output on ``case.targets``."""
    state = SimulationState(case.graph)
    pending = sorted(case.channels, key=lambda pc: pc[0])
    k = 0
    for pos in range(len(case.script) + 1):
        while k < len(pending) and pending[k][0] == pos:
            state.add_channel(pending[k][1])
            k += 1
        if pos < len(case.script):
            apply_operation(state, case.script[pos])
    maps = restrict_maps(state, case.targets)
    ens = combine_maps(maps, case.targets)
    return np.diag(ens.weights).astype(complex)


def oracle_matrix(case: Case, outcomes: Callable[[int], int]) -> np.ndarray:
    """Dense evolution of ``case`` in the final graph basis.

    ``outcomes(i)`` chooses the outcome (+1/-1) of the ``i``-th projective
    measurement in the script.
    """
    g = case.graph.copy()
    rho = oracle.build_graph_state(g)
    pending = sorted(case.channels, key=lambda pc: pc[0])
    k = 0
    meas = 0
    for pos in range(len(case.script) + 1):
        while k < len(pending) and pending[k][0] == pos:
            rho = oracle.apply_channel(rho, pending[k][1])
            k += 1
        if pos == len(case.script):
            break
        op = resolve(case.script[pos], g)
        if isinstance(op, LocalComplement):
            rho = oracle.apply_local_complement(rho, op.a, g)
        elif isinstance(op, (MeasureZ, MeasureY, MeasureX)):
            basis = {MeasureZ: "z", MeasureY: "y", MeasureX: "x"}[type(op)]
            b0 = op.b0 if isinstance(op, MeasureX) else None
            rho = oracle.apply_measurement(rho, basis, op.a, outcomes(meas), g, b0)
            meas += 1
        elif isinstance(op, Merge):
            rho = oracle.apply_merge(rho, op.s, op.t, outcomes(meas), g)
            meas += 1
        else:
            rho = oracle.apply_full_merge(rho, op.s, op.t, (outcomes(meas), outcomes(meas + 1)), g)
            meas += 2
        apply_graph_operation(g, op)
    rho.check()
    return oracle.graph_basis_matrix(rho, g)


def check_case(case: Case, rng: random.Random | None = None) -> float:
    """Largest entrywise deviation between engine and oracle over outcome branches.

    Branches checked: all ``+``, all ``-``, and (with ``rng``) one random mix.
    """
    expected = engine_matrix(case)
    branches: list[Callable[[int], int]] = [lambda i: 1, lambda i: -1]
    if rng is not None:
        signs = [rng.choice((1, -1)) for _ in range(2 * len(case.script) + 2)]
        branches.append(lambda i: signs[i])
    return max(float(np.max(np.abs(oracle_matrix(case, b) - expected))) for b in branches)


@dataclass
class SuiteResult:
    cases: int
    max_deviation: float
    failures: list[tuple[int, float]]

    @property
    def passed(self) -> bool:
        return not self.failures


def run_suite(
    cases: int,
    seed: int,
    n_max: int = 8,
    n_min: int = 2,
    m_max: int = 3,
    tol: float = 1e-10,
    check: Callable[[Case, random.Random], float] = check_case,
) -> SuiteResult:
    """Run ``cases`` random engine-vs-oracle comparisons."""
    rng = random.Random(seed)
    worst = 0.0
    failures = []
    for i in range(cases):
        case = random_case(rng, n_min=n_min, n_max=n_max, m_max=m_max)
        dev = check(case, rng)
        worst = max(worst, dev)
        if not dev <= tol:
            logger.warning("case %d deviates by %.3g: %s / %s", i, dev, case.graph, case.script)
            failures.append((i, dev))
    return SuiteResult(cases, worst, failures)
