"""Bell-pair extraction from a depolarized 1D cluster.

An ``N``-qubit path is hit by depolarizing noise of parameter ``p`` on every
qubit, after which the ``n = N - 2`` inner qubits are Y-measured so that
qubits ``1`` and ``N`` end up sharing a two-qubit graph state. Every inner
qubit leaves behind one two-term map whose non-trivial support is one of
``{1, N}``, ``{1}`` or ``{N}``; the counts of these three forms make up the
weight vector, and the fidelity depends only on that vector.

Three measurement orders are provided:

``side_to_side``
    ``2, 3, ..., N - 1``.
``every_second_qubit``
    every second inner qubit of the current chain, repeated on the survivors.
``pairs``
    ``(2, N - 1), (3, N - 2), ...`` from the outside in.
"""

from __future__ import annotations

import enum
import gc
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .engine import MeasureY, SimulationState, restrict_maps, run_script
from .errors import InvalidOperationError
from .fidelity import DiagonalEnsemble, combine_maps, fidelity
from .graph import Graph
from .noise import NoiseMap, depolarizing_all

__all__ = [
    "StrategyId",
    "WeightVector",
    "parity_g",
    "parity_f",
    "weight_vector",
    "script_for_strategy",
    "general_fidelity",
    "closed_fidelity",
    "relative_change",
    "classify_maps",
    "StrategyRun",
    "run_strategy",
    "CSV_COLUMNS",
    "strategy_rows",
    "bench_rows",
]


class StrategyId(str, enum.Enum):
    SIDE_TO_SIDE = "side_to_side"
    EVERY_SECOND_QUBIT = "every_second_qubit"
    PAIRS = "pairs"

    @classmethod
    def parse(cls, value: str | StrategyId) -> StrategyId:
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise InvalidOperationError(f"unknown strategy {value!r}; expected one of {names}") from None


@dataclass(frozen=True)
class WeightVector:
    """Counts of the ``{1,N}``, ``{1}`` and ``{N}`` map forms."""

    w_alpha: int
    w_beta: int
    w_gamma: int

    def __post_init__(self) -> None:
        if min(self.w_alpha, self.w_beta, self.w_gamma) < 0:
            raise InvalidOperationError(f"negative weight in {self}")

    @property
    def n(self) -> int:
        return self.w_alpha + self.w_beta + self.w_gamma

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.w_alpha, self.w_beta, self.w_gamma)

    def mirrored(self) -> WeightVector:
        """Swap the roles of the two end qubits."""
        return WeightVector(self.w_alpha, self.w_gamma, self.w_beta)

    def canonical(self) -> tuple[int, int, int]:
        """Order-free form; the fidelity only sees the multiset."""
        return tuple(sorted(self.as_tuple()))  # type: ignore[return-value]


def parity_g(x: int) -> int:
    """``1`` for odd ``x``, ``0`` for even ``x``."""
    return x % 2


def parity_f(x: int) -> int:
    """``1`` for even ``x``, ``0`` for odd ``x``."""
    return 1 - x % 2


def _check_n(n: int) -> None:
    if n < 1:
        raise InvalidOperationError(f"need at least one measured qubit, got n={n}")


def weight_vector(strategy: StrategyId | str, n: int) -> WeightVector:
    """Weight vector of ``strategy`` with ``n`` measured qubits.

    Examples
    --------
    >>> weight_vector("side_to_side", 4).as_tuple()
    (2, 0, 2)
    >>> weight_vector("pairs", 6).as_tuple()
    (1, 2, 3)
    """
    strategy = StrategyId.parse(strategy)
    _check_n(n)
    if strategy is StrategyId.SIDE_TO_SIDE or n <= 2:
        g = parity_g(n)
        return WeightVector((n + g) // 2, 0, (n - g) // 2)
    if strategy is StrategyId.EVERY_SECOND_QUBIT:
        l, b = divmod(n, 3)
        return WeightVector(l, l + (b == 2), l + (b >= 1))
    l = (n + 1) // 4
    r = n + 1 - 4 * l
    return [
        WeightVector(l, l, 2 * l - 1),
        WeightVector(l, l, 2 * l),
        WeightVector(l, l, 2 * l + 1),
        WeightVector(l, l + 1, 2 * l + 1),
    ][r]


def _every_second_order(N: int) -> list[int]:
    # Each round measures every second inner qubit of the surviving chain.
    # Starting from the first inner qubit every round gives a different (and
    # slightly better) weight vector for some N, e.g. N = 23; starting from the
    # second one when the interior size is 0 or 5 mod 6 keeps the vector
    # balanced, which was checked against the engine for N <= 500.
    chain = list(range(1, N + 1))
    order: list[int] = []
    while len(chain) > 2:
        inner = chain[1:-1]
        pick = inner[1::2] if len(inner) % 6 in (0, 5) else inner[0::2]
        order += pick
        picked = set(pick)
        chain = [v for v in chain if v not in picked]
    return order


def _pairs_order(N: int) -> list[int]:
    left, right = 2, N - 1
    order: list[int] = []
    while right - left > 1:
        order += [left, right]
        left += 1
        right -= 1
    # one or two adjacent middle qubits remain
    order += list(range(left, right + 1))
    return order


def script_for_strategy(strategy: StrategyId | str, N: int, reverse: bool = False) -> list[MeasureY]:
    """Y-measurement script reducing an ``N``-path to qubits ``1`` and ``N``.

    ``reverse`` mirrors the order (``k -> N + 1 - k``), e.g. running
    side-to-side from ``N`` towards ``1``.

    Examples
    --------
    >>> [op.a for op in script_for_strategy("every_second_qubit", 6)]
    [2, 4, 3, 5]
    """
    strategy = StrategyId.parse(strategy)
    if N < 3:
        raise InvalidOperationError(f"need a cluster of at least 3 qubits, got N={N}")
    if strategy is StrategyId.SIDE_TO_SIDE:
        order = list(range(2, N))
    elif strategy is StrategyId.EVERY_SECOND_QUBIT:
        order = _every_second_order(N)
    else:
        order = _pairs_order(N)
    if reverse:
        order = [N + 1 - k for k in order]
    return [MeasureY(k) for k in order]


def general_fidelity(p: float, w: WeightVector | Sequence[int], t: int = 0) -> float:
    """Bell-pair fidelity from a weight vector and ``t`` full merges.

    ``1/4 (1 + p**(2 + 2t) * sum(p**(w_i + w_j)))`` over the three unordered
    pairs of components.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidOperationError(f"p={p} is not a probability")
    if t < 0:
        raise InvalidOperationError(f"negative merge count t={t}")
    a, b, c = w.as_tuple() if isinstance(w, WeightVector) else tuple(w)
    return 0.25 * (1.0 + p ** (2 + 2 * t) * (p ** (a + b) + p ** (a + c) + p ** (b + c)))


def closed_fidelity(strategy: StrategyId | str, n: int, p: float) -> float:
    """Per-strategy closed form of the fidelity with ``n`` measured qubits.

    The every-second-qubit form uses ``n = 3l + b``; the pairs form uses
    ``n = 4l + b - 1`` with ``b`` in ``0..3``.
    """
    strategy = StrategyId.parse(strategy)
    _check_n(n)
    if not 0.0 <= p <= 1.0:
        raise InvalidOperationError(f"p={p} is not a probability")
    g = parity_g
    if strategy is StrategyId.SIDE_TO_SIDE or n <= 2:
        return 0.25 * (1 + p ** (2 + (n + g(n)) / 2) + p ** (2 + (n - g(n)) / 2) + p ** (n + 2))
    if strategy is StrategyId.EVERY_SECOND_QUBIT:
        l, b = divmod(n, 3)
        return 0.25 * (1 + p ** (2 * l + 2) * (p ** ((b - g(b)) / 2) + p ** ((b + g(b)) / 2) + p**b))
    l = (n + 1) // 4
    b = n + 1 - 4 * l
    e = g(b) * (b - 1) // 2
    return 0.25 * (1 + p ** (2 * l + 2) * (p**e + p ** (l + b - 1 - e) + p ** (l + b - 1)))


def relative_change(N: int, p: float) -> float:
    """``(F_sts - F_esq) / F_esq`` for an ``N``-qubit cluster."""
    if N < 3:
        raise InvalidOperationError(f"need a cluster of at least 3 qubits, got N={N}")
    f_esq = closed_fidelity(StrategyId.EVERY_SECOND_QUBIT, N - 2, p)
    f_sts = closed_fidelity(StrategyId.SIDE_TO_SIDE, N - 2, p)
    return (f_sts - f_esq) / f_esq


def classify_maps(maps: Iterable[NoiseMap], first: int, last: int) -> WeightVector:
    """Count restricted maps by the form of their single non-trivial support.

    Maps with more than one non-trivial support (those of the two end qubits)
    are skipped.
    """
    forms = {frozenset({first, last}): 0, frozenset({first}): 1, frozenset({last}): 2}
    counts = [0, 0, 0]
    for m in maps:
        nontrivial = [s for s in m.supports if s]
        if len(nontrivial) != 1:
            continue
        try:
            counts[forms[nontrivial[0]]] += 1
        except KeyError:
            raise InvalidOperationError(f"unexpected map support {sorted(nontrivial[0])}") from None
    return WeightVector(*counts)


@dataclass
class StrategyRun:
    """Outcome of one pipeline run; ``num_terms`` counts stored noise terms."""

    strategy: StrategyId
    N: int
    p: float
    ensemble: DiagonalEnsemble
    weights: WeightVector
    maps: list[NoiseMap]
    num_terms: int = 0

    @property
    def fidelity(self) -> float:
        return fidelity(self.ensemble)


def run_strategy(strategy: StrategyId | str, N: int, p: float, reverse: bool = False) -> StrategyRun:
    """Run the full pipeline for one cluster through the update engine."""
    strategy = StrategyId.parse(strategy)
    script = script_for_strategy(strategy, N, reverse=reverse)
    g = Graph.path(N)
    state = SimulationState(g, depolarizing_all(g, p))
    run_script(state, script)
    maps = restrict_maps(state, [1, N])
    ens = combine_maps(maps, [1, N])
    return StrategyRun(strategy, N, p, ens, classify_maps(maps, 1, N), maps, state.num_terms)


CSV_COLUMNS = (
    "strategy",
    "N",
    "n",
    "p",
    "fidelity_engine",
    "fidelity_closed",
    "w_alpha",
    "w_beta",
    "w_gamma",
    "relative_change",
)


def strategy_rows(
    Ns: Iterable[int],
    ps: Iterable[float],
    strategies: Iterable[StrategyId | str] = tuple(StrategyId),
) -> list[dict]:
    """One row per (strategy, N, p), sorted by those keys."""
    ps = list(ps)
    rows = []
    for s in strategies:
        s = StrategyId.parse(s)
        for N in Ns:
            for p in ps:
                run = run_strategy(s, N, p)
                w = run.weights
                rows.append(
                    {
                        "strategy": s.value,
                        "N": N,
                        "n": N - 2,
                        "p": p,
                        "fidelity_engine": run.fidelity,
                        "fidelity_closed": closed_fidelity(s, N - 2, p),
                        "w_alpha": w.w_alpha,
                        "w_beta": w.w_beta,
                        "w_gamma": w.w_gamma,
                        "relative_change": relative_change(N, p),
                    }
                )
    rows.sort(key=lambda r: (r["strategy"], r["N"], r["p"]))
    return rows


def bench_rows(sizes: Iterable[int], strategy: StrategyId | str = StrategyId.SIDE_TO_SIDE, p: float = 0.9) -> list[dict]:
    """Wall-clock time of the whole pipeline for each cluster size.

    The garbage collector is paused while timing, as :mod:`timeit` does; the
    pipeline allocates many small sets and collector passes otherwise add
    noise that grows with the heap.
    """
    rows = []
    for N in sizes:
        enabled = gc.isenabled()
        gc.collect()
        gc.disable()
        try:
            t0 = time.perf_counter()
            run = run_strategy(strategy, N, p)
            elapsed = time.perf_counter() - t0
        finally:
            if enabled:
                gc.enable()
        rows.append(
            {
                "strategy": StrategyId.parse(strategy).value,
                "N": N,
                "p": p,
                "seconds": elapsed,
                "fidelity": run.fidelity,
                "noise_terms": run.num_terms,
            }
        )
    return rows
