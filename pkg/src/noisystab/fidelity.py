"""Combining reduced noise maps into the output state on the target qubits.

With every map reduced to ``m`` target qubits, a Z-product is a bit pattern
in ``GF(2)^m`` (bit ``i`` set when ``targets[i]`` carries ``Z``). The maps are
independent, so the output is the XOR-convolution of their weight
distributions: a mixture ``sum_S w(S) Z_S |G'><G'| Z_S`` over the graph-state
basis of the final graph.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import InvalidOperationError, WidthError
from .noise import NoiseMap

__all__ = [
    "MAX_TARGET_QUBITS",
    "DiagonalEnsemble",
    "pattern_of",
    "combine_maps",
    "fidelity",
    "diagonal_density",
]

MAX_TARGET_QUBITS = 20


def pattern_of(support: Iterable[int], targets: Sequence[int]) -> int:
    """Bit pattern of a support; bit ``i`` corresponds to ``targets[i]``."""
    pos = {t: i for i, t in enumerate(targets)}
    bits = 0
    for v in support:
        try:
            bits |= 1 << pos[v]
        except KeyError:
            raise InvalidOperationError(f"support vertex {v} is not a target") from None
    return bits


@dataclass(frozen=True)
class DiagonalEnsemble:
    """Weights of ``Z_S |G'>`` for every pattern ``S`` of the ordered targets."""

    targets: tuple[int, ...]
    weights: np.ndarray

    @property
    def m(self) -> int:
        return len(self.targets)

    def weight(self, support: Iterable[int]) -> float:
        return float(self.weights[pattern_of(support, self.targets)])

    def label(self, pattern: int) -> str:
        """Bit string for ``pattern``, character ``i`` for ``targets[i]``."""
        return "".join("1" if (pattern >> i) & 1 else "0" for i in range(self.m))

    def populations(self) -> dict[str, float]:
        return {self.label(k): float(w) for k, w in enumerate(self.weights)}

    def to_json(self) -> dict:
        return {
            "targets": list(self.targets),
            "fidelity": fidelity(self),
            "populations": self.populations(),
        }


def combine_maps(maps: Iterable[NoiseMap], targets: Sequence[int]) -> DiagonalEnsemble:
    """XOR-convolve the maps' distributions over the target patterns.

    Each map costs ``2**m`` times its number of terms. Map order is
    irrelevant.

    >>> a = NoiseMap.from_pairs([(0.9, []), (0.1, [1])])
    >>> b = NoiseMap.from_pairs([(0.8, []), (0.2, [1])])
    >>> [round(float(w), 12) for w in combine_maps([a, b], [1]).weights]
    [0.74, 0.26]
    """
    targets = tuple(targets)
    m = len(targets)
    if len(set(targets)) != m:
        raise InvalidOperationError(f"repeated target in {targets}")
    if m > MAX_TARGET_QUBITS:
        raise WidthError(f"{m} target qubits exceeds the limit of {MAX_TARGET_QUBITS}")
    dist = np.zeros(2**m)
    dist[0] = 1.0
    idx = np.arange(2**m)
    for nm in maps:
        terms = [(t.weight, pattern_of(t.support, targets)) for t in nm.terms]
        if len(terms) == 1 and terms[0][1] == 0:
            continue
        new = np.zeros_like(dist)
        for w, pat in terms:
            if w:
                new += w * (dist[idx ^ pat] if pat else dist)
        dist = new
    return DiagonalEnsemble(targets, dist)


def fidelity(ens: DiagonalEnsemble) -> float:
    """Overlap with the noiseless target, i.e. the weight of the empty pattern.

    A non-trivial Z-product is never a stabilizer of a graph state, so every
    other pattern is orthogonal to it.
    """
    return float(ens.weights[0])


def diagonal_density(ens: DiagonalEnsemble) -> DiagonalEnsemble:
    """Graph-basis populations; the ensemble already is that diagonal."""
    return ens
