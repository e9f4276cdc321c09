"""Pauli-diagonal noise channels and their Z-product normal form.

On a graph state every Pauli error can be traded for Pauli Z errors:
``X_a`` acts like ``Z`` on the neighbourhood of ``a`` and ``Y_a`` like ``Z``
on ``a`` and its neighbourhood (up to a phase). For channels that are
diagonal in the Pauli basis the phases cancel, so each channel becomes a
probability-weighted list of Z supports, a :class:`NoiseMap`.

A Z-product is represented by the ``frozenset`` of vertices carrying ``Z``.
Composition is symmetric difference.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import ChannelSpecError, NonDiagonalChannelError
from .graph import Graph

__all__ = [
    "WEIGHT_TOL",
    "PauliLabel",
    "ZProduct",
    "NoiseTerm",
    "NoiseMap",
    "Pauli1",
    "Depolarizing",
    "Correlated",
    "MultiDiagonal",
    "ChiChannel",
    "ChannelSpec",
    "pauli_to_zproduct",
    "compile_channel",
    "coalesce",
    "channel_qubits",
    "depolarizing_all",
    "parse_channel",
    "parse_noise_spec",
]

WEIGHT_TOL = 1e-12

ZProduct = frozenset
EMPTY: frozenset[int] = frozenset()


class PauliLabel(enum.IntEnum):
    I = 0
    X = 1
    Y = 2
    Z = 3

    @classmethod
    def parse(cls, label: str | int | PauliLabel) -> PauliLabel:
        if isinstance(label, PauliLabel):
            return label
        if isinstance(label, int):
            return cls(label)
        try:
            return cls[label.upper()]
        except KeyError:
            raise ChannelSpecError(f"unknown Pauli label {label!r}") from None


def _sort_key(support: frozenset[int]) -> tuple[int, tuple[int, ...]]:
    return (len(support), tuple(sorted(support)))


@dataclass(frozen=True)
class NoiseTerm:
    weight: float
    support: frozenset[int]

    def __post_init__(self) -> None:
        if self.weight < 0:
            raise ChannelSpecError(f"negative weight {self.weight}")


@dataclass(frozen=True)
class NoiseMap:
    """Probability-weighted Z-products, ``rho -> sum_k w_k Z_k rho Z_k``.

    Terms are kept coalesced (one per support) and canonically ordered, so
    two maps compare equal exactly when they act identically.
    """

    terms: tuple[NoiseTerm, ...]
    origin: str = ""

    def __post_init__(self) -> None:
        total = math.fsum(t.weight for t in self.terms)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ChannelSpecError(f"noise map weights sum to {total!r}, not 1")

    @classmethod
    def from_pairs(
        cls, pairs: Iterable[tuple[float, Iterable[int]]], origin: str = ""
    ) -> NoiseMap:
        """Build a coalesced map from ``(weight, support)`` pairs.

        Terms whose total weight is exactly zero are dropped.
        """
        acc: dict[frozenset[int], list[float]] = {}
        for w, s in pairs:
            acc.setdefault(frozenset(s), []).append(w)
        # fsum keeps the result independent of term order
        summed = ((s, math.fsum(ws)) for s, ws in sorted(acc.items(), key=lambda kv: _sort_key(kv[0])))
        terms = tuple(NoiseTerm(w, s) for s, w in summed if w != 0.0)
        return cls(terms, origin)

    @property
    def supports(self) -> list[frozenset[int]]:
        return [t.support for t in self.terms]

    def as_dict(self) -> dict[frozenset[int], float]:
        return {t.support: t.weight for t in self.terms}

    def is_identity(self, tol: float = 0.0) -> bool:
        """True when all weight sits on the empty support."""
        return all(not t.support or t.weight <= tol for t in self.terms)

    def vertices(self) -> frozenset[int]:
        out: set[int] = set()
        for t in self.terms:
            out |= t.support
        return frozenset(out)

    def map_supports(self, fn, origin: str | None = None) -> NoiseMap:
        """Apply ``fn`` to each support and re-coalesce."""
        return NoiseMap.from_pairs(
            ((t.weight, fn(t.support)) for t in self.terms),
            self.origin if origin is None else origin,
        )

    def to_json(self) -> dict:
        return {
            "origin": self.origin,
            "terms": [{"weight": t.weight, "support": sorted(t.support)} for t in self.terms],
        }

    def __str__(self) -> str:
        body = ", ".join(f"{t.weight:.6g}:{{{','.join(map(str, sorted(t.support)))}}}" for t in self.terms)
        return f"NoiseMap[{self.origin}]({body})"


def coalesce(noise_map: NoiseMap) -> NoiseMap:
    """Merge terms with equal support by summing their weights."""
    return NoiseMap.from_pairs(((t.weight, t.support) for t in noise_map.terms), noise_map.origin)


# -- channel specifications ---------------------------------------------------
def _check_prob(p: float, what: str = "p") -> None:
    if not (0.0 <= p <= 1.0) or math.isnan(p):
        raise ChannelSpecError(f"{what}={p!r} is not a probability")


@dataclass(frozen=True)
class Pauli1:
    """Single-qubit Pauli channel with weights for I, X, Y, Z."""

    lambdas: tuple[float, float, float, float]
    qubit: int

    def __post_init__(self) -> None:
        if len(self.lambdas) != 4:
            raise ChannelSpecError("pauli1 needs four weights")
        for lam in self.lambdas:
            _check_prob(lam, "lambda")
        if abs(math.fsum(self.lambdas) - 1.0) > WEIGHT_TOL:
            raise ChannelSpecError(f"pauli1 weights sum to {sum(self.lambdas)!r}")

    def pauli_terms(self) -> list[tuple[float, dict[int, PauliLabel]]]:
        return [(lam, {self.qubit: PauliLabel(i)}) for i, lam in enumerate(self.lambdas)]


@dataclass(frozen=True)
class Depolarizing:
    """``rho -> p rho + (1-p)/4 (rho + X rho X + Y rho Y + Z rho Z)``."""

    p: float
    qubit: int

    def __post_init__(self) -> None:
        _check_prob(self.p)

    def pauli_terms(self) -> list[tuple[float, dict[int, PauliLabel]]]:
        q = (1.0 - self.p) / 4.0
        return [(self.p, {})] + [(q, {self.qubit: PauliLabel(i)}) for i in range(4)]


@dataclass(frozen=True)
class Correlated:
    """``rho -> p rho + (1-p) sigma^{(x)k} rho sigma^{(x)k}`` on ``qubits``."""

    p: float
    pauli: PauliLabel
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        _check_prob(self.p)
        object.__setattr__(self, "pauli", PauliLabel.parse(self.pauli))
        if len(set(self.qubits)) != len(self.qubits) or not self.qubits:
            raise ChannelSpecError(f"correlated qubits must be distinct and non-empty: {self.qubits}")

    def pauli_terms(self) -> list[tuple[float, dict[int, PauliLabel]]]:
        return [(self.p, {}), (1.0 - self.p, {q: self.pauli for q in self.qubits})]


@dataclass(frozen=True)
class MultiDiagonal:
    """General Pauli-diagonal channel given as ``(weight, {qubit: label})`` terms."""

    terms: tuple[tuple[float, Mapping[int, PauliLabel]], ...]

    def __post_init__(self) -> None:
        clean = []
        for w, ops in self.terms:
            _check_prob(w, "weight")
            clean.append((float(w), {int(q): PauliLabel.parse(lab) for q, lab in ops.items()}))
        object.__setattr__(self, "terms", tuple(clean))
        if abs(math.fsum(w for w, _ in clean) - 1.0) > WEIGHT_TOL:
            raise ChannelSpecError("multi_diagonal weights do not sum to 1")

    def pauli_terms(self) -> list[tuple[float, dict[int, PauliLabel]]]:
        return [(w, dict(ops)) for w, ops in self.terms]


@dataclass(frozen=True)
class ChiChannel:
    """Channel given by its process matrix in the Pauli basis.

    ``rho -> sum_{ij} chi[i, j] P_i rho P_j^dagger`` where ``P_i`` runs over
    Pauli strings on ``qubits`` in lexicographic ``I, X, Y, Z`` order (first
    qubit most significant). Only accepted by :func:`compile_channel` when
    ``chi`` is diagonal.
    """

    qubits: tuple[int, ...]
    chi: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        chi = np.asarray(self.chi, dtype=complex)
        k = len(self.qubits)
        if chi.shape != (4**k, 4**k):
            raise ChannelSpecError(f"chi must be {4**k}x{4**k} for {k} qubits")
        if abs(np.trace(chi).real - 1.0) > 1e-10:
            raise ChannelSpecError("chi must have unit trace")
        object.__setattr__(self, "chi", chi)

    def labels(self) -> list[dict[int, PauliLabel]]:
        k = len(self.qubits)
        out = []
        for idx in range(4**k):
            digits = [(idx // 4 ** (k - 1 - i)) % 4 for i in range(k)]
            out.append({q: PauliLabel(d) for q, d in zip(self.qubits, digits)})
        return out

    def is_diagonal(self, tol: float = 1e-12) -> bool:
        off = self.chi - np.diag(np.diag(self.chi))
        return bool(np.all(np.abs(off) <= tol))

    def pauli_terms(self) -> list[tuple[float, dict[int, PauliLabel]]]:
        if not self.is_diagonal():
            raise NonDiagonalChannelError(
                "channel has off-diagonal Pauli terms; phases from Y operators and "
                "Pauli commutation do not cancel, so a simple replacement is no "
                "longer sufficient"
            )
        return [(float(self.chi[i, i].real), ops) for i, ops in enumerate(self.labels())]


ChannelSpec = Pauli1 | Depolarizing | Correlated | MultiDiagonal | ChiChannel


def channel_qubits(spec: ChannelSpec) -> tuple[int, ...]:
    if isinstance(spec, (Pauli1, Depolarizing)):
        return (spec.qubit,)
    if isinstance(spec, (Correlated, ChiChannel)):
        return tuple(spec.qubits)
    qs: set[int] = set()
    for _, ops in spec.terms:
        qs.update(ops)
    return tuple(sorted(qs))


# -- compilation ---------------------------------------------------------------
def pauli_to_zproduct(label: PauliLabel | str, a: int, g: Graph) -> frozenset[int]:
    """Support of the Z-product equivalent to a single Pauli on ``a``.

    ``I -> {}``, ``Z -> {a}``, ``X -> N_a``, ``Y -> {a} | N_a``; phases are
    dropped.
    """
    label = PauliLabel.parse(label)
    nb = g.neighbors(a)
    if label is PauliLabel.I:
        return EMPTY
    if label is PauliLabel.Z:
        return frozenset((a,))
    if label is PauliLabel.X:
        return nb
    return nb | {a}


def _pauli_string_support(ops: Mapping[int, PauliLabel], g: Graph) -> frozenset[int]:
    acc: frozenset[int] = EMPTY
    for q, lab in ops.items():
        acc = acc ^ pauli_to_zproduct(lab, q, g)
    return acc


def _origin(spec: ChannelSpec) -> str:
    name = type(spec).__name__.lower()
    return f"{name}@{','.join(map(str, channel_qubits(spec)))}"


def compile_channel(spec: ChannelSpec, g: Graph, origin: str | None = None) -> NoiseMap:
    """Rewrite a Pauli-diagonal channel as a Z-product map relative to ``g``.

    Multi-qubit Pauli strings map qubit by qubit and the per-qubit supports
    combine by symmetric difference. Equal supports are coalesced.

    Raises
    ------
    NonDiagonalChannelError
        If the channel has off-diagonal terms in the Pauli basis.
    UnknownVertexError
        If the channel names a vertex that is not live in ``g``.
    """
    pairs = [(w, _pauli_string_support(ops, g)) for w, ops in spec.pauli_terms()]
    for q in channel_qubits(spec):
        g.neighbors(q)
    return NoiseMap.from_pairs(pairs, _origin(spec) if origin is None else origin)


def depolarizing_all(g: Graph, p: float) -> list[NoiseMap]:
    """One depolarizing map per live vertex, in vertex order."""
    return [compile_channel(Depolarizing(p, a), g) for a in g]


def parse_channel(obj: Mapping, g: Graph | None = None) -> list[ChannelSpec]:
    """Decode one channel object of the noise-spec JSON.

    ``"qubit": "all"`` expands to one channel per live vertex of ``g``.
    """
    kind = obj.get("kind")
    if "qubit" in obj and obj["qubit"] == "all":
        if g is None:
            raise ChannelSpecError('"qubit": "all" requires a graph')
        return [s for a in g for s in parse_channel({**obj, "qubit": a}, g)]
    try:
        if kind == "depolarizing":
            return [Depolarizing(float(obj["p"]), int(obj["qubit"]))]
        if kind == "pauli1":
            lam = obj["lambdas"] if "lambdas" in obj else obj["lambda"]
            return [Pauli1(tuple(float(x) for x in lam), int(obj["qubit"]))]
        if kind == "correlated":
            return [Correlated(float(obj["p"]), PauliLabel.parse(obj["pauli"]), tuple(int(q) for q in obj["qubits"]))]
        if kind == "multi_diagonal":
            terms = tuple(
                (float(t["weight"]), {int(q): PauliLabel.parse(lab) for q, lab in t["paulis"].items()})
                for t in obj["terms"]
            )
            return [MultiDiagonal(terms)]
        if kind == "chi":
            chi = np.asarray(obj["chi_real"], dtype=float) + 1j * np.asarray(
                obj.get("chi_imag", np.zeros_like(obj["chi_real"])), dtype=float
            )
            return [ChiChannel(tuple(int(q) for q in obj["qubits"]), chi)]
    except (KeyError, TypeError) as exc:
        raise ChannelSpecError(f"malformed {kind!r} channel: {exc}") from exc
    raise ChannelSpecError(f"unknown channel kind {kind!r}")


def parse_noise_spec(obj: Mapping, g: Graph | None = None) -> list[ChannelSpec]:
    chans = obj.get("channels")
    if not isinstance(chans, Sequence):
        raise ChannelSpecError('noise spec needs a "channels" list')
    return [s for c in chans for s in parse_channel(c, g)]
