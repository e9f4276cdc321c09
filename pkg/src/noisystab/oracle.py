"""Brute-force density-matrix reference for small graph states.

States are dense ``2**n x 2**n`` matrices. Qubit ``i`` of the register is the
``i``-th smallest live vertex label and corresponds to bit ``n-1-i`` of the
computational-basis index, so the first qubit is the most significant.

Measurements follow the graph-state convention: project qubit ``a`` onto an
eigenvector of the measured Pauli, remove it, and undo the outcome-dependent
local unitary so that a noiseless input ends in the graph state predicted by
:mod:`noisystab.graph`.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import InvalidOperationError, UnknownVertexError, WidthError
from .graph import Graph, merge_graph
from .noise import ChannelSpec, ChiChannel, NoiseMap, PauliLabel

__all__ = [
    "MAX_QUBITS",
    "DenseState",
    "build_graph_state",
    "graph_state_vector",
    "apply_channel",
    "apply_noise_map",
    "graph_basis_matrix",
    "apply_pauli_string",
    "apply_unitary",
    "apply_local_complement",
    "apply_measurement",
    "apply_cnot",
    "apply_merge",
    "apply_full_merge",
    "partial_trace",
    "fidelity_to",
    "z_product_state",
]

MAX_QUBITS = 12

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULIS = {PauliLabel.I: _I2, PauliLabel.X: _X, PauliLabel.Y: _Y, PauliLabel.Z: _Z}

_EIGVECS = {
    ("z", +1): np.array([1, 0], dtype=complex),
    ("z", -1): np.array([0, 1], dtype=complex),
    ("x", +1): np.array([1, 1], dtype=complex) / np.sqrt(2),
    ("x", -1): np.array([1, -1], dtype=complex) / np.sqrt(2),
    ("y", +1): np.array([1, 1j], dtype=complex) / np.sqrt(2),
    ("y", -1): np.array([1, -1j], dtype=complex) / np.sqrt(2),
}


def _sqrt_pauli(sign: int, pauli: np.ndarray) -> np.ndarray:
    """Principal square root of ``sign * i * pauli``, i.e. ``exp(sign i pi/4 P)``."""
    return (_I2 + sign * 1j * pauli) / np.sqrt(2)


@dataclass
class DenseState:
    """Density matrix over the qubits ``qubits`` (sorted vertex labels)."""

    rho: np.ndarray
    qubits: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.qubits)

    def index(self, v: int) -> int:
        try:
            return self.qubits.index(v)
        except ValueError:
            raise UnknownVertexError(v) from None

    def copy(self) -> DenseState:
        return DenseState(self.rho.copy(), self.qubits)

    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def check(self, tol: float = 1e-10) -> None:
        assert abs(np.trace(self.rho) - 1.0) <= tol, "trace not 1"
        assert np.allclose(self.rho, self.rho.conj().T, atol=tol), "not Hermitian"
        assert np.linalg.eigvalsh(self.rho).min() >= -1e-9, "not PSD"


def _bits(n: int) -> np.ndarray:
    """``bits[x, i]`` is the value of qubit ``i`` in basis state ``x``."""
    idx = np.arange(2**n)
    return (idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1


def graph_state_vector(g: Graph) -> tuple[np.ndarray, tuple[int, ...]]:
    """Amplitudes ``(-1)^{sum_edges x_u x_v} / 2^{n/2}`` of ``|G>``."""
    qubits = tuple(sorted(g.vertices))
    n = len(qubits)
    if n > MAX_QUBITS:
        raise WidthError(f"oracle limited to {MAX_QUBITS} qubits, got {n}")
    pos = {v: i for i, v in enumerate(qubits)}
    bits = _bits(n)
    parity = np.zeros(2**n, dtype=np.int64)
    for u, v in g.edge_list():
        parity ^= bits[:, pos[u]] & bits[:, pos[v]]
    psi = (1 - 2 * parity).astype(complex) / np.sqrt(2**n)
    return psi, qubits


def build_graph_state(g: Graph) -> DenseState:
    psi, qubits = graph_state_vector(g)
    return DenseState(np.outer(psi, psi.conj()), qubits)


def z_product_state(g: Graph, support: Iterable[int]) -> np.ndarray:
    """State vector ``Z_S |G>``."""
    psi, qubits = graph_state_vector(g)
    pos = {v: i for i, v in enumerate(qubits)}
    bits = _bits(len(qubits))
    par = np.zeros(len(psi), dtype=np.int64)
    for v in support:
        par ^= bits[:, pos[v]]
    return psi * (1 - 2 * par)


# -- elementary actions ---------------------------------------------------------------
def _pauli_action(state: DenseState, ops: Mapping[int, PauliLabel]) -> tuple[np.ndarray, np.ndarray]:
    """``P |x> = c[x] |perm[x]>`` for the Pauli string ``ops``."""
    n = state.n
    bits = _bits(n)
    dim = 2**n
    flip = 0
    phase = np.ones(dim, dtype=complex)
    for v, lab in ops.items():
        i = state.index(v)
        lab = PauliLabel.parse(lab)
        b = bits[:, i]
        if lab in (PauliLabel.X, PauliLabel.Y):
            flip |= 1 << (n - 1 - i)
        if lab is PauliLabel.Z:
            phase *= 1 - 2 * b
        elif lab is PauliLabel.Y:
            # Y|0> = i|1>, Y|1> = -i|0>
            phase *= np.where(b == 0, 1j, -1j)
    return np.arange(dim) ^ flip, phase


def _pauli_matrix(state: DenseState, ops: Mapping[int, PauliLabel]) -> np.ndarray:
    perm, phase = _pauli_action(state, ops)
    m = np.zeros((len(perm), len(perm)), dtype=complex)
    m[perm, np.arange(len(perm))] = phase
    return m


def apply_pauli_string(state: DenseState, ops: Mapping[int, PauliLabel]) -> np.ndarray:
    """Return ``P rho P^dagger`` for the Pauli string ``ops``."""
    perm, phase = _pauli_action(state, ops)
    # (P rho P^+)[y, y'] = c[x] rho[x, x'] conj(c[x']) with y = perm[x]
    out = np.empty_like(state.rho)
    out[np.ix_(perm, perm)] = phase[:, None] * state.rho * phase.conj()[None, :]
    return out


def apply_channel(state: DenseState, spec: ChannelSpec) -> DenseState:
    """Apply the Kraus sum of ``spec`` exactly (off-diagonal chi terms included)."""
    if isinstance(spec, ChiChannel):
        labels = spec.labels()
        mats = [_pauli_matrix(state, ops) for ops in labels]
        rho = np.zeros_like(state.rho)
        for i, mi in enumerate(mats):
            for j, mj in enumerate(mats):
                c = spec.chi[i, j]
                if c != 0:
                    rho += c * (mi @ state.rho @ mj.conj().T)
        return DenseState(rho, state.qubits)
    terms = spec.pauli_terms()
    total = sum(w for w, _ in terms)
    if abs(total - 1.0) > 1e-12:
        raise InvalidOperationError(f"channel weights sum to {total}")
    rho = np.zeros_like(state.rho)
    for w, ops in terms:
        if w:
            rho += w * apply_pauli_string(state, ops)
    return DenseState(rho, state.qubits)


def apply_noise_map(state: DenseState, noise_map: NoiseMap) -> DenseState:
    """Apply ``rho -> sum_k w_k Z_k rho Z_k`` for a Z-product map."""
    rho = np.zeros_like(state.rho)
    for t in noise_map.terms:
        rho += t.weight * _apply_z(state, t.support).rho
    return DenseState(rho, state.qubits)


def apply_unitary(state: DenseState, u: np.ndarray, v: int) -> DenseState:
    """Conjugate by a single-qubit unitary on vertex ``v``."""
    n = state.n
    i = state.index(v)
    left, right = 2**i, 2 ** (n - 1 - i)
    t = state.rho.reshape(left, 2, right, left, 2, right)
    t = np.einsum("ab,lbrLBR->larLBR", u, t)
    t = np.einsum("lbrLBR,aB->lbrLaR", t, u.conj())
    return DenseState(t.reshape(2**n, 2**n), state.qubits)


def apply_cnot(state: DenseState, s: int, t: int) -> DenseState:
    if s == t:
        raise InvalidOperationError("CNOT needs distinct control and target")
    n = state.n
    i, j = state.index(s), state.index(t)
    idx = np.arange(2**n)
    ctrl = (idx >> (n - 1 - i)) & 1
    perm = idx ^ (ctrl << (n - 1 - j))
    return DenseState(state.rho[np.ix_(perm, perm)], state.qubits)


def partial_trace(state: DenseState, keep: Iterable[int]) -> DenseState:
    keep = tuple(sorted(keep))
    n = state.n
    kidx = [state.index(v) for v in keep]
    tidx = [i for i in range(n) if i not in kidx]
    t = state.rho.reshape((2,) * (2 * n))
    t = np.transpose(t, kidx + tidx + [n + i for i in kidx] + [n + i for i in tidx])
    k = len(kidx)
    t = t.reshape(2**k, 2 ** (n - k), 2**k, 2 ** (n - k))
    return DenseState(np.einsum("aibi->ab", t), keep)


def _sandwich(state: DenseState, v: int, vec: np.ndarray) -> DenseState:
    """``<vec|_v rho |vec>_v``: project qubit ``v`` and remove it (unnormalized)."""
    n = state.n
    i = state.index(v)
    left, right = 2**i, 2 ** (n - 1 - i)
    t = state.rho.reshape(left, 2, right, left, 2, right)
    t = np.einsum("b,lbrLBR,B->lrLR", vec.conj(), t, vec)
    qubits = state.qubits[:i] + state.qubits[i + 1 :]
    return DenseState(t.reshape(2 ** (n - 1), 2 ** (n - 1)), qubits)


def _apply_z(state: DenseState, support: Iterable[int]) -> DenseState:
    support = list(support)
    if not support:
        return state
    return DenseState(apply_pauli_string(state, {v: PauliLabel.Z for v in support}), state.qubits)


def _correction(
    state: DenseState, basis: str, a: int, outcome: int, g: Graph, b0: int | None
) -> DenseState:
    """Undo the outcome-dependent local unitary: ``rho -> U^dagger rho U``."""
    na = g.neighbors(a)
    if basis == "z":
        return _apply_z(state, na) if outcome < 0 else state
    if basis == "y":
        for b in na:
            state = apply_unitary(state, _sqrt_pauli(-outcome, _Z).conj().T, b)
        return state
    # basis == "x"
    nb0 = g.neighbors(b0)
    if outcome > 0:
        zs = na - nb0 - {b0}
    else:
        zs = nb0 - na - {a}
    state = _apply_z(state, zs)
    return apply_unitary(state, _sqrt_pauli(outcome, _Y).conj().T, b0)


def apply_measurement(
    state: DenseState,
    basis: str,
    a: int,
    outcome: int,
    g: Graph,
    b0: int | None = None,
    *,
    return_probability: bool = False,
) -> DenseState | tuple[DenseState, float]:
    """Measure vertex ``a`` of ``state`` in a Pauli basis and post-select.

    Parameters
    ----------
    basis : {"x", "y", "z"}
    outcome : {+1, -1}
    g : Graph
        Noiseless reference graph before the measurement; it fixes the
        correction unitary.
    b0 : int, optional
        Special neighbour for X measurements, default smallest neighbour.

    An X measurement of an isolated vertex has no correction and the
    measured qubit factorizes off; it is traced out without post-selection.
    """
    basis = basis.lower()
    if basis not in ("x", "y", "z") or outcome not in (1, -1):
        raise InvalidOperationError(f"bad measurement {basis}{outcome:+d}")
    na = g.neighbors(a)
    if basis == "x":
        if b0 is None:
            b0 = min(na) if na else None
        elif b0 not in na:
            raise InvalidOperationError(f"b0={b0} is not a neighbour of {a}")
        if b0 is None:
            out = partial_trace(state, [q for q in state.qubits if q != a])
            return (out, 1.0) if return_probability else out
    post = _sandwich(state, a, _EIGVECS[(basis, outcome)])
    prob = post.trace()
    if prob < 1e-12:
        raise InvalidOperationError(f"outcome {basis}{outcome:+d} on {a} has probability {prob:.3g}")
    post = DenseState(post.rho / prob, post.qubits)
    post = _correction(post, basis, a, outcome, g, b0)
    return (post, prob) if return_probability else post


def apply_local_complement(state: DenseState, a: int, g: Graph) -> DenseState:
    """Conjugate by ``sqrt(-i X_a) prod_{b in N_a} sqrt(i Z_b)``."""
    state = apply_unitary(state, _sqrt_pauli(-1, _X), a)
    for b in g.neighbors(a):
        state = apply_unitary(state, _sqrt_pauli(+1, _Z), b)
    return state


def apply_merge(state: DenseState, s: int, t: int, outcome: int, g: Graph) -> DenseState:
    """CNOT from ``s`` to ``t``, then Z-measure ``t`` and correct.

    Outcome ``-1`` leaves ``Z`` on the old neighbours of ``t`` other than
    ``s``; outcome ``+1`` leaves ``Z_s`` when ``s`` and ``t`` were adjacent.
    The correction removes either byproduct.
    """
    if s == t:
        raise InvalidOperationError("merge source and target coincide")
    state = apply_cnot(state, s, t)
    post = _sandwich(state, t, _EIGVECS[("z", outcome)])
    prob = post.trace()
    if prob < 1e-12:
        raise InvalidOperationError(f"merge outcome {outcome:+d} has probability {prob:.3g}")
    post = DenseState(post.rho / prob, post.qubits)
    nt = g.neighbors(t)
    if outcome < 0:
        post = _apply_z(post, nt - {s})
    elif s in nt:
        post = _apply_z(post, [s])
    return post


def apply_full_merge(
    state: DenseState, s: int, t: int, outcomes: tuple[int, int], g: Graph
) -> DenseState:
    mid = merge_graph(g, s, t)
    state = apply_merge(state, s, t, outcomes[0], g)
    return apply_measurement(state, "y", s, outcomes[1], mid)


def fidelity_to(state: DenseState, g: Graph) -> float:
    """``<G| rho |G>``."""
    psi, qubits = graph_state_vector(g)
    if qubits != state.qubits:
        raise InvalidOperationError(f"state qubits {state.qubits} differ from graph {qubits}")
    return float(np.real(psi.conj() @ state.rho @ psi))


def graph_basis_matrix(state: DenseState, g: Graph) -> np.ndarray:
    """``rho`` in the basis ``Z_S |G>``; row ``k`` is the pattern with bit ``i`` = ``S`` contains qubit ``i`` (LSB first)."""
    qubits = tuple(sorted(g.vertices))
    if qubits != state.qubits:
        raise InvalidOperationError(f"state qubits {state.qubits} differ from graph {qubits}")
    m = len(qubits)
    basis = np.stack(
        [z_product_state(g, [qubits[i] for i in range(m) if (k >> i) & 1]) for k in range(2**m)],
        axis=1,
    )
    return basis.conj().T @ state.rho @ basis

