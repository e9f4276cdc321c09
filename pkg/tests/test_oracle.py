from __future__ import annotations

import random

import numpy as np
import pytest

from noisystab import oracle
from noisystab.errors import InvalidOperationError, WidthError
from noisystab.graph import (
    Graph,
    full_merge_graph,
    local_complement,
    measure_x_graph,
    measure_y_graph,
    measure_z_graph,
    merge_graph,
)
from noisystab.noise import Depolarizing, Pauli1, PauliLabel
from noisystab.oracle import DenseState
from noisystab.verify import random_connected_graph

TOL = 1e-10


def stabilizer_expectations(state: DenseState, g: Graph) -> list[float]:
    out = []
    for a in sorted(g.vertices):
        ops = {a: PauliLabel.X, **{b: PauliLabel.Z for b in g.neighbors(a)}}
        perm, phase = oracle._pauli_action(state, ops)
        k = np.zeros_like(state.rho)
        k[perm, np.arange(len(perm))] = phase
        out.append(float(np.real(np.trace(k @ state.rho))))
    return out


def test_single_vertex_is_plus_state():
    rho = oracle.build_graph_state(Graph([1])).rho
    assert np.allclose(rho, np.full((2, 2), 0.5))


def test_two_path_stabilizers():
    g = Graph.path(2)
    st = oracle.build_graph_state(g)
    assert stabilizer_expectations(st, g) == pytest.approx([1.0, 1.0])
    assert np.linalg.matrix_rank(st.rho) == 1


def test_random_graphs_are_stabilized():
    rng = random.Random(2)
    for _ in range(20):
        g = random_connected_graph(rng, rng.randint(1, 7))
        st = oracle.build_graph_state(g)
        st.check()
        assert stabilizer_expectations(st, g) == pytest.approx([1.0] * len(g))


def test_size_limit():
    with pytest.raises(WidthError):
        oracle.build_graph_state(Graph.path(oracle.MAX_QUBITS + 1))


def test_identity_channel():
    g = Graph.path(3)
    st = oracle.build_graph_state(g)
    out = oracle.apply_channel(st, Pauli1((1.0, 0.0, 0.0, 0.0), 2))
    assert np.allclose(out.rho, st.rho)


def test_depolarizing_fidelity_on_bell_pair():
    p = 0.83
    g = Graph.path(2)
    st = oracle.apply_channel(oracle.build_graph_state(g), Depolarizing(p, 1))
    assert oracle.fidelity_to(st, g) == pytest.approx(1 - 3 * (1 - p) / 4, abs=TOL)


def test_z_channel_composition():
    q = 0.13
    g = Graph.path(3)
    st = oracle.build_graph_state(g)
    twice = oracle.apply_channel(oracle.apply_channel(st, Pauli1((1 - q, 0, 0, q), 2)), Pauli1((1 - q, 0, 0, q), 2))
    r = 2 * q * (1 - q)
    once = oracle.apply_channel(st, Pauli1((1 - r, 0, 0, r), 2))
    assert np.allclose(twice.rho, once.rho, atol=TOL)


def test_z_measurement_outcomes():
    g = Graph([1, 2, 3, 4], [(1, 2), (2, 3), (2, 4), (3, 4)])
    st = oracle.build_graph_state(g)
    plus, pp = oracle.apply_measurement(st, "z", 2, 1, g, return_probability=True)
    minus, pm = oracle.apply_measurement(st, "z", 2, -1, g, return_probability=True)
    assert pp == pytest.approx(0.5) and pm == pytest.approx(0.5)
    assert np.allclose(plus.rho, minus.rho, atol=TOL)
    assert oracle.fidelity_to(plus, measure_z_graph(g, 2)) == pytest.approx(1.0, abs=TOL)


@pytest.mark.parametrize("outcome", [1, -1])
def test_y_measurement_on_three_path(outcome):
    g = Graph.path(3)
    out = oracle.apply_measurement(oracle.build_graph_state(g), "y", 2, outcome, g)
    assert oracle.fidelity_to(out, measure_y_graph(g, 2)) == pytest.approx(1.0, abs=TOL)


def test_x_measurement_of_isolated_vertex():
    g = Graph([1, 2, 3], [(1, 2)])
    st = oracle.build_graph_state(g)
    # |+> is an X eigenstate: the + projector keeps everything
    post = oracle._sandwich(st, 3, np.array([1, 1]) / np.sqrt(2))
    assert post.trace() == pytest.approx(1.0)
    out = oracle.apply_measurement(st, "x", 3, 1, g)
    assert oracle.fidelity_to(out, measure_x_graph(g, 3)) == pytest.approx(1.0, abs=TOL)


def test_zero_probability_outcome_rejected():
    zero = DenseState(np.diag([1.0, 0.0]).astype(complex), (1,))
    with pytest.raises(InvalidOperationError):
        oracle.apply_measurement(zero, "z", 1, -1, Graph([1]))


def test_all_measurements_and_lc_on_random_graphs():
    rng = random.Random(6)
    for _ in range(40):
        g = random_connected_graph(rng, rng.randint(2, 7))
        a = rng.choice(sorted(g.vertices))
        st = oracle.build_graph_state(g)
        lc = oracle.apply_local_complement(st, a, g)
        assert oracle.fidelity_to(lc, local_complement(g, a)) == pytest.approx(1.0, abs=TOL)
        for outcome in (1, -1):
            for basis, rule in (("z", measure_z_graph), ("y", measure_y_graph), ("x", measure_x_graph)):
                out = oracle.apply_measurement(st, basis, a, outcome, g)
                assert oracle.fidelity_to(out, rule(g, a)) == pytest.approx(1.0, abs=TOL)


def test_cnot_is_an_involution():
    g = Graph.path(3)
    st = oracle.build_graph_state(g)
    twice = oracle.apply_cnot(oracle.apply_cnot(st, 1, 3), 1, 3)
    assert np.allclose(twice.rho, st.rho)
    with pytest.raises(InvalidOperationError):
        oracle.apply_cnot(st, 1, 1)


def test_cnot_makes_bell_state():
    plus = np.array([1, 1]) / np.sqrt(2)
    zero = np.array([1, 0])
    psi = np.kron(plus, zero)
    st = oracle.apply_cnot(DenseState(np.outer(psi, psi), (1, 2)), 1, 2)
    # a Hadamard on qubit 2 turns the Bell state into the 2-path graph state
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    st = oracle.apply_unitary(st, h, 2)
    assert oracle.fidelity_to(st, Graph.path(2)) == pytest.approx(1.0, abs=TOL)


@pytest.mark.parametrize("outcome", [1, -1])
def test_merge_of_two_bell_pairs(outcome):
    g = Graph([1, 2, 3, 4], [(1, 2), (3, 4)])
    out = oracle.apply_merge(oracle.build_graph_state(g), 2, 3, outcome, g)
    assert oracle.fidelity_to(out, merge_graph(g, 2, 3)) == pytest.approx(1.0, abs=TOL)


def test_merge_and_full_merge_on_random_graphs():
    rng = random.Random(9)
    for _ in range(40):
        g = random_connected_graph(rng, rng.randint(3, 7))
        s, t = rng.sample(sorted(g.vertices), 2)
        st = oracle.build_graph_state(g)
        for o1 in (1, -1):
            out = oracle.apply_merge(st, s, t, o1, g)
            assert oracle.fidelity_to(out, merge_graph(g, s, t)) == pytest.approx(1.0, abs=TOL)
            for o2 in (1, -1):
                out = oracle.apply_full_merge(st, s, t, (o1, o2), g)
                assert oracle.fidelity_to(out, full_merge_graph(g, s, t)) == pytest.approx(1.0, abs=TOL)


def test_fidelity_to_examples():
    g = Graph.path(3)
    st = oracle.build_graph_state(g)
    assert oracle.fidelity_to(st, g) == pytest.approx(1.0)
    mixed = DenseState(np.eye(8) / 8, st.qubits)
    assert oracle.fidelity_to(mixed, g) == pytest.approx(1 / 8)


def test_side_to_side_on_four_qubits():
    p = 0.9
    g = Graph.path(4)
    st = oracle.build_graph_state(g)
    for a in g.vertices:
        st = oracle.apply_channel(st, Depolarizing(p, a))
    work = g.copy()
    for a in (2, 3):
        st = oracle.apply_measurement(st, "y", a, 1, work)
        work = measure_y_graph(work, a)
    assert oracle.fidelity_to(st, work) == pytest.approx((1 + 2 * p**3 + p**4) / 4, abs=TOL)


def test_states_stay_physical():
    rng = random.Random(1)
    g = random_connected_graph(rng, 5)
    st = oracle.build_graph_state(g)
    for a in g.vertices:
        st = oracle.apply_channel(st, Depolarizing(0.7, a))
    st.check()
    st = oracle.apply_measurement(st, "y", 1, -1, g)
    st.check()
