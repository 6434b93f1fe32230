from math import sqrt

import numpy as np
from pytest import mark, raises, fixture

from twinproof.errors import ColoringError, ShapeMismatchError, SizeCapError, ProofFormatError
from twinproof.graphs import Graph, Coloring, complete, petersen, find_3coloring, random_corpus
from twinproof.protocol3col import *
from twinproof.qstate import StateVector, projector, basis_state, uniform_state, inner
from twinproof.testing import case_of
from tests.mocks import (
    triangle, k4, c5, path3, edgeless_pair, random_pairs, basis_pair, honest_register,
    same_pair, triangle_coloring
)


@fixture(scope="module")
def k4_operators() -> VerifierOperators:
    return acceptance_operator(k4)


@fixture(scope="module")
def triangle_operators() -> VerifierOperators:
    return acceptance_operator(triangle)


def test_honest_proof_form():
    pair = honest_proof(triangle, triangle_coloring)

    assert pair.w1 is pair.w2
    assert np.allclose(pair.w1.tensor_view(), np.eye(3) / sqrt(3))


def test_honest_proof_needs_valid_coloring():
    with raises(ColoringError):
        honest_proof(triangle, Coloring((0, 0, 1)))

    assert coloring_proof(Coloring((0, 0, 1))).n == 3


def test_proof_pair_shapes():
    with raises(ShapeMismatchError):
        ProofPair(basis_state((3, 2), 0), basis_state((3, 2), 0))

    with raises(ShapeMismatchError):
        ProofPair(honest_register((0, 1)), honest_register((0, 1, 2)))


@mark.parametrize("graph", [triangle, c5, petersen(), path3, Graph(1)])
def test_completeness(graph: Graph):
    operators = acceptance_operator(graph)
    pair = honest_proof(graph, find_3coloring(graph))

    assert np.isclose(accept_probability(operators, pair), 1, atol=1e-9)


@mark.slow
@mark.parametrize("graph", random_corpus(10, colorable=True, seed=4))
def test_completeness_on_random_colorable_corpus(graph: Graph):
    operators = acceptance_operator(graph)
    pair = honest_proof(graph, find_3coloring(graph))

    assert np.isclose(accept_probability(operators, pair), 1, atol=1e-9)
    assert run_protocol(operators, pair, 100_000, seed=graph.n)[0] == 100_000


def test_k4_basis_pair(k4_operators: VerifierOperators):
    pair = basis_pair(4, (0, 0), (0, 0))

    failures = test_failures(k4_operators, pair)

    assert np.isclose(accept_probability(k4_operators, pair), 41 / 48, atol=1e-12)
    assert np.allclose((failures.test1, failures.test2, failures.test3), (0, 0, 7 / 16))


def test_register_test3_rejection_of_basis_state():
    single = register_test3(4)
    state = basis_state(register_shape_of(4), 0)

    assert np.isclose(1 - np.vdot(state.amplitudes, single.entries @ state.amplitudes).real, 1 / 4)


test_test2_entries = case_of(
    (lambda: build_test2(triangle).entries[0 * 9 + 3, 0 * 9 + 3].real, 0),
    (lambda: build_test2(triangle).entries[0 * 9 + 1, 0 * 9 + 1].real, 0),
    (lambda: build_test2(triangle).entries[0 * 9 + 4, 0 * 9 + 4].real, 1),
    (lambda: build_test2(path3).entries[0 * 9 + 6, 0 * 9 + 6].real, 1),
    (lambda: build_test2(triangle).entries[4 * 9 + 4, 4 * 9 + 4].real, 1),
    (lambda: int(np.trace(build_test2_part_a(2).entries).real), 12),
    (lambda: int(np.trace(build_test2_part_b(edgeless_pair).entries).real), 0),
    (lambda: int(np.trace(build_test2_part_b(triangle).entries).real), 18),
)


def test_test2_is_complement_of_its_parts():
    parts = build_test2_part_a(3).entries + build_test2_part_b(triangle).entries

    assert np.allclose(build_test2(triangle).entries, np.eye(81) - parts)


def test_operators_are_povm_elements(k4_operators: VerifierOperators):
    for operator in (k4_operators.m_swap, k4_operators.m_test2, k4_operators.m_test3, k4_operators.m_total):
        spectrum = np.linalg.eigvalsh(operator.entries)

        assert operator.is_povm
        assert spectrum[0] > -1e-9 and spectrum[-1] < 1 + 1e-9


def test_acceptance_operator_cap():
    with raises(SizeCapError):
        acceptance_operator(Graph(13))


def test_swap_test_identity(k4_operators: VerifierOperators):
    for pair in random_pairs(4, 100, seed=4):
        expected = 0.5 + abs(inner(pair.w1, pair.w2)) ** 2 / 2

        assert abs(1 - test_failures(k4_operators, pair).test1 - expected) < 1e-10
        assert abs(swap_test_acceptance(pair) - expected) < 1e-10


def test_mixed_acceptance_of_pure_densities(k4_operators: VerifierOperators):
    for pair in random_pairs(4, 5, seed=9):
        assert np.isclose(
            mixed_accept_probability(k4_operators, projector(pair.w1), projector(pair.w2)),
            accept_probability(k4_operators, pair),
        )


def test_accept_probability_shape_mismatch(k4_operators: VerifierOperators):
    with raises(ShapeMismatchError):
        accept_probability(k4_operators, honest_proof(triangle, triangle_coloring))


def test_run_protocol_on_honest_proof(triangle_operators: VerifierOperators):
    accepted, transcripts = run_protocol(
        triangle_operators,
        honest_proof(triangle, triangle_coloring),
        2000,
        seed=5,
    )

    assert accepted == 2000
    assert {transcript.test for transcript in transcripts} == {1, 2, 3}
    assert all(transcript.verdict == ACCEPT for transcript in transcripts)


def test_run_protocol_statistics(k4_operators: VerifierOperators):
    trials = 20_000
    accepted, transcripts = run_protocol(k4_operators, basis_pair(4, (0, 0), (0, 0)), trials, seed=2)
    expected = 41 / 48

    assert abs(accepted / trials - expected) < 5 * sqrt(expected * (1 - expected) / trials)
    assert all(
        transcript.verdict == ACCEPT
        for transcript in transcripts
        if transcript.test in (1, 2)
    )


def test_run_protocol_is_reproducible(k4_operators: VerifierOperators):
    pair = random_pairs(4, 1, seed=1)[0]

    assert run_protocol(k4_operators, pair, 300, 8) == run_protocol(k4_operators, pair, 300, 8)

    with raises(ValueError):
        run_protocol(k4_operators, pair, 0, 8)


def test_honest_triangle_statistics():
    statistics = lemma_statistics(honest_proof(triangle, triangle_coloring))

    assert np.allclose(statistics.node_masses, 1 / 3)
    assert np.allclose(statistics.color_concentrations, 1)
    assert np.allclose(statistics.fourier_color0_masses, 1 / 3)
    assert np.allclose(statistics.node_fourier_failures, 0)
    assert np.allclose(statistics.node_distances_from_uniform, 0)
    assert np.isclose(statistics.overlap, 1)
    assert np.isclose(statistics.test1_failure, 0)
    assert np.isclose(statistics.test2a_failure, 0)
    assert np.isclose(statistics.test3_failure, 0)


def test_lemma_statistics_agree_with_operators(k4_operators: VerifierOperators):
    part_a = build_test2_part_a(4)

    for pair in random_pairs(4, 20, seed=12):
        statistics = lemma_statistics(pair)
        failures = test_failures(k4_operators, pair)
        joint = pair.joint()

        assert np.isclose(statistics.test1_failure, failures.test1)
        assert np.isclose(statistics.test3_failure, failures.test3)
        assert np.isclose(
            statistics.test2a_failure,
            np.vdot(joint.amplitudes, part_a.entries @ joint.amplitudes).real,
        )


def test_lemma_statistics_without_fourier_mass():
    amplitudes = np.zeros(6, dtype=complex)
    amplitudes[0], amplitudes[1] = 1 / sqrt(2), -1 / sqrt(2)
    register = StateVector(register_shape_of(2), amplitudes)

    statistics = lemma_statistics(same_pair(register))

    assert np.allclose(statistics.fourier_color0_masses, 0)
    assert statistics.postselected_node_distributions == (None, None)


def test_proof_pair_codec():
    pair = random_pairs(3, 1, seed=6)[0]

    loaded = load_proof_pair(dump_proof_pair(pair))

    assert np.allclose(loaded.w1.amplitudes, pair.w1.amplitudes)
    assert np.allclose(loaded.w2.amplitudes, pair.w2.amplitudes)


@mark.parametrize(
    "text",
    [
        "not json",
        '{"shape": [1, 3], "w1": [[1, 0], [0, 0], [0, 0]]}',
        '{"shape": [1, 2], "w1": [[1, 0], [0, 0]], "w2": [[1, 0], [0, 0]]}',
        '{"shape": [1, 3], "w1": [[1, 0], [1, 0], [0, 0]], "w2": [[1, 0], [0, 0], [0, 0]]}',
    ],
)
def test_proof_pair_codec_errors(text: str):
    with raises(ProofFormatError):
        load_proof_pair(text)


def test_pair_helpers():
    pair = ProofPair(honest_register((0, 1)), uniform_state(register_shape_of(2)))

    assert pair.swapped().w1 is pair.w2
    assert pair.joint().shape.dims == (2, 3, 2, 3)
