from dataclasses import replace
from datetime import timedelta

import numpy as np
from pytest import mark, raises, fixture

from twinproof.adversary import *
from twinproof.errors import SizeCapError
from twinproof.graphs import Graph, Coloring, complete, is_valid_coloring, random_corpus
from twinproof.logging import Logger
from twinproof.protocol3col import (
    VerifierOperators, ProofPair, acceptance_operator, accept_probability, honest_proof,
    register_shape_of
)
from twinproof.qstate import Operator, StateVector
from twinproof.testing import case_of
from twinproof.tools import timed
from tests.mocks import triangle, k4, w5, basis_pair, triangle_coloring


@fixture(scope="module")
def k4_operators() -> VerifierOperators:
    return acceptance_operator(k4)


@fixture(scope="module")
def triangle_operators() -> VerifierOperators:
    return acceptance_operator(triangle)


test_soundness_threshold = case_of(
    (lambda: soundness_threshold(4), 1 - 1 / 98304),
    (lambda: soundness_threshold(1), 1 - 1 / 24),
)


def test_basis_attack_on_k4(k4_operators: VerifierOperators):
    value, pair = basis_attack(k4_operators)

    assert np.isclose(value, 41 / 48, atol=1e-12)
    assert np.allclose(pair.w1.amplitudes, basis_pair(4, (0, 0), (0, 0)).w1.amplitudes)
    assert np.allclose(pair.w2.amplitudes, pair.w1.amplitudes)


def test_coloring_family_attack():
    value, coloring = coloring_family_attack(triangle)

    assert np.isclose(value, 1)
    assert is_valid_coloring(triangle, coloring)

    value, _ = coloring_family_attack(k4)

    assert value < soundness_threshold(4)

    with raises(SizeCapError):
        coloring_family_attack(Graph(9))


def test_seesaw_is_reproducible(k4_operators: VerifierOperators):
    first = seesaw(k4_operators, restarts=3, seed=4)
    second = seesaw(k4_operators, restarts=3, seed=4)

    assert first.best_value == second.best_value
    assert first.iterations == second.iterations
    assert np.array_equal(first.best_pair.w1.amplitudes, second.best_pair.w1.amplitudes)


def test_seesaw_restart_bookkeeping(triangle_operators: VerifierOperators):
    result = seesaw(triangle_operators, restarts=10, seed=1)

    assert result.best_value <= result.spectral_upper_bound + 1e-9
    assert all(1 <= sweeps <= 500 for sweeps in result.iterations)
    assert result.restarts_used == 10
    assert len(result.iterations) == 10


def test_seesaw_stays_under_spectral_bound(k4_operators: VerifierOperators):
    result = seesaw(k4_operators, restarts=5, seed=2)

    assert result.best_value <= result.spectral_upper_bound + 1e-9
    assert np.isclose(result.best_value, accept_probability(k4_operators, result.best_pair))


def test_seesaw_warm_starts_do_not_lose_value(k4_operators: VerifierOperators):
    warm = basis_pair(4, (0, 0), (0, 0))
    logger = Logger()

    result = seesaw(k4_operators, restarts=1, seed=3, warm_starts=[warm], logger=logger)

    assert result.restarts_used == 2
    assert result.best_value >= 41 / 48 - 1e-12
    assert logger.logs


def test_seesaw_needs_restarts(k4_operators: VerifierOperators):
    with raises(ValueError):
        seesaw(k4_operators, restarts=0)


def test_spectral_bound_dominates_basis_values(k4_operators: VerifierOperators):
    bound = spectral_bound(k4_operators, rng=np.random.default_rng(0))

    assert bound >= np.max(np.diag(k4_operators.m_total.entries).real) - 1e-9
    assert bound <= 1 + 1e-9


@mark.parametrize("graph", [k4, w5])
def test_soundness_falsification(graph: Graph):
    report = attack_graph(graph, restarts=20, seed=7)

    assert not report.is_colorable
    assert report.verdict == "PASS"
    assert report.best_value <= report.threshold
    assert report.best_value >= report.basis_value


def test_attack_on_colorable_graph():
    report = attack_graph(triangle, restarts=5, seed=7)

    assert report.is_colorable
    assert report.verdict == "N/A"
    assert report.best_value >= 1 - 1e-6
    assert is_valid_coloring(triangle, report.coloring)


def test_attack_is_reproducible():
    first = attack_graph(k4, restarts=4, seed=11)
    second = attack_graph(k4, restarts=4, seed=11)

    assert first.best_value == second.best_value
    assert first.seesaw.iterations == second.seesaw.iterations


def test_extract_coloring():
    pair = honest_proof(complete(3), triangle_coloring)

    assert extract_coloring(pair) == triangle_coloring


def test_mixed_states_do_not_help(triangle_operators: VerifierOperators):
    check = mixed_product_check(
        triangle_operators,
        honest_proof(triangle, triangle_coloring),
        mixtures=5,
        seed=0,
    )

    assert check.is_dominated
    assert np.isclose(check.reference_value, 1)
    assert check.best_mixed_value <= 1 + 1e-9


def test_attack_result_codec(k4_operators: VerifierOperators):
    result = seesaw(k4_operators, restarts=2, seed=5)

    loaded = load_attack_result(dump_attack_result(result))

    assert loaded.best_value == result.best_value
    assert loaded.iterations == result.iterations
    assert loaded.seed == result.seed
    assert np.allclose(loaded.best_pair.w1.amplitudes, result.best_pair.w1.amplitudes)


def test_seesaw_finds_honest_optimum(triangle_operators: VerifierOperators):
    assert seesaw(triangle_operators, restarts=20, seed=0).best_value >= 1 - 1e-6


def test_seesaw_value_never_decreases(k4_operators: VerifierOperators):
    values = [
        seesaw(k4_operators, restarts=1, seed=6, max_sweeps=sweeps).best_value
        for sweeps in range(1, 16)
    ]

    assert all(later >= earlier - 1e-12 for earlier, later in zip(values, values[1:]))


def test_seesaw_on_identity(k4_operators: VerifierOperators):
    total = k4_operators.m_total
    operators = replace(
        k4_operators,
        m_total=Operator(total.shape, np.eye(total.dimension), povm=True),
    )

    result = seesaw(operators, restarts=3, seed=0)

    assert np.isclose(result.best_value, 1)
    assert result.iterations == (1, 1, 1)


def _single_node_pair(amplitudes: list) -> ProofPair:
    state = StateVector(register_shape_of(1), np.array(amplitudes, dtype=complex))

    return ProofPair(state, state)


test_extract_coloring_tie_break = case_of(
    (lambda: extract_coloring(_single_node_pair([0.6, 0.8, 0])), Coloring((1, ))),
    (lambda: extract_coloring(_single_node_pair([1 / np.sqrt(3)] * 3)), Coloring((0, ))),
    (lambda: extract_coloring(_single_node_pair([0, -0.8, 0.6])), Coloring((1, ))),
)


@mark.slow
def test_soundness_on_uncolorable_corpus():
    graphs = (k4, w5, *random_corpus(10, colorable=False, seed=3))

    reports, duration = timed(lambda: tuple(attack_graph(graph, restarts=200) for graph in graphs))

    assert all(graph.n <= 10 for graph in graphs)
    assert all(report.verdict == "PASS" for report in reports)
    assert all(report.best_value <= report.threshold for report in reports)
    assert duration < timedelta(minutes=5)
