import json
from decimal import Decimal

import numpy as np
from pytest import mark, raises, fixture

from twinproof.certificates import *
from twinproof.circuits import VerifierParams, compile_verifier
from twinproof.errors import CertificateError, CertificateFormatError, PrecisionError
from twinproof.graphs import Graph, petersen
from twinproof.logging import Logger
from twinproof.protocol3col import (
    ACCEPT, REJECT, acceptance_operator, honest_proof, mixed_accept_probability, register_shape_of
)
from twinproof.qstate import Operator
from twinproof.testing import case_of
from tests.mocks import triangle, k4, edgeless_pair, basis_pair, triangle_coloring


@fixture(scope="module")
def honest_certificate() -> Certificate:
    return certificate_from_pair(honest_proof(triangle, triangle_coloring), 38)


def _decimal_rows(matrix) -> tuple:
    return tuple(
        tuple((Decimal(str(float(entry.real))), Decimal(str(float(entry.imag)))) for entry in row)
        for row in np.asarray(matrix, dtype=complex)
    )


_pure_single_node = np.diag([1, 0, 0, 0])


test_precision_arithmetic = case_of(
    (lambda: decimal_digits_of(53), 16),
    (lambda: decimal_digits_of(38), 12),
    (lambda: decimal_digits_of(1), 1),
    (lambda: precision_budget(76, 16, 1 / (24 * 3 ** 6)), 38),
    (lambda: precision_budget(1, 1, 1, guard_bits=0), 2),
    (lambda: error_bound(4, 2, 10), 2 ** -6),
)


def test_precision_budget_needs_gap():
    with raises(ValueError):
        precision_budget(10, 4, 0)


def test_honest_certificate_is_accepted(honest_certificate: Certificate):
    logger = Logger()

    result = classical_verify(compile_verifier(triangle), honest_certificate, logger=logger)

    assert result.verdict == ACCEPT
    assert abs(result.computed_probability - 1) < 1e-9
    assert result.simulated_pairs == 1
    assert result.required_bits == 38
    assert result.effective_bits == 38
    assert result.error_bound <= result.gap / 3
    assert len(logger.logs) == 1


def test_cheating_certificate_is_rejected():
    certificate = certificate_from_pair(basis_pair(4, (0, 0), (0, 0)), 41)

    result = classical_verify(compile_verifier(k4), certificate)

    assert result.verdict == REJECT
    assert abs(result.computed_probability - 41 / 48) < result.gap / 3


def test_mixed_certificate_matches_operators():
    density = np.eye(6) / 6
    certificate = certificate_from_densities(density, density, 2, 40)
    operator = Operator(register_shape_of(2), density, povm=True)

    result = classical_verify(compile_verifier(edgeless_pair), certificate)

    assert result.simulated_pairs == 36
    assert abs(
        result.computed_probability
        - mixed_accept_probability(acceptance_operator(edgeless_pair), operator, operator)
    ) < result.gap / 3


@mark.parametrize("bits", [38, 60, 100])
def test_decision_is_stable_in_precision(bits: int):
    certificate = certificate_from_pair(honest_proof(triangle, triangle_coloring), bits)

    result = classical_verify(compile_verifier(triangle), certificate)

    assert result.verdict == ACCEPT
    assert result.effective_bits == min(bits, 53)


def test_certificate_below_budget():
    certificate = certificate_from_pair(honest_proof(triangle, triangle_coloring), 20)

    with raises(PrecisionError):
        classical_verify(compile_verifier(triangle), certificate)


def test_float_precision_cap():
    certificate = certificate_from_pair(honest_proof(triangle, triangle_coloring), 80)

    with raises(PrecisionError):
        classical_verify(compile_verifier(triangle), certificate, VerifierParams(gap=1e-12))


def test_certificate_for_another_circuit(honest_certificate: Certificate):
    with raises(CertificateError):
        classical_verify(compile_verifier(Graph(2, frozenset({(0, 1)}))), honest_certificate)


def test_certificate_text_roundtrip(honest_certificate: Certificate):
    text = dump_certificate(honest_certificate)
    document = json.loads(text)

    assert load_certificate(text) == honest_certificate
    assert dump_certificate(load_certificate(text)) == text
    assert document["dimension"] == 16
    assert len(document["rho1"][0][0][0].split(".")[1]) == decimal_digits_of(38) + 2


def test_truncated_entries(honest_certificate: Certificate):
    document = json.loads(dump_certificate(honest_certificate))
    document["rho1"][1][1] = ["0.0", "0.0"]

    with raises(PrecisionError):
        load_certificate(json.dumps(document))


@mark.parametrize(
    "change",
    [
        lambda document: document.update(dimension=8),
        lambda document: document.pop("rho2"),
        lambda document: document.update(bits=0),
        lambda document: document["rho1"].pop(),
        lambda document: document["rho1"][0].__setitem__(0, ["x", "0"]),
        lambda document: document["rho1"][0].__setitem__(0, [1, 0]),
    ],
)
def test_malformed_certificates(honest_certificate: Certificate, change):
    document = json.loads(dump_certificate(honest_certificate))
    change(document)

    with raises(CertificateFormatError):
        load_certificate(json.dumps(document))


def test_malformed_certificate_text():
    with raises(CertificateFormatError):
        load_certificate("not json")


@mark.parametrize(
    "density",
    [
        np.array([[1, 0.5, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]),
        np.diag([0.5, 0, 0, 0]),
        np.diag([1.5, -0.5, 0, 0]),
        np.diag([0, 0, 0, 1]),
    ],
)
def test_invalid_densities(density: np.ndarray):
    with raises(CertificateError):
        Certificate(20, 1, _decimal_rows(density), _decimal_rows(_pure_single_node))


def test_certificate_shapes():
    with raises(CertificateFormatError):
        Certificate(20, 1, _decimal_rows(np.eye(3) / 3), _decimal_rows(_pure_single_node))

    with raises(CertificateFormatError):
        Certificate(0, 1, _decimal_rows(_pure_single_node), _decimal_rows(_pure_single_node))

    with raises(CertificateFormatError):
        certificate_from_densities(np.eye(5) / 5, np.eye(5) / 5, 1, 20)


def test_padded_densities():
    certificate = certificate_from_densities(np.eye(3) / 3, np.eye(3) / 3, 1, 20)

    assert certificate.dimension == 4
    assert np.allclose(certificate.densities[0], np.diag([1, 1, 1, 0]) / 3, atol=1e-6)
    assert sum(certificate.rho1[index][index][0] for index in range(4)) == 1


def test_roundtrip_on_colorable_graphs():
    for graph in (triangle, petersen()):
        certificate = np_certificate_roundtrip(graph, restarts=2)

        assert certificate is not None
        assert certificate.nodes == graph.n


def test_roundtrip_on_uncolorable_graph():
    assert np_certificate_roundtrip(k4, restarts=3, seed=1) is None
