"""
Classical certificates of unentangled proofs: fixed-precision density
matrices of both registers, their decimal JSON format and the polynomial-time
classical verifier running them through the compiled circuit.
"""

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation, localcontext
from math import ceil, log2, log10
from typing import Iterable, Literal, Optional, Tuple

import numpy as np
from scipy.linalg import eigh

from twinproof.adversary import attack_graph
from twinproof.annotations import pure, seeded, bit_count
from twinproof.circuits import (
    Circuit, VerifierParams, compile_verifier, embed_dims, propagate, accept_mass,
    verifier_layout
)
from twinproof.config import limits, defaults
from twinproof.errors import (
    CertificateError, CertificateFormatError, PrecisionError, CircuitError, SizeCapError
)
from twinproof.graphs import Graph, find_3coloring
from twinproof.immutability import frozen_array
from twinproof.logging import Logger, logger_or_silent
from twinproof.protocol3col import ProofPair, ACCEPT, REJECT, honest_proof
from twinproof.qstate import Operator


__all__ = (
    "Certificate",
    "VerificationResult",
    "decimal_digits_of",
    "precision_budget",
    "error_bound",
    "certificate_from_densities",
    "certificate_from_pair",
    "dump_certificate",
    "load_certificate",
    "classical_verify",
    "np_certificate_roundtrip",
)


DecimalMatrix = Tuple[Tuple[Tuple[Decimal, Decimal], ...], ...]


@pure
def decimal_digits_of(bits: bit_count) -> int:
    """Function to get the fractional decimal digits `ceil(bits log10 2)` carrying `bits` binary digits."""

    return ceil(bits * log10(2))


def _slack_of(bits: int, dimension: int) -> float:
    return 2.0 ** -bits * dimension


def _matrix_of(entries: DecimalMatrix) -> np.ndarray:
    return np.array(
        [[complex(float(real), float(imaginary)) for real, imaginary in row] for row in entries],
        dtype=complex,
    )


@dataclass(frozen=True)
class Certificate:
    """
    Density matrices `rho1`, `rho2` of both proof registers embedded into
    `dimension = 2^k` qubit basis states, each entry a `(real, imaginary)`
    pair of decimals carrying at least `bits` binary digits.

    Construction checks that each matrix is Hermitian, has trace 1 and is
    positive semidefinite within `2^-bits * dimension`, and that it has no
    support on padding basis states `>= 3 * nodes`.
    """

    bits: int
    nodes: int
    rho1: DecimalMatrix
    rho2: DecimalMatrix
    densities: Tuple[np.ndarray, np.ndarray] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.bits < 1:
            raise CertificateFormatError(f"certificates need at least one bit, got {self.bits}")

        if self.nodes < 1:
            raise CertificateFormatError(f"certificates need at least one node, got {self.nodes}")

        for name, entries in (("rho1", self.rho1), ("rho2", self.rho2)):
            if len(entries) != self.dimension or any(len(row) != self.dimension for row in entries):
                raise CertificateFormatError(
                    f"{name} is not {self.dimension} x {self.dimension}"
                )

        object.__setattr__(self, "densities", (
            frozen_array(_matrix_of(self.rho1)),
            frozen_array(_matrix_of(self.rho2)),
        ))

        for name, entries, density in zip(("rho1", "rho2"), (self.rho1, self.rho2), self.densities):
            self._check_density(name, entries, density)

    @property
    def dimension(self) -> int:
        return 2 ** embed_dims(self.nodes)[0]

    @property
    def slack(self) -> float:
        return _slack_of(self.bits, self.dimension)

    @property
    def tolerance(self) -> float:
        """Slack of checks done in float arithmetic, never under the Hermitian tolerance."""

        return max(self.slack, limits.hermitian_tolerance)

    def _check_density(self, name: str, entries: DecimalMatrix, density: np.ndarray) -> None:
        asymmetry = float(np.max(np.abs(density - density.conj().T)))

        if asymmetry > self.tolerance:
            raise CertificateError(f"{name} deviates from its adjoint by {asymmetry}")

        with localcontext() as context:
            context.prec = decimal_digits_of(self.bits) + 20
            trace = sum(entries[index][index][0] for index in range(self.dimension))
            is_normalized = abs(trace - 1) <= Decimal(self.slack)

        if not is_normalized:
            raise CertificateError(f"{name} has trace {trace}")

        smallest = float(eigh((density + density.conj().T) / 2, eigvals_only=True)[0])

        if smallest < -self.tolerance:
            raise CertificateError(f"{name} has the negative eigenvalue {smallest}")

        padding = np.abs(density[3 * self.nodes:, :]).max(initial=0)
        padding = max(padding, np.abs(density[:, 3 * self.nodes:]).max(initial=0))

        if padding > self.tolerance:
            raise CertificateError(f"{name} has support {padding} on padding states")


@dataclass(frozen=True)
class VerificationResult:
    verdict: Literal["accept", "reject"]
    computed_probability: float
    threshold: float
    gap: float
    bits: int
    required_bits: int
    effective_bits: int
    error_bound: float
    simulated_pairs: int


@pure
def error_bound(gates: int, dimension: int, bits: int) -> float:
    """
    Function to get the first-order bound `gates * dimension^2 * 2^-bits`
    on the acceptance error of gate entries and certificate entries rounded
    to `bits` binary digits.
    """

    return gates * dimension ** 2 * 2.0 ** -bits


@pure
def precision_budget(
    gates: int,
    dimension: int,
    gap: float,
    *,
    guard_bits: int = defaults.guard_bits,
) -> int:
    """
    Function to get the bit count `ceil(log2(3 gates dimension^2 / g)) + guard`
    keeping `error_bound` under `g / 3`.
    """

    if not 0 < gap <= 1:
        raise ValueError(f"gap must lie in (0, 1], got {gap}")

    return ceil(log2(3 * max(gates, 1) * dimension ** 2 / gap)) + guard_bits


def _quantized(value: float | Decimal, digits: int) -> Decimal:
    with localcontext() as context:
        context.prec = digits + 10

        return Decimal(value).quantize(Decimal(1).scaleb(-digits))


def _decimal_matrix_of(density: np.ndarray, digits: int) -> DecimalMatrix:
    """
    Function to round a density matrix to `digits` decimals, moving the
    rounding deficit of the trace onto its largest diagonal entry so the
    decimal trace is exactly 1.
    """

    rows = [
        [
            [_quantized(float(entry.real), digits), _quantized(float(entry.imag), digits)]
            for entry in row
        ]
        for row in density
    ]
    heaviest = int(np.argmax(density.diagonal().real))

    with localcontext() as context:
        context.prec = digits + 10
        deficit = 1 - sum(rows[index][index][0] for index in range(len(rows)))
        rows[heaviest][heaviest][0] += deficit

    return tuple(tuple(tuple(entry) for entry in row) for row in rows)


def _embedded_density_of(density: Operator | np.ndarray, nodes: int) -> np.ndarray:
    entries = np.asarray(density.entries if isinstance(density, Operator) else density, dtype=complex)
    dimension = 2 ** embed_dims(nodes)[0]

    if entries.shape == (3 * nodes, 3 * nodes):
        padded = np.zeros((dimension, dimension), dtype=complex)
        padded[:3 * nodes, :3 * nodes] = entries
        entries = padded

    if entries.shape != (dimension, dimension):
        raise CertificateFormatError(
            f"density of shape {entries.shape} fits neither {3 * nodes} nor {dimension} states"
        )

    return (entries + entries.conj().T) / 2


@pure
def certificate_from_densities(
    first_density: Operator | np.ndarray,
    second_density: Operator | np.ndarray,
    nodes: int,
    bits: bit_count,
) -> Certificate:
    """
    Function to write two density matrices at `bits` binary digits, padding
    `3n x 3n` matrices into the embedded space.

    Entries get two decimal digits beyond the declared precision.
    """

    digits = decimal_digits_of(bits) + 2

    return Certificate(
        bits,
        nodes,
        _decimal_matrix_of(_embedded_density_of(first_density, nodes), digits),
        _decimal_matrix_of(_embedded_density_of(second_density, nodes), digits),
    )


@pure
def certificate_from_pair(pair: ProofPair, bits: bit_count) -> Certificate:
    """Function to get the rank-one certificate of a pure proof pair."""

    return certificate_from_densities(
        np.outer(pair.w1.amplitudes, pair.w1.amplitudes.conj()),
        np.outer(pair.w2.amplitudes, pair.w2.amplitudes.conj()),
        pair.n,
        bits,
    )


def dump_certificate(certificate: Certificate) -> str:
    """
    Function to write a certificate as JSON with `bits`, `nodes`,
    `dimension` and both matrices as rows of `[real, imaginary]` decimal
    strings.
    """

    as_strings = lambda entries: [
        [[format(real, "f"), format(imaginary, "f")] for real, imaginary in row]
        for row in entries
    ]

    return json.dumps({
        "bits": certificate.bits,
        "nodes": certificate.nodes,
        "dimension": certificate.dimension,
        "rho1": as_strings(certificate.rho1),
        "rho2": as_strings(certificate.rho2),
    }, sort_keys=True)


def _parsed_entry(text: str, digits: int) -> Decimal:
    if not isinstance(text, str):
        raise CertificateFormatError(f"entry {text!r} is not a decimal string")

    try:
        value = Decimal(text)
    except InvalidOperation:
        raise CertificateFormatError(f"entry '{text}' is not a decimal") from None

    if not value.is_finite():
        raise CertificateFormatError(f"entry '{text}' is not finite")

    if -value.as_tuple().exponent < digits:
        raise PrecisionError(f"entry '{text}' has fewer than {digits} fractional digits")

    return value


def _parsed_matrix(rows: Iterable, digits: int) -> DecimalMatrix:
    try:
        return tuple(
            tuple(
                (_parsed_entry(real, digits), _parsed_entry(imaginary, digits))
                for real, imaginary in row
            )
            for row in rows
        )
    except (TypeError, ValueError) as error:
        if isinstance(error, CertificateError):
            raise

        raise CertificateFormatError(f"malformed matrix rows: {error}") from None


def load_certificate(text: str) -> Certificate:
    """
    Function to parse a certificate, rejecting with `PrecisionError` any
    entry written with fewer decimal digits than its declared bit count needs.
    """

    try:
        document = json.loads(text)
        bits, nodes, dimension = int(document["bits"]), int(document["nodes"]), int(document["dimension"])
        rows = document["rho1"], document["rho2"]
    except (ValueError, KeyError, TypeError) as error:
        raise CertificateFormatError(f"malformed certificate: {error}") from None

    if bits < 1:
        raise CertificateFormatError(f"certificates need at least one bit, got {bits}")

    digits = decimal_digits_of(bits)
    certificate = Certificate(bits, nodes, *(_parsed_matrix(matrix, digits) for matrix in rows))

    if certificate.dimension != dimension:
        raise CertificateFormatError(
            f"declared dimension {dimension} differs from {certificate.dimension} for {nodes} nodes"
        )

    return certificate


def _pure_ensemble_of(density: np.ndarray, slack: float) -> Tuple[np.ndarray, np.ndarray]:
    weights, vectors = eigh((density + density.conj().T) / 2)
    kept = weights > slack

    return weights[kept], vectors[:, kept].T


@pure
def classical_verify(
    circuit: Circuit,
    certificate: Certificate,
    params: VerifierParams = VerifierParams(),
    *,
    logger: Optional[Logger] = None,
) -> VerificationResult:
    """
    Function to decide a certificate classically by computing
    `Tr(Π_accept U (rho1 ⊗ rho2 ⊗ |0><0|) U†)`.

    Each density matrix is split into its spectral ensemble (eigenvalues
    under the certificate slack dropped) and the acceptance is the weighted
    sum of simulated pure product inputs. Accepts iff the value is larger
    than `1 - g/2`.

    Raises `PrecisionError` when the certificate carries fewer bits than the
    budget of the circuit, or when float arithmetic at
    `min(bits, 53)` digits cannot keep the error under `g/3`.
    """

    logger = logger_or_silent(logger)
    layout = verifier_layout(certificate.nodes)

    if circuit.num_qubits != layout.num_qubits:
        raise CertificateError(
            f"certificate on {certificate.nodes} nodes for a circuit on {circuit.num_qubits} qubits"
        )

    gap = params.gap_for(certificate.nodes)
    required_bits = precision_budget(len(circuit), certificate.dimension, gap)

    if certificate.bits < required_bits:
        raise PrecisionError(
            f"certificate carries {certificate.bits} bits, the circuit needs {required_bits}"
        )

    effective_bits = min(certificate.bits, limits.float_mantissa_bits)
    realized_error = error_bound(len(circuit), certificate.dimension, effective_bits)

    if realized_error > gap / 3:
        raise PrecisionError(
            f"float arithmetic error {realized_error} exceeds the precision {gap / 3}"
        )

    first_weights, first_vectors = _pure_ensemble_of(certificate.densities[0], certificate.tolerance)
    second_weights, second_vectors = _pure_ensemble_of(certificate.densities[1], certificate.tolerance)
    ancillas = np.zeros(2 ** layout.ancilla_count, dtype=complex)
    ancillas[0] = 1
    probability = 0.0

    for first_weight, first_vector in zip(first_weights, first_vectors):
        for second_weight, second_vector in zip(second_weights, second_vectors):
            amplitudes = np.kron(np.kron(first_vector, second_vector), ancillas)
            output = propagate(circuit, amplitudes, effective_bits)
            probability += first_weight * second_weight * accept_mass(circuit, output)

    simulated_pairs = len(first_weights) * len(second_weights)
    threshold = 1 - gap / 2
    verdict = ACCEPT if probability > threshold else REJECT

    logger(
        f"simulated {simulated_pairs} pure pairs at {effective_bits} bits:"
        f" {probability} against {threshold}, {verdict}"
    )

    return VerificationResult(
        verdict=verdict,
        computed_probability=float(probability),
        threshold=threshold,
        gap=gap,
        bits=certificate.bits,
        required_bits=required_bits,
        effective_bits=effective_bits,
        error_bound=realized_error,
        simulated_pairs=simulated_pairs,
    )


@seeded
def np_certificate_roundtrip(
    graph: Graph,
    params: VerifierParams = VerifierParams(),
    *,
    restarts: int = defaults.seesaw_restarts,
    seed: int = defaults.seed,
    cap: int = limits.operator_node_cap,
    logger: Optional[Logger] = None,
) -> Optional[Certificate]:
    """
    Function to run the classical certificate pipeline on a graph.

    A 3-colorable graph gets the honest certificate at the precision budget,
    written out, parsed back and accepted. For an uncolorable graph the best
    pair found by every attack is certified the same way and must be
    rejected; `None` is returned then.
    """

    logger = logger_or_silent(logger)

    if graph.n > cap:
        raise SizeCapError(f"certificate pipeline is capped at {cap} nodes, got {graph.n}")

    circuit = compile_verifier(graph, params)
    bits = precision_budget(
        len(circuit),
        2 ** embed_dims(graph.n)[0],
        params.gap_for(graph.n),
    )
    coloring = find_3coloring(graph)

    if coloring is not None:
        pair = honest_proof(graph, coloring)
    else:
        pair = attack_graph(graph, restarts, seed, logger=logger).best_pair

    certificate = load_certificate(dump_certificate(certificate_from_pair(pair, bits)))
    result = classical_verify(circuit, certificate, params, logger=logger)

    if coloring is not None and result.verdict != ACCEPT:
        raise CircuitError(
            f"honest certificate rejected with {result.computed_probability}"
        )

    if coloring is None and result.verdict != REJECT:
        raise CircuitError(
            f"cheating certificate accepted with {result.computed_probability}"
        )

    return certificate if coloring is not None else None
