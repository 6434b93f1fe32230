"""
Verifier of the two-register 3-coloring protocol.

Each register lives in `C^n ⊗ C^3` (node part, color part). The verifier
picks one of three tests uniformly:

1. swap test between the registers;
2. computational-basis measurement of both registers, rejecting equal nodes
   with different colors and adjacent nodes with equal colors;
3. Fourier-basis measurement of each register, rejecting when the color part
   gives `F_3|0>` while the node part does not give `F_n|0>`.
"""

import json
from dataclasses import dataclass
from math import sqrt
from typing import Tuple, Optional, Literal, Self

import numpy as np

from twinproof.annotations import pure, seeded, probability
from twinproof.config import limits
from twinproof.errors import (
    ColoringError, ShapeMismatchError, SizeCapError, ProofFormatError
)
from twinproof.graphs import Graph, Coloring, is_valid_coloring
from twinproof.qstate import (
    RegisterShape, StateVector, Operator, OutcomeDistribution, tensor,
    dft_matrix, swap_operator, expectation, density_expectation, inner,
    measure_distribution, sample_many, l1_distance
)


__all__ = (
    "ProofPair",
    "VerifierOperators",
    "ProtocolTranscript",
    "LemmaStatistics",
    "TestFailures",
    "ACCEPT",
    "REJECT",
    "register_shape_of",
    "coloring_proof",
    "honest_proof",
    "build_test1",
    "build_test2",
    "build_test2_part_a",
    "build_test2_part_b",
    "register_test3",
    "build_test3",
    "acceptance_operator",
    "accept_probability",
    "mixed_accept_probability",
    "test_failures",
    "swap_test_acceptance",
    "run_protocol",
    "lemma_statistics",
    "dump_proof_pair",
    "load_proof_pair",
)


ACCEPT: Literal["accept"] = "accept"
REJECT: Literal["reject"] = "reject"


def register_shape_of(n: int) -> RegisterShape:
    """Function to get the node⊗color shape `[n, 3]` of one register."""

    return RegisterShape((n, 3))


@dataclass(frozen=True)
class ProofPair:
    """Unentangled proof `|w1> ⊗ |w2>`, each register of shape `[n, 3]`."""

    w1: StateVector
    w2: StateVector

    def __post_init__(self) -> None:
        for register in (self.w1, self.w2):
            if len(register.shape.dims) != 2 or register.shape.dims[1] != 3:
                raise ShapeMismatchError(f"register of {register.shape} is not [n, 3]")

        if self.w1.shape != self.w2.shape:
            raise ShapeMismatchError(
                f"registers of {self.w1.shape} and {self.w2.shape} differ"
            )

    @property
    def n(self) -> int:
        return self.w1.shape.dims[0]

    def swapped(self) -> Self:
        return type(self)(self.w2, self.w1)

    def joint(self) -> StateVector:
        return tensor(self.w1, self.w2)


@dataclass(frozen=True)
class VerifierOperators:
    """Acceptance POVM elements of the three tests and of the whole verifier."""

    n: int
    m_swap: Operator
    m_test2: Operator
    m_test3: Operator
    m_total: Operator


@dataclass(frozen=True)
class ProtocolTranscript:
    """
    Audit trail of one sampled run.

    `outcomes` holds the swap-test ancilla bit for test 1, the two basis
    indices for test 2 and the two Fourier outcomes for test 3.
    """

    test: int
    outcomes: Tuple[int, ...]
    verdict: Literal["accept", "reject"]


@dataclass(frozen=True)
class TestFailures:
    test1: float
    test2: float
    test3: float

    __test__ = False


@pure
def coloring_proof(coloring: Coloring) -> ProofPair:
    """
    Function to get the honest-form proof `w1 = w2 = n^(-1/2) sum_i |i>|C(i)>`
    of any coloring, valid or not.
    """

    n = len(coloring)
    shape = register_shape_of(n)
    amplitudes = np.zeros(shape.dimension, dtype=complex)
    amplitudes[3 * np.arange(n) + np.array(coloring.colors)] = 1 / sqrt(n)
    state = StateVector(shape, amplitudes)

    return ProofPair(state, state)


@pure
def honest_proof(graph: Graph, coloring: Coloring) -> ProofPair:
    """Function to get the honest proof of a valid coloring of a graph."""

    if not is_valid_coloring(graph, coloring):
        raise ColoringError(f"{coloring.colors} is not a valid coloring")

    return coloring_proof(coloring)


def _pair_shape_of(n: int) -> RegisterShape:
    return RegisterShape((n, 3, n, 3))


@pure
def build_test1(n: int) -> Operator:
    """Function to get the swap-test acceptance `(I + S) / 2` on both registers."""

    dimension = 3 * n
    swap = swap_operator(dimension).entries

    return Operator._trusted(
        _pair_shape_of(n),
        (np.eye(dimension ** 2) + swap) / 2,
        povm=True,
    )


def _node_and_color_of(n: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.divmod(np.arange(3 * n), 3)


def _diagonal_projector_of(n: int, selected: np.ndarray) -> Operator:
    return Operator._trusted(
        _pair_shape_of(n),
        np.diag(selected.reshape(-1).astype(complex)),
        povm=True,
    )


def _same_node_color_split(n: int) -> np.ndarray:
    nodes, colors = _node_and_color_of(n)

    return (nodes[:, None] == nodes[None, :]) & (colors[:, None] != colors[None, :])


def _monochromatic_edges(graph: Graph) -> np.ndarray:
    nodes, colors = _node_and_color_of(graph.n)
    adjacency = np.zeros((graph.n, graph.n), dtype=bool)

    for u, v in graph.edges:
        adjacency[u, v] = adjacency[v, u] = True

    return adjacency[nodes[:, None], nodes[None, :]] & (colors[:, None] == colors[None, :])


@pure
def build_test2_part_a(n: int) -> Operator:
    """
    Function to get the failure projector of the same-node rule: basis pairs
    `((i, c), (i, c'))` with `c != c'`.
    """

    return _diagonal_projector_of(n, _same_node_color_split(n))


@pure
def build_test2_part_b(graph: Graph) -> Operator:
    """
    Function to get the failure projector of the edge rule: basis pairs
    `((i, c), (i', c))` with `(i, i')` an edge.
    """

    return _diagonal_projector_of(graph.n, _monochromatic_edges(graph))


@pure
def build_test2(graph: Graph) -> Operator:
    """
    Function to get the diagonal projector accepting basis pairs
    `((i, c), (i', c'))` unless `i = i'` with `c != c'` or `(i, i')` is an
    edge with `c = c'`.

    Non-adjacent distinct nodes are accepted whatever their colors.
    """

    return _diagonal_projector_of(
        graph.n,
        ~(_same_node_color_split(graph.n) | _monochromatic_edges(graph)),
    )


def _fourier_zero_projector(dimension: int) -> np.ndarray:
    zero = dft_matrix(dimension).entries[:, 0]

    return np.outer(zero, zero.conj())


def register_test3(n: int) -> Operator:
    """
    Function to get the one-register Fourier acceptance
    `A = I - (I - P_node0) ⊗ P_color0`.
    """

    rejection = np.kron(
        np.eye(n) - _fourier_zero_projector(n),
        _fourier_zero_projector(3),
    )

    return Operator._trusted(register_shape_of(n), np.eye(3 * n) - rejection, povm=True)


@pure
def build_test3(n: int) -> Operator:
    """Function to get `A ⊗ A`: both registers must pass the Fourier check."""

    single = register_test3(n)

    return Operator._trusted(
        _pair_shape_of(n),
        np.kron(single.entries, single.entries),
        povm=True,
    )


@pure
def acceptance_operator(
    graph: Graph,
    *,
    cap: int = limits.operator_node_cap,
) -> VerifierOperators:
    """
    Function to build the three test operators of a graph and their uniform
    mixture, checking that the mixture is a POVM element.
    """

    if graph.n > cap:
        raise SizeCapError(f"verifier operators are capped at {cap} nodes, got {graph.n}")

    m_swap = build_test1(graph.n)
    m_test2 = build_test2(graph)
    m_test3 = build_test3(graph.n)
    m_total = Operator(
        _pair_shape_of(graph.n),
        (m_swap.entries + m_test2.entries + m_test3.entries) / 3,
        povm=True,
    )

    return VerifierOperators(graph.n, m_swap, m_test2, m_test3, m_total)


def _check_pair_fits(operators: VerifierOperators, pair: ProofPair) -> None:
    if pair.n != operators.n:
        raise ShapeMismatchError(
            f"proof on {pair.n} nodes for a verifier on {operators.n} nodes"
        )


@pure
def accept_probability(operators: VerifierOperators, pair: ProofPair) -> probability:
    _check_pair_fits(operators, pair)

    return expectation(operators.m_total, pair.joint())


@pure
def mixed_accept_probability(
    operators: VerifierOperators,
    first_density: Operator,
    second_density: Operator,
) -> probability:
    """Function to get the acceptance of an unentangled mixed proof `rho1 ⊗ rho2`."""

    return density_expectation(operators.m_total, tensor(first_density, second_density))


@pure
def test_failures(operators: VerifierOperators, pair: ProofPair) -> TestFailures:
    _check_pair_fits(operators, pair)
    joint = pair.joint()

    return TestFailures(
        1 - expectation(operators.m_swap, joint),
        1 - expectation(operators.m_test2, joint),
        1 - expectation(operators.m_test3, joint),
    )


test_failures.__test__ = False


@pure
def swap_test_acceptance(pair: ProofPair) -> float:
    """Function to get the analytic swap-test acceptance `1/2 + |<w1|w2>|^2 / 2`."""

    return 0.5 + abs(inner(pair.w1, pair.w2)) ** 2 / 2


def _fourier_basis_of(n: int) -> Operator:
    return tensor(dft_matrix(n), dft_matrix(3))


@seeded
def run_protocol(
    operators: VerifierOperators,
    pair: ProofPair,
    trials: int,
    seed: int | np.random.SeedSequence,
) -> Tuple[int, Tuple[ProtocolTranscript, ...]]:
    """
    Function to execute the verifier `trials` times by sampling measurement
    outcomes.

    Test 1 accepts with the analytic swap-test probability, tests 2 and 3
    sample basis outcomes of both registers. Draws happen per test in bulk
    and in a fixed order, so a seed fixes every transcript.
    """

    _check_pair_fits(operators, pair)

    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")

    rng = np.random.default_rng(seed)
    tests = rng.integers(1, 4, size=trials)
    outcomes = np.zeros((trials, 2), dtype=int)
    verdicts = np.zeros(trials, dtype=bool)

    first_test = tests == 1
    swap_acceptance = min(1.0, swap_test_acceptance(pair))

    if 1 - swap_acceptance < limits.hermitian_tolerance:
        swap_acceptance = 1.0

    ancilla_bits = (rng.random(first_test.sum()) >= swap_acceptance).astype(int)
    outcomes[first_test, 0] = ancilla_bits
    verdicts[first_test] = ancilla_bits == 0

    second_test = tests == 2
    count = int(second_test.sum())
    first_indices = sample_many(measure_distribution(pair.w1), count, rng)
    second_indices = sample_many(measure_distribution(pair.w2), count, rng)
    accepted_pairs = np.diag(operators.m_test2.entries).real > 0.5
    outcomes[second_test, 0] = first_indices
    outcomes[second_test, 1] = second_indices
    verdicts[second_test] = accepted_pairs[first_indices * 3 * pair.n + second_indices]

    third_test = tests == 3
    count = int(third_test.sum())
    basis = _fourier_basis_of(pair.n)
    passes = np.ones(count, dtype=bool)

    for column, register in enumerate((pair.w1, pair.w2)):
        fourier_outcomes = sample_many(measure_distribution(register, basis), count, rng)
        node_outcomes, color_outcomes = np.divmod(fourier_outcomes, 3)
        outcomes[third_test, column] = fourier_outcomes
        passes &= ~((color_outcomes == 0) & (node_outcomes != 0))

    verdicts[third_test] = passes

    transcripts = tuple(
        ProtocolTranscript(
            int(test),
            (int(outcome[0]), ) if test == 1 else (int(outcome[0]), int(outcome[1])),
            ACCEPT if verdict else REJECT,
        )
        for test, outcome, verdict in zip(tests, outcomes, verdicts)
    )

    return int(verdicts.sum()), transcripts


@dataclass(frozen=True)
class LemmaStatistics:
    """
    Quantities the soundness lemmas bound, for one proof pair.

    Arrays indexed by register are stacked as `[w1, w2]`. Nodes without mass
    report color concentration 0; registers without Fourier color-0 mass
    report no post-selected node distribution.
    """

    n: int
    joint_distributions: Tuple[OutcomeDistribution, OutcomeDistribution]
    node_masses: np.ndarray
    color_concentrations: np.ndarray
    fourier_color0_masses: np.ndarray
    postselected_node_distributions: Tuple[Optional[OutcomeDistribution], ...]
    node_distances_from_uniform: Tuple[Optional[float], ...]
    node_fourier_failures: Tuple[float, ...]
    amplitude_gap: float
    overlap: float
    test1_failure: float
    test2a_failure: float
    test3_failure: float


def _register_statistics(state: StateVector) -> tuple:
    n = state.shape.dims[0]
    amplitudes = state.tensor_view()
    joint = measure_distribution(state)
    by_node = joint.probabilities.reshape(n, 3)
    node_masses = by_node.sum(axis=1)
    concentrations = np.divide(
        by_node.max(axis=1),
        node_masses,
        out=np.zeros(n),
        where=node_masses > 0,
    )

    projected = amplitudes.sum(axis=1) / sqrt(3)
    color0_mass = float(np.vdot(projected, projected).real)

    if color0_mass <= limits.numerical_zero:
        return joint, node_masses, concentrations, color0_mass, None, None, 0.0

    node_state = projected / sqrt(color0_mass)
    postselected = OutcomeDistribution(np.abs(node_state) ** 2)
    uniform = OutcomeDistribution(np.full(n, 1 / n))
    fourier_failure = max(0.0, 1 - abs(node_state.sum()) ** 2 / n)

    return (
        joint,
        node_masses,
        concentrations,
        color0_mass,
        postselected,
        l1_distance(postselected, uniform),
        fourier_failure,
    )


@pure
def lemma_statistics(pair: ProofPair) -> LemmaStatistics:
    """
    Function to extract the quantities bounded by the soundness lemmas:
    computational distributions, per-node color concentration
    `max_j |b_ij|^2`, Fourier color-0 mass, the node distribution left after
    post-selecting color `F_3|0>` and its distance from uniform, node masses
    `|a_i|^2` and the per-test failure probabilities that do not depend on the
    graph.
    """

    first, second = map(_register_statistics, (pair.w1, pair.w2))
    p = first[0].probabilities.reshape(pair.n, 3)
    q = second[0].probabilities.reshape(pair.n, 3)
    overlap = abs(inner(pair.w1, pair.w2)) ** 2
    same_node = float(np.sum(p.sum(axis=1) * q.sum(axis=1)))
    color_rejections = tuple(
        statistics[3] * statistics[6] for statistics in (first, second)
    )

    return LemmaStatistics(
        n=pair.n,
        joint_distributions=(first[0], second[0]),
        node_masses=np.stack((first[1], second[1])),
        color_concentrations=np.stack((first[2], second[2])),
        fourier_color0_masses=np.array((first[3], second[3])),
        postselected_node_distributions=(first[4], second[4]),
        node_distances_from_uniform=(first[5], second[5]),
        node_fourier_failures=(first[6], second[6]),
        amplitude_gap=float(np.max(np.abs(np.sqrt(p) - np.sqrt(q)))),
        overlap=overlap,
        test1_failure=(1 - overlap) / 2,
        test2a_failure=max(0.0, same_node - float(np.sum(p * q))),
        test3_failure=1 - (1 - color_rejections[0]) * (1 - color_rejections[1]),
    )


def _amplitudes_to_json(state: StateVector) -> list:
    return [[float(a.real), float(a.imag)] for a in state.amplitudes]


def dump_proof_pair(pair: ProofPair) -> str:
    """Function to write a proof pair as JSON with `[re, im]` amplitude pairs."""

    return json.dumps({
        "shape": list(pair.w1.shape.dims),
        "w1": _amplitudes_to_json(pair.w1),
        "w2": _amplitudes_to_json(pair.w2),
    })


def load_proof_pair(text: str) -> ProofPair:
    try:
        document = json.loads(text)
        shape = RegisterShape(tuple(document["shape"]))

        return ProofPair(*(
            StateVector(shape, [complex(re, im) for re, im in document[key]])
            for key in ("w1", "w2")
        ))
    except (ValueError, KeyError, TypeError) as error:
        raise ProofFormatError(f"malformed proof pair: {error}") from None
