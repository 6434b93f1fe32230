"""
Cheating provers: maximization of the verifier acceptance over unentangled
proofs, used to falsify the soundness bound on small graphs.
"""

import json
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional, Tuple, Literal

import numpy as np

from twinproof.annotations import pure, seeded
from twinproof.config import limits, defaults
from twinproof.errors import SizeCapError, ProofFormatError
from twinproof.graphs import Graph, Coloring, find_3coloring
from twinproof.logging import Logger, logger_or_silent
from twinproof.protocol3col import (
    ProofPair, VerifierOperators, register_shape_of, coloring_proof,
    acceptance_operator, accept_probability, mixed_accept_probability,
    dump_proof_pair, load_proof_pair
)
from twinproof.qstate import (
    StateVector, Operator, basis_state, random_state, effective_operator,
    top_eigenpair, dense_top_eigenpair, projector, seed_streams
)


__all__ = (
    "AttackResult",
    "MixedProductCheck",
    "SoundnessReport",
    "soundness_threshold",
    "seesaw",
    "spectral_bound",
    "basis_attack",
    "coloring_family_attack",
    "extract_coloring",
    "mixed_product_check",
    "attack_graph",
    "dump_attack_result",
    "load_attack_result",
)


@dataclass(frozen=True)
class AttackResult:
    """
    Outcome of a seesaw run.

    `iterations` holds the sweep count of every restart in run order, warm
    starts last.
    """

    best_value: float
    best_pair: ProofPair
    restarts_used: int
    iterations: Tuple[int, ...]
    spectral_upper_bound: float
    seed: int


@dataclass(frozen=True)
class MixedProductCheck:
    mixtures: int
    components: int
    best_mixed_value: float
    reference_value: float
    is_dominated: bool


@dataclass(frozen=True)
class SoundnessReport:
    """Combined result of every attack on one graph."""

    n: int
    is_colorable: bool
    seesaw: AttackResult
    basis_value: float
    basis_pair: ProofPair
    coloring_value: Optional[float]
    coloring: Optional[Coloring]
    spectral_bound: float
    best_value: float
    best_pair: ProofPair
    threshold: float
    verdict: Literal["PASS", "FAIL", "N/A"]


@pure
def soundness_threshold(n: int) -> float:
    """Function to get `1 - 1 / (24 n^6)`, the acceptance cheaters must stay under."""

    return 1 - 1 / (24 * n ** 6)


@seeded
def spectral_bound(
    operators: VerifierOperators,
    *,
    rng: Optional[np.random.Generator] = None,
    logger: Optional[Logger] = None,
) -> float:
    """
    Function to get the largest eigenvalue of the total acceptance, an upper
    bound on every proof including entangled ones.
    """

    return top_eigenpair(operators.m_total, rng=rng, logger=logger)[0]


def _half_step(
    operators: VerifierOperators,
    fixed: StateVector,
    position: int,
) -> Tuple[float, StateVector]:
    return dense_top_eigenpair(effective_operator(operators.m_total, fixed, position=position))


def _climb(
    operators: VerifierOperators,
    pair: ProofPair,
    tolerance: float,
    max_sweeps: int,
) -> Tuple[float, ProofPair, int]:
    w1, w2 = pair.w1, pair.w2
    value = accept_probability(operators, pair)
    sweeps = 0

    for sweeps in range(1, max_sweeps + 1):
        previous_value = value
        candidate_value, candidate = _half_step(operators, w2, 1)

        if candidate_value >= value:
            value, w1 = candidate_value, candidate

        candidate_value, candidate = _half_step(operators, w1, 0)

        if candidate_value >= value:
            value, w2 = candidate_value, candidate

        if value - previous_value < tolerance:
            break

    pair = ProofPair(w1, w2)

    return accept_probability(operators, pair), pair, sweeps


@seeded
def seesaw(
    operators: VerifierOperators,
    restarts: int = defaults.seesaw_restarts,
    tolerance: float = defaults.seesaw_gain,
    seed: int = defaults.seed,
    *,
    warm_starts: Iterable[ProofPair] = tuple(),
    max_sweeps: int = defaults.seesaw_max_sweeps,
    logger: Optional[Logger] = None,
) -> AttackResult:
    """
    Function to maximize acceptance over product proofs by alternating
    maximization.

    Each restart draws both registers from the Haar measure on its own seed
    substream, then alternately replaces one register by the top eigenvector
    of the total acceptance contracted against the other, until a sweep gains
    less than `tolerance` or `max_sweeps` run out. `warm_starts` are climbed
    after the random restarts. The best pair over all runs is kept.
    """

    if restarts < 1:
        raise ValueError(f"seesaw needs at least one restart, got {restarts}")

    logger = logger_or_silent(logger)
    warm_starts = tuple(warm_starts)
    streams = seed_streams(seed, restarts + len(warm_starts) + 1)
    shape = register_shape_of(operators.n)

    best_value = -np.inf
    best_pair: Optional[ProofPair] = None
    iterations = list()

    for restart, rng in enumerate(streams[:-1]):
        start = (
            ProofPair(random_state(shape, rng), random_state(shape, rng))
            if restart < restarts
            else warm_starts[restart - restarts]
        )
        value, pair, sweeps = _climb(operators, start, tolerance, max_sweeps)
        iterations.append(sweeps)

        if value > best_value:
            logger(f"seesaw restart {restart}: value {value:.12f} after {sweeps} sweeps")
            best_value, best_pair = value, pair

    return AttackResult(
        best_value=best_value,
        best_pair=best_pair,
        restarts_used=len(iterations),
        iterations=tuple(iterations),
        spectral_upper_bound=spectral_bound(operators, rng=streams[-1], logger=logger),
        seed=seed,
    )


@pure
def basis_attack(operators: VerifierOperators) -> Tuple[float, ProofPair]:
    """
    Function to get the best computational-basis product proof `|x> ⊗ |y>`
    by enumerating all `(3n)^2` pairs, the first one in index order on ties.
    """

    if operators.n > limits.oracle_node_cap:
        raise SizeCapError(
            f"basis enumeration is capped at {limits.oracle_node_cap} nodes, got {operators.n}"
        )

    shape = register_shape_of(operators.n)
    values = np.diag(operators.m_total.entries).real
    best = int(np.argmax(values))
    first, second = divmod(best, shape.dimension)

    return float(values[best]), ProofPair(basis_state(shape, first), basis_state(shape, second))


@pure
def coloring_family_attack(
    graph: Graph,
    operators: Optional[VerifierOperators] = None,
    *,
    cap: int = limits.coloring_family_node_cap,
) -> Tuple[float, Coloring]:
    """
    Function to get the best honest-form proof
    `n^(-1/2) sum_i |i>|C(i)>` over all `3^n` colorings, valid or not.
    The lexicographically first coloring wins ties.
    """

    if graph.n > cap:
        raise SizeCapError(f"coloring family is capped at {cap} nodes, got {graph.n}")

    operators = acceptance_operator(graph) if operators is None else operators
    best_value = -np.inf
    best_coloring = None

    for colors in product(range(3), repeat=graph.n):
        coloring = Coloring(colors)
        value = accept_probability(operators, coloring_proof(coloring))

        if value > best_value:
            best_value, best_coloring = value, coloring

    return best_value, best_coloring


@pure
def extract_coloring(pair: ProofPair) -> Coloring:
    """
    Function to read the coloring `C(i) = argmax_j |b_ij|` off the first
    register, the smallest color on ties.
    """

    return Coloring(tuple(np.argmax(np.abs(pair.w1.tensor_view()), axis=1)))


def _mixture_of(states: Tuple[StateVector, ...], weights: np.ndarray) -> Operator:
    return Operator(
        states[0].shape,
        sum(weight * projector(state).entries for weight, state in zip(weights, states)),
        povm=True,
    )


@seeded
def mixed_product_check(
    operators: VerifierOperators,
    reference: ProofPair,
    *,
    mixtures: int = defaults.mixed_check_mixtures,
    components: int = defaults.mixed_check_components,
    seed: int = defaults.seed,
) -> MixedProductCheck:
    """
    Function to check that unentangled mixed proofs `rho1 ⊗ rho2` do not beat
    a pure product proof.

    Each mixture weighs the reference pair against `components - 1` Haar
    random pairs with Dirichlet weights. Acceptance is linear in each density,
    so a mixture never exceeds its best pure component.
    """

    shape = register_shape_of(operators.n)
    reference_value = accept_probability(operators, reference)
    best_mixed_value = -np.inf

    for rng in seed_streams(seed, mixtures):
        firsts = (reference.w1, *(random_state(shape, rng) for _ in range(components - 1)))
        seconds = (reference.w2, *(random_state(shape, rng) for _ in range(components - 1)))
        value = mixed_accept_probability(
            operators,
            _mixture_of(firsts, rng.dirichlet(np.ones(components))),
            _mixture_of(seconds, rng.dirichlet(np.ones(components))),
        )
        best_mixed_value = max(best_mixed_value, value)

    return MixedProductCheck(
        mixtures=mixtures,
        components=components,
        best_mixed_value=best_mixed_value,
        reference_value=reference_value,
        is_dominated=best_mixed_value <= reference_value + limits.state_tolerance,
    )


@seeded
def attack_graph(
    graph: Graph,
    restarts: int = defaults.seesaw_restarts,
    seed: int = defaults.seed,
    *,
    operators: Optional[VerifierOperators] = None,
    logger: Optional[Logger] = None,
) -> SoundnessReport:
    """
    Function to run every attack on a graph and compare the best acceptance
    with `1 - 1 / (24 n^6)`.

    The basis and coloring family winners warm-start the seesaw. Colorable
    graphs get the `N/A` verdict, others `PASS` when every attack stays at or
    under the threshold.
    """

    operators = acceptance_operator(graph) if operators is None else operators
    basis_value, basis_pair = basis_attack(operators)
    warm_starts = [basis_pair]
    coloring_value = coloring = None

    if graph.n <= limits.coloring_family_node_cap:
        coloring_value, coloring = coloring_family_attack(graph, operators)
        warm_starts.append(coloring_proof(coloring))

    result = seesaw(operators, restarts, seed=seed, warm_starts=warm_starts, logger=logger)
    best_value, best_pair = max(
        (
            (result.best_value, result.best_pair),
            (basis_value, basis_pair),
            *(
                ((coloring_value, coloring_proof(coloring)), )
                if coloring is not None
                else tuple()
            ),
        ),
        key=lambda candidate: candidate[0],
    )

    is_colorable = find_3coloring(graph) is not None
    threshold = soundness_threshold(graph.n)

    if is_colorable:
        verdict = "N/A"
    else:
        verdict = "PASS" if best_value <= threshold else "FAIL"

    return SoundnessReport(
        n=graph.n,
        is_colorable=is_colorable,
        seesaw=result,
        basis_value=basis_value,
        basis_pair=basis_pair,
        coloring_value=coloring_value,
        coloring=coloring,
        spectral_bound=result.spectral_upper_bound,
        best_value=best_value,
        best_pair=best_pair,
        threshold=threshold,
        verdict=verdict,
    )


def dump_attack_result(result: AttackResult) -> str:
    """Function to write a seesaw result as JSON, the pair in proof pair format."""

    return json.dumps({
        "best_value": result.best_value,
        "spectral_upper_bound": result.spectral_upper_bound,
        "restarts_used": result.restarts_used,
        "iterations": list(result.iterations),
        "seed": result.seed,
        "best_pair": json.loads(dump_proof_pair(result.best_pair)),
    }, sort_keys=True)


def load_attack_result(text: str) -> AttackResult:
    try:
        document = json.loads(text)

        return AttackResult(
            best_value=float(document["best_value"]),
            best_pair=load_proof_pair(json.dumps(document["best_pair"])),
            restarts_used=int(document["restarts_used"]),
            iterations=tuple(map(int, document["iterations"])),
            spectral_upper_bound=float(document["spectral_upper_bound"]),
            seed=int(document["seed"]),
        )
    except (ValueError, KeyError, TypeError) as error:
        if isinstance(error, ProofFormatError):
            raise

        raise ProofFormatError(f"malformed attack result: {error}") from None
