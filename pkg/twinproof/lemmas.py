"""
Numerical instantiations of the soundness lemmas.

Every check draws constructed and seeded random proof pairs, keeps the ones
meeting the lemma hypothesis and compares the measured quantity with the
lemma bound. Lemmas stated as implications about passing provers are checked
contrapositively: a pair violating the conclusion must fail some test with the
stated probability.
"""

from dataclasses import dataclass
from math import sqrt, log10
from typing import Callable, Iterable, Literal, Optional, Tuple

import numpy as np

from twinproof.annotations import pure, seeded
from twinproof.config import defaults
from twinproof.errors import GraphParameterError
from twinproof.protocol3col import (
    ProofPair, LemmaStatistics, lemma_statistics, register_shape_of
)
from twinproof.qstate import StateVector, random_state, seed_streams


__all__ = (
    "LemmaCheck",
    "COLOR_CONCENTRATION",
    "color_mass_constant",
    "check_distribution_distance",
    "check_well_defined_color",
    "check_fourier_color_mass",
    "check_fourier_index",
    "check_node_mass",
    "run_lemma_suite",
)


COLOR_CONCENTRATION = 0.99


@dataclass(frozen=True)
class LemmaCheck:
    """
    Result of one lemma instantiation.

    `worst` is the smallest measured value over the `applicable` instances,
    `None` when no instance met the hypothesis. `stated_bound` is set when
    the lemma is stated with a looser constant than the asserted one.
    """

    name: str
    bound: float
    worst: Optional[float]
    instances: int
    applicable: int
    status: Literal["PASS", "FAIL", "SKIP"]
    stated_bound: Optional[float] = None
    stated_bound_violations: int = 0


@pure
def color_mass_constant(concentration: float = COLOR_CONCENTRATION) -> float:
    """
    Function to get the least Fourier color-0 mass `|sum_j b_j|^2 / 3` of a
    color state whose largest squared amplitude is `concentration`.

    The remaining amplitudes have total modulus at most
    `sqrt(2 (1 - concentration))`, attained with opposite phases.
    """

    return (sqrt(concentration) - sqrt(2 * (1 - concentration))) ** 2 / 3


def _register_of(amplitudes: np.ndarray) -> StateVector:
    return StateVector.normalized(register_shape_of(amplitudes.shape[0]), amplitudes)


def _honest_amplitudes(colors: Iterable[int], masses: Optional[np.ndarray] = None) -> np.ndarray:
    colors = tuple(colors)
    masses = np.full(len(colors), 1 / len(colors)) if masses is None else masses
    amplitudes = np.zeros((len(colors), 3), dtype=complex)
    amplitudes[np.arange(len(colors)), colors] = np.sqrt(masses)

    return amplitudes


def _perturbed(state: StateVector, epsilon: float, rng: np.random.Generator) -> StateVector:
    noise = random_state(state.shape, rng).amplitudes

    return StateVector.normalized(state.shape, state.amplitudes + epsilon * noise)


def _perturbation_size(n: int, rng: np.random.Generator) -> float:
    return 10 ** rng.uniform(log10(1 / n ** 4), log10(1 / n ** 2))


def _random_colors(n: int, rng: np.random.Generator) -> Tuple[int, ...]:
    return tuple(int(c) for c in rng.integers(0, 3, size=n))


def _evaluate(
    name: str,
    bound: float,
    pairs: Iterable[ProofPair],
    hypothesis: Callable[[LemmaStatistics], bool],
    measured: Callable[[LemmaStatistics], float],
    *,
    stated_bound: Optional[float] = None,
) -> LemmaCheck:
    instances = applicable = violations = 0
    worst = None

    for pair in pairs:
        instances += 1
        statistics = lemma_statistics(pair)

        if not hypothesis(statistics):
            continue

        applicable += 1
        value = measured(statistics)
        worst = value if worst is None else min(worst, value)

        if stated_bound is not None and value < stated_bound:
            violations += 1

    if applicable == 0:
        status = "SKIP"
    else:
        status = "PASS" if worst >= bound else "FAIL"

    return LemmaCheck(
        name=name,
        bound=bound,
        worst=worst,
        instances=instances,
        applicable=applicable,
        status=status,
        stated_bound=stated_bound,
        stated_bound_violations=violations,
    )


def _skipped(name: str, bound: float) -> LemmaCheck:
    return LemmaCheck(name, bound, None, 0, 0, "SKIP")


def _check_n(n: int) -> None:
    if n < 1:
        raise GraphParameterError(f"lemma checks need n >= 1, got {n}")


def _shifted_pairs(n: int) -> Iterable[ProofPair]:
    base = _honest_amplitudes(i % 3 for i in range(n))

    for gap in (1 / n ** 3, 2 / n ** 3, 1 / n ** 2, 1 / n):
        remaining = max(0.0, 1 / sqrt(n) - gap)
        shifted = base.copy()
        shifted[0, 0] = remaining
        shifted[0, 1] = sqrt(max(0.0, 1 / n - remaining ** 2))

        yield ProofPair(_register_of(base), _register_of(shifted))


@seeded
def check_distribution_distance(
    n: int,
    trials: int = defaults.lemma_trials,
    seed: int = defaults.seed,
) -> LemmaCheck:
    """
    Function to check that a gap `||a_k b_kl| - |a'_k b'_kl|| >= 1/n^3`
    between the registers makes the swap test fail with probability at least
    `1 / (8 n^6)`.
    """

    _check_n(n)
    shape = register_shape_of(n)

    def random_pairs() -> Iterable[ProofPair]:
        for rng in seed_streams(seed, trials):
            first = random_state(shape, rng)
            yield ProofPair(first, _perturbed(first, _perturbation_size(n, rng), rng))

    return _evaluate(
        "distribution distance",
        1 / (8 * n ** 6),
        (*_shifted_pairs(n), *random_pairs()),
        lambda statistics: statistics.amplitude_gap >= 1 / n ** 3,
        lambda statistics: statistics.test1_failure,
    )


def _split_node(amplitudes: np.ndarray, node: int, share: float, phase: complex = 1) -> np.ndarray:
    split = amplitudes.copy()
    mass = float(np.sum(np.abs(amplitudes[node]) ** 2))
    color = int(np.argmax(np.abs(amplitudes[node])))
    split[node] = 0
    split[node, color] = sqrt(mass * (1 - share))
    split[node, (color + 1) % 3] = phase * sqrt(mass * share)

    return split


def _has_undefined_color(statistics: LemmaStatistics) -> bool:
    n = statistics.n
    heavy = statistics.node_masses[0] >= 1 / n ** 2

    return bool(np.any(heavy & (statistics.color_concentrations[0] < COLOR_CONCENTRATION)))


@seeded
def check_well_defined_color(
    n: int,
    trials: int = defaults.lemma_trials,
    seed: int = defaults.seed,
) -> LemmaCheck:
    """
    Function to check that a node of mass at least `1/n^2` without a color of
    squared amplitude `0.99` makes the swap test or the same-node rule fail
    with probability at least `1 / (8 n^6)`.

    Skipped below three nodes, where a split just under the concentration
    threshold already misses the bound.
    """

    _check_n(n)
    bound = 1 / (8 * n ** 6)

    if n < 3:
        return _skipped("well-defined color", bound)

    base = _honest_amplitudes(i % 3 for i in range(n))

    def constructed_pairs() -> Iterable[ProofPair]:
        for share in (0.5, 0.1, 0.02):
            register = _register_of(_split_node(base, 0, share))

            yield ProofPair(register, register)

    def random_pairs() -> Iterable[ProofPair]:
        for rng in seed_streams(seed, trials):
            amplitudes = _honest_amplitudes(
                _random_colors(n, rng),
                rng.dirichlet(np.ones(n)),
            )
            node = int(rng.integers(0, n))
            share = rng.uniform(1 - COLOR_CONCENTRATION, 0.5)
            phase = np.exp(2j * np.pi * rng.random())
            register = _register_of(_split_node(amplitudes, node, share, phase))

            yield ProofPair(register, register)

    return _evaluate(
        "well-defined color",
        bound,
        (*constructed_pairs(), *random_pairs()),
        _has_undefined_color,
        lambda statistics: max(statistics.test1_failure, statistics.test2a_failure),
    )


def _concentrated_color_state(
    colors: Tuple[int, ...],
    masses: np.ndarray,
    rest: np.ndarray,
) -> np.ndarray:
    amplitudes = np.zeros((len(colors), 3), dtype=complex)

    for node, color in enumerate(colors):
        others = ((color + 1) % 3, (color + 2) % 3)
        amplitudes[node, color] = sqrt(1 - float(np.sum(np.abs(rest[node]) ** 2)))
        amplitudes[node, others] = rest[node]

    return amplitudes * np.sqrt(masses)[:, None]


def _has_defined_colors(statistics: LemmaStatistics) -> bool:
    n = statistics.n
    heavy = statistics.node_masses[0] >= 1 / n ** 2

    return bool(np.all(statistics.color_concentrations[0][heavy] >= COLOR_CONCENTRATION))


@seeded
def check_fourier_color_mass(
    n: int,
    trials: int = defaults.lemma_trials,
    seed: int = defaults.seed,
) -> LemmaCheck:
    """
    Function to check the Fourier color-0 mass of registers whose heavy nodes
    (mass at least `1/n^2`) all have a color of squared amplitude `0.99`.

    The asserted bound is `color_mass_constant() (1 - (n - 1) / n^2)`, the
    least mass such a register can have. The looser-looking
    `(1 - (n - 1) / n^2) / 4` is reported alongside with its violations,
    since colors with `0.99` weight and opposite-phase remainders fall below
    it.
    """

    _check_n(n)

    if n == 1:
        return _skipped("Fourier color mass", color_mass_constant())

    heavy_share = 1 - (n - 1) / n ** 2
    tight_rest = -sqrt((1 - COLOR_CONCENTRATION) / 2) * (1 - 1e-9) * np.ones((n, 2))
    uniform_masses = np.full(n, 1 / n)
    colors = tuple(i % 3 for i in range(n))

    def constructed_pairs() -> Iterable[ProofPair]:
        for rest in (np.zeros((n, 2)), tight_rest):
            register = _register_of(_concentrated_color_state(colors, uniform_masses, rest))

            yield ProofPair(register, register)

    def random_pairs() -> Iterable[ProofPair]:
        for rng in seed_streams(seed, trials):
            rest = (
                rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
            )
            rest *= (
                sqrt(1 - COLOR_CONCENTRATION)
                * rng.random((n, 1))
                / np.linalg.norm(rest, axis=1, keepdims=True)
            )
            masses = rng.dirichlet(np.full(n, 0.5))
            register = _register_of(
                _concentrated_color_state(_random_colors(n, rng), masses, rest)
            )

            yield ProofPair(register, register)

    return _evaluate(
        "Fourier color mass",
        color_mass_constant() * heavy_share,
        (*constructed_pairs(), *random_pairs()),
        _has_defined_colors,
        lambda statistics: float(statistics.fourier_color0_masses[0]),
        stated_bound=heavy_share / 4,
    )


def _register_of_node_state(node_state: np.ndarray) -> StateVector:
    return _register_of(np.repeat(node_state[:, None], 3, axis=1))


def _has_light_postselected_node(statistics: LemmaStatistics) -> bool:
    distribution = statistics.postselected_node_distributions[0]

    return (
        distribution is not None
        and float(np.min(distribution.probabilities)) < 1 / (2 * statistics.n)
    )


@seeded
def check_fourier_index(
    n: int,
    trials: int = defaults.lemma_trials,
    seed: int = defaults.seed,
) -> LemmaCheck:
    """
    Function to check that a node state left after post-selecting color
    `F_3|0>` with some `|g_l|^2 < 1/(2n)` misses `F_n|0>` with probability at
    least `1 / (16 n^2)`.
    """

    _check_n(n)
    bound = 1 / (16 * n ** 2)

    if n == 1:
        return _skipped("Fourier index", bound)

    def constructed_pairs() -> Iterable[ProofPair]:
        for light in (1 / (2 * n) - 1e-9, 1 / (4 * n), 0.0):
            node_state = np.full(n, sqrt((1 - light) / (n - 1)), dtype=complex)
            node_state[0] = sqrt(light)
            register = _register_of_node_state(node_state)

            yield ProofPair(register, register)

    def random_pairs() -> Iterable[ProofPair]:
        node_shape = (n, )

        for rng in seed_streams(seed, trials):
            uniform = np.full(n, 1 / sqrt(n), dtype=complex)
            noise = random_state(node_shape, rng).amplitudes
            node_state = uniform + rng.uniform(0, 1.5) * noise
            register = _register_of_node_state(node_state / np.linalg.norm(node_state))

            yield ProofPair(register, register)

    return _evaluate(
        "Fourier index",
        bound,
        (*constructed_pairs(), *random_pairs()),
        _has_light_postselected_node,
        lambda statistics: statistics.node_fourier_failures[0],
    )


def _has_light_node(statistics: LemmaStatistics) -> bool:
    return bool(np.min(statistics.node_masses[0]) < 1 / (10 * statistics.n))


@seeded
def check_node_mass(
    n: int,
    trials: int = defaults.lemma_trials,
    seed: int = defaults.seed,
) -> LemmaCheck:
    """
    Function to check that a node of mass under `1/(10n)` makes the swap
    test, the same-node rule or the Fourier test fail with probability at
    least `1 / (8 n^6)`.
    """

    _check_n(n)
    bound = 1 / (8 * n ** 6)

    if n == 1:
        return _skipped("node mass", bound)

    colors = tuple(i % 3 for i in range(n))

    def light_masses(light: float) -> np.ndarray:
        masses = np.full(n, (1 - light) / (n - 1))
        masses[0] = light

        return masses

    def constructed_pairs() -> Iterable[ProofPair]:
        for light in (1 / (10 * n) - 1e-9, 1 / (100 * n), 0.0):
            register = _register_of(_honest_amplitudes(colors, light_masses(light)))

            yield ProofPair(register, register)

    def random_pairs() -> Iterable[ProofPair]:
        for rng in seed_streams(seed, trials):
            masses = light_masses(rng.uniform(0, 1 / (10 * n)))
            amplitudes = _honest_amplitudes(_random_colors(n, rng), masses)
            amplitudes *= np.exp(2j * np.pi * rng.random((n, 1)) * rng.uniform(0, 0.1))
            first = _register_of(amplitudes[rng.permutation(n)])

            yield ProofPair(first, _perturbed(first, _perturbation_size(n, rng), rng))

    return _evaluate(
        "node mass",
        bound,
        (*constructed_pairs(), *random_pairs()),
        _has_light_node,
        lambda statistics: max(
            statistics.test1_failure,
            statistics.test2a_failure,
            statistics.test3_failure,
        ),
    )


@seeded
def run_lemma_suite(
    n: int,
    trials: int = defaults.lemma_trials,
    seed: int = defaults.seed,
) -> Tuple[LemmaCheck, ...]:
    """Function to run the five lemma checks, each on its own seed substream."""

    checks = (
        check_distribution_distance,
        check_well_defined_color,
        check_fourier_color_mass,
        check_fourier_index,
        check_node_mass,
    )
    seeds = np.random.SeedSequence(seed).generate_state(len(checks))

    return tuple(
        check(n, trials, int(check_seed))
        for check, check_seed in zip(checks, seeds)
    )
