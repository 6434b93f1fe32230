from typing import Iterable, Tuple

import numpy as np

from twinproof.graphs import Graph, Coloring, complete, cycle, wheel, petersen
from twinproof.protocol3col import ProofPair, register_shape_of
from twinproof.qstate import StateVector, basis_state, random_state, seed_streams


TRIANGLE_TEXT = "c triangle\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n"

K4_TEXT = "p edge 4 6\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4\n"

PETERSEN_TEXT = "".join((
    "p edge 10 15\n",
    *(f"e {u + 1} {v + 1}\n" for u, v in petersen().sorted_edges),
))


triangle = complete(3)
k4 = complete(4)
c5 = cycle(5)
w5 = wheel(5)
edgeless_pair = Graph(2)
single_node = Graph(1)
path3 = Graph(3, frozenset({(0, 1), (1, 2)}))


def random_pairs(n: int, count: int, seed: int = 0) -> Tuple[ProofPair, ...]:
    shape = register_shape_of(n)

    return tuple(
        ProofPair(random_state(shape, rng), random_state(shape, rng))
        for rng in seed_streams(seed, count)
    )


def basis_pair(n: int, first: Tuple[int, int], second: Tuple[int, int]) -> ProofPair:
    shape = register_shape_of(n)

    return ProofPair(
        basis_state(shape, shape.index_of(*first)),
        basis_state(shape, shape.index_of(*second)),
    )


def honest_register(colors: Iterable[int]) -> StateVector:
    colors = tuple(colors)
    n = len(colors)
    amplitudes = np.zeros(3 * n, dtype=complex)
    amplitudes[3 * np.arange(n) + np.array(colors)] = 1 / np.sqrt(n)

    return StateVector(register_shape_of(n), amplitudes)


def same_pair(state: StateVector) -> ProofPair:
    return ProofPair(state, state)


triangle_coloring = Coloring((0, 1, 2))
