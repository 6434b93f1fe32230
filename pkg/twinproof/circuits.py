"""
Qubit circuits of the verifier: a gate library with arbitrary-precision
entries, a plain circuit representation with a text format, compilation of
the 3-coloring verifier into a single deferred-measurement circuit and its
statevector simulation.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import ceil, log2
from types import MappingProxyType
from typing import Callable, Iterable, Optional, Tuple, Mapping

import numpy as np
from mpmath import mp, mpc, mpf

from twinproof.annotations import pure, bit_count
from twinproof.config import limits
from twinproof.errors import (
    CircuitError, CircuitFormatError, ShapeMismatchError, DimensionCapError
)
from twinproof.graphs import Graph
from twinproof.immutability import frozen_array
from twinproof.protocol3col import ProofPair
from twinproof.qstate import StateVector, Operator


__all__ = (
    "GateSchema",
    "GateLibrary",
    "natural_gates",
    "Gate",
    "Circuit",
    "VerifierLayout",
    "VerifierParams",
    "embed_dims",
    "embed_register",
    "verifier_layout",
    "verifier_input",
    "compile_verifier",
    "propagate",
    "simulate_circuit",
    "accept_mass",
    "circuit_acceptance",
    "branch_acceptance",
    "circuit_acceptance_operator",
    "dump_circuit",
    "parse_circuit",
)


Entry = Callable[[Tuple[int, ...], int, int, int], mpc]


def _on_grid(value: mpc, bits: int) -> mpc:
    return mpc(
        mp.ldexp(mp.nint(mp.ldexp(value.real, bits)), -bits),
        mp.ldexp(mp.nint(mp.ldexp(value.imag, bits)), -bits),
    )


def _hadamard_entry(param: Tuple[int, ...], width: int, row: int, column: int) -> mpc:
    return mpc((-1) ** (row & column)) / mp.sqrt(2)


def _phase_entry(param: Tuple[int, ...], width: int, row: int, column: int) -> mpc:
    if row != column:
        return mpc(0)

    return mpc(1) if row == 0 else mp.expjpi(mpf(1) / 4)


def _fourier_digits(value: int, d: int, stride: int) -> Tuple[int, int, int]:
    high, low = divmod(value, stride)
    high, digit = divmod(high, d)

    return high, digit, low


def _fourier_entry(param: Tuple[int, ...], width: int, row: int, column: int) -> mpc:
    d, stride, span = param

    if row >= span or column >= span:
        return mpc(int(row == column))

    row_high, row_digit, row_low = _fourier_digits(row, d, stride)
    column_high, column_digit, column_low = _fourier_digits(column, d, stride)

    if (row_high, row_low) != (column_high, column_low):
        return mpc(0)

    return mp.expjpi(mpf(2 * (row_digit * column_digit % d)) / d) / mp.sqrt(d)


def _prepare_entry(param: Tuple[int, ...], width: int, row: int, column: int) -> mpc:
    target = [1 / mp.sqrt(3)] * 3 + [mpf(0)]
    reflected = [int(index == 0) - target[index] for index in range(4)]
    norm = sum(component ** 2 for component in reflected)

    return mpc(int(row == column) - 2 * reflected[row] * reflected[column] / norm)


Image = Callable[[Tuple[int, ...], int, np.ndarray], np.ndarray]


def _flip_image(param: Tuple[int, ...], width: int, columns: np.ndarray) -> np.ndarray:
    return columns ^ 1


def _controlled_flip_image(param: Tuple[int, ...], width: int, columns: np.ndarray) -> np.ndarray:
    return np.where(columns >> 1, columns ^ 1, columns)


def _swap_image(param: Tuple[int, ...], width: int, columns: np.ndarray) -> np.ndarray:
    low = columns & 0b11

    return np.where((low == 0b01) | (low == 0b10), columns ^ 0b11, columns)


def _controlled_swap_image(param: Tuple[int, ...], width: int, columns: np.ndarray) -> np.ndarray:
    return np.where(columns >> 2, _swap_image(param, width, columns), columns)


def _compare_image(param: Tuple[int, ...], width: int, columns: np.ndarray) -> np.ndarray:
    return np.where(columns >> 1 == param[0], columns ^ 1, columns)


def _permutation_entry(image: Image) -> Entry:
    def entry(param: Tuple[int, ...], width: int, row: int, column: int) -> mpc:
        return mpc(int(int(image(param, width, np.asarray(column))) == row))

    return entry


@dataclass(frozen=True)
class GateSchema:
    """
    Schema of a gate family.

    `width` is the fixed wire count, or `None` for schemas sized by their
    wire list. Permutation schemas carry their basis `image` map and are
    simulated by moving amplitudes instead of by matrix products.
    """

    name: str
    width: Optional[int]
    parameter_count: int
    entry: Entry
    image: Optional[Image] = None

    @property
    def is_permutation(self) -> bool:
        return self.image is not None


class GateLibrary:
    """
    Class for a finite list of gate schemas whose matrix entries are
    computable to any number of binary digits.

    `entry` rounds the exact value to the grid of `2^-bits`, evaluating it
    with 16 extra bits, so every returned entry is within `2^-bits` of the
    exact one.
    """

    def __init__(self, schemas: Iterable[GateSchema]):
        self._schemas = MappingProxyType({schema.name: schema for schema in schemas})

    @property
    def schemas(self) -> Mapping[str, GateSchema]:
        return self._schemas

    def __contains__(self, name: str) -> bool:
        return name in self._schemas

    def __getitem__(self, name: str) -> GateSchema:
        try:
            return self._schemas[name]
        except KeyError:
            raise CircuitError(f"unknown gate schema '{name}'") from None

    def entry(
        self,
        name: str,
        param: Tuple[int, ...],
        width: int,
        row: int,
        column: int,
        bits: bit_count,
    ) -> mpc:
        schema = self[name]
        self.check(name, param, width)

        if not (0 <= row < 2 ** width and 0 <= column < 2 ** width):
            raise CircuitError(f"entry ({row}, {column}) outside a {width}-qubit gate")

        with mp.workprec(bits + 16):
            return _on_grid(schema.entry(param, width, row, column), bits)

    def check(self, name: str, param: Tuple[int, ...], width: int) -> None:
        """Method to validate the parameter and the wire count of a gate."""

        schema = self[name]

        if len(param) != schema.parameter_count:
            raise CircuitError(f"{name} takes {schema.parameter_count} parameters, got {param}")

        if schema.width is not None and width != schema.width:
            raise CircuitError(f"{name} acts on {schema.width} wires, got {width}")

        if name == "DFT":
            d, stride, span = param

            if d < 1 or stride < 1 or span > 2 ** width or span % (d * stride):
                raise CircuitError(f"DFT parameter {param} does not fit {width} wires")

        if name == "CMP" and (width < 2 or not 0 <= param[0] < 2 ** (width - 1)):
            raise CircuitError(f"CMP constant {param} does not fit {width - 1} wires")

    def matrix(
        self,
        name: str,
        param: Tuple[int, ...],
        width: int,
        bits: bit_count = limits.float_mantissa_bits,
    ) -> np.ndarray:
        """Method to materialize a gate as a read-only complex matrix."""

        return _materialized(self, name, param, width, bits)

    def permutation(self, name: str, param: Tuple[int, ...], width: int) -> np.ndarray:
        """
        Method to get the basis image `columns -> rows` of a permutation gate
        as a read-only index array.
        """

        schema = self[name]
        self.check(name, param, width)

        if not schema.is_permutation:
            raise CircuitError(f"{name} is not a permutation gate")

        return frozen_array(schema.image(param, width, np.arange(2 ** width)), dtype=int)


@lru_cache(maxsize=256)
def _materialized(
    library: GateLibrary,
    name: str,
    param: Tuple[int, ...],
    width: int,
    bits: int,
) -> np.ndarray:
    dimension = 2 ** width

    return frozen_array([
        [complex(library.entry(name, param, width, row, column, bits)) for column in range(dimension)]
        for row in range(dimension)
    ])


natural_gates = GateLibrary((
    GateSchema("H", 1, 0, _hadamard_entry),
    GateSchema("T", 1, 0, _phase_entry),
    GateSchema("X", 1, 0, _permutation_entry(_flip_image), _flip_image),
    GateSchema("CNOT", 2, 0, _permutation_entry(_controlled_flip_image), _controlled_flip_image),
    GateSchema("SWAP", 2, 0, _permutation_entry(_swap_image), _swap_image),
    GateSchema("CSWAP", 3, 0, _permutation_entry(_controlled_swap_image), _controlled_swap_image),
    GateSchema("DFT", None, 3, _fourier_entry),
    GateSchema("CMP", None, 1, _permutation_entry(_compare_image), _compare_image),
    GateSchema("PREP3", 2, 0, _prepare_entry),
))


@dataclass(frozen=True)
class Gate:
    """
    One gate application.

    `wires` are in the schema's big-endian order: for `CMP` the compared
    wires followed by the target, for `CNOT` and `CSWAP` the schema's own
    control first. Extra `controls` must all read 1 for the gate to act.
    """

    schema: str
    wires: Tuple[int, ...]
    param: Tuple[int, ...] = tuple()
    controls: Tuple[int, ...] = tuple()

    @property
    def width(self) -> int:
        return len(self.wires)

    def controlled_by(self, *controls: int) -> "Gate":
        return Gate(self.schema, self.wires, self.param, (*controls, *self.controls))


@dataclass(frozen=True)
class Circuit:
    """Gate list on `num_qubits` wires accepting when `accept_wire` reads 1."""

    num_qubits: int
    gates: Tuple[Gate, ...]
    accept_wire: int
    library: GateLibrary = natural_gates

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))

        if self.num_qubits < 1 or not 0 <= self.accept_wire < self.num_qubits:
            raise CircuitError(
                f"accept wire {self.accept_wire} outside {self.num_qubits} qubits"
            )

        for position, gate in enumerate(self.gates):
            touched = (*gate.wires, *gate.controls)

            if any(not 0 <= wire < self.num_qubits for wire in touched):
                raise CircuitError(f"gate {position} touches a wire outside the circuit")

            if len(set(touched)) != len(touched):
                raise CircuitError(f"gate {position} repeats a wire")

            self.library.check(gate.schema, gate.param, gate.width)

    def __len__(self) -> int:
        return len(self.gates)


def _register_qubits_of(n: int) -> int:
    return max(1, ceil(log2(3 * n)))


@pure
def embed_dims(n: int) -> Tuple[int, np.ndarray]:
    """
    Function to get the qubit count `k = ceil(log2 3n)` of one register and
    the map `(i, c) -> 3i + c` of node⊗color basis states into `2^k` qubit
    basis states. The `2^k - 3n` remaining states are padding.
    """

    if n < 1:
        raise ShapeMismatchError(f"registers need n >= 1, got {n}")

    return _register_qubits_of(n), frozen_array(np.arange(3 * n), dtype=int)


@pure
def embed_register(state: StateVector, qubits: int) -> StateVector:
    """Function to place a `[n, 3]` register into `qubits` qubits, padding with 0."""

    if state.dimension > 2 ** qubits:
        raise ShapeMismatchError(f"{state.shape} does not fit {qubits} qubits")

    amplitudes = np.zeros(2 ** qubits, dtype=complex)
    amplitudes[:state.dimension] = state.amplitudes

    return StateVector((2, ) * qubits, amplitudes)


@dataclass(frozen=True)
class VerifierLayout:
    """
    Wire groups of the compiled verifier: both registers big-endian, then
    the branch selector pair, the test-1 selector, the swap-test ancilla, two
    scratch flags and the accept wire.
    """

    n: int
    k: int

    ancilla_count = 7

    @property
    def first(self) -> Tuple[int, ...]:
        return tuple(range(self.k))

    @property
    def second(self) -> Tuple[int, ...]:
        return tuple(range(self.k, 2 * self.k))

    @property
    def registers(self) -> Tuple[int, ...]:
        return (*self.first, *self.second)

    @property
    def branch_a(self) -> int:
        return 2 * self.k

    @property
    def branch_b(self) -> int:
        return 2 * self.k + 1

    @property
    def selector(self) -> int:
        return 2 * self.k + 2

    @property
    def swap_ancilla(self) -> int:
        return 2 * self.k + 3

    @property
    def flags(self) -> Tuple[int, int]:
        return 2 * self.k + 4, 2 * self.k + 5

    @property
    def accept(self) -> int:
        return 2 * self.k + 6

    @property
    def num_qubits(self) -> int:
        return 2 * self.k + self.ancilla_count


@pure
def verifier_layout(n: int) -> VerifierLayout:
    return VerifierLayout(n, embed_dims(n)[0])


@dataclass(frozen=True)
class VerifierParams:
    """
    Polynomials of the verifier class: soundness gap `g = 1 / p(n)` with
    `p(n) = soundness_factor * n^soundness_degree`, circuit size
    `q(n) = size_quadratic * n^2 + size_constant` and register size
    `c * ceil(log2 n) + 2` qubits. `gap` overrides `1 / p(n)` when set.
    """

    soundness_factor: int = 24
    soundness_degree: int = 6
    size_quadratic: int = 4
    size_constant: int = 64
    register_constant: int = 1
    gap: Optional[float] = None

    def __post_init__(self) -> None:
        if self.gap is not None and not 0 < self.gap <= 1:
            raise ValueError(f"gap must lie in (0, 1], got {self.gap}")

    def p(self, n: int) -> float:
        return self.soundness_factor * n ** self.soundness_degree

    def gap_for(self, n: int) -> float:
        return self.gap if self.gap is not None else min(1.0, 1 / self.p(n))

    def q(self, n: int) -> int:
        return self.size_quadratic * n ** 2 + self.size_constant

    def qubit_budget(self, n: int) -> int:
        return (
            2 * (self.register_constant * ceil(log2(n)) + 2)
            + VerifierLayout.ancilla_count
        )


def _swap_test_block(layout: VerifierLayout) -> Iterable[Gate]:
    selector, ancilla = layout.selector, layout.swap_ancilla

    yield Gate("H", (ancilla, ), controls=(selector, ))

    for first, second in zip(layout.first, layout.second):
        yield Gate("CSWAP", (ancilla, first, second))

    yield Gate("H", (ancilla, ), controls=(selector, ))
    yield Gate("X", (layout.accept, ), controls=(selector, ))
    yield Gate("CNOT", (ancilla, layout.accept), controls=(selector, ))


def _rejected_patterns(graph: Graph) -> Iterable[Tuple[int, int]]:
    for node in range(graph.n):
        for color in range(3):
            for other in range(3):
                if color != other:
                    yield 3 * node + color, 3 * node + other

    for u, v in graph.sorted_edges:
        for color in range(3):
            yield 3 * u + color, 3 * v + color
            yield 3 * v + color, 3 * u + color


def _basis_test_block(graph: Graph, layout: VerifierLayout) -> Iterable[Gate]:
    branch, accept = layout.branch_b, layout.accept
    first_flag, second_flag = layout.flags

    yield Gate("X", (accept, ), controls=(branch, ))

    for x, y in _rejected_patterns(graph):
        yield Gate("CMP", (*layout.registers, accept), (x * 2 ** layout.k + y, ), (branch, ))

    for padding in range(3 * graph.n, 2 ** layout.k):
        yield Gate("CMP", (*layout.first, first_flag), (padding, ), (branch, ))
        yield Gate("CMP", (*layout.second, second_flag), (padding, ), (branch, ))

    yield Gate("CNOT", (first_flag, accept), controls=(branch, ))
    yield Gate("CMP", (first_flag, second_flag, accept), (0b01, ), (branch, ))


def _fourier_test_block(layout: VerifierLayout) -> Iterable[Gate]:
    branch, n = layout.branch_a, layout.n
    span = 3 * n

    for register, flag in zip((layout.first, layout.second), layout.flags):
        yield Gate("DFT", register, (3, 1, span), (branch, ))

        if n > 1:
            yield Gate("DFT", register, (n, 3, span), (branch, ))

        for node in range(1, n):
            yield Gate("CMP", (*register, flag), (3 * node, ), (branch, ))

    for flag in layout.flags:
        yield Gate("X", (flag, ), controls=(branch, ))

    yield Gate("CMP", (*layout.flags, layout.accept), (0b11, ), (branch, ))


@pure
def compile_verifier(graph: Graph, params: VerifierParams = VerifierParams()) -> Circuit:
    """
    Function to compile the verifier of a graph into one circuit.

    `PREP3` puts the selector pair into an even superposition of `00`, `01`
    and `10`, so each test runs in its own branch with weight `1/3`:

    - `00` (marked on the test-1 selector): swap test, accepting on ancilla 0;
    - `01`: comparators clear the accept wire on every rejected basis pair
      and on padding in either register;
    - `10`: per register Fourier transforms of the color part and of the node
      part, a flag marking color 0 with node outcome other than 0, accepting
      when neither flag is set.
    """

    layout = verifier_layout(graph.n)
    gates = (
        Gate("PREP3", (layout.branch_a, layout.branch_b)),
        Gate("X", (layout.selector, )),
        Gate("CNOT", (layout.branch_a, layout.selector)),
        Gate("CNOT", (layout.branch_b, layout.selector)),
        *_swap_test_block(layout),
        *_basis_test_block(graph, layout),
        *_fourier_test_block(layout),
    )

    if len(gates) > params.q(graph.n):
        raise CircuitError(f"{len(gates)} gates exceed the size bound {params.q(graph.n)}")

    if layout.num_qubits > params.qubit_budget(graph.n):
        raise CircuitError(
            f"{layout.num_qubits} qubits exceed the budget {params.qubit_budget(graph.n)}"
        )

    return Circuit(layout.num_qubits, gates, layout.accept)


def _fixed_index(num_qubits: int, fixed: Mapping[int, int]) -> tuple:
    return tuple(fixed.get(wire, slice(None)) for wire in range(num_qubits))


def _permute_amplitudes(state: np.ndarray, gate: Gate, image: np.ndarray) -> None:
    view = state[_fixed_index(state.ndim, {wire: 1 for wire in gate.controls})]
    remaining = [wire for wire in range(state.ndim) if wire not in gate.controls]
    axes = [remaining.index(wire) for wire in gate.wires]
    width = gate.width

    columns = np.moveaxis(view, axes, list(range(width))).reshape(2 ** width, -1)
    rows = np.empty_like(columns)
    rows[image] = columns

    view[...] = np.moveaxis(rows.reshape((2, ) * view.ndim), list(range(width)), axes)


def _apply_matrix(state: np.ndarray, gate: Gate, matrix: np.ndarray) -> None:
    view = state[_fixed_index(state.ndim, {wire: 1 for wire in gate.controls})]
    remaining = [wire for wire in range(state.ndim) if wire not in gate.controls]
    axes = [remaining.index(wire) for wire in gate.wires]
    width = gate.width
    product = np.tensordot(
        matrix.reshape((2, ) * 2 * width),
        view,
        axes=(list(range(width, 2 * width)), axes),
    )
    view[...] = np.moveaxis(product, list(range(width)), axes)


def propagate(
    circuit: Circuit,
    amplitudes: np.ndarray,
    bits: bit_count = limits.float_mantissa_bits,
) -> np.ndarray:
    """
    Function to apply every gate of a circuit in order to raw amplitudes.

    Permutation gates move amplitudes exactly. Other gates are materialized
    from entries at `bits` binary digits, so the result may leave the unit
    sphere by at most `gates * 2^-bits * 2^width` per gate.
    """

    if 2 ** circuit.num_qubits > limits.dimension_cap:
        raise DimensionCapError(
            f"{circuit.num_qubits} qubits exceed the dimension cap {limits.dimension_cap}"
        )

    if np.size(amplitudes) != 2 ** circuit.num_qubits:
        raise ShapeMismatchError(
            f"{np.size(amplitudes)} amplitudes for {circuit.num_qubits} qubits"
        )

    state = np.array(amplitudes, dtype=complex).reshape((2, ) * circuit.num_qubits)

    for gate in circuit.gates:
        schema = circuit.library[gate.schema]

        if schema.is_permutation:
            _permute_amplitudes(
                state,
                gate,
                circuit.library.permutation(gate.schema, gate.param, gate.width),
            )
        else:
            _apply_matrix(
                state,
                gate,
                circuit.library.matrix(gate.schema, gate.param, gate.width, bits),
            )

    return state.reshape(-1)


def _drift_bound_of(circuit: Circuit, bits: int) -> float:
    widest = max((gate.width for gate in circuit.gates), default=1)

    return len(circuit) * 2.0 ** -min(bits, limits.float_mantissa_bits) * 2 ** widest


@pure
def simulate_circuit(
    circuit: Circuit,
    state: StateVector,
    bits: bit_count = limits.float_mantissa_bits,
) -> StateVector:
    """
    Function to get the output state of a circuit, renormalized after
    checking that rounding of gate entries kept the norm within the drift
    bound.
    """

    output = propagate(circuit, state.amplitudes, bits)
    drift = abs(float(np.vdot(output, output).real) - 1)

    if drift > _drift_bound_of(circuit, bits) + limits.hermitian_tolerance:
        raise CircuitError(f"unitarity drift {drift} exceeds the rounding bound")

    return StateVector.normalized((2, ) * circuit.num_qubits, output)


def accept_mass(circuit: Circuit, amplitudes: np.ndarray) -> float:
    """Function to get the weight of output amplitudes on the accept wire reading 1."""

    tensor = np.asarray(amplitudes).reshape((2, ) * circuit.num_qubits)
    accepted = tensor[_fixed_index(circuit.num_qubits, {circuit.accept_wire: 1})]

    return float(np.sum(np.abs(accepted) ** 2))


@pure
def verifier_input(pair: ProofPair, layout: VerifierLayout) -> StateVector:
    """Function to get `|w1> ⊗ |w2> ⊗ |0...0>` on the verifier wires."""

    if pair.n != layout.n:
        raise ShapeMismatchError(f"proof on {pair.n} nodes for a layout of {layout.n}")

    ancillas = np.zeros(2 ** layout.ancilla_count, dtype=complex)
    ancillas[0] = 1

    return StateVector(
        (2, ) * layout.num_qubits,
        np.kron(
            np.kron(
                embed_register(pair.w1, layout.k).amplitudes,
                embed_register(pair.w2, layout.k).amplitudes,
            ),
            ancillas,
        ),
    )


@pure
def circuit_acceptance(
    circuit: Circuit,
    state: StateVector,
    bits: bit_count = limits.float_mantissa_bits,
) -> float:
    """Function to get `<w|U† Π_accept U|w>` of an input state."""

    return accept_mass(circuit, propagate(circuit, state.amplitudes, bits))


@pure
def branch_acceptance(
    circuit: Circuit,
    layout: VerifierLayout,
    state: StateVector,
    bits: bit_count = limits.float_mantissa_bits,
) -> Tuple[float, float, float]:
    """
    Function to get the acceptance of each test of a compiled verifier,
    read off the selector pair: `00` for test 1, `01` for test 2 and `10`
    for test 3.
    """

    output = propagate(circuit, state.amplitudes, bits).reshape((2, ) * circuit.num_qubits)
    selectors = ((0, 0), (0, 1), (1, 0))

    return tuple(
        3 * float(np.sum(np.abs(output[_fixed_index(circuit.num_qubits, {
            layout.branch_a: a,
            layout.branch_b: b,
            circuit.accept_wire: 1,
        })]) ** 2))
        for a, b in selectors
    )


@pure
def circuit_acceptance_operator(
    circuit: Circuit,
    layout: VerifierLayout,
    bits: bit_count = limits.float_mantissa_bits,
) -> Operator:
    """
    Function to get the acceptance POVM element `V† Π_accept V` the circuit
    induces on the embedded registers, with `V|x, y> = U|x, y, 0...0>`.

    Simulates all `(3n)^2` embedded basis inputs.
    """

    dimension = 3 * layout.n
    register_dimension = 2 ** layout.k
    ancilla_dimension = 2 ** layout.ancilla_count
    accepted_outputs = list()

    for x in range(dimension):
        for y in range(dimension):
            amplitudes = np.zeros(2 ** layout.num_qubits, dtype=complex)
            amplitudes[(x * register_dimension + y) * ancilla_dimension] = 1
            output = propagate(circuit, amplitudes, bits).reshape((2, ) * circuit.num_qubits)
            accepted_outputs.append(
                output[_fixed_index(circuit.num_qubits, {circuit.accept_wire: 1})].reshape(-1)
            )

    images = np.array(accepted_outputs)

    return Operator(
        (layout.n, 3, layout.n, 3),
        images.conj() @ images.T,
        povm=True,
    )


def _format_gate(gate: Gate) -> str:
    tokens = ["GATE", gate.schema]

    if gate.param:
        tokens.append(":".join(map(str, gate.param)))

    tokens.extend(map(str, gate.wires))

    if gate.controls:
        tokens.append("ctrl")
        tokens.extend(map(str, gate.controls))

    return " ".join(tokens)


def dump_circuit(circuit: Circuit) -> str:
    """
    Function to write a circuit as text: a `qubits <k> accept <w>` header and
    one `GATE <schema> [param] <wires...> [ctrl <wires...>]` line per gate,
    multi-part parameters joined by `:`.
    """

    return "".join((
        f"qubits {circuit.num_qubits} accept {circuit.accept_wire}\n",
        *(f"{_format_gate(gate)}\n" for gate in circuit.gates),
    ))


def _parse_gate(tokens: list, line_number: int, library: GateLibrary) -> Gate:
    if len(tokens) < 2 or tokens[0] != "GATE" or tokens[1] not in library:
        raise CircuitFormatError(f"line {line_number}: expected 'GATE <schema> ...'")

    schema = library[tokens[1]]
    rest = tokens[2:]
    param = tuple()

    try:
        if schema.parameter_count:
            param = tuple(map(int, rest[0].split(":")))
            rest = rest[1:]

        if "ctrl" in rest:
            split = rest.index("ctrl")
            wires, controls = rest[:split], rest[split + 1:]
        else:
            wires, controls = rest, list()

        return Gate(schema.name, tuple(map(int, wires)), param, tuple(map(int, controls)))
    except (ValueError, IndexError):
        raise CircuitFormatError(f"line {line_number}: malformed gate") from None


def parse_circuit(text: str, library: GateLibrary = natural_gates) -> Circuit:
    lines = [line.split() for line in text.splitlines()]

    if not lines or len(lines[0]) != 4 or lines[0][0] != "qubits" or lines[0][2] != "accept":
        raise CircuitFormatError("expected header 'qubits <k> accept <w>'")

    try:
        num_qubits, accept_wire = int(lines[0][1]), int(lines[0][3])
    except ValueError:
        raise CircuitFormatError("header sizes must be integers") from None

    gates = tuple(
        _parse_gate(tokens, line_number, library)
        for line_number, tokens in enumerate(lines[1:], start=2)
        if tokens
    )

    try:
        return Circuit(num_qubits, gates, accept_wire, library)
    except CircuitError as error:
        raise CircuitFormatError(str(error)) from None
