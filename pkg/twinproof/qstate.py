"""Dense complex linear algebra over registers of arbitrary factor dimensions."""

from dataclasses import dataclass
from math import prod, sqrt
from typing import Iterable, Optional, Self, Tuple, overload

import numpy as np
from scipy.linalg import eigh

from twinproof.annotations import positive_int, pure, seeded, Special
from twinproof.config import limits, defaults
from twinproof.errors import (
    DimensionCapError, ShapeMismatchError, HermiticityError, NormalizationError,
    DistributionError, ConvergenceError, SpectrumError
)
from twinproof.immutability import publicly_immutable, frozen_array
from twinproof.logging import Logger, logger_or_silent


__all__ = (
    "RegisterShape",
    "StateVector",
    "Operator",
    "OutcomeDistribution",
    "tensor",
    "dft_matrix",
    "swap_operator",
    "identity",
    "projector",
    "expectation",
    "density_expectation",
    "top_eigenpair",
    "dense_top_eigenpair",
    "measure_distribution",
    "sample",
    "sample_many",
    "l1_distance",
    "pure_distance",
    "inner",
    "apply",
    "effective_operator",
    "basis_state",
    "uniform_state",
    "random_state",
    "seed_streams",
)


@dataclass(frozen=True)
class RegisterShape:
    """
    Ordered factor dimensions of a register.

    Indexing over the factors is row-major, so `[n, 3]` places the pair
    `(i, c)` at `3 * i + c`.
    """

    dims: Tuple[positive_int, ...]
    cap: int = limits.dimension_cap

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(int(dim) for dim in self.dims))

        if len(self.dims) == 0:
            raise ShapeMismatchError("register must have at least one factor")

        if any(dim < 1 for dim in self.dims):
            raise ShapeMismatchError(f"factor dimensions {self.dims} must be positive")

        if self.dimension > self.cap:
            raise DimensionCapError(
                f"total dimension {self.dimension} exceeds the cap {self.cap}"
            )

    def __repr__(self) -> str:
        return f"RegisterShape{list(self.dims)}"

    def __eq__(self, other: Special[Self]) -> bool:
        return isinstance(other, RegisterShape) and self.dims == other.dims

    def __hash__(self) -> int:
        return hash(self.dims)

    @property
    def dimension(self) -> int:
        return prod(self.dims)

    def concatenated(self, other: Self) -> Self:
        return RegisterShape((*self.dims, *other.dims), cap=min(self.cap, other.cap))

    def index_of(self, *digits: int) -> int:
        """Method to get the flat row-major index of per-factor digits."""

        return int(np.ravel_multi_index(digits, self.dims))

    def digits_of(self, index: int) -> Tuple[int, ...]:
        return tuple(int(digit) for digit in np.unravel_index(index, self.dims))


def _shape_of(shape: RegisterShape | Iterable[int]) -> RegisterShape:
    return shape if isinstance(shape, RegisterShape) else RegisterShape(tuple(shape))


@publicly_immutable
class StateVector:
    """
    Normalized pure state of a register.

    Amplitudes are stored in a read-only buffer. Use `normalized` to build a
    state from an unnormalized vector.
    """

    def __init__(
        self,
        shape: RegisterShape | Iterable[int],
        amplitudes: Iterable[complex] | np.ndarray,
    ):
        self._shape = _shape_of(shape)
        self._amplitudes = frozen_array(amplitudes).reshape(-1)

        if self._amplitudes.size != self._shape.dimension:
            raise ShapeMismatchError(
                f"{self._amplitudes.size} amplitudes do not fit {self._shape}"
            )

        norm = float(np.vdot(self._amplitudes, self._amplitudes).real)

        if abs(norm - 1) > limits.state_tolerance:
            raise NormalizationError(f"squared norm {norm} is not 1")

    @classmethod
    def normalized(
        cls,
        shape: RegisterShape | Iterable[int],
        amplitudes: Iterable[complex] | np.ndarray,
    ) -> Self:
        vector = np.array(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vector)

        if norm == 0:
            raise NormalizationError("zero vector cannot be normalized")

        return cls(shape, vector / norm)

    @property
    def shape(self) -> RegisterShape:
        return self._shape

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amplitudes

    @property
    def dimension(self) -> int:
        return self._shape.dimension

    def __repr__(self) -> str:
        return f"StateVector({self._shape}, {np.round(self._amplitudes, 6).tolist()})"

    def __len__(self) -> int:
        return self._amplitudes.size

    def tensor_view(self) -> np.ndarray:
        """Method to get amplitudes with one axis per register factor."""

        return self._amplitudes.reshape(self._shape.dims)


@publicly_immutable
class Operator:
    """
    Dense square operator on a register.

    Carries the `hermitian` and `povm` tags checked at construction:
    a Hermitian operator satisfies `max|A - A†| <= 1e-12`, a POVM element is
    additionally bounded spectrally by `[0, 1]` within `1e-9`.
    """

    def __init__(
        self,
        shape: RegisterShape | Iterable[int],
        entries: np.ndarray | Iterable[Iterable[complex]],
        *,
        hermitian: bool = False,
        povm: bool = False,
    ):
        self._shape = _shape_of(shape)
        self._entries = frozen_array(entries)
        self._is_hermitian = hermitian or povm
        self._is_povm = povm

        dimension = self._shape.dimension

        if self._entries.shape != (dimension, dimension):
            raise ShapeMismatchError(
                f"matrix of shape {self._entries.shape} does not fit {self._shape}"
            )

        if self._is_hermitian:
            asymmetry = float(np.max(np.abs(self._entries - self._entries.conj().T)))

            if asymmetry > limits.hermitian_tolerance:
                raise HermiticityError(f"operator deviates from its adjoint by {asymmetry}")

        if self._is_povm:
            spectrum = np.linalg.eigvalsh(self._entries)

            if (
                spectrum[0] < -limits.povm_tolerance
                or spectrum[-1] > 1 + limits.povm_tolerance
            ):
                raise SpectrumError(
                    f"spectrum [{spectrum[0]}, {spectrum[-1]}] leaves [0, 1]"
                )

    @classmethod
    def _trusted(
        cls,
        shape: RegisterShape,
        entries: np.ndarray,
        *,
        hermitian: bool = False,
        povm: bool = False,
    ) -> Self:
        operator = cls.__new__(cls)
        operator._shape = shape
        operator._entries = frozen_array(entries)
        operator._is_hermitian = hermitian or povm
        operator._is_povm = povm

        return operator

    @property
    def shape(self) -> RegisterShape:
        return self._shape

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def is_hermitian(self) -> bool:
        return self._is_hermitian

    @property
    def is_povm(self) -> bool:
        return self._is_povm

    @property
    def dimension(self) -> int:
        return self._shape.dimension

    def __repr__(self) -> str:
        tags = ", ".join(
            tag for tag, is_set in (("hermitian", self._is_hermitian), ("povm", self._is_povm))
            if is_set
        )

        return f"Operator({self._shape}{', ' + tags if tags else str()})"

    def adjoint(self) -> Self:
        return type(self)._trusted(
            self._shape,
            self._entries.conj().T,
            hermitian=self._is_hermitian,
            povm=self._is_povm,
        )


@publicly_immutable
class OutcomeDistribution:
    """Probability distribution over basis outcomes `0..len-1`."""

    def __init__(self, probabilities: Iterable[float] | np.ndarray):
        probabilities = np.array(probabilities, dtype=float).reshape(-1)

        if probabilities.size == 0:
            raise DistributionError("distribution must have at least one outcome")

        if np.any(probabilities < -limits.state_tolerance):
            raise DistributionError("probabilities must be nonnegative")

        total = float(probabilities.sum())

        if abs(total - 1) > limits.state_tolerance:
            raise DistributionError(f"probabilities sum to {total}, not 1")

        self._probabilities = frozen_array(np.clip(probabilities, 0, None), dtype=float)

    @property
    def probabilities(self) -> np.ndarray:
        return self._probabilities

    def __len__(self) -> int:
        return self._probabilities.size

    def __getitem__(self, outcome: int) -> float:
        return float(self._probabilities[outcome])

    def __repr__(self) -> str:
        return f"OutcomeDistribution({np.round(self._probabilities, 6).tolist()})"


@overload
def tensor(first: StateVector, second: StateVector) -> StateVector: ...


@overload
def tensor(first: Operator, second: Operator) -> Operator: ...


@pure
def tensor(first: StateVector | Operator, second: StateVector | Operator) -> StateVector | Operator:
    """
    Function to get the tensor product of two states or two operators.

    The result shape concatenates the factor dimensions. Operator tags
    survive when both factors carry them.
    """

    shape = first.shape.concatenated(second.shape)

    if isinstance(first, StateVector) and isinstance(second, StateVector):
        return StateVector(shape, np.kron(first.amplitudes, second.amplitudes))

    if isinstance(first, Operator) and isinstance(second, Operator):
        return Operator._trusted(
            shape,
            np.kron(first.entries, second.entries),
            hermitian=first.is_hermitian and second.is_hermitian,
            povm=first.is_povm and second.is_povm,
        )

    raise ShapeMismatchError(
        f"cannot tensor {type(first).__name__} with {type(second).__name__}"
    )


@pure
def dft_matrix(dimension: positive_int) -> Operator:
    """
    Function to get the discrete Fourier transform `F[j, k] = w^(jk) / sqrt(d)`
    with `w = exp(2 pi i / d)`.
    """

    if dimension < 1:
        raise ShapeMismatchError(f"Fourier dimension {dimension} must be positive")

    powers = np.outer(np.arange(dimension), np.arange(dimension)) % dimension

    return Operator._trusted(
        RegisterShape((dimension, )),
        np.exp(2j * np.pi * powers / dimension) / sqrt(dimension),
    )


@pure
def swap_operator(dimension: positive_int) -> Operator:
    """Function to get the exchange `S|x>|y> = |y>|x>` on `C^d ⊗ C^d`."""

    if dimension < 1:
        raise ShapeMismatchError(f"swap dimension {dimension} must be positive")

    shape = RegisterShape((dimension, dimension))
    entries = np.zeros((shape.dimension, shape.dimension), dtype=complex)
    first, second = np.divmod(np.arange(shape.dimension), dimension)
    entries[second * dimension + first, first * dimension + second] = 1

    return Operator._trusted(shape, entries, hermitian=True)


@pure
def identity(shape: RegisterShape | Iterable[int]) -> Operator:
    shape = _shape_of(shape)

    return Operator._trusted(shape, np.eye(shape.dimension, dtype=complex), povm=True)


@pure
def projector(state: StateVector) -> Operator:
    """Function to get the rank-one projector `|psi><psi|`."""

    return Operator._trusted(
        state.shape,
        np.outer(state.amplitudes, state.amplitudes.conj()),
        povm=True,
    )


def _check_shapes(operator: Operator, shape: RegisterShape) -> None:
    if operator.shape.dims != shape.dims:
        raise ShapeMismatchError(f"{operator.shape} does not act on {shape}")


@pure
def inner(first: StateVector, second: StateVector) -> complex:
    """Function to get `<first|second>`."""

    if first.shape.dimension != second.shape.dimension:
        raise ShapeMismatchError(f"cannot pair {first.shape} with {second.shape}")

    return complex(np.vdot(first.amplitudes, second.amplitudes))


@pure
def apply(operator: Operator, state: StateVector) -> StateVector:
    """Function to apply a norm-preserving operator to a state."""

    _check_shapes(operator, state.shape)

    return StateVector(state.shape, operator.entries @ state.amplitudes)


def _real_part_of(value: complex) -> float:
    if abs(value.imag) > limits.imaginary_residue:
        raise HermiticityError(f"expectation has imaginary residue {value.imag}")

    return float(value.real)


@pure
def expectation(operator: Operator, state: StateVector) -> float:
    """Function to get `<psi|A|psi>` of a Hermitian operator."""

    _check_shapes(operator, state.shape)

    if not operator.is_hermitian:
        raise HermiticityError("expectation needs a Hermitian-tagged operator")

    return _real_part_of(complex(np.vdot(
        state.amplitudes,
        operator.entries @ state.amplitudes,
    )))


@pure
def density_expectation(operator: Operator, density: Operator) -> float:
    """Function to get `Tr(A rho)` of a Hermitian operator and a density."""

    _check_shapes(operator, density.shape)

    if not operator.is_hermitian:
        raise HermiticityError("expectation needs a Hermitian-tagged operator")

    return _real_part_of(complex(np.einsum("ij,ji->", operator.entries, density.entries)))


@pure
def effective_operator(operator: Operator, fixed: StateVector, *, position: int) -> Operator:
    """
    Function to contract a bipartite operator against a fixed state of one
    of its parts.

    With `position=1` the second part is fixed and the result is
    `(I ⊗ <phi|) A (I ⊗ |phi>)` on the first part, with `position=0` the
    first one.
    """

    dims = operator.shape.dims
    fixed_dims = fixed.shape.dims

    if position == 1 and dims[len(dims) - len(fixed_dims):] == fixed_dims:
        free_dims = dims[:len(dims) - len(fixed_dims)]
    elif position == 0 and dims[:len(fixed_dims)] == fixed_dims:
        free_dims = dims[len(fixed_dims):]
    else:
        raise ShapeMismatchError(
            f"cannot fix {fixed.shape} at position {position} of {operator.shape}"
        )

    free = prod(free_dims)
    held = fixed.shape.dimension
    amplitudes = fixed.amplitudes

    if position == 1:
        blocks = operator.entries.reshape(free, held, free, held)
        contracted = np.tensordot(
            np.tensordot(blocks, amplitudes, axes=(3, 0)), amplitudes.conj(), axes=(1, 0)
        )
    else:
        blocks = operator.entries.reshape(held, free, held, free)
        contracted = np.tensordot(
            np.tensordot(amplitudes.conj(), blocks, axes=(0, 0)), amplitudes, axes=(1, 0)
        )

    if operator.is_hermitian:
        contracted = (contracted + contracted.conj().T) / 2

    return Operator._trusted(
        RegisterShape(free_dims),
        contracted,
        hermitian=operator.is_hermitian,
        povm=operator.is_povm,
    )


@pure
def dense_top_eigenpair(operator: Operator) -> Tuple[float, StateVector]:
    """Function to get the largest eigenpair with a dense Hermitian eigensolver."""

    if not operator.is_hermitian:
        raise HermiticityError("eigenpairs need a Hermitian-tagged operator")

    last = operator.dimension - 1
    values, vectors = eigh(operator.entries, subset_by_index=[last, last])

    return float(values[0]), StateVector.normalized(operator.shape, vectors[:, 0])


def _random_vector(dimension: int, rng: np.random.Generator) -> np.ndarray:
    vector = rng.normal(size=dimension) + 1j * rng.normal(size=dimension)

    return vector / np.linalg.norm(vector)


def _power_iteration(
    matrix: np.ndarray,
    shift: float,
    vector: np.ndarray,
    tolerance: float,
    max_iterations: int,
) -> Optional[Tuple[float, np.ndarray]]:
    for _ in range(max_iterations):
        image = matrix @ vector
        value = float(np.vdot(vector, image).real)

        if np.linalg.norm(image - value * vector) <= tolerance:
            return value, vector

        shifted = image + shift * vector
        norm = np.linalg.norm(shifted)

        if norm == 0:
            return value, vector

        vector = shifted / norm

    return None


@seeded
def top_eigenpair(
    operator: Operator,
    tolerance: float = defaults.eigen_tolerance,
    max_iterations: int = defaults.eigen_max_iterations,
    *,
    rng: Optional[np.random.Generator] = None,
    start: Optional[StateVector] = None,
    restarts: int = defaults.eigen_restarts,
    fallback: bool = True,
    logger: Optional[Logger] = None,
) -> Tuple[float, StateVector]:
    """
    Function to get the largest eigenvalue of a Hermitian operator and a
    normalized eigenvector by shifted power iteration.

    The shift makes the iterated matrix positive semidefinite, so the
    iteration converges to the top of the spectrum and the Rayleigh quotient
    never decreases. A run stops when the residual `|Av - lv|` drops to
    `tolerance`.

    An optional `start` vector is slightly perturbed before use. A run that
    does not converge in `max_iterations` restarts from a fresh random vector
    up to `restarts` times, then falls back to the dense solver, or raises
    `ConvergenceError` when `fallback` is off.
    """

    if not operator.is_hermitian:
        raise HermiticityError("eigenpairs need a Hermitian-tagged operator")

    rng = np.random.default_rng(defaults.seed) if rng is None else rng
    matrix = operator.entries
    off_diagonal = np.sum(np.abs(matrix), axis=1) - np.abs(np.diag(matrix))
    shift = max(0.0, float(np.max(off_diagonal - np.diag(matrix).real)))

    if start is None:
        vector = _random_vector(operator.dimension, rng)
    else:
        _check_shapes(operator, start.shape)
        vector = start.amplitudes + 1e-6 * _random_vector(operator.dimension, rng)
        vector = vector / np.linalg.norm(vector)

    for attempt in range(restarts + 1):
        converged = _power_iteration(matrix, shift, vector, tolerance, max_iterations)

        if converged is not None:
            value, vector = converged

            return value, StateVector.normalized(operator.shape, vector)

        vector = _random_vector(operator.dimension, rng)

    if not fallback:
        raise ConvergenceError(
            f"power iteration did not converge in {restarts + 1} runs of"
            f" {max_iterations} iterations"
        )

    logger_or_silent(logger)(
        f"power iteration on {operator.shape} fell back to the dense solver"
    )

    return dense_top_eigenpair(operator)


@pure
def measure_distribution(
    state: StateVector,
    basis_change: Optional[Operator] = None,
) -> OutcomeDistribution:
    """
    Function to get the outcome distribution of measuring a state in the
    basis `{B|k>}`, i.e. `p[k] = |<k|B†|psi>|^2`.

    Without a basis change measures in the computational basis. Values below
    the numerical zero are dropped.
    """

    amplitudes = state.amplitudes

    if basis_change is not None:
        _check_shapes(basis_change, state.shape)
        amplitudes = basis_change.entries.conj().T @ amplitudes

    probabilities = np.abs(amplitudes) ** 2
    probabilities[probabilities < limits.numerical_zero] = 0

    return OutcomeDistribution(probabilities / probabilities.sum())


@seeded
def sample(distribution: OutcomeDistribution, rng: np.random.Generator) -> int:
    """Function to draw one outcome from a distribution."""

    return int(rng.choice(len(distribution), p=distribution.probabilities))


@seeded
def sample_many(
    distribution: OutcomeDistribution,
    count: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Function to draw independent outcomes from a distribution at once."""

    return rng.choice(len(distribution), size=count, p=distribution.probabilities)


@pure
def l1_distance(first: OutcomeDistribution, second: OutcomeDistribution) -> float:
    """Function to get the statistical distance `1/2 sum |p - q|`."""

    if len(first) != len(second):
        raise DistributionError(
            f"distributions over {len(first)} and {len(second)} outcomes"
        )

    return float(np.abs(first.probabilities - second.probabilities).sum() / 2)


@pure
def pure_distance(first: StateVector, second: StateVector) -> float:
    """Function to get the trace distance `sqrt(1 - |<psi|phi>|^2)` of pure states."""

    return sqrt(max(0.0, 1 - abs(inner(first, second)) ** 2))


@pure
def basis_state(shape: RegisterShape | Iterable[int], index: int) -> StateVector:
    shape = _shape_of(shape)

    if not 0 <= index < shape.dimension:
        raise ShapeMismatchError(f"basis index {index} outside {shape}")

    amplitudes = np.zeros(shape.dimension, dtype=complex)
    amplitudes[index] = 1

    return StateVector(shape, amplitudes)


@pure
def uniform_state(shape: RegisterShape | Iterable[int]) -> StateVector:
    shape = _shape_of(shape)

    return StateVector(shape, np.full(shape.dimension, 1 / sqrt(shape.dimension)))


@seeded
def random_state(
    shape: RegisterShape | Iterable[int],
    rng: np.random.Generator,
) -> StateVector:
    """Function to draw a state from the unitarily invariant (Haar) measure."""

    shape = _shape_of(shape)

    return StateVector.normalized(shape, _random_vector(shape.dimension, rng))


def seed_streams(seed: int | np.random.SeedSequence, count: int) -> Tuple[np.random.Generator, ...]:
    """Function to get disjoint reproducible generators spawned from a seed."""

    sequence = (
        seed
        if isinstance(seed, np.random.SeedSequence)
        else np.random.SeedSequence(seed)
    )

    return tuple(map(np.random.default_rng, sequence.spawn(count)))
