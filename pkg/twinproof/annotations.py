from typing import Any, Tuple, TypeVar

from pyannotating import FormalAnnotation, Subgroup, Special


__all__ = (
    "Special",
    "positive_int",
    "color",
    "probability",
    "bit_count",
    "CallableFormalAnnotation",
    "notes_of",
    "pure",
    "seeded",
    "V",
)


V = TypeVar('V')


positive_int = Subgroup(int, lambda number: number >= 1)

color = Subgroup(int, lambda number: number in (0, 1, 2))

probability = Subgroup(float, lambda number: 0 <= number <= 1)

bit_count = Subgroup(int, lambda number: 1 <= number <= 4096)


class CallableFormalAnnotation(FormalAnnotation):
    """
    `FormalAnnotation` class for annotation via call.

    Annotating instance is stored in an annotated value as a reference in the
    `__notes__` attribute when called.
    """

    def __call__(self, value: V) -> V:
        notes = (*notes_of(value), self)

        try:
            value.__notes__ = notes
        except AttributeError:
            ...

        return value


def notes_of(value: Any) -> Tuple:
    """Function to get annotation notes from an input value."""

    return tuple(value.__notes__) if hasattr(value, "__notes__") else tuple()


pure = CallableFormalAnnotation(
    """
    Formal annotation to indicate that an action always returns the same
    result with the same arguments and does not interact with any state.
    """
)

seeded = CallableFormalAnnotation(
    """
    Formal annotation to indicate that an action draws randomness only from
    an input seed or generator, so equal seeds give equal results.
    """
)
