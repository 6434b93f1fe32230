from numbers import Number
from types import MappingProxyType
from typing import TypeAlias, Any, Callable, Type
from unittest import TestCase

import numpy as np
from pyannotating import Subgroup


__all__ = ("case_of", "test_case_pack", "is_close")


test_case_pack: TypeAlias = tuple[Callable[..., Any], Any]

_character_numbers = Subgroup(int, lambda number: number in range(0, 10))

_endings_by_ordinal_numbers: MappingProxyType[_character_numbers, str]
_endings_by_ordinal_numbers = MappingProxyType({
    0: 'th',
    1: 'st',
    2: 'nd',
    3: 'rd',
    4: 'th',
    5: 'th',
    6: 'th',
    7: 'th',
    8: 'th',
    9: 'th',
})


def _ordinal_of(number: int) -> str:
    return f"{number}{_endings_by_ordinal_numbers[int(str(number)[-1:])]}"


def is_close(result: Any, expected: Any, *, atol: float = 1e-9) -> bool:
    """
    Function to compare a result with an expected value, numerically when
    both are numbers or arrays and by equality otherwise.
    """

    if isinstance(expected, bool) or isinstance(result, bool):
        return result == expected

    if isinstance(expected, Number | np.ndarray) or isinstance(result, np.ndarray):
        return bool(np.allclose(result, expected, rtol=0, atol=atol))

    if isinstance(expected, tuple | list) and isinstance(result, tuple | list):
        return len(result) == len(expected) and all(
            is_close(item, expected_item, atol=atol)
            for item, expected_item in zip(result, expected)
        )

    return result == expected


def _calling_test_method_of(
    test_pack: test_case_pack,
    atol: float,
) -> Callable[[TestCase], None]:
    def testing_method(test_case: TestCase) -> None:
        result = test_pack[0]()

        test_case.assertTrue(
            is_close(result, test_pack[1], atol=atol),
            f"{result!r} is not close to {test_pack[1]!r}",
        )

    return testing_method


def case_of(
    *test_packs: test_case_pack | Callable[..., Any],
    atol: float = 1e-9,
) -> Type[TestCase]:
    """
    Function to create a `TestCase` type with input tests.

    Numbers and arrays are compared with an absolute tolerance `atol`,
    everything else by equality. A bare action is expected to return `True`.
    """

    return type(
        "TestByCalling",
        (TestCase, ),
        {
            f"test_{_ordinal_of(test_pack_index)}_action": _calling_test_method_of(
                test_pack,
                atol,
            )
            for test_pack_index, test_pack in enumerate(map(
                lambda p: p if isinstance(p, tuple | list) else (p, True),
                test_packs,
            ))
        }
        | {
            "__doc__": (
                """
                `TestCase` class generated from
                `twinproof.testing.case_of` for some actions
                """
            )
        }
    )
