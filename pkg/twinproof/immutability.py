from functools import wraps
from typing import Any, TypeVar

import numpy as np


__all__ = ("publicly_immutable", "frozen_array")


_TypeT = TypeVar("_TypeT", bound=type)


def publicly_immutable(class_: _TypeT) -> _TypeT:
    """
    Decorator for an input class that forbids it change its public attributes.
    Public attributes are those whose names do not start with `_`.
    """

    old_setattr = class_.__setattr__

    @wraps(old_setattr)
    def new_setattr(
        instance: object,
        attribute_name: str,
        attribute_value: Any,
    ) -> None:
        if attribute_name and attribute_name[0] != '_':
            raise AttributeError(
                f"cannot set '{attribute_name}' attribute of publicly immutable"
                f" type '{class_.__name__}'"
            )

        return old_setattr(instance, attribute_name, attribute_value)

    class_.__setattr__ = new_setattr

    return class_


def frozen_array(values: Any, *, dtype: Any = complex) -> np.ndarray:
    """
    Function to get a read-only copy of an input array-like value.

    Copies so that later writes to the original buffer cannot reach the
    frozen one.
    """

    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)

    return array
