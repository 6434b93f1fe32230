from datetime import datetime, timedelta
from typing import Any, Callable, Tuple, TypeVar


__all__ = ("time_of", "timed")


_R = TypeVar("_R")


def time_of(action: Callable[[], Any]) -> timedelta:
    """Function to get run time measurement of an input action."""

    return timed(action)[1]


def timed(action: Callable[[], _R]) -> Tuple[_R, timedelta]:
    """Function to call an input action and measure its run time."""

    start = datetime.now()
    result = action()

    return result, datetime.now() - start
