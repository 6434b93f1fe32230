from datetime import datetime
from math import inf
from typing import Iterable, Tuple, Optional, TextIO


__all__ = ("Logger", "silent", "logger_or_silent")


class Logger:
    """
    Class for logging any messages.

    Stores messages via the input value of its call, optionally with a
    severity (`info` by default) that prefixes the stored line.

    Has the ability to clear logs when their limit is reached, controlled by the
    `maximum_log_count` attribute and the keyword argument.

    Able to save the date of logging in the logs. Controlled by `is_date_logging`
    attribute and keyword argument.

    When `stream` is given, echoes every stored line to it.
    """

    def __init__(
        self,
        logs: Iterable[str] = tuple(),
        *,
        maximum_log_count: int | float = inf,
        is_date_logging: bool = False,
        stream: Optional[TextIO] = None,
    ):
        self._logs = list()
        self.maximum_log_count = maximum_log_count
        self.is_date_logging = is_date_logging
        self.stream = stream

        for log in logs:
            self(log)

    @property
    def logs(self) -> Tuple[str, ...]:
        return tuple(self._logs)

    def __call__(self, message: str, *, severity: str = "info") -> None:
        line = f"{severity}: {message}"

        if self.is_date_logging:
            line = f"[{datetime.now()}] {line}"

        if self.maximum_log_count > 0:
            self._logs.append(line)

        if len(self._logs) > self.maximum_log_count:
            self._logs = self._logs[len(self._logs) - int(self.maximum_log_count):]

        if self.stream is not None:
            print(line, file=self.stream)

    def warning(self, message: str) -> None:
        self(message, severity="warning")


silent = Logger(maximum_log_count=0)


def logger_or_silent(logger: Optional[Logger]) -> Logger:
    return silent if logger is None else logger
