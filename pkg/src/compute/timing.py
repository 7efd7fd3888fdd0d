"""Wall-clock accounting per training phase."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator


@dataclass
class PhaseTimer:
    """Accumulates seconds per named phase (binning, sketch, histogram, ...)."""

    seconds: dict[str, float] = field(default_factory=dict)

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.seconds[name] = self.seconds.get(name, 0.0) + time.perf_counter() - start

    def as_dict(self) -> dict[str, float]:
        return dict(sorted(self.seconds.items()))


class _NullTimer(PhaseTimer):
    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        yield


def null_timer() -> PhaseTimer:
    """Timer that records nothing."""
    return _NullTimer()
