"""Prometheus collectors for guess campaigns.

Each campaign owns a private :class:`CollectorRegistry` so that independent
runs (and tests) never share counters.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, Optional

from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile

logger = logging.getLogger(__name__)

GUESS_STATUSES = ("solved", "inconsistent", "indeterminate", "timeout")


class CampaignMetrics:
    """Guess counters and a solve-time histogram for one campaign."""

    def __init__(self, registry: Optional[CollectorRegistry] = None) -> None:
        self.registry = registry or CollectorRegistry()
        self.guesses = Counter(
            "diffcipher_guesses",
            "Guesses processed, by outcome.",
            ["status"],
            registry=self.registry,
        )
        self.solve_seconds = Histogram(
            "diffcipher_guess_seconds",
            "Wall-clock time per guess solve.",
            buckets=(0.001, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 30.0, 120.0),
            registry=self.registry,
        )
        for status in GUESS_STATUSES:
            self.guesses.labels(status=status)

    def observe(self, status: str, seconds: float) -> None:
        self.guesses.labels(status=status).inc()
        self.solve_seconds.observe(seconds)

    def snapshot(self) -> Dict[str, float]:
        values: Dict[str, float] = {}
        for status in GUESS_STATUSES:
            sample = self.registry.get_sample_value(
                "diffcipher_guesses_total", {"status": status}
            )
            values[status] = sample or 0.0
        return values

    def write(self, path: Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        write_to_textfile(str(path), self.registry)
        logger.info("Wrote campaign metrics to %s", path)


__all__ = ["CampaignMetrics", "GUESS_STATUSES"]
