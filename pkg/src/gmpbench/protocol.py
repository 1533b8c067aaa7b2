"""Evaluation budget, change scheduling, and performance indicators.

Time is measured purely in fitness evaluations. A session spends exactly
``change_frequency`` evaluations per environment; the evaluation that fills
an environment's quota is scored under that environment, after which the
landscape silently advances (solvers get no notification; change detection
is their job). Errors are best-so-far within the current environment, so the
per-evaluation error sequence is non-increasing between changes.
"""

from __future__ import annotations

import math

import numpy as np

from .dynamics import advance_environment, init_landscape
from .landscape import ScenarioConfig, evaluate_raw

__all__ = [
    "ScenarioComplete",
    "IncompleteLedgerError",
    "EvaluationLedger",
    "BenchmarkSession",
    "offline_error",
    "best_before_change_error",
]


class IncompleteLedgerError(ValueError):
    """An indicator was requested from a partial run without ``partial=True``."""


class ScenarioComplete(Exception):
    """The evaluation budget is spent. Carries the final indicators."""

    def __init__(self, offline_error: float, best_before_change_error: float):
        super().__init__(
            f"scenario complete: offline error {offline_error:.6g}, "
            f"best-before-change error {best_before_change_error:.6g}")
        self.offline_error = offline_error
        self.best_before_change_error = best_before_change_error


class EvaluationLedger:
    """Per-evaluation error stream plus per-environment bests.

    The ledger is decoupled from any landscape: it consumes a stream of
    (value, environment optimum) pairs and does the best-so-far bookkeeping.
    Raw values and optima are kept alongside the error stream so indicators
    can be audited by an independent pass.
    """

    def __init__(self, change_frequency: int, num_environments: int):
        if change_frequency < 1 or num_environments < 1:
            raise ValueError("change_frequency and num_environments must be >= 1")
        self.change_frequency = change_frequency
        self.num_environments = num_environments
        self.capacity = change_frequency * num_environments
        self.errors = np.full(self.capacity, np.nan)
        self.values = np.full(self.capacity, np.nan)
        self.optima = np.full(self.capacity, np.nan)
        self.env_final_errors = np.full(num_environments, np.nan)
        self.total = 0
        self.env_eval_count = 0
        self.environments_completed = 0
        self._best_value = -math.inf

    @property
    def complete(self) -> bool:
        return self.total == self.capacity

    def record(self, value: float, optimum_value: float) -> float:
        """Record one evaluation; returns the best-so-far error it leaves."""
        if self.total >= self.capacity:
            raise ValueError("ledger is full")
        if value > self._best_value:
            self._best_value = value
        error = optimum_value - self._best_value
        self.errors[self.total] = error
        self.values[self.total] = value
        self.optima[self.total] = optimum_value
        self.total += 1
        self.env_eval_count += 1
        if self.env_eval_count == self.change_frequency:
            self.env_final_errors[self.environments_completed] = error
            self.environments_completed += 1
            self.env_eval_count = 0
            self._best_value = -math.inf
        return float(error)


def offline_error(ledger: EvaluationLedger, partial: bool = False) -> float:
    """Mean best-so-far error over all evaluations."""
    if not ledger.complete and not partial:
        raise IncompleteLedgerError(
            f"ledger holds {ledger.total} of {ledger.capacity} evaluations")
    if ledger.total == 0:
        raise IncompleteLedgerError("ledger is empty")
    return float(np.mean(ledger.errors[: ledger.total]))


def best_before_change_error(ledger: EvaluationLedger, partial: bool = False) -> float:
    """Mean over environments of the final best-so-far error in each."""
    if not ledger.complete and not partial:
        raise IncompleteLedgerError(
            f"ledger holds {ledger.total} of {ledger.capacity} evaluations")
    if ledger.environments_completed == 0:
        raise IncompleteLedgerError("no environment has completed yet")
    return float(np.mean(ledger.env_final_errors[: ledger.environments_completed]))


class BenchmarkSession:
    """Black-box face of one benchmark run.

    Solvers may call :meth:`evaluate` and read :attr:`bounds`,
    :attr:`dimension` and :attr:`budget_remaining`; the optimum and the change
    schedule are deliberately not part of that surface. Exactly one solver
    drives a session at a time; independent sessions share nothing.
    """

    def __init__(self, config: ScenarioConfig):
        config.validate()
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.landscape = init_landscape(config, self.rng)
        self.ledger = EvaluationLedger(config.change_frequency, config.num_environments)

    @property
    def dimension(self) -> int:
        return self.config.dimension

    @property
    def bounds(self) -> tuple[float, float]:
        return self.config.search_range

    @property
    def total_evaluations(self) -> int:
        return self.ledger.total

    @property
    def budget_remaining(self) -> int:
        return self.ledger.capacity - self.ledger.total

    def evaluate(self, x) -> float:
        """Objective value of ``x`` under the current environment.

        The evaluation that exhausts an environment's quota is scored there;
        the landscape then advances without notice. Raises
        :class:`ScenarioComplete` once the total budget is spent.
        """
        if self.ledger.complete:
            raise ScenarioComplete(offline_error(self.ledger),
                                   best_before_change_error(self.ledger))
        value = evaluate_raw(x, self.landscape)
        self.ledger.record(value, self.landscape.optimum_value)
        if (self.ledger.env_eval_count == 0
                and self.ledger.environments_completed < self.config.num_environments):
            self.landscape = advance_environment(self.landscape, self.config, self.rng)
        return value

    def indicators(self, partial: bool = False) -> tuple[float, float]:
        """(offline error, best-before-change error) for this run."""
        return (offline_error(self.ledger, partial=partial),
                best_before_change_error(self.ledger, partial=partial))
