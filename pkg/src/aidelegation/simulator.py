"""Seeded Monte Carlo simulation of the engineer, PS and FS processes.

Randomness: trials are cut into fixed chunks of ``CHUNK_SIZE``. Chunk ``k``
draws from ``numpy.random.Philox`` (Philox-4x32-10, counter based) seeded
with ``SeedSequence([seed, k])``. Each chunk is a pure function of
``(seed, k)``, and chunks are reduced to integer outcome counts. Integer sums
do not depend on order, so results are bit-identical for any number of
workers. ``RNG_ALGORITHM`` names the scheme and must change if it does.

Mean and standard error are computed from the counts, never from a running
floating-point sum.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import core
from .core import DelegationParams, Mode
from .errors import ConfigError

__all__ = [
    "CHUNK_SIZE",
    "RNG_ALGORITHM",
    "SimulationConfig",
    "OutcomeCounts",
    "SimulationResult",
    "DeviationReport",
    "simulate",
    "compare_to_analytic",
    "outcome_probabilities",
]

CHUNK_SIZE = 1 << 16
RNG_ALGORITHM = f"numpy-Philox4x32-SeedSequence([seed,chunk])-chunk{CHUNK_SIZE}-v1"
_MAX_SEED = (1 << 64) - 1


@dataclass(frozen=True)
class SimulationConfig:
    params: DelegationParams
    mode: Mode
    trials: int
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", Mode(self.mode))
        if isinstance(self.trials, bool) or not isinstance(self.trials, (int, np.integer)):
            raise ConfigError(f"trials must be an integer, got {self.trials!r}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        if not 0 <= self.seed <= _MAX_SEED:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.mode is Mode.FS:
            self.params.require_beta()

    def as_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "trials": int(self.trials),
            "seed": int(self.seed),
            "params": self.params.as_dict(),
        }


@dataclass(frozen=True)
class OutcomeCounts:
    """Per-outcome trial counts.

    PS runs fill ``correct``/``incorrect``; FS runs fill the four
    accept/reject cells; engineer runs leave everything at zero.
    """

    correct: int = 0
    incorrect: int = 0
    true_accept: int = 0
    false_accept: int = 0
    false_reject: int = 0
    true_reject: int = 0

    def __add__(self, other: "OutcomeCounts") -> "OutcomeCounts":
        return OutcomeCounts(
            *(a + b for a, b in zip(self.as_tuple(), other.as_tuple()))
        )

    def as_tuple(self) -> tuple[int, ...]:
        return (
            self.correct,
            self.incorrect,
            self.true_accept,
            self.false_accept,
            self.false_reject,
            self.true_reject,
        )

    def total(self) -> int:
        return sum(self.as_tuple())

    def as_dict(self) -> dict[str, int]:
        return {
            "correct": self.correct,
            "incorrect": self.incorrect,
            "true_accept": self.true_accept,
            "false_accept": self.false_accept,
            "false_reject": self.false_reject,
            "true_reject": self.true_reject,
        }


@dataclass(frozen=True)
class SimulationResult:
    config: SimulationConfig
    counts: OutcomeCounts
    mean_payoff: float
    std_error: float
    elapsed: float = field(default=0.0, compare=False)

    def as_dict(self, include_elapsed: bool = False) -> dict:
        out = {
            "config": self.config.as_dict(),
            "rng": RNG_ALGORITHM,
            "counts": self.counts.as_dict(),
            "mean_payoff": self.mean_payoff,
            "std_error": self.std_error,
        }
        if include_elapsed:
            out["elapsed_seconds"] = self.elapsed
        return out


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def _run_chunk(config: SimulationConfig, index: int, size: int) -> OutcomeCounts:
    rng = _chunk_rng(config.seed, index)
    p = config.params
    correct = rng.random(size) < p.alpha
    n_correct = int(np.count_nonzero(correct))
    if config.mode is Mode.PS:
        return OutcomeCounts(correct=n_correct, incorrect=size - n_correct)
    verdict = rng.random(size)
    # Correct queries are accepted with prob beta, incorrect ones with 1 - beta.
    accepted = np.where(correct, verdict < p.beta, verdict < 1.0 - p.beta)
    true_accept = int(np.count_nonzero(correct & accepted))
    false_accept = int(np.count_nonzero(~correct & accepted))
    return OutcomeCounts(
        true_accept=true_accept,
        false_reject=n_correct - true_accept,
        false_accept=false_accept,
        true_reject=size - n_correct - false_accept,
    )


def _payoff_table(config: SimulationConfig, counts: OutcomeCounts) -> list[tuple[float, int]]:
    p = config.params
    if config.mode is Mode.PS:
        return [(p.gain, counts.correct), (p.loss, counts.incorrect)]
    return [
        (p.gain, counts.true_accept),
        (p.loss, counts.false_accept),
        (0.0, counts.false_reject + counts.true_reject),
    ]


def _moments(table: list[tuple[float, int]], n: int) -> tuple[float, float]:
    mean = math.fsum(x * k for x, k in table) / n
    if n < 2:
        return mean, 0.0
    ss = math.fsum(k * (x - mean) ** 2 for x, k in table)
    return mean, math.sqrt(ss / (n - 1)) / math.sqrt(n)


def simulate(config: SimulationConfig, workers: Optional[int] = None) -> SimulationResult:
    """Run ``config.trials`` independent single-cycle trials.

    Args:
        config: Parameters, mode, trial count and seed.
        workers: Number of threads to spread chunks over. ``None`` or ``1``
            runs serially. The result does not depend on this value.

    Returns:
        Counts, mean payoff and its standard error (sample standard
        deviation over ``sqrt(trials)``).
    """
    start = time.perf_counter()
    if config.mode is Mode.ENGINEER:
        return SimulationResult(
            config, OutcomeCounts(), config.params.v, 0.0, time.perf_counter() - start
        )
    n_chunks = -(-config.trials // CHUNK_SIZE)
    sizes = [CHUNK_SIZE] * (n_chunks - 1) + [config.trials - CHUNK_SIZE * (n_chunks - 1)]
    jobs = list(enumerate(sizes))
    if workers is None or workers <= 1 or n_chunks == 1:
        parts = [_run_chunk(config, i, s) for i, s in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _run_chunk(config, *job), jobs))
    counts = OutcomeCounts()
    for part in parts:
        counts = counts + part
    mean, se = _moments(_payoff_table(config, counts), config.trials)
    return SimulationResult(config, counts, mean, se, time.perf_counter() - start)


def outcome_probabilities(params: DelegationParams, mode: Mode) -> dict[str, float]:
    """Analytic probability of each outcome cell for ``mode``."""
    a = params.alpha
    if mode is Mode.ENGINEER:
        return {}
    if mode is Mode.PS:
        return {"correct": a, "incorrect": 1.0 - a}
    b = params.require_beta()
    return {
        "true_accept": a * b,
        "false_accept": (1.0 - a) * (1.0 - b),
        "false_reject": a * (1.0 - b),
        "true_reject": (1.0 - a) * b,
    }


@dataclass(frozen=True)
class DeviationReport:
    analytic_mean: float
    empirical_mean: float
    deviation: float
    z_score: float
    # outcome name -> (empirical frequency, analytic probability)
    outcomes: dict[str, tuple[float, float]]

    def as_dict(self) -> dict:
        return {
            "analytic_mean": self.analytic_mean,
            "empirical_mean": self.empirical_mean,
            "deviation": self.deviation,
            "z_score": self.z_score,
            "outcomes": {
                k: {"empirical": e, "analytic": a} for k, (e, a) in self.outcomes.items()
            },
        }


def compare_to_analytic(result: SimulationResult) -> DeviationReport:
    """Compare a simulation against the closed-form expectation.

    ``z_score`` is the deviation in units of standard error; it is 0 when both
    are zero and infinite when only the standard error is.
    """
    config = result.config
    params = config.params
    if config.mode is Mode.ENGINEER:
        analytic = params.v
    elif config.mode is Mode.PS:
        analytic = core.expected_value_ps(params)
    else:
        analytic = core.expected_value_fs(params)
    deviation = result.mean_payoff - analytic
    if result.std_error > 0:
        z = deviation / result.std_error
    else:
        z = 0.0 if deviation == 0 else math.copysign(math.inf, deviation)
    counts = result.counts.as_dict()
    outcomes = {
        name: (counts[name] / config.trials, prob)
        for name, prob in outcome_probabilities(params, config.mode).items()
    }
    return DeviationReport(analytic, result.mean_payoff, deviation, z, outcomes)
