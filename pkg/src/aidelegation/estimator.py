"""Estimate accuracy and validation effectiveness from logged trials.

Each trial records whether the generated query was correct (checked against a
gold result) and, for FS trials, the user's verdict. Accuracy is the share of
correct queries. Validation effectiveness is the share of verdicts that
classified the query correctly, pooling correct-accepted and
incorrect-rejected.

Intervals are Wilson score intervals::

    center = (p + z^2 / 2n) / (1 + z^2 / n)
    half   = z / (1 + z^2 / n) * sqrt(p (1 - p) / n + z^2 / 4n^2)

For 91 of 100 at 95% (z = 1.95996) this gives (0.8377, 0.9519).

Treating the rates as uncertain, and the conservative lower-bound stance,
extend the original known-probability model. Outputs say so in their
metadata.
"""

from __future__ import annotations

import csv
import enum
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from statistics import NormalDist
from typing import Iterable, Optional, Sequence, Union

from . import core
from .core import DelegationParams, PolicyDecision
from .errors import IngestionError, InsufficientDataError, ParameterDomainError

__all__ = [
    "Verdict",
    "Stance",
    "TrialRecord",
    "RateEstimate",
    "EstimatedDecision",
    "wilson_interval",
    "estimate_alpha",
    "estimate_beta",
    "decide_from_estimates",
    "open_interval_repair",
    "read_trials",
    "parse_jsonl",
    "parse_csv",
]

log = logging.getLogger(__name__)

EXTENSION_NOTE = (
    "alpha and beta are estimated from trial logs with Wilson intervals; "
    "the underlying model assumes they are known exactly"
)


class Verdict(str, enum.Enum):
    ACCEPTED = "AcceptedAsCorrect"
    REJECTED = "RejectedAsIncorrect"


class Stance(str, enum.Enum):
    POINT = "point"
    CONSERVATIVE = "conservative"


@dataclass(frozen=True)
class TrialRecord:
    trial_id: str
    generated_correct: bool
    validation_verdict: Optional[Verdict] = None

    def __post_init__(self) -> None:
        if self.validation_verdict is not None:
            object.__setattr__(self, "validation_verdict", Verdict(self.validation_verdict))

    @property
    def validation_succeeded(self) -> Optional[bool]:
        if self.validation_verdict is None:
            return None
        return self.generated_correct == (self.validation_verdict is Verdict.ACCEPTED)

    def as_dict(self) -> dict:
        verdict = self.validation_verdict.value if self.validation_verdict else None
        return {
            "trial_id": self.trial_id,
            "generated_correct": self.generated_correct,
            "validation_verdict": verdict,
        }


def _z(confidence: float) -> float:
    if not 0.0 < confidence < 1.0:
        raise ParameterDomainError(f"confidence must be in (0, 1), got {confidence!r}")
    return NormalDist().inv_cdf(0.5 + confidence / 2.0)


def wilson_interval(successes: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Raises:
        InsufficientDataError: if ``n < 1``.
    """
    if n < 1:
        raise InsufficientDataError("cannot form an interval from zero trials")
    if not 0 <= successes <= n:
        raise ParameterDomainError(f"successes must be in [0, n], got {successes} of {n}")
    z = _z(confidence)
    p = successes / n
    z2n = z * z / n
    denom = 1.0 + z2n
    center = (p + z2n / 2.0) / denom
    half = z / denom * math.sqrt(p * (1.0 - p) / n + z2n / (4.0 * n))
    low = 0.0 if successes == 0 else max(0.0, min(p, center - half))
    high = 1.0 if successes == n else min(1.0, max(p, center + half))
    return low, high


@dataclass(frozen=True)
class RateEstimate:
    successes: int
    n: int
    point: float
    interval: tuple[float, float]
    confidence: float

    @classmethod
    def from_counts(cls, successes: int, n: int, confidence: float = 0.95) -> "RateEstimate":
        interval = wilson_interval(successes, n, confidence)
        return cls(successes, n, successes / n, interval, confidence)

    @property
    def low(self) -> float:
        return self.interval[0]

    @property
    def high(self) -> float:
        return self.interval[1]

    def as_dict(self) -> dict:
        return {
            "successes": self.successes,
            "n": self.n,
            "point": self.point,
            "interval": list(self.interval),
            "confidence": self.confidence,
        }


def _check_unique(log_: Sequence[TrialRecord]) -> None:
    seen: set[str] = set()
    for rec in log_:
        if rec.trial_id in seen:
            raise IngestionError(f"duplicate trial_id {rec.trial_id!r}")
        seen.add(rec.trial_id)


def estimate_alpha(log_: Sequence[TrialRecord], confidence: float = 0.95) -> RateEstimate:
    """Share of trials whose generated query was correct."""
    _check_unique(log_)
    if not log_:
        raise InsufficientDataError("cannot estimate alpha from an empty log")
    hits = sum(1 for r in log_ if r.generated_correct)
    return RateEstimate.from_counts(hits, len(log_), confidence)


def estimate_beta(log_: Sequence[TrialRecord], confidence: float = 0.95) -> RateEstimate:
    """Share of verdicts that classified the query correctly.

    Records without a verdict are ignored.
    """
    _check_unique(log_)
    outcomes = [r.validation_succeeded for r in log_ if r.validation_verdict is not None]
    if not outcomes:
        raise InsufficientDataError("cannot estimate beta: no record carries a validation verdict")
    return RateEstimate.from_counts(sum(outcomes), len(outcomes), confidence)


def open_interval_repair(value: float, n: int) -> float:
    """Move 0 or 1 to ``1/(2n)`` or ``1 - 1/(2n)``; other values pass through."""
    if value <= 0.0:
        return 1.0 / (2 * n)
    if value >= 1.0:
        return 1.0 - 1.0 / (2 * n)
    return value


@dataclass(frozen=True)
class EstimatedDecision:
    """A policy decision made from estimated rates, plus provenance."""

    decision: PolicyDecision
    stance: Stance
    alpha_estimate: RateEstimate
    beta_estimate: Optional[RateEstimate]
    alpha_used: float
    beta_used: Optional[float]
    repairs: tuple[str, ...] = ()
    note: str = field(default=EXTENSION_NOTE)

    def as_dict(self) -> dict:
        return {
            "decision": self.decision.as_dict(),
            "stance": self.stance.value,
            "alpha_estimate": self.alpha_estimate.as_dict(),
            "beta_estimate": self.beta_estimate.as_dict() if self.beta_estimate else None,
            "alpha_used": self.alpha_used,
            "beta_used": self.beta_used,
            "repairs": list(self.repairs),
            "extension": True,
            "note": self.note,
        }


def decide_from_estimates(
    alpha_est: RateEstimate,
    beta_est: Optional[RateEstimate],
    v: float,
    gain: float = 1.0,
    loss: float = -1.0,
    stance: Union[Stance, str] = Stance.POINT,
) -> EstimatedDecision:
    """Run the policy decision on estimated rates.

    ``Stance.POINT`` uses the point estimates. ``Stance.CONSERVATIVE`` uses the
    lower interval bounds, which lowers every AI expected value and so leans
    toward the engineer. Values of exactly 0 or 1 are repaired into the open
    interval first; each repair is recorded and logged.
    """
    stance = Stance(stance)
    repairs = []

    def pick(name: str, est: RateEstimate) -> float:
        raw = est.point if stance is Stance.POINT else est.low
        used = open_interval_repair(raw, est.n)
        if used != raw:
            msg = f"{name}: {raw!r} moved to {used!r} (n={est.n})"
            log.warning("open-interval repair %s", msg)
            repairs.append(msg)
        return used

    alpha = pick("alpha", alpha_est)
    beta = pick("beta", beta_est) if beta_est is not None else None
    decision = core.decide_policy(DelegationParams(alpha, beta, v, gain, loss))
    return EstimatedDecision(
        decision=decision,
        stance=stance,
        alpha_estimate=alpha_est,
        beta_estimate=beta_est,
        alpha_used=alpha,
        beta_used=beta,
        repairs=tuple(repairs),
    )


_FIELDS = ("trial_id", "generated_correct", "validation_verdict")


def _record(obj: dict, lineno: int) -> TrialRecord:
    unknown = set(obj) - set(_FIELDS)
    if unknown:
        raise IngestionError(f"unknown field(s) {sorted(unknown)}", lineno)
    trial_id = obj.get("trial_id")
    if not isinstance(trial_id, str) or not trial_id:
        raise IngestionError("trial_id must be a non-empty string", lineno)
    correct = obj.get("generated_correct")
    if not isinstance(correct, bool):
        raise IngestionError("generated_correct must be a boolean", lineno)
    verdict = obj.get("validation_verdict")
    if verdict is not None:
        try:
            verdict = Verdict(verdict)
        except ValueError:
            allowed = ", ".join(v.value for v in Verdict)
            raise IngestionError(
                f"validation_verdict must be one of {allowed} or null, got {verdict!r}", lineno
            ) from None
    return TrialRecord(trial_id, correct, verdict)


def _finish(records: list[tuple[int, TrialRecord]]) -> list[TrialRecord]:
    seen: dict[str, int] = {}
    for lineno, rec in records:
        if rec.trial_id in seen:
            raise IngestionError(
                f"duplicate trial_id {rec.trial_id!r} (first seen on line {seen[rec.trial_id]})",
                lineno,
            )
        seen[rec.trial_id] = lineno
    return [rec for _, rec in records]


def parse_jsonl(lines: Iterable[str]) -> list[TrialRecord]:
    """Parse JSON Lines; blank lines are skipped."""
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestionError(f"invalid JSON ({exc.msg})", lineno) from None
        if not isinstance(obj, dict):
            raise IngestionError("each line must be a JSON object", lineno)
        records.append((lineno, _record(obj, lineno)))
    return _finish(records)


_BOOL_TEXT = {"true": True, "1": True, "false": False, "0": False}


def parse_csv(lines: Iterable[str]) -> list[TrialRecord]:
    """Parse CSV with a header naming the log fields; empty verdict means none."""
    reader = csv.DictReader(lines)
    if reader.fieldnames is None:
        return []
    missing = {"trial_id", "generated_correct"} - set(reader.fieldnames)
    if missing:
        raise IngestionError(f"missing column(s) {sorted(missing)}", 1)
    records = []
    for row in reader:
        lineno = reader.line_num
        if None in row:
            raise IngestionError("too many fields", lineno)
        text = (row.get("generated_correct") or "").strip().lower()
        if text not in _BOOL_TEXT:
            raise IngestionError(f"generated_correct must be true/false, got {text!r}", lineno)
        verdict = (row.get("validation_verdict") or "").strip() or None
        obj = {"trial_id": row["trial_id"], "generated_correct": _BOOL_TEXT[text]}
        if verdict is not None:
            obj["validation_verdict"] = verdict
        records.append((lineno, _record(obj, lineno)))
    return _finish(records)


def read_trials(path: Union[str, Path]) -> list[TrialRecord]:
    """Load a trial log; ``.csv`` files are read as CSV, anything else as JSON Lines."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            if path.suffix.lower() == ".csv":
                return parse_csv(fh)
            return parse_jsonl(fh)
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise IngestionError(f"{path} is not valid UTF-8") from None


def write_jsonl(records: Iterable[TrialRecord], path: Union[str, Path]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.as_dict()) + "\n")


def synthetic_log(
    n: int, alpha: float, beta: Optional[float] = None, seed: int = 0
) -> list[TrialRecord]:
    """Draw ``n`` trials from known rates, for testing and demos.

    With ``beta`` set, every trial carries a verdict that is right with
    probability ``beta``.
    """
    import numpy as np

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, n])))
    correct = rng.random(n) < alpha
    records = []
    if beta is None:
        return [TrialRecord(f"t{i:06d}", bool(c)) for i, c in enumerate(correct)]
    right = rng.random(n) < beta
    for i, (c, r) in enumerate(zip(correct, right)):
        accepted = bool(c) == bool(r)
        verdict = Verdict.ACCEPTED if accepted else Verdict.REJECTED
        records.append(TrialRecord(f"t{i:06d}", bool(c), verdict))
    return records
