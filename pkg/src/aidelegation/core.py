"""Expected-utility model for delegating KPI generation to an AI or an engineer.

Three options compete for a single decision:

* ``Mode.ENGINEER``: wait for a data engineer and receive the guaranteed,
  delayed profit ``v``.
* ``Mode.PS`` (partial support): act on an AI-generated query unconditionally.
  A correct query (probability ``alpha``) pays ``gain``, an incorrect one
  pays ``loss``.
* ``Mode.FS`` (full support): the user validates the query first and only acts
  on accepted queries. Validation classifies a query correctly with
  probability ``beta``; rejected queries pay nothing.

With the default payoffs ``gain=1, loss=-1`` the closed forms reduce to::

    E_PS        = 2*alpha - 1
    E_FS        = alpha + beta - 1
    alpha*_PS   = (1 + v) / 2
    alpha*_FS   = v
    beta*       = (1 - alpha) + v
    beta**      = alpha

Every function here is pure; values are immutable and thread-safe.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Union

from .errors import MissingParameterError, ParameterDomainError

__all__ = [
    "REL_TOL",
    "Mode",
    "Region",
    "FSStatus",
    "Infeasible",
    "INFEASIBLE",
    "DelegationParams",
    "PolicyDecision",
    "RegionLabel",
    "expected_value_ps",
    "expected_value_fs",
    "alpha_star_ps",
    "alpha_star_fs",
    "beta_star",
    "beta_star_raw",
    "beta_double_star",
    "evaluate_conditions",
    "decide_policy",
    "classify_region",
]

# Half-width of the band around equality inside which a strict inequality is
# not considered established. Probabilities are compared in absolute units;
# utilities are compared relative to max(|gain|, |loss|).
REL_TOL = 1e-9

Utility = float


class Mode(str, enum.Enum):
    ENGINEER = "engineer"
    PS = "ps"
    FS = "fs"


# Tie-break order: earlier entries win exact (in-band) ties.
PREFERENCE = (Mode.ENGINEER, Mode.PS, Mode.FS)


class Region(str, enum.Enum):
    A = "A"
    B = "B"
    C = "C"


class FSStatus(str, enum.Enum):
    FS_WINS = "FSWins"
    FS_LOSES = "FSLoses"
    NOT_APPLICABLE = "NotApplicable"


class Infeasible(enum.Enum):
    """Marker returned by :func:`beta_star` when no ``beta < 1`` suffices."""

    INFEASIBLE = "infeasible"

    def __repr__(self) -> str:
        return "INFEASIBLE"


INFEASIBLE = Infeasible.INFEASIBLE


def _check_finite(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterDomainError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise ParameterDomainError(f"{name} must be finite, got {value!r}")
    return value


def _check_probability(name: str, value: float) -> float:
    value = _check_finite(name, value)
    if not 0.0 < value < 1.0:
        raise ParameterDomainError(f"{name} must satisfy 0 < {name} < 1, got {value!r}")
    return value


def _check_payoffs(v: float, gain: float, loss: float) -> tuple[float, float, float]:
    v = _check_finite("v", v)
    gain = _check_finite("gain", gain)
    loss = _check_finite("loss", loss)
    if gain == loss:
        raise ParameterDomainError("degenerate payoff range: gain == loss")
    if not loss < 0.0:
        raise ParameterDomainError(f"payoffs must satisfy loss < 0, got loss={loss!r}")
    if not 0.0 < v:
        raise ParameterDomainError(f"payoffs must satisfy 0 < v, got v={v!r}")
    if not v < gain:
        raise ParameterDomainError(f"payoffs must satisfy v < gain, got v={v!r}, gain={gain!r}")
    return v, gain, loss


@dataclass(frozen=True)
class DelegationParams:
    """Model inputs.

    Attributes:
        alpha: Probability that the AI generates a correct query.
        beta: Probability that the user classifies a query correctly, or
            ``None`` for PS-only evaluations.
        v: Guaranteed, delayed profit obtained through the data engineer.
        gain: Payoff of acting on a correct KPI.
        loss: Payoff of acting on an incorrect KPI.

    Raises:
        ParameterDomainError: if any invariant (``0 < alpha, beta < 1`` and
            ``loss < 0 < v < gain``) is violated.
    """

    alpha: float
    beta: Optional[float] = None
    v: float = 0.5
    gain: float = 1.0
    loss: float = -1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _check_probability("alpha", self.alpha))
        if self.beta is not None:
            object.__setattr__(self, "beta", _check_probability("beta", self.beta))
        v, gain, loss = _check_payoffs(self.v, self.gain, self.loss)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "gain", gain)
        object.__setattr__(self, "loss", loss)

    @property
    def scale(self) -> float:
        """Payoff magnitude used to size the utility comparison band."""
        return max(abs(self.gain), abs(self.loss))

    def require_beta(self) -> float:
        if self.beta is None:
            raise MissingParameterError("beta is required for full-support (FS) evaluation")
        return self.beta

    def as_dict(self) -> dict:
        return asdict(self)


def expected_value_ps(params: DelegationParams) -> Utility:
    """Expected payoff of acting on the generated query without validation."""
    a = params.alpha
    return a * params.gain + (1.0 - a) * params.loss


def expected_value_fs(params: DelegationParams) -> Utility:
    """Expected payoff when only validated (accepted) queries are acted on.

    Rejected queries, whether correct or not, contribute nothing.

    Raises:
        MissingParameterError: if ``params.beta`` is ``None``.
    """
    b = params.require_beta()
    a = params.alpha
    return a * b * params.gain + (1.0 - a) * (1.0 - b) * params.loss


def alpha_star_ps(v: float, gain: float = 1.0, loss: float = -1.0) -> float:
    """Accuracy above which partial support beats the engineer."""
    v, gain, loss = _check_payoffs(v, gain, loss)
    return (v - loss) / (gain - loss)


def alpha_star_fs(v: float, gain: float = 1.0) -> float:
    """Accuracy above which full support can beat the engineer at all.

    Below or at this value even perfect validation cannot help, since the
    best FS can do is ``alpha * gain``.
    """
    v = _check_finite("v", v)
    gain = _check_finite("gain", gain)
    if not 0.0 < v < gain:
        raise ParameterDomainError(f"payoffs must satisfy 0 < v < gain, got v={v!r}, gain={gain!r}")
    return v / gain


def beta_star_raw(alpha: float, v: float, gain: float = 1.0, loss: float = -1.0) -> float:
    """Unclipped validation threshold for FS to beat the engineer.

    May be ``>= 1``; see :func:`beta_star`.
    """
    alpha = _check_probability("alpha", alpha)
    v, gain, loss = _check_payoffs(v, gain, loss)
    wrong = (1.0 - alpha) * loss
    return (v - wrong) / (alpha * gain - wrong)


def beta_star(
    alpha: float, v: float, gain: float = 1.0, loss: float = -1.0
) -> Union[float, Infeasible]:
    """Validation threshold for FS to beat the engineer.

    Returns:
        The threshold ``t`` with ``E_FS > v`` iff ``beta > t``, or
        ``INFEASIBLE`` when ``t >= 1``. This happens exactly when
        ``alpha <= alpha_star_fs(v, gain)``.
    """
    threshold = beta_star_raw(alpha, v, gain, loss)
    if threshold >= 1.0 or alpha <= alpha_star_fs(v, gain):
        return INFEASIBLE
    return threshold


def beta_double_star(alpha: float, gain: float = 1.0, loss: float = -1.0) -> float:
    """Validation threshold for FS to beat PS.

    Falls as the loss grows relative to the gain.
    """
    alpha = _check_probability("alpha", alpha)
    gain = _check_finite("gain", gain)
    loss = _check_finite("loss", loss)
    if not loss < 0.0 < gain:
        raise ParameterDomainError(f"payoffs must satisfy loss < 0 < gain, got gain={gain!r}, loss={loss!r}")
    right = alpha * gain
    return right / (right - (1.0 - alpha) * loss)


def _compare(a: float, b: float, band: float) -> int:
    """Three-way comparison treating ``|a - b| <= band`` as equality."""
    diff = a - b
    if diff > band:
        return 1
    if diff < -band:
        return -1
    return 0


def evaluate_conditions(params: DelegationParams) -> tuple[dict[str, bool], bool]:
    """Evaluate the four delegation conditions in threshold form.

    Keys are ``eq1`` (PS beats engineer), ``eq2`` (FS beats engineer),
    ``eq3`` (FS feasible) and ``eq4`` (FS beats PS). ``eq2`` and ``eq4`` are
    omitted when beta is absent.

    Returns:
        ``(conditions, on_boundary)`` where ``on_boundary`` is true when any
        comparison fell inside the ``REL_TOL`` band.
    """
    a, v, g, l = params.alpha, params.v, params.gain, params.loss
    cmps = {
        "eq1": _compare(a, alpha_star_ps(v, g, l), REL_TOL),
        "eq3": _compare(a, alpha_star_fs(v, g), REL_TOL),
    }
    if params.beta is not None:
        b = params.beta
        # beta < 1, so an infeasible (>= 1) threshold can never compare above.
        cmps["eq2"] = _compare(b, beta_star_raw(a, v, g, l), REL_TOL)
        cmps["eq4"] = _compare(b, beta_double_star(a, g, l), REL_TOL)
    conditions = {key: cmps[key] > 0 for key in sorted(cmps)}
    return conditions, any(c == 0 for c in cmps.values())


@dataclass(frozen=True)
class PolicyDecision:
    """Outcome of :func:`decide_policy`.

    ``margins`` maps each available mode to its expected value minus the best
    alternative's. ``on_boundary`` flags decisions where some comparison was
    within the tolerance band, so the choice rests on the tie-break rule.
    """

    chosen: Mode
    expected_engineer: Utility
    expected_ps: Utility
    expected_fs: Optional[Utility]
    conditions: dict[str, bool]
    margins: dict[Mode, float]
    on_boundary: bool = False
    params: Optional[DelegationParams] = field(default=None, compare=False)

    def expected(self, mode: Mode) -> Optional[Utility]:
        return {
            Mode.ENGINEER: self.expected_engineer,
            Mode.PS: self.expected_ps,
            Mode.FS: self.expected_fs,
        }[mode]

    def as_dict(self) -> dict:
        out = {
            "chosen": self.chosen.value,
            "expected": {
                "engineer": self.expected_engineer,
                "ps": self.expected_ps,
                "fs": self.expected_fs,
            },
            "conditions": dict(self.conditions),
            "margins": {m.value: x for m, x in self.margins.items()},
            "on_boundary": self.on_boundary,
        }
        if self.params is not None:
            out["params"] = self.params.as_dict()
        return out


def _expected_values(params: DelegationParams) -> dict[Mode, Utility]:
    values = {Mode.ENGINEER: params.v, Mode.PS: expected_value_ps(params)}
    if params.beta is not None:
        values[Mode.FS] = expected_value_fs(params)
    return values


def _argmax_with_ties(values: dict[Mode, Utility], band: float) -> tuple[Mode, bool]:
    best = max(values.values())
    tied = [m for m in PREFERENCE if m in values and _compare(values[m], best, band) == 0]
    return tied[0], len(tied) > 1


def decide_policy(params: DelegationParams) -> PolicyDecision:
    """Pick the mode with the highest expected value.

    Modes whose expected values differ by no more than ``REL_TOL * scale``
    count as tied; ties go to Engineer, then PS, then FS. Without beta only
    Engineer and PS compete.
    """
    values = _expected_values(params)
    band = REL_TOL * params.scale
    chosen, tied = _argmax_with_ties(values, band)
    margins = {
        m: values[m] - max(x for k, x in values.items() if k is not m) for m in values
    }
    conditions, cond_boundary = evaluate_conditions(params)
    return PolicyDecision(
        chosen=chosen,
        expected_engineer=values[Mode.ENGINEER],
        expected_ps=values[Mode.PS],
        expected_fs=values.get(Mode.FS),
        conditions=conditions,
        margins=margins,
        on_boundary=tied or cond_boundary,
        params=params,
    )


@dataclass(frozen=True)
class RegionLabel:
    region: Region
    fs_status: FSStatus

    def as_dict(self) -> dict:
        return {"region": self.region.value, "fs_status": self.fs_status.value}


def _region(params: DelegationParams) -> Region:
    a = params.alpha
    if a <= alpha_star_fs(params.v, params.gain):
        return Region.A
    if a <= alpha_star_ps(params.v, params.gain, params.loss):
        return Region.B
    return Region.C


def classify_region(params: DelegationParams) -> RegionLabel:
    """Place a parameter point in region A, B or C and judge FS there.

    Region A is where FS is infeasible (``alpha <= alpha*_FS``), B where only
    FS can beat the engineer, C where PS already does. ``fs_status`` is
    ``FSWins`` when the FS expected value beats both ``v`` and ``E_PS``
    outside the tolerance band, and ``NotApplicable`` throughout region A.

    Raises:
        MissingParameterError: outside region A when beta is absent.
    """
    region = _region(params)
    if region is Region.A:
        return RegionLabel(region, FSStatus.NOT_APPLICABLE)
    params.require_beta()
    values = _expected_values(params)
    chosen, _ = _argmax_with_ties(values, REL_TOL * params.scale)
    status = FSStatus.FS_WINS if chosen is Mode.FS else FSStatus.FS_LOSES
    return RegionLabel(region, status)
