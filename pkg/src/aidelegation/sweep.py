"""Region maps and boundary curves over the (alpha, beta) plane."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from . import core
from .core import REL_TOL, DelegationParams, Mode, RegionLabel
from .errors import GridSpecError, ParameterDomainError

__all__ = [
    "GRID_COLUMNS",
    "CURVE_COLUMNS",
    "AxisRange",
    "GridSpec",
    "GridCell",
    "BoundaryRow",
    "BoundaryTable",
    "linspace",
    "region_grid",
    "boundary_curves",
]

GRID_COLUMNS = ("alpha", "beta", "region", "fs_status", "chosen", "e_ps", "e_fs", "on_boundary")
CURVE_COLUMNS = ("alpha", "beta_star", "beta_star_feasible", "beta_double_star")


def linspace(start: float, stop: float, steps: int) -> list[float]:
    """Inclusive evenly spaced values; both endpoints are exact."""
    if steps == 1:
        return [float(start)]
    width = stop - start
    values = [start + width * i / (steps - 1) for i in range(steps)]
    values[-1] = float(stop)
    return values


@dataclass(frozen=True)
class AxisRange:
    start: float
    stop: float
    steps: int

    def __post_init__(self) -> None:
        for name in ("start", "stop"):
            x = getattr(self, name)
            if not isinstance(x, (int, float)) or not math.isfinite(x):
                raise GridSpecError(f"range {name} must be a finite number, got {x!r}")
        if isinstance(self.steps, bool) or not isinstance(self.steps, int) or self.steps < 2:
            raise GridSpecError(f"range steps must be an integer >= 2, got {self.steps!r}")
        if not 0.0 < self.start <= self.stop < 1.0:
            raise GridSpecError(
                f"range must satisfy 0 < start <= stop < 1, got {self.start}:{self.stop}"
            )

    @classmethod
    def parse(cls, text: str) -> "AxisRange":
        """Parse ``start:stop:steps``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise GridSpecError(f"range must look like start:stop:steps, got {text!r}")
        try:
            start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise GridSpecError(f"range must look like start:stop:steps, got {text!r}") from None
        return cls(start, stop, steps)

    def values(self) -> list[float]:
        return linspace(self.start, self.stop, self.steps)

    def __str__(self) -> str:
        return f"{self.start!r}:{self.stop!r}:{self.steps}"


@dataclass(frozen=True)
class GridSpec:
    alpha_range: AxisRange
    beta_range: AxisRange
    v: float
    gain: float = 1.0
    loss: float = -1.0

    def __post_init__(self) -> None:
        for name in ("alpha_range", "beta_range"):
            r = getattr(self, name)
            if isinstance(r, (tuple, list)):
                if len(r) != 3:
                    raise GridSpecError(f"{name} must be (start, stop, steps)")
                object.__setattr__(self, name, AxisRange(*r))
        try:
            core.alpha_star_ps(self.v, self.gain, self.loss)
        except ParameterDomainError as exc:
            raise GridSpecError(str(exc)) from None


@dataclass(frozen=True)
class GridCell:
    alpha: float
    beta: float
    region: RegionLabel
    chosen: Mode
    e_ps: float
    e_fs: float
    on_boundary: bool

    def row(self) -> tuple:
        return (
            self.alpha,
            self.beta,
            self.region.region.value,
            self.region.fs_status.value,
            self.chosen.value,
            self.e_ps,
            self.e_fs,
            self.on_boundary,
        )

    def as_dict(self) -> dict:
        return dict(zip(GRID_COLUMNS, self.row()))


def _cell(alpha: float, beta: float, spec: GridSpec) -> GridCell:
    params = DelegationParams(alpha, beta, spec.v, spec.gain, spec.loss)
    decision = core.decide_policy(params)
    near_region_edge = any(
        abs(alpha - t) <= REL_TOL
        for t in (
            core.alpha_star_fs(spec.v, spec.gain),
            core.alpha_star_ps(spec.v, spec.gain, spec.loss),
        )
    )
    return GridCell(
        alpha=alpha,
        beta=beta,
        region=core.classify_region(params),
        chosen=decision.chosen,
        e_ps=decision.expected_ps,
        e_fs=decision.expected_fs,
        on_boundary=decision.on_boundary or near_region_edge,
    )


def iter_region_grid(spec: GridSpec) -> Iterator[GridCell]:
    for alpha in spec.alpha_range.values():
        for beta in spec.beta_range.values():
            yield _cell(alpha, beta, spec)


def region_grid(spec: GridSpec) -> list[GridCell]:
    """Evaluate the decision model on every (alpha, beta) lattice point.

    Cells are ordered row-major with alpha as the outer loop. A cell is
    flagged ``on_boundary`` when its decision fell inside the tolerance band
    or alpha lies within ``REL_TOL`` of a region edge.
    """
    return list(iter_region_grid(spec))


@dataclass(frozen=True)
class BoundaryRow:
    alpha: float
    beta_star: float
    beta_star_feasible: bool
    beta_double_star: float

    def row(self) -> tuple:
        return (self.alpha, self.beta_star, self.beta_star_feasible, self.beta_double_star)


@dataclass(frozen=True)
class BoundaryTable:
    v: float
    gain: float
    loss: float
    alpha_star_ps: float
    alpha_star_fs: float
    rows: Sequence[BoundaryRow]

    def as_dict(self) -> dict:
        return {
            "v": self.v,
            "gain": self.gain,
            "loss": self.loss,
            "alpha_star_ps": self.alpha_star_ps,
            "alpha_star_fs": self.alpha_star_fs,
            "rows": [dict(zip(CURVE_COLUMNS, r.row())) for r in self.rows],
        }


def boundary_curves(
    v: float,
    gain: float = 1.0,
    loss: float = -1.0,
    samples: int = 99,
    alpha_min: float = 0.01,
    alpha_max: float = 0.99,
) -> BoundaryTable:
    """Tabulate both validation thresholds along evenly spaced alphas.

    ``beta_star`` is reported unclipped; rows where it reaches 1 carry
    ``beta_star_feasible=False``.
    """
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 2:
        raise GridSpecError(f"samples must be an integer >= 2, got {samples!r}")
    alphas = AxisRange(alpha_min, alpha_max, samples).values()
    rows = []
    for a in alphas:
        bs = core.beta_star(a, v, gain, loss)
        rows.append(
            BoundaryRow(
                alpha=a,
                beta_star=core.beta_star_raw(a, v, gain, loss),
                beta_star_feasible=bs is not core.INFEASIBLE,
                beta_double_star=core.beta_double_star(a, gain, loss),
            )
        )
    return BoundaryTable(
        v=float(v),
        gain=float(gain),
        loss=float(loss),
        alpha_star_ps=core.alpha_star_ps(v, gain, loss),
        alpha_star_fs=core.alpha_star_fs(v, gain),
        rows=tuple(rows),
    )
