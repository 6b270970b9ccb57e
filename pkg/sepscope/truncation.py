"""
Truncation sweeps for the infinite-dimensional state families.

A SweepPlan fixes a StateSpec template, a grid for each varying parameter
and a list of truncation dimensions. run_sweep evaluates every
(grid point, dim) pair, in parallel, and returns rows in plan order:
grid points in itertools.product order, dims ascending within a point.

Zero-padding a state into a larger space only adds zero singular values to
rho^R and zero eigenvalues to rho^{T_B}, and tails are renormalized at
every d, so stability_report should see drift at rounding level.

Usage:
    plan = SweepPlan(
        spec_template=StateSpec(StateFamily.RHO_T_ALPHA, {"alpha": 4.0}),
        varying=[GridAxis.parse("t:0.1:0.9:9")],
        dims=[6, 8, 12],
    )
    result = run_sweep(plan)
    print(stability_report(result).max_drift)
"""

import itertools
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .config import get_settings
from .criteria import Verdict, full_report
from .errors import InsufficientDimsError, ParseError, SepscopeError, ValidationError
from .states import StateFamily, StateSpec, build_state

logger = logging.getLogger("sepscope.truncation")


@dataclass(frozen=True)
class GridAxis:
    """Values taken by one varying parameter."""
    name: str
    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise ValidationError("grid", f"grid for '{self.name}' is empty")

    @classmethod
    def parse(cls, text: str) -> "GridAxis":
        """
        Parse 'name:lo:hi:n' into n evenly spaced values from lo to hi inclusive.

        Raises:
            ParseError: Malformed text (column points at the bad field)
            ValidationError: n < 1
        """
        parts = text.strip().split(":")
        if len(parts) != 4 or not parts[0]:
            raise ParseError(f"expected name:lo:hi:n, got '{text}'", line=1)

        column = len(parts[0]) + 2
        numbers = []
        for part, convert in zip(parts[1:], (float, float, int)):
            try:
                numbers.append(convert(part))
            except ValueError:
                raise ParseError(f"bad grid field '{part}'", line=1, column=column) from None
            column += len(part) + 1

        lo, hi, n = numbers
        if n < 1:
            raise ValidationError("grid", f"grid for '{parts[0]}' needs n >= 1, got {n}")
        return cls(name=parts[0], values=tuple(float(v) for v in np.linspace(lo, hi, n)))


@dataclass
class SweepPlan:
    """A parameter grid crossed with truncation dimensions."""
    spec_template: StateSpec
    varying: list[GridAxis] = field(default_factory=list)
    dims: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.dims:
            self.dims = [self.spec_template.dim()]
        if any(d < 1 for d in self.dims):
            raise ValidationError("dims", f"dimensions must be >= 1, got {self.dims}")
        if any(b <= a for a, b in zip(self.dims, self.dims[1:])):
            raise ValidationError("dims", f"dims must be strictly increasing, got {self.dims}")
        names = [axis.name for axis in self.varying]
        if len(set(names)) != len(names):
            raise ValidationError("grid", f"parameter varied twice in {names}")

    def grid_points(self) -> list[dict[str, float]]:
        """Every combination of varying values, first axis outermost."""
        names = [axis.name for axis in self.varying]
        return [dict(zip(names, combo)) for combo in itertools.product(*(a.values for a in self.varying))]

    def tasks(self) -> list[StateSpec]:
        """One spec per (grid point, dim), in plan order."""
        return [
            self.spec_template.with_params(**point, dim=d)
            for point in self.grid_points()
            for d in self.dims
        ]

    @classmethod
    def from_yaml(cls, path: Path) -> "SweepPlan":
        """
        Load a plan file.

        Format:
            family: rho_t_alpha
            params: {alpha: 4.0}
            ratio: 0.5
            grid:
              - t:0.1:0.9:9
              - {name: alpha, values: [3.5, 4.0]}
            dims: [6, 8, 12]
        """
        try:
            with open(path) as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = mark.line + 1 if mark else 1
            raise ParseError(f"invalid YAML in {path}: {e}", line=line) from e

        if not isinstance(data, dict):
            raise ValidationError("plan", f"{path} must hold a mapping, got {type(data).__name__}")
        if "family" not in data:
            raise ValidationError("plan", f"{path} has no 'family'")
        try:
            family = StateFamily(data["family"])
        except ValueError:
            raise ValidationError("family", f"unknown family '{data['family']}'") from None

        grid = data.get("grid") or []
        if not isinstance(grid, list):
            raise ValidationError("grid", "'grid' must be a list")
        varying = []
        for entry in grid:
            if isinstance(entry, str):
                varying.append(GridAxis.parse(entry))
                continue
            if not isinstance(entry, dict) or "name" not in entry or "values" not in entry:
                raise ValidationError("grid", f"grid entry {entry!r} needs 'name' and 'values'")
            varying.append(GridAxis(name=str(entry["name"]), values=_numbers(f"grid.{entry['name']}", entry["values"])))

        params = data.get("params") or {}
        if not isinstance(params, dict):
            raise ValidationError("params", "'params' must be a mapping")
        ratio = data.get("ratio")

        template = StateSpec(
            family=family,
            params={str(k): _number(f"params.{k}", v) for k, v in params.items()},
            ratio=None if ratio is None else _number("ratio", ratio),
        )
        dims = data.get("dims") or []
        if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
            raise ValidationError("dims", f"'dims' must be a list of integers, got {dims!r}")
        return cls(spec_template=template, varying=varying, dims=dims)


def _number(key: str, value) -> float:
    if isinstance(value, bool):
        raise ValidationError(key, f"expected a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ValidationError(key, f"expected a number, got {value!r}") from None


def _numbers(key: str, values) -> tuple[float, ...]:
    if not isinstance(values, list):
        raise ValidationError(key, f"expected a list of numbers, got {values!r}")
    return tuple(_number(key, v) for v in values)


@dataclass
class SweepRow:
    """Criterion scalars for one (grid point, dim). Scalars are None when error is set."""
    family: str
    params: dict[str, float]
    dim: int
    realignment_trace_norm: Optional[float] = None
    ccn: Optional[float] = None
    ppt_min_eigenvalue: Optional[float] = None
    is_symmetric: Optional[bool] = None
    rccn_verdict: Optional[Verdict] = None
    ppt_verdict: Optional[Verdict] = None
    wall_time: float = 0.0
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> dict:
        """Convert to dictionary for serialization."""
        return {
            "family": self.family,
            "params": dict(self.params),
            "dim": self.dim,
            "realignment_trace_norm": self.realignment_trace_norm,
            "ccn": self.ccn,
            "ppt_min_eigenvalue": self.ppt_min_eigenvalue,
            "is_symmetric": self.is_symmetric,
            "rccn_verdict": self.rccn_verdict.value if self.rccn_verdict else None,
            "ppt_verdict": self.ppt_verdict.value if self.ppt_verdict else None,
            "wall_time": self.wall_time,
            "error": self.error,
        }


@dataclass
class SweepResult:
    """All rows of a sweep, in plan order."""
    plan: SweepPlan
    rows: list[SweepRow] = field(default_factory=list)

    @property
    def error_count(self) -> int:
        return sum(1 for row in self.rows if not row.ok)

    def to_dict(self) -> dict:
        return {
            "family": self.plan.spec_template.family.value,
            "dims": list(self.plan.dims),
            "varying": {axis.name: list(axis.values) for axis in self.plan.varying},
            "error_count": self.error_count,
            "rows": [row.to_dict() for row in self.rows],
        }


def _evaluate(spec: StateSpec) -> SweepRow:
    start_time = time.perf_counter()
    row = SweepRow(family=spec.family.value, params=dict(spec.params), dim=spec.dim())
    try:
        report = full_report(build_state(spec))
        row.realignment_trace_norm = report.realignment_trace_norm
        row.ccn = report.ccn
        row.ppt_min_eigenvalue = report.ppt_min_eigenvalue
        row.is_symmetric = report.is_symmetric
        row.rccn_verdict = report.rccn_verdict
        row.ppt_verdict = report.ppt_verdict
    except SepscopeError as e:
        logger.warning("sweep point %s d=%d failed: %s", spec.describe(), row.dim, e)
        row.error = f"{type(e).__name__}: {e}"
    row.wall_time = time.perf_counter() - start_time
    return row


def run_sweep(plan: SweepPlan, threads: Optional[int] = None) -> SweepResult:
    """
    Evaluate every task of a plan.

    Construction and criterion errors are recorded per row and never
    abort the sweep.
    """
    tasks = plan.tasks()
    workers = threads or get_settings().worker_count()
    logger.debug("sweep %s: %d tasks on %d threads", plan.spec_template.family.value, len(tasks), workers)

    with ThreadPoolExecutor(max_workers=max(1, min(workers, len(tasks)))) as executor:
        rows = list(executor.map(_evaluate, tasks))

    return SweepResult(plan=plan, rows=rows)


@dataclass
class PointDrift:
    """Norm spread of one grid point across its truncation dims."""
    params: dict[str, float]
    dims: list[int]
    norm_drift: float
    ppt_drift: float


@dataclass
class StabilityReport:
    points: list[PointDrift]

    @property
    def max_drift(self) -> float:
        """max over grid points of |norm(d_i) - norm(d_j)|."""
        return max(p.norm_drift for p in self.points)

    @property
    def max_ppt_drift(self) -> float:
        return max(p.ppt_drift for p in self.points)

    def to_dict(self) -> dict:
        return {
            "max_drift": self.max_drift,
            "max_ppt_drift": self.max_ppt_drift,
            "points": [
                {"params": p.params, "dims": p.dims, "norm_drift": p.norm_drift, "ppt_drift": p.ppt_drift}
                for p in self.points
            ],
        }


def stability_report(result: SweepResult) -> StabilityReport:
    """
    Drift of the realignment norm across dims, per grid point.

    Failed rows are ignored.

    Raises:
        InsufficientDimsError: A grid point has fewer than two successful dims
    """
    groups: dict[tuple, list[SweepRow]] = {}
    for row in result.rows:
        if row.ok:
            groups.setdefault(tuple(sorted(row.params.items())), []).append(row)

    if not groups:
        raise InsufficientDimsError("No successful rows to compare")

    points = []
    for key, rows in groups.items():
        if len(rows) < 2:
            raise InsufficientDimsError(f"Grid point {dict(key)} has {len(rows)} successful dim(s), need 2")
        norms = [row.realignment_trace_norm for row in rows]
        eigs = [row.ppt_min_eigenvalue for row in rows]
        points.append(PointDrift(
            params=dict(key),
            dims=[row.dim for row in rows],
            norm_drift=max(norms) - min(norms),
            ppt_drift=max(eigs) - min(eigs),
        ))
    return StabilityReport(points=points)
