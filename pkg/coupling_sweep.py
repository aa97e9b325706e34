#!/usr/bin/env python3
"""
Coupling sweeps

1-D and 2-D scans over (kappa, omega_c, kappa0), crossover location by
bisection, and run-length detection of alternating dynamical regimes.
Points are independent: a failing point is quarantined as a flagged cell
and never stops the sweep.
"""

import logging
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from amplitude_dynamics import SolverConfig, integrate
from hierarchical_model import SWEEPABLE_PARAMETERS, ModelParams, build_generator, validate
from simulation_errors import ConfigError, HierarchicalEnvError, NoCrossoverInBracket, NonPhysicalParameter
from speedup_measures import MeasureReport, measure_report

try:
    from alive_progress import alive_bar
    ALIVE_BAR_AVAILABLE = True
except ImportError:
    ALIVE_BAR_AVAILABLE = False

logger = logging.getLogger(__name__)

NM_ONSET = 'nm_onset'
SPEEDUP_ONSET = 'speedup_onset'
PREDICATES = (NM_ONSET, SPEEDUP_ONSET)

SWEEP_COLUMNS = [
    'axis1_name', 'axis1_value', 'axis2_name', 'axis2_value',
    'n_blp', 'n_population', 'qsl_ratio_general', 'qsl_ratio_closed', 'survival_tau', 'degenerate',
    'crossing_count', 'nm_label', 'speed_label', 'error',
]


class NMLabel(str, Enum):
    MARKOVIAN = 'Markovian'
    NON_MARKOVIAN = 'NonMarkovian'
    FAILED = 'Failed'


class SpeedLabel(str, Enum):
    SPEEDUP = 'Speedup'
    NO_SPEEDUP = 'NoSpeedup'
    DEGENERATE = 'Degenerate'
    FAILED = 'Failed'


@dataclass(frozen=True)
class Thresholds:
    eps_nm: float = 1e-6
    eps_qsl: float = 1e-6

    def validate(self) -> 'Thresholds':
        for name in ('eps_nm', 'eps_qsl'):
            value = getattr(self, name)
            if not value > 0:
                raise NonPhysicalParameter(name, value, "threshold must be > 0")
        return self


@dataclass(frozen=True)
class SweepAxis:
    name: str
    min: float
    max: float
    count: int

    def validate(self) -> 'SweepAxis':
        if self.name not in SWEEPABLE_PARAMETERS:
            raise NonPhysicalParameter('axis', self.name, f"expected one of {SWEEPABLE_PARAMETERS}")
        if self.min > self.max:
            raise NonPhysicalParameter(f'{self.name}.min', self.min, "axis minimum exceeds maximum")
        if int(self.count) != self.count or self.count < 2:
            raise NonPhysicalParameter(f'{self.name}.count', self.count, "axis needs at least 2 points")
        return self

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, int(self.count))


@dataclass(frozen=True)
class SweepSpec:
    """A base parameter point, one or two axes and the labelling thresholds."""
    base: ModelParams
    axis1: SweepAxis
    axis2: Optional[SweepAxis] = None
    thresholds: Thresholds = Thresholds()

    def validate(self) -> 'SweepSpec':
        validate(self.base)
        self.axis1.validate()
        if self.axis2 is not None:
            self.axis2.validate()
            if self.axis2.name == self.axis1.name:
                raise NonPhysicalParameter('axis2', self.axis2.name, "both axes sweep the same parameter")
        self.thresholds.validate()
        return self

    def grid_params(self) -> List[Tuple[Tuple[float, Optional[float]], ModelParams]]:
        """Parameter points in row-major order over axis1 then axis2."""
        points = []
        for v1 in self.axis1.values():
            row_base = self.base.with_value(self.axis1.name, v1)
            if self.axis2 is None:
                points.append(((float(v1), None), row_base))
                continue
            for v2 in self.axis2.values():
                points.append(((float(v1), float(v2)), row_base.with_value(self.axis2.name, v2)))
        return points


@dataclass(frozen=True)
class SweepPoint:
    coords: Tuple[float, Optional[float]]
    report: Optional[MeasureReport]
    nm_label: NMLabel
    speed_label: SpeedLabel
    error: Optional[str] = None


@dataclass
class SweepResult:
    spec: SweepSpec
    axis1_values: np.ndarray
    axis2_values: Optional[np.ndarray]
    points: List[SweepPoint]

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.axis1_values), 1 if self.axis2_values is None else len(self.axis2_values)

    @property
    def failed_count(self) -> int:
        return sum(1 for p in self.points if p.error is not None)

    def grid(self, field_name: str) -> np.ndarray:
        """A MeasureReport field as an (axis1, axis2) matrix; failed cells are NaN."""
        values = [np.nan if p.report is None else float(getattr(p.report, field_name)) for p in self.points]
        return np.array(values).reshape(self.shape)

    def row(self, index: int) -> 'SweepResult':
        """1-D slice along axis2 at axis1_values[index]."""
        if self.spec.axis2 is None:
            raise ConfigError("row() needs a 2-D sweep")
        n2 = self.shape[1]
        base = self.spec.base.with_value(self.spec.axis1.name, self.axis1_values[index])
        spec = SweepSpec(base=base, axis1=self.spec.axis2, thresholds=self.spec.thresholds)
        points = [
            SweepPoint((p.coords[1], None), p.report, p.nm_label, p.speed_label, p.error)
            for p in self.points[index * n2:(index + 1) * n2]
        ]
        return SweepResult(spec=spec, axis1_values=self.axis2_values, axis2_values=None, points=points)

    def to_frame(self) -> pd.DataFrame:
        axis2_name = '' if self.spec.axis2 is None else self.spec.axis2.name
        rows = []
        for p in self.points:
            r = p.report
            rows.append({
                'axis1_name': self.spec.axis1.name,
                'axis1_value': p.coords[0],
                'axis2_name': axis2_name,
                'axis2_value': np.nan if p.coords[1] is None else p.coords[1],
                'n_blp': np.nan if r is None else r.n_blp,
                'n_population': np.nan if r is None else r.n_population,
                'qsl_ratio_general': np.nan if r is None else r.qsl_ratio_general,
                'qsl_ratio_closed': np.nan if r is None else r.qsl_ratio_closed,
                'survival_tau': np.nan if r is None else r.survival_tau,
                'degenerate': False if r is None else r.degenerate,
                'crossing_count': 0 if r is None else len(r.crossing_times),
                'nm_label': p.nm_label.value,
                'speed_label': p.speed_label.value,
                'error': p.error or '',
            })
        return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


@dataclass(frozen=True)
class CrossoverResult:
    parameter: str
    predicate: str
    bracket_low: float
    bracket_high: float
    critical_value: float
    achieved_tolerance: float
    label_low: bool
    label_high: bool
    iterations: int

    def to_record(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class LabelInterval:
    """A maximal run of equal labels along a 1-D sweep, inclusive of both ends."""
    label: str
    start: float
    stop: float
    count: int


def evaluate_point(params: ModelParams, solver: Optional[SolverConfig] = None) -> MeasureReport:
    """Integrate one parameter point and evaluate every measure on it."""
    validate(params)
    traj = integrate(build_generator(params), solver or SolverConfig(), params.tau)
    return measure_report(traj)


def label_report(report: MeasureReport, thresholds: Thresholds) -> Tuple[NMLabel, SpeedLabel]:
    nm = NMLabel.NON_MARKOVIAN if report.n_blp > thresholds.eps_nm else NMLabel.MARKOVIAN
    if report.degenerate:
        speed = SpeedLabel.DEGENERATE
    elif report.qsl_ratio_general < 1 - thresholds.eps_qsl:
        speed = SpeedLabel.SPEEDUP
    else:
        speed = SpeedLabel.NO_SPEEDUP
    return nm, speed


def _evaluate_cell(coords, params: ModelParams, solver: SolverConfig, thresholds: Thresholds) -> SweepPoint:
    try:
        report = evaluate_point(params, solver)
    except HierarchicalEnvError as e:
        return SweepPoint(coords, None, NMLabel.FAILED, SpeedLabel.FAILED, error=f"{type(e).__name__}: {e.message}")
    nm, speed = label_report(report, thresholds)
    return SweepPoint(coords, report, nm, speed)


def run_sweep(spec: SweepSpec, solver: Optional[SolverConfig] = None, workers: int = 1,
              progress: Optional[str] = None) -> SweepResult:
    """
    Evaluate every grid point of a sweep.

    Args:
        spec: validated sweep specification
        solver: integrator settings shared by every point
        workers: number of joblib workers; 1 runs in-process
        progress: None, 'tqdm' or 'alive' (falls back to tqdm if alive_progress is missing)

    Returns:
        SweepResult with points in row-major order regardless of worker count
    """
    spec.validate()
    solver = (solver or SolverConfig()).validate()
    grid = spec.grid_params()
    logger.info(f"Starting sweep of {len(grid)} points over {spec.axis1.name}"
                + (f" x {spec.axis2.name}" if spec.axis2 else "") + f" with {workers} worker(s)")

    if workers == 1:
        cells = (_evaluate_cell(c, p, solver, spec.thresholds) for c, p in grid)
    else:
        cells = Parallel(n_jobs=workers, return_as='generator')(
            delayed(_evaluate_cell)(c, p, solver, spec.thresholds) for c, p in grid
        )

    if progress == 'alive' and ALIVE_BAR_AVAILABLE:
        points = []
        with alive_bar(len(grid), title="Sweeping couplings", bar="filling") as bar:
            for point in cells:
                points.append(point)
                bar()
    elif progress is not None:
        points = list(tqdm(cells, total=len(grid), desc='Sweeping couplings', unit='point', ascii=True))
    else:
        points = list(cells)

    result = SweepResult(
        spec=spec,
        axis1_values=spec.axis1.values(),
        axis2_values=None if spec.axis2 is None else spec.axis2.values(),
        points=points,
    )
    if result.failed_count:
        logger.warning(f"{result.failed_count} sweep point(s) failed and were flagged")
    logger.info(f"Sweep complete: {len(points)} points")
    return result


def _indicator(predicate: str, thresholds: Thresholds) -> Callable[[MeasureReport], bool]:
    if predicate == NM_ONSET:
        return lambda r: r.n_blp > thresholds.eps_nm
    if predicate == SPEEDUP_ONSET:
        return lambda r: (not r.degenerate) and r.qsl_ratio_general < 1 - thresholds.eps_qsl
    raise ConfigError(f"unknown predicate {predicate!r}, expected one of {PREDICATES}")


def find_crossover(base: ModelParams, parameter: str, bracket: Sequence[float], predicate: str = NM_ONSET,
                   tol: float = 1e-3, thresholds: Thresholds = Thresholds(),
                   solver: Optional[SolverConfig] = None) -> CrossoverResult:
    """
    Bisect a bracket on the labelling predicate until it is narrower than tol.

    Raises:
        NoCrossoverInBracket: both bracket ends carry the same label
    """
    if not tol > 0:
        raise NonPhysicalParameter('crossover_tol', tol, "tolerance must be > 0")
    indicator = _indicator(predicate, thresholds.validate())
    lo, hi = float(bracket[0]), float(bracket[1])
    if lo >= hi:
        raise NonPhysicalParameter('bracket', (lo, hi), "bracket must satisfy low < high")

    def label(value: float) -> bool:
        return indicator(evaluate_point(base.with_value(parameter, value), solver))

    label_lo, label_hi = label(lo), label(hi)
    if label_lo == label_hi:
        raise NoCrossoverInBracket(f"{predicate} is {label_lo} at both {parameter}={lo} and {parameter}={hi}",
                                   field=parameter)

    iterations = 0
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if label(mid) == label_lo:
            lo = mid
        else:
            hi = mid
        iterations += 1
        logger.debug(f"Bisection {iterations}: {parameter} in [{lo:.6f}, {hi:.6f}]")

    result = CrossoverResult(
        parameter=parameter, predicate=predicate, bracket_low=lo, bracket_high=hi,
        critical_value=0.5 * (lo + hi), achieved_tolerance=hi - lo,
        label_low=label_lo, label_high=label_hi, iterations=iterations,
    )
    logger.info(f"{predicate} crossover at {parameter} = {result.critical_value:.6f} (+/- {result.achieved_tolerance:.1e})")
    return result


def locate_by_scan(base: ModelParams, parameter: str, bracket: Sequence[float], step: float,
                   predicate: str = NM_ONSET, thresholds: Thresholds = Thresholds(),
                   solver: Optional[SolverConfig] = None) -> CrossoverResult:
    """First label change on a fixed-step scan; a brute-force check on find_crossover."""
    indicator = _indicator(predicate, thresholds.validate())
    lo, hi = float(bracket[0]), float(bracket[1])
    values = np.arange(lo, hi + 0.5 * step, step)
    labels = [indicator(evaluate_point(base.with_value(parameter, v), solver)) for v in values]
    for i in range(len(values) - 1):
        if labels[i] != labels[i + 1]:
            return CrossoverResult(
                parameter=parameter, predicate=predicate,
                bracket_low=float(values[i]), bracket_high=float(values[i + 1]),
                critical_value=float(0.5 * (values[i] + values[i + 1])), achieved_tolerance=float(step),
                label_low=labels[0], label_high=labels[i + 1], iterations=len(values),
            )
    raise NoCrossoverInBracket(f"{predicate} never changes on the scan of {parameter} over [{lo}, {hi}]",
                               field=parameter)


def multi_interval_detection(curve: SweepResult, kind: str = 'nm') -> List[LabelInterval]:
    """
    Run-length encode the labels of a 1-D sweep into maximal intervals.

    Args:
        curve: 1-D sweep result
        kind: 'nm' for Markovian/NonMarkovian labels, 'speed' for the speedup labels
    """
    if curve.axis2_values is not None:
        raise ConfigError("multi_interval_detection needs a 1-D sweep")
    if kind not in ('nm', 'speed'):
        raise ConfigError(f"unknown label kind {kind!r}")

    intervals: List[LabelInterval] = []
    for value, point in zip(curve.axis1_values, curve.points):
        label = (point.nm_label if kind == 'nm' else point.speed_label).value
        if intervals and intervals[-1].label == label:
            last = intervals[-1]
            intervals[-1] = LabelInterval(label, last.start, float(value), last.count + 1)
        else:
            intervals.append(LabelInterval(label, float(value), float(value), 1))
    return intervals


def write_sweep_csv(result: SweepResult, path) -> None:
    result.to_frame().to_csv(path, index=False, float_format='%.17g')
    logger.info(f"Wrote {len(result.points)} sweep rows to {path}")


def write_grid_npz(result: SweepResult, path) -> None:
    """Compact grid file for plotting: axis vectors plus measure matrices."""
    np.savez(
        path,
        axis1=result.axis1_values,
        axis2=np.array([]) if result.axis2_values is None else result.axis2_values,
        n_blp=result.grid('n_blp'),
        qsl_ratio_general=result.grid('qsl_ratio_general'),
        qsl_ratio_closed=result.grid('qsl_ratio_closed'),
    )
    logger.info(f"Wrote compact grid to {path}")
