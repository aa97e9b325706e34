#!/usr/bin/env python3
"""
HierarchicalEnvironmentSimulator - orchestrates simulation runs for a qubit in a
two-layer hierarchical environment and writes their artifacts.
"""

import json
import logging
import time
from dataclasses import asdict
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

from amplitude_dynamics import integrate, integrate_volterra, write_trajectory_csv
from coupling_sweep import find_crossover, multi_interval_detection, run_sweep, write_grid_npz, write_sweep_csv
from hierarchical_model import build_generator, classify_regime, validate
from run_config import RunConfig, write_canonical_config
from simulation_errors import HierarchicalEnvError
from speedup_measures import measure_report


class HierarchicalEnvironmentSimulator:
    """
    Runs the four simulator tasks against one RunConfig.

    - simulate: dense amplitude trajectory
    - measure: non-Markovianity and speed-limit report at one point
    - crossover: critical coupling by bisection
    - phase: 1-D curve or 2-D phase diagram sweep
    """

    def __init__(self, config: Optional[RunConfig] = None):
        """
        Initialize the simulator.

        Args:
            config: Resolved run configuration, defaults when omitted
        """
        self.logger = logging.getLogger(__name__)
        self.config = config or RunConfig()

        self._stats = {
            'runs': 0,
            'successful': 0,
            'failed': 0,
            'flagged_points': 0,
            'total_seconds': 0.0,
        }

        self._log_info(f"Initialized simulator for '{self.config.subcommand}' "
                       f"({self.config.env}, kappa0={self.config.kappa0}, tau={self.config.tau})")

    def _log_info(self, message: str):
        self.logger.info(message)

    def _log_warning(self, message: str):
        self.logger.warning(message)

    def _log_error(self, message: str):
        self.logger.error(message)

    @property
    def output_dir(self) -> Path:
        return Path(self.config.output_dir)

    def run(self) -> Dict[str, Any]:
        """Dispatch to the configured subcommand and keep run statistics."""
        handlers = {
            'simulate': self.simulate,
            'measure': self.measure,
            'crossover': self.crossover,
            'phase': self.phase,
        }
        start_time = time.time()
        self._stats['runs'] += 1
        try:
            self.config.prepare_output_dir()
            result = handlers[self.config.subcommand]()
        except HierarchicalEnvError as e:
            self._stats['failed'] += 1
            self._log_error(f"{self.config.subcommand} failed: {e.message}")
            raise
        finally:
            self._stats['total_seconds'] += time.time() - start_time

        self._stats['successful'] += 1
        result['finished_at'] = datetime.now().isoformat()
        return result

    def simulate(self) -> Dict[str, Any]:
        """Integrate the amplitudes and write the trajectory CSV (and optional SVG)."""
        params = validate(self.config.model_params())
        if self.config.volterra_dt is not None and params.is_memory_keeping:
            self._log_info(f"Using direct Volterra quadrature with dt={self.config.volterra_dt}")
            traj = integrate_volterra(params, self.config.volterra_dt, params.tau)
        else:
            traj = integrate(build_generator(params), self.config.solver_config(), params.tau)

        csv_path = self.output_dir / 'trajectory.csv'
        write_trajectory_csv(traj, csv_path)
        result = {
            'success': True,
            'subcommand': 'simulate',
            'regime': classify_regime(params).value,
            'rows': len(traj.times),
            'survival_tau': float(traj.survival[-1]),
            'trajectory_csv': str(csv_path),
        }
        if self.config.plot:
            from svg_plots import plot_survival
            svg_path = self.output_dir / 'survival.svg'
            plot_survival(traj, svg_path)
            result['plot'] = str(svg_path)
        return result

    def measure(self) -> Dict[str, Any]:
        """Evaluate every measure at the configured point and write measure.json."""
        params = validate(self.config.model_params())
        traj = integrate(build_generator(params), self.config.solver_config(), params.tau)
        report = measure_report(traj)
        if report.degenerate:
            self._log_warning("Qubit dynamics are frozen, speed-limit ratio reported as 0")

        record = dict(report.to_record(), regime=classify_regime(params).value)
        json_path = self.output_dir / 'measure.json'
        self._write_json(record, json_path)
        return {'success': True, 'subcommand': 'measure', 'report': record, 'measure_json': str(json_path)}

    def crossover(self) -> Dict[str, Any]:
        """Bisect for the critical coupling and write crossover.json."""
        cfg = self.config
        params = validate(cfg.model_params())
        found = find_crossover(
            params, cfg.crossover_parameter, (cfg.bracket_low, cfg.bracket_high),
            predicate=cfg.predicate, tol=cfg.crossover_tol,
            thresholds=cfg.thresholds(), solver=cfg.solver_config(),
        )
        json_path = self.output_dir / 'crossover.json'
        self._write_json(found.to_record(), json_path)
        return {'success': True, 'subcommand': 'crossover', 'crossover': found.to_record(),
                'crossover_json': str(json_path)}

    def phase(self) -> Dict[str, Any]:
        """Run the sweep, write the CSV and grid file, and plot when asked."""
        cfg = self.config
        spec = cfg.sweep_spec()
        sweep = run_sweep(spec, cfg.solver_config(), workers=cfg.workers,
                          progress='alive' if cfg.interactive else 'tqdm')
        self._stats['flagged_points'] += sweep.failed_count
        if sweep.failed_count:
            self._log_warning(f"{sweep.failed_count} of {len(sweep.points)} points were flagged as failed")

        csv_path = self.output_dir / 'phase.csv'
        npz_path = self.output_dir / 'phase_grid.npz'
        write_sweep_csv(sweep, csv_path)
        write_grid_npz(sweep, npz_path)
        result = {
            'success': True,
            'subcommand': 'phase',
            'points': len(sweep.points),
            'flagged_points': sweep.failed_count,
            'phase_csv': str(csv_path),
            'grid_file': str(npz_path),
        }

        if spec.axis2 is None:
            intervals = {kind: [asdict(i) for i in multi_interval_detection(sweep, kind)] for kind in ('nm', 'speed')}
            intervals_path = self.output_dir / 'phase_intervals.json'
            self._write_json(intervals, intervals_path)
            result['intervals'] = intervals
            result['intervals_json'] = str(intervals_path)

        if cfg.plot:
            from svg_plots import plot_phase_diagram, plot_sweep_curve
            svg_path = self.output_dir / 'phase.svg'
            if spec.axis2 is None:
                plot_sweep_curve(sweep, svg_path)
            else:
                plot_phase_diagram(sweep, svg_path)
            result['plot'] = str(svg_path)
        return result

    def echo_config(self, path) -> None:
        write_canonical_config(self.config, path)

    def get_run_stats(self) -> Dict[str, Any]:
        """
        Get run statistics for this simulator instance.

        Returns:
            Dict containing run statistics
        """
        return {
            'total_runs': self._stats['runs'],
            'successful': self._stats['successful'],
            'failed': self._stats['failed'],
            'success_rate': (self._stats['successful'] / max(self._stats['runs'], 1)) * 100,
            'flagged_points': self._stats['flagged_points'],
            'total_seconds': self._stats['total_seconds'],
        }

    def _write_json(self, record: Dict[str, Any], path: Path) -> None:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(record, f, indent=2, sort_keys=True)
            f.write('\n')
        self._log_info(f"Wrote {path}")
