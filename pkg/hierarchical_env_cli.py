#!/usr/bin/env python3
"""
Command-line front end for the hierarchical-environment simulator.

All rates are given in units of gamma0 (the loss rate of the first-layer
cavity) and times in units of 1/gamma0.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from rich.console import Console
from rich.logging import RichHandler

from coupling_sweep import PREDICATES
from hierarchical_model import SWEEPABLE_PARAMETERS
from HierarchicalEnvironmentSimulator import HierarchicalEnvironmentSimulator
from run_config import ENV_VARIANTS, RunConfig, resolve_config
from simulation_errors import EXIT_OK, EXIT_UNEXPECTED, HierarchicalEnvError
from sweep_presets import PRESETS

console = Console(stderr=True)

LOG_FILE_NAME = 'hierarchical_env.log'

# (flag, config key, type, help)
_VALUE_FLAGS = [
    ('--kappa0', 'kappa0', float, 'qubit <-> m0 coupling'),
    ('--kappa', 'kappa', float, 'm0 <-> m1, m2 coupling'),
    ('--omega-c', 'omega_c', float, 'm1 <-> m2 coupling'),
    ('--tau', 'tau', float, 'evolution horizon'),
    ('--gamma', 'gamma', float, 'loss rate of m1, m2 (memoryless)'),
    ('--upsilon1', 'upsilon1', float, 'reservoir coupling of m1 (memory-keeping)'),
    ('--upsilon2', 'upsilon2', float, 'reservoir coupling of m2 (memory-keeping)'),
    ('--lambda1', 'lambda1', float, 'inverse correlation time of R1 (memory-keeping)'),
    ('--lambda2', 'lambda2', float, 'inverse correlation time of R2 (memory-keeping)'),
    ('--rel-tol', 'rel_tol', float, 'integrator relative tolerance'),
    ('--abs-tol', 'abs_tol', float, 'integrator absolute tolerance'),
    ('--max-step', 'max_step', float, 'integrator maximum step'),
    ('--grid-points', 'dense_grid_points', int, 'number of output times over [0, tau]'),
    ('--volterra-dt', 'volterra_dt', float, 'simulate memory-keeping runs with direct quadrature at this step'),
    ('--axis1-min', 'axis1_min', float, 'first axis minimum'),
    ('--axis1-max', 'axis1_max', float, 'first axis maximum'),
    ('--axis1-count', 'axis1_count', int, 'first axis point count'),
    ('--axis2-min', 'axis2_min', float, 'second axis minimum'),
    ('--axis2-max', 'axis2_max', float, 'second axis maximum'),
    ('--axis2-count', 'axis2_count', int, 'second axis point count'),
    ('--eps-nm', 'eps_nm', float, 'non-Markovianity floor'),
    ('--eps-qsl', 'eps_qsl', float, 'speedup floor'),
    ('--bracket-low', 'bracket_low', float, 'crossover bracket lower end'),
    ('--bracket-high', 'bracket_high', float, 'crossover bracket upper end'),
    ('--crossover-tol', 'crossover_tol', float, 'crossover bracket width to stop at'),
    ('--workers', 'workers', int, 'parallel sweep workers'),
    ('--output-dir', 'output_dir', str, 'directory for all outputs'),
]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='flat JSON config file')
    common.add_argument('--preset', choices=sorted(PRESETS), help='named parameter preset')
    common.add_argument('--env', choices=ENV_VARIANTS, help='second-layer reservoir variant')
    common.add_argument('--axis1', dest='axis1_name', choices=SWEEPABLE_PARAMETERS, help='first sweep axis')
    common.add_argument('--axis2', dest='axis2_name', choices=SWEEPABLE_PARAMETERS, help='second sweep axis')
    common.add_argument('--parameter', dest='crossover_parameter', choices=SWEEPABLE_PARAMETERS,
                        help='parameter bisected by crossover')
    common.add_argument('--predicate', choices=PREDICATES, help='crossover predicate')
    for flag, key, kind, text in _VALUE_FLAGS:
        common.add_argument(flag, dest=key, type=kind, help=text)
    common.add_argument('--plot', action='store_const', const=True, help='also write an SVG plot')
    common.add_argument('--interactive', action='store_const', const=True,
                        help='alive-progress bar for sweeps')
    common.add_argument('--echo-config', help='write the resolved configuration in canonical form')
    common.add_argument('-v', '--verbose', action='store_true', help='debug logging')

    parser = argparse.ArgumentParser(
        description="Qubit dynamics in a two-layer hierarchical environment: "
                    "non-Markovianity and quantum speed limit",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python3 hierarchical_env_cli.py simulate --kappa0 0.2 --kappa 2.4 --plot
  python3 hierarchical_env_cli.py measure --preset memoryless_kappa --kappa 2.4
  python3 hierarchical_env_cli.py crossover --preset memoryless_kappa --predicate speedup_onset
  python3 hierarchical_env_cli.py phase --preset memoryless_phase --workers 8 --plot
  python3 hierarchical_env_cli.py phase --config my_run.json --axis1-count 31 --echo-config echoed.json

All rates are in units of gamma0, times in units of 1/gamma0.
        """
    )
    sub = parser.add_subparsers(dest='subcommand', required=True)
    sub.add_parser('simulate', parents=[common], help='write the dense amplitude trajectory')
    sub.add_parser('measure', parents=[common], help='non-Markovianity and QSL ratio at one point')
    sub.add_parser('crossover', parents=[common], help='critical coupling by bisection')
    sub.add_parser('phase', parents=[common], help='1-D curve or 2-D phase diagram sweep')
    return parser


def setup_logging(output_dir: Optional[Path], verbose: bool) -> None:
    handlers: List[logging.Handler] = [RichHandler(console=console, show_path=False)]
    if output_dir is not None:
        handlers.insert(0, logging.FileHandler(output_dir / LOG_FILE_NAME))
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {'config', 'echo_config', 'verbose'}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def _report_error(error: HierarchicalEnvError, config: Optional[RunConfig]) -> int:
    record = error.to_record()
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    if config is not None:
        try:
            out = Path(config.output_dir)
            if out.is_dir():
                (out / 'error.json').write_text(json.dumps(record, indent=2, sort_keys=True) + '\n', encoding='utf-8')
        except OSError:
            pass
    console.print(f"❌ {record['error']}: {record['message']}")
    return error.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and return the process exit code."""
    args = build_parser().parse_args(argv)
    config = None
    try:
        config = resolve_config(args.config, _overrides(args))
        out = config.prepare_output_dir()
        setup_logging(out, args.verbose)

        simulator = HierarchicalEnvironmentSimulator(config)
        if args.echo_config:
            simulator.echo_config(args.echo_config)
        result = simulator.run()
    except HierarchicalEnvError as e:
        return _report_error(e, config)
    except Exception as e:
        logging.getLogger(__name__).exception("Unexpected failure")
        print(json.dumps({'error': type(e).__name__, 'message': str(e), 'exit_code': EXIT_UNEXPECTED}),
              file=sys.stderr)
        return EXIT_UNEXPECTED

    print(json.dumps(result, indent=2, sort_keys=True))
    console.print(f"✅ {config.subcommand} finished, outputs in {config.output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
