#!/usr/bin/env python3
"""
Example Usage of HierarchicalEnvironmentSimulator

Walks through the four simulator tasks on the weak-coupling memoryless
parameter set, then shows the direct library calls behind them.
"""

import pprint
import sys

from HierarchicalEnvironmentSimulator import HierarchicalEnvironmentSimulator
from coupling_sweep import evaluate_point
from hierarchical_model import ModelParams, classify_regime
from run_config import resolve_config
from simulation_errors import HierarchicalEnvError


def main(output_dir: str = 'example_output'):
    print("🔬 Hierarchical Environment Simulator Demo")
    print("=" * 50)

    scenarios = [
        ("1️⃣  Simulate - backflow regime", {'subcommand': 'simulate', 'preset': 'memoryless_kappa', 'kappa': 2.4, 'plot': True}),
        ("2️⃣  Measure - backflow regime", {'subcommand': 'measure', 'preset': 'memoryless_kappa', 'kappa': 2.4}),
        ("3️⃣  Crossover - kappa_c by bisection", {'subcommand': 'crossover', 'preset': 'memoryless_kappa',
                                                  'dense_grid_points': 401, 'crossover_tol': 0.01}),
        ("4️⃣  Phase - coarse 1-D curve", {'subcommand': 'phase', 'preset': 'memoryless_omega', 'axis1_count': 13,
                                         'dense_grid_points': 401, 'plot': True}),
        ("5️⃣  Crossover - empty bracket", {'subcommand': 'crossover', 'preset': 'memoryless_kappa',
                                          'bracket_low': 0.1, 'bracket_high': 0.2, 'dense_grid_points': 401}),
    ]

    for title, overrides in scenarios:
        print(f"\n{title}")
        config = resolve_config(overrides=dict(overrides, output_dir=output_dir))
        simulator = HierarchicalEnvironmentSimulator(config)
        try:
            result = simulator.run()
        except HierarchicalEnvError as e:
            print(f"   Result: ❌ {e.to_record()['error']} (exit code {e.exit_code})")
            continue
        print("   Result: ✅ Success")
        if 'report' in result:
            print(f"   N = {result['report']['n_blp']:.6f}, "
                  f"tau_QSL/tau = {result['report']['qsl_ratio_general']:.6f}")
        if 'crossover' in result:
            print(f"   kappa_c = {result['crossover']['critical_value']:.4f}")
        if 'intervals' in result:
            print(f"   Regimes along omega_c: {[i['label'] for i in result['intervals']['nm']]}")
        print(f"   Stats: {simulator.get_run_stats()}")

    print("\n" + "=" * 50)
    print("🧮 Direct library calls")
    print("=" * 50)
    params = ModelParams(kappa0=0.2, kappa=2.4)
    print(f"   Regime: {classify_regime(params).value}")
    pprint.pprint(evaluate_point(params).to_record(), width=80)

    print("\n" + "=" * 50)
    print(f"✅ Demo completed, outputs in {output_dir}")
    print("=" * 50)


if __name__ == "__main__":
    try:
        main(*sys.argv[1:2])
    except KeyboardInterrupt:
        print("\n\n⏹️  Demo interrupted by user")
