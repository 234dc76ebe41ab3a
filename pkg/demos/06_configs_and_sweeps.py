"""Driving the model from a config file, as the command line tool does.

Loads a shipped config, runs its scenario and a splitting-ratio sweep,
and prints a few rows of each table. Nothing is written to disk.
"""

from pathlib import Path

import numpy as np

from polent.harness import load_config, run_scenario, run_sweep

cfg = load_config(Path(__file__).resolve().parents[1] / "configs" / "entangle_sq_basis_asym.yaml")
table = run_scenario(cfg)
for row in table.rows[4:9]:
    print(f"{row.quantity:32s} {row.linear:10.6f}  [{row.provenance}]")

sweep = run_sweep(cfg, "t", np.linspace(0.45, 0.55, 5))
print("\nT      product root (sq basis)")
for t, v in sweep.series()["product root (sq basis)"]:
    print(f"{t:.3f}  {v:.4f}")
