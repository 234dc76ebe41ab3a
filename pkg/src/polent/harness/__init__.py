"""Config-driven scenario runner, result files and command line interface."""

from .config import ExperimentConfig, load_config, parse_config
from .results import ResultTable, Row, write_plot_data, write_table
from .scenarios import run_oracles, run_scenario, run_sweep
