"""
LV Spreading Toolkit - Helper Module

This module wires the numerical core to files and the command line:
environment settings, experiment configs, run directories and the preset
acceptance experiments.

Main Functions:
    run_preset: Run a preset experiment by name and save its report
    load_config: Read and validate a YAML experiment config
    write_run / load_run: Persist and reload solver runs

Usage Examples:
    # As a library
    from helper import run_preset
    outcome = run_preset("eigenvalue_oracle", quick=True)
    print(outcome["result"]["report"]["passed"])

    # Running a config
    from helper import load_config
    config = load_config("exterior.yaml")
    mask = config.build_mask()
"""

from .setup import ensure_env_setup, get_settings, save_env_vars
from .config import ExperimentConfig, config_hash, cross_validate, dump_config, load_config, parse_config
from .formats import load_run, make_serializable, save_json, write_rows_csv, write_run
from .preset_call import available_presets, list_presets, run_preset, run_presets
from .presets_definition import presets

__all__ = [
    'ensure_env_setup',
    'get_settings',
    'save_env_vars',
    'ExperimentConfig',
    'config_hash',
    'cross_validate',
    'dump_config',
    'load_config',
    'parse_config',
    'load_run',
    'make_serializable',
    'save_json',
    'write_rows_csv',
    'write_run',
    'available_presets',
    'list_presets',
    'run_preset',
    'run_presets',
    'presets',
]
