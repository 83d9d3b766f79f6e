"""
LV Spreading Toolkit

Numerical experiments on spreading speeds of the monostable Lotka-Volterra
competition-diffusion system on planar domains with zero-flux boundaries.

This package provides:
- Domain masks for exterior, half-cylinder, quarter-plane, comb, spiral and cusp geometries
- Explicit and IMEX solvers with snapshot files and point probes
- Global and local spreading-speed estimates from tube scans
- Minimal traveling-wave speeds, ball eigenvalues and comparison-function residuals
- Preset experiments with pass/fail reports

Quick Start:
    # Install the package
    pip install lv-spreading-toolkit

    # Use as command line tool
    lv-spread simulate configs/exterior.yaml
    lv-spread speeds runs/exterior
    lv-spread verify eigenvalue_oracle

    # Use as Python library
    from spreading import KineticParams, min_wave_speed
    c_star = min_wave_speed(KineticParams(1, 1, 1, 1, 0.5, 1.5))

Environment Variables:
    LVS_WORKERS: Worker threads for tiles and tube scans (default: 1)
    LVS_SCHEME: Default scheme, "EXPLICIT" or "IMEX" (default: "EXPLICIT")
    LVS_OUTPUT_DIR: Base directory for runs and reports (default: "runs")
    LVS_LOG_LEVEL: Logging level of the command line (default: "WARNING")
    LVS_CFL_SAFETY: Fraction of the scheme step bound (default: 0.9)
    LVS_TILE_ROWS: Rows per solver tile (default: 64)
    LVS_LINEAR_SOLVER: IMEX linear solver, "direct" or "cg" (default: "direct")
"""

from helper import load_config, run_preset
from spreading import KineticParams, evolve, min_wave_speed, speed_matrix

__version__ = "0.1.0"
__author__ = "LV Spreading Toolkit contributors"

__all__ = [
    'KineticParams',
    'evolve',
    'speed_matrix',
    'min_wave_speed',
    'load_config',
    'run_preset',
]
