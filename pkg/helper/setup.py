"""
Environment setup utilities for the LV Spreading Toolkit.

This module loads runtime settings from .env files and writes new values
back to them. Settings are plain environment variables:

    LVS_WORKERS        tile and trace worker threads (default 1)
    LVS_SCHEME         default time-stepping scheme, EXPLICIT or IMEX
    LVS_OUTPUT_DIR     default output directory (default runs)
    LVS_LOG_LEVEL      logging level of the command line (default WARNING)
    LVS_CFL_SAFETY     fraction of the scheme step bound (default 0.9)
    LVS_TILE_ROWS      rows per solver tile (default 64)
    LVS_LINEAR_SOLVER  IMEX linear solver, direct or cg (default direct)
"""

import os
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import load_dotenv, set_key

APP_NAME = "lv-spreading-toolkit"

DEFAULTS: Dict[str, str] = {
    "LVS_WORKERS": "1",
    "LVS_SCHEME": "EXPLICIT",
    "LVS_OUTPUT_DIR": "runs",
    "LVS_LOG_LEVEL": "WARNING",
    "LVS_CFL_SAFETY": "0.9",
    "LVS_TILE_ROWS": "64",
    "LVS_LINEAR_SOLVER": "direct",
}

VALID_VALUES: Dict[str, List[str]] = {
    "LVS_SCHEME": ["EXPLICIT", "IMEX"],
    "LVS_LOG_LEVEL": ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
    "LVS_LINEAR_SOLVER": ["direct", "cg"],
}


def candidate_env_files() -> List[Path]:
    """The .env files consulted, highest priority first."""
    return [
        Path(os.getcwd()) / ".env",
        Path(os.path.dirname(os.path.dirname(__file__))) / ".env",
        Path.home() / ".config" / APP_NAME / ".env",
    ]


def get_env_file_path(global_config: bool = False) -> Path:
    """
    Get the path to the environment file.

    Args:
        global_config: Whether to use global configuration path

    Returns:
        Path: Path to the environment file
    """
    if global_config:
        config_dir = Path.home() / ".config" / APP_NAME
        config_dir.mkdir(parents=True, exist_ok=True)
        return config_dir / ".env"
    else:
        return Path(os.getcwd()) / ".env"


def validate_env_var(key: str, value: str) -> None:
    """
    Raise ValueError for unknown keys or values outside the documented choices.
    """
    if key not in DEFAULTS:
        raise ValueError(f"unknown setting '{key}', known: {', '.join(DEFAULTS)}")
    choices = VALID_VALUES.get(key)
    if choices and value not in choices:
        raise ValueError(f"{key} must be one of {', '.join(choices)}, got '{value}'")
    if key in ("LVS_WORKERS", "LVS_TILE_ROWS") and (not value.isdigit() or int(value) < 1):
        raise ValueError(f"{key} must be a positive integer, got '{value}'")
    if key == "LVS_CFL_SAFETY":
        try:
            safety = float(value)
        except ValueError:
            raise ValueError(f"{key} must be a number, got '{value}'") from None
        if not 0 < safety <= 1:
            raise ValueError(f"{key} must lie in (0, 1], got {safety}")


def save_env_vars(env_vars: Dict[str, str], global_config: bool = False) -> Path:
    """
    Save environment variables to a .env file.

    Args:
        env_vars: Dictionary of environment variables to save
        global_config: Whether to save to global configuration

    Returns:
        Path: Path to the saved environment file
    """
    for key, value in env_vars.items():
        validate_env_var(key, value)

    env_file = get_env_file_path(global_config)

    if not env_file.exists():
        env_file.touch()

    for key, value in env_vars.items():
        set_key(str(env_file), key, value)
        os.environ[key] = value

    return env_file


def ensure_env_setup() -> Optional[Path]:
    """
    Load settings from the available .env files in priority order.

    Values already present in the environment are never overridden, so the
    first file that defines a key wins. Never prompts.

    Returns:
        Optional[Path]: the highest-priority .env file found, or None
    """
    found = None
    for env_file in candidate_env_files():
        if env_file.exists():
            load_dotenv(dotenv_path=str(env_file), override=False)
            found = found or env_file
    return found


def get_settings() -> Dict[str, str]:
    """Current value of every setting, falling back to its default."""
    return {key: os.getenv(key, default) for key, default in DEFAULTS.items()}
