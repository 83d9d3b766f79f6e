import logging
import os
from pathlib import Path
from typing import Dict, List, Optional

from spreading.errors import SpreadingError

from .experiments import (
    comb_position_dependence,
    cusp_superlinear,
    eigenvalue_oracle,
    exterior_bounds,
    exterior_exact_speed,
    halfcyl_lower,
    hypothesis_Hyz_transfer,
    initial_value_independence,
    invariant_suite,
    kanon_sandwich,
    linear_determinacy,
    ode_pde_triangle,
    plane_upper,
    quarter_space,
    scheme_monotonicity,
    spiral_zero,
    supersolution_residuals,
)
from .formats import save_json
from .presets_definition import presets as preset_definitions

logger = logging.getLogger(__name__)

available_presets = {
    "exterior_exact_speed": exterior_exact_speed,
    "exterior_bounds": exterior_bounds,
    "plane_upper": plane_upper,
    "comb_position_dependence": comb_position_dependence,
    "spiral_zero": spiral_zero,
    "cusp_superlinear": cusp_superlinear,
    "halfcyl_lower": halfcyl_lower,
    "quarter_space": quarter_space,
    "initial_value_independence": initial_value_independence,
    "hypothesis_Hyz_transfer": hypothesis_Hyz_transfer,
    "kanon_sandwich": kanon_sandwich,
    "linear_determinacy": linear_determinacy,
    "ode_pde_triangle": ode_pde_triangle,
    "supersolution_residuals": supersolution_residuals,
    "eigenvalue_oracle": eigenvalue_oracle,
    "scheme_monotonicity": scheme_monotonicity,
    "invariant_suite": invariant_suite,
}


def list_presets() -> List[Dict[str, str]]:
    """Registered presets with their descriptions and criteria, in registry order."""
    return [entry["preset"] for entry in preset_definitions]


def report_path(name: str, quick: bool, output_dir=None) -> Path:
    base = Path(output_dir or os.getenv("LVS_OUTPUT_DIR", "runs")) / "verify"
    return base / f"{name}{'_quick' if quick else ''}.json"


def run_preset(name: str, quick: bool = False, output_dir=None, save_report: bool = True) -> Dict:
    """
    Run a preset experiment by name and optionally save its report.

    Args:
        name (str): preset name, see presets_definition
        quick (bool): shrink grids and horizons
        output_dir (path, optional): base directory, default LVS_OUTPUT_DIR
        save_report (bool): write the report JSON under <output_dir>/verify/

    Returns:
        dict: Contains 'success', 'result' (report dict and its path), and 'error' (if any).
    """
    if name not in available_presets:
        return {"success": False, "result": None,
                "error": f"unknown preset '{name}', available: {', '.join(available_presets)}"}
    logger.info("running preset %s (quick=%s)", name, quick)
    try:
        report = available_presets[name](quick=quick)
    except SpreadingError as e:
        return {"success": False, "result": None, "error": f"{type(e).__name__}: {e}"}
    result = {"report": report.to_dict(), "path": None}
    if save_report:
        result["path"] = str(save_json(report, report_path(name, quick, output_dir)))
    return {"success": True, "result": result, "error": None}


def run_presets(names: Optional[List[str]] = None, quick: bool = False, output_dir=None) -> Dict[str, Dict]:
    """Run several presets in registry order; the default is all of them."""
    names = names or list(available_presets)
    return {name: run_preset(name, quick, output_dir) for name in names}
