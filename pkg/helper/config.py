"""
Experiment configuration files.

A config is a YAML document with the blocks params, domain, initial,
solver, measurement and output. Parsing is strict: unknown keys and bad
values raise ConfigError naming the dotted field path. The normalized
tree is what gets hashed into the run manifest.
"""

import hashlib
import inspect
import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List

import yaml

import schemes
from spreading.domain import GENERATORS, DirectionQuery, DomainMask, build_mask, compute_R
from spreading.errors import ConfigError, DomainError, ParameterError
from spreading.params import KineticParams
from spreading.solver import InitialCondition, Probe, SolverConfig, bump_initial, step_initial

SCHEMA_VERSION = 1
TOP_LEVEL_KEYS = ("schema_version", "seed", "params", "domain", "initial", "solver", "measurement", "output")
INITIAL_KEYS = {
    "bump": ("center", "radius", "amplitude", "v_dip", "taper"),
    "step": ("front", "axis"),
}


@dataclass
class MeasurementConfig:
    """
    Speed measurement settings.

    Attributes:
        e (list): direction of propagation
        anchors (list): tube anchors z
        A_list (list): tube radii, each above R(e, z)
        epsilon (float): activity threshold in (0, 1/2)
        tau_fraction (float): trailing cut of the converged region
        window_fraction (float): regression window as a fraction of the horizon
        n_windows (int): successive windows for the trend test
        probes (list): point probes as dicts with id, point and species
    """
    e: List[float] = field(default_factory=lambda: [1.0, 0.0])
    anchors: List[List[float]] = field(default_factory=list)
    A_list: List[float] = field(default_factory=list)
    epsilon: float = 0.01
    tau_fraction: float = 0.2
    window_fraction: float = 0.5
    n_windows: int = 4
    probes: List[Dict[str, Any]] = field(default_factory=list)


@dataclass
class OutputConfig:
    dir: str = field(default_factory=lambda: os.getenv("LVS_OUTPUT_DIR", "runs"))
    snapshots: bool = True


@dataclass
class ExperimentConfig:
    """One fully validated experiment."""
    params: KineticParams
    domain: Dict[str, Any]
    initial: Dict[str, Any]
    solver: SolverConfig
    measurement: MeasurementConfig = field(default_factory=MeasurementConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "seed": self.seed,
            "params": self.params.to_dict(),
            "domain": dict(self.domain),
            "initial": dict(self.initial),
            "solver": self.solver.to_dict(),
            "measurement": asdict(self.measurement),
            "output": asdict(self.output),
        }

    def build_mask(self) -> DomainMask:
        args = {k: v for k, v in self.domain.items() if k != "generator"}
        try:
            return build_mask(self.domain["generator"], **args)
        except (DomainError, ValueError) as exc:
            raise ConfigError("domain", str(exc)) from exc

    def initial_condition(self, mask: DomainMask) -> InitialCondition:
        args = {k: v for k, v in self.initial.items() if k != "kind"}
        try:
            if self.initial["kind"] == "bump":
                initial = bump_initial(mask, **args)
            else:
                initial = step_initial(mask, **args)
            initial.validate(mask)
        except ValueError as exc:
            raise ConfigError("initial", str(exc)) from exc
        return initial

    def probes(self) -> List[Probe]:
        return [Probe(str(p["id"]), tuple(p["point"]), p.get("species", "u")) for p in self.measurement.probes]


# ---------------------------------------------------------------------------
# parsing


def _mapping(tree: Any, path: str) -> Dict[str, Any]:
    if tree is None:
        return {}
    if not isinstance(tree, dict):
        raise ConfigError(path, f"expected a mapping, got {type(tree).__name__}")
    return tree


def _reject_unknown(tree: Dict[str, Any], allowed, path: str) -> None:
    for key in tree:
        if key not in allowed:
            prefix = f"{path}." if path else ""
            raise ConfigError(f"{prefix}{key}", f"unknown key, expected one of {', '.join(allowed)}")


def _number(value: Any, path: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if positive and value <= 0:
        raise ConfigError(path, f"must be positive, got {value}")
    return float(value)


def _point(value: Any, path: str) -> List[float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(path, f"expected a pair [x, y], got {value!r}")
    return [_number(value[0], f"{path}[0]"), _number(value[1], f"{path}[1]")]


def _parse_params(tree: Any) -> KineticParams:
    tree = _mapping(tree, "params")
    for key, value in tree.items():
        _number(value, f"params.{key}")
    try:
        return KineticParams.from_dict(tree)
    except ParameterError as exc:
        raise ConfigError("params", str(exc)) from exc


def parse_domain(tree: Any) -> Dict[str, Any]:
    tree = dict(_mapping(tree, "domain"))
    generator = tree.get("generator")
    if generator not in GENERATORS:
        raise ConfigError("domain.generator", f"expected one of {', '.join(GENERATORS)}, got {generator!r}")
    signature = inspect.signature(GENERATORS[generator])
    _reject_unknown(tree, ["generator"] + list(signature.parameters), "domain")
    for name, parameter in signature.parameters.items():
        if parameter.default is inspect.Parameter.empty and name not in tree:
            raise ConfigError(f"domain.{name}", f"required by the {generator} generator")
    if "extent" in tree:
        extent = tree["extent"]
        if not isinstance(extent, (list, tuple)) or len(extent) != 4:
            raise ConfigError("domain.extent", "expected [xmin, xmax, ymin, ymax]")
        tree["extent"] = [_number(v, f"domain.extent[{i}]") for i, v in enumerate(extent)]
    if "h" in tree:
        tree["h"] = _number(tree["h"], "domain.h", positive=True)
    return tree


def _parse_initial(tree: Any) -> Dict[str, Any]:
    tree = dict(_mapping(tree, "initial"))
    kind = tree.get("kind", "bump")
    if kind not in INITIAL_KEYS:
        raise ConfigError("initial.kind", f"expected bump or step, got {kind!r}")
    tree["kind"] = kind
    _reject_unknown(tree, ("kind",) + INITIAL_KEYS[kind], "initial")
    if kind == "bump":
        if "center" not in tree or "radius" not in tree:
            raise ConfigError("initial", "a bump needs center and radius")
        tree["center"] = _point(tree["center"], "initial.center")
        tree["radius"] = _number(tree["radius"], "initial.radius", positive=True)
        amplitude = _number(tree.get("amplitude", 1.0), "initial.amplitude")
        v_dip = _number(tree.get("v_dip", 0.0), "initial.v_dip")
        if not 0 < amplitude <= 1:
            raise ConfigError("initial.amplitude", "must lie in (0, 1]")
        if not 0 <= v_dip <= 1:
            raise ConfigError("initial.v_dip", "must lie in [0, 1]")
        tree["amplitude"], tree["v_dip"] = amplitude, v_dip
    else:
        if "front" not in tree:
            raise ConfigError("initial.front", "required for a step")
        tree["front"] = _number(tree["front"], "initial.front")
        tree["axis"] = int(tree.get("axis", 0))
        if tree["axis"] not in (0, 1):
            raise ConfigError("initial.axis", "must be 0 or 1")
    return tree


def _parse_solver(tree: Any) -> SolverConfig:
    tree = dict(_mapping(tree, "solver"))
    allowed = list(SolverConfig.__dataclass_fields__)
    _reject_unknown(tree, allowed, "solver")
    tree.setdefault("scheme", os.getenv("LVS_SCHEME", "EXPLICIT").lower())
    tree.setdefault("workers", int(os.getenv("LVS_WORKERS", "1")))
    tree.setdefault("cfl_safety", float(os.getenv("LVS_CFL_SAFETY", "0.9")))
    tree.setdefault("tile_rows", int(os.getenv("LVS_TILE_ROWS", "64")))
    tree.setdefault("linear_solver", os.getenv("LVS_LINEAR_SOLVER", "direct"))
    try:
        schemes.get_scheme(tree["scheme"])
    except ValueError as exc:
        raise ConfigError("solver.scheme", str(exc)) from exc
    tree["scheme"] = str(tree["scheme"]).lower()
    for key in ("workers", "tile_rows"):
        if isinstance(tree[key], bool) or not isinstance(tree[key], int) or tree[key] < 1:
            raise ConfigError(f"solver.{key}", f"must be a positive integer, got {tree[key]!r}")
    if tree["linear_solver"] not in ("direct", "cg"):
        raise ConfigError("solver.linear_solver", "must be direct or cg")
    for key in ("cfl_safety", "snapshot_every", "horizon"):
        if key in tree:
            tree[key] = _number(tree[key], f"solver.{key}")
    if tree.get("dt") is not None:
        tree["dt"] = _number(tree["dt"], "solver.dt", positive=True)
    return SolverConfig(**tree)


def _parse_measurement(tree: Any) -> MeasurementConfig:
    tree = dict(_mapping(tree, "measurement"))
    _reject_unknown(tree, list(MeasurementConfig.__dataclass_fields__), "measurement")
    m = MeasurementConfig()
    if "e" in tree:
        m.e = _point(tree["e"], "measurement.e")
        if m.e == [0.0, 0.0]:
            raise ConfigError("measurement.e", "direction must be nonzero")
    m.anchors = [_point(z, f"measurement.anchors[{i}]") for i, z in enumerate(tree.get("anchors", []))]
    m.A_list = [_number(A, f"measurement.A_list[{i}]", positive=True) for i, A in enumerate(tree.get("A_list", []))]
    m.epsilon = _number(tree.get("epsilon", m.epsilon), "measurement.epsilon")
    if not 0 < m.epsilon < 0.5:
        raise ConfigError("measurement.epsilon", "must lie in (0, 1/2)")
    m.tau_fraction = _number(tree.get("tau_fraction", m.tau_fraction), "measurement.tau_fraction")
    if not 0 <= m.tau_fraction < 1:
        raise ConfigError("measurement.tau_fraction", "must lie in [0, 1)")
    m.window_fraction = _number(tree.get("window_fraction", m.window_fraction), "measurement.window_fraction")
    if not 0 < m.window_fraction <= 1:
        raise ConfigError("measurement.window_fraction", "must lie in (0, 1]")
    m.n_windows = tree.get("n_windows", m.n_windows)
    if isinstance(m.n_windows, bool) or not isinstance(m.n_windows, int) or m.n_windows < 2:
        raise ConfigError("measurement.n_windows", "must be an integer of at least 2")
    probes = []
    for i, probe in enumerate(tree.get("probes", [])):
        probe = _mapping(probe, f"measurement.probes[{i}]")
        _reject_unknown(probe, ("id", "point", "species"), f"measurement.probes[{i}]")
        if "id" not in probe or "point" not in probe:
            raise ConfigError(f"measurement.probes[{i}]", "needs id and point")
        species = probe.get("species", "u")
        if species not in ("u", "v"):
            raise ConfigError(f"measurement.probes[{i}].species", "must be u or v")
        probes.append({"id": str(probe["id"]), "point": _point(probe["point"], f"measurement.probes[{i}].point"),
                       "species": species})
    m.probes = probes
    return m


def _parse_output(tree: Any) -> OutputConfig:
    tree = _mapping(tree, "output")
    _reject_unknown(tree, ("dir", "snapshots"), "output")
    out = OutputConfig()
    if "dir" in tree:
        out.dir = str(tree["dir"])
    if "snapshots" in tree:
        if not isinstance(tree["snapshots"], bool):
            raise ConfigError("output.snapshots", "must be true or false")
        out.snapshots = tree["snapshots"]
    return out


def parse_config(tree: Any) -> ExperimentConfig:
    """
    Validate a raw config tree.

    Args:
        tree (dict): parsed YAML document

    Returns:
        ExperimentConfig: normalized experiment

    Raises:
        ConfigError: on the first invalid field
    """
    tree = _mapping(tree, "config")
    _reject_unknown(tree, TOP_LEVEL_KEYS, "")
    version = tree.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported version {version!r}, expected {SCHEMA_VERSION}")
    for block in ("params", "domain", "initial"):
        if block not in tree:
            raise ConfigError(block, "missing block")
    seed = tree.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("seed", f"expected an integer, got {seed!r}")
    return ExperimentConfig(
        params=_parse_params(tree["params"]),
        domain=parse_domain(tree["domain"]),
        initial=_parse_initial(tree["initial"]),
        solver=_parse_solver(tree.get("solver")),
        measurement=_parse_measurement(tree.get("measurement")),
        output=_parse_output(tree.get("output")),
        seed=seed,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError("config", f"file not found: {path}")
    try:
        tree = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"invalid YAML in {path}: {exc}") from exc
    return parse_config(tree)


def dump_config(config: ExperimentConfig, path) -> Path:
    path = Path(path)
    path.write_text(yaml.safe_dump(config.to_dict(), sort_keys=True, default_flow_style=None))
    return path


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON form of the normalized config."""
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def cross_validate(config: ExperimentConfig, mask: DomainMask) -> Dict[str, float]:
    """
    Checks that need the built mask: tube radii above R(e, z) and a fixed dt
    within the scheme bound.

    Returns:
        dict: anchor label -> R(e, z)

    Raises:
        ConfigError: naming the offending field
    """
    cls = schemes.get_scheme(config.solver.scheme)
    limit = cls.stable_dt(mask, config.params, 1.0)
    if config.solver.dt is not None and config.solver.dt > limit:
        raise ConfigError("solver.dt", f"{config.solver.dt} exceeds the {cls.name} step bound {limit:.4g}")
    radii = {}
    m = config.measurement
    for i, z in enumerate(m.anchors):
        try:
            R = compute_R(mask, DirectionQuery.of(m.e, z))
        except DomainError as exc:
            raise ConfigError(f"measurement.anchors[{i}]", str(exc)) from exc
        radii[f"z=({z[0]:g},{z[1]:g})"] = R
        for j, A in enumerate(m.A_list):
            if A <= R:
                raise ConfigError(f"measurement.A_list[{j}]", f"A={A} must exceed R(e, z)={R:g} at anchor {z}")
    for probe in m.probes:
        if not mask.contains(probe["point"]):
            raise ConfigError("measurement.probes", f"probe {probe['id']} at {probe['point']} is outside the mask")
    return radii
