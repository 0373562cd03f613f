"""Run configuration: YAML schema, validation and the shipped reference defaults.

A config file has two top-level sections, ``device`` and ``task``; see
``data/default.yaml`` for every key. Unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .acoustics import EnergyScales, IdtGeometry
from .core import AcousticModeSet, CouplingParams, ModelError, PhysicalConstants, TransmonParams
from .reflection import synthesize_mode_set


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if int(self.points) < 1:
            raise ConfigError("grid needs at least one point")
        if not self.stop >= self.start:
            raise ConfigError("grid stop must be >= start")

    def values(self):
        import numpy as np

        return np.linspace(self.start, self.stop, int(self.points))


@dataclass(frozen=True)
class Device:
    modes: AcousticModeSet
    transmon: TransmonParams = field(default_factory=TransmonParams)
    coupling: CouplingParams = field(default_factory=CouplingParams)
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    geometry: IdtGeometry = field(default_factory=IdtGeometry)
    energies: EnergyScales = field(default_factory=EnergyScales)
    N_c: int = 60
    phi_c: float = math.pi / 4 - 0.09


@dataclass(frozen=True)
class FluxTask:
    flux_start: float = 0.245
    flux_stop: float = 0.262
    points: int = 200
    frequencies: GridSpec = GridSpec(4.2165e9, 4.2895e9, 2000)


@dataclass(frozen=True)
class DispersiveTask:
    mode_label: int = 8
    omega_q: GridSpec = GridSpec(3.8e9, 4.9e9, 221)
    phonon_index: int = 0
    levels: int = 4
    n_max: int = 50


@dataclass(frozen=True)
class StarkTask:
    mode_label: int = 8
    omega_q: tuple = (3.96e9, 4.652e9, 4.672e9, 4.732e9)
    max_phonons: int = 15
    levels: int = 4
    n_max: int = 50


@dataclass(frozen=True)
class FitTask:
    prominence: float = 0.02
    g0: float | None = None
    phi_q: float | None = None
    Ib: float | None = None
    max_iter: int = 60


@dataclass(frozen=True)
class Task:
    out: str = "out"
    seed: int = 0
    noise: float = 0.0
    spectrum: GridSpec = GridSpec(4.2165e9, 4.2895e9, 20001)
    flux_sweep: FluxTask = FluxTask()
    participation: FluxTask = FluxTask(0.249, 0.256, 281)
    dispersive: DispersiveTask = DispersiveTask()
    stark: StarkTask = StarkTask()
    emission: GridSpec = GridSpec(3.6e9, 4.9e9, 1301)
    fit: FitTask = FitTask()


@dataclass(frozen=True)
class RunConfig:
    device: Device
    task: Task = Task()


def _check_keys(d, allowed, section):
    if not isinstance(d, dict):
        raise ConfigError(f"{section}: expected a mapping, got {type(d).__name__}")
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise ConfigError(f"{section}: unknown keys {unknown}")


def _make(cls, d, section, nested=None):
    """Instantiate dataclass ``cls`` from mapping ``d`` with strict key checking."""
    nested = nested or {}
    d = {} if d is None else d
    names = [f.name for f in dataclasses.fields(cls)]
    _check_keys(d, names, section)
    kwargs = {}
    for k, v in d.items():
        if k in nested:
            kwargs[k] = _make(nested[k], v, f"{section}.{k}")
        elif isinstance(v, list):
            kwargs[k] = tuple(v)
        else:
            kwargs[k] = v
    try:
        return cls(**kwargs)
    except (ModelError, TypeError) as exc:
        raise ConfigError(f"{section}: {exc}") from exc


CAVITY_KEYS = ["fsr", "center_frequency", "mirror_bandwidth", "kappa0", "spacing_tolerance", "N_c", "phi_c", "modes"]
MODE_KEYS = ["label", "kind", "frequency", "kappa_internal", "external_amplitude"]


def _modes(cav):
    _check_keys(cav, CAVITY_KEYS, "device.cavity")
    modes = cav.get("modes")
    if not modes:
        raise ConfigError("device.cavity.modes: at least one mode is required")
    for k, m in enumerate(modes):
        _check_keys(m, MODE_KEYS, f"device.cavity.modes[{k}]")
    d = {k: v for k, v in cav.items() if k not in ("N_c", "phi_c")}
    try:
        return AcousticModeSet.from_dict(d)
    except (ModelError, TypeError, ValueError) as exc:
        raise ConfigError(f"device.cavity: {exc}") from exc


def device_from_dict(d: dict) -> Device:
    _check_keys(d, ["cavity", "transmon", "coupling", "constants", "geometry", "energies"], "device")
    if "cavity" not in d:
        raise ConfigError("device.cavity is required")
    cav = d["cavity"]
    modes = _modes(cav)
    return Device(
        modes=modes,
        transmon=_make(TransmonParams, d.get("transmon"), "device.transmon"),
        coupling=_make(CouplingParams, d.get("coupling"), "device.coupling"),
        constants=_make(PhysicalConstants, d.get("constants"), "device.constants"),
        geometry=_make(IdtGeometry, d.get("geometry"), "device.geometry"),
        energies=_make(EnergyScales, d.get("energies"), "device.energies"),
        N_c=int(cav.get("N_c", 60)),
        phi_c=float(cav.get("phi_c", math.pi / 4 - 0.09)),
    )


def task_from_dict(d: dict | None) -> Task:
    nested = {
        "spectrum": GridSpec,
        "emission": GridSpec,
        "flux_sweep": FluxTask,
        "participation": FluxTask,
        "dispersive": DispersiveTask,
        "stark": StarkTask,
        "fit": FitTask,
    }
    task = _make(Task, d, "task", nested)
    # second-level grids
    subs = {}
    for name in ("flux_sweep", "participation"):
        raw = (d or {}).get(name) or {}
        if "frequencies" in raw:
            subs[name] = dataclasses.replace(getattr(task, name),
                                             frequencies=_make(GridSpec, raw["frequencies"], f"task.{name}.frequencies"))
    raw = (d or {}).get("dispersive") or {}
    if "omega_q" in raw:
        subs["dispersive"] = dataclasses.replace(task.dispersive,
                                                 omega_q=_make(GridSpec, raw["omega_q"], "task.dispersive.omega_q"))
    return dataclasses.replace(task, **subs) if subs else task


def config_from_dict(d: dict) -> RunConfig:
    _check_keys(d, ["device", "task"], "config")
    if "device" not in d:
        raise ConfigError("config: missing device section")
    return RunConfig(device_from_dict(d["device"]), task_from_dict(d.get("task")))


def load_config(path) -> RunConfig:
    with open(path) as fh:
        try:
            d = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if d is None:
        raise ConfigError(f"{path}: empty config")
    return config_from_dict(d)


def _plain(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if getattr(obj, f.name) is not None}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    return obj


def device_to_dict(dev: Device) -> dict:
    cav = dev.modes.to_dict()
    cav["N_c"] = dev.N_c
    cav["phi_c"] = dev.phi_c
    out = {"cavity": cav}
    for name in ("transmon", "coupling", "constants", "geometry", "energies"):
        out[name] = _plain(getattr(dev, name))
    return out


def config_to_dict(cfg: RunConfig) -> dict:
    return {"device": device_to_dict(cfg.device), "task": _plain(cfg.task)}


def reference_device() -> Device:
    """Reference device: 17-mode cavity, default transmon and coupling parameters."""
    coupling = CouplingParams()
    N_c, phi_c = 60, math.pi / 4 - 0.09
    modes = synthesize_mode_set(N_c=N_c, phi_c=phi_c, label_offset=coupling.label_offset)
    return Device(modes=modes, coupling=coupling, N_c=N_c, phi_c=phi_c)


def default_config() -> RunConfig:
    """The shipped ``data/default.yaml``."""
    ref = resources.files("sawcavity") / "data" / "default.yaml"
    with resources.as_file(ref) as p:
        return load_config(p)


def default_config_path() -> Path:
    return Path(str(resources.files("sawcavity") / "data" / "default.yaml"))


def dump_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False, default_flow_style=None, width=100)
