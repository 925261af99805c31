"""Scenario description: BS layout, UE array layout, waveform, run settings.

A scenario file is a single YAML document with four top-level sections::

    bs:                     # list of base stations
    - position_m: [-10.5, -10.5, 5.0]
      orientation_deg: [0.0, 90.0, 45.0]
      panel: {rows: 8, cols: 8, spacing_wl: 0.5}
    ue:
      subarrays:            # rigid arrangement, poses in the UE frame
      - offset_m: [0.05, 0.0, 0.0]
        orientation_deg: [0.0, 0.0, 0.0]
        panel: {rows: 4, cols: 4, spacing_wl: 0.5}
    signal:
      power_dbm: 0.0
      carrier_hz: 1.4e+11
      bandwidth_hz: 1.0e+09
      num_subcarriers: 10
      num_transmissions: 50
      noise_psd_dbm_hz: -173.855
      noise_figure_db: 10.0
    sim:
      seed: 1
      clock_bias_s: 0.0

Keys carry explicit units.  Unknown keys are rejected so typos fail loudly.
The named presets pair two UE layouts (six 4x4 subarrays, either coplanar
or on the faces of a 0.1 m cube) with two, three, or four ceiling-mounted
8x8 BS panels.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import yaml

from .channel import SignalConfig
from .errors import ConfigError
from .geometry import (
    EulerAngles,
    Pose,
    Subarray,
    element_grid,
    euler_to_rotation,
)

PRESET_NAMES = (
    "planar-2bs",
    "planar-3bs",
    "planar-4bs",
    "cuboidal-2bs",
    "cuboidal-3bs",
    "cuboidal-4bs",
)

_BS_SITES = (
    ((-10.5, -10.5, 5.0), (0.0, 90.0, 45.0)),
    ((10.5, 10.5, 5.0), (0.0, 90.0, -135.0)),
    ((-10.5, 10.5, 5.0), (0.0, 90.0, -45.0)),
    ((10.5, -10.5, 5.0), (0.0, 90.0, 135.0)),
)

# Subarray centers of the planar UE: the cube faces unfolded into a cross
# in the local Y-Z plane, 0.1 m pitch, boresight along local +X everywhere.
_PLANAR_OFFSETS = (
    (0.0, 0.0, 0.1),
    (0.0, -0.1, 0.0),
    (0.0, 0.0, 0.0),
    (0.0, 0.1, 0.0),
    (0.0, 0.2, 0.0),
    (0.0, 0.0, -0.1),
)

# Face centers of a 0.1 m cube and the mounting rotation that points each
# boresight along the outward normal.
_CUBE_FACES = (
    ((0.05, 0.0, 0.0), (0.0, 0.0, 0.0)),
    ((-0.05, 0.0, 0.0), (0.0, 0.0, 180.0)),
    ((0.0, 0.05, 0.0), (0.0, 0.0, 90.0)),
    ((0.0, -0.05, 0.0), (0.0, 0.0, -90.0)),
    ((0.0, 0.0, 0.05), (0.0, -90.0, 0.0)),
    ((0.0, 0.0, -0.05), (0.0, 90.0, 0.0)),
)


@dataclass(frozen=True)
class PanelConfig:
    """Uniform rectangular panel, spacing in carrier wavelengths."""

    rows: int
    cols: int
    spacing_wl: float = 0.5

    @property
    def num_elements(self) -> int:
        return self.rows * self.cols


@dataclass(frozen=True)
class BaseStationConfig:
    position_m: tuple[float, float, float]
    orientation_deg: tuple[float, float, float]
    panel: PanelConfig

    def pose(self) -> Pose:
        return Pose(self.position_m, euler_to_rotation(EulerAngles(*self.orientation_deg)))


@dataclass(frozen=True)
class SubarrayConfig:
    offset_m: tuple[float, float, float]
    orientation_deg: tuple[float, float, float]
    panel: PanelConfig


@dataclass(frozen=True)
class ScenarioConfig:
    """Declarative scenario, round-trippable through YAML."""

    bs: tuple[BaseStationConfig, ...]
    subarrays: tuple[SubarrayConfig, ...]
    signal: SignalConfig = field(default_factory=SignalConfig)
    seed: int = 1
    clock_bias_s: float = 0.0

    def realize(self) -> "Scenario":
        """Build the runtime geometry (element grids need the wavelength)."""
        lam = self.signal.wavelength_m
        bs_poses = [b.pose() for b in self.bs]
        bs_elements = [
            element_grid(b.panel.rows, b.panel.cols, b.panel.spacing_wl * lam)
            for b in self.bs
        ]
        subs = [
            Subarray(
                offset=s.offset_m,
                rotation=euler_to_rotation(EulerAngles(*s.orientation_deg)),
                elements=element_grid(s.panel.rows, s.panel.cols, s.panel.spacing_wl * lam),
            )
            for s in self.subarrays
        ]
        return Scenario(
            bs_poses=bs_poses,
            bs_elements=bs_elements,
            subarrays=subs,
            signal=self.signal,
            clock_bias_s=self.clock_bias_s,
            seed=self.seed,
        )


@dataclass(frozen=True)
class Scenario:
    """Realized scenario ready for bound evaluation."""

    bs_poses: list[Pose]
    bs_elements: list
    subarrays: list[Subarray]
    signal: SignalConfig
    clock_bias_s: float
    seed: int


def preset(name: str) -> ScenarioConfig:
    """One of the six canonical scenarios, e.g. 'cuboidal-2bs'."""
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}, expected one of {PRESET_NAMES}")
    layout, bs_part = name.split("-")
    num_bs = int(bs_part[0])
    bs_panel = PanelConfig(rows=8, cols=8)
    ue_panel = PanelConfig(rows=4, cols=4)
    stations = tuple(
        BaseStationConfig(position_m=pos, orientation_deg=ori, panel=bs_panel)
        for pos, ori in _BS_SITES[:num_bs]
    )
    if layout == "planar":
        subs = tuple(
            SubarrayConfig(offset_m=off, orientation_deg=(0.0, 0.0, 0.0), panel=ue_panel)
            for off in _PLANAR_OFFSETS
        )
    else:
        subs = tuple(
            SubarrayConfig(offset_m=off, orientation_deg=ori, panel=ue_panel)
            for off, ori in _CUBE_FACES
        )
    return ScenarioConfig(bs=stations, subarrays=subs)


def _require_keys(section: dict, allowed: set[str], where: str) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a mapping, got {type(section).__name__}")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)} in {where}")


def _triple(value, where: str) -> tuple[float, float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError(f"{where} must be a list of three numbers")
    try:
        return tuple(float(x) for x in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where} must contain numbers: {exc}") from exc


def _panel(section: dict, where: str) -> PanelConfig:
    _require_keys(section, {"rows", "cols", "spacing_wl"}, where)
    try:
        rows, cols = int(section["rows"]), int(section["cols"])
    except KeyError as exc:
        raise ConfigError(f"{where} is missing {exc}") from exc
    if rows < 1 or cols < 1:
        raise ConfigError(f"{where} needs positive rows and cols")
    return PanelConfig(rows=rows, cols=cols, spacing_wl=float(section.get("spacing_wl", 0.5)))


def parse_config(text_or_mapping) -> ScenarioConfig:
    """Parse a scenario from YAML text or an already-loaded mapping.

    Raises:
        ConfigError: on syntax errors, unknown keys, missing sections, or
            out-of-range values.
    """
    if isinstance(text_or_mapping, dict):
        doc = text_or_mapping
    else:
        try:
            doc = yaml.safe_load(text_or_mapping)
        except yaml.YAMLError as exc:
            raise ConfigError(f"scenario file is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("scenario file must contain a mapping at top level")
    _require_keys(doc, {"bs", "ue", "signal", "sim"}, "scenario")

    bs_section = doc.get("bs")
    if not isinstance(bs_section, list) or not bs_section:
        raise ConfigError("'bs' must be a non-empty list")
    stations = []
    for i, entry in enumerate(bs_section):
        where = f"bs[{i}]"
        _require_keys(entry, {"position_m", "orientation_deg", "panel"}, where)
        stations.append(
            BaseStationConfig(
                position_m=_triple(entry.get("position_m"), f"{where}.position_m"),
                orientation_deg=_triple(entry.get("orientation_deg"), f"{where}.orientation_deg"),
                panel=_panel(entry.get("panel", {}), f"{where}.panel"),
            )
        )

    ue_section = doc.get("ue", {})
    _require_keys(ue_section, {"subarrays"}, "ue")
    sub_section = ue_section.get("subarrays")
    if not isinstance(sub_section, list) or not sub_section:
        raise ConfigError("'ue.subarrays' must be a non-empty list")
    subs = []
    for i, entry in enumerate(sub_section):
        where = f"ue.subarrays[{i}]"
        _require_keys(entry, {"offset_m", "orientation_deg", "panel"}, where)
        subs.append(
            SubarrayConfig(
                offset_m=_triple(entry.get("offset_m"), f"{where}.offset_m"),
                orientation_deg=_triple(entry.get("orientation_deg"), f"{where}.orientation_deg"),
                panel=_panel(entry.get("panel", {}), f"{where}.panel"),
            )
        )

    signal_section = doc.get("signal", {})
    _require_keys(
        signal_section,
        {
            "power_dbm",
            "carrier_hz",
            "bandwidth_hz",
            "num_subcarriers",
            "num_transmissions",
            "noise_psd_dbm_hz",
            "noise_figure_db",
        },
        "signal",
    )
    defaults = SignalConfig()
    signal = SignalConfig(
        power_dbm=float(signal_section.get("power_dbm", defaults.power_dbm)),
        carrier_hz=float(signal_section.get("carrier_hz", defaults.carrier_hz)),
        bandwidth_hz=float(signal_section.get("bandwidth_hz", defaults.bandwidth_hz)),
        num_subcarriers=int(signal_section.get("num_subcarriers", defaults.num_subcarriers)),
        num_transmissions=int(
            signal_section.get("num_transmissions", defaults.num_transmissions)
        ),
        noise_psd_dbm_hz=float(
            signal_section.get("noise_psd_dbm_hz", defaults.noise_psd_dbm_hz)
        ),
        noise_figure_db=float(signal_section.get("noise_figure_db", defaults.noise_figure_db)),
    )
    if signal.carrier_hz <= 0 or signal.bandwidth_hz <= 0:
        raise ConfigError("carrier_hz and bandwidth_hz must be positive")
    if signal.num_subcarriers < 1 or signal.num_transmissions < 1:
        raise ConfigError("num_subcarriers and num_transmissions must be at least 1")

    sim_section = doc.get("sim", {})
    _require_keys(sim_section, {"seed", "clock_bias_s"}, "sim")
    return ScenarioConfig(
        bs=tuple(stations),
        subarrays=tuple(subs),
        signal=signal,
        seed=int(sim_section.get("seed", 1)),
        clock_bias_s=float(sim_section.get("clock_bias_s", 0.0)),
    )


def load_config(path) -> ScenarioConfig:
    """Parse a scenario YAML file from disk."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def config_to_mapping(config: ScenarioConfig) -> dict:
    """Plain-dict form of a scenario, inverse of parse_config."""
    return {
        "bs": [
            {
                "position_m": list(b.position_m),
                "orientation_deg": list(b.orientation_deg),
                "panel": {
                    "rows": b.panel.rows,
                    "cols": b.panel.cols,
                    "spacing_wl": b.panel.spacing_wl,
                },
            }
            for b in config.bs
        ],
        "ue": {
            "subarrays": [
                {
                    "offset_m": list(s.offset_m),
                    "orientation_deg": list(s.orientation_deg),
                    "panel": {
                        "rows": s.panel.rows,
                        "cols": s.panel.cols,
                        "spacing_wl": s.panel.spacing_wl,
                    },
                }
                for s in config.subarrays
            ]
        },
        "signal": {
            "power_dbm": config.signal.power_dbm,
            "carrier_hz": config.signal.carrier_hz,
            "bandwidth_hz": config.signal.bandwidth_hz,
            "num_subcarriers": config.signal.num_subcarriers,
            "num_transmissions": config.signal.num_transmissions,
            "noise_psd_dbm_hz": config.signal.noise_psd_dbm_hz,
            "noise_figure_db": config.signal.noise_figure_db,
        },
        "sim": {"seed": config.seed, "clock_bias_s": config.clock_bias_s},
    }


def serialize_config(config: ScenarioConfig) -> str:
    """YAML text for a scenario; parse_config(serialize_config(c)) == c."""
    return yaml.safe_dump(config_to_mapping(config), sort_keys=False)


def scenario_hash(config: ScenarioConfig) -> str:
    """Short stable digest identifying a scenario's full content."""
    canonical = json.dumps(config_to_mapping(config), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]
