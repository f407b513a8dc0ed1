"""Scenario loading, unit handling, and validation.

A scenario file is YAML.  Dimensioned entries accept either a bare
number (interpreted as SI) or a string with a unit suffix such as
"12 mA", "85 cm2", "60 deg".  Everything is resolved to SI floats
before any physics runs, and the resolved form is what gets hashed.
"""

import hashlib
import json
import re
from dataclasses import dataclass
from importlib import resources

import numpy as np
import yaml

from .energy import BiasLimits, DriveParams, LinearEhParams, NonlinearEhParams, VlcEhParams
from .errors import ScenarioError
from .geometry import (
    Device,
    OpticalTransmitter,
    Photodetector,
    RfAccessPoint,
    build_angle_diversity_layout,
)

__all__ = ["parse_quantity", "Scenario", "load_scenario", "default_scenario", "scenario_hash"]

_UNIT_SCALE = {
    "": 1.0,
    "A": 1.0, "mA": 1e-3, "uA": 1e-6,
    "W": 1.0, "mW": 1e-3, "uW": 1e-6,
    "V": 1.0, "mV": 1e-3,
    "rad": 1.0, "deg": np.pi / 180.0,
    "m": 1.0, "cm": 1e-2, "mm": 1e-3,
    "m2": 1.0, "cm2": 1e-4, "mm2": 1e-6,
}

_QTY_RE = re.compile(r"^\s*([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)\s*([A-Za-z2]*)\s*$")


def parse_quantity(value):
    """Resolve a number or 'value unit' string to an SI float."""
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ScenarioError(f"cannot parse quantity from {value!r}")
    m = _QTY_RE.match(value)
    if not m:
        raise ScenarioError(f"malformed quantity {value!r}")
    num, unit = m.groups()
    if unit not in _UNIT_SCALE:
        raise ScenarioError(f"unknown unit {unit!r} in {value!r}")
    return float(num) * _UNIT_SCALE[unit]


def _qty_list(values):
    return [parse_quantity(v) for v in values]


def _require(cfg, key, where):
    if key not in cfg:
        raise ScenarioError(f"missing key {key!r} in {where}")
    return cfg[key]


@dataclass(frozen=True)
class Scenario:
    """Fully resolved deployment ready for the solvers."""

    seed: int
    room_size: np.ndarray
    transmitters: tuple
    devices: tuple
    drive: DriveParams
    bias: BiasLimits
    vlc_eh: VlcEhParams
    rf_ap: RfAccessPoint
    rician_factor_db: float
    path_loss_exponent: float
    rf_exposure_cap: float
    rf_nonlinear: NonlinearEhParams
    rf_linear: LinearEhParams
    noise_power: float
    efficacy: float
    canonical: dict

    @property
    def n_transmitters(self):
        return len(self.transmitters)

    @property
    def n_devices(self):
        return len(self.devices)

    @property
    def hash(self):
        return scenario_hash(self.canonical)


def scenario_hash(canonical):
    """Short stable digest of the resolved SI scenario."""
    blob = json.dumps(canonical, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _element_dicts(elements):
    return [
        {"boresight": [float(b) for b in el.boresight], "semiangle": el.semiangle}
        for el in elements
    ]


def _resolve(cfg):
    if not isinstance(cfg, dict):
        raise ScenarioError("scenario root must be a mapping")
    seed = int(cfg.get("seed", 0))
    room = np.asarray(_qty_list(_require(cfg, "room", "scenario")["size"]), dtype=float)
    if room.shape != (3,) or np.any(room <= 0):
        raise ScenarioError("room size must be three positive lengths")

    opt = _require(cfg, "optical", "scenario")
    positions = [np.asarray(_qty_list(p), dtype=float) for p in _require(opt, "transmitters", "optical")]
    n_el = int(_require(opt, "elements_per_transmitter", "optical"))
    semiangle = parse_quantity(_require(opt, "semiangle", "optical"))
    tilt = parse_quantity(_require(opt, "ring_tilt", "optical"))
    offsets = _qty_list(_require(opt, "ring_azimuth_offsets", "optical"))
    if len(offsets) != len(positions):
        raise ScenarioError("need one ring azimuth offset per transmitter")
    leds = int(_require(opt, "leds_per_color", "optical"))
    v_led = parse_quantity(_require(opt, "led_voltage", "optical"))
    bias = BiasLimits(parse_quantity(_require(opt, "bias_low", "optical")),
                      parse_quantity(_require(opt, "bias_high", "optical")))
    efficacy = float(_require(opt, "efficacy", "optical"))

    det_cfg = _require(cfg, "detector", "scenario")
    responsivity = parse_quantity(_require(det_cfg, "responsivity", "detector"))
    detector = Photodetector(
        area=parse_quantity(_require(det_cfg, "area", "detector")),
        responsivity=responsivity,
        fov=parse_quantity(_require(det_cfg, "fov", "detector")),
        refractive_index=float(_require(det_cfg, "refractive_index", "detector")),
    )
    drive = DriveParams(responsivity=responsivity, leds_per_color=leds, led_voltage=v_led)

    transmitters = []
    for pos, off in zip(positions, offsets):
        if np.any(pos < 0) or np.any(pos > room):
            raise ScenarioError(f"transmitter at {pos} outside the room")
        elements = build_angle_diversity_layout(n_el, tilt, off, semiangle)
        transmitters.append(OpticalTransmitter(position=pos, elements=elements,
                                               leds_per_color=leds, led_voltage=v_led))

    devices = []
    for k, dev_cfg in enumerate(_require(cfg, "devices", "scenario")):
        if "position" in dev_cfg:
            pos = np.asarray(_qty_list(dev_cfg["position"]), dtype=float)
        else:
            # shorthand: distance and compass bearing from a transmitter
            ti = int(_require(dev_cfg, "transmitter", f"device {k}"))
            if not (0 <= ti < len(transmitters)):
                raise ScenarioError(f"device {k} references transmitter {ti}")
            dist = parse_quantity(_require(dev_cfg, "distance", f"device {k}"))
            bearing = parse_quantity(_require(dev_cfg, "bearing", f"device {k}"))
            height = parse_quantity(dev_cfg.get("height", 1.0))
            drop = transmitters[ti].position[2] - height
            if dist < drop:
                raise ScenarioError(f"device {k} distance {dist} shorter than the vertical drop")
            r = np.sqrt(dist * dist - drop * drop)
            pos = transmitters[ti].position + np.array(
                [r * np.cos(bearing), r * np.sin(bearing), -drop])
        if np.any(pos < 0) or np.any(pos > room):
            raise ScenarioError(f"device {k} at {pos} outside the room")
        devices.append(Device(position=pos, detector=detector))
    if not devices:
        raise ScenarioError("scenario has no devices")

    eh_cfg = _require(cfg, "vlc_harvest", "scenario")
    vlc_eh = VlcEhParams(
        fill_factor=float(_require(eh_cfg, "fill_factor", "vlc_harvest")),
        thermal_voltage=parse_quantity(_require(eh_cfg, "thermal_voltage", "vlc_harvest")),
        dark_current=parse_quantity(_require(eh_cfg, "dark_current", "vlc_harvest")),
    )

    rf_cfg = _require(cfg, "rf", "scenario")
    rf_ap = RfAccessPoint(
        position=np.asarray(_qty_list(_require(rf_cfg, "access_point", "rf")), dtype=float),
        antennas=int(_require(rf_cfg, "antennas", "rf")),
    )
    rician = float(_require(rf_cfg, "rician_factor_db", "rf"))
    ple = float(_require(rf_cfg, "path_loss_exponent", "rf"))
    cap = parse_quantity(_require(rf_cfg, "exposure_cap", "rf"))
    if cap <= 0:
        raise ScenarioError("rf exposure cap must be positive")

    rfh_cfg = _require(cfg, "rf_harvest", "scenario")
    rf_nonlinear = NonlinearEhParams(
        max_harvest=parse_quantity(_require(rfh_cfg, "max_harvest", "rf_harvest")),
        steepness=float(_require(rfh_cfg, "steepness", "rf_harvest")),
        turn_on=parse_quantity(_require(rfh_cfg, "turn_on", "rf_harvest")),
    )
    rf_linear = LinearEhParams(efficiency=float(_require(rfh_cfg, "linear_efficiency", "rf_harvest")))

    noise = parse_quantity(_require(cfg, "noise_power", "scenario"))
    if noise <= 0:
        raise ScenarioError("noise power must be positive")

    canonical = {
        "seed": seed,
        "room": [float(x) for x in room],
        "transmitters": [
            {"position": [float(x) for x in t.position], "elements": _element_dicts(t.elements)}
            for t in transmitters
        ],
        "devices": [[float(x) for x in d.position] for d in devices],
        "detector": {"area": detector.area, "responsivity": detector.responsivity,
                     "fov": detector.fov, "refractive_index": detector.refractive_index},
        "drive": {"leds_per_color": leds, "led_voltage": v_led},
        "bias": [bias.low, bias.high],
        "vlc_harvest": {"fill_factor": vlc_eh.fill_factor,
                        "thermal_voltage": vlc_eh.thermal_voltage,
                        "dark_current": vlc_eh.dark_current},
        "rf": {"access_point": [float(x) for x in rf_ap.position], "antennas": rf_ap.antennas,
               "rician_factor_db": rician, "path_loss_exponent": ple, "exposure_cap": cap},
        "rf_harvest": {"max_harvest": rf_nonlinear.max_harvest,
                       "steepness": rf_nonlinear.steepness,
                       "turn_on": rf_nonlinear.turn_on,
                       "linear_efficiency": rf_linear.efficiency},
        "noise_power": noise,
        "efficacy": efficacy,
    }

    return Scenario(
        seed=seed, room_size=room, transmitters=tuple(transmitters), devices=tuple(devices),
        drive=drive, bias=bias, vlc_eh=vlc_eh, rf_ap=rf_ap, rician_factor_db=rician,
        path_loss_exponent=ple, rf_exposure_cap=cap, rf_nonlinear=rf_nonlinear,
        rf_linear=rf_linear, noise_power=noise, efficacy=efficacy, canonical=canonical,
    )


def load_scenario(path, seed=None):
    """Read and resolve a YAML scenario file; ``seed`` overrides the file's."""
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ScenarioError(f"invalid YAML: {exc}") from exc
    if seed is not None:
        if not isinstance(cfg, dict):
            raise ScenarioError("scenario root must be a mapping")
        cfg = dict(cfg, seed=int(seed))
    return _resolve(cfg)


def default_scenario(seed=None):
    """The bundled four-cell reference deployment."""
    text = resources.files("attocell").joinpath("data/default_scenario.yaml").read_text()
    cfg = yaml.safe_load(text)
    if seed is not None:
        cfg = dict(cfg, seed=int(seed))
    return _resolve(cfg)
