"""Experiment configuration: schema, validation, and unit conversion.

Keys carry their units in the name (e.g. ``kappa_over_2pi_mhz``) because
the underlying model mixes angular and ordinary frequencies; conversion
to SI happens exactly once, here.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import yaml

from .device import (
    ChargeNoiseModel,
    DeviceParams,
    QubitParams,
    ResonatorParams,
    VoltageTuningMap,
)

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "default_config_dict"]


class ConfigError(ValueError):
    """Invalid or missing configuration; the message names the offending key."""


def _get(d: dict, key: str, path: str, required: bool = True, default=None):
    if key not in d:
        if required:
            raise ConfigError(f"missing required key '{path}{key}'")
        return default
    return d[key]


def _num(d: dict, key: str, path: str, required: bool = True, default=None) -> float:
    v = _get(d, key, path, required, default)
    if v is None:
        return v
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"key '{path}{key}' must be a number, got {v!r}")
    return float(v)


def _parse_tuning(d: dict, path: str) -> VoltageTuningMap:
    kind = _get(d, "kind", path)
    if kind == "quadratic":
        return VoltageTuningMap(
            kind="quadratic",
            f_ss=_num(d, "f_ss_ghz", path) * 1e9,
            v_ss=_num(d, "v_ss_mv", path, required=False, default=0.0) * 1e-3,
            curvature=_num(d, "curvature_mhz_per_mv2", path) * 1e6 / 1e-6,
        )
    if kind == "linear2d":
        return VoltageTuningMap(
            kind="linear2d",
            coeffs=(
                _num(d, "intercept_ghz", path) * 1e9,
                _num(d, "slope_r_mhz_per_mv", path) * 1e9,
                _num(d, "slope_rg_mhz_per_mv", path) * 1e9,
            ),
        )
    raise ConfigError(f"key '{path}kind' must be 'quadratic' or 'linear2d', got {kind!r}")


def _parse_qubit(d: dict, path: str) -> QubitParams:
    t_phi_us = _num(d, "t_phi_us", path, required=False, default=None)
    tuning = _get(d, "tuning", path)
    if not isinstance(tuning, dict):
        raise ConfigError(f"key '{path}tuning' must be a mapping")
    return QubitParams(
        g=2 * np.pi * _num(d, "g_over_2pi_mhz", path) * 1e6,
        gamma=2 * np.pi * _num(d, "gamma_over_2pi_mhz", path, required=False, default=0.0) * 1e6,
        gamma_nr=_num(d, "gamma_nr_per_s", path, required=False, default=0.0),
        t_phi=t_phi_us * 1e-6 if t_phi_us else np.inf,
        tuning=_parse_tuning(tuning, path + "tuning."),
    )


def _parse_noise(d: dict, path: str) -> ChargeNoiseModel:
    comps = _get(d, "ou_components", path, required=False, default=[])
    if not isinstance(comps, list):
        raise ConfigError(f"key '{path}ou_components' must be a list")
    parsed = []
    for i, c in enumerate(comps):
        cp = f"{path}ou_components[{i}]."
        parsed.append(
            (_num(c, "amplitude_mv", cp) * 1e-3, _num(c, "tau_us", cp) * 1e-6)
        )
    return ChargeNoiseModel(
        sigma_quasistatic=_num(d, "sigma_quasistatic_mv", path, required=False, default=0.0) * 1e-3,
        ou_components=tuple(parsed),
        seed=int(_num(d, "seed", path, required=False, default=0)),
    )


class ExperimentConfig:
    """Validated configuration: device, noise model, experiment options."""

    def __init__(self, raw: dict):
        if not isinstance(raw, dict):
            raise ConfigError("configuration root must be a mapping")
        self.raw = raw
        dev = _get(raw, "device", "")
        if not isinstance(dev, dict):
            raise ConfigError("key 'device' must be a mapping")
        res = _get(dev, "resonator", "device.")
        self.resonator = ResonatorParams(
            f_r=_num(res, "f_r_ghz", "device.resonator.") * 1e9,
            kappa=2 * np.pi * _num(res, "kappa_over_2pi_mhz", "device.resonator.") * 1e6,
        )
        qubits = _get(dev, "qubits", "device.")
        if not isinstance(qubits, list) or not 1 <= len(qubits) <= 2:
            raise ConfigError("key 'device.qubits' must be a list of 1 or 2 qubits")
        self.device = DeviceParams(
            resonator=self.resonator,
            qubits=tuple(
                _parse_qubit(q, f"device.qubits[{i}].") for i, q in enumerate(qubits)
            ),
        )
        noise = _get(raw, "noise", "", required=False, default={})
        self.noise = _parse_noise(noise, "noise.") if noise else None
        self.experiment = _get(raw, "experiment", "", required=False, default={}) or {}
        if not isinstance(self.experiment, dict):
            raise ConfigError("key 'experiment' must be a mapping")
        self.shots = int(_num(raw, "shots", "", required=False, default=0))
        self.seed = int(_num(raw, "seed", "", required=False, default=0))
        self.out_dir = str(_get(raw, "out_dir", "", required=False, default="."))

    def opt(self, key: str, default=None):
        """Experiment option with a default (schedule parameters)."""
        return self.experiment.get(key, default)

    def resolved(self) -> dict:
        """Round-trippable plain-dict view of the configuration."""
        return dict(self.raw)


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file is not valid YAML: {exc}") from exc
    return ExperimentConfig(raw)


def default_config_dict() -> dict:
    """Single-qubit sweet-spot device with the calibrated noise defaults."""
    return {
        "device": {
            "resonator": {"f_r_ghz": 6.4262, "kappa_over_2pi_mhz": 0.46},
            "qubits": [
                {
                    "g_over_2pi_mhz": 2.3,
                    "gamma_over_2pi_mhz": 0.02,
                    "gamma_nr_per_s": 8000.0,
                    "t_phi_us": 2000.0,
                    "tuning": {
                        "kind": "quadratic",
                        "f_ss_ghz": 6.3915,
                        "v_ss_mv": -270.0,
                        "curvature_mhz_per_mv2": 0.15,
                    },
                }
            ],
        },
        "noise": {
            "sigma_quasistatic_mv": 0.11,
            "ou_components": [
                {"amplitude_mv": 0.03, "tau_us": 1.0},
                {"amplitude_mv": 0.03, "tau_us": 3.0},
                {"amplitude_mv": 0.03, "tau_us": 10.0},
                {"amplitude_mv": 0.03, "tau_us": 30.0},
                {"amplitude_mv": 0.024, "tau_us": 300.0},
            ],
            "seed": 11,
        },
        "experiment": {},
        "shots": 1000,
        "seed": 42,
        "out_dir": ".",
    }
