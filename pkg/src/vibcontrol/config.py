"""Run configuration: INI-style sections with strict key checking.

A config file may set any subset of the keys below; everything has a
default, so the empty file is a valid configuration (bundled curves, the
standard grid, the published pulse parameters).  Unknown sections or keys
are rejected with their line number, because a typo that silently falls
back to a default is the most expensive failure mode a scan has.

All user-facing values are in experiment units: times in fs, intensities in
W/cm^2, wavelengths in nm.  The only atomic-unit key is the time step dt.
"""

import configparser
import hashlib
import io
import json
import time
from dataclasses import asdict, dataclass, field

from .errors import ConfigError

_SCHEMA = {
    "molecule": {"curves": "bundled", "reduced_mass": 1835.24, "label": "D2+"},
    "grid": {"r_min": 0.1, "r_max": 40.0, "n_points": 2048},
    "propagation": {"dt": 0.5, "absorber_fraction": 0.1,
                    "absorber_strength": 1.0, "record_stride": 20},
    "eigen": {"n_states": 14, "r_cut": 20.0, "closure_energy": 0.0},
    "pump": {"mode": "franck_condon", "r_e": 1.40, "well_depth": 0.1745,
             "omega_cm": 3115.5},
    "control": {"intensity": 5e13, "wavelength": 790.0, "fwhm": 5.0,
                "tau": 293.0, "phase": 0.0},
    "probe": {"intensity": 4e14, "wavelength": 790.0, "fwhm": 5.0, "phase": 0.0},
    "scan_control": {"tau_start": 0.0, "tau_stop": 650.0, "tau_step": 1.0},
    "scan_probe": {"tau_start": 310.0, "tau_stop": 4000.0, "tau_step": 1.0},
    "output": {"directory": "out", "format": "csv", "figures": True, "workers": 0},
}

_POSITIVE = {
    ("molecule", "reduced_mass"), ("grid", "r_min"), ("grid", "r_max"),
    ("grid", "n_points"), ("propagation", "dt"), ("propagation", "record_stride"),
    ("eigen", "n_states"), ("pump", "r_e"), ("pump", "well_depth"),
    ("pump", "omega_cm"), ("control", "wavelength"), ("control", "fwhm"),
    ("probe", "wavelength"), ("probe", "fwhm"),
    ("scan_control", "tau_step"), ("scan_probe", "tau_step"),
}
_NON_NEGATIVE = {
    ("control", "intensity"), ("probe", "intensity"),
    ("propagation", "absorber_fraction"), ("propagation", "absorber_strength"),
    ("output", "workers"),
}


@dataclass
class PulseSection:
    intensity: float
    wavelength: float
    fwhm: float
    phase: float
    tau: float = 0.0


@dataclass
class ScanSection:
    tau_start: float
    tau_stop: float
    tau_step: float

    def values(self):
        import numpy as np
        n = int(round((self.tau_stop - self.tau_start) / self.tau_step))
        return self.tau_start + self.tau_step * np.arange(n + 1)


@dataclass
class RunConfig:
    """Validated effective configuration (defaults merged with user keys)."""

    sections: dict = field(default_factory=dict)

    def __getitem__(self, section):
        return self.sections[section]

    def control_pulse(self) -> PulseSection:
        c = self.sections["control"]
        return PulseSection(c["intensity"], c["wavelength"], c["fwhm"],
                            c["phase"], c["tau"])

    def probe_pulse(self) -> PulseSection:
        p = self.sections["probe"]
        return PulseSection(p["intensity"], p["wavelength"], p["fwhm"], p["phase"])

    def scan(self, which: str) -> ScanSection:
        s = self.sections[which]
        return ScanSection(s["tau_start"], s["tau_stop"], s["tau_step"])

    def as_flat_dict(self) -> dict:
        return {f"{sec}.{key}": val for sec, body in sorted(self.sections.items())
                for key, val in sorted(body.items())}


def _line_of(text: str, target: str) -> str:
    for i, line in enumerate(text.splitlines(), start=1):
        if target in line.split(";")[0].split("#")[0]:
            return f"line {i}"
    return "line ?"


def _coerce(section, key, raw, text):
    default = _SCHEMA[section][key]
    where = _line_of(text, key)
    if isinstance(default, bool):
        low = str(raw).strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"[{section}] {key} ({where}): expected a boolean, got {raw!r}")
    if isinstance(default, (int, float)) and not isinstance(default, bool):
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(
                f"[{section}] {key} ({where}): expected a number, got {raw!r}") from None
        if isinstance(default, int):
            if value != int(value):
                raise ConfigError(f"[{section}] {key} ({where}): expected an integer")
            value = int(value)
        if (section, key) in _POSITIVE and value <= 0:
            raise ConfigError(f"[{section}] {key} ({where}): must be positive, got {value}")
        if (section, key) in _NON_NEGATIVE and value < 0:
            raise ConfigError(f"[{section}] {key} ({where}): must be non-negative, got {value}")
        return value
    return str(raw).strip()


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration; unknown keys are errors."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    sections = {name: dict(body) for name, body in _SCHEMA.items()}
    for sec_name in parser.sections():
        if sec_name not in _SCHEMA:
            raise ConfigError(
                f"unknown section [{sec_name}] ({_line_of(text, '[' + sec_name + ']')})")
        for key, raw in parser[sec_name].items():
            if key not in _SCHEMA[sec_name]:
                raise ConfigError(
                    f"[{sec_name}] unknown key {key!r} ({_line_of(text, key)})")
            sections[sec_name][key] = _coerce(sec_name, key, raw, text)

    cfg = RunConfig(sections)
    _validate_cross(cfg)
    return cfg


def _validate_cross(cfg: RunConfig):
    g = cfg.sections["grid"]
    n = g["n_points"]
    if n < 256 or (n & (n - 1)) != 0:
        raise ConfigError(f"[grid] n_points must be a power of two >= 256, got {n}")
    if g["r_max"] <= g["r_min"]:
        raise ConfigError("[grid] r_max must exceed r_min")
    p = cfg.sections["propagation"]
    if not (0.0 <= p["absorber_fraction"] < 0.5):
        raise ConfigError("[propagation] absorber_fraction must be in [0, 0.5)")
    for which in ("scan_control", "scan_probe"):
        s = cfg.sections[which]
        if s["tau_stop"] < s["tau_start"]:
            raise ConfigError(f"[{which}] tau_stop must not precede tau_start")
    if cfg.sections["pump"]["mode"] not in ("franck_condon", "weighted"):
        raise ConfigError("[pump] mode must be franck_condon or weighted")
    if cfg.sections["output"]["format"] != "csv":
        raise ConfigError("[output] format: only csv is supported")


def load_config(path) -> RunConfig:
    with open(path, "r") as fh:
        return parse_config(fh.read())


def default_config() -> RunConfig:
    return parse_config("")


def file_checksum(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def stream_checksum(stream: io.IOBase) -> str:
    data = stream.read()
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha256(data).hexdigest()


@dataclass
class RunManifest:
    """Record of one run, sufficient to reproduce it exactly."""

    command: str
    config: dict
    version: str
    curve_checksum: str
    started_utc: str = ""
    elapsed_s: float = 0.0
    rows: list = field(default_factory=list)
    outputs: list = field(default_factory=list)

    def __post_init__(self):
        if not self.started_utc:
            self.started_utc = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        self._t0 = time.perf_counter()

    def mark_row(self, index, status, detail=""):
        self.rows.append({"index": int(index), "status": status,
                          **({"detail": detail} if detail else {})})

    def finish(self):
        self.elapsed_s = round(time.perf_counter() - self._t0, 3)

    def write(self, path):
        self.finish()
        body = {k: v for k, v in asdict(self).items()}
        with open(path, "w") as fh:
            json.dump(body, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path
