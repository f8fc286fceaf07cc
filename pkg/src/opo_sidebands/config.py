"""Run configuration.

Configs are JSON documents whose keys carry their units. A missing key takes
its value from the bundled reference configuration, which holds the
experimental parameters of the triply resonant KTP OPO. Example::

    {
      "sigma": 1.5,
      "omega_analysis_hz": 21e6,
      "coupler_reflectivity": [0.70, 0.96, 0.96],
      "phonons_enabled": false
    }
"""

import dataclasses
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .phonon import CONVENTIONS, N_MECHANICAL, PhononParams
from .sideband import N_OPTICAL
from .steady_state import CavityLosses, OperatingPoint

OUTPUT_FORMATS = ("csv", "json", "table")


class ConfigError(ValueError):
    """Invalid configuration value; ``field`` names the offending key."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class OpoConfig:
    coupler_reflectivity: tuple = (0.70, 0.96, 0.96)
    end_mirror_reflectivity: tuple = (0.995, 0.995, 0.995)
    fsr_hz: tuple = (4.3e9, 4.3e9, 4.3e9)
    detuning_rad_per_s: tuple = (0.0, 0.0, 0.0)
    omega_analysis_hz: float = 21e6
    sigma: float = 1.5
    phonon_couplings: tuple = ((8.0e-3, 0.0, 0.0), (1.9e-3, 2.7e-3, 0.0), (3.6e-3, 0.0, 0.0))
    n_thermal: float = 100.0
    phonon_coupling_convention: str = "effective"
    detection_efficiency: tuple = (0.65, 0.87, 0.87)
    phonons_enabled: bool = True
    detection_enabled: bool = False
    output_format: str = "csv"
    threshold_power_mw: float = 60.0
    mirror_transmission_scale: float = 1.0

    def __post_init__(self):
        for name in ("coupler_reflectivity", "end_mirror_reflectivity", "fsr_hz",
                     "detuning_rad_per_s", "detection_efficiency"):
            object.__setattr__(self, name, _float_triple(getattr(self, name), name))
        object.__setattr__(self, "phonon_couplings", _coupling_table(self.phonon_couplings))
        for name in ("omega_analysis_hz", "sigma", "n_thermal", "threshold_power_mw",
                     "mirror_transmission_scale"):
            object.__setattr__(self, name, _finite_float(getattr(self, name), name))
        for name in ("phonons_enabled", "detection_enabled"):
            if not isinstance(getattr(self, name), bool):
                raise ConfigError(name, "must be true or false")
        self._validate()

    def _validate(self):
        for name in ("coupler_reflectivity", "end_mirror_reflectivity"):
            if any(not 0 < r <= 1 for r in getattr(self, name)):
                raise ConfigError(name, "intensity reflectivities must lie in (0, 1]")
        if self.coupler_reflectivity[0] == 1:
            raise ConfigError("coupler_reflectivity", "pump coupler must transmit")
        for j in (1, 2):
            if self.coupler_reflectivity[j] == 1 and self.end_mirror_reflectivity[j] == 1:
                raise ConfigError("coupler_reflectivity", f"mode {j} has no loss (infinite finesse)")
        if any(f <= 0 for f in self.fsr_hz):
            raise ConfigError("fsr_hz", "must be positive")
        if abs(self.omega_analysis_hz) >= min(self.fsr_hz):
            raise ConfigError("omega_analysis_hz", "must be below the free spectral range")
        if self.sigma < 0:
            raise ConfigError("sigma", "must be >= 0")
        if self.n_thermal < 0:
            raise ConfigError("n_thermal", "must be >= 0")
        if any(not 0 < e <= 1 for e in self.detection_efficiency):
            raise ConfigError("detection_efficiency", "must lie in (0, 1]")
        if self.phonon_coupling_convention not in CONVENTIONS:
            raise ConfigError("phonon_coupling_convention", f"must be one of {', '.join(CONVENTIONS)}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError("output_format", f"must be one of {', '.join(OUTPUT_FORMATS)}")
        if self.mirror_transmission_scale <= 0:
            raise ConfigError("mirror_transmission_scale", "must be positive")

    def replace(self, **changes) -> "OpoConfig":
        return dataclasses.replace(self, **changes)

    def losses(self) -> CavityLosses:
        return CavityLosses.from_reflectivities(self.coupler_reflectivity, self.end_mirror_reflectivity)

    def operating_point(self) -> OperatingPoint:
        return OperatingPoint(self.sigma, self.omega_analysis_hz, self.detuning_rad_per_s, self.fsr_hz)

    def phonon_params(self) -> PhononParams:
        return PhononParams(np.array(self.phonon_couplings), self.n_thermal, self.phonon_coupling_convention)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        return {k: _listify(v) for k, v in d.items()}


def _listify(v):
    if isinstance(v, tuple):
        return [_listify(x) for x in v]
    return v


def _finite_float(value, name):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(name, f"expected a number, got {value!r}") from None
    if not np.isfinite(x):
        raise ConfigError(name, "must be finite")
    return x


def _float_triple(values, name):
    if isinstance(values, (int, float)):
        values = [values] * N_OPTICAL
    try:
        seq = list(values)
    except TypeError:
        raise ConfigError(name, f"expected {N_OPTICAL} numbers") from None
    if len(seq) != N_OPTICAL:
        raise ConfigError(name, f"expected {N_OPTICAL} numbers, got {len(seq)}")
    return tuple(_finite_float(v, name) for v in seq)


def _coupling_table(values):
    name = "phonon_couplings"
    try:
        rows = [list(r) for r in values]
    except TypeError:
        raise ConfigError(name, f"expected a {N_OPTICAL}x{N_MECHANICAL} table") from None
    if len(rows) != N_OPTICAL or any(len(r) != N_MECHANICAL for r in rows):
        raise ConfigError(name, f"expected a {N_OPTICAL}x{N_MECHANICAL} table")
    return tuple(tuple(_finite_float(v, name) for v in r) for r in rows)


_FIELDS = {f.name for f in dataclasses.fields(OpoConfig)}
# keys that document the run but do not enter the model
_METADATA_KEYS = {"description", "comment"}


def config_from_dict(data: dict, base: OpoConfig = None) -> OpoConfig:
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    unknown = set(data) - _FIELDS - _METADATA_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    values = {k: v for k, v in data.items() if k in _FIELDS}
    return dataclasses.replace(base or OpoConfig(), **values)


def load_config(path) -> OpoConfig:
    """Read a JSON config; keys not given fall back to the reference values."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"malformed JSON at line {exc.lineno}: {exc.msg}") from None
    return config_from_dict(data, reference_config())


def reference_config() -> OpoConfig:
    text = resources.files("opo_sidebands").joinpath("data/reference.json").read_text(encoding="utf-8")
    return config_from_dict(json.loads(text))
