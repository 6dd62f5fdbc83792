"""Run configuration: JSON-backed, validated, lossless round trip.

Defaults describe the reference device: 135 um fused-silica sphere,
shared Q = 1e8, 7 mW pump on DWDM channel 33 with a 20.4 MHz resonance
and a 25 GHz triangular sweep.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from scipy.constants import c as C_LIGHT

from .channels import ChannelTable
from .errors import ConfigError


@dataclass
class SphereConfig:
    radius_m: float = 135e-6
    material_file: str | None = None  # packaged fused silica when null


@dataclass
class ModeConfig:
    l: int | None = None  # null: nearest mode to the pump wavelength
    q: int = 1
    polarization: str = "TE"


@dataclass
class CouplingsConfig:
    q_pump: float = 1e8
    q_signal: float = 1e8
    q_idler: float = 1e8


@dataclass
class PumpConfig:
    wavelength_nm: float | None = None  # overrides dwdm_channel when set
    dwdm_channel: int | None = 33
    power_w: float = 7e-3
    resonance_fwhm_hz: float = 20.4e6
    sweep_span_hz: float = 25e9
    linewidth_hz: float = 200e3


@dataclass
class KerrConfig:
    n2_m2_per_w: float = 2.7e-20
    a_eff_m2: float = 20e-12


@dataclass
class GridConfig:
    omega_span_hz: float = 1.2e12
    omega_step_hz: float | None = None  # null: narrowest-FWHM/12
    pump_window_fwhm_multiples: float = 6.0


@dataclass
class RunConfig:
    sphere: SphereConfig = field(default_factory=SphereConfig)
    mode: ModeConfig = field(default_factory=ModeConfig)
    couplings: CouplingsConfig = field(default_factory=CouplingsConfig)
    pump: PumpConfig = field(default_factory=PumpConfig)
    kerr: KerrConfig = field(default_factory=KerrConfig)
    grids: GridConfig = field(default_factory=GridConfig)
    include_phasematching: bool = False
    normalization: str = "none"
    signal_dwdm_channel: int | None = 47
    out_dir: str = "."

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        def build(klass, data, name):
            if data is None:
                return klass()
            if not isinstance(data, dict):
                raise ConfigError(f"{name}: expected an object")
            fields = {f for f in klass.__dataclass_fields__}
            unknown = set(data) - fields
            if unknown:
                raise ConfigError(f"{name}: unknown key(s) {sorted(unknown)}")
            return klass(**data)

        known_top = set(cls.__dataclass_fields__)
        unknown = set(raw) - known_top
        if unknown:
            raise ConfigError(f"unknown top-level config key(s) {sorted(unknown)}")
        cfg = cls(
            sphere=build(SphereConfig, raw.get("sphere"), "sphere"),
            mode=build(ModeConfig, raw.get("mode"), "mode"),
            couplings=build(CouplingsConfig, raw.get("couplings"), "couplings"),
            pump=build(PumpConfig, raw.get("pump"), "pump"),
            kerr=build(KerrConfig, raw.get("kerr"), "kerr"),
            grids=build(GridConfig, raw.get("grids"), "grids"),
            include_phasematching=bool(raw.get("include_phasematching", False)),
            normalization=str(raw.get("normalization", "none")),
            signal_dwdm_channel=raw.get("signal_dwdm_channel", 47),
            out_dir=str(raw.get("out_dir", ".")),
        )
        cfg.validate()
        return cfg

    @classmethod
    def read(cls, path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(raw)

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    # -- derived quantities ---------------------------------------------------

    def pump_wavelength_nm(self, table: ChannelTable | None = None) -> float:
        if self.pump.wavelength_nm is not None:
            return float(self.pump.wavelength_nm)
        table = table or ChannelTable.default()
        center, _ = table.lookup("DWDM", self.pump.dwdm_channel)
        return center

    def pump_frequency_hz(self, table: ChannelTable | None = None) -> float:
        return C_LIGHT / (self.pump_wavelength_nm(table) * 1e-9)

    def resolution_floor_hz(self) -> float:
        f_p = self.pump_frequency_hz()
        return (f_p / self.couplings.q_signal + f_p / self.couplings.q_idler) / 4.0

    def effective_step_hz(self) -> float:
        if self.grids.omega_step_hz is not None:
            return float(self.grids.omega_step_hz)
        return self.resolution_floor_hz() / 12.0

    # -- validation ------------------------------------------------------------

    def validate(self):
        def positive(value, name):
            if value is None:
                return
            if not (isinstance(value, (int, float)) and value > 0):
                raise ConfigError(f"{name}: must be a positive number, got {value!r}")

        positive(self.sphere.radius_m, "sphere.radius_m")
        if self.mode.l is not None and (not isinstance(self.mode.l, int) or self.mode.l < 1):
            raise ConfigError(f"mode.l: must be a positive integer or null, got {self.mode.l!r}")
        if self.mode.q != 1:
            raise ConfigError("mode.q: only q = 1 is in modeled scope")
        if self.mode.polarization not in ("TE", "TM"):
            raise ConfigError(f"mode.polarization: must be TE or TM, got {self.mode.polarization!r}")
        positive(self.couplings.q_pump, "couplings.q_pump")
        positive(self.couplings.q_signal, "couplings.q_signal")
        positive(self.couplings.q_idler, "couplings.q_idler")
        if self.pump.wavelength_nm is None and self.pump.dwdm_channel is None:
            raise ConfigError("pump: set either wavelength_nm or dwdm_channel")
        positive(self.pump.wavelength_nm, "pump.wavelength_nm")
        positive(self.pump.power_w, "pump.power_w")
        positive(self.pump.resonance_fwhm_hz, "pump.resonance_fwhm_hz")
        positive(self.pump.sweep_span_hz, "pump.sweep_span_hz")
        positive(self.pump.linewidth_hz, "pump.linewidth_hz")
        positive(self.kerr.n2_m2_per_w, "kerr.n2_m2_per_w")
        positive(self.kerr.a_eff_m2, "kerr.a_eff_m2")
        positive(self.grids.omega_span_hz, "grids.omega_span_hz")
        positive(self.grids.omega_step_hz, "grids.omega_step_hz")
        positive(self.grids.pump_window_fwhm_multiples, "grids.pump_window_fwhm_multiples")
        if self.normalization not in ("none", "unit-max", "unit-area"):
            raise ConfigError(
                f"normalization: must be none, unit-max or unit-area, got {self.normalization!r}"
            )
        if self.grids.omega_step_hz is not None:
            floor = self.resolution_floor_hz()
            if self.grids.omega_step_hz > floor / 10.0:
                raise ConfigError(
                    f"grids.omega_step_hz: {self.grids.omega_step_hz:g} Hz exceeds a tenth "
                    f"of the narrowest expected comb FWHM ({floor:g} Hz)"
                )
        return self
