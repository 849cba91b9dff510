"""Run configuration: defaults, file/flag parsing, validation, hashing.

Config files are flat ``key = value`` text; values are parsed as JSON
literals where possible and kept as strings otherwise.  Command-line
overrides use the same ``key=value`` form and win over file values.  The
merged mapping is what lands in the run manifest, so a manifest alone
reproduces a run.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass

from .backbones import ACTIVATIONS, BACKBONE_KINDS, HC_WINDOW_COUNTS
from .errors import ConfigError
from .spectral import WINDOW_FNS, StftPlan, plan_stft

MASK_MODES = (
    "none",
    "x_real",
    "x_imag",
    "w_real",
    "w_imag",
    "w_imag+x_imag",
    "w_real+x_real",
)

SYNTH_KINDS = ("sinusoid_mix", "trend_plus_season", "piecewise_stationary")


@dataclass
class RunConfig:
    # data source: a CSV path, or "synth:<kind>"
    data: str = "synth:sinusoid_mix"
    synth_length: int = 2000
    synth_channels: int = 2
    synth_noise: float = 0.1

    # task geometry
    lookback: int = 96
    horizon: int = 96

    # model
    embed: int = 16
    windows: int = 4
    nfft: int = 24
    top_m: int = 4
    hidden: int = 256
    backbone: str = "hc"
    radius: int = 1
    window_fn: str = "rectangular"
    conjugate_neighbors: bool = True
    activation: str = "relu"
    mask_mode: str = "none"

    # training
    epochs: int = 10
    batch: int = 32
    lr: float = 1e-3
    lr_decay: float = 0.9
    seed: int = 0
    stride: int = 1

    def plan(self) -> StftPlan:
        return plan_stft(self.lookback, self.windows, self.nfft, self.window_fn)

    def problems(self) -> list[str]:
        """Collect every validation failure; empty list means valid."""
        out = []
        try:
            plan = self.plan()
        except ConfigError as e:
            plan = None
            out.append(str(e))
        if self.backbone not in BACKBONE_KINDS:
            out.append(f"unknown backbone {self.backbone!r}; choose from {BACKBONE_KINDS}")
        elif self.backbone == "hc" and self.windows not in HC_WINDOW_COUNTS:
            out.append(
                f"the hyper-complex backbone needs a window count in "
                f"{HC_WINDOW_COUNTS}, got {self.windows}; use backbone 'wm' or 'basic'"
            )
        if self.backbone == "wm" and self.windows > 1 and self.radius >= self.windows:
            out.append(
                f"neighbor radius {self.radius} must be smaller than the window "
                f"count {self.windows}"
            )
        if self.radius < 1:
            out.append(f"neighbor radius must be >= 1, got {self.radius}")
        if plan is not None and not 1 <= self.top_m <= plan.bins:
            out.append(
                f"top_m must be in [1, {plan.bins}] for nfft={self.nfft}, got {self.top_m}"
            )
        if self.window_fn not in WINDOW_FNS:
            out.append(f"unknown window_fn {self.window_fn!r}; choose from {WINDOW_FNS}")
        if self.mask_mode not in MASK_MODES:
            out.append(f"unknown mask_mode {self.mask_mode!r}; choose from {MASK_MODES}")
        if self.activation not in ACTIVATIONS:
            out.append(f"unknown activation {self.activation!r}; choose from {ACTIVATIONS}")
        if self.data.startswith("synth:"):
            kind = self.data.split(":", 1)[1]
            if kind not in SYNTH_KINDS:
                out.append(f"unknown synthetic corpus {kind!r}; choose from {SYNTH_KINDS}")
            if self.synth_length < 256:
                out.append(f"synth_length must be >= 256, got {self.synth_length}")
            if self.synth_channels < 1:
                out.append(f"synth_channels must be >= 1, got {self.synth_channels}")
        for name in ("lookback", "horizon", "embed", "hidden", "epochs", "batch", "stride"):
            if getattr(self, name) < 1:
                out.append(f"{name} must be >= 1, got {getattr(self, name)}")
        if not self.lr > 0:
            out.append(f"lr must be positive, got {self.lr}")
        if not 0 < self.lr_decay <= 1:
            out.append(f"lr_decay must be in (0, 1], got {self.lr_decay}")
        return out

    def validate(self) -> "RunConfig":
        problems = self.problems()
        if problems:
            raise ConfigError(
                "invalid configuration:\n" + "\n".join(f"  - {p}" for p in problems)
            )
        return self

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = set(cls.field_names())
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        merged = {f.name: d.get(f.name, getattr(cls(), f.name)) for f in dataclasses.fields(cls)}
        coerced = {}
        for f in dataclasses.fields(cls):
            v = merged[f.name]
            try:
                if f.type in ("int", int):
                    coerced[f.name] = int(v)
                elif f.type in ("float", float):
                    coerced[f.name] = float(v)
                elif f.type in ("bool", bool):
                    coerced[f.name] = _as_bool(v)
                else:
                    coerced[f.name] = str(v)
            except (TypeError, ValueError):
                raise ConfigError(f"bad value for {f.name}: {v!r}")
        return cls(**coerced)


def _as_bool(v) -> bool:
    if isinstance(v, bool):
        return v
    if isinstance(v, (int, float)):
        return bool(v)
    if isinstance(v, str):
        if v.lower() in ("true", "1", "yes", "on"):
            return True
        if v.lower() in ("false", "0", "no", "off"):
            return False
    raise ValueError(v)


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_config_file(path: str) -> dict:
    """Read flat ``key = value`` lines; '#' starts a comment."""
    out: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = _parse_value(value.strip())
    return out


def apply_overrides(base: dict, overrides: list[str]) -> dict:
    out = dict(base)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = _parse_value(value.strip())
    return out


def config_hash(cfg: RunConfig) -> str:
    blob = json.dumps(cfg.as_dict(), sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:10]
