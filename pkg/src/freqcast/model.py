"""Full forecasting model: embed, analyse, compress, mix, synthesise, read out.

forward() maps a real (B, L, D) batch to (B, T, D):

    x -> embedding lift -> windowed spectra -> top-M compression
      -> backbone mixing -> position-aware padding -> overlap-add synthesis
      -> skip connection with the embedded input
      -> per-channel flatten (L*E) -> hidden -> horizon read-out head

Masking modes zero the real or imaginary plane of the spectra and/or of all
backbone weight matrices, in training and inference alike; biases are left
alone.  The checkpoint format is documented in the README: a magic string,
a JSON header with the config and per-tensor manifest, then raw
little-endian float64 buffers.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import __version__
from .autograd import Tensor, matmul, mul, relu, reshape, transpose
from .backbones import (
    backbone_forward,
    backbone_named_tensors,
    init_backbone,
)
from .compress import position_aware_pad, top_m_select
from .config import MASK_MODES, RunConfig
from .errors import ConfigError, ContractError
from .spectral import SpectralWindows, istft, rstft

CHECKPOINT_MAGIC = b"FQCKPT01"


@dataclass
class ForecastParams:
    embed_scale: Tensor
    embed_bias: Tensor
    backbone_kind: str
    backbone: Any
    head_w1: Tensor
    head_b1: Tensor
    head_w2: Tensor
    head_b2: Tensor

    def named_tensors(self) -> list[tuple[str, Tensor]]:
        named = [
            ("embed.scale", self.embed_scale),
            ("embed.bias", self.embed_bias),
        ]
        named += backbone_named_tensors(self.backbone_kind, self.backbone)
        named += [
            ("head.w1", self.head_w1),
            ("head.b1", self.head_b1),
            ("head.w2", self.head_w2),
            ("head.b2", self.head_b2),
        ]
        return named


def init_params(cfg: RunConfig, rng: np.random.Generator | None = None) -> ForecastParams:
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    e, h = cfg.embed, cfg.hidden
    flat = cfg.lookback * e
    params = ForecastParams(
        embed_scale=Tensor(rng.uniform(-1.0, 1.0, size=e)),
        embed_bias=Tensor(np.zeros(e)),
        backbone_kind=cfg.backbone,
        backbone=init_backbone(cfg.backbone, rng, cfg.windows, e, cfg.radius),
        head_w1=Tensor(rng.uniform(-1.0, 1.0, size=(flat, h)) / np.sqrt(flat)),
        head_b1=Tensor(np.zeros(h)),
        head_w2=Tensor(rng.uniform(-1.0, 1.0, size=(h, cfg.horizon)) / np.sqrt(h)),
        head_b2=Tensor(np.zeros(cfg.horizon)),
    )
    apply_weight_mask_to_data(params, cfg.mask_mode)
    return params


def spectral_mask_plane(mode: str) -> str | None:
    """Which plane of the input spectra a mask mode hides, if any."""
    if mode in ("x_real", "w_real+x_real"):
        return "real"
    if mode in ("x_imag", "w_imag+x_imag"):
        return "imag"
    return None


def weight_mask_plane(mode: str) -> str | None:
    """Which plane of the backbone weights a mask mode zeroes, if any."""
    if mode in ("w_real", "w_real+x_real"):
        return "real"
    if mode in ("w_imag", "w_imag+x_imag"):
        return "imag"
    return None


def _check_mask_mode(mode: str) -> None:
    if mode not in MASK_MODES:
        raise ConfigError(f"unknown mask_mode {mode!r}; choose from {MASK_MODES}")


def apply_weight_mask_to_data(params: ForecastParams, mode: str) -> None:
    """Zero the masked weight plane in place so it starts (and stays) zero."""
    _check_mask_mode(mode)
    plane = weight_mask_plane(mode)
    if plane is None:
        return
    from .backbones import backbone_weight_ctensors

    for w in backbone_weight_ctensors(params.backbone_kind, params.backbone):
        (w.re if plane == "real" else w.im).data[...] = 0.0


def _mask_spectra(s: SpectralWindows, plane: str | None) -> SpectralWindows:
    if plane is None:
        return s
    from .autograd import CTensor

    masked = []
    for c in s.windows:
        if plane == "real":
            masked.append(CTensor(c.re * 0.0, c.im))
        else:
            masked.append(CTensor(c.re, c.im * 0.0))
    return SpectralWindows(masked, s.plan)


def embed(x, params: ForecastParams) -> Tensor:
    """Scalar-to-vector lift: out[b,t,d,e] = x[b,t,d] * scale[e] + bias[e]."""
    x = x if isinstance(x, Tensor) else Tensor(x)
    if x.ndim != 3:
        raise ContractError(f"embed expects (B, L, D), got shape {x.shape}")
    b, l, d = x.shape
    lifted = mul(reshape(x, (b, l, d, 1)), params.embed_scale)
    return lifted + params.embed_bias


def forward(x, params: ForecastParams, cfg: RunConfig,
            debug: dict | None = None) -> Tensor:
    """Run the whole pipeline on a (B, L, D) batch; returns (B, T, D)."""
    x = x if isinstance(x, Tensor) else Tensor(x)
    if x.ndim != 3:
        raise ContractError(f"forward expects (B, L, D), got shape {x.shape}")
    if x.shape[1] != cfg.lookback:
        raise ContractError(
            f"forward: input length {x.shape[1]} != configured lookback {cfg.lookback}"
        )
    _check_mask_mode(cfg.mask_mode)

    x_e = embed(x, params)
    plan = cfg.plan()
    spectra = _mask_spectra(rstft(x_e, plan), spectral_mask_plane(cfg.mask_mode))
    compressed = top_m_select(spectra, cfg.top_m)
    mixed = backbone_forward(
        cfg.backbone,
        compressed,
        params.backbone,
        act=cfg.activation,
        radius=cfg.radius,
        conjugate_neighbors=cfg.conjugate_neighbors,
        weight_mask=weight_mask_plane(cfg.mask_mode),
    )
    padded = position_aware_pad(mixed)
    x_rec = istft(padded)
    skip = x_rec + x_e

    b, l, d, e = skip.shape
    flat = reshape(transpose(skip, (0, 2, 1, 3)), (b, d, l * e))
    hid = matmul(flat, params.head_w1) + params.head_b1
    if cfg.activation == "relu":
        hid = relu(hid)
    out = matmul(hid, params.head_w2) + params.head_b2
    pred = transpose(out, (0, 2, 1))

    if debug is not None:
        debug.update(
            embedded=x_e, spectra=spectra, compressed=compressed,
            mixed=mixed, padded=padded, reconstructed=x_rec,
        )
    return pred


# --- checkpoints --------------------------------------------------------------

def save_checkpoint(path: str, params: ForecastParams, cfg: RunConfig,
                    norm_stats: dict | None = None) -> None:
    named = params.named_tensors()
    header = {
        "format": "freqcast-checkpoint",
        "version": 1,
        "package_version": __version__,
        "config": cfg.as_dict(),
        "norm_stats": norm_stats,
        "tensors": [
            {"name": name, "role": name.split(".", 1)[0], "shape": list(t.data.shape)}
            for name, t in named
        ],
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for _, t in named:
            fh.write(np.ascontiguousarray(t.data, dtype="<f8").tobytes())


def load_checkpoint(path: str) -> tuple[ForecastParams, RunConfig, dict | None]:
    with open(path, "rb") as fh:
        magic = fh.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise ContractError(f"{path} is not a freqcast checkpoint")
        (hlen,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        if header.get("version") != 1:
            raise ContractError(f"unsupported checkpoint version {header.get('version')}")
        cfg = RunConfig.from_dict(header["config"])
        params = init_params(cfg)
        named = dict(params.named_tensors())
        for entry in header["tensors"]:
            name, shape = entry["name"], tuple(entry["shape"])
            if name not in named:
                raise ContractError(f"checkpoint tensor {name!r} unknown to this model")
            if named[name].data.shape != shape:
                raise ContractError(
                    f"checkpoint tensor {name!r} has shape {shape}, "
                    f"model expects {named[name].data.shape}"
                )
            count = int(np.prod(shape)) if shape else 1
            buf = fh.read(8 * count)
            if len(buf) != 8 * count:
                raise ContractError(f"checkpoint truncated while reading {name!r}")
            named[name].data = np.frombuffer(buf, dtype="<f8").reshape(shape).astype(np.float64)
    return params, cfg, header.get("norm_stats")
