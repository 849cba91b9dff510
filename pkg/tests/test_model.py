"""Whole-model contracts: embedding, shapes, skip path, masking, checkpoints."""

import dataclasses

import numpy as np
import pytest

from freqcast.autograd import Tensor
from freqcast.config import MASK_MODES, RunConfig
from freqcast.errors import ConfigError, ContractError
from freqcast.model import (
    apply_weight_mask_to_data,
    embed,
    forward,
    init_params,
    load_checkpoint,
    save_checkpoint,
    spectral_mask_plane,
    weight_mask_plane,
)

TINY = dict(lookback=8, horizon=4, embed=4, windows=2, nfft=4, top_m=3, hidden=8,
            batch=2, epochs=2)


def tiny_cfg(**overrides):
    kw = {**TINY, **overrides}
    return RunConfig(**kw).validate()


def make_identity_backbone(params, kind, embed_dim):
    if kind == "fd":
        for layer in params.backbone.layers:
            layer.w.re.data[...] = np.eye(embed_dim)
            layer.w.im.data[...] = 0.0
    elif kind == "wm":
        for w in params.backbone.self_weights:
            w.re.data[...] = np.eye(embed_dim)
            w.im.data[...] = 0.0
        for w in params.backbone.neighbor_weights.values():
            w.re.data[...] = 0.0
            w.im.data[...] = 0.0
    elif kind == "hc":
        for i, w in enumerate(params.backbone.weights):
            w.re.data[...] = np.eye(embed_dim) if i == 0 else 0.0
            w.im.data[...] = 0.0
    elif kind == "basic":
        for s, row in enumerate(params.backbone.grid):
            for d, w in enumerate(row):
                w.re.data[...] = np.eye(embed_dim) if s == d else 0.0
                w.im.data[...] = 0.0


class TestEmbed:
    def test_unit_scale_broadcasts(self, rng):
        cfg = tiny_cfg()
        params = init_params(cfg)
        params.embed_scale.data[:] = 1.0
        params.embed_bias.data[:] = 0.0
        x = rng.normal(size=(2, 8, 3))
        out = embed(Tensor(x), params).data
        np.testing.assert_allclose(out, np.repeat(x[..., None], 4, axis=3))

    def test_zero_input_gives_bias(self, rng):
        cfg = tiny_cfg()
        params = init_params(cfg)
        params.embed_bias.data[:] = rng.normal(size=4)
        out = embed(Tensor(np.zeros((1, 8, 2))), params).data
        np.testing.assert_allclose(out, np.broadcast_to(params.embed_bias.data, out.shape))

    def test_matches_direct_formula(self, rng):
        cfg = tiny_cfg(embed=2)
        params = init_params(cfg)
        x = rng.normal(size=(2, 8, 2))
        out = embed(Tensor(x), params).data
        want = x[..., None] * params.embed_scale.data + params.embed_bias.data
        np.testing.assert_allclose(out, want, atol=1e-15)

    def test_rank_checked(self):
        cfg = tiny_cfg()
        with pytest.raises(ContractError):
            embed(Tensor(np.zeros((8, 2))), init_params(cfg))


class TestForward:
    def test_shape_contract_tiny_instance(self, rng):
        cfg = tiny_cfg()
        out = forward(rng.normal(size=(1, 8, 1)), init_params(cfg), cfg)
        assert out.shape == (1, 4, 1)

    @pytest.mark.parametrize("kind,p", [("fd", 3), ("wm", 3), ("hc", 4), ("basic", 3)])
    def test_shape_contract_other_backbones(self, rng, kind, p):
        cfg = tiny_cfg(lookback=12, windows=p, nfft=12 - (p - 1) * 2, top_m=2,
                       backbone=kind)
        out = forward(rng.normal(size=(3, 12, 2)), init_params(cfg), cfg)
        assert out.shape == (3, 4, 2)

    def test_zero_input_zero_output(self, rng):
        cfg = tiny_cfg()
        out = forward(np.zeros((2, 8, 2)), init_params(cfg), cfg)
        assert np.abs(out.data).max() == 0.0

    @pytest.mark.parametrize("kind", ["fd", "wm", "hc", "basic"])
    def test_identity_backbone_reconstructs_embedding(self, rng, kind):
        cfg = tiny_cfg(lookback=16, windows=2, nfft=8, top_m=5, backbone=kind,
                       activation="identity")
        params = init_params(cfg)
        make_identity_backbone(params, kind, cfg.embed)
        debug = {}
        forward(rng.normal(size=(2, 16, 2)), params, cfg, debug=debug)
        x_e = debug["embedded"].data
        x_rec = debug["reconstructed"].data
        assert np.abs(x_rec - x_e).max() < 1e-6 * np.abs(x_e).max()

    def test_wrong_lookback_rejected(self, rng):
        cfg = tiny_cfg()
        with pytest.raises(ContractError):
            forward(np.zeros((1, 9, 1)), init_params(cfg), cfg)

    def test_horizon_may_exceed_flattened_width(self, rng):
        cfg = tiny_cfg(horizon=40)  # > lookback * embed = 32
        out = forward(rng.normal(size=(2, 8, 1)), init_params(cfg), cfg)
        assert out.shape == (2, 40, 1)

    def test_forward_is_deterministic(self, rng):
        cfg = tiny_cfg()
        x = rng.normal(size=(2, 8, 2))
        p1, p2 = init_params(cfg), init_params(cfg)
        for (n1, t1), (n2, t2) in zip(p1.named_tensors(), p2.named_tensors()):
            assert n1 == n2
            assert np.array_equal(t1.data, t2.data)
        assert np.array_equal(forward(x, p1, cfg).data, forward(x, p2, cfg).data)


class TestMasking:
    def test_mode_vocabulary(self):
        assert len(MASK_MODES) == 7
        assert spectral_mask_plane("x_real") == "real"
        assert spectral_mask_plane("w_imag+x_imag") == "imag"
        assert spectral_mask_plane("w_real") is None
        assert weight_mask_plane("w_real+x_real") == "real"
        assert weight_mask_plane("x_imag") is None
        assert weight_mask_plane("none") is None

    def test_unknown_mode_rejected(self, rng):
        cfg = dataclasses.replace(tiny_cfg(), mask_mode="w_nonsense")
        with pytest.raises(ConfigError):
            forward(np.zeros((1, 8, 1)), init_params(tiny_cfg()), cfg)

    def test_none_is_bit_identical_to_default(self, rng):
        cfg = tiny_cfg()
        params = init_params(cfg)
        x = rng.normal(size=(2, 8, 2))
        a = forward(x, params, cfg).data
        b = forward(x, params, dataclasses.replace(cfg, mask_mode="none")).data
        assert np.array_equal(a, b)

    def test_hiding_imag_of_constant_signal_is_noop(self):
        cfg = tiny_cfg(top_m=3)  # full retention; constant spectra are DC-only
        params = init_params(cfg)
        x = np.ones((1, 8, 1))
        base = forward(x, params, cfg).data
        masked = forward(x, params, dataclasses.replace(cfg, mask_mode="x_imag")).data
        np.testing.assert_allclose(masked, base, atol=1e-10)

    def test_masked_spectra_plane_is_exactly_zero(self, rng):
        cfg = dataclasses.replace(tiny_cfg(), mask_mode="x_real")
        params = init_params(cfg)
        debug = {}
        forward(rng.normal(size=(2, 8, 2)), params, cfg, debug=debug)
        for c in debug["spectra"].windows:
            assert np.abs(c.re.data).max() == 0.0
            assert np.abs(c.im.data).max() > 0.0

    def test_real_masked_real_weights_leave_bias_only(self, rng):
        cfg = dataclasses.replace(tiny_cfg(backbone="basic"), mask_mode="w_real")
        params = init_params(cfg)
        for row in params.backbone.grid:
            for w in row:
                w.im.data[...] = 0.0  # purely real weights
        for b in params.backbone.biases:
            b.re.data[:] = rng.normal(size=cfg.embed)
        debug = {}
        forward(rng.normal(size=(1, 8, 1)), params, cfg, debug=debug)
        for i, c in enumerate(debug["mixed"].windows):
            want = np.maximum(params.backbone.biases[i].re.data, 0.0)
            np.testing.assert_allclose(
                c.re.data, np.broadcast_to(want, c.shape), atol=1e-14
            )

    @pytest.mark.parametrize("mode", ["w_real", "w_imag", "w_imag+x_imag", "w_real+x_real"])
    def test_weight_planes_zeroed_at_init(self, mode):
        cfg = dataclasses.replace(tiny_cfg(), mask_mode=mode)
        params = init_params(cfg)
        plane = weight_mask_plane(mode)
        from freqcast.backbones import backbone_weight_ctensors

        for w in backbone_weight_ctensors(params.backbone_kind, params.backbone):
            masked = w.re.data if plane == "real" else w.im.data
            assert np.abs(masked).max() == 0.0

    def test_apply_weight_mask_validates_mode(self):
        params = init_params(tiny_cfg())
        with pytest.raises(ConfigError):
            apply_weight_mask_to_data(params, "garbage")


class TestCheckpoint:
    def test_roundtrip(self, rng, tmp_path):
        cfg = tiny_cfg(backbone="wm", windows=3, lookback=12, nfft=6, top_m=2)
        params = init_params(cfg)
        stats = {"min": [0.0, 1.0], "max": [2.0, 3.0]}
        path = tmp_path / "model.ckpt"
        save_checkpoint(str(path), params, cfg, stats)
        loaded, cfg2, stats2 = load_checkpoint(str(path))
        assert cfg2.as_dict() == cfg.as_dict()
        assert stats2 == stats
        for (n1, t1), (n2, t2) in zip(params.named_tensors(), loaded.named_tensors()):
            assert n1 == n2
            assert np.array_equal(t1.data, t2.data)

    def test_wrong_magic_rejected(self, tmp_path):
        path = tmp_path / "bogus.ckpt"
        path.write_bytes(b"NOTACKPT" + b"\0" * 32)
        with pytest.raises(ContractError):
            load_checkpoint(str(path))

    def test_truncated_payload_rejected(self, tmp_path):
        cfg = tiny_cfg()
        path = tmp_path / "model.ckpt"
        save_checkpoint(str(path), init_params(cfg), cfg, None)
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) - 64])
        with pytest.raises(ContractError):
            load_checkpoint(str(path))
