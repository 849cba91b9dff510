"""FFT kernels against an independent oracle, and autograd gradient checks."""

import numpy as np
import pytest

from freqcast import fftkit
from freqcast.autograd import (
    CTensor,
    Tensor,
    add,
    gather_bins,
    getitem,
    irfft_real,
    matmul,
    mean_all,
    mul,
    pad_axis,
    relu,
    reshape,
    rfft_pair,
    scatter_bins,
    sub,
    transpose,
)
from freqcast.errors import ContractError

from conftest import max_rel_err, naive_dft, numeric_gradient


class TestFftKernels:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64])
    def test_matches_naive_dft(self, rng, n):
        x = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
        re, im = fftkit.fft_complex(x.real, x.imag)
        want = naive_dft(x)
        scale = max(1.0, np.abs(want).max())
        assert np.abs((re + 1j * im) - want).max() / scale < 1e-10

    @pytest.mark.parametrize("n", [2, 5, 6, 8, 16, 48])
    def test_rfft_is_truncated_dft(self, rng, n):
        x = rng.normal(size=(3, n))
        re, im = fftkit.rfft_onesided(x)
        want = naive_dft(x)[..., : n // 2 + 1]
        np.testing.assert_allclose(re + 1j * im, want, atol=1e-10)

    @pytest.mark.parametrize("n", [2, 5, 6, 8, 16, 48])
    def test_irfft_inverts_rfft(self, rng, n):
        x = rng.normal(size=(4, n))
        re, im = fftkit.rfft_onesided(x)
        np.testing.assert_allclose(fftkit.irfft_onesided(re, im, n), x, atol=1e-11)

    def test_linearity(self, rng):
        x, y = rng.normal(size=(2, 16)), rng.normal(size=(2, 16))
        a, b = 1.7, -0.3
        r1, i1 = fftkit.rfft_onesided(a * x + b * y)
        rx, ix = fftkit.rfft_onesided(x)
        ry, iy = fftkit.rfft_onesided(y)
        np.testing.assert_allclose(r1, a * rx + b * ry, atol=1e-10)
        np.testing.assert_allclose(i1, a * ix + b * iy, atol=1e-10)

    @pytest.mark.parametrize("n", [6, 8, 48])
    def test_transposes_are_exact_adjoints(self, rng, n):
        bins = fftkit.onesided_bins(n)
        x = rng.normal(size=(3, n))
        gre, gim = rng.normal(size=(3, bins)), rng.normal(size=(3, bins))
        fr, fi = fftkit.rfft_onesided(x)
        lhs = (fr * gre).sum() + (fi * gim).sum()
        rhs = (x * fftkit.rfft_transpose(gre, gim, n)).sum()
        assert abs(lhs - rhs) < 1e-9

        re, im = rng.normal(size=(3, bins)), rng.normal(size=(3, bins))
        g = rng.normal(size=(3, n))
        lhs = (fftkit.irfft_onesided(re, im, n) * g).sum()
        tre, tim = fftkit.irfft_transpose(g, n)
        rhs = (re * tre).sum() + (im * tim).sum()
        assert abs(lhs - rhs) < 1e-9

    def test_dc_and_nyquist_imag_have_no_effect(self, rng):
        n = 8
        re = rng.normal(size=(n // 2 + 1,))
        im = rng.normal(size=(n // 2 + 1,))
        base = fftkit.irfft_onesided(re, im, n)
        im2 = im.copy()
        im2[0] += 3.0
        im2[-1] -= 2.0
        np.testing.assert_allclose(fftkit.irfft_onesided(re, im2, n), base, atol=1e-12)


def check_grads(build_loss, tensors, tol=1e-6):
    loss = build_loss()
    loss.backward()
    for t in tensors:
        analytic = t.grad if t.grad is not None else np.zeros_like(t.data)
        numeric = numeric_gradient(lambda: float(build_loss().data), t)
        assert max_rel_err(analytic, numeric) < tol


class TestAutogradPrimitives:
    def test_add_mul_broadcasting(self, rng):
        a = Tensor(rng.normal(size=(3, 4)))
        b = Tensor(rng.normal(size=(4,)))
        check_grads(lambda: mean_all(mul(add(a, b), a)), [a, b])

    def test_sub_and_constant_operand(self, rng):
        a = Tensor(rng.normal(size=(2, 3)))
        const = rng.normal(size=(2, 3))
        check_grads(lambda: mean_all(mul(sub(a, const), sub(a, const))), [a])

    def test_matmul_batched(self, rng):
        a = Tensor(rng.normal(size=(2, 3, 4)))
        w = Tensor(rng.normal(size=(4, 5)))
        check_grads(lambda: mean_all(mul(matmul(a, w), matmul(a, w))), [a, w])

    def test_matmul_shape_error(self, rng):
        with pytest.raises(ContractError):
            matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((4, 2))))

    def test_reshape_transpose_slice_pad(self, rng):
        a = Tensor(rng.normal(size=(2, 6)))

        def build():
            x = reshape(a, (3, 4))
            x = transpose(x, (1, 0))
            x = getitem(x, (slice(1, 3), slice(None)))
            x = pad_axis(x, 1, 1, 2)
            return mean_all(mul(x, x))

        check_grads(build, [a])

    def test_relu_and_mean(self, rng):
        a = Tensor(rng.normal(size=(5, 5)) + 0.05)
        check_grads(lambda: mean_all(relu(a)), [a])

    def test_gather_scatter_roundtrip_grads(self, rng):
        a = Tensor(rng.normal(size=(3, 8, 2)))
        idx = np.argsort(-np.abs(a.data), axis=1)[:, :3, :]

        def build():
            g = gather_bins(a, idx, 1)
            s = scatter_bins(g, idx, 1, 8)
            return mean_all(mul(s, s))

        check_grads(build, [a])

    def test_scatter_index_bounds(self, rng):
        a = Tensor(np.ones((1, 2)))
        with pytest.raises(ContractError):
            scatter_bins(a, np.array([[0, 5]]), 1, 4)

    @pytest.mark.parametrize("n", [8, 12])
    def test_fft_pair_grads(self, rng, n):
        x = Tensor(rng.normal(size=(2, n, 2)))

        def build():
            re, im = rfft_pair(x, axis=1)
            y = irfft_real(re, im, n, axis=1)
            return mean_all(mul(add(y, re[:, :1]), y))

        check_grads(build, [x])

    def test_backward_needs_scalar(self, rng):
        t = Tensor(rng.normal(size=(2, 2)))
        with pytest.raises(ContractError):
            t.backward()

    def test_grad_accumulates_over_reuse(self, rng):
        a = Tensor(np.array([2.0]))
        out = mean_all(mul(a, a))
        out.backward()
        np.testing.assert_allclose(a.grad, [4.0])


class TestCTensor:
    def test_complex_matmul_value(self, rng):
        xr, xi = rng.normal(size=(4, 3)), rng.normal(size=(4, 3))
        wr, wi = rng.normal(size=(3, 2)), rng.normal(size=(3, 2))
        got = CTensor(Tensor(xr), Tensor(xi)).matmul(CTensor(Tensor(wr), Tensor(wi)))
        np.testing.assert_allclose(got.value(), (xr + 1j * xi) @ (wr + 1j * wi), atol=1e-12)

    def test_conj_negates_imag_plane(self, rng):
        c = CTensor(Tensor(rng.normal(size=(2,))), Tensor(rng.normal(size=(2,))))
        np.testing.assert_allclose(c.conj().value(), np.conj(c.value()))

    def test_plane_shape_mismatch(self):
        with pytest.raises(ContractError):
            CTensor(Tensor(np.zeros(2)), Tensor(np.zeros(3)))
