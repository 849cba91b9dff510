"""Windowed real-FFT analysis and exact overlap-add synthesis.

A plan splits a length-L lookback into p windows of nfft samples with hop
(L - nfft) / (p - 1), which must divide exactly; p = 1 degenerates to a
plain FFT over the whole lookback.  Synthesis multiplies each inverse
transform by the analysis window again and divides the overlap-added result
by the per-sample sum of squared window values, which makes
istft(rstft(x)) == x to float64 round-off for every accepted plan.

Plans that would leave any sample uncovered (hop > nfft) are rejected up
front, because the synthesis normalisation would divide by zero there.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .autograd import CTensor, Tensor, irfft_real, mul, pad_axis, rfft_pair
from .errors import ConfigError, ContractError
from .fftkit import onesided_bins

WINDOW_FNS = ("rectangular", "hann")


@dataclass(frozen=True)
class StftPlan:
    lookback: int
    window_count: int
    nfft: int
    hop: int
    window_fn: str = "rectangular"

    @property
    def bins(self) -> int:
        return onesided_bins(self.nfft)

    @property
    def starts(self) -> list[int]:
        return [i * self.hop for i in range(self.window_count)]

    @property
    def centers(self) -> list[float]:
        return [s + self.nfft / 2 for s in self.starts]

    def window_values(self) -> np.ndarray:
        return _window_values(self.window_fn, self.nfft)

    def coverage(self) -> np.ndarray:
        """Per-sample sum of squared window values over the lookback."""
        w2 = self.window_values() ** 2
        cov = np.zeros(self.lookback)
        for s in self.starts:
            cov[s:s + self.nfft] += w2
        return cov


@lru_cache(maxsize=None)
def _window_values(window_fn: str, nfft: int) -> np.ndarray:
    if window_fn == "rectangular":
        w = np.ones(nfft)
    elif window_fn == "hann":
        # half-sample-offset cosine taper: strictly positive, so the
        # per-sample synthesis normalisation is always defined
        t = np.arange(nfft) + 0.5
        w = 0.5 * (1.0 - np.cos(2.0 * np.pi * t / nfft))
    else:
        raise ConfigError(f"unknown window function {window_fn!r}; choose from {WINDOW_FNS}")
    w.setflags(write=False)
    return w


def valid_window_counts(lookback: int, nfft: int, cap: int = 256) -> list[int]:
    """Window counts that give an integer hop without coverage gaps."""
    counts = []
    if nfft == lookback:
        counts.append(1)
    for p in range(2, cap + 1):
        span = lookback - nfft
        if span % (p - 1) == 0 and span // (p - 1) <= nfft:
            counts.append(p)
    return counts


def nearest_valid_window_count(lookback: int, nfft: int, p: int) -> int | None:
    counts = valid_window_counts(lookback, nfft, cap=max(256, 2 * p))
    if not counts:
        return None
    return min(counts, key=lambda c: (abs(c - p), c))


def plan_stft(lookback: int, window_count: int, nfft: int,
              window_fn: str = "rectangular") -> StftPlan:
    """Validate the window layout and return an immutable plan."""
    if window_count < 1:
        raise ConfigError(f"window count must be >= 1, got {window_count}")
    if nfft < 1 or nfft > lookback:
        raise ConfigError(
            f"nfft must be in [1, lookback]: nfft={nfft}, lookback={lookback}"
        )
    _window_values(window_fn, nfft)  # reject unknown window functions early
    if window_count == 1:
        if nfft != lookback:
            raise ConfigError(
                f"a single window requires nfft == lookback, got nfft={nfft}, "
                f"lookback={lookback}"
            )
        return StftPlan(lookback, 1, nfft, 0, window_fn)

    span = lookback - nfft
    if span % (window_count - 1) != 0:
        hint = nearest_valid_window_count(lookback, nfft, window_count)
        hint_msg = f"; nearest valid window count is {hint}" if hint else ""
        raise ConfigError(
            f"window layout does not tile the lookback (lookback={lookback}, "
            f"window_count={window_count}, nfft={nfft}): span {span} is not "
            f"divisible by window_count - 1 = {window_count - 1}{hint_msg}"
        )
    hop = span // (window_count - 1)
    if hop > nfft:
        hint = nearest_valid_window_count(lookback, nfft, window_count)
        hint_msg = f"; nearest valid window count is {hint}" if hint else ""
        raise ConfigError(
            f"hop {hop} exceeds nfft {nfft}: samples between windows would "
            f"carry zero window energy and synthesis could not divide by the "
            f"per-sample energy (lookback={lookback}, window_count={window_count}, "
            f"nfft={nfft}){hint_msg}"
        )
    plan = StftPlan(lookback, window_count, nfft, hop, window_fn)
    if plan.coverage().min() <= 0.0:
        raise ConfigError(
            f"plan leaves zero-energy samples: lookback={lookback}, "
            f"window_count={window_count}, nfft={nfft}, window_fn={window_fn}"
        )
    return plan


@dataclass
class SpectralWindows:
    """One-sided spectra per window, each of shape (B, bins, D, E)."""

    windows: list[CTensor]
    plan: StftPlan

    @property
    def bins(self) -> int:
        return self.plan.bins


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def rstft(x, plan: StftPlan) -> SpectralWindows:
    """One-sided DFT of each windowed segment of a real (B, L, D, E) tensor."""
    x = _as_tensor(x)
    if x.ndim != 4:
        raise ContractError(f"rstft expects (B, L, D, E), got shape {x.shape}")
    if x.shape[1] != plan.lookback:
        raise ContractError(
            f"rstft: time axis {x.shape[1]} != plan lookback {plan.lookback}"
        )
    w = plan.window_values()
    out = []
    for s in plan.starts:
        seg = x[:, s:s + plan.nfft, :, :]
        if plan.window_fn != "rectangular":
            seg = mul(seg, w[None, :, None, None])
        re, im = rfft_pair(seg, axis=1)
        out.append(CTensor(re, im))
    return SpectralWindows(out, plan)


def istft(s: SpectralWindows) -> Tensor:
    """Window-weighted overlap-add synthesis, energy-normalised per sample."""
    plan = s.plan
    if len(s.windows) != plan.window_count:
        raise ContractError(
            f"istft: got {len(s.windows)} windows, plan has {plan.window_count}"
        )
    w = plan.window_values()
    acc = None
    for start, c in zip(plan.starts, s.windows):
        if c.shape[1] != plan.bins:
            raise ContractError(
                f"istft: window has {c.shape[1]} bins, plan expects {plan.bins}"
            )
        seg = irfft_real(c.re, c.im, plan.nfft, axis=1)
        if plan.window_fn != "rectangular":
            seg = mul(seg, w[None, :, None, None])
        padded = pad_axis(seg, 1, start, plan.lookback - start - plan.nfft)
        acc = padded if acc is None else acc + padded
    inv_cov = 1.0 / plan.coverage()
    return mul(acc, inv_cov[None, :, None, None])
