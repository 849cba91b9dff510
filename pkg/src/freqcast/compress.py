"""Top-M spectral compression and its exact position-aware inverse.

Selection keeps, independently for every (batch sample, window, channel),
the M frequency bins with the largest magnitude-squared summed over the
embedding axis.  Kept indices are remembered so the padding step can put
coefficients back at their original bins, with zeros elsewhere.  Ties go to
the lower bin index, and kept indices are stored ascending, so runs are
deterministic across platforms.

Selection itself is non-differentiable routing: it is computed from the
forward values and frozen; gradients flow only through kept coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autograd import CTensor, gather_bins, scatter_bins
from .errors import ConfigError, ContractError
from .spectral import SpectralWindows, StftPlan


@dataclass
class CompressedWindows:
    """Per-window compressed spectra (B, M, D, E) plus kept bin indices (B, M, D)."""

    windows: list[CTensor]
    indices: list[np.ndarray]
    bins_total: int
    plan: StftPlan

    @property
    def kept(self) -> int:
        return self.windows[0].shape[1]


def top_m_select(s: SpectralWindows, m: int) -> CompressedWindows:
    """Keep the m highest-energy bins per (sample, window, channel)."""
    bins = s.bins
    if not 1 <= m <= bins:
        raise ConfigError(f"top-M must satisfy 1 <= M <= {bins}, got {m}")
    kept_windows = []
    kept_indices = []
    for c in s.windows:
        score = (c.re.data ** 2 + c.im.data ** 2).sum(axis=3)  # (B, bins, D)
        order = np.argsort(-score, axis=1, kind="stable")  # ties -> lower bin
        idx = np.sort(order[:, :m, :], axis=1)
        idx_e = np.broadcast_to(idx[..., None], idx.shape + (c.shape[3],))
        kept_windows.append(CTensor(
            gather_bins(c.re, idx_e, axis=1),
            gather_bins(c.im, idx_e, axis=1),
        ))
        kept_indices.append(idx)
    return CompressedWindows(kept_windows, kept_indices, bins, s.plan)


def position_aware_pad(c: CompressedWindows) -> SpectralWindows:
    """Restore kept coefficients to their original bins, zeros elsewhere."""
    out = []
    for w, idx in zip(c.windows, c.indices):
        if idx.shape[1] != w.shape[1]:
            raise ContractError(
                f"index set size {idx.shape[1]} != kept coefficients {w.shape[1]}"
            )
        idx_e = np.broadcast_to(idx[..., None], idx.shape + (w.shape[3],))
        out.append(CTensor(
            scatter_bins(w.re, idx_e, axis=1, size=c.bins_total),
            scatter_bins(w.im, idx_e, axis=1, size=c.bins_total),
        ))
    return SpectralWindows(out, c.plan)
