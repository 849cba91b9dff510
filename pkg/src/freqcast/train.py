"""Loss, Adam, learning-rate decay, and the training/evaluation loops.

Batches are cut chronologically from the sliding-window samples and only
their order is shuffled each epoch, from the run seed, so a seeded run is
bit-reproducible.  The learning rate multiplies by ``lr_decay`` after every
epoch.  The parameters returned are those of the best validation-MAE epoch.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .autograd import Tensor, mean_all, mul, sub
from .config import RunConfig
from .data import make_windows, metrics
from .errors import ConfigError, ContractError, TrainingError
from .model import ForecastParams, forward, init_params


def mse_loss(pred: Tensor, target) -> Tensor:
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ContractError(
            f"loss shape mismatch: pred {pred.shape} vs target {target.shape}"
        )
    diff = sub(pred, target)
    return mean_all(mul(diff, diff))


def backward(loss: Tensor) -> None:
    """Reverse sweep from a scalar loss; a tape cannot be consumed twice."""
    if loss.grad is not None:
        raise ContractError("backward() already ran on this loss node")
    loss.backward()


class Adam:
    """Bias-corrected Adam over named tensors, with per-epoch lr decay."""

    def __init__(self, named_params: list[tuple[str, Tensor]], lr: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        if lr <= 0:
            raise ConfigError(f"lr must be positive, got {lr}")
        self.params = named_params
        self.lr = lr
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.step_count = 0
        self.m = {name: np.zeros_like(t.data) for name, t in named_params}
        self.v = {name: np.zeros_like(t.data) for name, t in named_params}

    def zero_grads(self) -> None:
        for _, t in self.params:
            t.grad = None

    def step(self) -> None:
        self.step_count += 1
        bc1 = 1.0 - self.beta1 ** self.step_count
        bc2 = 1.0 - self.beta2 ** self.step_count
        for name, t in self.params:
            g = t.grad if t.grad is not None else np.zeros_like(t.data)
            if not np.isfinite(g).all():
                raise TrainingError(f"non-finite gradient in parameter {name!r}")
            self.m[name] = self.beta1 * self.m[name] + (1 - self.beta1) * g
            self.v[name] = self.beta2 * self.v[name] + (1 - self.beta2) * (g * g)
            m_hat = self.m[name] / bc1
            v_hat = self.v[name] / bc2
            t.data = t.data - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def decay_lr(self, factor: float) -> None:
        self.lr *= factor


@dataclass
class EpochRecord:
    epoch: int
    lr: float
    train_loss: float
    val_mae: float
    val_rmse: float


@dataclass
class FitResult:
    params: ForecastParams
    log: list[EpochRecord]
    best_epoch: int
    best_val_mae: float


METRICS_FIELDS = ("epoch", "lr", "train_loss", "val_mae", "val_rmse")


def write_metrics_csv(records: list[EpochRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_FIELDS)
        for r in records:
            writer.writerow([r.epoch, repr(r.lr), repr(r.train_loss),
                             repr(r.val_mae), repr(r.val_rmse)])


def predict(params: ForecastParams, cfg: RunConfig, x: np.ndarray,
            chunk: int | None = None) -> np.ndarray:
    """Forward in chunks without keeping graphs; returns (N, T, D)."""
    chunk = chunk or cfg.batch
    outs = []
    for i in range(0, x.shape[0], chunk):
        outs.append(forward(x[i:i + chunk], params, cfg).data)
    return np.concatenate(outs, axis=0)


def evaluate(params: ForecastParams, cfg: RunConfig, x: np.ndarray,
             y: np.ndarray) -> dict[str, float]:
    return metrics(predict(params, cfg, x), y)


def fit(train_split: np.ndarray, val_split: np.ndarray, cfg: RunConfig,
        params: ForecastParams | None = None,
        rng: np.random.Generator | None = None) -> FitResult:
    """Mini-batch Adam over sliding windows; returns best-validation params."""
    if train_split.size == 0 or val_split.size == 0:
        raise TrainingError("empty training or validation split")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    params = params if params is not None else init_params(cfg, rng)

    x_train, y_train = make_windows(train_split, cfg.lookback, cfg.horizon, cfg.stride)
    x_val, y_val = make_windows(val_split, cfg.lookback, cfg.horizon, cfg.stride)
    n = x_train.shape[0]
    batch_bounds = [(i, min(i + cfg.batch, n)) for i in range(0, n, cfg.batch)]

    named = params.named_tensors()
    optim = Adam(named, lr=cfg.lr)
    log: list[EpochRecord] = []
    best: tuple[float, int, dict[str, np.ndarray]] | None = None

    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(batch_bounds))
        total, seen = 0.0, 0
        for bi in order:
            lo, hi = batch_bounds[bi]
            optim.zero_grads()
            loss = mse_loss(forward(x_train[lo:hi], params, cfg), y_train[lo:hi])
            value = float(loss.data)
            if not np.isfinite(value):
                raise TrainingError(
                    f"non-finite training loss at epoch {epoch}, batch {bi}"
                )
            backward(loss)
            optim.step()
            total += value * (hi - lo)
            seen += hi - lo
        for name, t in named:
            if not np.isfinite(t.data).all():
                raise TrainingError(f"parameter {name!r} became non-finite at epoch {epoch}")

        val = evaluate(params, cfg, x_val, y_val)
        log.append(EpochRecord(epoch, optim.lr, total / seen, val["mae"], val["rmse"]))
        if best is None or val["mae"] < best[0]:
            best = (val["mae"], epoch, {name: t.data.copy() for name, t in named})
        optim.decay_lr(cfg.lr_decay)

    assert best is not None
    for name, t in named:
        t.data = best[2][name]
    return FitResult(params, log, best[1], best[0])
