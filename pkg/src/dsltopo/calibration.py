"""Sharpness calibration.

Finds a sharpness s whose directional sign loss magnitude matches a
reference loss (MSE or MAE) on random pairs drawn from a dataset, by
stochastic gradient descent on log(s). Working in log space keeps s
positive without clamping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .exceptions import ConfigError, DegenerateBatchError, NumericError, ShapeError
from .loss import DslConfig, Reduction, SignKind, _evaluate
from .tensor import as_tensor


class ReferenceLoss(Enum):
    MSE = "mse"
    MAE = "mae"


@dataclass(frozen=True)
class CalibrationConfig:
    max_steps: int = 5000
    threshold: float = 1e-4
    step_size: float = 0.5
    batch_size: int = 32  # even; split into positionally paired halves
    reference_loss: ReferenceLoss = ReferenceLoss.MSE
    initial_sharpness: float = 32.0
    seed: int = 0

    def __post_init__(self):
        if self.max_steps < 1:
            raise ConfigError(f"max_steps must be at least 1, got {self.max_steps}")
        if not (np.isfinite(self.threshold) and self.threshold > 0):
            raise ConfigError(f"threshold must be positive, got {self.threshold}")
        if not (np.isfinite(self.step_size) and self.step_size > 0):
            raise ConfigError(f"step_size must be positive, got {self.step_size}")
        if self.batch_size < 2 or self.batch_size % 2:
            raise ConfigError(
                f"batch_size must be an even number of at least 2, got {self.batch_size}"
            )
        if not (np.isfinite(self.initial_sharpness) and self.initial_sharpness > 0):
            raise ConfigError(
                f"initial_sharpness must be positive, got {self.initial_sharpness}"
            )
        if not isinstance(self.reference_loss, ReferenceLoss):
            raise ConfigError(f"reference_loss must be a ReferenceLoss, got {self.reference_loss!r}")


def _as_dataset(dataset) -> np.ndarray:
    if isinstance(dataset, np.ndarray):
        return as_tensor(dataset)
    items = [as_tensor(x) for x in dataset]
    if not items:
        raise ConfigError("dataset is empty")
    if any(x.shape != items[0].shape for x in items):
        raise ShapeError("dataset examples must share a shape")
    return np.stack(items)


def find_sharpness(
    dataset,
    cfg: CalibrationConfig = CalibrationConfig(),
    reference_fn: Callable[[np.ndarray, np.ndarray], float] | None = None,
    step_callback: Callable[[int, float, float], None] | None = None,
) -> tuple[float, float, int]:
    """Calibrate the sharpness against a reference loss on random pairs.

    Per step: draw batch_size examples without replacement, pair the first
    half against the second positionally, and descend (dsl - ref)^2 in
    log-sharpness. Stops as soon as that optimization loss drops below
    cfg.threshold, so an already-matching initial sharpness is returned
    unchanged with steps_taken == 1. Returns (sharpness, final optimization
    loss, steps taken); deterministic for a fixed seed.

    `reference_fn(B1, B2) -> float` overrides the configured reference loss;
    `step_callback(step, sharpness, opt_loss)` observes every evaluated step.
    """
    data = _as_dataset(dataset)
    n = data.shape[0]
    if cfg.batch_size > n:
        raise ConfigError(f"batch_size {cfg.batch_size} exceeds dataset size {n}")

    rng = np.random.default_rng(cfg.seed)
    half = cfg.batch_size // 2
    # s is the state; log space is entered only inside the update so an
    # immediate stop hands back cfg.initial_sharpness bit for bit
    s = cfg.initial_sharpness
    opt_loss = math.inf
    step = 0

    for step in range(1, cfg.max_steps + 1):
        idx = rng.choice(n, size=cfg.batch_size, replace=False)
        batch = data[idx]
        b1 = batch[:half]
        b2 = batch[half:]

        if reference_fn is not None:
            ref = float(reference_fn(b1, b2))
        elif cfg.reference_loss is ReferenceLoss.MSE:
            ref = float(np.mean((b1 - b2) ** 2))
        else:
            ref = float(np.mean(np.abs(b1 - b2)))
        if ref == 0.0:
            raise DegenerateBatchError(
                f"reference loss is zero on the batch at step {step}"
            )

        dsl_cfg = DslConfig(
            sharpness=s,
            sign_kind=SignKind.TANH,
            skip_batch_axis=True,
            reduction=Reduction.MEAN,
            scale_by_comparisons=True,
        )
        dsl_val, _, _, dsl_ds = _evaluate(b1, b2, dsl_cfg, want_ds=True)

        opt_loss = (dsl_val - ref) ** 2
        if step_callback is not None:
            step_callback(step, s, opt_loss)
        if opt_loss < cfg.threshold:
            return s, opt_loss, step

        # d(opt)/d(sigma) = 2 (dsl - ref) * d(dsl)/ds * s  with sigma = log s
        sigma = math.log(s) - cfg.step_size * 2.0 * (dsl_val - ref) * dsl_ds * s
        s = math.exp(sigma)
        if not math.isfinite(s) or s <= 0.0:
            raise NumericError(f"sharpness diverged during calibration at step {step}")

    return s, opt_loss, step
