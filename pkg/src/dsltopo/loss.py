"""Directional sign loss: smooth forward value, analytic gradients, exact mismatch count.

The loss compares the signs of adjacent-element differences of two equally
shaped arrays, axis by axis, through a saturating sign-like map. The exact
count (non-differentiable) is exposed alongside as the unit reference.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import (
    ConfigError,
    DegenerateAxisError,
    NonDifferentiableError,
    ShapeError,
)
from .tensor import as_tensor, require_finite

DEFAULT_SHARPNESS = 32.0


class SignKind(Enum):
    EXACT_SIGN = "exact"
    TANH = "tanh"
    SOFTSIGN = "softsign"


class Reduction(Enum):
    SUM = "sum"
    MEAN = "mean"
    NONE = "none"  # one loss value per example; requires a batch axis


@dataclass(frozen=True)
class DslConfig:
    """Options controlling a directional sign loss evaluation.

    `match_exact_units` halves every mismatch so the value shares units with
    the exact sign-mismatch count; `scale_by_comparisons` instead divides by
    the per-example comparison count so the magnitude is commensurate with
    mean-style losses. The two are mutually exclusive.
    """

    sharpness: float = DEFAULT_SHARPNESS
    weights: tuple[float, ...] | None = None
    sign_kind: SignKind = SignKind.TANH
    match_exact_units: bool = False
    skip_batch_axis: bool = False
    reduction: Reduction = Reduction.MEAN
    scale_by_comparisons: bool = True

    def __post_init__(self):
        if not (np.isfinite(self.sharpness) and self.sharpness > 0):
            raise ConfigError(f"sharpness must be positive, got {self.sharpness}")
        if self.match_exact_units and self.scale_by_comparisons:
            raise ConfigError(
                "match_exact_units and scale_by_comparisons are mutually exclusive"
            )
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            if any(not np.isfinite(v) or v < 0 for v in w):
                raise ConfigError(f"weights must be finite and nonnegative, got {w}")
            object.__setattr__(self, "weights", w)
        if not isinstance(self.sign_kind, SignKind):
            raise ConfigError(f"sign_kind must be a SignKind, got {self.sign_kind!r}")
        if not isinstance(self.reduction, Reduction):
            raise ConfigError(f"reduction must be a Reduction, got {self.reduction!r}")


def sign_like(x, kind: SignKind, s: float):
    """Sign-like transform into [-1, 1]; odd in x for every kind.

    ExactSign ignores the sharpness (sign(s*x) == sign(x) for s > 0).
    """
    if not (np.isfinite(s) and s > 0):
        raise ConfigError(f"sharpness must be positive, got {s}")
    x = np.asarray(x, dtype=np.float64)
    if kind is SignKind.EXACT_SIGN:
        out = np.sign(x)
    elif kind is SignKind.TANH:
        out = np.tanh(s * x)
    elif kind is SignKind.SOFTSIGN:
        z = s * x
        out = z / (1.0 + np.abs(z))
    else:
        raise ConfigError(f"unknown sign kind {kind!r}")
    return out if out.ndim else float(out)


def _dsign_dd(t: np.ndarray, kind: SignKind, s: float) -> np.ndarray:
    # derivative of sign_like(d) with respect to d, written in terms of the output t
    if kind is SignKind.TANH:
        return s * (1.0 - t * t)
    if kind is SignKind.SOFTSIGN:
        a = 1.0 - np.abs(t)
        return s * a * a
    raise NonDifferentiableError("the exact sign function has no usable gradient")


def _dsign_ds(t: np.ndarray, d: np.ndarray, kind: SignKind) -> np.ndarray:
    # derivative of sign_like(d) with respect to the sharpness s
    if kind is SignKind.TANH:
        return d * (1.0 - t * t)
    if kind is SignKind.SOFTSIGN:
        a = 1.0 - np.abs(t)
        return d * a * a
    raise NonDifferentiableError("the exact sign function has no usable gradient")


def _pair_axes(
    X, Y, skip_batch_axis: bool, weights, validate: bool = True
) -> tuple[np.ndarray, np.ndarray, list[int], list[float]]:
    X = as_tensor(X)
    Y = as_tensor(Y)
    if X.shape != Y.shape:
        raise ShapeError(f"shape mismatch: {X.shape} vs {Y.shape}")
    if validate:
        require_finite(X, "X")
        require_finite(Y, "Y")
    axes = list(range(1, X.ndim)) if skip_batch_axis else list(range(X.ndim))
    if not axes:
        raise DegenerateAxisError(
            "no compared axes: skip_batch_axis on a rank-1 tensor leaves nothing to compare"
        )
    for ax in axes:
        if X.shape[ax] == 1:
            raise DegenerateAxisError(
                f"compared axis {ax} has extent 1 and admits no finite differences"
            )
    if weights is None:
        w = [1.0] * len(axes)
    else:
        w = [float(v) for v in weights]
        if len(w) != len(axes):
            raise ConfigError(
                f"{len(w)} weights for {len(axes)} compared axes"
            )
    return X, Y, axes, w


def comparisons_per_example(shape, skip_batch_axis: bool = False) -> int:
    """Number of adjacent-element comparisons one example contributes."""
    sub = tuple(shape[1:]) if skip_batch_axis else tuple(shape)
    total = 0
    size = int(np.prod(sub))
    for i, n in enumerate(sub):
        total += (size // n) * (n - 1)
    return total


def _transform_inplace(d: np.ndarray, kind: SignKind, s: float) -> np.ndarray:
    # sign_like applied to a difference buffer the caller owns
    if kind is SignKind.EXACT_SIGN:
        return np.sign(d, out=d)
    np.multiply(d, s, out=d)
    if kind is SignKind.TANH:
        return np.tanh(d, out=d)
    denom = np.abs(d)  # softsign: z / (1 + |z|)
    denom += 1.0
    return np.divide(d, denom, out=d)


def _scatter_diff(grad: np.ndarray, g: np.ndarray, ax: int, accumulate: bool) -> None:
    """Apply the adjacent-difference chain rule along ax: +g onto the leading
    slice and -g onto the trailing one. With accumulate=False the target is
    uninitialized and written outright (valid when it receives one axis only).
    """
    nd = grad.ndim

    def sl(a, b):
        out = [slice(None)] * nd
        out[ax] = slice(a, b)
        return tuple(out)

    if accumulate:
        grad[sl(1, None)] += g
        grad[sl(None, -1)] -= g
        return
    np.negative(g[sl(0, 1)], out=grad[sl(0, 1)])
    if grad.shape[ax] > 2:
        np.subtract(g[sl(None, -1)], g[sl(1, None)], out=grad[sl(1, -1)])
    grad[sl(-1, None)] = g[sl(-1, None)]


def _dd_factor_into(t: np.ndarray, kind: SignKind, out: np.ndarray) -> np.ndarray:
    # d(sign_like)/dd up to the factor s, written into out: 1-t^2 or (1-|t|)^2
    if kind is SignKind.TANH:
        np.multiply(t, t, out=out)
        np.subtract(1.0, out, out=out)
        return out
    np.abs(t, out=out)
    np.subtract(1.0, out, out=out)
    np.multiply(out, out, out=out)
    return out


def _evaluate(
    X,
    Y,
    cfg: DslConfig,
    want_dy: bool = False,
    want_dx: bool = False,
    want_ds: bool = False,
    tx_by_axis: dict[int, np.ndarray] | None = None,
    validate: bool = True,
):
    """Shared engine for the forward value and its analytic gradients.

    `tx_by_axis` optionally supplies precomputed sign_like(diff(X, axis)) per
    compared axis so repeated evaluations against a fixed X skip that work;
    it cannot be combined with want_dx/want_ds (those need the raw
    differences of X). `validate=False` skips the full finiteness scan for
    callers that already guarantee it.
    """
    X, Y, axes, w = _pair_axes(X, Y, cfg.skip_batch_axis, cfg.weights, validate)
    if (want_dy or want_dx or want_ds) and cfg.sign_kind is SignKind.EXACT_SIGN:
        raise NonDifferentiableError("the exact sign function has no usable gradient")
    if cfg.reduction is Reduction.NONE and not cfg.skip_batch_axis:
        raise ConfigError("per-example reduction requires skip_batch_axis")
    if (want_dy or want_dx or want_ds) and cfg.reduction is Reduction.NONE:
        raise ConfigError("gradients are defined only for scalar reductions")
    if tx_by_axis is not None and (want_dx or want_ds):
        raise ConfigError("precomputed transforms cannot back gradients through X")

    s = cfg.sharpness
    if not (np.isfinite(s) and s > 0):
        raise ConfigError(f"sharpness must be positive, got {s}")
    kind = cfg.sign_kind
    if cfg.match_exact_units:
        unit = 0.5
    elif cfg.scale_by_comparisons:
        unit = 1.0 / comparisons_per_example(X.shape, cfg.skip_batch_axis)
    else:
        unit = 1.0

    n_examples = X.shape[0] if cfg.skip_batch_axis else 1
    example_axes = tuple(range(1, X.ndim)) if cfg.skip_batch_axis else tuple(range(X.ndim))
    per_example = np.zeros(n_examples)
    ds_per_example = np.zeros(n_examples) if want_ds else None
    # a single compared axis writes its gradient outright, so skip the zeroing
    alloc = np.empty_like if len(axes) == 1 else np.zeros_like
    grad_x = alloc(X) if want_dx else None
    grad_y = alloc(Y) if want_dy else None
    any_grad = want_dy or want_dx or want_ds

    for ax, weight in zip(axes, w):
        dx = None
        if tx_by_axis is not None and ax in tx_by_axis:
            tx = tx_by_axis[ax]  # borrowed; never written below
        else:
            dx = np.diff(X, axis=ax)
            if want_dx or want_ds:
                tx = sign_like(dx, kind, s)  # raw dx still needed
            else:
                tx = _transform_inplace(dx, kind, s)
                dx = None
        dy = np.diff(Y, axis=ax)
        if want_ds:
            ty = sign_like(dy, kind, s)
        else:
            ty = _transform_inplace(dy, kind, s)
            dy = None
        mism = tx - ty
        scale = weight * unit

        if not any_grad:
            np.abs(mism, out=mism)
            if cfg.skip_batch_axis:
                per_example += scale * mism.sum(axis=example_axes)
            else:
                per_example[0] += scale * mism.sum()
            continue

        sgn = np.sign(mism)  # sign(tx - ty); zero at the |.| kink
        np.multiply(mism, sgn, out=mism)  # |tx - ty|
        if cfg.skip_batch_axis:
            per_example += scale * mism.sum(axis=example_axes)
        else:
            per_example[0] += scale * mism.sum()

        if want_ds:
            # computed first: it needs tx, ty, dx, dy before any buffer reuse
            term = sgn * (_dsign_ds(tx, dx, kind) - _dsign_ds(ty, dy, kind)) * scale
            if cfg.skip_batch_axis:
                ds_per_example += term.sum(axis=example_axes)
            else:
                ds_per_example[0] += term.sum()
        if want_dy:
            gy = _dd_factor_into(ty, kind, out=mism)  # mism's value is spent
            np.multiply(gy, sgn, out=gy)
            gy *= -(s * scale)
            _scatter_diff(grad_y, gy, ax, accumulate=len(axes) > 1)
        if want_dx:
            gx = _dd_factor_into(tx, kind, out=ty)  # ty is spent after want_dy
            np.multiply(gx, sgn, out=gx)
            gx *= s * scale
            _scatter_diff(grad_x, gx, ax, accumulate=len(axes) > 1)

    if cfg.skip_batch_axis and cfg.reduction is Reduction.NONE:
        return per_example, None, None, None

    if cfg.skip_batch_axis and cfg.reduction is Reduction.MEAN:
        value = float(per_example.mean())
        batch_scale = 1.0 / n_examples
    else:
        value = float(per_example.sum())
        batch_scale = 1.0
    if grad_y is not None and batch_scale != 1.0:
        grad_y *= batch_scale
    if grad_x is not None and batch_scale != 1.0:
        grad_x *= batch_scale
    ds = float(ds_per_example.sum() * batch_scale) if want_ds else None
    return value, grad_y, grad_x, ds


def dsl_forward(X, Y, cfg: DslConfig = DslConfig()):
    """Directional sign loss between X and Y.

    Returns a float, or a rank-1 array of per-example losses when the
    reduction is NONE (batch axis required).
    """
    value, _, _, _ = _evaluate(X, Y, cfg)
    return value


def dsl_gradient(X, Y, cfg: DslConfig = DslConfig()):
    """Analytic gradients (dloss/dY, dloss/dX, dloss/ds) of dsl_forward.

    At points where the two transformed differences coincide the |.| kink
    contributes subgradient 0, so identical inputs yield exact zeros.
    """
    _, grad_y, grad_x, ds = _evaluate(X, Y, cfg, want_dy=True, want_dx=True, want_ds=True)
    return grad_y, grad_x, ds


def exact_sign_mismatch_count(X, Y, weights=None, skip_batch_axis: bool = False) -> float:
    """Exact, non-differentiable count of sign mismatches between finite differences.

    Each comparison contributes |sign(dX) - sign(dY)| / 2, which is 0, 0.5,
    or 1; 0.5 appears when exactly one of the two differences is zero.
    """
    X, Y, axes, w = _pair_axes(X, Y, skip_batch_axis, weights)
    total = 0.0
    for ax, weight in zip(axes, w):
        sx = np.sign(np.diff(X, axis=ax))
        sy = np.sign(np.diff(Y, axis=ax))
        total += weight * 0.5 * np.abs(sx - sy).sum()
    return float(total)
