"""Directional sign loss on small arrays.

The loss counts adjacent-difference sign mismatches between two arrays,
smoothed so it stays differentiable. Sharpness controls how closely the
smooth version tracks the exact count.
"""

import numpy as np

from dsltopo import (
    DslConfig,
    Reduction,
    SignKind,
    dsl_forward,
    dsl_gradient,
    exact_sign_mismatch_count,
)

x = np.array([0.0, 1.0, 2.0, 1.0, 0.5])
y = np.array([0.0, 1.0, 0.5, 1.0, 0.4])

print("x steps:", np.sign(np.diff(x)))
print("y steps:", np.sign(np.diff(y)))
print("exact mismatch count:", exact_sign_mismatch_count(x, y))

for s in (1.0, 8.0, 64.0, 1e6):
    cfg = DslConfig(sharpness=s, match_exact_units=True, scale_by_comparisons=False)
    print(f"smooth loss at sharpness {s:>9g}: {dsl_forward(x, y, cfg):.6f}")

# the smooth loss admits gradients with respect to both arrays and sharpness
cfg = DslConfig(sharpness=8.0, match_exact_units=True, scale_by_comparisons=False)
grad_y, grad_x, grad_s = dsl_gradient(x, y, cfg)
print("d loss / d y:", np.round(grad_y, 4))
print("d loss / d s:", round(grad_s, 6))

# batched arrays: axis 0 is examples, reduction averages over the batch
xb = np.stack([x, x + 1.0])
yb = np.stack([y, x + 1.0])  # second example matches exactly
cfg = DslConfig(sharpness=64.0, skip_batch_axis=True, reduction=Reduction.NONE,
                match_exact_units=True, scale_by_comparisons=False)
print("per-example losses:", np.round(dsl_forward(xb, yb, cfg), 4))

# softsign is a heavier-tailed alternative to tanh
cfg = DslConfig(sharpness=8.0, sign_kind=SignKind.SOFTSIGN,
                match_exact_units=True, scale_by_comparisons=False)
print("softsign loss:", round(dsl_forward(x, y, cfg), 6))
