"""Matching the sign loss magnitude to a reference loss.

Mixing the sign loss with a pointwise loss works best when both sit on a
comparable scale. find_sharpness tunes the sharpness so the sign loss
tracks a chosen reference on a dataset, using the loss's own sharpness
gradient.
"""

import numpy as np

from dsltopo import CalibrationConfig, ReferenceLoss, find_sharpness

rng = np.random.default_rng(0)
dataset = [rng.normal(scale=0.2, size=64) for _ in range(200)]

trace = []
cfg = CalibrationConfig(
    max_steps=400,
    threshold=1e-8,
    step_size=0.5,
    batch_size=32,
    reference_loss=ReferenceLoss.MSE,
    initial_sharpness=32.0,
    seed=0,
)
s, gap, steps = find_sharpness(dataset, cfg, step_callback=lambda *row: trace.append(row))

print(f"calibrated sharpness {s:.4f} after {steps} steps, squared gap {gap:.3g}")
print("trajectory (step, sharpness, squared gap):")
for row in trace[:: max(1, len(trace) // 8)]:
    print(f"  step {row[0]:4d}  s {row[1]:9.4f}  gap {row[2]:.3g}")
