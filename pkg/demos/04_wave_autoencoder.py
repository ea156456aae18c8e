"""Why mix a sign loss into reconstruction training.

Two small autoencoders learn the same enveloped-wave dataset through a
two-unit bottleneck: one with plain MSE, one with MSE plus a heavily
weighted sign loss. The mixture reconstructions agree with the originals'
step directions far more often. Takes a minute or two on a CPU.
"""

from dataclasses import replace

import numpy as np

from dsltopo import (
    demo_preset,
    directional_agreement,
    generate_wave_dataset,
    held_out_split,
    train_autoencoder,
)

data = generate_wave_dataset(1024, seed=0)
train, held = held_out_split(data, 0.1)
spec, base = demo_preset("wave")

models = {}
for label, dsl_weight in (("mse only", 0.0), ("mixture ", 128.0)):
    cfg = replace(base, dsl_weight=dsl_weight, batch_size=256)
    model, log = train_autoencoder(train, spec, cfg)
    models[label] = model
    print(f"{label}: final total loss {log[-1][3]:.4f}")

for label, model in models.items():
    recon = model.reconstruct(held)
    agreement = np.mean([
        directional_agreement(held[i], recon[i]) for i in range(held.shape[0])
    ])
    print(f"{label}: mean held-out directional agreement {agreement:.4f}")
