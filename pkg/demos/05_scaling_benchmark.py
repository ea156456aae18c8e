"""How the losses scale with input size.

The sign loss runs in near-linear time, so it stays cheap at sizes where
exact topological comparison is already impractical. The benchmark times
each measure on growing random pairs and drops a measure once it blows
its per-call budget.
"""

from dsltopo import benchmark_losses

records = benchmark_losses(
    kinds=["dsl", "mse", "persistence-wasserstein", "correlation-distance"],
    ranks=[1],
    sizes=[1024, 2048, 4096, 8192, 16384],
    repetitions=3,
    time_budget_seconds=0.5,
)

print(f"{'kind':>24} {'elements':>9} {'median seconds':>15}")
last = None
for r in records:
    if r.loss_kind is not last:
        print()
        last = r.loss_kind
    print(f"{r.loss_kind.value:>24} {r.elements:>9} {r.wall_time_seconds:>15.6f}")
print("\na kind that stops early exceeded the 0.5 s budget at that size")
