import csv

import pytest

from dsltopo import BenchRecord, ConfigError, LossKind, benchmark_losses, write_bench_csv


class TestValidation:
    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            benchmark_losses(["mse", "entropy"], ranks=[1], sizes=[8])

    def test_empty_kinds(self):
        with pytest.raises(ConfigError):
            benchmark_losses([], ranks=[1], sizes=[8])

    def test_rank_out_of_range(self):
        with pytest.raises(ConfigError):
            benchmark_losses(["mse"], ranks=[4], sizes=[8])
        with pytest.raises(ConfigError):
            benchmark_losses(["mse"], ranks=[0], sizes=[8])

    def test_sizes_must_ascend(self):
        with pytest.raises(ConfigError):
            benchmark_losses(["mse"], ranks=[1], sizes=[16, 8])
        with pytest.raises(ConfigError):
            benchmark_losses(["mse"], ranks=[1], sizes=[8, 8])

    def test_size_too_small(self):
        with pytest.raises(ConfigError):
            benchmark_losses(["mse"], ranks=[1], sizes=[1, 8])

    def test_repetitions_floor(self):
        with pytest.raises(ConfigError):
            benchmark_losses(["mse"], ranks=[1], sizes=[8], repetitions=2)

    def test_budget_positive(self):
        with pytest.raises(ConfigError):
            benchmark_losses(["mse"], ranks=[1], sizes=[8], time_budget_seconds=0.0)


class TestRecords:
    def test_single_record_schema(self):
        recs = benchmark_losses(["dsl"], ranks=[1], sizes=[64], repetitions=3)
        assert len(recs) == 1
        r = recs[0]
        assert isinstance(r, BenchRecord)
        assert r.loss_kind is LossKind.DSL
        assert r.rank == 1
        assert r.elements == 64
        assert r.wall_time_seconds > 0.0
        assert r.repetitions == 3
        assert r.peak_alloc_bytes > 0

    def test_elements_is_size_to_rank(self):
        recs = benchmark_losses(["mse"], ranks=[2], sizes=[8, 16], repetitions=3)
        assert [r.elements for r in recs] == [64, 256]

    def test_kind_accepts_enum_and_string(self):
        a = benchmark_losses([LossKind.MSE], ranks=[1], sizes=[32], repetitions=3)
        b = benchmark_losses(["mse"], ranks=[1], sizes=[32], repetitions=3)
        assert a[0].loss_kind is b[0].loss_kind is LossKind.MSE

    def test_canonical_order_and_dedup(self):
        recs = benchmark_losses(["mse", "dsl", "mse"], ranks=[2, 1], sizes=[16],
                                repetitions=3)
        combos = [(r.loss_kind, r.rank) for r in recs]
        assert combos == [
            (LossKind.DSL, 1), (LossKind.DSL, 2),
            (LossKind.MSE, 1), (LossKind.MSE, 2),
        ]

    def test_budget_cuts_larger_sizes(self):
        # an impossible budget stops every kind after its first size
        recs = benchmark_losses(["dsl", "persistence-wasserstein"], ranks=[1],
                                sizes=[64, 128, 256], repetitions=3,
                                time_budget_seconds=1e-12)
        per_kind = {}
        for r in recs:
            per_kind.setdefault(r.loss_kind, []).append(r.elements)
        assert per_kind == {
            LossKind.DSL: [64],
            LossKind.PERSISTENCE_WASSERSTEIN: [64],
        }


class TestCsv:
    def test_columns_and_round_trip(self, tmp_path):
        recs = benchmark_losses(["mse"], ranks=[1], sizes=[16, 32], repetitions=3)
        path = tmp_path / "bench.csv"
        write_bench_csv(recs, path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["loss_kind", "rank", "elements", "wall_time_seconds",
                           "repetitions", "peak_alloc_bytes"]
        assert len(rows) == 3
        assert rows[1][0] == "mse"
        assert int(rows[1][2]) == 16
        assert float(rows[1][3]) == pytest.approx(recs[0].wall_time_seconds)
