import pytest

from ghk import kernels
from ghk.bench import CSV_HEADER, KERNELS, bench, bench_compare, rows_to_csv


class TestBench:
    def test_empty_sizes_header_only(self):
        csv_text = rows_to_csv(bench(["u2-brute"], []))
        assert csv_text == ",".join(CSV_HEADER) + "\n"

    def test_unknown_kernel(self):
        with pytest.raises(ValueError, match="unknown bench kernel"):
            bench(["warp-drive"], [8])

    def test_rows_schema(self):
        rows = bench(["u2-brute", "u2-spectral"], [6], reps=2)
        assert len(rows) == 2
        for row in rows:
            assert set(row) == set(CSV_HEADER)
            assert row["N"] == 6 and row["d"] == 1
            assert row["median_ms"] > 0
            assert row["work_count"] > 0

    def test_cross_check_runs(self):
        # same-quantity kernels are value-checked against each other inline
        rows = bench(["u3-brute", "u3-rec"], [6], reps=1)
        assert {r["kernel"] for r in rows} == {"u3-brute", "u3-rec"}

    def test_dual_kernels_have_references(self):
        rows = bench(["d2-brute", "d3-rec"], [5], reps=1)
        assert len(rows) == 2

    def test_work_counts_monotone(self):
        for kernel in KERNELS:
            rows = bench([kernel], [4, 6, 8], reps=1)
            works = [r["work_count"] for r in rows]
            assert works == sorted(works) and works[0] < works[-1]

    def test_all_kernels_run(self):
        rows = bench(list(KERNELS), [5], reps=1)
        assert len(rows) == len(KERNELS)

    def test_impl_pinning(self):
        rows = bench(["u2-spectral"], [5], reps=1, impl="numpy")
        assert rows[0]["impl"] == "numpy"
        # backend restored afterwards
        assert kernels.active_backend() in ("numba", "numpy")

    @pytest.mark.skipif(not kernels.NUMBA_AVAILABLE, reason="numba unavailable")
    def test_compare_mode(self):
        rows = bench_compare(["u2-brute"], [5], reps=1)
        impls = {r["impl"] for r in rows}
        assert impls == {"numba", "numpy"}

    def test_csv_round_trip_precision(self):
        rows = bench(["u2-brute"], [5], reps=1)
        text = rows_to_csv(rows)
        line = text.splitlines()[1].split(",")
        assert float(line[4]) == rows[0]["median_ms"]
