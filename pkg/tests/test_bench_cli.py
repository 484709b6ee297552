import math

import pytest

from scoperoute import (
    BenchConfig,
    balance_to_proper,
    bidirectional_s_dijkstra,
    generate_synthetic,
    place_random_closures,
    run_benchmark,
)
from scoperoute.bench import CSV_HEADER
from scoperoute.cli import main

INF = math.inf


@pytest.fixture(scope="module")
def small_grid():
    nf = generate_synthetic("grid", 8, 3, seed=6)
    scope = balance_to_proper(nf.network, nf.scope)
    return nf.network, scope


class TestClosurePlacement:
    def test_count_one_hits_midpoint(self, small_grid):
        net, scope = small_grid
        static = bidirectional_s_dijkstra(net, scope, 0, net.vertex_count - 1, "base")
        updates, warnings = place_random_closures(net, scope, static.walk, 1, seed=5)
        assert len(updates) == 1
        assert not warnings
        (edge,) = updates
        assert edge in static.walk.edges

    def test_deterministic(self, small_grid):
        net, scope = small_grid
        static = bidirectional_s_dijkstra(net, scope, 0, net.vertex_count - 1, "base")
        a, _ = place_random_closures(net, scope, static.walk, 10, seed=5)
        b, _ = place_random_closures(net, scope, static.walk, 10, seed=5)
        assert a == b

    def test_warning_when_unbounded_edges_scarce(self):
        nf = generate_synthetic("random", 6, 2, seed=7)
        net, scope = nf.network, nf.scope
        static = None
        for t in range(1, net.vertex_count):
            static = bidirectional_s_dijkstra(net, scope, 0, t, "base")
            if static.walk is not None and static.walk.edges:
                break
        updates, warnings = place_random_closures(net, scope, static.walk, 10_000, seed=1)
        assert warnings
        assert len(updates) <= net.edge_count


class TestRunBenchmark:
    def test_empty_config(self, small_grid):
        net, scope = small_grid
        report = run_benchmark(net, scope, BenchConfig(query_count=0, closure_count=3, seed=1))
        assert report.records == []
        assert report.csv_body() == CSV_HEADER + "\n"

    def test_small_batch_consistency(self, small_grid):
        net, scope = small_grid
        cfg = BenchConfig(query_count=6, closure_count=5, seed=2, measure_time=False)
        report = run_benchmark(net, scope, cfg)
        assert len(report.records) == 6
        for r in report.records:
            assert r.validator_ok
            assert r.static_w < INF
            if r.simple_wstar < INF and r.enhanced_wstar < INF:
                assert r.enhanced_wstar <= r.simple_wstar
        assert report.csv_body() == run_benchmark(net, scope, cfg).csv_body()
        assert "queries: 6" in report.summary()

    def test_timing_columns_blank_without_measurement(self, small_grid):
        net, scope = small_grid
        cfg = BenchConfig(query_count=2, closure_count=3, seed=4, measure_time=False)
        body = run_benchmark(net, scope, cfg).csv_body()
        for line in body.splitlines()[1:]:
            assert line.endswith(",,")


class TestCli:
    @pytest.fixture()
    def net_file(self, tmp_path):
        path = tmp_path / "net.txt"
        main(["gen", "--kind", "grid", "--size", "6", "--levels", "3", "--seed", "3",
              "--balance", "--out", str(path)])
        return path

    def test_gen_deterministic(self, tmp_path):
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        assert main(["gen", "--kind", "grid", "--size", "5", "--seed", "9", "--out", str(a)]) == 0
        assert main(["gen", "--kind", "grid", "--size", "5", "--seed", "9", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_route_and_formats(self, net_file, tmp_path, capsys):
        assert main(["route", "--network", str(net_file), "--source", "0", "--target", "35"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("cost ")
        geo = tmp_path / "route.geojson"
        assert main(["route", "--network", str(net_file), "--source", "0", "--target", "35",
                     "--format", "geojson", "--out", str(geo)]) == 0
        assert '"FeatureCollection"' in geo.read_text()

    def test_route_source_equals_target(self, net_file, capsys):
        assert main(["route", "--network", str(net_file), "--source", "4", "--target", "4"]) == 0
        assert "cost 0" in capsys.readouterr().out

    def test_unreachable_exit_code(self, tmp_path, capsys):
        path = tmp_path / "line.txt"
        path.write_text("V 3\nL 0:5 inf:inf\nE 0 1 1 inf\nE 1 2 1 inf\n")
        closures = tmp_path / "closures.txt"
        closures.write_text("1\n")
        code = main(["detour", "--network", str(path), "--closures", str(closures),
                     "--source", "0", "--target", "2", "--mode", "simple"])
        assert code == 2

    def test_detour_modes_and_qc(self, net_file, tmp_path, capsys):
        closures = tmp_path / "closures.txt"
        # close one arterial edge near the middle of the default route
        assert main(["route", "--network", str(net_file), "--source", "0", "--target", "35",
                     "--format", "csv"]) == 0
        rows = capsys.readouterr().out.splitlines()[1:]
        mid_edge = rows[len(rows) // 2].split(",")[0]
        closures.write_text(mid_edge + "\n")
        for mode in ("simple", "enhanced"):
            code = main(["detour", "--network", str(net_file), "--closures", str(closures),
                         "--source", "0", "--target", "35", "--mode", mode])
            assert code == 0
            out = capsys.readouterr().out
            assert "class" in out and "cost" in out
        assert main(["qc", "--network", str(net_file), "--closures", str(closures),
                     "--source", "0", "--target", "35"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("iterations ")

    def test_validate_definitions(self, net_file, tmp_path, capsys):
        walk_file = tmp_path / "walk.txt"
        assert main(["route", "--network", str(net_file), "--source", "0", "--target", "35",
                     "--format", "csv"]) == 0
        edges = [line.split(",")[0] for line in capsys.readouterr().out.splitlines()[1:]]
        walk_file.write_text("\n".join(edges) + "\n")
        closures = tmp_path / "closures.txt"
        closures.write_text(edges[len(edges) // 2] + "\n")
        for definition in ("3", "5", "7", "9"):
            code = main(["validate", "--network", str(net_file), "--closures", str(closures),
                         "--def", definition, "--walk", str(walk_file),
                         "--source", "0", "--target", "35"])
            assert code == 0
            verdict = capsys.readouterr().out.strip()
            if definition == "3":
                assert verdict == "true"  # plain admissibility ignores closures
            else:
                assert verdict == "false"  # walk traverses the closed edge

    def test_bench_subcommand_reproducible(self, net_file, tmp_path):
        out1 = tmp_path / "r1.csv"
        out2 = tmp_path / "r2.csv"
        args = ["bench", "--network", str(net_file), "--queries", "4",
                "--closure-count", "5", "--seed", "11", "--no-timing"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_error_exit_code(self, tmp_path):
        assert main(["route", "--network", str(tmp_path / "missing.txt"),
                     "--source", "0", "--target", "1"]) == 1
