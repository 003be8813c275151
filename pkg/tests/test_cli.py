import csv
import json

import numpy as np
import pytest

from hpqe import cli, gateset, state


def run_cli(*argv):
    return cli.main([str(a) for a in argv])


class TestRun:
    def test_qft4_dump(self, tmp_path):
        code = run_cli("run", "--gen", "qft", "--n", 4, "--init", 0,
                       "--out", tmp_path)
        assert code == 0
        sv = state.load((tmp_path / "state.bin").read_bytes())
        assert sv.n == 4
        mags = np.abs(sv.to_complex())
        assert np.abs(mags - 0.25).max() < 1e-6        # uniform magnitudes
        cycles = json.loads((tmp_path / "cycles.json").read_text())
        assert cycles["n"] == 4 and cycles["mem_mode"] == "BRAM"
        timing = json.loads((tmp_path / "time.json").read_text())
        assert timing["total_s"] == pytest.approx(
            cycles["total_cycles"] / 250e6)

    def test_capacity_error_exit_code(self, tmp_path, capsys):
        assert run_cli("run", "--gen", "qft", "--n", 31, "--out", tmp_path) == 3
        assert "capacity" in capsys.readouterr().err.lower()

    def test_empty_circuit_file(self, tmp_path):
        qc = tmp_path / "empty.qc"
        qc.write_text("# nothing here\n")
        code = run_cli("run", "--circuit", qc, "--n", 3, "--out", tmp_path)
        assert code == 0
        sv = state.load((tmp_path / "state.bin").read_bytes())
        assert sv.flatten() == state.init_basis(3, 0).flatten()

    def test_parse_error_exit_code(self, tmp_path, capsys):
        qc = tmp_path / "bad.qc"
        qc.write_text("QUBITS 2\nWOBBLE 0\n")
        assert run_cli("run", "--circuit", qc, "--out", tmp_path) == 4
        capsys.readouterr()

    def test_missing_file_exit_code(self, tmp_path):
        assert run_cli("run", "--circuit", tmp_path / "nope.qc",
                       "--out", tmp_path) == 4

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("run", "--gen", "nonsense", "--n", 3)
        assert exc.value.code == 2


class TestCompare:
    def test_identity_circuit(self, tmp_path):
        qc = tmp_path / "id.qc"
        qc.write_text("QUBITS 2\n")
        assert run_cli("compare", "--circuit", qc, "--out", tmp_path) == 0
        doc = json.loads((tmp_path / "metrics.json").read_text())
        assert doc["fidelity"] == 1.0
        assert doc["mse_raw"] == 0.0 and doc["mse_aligned"] == 0.0

    def test_bell_circuit(self, tmp_path):
        qc = tmp_path / "bell.qc"
        qc.write_text("QUBITS 2\nH 0\nCX 0 1\n")
        assert run_cli("compare", "--circuit", qc, "--out", tmp_path) == 0
        doc = json.loads((tmp_path / "metrics.json").read_text())
        assert abs(doc["fidelity"] - 1.0) <= 2.0 ** -28

    def test_qft8(self, tmp_path):
        assert run_cli("compare", "--gen", "qft", "--n", 8,
                       "--out", tmp_path) == 0
        doc = json.loads((tmp_path / "metrics.json").read_text())
        assert doc["fidelity"] >= 0.9999
        assert doc["n"] == 8 and doc["gates"] == 160


class TestBench:
    def read_rows(self, path):
        with open(path, newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))

    def test_qft_sweep(self, tmp_path):
        assert run_cli("bench", "--gen", "qft", "--n", "3..5",
                       "--out", tmp_path) == 0
        rows = self.read_rows(tmp_path / "bench.csv")
        assert [r["n"] for r in rows] == ["3", "4", "5"]
        for row in rows:
            assert row["error"] == ""
            n = int(row["n"])
            ngs = float(row["ngs"])
            recomputed = float(row["predicted_time_s"]) / (
                int(row["gates_total"]) * 2 ** n)
            assert f"{ngs:.3g}" == f"{recomputed:.3g}"
            assert float(row["fidelity"]) > 0.9999
            assert float(row["wall_clock_s"]) > 0
        cx_rows = self.read_rows(tmp_path / "cx_compare.csv")
        assert [r["n"] for r in cx_rows] == ["3", "4", "5"]
        assert int(cx_rows[0]["legacy_cycles"]) == 10
        assert int(cx_rows[0]["new_cycles"]) == 7

    def test_partial_failure_continues(self, tmp_path):
        assert run_cli("bench", "--gen", "qft", "--n", "4..6",
                       "--max-qubits", 4, "--out", tmp_path) == 0
        rows = self.read_rows(tmp_path / "bench.csv")
        assert len(rows) == 3
        assert rows[0]["error"] == "" and float(rows[0]["fidelity"]) > 0.9999
        assert all("CapacityError" in r["error"] for r in rows[1:])

    def test_qft17_row_matches_reference_table(self, tmp_path):
        assert run_cli("bench", "--gen", "qft", "--n", "17..17",
                       "--out", tmp_path) == 0
        row = self.read_rows(tmp_path / "bench.csv")[0]
        assert row["error"] == ""
        assert int(row["gates_total"]) == 721
        assert int(row["total_cycles"]) == 22882844
        # modeled NGS lands within the 15% calibration band of 1.02e-9
        assert abs(float(row["ngs"]) - 1.02e-9) / 1.02e-9 < 0.15
        assert float(row["fidelity"]) > 0.9999

    def test_template_generator(self, tmp_path):
        assert run_cli("bench", "--gen", "chain", "--n", "3..4", "--layers", 2,
                       "--seed", 7, "--out", tmp_path) == 0
        rows = self.read_rows(tmp_path / "bench.csv")
        assert rows[0]["circuit"] == "chain-3x2"
        assert int(rows[0]["gates_cx"]) == 2 * 2

    def test_deterministic_without_wall_clock(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert run_cli("bench", "--gen", "qft", "--n", "3..4",
                           "--no-wall-clock", "--out", out) == 0
        assert (out1 / "bench.csv").read_bytes() == \
               (out2 / "bench.csv").read_bytes()
        assert (out1 / "cx_compare.csv").read_bytes() == \
               (out2 / "cx_compare.csv").read_bytes()

    def test_semantic_columns_deterministic_with_wall_clock(self, tmp_path):
        rows = []
        for out in (tmp_path / "a", tmp_path / "b"):
            assert run_cli("bench", "--gen", "rotation", "--n", "3..3",
                           "--seed", 3, "--out", out) == 0
            rows.append(self.read_rows(out / "bench.csv"))
        for r1, r2 in zip(*rows):
            r1.pop("wall_clock_s"), r2.pop("wall_clock_s")
            assert r1 == r2

    def test_json_format(self, tmp_path):
        assert run_cli("bench", "--gen", "qft", "--n", "3..3",
                       "--format", "json", "--out", tmp_path) == 0
        rows = json.loads((tmp_path / "bench.json").read_text())
        assert rows[0]["gates_total"] == 21


class TestGen:
    def test_stdout_round_trips(self, capsys):
        assert run_cli("gen", "qft", "--n", 3) == 0
        text = capsys.readouterr().out
        circuit = gateset.circuit_from_text(text)
        assert circuit.n == 3
        assert len(circuit.ops) == 21
        assert circuit.global_phase > 0

    def test_file_output(self, tmp_path):
        assert run_cli("gen", "chain", "--n", 4, "--layers", 2,
                       "--seed", 1, "--out", tmp_path) == 0
        text = (tmp_path / "chain-4x2.qc").read_text()
        circuit = gateset.circuit_from_text(text)
        assert len([op for op in circuit.ops if op.kind == "CX"]) == 6

    def test_deterministic_for_seed(self, tmp_path, capsys):
        outs = []
        for _ in range(2):
            assert run_cli("gen", "all_to_all", "--n", 3, "--seed", 9) == 0
            outs.append(capsys.readouterr().out)
        assert outs[0] == outs[1]


class TestCxCompare:
    def test_ratio_converges(self, tmp_path):
        assert run_cli("cx-compare", "--n", "2..20", "--out", tmp_path) == 0
        with open(tmp_path / "cx_compare.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 19
        for row in rows:
            n = int(row["n"])
            assert int(row["legacy_cycles"]) == 5 * 2 ** (n - 2)
            assert int(row["new_cycles"]) == 2 * (2 ** (n - 2) + 1) + 1
        assert abs(float(rows[-1]["ratio"]) - 2.5) < 0.001


class TestDeterminism:
    def test_run_outputs_byte_identical(self, tmp_path):
        dirs = (tmp_path / "x", tmp_path / "y")
        for out in dirs:
            assert run_cli("run", "--gen", "alternating", "--n", 4,
                           "--seed", 5, "--out", out) == 0
        for name in ("state.bin", "cycles.json", "time.json"):
            assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()

    def test_compare_outputs_byte_identical(self, tmp_path):
        dirs = (tmp_path / "x", tmp_path / "y")
        for out in dirs:
            assert run_cli("compare", "--gen", "qft", "--n", 5,
                           "--out", out) == 0
        assert (dirs[0] / "metrics.json").read_bytes() == \
               (dirs[1] / "metrics.json").read_bytes()
