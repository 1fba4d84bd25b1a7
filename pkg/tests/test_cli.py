import json

import pytest
from click.testing import CliRunner

from diagkit.cli import main
from diagkit.fixtures import CIRCUIT_NETLIST_TEXT, EXK_TEXT


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def exk_file(tmp_path):
    path = tmp_path / "exk.dpi"
    path.write_text(EXK_TEXT)
    return str(path)


@pytest.fixture()
def netlist_file(tmp_path):
    path = tmp_path / "adder.net"
    path.write_text(CIRCUIT_NETLIST_TEXT)
    return str(path)


@pytest.fixture()
def circuit_file(tmp_path, runner, netlist_file):
    reduced = runner.invoke(main, ["reduce", netlist_file]).output
    body = "\n".join(line for line in reduced.splitlines()
                     if not line.startswith("#"))
    # re-attach the gate fault rates and probe costs used by the fixture
    from diagkit.circuit import circuit_dpi
    from diagkit.dpi import serialize_dpi
    path = tmp_path / "circuit.dpi"
    path.write_text(serialize_dpi(circuit_dpi()[0]))
    assert "[K]" in body  # the plain reduction parses too
    return str(path)


class TestDiagnose:
    def test_exk(self, runner, exk_file):
        result = runner.invoke(main, ["diagnose", exk_file])
        assert result.exit_code == 0
        lines = [l for l in result.output.splitlines() if l.strip()]
        assert len(lines) == 6
        assert any(l.startswith("2,3") for l in lines)

    def test_limit(self, runner, exk_file):
        result = runner.invoke(main, ["diagnose", exk_file, "-n", "2"])
        assert result.exit_code == 0
        assert len(result.output.splitlines()) == 2

    def test_missing_file(self, runner):
        assert runner.invoke(main, ["diagnose", "nope.dpi"]).exit_code == 2


class TestQpartition:
    def test_exk(self, runner, exk_file):
        result = runner.invoke(main, ["qpartition", exk_file])
        assert result.exit_code == 0
        assert "D+:" in result.output and "D-:" in result.output
        assert "ENT value:" in result.output

    def test_spl(self, runner, exk_file):
        result = runner.invoke(main, ["qpartition", exk_file, "--qsm", "spl",
                                      "--threshold", "0"])
        assert result.exit_code == 0
        assert "SPL value: 0.000000" in result.output


class TestQuery:
    def test_exk_card(self, runner, exk_file):
        result = runner.invoke(main, ["query", exk_file, "--qcm", "card"])
        assert result.exit_code == 0
        assert "query:" in result.output

    def test_circuit_enhanced(self, runner, circuit_file):
        result = runner.invoke(main, ["query", circuit_file, "--enhance"])
        assert result.exit_code == 0
        assert "!outX1" in result.output

    def test_unknown_flag(self, runner, exk_file):
        assert runner.invoke(main, ["query", exk_file,
                                    "--qcm", "median"]).exit_code == 2


class TestReduce:
    def test_netlist(self, runner, netlist_file):
        result = runner.invoke(main, ["reduce", netlist_file])
        assert result.exit_code == 0
        assert "[K]" in result.output
        assert "# components:" in result.output
        assert "1=X1" in result.output


class TestSession:
    def test_simulated_target(self, runner, circuit_file):
        result = runner.invoke(main, ["session", circuit_file, "--simulate",
                                      "--target", "1", "--enhance"])
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["diagnosis"] == [1]
        answered = [h for h in data["transcript"]
                    if h["answer"] in ("true", "false")]
        assert len(answered) == 1

    def test_reference_file(self, runner, exk_file, tmp_path):
        ref = tmp_path / "ref.txt"
        from diagkit.dpi import Diagnosis, solution_kb
        from diagkit.fixtures import exk_dpi
        from diagkit.logic import serialize
        kb = solution_kb(exk_dpi(), Diagnosis.of(1, 4, 7))
        ref.write_text("\n".join(serialize(f) for f in sorted(kb, key=serialize)))
        result = runner.invoke(main, ["session", exk_file, "--simulate",
                                      "--reference", str(ref)])
        assert result.exit_code == 0
        assert json.loads(result.output)["diagnosis"] == [1, 4, 7]

    def test_requires_exactly_one_oracle_source(self, runner, exk_file):
        result = runner.invoke(main, ["session", exk_file, "--simulate"])
        assert result.exit_code == 2


class TestFixturesVerify:
    def test_report(self, runner):
        result = runner.invoke(main, ["fixtures", "--verify"])
        assert result.exit_code == 0
        assert "29 canonical q-partitions" in result.output
        assert "FAIL" not in result.output
        assert result.output.strip().endswith("all fixture checks passed")
