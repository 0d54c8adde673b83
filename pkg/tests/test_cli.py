import numpy as np
import pytest

from twodarcy.cli import ConfigError, RunConfig, main, run


def test_invalid_configs_rejected():
    with pytest.raises(ConfigError, match="constant_projection"):
        RunConfig(example=1, interface_mode="constant_projection").validate()
    with pytest.raises(ConfigError, match="paper_literal"):
        RunConfig(example=4, interface_mode="paper_literal").validate()
    with pytest.raises(ConfigError, match="max level"):
        RunConfig(example=1, max_level=12).validate()
    with pytest.raises(ConfigError, match="beta"):
        RunConfig(example=1, beta=-1.0).validate()
    with pytest.raises(ConfigError, match="example"):
        RunConfig(example=7).validate()


def test_main_reports_config_error(capsys):
    code = main(["--example", "4", "--interface-mode", "paper_literal"])
    assert code == 2
    err = capsys.readouterr().err
    assert "paper_literal" in err


def test_run_writes_csv_and_fields(tmp_path, capsys):
    csv = tmp_path / "out.csv"
    fields = tmp_path / "fields"
    code = main([
        "--example", "1", "--max-level", "4",
        "--csv", str(csv), "--fields", str(fields),
    ])
    assert code == 0
    assert csv.exists()
    lines = csv.read_text().strip().split("\n")
    assert len(lines) == 4  # header + levels 1, 2, 4
    for level in (1, 2, 4):
        r1 = (fields / f"region1_{level}.vtk").read_text()
        r2 = (fields / f"region2_{level}.vtk").read_text()
        assert r1.startswith("# vtk DataFile Version 3.0")
        assert "CELL_DATA" in r1 and "SCALARS p1 double 1" in r1
        assert "VECTORS u1 double" in r1
        assert "POINT_DATA" in r2 and "SCALARS p2 double 1" in r2
        assert "VECTORS u2 double" in r2
    out = capsys.readouterr().out
    assert "h_inv" in out


def test_run_byte_identical_csv(tmp_path):
    paths = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        assert main(["--example", "2", "--max-level", "4", "--csv", str(path)]) == 0
        paths.append(path.read_bytes())
    assert paths[0] == paths[1]


def test_diagnostics_output(capsys):
    code = main(["--example", "1", "--max-level", "1", "--diagnostics"])
    assert code == 0
    out = capsys.readouterr().out
    assert "diagnostics level 1" in out
    line = [l for l in out.splitlines() if l.startswith("diagnostics")][0]
    values = [float(part.split("=")[1]) for part in line.split() if "=" in part]
    assert len(values) == 3
    assert all(v > 0 for v in values)


def test_constant_projection_prints_relative_table(capsys):
    code = main([
        "--example", "4", "--interface-mode", "constant_projection",
        "--max-level", "4",
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "relative errors (percent):" in out


def test_field_dumps_deterministic(tmp_path):
    dirs = []
    for name in ("f1", "f2"):
        fields = tmp_path / name
        assert main(["--example", "1", "--max-level", "2", "--fields", str(fields)]) == 0
        dirs.append(fields)
    for fname in ("region1_2.vtk", "region2_2.vtk"):
        assert (dirs[0] / fname).read_bytes() == (dirs[1] / fname).read_bytes()


def test_solver_failure_exit_status(monkeypatch, capsys):
    import twodarcy.analysis as analysis
    from twodarcy.solver import SolverError

    def boom(system):
        raise SolverError("synthetic failure")

    monkeypatch.setattr(analysis, "solve", boom)
    code = main(["--example", "1", "--max-level", "2"])
    assert code == 1
    assert "level" in capsys.readouterr().err


def test_paper_literal_modes_run(tmp_path):
    for example in ("2", "3"):
        path = tmp_path / f"lit{example}.csv"
        code = main(["--example", example, "--interface-mode", "paper_literal",
                     "--max-level", "2", "--csv", str(path)])
        assert code == 0
        assert path.exists()


def test_beta_override(tmp_path):
    path_a = tmp_path / "a.csv"
    path_b = tmp_path / "b.csv"
    assert main(["--example", "3", "--max-level", "2", "--csv", str(path_a)]) == 0
    assert main(["--example", "3", "--max-level", "2", "--beta", "4.0",
                 "--csv", str(path_b)]) == 0
    assert path_a.read_bytes() != path_b.read_bytes()
