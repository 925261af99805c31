import json

import pytest

from thzloc.cli import (
    EXIT_CONFIG_ERROR,
    EXIT_NOT_LOCALIZABLE,
    EXIT_OK,
    main,
)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert "thzloc" in capsys.readouterr().out


def test_bounds_localizable_pose(capsys):
    code, out, _ = run(
        capsys, "bounds", "--preset", "cuboidal-2bs",
        "--position", "1,2,0", "--orientation", "0,-90,45",
    )
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["classification"] == "localizable"
    assert doc["num_visible_bs"] == 2
    assert doc["peb_m"] > 0
    assert doc["oeb_deg"] > 0
    assert len(doc["paths"]) == doc["num_paths"]
    path = doc["paths"][0]
    assert {"bs", "subarray", "aod_az_deg", "aoa_el_deg", "delay_ns"} <= set(path)


def test_bounds_non_localizable_exit_code(capsys):
    # Planar UE flat on its back sees no ceiling BS.
    code, out, _ = run(
        capsys, "bounds", "--preset", "planar-2bs",
        "--position", "0,0,0", "--orientation", "0,90,0",
    )
    assert code == EXIT_NOT_LOCALIZABLE
    doc = json.loads(out)
    assert doc["classification"] == "no_los"
    assert doc["peb_m"] is None
    assert doc["paths"] == []


def test_bounds_rejects_malformed_pose(capsys):
    code, _, err = run(
        capsys, "bounds", "--preset", "planar-2bs",
        "--position", "1,2", "--orientation", "0,0,0",
    )
    assert code == EXIT_CONFIG_ERROR
    assert "--position" in err


def test_negative_coordinates_parse(capsys):
    code, out, _ = run(
        capsys, "bounds", "--preset", "cuboidal-2bs",
        "--position", "-1,-2,0.5", "--orientation", "0,-90,45",
    )
    assert code in (EXIT_OK, EXIT_NOT_LOCALIZABLE)
    assert json.loads(out)["position_m"] == [-1.0, -2.0, 0.5]


def test_config_file_and_seed_override(tmp_path, capsys):
    from thzloc import preset, serialize_config

    path = tmp_path / "scene.yaml"
    path.write_text(serialize_config(preset("cuboidal-2bs")))
    code, out, _ = run(
        capsys, "bounds", "--config", str(path), "--seed", "7",
        "--position", "1,2,0", "--orientation", "0,-90,45",
    )
    assert code == EXIT_OK
    assert json.loads(out)["seed"] == 7


def test_bad_config_file_exit_code(tmp_path, capsys):
    path = tmp_path / "broken.yaml"
    path.write_text("bs: [")
    code, _, err = run(
        capsys, "bounds", "--config", str(path),
        "--position", "0,0,0", "--orientation", "0,0,0",
    )
    assert code == EXIT_CONFIG_ERROR
    assert "error" in err


def test_missing_config_file_exit_code(capsys):
    code, _, err = run(
        capsys, "bounds", "--config", "/nonexistent.yaml",
        "--position", "0,0,0", "--orientation", "0,0,0",
    )
    assert code == EXIT_CONFIG_ERROR
    assert "cannot read" in err


def test_map_csv_structure(capsys):
    code, out, err = run(
        capsys, "map", "--preset", "cuboidal-2bs", "--grid", "-10,10,5",
    )
    assert code == EXIT_OK
    lines = out.strip().split("\n")
    assert lines[0].startswith("# thzloc")
    assert lines[1].startswith("# scenario")
    assert lines[2] == "x_m,y_m,peb_m,oeb_deg,classification,num_paths"
    assert len(lines) == 3 + 25  # 5x5 grid
    first = lines[3].split(",")
    assert first[0] == "-10" and first[1] == "-10"
    assert first[4] == "localizable"
    assert "cells" in err  # run report goes to stderr, not into the CSV


def test_orient_sweep_csv_structure(capsys):
    code, out, _ = run(
        capsys, "orient-sweep", "--preset", "planar-2bs", "--step", "120",
    )
    assert code == EXIT_OK
    lines = out.strip().split("\n")
    assert lines[2] == "beta_deg,gamma_deg,peb_m,oeb_deg,classification,num_paths"
    assert len(lines) == 3 + 16  # 0..360 at 120-degree steps, both axes


def test_coverage_csv_structure(capsys):
    code, out, _ = run(
        capsys, "coverage", "--preset", "planar-2bs", "--trials", "25",
    )
    assert code == EXIT_OK
    lines = out.strip().split("\n")
    assert lines[2] == "threshold_m,exceedance"
    assert lines[-1].startswith("# outage_fraction")
    assert lines[-1].endswith("trials 25")
    assert len(lines) == 3 + 60 + 1


def test_coverage_oeb_metric_header(capsys):
    code, out, _ = run(
        capsys, "coverage", "--preset", "planar-2bs", "--trials", "10",
        "--metric", "oeb",
    )
    assert code == EXIT_OK
    assert out.strip().split("\n")[2] == "threshold_deg,exceedance"


def test_output_file_and_rerun_determinism(tmp_path, capsys):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    for target in (out_a, out_b):
        code, stdout, _ = run(
            capsys, "coverage", "--preset", "planar-2bs", "--trials", "30",
            "--out", str(target),
        )
        assert code == EXIT_OK
        assert stdout == ""
    assert out_a.read_bytes() == out_b.read_bytes()


def test_validate_command(capsys):
    code, out, _ = run(capsys, "validate", "--preset", "cuboidal-2bs", "--trials", "5")
    assert code == EXIT_OK
    lines = [line for line in out.strip().split("\n") if line]
    assert lines and all(line.startswith("PASS") for line in lines)


def test_config_and_preset_are_mutually_exclusive(capsys):
    with pytest.raises(SystemExit) as info:
        main([
            "bounds", "--preset", "planar-2bs", "--config", "x.yaml",
            "--position", "0,0,0", "--orientation", "0,0,0",
        ])
    assert info.value.code == 2
