import json

import pytest

from gkbch.cli import ConfigError, execute, main, parse_config


def test_defaults_are_recorded():
    cfg = parse_config("command: experiment-nonuniform\nk: 1\n")
    v = cfg.values
    assert v["regime"] == "low_k" and v["n_max"] == 8 and v["L"] == 25.0 and v["b"] == 2.0
    assert {"regime", "n_max", "L", "b", "dt_initial"} <= set(cfg.defaulted)
    assert "k" not in cfg.defaulted


def test_json_config_and_overrides():
    cfg = parse_config(json.dumps({"command": "simulate", "N": 256}), {"N": 512, "k": None})
    assert cfg.values["N"] == 512 and cfg.values["k"] == 1
    assert cfg.grid.points == 512


@pytest.mark.parametrize(
    "text,key",
    [
        ("command: simulate\nk: 0\n", "k:"),
        ("command: simulate\nN: 1001\n", "N:"),
        ("command: simulate\nL: -2\n", "L:"),
        ("command: simulate\ncfl_number: 2\n", "cfl_number:"),
        ("command: simulate\nt_final: 0\n", "t_final:"),
        ("command: simulate\nformats: [xml]\n", "formats:"),
        ("command: simulate\ninitial: square\n", "initial:"),
        ("command: simulate\nk: two\n", "k:"),
        ("command: experiment-nonuniform\nk: 2\nregime: high_k\n", "regime:"),
        ("command: experiment-nonuniform\nn_min: 6\nn_max: 5\n", "n_min/n_max:"),
        ("command: experiment-approx\nk: 2\n", "k:"),
        ("command: experiment-travelwave\ndelta: [0.3]\n", "delta:"),
        ("command: nothing\n", "command:"),
    ],
)
def test_config_errors_name_the_key(text, key):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert str(exc.value).startswith(key)


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="unknown config key.*grid_size"):
        parse_config("command: simulate\ngrid_size: 64\n")
    with pytest.raises(ConfigError, match="mapping"):
        parse_config("[1, 2]")


def test_main_exit_code_on_bad_config(tmp_path, capsys):
    assert main(["simulate", "--k", "0", "--output", str(tmp_path)]) == 2
    assert "k: must be a positive integer" in capsys.readouterr().err


def test_simulate_writes_outputs(tmp_path):
    out = tmp_path / "sim"
    cfg = parse_config({"command": "simulate", "N": 256, "L": 20.0, "t_final": 0.1, "output_dir": str(out)})
    assert execute(cfg) == 0
    names = {p.name for p in out.iterdir()}
    assert {"manifest.txt", "trace.json", "diagnostics.csv"} <= names
    manifest = (out / "manifest.txt").read_text()
    assert "[config]" in manifest and "N = 256\n" in manifest
    assert 'initial = "gaussian"  # default' in manifest
    assert "csv_schema_version = 1" in manifest
    assert "status = ok" in manifest


def test_csv_only_format(tmp_path):
    out = tmp_path / "csv"
    cfg = parse_config({"command": "simulate", "N": 256, "L": 20.0, "t_final": 0.05,
                        "formats": "csv", "output_dir": str(out)})
    assert execute(cfg) == 0
    assert not (out / "trace.json").exists() and (out / "diagnostics.csv").exists()


def test_failed_run_is_reported(tmp_path):
    # an under-resolved grid for the pair datum fails inside the runner
    out = tmp_path / "bad"
    cfg = parse_config({"command": "simulate", "initial": "pair", "k": 3, "b": 4.0, "n": 6,
                        "N": 64, "L": 50.0, "output_dir": str(out)})
    assert execute(cfg) == 1
    manifest = (out / "manifest.txt").read_text()
    assert "[error]" in manifest and "ResolutionError" in manifest
    assert "status = failed" in manifest


def test_nonuniform_csv_is_deterministic(tmp_path):
    base = {"command": "experiment-nonuniform", "k": 3, "n_min": 3, "n_max": 4, "t_max": 0.04}
    a = tmp_path / "a"
    b = tmp_path / "b"
    execute(parse_config(dict(base, output_dir=str(a), jobs=1)))
    execute(parse_config(dict(base, output_dir=str(b), jobs=2)))
    assert (a / "nonuniform.csv").read_bytes() == (b / "nonuniform.csv").read_bytes()
    assert (a / "nonuniform.json").read_bytes() == (b / "nonuniform.json").read_bytes()


def test_travelwave_command(tmp_path):
    out = tmp_path / "tw"
    cfg = parse_config({"command": "experiment-travelwave", "n_min": 4, "n_max": 5, "delta": [0.05],
                        "div_n": [6], "N": 256, "output_dir": str(out)})
    assert execute(cfg) == 0
    assert (out / "divergence.csv").read_text().startswith("n,")
