from __future__ import annotations

import json
import math

import numpy as np
import pytest

from moyalsq import cli
from moyalsq.config import parse_config
from moyalsq.dynamics import NumericalFailure
from moyalsq.io import config_hash, read_csv, read_snapshot, write_columns, write_csv, write_manifest, write_snapshot
from moyalsq.params import ConfigError
from moyalsq.spectral import random_hermitian

FAST = ["--set", "model.cutoff=2", "--set", "run.t_final=0.1", "--set", "run.burn_in=0.01", "--set", "run.snapshot_stride=1"]


# snapshots and tables


def test_snapshot_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    fields = {"z": random_hermitian(4, rng), "v": random_hermitian(4, rng)}
    p = write_snapshot(tmp_path / "s.msq", 1.25, fields, {"cutoff": 3})
    t, back = read_snapshot(p)
    assert t == 1.25 and list(back) == ["z", "v"]
    for k in fields:
        np.testing.assert_allclose(back[k], fields[k], rtol=1e-6, atol=1e-7)
    side = json.loads((tmp_path / "s.msq.json").read_text())
    assert side["fields"] == ["z", "v"] and side["cutoff"] == 3
    assert p.read_bytes()[:4] == b"MSQS"


def test_snapshot_rejects_bad_input(tmp_path):
    with pytest.raises(ValueError):
        write_snapshot(tmp_path / "a", 0.0, {"a": np.zeros((2, 2)), "b": np.zeros((3, 3))}, {})
    (tmp_path / "junk").write_bytes(b"nope")
    with pytest.raises(ValueError):
        read_snapshot(tmp_path / "junk")


def test_csv_round_trip_is_exact(tmp_path):
    x = np.random.default_rng(1).standard_normal(20)
    p = write_columns(tmp_path / "a.csv", {"i": list(range(20)), "x": x})
    back = read_csv(p)
    np.testing.assert_array_equal(back["x"], x)
    q = write_csv(tmp_path / "b.csv", ["i", "x"], zip(range(20), x))
    assert p.read_bytes() == q.read_bytes()


def test_manifest_contents(tmp_path):
    out = write_csv(tmp_path / "t.csv", ["a"], [[1]])
    m = json.loads(write_manifest(tmp_path, "demo", "[model]\n", 7, [out], 0.0, {"k": np.float64(1.5)}).read_text())
    assert m["seed"] == 7 and m["outputs"] == ["t.csv"] and m["summary"] == {"k": 1.5}
    assert m["config_sha256"] == config_hash("[model]\n")
    assert {"python", "numpy", "scipy", "matplotlib", "moyalsq"} <= set(m["versions"])


# configuration


def test_empty_config_gives_defaults():
    cfg = parse_config(text="")
    m = cfg.model
    assert (m.theta, m.mass_sq, m.lam, m.cutoff, m.eps, m.eps_prime, m.seed) == (1.0, 1.0, 0.1, 8, 0.05, 0.02, 42)
    assert m.dt == pytest.approx(0.1 / (2 * math.pi * (1 + 4 * 17)))
    assert cfg.run.burn_in == pytest.approx(20 / m.a00)
    assert cfg.run.t_final == pytest.approx(220 / m.a00)


def test_config_round_trip():
    cfg = parse_config(text="[model]\nlambda = 0.3\ncutoff = 5\n[run]\nmode = w\n")
    again = parse_config(text=cfg.emit())
    assert again == cfg and again.emit() == cfg.emit()


@pytest.mark.parametrize(
    "text,key",
    [
        ("[model]\nlambda = -1\n", "model.lambda"),
        ("[model]\ncutoff = two\n", "model.cutoff"),
        ("[model]\nbogus = 1\n", "model.bogus"),
        ("[nowhere]\na = 1\n", "nowhere"),
        ("[run]\nmode = z\n", "run.mode"),
    ],
)
def test_config_errors_name_the_key(text, key):
    with pytest.raises(ConfigError) as e:
        parse_config(text=text)
    assert e.value.key == key


def test_config_file_and_overrides(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[model]\nseed = 3\n")
    cfg = parse_config(p, ["model.seed=9", "diagrams.n_sum=4,8"])
    assert cfg.model.seed == 9 and cfg.diagrams.n_sum == (4, 8)
    with pytest.raises(ConfigError):
        parse_config(p, ["seed=9"])


# command line


def test_cli_emit_config(capsys):
    assert cli.main(["--emit-config", "--set", "model.lambda=0.2"]) == 0
    assert "lambda = 0.2" in capsys.readouterr().out


def test_cli_config_error_exit(tmp_path, capsys):
    assert cli.main(["simulate", "--set", "model.lambda=-1", "--out", str(tmp_path)]) == 2
    assert "model.lambda" in capsys.readouterr().err


def test_cli_numeric_failure_exit(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise NumericalFailure("non-finite field")
        yield

    monkeypatch.setattr(cli, "simulate", boom)
    assert cli.main(["simulate", "--out", str(tmp_path)] + FAST) == 3


def test_cli_check_failure_exit(tmp_path):
    # a free run far too short to resolve the two-point function fails its check
    assert cli.main(["simulate", "--out", str(tmp_path), "--set", "model.lambda=0"] + FAST) == 4


def test_cli_simulate_outputs_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = FAST + ["--set", "model.lambda=0.5", "--set", "output.snapshot_on=true", "--set", "output.formats=csv,json"]
    assert cli.main(["simulate", "--out", str(a)] + args) == 0
    assert cli.main(["--out", str(b), "simulate"] + args) == 0
    for name in ("series.csv", "two_point.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    for name in ("series.png", "two_point.png", "final.msq", "final.msq.json", "summary.json", "manifest.json"):
        assert (a / name).exists()
    man = json.loads((a / "manifest.json").read_text())
    assert man["command"] == "simulate" and "series.csv" in man["outputs"]
    assert parse_config(text=man["config"]).model.lam == 0.5
    # the snapshot feeds the reconstruction
    assert cli.main(["reconstruct", "--out", str(tmp_path / "r"), "--snapshot", str(a / "final.msq"), "--grid", "8"]) == 0
    assert len(read_csv(tmp_path / "r" / "field.csv")["value"]) == 64


def test_cli_free_field(tmp_path):
    assert cli.main(["free-field", "--out", str(tmp_path), "--set", "model.cutoff=2", "--samples", "2000"]) == 0
    rows = read_csv(tmp_path / "free_field.csv")
    assert set(rows["quantity"]) >= {"z", "wick2", "wick3_adjacent", "wick3_full"}


def test_cli_diagrams(tmp_path):
    assert cli.main(["diagrams", "--out", str(tmp_path), "--set", "diagrams.n_sum=2,4"]) == 0
    classes = read_csv(tmp_path / "classes.csv")
    assert len(classes["class_id"]) == 32 and classes["multiplicity"].sum() == 105
    assert set(classes["outcome"]) == {"finite"}
    assert len(read_csv(tmp_path / "reference_items.csv")["item"]) == 34
    assert "rule 5 (8)" in (tmp_path / "traces.txt").read_text()


def test_cli_diagrams_stuck_classes_fail(tmp_path):
    assert cli.main(["diagrams", "--out", str(tmp_path), "--set", "diagrams.beta=-0.05", "--set", "diagrams.n_sum=2"]) == 4
    classes = read_csv(tmp_path / "classes.csv")
    assert list(classes["outcome"]).count("stuck") == 3


def test_cli_inequalities_and_observables(tmp_path):
    assert cli.main(["inequalities", "--out", str(tmp_path / "i"), "--grids", "8", "16"]) == 0
    assert len(read_csv(tmp_path / "i" / "inequalities.csv")["case"]) == 6
    code = cli.main(["observables", "--out", str(tmp_path / "o"), "--set", "model.cutoff=2", "--set", "run.snapshot_stride=1"])
    assert code in (0, 4)
    assert len(read_csv(tmp_path / "o" / "observables.csv")["observable"]) == 4
