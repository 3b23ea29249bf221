import csv
import io

import numpy as np
import pytest
import yaml

from mecoffload import experiments as ex
from mecoffload.cli import main

TINY_AGENT = dict(total_steps=120, batch_size=8, hidden_sizes=[8], eval_channels=2,
                  horizon=10, epsilon_decay_steps=50)


def write_spec(tmp_path, **experiment):
    data = {
        "system": {"n_users": 2, "n_caps": 2},
        "env": {"cap_selection": "maxmin"},
        "agent": TINY_AGENT,
        "experiment": {"eval_draws": 4, "cap_draws": 20, **experiment},
    }
    path = tmp_path / "exp.yaml"
    path.write_text(yaml.safe_dump(data))
    return path


def body(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(lines))))


def header(text):
    return yaml.safe_load("\n".join(l[2:] for l in text.splitlines() if l.startswith("# ")))


def run_cli(args, out):
    assert main([*args, "--out", str(out)]) == 0
    return out.read_bytes()


def test_convergence_rows(tmp_path):
    spec = ex.ExperimentSpec.load(write_spec(tmp_path, strategies=["E-DQN", "R-DQN"]), replicas=3)
    rows = body(ex.run_convergence(spec))
    assert rows[0] == ["strategy", "seed", "iteration", "phi"]
    assert len(rows) - 1 == 2 * 3 * 120
    assert {(r[0], r[1]) for r in rows[1:]} == {(s, str(k)) for s in ("E-DQN", "R-DQN") for k in range(3)}


def test_sweep_rows_and_header(tmp_path):
    spec = ex.ExperimentSpec.load(write_spec(tmp_path, sweep_variable="n_users",
                                             sweep_values=[1, 2, 3],
                                             strategies=["All-Local", "All-CAP"]),
                                  replicas=2, base_seed=7)
    text = ex.run_sweep(spec)
    rows = body(text)
    assert rows[0] == ["strategy", "n_users", "seed", "phi"]
    assert len(rows) - 1 == 2 * 3 * 2
    local = [float(r[3]) for r in rows[1:] if r[0] == "All-Local" and r[2] == "7"]
    assert local == sorted(local) and len(set(local)) == 3
    meta = header(text)
    assert meta["seeds"] == [7, 8] and meta["command"] == "sweep"
    assert meta["system"]["n_users"] == 2 and meta["agent"]["total_steps"] == 120


def test_cap_compare_single_cap(tmp_path):
    path = write_spec(tmp_path, lambdas=[0.5])
    spec = ex.ExperimentSpec.load(path, system={"n_users": 2, "n_caps": 1})
    _, results = ex.run_cap_compare(spec)
    assert np.array_equal(results[0].maxmin, results[0].random)


def test_header_reproduces_spec(tmp_path):
    spec = ex.ExperimentSpec.load(write_spec(tmp_path), replicas=2)
    meta = header(ex.run_eval(spec))
    again = ex.ExperimentSpec.from_dict(meta, base_seed=meta["experiment"]["base_seed"])
    assert ex.run_eval(again) == ex.run_eval(spec)


@pytest.mark.parametrize("command", ["converge", "sweep", "cap-compare", "oracle", "eval"])
def test_cli_reruns_are_byte_identical(tmp_path, command):
    cfg = write_spec(tmp_path, sweep_values=[0.2, 0.8], lambdas=[0.3],
                     strategies=["E-DQN", "All-Local", "All-CAP", "Oracle"])
    args = [command, "--config", str(cfg), "--seed", "5", "--replicas", "2"]
    first = run_cli(args, tmp_path / "a.csv")
    second = run_cli(args, tmp_path / "b.csv")
    assert first == second and first.startswith(b"# ")
    parallel = run_cli([*args, "--jobs", "2"], tmp_path / "c.csv")
    assert parallel == first


def test_cli_stdout(tmp_path, capsys):
    assert main(["eval", "--config", str(write_spec(tmp_path))]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# ") and "All-CAP" in out


def test_cli_errors(tmp_path, capsys):
    assert main(["eval", "--config", str(tmp_path / "missing.yaml")]) == 1
    assert "mecoffload: error" in capsys.readouterr().err
    assert main(["eval", "--seed", "-1"]) == 1
    assert main(["sweep", "--config", str(write_spec(tmp_path)), "--out",
                 str(tmp_path / "no" / "dir.csv")]) == 1


def test_spec_validation():
    with pytest.raises(ValueError):
        ex.ExperimentSpec(sweep_variable="speed")
    with pytest.raises(ValueError):
        ex.ExperimentSpec(sweep_values=[])
    with pytest.raises(ValueError):
        ex.ExperimentSpec(strategies=["Q-learning"])
    with pytest.raises(ValueError):
        ex.ExperimentSpec(replicas=0)


def test_sweep_configs():
    base = ex.ExperimentSpec().config()
    assert ex.sweep_config(base, "bandwidth", 5e6).total_bandwidth_hz == 5e6
    assert ex.sweep_config(base, "cap_capacity", 1e9).cap_cycles_per_sec == (1e9, 1e9)
    assert ex.sweep_config(base, "n_users", 3).n_users == 3
    assert ex.sweep_config(base, "lambda", 0.2).lambda_weight == 0.2
