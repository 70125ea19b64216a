import json
import math
from pathlib import Path

import pytest

from adasgd import bounds
from adasgd.cli import main
from adasgd.config import ExperimentConfig

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SMOKE = {
    "kind": "run", "seed": 0, "T": 64,
    "problem": {"kind": "quadratic", "eigenvalues": [1.0, 0.5, 0.1], "rotation_seed": 2},
    "oracle": {"kind": "exact"},
    "algorithm": {"kind": "adasgd", "eta": 1.0, "gamma": 1.0},
    "w1": 1.0,
}


def write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(p)


def files(d):
    return {p.name: p.read_bytes() for p in sorted(Path(d).iterdir())}


def test_smoke_run(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, SMOKE), "--output-dir", str(out)]) == 0
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert len(lines) == 1 + 64 + 1
    assert lines[0] == "t,f_gap,grad_norm_sq,dist_sq,eta_t,g_sq_accum,noise_norm_sq"
    summary = json.loads((out / "summary.json").read_text())
    assert summary["passed"] is True
    eff = json.loads((out / "effective_config.json").read_text())
    assert eff["seed"] == 0 and eff["delta"] == 0.1 and "output_dir" not in eff
    assert "bounds.json" in files(out)
    assert "final gap" in capsys.readouterr().out


def test_gamma_zero_rejected(tmp_path, capsys):
    bad = {**SMOKE, "algorithm": {"kind": "adasgd", "eta": 1.0, "gamma": 0.0}}
    assert main(["run", write(tmp_path, bad), "--output-dir", str(tmp_path / "o")]) == 2
    assert "algorithm.gamma" in capsys.readouterr().err


def test_unknown_key_rejected(tmp_path, capsys):
    bad = {**SMOKE, "algorithm": {"kind": "adasgd", "eta": 1.0, "gama": 1.0, "gamma": 1.0}}
    assert main(["run", write(tmp_path, bad)]) == 2
    assert "algorithm.gama" in capsys.readouterr().err


def test_parse_error_reports_position(tmp_path, capsys):
    assert main(["run", write(tmp_path, '{"kind": "run",\n  "seed": 1,,}')]) == 2
    err = capsys.readouterr().err
    assert ":2:13:" in err and "JSON" in err


def test_missing_file(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.json")]) == 2


def test_missing_fields_for_kind(tmp_path, capsys):
    assert main(["run", write(tmp_path, {"kind": "coverage", "seed": 1, "T": 10})]) == 2
    assert "theorem" in capsys.readouterr().err


def test_assertion_failure_status(tmp_path, capsys):
    cfg = {
        "kind": "ratefit", "seed": 0, "T_grid": [64, 128, 256, 512, 1024, 4096], "trials": 2,
        "problem": {"kind": "quadratic", "eigenvalues": [1.0, 0.5]},
        "oracle": {"kind": "exact"}, "algorithm": {"kind": "adasgd", "eta": 1.0, "gamma": 1.0},
        "w1": 1.0, "expect_slope": [0.0, 1.0],
    }
    assert main(["run", write(tmp_path, cfg), "--output-dir", str(tmp_path / "o")]) == 1
    assert json.loads((tmp_path / "o" / "summary.json").read_text())["passed"] is False
    assert "FAIL" in capsys.readouterr().out


def test_reproducible_bytes(tmp_path):
    cfg = {**SMOKE, "oracle": {"kind": "bounded_affine", "sigma0": 1.0, "sigma1": 0.5}, "T": 200}
    path = write(tmp_path, cfg)
    assert main(["run", path, "--output-dir", str(tmp_path / "a")]) == 0
    assert main(["run", path, "--output-dir", str(tmp_path / "b")]) == 0
    assert files(tmp_path / "a") == files(tmp_path / "b")
    assert main(["run", path, "--seed", "1", "--output-dir", str(tmp_path / "c")]) == 0
    assert files(tmp_path / "c")["trajectory.csv"] != files(tmp_path / "a")["trajectory.csv"]
    assert json.loads(files(tmp_path / "c")["effective_config.json"])["seed"] == 1


def test_output_root_env(tmp_path, monkeypatch):
    monkeypatch.setenv("ADASGD_OUTPUT_ROOT", str(tmp_path / "root"))
    assert main(["run", write(tmp_path, SMOKE, "smoke.json")]) == 0
    assert (tmp_path / "root" / "smoke" / "trajectory.csv").exists()


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_validate(path):
    ExperimentConfig.model_validate_json(path.read_text())


@pytest.mark.parametrize("name", ["lowerbound", "concentration_lemma14", "smoke_noiseless"])
def test_shipped_configs_run(name, tmp_path):
    assert main(["run", str(CONFIGS / f"{name}.json"), "--output-dir", str(tmp_path)]) == 0


def test_small_coverage_config(tmp_path):
    cfg = {
        "kind": "coverage", "theorem": "thm1", "seed": 3, "T": 128, "trials": 100, "delta": 0.1,
        "problem": {"kind": "nonconvex_sine", "dim": 3}, "oracle": {"kind": "bounded_affine", "sigma0": 1.0},
        "algorithm": {"kind": "adasgd", "eta": 1.0, "gamma": 1.0}, "w1": 1.0,
    }
    out = tmp_path / "o"
    assert main(["run", write(tmp_path, cfg), "--output-dir", str(out)]) == 0
    s = json.loads((out / "summary.json").read_text())
    assert s["violations"] <= 0.1 * 100 + 3 * math.sqrt(0.09 * 100)
    assert len((out / "trials.csv").read_text().splitlines()) == 101


def test_jobs_do_not_change_outputs(tmp_path, monkeypatch):
    monkeypatch.setattr("adasgd.verify.common.CHUNK_BUDGET", 40 * 65)  # 40 trials per chunk
    cfg = {
        "kind": "coverage", "theorem": "thm1", "seed": 5, "T": 64, "trials": 150, "delta": 0.1,
        "problem": {"kind": "quadratic", "eigenvalues": [1.0, 0.3]}, "oracle": {"kind": "bounded_affine", "sigma0": 1.0},
        "algorithm": {"kind": "adasgd", "eta": 1.0, "gamma": 1.0}, "w1": 1.0,
    }
    path = write(tmp_path, cfg)
    assert main(["run", path, "--output-dir", str(tmp_path / "j1")]) == 0
    assert main(["run", path, "--jobs", "2", "--output-dir", str(tmp_path / "j2")]) == 0
    assert files(tmp_path / "j1") == files(tmp_path / "j2")


def bounds_json(capsys, *flags):
    assert main(["bounds", "--json", *flags]) == 0
    return json.loads(capsys.readouterr().out)


def test_bounds_c1_example(capsys):
    d = bounds_json(capsys, "--beta", "1", "--eta", "1", "--gamma", "2", "--T", "2", "--delta", "0.5")
    assert d["c1"] == pytest.approx(math.log2(17), rel=1e-12)
    assert main(["bounds", "--beta", "1", "--eta", "1", "--gamma", "2", "--T", "2", "--delta", "0.5"]) == 0
    assert "c1                   4.08746" in capsys.readouterr().out


def test_bounds_match_library(capsys):
    d = bounds_json(capsys, "--beta", "2", "--sigma0", "0.5", "--sigma1", "1", "--eta", "0.3", "--gamma", "1.5",
                    "--T", "1000", "--delta", "0.1", "--delta1", "2", "--d1", "1", "--alpha", "1")
    p = bounds.BoundInputs(2, 0.5, 1, 0.3, 1.5, 1000, 0.1, 2, 1, 1)
    assert d["f_bound"] == bounds.f_bound(p) and d["d_bound_sq"] == bounds.d_bound_sq(p)
    assert d["known_f_bound"] == bounds.known_f_bound(p)
    assert "known_stepsize" in d


def test_bounds_zero_noise(capsys):
    d = bounds_json(capsys, "--beta", "0", "--eta", "1", "--gamma", "1", "--T", "100", "--delta", "0.1")
    assert d["f_bound"] == 0 and d["c1"] == 0 and d["nonconvex_rate_rhs"] == 0


def test_bounds_subgaussian_flag(capsys):
    flags = ["--beta", "1", "--sigma0", "1", "--sigma1", "0.5", "--eta", "1", "--gamma", "1", "--T", "100",
             "--delta", "0.1", "--delta1", "1"]
    plain = bounds_json(capsys, *flags)
    sub = bounds_json(capsys, *flags, "--subgaussian")
    assert sub["f_bound"] >= plain["f_bound"] and sub["c1"] >= plain["c1"]


def test_bounds_invalid_flags(capsys):
    assert main(["bounds", "--beta", "1", "--eta", "1", "--gamma", "0", "--T", "5", "--delta", "0.1"]) == 2
    assert main(["bounds", "--beta", "-1", "--eta", "1", "--gamma", "1", "--T", "5", "--delta", "0.1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["bounds", "--beta", "x"])
    assert exc.value.code == 2
