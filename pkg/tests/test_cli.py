import io
import json

import pytest

from cmetric.cli import main
from cmetric.ingest import parse_trajectories


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def mixed_files(tmp_path):
    traj, truth = tmp_path / "t.csv", tmp_path / "truth.json"
    assert run("generate", "--scenario", "mixed", "--seed", "3", "--out", str(traj),
               "--truth", str(truth))[0] == 0
    return traj, truth


def test_generate_analyze_eval(mixed_files, tmp_path):
    traj, truth = mixed_files
    rep, res = tmp_path / "r.json", tmp_path / "e.json"
    assert run("analyze", "--input", str(traj), "--out", str(rep))[0] == 0
    doc = json.loads(rep.read_text())
    labels = {a["agent_id"]: a["global_behavior"] for a in doc["agents"]}
    assert labels["4"] == labels["5"] == "aggressive"
    code, out, _ = run("eval", "--report", str(rep), "--truth", str(truth), "--out", str(res))
    assert code == 0
    assert out.split()[:4] == ["style", "mean", "TDE", "(s)"]
    assert "OT/SLC" in out and "W" in out
    assert json.loads(res.read_text())["frame_rate_hz"] == 10.0


def test_analyze_stdout_and_determinism(mixed_files):
    traj, _ = mixed_files
    first, second = run("analyze", "--input", str(traj)), run("analyze", "--input", str(traj))
    assert first[0] == 0 and first[1] == second[1]


def test_flags_and_config_file_precedence(mixed_files, tmp_path):
    traj, _ = mixed_files
    cfg = tmp_path / "c.toml"
    cfg.write_text("mu = 14.0\nwindow = 13\n")
    code, out, _ = run("analyze", "--input", str(traj), "--config", str(cfg), "--window", "9",
                       "--interval", "10", "150", "--fps", "20")
    params = json.loads(out)["parameters"]
    assert code == 0
    assert (params["mu"], params["window"], params["interval"], params["frame_rate_hz"]) == \
        (14.0, 9, [10, 150], 20.0)


def test_json_trajectories(tmp_path):
    traj = tmp_path / "t.json"
    assert run("generate", "--scenario", "weaving_sinusoid", "--out", str(traj), "--fps", "25")[0] == 0
    assert parse_trajectories(traj.read_text(), "json").frame_rate_hz == 25.0
    code, out, _ = run("analyze", "--input", str(traj))
    assert code == 0 and json.loads(out)["parameters"]["frame_rate_hz"] == 25.0


def test_export_series_and_graph(mixed_files):
    traj, _ = mixed_files
    for series in ("closeness", "degree", "sle0", "sle1", "sie0", "sie1"):
        code, out, _ = run("export", "--input", str(traj), "--series", series, "--agent", "5")
        lines = out.splitlines()
        assert code == 0 and lines[0] == "frame,value" and len(lines) == 201
    code, out, _ = run("export", "--input", str(traj), "--graph", "0")
    g = json.loads(out)
    assert code == 0 and g["frame"] == 0 and all(len(e) == 3 for e in g["edges"])


@pytest.mark.parametrize("args, code", [
    (("analyze", "--input", "{missing}"), 3),
    (("analyze", "--input", "{empty}"), 2),
    (("analyze", "--input", "{bad}"), 2),
    (("analyze", "--input", "{traj}", "--window", "4"), 4),
    (("analyze", "--input", "{traj}", "--mu", "-1"), 4),
    (("analyze", "--input", "{traj}", "--config", "{missing}"), 4),
    (("analyze", "--input", "{traj}", "--out", "{tmp}/no/such/dir/r.json"), 3),
    (("export", "--input", "{traj}", "--series", "sle0"), 2),
    (("export", "--input", "{traj}", "--series", "sle0", "--agent", "zz"), 2),
    (("export", "--input", "{traj}", "--graph", "999"), 2),
    (("eval", "--report", "{truth}", "--truth", "{truth}"), 2),
    (("eval", "--report", "{report}", "--truth", "{truth}", "--fps", "30"), 4),
])
def test_exit_codes(mixed_files, tmp_path, args, code):
    traj, truth = mixed_files
    empty, bad, report = tmp_path / "e.csv", tmp_path / "b.csv", tmp_path / "r.json"
    empty.write_text("")
    bad.write_text("0,0,0,0\n0,0,1,1\n")
    run("analyze", "--input", str(traj), "--out", str(report))
    names = dict(missing=tmp_path / "nope.csv", empty=empty, bad=bad, traj=traj, truth=truth,
                 report=report, tmp=tmp_path)
    result = run(*(a.format(**names) for a in args))
    assert result[0] == code, result[2]
    assert result[2].startswith("cmetric:")
