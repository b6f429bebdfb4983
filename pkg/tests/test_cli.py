import pytest

from dualmem import io
from dualmem.cli import main
from dualmem.procedural import Action, ActionKind, Trajectory
from dualmem.stationary import PatchDescriptor, Triplet


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def install(app):
    return Trajectory(f"install {app}", [Action(ActionKind.CLICK, "store"), Action(ActionKind.CLICK, "search field"),
                                         Action(ActionKind.TYPE, "search field", app, "AppName"),
                                         Action(ActionKind.CLICK, "install button")])


def test_memory_pipeline(tmp_path, capsys):
    bank = tmp_path / "bank.jsonl"
    assert run(capsys, "bank", "init", "--bank", bank)[0] == 0
    assert run(capsys, "bank", "init", "--bank", bank)[0] != 0
    assert run(capsys, "bank", "init", "--bank", bank, "--force")[0] == 0

    trajs = tmp_path / "t.jsonl"
    io.save_trajectories({"a": install("maps"), "b": install("zoom"), "c": install("slack")}, trajs)
    clusters = tmp_path / "c.jsonl"
    code, out, _ = run(capsys, "cluster", "--in", trajs, "--out", clusters, "--tau", "0.3")
    assert code == 0 and "3 instructions -> 1 clusters" in out
    code, out, _ = run(capsys, "abstract", "--trajectories", trajs, "--clusters", clusters, "--bank", bank)
    assert code == 0 and "1 workflows" in out

    trips = tmp_path / "x.jsonl"
    t = Triplet("s0", Action(ActionKind.CLICK, "gear"), (5.0, 5.0), (0.0, 0.0, 10.0, 10.0),
                PatchDescriptor([1.0, 0.0]), "click gear to open settings", "s1")
    io.save_triplets([t, t], trips)
    code, out, _ = run(capsys, "ingest", "--bank", bank, "--triplets", trips)
    assert code == 0 and "created=1 appended=0 discarded=1" in out

    code, out, _ = run(capsys, "retrieve", "--bank", bank, "--query", "install maps", "--dry-run")
    assert code == 0 and out.splitlines()[1].startswith("0\t")
    assert io.load_bank(bank).procedural.global_counter == 0
    code, out, _ = run(capsys, "retrieve", "--bank", bank, "--query", "install maps")
    assert code == 0 and "Type [AppName] into search field" in out
    assert io.load_bank(bank).procedural.global_counter == 1
    code, out, _ = run(capsys, "retrieve", "--bank", bank, "--query", "open settings", "--store", "stationary")
    assert code == 0 and "click gear to open settings" in out

    code, out, _ = run(capsys, "bank", "inspect", "--bank", bank)
    assert code == 0 and "[procedural] entries=1 c_global=1" in out
    code, out, _ = run(capsys, "bank", "stats", "--bank", bank, "--bins", "2")
    assert code == 0 and "[stationary] entries=1" in out


def test_simulate_and_report(tmp_path, capsys):
    scen = tmp_path / "s.jsonl"
    assert run(capsys, "scenario", "--preset", "adaptation", "--out", scen)[0] == 0
    csv_a, csv_b = tmp_path / "a.csv", tmp_path / "b.csv"
    tr = tmp_path / "tr.jsonl"
    assert run(capsys, "simulate", "--scenario", scen, "--iterations", 1, "--out", csv_a, "--transcripts", tr)[0] == 0
    assert run(capsys, "simulate", "--scenario", scen, "--iterations", 1, "--out", csv_b)[0] == 0
    assert csv_a.read_bytes() == csv_b.read_bytes()
    assert tr.read_text().count("\n") == 60
    code, out, _ = run(capsys, "report", "--in", csv_a)
    assert code == 0 and out.splitlines()[1].split()[:2] == ["both", "2"]


@pytest.mark.parametrize("argv, code", [
    ([], 2),
    (["frobnicate"], 2),
    (["retrieve", "--bank", "x.jsonl"], 2),
    (["bank", "inspect", "--bank", "missing.jsonl"], 4),
])
def test_exit_codes(tmp_path, capsys, monkeypatch, argv, code):
    monkeypatch.chdir(tmp_path)
    assert run(capsys, *argv)[0] == code


def test_data_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"kind":"header"')
    assert run(capsys, "bank", "inspect", "--bank", bad)[0] == 3
    bank = tmp_path / "b.jsonl"
    run(capsys, "bank", "init", "--bank", bank)
    code, _, err = run(capsys, "retrieve", "--bank", bank, "--query", "x", "-N", 1, "-K", 2)
    assert code == 3 and "exceeds" in err
