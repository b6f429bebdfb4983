import copy
import random

import pytest

from dualmem import io
from dualmem.driftsim import AgentConfig, AppSpec, DriftOp
from dualmem.driftsim.scenarios import ablation_scenario, adaptation_scenario
from dualmem.driftsim.suite import Scenario
from dualmem.embed import HashEmbedder
from dualmem.errors import CorruptRecord, IoFailure, ProviderMismatch, UnknownFormatVersion
from dualmem.memstore import MemoryStore
from dualmem.procedural import Action, ActionKind, Trajectory
from dualmem.stationary import PatchDescriptor, Triplet, upsert_element
from oracles import random_bank, replay_equivalent


def lines(path):
    return path.read_text().splitlines()


def test_empty_store_header_only(tmp_path):
    p = tmp_path / "b.jsonl"
    io.save_bank(MemoryStore(), p)
    (only,) = lines(p)
    assert '"kind":"header"' in only and '"store":"procedural"' in only
    proc, stat = io.load_bank(p)
    assert len(proc) == 0 and stat is None


def test_save_load_save_identical(tmp_path):
    proc, stat = random_bank(random.Random(1), 40)
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    size = io.save_bank({"procedural": proc, "stationary": stat}, a)
    assert size == a.stat().st_size
    io.save_bank(io.load_bank(a), b)
    assert a.read_bytes() == b.read_bytes()


def test_blob_round_trip(tmp_path):
    s = MemoryStore()
    blob = bytes(range(256))
    upsert_element(s, "click gear to open settings", PatchDescriptor([0.1, 0.2], blob))
    p = tmp_path / "s.jsonl"
    io.save_bank(s, p)
    _, stat = io.load_bank(p)
    assert stat.get(0).payload.variants[0].descriptor.blob == blob


def test_dim_mismatch(tmp_path):
    p = tmp_path / "b.jsonl"
    io.save_bank(MemoryStore(), p)
    with pytest.raises(ProviderMismatch):
        io.load_bank(p, {"hashbag-v1": HashEmbedder(dim=32)})
    with pytest.raises(ProviderMismatch):
        io.load_bank(p, {"other": HashEmbedder()})


def test_truncated_last_line(tmp_path):
    proc, stat = random_bank(random.Random(2), 30)
    p = tmp_path / "b.jsonl"
    io.save_bank((proc, stat), p)
    data = p.read_bytes()
    n = data.count(b"\n")
    p.write_bytes(data[:-5])
    with pytest.raises(CorruptRecord) as info:
        io.load_bank(p)
    assert info.value.line == n


def test_strict_schema(tmp_path):
    proc, _ = random_bank(random.Random(3), 30)
    p = tmp_path / "b.jsonl"
    io.save_bank(proc, p)
    text = lines(p)
    assert len(text) > 1
    for bad in (text[1].replace('"kind":"proc_entry"', '"kind":"mystery"'),
                text[1].replace('"count":', '"extra":1,"count":'),
                text[1].replace('"origin":', '"orig":')):
        p.write_text("\n".join([text[0], bad] + text[2:]) + "\n")
        with pytest.raises(CorruptRecord) as info:
            io.load_bank(p)
        assert info.value.line == 2
    p.write_text("\n".join([text[0].replace('"format_version":1', '"format_version":9')] + text[1:]) + "\n")
    with pytest.raises(UnknownFormatVersion):
        io.load_bank(p)
    p.write_text("{not json\n")
    with pytest.raises(CorruptRecord):
        io.load_bank(p)


def test_missing_file(tmp_path):
    with pytest.raises(IoFailure):
        io.load_bank(tmp_path / "nope.jsonl")


def test_trajectories_round_trip(tmp_path):
    trajs = {"a": Trajectory("install maps", [Action(ActionKind.CLICK, "store"),
                                              Action(ActionKind.TYPE, "box", "maps", "AppName"),
                                              Action(ActionKind.STOP, argument="done")]),
             "b": Trajectory("call mom", [Action(ActionKind.PRESS_HOME)], success=False)}
    p = tmp_path / "t.jsonl"
    io.save_trajectories(trajs, p)
    assert io.load_trajectories(p) == trajs
    assert sorted(io.load_instructions(p)) == [("a", "install maps"), ("b", "call mom")]


def test_instructions_and_clusters_round_trip(tmp_path):
    p, q = tmp_path / "i.jsonl", tmp_path / "c.jsonl"
    io.save_instructions([(1, "open mail"), (2, "check weather")], p)
    assert io.load_instructions(p) == [(1, "open mail"), (2, "check weather")]
    io.save_clusters([[1, 2], [3]], q)
    assert io.load_clusters(q) == [[1, 2], [3]]
    with pytest.raises(CorruptRecord):
        io.load_clusters(p)


def test_triplets_round_trip(tmp_path):
    t = Triplet("s0", Action(ActionKind.CLICK, "gear"), (5.0, 5.0), (0.0, 0.0, 10.0, 10.0),
                PatchDescriptor([0.5, -0.25], b"\x01"), "click gear to open settings", "s1")
    p = tmp_path / "t.jsonl"
    io.save_triplets([t], p)
    (back,) = io.load_triplets(p)
    assert back == t


@pytest.mark.parametrize("scenario", [
    ablation_scenario(0.3), adaptation_scenario(),
    Scenario(name="x", app=AppSpec(4, 5, 1), drift={2: (DriftOp.workflow(1),)}, bank_path="b.jsonl",
             bank_seed=3, agents=(AgentConfig("a", lam=0.5, hint_floor=0.6),)),
])
def test_scenario_round_trip(tmp_path, scenario):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    io.save_scenario(scenario, a)
    back = io.load_scenario(a)
    assert back == scenario
    io.save_scenario(back, b)
    assert a.read_bytes() == b.read_bytes()


def test_loaded_bank_is_behaviorally_equivalent(tmp_path):
    rng = random.Random(4)
    assert all(replay_equivalent(rng, tmp_path) for _ in range(20))


def test_saving_does_not_touch_store(tmp_path):
    proc, stat = random_bank(random.Random(5))
    before = copy.deepcopy((proc, stat))
    io.save_bank((proc, stat), tmp_path / "b.jsonl")
    assert [vars(e)["count"] for e in proc] == [vars(e)["count"] for e in before[0]]
    assert proc.global_counter == before[0].global_counter
