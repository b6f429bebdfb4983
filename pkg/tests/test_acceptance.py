"""Acceptance suite: one test per primary criterion, each printing one PASS/FAIL line."""

import copy
import math
import random
from functools import lru_cache

from dualmem import io
from dualmem.cluster import SimilarityGraph, maximal_cliques
from dualmem.embed import cosine, embed_text
from dualmem.memstore import MemoryStore, RetrievalConfig, retention_score
from dualmem.driftsim import build_initial_bank, evaluate_suite, generate_app, generate_tasks
from dualmem.driftsim.scenarios import SIGMAS, ablation_scenario, adaptation_scenario
from dualmem.stationary import THETA_DUP, Outcome, PatchDescriptor, upsert_element
from oracles import NaiveStore, aligned_cluster, brute_force_cliques, replay_equivalent
from test_memstore import KEYS
from test_procedural import check_round_trip_and_soundness


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    assert ok, detail


@lru_cache(maxsize=None)
def ablation(sigma):
    return evaluate_suite(ablation_scenario(sigma), 4)


def test_criterion_1_retention(capsys):
    cases = [((0, 1), math.exp(0)), ((0, 9), 1.0), ((1, 1), 1 / math.e), ((4, 2), 1 / math.e ** 2)]
    worst = max(abs(retention_score(*args) - want) for args, want in cases)
    report(capsys, 1, worst <= 1e-12, f"retention formula, max error {worst:.1e} (tol 1e-12)")


def test_criterion_2_algorithm_oracle(capsys):
    rng = random.Random(2024)
    mismatches = 0
    for _ in range(1000):
        store, naive = MemoryStore(), NaiveStore(embed_text)
        for _ in range(rng.randint(1, 20)):
            if rng.random() < 0.45:
                key = rng.choice(KEYS)
                store.insert(key, None)
                naive.insert(key)
            else:
                n = rng.randint(1, 5)
                k = rng.randint(1, n)
                floor = rng.choice([None, None, 0.3, 0.6])
                q = rng.choice(KEYS)
                got = [e.id for e in store.retrieve(q, RetrievalConfig(n, k, floor))]
                if got != naive.retrieve(q, n, k, floor):
                    mismatches += 1
                    break
            rows, counter = naive.metadata()
            if store.global_counter != counter or [
                (e.id, e.created_seq, e.last_access, e.count) for e in store
            ] != rows:
                mismatches += 1
                break
    report(capsys, 2, mismatches == 0, f"two-stage retrieval vs reference, {mismatches}/1000 scripts differ")


def test_criterion_3_clique_oracle(capsys):
    rng = random.Random(99)
    bad = 0
    for i in range(200):
        n = rng.randint(0, 12)
        p = (0.2, 0.5, 0.8)[i % 3]
        edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p]
        g = SimilarityGraph.from_pairs(range(n), edges)
        got = {frozenset(c.member_ids) for c in maximal_cliques(g)}
        bad += got != brute_force_cliques(range(n), edges)
    report(capsys, 3, bad == 0, f"maximal cliques vs brute force, {bad}/200 graphs differ")


def test_criterion_4_stationary_consolidation(capsys):
    rng = random.Random(4)
    descs = ["click send to send mail", "click gear to open settings", "click star to save item"]
    unsound = 0
    for _ in range(500):
        s = MemoryStore()
        for _ in range(rng.randint(1, 15)):
            feats = [rng.choice([-1.0, 0.0, 1.0, 2.0]) for _ in range(4)]
            if not any(feats):
                feats[0] = 1.0
            upsert_element(s, rng.choice(descs), PatchDescriptor(feats))
        for e in s:
            vs = e.payload.variants
            unsound += any(cosine(a.descriptor.features, b.descriptor.features) >= THETA_DUP
                           for i, a in enumerate(vs) for b in vs[i + 1:])
    s = MemoryStore()
    routing = [
        upsert_element(s, "click send to send mail", PatchDescriptor([1, 0, 0, 0])),
        upsert_element(s, "click send to send mail", PatchDescriptor([1, 0, 0, 0])),
        upsert_element(s, "click send to send mail", PatchDescriptor([0, 1, 0, 0])),
        upsert_element(s, "click gear to open settings", PatchDescriptor([1, 0, 0, 0])),
    ]
    want = [Outcome.CREATED, Outcome.DISCARDED, Outcome.APPENDED, Outcome.CREATED]
    ok = unsound == 0 and routing == want
    report(capsys, 4, ok, f"dedup sound in {500 - unsound}/500 sequences; routing {[o.value for o in routing]}")


def test_criterion_5_ablation_direction(capsys):
    rows = {}
    ordered = True
    for sigma in SIGMAS:
        res = ablation(sigma)
        sr = {a: res.mean_success(a) for a in ("none", "stationary", "procedural", "both")}
        rows[sigma] = sr
        ordered &= sr["none"] <= sr["stationary"] and sr["none"] <= sr["procedural"] <= sr["both"]
    gap = rows[0.3]["both"] - rows[0.3]["none"]
    detail = f"SR(both)-SR(none) at sigma 0.3 = {gap:.1f}pp (need >= 10); ordering holds: {ordered}; " + "; ".join(
        f"sigma {s}: " + " ".join(f"{a}={v:.1f}" for a, v in sr.items()) for s, sr in rows.items()
    )
    report(capsys, 5, gap >= 10 and ordered, detail)


def test_criterion_6_continual_adaptation(capsys):
    res = evaluate_suite(adaptation_scenario(), 3)
    sr, proc, stat = (res.series("both", c) for c in ("success_rate", "proc_pct", "stat_pct"))
    sr_ok = all(b >= a for a, b in zip(sr, sr[1:]))

    def falling(xs):
        return xs[0] == 100.0 and all(b is not None and b < a for a, b in zip(xs, xs[1:]))

    ok = sr_ok and falling(proc) and falling(stat)
    report(capsys, 6, ok, f"SR {sr} non-decreasing={sr_ok}; Proc% {proc}; Stat% {stat}")


def test_criterion_7_determinism_and_persistence(capsys, tmp_path):
    a, b = evaluate_suite(ablation_scenario(0.3), 2), evaluate_suite(ablation_scenario(0.3), 2)
    same_run = a.to_csv() == b.to_csv() and a.transcripts() == b.transcripts()

    app = generate_app(ablation_scenario(0.3).app, 7)
    _, demos = generate_tasks(app, 30, 8, 3, 2)
    bank = build_initial_bank(app, demos)
    evolved = copy.deepcopy(bank)
    evolved.procedural.retrieve("open photos then type tulips in photos")
    first, second = tmp_path / "first.jsonl", tmp_path / "second.jsonl"
    io.save_bank(evolved, first)
    io.save_bank(io.load_bank(first), second)
    same_bytes = first.read_bytes() == second.read_bytes()

    rng = random.Random(7)
    replays = sum(replay_equivalent(rng, tmp_path) for _ in range(100))
    ok = same_run and same_bytes and replays == 100
    report(capsys, 7, ok, f"identical CSV+transcripts: {same_run}; save-load-save identical: {same_bytes}; "
                          f"replay-equivalent banks: {replays}/100")


def test_criterion_8_procedural_round_trip(capsys):
    rng = random.Random(8)
    failures = 0
    for _ in range(50):
        try:
            check_round_trip_and_soundness(aligned_cluster(rng))
        except (AssertionError, ValueError):
            failures += 1
    report(capsys, 8, failures == 0, f"round trip and placeholder soundness, {50 - failures}/50 clusters hold")
