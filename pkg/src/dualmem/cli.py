"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 data or format error, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

from . import io as dio
from . import procedural, stationary
from .cluster import DEFAULT_TAU, cluster_instructions
from .errors import DataError, DualMemError
from .memstore import INITIAL, MemoryStore, RetrievalConfig
from .stationary import K_ICONS, THETA_DUP, THETA_MATCH

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4
DEFAULT_N = RetrievalConfig().n_candidates
DEFAULT_K = RetrievalConfig().k_results


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(path: str) -> dio.BankStores:
    return dio.load_bank(path)


def _store(bank: dio.BankStores, which: str) -> MemoryStore:
    store = getattr(bank, which)
    return store if store is not None else MemoryStore()


def _save(bank: dio.BankStores, path: str) -> int:
    return dio.save_bank(bank, path)


# ---------------------------------------------------------------- bank


def cmd_bank_init(args) -> int:
    if Path(args.bank).exists() and not args.force:
        print(f"{args.bank} exists (use --force to overwrite)", file=sys.stderr)
        return EXIT_RUNTIME
    bank = dio.BankStores(
        MemoryStore() if args.store in ("procedural", "both") else None,
        MemoryStore() if args.store in ("stationary", "both") else None,
    )
    size = _save(bank, args.bank)
    print(f"wrote {args.bank} ({size} bytes)")
    return EXIT_OK


def cmd_bank_inspect(args) -> int:
    bank = _load(args.bank)
    for which in ("procedural", "stationary"):
        store = getattr(bank, which)
        if store is None:
            continue
        print(f"[{which}] entries={len(store)} c_global={store.global_counter} provider={store.provider_name}")
        for e in store:
            meta = f"id={e.id} seq={e.created_seq} t={e.last_access} n={e.count} {e.origin}"
            if which == "procedural":
                print(f"  {meta}  {e.key}")
                for step in e.payload.steps:
                    print(f"      - {step}")
            else:
                print(f"  {meta}  {e.key}  variants={len(e.payload.variants)}")
    return EXIT_OK


def cmd_bank_stats(args) -> int:
    bank = _load(args.bank)
    for which in ("procedural", "stationary"):
        store = getattr(bank, which)
        if store is None:
            continue
        s = store.stats(args.bins)
        print(f"[{which}] entries={s.count} c_global={s.c_global}")
        for lo, hi, n in zip(s.bin_edges, s.bin_edges[1:], s.histogram):
            print(f"  R in [{lo:.2f}, {hi:.2f}{']' if hi == 1.0 else ')'}: {n}")
    return EXIT_OK


# ---------------------------------------------------------------- memory building


def cmd_ingest(args) -> int:
    bank = _load(args.bank) if Path(args.bank).exists() else dio.BankStores(None, None)
    store = _store(bank, "stationary")
    triplets = dio.load_triplets(args.triplets)
    report = stationary.ingest_triplets(store, triplets, args.theta_match, args.theta_dup, args.origin)
    _save(bank._replace(stationary=store), args.bank)
    print(f"created={report.created} appended={report.appended} discarded={report.discarded} errors={len(report.errors)}")
    for idx, msg in report.errors:
        print(f"  triplet {idx}: {msg}", file=sys.stderr)
    return EXIT_OK


def cmd_cluster(args) -> int:
    instructions = dio.load_instructions(args.inp)
    clusters = cluster_instructions(instructions, tau=args.tau)
    dio.save_clusters([sorted(c) for c in clusters], args.out)
    print(f"{len(instructions)} instructions -> {len(clusters)} clusters")
    return EXIT_OK


def cmd_abstract(args) -> int:
    trajectories = dio.load_trajectories(args.trajectories)
    clusters = dio.load_clusters(args.clusters)
    missing = sorted({m for c in clusters for m in c if m not in trajectories}, key=str)
    if missing:
        raise DataError(f"clusters reference unknown trajectory ids {missing}")
    bank = _load(args.bank) if Path(args.bank).exists() else dio.BankStores(None, None)
    store = _store(bank, "procedural")
    made = 0
    for members in clusters:
        for wf in procedural.abstract_workflows([trajectories[m] for m in members]):
            procedural.record_workflow(store, wf, args.origin)
            print(f"{wf.name}  ({len(wf.steps)} steps)")
            made += 1
    _save(bank._replace(procedural=store), args.bank)
    print(f"{made} workflows from {len(clusters)} clusters")
    return EXIT_OK


def cmd_retrieve(args) -> int:
    bank = _load(args.bank)
    store = getattr(bank, args.store)
    if store is None:
        raise DataError(f"{args.bank} holds no {args.store} store")
    config = RetrievalConfig(args.N, args.K, args.min_similarity)
    if args.dry_run:
        print("id\tsimilarity\tretention\tcreated_seq\tkey")
        for c in store.candidates(args.query, config):
            print(f"{c.entry.id}\t{c.similarity:.6f}\t{c.retention:.6f}\t{c.entry.created_seq}\t{c.entry.key}")
        return EXIT_OK
    if args.store == "procedural":
        for e in store.retrieve(args.query, config):
            print(f"{e.id}\t{e.key}")
            for step in e.payload.steps:
                print(f"    - {step}")
    else:
        for hit in stationary.retrieve_elements(store, args.query, config, args.variants):
            print(f"{hit.record_id}\tvariant {hit.variant_index}\t{hit.description}")
    _save(bank, args.bank)
    return EXIT_OK


# ---------------------------------------------------------------- simulation


def cmd_scenario(args) -> int:
    from .driftsim import scenarios

    if args.preset == "ablation":
        scenario = scenarios.ablation_scenario(args.sigma, args.seed)
    else:
        scenario = scenarios.adaptation_scenario(args.seed)
    dio.save_scenario(scenario, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .driftsim import evaluate_suite

    scenario = dio.load_scenario(args.scenario)
    overrides = {k: v for k, v in (("seed", args.seed), ("tau", args.tau), ("theta_match", args.theta_match),
                                   ("theta_dup", args.theta_dup)) if v is not None}
    agent_over = {k: v for k, v in (("lam", args.lam), ("k_icons", args.k_icons)) if v is not None}
    if agent_over:
        overrides["agents"] = tuple(dataclasses.replace(a, **agent_over) for a in scenario.agents)
    scenario = dataclasses.replace(scenario, **overrides)
    result = evaluate_suite(scenario, args.iterations)
    Path(args.out).write_text(result.to_csv())
    if args.transcripts:
        Path(args.transcripts).write_text(result.transcripts())
    print(f"wrote {args.out} ({len(result.rows)} rows)")
    return EXIT_OK


def _num(text: str):
    return None if text == "" else float(text)


def cmd_report(args) -> int:
    with open(args.inp, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise DataError(f"{args.inp} has no rows")
    agents: dict[str, list[dict]] = {}
    for row in rows:
        agents.setdefault(row["agent"], []).append(row)
    print(f"{'agent':<12}{'passes':>7}{'mean SR':>9}{'first SR':>10}{'last SR':>9}{'last Proc%':>12}{'last Stat%':>12}")
    for name, rs in agents.items():
        srs = [float(r["success_rate"]) for r in rs]
        tasks = sum(int(r["tasks"]) for r in rs)
        mean = 100.0 * sum(int(r["successes"]) for r in rs) / tasks if tasks else 0.0
        proc, stat = _num(rs[-1]["proc_pct"]), _num(rs[-1]["stat_pct"])
        fmt = lambda v: "-" if v is None else f"{v:.1f}"  # noqa: E731
        print(f"{name:<12}{len(rs):>7}{mean:>9.1f}{srs[0]:>10.1f}{srs[-1]:>9.1f}{fmt(proc):>12}{fmt(stat):>12}")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dualmem", description="Procedural and stationary memory for GUI agents.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    bank = sub.add_parser("bank", help="create or examine a bank file")
    bsub = bank.add_subparsers(dest="action", required=True, parser_class=_Parser)
    b = bsub.add_parser("init", help="write an empty bank")
    b.add_argument("--bank", required=True)
    b.add_argument("--store", choices=("procedural", "stationary", "both"), default="both")
    b.add_argument("--force", action="store_true")
    b.set_defaults(func=cmd_bank_init)
    b = bsub.add_parser("inspect", help="list entries")
    b.add_argument("--bank", required=True)
    b.set_defaults(func=cmd_bank_inspect)
    b = bsub.add_parser("stats", help="entry counts and retention histogram")
    b.add_argument("--bank", required=True)
    b.add_argument("--bins", type=int, default=10)
    b.set_defaults(func=cmd_bank_stats)

    s = sub.add_parser("ingest", help="fold click triplets into stationary memory")
    s.add_argument("--bank", required=True)
    s.add_argument("--triplets", required=True)
    s.add_argument("--theta-match", type=float, default=THETA_MATCH)
    s.add_argument("--theta-dup", type=float, default=THETA_DUP)
    s.add_argument("--origin", default=INITIAL)
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("cluster", help="group instructions into maximal cliques")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--tau", type=float, default=DEFAULT_TAU)
    s.set_defaults(func=cmd_cluster)

    s = sub.add_parser("abstract", help="abstract clustered trajectories into workflows")
    s.add_argument("--trajectories", required=True)
    s.add_argument("--clusters", required=True)
    s.add_argument("--bank", required=True)
    s.add_argument("--origin", default=INITIAL)
    s.set_defaults(func=cmd_abstract)

    s = sub.add_parser("retrieve", help="two-stage retrieval")
    s.add_argument("--bank", required=True)
    s.add_argument("--query", required=True)
    s.add_argument("--store", choices=("procedural", "stationary"), default="procedural")
    s.add_argument("-N", type=int, default=DEFAULT_N)
    s.add_argument("-K", type=int, default=DEFAULT_K)
    s.add_argument("--min-similarity", type=float, default=None)
    s.add_argument("--variants", type=int, default=1, help="variants emitted per stationary record")
    s.add_argument("--dry-run", action="store_true", help="rank candidates without updating the bank")
    s.set_defaults(func=cmd_retrieve)

    s = sub.add_parser("scenario", help="write a pinned scenario file")
    s.add_argument("--preset", choices=("ablation", "adaptation"), required=True)
    s.add_argument("--sigma", type=float, default=0.3)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_scenario)

    s = sub.add_parser("simulate", help="run a scenario and write a metrics CSV")
    s.add_argument("--scenario", required=True)
    s.add_argument("--iterations", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--transcripts")
    s.add_argument("--seed", type=int)
    s.add_argument("--tau", type=float)
    s.add_argument("--theta-match", type=float)
    s.add_argument("--theta-dup", type=float)
    s.add_argument("--lambda", dest="lam", type=float, help="stationary bonus weight (agent default 1.0)")
    s.add_argument("--k-icons", type=int, help=f"icons in the grounding hint (default {K_ICONS})")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("report", help="aggregate a metrics CSV")
    s.add_argument("--in", dest="inp", required=True)
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors and --help come back as return codes
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DualMemError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
