"""Line-delimited JSON persistence.

Every file is one JSON object per line, each carrying a ``kind`` field.
Lines are written canonically (sorted keys, no spaces, shortest round-trip
float repr, ASCII escapes, ``\\n`` terminated) so that load -> save is
byte-identical.  Schemas are strict: an unknown kind or a mismatched field set is a
:class:`CorruptRecord` carrying its 1-based line number.

Bank files hold up to two sections, each a ``header`` line (with ``store``
set to ``procedural`` or ``stationary``) followed by that store's records:
``proc_entry`` lines, or ``stat_record`` lines each followed by its
``stat_variant`` lines.  Other files start with a header whose ``content``
names the file type.
"""

from __future__ import annotations

import base64
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

from .driftsim.agent import AgentConfig
from .driftsim.app import AppSpec, DriftOp
from .driftsim.suite import Scenario
from .embed import EmbeddingProvider, default_provider
from .errors import CorruptRecord, DataError, IoFailure, ProviderMismatch, UnknownFormatVersion
from .memstore import MemoryEntry, MemoryStore, RetrievalConfig
from .procedural import Action, Trajectory, Workflow
from .stationary import ElementRecord, PatchDescriptor, PatchVariant, Triplet

FORMAT_VERSION = 1

_BANK_HEADER = {"kind", "format_version", "store", "provider", "dim", "c_global", "next_seq", "next_id"}
_ENTRY = {"kind", "id", "key", "created_seq", "last_access", "count", "origin"}
_SCHEMAS = {
    "proc_entry": _ENTRY | {"steps"},
    "stat_record": _ENTRY,
    "stat_variant": {"kind", "record_id", "index", "features", "blob", "created_seq", "last_access", "count", "origin"},
    "file_header": {"kind", "format_version", "content"},
    "instruction": {"kind", "id", "text"},
    "trajectory": {"kind", "id", "instruction", "success", "actions"},
    "action": {"kind", "target_label", "argument", "arg_role"},
    "cluster": {"kind", "members"},
    "triplet": {"kind", "pre_screen", "post_screen", "action", "click", "box", "features", "blob", "description"},
    "scenario": {"kind", "name", "seed", "n_tasks", "per_category", "demos_per_category", "demo_coverage",
                 "budget", "tau", "theta_match", "theta_dup", "evolve", "explore", "bank_path", "bank_seed"},
    "app": {"kind", "n_screens", "elements_per_screen", "cross_links"},
    "drift": {"kind", "iteration", "op", "sigma", "moves"},
    "agent": {"kind", "name", "procedural", "stationary", "lam", "k_icons", "hint_floor", "step_threshold",
              "lookahead", "proc_n", "proc_k", "proc_min_similarity", "stat_n", "stat_k",
              "stat_min_similarity", "variants_per_record"},
}


class BankStores(NamedTuple):
    procedural: MemoryStore | None
    stationary: MemoryStore | None


def dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), allow_nan=False)


def write_records(records: Iterable[dict], path) -> int:
    """Atomically write records; returns the byte count."""
    data = "".join(dumps(r) + "\n" for r in records).encode("ascii")
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return len(data)


def read_records(path) -> Iterator[tuple[int, dict]]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if not raw:
        return
    lines = raw.split(b"\n")
    if lines[-1] != b"":
        raise CorruptRecord("truncated record (no line terminator)", len(lines))
    for n, line in enumerate(lines[:-1], start=1):
        try:
            record = json.loads(line)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise CorruptRecord(f"invalid JSON: {exc}", n) from None
        if not isinstance(record, dict) or "kind" not in record:
            raise CorruptRecord("record is not an object with a kind", n)
        yield n, record


def _check(record: dict, schema: str, line: int) -> dict:
    expected = _SCHEMAS[schema]
    keys = set(record)
    if keys != expected:
        missing = sorted(expected - keys)
        extra = sorted(keys - expected)
        raise CorruptRecord(f"{schema}: missing {missing} unknown {extra}", line)
    return record


def _check_version(record: dict, line: int) -> None:
    if record.get("format_version") != FORMAT_VERSION:
        raise UnknownFormatVersion(f"line {line}: format_version {record.get('format_version')!r}")


def _b64(blob: bytes | None):
    return None if blob is None else base64.b64encode(blob).decode("ascii")


def _unb64(text, line: int):
    if text is None:
        return None
    try:
        return base64.b64decode(text.encode("ascii"), validate=True)
    except (ValueError, UnicodeEncodeError) as exc:
        raise CorruptRecord(f"bad base-64 blob: {exc}", line) from None


# ---------------------------------------------------------------- banks


def _store_kind(store: MemoryStore) -> str:
    kinds = set()
    for entry in store:
        if isinstance(entry.payload, Workflow):
            kinds.add("procedural")
        elif isinstance(entry.payload, ElementRecord):
            kinds.add("stationary")
        else:
            raise DataError(f"entry {entry.id} has an unpersistable payload {type(entry.payload).__name__}")
    if len(kinds) > 1:
        raise DataError("store mixes workflows and element records")
    return kinds.pop() if kinds else "procedural"


def _entry_fields(entry: MemoryEntry, kind: str) -> dict:
    return {
        "kind": kind, "id": entry.id, "key": entry.key, "created_seq": entry.created_seq,
        "last_access": entry.last_access, "count": entry.count, "origin": entry.origin,
    }


def bank_records(store: MemoryStore, kind: str | None = None) -> list[dict]:
    kind = kind or _store_kind(store)
    records = [{
        "kind": "header", "format_version": FORMAT_VERSION, "store": kind,
        "provider": store.provider_name, "dim": store.dim, "c_global": store.global_counter,
        "next_seq": store.next_seq, "next_id": store.next_id,
    }]
    for entry in store:
        if kind == "procedural":
            rec = _entry_fields(entry, "proc_entry")
            rec["steps"] = list(entry.payload.steps)
            records.append(rec)
            continue
        records.append(_entry_fields(entry, "stat_record"))
        for idx, v in enumerate(entry.payload.variants):
            records.append({
                "kind": "stat_variant", "record_id": entry.id, "index": idx,
                "features": [float(x) for x in v.descriptor.features],
                "blob": _b64(v.descriptor.blob), "created_seq": v.created_seq,
                "last_access": v.last_access, "count": v.count, "origin": v.origin,
            })
    return records


def save_bank(stores, path) -> int:
    """Save one store, or a (procedural, stationary) pair given as a tuple or mapping."""
    if isinstance(stores, MemoryStore):
        sections = [(stores, None)]
    else:
        if isinstance(stores, dict):
            pair = (stores.get("procedural"), stores.get("stationary"))
        else:
            pair = (getattr(stores, "procedural", None), getattr(stores, "stationary", None))
            if pair == (None, None) and isinstance(stores, (tuple, list)):
                pair = tuple(stores)
        sections = [(s, k) for s, k in zip(pair, ("procedural", "stationary")) if s is not None]
    records = []
    for store, kind in sections:
        records.extend(bank_records(store, kind))
    return write_records(records, path)


def default_registry() -> dict[str, EmbeddingProvider]:
    p = default_provider()
    return {p.name: p}


def load_bank(path, registry: dict | None = None) -> BankStores:
    registry = registry or default_registry()
    out: dict[str, MemoryStore] = {}
    store: MemoryStore | None = None
    kind = None
    record_entry: MemoryEntry | None = None
    pending: list[PatchVariant] = []

    def close_record(line):
        nonlocal record_entry, pending
        if record_entry is not None:
            if not pending:
                raise CorruptRecord(f"stat_record {record_entry.id} has no variants", line)
            record_entry.payload = ElementRecord(record_entry.key, pending)
            store.restore(record_entry)
        record_entry, pending = None, []

    last = 0
    for line, rec in read_records(path):
        last = line
        k = rec["kind"]
        if k == "header":
            close_record(line)
            if set(rec) != _BANK_HEADER:
                raise CorruptRecord(f"header fields {sorted(rec)}", line)
            _check_version(rec, line)
            kind = rec["store"]
            if kind not in ("procedural", "stationary") or kind in out:
                raise CorruptRecord(f"bad or repeated store section {kind!r}", line)
            provider = registry.get(rec["provider"])
            if provider is None:
                raise ProviderMismatch(f"unknown provider {rec['provider']!r}")
            if provider.dim != rec["dim"]:
                raise ProviderMismatch(f"bank dim {rec['dim']} vs provider dim {provider.dim}")
            store = MemoryStore(provider)
            store.global_counter = rec["c_global"]
            store.next_seq = rec["next_seq"]
            store.next_id = rec["next_id"]
            out[kind] = store
            continue
        if store is None:
            raise CorruptRecord("record before any header", line)
        if k not in ("proc_entry", "stat_record", "stat_variant"):
            raise CorruptRecord(f"unknown record kind {k!r}", line)
        _check(rec, k, line)
        try:
            if k == "proc_entry":
                if kind != "procedural":
                    raise CorruptRecord("proc_entry in a stationary section", line)
                entry = _entry(rec, store, Workflow(rec["key"], tuple(rec["steps"])))
                store.restore(entry)
            elif k == "stat_record":
                if kind != "stationary":
                    raise CorruptRecord("stat_record in a procedural section", line)
                close_record(line)
                record_entry = _entry(rec, store, None)
            else:
                if record_entry is None or rec["record_id"] != record_entry.id or rec["index"] != len(pending):
                    raise CorruptRecord("stat_variant out of order", line)
                pending.append(PatchVariant(
                    PatchDescriptor(rec["features"], _unb64(rec["blob"], line)),
                    rec["created_seq"], rec["last_access"], rec["count"], rec["origin"],
                ))
        except CorruptRecord:
            raise
        except (DataError, TypeError, ValueError) as exc:
            raise CorruptRecord(str(exc), line) from None
    close_record(last)
    return BankStores(out.get("procedural"), out.get("stationary"))


def _entry(rec: dict, store: MemoryStore, payload) -> MemoryEntry:
    if rec["count"] < 1:
        raise ValueError("count must be >= 1")
    return MemoryEntry(
        id=rec["id"], key=rec["key"], key_embedding=store.provider.embed(rec["key"]), payload=payload,
        created_seq=rec["created_seq"], last_access=rec["last_access"], count=rec["count"],
        origin=rec["origin"],
    )


# ---------------------------------------------------------------- other files


def _read_typed(path, content: str | tuple[str, ...]) -> Iterator[tuple[int, dict]]:
    contents = (content,) if isinstance(content, str) else content
    records = read_records(path)
    first = next(records, None)
    if first is None:
        raise CorruptRecord("empty file (missing header)", 1)
    line, head = first
    if head["kind"] != "header":
        raise CorruptRecord("first record must be a header", line)
    _check(head, "file_header", line)
    _check_version(head, line)
    if head["content"] not in contents:
        raise CorruptRecord(f"expected {' or '.join(contents)}, found {head['content']!r}", line)
    for line, rec in records:
        yield line, rec


def _header(content: str) -> dict:
    return {"kind": "header", "format_version": FORMAT_VERSION, "content": content}


def _action_record(a: Action) -> dict:
    return {"kind": a.kind.value, "target_label": a.target_label, "argument": a.argument, "arg_role": a.arg_role}


def _action(rec: dict, line: int) -> Action:
    _check(rec, "action", line)
    return Action(rec["kind"], rec["target_label"], rec["argument"], rec["arg_role"])


def save_trajectories(trajectories: dict, path) -> int:
    records = [_header("trajectories")]
    for ident, t in trajectories.items():
        records.append({
            "kind": "trajectory", "id": ident, "instruction": t.instruction, "success": t.success,
            "actions": [_action_record(a) for a in t.actions],
        })
    return write_records(records, path)


def load_trajectories(path) -> dict:
    out = {}
    for line, rec in _read_typed(path, "trajectories"):
        if rec["kind"] != "trajectory":
            raise CorruptRecord(f"unexpected kind {rec['kind']!r}", line)
        _check(rec, "trajectory", line)
        if rec["id"] in out:
            raise CorruptRecord(f"duplicate id {rec['id']!r}", line)
        try:
            actions = tuple(_action(a, line) for a in rec["actions"])
            out[rec["id"]] = Trajectory(rec["instruction"], actions, bool(rec["success"]))
        except CorruptRecord:
            raise
        except (ValueError, TypeError) as exc:
            raise CorruptRecord(str(exc), line) from None
    return out


def save_instructions(instructions, path) -> int:
    records = [_header("instructions")]
    records += [{"kind": "instruction", "id": i, "text": text} for i, text in instructions]
    return write_records(records, path)


def load_instructions(path) -> list[tuple]:
    """Instruction records, or the instructions of a trajectory file."""
    out = []
    for line, rec in _read_typed(path, ("instructions", "trajectories")):
        if rec["kind"] == "instruction":
            _check(rec, "instruction", line)
            out.append((rec["id"], rec["text"]))
        elif rec["kind"] == "trajectory":
            _check(rec, "trajectory", line)
            out.append((rec["id"], rec["instruction"]))
        else:
            raise CorruptRecord(f"unexpected kind {rec['kind']!r}", line)
    return out


def save_clusters(clusters, path) -> int:
    records = [_header("clusters")]
    records += [{"kind": "cluster", "members": list(c)} for c in clusters]
    return write_records(records, path)


def load_clusters(path) -> list[list]:
    out = []
    for line, rec in _read_typed(path, "clusters"):
        if rec["kind"] != "cluster":
            raise CorruptRecord(f"unexpected kind {rec['kind']!r}", line)
        _check(rec, "cluster", line)
        out.append(list(rec["members"]))
    return out


def save_triplets(triplets, path) -> int:
    records = [_header("triplets")]
    for t in triplets:
        records.append({
            "kind": "triplet", "pre_screen": t.pre_screen, "post_screen": t.post_screen,
            "action": _action_record(t.action), "click": list(t.click_point), "box": list(t.element_box),
            "features": [float(x) for x in t.descriptor.features], "blob": _b64(t.descriptor.blob),
            "description": t.description,
        })
    return write_records(records, path)


def load_triplets(path) -> list[Triplet]:
    out = []
    for line, rec in _read_typed(path, "triplets"):
        if rec["kind"] != "triplet":
            raise CorruptRecord(f"unexpected kind {rec['kind']!r}", line)
        _check(rec, "triplet", line)
        try:
            out.append(Triplet(
                pre_screen=rec["pre_screen"], action=_action(rec["action"], line),
                click_point=tuple(rec["click"]), element_box=tuple(rec["box"]),
                descriptor=PatchDescriptor(rec["features"], _unb64(rec["blob"], line)),
                description=rec["description"], post_screen=rec["post_screen"],
            ))
        except CorruptRecord:
            raise
        except (ValueError, TypeError) as exc:
            raise CorruptRecord(str(exc), line) from None
    return out


def _agent_record(a: AgentConfig) -> dict:
    return {
        "kind": "agent", "name": a.name, "procedural": a.procedural, "stationary": a.stationary,
        "lam": a.lam, "k_icons": a.k_icons, "hint_floor": a.hint_floor,
        "step_threshold": a.step_threshold, "lookahead": a.lookahead,
        "proc_n": a.proc_retrieval.n_candidates, "proc_k": a.proc_retrieval.k_results,
        "proc_min_similarity": a.proc_retrieval.min_similarity,
        "stat_n": a.stat_retrieval.n_candidates, "stat_k": a.stat_retrieval.k_results,
        "stat_min_similarity": a.stat_retrieval.min_similarity,
        "variants_per_record": a.variants_per_record,
    }


def scenario_records(s: Scenario) -> list[dict]:
    records = [_header("scenario"), {
        "kind": "scenario", "name": s.name, "seed": s.seed, "n_tasks": s.n_tasks,
        "per_category": s.per_category, "demos_per_category": s.demos_per_category,
        "demo_coverage": s.demo_coverage, "budget": s.budget, "tau": s.tau,
        "theta_match": s.theta_match, "theta_dup": s.theta_dup, "evolve": s.evolve,
        "explore": s.explore, "bank_path": s.bank_path, "bank_seed": s.bank_seed,
    }, {
        "kind": "app", "n_screens": s.app.n_screens, "elements_per_screen": s.app.elements_per_screen,
        "cross_links": s.app.cross_links,
    }]
    for it in sorted(s.drift):
        for op in s.drift[it]:
            records.append({"kind": "drift", "iteration": it, "op": op.kind.value, "sigma": op.sigma, "moves": op.moves})
    records += [_agent_record(a) for a in s.agents]
    return records


def save_scenario(scenario: Scenario, path) -> int:
    return write_records(scenario_records(scenario), path)


def load_scenario(path) -> Scenario:
    fields = None
    app = None
    drift: dict[int, list[DriftOp]] = {}
    agents = []
    for line, rec in _read_typed(path, "scenario"):
        kind = rec["kind"]
        if kind not in ("scenario", "app", "drift", "agent"):
            raise CorruptRecord(f"unexpected kind {kind!r}", line)
        _check(rec, kind, line)
        body = {k: v for k, v in rec.items() if k != "kind"}
        try:
            if kind == "scenario":
                fields = body
            elif kind == "app":
                app = AppSpec(**body)
            elif kind == "drift":
                drift.setdefault(body["iteration"], []).append(
                    DriftOp(body["op"], sigma=body["sigma"], moves=body["moves"]))
            else:
                agents.append(AgentConfig(
                    name=body["name"], procedural=body["procedural"], stationary=body["stationary"],
                    lam=body["lam"], k_icons=body["k_icons"], hint_floor=body["hint_floor"],
                    step_threshold=body["step_threshold"], lookahead=body["lookahead"],
                    proc_retrieval=RetrievalConfig(body["proc_n"], body["proc_k"], body["proc_min_similarity"]),
                    stat_retrieval=RetrievalConfig(body["stat_n"], body["stat_k"], body["stat_min_similarity"]),
                    variants_per_record=body["variants_per_record"],
                ))
        except (ValueError, TypeError) as exc:
            raise CorruptRecord(str(exc), line) from None
    if fields is None or app is None:
        raise CorruptRecord("scenario file needs a scenario and an app record")
    return Scenario(app=app, drift={k: tuple(v) for k, v in drift.items()}, agents=tuple(agents), **fields)
