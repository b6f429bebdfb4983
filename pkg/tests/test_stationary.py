import copy
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dualmem.embed import cosine
from dualmem.errors import DataError, NoMatch
from dualmem.memstore import MemoryStore, RetrievalConfig
from dualmem.procedural import Action, ActionKind
from dualmem.stationary import (
    THETA_DUP, ElementRecord, Outcome, PatchDescriptor, PatchVariant, Triplet, grounding_hint,
    ingest_triplets, retrieve_elements, upsert_element, variant_order,
)

E1 = PatchDescriptor([1.0, 0.0, 0.0, 0.0])
E2 = PatchDescriptor([0.0, 1.0, 0.0, 0.0])
DESCRIPTIONS = ["click send to send mail", "click gear to open settings", "click star to save item"]


def triplet(desc="click send to send mail", patch=E1, click=(5.0, 5.0)):
    return Triplet("s0", Action(ActionKind.CLICK, "send"), click, (0.0, 0.0, 10.0, 10.0), patch, desc, "s1")


def patches(dim=4):
    return st.lists(st.integers(-3, 3), min_size=dim, max_size=dim).filter(any).map(PatchDescriptor)


def dedup_sound(store):
    for entry in store:
        vs = entry.payload.variants
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                if cosine(vs[i].descriptor.features, vs[j].descriptor.features) >= THETA_DUP:
                    return False
    return True


def snapshot(store):
    return [(e.id, e.key, e.created_seq,
             [(v.descriptor.features.tolist(), v.created_seq, v.last_access, v.count)
              for v in e.payload.variants]) for e in store], store.next_seq


def test_upsert_routing():
    s = MemoryStore()
    assert upsert_element(s, "click send to send mail", E1) is Outcome.CREATED
    assert upsert_element(s, "click send to send mail", E1) is Outcome.DISCARDED
    s.retrieve("send mail")
    assert upsert_element(s, "click send to send mail", E2) is Outcome.APPENDED
    (entry,) = list(s)
    new = entry.payload.variants[-1]
    assert (new.created_seq, new.last_access, new.count) == (1, 1, 1)
    assert upsert_element(s, "click gear to open settings", E1) is Outcome.CREATED
    assert len(s) == 2


def test_ingest_examples():
    s = MemoryStore()
    r = ingest_triplets(s, [])
    assert (r.created, r.appended, r.discarded, r.errors) == (0, 0, 0, [])
    r = ingest_triplets(s, [triplet()])
    assert r.created == 1
    r = ingest_triplets(MemoryStore(), [triplet(), triplet()])
    assert (r.created, r.discarded) == (1, 1)


def test_malformed_triplet_is_reported():
    s = MemoryStore()
    bad = triplet(click=(50.0, 50.0))
    r = ingest_triplets(s, [bad, triplet()])
    assert r.created == 1 and [i for i, _ in r.errors] == [0]
    with pytest.raises(DataError):
        PatchDescriptor([0.0, 0.0])
    with pytest.raises(DataError):
        PatchDescriptor([np.nan, 1.0])


def test_variant_order_prefers_frequent():
    rec = ElementRecord("d", [PatchVariant(E1, 0, 9, 1), PatchVariant(E2, 1, 9, 5)])
    # g = 1 for both: exp(-1/1) < exp(-1/5)
    assert math.exp(-0.2) > math.exp(-1)
    assert variant_order(rec, 10) == [1, 0]


def test_retrieve_elements():
    assert retrieve_elements(MemoryStore(), "send mail") == []
    s = MemoryStore()
    upsert_element(s, "click send to send mail", E1)
    upsert_element(s, "click send to send mail", E2)
    (hit,) = retrieve_elements(s, "send mail")
    assert hit.descriptor == E2 and hit.variant_index == 1  # newer wins the tie
    v = s.get(0).payload.variants
    assert (v[1].count, v[1].last_access) == (2, 1)
    assert (v[0].count, v[0].last_access) == (1, 0)  # non-returned variant untouched
    both = retrieve_elements(s, "send mail", variants_per_record=2)
    assert [h.variant_index for h in both] == [1, 0]


def test_grounding_hint_examples():
    one = [("a", (5.0, 5.0), (0.0, 0.0, 10.0, 10.0), E1.features)]
    assert grounding_hint(one, E1, k=1).hint_box == (0.0, 0.0, 10.0, 10.0)
    row = [(f"e{x}", (float(x), 0.0), (x - 0.5, -0.5, 1.0, 1.0), (E1 if x == 0 else E2).features)
           for x in (0, 1, 5, 9)]
    hint = grounding_hint(row, E1, k=2)
    # brute-force distances from (0,0): 0, 1, 5, 9
    assert hint.anchor_id == "e0"
    assert hint.hint_box == (-0.5, -0.5, 2.0, 1.0)
    half = PatchDescriptor([0.5, math.sqrt(0.75), 0.0, 0.0])
    with pytest.raises(NoMatch):
        grounding_hint([("a", (0, 0), (0, 0, 1, 1), E1.features)], half, k=1, floor=0.9)


def test_blob_is_opaque():
    s = MemoryStore()
    upsert_element(s, "click send to send mail", PatchDescriptor([1, 0, 0, 0], b"\x00\xff"))
    assert s.get(0).payload.variants[0].descriptor.blob == b"\x00\xff"


@given(st.lists(st.tuples(st.sampled_from(DESCRIPTIONS), patches()), max_size=25))
def test_dedup_soundness_and_growth(ops):
    s = MemoryStore()
    sizes = {}
    for desc, patch in ops:
        upsert_element(s, desc, patch)
        for e in s:
            assert len(e.payload.variants) >= sizes.get(e.id, 0)
            sizes[e.id] = len(e.payload.variants)
        assert dedup_sound(s)


@given(st.lists(st.tuples(st.sampled_from(DESCRIPTIONS), patches()), max_size=12), st.integers(0, 12))
def test_ingest_associativity(ops, cut):
    trips = [triplet(d, p) for d, p in ops]
    a, b = MemoryStore(), MemoryStore()
    ingest_triplets(a, trips[:cut])
    ingest_triplets(a, trips[cut:])
    ingest_triplets(b, trips)
    assert snapshot(a) == snapshot(b)


boxes = st.tuples(st.integers(0, 50), st.integers(0, 50), st.integers(1, 20), st.integers(1, 20))


@given(st.lists(st.tuples(boxes, patches()), min_size=1, max_size=8), patches(), st.integers(1, 8))
def test_hint_box_contains_anchor_and_shrinks(items, patch, k):
    elements = [(i, (x + w / 2, y + h / 2), (x, y, w, h), p.features) for i, ((x, y, w, h), p) in enumerate(items)]
    hint = grounding_hint(elements, patch, k=k, floor=-1.0)
    ax, ay, aw, ah = elements[hint.anchor_id][2]
    hx, hy, hw, hh = hint.hint_box
    assert hx <= ax and hy <= ay and ax + aw <= hx + hw and ay + ah <= hy + hh
    if k > 1:
        sx, sy, sw, sh = grounding_hint(elements, patch, k=k - 1, floor=-1.0).hint_box
        assert hx <= sx and hy <= sy and sx + sw <= hx + hw and sy + sh <= hy + hh


@given(st.lists(st.tuples(st.sampled_from(DESCRIPTIONS), patches()), min_size=1, max_size=10),
       st.sampled_from(["send mail", "settings", "save"]))
def test_record_order_payload_independent(ops, query):
    s = MemoryStore()
    for desc, patch in ops:
        upsert_element(s, desc, patch)
    other = copy.deepcopy(s)
    for e in other:
        e.payload = None
    cfg = RetrievalConfig(3, 2)
    assert [e.id for e in s.retrieve(query, cfg)] == [e.id for e in other.retrieve(query, cfg)]
