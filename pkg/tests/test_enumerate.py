from pathlib import Path

import pytest

from elitmus.config import ModelConfig
from elitmus.enumerate import check_final, enumerate_candidates
from elitmus.isa import GEN, BoundExceeded
from elitmus.litmus import TrueCond, load_test, parse_condition, parse_test

from oracles import is_simple, naive_candidate_count

CORPUS = Path(__file__).resolve().parents[1] / "src" / "elitmus" / "corpus"
CFG = ModelConfig()


def corpus(name):
    return load_test(CORPUS / f"{name}.elitmus")


def test_mp_has_four_candidates():
    assert len(list(enumerate_candidates(corpus("MP+po+po"), CFG))) == 4


def test_store_load_same_location_two_candidates():
    t = parse_test("name: T\ninit: *x=0; 0:X1=x\nthread 0:\n  MOV X0,#1\n  STR X0,[X1]\n  LDR X2,[X1]\n")
    assert len(list(enumerate_candidates(t, CFG))) == 2


def test_conflation_candidate_exists():
    t = corpus("SGIconflate+SameINTIDSameSrcPEs")
    found = False
    for c in enumerate_candidates(t, CFG):
        for take in c.interrupt.range():
            if len([a for a, b in c.interrupt if b == take]) == 2:
                found = True
    assert found


def test_rf_value_consistency_and_fr_from_init():
    for name in ("MP+dmb+svc", "RCU-MP", "CoRR"):
        for c in enumerate_candidates(corpus(name), CFG):
            ev = c.events
            for w, r in c.rf:
                assert ev[w].loc == ev[r].loc and ev[w].value == ev[r].value
            reads = [i for i, e in enumerate(ev) if e.kind == "R"]
            assert sorted(r for _, r in c.rf) == reads
            for w, r in c.rf:
                if ev[w].thread < 0:
                    later = {j for j, e in enumerate(ev) if e.kind == "W" and e.loc == ev[r].loc and e.thread >= 0}
                    assert {b for a, b in c.fr if a == r} == later


def test_co_is_total_per_location():
    for c in enumerate_candidates(corpus("SviaSGI"), CFG):
        ws = [i for i, e in enumerate(c.events) if e.kind == "W"]
        for a in ws:
            for b in ws:
                if a != b and c.events[a].loc == c.events[b].loc:
                    assert ((a, b) in c.co) != ((b, a) in c.co)


def test_interrupt_witness_well_formed():
    for name in ("SGIconflate+SameINTIDDifferentSrcPEs", "WRCforSGIs", "IRIWforSGIs"):
        for c in enumerate_candidates(corpus(name), CFG):
            ev = c.events
            takes = [i for i, e in enumerate(ev) if e.is_take]
            for t in takes:
                srcs = [g for g, tt in c.interrupt if tt == t]
                assert srcs
                for g in srcs:
                    assert ev[g].kind == GEN and ev[t].thread in ev[g].targets and ev[g].intid == ev[t].intid


def test_final_condition_evaluation():
    t = corpus("MP+po+po")
    hits = [c for c in enumerate_candidates(t, CFG) if check_final(c, t.final)]
    assert len(hits) == 1
    regs = hits[0].final_registers()[1]
    assert regs[0] == 1 and regs[2] == 0
    assert all(check_final(c, TrueCond()) for c in enumerate_candidates(t, CFG))


def test_final_memory_is_co_maximal():
    t = corpus("SviaSGI")
    mem_values = {check_final(c, parse_condition("x=2")) for c in enumerate_candidates(t, CFG)}
    assert mem_values == {True, False}


def test_handler_condition_true_only_when_handler_read_zero():
    t = corpus("MPviaSGIEIOmode1sequence")
    for c in enumerate_candidates(t, CFG):
        handler_reads = [e for e in c.events if e.thread == 1 and e.kind == "R"]
        ran = any(e.is_take for e in c.events)
        expected = ran and handler_reads[-1].value == 0
        assert check_final(c, t.final) == expected


def test_resource_bound_is_explicit():
    with pytest.raises(BoundExceeded):
        list(enumerate_candidates(corpus("RCU-MP"), ModelConfig(max_candidates=5)))


SIMPLE = [p for p in sorted(CORPUS.glob("*.elitmus")) if is_simple(load_test(p))]


@pytest.mark.parametrize("path", SIMPLE, ids=lambda p: p.stem)
def test_count_matches_naive_enumerator(path):
    t = load_test(path)
    mem_events = sum(1 for prog in t.threads.values() for i in prog if i.op in ("LDR", "STR"))
    assert mem_events <= 8
    assert len(list(enumerate_candidates(t, CFG))) == naive_candidate_count(t)
