from pathlib import Path

import pytest

from elitmus.config import ConfigError, ModelConfig
from elitmus.enumerate import check_final, enumerate_candidates
from elitmus.harness import allowed_outcomes, check
from elitmus.litmus import load_test
from elitmus.model import consistent, derive

CORPUS = Path(__file__).resolve().parents[1] / "src" / "elitmus" / "corpus"
FILES = sorted(CORPUS.glob("*.elitmus"))
CFG = ModelConfig()


def corpus(name):
    return load_test(CORPUS / f"{name}.elitmus")


def exception_free(t):
    return not t.handlers and not t.uses_gic()


def _relaxed(name, cfg=CFG):
    t = corpus(name)
    return t, [c for c in enumerate_candidates(t, cfg) if check_final(c, t.final)]


def test_ctrl_into_svc_orders_reads_across_entry():
    t, cands = _relaxed("MP+dmb+ctrlsvc")
    for c in cands:
        d = derive(c, CFG)
        ev = c.events
        reads = [i for i, e in enumerate(ev) if e.kind == "R"]
        te = next(i for i, e in enumerate(ev) if e.kind == "TE")
        first, later = reads[0], reads[-1]
        assert (first, te) in d.ctxob and (te, later) in d.ctxob
        assert not consistent(c, CFG).ok


def test_exception_free_tests_have_no_exception_ordering():
    for name in ("MP+po+po", "SB+dmb+dmb", "LB+addr+addr"):
        for c in enumerate_candidates(corpus(name), CFG):
            d = derive(c, CFG)
            assert d.asyncob.is_empty() and d.ets2ob.is_empty()
            assert d.ctxob.is_empty()


def test_lb_pos_needs_sea_r():
    _, cands = _relaxed("LB+pos")
    assert any(consistent(c, CFG).ok for c in cands)
    cfg = ModelConfig.variant("sea_r")
    assert not any(consistent(c, cfg).ok for c in cands)


def test_corr_fails_internal():
    _, cands = _relaxed("CoRR")
    assert cands
    for c in cands:
        report = consistent(c, CFG)
        assert not report.internal
        cycle = report.witness["internal"]
        assert cycle and len(cycle) >= 2


def test_mp_svc_relaxed_candidate_consistent():
    _, cands = _relaxed("MP+dmb+svc")
    assert any(consistent(c, CFG).ok for c in cands)


def test_mp_po_addr_sea_w_external_violation():
    cfg = ModelConfig.variant("sea_w")
    _, cands = _relaxed("MP+po+addr", cfg)
    for c in cands:
        report = consistent(c, cfg)
        assert report.internal and not report.external
        cyc = report.witness["external"]
        assert cyc


def test_exs_drops_entry_and_exit_synchronisation():
    exs = ModelConfig.variant("exs")
    assert not exs.cse_on_entry and not exs.cse_on_exit
    assert check(corpus("MP+dmb+ctrlsvc")).outcome == "Forbidden"
    assert check(corpus("MP+dmb+ctrlsvc"), exs).outcome == "Allowed"
    assert check(corpus("MP+dmb+ctrleret"), exs).outcome == "Allowed"


def test_eis_eos_need_exs():
    with pytest.raises(ConfigError):
        ModelConfig(eis=False)
    assert ModelConfig.variant("eis").cse_on_entry and not ModelConfig.variant("eis").cse_on_exit


def test_derived_relations_are_cached():
    c = next(iter(enumerate_candidates(corpus("MP+dmb+svc"), CFG)))
    assert derive(c, CFG) is derive(c, CFG)


@pytest.mark.parametrize("path", FILES, ids=lambda p: p.stem)
def test_sea_variants_only_remove_outcomes(path):
    t = load_test(path)
    base = allowed_outcomes(t, CFG)
    for name in ("sea_r", "sea_w", "sea_rw"):
        assert allowed_outcomes(t, ModelConfig.variant(name)) <= base


@pytest.mark.parametrize("path", [p for p in FILES if exception_free(load_test(p))], ids=lambda p: p.stem)
def test_exception_switches_do_not_touch_exception_free_tests(path):
    t = load_test(path)
    base = allowed_outcomes(t, CFG)
    for name in ("exs", "no_ets2", "eis", "eos"):
        assert allowed_outcomes(t, ModelConfig.variant(name)) == base
