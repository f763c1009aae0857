"""The axiomatic model: derived relations and the three consistency axioms."""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import ModelConfig
from .enumerate import CandidateExecution
from .isa import ERET, MRS, MSR, TE, GIC_KINDS, R, W, _gic_enabled
from .relation import EventSet, Relation

DMBLD = frozenset({"DMB.LD", "DMB.SY", "DSB.LD", "DSB.SY"})
DMBST = frozenset({"DMB.ST", "DMB.SY", "DSB.ST", "DSB.SY"})
DSB = frozenset({"DSB.LD", "DSB.ST", "DSB.SY"})
# Special-purpose register writes do not order later context synchronisation.
SPECIAL_REGS = frozenset({"ELR_EL1"})


class Sets:
    """Event classes of one candidate, computed once."""

    def __init__(self, cand: CandidateExecution):
        ev = cand.events
        n = cand.n

        def of(pred, tag):
            return EventSet.of(n, (i for i, e in enumerate(ev) if pred(e)), tag)

        self.R = of(lambda e: e.kind == R, "R")
        self.W = of(lambda e: e.kind == W, "W")
        self.M = self.R | self.W
        self.ISB = of(lambda e: e.fence == "ISB", "ISB")
        self.TE = of(lambda e: e.kind == TE, "TE")
        self.ERET = of(lambda e: e.kind == ERET, "ERET")
        self.MSR = of(lambda e: e.kind == MSR and e.sysreg not in SPECIAL_REGS, "MSR")
        self.MRS = of(lambda e: e.kind == MRS, "MRS")
        self.A = of(lambda e: "A" in e.attrs, "A")
        self.Q = of(lambda e: "Q" in e.attrs, "Q")
        self.L = of(lambda e: "L" in e.attrs, "L")
        self.dmbld = of(lambda e: e.fence in DMBLD, "dmbld")
        self.dmbst = of(lambda e: e.fence in DMBST, "dmbst")
        self.dsb = of(lambda e: e.fence in DSB, "dsb")
        self.ASYNC = of(lambda e: e.is_take, "ASYNC")
        self.Fault = of(lambda e: e.kind == TE and e.cause == "PageFault", "Fault")
        self.GIC = of(lambda e: e.kind in GIC_KINDS, "GICEvents")
        self.all = EventSet(n, (1 << n) - 1)


@dataclass
class DerivedRelations:
    sets: Sets
    CSE: EventSet
    rel: dict[str, Relation] = field(default_factory=dict)

    def __getattr__(self, name):
        rel = self.__dict__.get("rel", {})
        if name in rel:
            return rel[name]
        raise AttributeError(name)

    def __getitem__(self, name: str) -> Relation:
        return self.rel[name]

    @property
    def ob(self) -> Relation:
        return self.rel["ob"]


@dataclass
class AxiomReport:
    internal: bool
    external: bool
    atomic: bool
    witness: dict[str, list] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.internal and self.external and self.atomic

    def failed(self) -> list[str]:
        return [name for name in ("internal", "external", "atomic") if not getattr(self, name)]


def _ext_int(rel: Relation, ev) -> tuple[Relation, Relation]:
    ext = Relation.of(rel.n, ((a, b) for a, b in rel if ev[a].thread != ev[b].thread))
    return ext, rel - ext


def derive(cand: CandidateExecution, config: ModelConfig) -> DerivedRelations:
    key = ("derived", config)
    if key in cand.cache:
        return cand.cache[key]
    sk = cand.skeleton
    ev = cand.events
    n = cand.n
    S = Sets(cand)
    po, addr, data, ctrl, rmw = sk.po, sk.addr, sk.data, sk.ctrl, sk.rmw
    rf, co, fr = cand.rf, cand.co, cand.fr
    I = Relation.identity

    same_loc = Relation.of(n, ((a, b) for a, b in po if ev[a].loc is not None and ev[a].loc == ev[b].loc))
    rfe, rfi = _ext_int(rf, ev)
    coe, coi = _ext_int(co, ev)
    fre, fri = _ext_int(fr, ev)

    speculative = ctrl | addr.seq(po)
    if config.sea_r:
        speculative = speculative | I(S.R).seq(po)
    if config.sea_w:
        speculative = speculative | I(S.W).seq(po)

    cse = S.ISB
    if config.cse_on_entry:
        cse = cse | S.TE
    if config.cse_on_exit:
        cse = cse | S.ERET

    obs = rfe | fr | co
    dob = addr | data | speculative.seq(I(S.W)) | speculative.seq(I(S.ISB)) | (addr | data).seq(rfi)
    aob = rmw | I(rmw.range()).seq(rfi).seq(I(S.A | S.Q))
    bob = (
        po.restrict(S.R, S.dmbld)
        | po.restrict(S.W, S.dmbst)
        | po.restrict(S.dmbst, S.W)
        | po.restrict(S.dmbld, S.M)
        | po.restrict(S.L, S.A)
        | po.restrict(S.A | S.Q, S.M)
        | po.restrict(S.M, S.L)
        | po.restrict(S.dsb, S.all)
    )
    ctxob = speculative.seq(I(S.MSR | cse)) | po.restrict(S.MSR, cse) | po.restrict(cse, S.all)
    asyncob = speculative.seq(I(S.ASYNC)) | po.restrict(S.ASYNC, S.all)
    ets2ob = po.restrict(S.M, S.Fault) if config.ets2 else Relation(n)

    base = obs | dob | aob | bob | ctxob | asyncob | ets2ob
    rel = dict(po=po, po_loc=same_loc, rf=rf, rfe=rfe, rfi=rfi, co=co, coe=coe, coi=coi,
               fr=fr, fre=fre, fri=fri, addr=addr, data=data, ctrl=ctrl, rmw=rmw, iio=sk.iio,
               speculative=speculative, obs=obs, dob=dob, aob=aob, bob=bob, ctxob=ctxob,
               asyncob=asyncob, ets2ob=ets2ob)
    d = DerivedRelations(S, cse, rel)
    if _gic_enabled(sk.test, config):
        from .gic import gic_ob_extension

        gicob = gic_ob_extension(cand, d)
        rel["gicob"] = gicob
        base = base | gicob
    rel["ob"] = base.plus()
    cand.cache[key] = d
    return d


def consistent(cand: CandidateExecution, config: ModelConfig) -> AxiomReport:
    d = derive(cand, config)
    internal_rel = d.po_loc | d.fr | d.co | d.rf
    internal = internal_rel.is_acyclic()
    external = d.ob.is_irreflexive()
    atomic_rel = d.rmw & d.fre.seq(d.coe)
    atomic = atomic_rel.is_empty()
    witness = {}
    if not internal:
        witness["internal"] = internal_rel.find_cycle()
    if not external:
        witness["external"] = _ob_cycle(d)
    if not atomic:
        witness["atomic"] = sorted(atomic_rel)[:1]
    return AxiomReport(internal, external, atomic, witness)


def _ob_cycle(d: DerivedRelations) -> list[int] | None:
    parts = ("obs", "dob", "aob", "bob", "ctxob", "asyncob", "ets2ob", "gicob")
    step = Relation(d.ob.n)
    for p in parts:
        if p in d.rel:
            step = step | d.rel[p]
    return step.find_cycle()
