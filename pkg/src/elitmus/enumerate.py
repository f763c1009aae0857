"""Candidate executions: thread paths combined with rf, co and interrupt witnesses."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

from .config import ModelConfig
from .isa import (
    GEN, W, BoundExceeded, Domains, Event, ThreadGraph, _gic_enabled, compute_domains, thread_paths,
)
from .litmus import And, Atom, FinalCondition, LitmusTest, Not, Or, TrueCond
from .relation import EventSet, Relation


@dataclass
class Skeleton:
    """One choice of path per thread, laid out over global event ids.

    Ids ``0..len(locations)-1`` are the initial writes, one per location.
    """

    test: LitmusTest
    events: list[Event]
    graphs: dict[int, ThreadGraph]
    offsets: dict[int, int]
    init_writes: dict[int, int]  # address -> event id
    po: Relation
    addr: Relation
    data: Relation
    ctrl: Relation
    rmw: Relation
    iio: Relation

    @property
    def n(self) -> int:
        return len(self.events)

    def ids(self, pred) -> EventSet:
        return EventSet.of(self.n, (i for i, e in enumerate(self.events) if pred(e)))

    def thread_of(self, i: int) -> int:
        return self.events[i].thread


@dataclass
class CandidateExecution:
    skeleton: Skeleton
    rf: Relation
    co: Relation
    interrupt: Relation
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def events(self) -> list[Event]:
        return self.skeleton.events

    @property
    def n(self) -> int:
        return self.skeleton.n

    @property
    def fr(self) -> Relation:
        if "fr" not in self.cache:
            self.cache["fr"] = self.rf.inverse().seq(self.co)
        return self.cache["fr"]

    def final_registers(self) -> dict[int, tuple[int, ...]]:
        return {tid: g.regs for tid, g in self.skeleton.graphs.items()}

    def final_memory(self) -> dict[int, int]:
        out = {}
        for addr, init in self.skeleton.init_writes.items():
            last = init
            for j in self.co.successors(init):
                if not self.co.rows[j]:
                    last = j
            out[addr] = self.events[last].value
        return out

    def key(self) -> tuple:
        """Canonical identity: path choices, then rf, co and interrupt pairs."""
        return (
            tuple(g.choices for g in self.skeleton.graphs.values()),
            tuple(sorted(self.rf)), tuple(sorted(self.co)), tuple(sorted(self.interrupt)),
        )

    def describe(self) -> list[str]:
        lines = []
        for i, e in enumerate(self.events):
            who = "init" if e.thread < 0 else f"T{e.thread}"
            lines.append(f"e{i} {who}: {e.label()}")
        for name, rel in (("rf", self.rf), ("co", self.co), ("interrupt", self.interrupt)):
            pairs = ", ".join(f"e{a}->e{b}" for a, b in sorted(rel))
            lines.append(f"{name}: {pairs or '-'}")
        return lines


# skeletons -----------------------------------------------------------------


def _layout(test: LitmusTest, graphs: dict[int, ThreadGraph]) -> Skeleton:
    addrs = test.addresses()
    events: list[Event] = []
    init_writes = {}
    for k, loc in enumerate(test.locations()):
        a = addrs[loc]
        init_writes[a] = len(events)
        events.append(Event(-1, 0, k, W, loc=a, value=test.init_mem.get(loc, 0)))
    offsets = {}
    for tid, g in graphs.items():
        offsets[tid] = len(events)
        events.extend(g.events)
    n = len(events)

    def glob(tid, pairs):
        o = offsets[tid]
        return ((a + o, b + o) for a, b in pairs)

    rels = {name: [] for name in ("po", "addr", "data", "ctrl", "rmw", "iio")}
    for tid, g in graphs.items():
        rels["po"].extend(glob(tid, g.po()))
        for name in ("addr", "data", "ctrl", "rmw", "iio"):
            rels[name].extend(glob(tid, getattr(g, name)))
    return Skeleton(test, events, graphs, offsets, init_writes,
                    **{k: Relation.of(n, v) for k, v in rels.items()})


def skeletons(test: LitmusTest, config: ModelConfig, domains: Domains | None = None) -> Iterator[Skeleton]:
    dom = domains or compute_domains(test, config)
    per_thread = [list(thread_paths(test, tid, dom, config)) for tid in test.thread_ids]
    for combo in itertools.product(*per_thread):
        yield _layout(test, {g.tid: g for g in combo})


# witnesses -----------------------------------------------------------------


def _rf_choices(sk: Skeleton) -> list[list[tuple[int, int]]] | None:
    writes: dict[tuple[int, int], list[int]] = {}
    for i, e in enumerate(sk.events):
        if e.kind == W:
            writes.setdefault((e.loc, e.value), []).append(i)
    out = []
    for i, e in enumerate(sk.events):
        if e.kind == "R":
            srcs = [w for w in writes.get((e.loc, e.value), []) if w != i]
            if not srcs:
                return None
            out.append([(w, i) for w in srcs])
    return out


def _co_choices(sk: Skeleton) -> list[list[list[tuple[int, int]]]]:
    out = []
    for addr, init in sk.init_writes.items():
        ws = [i for i, e in enumerate(sk.events) if e.kind == W and e.loc == addr and i != init]
        orders = []
        for perm in itertools.permutations(ws):
            chain = [init, *perm]
            orders.append([(a, b) for k, a in enumerate(chain) for b in chain[k + 1:]])
        out.append(orders)
    return out


def _takes_and_gens(sk: Skeleton):
    takes = [i for i, e in enumerate(sk.events) if e.is_take and e.intid is not None]
    gens = [i for i, e in enumerate(sk.events) if e.kind == GEN]
    return takes, gens


def _witness_choices(sk: Skeleton) -> list[list[tuple[int, int]]]:
    """Every interrupt relation: each take is witnessed by a nonempty set of
    same-INTID generates targeting its thread, and every delivery of a
    generate to a thread that declares injection points is covered."""
    takes, gens = _takes_and_gens(sk)
    if not takes and not gens:
        return [[]]
    per_take = []
    for t in takes:
        te = sk.events[t]
        cands = [g for g in gens if sk.events[g].intid == te.intid and te.thread in sk.events[g].targets]
        subsets = [s for r in range(1, len(cands) + 1) for s in itertools.combinations(cands, r)]
        if not subsets:
            return []
        per_take.append([(t, s) for s in subsets])
    receivers = {inj.tid for inj in sk.test.injections}
    needed = {(g, tid) for g in gens for tid in sk.events[g].targets if tid in receivers}
    out = []
    for combo in itertools.product(*per_take):
        covered = {(g, sk.events[t].thread) for t, s in combo for g in s}
        if needed <= covered:
            out.append([(g, t) for t, s in combo for g in s])
    return out


def enumerate_candidates(test: LitmusTest, config: ModelConfig | None = None, *,
                         feasible_only: bool = True) -> Iterator[CandidateExecution]:
    """Yield every well-formed candidate execution of ``test``.

    Raises :class:`BoundExceeded` once more than ``config.max_candidates``
    candidates have been produced.
    """
    from .gic import feasible_witness

    config = config or ModelConfig()
    gic_on = _gic_enabled(test, config)
    count = 0
    for sk in skeletons(test, config):
        rf_opts = _rf_choices(sk)
        if rf_opts is None:
            continue
        co_opts = _co_choices(sk)
        wit_opts = _witness_choices(sk) if gic_on else [[]]
        for rf_pairs in itertools.product(*rf_opts):
            rf = Relation.of(sk.n, rf_pairs)
            for co_parts in itertools.product(*co_opts):
                co = Relation.of(sk.n, itertools.chain.from_iterable(co_parts))
                for wit in wit_opts:
                    cand = CandidateExecution(sk, rf, co, Relation.of(sk.n, wit))
                    if gic_on and feasible_only and not feasible_witness(cand, config):
                        continue
                    count += 1
                    if count > config.max_candidates:
                        raise BoundExceeded(f"more than {config.max_candidates} candidates")
                    yield cand


# final condition -----------------------------------------------------------


def check_final(cand: CandidateExecution, cond: FinalCondition) -> bool:
    test = cand.skeleton.test
    addrs = test.addresses()
    regs = cand.final_registers()
    mem = cand.final_memory()

    def value(v):
        return addrs[v] if isinstance(v, str) else v

    def ev(c) -> bool:
        if isinstance(c, TrueCond):
            return True
        if isinstance(c, Atom):
            if c.tid is None:
                return mem[addrs[c.name]] == value(c.value)
            return regs[c.tid][int(c.name[1:])] == value(c.value)
        if isinstance(c, And):
            return all(ev(i) for i in c.items)
        if isinstance(c, Or):
            return any(ev(i) for i in c.items)
        if isinstance(c, Not):
            return not ev(c.item)
        raise TypeError(c)

    return ev(cond)
