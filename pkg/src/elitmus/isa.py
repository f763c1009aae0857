"""Per-thread semantics of the mini-ISA.

A thread is run under a *choice sequence* that fixes every nondeterministic
decision: the value returned by each memory read, whether an interrupt is
taken at an injection point (and with which INTID), and whether each
store-exclusive succeeds. Running a thread under a choice sequence is a pure
function producing a :class:`ThreadGraph`; :func:`thread_paths` enumerates
every choice sequence by replay.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .config import ModelConfig
from .litmus import Imm, Instruction, LabelRef, LitmusTest, Mem, Reg, SysReg

MASK64 = (1 << 64) - 1
SPURIOUS_INTID = 1023
ESR_EC_SVC = 0x15 << 26
ESR_EC_DABT = 0x25 << 26
SGI_IRM_BIT = 40

R, W, F, TE, ERET, MSR, MRS = "R", "W", "F", "TE", "ERET", "MSR", "MRS"
GEN, ACK, DROP, DEACT = "GenerateInterrupt", "Acknowledge", "DropPriority", "Deactivate"
GIC_KINDS = frozenset({GEN, ACK, DROP, DEACT})


class ElaborationError(Exception):
    pass


class BoundExceeded(Exception):
    pass


@dataclass(frozen=True)
class Event:
    thread: int
    fdx: int
    seq: int
    kind: str
    loc: int | None = None
    value: int | None = None
    attrs: frozenset = frozenset()
    fence: str | None = None  # e.g. "DMB.ST", "DSB.SY", "ISB"
    cause: str | None = None  # TE: SVC, PageFault, IRQ
    sysreg: str | None = None
    targets: frozenset = frozenset()
    intid: int | None = None
    unpredictable: bool = False  # DIR write with EOImode=0

    @property
    def is_gic(self) -> bool:
        return self.kind in GIC_KINDS

    @property
    def is_take(self) -> bool:
        return self.kind == TE and self.cause == "IRQ"

    def label(self) -> str:
        k = self.kind
        if k in (R, W):
            a = "".join(sorted(self.attrs))
            return f"{k}{a and '.' + a} {self.loc:#x}={self.value}"
        if k == F:
            return self.fence
        if k == TE:
            return f"TE({self.cause}{'' if self.intid is None else ', intid=%d' % self.intid})"
        if k in (MSR, MRS):
            return f"{k} {self.sysreg}"
        if k == GEN:
            return f"Generate(intid={self.intid}, to={sorted(self.targets)})"
        if k in (ACK, DROP, DEACT):
            return f"{k}({self.intid})"
        return k


@dataclass
class ThreadGraph:
    """Events of one thread plus its intra-thread relations (local indices)."""

    tid: int
    events: list[Event]
    addr: set = field(default_factory=set)
    data: set = field(default_factory=set)
    ctrl: set = field(default_factory=set)
    rmw: set = field(default_factory=set)
    iio: set = field(default_factory=set)
    regs: tuple = ()
    masked: list[bool] = field(default_factory=list)
    choices: tuple = ()

    def program_events(self) -> list[int]:
        return [i for i, e in enumerate(self.events) if not e.is_gic]

    def po(self) -> set[tuple[int, int]]:
        prog = self.program_events()
        return {(a, b) for k, a in enumerate(prog) for b in prog[k + 1:]}

    def masked_intervals(self) -> list[tuple[int, int]]:
        """Maximal runs of program events executed with interrupts masked."""
        out, start = [], None
        prog = self.program_events()
        for i in prog:
            if self.masked[i] and start is None:
                start = i
            elif not self.masked[i] and start is not None:
                out.append((start, prev))
                start = None
            prev = i
        if start is not None:
            out.append((start, prev))
        return out


@dataclass
class Domains:
    """Values each location may hold and INTIDs each thread may receive."""

    mem: dict[int, set[int]]
    sgi: dict[int, set[int]]

    def freeze(self):
        return (tuple(sorted((a, tuple(sorted(v))) for a, v in self.mem.items())),
                tuple(sorted((t, tuple(sorted(v))) for t, v in self.sgi.items())))


# the replay oracle ---------------------------------------------------------


class _Oracle:
    def __init__(self, prefix: tuple[int, ...]):
        self.prefix = prefix
        self.trail: list[tuple[int, int]] = []  # (n_options, chosen)

    def choose(self, n: int) -> int:
        k = len(self.trail)
        c = self.prefix[k] if k < len(self.prefix) else 0
        if not 0 <= c < n:
            raise ElaborationError(f"choice {c} out of range at decision {k} ({n} options)")
        self.trail.append((n, c))
        return c


# execution -----------------------------------------------------------------


class _Thread:
    def __init__(self, test: LitmusTest, tid: int, domains: Domains, config: ModelConfig, oracle: _Oracle):
        self.test, self.tid, self.dom, self.cfg, self.oracle = test, tid, domains, config, oracle
        self.addrs = test.addresses()
        self.sections = {"main": test.threads[tid], "handler": test.handlers.get(tid, ())}
        self.labels = {
            sec: {ins.label: i for i, ins in enumerate(prog) if ins.label} for sec, prog in self.sections.items()
        }
        self.inject_at = {inj.label for inj in test.injections if inj.tid == tid}
        em = test.eoimode(tid)
        self.eoimode = config.eoimode if em is None else em
        self.regs: list[tuple[int, frozenset]] = [(0, frozenset())] * 32
        for (t, r), v in test.init_regs.items():
            if t == tid:
                self.regs[r] = (self.addrs[v] if isinstance(v, str) else v, frozenset())
        self.sys: dict[str, tuple[int, frozenset]] = {
            n: (0, frozenset()) for n in ("ESR_EL1", "ELR_EL1", "VBAR_EL1", "TPIDR_EL1")
        }
        self.elr_written = False
        self.flags: tuple[int, frozenset] = (1, frozenset())
        self.ctrl_src: frozenset = frozenset()
        self.g = ThreadGraph(tid, [])
        self.masked = False
        self.saved = None  # (section, pc, mask, cause)
        self.cur_intid: int | None = None
        self.fdx = -1
        self.seq = 0
        self.takes = 0
        self.monitor: tuple[int, int] | None = None  # (read event, address)
        self.steps = 0

    # event emission

    def _new_instance(self):
        self.fdx += 1
        self.seq = 0

    def emit(self, kind: str, **kw) -> int:
        ev = Event(self.tid, self.fdx, self.seq, kind, **kw)
        self.seq += 1
        i = len(self.g.events)
        self.g.events.append(ev)
        self.g.masked.append(self.masked)
        if kind not in GIC_KINDS:
            for s in self.ctrl_src:
                self.g.ctrl.add((s, i))
        return i

    def emit_gic(self, inducer: int, kind: str, **kw) -> int:
        i = self.emit(kind, **kw)
        self.g.iio.add((inducer, i))
        return i

    # register helpers

    def rd(self, r: Reg) -> tuple[int, frozenset]:
        return self.regs[r.n]

    def wr(self, r: Reg, v: int, deps: frozenset) -> None:
        self.regs[r.n] = (v & MASK64, deps)

    def operand(self, a) -> tuple[int, frozenset]:
        return (a.v, frozenset()) if isinstance(a, Imm) else self.rd(a)

    def address(self, m: Mem) -> tuple[int, frozenset]:
        v, d = self.regs[m.base]
        if m.index is not None:
            iv, idp = self.regs[m.index]
            v, d = v + iv, d | idp
        return (v + m.offset) & MASK64, d

    def location(self, addr: int, ins: Instruction) -> int:
        if addr not in self.dom.mem:
            raise ElaborationError(f"thread {self.tid}: access to unknown address {addr:#x} in `{ins}`")
        return addr

    # exceptions

    def take_exception(self, cause: str, ret_section: str, ret_pc: int | None, esr: int | None, intid=None):
        # Exception entry consumes VBAR and any explicitly written ELR value.
        deps = self.sys["VBAR_EL1"][1]
        if self.elr_written:
            deps |= self.sys["ELR_EL1"][1]
        self.ctrl_src |= deps
        te = self.emit(TE, cause=cause, intid=intid)
        self.saved = (ret_section, ret_pc, self.masked, cause)
        self.sys["ELR_EL1"] = (0, frozenset())
        self.elr_written = False
        if esr is not None:
            self.sys["ESR_EL1"] = (esr, frozenset())
        self.masked = True
        if cause == "IRQ":
            self.cur_intid = intid
        return te

    # main loop

    def run(self) -> ThreadGraph:
        sec, pc = "main", 0
        while True:
            prog = self.sections[sec]
            if pc >= len(prog):
                break
            self.steps += 1
            if self.steps > self.cfg.max_steps:
                raise BoundExceeded(f"thread {self.tid} exceeded {self.cfg.max_steps} steps")
            ins = prog[pc]
            if ins.label in self.inject_at and not self.masked and self.takes < self.cfg.max_takes:
                options = self._intid_options()
                if options and self.oracle.choose(2):
                    intid = options[self.oracle.choose(len(options))] if len(options) > 1 else options[0]
                    self.takes += 1
                    self._new_instance()
                    self.take_exception("IRQ", sec, pc, None, intid)
                    sec, pc = "handler", 0
                    continue
            nxt = self.step(sec, pc, ins)
            if nxt is None:
                break
            sec, pc = nxt
        self.g.regs = tuple(v for v, _ in self.regs[:31])
        self.g.choices = tuple(c for _, c in self.oracle.trail)
        return self.g

    def _intid_options(self) -> list:
        if not self.test.handlers.get(self.tid):
            return []
        if not _gic_enabled(self.test, self.cfg):
            return [None]
        return sorted(self.dom.sgi.get(self.tid, ()))

    def step(self, sec: str, pc: int, ins: Instruction):
        op, a = ins.op, ins.args
        self._new_instance()
        nxt = (sec, pc + 1)
        if op == "NOP":
            pass
        elif op == "MOV":
            v, d = self.operand(a[1])
            self.wr(a[0], v, d)
        elif op in ("ADD", "SUB", "AND", "ORR", "EOR"):
            (x, dx), (y, dy) = self.rd(a[1]), self.operand(a[2])
            f = {"ADD": lambda p, q: p + q, "SUB": lambda p, q: p - q, "AND": lambda p, q: p & q,
                 "ORR": lambda p, q: p | q, "EOR": lambda p, q: p ^ q}[op]
            self.wr(a[0], f(x, y), dx | dy)
        elif op == "CMP":
            (x, dx), (y, dy) = self.rd(a[0]), self.operand(a[1])
            self.flags = ((x - y) & MASK64, dx | dy)
        elif op == "B":
            nxt = (sec, self.labels[sec][a[0].name])
        elif op.startswith("B."):
            v, d = self.flags
            self.ctrl_src |= d
            if (v == 0) == (op == "B.EQ"):
                nxt = (sec, self.labels[sec][a[0].name])
        elif op in ("CBZ", "CBNZ"):
            v, d = self.rd(a[0])
            self.ctrl_src |= d
            if (v == 0) == (op == "CBZ"):
                nxt = (sec, self.labels[sec][a[1].name])
        elif op in ("LDR", "LDAR", "LDAPR", "LDXR", "LDAXR"):
            nxt = self.load(sec, pc, ins, nxt)
        elif op in ("STR", "STLR"):
            nxt = self.store(sec, pc, ins, nxt)
        elif op in ("STXR", "STLXR"):
            self.store_exclusive(ins)
        elif op in ("DMB", "DSB"):
            self.emit(F, fence=f"{op}.{a[0]}")
        elif op == "ISB":
            self.emit(F, fence="ISB")
        elif op == "SVC":
            self.take_exception("SVC", sec, pc + 1, ESR_EC_SVC | (a[0].v & 0xFFFF))
            nxt = ("handler", 0)
        elif op == "ERET":
            if self.saved is None:
                raise ElaborationError(f"thread {self.tid}: ERET outside an exception handler")
            self.ctrl_src |= self.sys["ELR_EL1"][1]
            self.emit(ERET)
            rsec, rpc, mask, cause = self.saved
            self.saved = None
            self.masked = mask
            self.cur_intid = None
            self.elr_written = False
            nxt = None if cause == "PageFault" else (rsec, rpc)
        elif op == "MRS":
            self.mrs(a[0], a[1].name)
        elif op == "MSR":
            self.msr(a[0].name, a[1])
        else:  # pragma: no cover - parser rejects these
            raise ElaborationError(f"unsupported instruction {ins}")
        return nxt

    def load(self, sec, pc, ins, nxt):
        dst, mem = ins.args
        addr, adeps = self.address(mem)
        if ins.fault:
            return self.fault(sec, pc, adeps)
        loc = self.location(addr, ins)
        options = sorted(self.dom.mem[loc])
        value = options[self.oracle.choose(len(options))] if len(options) > 1 else options[0]
        attrs = {"LDAR": {"A"}, "LDAPR": {"Q"}, "LDXR": {"X"}, "LDAXR": {"A", "X"}}.get(ins.op, set())
        i = self.emit(R, loc=loc, value=value, attrs=frozenset(attrs))
        for s in adeps:
            self.g.addr.add((s, i))
        if "X" in attrs:
            self.monitor = (i, loc)
        self.wr(dst, value, frozenset({i}))
        if mem.post is not None:
            self.regs[mem.base] = ((self.regs[mem.base][0] + mem.post) & MASK64, self.regs[mem.base][1])
        return nxt

    def store(self, sec, pc, ins, nxt):
        src, mem = ins.args
        addr, adeps = self.address(mem)
        if ins.fault:
            return self.fault(sec, pc, adeps)
        loc = self.location(addr, ins)
        v, d = self.rd(src)
        attrs = {"STLR": {"L"}}.get(ins.op, set())
        i = self.emit(W, loc=loc, value=v, attrs=frozenset(attrs))
        for s in adeps:
            self.g.addr.add((s, i))
        for s in d:
            self.g.data.add((s, i))
        if mem.post is not None:
            self.regs[mem.base] = ((self.regs[mem.base][0] + mem.post) & MASK64, self.regs[mem.base][1])
        return nxt

    def store_exclusive(self, ins):
        status, src, mem = ins.args
        addr, adeps = self.address(mem)
        loc = self.location(addr, ins)
        paired = self.monitor is not None and self.monitor[1] == loc
        ok = paired and self.oracle.choose(2) == 0
        if ok:
            v, d = self.rd(src)
            attrs = {"X", "L"} if ins.op == "STLXR" else {"X"}
            i = self.emit(W, loc=loc, value=v, attrs=frozenset(attrs))
            for s in adeps:
                self.g.addr.add((s, i))
            for s in d:
                self.g.data.add((s, i))
            self.g.rmw.add((self.monitor[0], i))
        self.monitor = None
        self.wr(status, 0 if ok else 1, frozenset())

    def fault(self, sec, pc, adeps):
        # The fault outcome depends on the address: a control dependency.
        self.ctrl_src |= adeps
        self.take_exception("PageFault", sec, pc, ESR_EC_DABT)
        return ("handler", 0)

    def mrs(self, dst: Reg, name: str):
        if name == "IAR":
            intid = self.cur_intid if self.cur_intid is not None else SPURIOUS_INTID
            i = self.emit(MRS, sysreg=name, value=intid)
            if intid != SPURIOUS_INTID:
                self.emit_gic(i, ACK, intid=intid)
            self.wr(dst, intid, frozenset())
        elif name in self.sys:
            v, d = self.sys[name]
            self.emit(MRS, sysreg=name, value=v)
            self.wr(dst, v, d)
        else:
            raise ElaborationError(f"thread {self.tid}: MRS from write-only register {name}")

    def msr(self, name: str, src):
        if name in ("DAIFSet", "DAIFClr"):
            self.emit(MSR, sysreg=name, value=src.v)
            if src.v & 0b10:  # the I bit
                self.masked = name == "DAIFSet"
            return
        v, d = self.rd(src)
        i = self.emit(MSR, sysreg=name, value=v)
        for s in d:
            self.g.data.add((s, i))
        if name in self.sys:
            self.sys[name] = (v, d)
            if name == "ELR_EL1":
                self.elr_written = True
        elif name == "ICC_SGI1R_EL1":
            self.emit_gic(i, GEN, targets=frozenset(sgi_targets(v, self.tid, self.test.thread_ids)),
                          intid=(v >> 24) & 0xF)
        elif name == "EOIR":
            intid = v & 0xFFFFFF
            self.emit_gic(i, DROP, intid=intid)
            if self.eoimode == 0:
                self.emit_gic(i, DEACT, intid=intid)
        elif name == "DIR":
            self.emit_gic(i, DEACT, intid=v & 0xFFFFFF, unpredictable=self.eoimode == 0)


def sgi_targets(value: int, self_tid: int, tids) -> set[int]:
    if value >> SGI_IRM_BIT & 1:
        return {t for t in tids if t != self_tid}
    mask = value & 0xFFFF
    return {t for t in tids if mask >> t & 1}


def _gic_enabled(test: LitmusTest, cfg: ModelConfig) -> bool:
    return test.uses_gic() if cfg.gic_extension is None else cfg.gic_extension


# public API ----------------------------------------------------------------


def elaborate_thread(test: LitmusTest, tid: int, choices: tuple[int, ...], domains: Domains,
                     config: ModelConfig) -> ThreadGraph:
    """Run thread ``tid`` under an explicit choice sequence."""
    oracle = _Oracle(tuple(choices))
    g = _Thread(test, tid, domains, config, oracle).run()
    if len(oracle.trail) < len(choices):
        raise ElaborationError("unused choices: placement not reachable (e.g. masked injection point)")
    return g


def thread_paths(test: LitmusTest, tid: int, domains: Domains, config: ModelConfig) -> Iterator[ThreadGraph]:
    """Every complete execution of one thread, in choice-lexicographic order."""
    prefix: tuple[int, ...] = ()
    while True:
        oracle = _Oracle(prefix)
        yield _Thread(test, tid, domains, config, oracle).run()
        trail = oracle.trail
        k = len(trail) - 1
        while k >= 0 and trail[k][1] + 1 >= trail[k][0]:
            k -= 1
        if k < 0:
            return
        prefix = tuple(c for _, c in trail[:k]) + (trail[k][1] + 1,)


def dependencies(graph: ThreadGraph) -> tuple[set, set, set]:
    return graph.addr, graph.data, graph.ctrl


def initial_domains(test: LitmusTest) -> Domains:
    addrs = test.addresses()
    mem = {a: {test.init_mem.get(loc, 0)} for loc, a in addrs.items()}
    return Domains(mem, {t: set() for t in test.thread_ids})


def compute_domains(test: LitmusTest, config: ModelConfig, max_rounds: int = 12) -> Domains:
    """Least fixpoint of values writable to each location and INTIDs deliverable to each thread."""
    # Optimistic seed: INTIDs that could be generated if every injection point
    # could fire. Generates that only occur inside handlers (interrupts raised
    # by interrupts) are found this way; unsupported takes are later rejected
    # because they have no generate to witness them.
    seed = initial_domains(test)
    for t in test.handlers:
        seed.sgi[t] = {SPURIOUS_INTID}
    seeded = {t: set() for t in test.thread_ids}
    for tid in test.thread_ids:
        for g in thread_paths(test, tid, seed, config):
            for e in g.events:
                if e.kind == GEN:
                    for t in e.targets:
                        seeded[t].add(e.intid)
    dom = initial_domains(test)
    dom.sgi = seeded
    for _ in range(max_rounds):
        before = dom.freeze()
        new_mem = {a: set(v) for a, v in dom.mem.items()}
        new_sgi = {t: set(v) | seeded[t] for t, v in dom.sgi.items()}
        for tid in test.thread_ids:
            for g in thread_paths(test, tid, dom, config):
                for e in g.events:
                    if e.kind == W:
                        new_mem[e.loc].add(e.value)
                    elif e.kind == GEN:
                        for t in e.targets:
                            new_sgi[t].add(e.intid)
        dom = Domains(new_mem, new_sgi)
        if dom.freeze() == before:
            return dom
    raise BoundExceeded("value domains did not stabilise")
