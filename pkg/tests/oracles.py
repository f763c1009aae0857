"""Independent reference implementations used to cross-check the package.

Nothing here imports the code under test beyond the parsed test structure.
"""

from __future__ import annotations

import itertools
from math import factorial

from elitmus.litmus import And, Atom, Imm, LitmusTest, Not, Or, TrueCond, atoms

# relations -----------------------------------------------------------------


def floyd_warshall(n, pairs):
    reach = [[False] * n for _ in range(n)]
    for a, b in pairs:
        reach[a][b] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                for j in range(n):
                    if reach[k][j]:
                        reach[i][j] = True
    return {(i, j) for i in range(n) for j in range(n) if reach[i][j]}


def iterated_squaring(n, pairs):
    cur = set(pairs)
    while True:
        nxt = cur | {(a, d) for a, b in cur for c, d in cur if b == c}
        if nxt == cur:
            return cur
        cur = nxt


def dfs_has_cycle(n, pairs):
    succ = {i: [] for i in range(n)}
    for a, b in pairs:
        succ[a].append(b)
    state = {}

    def visit(u):
        state[u] = "grey"
        for v in succ[u]:
            if state.get(v) == "grey":
                return True
            if v not in state and visit(v):
                return True
        state[u] = "black"
        return False

    return any(u not in state and visit(u) for u in range(n))


# straight-line interpreter for exception-free tests ------------------------

SIMPLE_OPS = {"MOV", "ADD", "EOR", "LDR", "STR", "DMB", "DSB", "ISB", "NOP"}


def is_simple(test: LitmusTest) -> bool:
    return not test.handlers and not test.injections and all(
        ins.op in SIMPLE_OPS and not ins.fault for prog in test.threads.values() for ins in prog
    )


class _Regs(dict):
    def __missing__(self, k):
        return 0


def _init_regs(test, tid):
    addrs = test.addresses()
    regs = _Regs()
    for (t, r), v in test.init_regs.items():
        if t == tid:
            regs[r] = addrs[v] if isinstance(v, str) else v
    return regs


def _val(regs, a):
    return a.v if isinstance(a, Imm) else regs[a.n]


def _addr(regs, m):
    a = regs[m.base] + m.offset
    if m.index is not None:
        a += regs[m.index]
    return a


def _exec(regs, ins, load, store):
    op, a = ins.op, ins.args
    if op == "MOV":
        regs[a[0].n] = _val(regs, a[1])
    elif op == "ADD":
        regs[a[0].n] = regs[a[1].n] + _val(regs, a[2])
    elif op == "EOR":
        regs[a[0].n] = regs[a[1].n] ^ _val(regs, a[2])
    elif op == "LDR":
        regs[a[0].n] = load(_addr(regs, a[1]))
    elif op == "STR":
        store(_addr(regs, a[1]), regs[a[0].n])


def value_pool(test: LitmusTest) -> set[int]:
    pool = set(test.init_mem.values()) | {0}
    for prog in test.threads.values():
        for ins in prog:
            for a in ins.args:
                if isinstance(a, Imm):
                    pool.add(a.v)
    return pool


def naive_candidate_count(test: LitmusTest) -> int:
    """Candidates of a straight-line test by brute force: guess every read
    value from a value pool, then count rf sources and coherence orders."""
    pool = sorted(value_pool(test))
    addrs = test.addresses()

    def traces(tid):
        prog = test.threads[tid]
        n_reads = sum(1 for i in prog if i.op == "LDR")
        out = []
        for guess in itertools.product(pool, repeat=n_reads):
            regs = _init_regs(test, tid)
            it = iter(guess)
            events = []

            def load(ad):
                v = next(it)
                events.append(("R", ad, v))
                return v

            def store(ad, v):
                events.append(("W", ad, v))

            for ins in prog:
                _exec(regs, ins, load, store)
            out.append(events)
        return out

    total = 0
    for combo in itertools.product(*(traces(t) for t in test.thread_ids)):
        evs = [e for tr in combo for e in tr]
        writes = [(a, v) for k, a, v in evs if k == "W"]
        writes += [(addrs[loc], test.init_mem.get(loc, 0)) for loc in test.locations()]
        rf = 1
        for k, a, v in evs:
            if k == "R":
                rf *= sum(1 for w in writes if w == (a, v))
        co = 1
        for a in addrs.values():
            co *= factorial(sum(1 for k, ad, _ in evs if k == "W" and ad == a))
        total += rf * co
    return total


def sc_outcomes(test: LitmusTest) -> set[tuple]:
    """Final states of every sequentially consistent interleaving, projected
    like :func:`elitmus.harness.allowed_outcomes`."""
    addrs = test.addresses()
    regs_wanted = sorted({(a.tid, int(a.name[1:])) for a in atoms(test.final) if a.tid is not None})
    progs = {t: test.threads[t] for t in test.thread_ids}
    out = set()

    def rec(pcs, regs, mem):
        moved = False
        for t, prog in progs.items():
            if pcs[t] < len(prog):
                moved = True
                r2 = {k: _Regs(v) for k, v in regs.items()}
                m2 = dict(mem)
                _exec(r2[t], prog[pcs[t]], lambda ad: m2[ad], lambda ad, v: m2.__setitem__(ad, v))
                rec({**pcs, t: pcs[t] + 1}, r2, m2)
        if not moved:
            out.add(tuple(regs[t][k] for t, k in regs_wanted)
                    + tuple(mem[addrs[loc]] for loc in test.locations()))

    mem0 = {addrs[loc]: test.init_mem.get(loc, 0) for loc in test.locations()}
    rec({t: 0 for t in progs}, {t: _init_regs(test, t) for t in progs}, mem0)
    return out


def eval_condition(cond, regs, mem) -> bool:
    if isinstance(cond, TrueCond):
        return True
    if isinstance(cond, Atom):
        return (mem[cond.name] if cond.tid is None else regs[cond.tid][int(cond.name[1:])]) == cond.value
    if isinstance(cond, And):
        return all(eval_condition(c, regs, mem) for c in cond.items)
    if isinstance(cond, Or):
        return any(eval_condition(c, regs, mem) for c in cond.items)
    if isinstance(cond, Not):
        return not eval_condition(cond.item, regs, mem)
    raise TypeError(cond)


# GIC lifecycle -------------------------------------------------------------

# Edges of the per-INTID automaton, written out as an explicit table.
EDGES = {
    ("Inactive", "assert"): {"Pending"},
    ("Pending", "assert"): {"Pending"},
    ("Active", "assert"): {"ActiveAndPending"},
    ("ActiveAndPending", "assert"): {"ActiveAndPending"},
    ("Pending", "take"): {"Pending"},
    ("Inactive", "ack"): {"Inactive"},
    ("Pending", "ack"): {"Active"},
    ("Active", "ack"): {"Active"},
    ("ActiveAndPending", "ack"): {"ActiveAndPending"},
    ("Inactive", "deactivate"): {"Inactive"},
    ("Pending", "deactivate"): {"Pending"},
    ("Active", "deactivate"): {"Inactive"},
    ("ActiveAndPending", "deactivate"): {"Pending"},
}
ALL = {"Inactive", "Pending", "Active", "ActiveAndPending"}
for _s in ALL:
    EDGES[(_s, "havoc")] = set(ALL)


def explicit_feasible(events, order) -> bool:
    """events: list of [(key, action), ...] per event; order: set of (i, j)
    index pairs that must be respected. Tries every permutation."""
    m = len(events)
    for perm in itertools.permutations(range(m)):
        pos = {e: k for k, e in enumerate(perm)}
        if any(pos[a] > pos[b] for a, b in order):
            continue
        states = [{}]
        for e in perm:
            nxt = []
            for st in states:
                branches = [dict(st)]
                for key, action in events[e]:
                    new = []
                    for b in branches:
                        for s2 in EDGES.get((b.get(key, "Inactive"), action), ()):
                            new.append({**b, key: s2})
                    branches = new
                nxt.extend(branches)
            states = nxt
            if not states:
                break
        if states:
            return True
    return False
