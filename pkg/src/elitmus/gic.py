"""Interrupt-controller lifecycle and the SGI extension of the model.

Each (thread, INTID) pair owns a four-state automaton. Generates assert,
acknowledges activate, deactivates retire; a take needs the INTID pending.
A witness is feasible when some linearisation of the GIC-relevant events,
consistent with ob, drives every automaton only along legal edges.
"""

from __future__ import annotations

from .config import ModelConfig
from .isa import ACK, DEACT, GEN, GIC_KINDS, R, W, DROP
from .relation import Relation

INACTIVE, PENDING, ACTIVE, ACTIVE_PENDING = "Inactive", "Pending", "Active", "ActiveAndPending"
STATES = (INACTIVE, PENDING, ACTIVE, ACTIVE_PENDING)

ASSERT, TAKE, ACKNOWLEDGE, DEACTIVATE, HAVOC = "assert", "take", "ack", "deactivate", "havoc"

_ASSERT = {INACTIVE: PENDING, PENDING: PENDING, ACTIVE: ACTIVE_PENDING, ACTIVE_PENDING: ACTIVE_PENDING}
_ACK = {PENDING: ACTIVE}
_DEACT = {ACTIVE: INACTIVE, ACTIVE_PENDING: PENDING}

WRITE_LIKE = frozenset({W, GEN, DROP, DEACT})
READ_LIKE = frozenset({R, ACK})


def step(state: str, action: str) -> tuple[str, ...]:
    """Successor states of one automaton step; empty when the step is illegal."""
    if action == ASSERT:
        return (_ASSERT[state],)
    if action == TAKE:
        return (state,) if state == PENDING else ()
    if action == ACKNOWLEDGE:
        return (_ACK.get(state, state),)
    if action == DEACTIVATE:
        return (_DEACT.get(state, state),)
    if action == HAVOC:
        return STATES
    raise ValueError(f"unknown action {action!r}")


def run_trace(actions, start: str = INACTIVE) -> bool:
    """Whether some resolution of a sequential action list is legal."""
    states = {start}
    for a in actions:
        states = {s2 for s in states for s2 in step(s, a)}
        if not states:
            return False
    return True


def _gic_steps(cand) -> list[tuple[int, list[tuple[tuple[int, int], str]]]]:
    """(event id, [(automaton key, action)]) for every GIC-relevant event."""
    out = []
    for i, e in enumerate(cand.events):
        if e.kind == GEN:
            out.append((i, [((t, e.intid), ASSERT) for t in sorted(e.targets)]))
        elif e.is_take and e.intid is not None:
            out.append((i, [((e.thread, e.intid), TAKE)]))
        elif e.kind == ACK:
            out.append((i, [((e.thread, e.intid), ACKNOWLEDGE)]))
        elif e.kind == DEACT:
            out.append((i, [((e.thread, e.intid), HAVOC if e.unpredictable else DEACTIVATE)]))
    return out


def find_run(steps, order: Relation):
    """Search for a linearisation of ``steps`` consistent with ``order`` that
    every automaton accepts. Returns the run as (event, key, state) triples or
    None."""
    ids = [i for i, _ in steps]
    acts = dict(steps)
    keys = sorted({k for _, a in steps for k, _ in a})
    kidx = {k: j for j, k in enumerate(keys)}
    m = len(ids)
    local = {i: j for j, i in enumerate(ids)}
    preds = [0] * m
    for j, i in enumerate(ids):
        for i2 in ids:
            if (i2, i) in order:
                preds[j] |= 1 << local[i2]
    full = (1 << m) - 1
    dead: set = set()

    def go(placed: int, states: tuple, run: list):
        if placed == full:
            return run
        if (placed, states) in dead:
            return None
        for j in range(m):
            if placed >> j & 1 or preds[j] & ~placed:
                continue
            i = ids[j]
            for nxt in _apply(states, acts[i]):
                res = go(placed | 1 << j, nxt, run + [(i, acts[i], nxt)])
                if res is not None:
                    return res
        dead.add((placed, states))
        return None

    def _apply(states, actions):
        outs = [states]
        for key, action in actions:
            k = kidx[key]
            new = []
            for st in outs:
                for s2 in step(st[k], action):
                    new.append(st[:k] + (s2,) + st[k + 1:])
            outs = new
        return outs

    return go(0, (INACTIVE,) * len(keys), [])


def feasible_witness(cand, config: ModelConfig) -> bool:
    from .model import derive

    steps = _gic_steps(cand)
    if not steps:
        return True
    ob = derive(cand, config).ob
    if not ob.is_irreflexive():
        # No linearisation exists; leave the rejection to the external axiom
        # so that the report names the ob cycle.
        return True
    return find_run(steps, ob) is not None


def gic_ob_extension(cand, base) -> Relation:
    """Extra ob pairs contributed by the GIC extension.

    ``interrupt`` and the register-access-to-GIC-event links are included
    directly; DSBs order GIC events against everything on the same thread,
    with DSB ST acting on write-like and DSB LD on read-like upstream events.
    """
    sk = cand.skeleton
    pairs = set(cand.interrupt) | set(sk.iio)
    for tid, g in sk.graphs.items():
        off = sk.offsets[tid]
        evs = g.events
        for d, de in enumerate(evs):
            if de.fence is None or not de.fence.startswith("DSB"):
                continue
            kind = de.fence[4:]
            for x in range(d):
                ex = evs[x]
                if kind == "ST" and ex.kind not in WRITE_LIKE:
                    continue
                if kind == "LD" and ex.kind not in READ_LIKE:
                    continue
                for y in range(d + 1, len(evs)):
                    if ex.kind in GIC_KINDS or evs[y].kind in GIC_KINDS:
                        pairs.add((x + off, y + off))
    return Relation.of(cand.n, pairs)
