"""Finite binary relations over a dense carrier of event ids.

Relations are immutable and store one bitset row per event. The hot kernels
(composition, transitive closure, acyclicity) come from the compiled
``_kernels`` extension when it is importable, else from ``_kernels_py``.
Set ``ELITMUS_PURE=1`` to force the pure-Python kernels.
"""

from __future__ import annotations

import os
from typing import Iterable, Iterator

if os.environ.get("ELITMUS_PURE"):
    from . import _kernels_py as _k
else:
    try:
        from . import _kernels as _k  # type: ignore[attr-defined]
    except ImportError:  # pragma: no cover - depends on build
        from . import _kernels_py as _k

BACKEND = "compiled" if _k.__name__.endswith("_kernels") else "python"


class CarrierMismatch(ValueError):
    pass


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class EventSet:
    """A subset of the carrier, stored as a bitmask."""

    __slots__ = ("n", "mask", "tag")

    def __init__(self, n: int, mask: int = 0, tag: str = ""):
        self.n = n
        self.mask = mask & ((1 << n) - 1)
        self.tag = tag

    @classmethod
    def of(cls, n: int, ids: Iterable[int], tag: str = "") -> "EventSet":
        m = 0
        for i in ids:
            m |= 1 << i
        return cls(n, m, tag)

    def _check(self, other: "EventSet") -> None:
        if self.n != other.n:
            raise CarrierMismatch(f"carrier {self.n} != {other.n}")

    def __or__(self, other: "EventSet") -> "EventSet":
        self._check(other)
        return EventSet(self.n, self.mask | other.mask)

    def __and__(self, other: "EventSet") -> "EventSet":
        self._check(other)
        return EventSet(self.n, self.mask & other.mask)

    def __sub__(self, other: "EventSet") -> "EventSet":
        self._check(other)
        return EventSet(self.n, self.mask & ~other.mask)

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def __iter__(self) -> Iterator[int]:
        return _bits(self.mask)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EventSet) and (self.n, self.mask) == (other.n, other.mask)

    def __hash__(self) -> int:
        return hash((self.n, self.mask))

    def __repr__(self) -> str:
        return f"EventSet({self.tag or ''}{sorted(self)})"


class Relation:
    __slots__ = ("n", "rows")

    def __init__(self, n: int, rows: Iterable[int] | None = None):
        self.n = n
        if rows is None:
            self.rows = (0,) * n
        else:
            full = (1 << n) - 1
            self.rows = tuple(r & full for r in rows)
            if len(self.rows) != n:
                raise ValueError("row count must equal carrier size")

    @classmethod
    def of(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Relation":
        rows = [0] * n
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"pair {(a, b)} outside carrier of size {n}")
            rows[a] |= 1 << b
        return cls(n, rows)

    @classmethod
    def identity(cls, s: EventSet) -> "Relation":
        rows = [0] * s.n
        for i in s:
            rows[i] = 1 << i
        return cls(s.n, rows)

    @classmethod
    def cross(cls, a: EventSet, b: EventSet) -> "Relation":
        a._check(b)
        return cls(a.n, [b.mask if i in a else 0 for i in range(a.n)])

    def _check(self, other: "Relation") -> None:
        if self.n != other.n:
            raise CarrierMismatch(f"carrier {self.n} != {other.n}")

    # algebra

    def __or__(self, other: "Relation") -> "Relation":
        self._check(other)
        return Relation(self.n, [a | b for a, b in zip(self.rows, other.rows)])

    def __and__(self, other: "Relation") -> "Relation":
        self._check(other)
        return Relation(self.n, [a & b for a, b in zip(self.rows, other.rows)])

    def __sub__(self, other: "Relation") -> "Relation":
        self._check(other)
        return Relation(self.n, [a & ~b for a, b in zip(self.rows, other.rows)])

    def seq(self, other: "Relation") -> "Relation":
        """Relational composition ``self ; other``."""
        self._check(other)
        return Relation(self.n, _k.compose(self.rows, other.rows, self.n))

    def inverse(self) -> "Relation":
        rows = [0] * self.n
        for i, r in enumerate(self.rows):
            for j in _bits(r):
                rows[j] |= 1 << i
        return Relation(self.n, rows)

    def restrict(self, dom: EventSet, rng: EventSet) -> "Relation":
        return Relation(self.n, [r & rng.mask if i in dom else 0 for i, r in enumerate(self.rows)])

    def plus(self) -> "Relation":
        """Transitive closure."""
        return Relation(self.n, _k.closure(self.rows, self.n))

    def domain(self) -> EventSet:
        return EventSet.of(self.n, (i for i, r in enumerate(self.rows) if r))

    def range(self) -> EventSet:
        m = 0
        for r in self.rows:
            m |= r
        return EventSet(self.n, m)

    # predicates

    def is_empty(self) -> bool:
        return not any(self.rows)

    def is_irreflexive(self) -> bool:
        return not any(r >> i & 1 for i, r in enumerate(self.rows))

    def is_acyclic(self) -> bool:
        return _k.is_acyclic(self.rows, self.n)

    # container protocol

    def __contains__(self, pair: tuple[int, int]) -> bool:
        a, b = pair
        return bool(self.rows[a] >> b & 1)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        for i, r in enumerate(self.rows):
            for j in _bits(r):
                yield (i, j)

    def __len__(self) -> int:
        return sum(bin(r).count("1") for r in self.rows)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Relation) and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def __repr__(self) -> str:
        return f"Relation({self.n}, {sorted(self)})"

    def successors(self, i: int) -> EventSet:
        return EventSet(self.n, self.rows[i])

    def find_cycle(self) -> list[int] | None:
        """Return one cycle as a list of ids, or None when acyclic."""
        color = [0] * self.n
        parent = [-1] * self.n
        for root in range(self.n):
            if color[root]:
                continue
            stack = [(root, iter(_bits(self.rows[root])))]
            color[root] = 1
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    color[node] = 2
                    stack.pop()
                    continue
                if color[nxt] == 1:
                    cyc = [node]
                    cur = node
                    while cur != nxt:
                        cur = parent[cur]
                        cyc.append(cur)
                    cyc.reverse()
                    return cyc
                if color[nxt] == 0:
                    color[nxt] = 1
                    parent[nxt] = node
                    stack.append((nxt, iter(_bits(self.rows[nxt]))))
        return None


# functional spellings used by the model code and tests

def compose(r1: Relation, r2: Relation) -> Relation:
    return r1.seq(r2)


def union(*rs: Relation) -> Relation:
    out = rs[0]
    for r in rs[1:]:
        out = out | r
    return out


def intersect(r1: Relation, r2: Relation) -> Relation:
    return r1 & r2


def difference(r1: Relation, r2: Relation) -> Relation:
    return r1 - r2


def inverse(r: Relation) -> Relation:
    return r.inverse()


def identity_on(s: EventSet) -> Relation:
    return Relation.identity(s)


def restrict(r: Relation, dom: EventSet, rng: EventSet) -> Relation:
    return r.restrict(dom, rng)


def transitive_closure(r: Relation) -> Relation:
    return r.plus()


def domain(r: Relation) -> EventSet:
    return r.domain()


def range_of(r: Relation) -> EventSet:
    return r.range()


def acyclic(r: Relation) -> bool:
    return r.is_acyclic()


def irreflexive(r: Relation) -> bool:
    return r.is_irreflexive()


def empty(r: Relation) -> bool:
    return r.is_empty()
