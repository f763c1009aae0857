import os
import random
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elitmus import relation as R
from elitmus import _kernels_py
from elitmus.relation import CarrierMismatch, EventSet, Relation

from oracles import dfs_has_cycle, floyd_warshall, iterated_squaring

N = 8


def rels(n=N):
    pairs = st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n * 3)
    return pairs.map(lambda ps: Relation.of(n, ps))


def sets(n=N):
    return st.sets(st.integers(0, n - 1)).map(lambda s: EventSet.of(n, s))


def test_compose_example():
    a = Relation.of(3, [(0, 1)])
    b = Relation.of(3, [(1, 2)])
    assert set(R.compose(a, b)) == {(0, 2)}


def test_closure_of_three_cycle():
    r = Relation.of(3, [(0, 1), (1, 2), (2, 0)])
    assert set(R.transitive_closure(r)) == {(i, j) for i in range(3) for j in range(3)}


def test_predicates_on_small_relations():
    two = Relation.of(2, [(0, 1), (1, 0)])
    assert not R.acyclic(two)
    empty = Relation(3)
    assert R.acyclic(empty) and R.irreflexive(empty) and R.empty(empty)


def test_carrier_mismatch():
    with pytest.raises(CarrierMismatch):
        Relation(2) | Relation(3)
    with pytest.raises(CarrierMismatch):
        EventSet(2) | EventSet(3)


def test_pairs_outside_carrier_rejected():
    with pytest.raises(ValueError):
        Relation.of(2, [(0, 2)])


def test_find_cycle_returns_real_cycle():
    r = Relation.of(5, [(0, 1), (1, 2), (2, 3), (3, 1), (3, 4)])
    cyc = r.find_cycle()
    assert cyc is not None
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        assert (a, b) in r
    assert Relation.of(3, [(0, 1), (1, 2)]).find_cycle() is None
    assert Relation.of(2, [(1, 1)]).find_cycle() == [1]


def test_domain_range_identity():
    r = Relation.of(4, [(0, 1), (2, 3)])
    assert set(r.domain()) == {0, 2}
    assert set(R.range_of(r)) == {1, 3}
    s = EventSet.of(4, [1, 3])
    assert set(R.identity_on(s)) == {(1, 1), (3, 3)}


# algebraic laws ------------------------------------------------------------


@settings(max_examples=1000, deadline=None)
@given(rels(), rels(), rels())
def test_composition_associative(a, b, c):
    assert a.seq(b).seq(c) == a.seq(b.seq(c))


@settings(max_examples=1000, deadline=None)
@given(rels(), rels(), rels())
def test_composition_distributes_over_union(a, b, c):
    assert a.seq(b | c) == a.seq(b) | a.seq(c)
    assert (a | b).seq(c) == a.seq(c) | b.seq(c)


@settings(max_examples=1000, deadline=None)
@given(rels(), rels())
def test_inverse_anti_homomorphism(a, b):
    assert a.seq(b).inverse() == b.inverse().seq(a.inverse())


@settings(max_examples=1000, deadline=None)
@given(rels())
def test_closure_idempotent_and_transitive(a):
    c = a.plus()
    assert c.plus() == c
    assert (c.seq(c) - c).is_empty()
    assert (a - c).is_empty()


@settings(max_examples=1000, deadline=None)
@given(rels(), sets(), sets())
def test_restrict_is_identity_sandwich(r, s, t):
    assert Relation.identity(s).seq(r).seq(Relation.identity(t)) == r.restrict(s, t)


@settings(max_examples=1000, deadline=None)
@given(rels())
def test_acyclic_iff_closure_irreflexive(r):
    assert r.is_acyclic() == r.plus().is_irreflexive()


# brute-force oracles -------------------------------------------------------


def _random_graph(rng, max_n):
    n = rng.randint(1, max_n)
    density = rng.random() * 0.3
    pairs = [(i, j) for i in range(n) for j in range(n) if rng.random() < density]
    return n, pairs


def test_closure_matches_floyd_warshall_and_squaring():
    rng = random.Random(1)
    for _ in range(200):
        n, pairs = _random_graph(rng, 20)
        got = set(Relation.of(n, pairs).plus())
        assert got == floyd_warshall(n, pairs) == iterated_squaring(n, pairs)


def test_acyclic_matches_dfs():
    rng = random.Random(2)
    for _ in range(500):
        n, pairs = _random_graph(rng, 30)
        assert Relation.of(n, pairs).is_acyclic() == (not dfs_has_cycle(n, pairs))


def test_backends_agree():
    rng = random.Random(3)
    for _ in range(200):
        n, pairs = _random_graph(rng, 90)
        n2, pairs2 = n, [(rng.randrange(n), rng.randrange(n)) for _ in range(n)]
        a, b = Relation.of(n, pairs), Relation.of(n2, pairs2)
        assert list(R._k.compose(a.rows, b.rows, n)) == _kernels_py.compose(a.rows, b.rows, n)
        assert list(R._k.closure(a.rows, n)) == _kernels_py.closure(a.rows, n)
        assert R._k.is_acyclic(a.rows, n) == _kernels_py.is_acyclic(a.rows, n)


def test_pure_backend_selected_by_environment():
    code = ("import sys; from elitmus import relation; from elitmus.harness import check; "
            "from elitmus.litmus import load_test; print(relation.BACKEND, check(load_test(sys.argv[1])).outcome)")
    path = Path(__file__).resolve().parents[1] / "src" / "elitmus" / "corpus" / "LB+pos.elitmus"
    env = dict(os.environ, ELITMUS_PURE="1")
    out = subprocess.run([sys.executable, "-c", code, str(path)], env=env, capture_output=True, text=True)
    assert out.stdout.split() == ["python", "Allowed"]
