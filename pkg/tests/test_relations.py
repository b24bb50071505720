"""Relation algebra: closures, the incremental order, and the naive oracle."""

from __future__ import annotations

import random

from rdmacheck.relations import IncrementalOrder, Rel, acyclic_closure, identity


def naive_closure(pairs):
    """Fixpoint oracle: iterate one-step extension until stable."""
    work = set(pairs)
    while True:
        new = {(a, d) for a, b in work for c, d in work if b == c} - work
        if not new:
            return work
        work |= new


def test_empty():
    c, irr = acyclic_closure(Rel())
    assert c.pairs == frozenset() and irr


def test_two_cycle():
    c, irr = acyclic_closure(Rel([("x", "y"), ("y", "x")]))
    assert ("x", "x") in c and not irr


def test_three_chain():
    r = Rel([(1, 2), (2, 3), (3, 4)])
    c, irr = acyclic_closure(r)
    assert irr
    assert c.pairs == frozenset(naive_closure(r.pairs))
    assert len(c.pairs - r.pairs) == 3


def test_matches_naive_oracle_on_random_relations():
    rng = random.Random(20240817)
    for _ in range(300):
        n = rng.randint(0, 8)
        items = list(range(n))
        pairs = {(rng.choice(items), rng.choice(items))
                 for _ in range(rng.randint(0, 12))} if items else set()
        c, irr = acyclic_closure(Rel(pairs))
        want = naive_closure(pairs)
        assert c.pairs == frozenset(want)
        assert irr == all(a != b for a, b in want)


def test_compose_inverse_restrict():
    r1 = Rel([(1, 2), (2, 3)])
    r2 = Rel([(2, 9), (3, 9)])
    assert r1.compose(r2).pairs == {(1, 9), (2, 9)}
    assert r1.inverse().pairs == {(2, 1), (3, 2)}
    assert r1.restrict({1, 2}).pairs == {(1, 2)}
    assert identity([1, 2]).pairs == {(1, 1), (2, 2)}


def test_incremental_order_detects_cycles():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(1, 7)
        edges = [(rng.randrange(n), rng.randrange(n))
                 for _ in range(rng.randint(1, 10))]
        inc = IncrementalOrder()
        ok = inc.add_edges(edges)
        want = all(a != b for a, b in naive_closure(edges))
        assert ok == want
        if ok:
            assert inc.to_rel().pairs == frozenset(naive_closure(edges))
