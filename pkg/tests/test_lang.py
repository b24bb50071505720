"""Plain-semantics tests: composition operators and the unfolding rules."""

from __future__ import annotations

import itertools

import pytest

from rdmacheck.events import Event, InvalidInput, PlainExecution, par_compose, seq_compose
from rdmacheck.lang import (Break, Call, LetF, Loop, Output, Val, interpret_conc,
                            interpret_seq, let, seq)


def ev(tid, eid, m="m", args=(), out=0):
    return Event(tid, eid, m, tuple(args), out)


def plain(events, po=()):
    return PlainExecution(frozenset(events), frozenset(po))


class TestSeqCompose:
    def test_empty(self):
        assert seq_compose(plain([]), plain([])) == plain([])

    def test_singletons_ordered(self):
        e1, e2 = ev(1, 0), ev(1, 1)
        g = seq_compose(plain([e1]), plain([e2]))
        assert g.events == {e1, e2}
        assert g.po == {(e1, e2)}

    def test_chain_cross_product(self):
        # expand the definition by hand: po1 + cross edges to the new event
        e1, e2, e3 = ev(1, 0), ev(1, 1), ev(1, 2)
        g = seq_compose(plain([e1, e2], [(e1, e2)]), plain([e3]))
        assert g.po == {(e1, e2), (e1, e3), (e2, e3)}

    def test_overlap_rejected(self):
        e = ev(1, 0)
        with pytest.raises(InvalidInput):
            seq_compose(plain([e]), plain([e]))


class TestParCompose:
    def test_empty(self):
        assert par_compose(plain([]), plain([])) == plain([])

    def test_no_cross_edges(self):
        e1, e2 = ev(1, 0), ev(2, 0)
        g = par_compose(plain([e1]), plain([e2]))
        assert g.events == {e1, e2} and g.po == frozenset()

    def test_two_chains_stay_disjoint(self):
        a1, a2 = ev(1, 0), ev(1, 1)
        b1, b2 = ev(2, 0), ev(2, 1)
        g = par_compose(plain([a1, a2], [(a1, a2)]), plain([b1, b2], [(b1, b2)]))
        assert g.po == {(a1, a2), (b1, b2)}
        g.validate()

    def test_shared_thread_rejected(self):
        with pytest.raises(InvalidInput):
            par_compose(plain([ev(1, 0)]), plain([ev(1, 1)]))


DOM = frozenset({0, 1, 7})


class TestInterpretSeq:
    def test_value(self):
        r = interpret_seq(Val(7), 1, 4, DOM)
        assert r.results == {(Output(7, 0), plain([]))}
        assert not r.truncated

    def test_break(self):
        r = interpret_seq(Break(2, 5), 1, 4, DOM)
        assert r.results == {(Output(5, 2), plain([]))}

    def test_call_enumerates_domain(self):
        r = interpret_seq(Call("m", ("x",)), 1, 4, DOM)
        assert len(r.results) == len(DOM)
        for out, g in r.results:
            assert out.brk == 0 and len(g.events) == 1
            (e,) = g.events
            assert e.output == out.value and e.method == "m"

    def test_loop_break_decrements(self):
        r = interpret_seq(Loop(Break(1, 3)), 1, 4, DOM)
        assert r.results == {(Output(3, 0), plain([]))}

    def test_let_propagates_break(self):
        boom = lambda v: Call("never", ())
        r = interpret_seq(LetF(Break(1, 9), boom), 1, 4, DOM)
        assert r.results == {(Output(9, 1), plain([]))}

    def test_infinite_loop_truncates(self):
        r = interpret_seq(Loop(Val(0)), 1, 4, DOM)
        assert r.results == frozenset() and r.truncated

    def test_po_total_per_thread(self):
        p = seq(Call("a", ()), Call("b", ()), Call("c", ()))
        r = interpret_seq(p, 1, 4, frozenset({0}))
        for _out, g in r.results:
            g.validate()
            evs = g.thread_events(1)
            assert [e.method for e in evs] == ["a", "b", "c"]

    def test_loop_bound_monotone(self):
        # a loop breaking after a data-dependent number of iterations
        body = let(Call("flip", ()), lambda v: Break(1, v) if v else Val(0))
        p = Loop(body)
        prev: frozenset = frozenset()
        for b in range(5):
            r = interpret_seq(p, 1, b, frozenset({0, 1}))
            assert prev <= r.results
            prev = r.results

    def test_let_compositional(self):
        # the let rule recomputed from its parts, brute force
        p1 = Call("m", ())
        f = lambda v: Call("k", (v,)) if v else Val(9)
        combined = interpret_seq(LetF(p1, f), 1, 4, DOM).results
        expected = set()
        for out1, g1 in interpret_seq(p1, 1, 4, DOM).results:
            if out1.brk:
                expected.add((out1, g1))
                continue
            # continuation events are numbered after the prefix
            for out2, g2 in interpret_seq(f(out1.value), 1, 4, DOM).results:
                shifted = plain(
                    [Event(e.tid, e.eid + len(g1.events), e.method, e.args, e.output)
                     for e in g2.events])
                expected.add((out2, seq_compose(g1, shifted)))
        assert combined == frozenset(expected)


class TestInterpretConc:
    def test_all_values(self):
        r = interpret_conc([Val(1), Val(2)], 4, DOM)
        assert r.results == {((1, 2), plain([]))}

    def test_nonterminating_thread_kills_all(self):
        r = interpret_conc([Val(1), Loop(Val(0))], 4, DOM)
        assert r.results == frozenset() and r.truncated

    def test_sb_skeleton_shapes(self):
        # store-buffering skeleton: one write-like and one read-like call per
        # thread; hand count: |DOM| read results per thread, independent
        w = lambda x: Call("w", (x, 1))
        rd = lambda x: Call("r", (x,))
        r = interpret_conc([seq(w("x"), rd("y")), seq(w("y"), rd("x"))], 4,
                           frozenset({0, 1}))
        assert len(r.results) == (2 * 2) * (2 * 2)
        for vals, g in r.results:
            g.validate()
            assert len(g.events) == 4

    def test_max_events_cap(self):
        p = seq(*[Call("m", ()) for _ in range(5)])
        r = interpret_conc([p], 4, frozenset({0}), max_events=3)
        assert r.results == frozenset() and r.truncated
