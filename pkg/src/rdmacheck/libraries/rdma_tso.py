"""Poll-based RDMA model: the compilation target of the wait-based model.

Methods: tso_write/tso_read/tso_cas/tso_mfence, tso_get(x,y)/tso_put(x,y)
returning a unique operation identifier, poll(n) returning the identifier
of the polled operation, tso_rfence(n), and per-thread identifier-set
bookkeeping set_add/set_remove/set_isempty.

A poll blocks for the oldest not-yet-polled NIC write toward the node and
is the only cross-benefit synchronisation: only polls of *get* local
writes certify completion to other threads.

Each per-node NIC channel is treated as a location of its own (carried by
puts, gets, and polls toward that node), so splitting an execution along
disjoint locations keeps every poll with the operations it may poll; the
underlying formulation leaves polls location-free and is consequently not
decomposable, which is the published motivation for the wait-based model.
"""

from __future__ import annotations

from typing import Iterator

from ..config import NodeConfig
from ..events import Event, PlainExecution, SubEvent
from ..relations import Rel
from ..stamps import ACAS, ACR, ACW, AMF, AWT, nF, nLR, nLW, nRR, nRW
from ..values import UNIT
from .base import Library, OutputCtx, Witness
from .rdma_core import RdmaAdapter, rdma_witnesses
from .rdma_wait import _WaitAdapter

TSO_WRITE, TSO_READ, TSO_CAS, TSO_MFENCE = "tso_write", "tso_read", "tso_cas", "tso_mfence"
TSO_GET, TSO_PUT, POLL, TSO_RFENCE = "tso_get", "tso_put", "poll", "tso_rfence"
SET_ADD, SET_REMOVE, SET_ISEMPTY = "set_add", "set_remove", "set_isempty"


def chan(n: int) -> str:
    return f"__chan{n}"


class _TsoAdapter(_WaitAdapter):
    name = "tso"

    def polls_from(self, plain: PlainExecution, stmp):
        ops: dict = {}
        for e in plain.events:
            if e.method in (TSO_GET, TSO_PUT):
                if e.output in ops:
                    return None  # operation identifiers must be unique
                ops[e.output] = e

        def nic_write(e: Event) -> SubEvent:
            kind = "nLW" if e.method == TSO_GET else "nRW"
            (a,) = [a for a in stmp[e] if a.kind == kind]
            return SubEvent(e, a)

        pf = {}
        for p in plain.events:
            if p.method != POLL:
                continue
            src = ops.get(p.output)
            if src is None:
                return None  # every poll polls from exactly one NIC write
            w = nic_write(src)
            if w.stamp.node != p.args[0] or (src, p) not in plain.po:
                return None
            if w in pf:
                return None  # a NIC write is polled at most once
            pf[w] = SubEvent(p, AWT)

        # Oldest-first: a polled write's po-earlier same-node writes were
        # polled by po-earlier polls.
        for w2, p2 in pf.items():
            for e1 in plain.events:
                if e1.method not in (TSO_GET, TSO_PUT) or (e1, w2.event) not in plain.po:
                    continue
                w1 = nic_write(e1)
                if w1.stamp.node != w2.stamp.node:
                    continue
                p1 = pf.get(w1)
                if p1 is None or (p1.event, p2.event) not in plain.po:
                    return None

        rel = Rel(pf.items())
        so_pf = rel.filter(lambda w, p: w.stamp.kind == "nLW")
        return so_pf, rel, {"pf": rel}

    def extra_valid(self, plain: PlainExecution, cfg: NodeConfig) -> bool:
        # Per-thread set soundness: an empty verdict means every earlier
        # add of the set was removed in between.
        for e3 in plain.events:
            if e3.method != SET_ISEMPTY or e3.output is not True:
                continue
            for e1 in plain.events:
                if (e1.method != SET_ADD or e1.args[0] != e3.args[0]
                        or (e1, e3) not in plain.po):
                    continue
                if not any(e2.method == SET_REMOVE
                           and e2.args[:2] == (e1.args[0], e1.args[1])
                           and (e1, e2) in plain.po and (e2, e3) in plain.po
                           for e2 in plain.events):
                    return False
        return True


class RdmaTsoLib(Library):
    name = "tso"
    methods = frozenset({TSO_WRITE, TSO_READ, TSO_CAS, TSO_MFENCE, TSO_GET,
                         TSO_PUT, POLL, TSO_RFENCE, SET_ADD, SET_REMOVE,
                         SET_ISEMPTY})

    _roles = {"write": TSO_WRITE, "read": TSO_READ, "cas": TSO_CAS,
              "get": TSO_GET, "put": TSO_PUT}

    def __init__(self):
        self._adapter = _TsoAdapter(self._roles)

    def loc(self, e: Event, cfg: NodeConfig | None = None) -> frozenset:
        self._require(e)
        if e.method in (TSO_WRITE, TSO_READ, TSO_CAS):
            return frozenset({e.args[0]})
        if e.method in (TSO_GET, TSO_PUT):
            remote = e.args[1] if e.method == TSO_GET else e.args[0]
            locs = {e.args[0], e.args[1]}
            if cfg is not None:
                locs.add(chan(cfg.node_of_loc(remote)))
            return frozenset(locs)
        if e.method == POLL:
            return frozenset({chan(e.args[0])})
        if e.method in (SET_ADD, SET_REMOVE, SET_ISEMPTY):
            return frozenset({e.args[0]})
        return frozenset()

    def subevent_loc(self, s: SubEvent) -> frozenset:
        loc = self._adapter.subevent_loc(s)
        return frozenset() if loc is None else frozenset({loc})

    def stamping(self, e: Event, cfg: NodeConfig) -> frozenset:
        self._require(e)
        if e.method == TSO_WRITE:
            return frozenset({ACW})
        if e.method == TSO_READ:
            return frozenset({ACR})
        if e.method == TSO_MFENCE:
            return frozenset({AMF})
        if e.method == POLL:
            return frozenset({AWT})
        if e.method in (SET_ADD, SET_REMOVE, SET_ISEMPTY):
            return frozenset({AMF})
        if e.method == TSO_RFENCE:
            return frozenset({nF(e.args[0])})
        if e.method == TSO_CAS:
            if e.output == e.args[1]:
                return frozenset({ACAS})
            return frozenset({AMF, ACR})
        if e.method == TSO_GET:
            n = cfg.node_of_loc(e.args[1])
            return frozenset({nRR(n), nLW(n)})
        n = cfg.node_of_loc(e.args[0])
        return frozenset({nLR(n), nRW(n)})

    def outputs(self, method, args, tid, state, ctx: OutputCtx, cfg):
        if method in (TSO_READ, TSO_CAS):
            return ((v, state) for v in sorted(ctx.domain(args[0]), key=repr))
        if method in (TSO_GET, TSO_PUT):
            node = cfg.node_of_loc(args[1] if method == TSO_GET else args[0])
            ident, st = state.next_fresh(tid)
            return ((ident, st.record_issue(ident, node)),)
        if method == POLL:
            return ((v, state) for v, n in state.issued if n == args[0])
        if method == SET_ISEMPTY:
            return ((True, state), (False, state))
        return ((UNIT, state),)

    def witnesses(self, plain: PlainExecution, stmp, cfg: NodeConfig) -> Iterator[Witness]:
        for e in plain.events:
            self._require(e)
        return rdma_witnesses(self._adapter, plain, stmp, cfg)

    def final_memory(self, w: Witness, cfg: NodeConfig) -> dict:
        out = {}
        mo = w.rels["mo"]
        for loc, group in w.meta["by_loc"].items():
            if not group:
                continue
            top = next(s for s in group if not any((s, t) in mo for t in group))
            out[(loc, cfg.node_of_loc(loc))] = w.vW[top]
        return out
