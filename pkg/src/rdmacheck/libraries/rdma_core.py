"""Shared witness engine for the RDMA-shaped libraries.

The wait-based model, the poll-based model, and the mixed-size variant all
search the same existentials: a reads-from map, per-location modification
orders, and an orientation of the NIC flush order.  They differ in method
names, stamping, the polls-from component, and a few extra validity
clauses, which an adapter object supplies.

Subevent conventions: NIC read parts carry the value their event's write
part transmits (internal equalities); instantaneous subevents are
everything except write parts; issued-before (ib) orders subevent starts
and must be irreflexive on its own.
"""

from __future__ import annotations

from typing import Iterator

from ..config import NodeConfig
from ..events import Event, PlainExecution, SubEvent
from ..relations import Rel
from ..stamps import derive_ppo
from .base import Witness, choose_rf, enumerate_mo, reads_before, rslot, wslot

READ_KINDS = ("aCR", "aCAS", "nLR", "nRR")
WRITE_KINDS = ("aCW", "aCAS", "nLW", "nRW")


class RdmaAdapter:
    """Per-library hooks for the shared engine."""

    name = ""

    def respects_nodes(self, plain: PlainExecution, cfg: NodeConfig) -> bool:
        raise NotImplementedError

    def subevent_loc(self, s: SubEvent) -> str | None:
        raise NotImplementedError

    def fixed_read(self, s: SubEvent) -> tuple[bool, object]:
        """(is_fixed, value) when the event label determines the value read."""
        raise NotImplementedError

    def fixed_write(self, s: SubEvent) -> tuple[bool, object]:
        """(is_fixed, value) when the event label determines the value written."""
        raise NotImplementedError

    def internal_eqs(self, e: Event, stamps) -> list[tuple[SubEvent, SubEvent]]:
        """Same-event (read part, write part) value equalities."""
        raise NotImplementedError

    def iso(self, e: Event, stamps) -> list:
        raise NotImplementedError

    def polls_from(self, plain: PlainExecution, stmp) -> tuple[Rel, Rel, dict] | None:
        """(so part, ib part, named parts), or None when structurally invalid."""
        return Rel(), Rel(), {}

    def extra_valid(self, plain: PlainExecution, cfg: NodeConfig) -> bool:
        return True

    def init_of(self, loc: str, cfg: NodeConfig):
        return cfg.init_of(loc)


def rdma_witnesses(adapter: RdmaAdapter, plain: PlainExecution, stmp,
                   cfg: NodeConfig) -> Iterator[Witness]:
    if not adapter.respects_nodes(plain, cfg):
        return
    if not adapter.extra_valid(plain, cfg):
        return
    polls = adapter.polls_from(plain, stmp)
    if polls is None:
        return
    so_pf, ib_pf, pf_parts = polls

    events = sorted(plain.events, key=lambda e: (e.tid, e.eid))
    sevents = [SubEvent(e, a) for e in events for a in sorted(stmp[e], key=repr)]
    reads = [s for s in sevents if s.stamp.kind in READ_KINDS]
    writes = [s for s in sevents if s.stamp.kind in WRITE_KINDS]

    loc_of = adapter.subevent_loc
    by_loc: dict = {}
    for w in writes:
        by_loc.setdefault(loc_of(w), []).append(w)

    fixed = {}
    for s in reads:
        is_fixed, v = adapter.fixed_read(s)
        if is_fixed:
            fixed[rslot(s)] = v
    for s in writes:
        is_fixed, v = adapter.fixed_write(s)
        if is_fixed:
            fixed[wslot(s)] = v
    eqs = [(rslot(r), wslot(w))
           for e in events for r, w in adapter.internal_eqs(e, stmp[e])]

    iso = Rel(p for e in events for p in adapter.iso(e, stmp[e]))
    ppo = derive_ppo(plain, stmp)

    # ib orders starts: it extends ppo with CPU-write -> CPU-read/wait
    # program order and NIC-write -> same-node NIC-fence program order.
    ippo_extra = []
    for e1, e2 in plain.po:
        for a1 in stmp[e1]:
            for a2 in stmp[e2]:
                if a1.kind == "aCW" and a2.kind in ("aCR", "aWT"):
                    ippo_extra.append((SubEvent(e1, a1), SubEvent(e2, a2)))
                elif (a1.kind in ("nRW", "nLW") and a2.kind == "nF"
                      and a1.node == a2.node):
                    ippo_extra.append((SubEvent(e1, a1), SubEvent(e2, a2)))
    ippo = ppo | Rel(ippo_extra)

    inst = {s for s in sevents if s.stamp.kind not in ("aCW", "nLW", "nRW")}

    # NIC flush order: orient each same-thread same-node (local read, local
    # write) and (remote read, remote write) pair; orientations the stamp
    # order already implies are fixed, the rest are enumerated.
    nfo_pairs = []
    for i, s1 in enumerate(sevents):
        for s2 in sevents[i + 1:]:
            if s1.tid != s2.tid or s1.stamp.node != s2.stamp.node:
                continue
            kinds = {s1.stamp.kind, s2.stamp.kind}
            if kinds == {"nLR", "nLW"} or kinds == {"nRR", "nRW"}:
                nfo_pairs.append((s1, s2))
    forced_nfo, free_nfo = [], []
    for s1, s2 in nfo_pairs:
        if (s1, s2) in ppo:
            forced_nfo.append((s1, s2))
        elif (s2, s1) in ppo:
            forced_nfo.append((s2, s1))
        else:
            free_nfo.append((s1, s2))

    def nfo_choices(i: int, acc: list) -> Iterator[Rel]:
        if i == len(free_nfo):
            yield Rel(forced_nfo + acc)
            return
        s1, s2 = free_nfo[i]
        yield from nfo_choices(i + 1, acc + [(s1, s2)])
        yield from nfo_choices(i + 1, acc + [(s2, s1)])

    def candidates(r: SubEvent):
        return by_loc.get(loc_of(r), ())

    def init_of(r: SubEvent):
        return adapter.init_of(loc_of(r), cfg)

    mo_forbidden = ppo.inverse()

    for rfmap, slots in choose_rf(reads, candidates, fixed, eqs, init_of):
        rf = Rel((w, r) for r, w in rfmap.items() if w is not None)
        rf_int = rf.filter(lambda w, r: w.stamp.kind == "aCW"
                           and r.stamp.kind == "aCR"
                           and (w.event, r.event) in plain.po)
        groups = [by_loc[k] for k in sorted(by_loc, key=repr)]
        for mo in enumerate_mo(groups, forbidden=mo_forbidden):
            rb = reads_before(rfmap, mo, reads,
                              lambda r: by_loc.get(loc_of(r), ()))
            fr_int = rb.filter(lambda r, w: r.stamp.kind == "aCR"
                               and w.stamp.kind == "aCW"
                               and r.event.tid == w.event.tid)
            for nfo in nfo_choices(0, []):
                ib = (ippo | iso | rf | ib_pf | nfo | fr_int).transitive_closure()
                if not ib.is_irreflexive():
                    continue
                inst_ib = ib.filter(lambda a, b: a in inst)
                so = iso | (rf - rf_int) | so_pf | nfo | rb | mo | inst_ib
                yield Witness(
                    lib=adapter.name, so=so,
                    vR={s: slots.get_value(rslot(s)) for s in reads},
                    vW={s: slots.get_value(wslot(s)) for s in writes},
                    rels={"rf": rf, "mo": mo, "rb": rb, "nfo": nfo,
                          "iso": iso, "ib": ib, **pf_parts},
                    meta={"by_loc": by_loc, "loc_of": loc_of},
                )
