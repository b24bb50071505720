"""Multi-library consistency and bounded outcome computation.

An execution is accepted when its happens-before, fixed here to
(ppo ∪ so)+ with so the union of per-library synchronisation orders, is
irreflexive and every library accepts its slice.  Outcomes of a concurrent
program are the output tuples (plus final memory) of its accepted
executions, enumerated from the bounded plain semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .config import NodeConfig
from .events import Event, Execution, InvalidInput, PlainExecution, SubEvent
from .lang import OutputsFn, interpret_conc
from .libraries.base import Library, OutputCtx, Witness, check_consistent
from .relations import IncrementalOrder, Rel
from .stamps import derive_ppo


@dataclass(frozen=True)
class Bounds:
    loop_bound: int = 4
    max_events: int = 14


@dataclass(frozen=True)
class Outcome:
    outputs: tuple
    memory: frozenset = frozenset()   # ((loc, node), value) items of written cells

    def memory_map(self) -> dict:
        return dict(self.memory)

    def __repr__(self):
        mem = "" if not self.memory else " " + repr(sorted(self.memory, key=repr))
        return f"Outcome{self.outputs!r}{mem}"


@dataclass
class OutcomeResult:
    outcomes: frozenset
    truncated: bool


def method_map(libs: Sequence[Library]) -> dict[str, Library]:
    out: dict[str, Library] = {}
    for lib in libs:
        for m in lib.methods:
            if m in out:
                raise InvalidInput(f"method {m} belongs to two libraries "
                                   f"({out[m].name}, {lib.name})")
            out[m] = lib
    return out


def merged_outputs(libs: Sequence[Library], ctx: OutputCtx, cfg: NodeConfig) -> OutputsFn:
    mm = method_map(libs)

    def fn(method, args, tid, state):
        try:
            lib = mm[method]
        except KeyError:
            raise InvalidInput(f"unknown method {method}")
        return lib.outputs(method, args, tid, state, ctx, cfg)

    return fn


def stamp_events(plain: PlainExecution, libs: Sequence[Library], cfg: NodeConfig):
    mm = method_map(libs)
    stmp = {}
    per_lib: dict[str, list[Event]] = {lib.name: [] for lib in libs}
    for e in sorted(plain.events, key=lambda e: (e.tid, e.eid)):
        if e.method not in mm:
            raise InvalidInput(f"event {e!r} uses unknown method")
        lib = mm[e.method]
        stmp[e] = lib.stamping(e, cfg)
        per_lib[lib.name].append(e)
    return stmp, per_lib


def _restrict(plain: PlainExecution, events: list[Event]) -> PlainExecution:
    s = frozenset(events)
    return PlainExecution(s, frozenset((a, b) for a, b in plain.po
                                       if a in s and b in s))


def enumerate_consistent(plain: PlainExecution, libs: Sequence[Library],
                         cfg: NodeConfig) -> Iterator[dict]:
    """All accepted (witness-per-library, so, hb) combinations.

    Stamping first (deterministic), then per-library witness backtracking
    with incremental cycle detection on (ppo ∪ accumulated so)+.
    """
    stmp, per_lib = stamp_events(plain, libs, cfg)
    ppo = derive_ppo(plain, stmp)
    base = IncrementalOrder(ppo)
    slices = [(lib, _restrict(plain, per_lib[lib.name])) for lib in libs]

    def rec(i: int, order: IncrementalOrder, chosen: list):
        if i == len(slices):
            hb = order.to_rel()
            if all(lib.post_check(w, hb) for lib, w in chosen):
                yield {
                    "witnesses": {lib.name: w for lib, w in chosen},
                    "so": Rel(p for _, w in chosen for p in w.so),
                    "hb": hb,
                    "stmp": stmp,
                    "ppo": ppo,
                }
            return
        lib, sl = slices[i]
        for w in lib.witnesses(sl, stmp, cfg):
            o2 = order.copy()
            if not o2.add_edges(w.so):
                continue
            yield from rec(i + 1, o2, chosen + [(lib, w)])

    yield from rec(0, base, [])


def lambda_consistent(exec_: Execution, libs: Sequence[Library],
                      cfg: NodeConfig) -> tuple[bool, dict]:
    """Validate a full execution: so must decompose per library, hb must be
    the irreflexive closure of ppo ∪ so, and every library slice must pass
    its oracle with exactly its share of so."""
    stmp, per_lib = stamp_events(exec_.plain, libs, cfg)
    ppo = derive_ppo(exec_.plain, stmp)
    so = Rel(exec_.so)
    hb = (ppo | so).transitive_closure()
    if not hb.is_irreflexive():
        return False, {}

    mm = method_map(libs)
    for a, b in so:
        la = mm.get(a.event.method)
        lb = mm.get(b.event.method)
        if la is None or la is not lb:
            return False, {}

    witnesses = {}
    for lib in libs:
        sl = _restrict(exec_.plain, per_lib[lib.name])
        w = check_consistent(lib, _slice_exec(exec_, sl, stmp, so), cfg)
        if w is None:
            return False, {}
        if not lib.post_check(w, hb):
            return False, {}
        witnesses[lib.name] = w
    return True, witnesses


def _slice_exec(exec_: Execution, sl: PlainExecution, stmp, so: Rel) -> Execution:
    sub = frozenset(SubEvent(e, a) for e in sl.events for a in stmp[e])
    keep = frozenset((a, b) for a, b in so if a in sub and b in sub)
    hb = frozenset((a, b) for a, b in exec_.hb if a in sub and b in sub)
    return Execution(sl, {e: stmp[e] for e in sl.events}, keep, hb)


def final_memory(witnesses: Mapping[str, Witness], libs: Sequence[Library],
                 cfg: NodeConfig) -> frozenset:
    mem = {}
    for lib in libs:
        w = witnesses.get(lib.name)
        if w is not None:
            mem.update(lib.final_memory(w, cfg))
    return frozenset(mem.items())


def outcomes(progs, libs: Sequence[Library], cfg: NodeConfig, bounds: Bounds,
             outctx: OutputCtx, outputs_only: bool = False) -> OutcomeResult:
    """Outcome set of a concurrent program under the installed libraries.

    With ``outputs_only`` the search stops at the first witness per plain
    execution (final memory, which varies with the modification order, is
    then not meaningful and left empty).
    """
    fn = merged_outputs(libs, outctx, cfg)
    interp = interpret_conc(progs, bounds.loop_bound, fn, bounds.max_events)
    found = set()
    for vals, plain in sorted(interp.results, key=repr):
        for acc in enumerate_consistent(plain, libs, cfg):
            if outputs_only:
                found.add(Outcome(vals))
                break
            found.add(Outcome(vals, final_memory(acc["witnesses"], libs, cfg)))
    return OutcomeResult(frozenset(found), interp.truncated)
