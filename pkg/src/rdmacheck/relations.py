"""Small finite-relation algebra: closure, composition, restriction.

Everything the consistency oracles need over subevent pairs; carrier sets
are whatever hashable items appear in the pairs.
"""

from __future__ import annotations

from typing import Callable, Hashable, Iterable

Pair = tuple[Hashable, Hashable]


class Rel:
    """An immutable finite binary relation."""

    __slots__ = ("pairs",)

    def __init__(self, pairs: Iterable[Pair] = ()):
        self.pairs = frozenset(pairs)

    def __repr__(self):
        return f"Rel({sorted(map(repr, self.pairs))})"

    def __eq__(self, other):
        return isinstance(other, Rel) and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.pairs)

    def __contains__(self, pair: Pair) -> bool:
        return pair in self.pairs

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __or__(self, other: "Rel") -> "Rel":
        return Rel(self.pairs | other.pairs)

    def __and__(self, other: "Rel") -> "Rel":
        return Rel(self.pairs & other.pairs)

    def __sub__(self, other: "Rel") -> "Rel":
        return Rel(self.pairs - other.pairs)

    @property
    def dom(self) -> set:
        return {a for a, _ in self.pairs}

    @property
    def ran(self) -> set:
        return {b for _, b in self.pairs}

    def inverse(self) -> "Rel":
        return Rel((b, a) for a, b in self.pairs)

    def compose(self, other: "Rel") -> "Rel":
        by_src: dict = {}
        for a, b in other.pairs:
            by_src.setdefault(a, []).append(b)
        return Rel((a, c) for a, b in self.pairs for c in by_src.get(b, ()))

    def restrict(self, carrier: Iterable[Hashable]) -> "Rel":
        s = set(carrier)
        return Rel((a, b) for a, b in self.pairs if a in s and b in s)

    def filter(self, pred: Callable[[Hashable, Hashable], bool]) -> "Rel":
        return Rel((a, b) for a, b in self.pairs if pred(a, b))

    def transitive_closure(self) -> "Rel":
        succ: dict = {}
        for a, b in self.pairs:
            succ.setdefault(a, set()).add(b)
        out = set(self.pairs)
        # Per-source DFS; relations here are tiny (tens of elements).
        for src in list(succ):
            seen: set = set()
            stack = list(succ.get(src, ()))
            while stack:
                n = stack.pop()
                if n in seen:
                    continue
                seen.add(n)
                stack.extend(succ.get(n, ()))
            out.update((src, n) for n in seen)
        return Rel(out)

    def reflexive_transitive_closure(self, carrier: Iterable[Hashable]) -> "Rel":
        return Rel(self.transitive_closure().pairs | {(x, x) for x in carrier})

    def is_irreflexive(self) -> bool:
        return all(a != b for a, b in self.pairs)

    def acyclic(self) -> bool:
        return self.transitive_closure().is_irreflexive()


def identity(carrier: Iterable[Hashable]) -> Rel:
    return Rel((x, x) for x in carrier)


def acyclic_closure(r: Rel) -> tuple[Rel, bool]:
    """Transitive closure plus an irreflexivity verdict."""
    c = r.transitive_closure()
    return c, c.is_irreflexive()


class IncrementalOrder:
    """Grow-only transitive relation with O(edges) insertion and cycle veto.

    Used by the witness search: so edges accumulate across libraries, and
    any addition that would close a cycle with the fixed ppo base must fail
    fast.  `add_edges` returns False (and rolls back nothing: copy before
    speculative use) when a cycle would appear.
    """

    __slots__ = ("succ",)

    def __init__(self, base: Rel | None = None):
        self.succ: dict = {}
        if base is not None:
            for a, b in base.transitive_closure():
                self.succ.setdefault(a, set()).add(b)

    def copy(self) -> "IncrementalOrder":
        c = IncrementalOrder()
        c.succ = {k: set(v) for k, v in self.succ.items()}
        return c

    def __contains__(self, pair: Pair) -> bool:
        a, b = pair
        return b in self.succ.get(a, ())

    def add_edges(self, edges: Iterable[Pair]) -> bool:
        for a, b in edges:
            if a == b or a in self.succ.get(b, ()):
                return False
            if b in self.succ.get(a, ()):
                continue
            preds = [p for p, ss in self.succ.items() if a in ss]
            after = self.succ.get(b, set()) | {b}
            self.succ.setdefault(a, set()).update(after)
            for p in preds:
                self.succ[p].update(after)
            if a in self.succ.get(a, ()):
                return False
        return True

    def to_rel(self) -> Rel:
        return Rel((a, b) for a, ss in self.succ.items() for b in ss)
