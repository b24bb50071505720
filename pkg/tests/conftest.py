from __future__ import annotations

import pytest

from rdmacheck.checker import Bounds, outcomes
from rdmacheck.config import NodeConfig
from rdmacheck.lang import Call
from rdmacheck.libraries import OutputCtx


def C(method, *args):
    return Call(method, tuple(args))


def cfg2(loc_node=None, **kw):
    """Two nodes, thread 1 on n1 and thread 2 on n2."""
    return NodeConfig(nodes=frozenset({1, 2}), thread_node={1: 1, 2: 2},
                      loc_node=loc_node or {}, **kw)


def outs(progs, libs, cfg, scalars={0, 1}, tuples=None, bounds=Bounds(),
         memory=False):
    ctx = OutputCtx(scalars=frozenset(scalars), tuples=tuples or {})
    r = outcomes(progs, libs, cfg, bounds, ctx, outputs_only=not memory)
    return r


def out_set(progs, libs, cfg, **kw):
    return {o.outputs for o in outs(progs, libs, cfg, **kw).outcomes}
