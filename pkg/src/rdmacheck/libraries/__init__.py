from .base import Library, OutputCtx, Witness, check_consistent
from .barrier import BarrierLib
from .msw import MixedSizeLib
from .rdma_tso import RdmaTsoLib
from .rdma_wait import RdmaWaitLib
from .ringbuf import RingBufferLib
from .sv import SharedVarLib


def make_library(name: str, *, bal_variant: str = "weak",
                 rbl_mode: str = "strict") -> Library:
    """Instantiate a library by its short name (sv, rl, tso, bal, rbl, msw)."""
    if name == "sv":
        return SharedVarLib()
    if name == "rl":
        return RdmaWaitLib()
    if name == "tso":
        return RdmaTsoLib()
    if name == "bal":
        return BarrierLib(bal_variant)
    if name == "rbl":
        return RingBufferLib(rbl_mode)
    if name == "msw":
        return MixedSizeLib()
    raise ValueError(f"unknown library {name!r}")


__all__ = ["Library", "OutputCtx", "Witness", "check_consistent",
           "BarrierLib", "MixedSizeLib", "RdmaTsoLib", "RdmaWaitLib",
           "RingBufferLib", "SharedVarLib", "make_library"]
