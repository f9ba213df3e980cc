"""First-order transition-function IR: allocation, compilation, evaluation."""

from .terms import (  # noqa: F401
    PP,
    PT,
    PV,
    PW,
    TApp,
    TConst,
    TFactor,
    TFun,
    TGlobal,
    TIf,
    TInfer,
    TLet,
    TObserve,
    TOp,
    TPairT,
    TSample,
    TTup,
    TVarT,
    pretty,
)
from .alloc import EngineState, allocate, state_shape  # noqa: F401
from .compilefn import CompiledProgram, compile_decl, compile_expr, compile_program  # noqa: F401
from .evaldet import eval_det, step_node  # noqa: F401
from .coiter import interp_coiter, run_coiter  # noqa: F401
