"""Reversible one-way multi-counter automata toolkit."""

from .core import (
    Configuration,
    CounterAutomaton,
    LEFT_END,
    POSITIVE,
    RIGHT_END,
    RunOutcome,
    Transition,
    Verdict,
    ZERO,
    accepts,
    make_automaton,
    rename_states,
    run,
    status_of,
    step,
    validate,
)
from .reversibility import (
    ReverseTable,
    ReversibilityVerdict,
    check_quasi_realtime,
    derive_reverse,
    step_back,
    verify_roundtrip,
)
from .constructions import normalize_extended, product_intersection, speedup
from .witnesses import (
    build_balanced,
    build_eq_ab,
    build_regular_witness,
    decide_Lk,
    decide_regular_witness,
    eta,
    gen_Lk_member,
    phi,
    scattered_factor,
)
from .mcm import (
    MultCounterMachine,
    McmConfig,
    McmStatus,
    encode_string,
    make_mcm,
    mcm_run,
    mcm_step,
)
from .valc import ValcWord, build_valc, build_valc1, build_valc2, valc_decide, valc_encode

__all__ = [name for name in dir() if not name.startswith("_")]
