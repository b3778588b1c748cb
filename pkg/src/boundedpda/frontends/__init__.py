"""Counter machines and communicating finite-state machines."""
from .compile import (
    bounded_reach, cfsm_bounded_reach, cfsm_compile, channel_checker, cm_bounded_reach,
    cm_compile, compile_family, control_automaton, counter_checker, family_accepts,
    mixed_bounded_reach, mixed_compile,
)
from .flat import flat_bounded_expression
from .models import (
    Cfsm, Configuration, CounterMachine, Infeasible, StorageMachine, Transition,
    apply, cfsm_run, cm_run, initial_configuration, reaches, run,
)

__all__ = [
    "Cfsm", "Configuration", "CounterMachine", "Infeasible", "StorageMachine", "Transition",
    "apply", "bounded_reach", "cfsm_bounded_reach", "cfsm_compile", "cfsm_run",
    "channel_checker", "cm_bounded_reach", "cm_compile", "cm_run", "compile_family",
    "control_automaton", "counter_checker", "family_accepts", "flat_bounded_expression",
    "initial_configuration", "mixed_bounded_reach", "mixed_compile", "reaches", "run",
]
