"""Probabilistic automatic complexity of finite strings."""

from .blackbox import run_experiment, trials_needed
from .classical import Dfa, Nfa, ad, an, dfa_to_pfa, nfa_to_pfa
from .classify import extremal_trace, is_class2, witness_class2, witnessed_language
from .core import (
    BudgetError,
    InputError,
    Pfa,
    PreconditionError,
    drop_prefix,
    gap,
    reverse_pfa,
    rho,
    validate_pfa,
    word,
)
from .enumerate import ap_upper_bound, semidecide_ap_le
from .gamma import ap_delta, gamma_enclosure, gamma_lower, gamma_upper
from .ifs import Ifs, Ifs2, ifs2_to_pfa, ifs_to_pfa, pfa_to_ifs

__all__ = [
    "BudgetError",
    "Dfa",
    "Ifs",
    "Ifs2",
    "InputError",
    "Nfa",
    "Pfa",
    "PreconditionError",
    "ad",
    "an",
    "ap_delta",
    "ap_upper_bound",
    "dfa_to_pfa",
    "drop_prefix",
    "extremal_trace",
    "gamma_enclosure",
    "gamma_lower",
    "gamma_upper",
    "gap",
    "ifs2_to_pfa",
    "ifs_to_pfa",
    "is_class2",
    "nfa_to_pfa",
    "pfa_to_ifs",
    "reverse_pfa",
    "rho",
    "run_experiment",
    "semidecide_ap_le",
    "trials_needed",
    "validate_pfa",
    "witness_class2",
    "witnessed_language",
    "word",
]
