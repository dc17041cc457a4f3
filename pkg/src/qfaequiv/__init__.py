"""Acceptance probabilities and equivalence checking for measure-many and enhanced one-way QFAs."""

from .e1qfa import (
    E1QFA,
    Superoperator,
    accept_prob_e,
    apply_projected,
    apply_superop,
    diag_sum_e,
    noncumulative_e,
    theta_e,
    validate_e,
    vartheta_e,
    xi_e,
)
from .equivalence import (
    BoundedEquivalent,
    Equivalent,
    NotEquivalent,
    Tolerances,
    Verdict,
    closure_e,
    closure_mm,
    decide,
    decide_e,
    decide_mm,
    enumerate_equiv,
    extract_counterexample,
)
from .errors import *  # noqa: F401,F403
from .generate import random_e, random_mm
from .io import parse_automaton, serialize_automaton
from .mm1qfa import (
    MM1QFA,
    accept_prob_mm,
    delta_mm,
    diag_sum_mm,
    eta_mm,
    noncumulative_mm,
    validate_mm,
)

__version__ = "0.1.0"
