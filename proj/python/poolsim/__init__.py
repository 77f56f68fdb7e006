"""Pool censorship incentive simulator and equilibrium verifier.

Thin wrapper over the C++ core. Games, profiles and scenarios are passed as
JSON text in the same forms the command line reads from files; reports come
back as JSON text.
"""

from poolsim._core import (
    Ledger,
    ScenarioError,
    cartel,
    chi_square_uniform,
    classify,
    draw_randomness,
    incumbency,
    nash,
    select_pool_for_audit,
    simulate,
    spne,
    theorem1,
    verify,
)

__all__ = [
    "Ledger",
    "ScenarioError",
    "cartel",
    "chi_square_uniform",
    "classify",
    "draw_randomness",
    "incumbency",
    "nash",
    "select_pool_for_audit",
    "simulate",
    "spne",
    "theorem1",
    "verify",
]
