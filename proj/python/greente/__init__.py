"""Energy-aware traffic engineering toolkit.

Thin wrapper around the C++ core: instance generation, the exact
load-balancing and sleeping-set benchmarks, the distributed heuristic, and
the event-driven simulation of its distributed execution.
"""

from ._core import (
    Instance,
    State,
    StructuralError,
    InfeasibleError,
    SizeLimitError,
    generate,
    initial_state,
    link_loads,
    max_link_utilization,
    energy_consumption,
    saved_energy_percent,
    validate,
    solve_opt_lb,
    solve_opt_es,
    ete_run,
    simulate,
    replay,
    k_shortest_paths,
)

__all__ = [
    "Instance",
    "State",
    "StructuralError",
    "InfeasibleError",
    "SizeLimitError",
    "generate",
    "initial_state",
    "link_loads",
    "max_link_utilization",
    "energy_consumption",
    "saved_energy_percent",
    "validate",
    "solve_opt_lb",
    "solve_opt_es",
    "ete_run",
    "simulate",
    "replay",
    "k_shortest_paths",
]

__version__ = "0.1.0"
