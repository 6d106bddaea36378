"""Checkpoint analysis and intermittent-power simulation for scheduled HLS programs.

Programs travel as JSON text in the same format the ``dftsim`` CLI reads.
"""

from ._core import (
    ConfigError,
    CorruptionError,
    DftsimError,
    PlacementError,
    SchemaError,
    ValidationError,
    analyze,
    cell_seed,
    cu_resources,
    execute_reference,
    gen_trace,
    generate,
    max_trackable_cycles,
    monte_carlo,
    normalize,
    preset_names,
    preset_program,
    simulate,
    tracker_resources,
    validate,
)

__all__ = [
    "ConfigError",
    "CorruptionError",
    "DftsimError",
    "PlacementError",
    "SchemaError",
    "ValidationError",
    "analyze",
    "cell_seed",
    "cu_resources",
    "execute_reference",
    "gen_trace",
    "generate",
    "max_trackable_cycles",
    "monte_carlo",
    "normalize",
    "preset_names",
    "preset_program",
    "simulate",
    "tracker_resources",
    "validate",
]
