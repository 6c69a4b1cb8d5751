"""Growth and two-type competition processes on homogeneous trees.

The package has three layers:

* closed-form analysis (:mod:`escape_lab.analytic`): speeds, growth
  profile, critical takeover rate, exact Erlang expectations;
* exact single-type simulation (:mod:`escape_lab.richardson`): keyed
  first-passage fields, shape checks, block offspring counts;
* event-driven two-type simulation (:mod:`escape_lab.escape`) backed by
  interchangeable compiled / pure-Python engines, with a bounded-region
  arrow construction (:mod:`escape_lab.graphical`) for cross-validation,
  a Monte Carlo harness (:mod:`escape_lab.experiments`), and a CLI
  (``escape-lab``).
"""

from __future__ import annotations

__version__ = "0.1.0"

from .analytic import (
    ModelParams,
    SpeedPair,
    SurvivalBand,
    erlang_cdf,
    erlang_log_cdf,
    erlang_log_sf,
    erlang_sf,
    escape_band,
    exclusive_probability,
    expected_exclusive,
    expected_occupied,
    expected_vacant,
    growth_profile,
    lambda_critical,
    profile_minimizer,
    rate_function,
    richardson_speeds,
)
from .engine import default_backend, get_engine
from .errors import (
    AddressError,
    ConfigError,
    EscapeLabError,
    HorizonError,
    IndeterminateBandError,
    ResourceError,
    TruncationWarning,
)
from .escape import (
    Budget,
    CellState,
    Checkpoint,
    EscapeSimulation,
    EventRecord,
    InitialConfig,
    RunOutcome,
    count_type1,
    run,
    step,
    validate_nontrivial,
)
from .graphical import compare_constructions, ctmc_replay, graphical_build
from .richardson import (
    PassageTimeField,
    containment_sample,
    count_exclusive,
    gw_offspring_sample,
    sample_field,
    shape_check,
)
from .rng import SplitMix64, derive_seed
from .tree import (
    ROOT,
    TreeParams,
    VertexId,
    ball_size,
    distance,
    format_vertex,
    in_forward_subtree,
    level,
    m_predecessor,
    min_distance,
    neighbors,
    parse_vertex,
    sphere_size,
    validate_vertex,
)

__all__ = [
    "AddressError",
    "Budget",
    "CellState",
    "Checkpoint",
    "ConfigError",
    "EscapeLabError",
    "EscapeSimulation",
    "EventRecord",
    "HorizonError",
    "IndeterminateBandError",
    "InitialConfig",
    "ModelParams",
    "PassageTimeField",
    "ROOT",
    "ResourceError",
    "RunOutcome",
    "SpeedPair",
    "SplitMix64",
    "SurvivalBand",
    "TreeParams",
    "TruncationWarning",
    "VertexId",
    "ball_size",
    "compare_constructions",
    "containment_sample",
    "count_exclusive",
    "count_type1",
    "ctmc_replay",
    "default_backend",
    "derive_seed",
    "distance",
    "erlang_cdf",
    "erlang_log_cdf",
    "erlang_log_sf",
    "erlang_sf",
    "escape_band",
    "exclusive_probability",
    "expected_exclusive",
    "expected_occupied",
    "expected_vacant",
    "format_vertex",
    "get_engine",
    "graphical_build",
    "growth_profile",
    "gw_offspring_sample",
    "in_forward_subtree",
    "lambda_critical",
    "level",
    "m_predecessor",
    "min_distance",
    "neighbors",
    "parse_vertex",
    "profile_minimizer",
    "rate_function",
    "richardson_speeds",
    "run",
    "sample_field",
    "shape_check",
    "sphere_size",
    "step",
    "validate_nontrivial",
    "validate_vertex",
]
