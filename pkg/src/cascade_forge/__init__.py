"""Period-doubling cascades for large perturbations of Hénon families."""

from .cascade import Cascade, CascadeCensus, build_cascade, classify_stem, doubling_gaps, theorem1_census
from .config import RunConfig, load_config, parse_config
from .continuation import (
    BifurcationEvent,
    Branch,
    BranchPoint,
    continue_branch,
    detect_bifurcation,
    halve_branch,
    orient,
    switch_branch,
    test_functions,
)
from .errors import *  # noqa: F401,F403
from .family import (
    BoundedWave,
    CompactBump,
    FamilySpec,
    HorseshoeGeometry,
    ZeroAlpha,
    ZeroG,
    builtin_perturbations,
    evaluate,
    geometry_for,
    henon,
    jacobian,
    parameter_derivative,
)
from .horseshoe import (
    CensusRow,
    CertificationReport,
    ConePair,
    a0_threshold,
    census_at_A1,
    certify,
    check_a0,
    check_cones,
    check_f1,
    check_f3,
    code_orbit,
    cone_margins,
)
from .orbit import PeriodicOrbit, classify, monodromy, newton_solve, orbit_equal
from .symbolic import ShiftCensus, SymbolCycle, census, count_points, enumerate_cycles, is_even, seed_points

__version__ = "0.1.0"
