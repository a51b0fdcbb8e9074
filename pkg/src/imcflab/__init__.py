"""imcflab: a desk-scale laboratory for inverse mean curvature flow.

Closed convex star-shaped hypersurfaces (curves in the plane, surfaces in
space) evolve with outward normal speed 1/H while the first nonzero
eigenvalues of the Laplace and p-Laplace operators are tracked, and every
claimed monotonicity, pinching, decay and isoperimetric inequality is
checked numerically at explicit tolerances.
"""

from .errors import (
    CurvatureCollapseError,
    DataError,
    DegenerateMeshError,
    DegenerateShapeError,
    DegenerateSpectrumError,
    HypothesisViolationError,
    ImcflabError,
    InsufficientDataError,
    NumericalBlowupError,
    SolverFailureError,
    StarShapeLossError,
)
from .geometry import (
    DirectionAtlas,
    Ellipsoid,
    GeometryTensors,
    PerturbedSphere,
    Sphere,
    StarSurface,
    build_atlas,
    compute_tensors,
    embed,
    read_curve_csv,
    read_off,
    star_margin,
    total_area,
    write_curve_csv,
    write_off,
)
from .flow import (
    FlowConfig,
    FlowTrace,
    HDecayFit,
    IMCF,
    MCF,
    SpeedFunction,
    eigen_rescale,
    fit_H_decay,
    rescale_snapshot,
    run,
    step,
)
from .spectral import (
    DiscreteOperator,
    EigenResult,
    PLaplaceConfig,
    assemble,
    circle_plaplace_oracle,
    lambda1_laplace,
    lambda1_plaplace,
    rayleigh_p,
    write_eigenfunction_csv,
)
from .verify import (
    CheckReport,
    PinchSchedule,
    alpha_max,
    bound_constant,
    check_area_growth,
    check_decay_bound,
    check_h_decay,
    check_isoperimetric_bound,
    check_monotone,
    check_pinching_preserved,
    check_rescaled_decay_schedule,
    check_rescaled_monotone,
    check_rounding,
    convergence_radius,
    epsilon,
    epsilon_props,
    evolution_residual,
    integrated_decay_multiplier,
    pinching_margin,
    sphericity,
)
from .scenario import (
    RunArtifact,
    ScenarioConfig,
    emit_report,
    parse_config,
    run_scenario,
    sweep,
)

__version__ = "0.1.0"
