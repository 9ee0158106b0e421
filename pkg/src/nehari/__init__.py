"""Ground states of quasilinear, Kirchhoff and anisotropic elliptic problems.

The package discretizes box domains with zero Dirichlet boundaries, restricts
the energy of one of three operator families to rays, projects rays onto the
constraint set {u != 0 : Phi'(u) u = 0}, and minimizes the projected energy
over the unit sphere of the family norm.  A verification layer audits the
standing hypotheses numerically and cross-checks the solver against a radial
shooting oracle.
"""

from .errors import (
    ConfigurationError,
    ContractError,
    DegenerateDirectionError,
    HypothesisViolationError,
    MultiStartError,
    OracleFailureError,
    ParameterError,
)
from .grid import (
    Field,
    GradientField,
    Grid,
    axis_norm,
    build_grid,
    dump_field_csv,
    field_from_function,
    gradient,
    integrate,
    integrate_nodal,
    load_field_csv,
    seminorm,
    zero_field,
)
from .functionals import (
    AnisotropicOperator,
    Functional,
    KirchhoffOperator,
    Nonlinearity,
    QuasilinearOperator,
    anisotropic,
    kirchhoff,
    quasilinear,
)
from .fiber import (
    DirectionCertificate,
    FiberDiagnostics,
    FiberLine,
    certify_direction,
    fiber_slope,
    fiber_value,
    project_to_nehari,
)
from .solver import (
    ArmijoOptions,
    SolveOptions,
    SolveReport,
    boundedness_monitor,
    minimize,
    multi_start,
    random_init,
)
from .verify import (
    CheckEntry,
    CheckReport,
    RadialProfile,
    SimonSample,
    check_abstract,
    check_anisotropic,
    check_kirchhoff,
    check_quasilinear,
    radial_shooting,
    simon_gap,
    simon_gap_sample,
)

__version__ = "0.1.0"

__all__ = [
    "AnisotropicOperator", "ArmijoOptions", "CheckEntry", "CheckReport",
    "ConfigurationError", "ContractError", "DegenerateDirectionError",
    "DirectionCertificate", "Field", "FiberDiagnostics", "FiberLine",
    "Functional", "GradientField", "Grid", "HypothesisViolationError",
    "KirchhoffOperator", "MultiStartError", "Nonlinearity",
    "OracleFailureError", "ParameterError", "QuasilinearOperator",
    "RadialProfile", "SimonSample", "SolveOptions", "SolveReport",
    "anisotropic", "axis_norm", "boundedness_monitor", "build_grid",
    "certify_direction", "check_abstract", "check_anisotropic",
    "check_kirchhoff", "check_quasilinear", "dump_field_csv",
    "field_from_function", "fiber_slope", "fiber_value", "gradient",
    "integrate", "integrate_nodal", "kirchhoff", "load_field_csv",
    "minimize", "multi_start", "project_to_nehari", "quasilinear",
    "radial_shooting", "random_init", "seminorm", "simon_gap",
    "simon_gap_sample", "zero_field",
]
