"""Exact spin-glass spectra, partition-function thermodynamics, and
instrumented number-partitioning solvers."""

from .correspondence import (
    CorrespondenceReport,
    PhaseRow,
    ScalingStudy,
    correspond,
    phase_sweep,
    scaling_study,
)
from .errors import CapacityError, ParseError
from .instance import (
    Instance,
    NormalizedInstance,
    derive_seed,
    generate,
    load,
    normalize,
    parse,
    save,
    serialize,
)
from .solvers import (
    SolverResult,
    brute_force,
    complete_kk,
    karmarkar_karp,
    meet_in_the_middle,
    schroeppel_shamir,
)
from .spinmodel import (
    Configuration,
    CouplingForm,
    Spectrum,
    coupling_energy,
    energy,
    expand_couplings,
    ground_eigenspace,
    residual,
    spectrum,
)
from .statmech import (
    LimitEstimate,
    ThermoCurve,
    boltzmann_ratio,
    choose_scale,
    geometric_schedule,
    ground_energy_via_limit,
    log_partition,
    mean_energy,
    thermo_curve,
)

__all__ = [
    "CapacityError",
    "Configuration",
    "CorrespondenceReport",
    "CouplingForm",
    "Instance",
    "LimitEstimate",
    "NormalizedInstance",
    "ParseError",
    "PhaseRow",
    "ScalingStudy",
    "SolverResult",
    "Spectrum",
    "ThermoCurve",
    "boltzmann_ratio",
    "brute_force",
    "choose_scale",
    "complete_kk",
    "correspond",
    "coupling_energy",
    "derive_seed",
    "energy",
    "expand_couplings",
    "generate",
    "geometric_schedule",
    "ground_eigenspace",
    "ground_energy_via_limit",
    "karmarkar_karp",
    "load",
    "log_partition",
    "mean_energy",
    "meet_in_the_middle",
    "normalize",
    "parse",
    "phase_sweep",
    "residual",
    "save",
    "scaling_study",
    "schroeppel_shamir",
    "serialize",
    "spectrum",
    "thermo_curve",
]

__version__ = "0.1.0"
