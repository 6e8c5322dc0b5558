"""Bound states of a two-component relativistic wave equation in 1D.

The package splits into a thin core (`fvcore`) holding the field
containers and spinor algebra, two production solvers (`matchsolver`
for potentials with known exterior solutions, `shootsolver` for
finite-range wells), a closed-form family (`closedform`), an
independent low-tech cross-check (`oracle`), and the special functions
they share (`specfun`).  `cli` exposes all of it as subcommands.
"""

from .errors import (
    AnchorSingularity,
    DomainError,
    Fv1dError,
    GridTooCoarse,
    InteriorPole,
    InvalidParameter,
    NegativeCharge,
    NoRoots,
    NonConvergence,
    OutsideDecayWindow,
    PoleAtZero,
    PrecisionLossWarning,
    StepUnderflow,
    ZeroNorm,
)
from .fvcore import (
    ANTIPARTICLE,
    PARTICLE,
    EigenSolution,
    SpinorField,
    WaveFunction,
    component_ratio,
    conjugate_spectrum,
    count_nodes,
    mixing_factor,
    normalize,
    reconstruct_spinor,
)
from .potentials import (
    Cornell,
    CoulombCutoff,
    PoschlTeller,
    PotentialSpec,
    PowerExp,
    WoodsSaxon,
)

__version__ = "0.1.0"

__all__ = [
    "ANTIPARTICLE",
    "AnchorSingularity",
    "Cornell",
    "CoulombCutoff",
    "DomainError",
    "EigenSolution",
    "Fv1dError",
    "GridTooCoarse",
    "InteriorPole",
    "InvalidParameter",
    "NegativeCharge",
    "NoRoots",
    "NonConvergence",
    "OutsideDecayWindow",
    "PARTICLE",
    "PoleAtZero",
    "PoschlTeller",
    "PotentialSpec",
    "PowerExp",
    "PrecisionLossWarning",
    "SpinorField",
    "StepUnderflow",
    "WaveFunction",
    "WoodsSaxon",
    "ZeroNorm",
    "component_ratio",
    "conjugate_spectrum",
    "count_nodes",
    "mixing_factor",
    "normalize",
    "reconstruct_spinor",
    "__version__",
]
