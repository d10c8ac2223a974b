"""Effective-mass Schrodinger problems: construction, transformation, solution.

The package builds one-dimensional Schrodinger problems whose mass varies
with position, maps constant-mass reference potentials onto them through a
monotone change of coordinate, exposes the operator-ordering and
intertwining algebra as reusable pieces, and solves the resulting
Sturm-Liouville eigenproblems with a tridiagonal bisection engine.
"""

__version__ = "0.1.0"

from .errors import DomainError, NumericError, ParameterError, PdemError
from .intertwine import (
    FreeParticleState,
    Intertwiner,
    build_intertwiner,
    free_particle_states,
    legendre,
    partner_potentials,
    verify_intertwining,
)
from .masses import MASS_FLOOR, MassProfile, eval_mass, zmap
from .ordering import (
    OrderingParams,
    V1Coefficients,
    VanishingMassLaw,
    v1,
    vanishing_mass_exponent,
    veff_mass_terms,
    verify_operator_identity,
)
from .potentials import KnownSpectrum, PotentialModel, eval_potential, known_levels, solve_xq
from .solver import (
    DIRICHLET,
    BoundarySpec,
    Grid,
    Robin,
    SLMatrix,
    SpectrumResult,
    assemble,
    count_nodes,
    eigenvalues_bisect,
    eigenvector_inverse_iteration,
    solve,
    sturm_count,
)
from .transform import (
    PDEMProblem,
    TransformSpec,
    build_pdem,
    direct_problem,
    full_potential,
    mass_correction,
    pull_back_wavefunction,
    transform_energy,
    transform_spec_from_json,
    v2,
    veff_from_full_potential,
)

__all__ = [name for name in dir() if not name.startswith("_")]
