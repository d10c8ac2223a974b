"""Coordinate transformation between constant-mass and effective-mass problems.

A constant-mass model U(y) together with a mass profile and the affine map
y = lam*z(x) + nu produces the coordinate-transformed piece
V2(x) = lam^2 U(lam z(x) + nu), the solvable-form effective potential
V_eff = V2 + M''/(4M^2) - 7M'^2/(16M^3), the full generated potential
V = V1 + V2, the wavefunction pullback and the energy scaling E = lam^2 eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, ParameterError
from .masses import MassProfile
from .ordering import OrderingParams, v1, veff_mass_terms
from .potentials import PotentialModel


def mass_correction(profile: MassProfile, x):
    """M''/(4M^2) - 7M'^2/(16M^3), the substitution-induced mass terms."""
    m = profile.m(x)
    m1 = profile.m1(x)
    m2 = profile.m2(x)
    return m2 / (4.0 * m ** 2) - 7.0 * m1 * m1 / (16.0 * m ** 3)


@dataclass(frozen=True)
class TransformSpec:
    """Reference model + mass profile + affine map parameters (lam, nu)."""

    model: PotentialModel
    profile: MassProfile
    lam: float = 1.0
    nu: float = 0.0
    x_domain: tuple[float, float] = field(init=False)

    def __post_init__(self):
        if self.lam == 0.0:
            raise ParameterError("transform scale lambda must be nonzero")
        object.__setattr__(self, "x_domain", self._effective_domain())

    def _effective_domain(self) -> tuple[float, float]:
        """Open x-interval where lam*z(x) + nu stays inside the model domain."""
        ylo, yhi = self.model.domain
        if self.lam < 0:
            ylo, yhi = yhi, ylo
        zlo_needed = (ylo - self.nu) / self.lam
        zhi_needed = (yhi - self.nu) / self.lam
        zlo, zhi = self.profile.z_range()
        plo, phi = self.profile.domain
        xlo = plo if zlo_needed <= zlo else self.profile.z_inverse(zlo_needed)
        xhi = phi if zhi_needed >= zhi else self.profile.z_inverse(zhi_needed)
        if not xlo < xhi:
            raise ParameterError(
                "empty effective domain: the mapped coordinate never enters "
                f"the model domain ({self.model.domain})"
            )
        return (xlo, xhi)

    def y(self, x):
        """Mapped coordinate y = lam*z(x) + nu."""
        return self.lam * self.profile.z(x) + self.nu

    def to_spec(self) -> dict:
        return {"model": self.model.to_spec(), "mass": self.profile.to_spec(),
                "lambda": self.lam, "nu": self.nu}


@dataclass(frozen=True)
class PDEMProblem:
    """Self-adjoint form -d/dx (1/M) d/dx + veff on an open x-interval."""

    profile: MassProfile
    veff: Callable[[np.ndarray], np.ndarray]
    x_domain: tuple[float, float]
    energy_scale: float = 1.0  # E = energy_scale * eps for transformed problems


def v2(spec: TransformSpec, x):
    """Coordinate-transformed potential lam^2 U(lam z(x) + nu)."""
    x = np.asarray(x, dtype=float)
    lo, hi = spec.x_domain
    if np.any(x <= lo) or np.any(x >= hi):
        raise DomainError(
            f"x outside the effective domain ({lo}, {hi}) fixed by the "
            f"{spec.model.kind} domain under the z-map"
        )
    return spec.lam ** 2 * spec.model.u(spec.y(x))


def build_pdem(spec: TransformSpec) -> PDEMProblem:
    """Effective-mass problem equivalent to the constant-mass model.

    veff(x) = lam^2 U(lam z + nu) + M''/(4M^2) - 7M'^2/(16M^3); eigenvalues
    relate to the model's through E = lam^2 eps.
    """

    def veff(x):
        return v2(spec, x) + mass_correction(spec.profile, x)

    return PDEMProblem(spec.profile, veff, spec.x_domain, spec.lam ** 2)


def direct_problem(
    profile: MassProfile,
    params: OrderingParams,
    potential: Callable[[np.ndarray], np.ndarray] | float = 0.0,
    domain: tuple[float, float] | None = None,
) -> PDEMProblem:
    """Effective-mass problem for a directly given potential V(x).

    Uses the ordering-dependent reduction: veff = V + mass terms(alpha, beta).
    This is the route for the free-particle-in-a-mass-background family,
    where V is a constant and the ordering matters.
    """
    if domain is None:
        domain = profile.domain

    def veff(x):
        base = potential(x) if callable(potential) else float(potential)
        return base + veff_mass_terms(params, profile, x)

    return PDEMProblem(profile, veff, domain, 1.0)


def full_potential(spec: TransformSpec, params: OrderingParams, x):
    """Generated potential V(x) = V1(x; alpha, beta) + V2(x; a)."""
    return v1(params, spec.profile, x) + v2(spec, x)


def veff_from_full_potential(spec: TransformSpec, params: OrderingParams, x):
    """Effective potential via the ordering route: V + ordering mass terms.

    Must agree pointwise with the transform route used by build_pdem; the
    agreement is the central algebraic identity of the scheme.
    """
    return full_potential(spec, params, x) + veff_mass_terms(params, spec.profile, x)


def pull_back_wavefunction(spec: TransformSpec, phi: Callable, x):
    """psi(x) = M(x)^(1/4) * phi(lam z(x) + nu)."""
    x = np.asarray(x, dtype=float)
    lo, hi = spec.x_domain
    if np.any(x <= lo) or np.any(x >= hi):
        raise DomainError(f"x outside the effective domain ({lo}, {hi})")
    return spec.profile.m(x) ** 0.25 * np.asarray(phi(spec.y(x)), dtype=float)


def transform_energy(lam: float, eps: float) -> float:
    """Constant-mass energy eps maps to E = lam^2 * eps."""
    return lam * lam * eps


def transform_spec_from_json(obj: dict) -> TransformSpec:
    """Parse {"model": {...}, "mass": {...}, "lambda": 1.0, "nu": 0.0}."""
    if not isinstance(obj, dict) or "model" not in obj or "mass" not in obj:
        raise ParameterError("transform spec needs 'model' and 'mass' objects")
    return TransformSpec(
        model=PotentialModel.from_spec(obj["model"]),
        profile=MassProfile.from_spec(obj["mass"]),
        lam=float(obj.get("lambda", 1.0)),
        nu=float(obj.get("nu", 0.0)),
    )
