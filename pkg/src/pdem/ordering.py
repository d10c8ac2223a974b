"""Von Roos ordering-ambiguity algebra.

The kinetic operator (1/4)(M^a p M^b p M^g + M^g p M^b p M^a) with
a + b + g = -1 contributes ordering-dependent mass terms to the effective
potential.  This module provides the named parameter presets, those mass
terms, the mass-only potential piece V1 with its f/g coefficients, the
mass laws that make V1 vanish, and a grid check of the operator-reduction
identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import NumericError, ParameterError
from .masses import MassProfile

_PRESETS = {
    "BDD": (0.0, -1.0),
    "Bastard": (-1.0, 0.0),
    "ZK": (-0.5, 0.0),
    "Redistributed": (0.0, -0.5),
}

# |f - g| below this is treated as the exponential-law (f = g) case
FG_EQUAL_TOL = 1e-12


@dataclass(frozen=True)
class OrderingParams:
    """Ambiguity parameters (alpha, beta); gamma = -1 - alpha - beta always."""

    alpha: float
    beta: float
    preset: str = "Custom"

    @property
    def gamma(self) -> float:
        return -1.0 - self.alpha - self.beta

    @classmethod
    def bdd(cls) -> "OrderingParams":
        return cls(*_PRESETS["BDD"], preset="BDD")

    @classmethod
    def bastard(cls) -> "OrderingParams":
        return cls(*_PRESETS["Bastard"], preset="Bastard")

    @classmethod
    def zk(cls) -> "OrderingParams":
        return cls(*_PRESETS["ZK"], preset="ZK")

    @classmethod
    def redistributed(cls) -> "OrderingParams":
        return cls(*_PRESETS["Redistributed"], preset="Redistributed")

    @classmethod
    def custom(cls, alpha: float, beta: float) -> "OrderingParams":
        return cls(float(alpha), float(beta))

    @classmethod
    def from_spec(cls, spec: dict) -> "OrderingParams":
        """Build from {"preset": "ZK"} or {"alpha": ..., "beta": ...}."""
        if not isinstance(spec, dict):
            raise ParameterError(f"ordering spec must be an object: {spec!r}")
        if "preset" in spec:
            name = str(spec["preset"])
            for key, ab in _PRESETS.items():
                if key.lower() == name.lower():
                    return cls(*ab, preset=key)
            raise ParameterError(
                f"unknown ordering preset {name!r}; expected one of {sorted(_PRESETS)}"
            )
        if "alpha" in spec and "beta" in spec:
            return cls.custom(spec["alpha"], spec["beta"])
        raise ParameterError(
            "ordering spec needs either 'preset' or both 'alpha' and 'beta'"
        )

    def to_spec(self) -> dict:
        if self.preset != "Custom":
            return {"preset": self.preset}
        return {"alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class V1Coefficients:
    """Coefficients of V1 = f*M'^2/M^3 - g*M''/M^2."""

    f: float
    g: float

    @classmethod
    def from_params(cls, params: OrderingParams) -> "V1Coefficients":
        a, b = params.alpha, params.beta
        f = (a + 0.25) ** 2 + 0.5 * (a + 1.0) * (2.0 * b + 1.0)
        g = 0.25 * (2.0 * b + 1.0)
        return cls(f, g)


class VanishingMassLaw(NamedTuple):
    """Mass dependence that removes V1 for given (alpha, beta)."""

    law: str          # "power" or "exponential"
    xi: float | None  # exponent for the power law, None otherwise


def veff_mass_terms(params: OrderingParams, profile: MassProfile, x):
    """Ordering-dependent mass terms of the effective potential.

    Returns (1/2)(b+1) M''/M^2 - [a(a+b+1) + b+1] M'^2/M^3.
    """
    a, b = params.alpha, params.beta
    m = profile.m(x)
    m1 = profile.m1(x)
    m2 = profile.m2(x)
    c2 = 0.5 * (b + 1.0)
    c1 = a * (a + b + 1.0) + b + 1.0
    return c2 * m2 / m ** 2 - c1 * m1 * m1 / m ** 3


def v1(params: OrderingParams, profile: MassProfile, x):
    """Ambiguity-parameter potential piece V1 = f*M'^2/M^3 - g*M''/M^2."""
    coef = V1Coefficients.from_params(params)
    m = profile.m(x)
    m1 = profile.m1(x)
    m2 = profile.m2(x)
    return coef.f * m1 * m1 / m ** 3 - coef.g * m2 / m ** 2


def vanishing_mass_exponent(params: OrderingParams) -> VanishingMassLaw:
    """Mass law M(x) for which V1 vanishes when beta != -1/2.

    For f != g this is the power law M ~ x^xi with xi = 1/(1 - f/g); for
    f = g any exponential M ~ exp(+-kx) works.
    """
    coef = V1Coefficients.from_params(params)
    if coef.g == 0.0:
        raise ParameterError(
            "beta = -1/2 makes g vanish; V1 is then mass-independent in the "
            "M'' term and the alpha = -1/4 test applies instead"
        )
    if abs(coef.f - coef.g) < FG_EQUAL_TOL:
        return VanishingMassLaw("exponential", None)
    return VanishingMassLaw("power", 1.0 / (1.0 - coef.f / coef.g))


def _central_diff(values: np.ndarray, h: float) -> np.ndarray:
    """Central first derivative; output is two nodes shorter."""
    return (values[2:] - values[:-2]) / (2.0 * h)


def verify_operator_identity(
    params: OrderingParams,
    profile: MassProfile,
    testfn: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
) -> float:
    """Max-norm residual of the operator-reduction identity on a grid.

    Applies M^a D M^b D M^g + M^g D M^b D M^a (D = central difference) and
    the reduced form 2 D (1/M) D - (b+1)M''/M^2 + 2[a(a+b+1)+b+1]M'^2/M^3
    to ``testfn``; the difference must shrink as O(h^2).  The test function
    should vanish near the grid margins.
    """
    x = np.asarray(x, dtype=float)
    if x.size < 9:
        raise ParameterError("grid too short for the identity check")
    h = x[1] - x[0]
    if not np.allclose(np.diff(x), h, rtol=1e-12):
        raise ParameterError("identity check requires a uniform grid")

    a, b, g = params.alpha, params.beta, params.gamma
    m = profile.m(x)
    psi = np.asarray(testfn(x), dtype=float)

    def nested(e1: float, e2: float, e3: float) -> np.ndarray:
        inner = _central_diff(m ** e3 * psi, h)
        outer = _central_diff(m[1:-1] ** e2 * inner, h)
        return m[2:-2] ** e1 * outer

    lhs = nested(a, b, g) + nested(g, b, a)

    d_psi = _central_diff(psi, h)
    rhs = 2.0 * _central_diff(d_psi / m[1:-1], h)
    xc = x[2:-2]
    mc, m1c, m2c = profile.m(xc), profile.m1(xc), profile.m2(xc)
    rhs += (-(b + 1.0) * m2c / mc ** 2
            + 2.0 * (a * (a + b + 1.0) + b + 1.0) * m1c * m1c / mc ** 3) * psi[2:-2]

    residual = float(np.max(np.abs(lhs - rhs)))
    if not np.isfinite(residual):
        raise NumericError("operator identity residual is not finite")
    return residual
