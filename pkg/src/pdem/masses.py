"""Catalog of dimensionless mass profiles M(x).

Each profile carries exact evaluators for M, M', M'', sqrt(M) and the
monotone coordinate map z(x) = integral of sqrt(M).  Units are fixed by
hbar = 2*m0 = 1; the physical mass is m(x) = m0*M(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError, NumericError, ParameterError

# Below this value 1/M is treated as numerically unusable; the solver
# refuses midpoints that violate it and callers should shrink the box.
MASS_FLOOR = 1e-12

_KINDS = ("constant", "sech2", "rational", "power", "exp")


@dataclass(frozen=True)
class MassProfile:
    """A positive mass function M(x) on an open interval.

    Construct through the classmethods (``constant``, ``sech_squared``,
    ``rational_su11``, ``power_law``, ``exponential``) rather than directly.
    Instances are immutable and all evaluators are pure, so profiles are safe
    to share across threads.
    """

    kind: str
    params: dict = field(default_factory=dict)
    domain: tuple[float, float] = (-math.inf, math.inf)

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls) -> "MassProfile":
        """M(x) = 1."""
        return cls("constant")

    @classmethod
    def sech_squared(cls, q: float) -> "MassProfile":
        """Solitonic profile M(x) = sech^2(qx), q > 0."""
        if q <= 0:
            raise ParameterError(f"sech_squared requires q > 0, got q={q}")
        return cls("sech2", {"q": float(q)})

    @classmethod
    def rational_su11(cls, q: float) -> "MassProfile":
        """M(x) = (1 + q/(1+x^2))^2, q > 0."""
        if q <= 0:
            raise ParameterError(f"rational_su11 requires q > 0, got q={q}")
        return cls("rational", {"q": float(q)})

    @classmethod
    def power_law(cls, xi: float) -> "MassProfile":
        """M(x) = x^xi on x > 0 (singular or vanishing at the origin)."""
        return cls("power", {"xi": float(xi)}, domain=(0.0, math.inf))

    @classmethod
    def exponential(cls, k: float, sign: int = 1) -> "MassProfile":
        """M(x) = exp(sign*k*x), k > 0, sign in {+1, -1}."""
        if k <= 0:
            raise ParameterError(f"exponential requires k > 0, got k={k}")
        if sign not in (1, -1):
            raise ParameterError(f"exponential sign must be +1 or -1, got {sign}")
        return cls("exp", {"k": float(k), "sign": int(sign)})

    @classmethod
    def from_spec(cls, spec: dict) -> "MassProfile":
        """Build a profile from a JSON fragment like {"kind": "sech2", "q": 0.5}."""
        if not isinstance(spec, dict) or "kind" not in spec:
            raise ParameterError(f"mass spec must be an object with a 'kind' key: {spec!r}")
        kind = spec["kind"]
        if kind == "constant":
            return cls.constant()
        if kind == "sech2":
            return cls.sech_squared(_require(spec, "q"))
        if kind == "rational":
            return cls.rational_su11(_require(spec, "q"))
        if kind == "power":
            return cls.power_law(_require(spec, "xi"))
        if kind == "exp":
            return cls.exponential(_require(spec, "k"), int(spec.get("sign", 1)))
        raise ParameterError(f"unknown mass kind {kind!r}; expected one of {_KINDS}")

    def to_spec(self) -> dict:
        return {"kind": self.kind, **self.params}

    # -- evaluation ---------------------------------------------------------

    def _check_domain(self, x):
        lo, hi = self.domain
        if np.any(np.asarray(x) <= lo) or np.any(np.asarray(x) >= hi):
            raise DomainError(
                f"x outside the validity interval ({lo}, {hi}) of {self.kind} profile"
            )

    def m(self, x):
        """M(x)."""
        self._check_domain(x)
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.ones_like(x)
        if self.kind == "sech2":
            q = self.params["q"]
            return 1.0 / np.cosh(q * x) ** 2
        if self.kind == "rational":
            q = self.params["q"]
            return (1.0 + q / (1.0 + x * x)) ** 2
        if self.kind == "power":
            return x ** self.params["xi"]
        k, s = self.params["k"], self.params["sign"]
        return np.exp(s * k * x)

    def m1(self, x):
        """M'(x)."""
        self._check_domain(x)
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.zeros_like(x)
        if self.kind == "sech2":
            q = self.params["q"]
            s = 1.0 / np.cosh(q * x)
            return -2.0 * q * s * s * np.tanh(q * x)
        if self.kind == "rational":
            q = self.params["q"]
            u = 1.0 + q / (1.0 + x * x)
            du = -2.0 * q * x / (1.0 + x * x) ** 2
            return 2.0 * u * du
        if self.kind == "power":
            xi = self.params["xi"]
            return xi * x ** (xi - 1.0)
        k, s = self.params["k"], self.params["sign"]
        return s * k * np.exp(s * k * x)

    def m2(self, x):
        """M''(x)."""
        self._check_domain(x)
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.zeros_like(x)
        if self.kind == "sech2":
            q = self.params["q"]
            s = 1.0 / np.cosh(q * x)
            t = np.tanh(q * x)
            return 2.0 * q * q * s * s * (2.0 * t * t - s * s)
        if self.kind == "rational":
            q = self.params["q"]
            u = 1.0 + q / (1.0 + x * x)
            du = -2.0 * q * x / (1.0 + x * x) ** 2
            d2u = 2.0 * q * (3.0 * x * x - 1.0) / (1.0 + x * x) ** 3
            return 2.0 * (du * du + u * d2u)
        if self.kind == "power":
            xi = self.params["xi"]
            return xi * (xi - 1.0) * x ** (xi - 2.0)
        k, s = self.params["k"], self.params["sign"]
        return k * k * np.exp(s * k * x)

    def sqrt_m(self, x):
        """sqrt(M(x)), always the positive root."""
        self._check_domain(x)
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.ones_like(x)
        if self.kind == "sech2":
            return 1.0 / np.cosh(self.params["q"] * x)
        if self.kind == "rational":
            return 1.0 + self.params["q"] / (1.0 + x * x)
        if self.kind == "power":
            return x ** (0.5 * self.params["xi"])
        k, s = self.params["k"], self.params["sign"]
        return np.exp(0.5 * s * k * x)

    def below_floor(self, x) -> np.ndarray:
        """Flag positions where M(x) < MASS_FLOOR (1/M would overflow)."""
        return np.asarray(self.m(x)) < MASS_FLOOR

    # -- coordinate map -----------------------------------------------------

    @property
    def z_origin(self) -> float:
        """Reference point x0 with z(x0) = 0 (1 for the power law, else 0)."""
        return 1.0 if self.kind == "power" else 0.0

    def z(self, x):
        """z(x) = integral of sqrt(M) from the reference point, closed form."""
        self._check_domain(x)
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return x + 0.0
        if self.kind == "sech2":
            q = self.params["q"]
            return np.arctan(np.sinh(q * x)) / q
        if self.kind == "rational":
            q = self.params["q"]
            return x + q * np.arctan(x)
        if self.kind == "power":
            a = 0.5 * self.params["xi"] + 1.0
            if a == 0.0:
                return np.log(x)
            return (x ** a - 1.0) / a
        k, s = self.params["k"], self.params["sign"]
        return (2.0 / (s * k)) * (np.exp(0.5 * s * k * x) - 1.0)

    def z_numeric(self, x: float) -> float:
        """z(x) by adaptive quadrature; interchangeable with the closed form."""
        self._check_domain(x)
        val, err = quad(lambda t: float(self.sqrt_m(t)), self.z_origin, float(x),
                        epsabs=1e-12, limit=200)
        if not math.isfinite(val) or err > 1e-8:
            raise NumericError(f"quadrature of sqrt(M) failed on [{self.z_origin}, {x}]")
        return val

    def z_range(self) -> tuple[float, float]:
        """Open interval of z values attained on the profile domain."""
        lo, hi = self.domain
        return (self._z_limit(lo, toward=-1), self._z_limit(hi, toward=+1))

    def _z_limit(self, x: float, toward: int) -> float:
        if math.isinf(x):
            if self.kind == "sech2":
                q = self.params["q"]
                return toward * 0.5 * math.pi / q
            if self.kind == "exp" and self.params["sign"] * toward < 0:
                # exp map saturates at -2*sign/k on the decaying side
                return -2.0 * self.params["sign"] / self.params["k"]
            if self.kind == "power":
                a = 0.5 * self.params["xi"] + 1.0
                if a < 0:
                    return -1.0 / a
            return toward * math.inf
        if self.kind == "power" and x == 0.0:
            a = 0.5 * self.params["xi"] + 1.0
            return -math.inf if a <= 0 else -1.0 / a
        return float(self.z(x))

    def z_inverse(self, zval: float) -> float:
        """x with z(x) = zval (z is strictly increasing)."""
        zlo, zhi = self.z_range()
        if not (zlo < zval < zhi):
            raise DomainError(f"z value {zval} outside attainable range ({zlo}, {zhi})")
        lo, hi = self.domain
        x0 = self.z_origin

        def f(t: float) -> float:
            return float(self.z(t)) - zval

        # expand a bracket [a, b] around the reference point: doubling steps
        # toward an infinite bound, geometric halving toward a finite one
        a = b = x0
        step = 1.0
        for _ in range(2000):
            if f(a) <= 0:
                break
            b = a
            a = a - step if math.isinf(lo) else 0.5 * (a + lo)
            step *= 2.0
        else:
            raise NumericError("failed to bracket z inverse (left)")
        step = 1.0
        for _ in range(2000):
            if f(b) >= 0:
                break
            a = b
            b = b + step if math.isinf(hi) else 0.5 * (b + hi)
            step *= 2.0
        else:
            raise NumericError("failed to bracket z inverse (right)")
        if a == b:
            return a
        return brentq(f, a, b, xtol=1e-14, rtol=8.9e-16)


def _require(spec: dict, key: str) -> float:
    if key not in spec:
        raise ParameterError(f"mass spec {spec!r} is missing required key {key!r}")
    return float(spec[key])


def eval_mass(profile: MassProfile, x):
    """Return the tuple (M, M', M'', sqrt(M)) at x."""
    return profile.m(x), profile.m1(x), profile.m2(x), profile.sqrt_m(x)


def zmap(profile: MassProfile, x):
    """Coordinate map z(x); closed form for every catalog profile."""
    return profile.z(x)
