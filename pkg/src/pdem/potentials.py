"""Constant-mass reference potentials U(y; a) with known spectra.

Ships the four models used by the generation scheme: a free constant, the
trigonometric Scarf I well, the Kratzer potential with its inverse-square
coupling pinned at -3/16 (conditionally exactly solvable), and the
symmetric quasi-exactly-solvable double well with two known levels.
Adding a model means adding one branch to each evaluator here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ParameterError

# Kratzer inverse-square strength; fixed, not a free coupling (CES)
KRATZER_INVERSE_SQUARE = -3.0 / 16.0


@dataclass(frozen=True)
class PotentialModel:
    """A reference potential U(y) on an open natural domain."""

    kind: str
    params: dict = field(default_factory=dict)
    domain: tuple[float, float] = (-math.inf, math.inf)

    @classmethod
    def free(cls, v0: float = 0.0) -> "PotentialModel":
        """U(y) = V0; no discrete constant-mass spectrum."""
        return cls("free", {"V0": float(v0)})

    @classmethod
    def scarf1(cls, A: float, B: float) -> "PotentialModel":
        """Scarf I well on (-pi/2, pi/2); requires 0 < B < A - 1."""
        if not (0.0 < B < A - 1.0):
            raise ParameterError(f"Scarf I requires 0 < B < A - 1, got A={A}, B={B}")
        return cls("scarf1", {"A": float(A), "B": float(B)},
                   domain=(-0.5 * math.pi, 0.5 * math.pi))

    @classmethod
    def kratzer(cls, gamma: float) -> "PotentialModel":
        """Kratzer potential on (0, inf); gamma > 0."""
        if gamma <= 0:
            raise ParameterError(f"Kratzer requires gamma > 0, got {gamma}")
        return cls("kratzer", {"gamma": float(gamma)}, domain=(0.0, math.inf))

    @classmethod
    def qes(cls, A: float) -> "PotentialModel":
        """Symmetric quasi-exactly-solvable double well; two known levels."""
        if A <= 0:
            raise ParameterError(f"QES model requires A > 0, got {A}")
        return cls("qes", {"A": float(A)})

    @classmethod
    def from_spec(cls, spec: dict) -> "PotentialModel":
        """Build from a JSON fragment, e.g. {"kind": "scarf1", "A": 3, "B": 1}."""
        if not isinstance(spec, dict) or "kind" not in spec:
            raise ParameterError(f"potential spec must be an object with 'kind': {spec!r}")
        kind = spec["kind"]
        if kind == "free":
            return cls.free(float(spec.get("V0", 0.0)))
        if kind == "scarf1":
            return cls.scarf1(float(spec["A"]), float(spec["B"]))
        if kind == "kratzer":
            return cls.kratzer(float(spec["gamma"]))
        if kind == "qes":
            return cls.qes(float(spec["A"]))
        raise ParameterError(
            f"unknown potential kind {kind!r}; expected free|scarf1|kratzer|qes"
        )

    def to_spec(self) -> dict:
        return {"kind": self.kind, **self.params}

    def u(self, y):
        """Evaluate U(y) strictly inside the natural domain."""
        y = np.asarray(y, dtype=float)
        lo, hi = self.domain
        if np.any(y <= lo) or np.any(y >= hi):
            raise DomainError(
                f"y outside the natural domain ({lo}, {hi}) of the {self.kind} potential"
            )
        if self.kind == "free":
            return np.full_like(y, self.params["V0"])
        if self.kind == "scarf1":
            A, B = self.params["A"], self.params["B"]
            sec = 1.0 / np.cos(y)
            return (A * (A - 1.0) + B * B) * sec ** 2 \
                - B * (2.0 * A - 1.0) * sec * np.tan(y) - A * A
        if self.kind == "kratzer":
            g = self.params["gamma"]
            return 4.0 * g * g + KRATZER_INVERSE_SQUARE / y ** 2 - g / y
        A = self.params["A"]
        return 0.25 * A * A * np.sinh(y) ** 2 - A * np.cosh(y) + 0.5 * A + 0.25


class KnownSpectrum(NamedTuple):
    levels: list[tuple[int, float]]
    qes_truncated: bool  # True when only the QES-known levels exist


def known_levels(model: PotentialModel, count: int) -> KnownSpectrum:
    """Closed-form levels (n, eps_n) of the constant-mass model.

    Scarf I: eps_n = (A+n)^2 - A^2 for n = 0..count-1.  Kratzer: odd n only
    (n = 1, 3, 5, ...) with eps_n = 4g^2 - 4g^2/(2n+1)^2; the even-n branch
    lacks the z^(3/4) small-z behaviour and is excluded.  QES: at most the
    two known levels (0, 0) and (1, A), flagged as truncated.
    """
    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count}")
    if model.kind == "free":
        raise ParameterError("free constant potential has no discrete constant-mass spectrum")
    if model.kind == "scarf1":
        A = model.params["A"]
        return KnownSpectrum(
            [(n, (A + n) ** 2 - A * A) for n in range(count)], False)
    if model.kind == "kratzer":
        g = model.params["gamma"]
        levels = []
        for i in range(count):
            n = 2 * i + 1
            levels.append((n, 4.0 * g * g - 4.0 * g * g / (2 * n + 1) ** 2))
        return KnownSpectrum(levels, False)
    A = model.params["A"]
    return KnownSpectrum([(0, 0.0), (1, A)][:max(count, 1)], True)


def solve_xq(q: float, tol: float = 1e-12) -> float:
    """Positive endpoint x_q of the deformed Scarf I domain.

    Root in (0, pi/2) of arctan(x) - (pi/2 - x)/q = 0, by bisection.
    Decreases monotonically from pi/2 (q -> 0) to 0 (q -> inf).
    """
    if q <= 0:
        raise ParameterError(f"deformation parameter must be positive, got q={q}")

    def f(x: float) -> float:
        return math.atan(x) - (0.5 * math.pi - x) / q

    a, b = 0.0, 0.5 * math.pi
    # f(0) = -pi/(2q) < 0, f(pi/2) = atan(pi/2) > 0: root is bracketed
    while b - a > tol:
        mid = 0.5 * (a + b)
        if f(mid) < 0.0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def eval_potential(model: PotentialModel, y):
    """Evaluate the reference potential at y."""
    return model.u(y)
