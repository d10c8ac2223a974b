"""First-order intertwining machinery for effective-mass Hamiltonians.

Builds eta = A(x) d/dx + B(x) with A = M^(-1/2) and B = -(1/2)(b+1)M'/M^(3/2)
under the free-particle constraint b = -2a - 1, the partner effective
potentials it links, the analytic bound states of the sech^2-mass free
particle (Legendre polynomials in tanh), and a grid check of eta H = H1 eta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, ParameterError
from .masses import MassProfile


def legendre(n: int, t):
    """Legendre polynomial P_n(t) and derivative P_n'(t) on [-1, 1].

    Three-term recurrence (k+1)P_{k+1} = (2k+1) t P_k - k P_{k-1}; the
    derivative from (1-t^2) P_n' = n (P_{n-1} - t P_n) with the finite
    endpoint limits P_n'(+-1) = (+-1)^(n-1) n(n+1)/2.
    """
    if n < 0:
        raise ParameterError(f"degree must be nonnegative, got {n}")
    scalar = np.isscalar(t) or np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(np.abs(t) > 1.0):
        raise DomainError("Legendre argument must satisfy |t| <= 1")
    p_prev = np.ones_like(t)
    if n == 0:
        zero = np.zeros_like(t)
        return (p_prev[0], zero[0]) if scalar else (p_prev, zero)
    p = t.copy()
    for k in range(1, n):
        p, p_prev = ((2 * k + 1) * t * p - k * p_prev) / (k + 1), p
    one_minus = 1.0 - t * t
    endpoint = np.abs(t) == 1.0
    deriv = np.empty_like(t)
    safe = ~endpoint
    deriv[safe] = n * (p_prev[safe] - t[safe] * p[safe]) / one_minus[safe]
    deriv[endpoint] = np.sign(t[endpoint]) ** (n - 1) * n * (n + 1) / 2.0
    return (p[0], deriv[0]) if scalar else (p, deriv)


@dataclass(frozen=True)
class FreeParticleState:
    """Analytic bound state of the sech^2-mass free particle."""

    n: int
    q: float
    energy: float                      # E'_n = q^2 n(n+1)
    psi: Callable[[np.ndarray], np.ndarray]
    partner: Callable[[np.ndarray], np.ndarray] | None  # phi_{n-1}, None for n = 0


def free_particle_states(q: float, n: int) -> FreeParticleState:
    """Unit-normalized psi_n and partner phi_{n-1} for mass sech^2(qx).

    psi_n(x) = sqrt(q(2n+1)/2) sech(qx) P_n(tanh qx) with energy q^2 n(n+1);
    for n >= 1 the partner eigenfunction is proportional to
    d/dx P_n(tanh qx) = q sech^2(qx) P_n'(tanh qx), also unit-normalized.
    Signs follow the positive leading Legendre coefficient.
    """
    if q <= 0:
        raise ParameterError(f"q must be positive, got {q}")
    if n < 0:
        raise ParameterError(f"n must be nonnegative, got {n}")
    energy = q * q * n * (n + 1)
    c_psi = math.sqrt(q * (2 * n + 1) / 2.0)

    def psi(x, _n=n, _q=q, _c=c_psi):
        x = np.asarray(x, dtype=float)
        p, _ = legendre(_n, np.tanh(_q * x))
        return _c * p / np.cosh(_q * x)

    partner = None
    if n >= 1:
        c_phi = math.sqrt(q * (2 * n + 1) / (2.0 * n * (n + 1)))

        def partner(x, _n=n, _q=q, _c=c_phi):
            x = np.asarray(x, dtype=float)
            _, dp = legendre(_n, np.tanh(_q * x))
            return _c * dp / np.cosh(_q * x) ** 2

    return FreeParticleState(n, q, energy, psi, partner)


@dataclass(frozen=True)
class Intertwiner:
    """eta = A(x) d/dx + B(x) with the free-particle restrictions built in."""

    alpha: float
    profile: MassProfile
    lambda0: float = 0.0  # integration constant of the V_eff restriction

    @property
    def beta(self) -> float:
        return -2.0 * self.alpha - 1.0

    def a_coef(self, x):
        """A(x) = M^(-1/2)."""
        return 1.0 / self.profile.sqrt_m(x)

    def b_coef(self, x):
        """B(x) = -(1/2)(beta+1) M'/M^(3/2) = alpha M'/M^(3/2)."""
        m = self.profile.m(x)
        return self.alpha * self.profile.m1(x) / (m * self.profile.sqrt_m(x))

    def veff_from_restriction(self, x):
        """lambda0 + B^2 - (AB)' with exact profile derivatives.

        Reproduces the free-particle V_eff when lambda0 = V0.
        """
        m = self.profile.m(x)
        m1 = self.profile.m1(x)
        m2 = self.profile.m2(x)
        a = self.alpha
        b_sq = a * a * m1 * m1 / m ** 3
        ab_prime = a * (m2 / m ** 2 - 2.0 * m1 * m1 / m ** 3)
        return self.lambda0 + b_sq - ab_prime

    def apply(self, f: np.ndarray, h: float, x: np.ndarray) -> np.ndarray:
        """(eta f) via central differences; output trims one node per side."""
        df = (f[2:] - f[:-2]) / (2.0 * h)
        xc = x[1:-1]
        return self.a_coef(xc) * df + self.b_coef(xc) * f[1:-1]


def build_intertwiner(alpha: float, profile: MassProfile,
                      lambda0: float = 0.0) -> Intertwiner:
    """Intertwiner with A = M^(-1/2), B from alpha, beta = -2 alpha - 1."""
    return Intertwiner(float(alpha), profile, float(lambda0))


def partner_potentials(alpha: float, profile: MassProfile, v0: float, x):
    """Free-particle partner pair (V_eff, V_1eff) for the constraint family.

    V_eff  = V0 - a M''/M^2 + a(a+2) M'^2/M^3
    V_1eff = V0 + (a+1/2) M''/M^2 + (a+1/2)(a-3/2) M'^2/M^3
    The pair swaps under a -> -(a + 1/2).
    """
    a = float(alpha)
    m = profile.m(x)
    m1 = profile.m1(x)
    m2 = profile.m2(x)
    r2 = m2 / m ** 2
    r1 = m1 * m1 / m ** 3
    veff = v0 - a * r2 + a * (a + 2.0) * r1
    v1eff = v0 + (a + 0.5) * r2 + (a + 0.5) * (a - 1.5) * r1
    return veff, v1eff


def _apply_hamiltonian(profile: MassProfile, veff_fn, f: np.ndarray,
                       h: float, x: np.ndarray) -> np.ndarray:
    """-D (1/M) D f + veff f with the conservative midpoint stencil."""
    xm = 0.5 * (x[:-1] + x[1:])
    p = 1.0 / profile.m(xm)
    flux = p * (f[1:] - f[:-1]) / h
    lap = (flux[1:] - flux[:-1]) / h
    return -lap + veff_fn(x[1:-1]) * f[1:-1]


def verify_intertwining(
    intertwiner: Intertwiner,
    veff_fn: Callable[[np.ndarray], np.ndarray],
    v1eff_fn: Callable[[np.ndarray], np.ndarray],
    testfn: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
) -> float:
    """Max-norm of (eta H - H1 eta) testfn on the grid interior.

    H and H1 share the kinetic part -d/dx (1/M) d/dx and carry veff_fn and
    v1eff_fn respectively.  The residual must vanish as O(h^2) under grid
    refinement for smooth test functions vanishing near the margins.
    """
    x = np.asarray(x, dtype=float)
    h = x[1] - x[0]
    f = np.asarray(testfn(x), dtype=float)

    hf = _apply_hamiltonian(intertwiner.profile, veff_fn, f, h, x)       # on x[1:-1]
    eta_hf = intertwiner.apply(hf, h, x[1:-1])                           # on x[2:-2]

    eta_f = intertwiner.apply(f, h, x)                                   # on x[1:-1]
    h1_eta_f = _apply_hamiltonian(intertwiner.profile, v1eff_fn, eta_f,
                                  h, x[1:-1])                            # on x[2:-2]

    return float(np.max(np.abs(eta_hf - h1_eta_f)))
