"""Squeezing-unitary change of basis for the degenerate OPO Hamiltonian.

Units: hbar = 1, so every coefficient is an angular frequency. The pump term
is written ``(g/2) e^{+i theta_p} a^2 + h.c.``; a Hamiltonian written with
``e^{-i theta_p} a^2`` maps onto this one by ``theta_p -> -theta_p``.
"""

from __future__ import annotations

import math
import cmath
from dataclasses import dataclass

from .core import SqueezedState, wrap_phase
from .errors import DomainError


@dataclass(frozen=True)
class BareOpoParams:
    g: float
    delta_c: float = 0.0
    theta_p: float = math.pi
    kappa: float = 1.0

    def __post_init__(self):
        if not (self.g >= 0.0) or not math.isfinite(self.g):
            raise DomainError(f"coupling g must be finite and >= 0, got {self.g!r}")
        if not (self.kappa > 0.0) or not math.isfinite(self.kappa):
            raise DomainError(f"kappa must be finite and > 0, got {self.kappa!r}")
        if not math.isfinite(self.delta_c) or not math.isfinite(self.theta_p):
            raise DomainError("detuning and pump phase must be finite")


@dataclass(frozen=True)
class TransformedHamiltonian:
    """H_s = c_a2 a_s^2 + c_a2_dag a_s^dag^2 + c_number a_s^dag a_s + c_scalar."""

    c_a2: complex
    c_a2_dag: complex
    c_number: float
    c_scalar: float


def transform_hamiltonian(params, reservoir):
    """Coefficients of the OPO Hamiltonian in the squeezed basis.

    Substitutes ``a = a_s cosh r - a_s^dag e^{-i theta} sinh r`` and normal
    orders with ``[a_s, a_s^dag] = 1``.
    """
    g, delta = params.g, params.delta_c
    ch, sh = math.cosh(reservoir.r), math.sinh(reservoir.r)
    phi = params.theta_p - reservoir.theta
    e_theta = cmath.exp(1j * reservoir.theta)
    e_phi = cmath.exp(1j * phi)

    c_a2 = e_theta * (0.5 * g * (e_phi * ch**2 + e_phi.conjugate() * sh**2) - delta * ch * sh)
    c_a2_dag = e_theta.conjugate() * (
        0.5 * g * (e_phi * sh**2 + e_phi.conjugate() * ch**2) - delta * ch * sh
    )
    cos_phi = math.cos(phi)
    c_number = delta * (ch**2 + sh**2) - 2.0 * g * ch * sh * cos_phi
    c_scalar = delta * sh**2 - g * ch * sh * cos_phi
    return TransformedHamiltonian(c_a2, c_a2_dag, c_number, c_scalar)


def enhanced_coupling(g, r):
    """Parametric coupling in the squeezed basis at theta_p - theta = pi: g cosh 2r."""
    if g < 0 or r < 0:
        raise DomainError(f"g and r must be >= 0, got ({g!r}, {r!r})")
    return g * math.cosh(2.0 * r)


def interaction_condition(params, reservoir, tol=1e-9):
    """True when the pump phase sits opposite the squeezing angle (mod 2 pi)."""
    if tol < 0:
        raise DomainError(f"tolerance must be >= 0, got {tol!r}")
    return abs(wrap_phase(params.theta_p - reservoir.theta) - math.pi) <= tol


def locked_params(g, kappa, delta_c=0.0, reservoir=None):
    """Bare parameters with the pump phase locked to theta + pi."""
    theta = reservoir.theta if reservoir is not None else 0.0
    return BareOpoParams(g=g, delta_c=delta_c, theta_p=wrap_phase(theta + math.pi), kappa=kappa)


__all__ = [
    "BareOpoParams",
    "SqueezedState",
    "TransformedHamiltonian",
    "enhanced_coupling",
    "interaction_condition",
    "locked_params",
    "transform_hamiltonian",
]
