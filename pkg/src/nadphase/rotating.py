"""Exact closed-form solution for the precessing field via the rotating frame.

In the frame co-rotating with the field the Hamiltonian is static: the field
direction tips to θ̄ with tanθ̄ = sinθ/(cosθ − x), the stationary splitting is
the Rabi-type frequency Ω₀, and the initial lower eigenstate decomposes with
coefficients a₊ = −sin(Δθ/2), a₋ = cos(Δθ/2) where Δθ = θ̄ − θ. Transforming
back to the lab frame yields the exact state and, from it, the persistence
factor

    Re S = cos(dτ/2)cos(eτ/2) + g·sin(dτ/2)sin(eτ/2)
    Im S = −sin(dτ/2)cos(eτ/2) + g·cos(dτ/2)sin(eτ/2)

This module is the primary analytic oracle for the evolution engine. All
quantities are dimensionless: the level splitting sets 2R = 1, so ω = x,
t = τ, d = δ and e = Ω₀ in these units. d, e, g are computed here through the
physical route (detuning, coupling, Ω₀ = √(δ² + 4C²), g = cos Δθ), deliberately
independent of the algebraic forms used by the frequency-sweep module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DegenerateSplittingError(ValueError):
    """The rotating-frame splitting vanishes (requires x = 1 and θ = 0)."""


@dataclass(frozen=True)
class RotatingFrameSolution:
    """Rotating-frame geometry and expansion coefficients at one (x, θ)."""

    theta_bar: float
    Delta_theta: float
    Omega0: float
    a_plus: float
    a_minus: float
    d: float
    e: float
    g: float


def solve_rotating_frame(x: float, theta: float) -> RotatingFrameSolution:
    """Tip angle, Rabi frequency, and initial-state coefficients.

    θ̄ is taken from atan2(sinθ, cosθ − x) so it stays in [0, π] and Δθ is
    continuous in x even past cosθ = x.
    """
    if x < 0:
        raise ValueError(f"x must be non-negative, got {x}")
    if not 0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    d = 1 - x * math.cos(theta)
    e = math.sqrt(1 - 2 * x * math.cos(theta) + x * x)
    if e == 0.0:
        raise DegenerateSplittingError("Omega0 = 0 at x = 1, theta = 0")
    theta_bar = math.atan2(math.sin(theta), math.cos(theta) - x)
    Delta = theta_bar - theta
    return RotatingFrameSolution(
        theta_bar=theta_bar,
        Delta_theta=Delta,
        Omega0=e,
        a_plus=-math.sin(Delta / 2),
        a_minus=math.cos(Delta / 2),
        d=d,
        e=e,
        g=math.cos(Delta),
    )


def exact_S(x: float, theta: float, tau) -> complex:
    """Exact persistence factor S(τ), real and imaginary parts assembled
    term by term from the rotating-frame solution."""
    sol = solve_rotating_frame(x, theta)
    hd, he = sol.d * np.asarray(tau) / 2, sol.e * np.asarray(tau) / 2
    re = np.cos(hd) * np.cos(he) + sol.g * np.sin(hd) * np.sin(he)
    im = -np.sin(hd) * np.cos(he) + sol.g * np.cos(hd) * np.sin(he)
    return re + 1j * im


def propagate_exact(x: float, theta: float, tau: float, psi0=None) -> np.ndarray:
    """Exact lab-frame state at τ for an arbitrary initial state.

    ψ₀ defaults to the lower instantaneous eigenstate (sin θ/2, −cos θ/2).
    The state is expanded in the rotating-frame eigenbasis, advanced with the
    stationary phases e^{∓iΩ₀τ/2}, and rotated back with diag(e^{−ixτ/2},
    e^{+ixτ/2}). Unitary, so the norm is preserved exactly.
    """
    sol = solve_rotating_frame(x, theta)
    hb = sol.theta_bar / 2
    vbar_plus = np.array([math.cos(hb), math.sin(hb)])
    vbar_minus = np.array([math.sin(hb), -math.cos(hb)])
    if psi0 is None:
        half = theta / 2
        psi0 = np.array([math.sin(half), -math.cos(half)])
    psi0 = np.asarray(psi0, dtype=complex)
    b_plus = vbar_plus @ psi0
    b_minus = vbar_minus @ psi0
    psi_rot = (b_plus * np.exp(-0.5j * sol.Omega0 * tau) * vbar_plus
               + b_minus * np.exp(+0.5j * sol.Omega0 * tau) * vbar_minus)
    return np.array([np.exp(-0.5j * x * tau) * psi_rot[0],
                     np.exp(+0.5j * x * tau) * psi_rot[1]])


def exact_state(x: float, theta: float, tau: float) -> np.ndarray:
    """Exact state evolved from the lower instantaneous eigenstate."""
    return propagate_exact(x, theta, tau)


def exact_rho(x: float, theta: float, tau: float, samples_per_cycle: int = 256) -> float:
    """Continuous phase of S(τ) unwrapped from ρ(0) = 0 along a dense τ grid."""
    n = max(samples_per_cycle, int(samples_per_cycle * abs(tau) / (2 * math.pi)) + 1)
    ts = np.linspace(0.0, tau, n)
    S = exact_S(x, theta, ts)
    return float(np.unwrap(np.angle(S))[-1])
