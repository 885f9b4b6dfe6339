"""Environmental parameter paths and the instantaneous spectral frame.

A two-level system couples to a classical vector R(t) through H(t) = R(t)·σ,
with R(t) parameterized by a magnitude R and spherical angles (θ, φ). This
module defines the path families (uniform precession and sampled/interpolated
paths), the instantaneous eigensystem of H(t) in a fixed gauge, and the
derived coupling quantities that drive the amplitude evolution:

    γ̇₊ = −φ̇ sin²(θ/2)          γ̇₋ = −φ̇ cos²(θ/2)
    Γ₋  = θ̇/2 − (i/2) φ̇ sinθ    δ  = 2R − φ̇ cosθ

Natural units with ħ = 1 throughout. The gauge fixes the first component of
each eigenvector real and non-negative; sampled paths are restricted to
θ ∈ (0, π) to keep that gauge smooth. Precessing paths with θ ∈ {0, π} are
allowed and simply have Γ₋ = 0.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline


class GaugeSingularityError(ValueError):
    """A sampled path reached θ outside (0, π), where the gauge is singular."""


@dataclass(frozen=True, eq=False)
class EigenFrame:
    """Instantaneous eigensystem and couplings of H(t) at one time point."""

    t: float
    E_plus: float
    E_minus: float
    v_plus: np.ndarray
    v_minus: np.ndarray
    gamma_rate_plus: float
    gamma_rate_minus: float
    Gamma_minus: complex
    delta: float

    @property
    def Gamma_plus(self) -> complex:
        """Coupling for the upper level, Γ₊ = −Γ₋*."""
        return -np.conj(self.Gamma_minus)


@dataclass(frozen=True)
class CouplingKernel:
    """The functions that drive the persistence evolution.

    F(t) = Γ₋(t)·exp[i∫₀ᵗ δ(τ)dτ] carries every consequence of the
    non-adiabatic motion; |F(t)| = |Γ₋(t)| for all t. ``gamma_rates``
    returns (γ̇₊, γ̇₋) and ``delta_integral`` the accumulated phase ∫₀ᵗ δ.
    """

    F: Callable[[float], complex]
    delta: Callable[[float], float]
    Gamma_minus: Callable[[float], complex]
    gamma_rates: Callable[[float], tuple[float, float]]
    delta_integral: Callable[[float], float]


@dataclass(frozen=True)
class PrecessingPath:
    """R(t) of constant magnitude precessing about z at fixed polar angle.

    θ is constant, φ(t) = ω t. ``duration`` is advisory (the path is defined
    for all t); it defaults to one precession cycle.
    """

    R: float
    theta: float
    omega: float
    duration: float | None = None

    kind = "precessing"

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError(f"R must be positive, got {self.R}")
        if not 0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if self.duration is None and self.omega != 0:
            object.__setattr__(self, "duration", 2 * math.pi / abs(self.omega))

    @classmethod
    def dimensionless(cls, x: float, theta: float) -> "PrecessingPath":
        """Path in units where the level splitting 2R = 1, so ω = x and t = τ."""
        return cls(R=0.5, theta=theta, omega=x)

    def angles(self, t):
        return self.theta, self.omega * t

    def rates(self, t):
        return 0.0, self.omega

    def magnitude(self, t):
        return self.R


class SampledPath:
    """Path given as (t, θ, φ, R) samples with cubic interpolation.

    Derivatives θ̇, φ̇ come from the interpolant. Samples must have strictly
    increasing t, R > 0, and θ strictly inside (0, π).
    """

    kind = "sampled"

    def __init__(self, t, theta, phi, R):
        t = np.asarray(t, dtype=float)
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        R = np.asarray(R, dtype=float)
        if t.ndim != 1 or len(t) < 4:
            raise ValueError("need at least 4 samples for cubic interpolation")
        if not (t.shape == theta.shape == phi.shape == R.shape):
            raise ValueError("t, theta, phi, R must have equal length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if np.any(R <= 0):
            raise ValueError("R must stay positive along the path")
        if np.any(theta <= 0) or np.any(theta >= math.pi):
            raise GaugeSingularityError("sampled paths require theta strictly in (0, pi)")
        self.t = t
        self.duration = float(t[-1] - t[0])
        self._theta = CubicSpline(t, theta)
        self._phi = CubicSpline(t, phi)
        self._R = CubicSpline(t, R)
        self._theta_dot = self._theta.derivative()
        self._phi_dot = self._phi.derivative()

    def angles(self, t):
        return float(self._theta(t)), float(self._phi(t))

    def rates(self, t):
        return float(self._theta_dot(t)), float(self._phi_dot(t))

    def magnitude(self, t):
        return float(self._R(t))


def load_path_csv(file) -> SampledPath:
    """Read a sampled path from CSV with header ``t,theta,phi,R`` (radians)."""
    with open(file, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "theta", "phi", "R"]:
            raise ValueError(f"expected header 't,theta,phi,R', got {header}")
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise ValueError("path file contains no samples")
    data = np.array(rows)
    return SampledPath(data[:, 0], data[:, 1], data[:, 2], data[:, 3])


def instantaneous_eigensystem(theta: float, phi: float, R: float = 1.0):
    """Eigenpairs of H = R n̂(θ, φ)·σ in the fixed gauge.

    Returns (E₊, E₋, v₊, v₋) with E₊ = −E₋ = R and

        v₊ = (cos θ/2, sin θ/2 · e^{iφ})
        v₋ = (sin θ/2, −cos θ/2 · e^{iφ})
    """
    if not 0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    half = theta / 2
    phase = np.exp(1j * phi)
    v_plus = np.array([math.cos(half), math.sin(half) * phase])
    v_minus = np.array([math.sin(half), -math.cos(half) * phase])
    return R, -R, v_plus, v_minus


def coupling_at(path, t: float) -> EigenFrame:
    """Instantaneous eigenframe with Berry rates, coupling Γ₋, and detuning δ."""
    theta, phi = path.angles(t)
    if path.kind == "sampled" and not 0 < theta < math.pi:
        raise GaugeSingularityError(f"theta(t={t}) = {theta} outside (0, pi)")
    theta_dot, phi_dot = path.rates(t)
    R = path.magnitude(t)
    E_plus, E_minus, v_plus, v_minus = instantaneous_eigensystem(theta, phi, R)
    half = theta / 2
    return EigenFrame(
        t=t,
        E_plus=E_plus,
        E_minus=E_minus,
        v_plus=v_plus,
        v_minus=v_minus,
        gamma_rate_plus=-phi_dot * math.sin(half) ** 2,
        gamma_rate_minus=-phi_dot * math.cos(half) ** 2,
        Gamma_minus=theta_dot / 2 - 0.5j * phi_dot * math.sin(theta),
        delta=2 * R - phi_dot * math.cos(theta),
    )


def berry_phase(path, level: int, t: float) -> float:
    """Geometric phase γ±(t) = ∫₀ᵗ γ̇±, with ``level`` ∈ {+1, −1}.

    For the precessing family this is −(ωt/2)(1 ∓ cosθ) in closed form
    (upper sign for level +1); sampled paths are integrated numerically.
    """
    if level not in (+1, -1):
        raise ValueError(f"level must be +1 or -1, got {level}")
    if path.kind == "precessing":
        half = path.theta / 2
        sq = math.sin(half) ** 2 if level == +1 else math.cos(half) ** 2
        return -path.omega * t * sq
    rate = (lambda u: coupling_at(path, u).gamma_rate_plus) if level == +1 else (
        lambda u: coupling_at(path, u).gamma_rate_minus
    )
    val, _ = quad(rate, 0.0, t, limit=200, epsabs=1e-12, epsrel=1e-12)
    return val


def make_kernel(path) -> CouplingKernel:
    """Build the coupling kernel F, δ, Γ₋, (γ̇₊, γ̇₋), ∫δ for a path.

    Precessing paths use the closed forms F(t) = −iC e^{iδt} with
    C = (ω/2) sinθ, no integration error. Sampled paths accumulate ∫δ with
    a spline antiderivative on a fine internal grid.
    """
    if path.kind == "precessing":
        C = path.omega / 2 * math.sin(path.theta)
        delta0 = 2 * path.R - path.omega * math.cos(path.theta)
        g_plus = -path.omega * math.sin(path.theta / 2) ** 2
        g_minus = -path.omega * math.cos(path.theta / 2) ** 2
        return CouplingKernel(
            F=lambda t: -1j * C * np.exp(1j * delta0 * t),
            delta=lambda t: delta0,
            Gamma_minus=lambda t: -1j * C,
            gamma_rates=lambda t: (g_plus, g_minus),
            delta_integral=lambda t: delta0 * t,
        )

    n_fine = max(1024, 8 * len(path.t))
    t_fine = np.linspace(path.t[0], path.t[-1], n_fine)
    delta_fine = np.array([coupling_at(path, u).delta for u in t_fine])
    phase = CubicSpline(t_fine, delta_fine).antiderivative()
    origin = float(phase(path.t[0]))

    def F(t):
        frame = coupling_at(path, t)
        return frame.Gamma_minus * np.exp(1j * (float(phase(t)) - origin))

    return CouplingKernel(
        F=F,
        delta=lambda t: coupling_at(path, t).delta,
        Gamma_minus=lambda t: coupling_at(path, t).Gamma_minus,
        gamma_rates=lambda t: (
            coupling_at(path, t).gamma_rate_plus,
            coupling_at(path, t).gamma_rate_minus,
        ),
        delta_integral=lambda t: float(phase(t)) - origin,
    )
