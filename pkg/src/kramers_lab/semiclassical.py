"""Gaussian variational wavepacket dynamics and the quantum-corrected potential.

The wavepacket is parameterized by mean position x, mean momentum p, a width
parameter G > 0, and its conjugate Pi. The variational energy

    H_sc = p^2/2M + V(x) + hbar * [ 1/(8 M G) + (2/M) G Pi^2 + G V''(x)/2 ]

generates Hamiltonian dynamics in the canonical pairs (x, p) and (G, hbar*Pi).
Demanding minimal uncertainty (Pi = 0) and a stationary width at the well
bottom fixes G = 1/(2 sqrt(M V''(x0))) and turns the quantum term into a
static correction of the drift potential.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import WidthCollapseError
from .potentials import Potential


@dataclass(frozen=True)
class PhysParams:
    """Bath and particle parameters. Boltzmann's constant is fixed to 1.

    mass M, damping rate gamma (1/time), inverse temperature beta
    (1/energy), and hbar (action); hbar = 0 recovers classical dynamics.
    """

    mass: float
    gamma: float
    beta: float
    hbar: float = 0.0

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError(f"mass must be > 0, got {self.mass}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if self.hbar < 0:
            raise ValueError(f"hbar must be >= 0, got {self.hbar}")

    @property
    def diffusion(self) -> float:
        """Einstein diffusion coefficient D = k_B T / (M gamma) = 1/(beta M gamma)."""
        return 1.0 / (self.beta * self.mass * self.gamma)

    @property
    def temperature(self) -> float:
        return 1.0 / self.beta


@dataclass(frozen=True)
class VariationalState:
    """Wavepacket parameters (x, p, G, Pi); the width G must stay positive."""

    x: float
    p: float
    G: float
    Pi: float

    def __post_init__(self):
        if not self.G > 0:
            raise ValueError(f"width parameter G must be > 0, got {self.G}")


@dataclass(frozen=True)
class Moments:
    """First and second moments of position and momentum in the wavepacket."""

    mean_q: float
    mean_p: float
    var_q: float
    var_p: float


class StateDerivative(NamedTuple):
    x_dot: float
    p_dot: float
    G_dot: float
    Pi_dot: float


def semiclassical_hamiltonian(
    state: VariationalState, potential: Potential, params: PhysParams
) -> float:
    """Variational energy H_sc = p^2/2M + V(x) + hbar-order width terms."""
    m, hbar = params.mass, params.hbar
    quantum = 1.0 / (8.0 * m * state.G) + (2.0 / m) * state.G * state.Pi**2 \
        + 0.5 * state.G * potential.eval(state.x, 2)
    return state.p**2 / (2.0 * m) + potential(state.x) + hbar * quantum


def expectation_values(state: VariationalState, hbar: float) -> Moments:
    """Moments of the wavepacket: var_q = hbar G, var_p = 4 hbar G Pi^2 + hbar/(4G)."""
    return Moments(
        mean_q=state.x,
        mean_p=state.p,
        var_q=hbar * state.G,
        var_p=4.0 * hbar * state.G * state.Pi**2 + hbar / (4.0 * state.G),
    )


def uncertainty_product(state: VariationalState, hbar: float) -> float:
    """dQ * dP = (hbar/2) sqrt(1 + (4 G Pi)^2); equals hbar/2 exactly at Pi = 0."""
    return 0.5 * hbar * math.sqrt(1.0 + (4.0 * state.G * state.Pi) ** 2)


def eom_rhs(
    state: VariationalState, potential: Potential, params: PhysParams
) -> StateDerivative:
    """Hamiltonian equations of motion for (x, p, G, Pi).

    x' = p/M
    p' = -V'(x) - (hbar/2) G V'''(x)
    G' = 4 G Pi / M
    Pi' = 1/(8 M G^2) - 2 Pi^2/M - V''(x)/2
    """
    m, hbar = params.mass, params.hbar
    x, p, G, Pi = state.x, state.p, state.G, state.Pi
    return StateDerivative(
        x_dot=p / m,
        p_dot=-potential.eval(x, 1) - 0.5 * hbar * G * potential.eval(x, 3),
        G_dot=4.0 * G * Pi / m,
        Pi_dot=1.0 / (8.0 * m * G * G) - 2.0 * Pi * Pi / m - 0.5 * potential.eval(x, 2),
    )


def quasi_stationary_G(potential: Potential, x0: float, params: PhysParams) -> float:
    """Stationary minimal-uncertainty width G = 1/(2 sqrt(M V''(x0))).

    Requires a true minimum (V''(x0) > 0); solving Pi' = 0 at Pi = 0
    has no positive-G solution otherwise.
    """
    curv = potential.eval(x0, 2)
    if curv <= 0:
        raise ValueError(
            f"quasi-stationary width needs V''(x0) > 0, got V''({x0}) = {curv:.6g}"
        )
    return 1.0 / (2.0 * math.sqrt(params.mass * curv))


def effective_potential(potential: Potential, G: float, params: PhysParams) -> Potential:
    """Quantum-corrected drift potential Vhat = V + hbar [1/(8MG) + G V''/2].

    G is held constant in x, so the correction is itself a polynomial of
    the same degree: Vhat keeps exact analytic derivatives, with
    Vhat^(k) = V^(k) + (hbar G / 2) V^(k+2) for k >= 1.
    """
    if not G > 0:
        raise ValueError(f"width parameter G must be > 0, got {G}")
    if params.hbar == 0.0:
        return potential
    coeffs = np.asarray(potential.coeffs, dtype=float)
    second = np.zeros_like(coeffs)
    d2 = np.asarray(potential.derivative_coefficients(2))
    second[: d2.size] = d2
    shifted = coeffs + 0.5 * params.hbar * G * second
    shifted[0] += params.hbar / (8.0 * params.mass * G)
    return Potential.polynomial(tuple(shifted))


def quasi_stationary_residual(
    potential: Potential, params: PhysParams, bracket: tuple[float, float]
) -> float:
    """Diagnostic: Pi' evaluated at the shifted minimum of the corrected potential.

    G is fixed from the bare-well curvature, but the x-equation's fixed point
    moves to the minimum xhat0 of Vhat; the width equation is then stationary
    only to O(hbar). The returned residual quantifies that mismatch.
    """
    from .potentials import find_stationary_points

    bare = find_stationary_points(potential, params.mass, bracket)
    G = quasi_stationary_G(potential, bare.x0, params)
    vhat = effective_potential(potential, G, params)
    shifted = find_stationary_points(vhat, params.mass, bracket)
    state = VariationalState(x=shifted.x0, p=0.0, G=G, Pi=0.0)
    return eom_rhs(state, potential, params).Pi_dot


@dataclass(frozen=True)
class Trajectory:
    """Sampled wavepacket trajectory with per-sample energy and uncertainty."""

    times: np.ndarray
    x: np.ndarray
    p: np.ndarray
    G: np.ndarray
    Pi: np.ndarray
    energy: np.ndarray
    uncertainty: np.ndarray

    def state(self, i: int) -> VariationalState:
        return VariationalState(self.x[i], self.p[i], self.G[i], self.Pi[i])


def _rhs_vec(y: np.ndarray, potential: Potential, params: PhysParams, step: int) -> np.ndarray:
    x, p, G, Pi = y
    if G <= 0.0:
        raise WidthCollapseError(step)
    m, hbar = params.mass, params.hbar
    return np.array(
        [
            p / m,
            -potential.eval(x, 1) - 0.5 * hbar * G * potential.eval(x, 3),
            4.0 * G * Pi / m,
            1.0 / (8.0 * m * G * G) - 2.0 * Pi * Pi / m - 0.5 * potential.eval(x, 2),
        ]
    )


def integrate_eom(
    initial: VariationalState,
    potential: Potential,
    params: PhysParams,
    dt: float,
    steps: int,
) -> Trajectory:
    """Integrate the wavepacket equations of motion with classical RK4.

    Records H_sc and the uncertainty product at every sample. Aborts with
    WidthCollapseError (reporting the step index) if any RK4 stage sees
    G <= 0: a width collapse must be visible, never clamped away.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")

    n = steps + 1
    out = np.empty((n, 4))
    energy = np.empty(n)
    uncert = np.empty(n)
    y = np.array([initial.x, initial.p, initial.G, initial.Pi])

    hbar = params.hbar
    for k in range(steps + 1):
        out[k] = y
        st = VariationalState(*y)
        energy[k] = semiclassical_hamiltonian(st, potential, params)
        uncert[k] = uncertainty_product(st, hbar)
        if k == steps:
            break
        k1 = _rhs_vec(y, potential, params, k)
        k2 = _rhs_vec(y + 0.5 * dt * k1, potential, params, k)
        k3 = _rhs_vec(y + 0.5 * dt * k2, potential, params, k)
        k4 = _rhs_vec(y + dt * k3, potential, params, k)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if y[2] <= 0.0:
            raise WidthCollapseError(k)

    return Trajectory(
        times=dt * np.arange(n),
        x=out[:, 0],
        p=out[:, 1],
        G=out[:, 2],
        Pi=out[:, 3],
        energy=energy,
        uncertainty=uncert,
    )
