"""Closed-form escape rates for strongly damped metastable wells.

All rates are returned as (prefactor, exponent) pairs with
rate = prefactor * exp(-exponent); the exponent stores beta * barrier minus
any quantum enhancement, so one identity covers every method.

Methods
-------
classical_rate            (omega0 omegab / 2 pi gamma) exp(-beta dV)
semiclassical_rate_approx classical rate times exp(hbar beta (w0^2+wb^2)/(4 w0))
semiclassical_rate_exact  classical formula applied to the corrected potential
quantum_smoluchowski_rate digamma-factor enhancement from the modified diffusion
doubled_exponent_rate     enhancement exponent doubled (drift + diffusion corrected)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import SingularityError, StructureError
from .potentials import Potential, StationaryAnalysis, find_stationary_points
from .semiclassical import PhysParams, effective_potential, quasi_stationary_G

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RateResult:
    """An escape rate decomposed as rate = prefactor * exp(-exponent)."""

    rate: float
    prefactor: float
    exponent: float
    method: str

    @classmethod
    def from_parts(cls, prefactor: float, exponent: float, method: str) -> "RateResult":
        return cls(
            rate=prefactor * math.exp(-exponent),
            prefactor=prefactor,
            exponent=exponent,
            method=method,
        )


def classical_rate(analysis: StationaryAnalysis, params: PhysParams) -> RateResult:
    """Strong-damping escape rate (omega0 omegab / 2 pi gamma) exp(-beta dV)."""
    prefactor = analysis.omega0 * analysis.omegab / (_TWO_PI * params.gamma)
    return RateResult.from_parts(prefactor, params.beta * analysis.barrier, "classical")


def _enhancement_exponent(analysis: StationaryAnalysis, params: PhysParams) -> float:
    """Wavepacket enhancement exponent, cross-checked in its two equivalent forms."""
    m = analysis.mass
    curv0 = m * analysis.omega0**2
    curvb = m * analysis.omegab**2
    G = 1.0 / (2.0 * math.sqrt(m * curv0))
    from_curvatures = 0.5 * params.beta * params.hbar * G * (curv0 + curvb)
    from_frequencies = (
        params.hbar * params.beta * (analysis.omega0**2 + analysis.omegab**2)
        / (4.0 * analysis.omega0)
    )
    scale = max(abs(from_curvatures), abs(from_frequencies))
    if abs(from_curvatures - from_frequencies) > 1e-12 * max(scale, 1e-300):
        raise RuntimeError(
            "internal inconsistency: the two enhancement-exponent forms disagree "
            f"({from_curvatures!r} vs {from_frequencies!r})"
        )
    return from_curvatures


def semiclassical_rate_approx(
    analysis: StationaryAnalysis, params: PhysParams
) -> RateResult:
    """Classical rate enhanced by exp(beta hbar G [V''(x0) + |V''(xb)|] / 2).

    G is the quasi-stationary width 1/(2 sqrt(M V''(x0))), so the exponent
    equals hbar beta (omega0^2 + omegab^2) / (4 omega0); both forms are
    evaluated and must agree to 1e-12 relative.
    """
    prefactor = analysis.omega0 * analysis.omegab / (_TWO_PI * params.gamma)
    exponent = params.beta * analysis.barrier - _enhancement_exponent(analysis, params)
    return RateResult.from_parts(prefactor, exponent, "semiclassical_approx")


def semiclassical_rate_exact(
    potential: Potential, params: PhysParams, bracket: tuple[float, float]
) -> RateResult:
    """Classical rate formula evaluated on the corrected potential Vhat.

    Builds Vhat with the quasi-stationary width of the bare well, relocates
    its stationary points, and uses the shifted barrier and curvatures. For
    hbar = 0 this is exactly the classical rate.
    """
    bare = find_stationary_points(potential, params.mass, bracket)
    if params.hbar == 0.0:
        res = classical_rate(bare, params)
        return RateResult(res.rate, res.prefactor, res.exponent, "semiclassical_exact")
    G = quasi_stationary_G(potential, bare.x0, params)
    vhat = effective_potential(potential, G, params)
    try:
        corrected = find_stationary_points(vhat, params.mass, bracket)
    except StructureError as exc:
        raise StructureError(
            f"corrected potential lost its barrier structure (hbar={params.hbar}): {exc}"
        ) from exc
    prefactor = corrected.omega0 * corrected.omegab / (_TWO_PI * params.gamma)
    return RateResult.from_parts(
        prefactor, params.beta * corrected.barrier, "semiclassical_exact"
    )


def quantum_smoluchowski_rate(
    analysis: StationaryAnalysis, params: PhysParams
) -> RateResult:
    """Classical rate with the path-integral digamma enhancement factor.

    exponent gain = hbar beta (w0^2 + wb^2) / (2 pi gamma)
                    * [psi(1 + hbar beta gamma / 2 pi) - psi(1)]
    """
    x = params.hbar * params.beta * params.gamma / _TWO_PI
    gain = (
        params.hbar * params.beta * (analysis.omega0**2 + analysis.omegab**2)
        / (_TWO_PI * params.gamma)
        * (digamma(1.0 + x) - digamma(1.0))
    )
    prefactor = analysis.omega0 * analysis.omegab / (_TWO_PI * params.gamma)
    return RateResult.from_parts(
        prefactor, params.beta * analysis.barrier - gain, "quantum_smoluchowski"
    )


def doubled_exponent_rate(analysis: StationaryAnalysis, params: PhysParams) -> RateResult:
    """Enhancement exponent doubled: the variant with both drift and diffusion corrected."""
    prefactor = analysis.omega0 * analysis.omegab / (_TWO_PI * params.gamma)
    exponent = params.beta * analysis.barrier - 2.0 * _enhancement_exponent(analysis, params)
    return RateResult.from_parts(prefactor, exponent, "doubled_exponent")


def quantum_diffusion(
    x: float, potential: Potential, lam: float, params: PhysParams
) -> float:
    """Position-dependent corrected diffusion D_q = D / (1 - lam * beta * V''(x)).

    ``lam`` is the quantum position-fluctuation scale (hbar G for the
    quasi-stationary wavepacket); the caller supplies it explicitly.
    """
    denom = 1.0 - lam * params.beta * potential.eval(x, 2)
    if denom <= 0.0:
        raise SingularityError(
            f"corrected diffusion is singular: 1 - lam*beta*V''({x}) = {denom:.6g} <= 0"
        )
    return params.diffusion / denom


# -- digamma -----------------------------------------------------------------

# Asymptotic tail psi(z) ~ ln z - 1/(2z) - sum B_{2n}/(2n z^{2n}); the
# coefficients below are -B_{2n}/(2n) for n = 1..7 (through B_14), applied
# after raising the argument above 10 by psi(z) = psi(z+1) - 1/z.
_ASYMP = (
    -1.0 / 12.0,
    1.0 / 120.0,
    -1.0 / 252.0,
    1.0 / 240.0,
    -1.0 / 132.0,
    691.0 / 32760.0,
    -1.0 / 12.0,
)
_ASYMP_THRESHOLD = 10.0


def digamma(z: float) -> float:
    """Digamma function psi(z) for z > 0, accurate to ~1e-12 absolute on [1e-3, 1e3]."""
    z = float(z)
    if not z > 0.0:
        raise ValueError(f"digamma requires z > 0, got {z}")
    acc = 0.0
    while z < _ASYMP_THRESHOLD:
        acc -= 1.0 / z
        z += 1.0
    w = 1.0 / (z * z)
    tail = 0.0
    for c in reversed(_ASYMP):
        tail = tail * w + c
    return acc + math.log(z) - 0.5 / z + w * tail


# -- regime diagnostics -------------------------------------------------------

DEFAULT_THRESHOLDS = {
    "beta_barrier_min": 5.0,
    "hbar_beta_omega0_max": 0.5,
    "gamma_over_omegab_min": 5.0,
}


@dataclass(frozen=True)
class ValidityReport:
    """Dimensionless regime numbers with pass flags against the thresholds.

    The rate formulas assume a high barrier (beta dV >> 1), weak quantum
    fluctuations (hbar beta omega0 << 1), and strong damping
    (gamma >> omegab).
    """

    beta_barrier: float
    hbar_beta_omega0: float
    gamma_over_omegab: float
    flags: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(self.flags.values())


def validity_report(
    analysis: StationaryAnalysis, params: PhysParams, thresholds: dict | None = None
) -> ValidityReport:
    """Evaluate beta*dV, hbar*beta*omega0 and gamma/omegab against thresholds."""
    th = dict(DEFAULT_THRESHOLDS)
    if thresholds:
        unknown = set(thresholds) - set(th)
        if unknown:
            raise ValueError(f"unknown validity thresholds: {sorted(unknown)}")
        th.update(thresholds)
    beta_barrier = params.beta * analysis.barrier
    hbo = params.hbar * params.beta * analysis.omega0
    g_over_wb = params.gamma / analysis.omegab
    flags = {
        "beta_barrier": beta_barrier >= th["beta_barrier_min"],
        "hbar_beta_omega0": hbo <= th["hbar_beta_omega0_max"],
        "gamma_over_omegab": g_over_wb >= th["gamma_over_omegab_min"],
    }
    return ValidityReport(
        beta_barrier=beta_barrier,
        hbar_beta_omega0=hbo,
        gamma_over_omegab=g_over_wb,
        flags=flags,
        thresholds=th,
    )
