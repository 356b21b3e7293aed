"""Stochastic escape-time oracles for the overdamped dynamics.

Trajectories follow the Euler-Maruyama discretization of
x' = -V'(x)/(M gamma) + xi(t), with Gaussian increments of variance 2 D dt.
Every trajectory draws from its own RNG stream seeded from
(master_seed, trajectory index), so ensemble results are bit-identical for
any worker/thread count. The deterministic counterpart is the standard
double-integral mean-first-passage-time quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit, prange
from scipy.integrate import cumulative_simpson, simpson

from .errors import EstimationError, NumericsError, QuadratureError
from .potentials import Potential, StationaryAnalysis
from .semiclassical import PhysParams

_HIST_BINS = 50


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian white noise: increments over dt have mean 0 and variance 2 D dt."""

    diffusion: float
    master_seed: int = 0

    def __post_init__(self):
        if self.diffusion < 0:
            raise ValueError(f"diffusion must be >= 0, got {self.diffusion}")

    def increments(self, dt: float, n: int, stream: int = 0) -> np.ndarray:
        """Draw n noise increments for step size dt from the given stream."""
        rng = np.random.default_rng(np.random.SeedSequence((self.master_seed, stream)))
        return math.sqrt(2.0 * self.diffusion * dt) * rng.standard_normal(n)

    def trajectory_seeds(self, n_traj: int) -> np.ndarray:
        """Per-trajectory RNG seeds derived from (master_seed, trajectory index)."""
        return np.array(
            [
                np.random.SeedSequence((self.master_seed, i)).generate_state(1)[0]
                for i in range(n_traj)
            ],
            dtype=np.int64,
        )


@dataclass(frozen=True)
class EscapeConfig:
    """Geometry and budget of an escape-time ensemble.

    Trajectories start at x_init, reflect at x_refl, and are absorbed at
    x_abs; each runs at most max_time (censored afterwards).
    """

    x_init: float
    x_abs: float
    x_refl: float
    dt: float
    max_time: float
    n_traj: int

    def __post_init__(self):
        if not (self.x_refl <= self.x_init < self.x_abs):
            raise ValueError(
                f"need x_refl <= x_init < x_abs, got {self.x_refl}, {self.x_init}, {self.x_abs}"
            )
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.max_time < 0:
            raise ValueError(f"max_time must be >= 0, got {self.max_time}")
        if self.n_traj < 1:
            raise ValueError(f"n_traj must be >= 1, got {self.n_traj}")


@dataclass(frozen=True)
class EnsembleResult:
    """Escape-time statistics of an ensemble of trajectories."""

    mfpt_mean: float
    mfpt_stderr: float
    n_escaped: int
    n_censored: int
    escape_times: np.ndarray
    hist_counts: np.ndarray
    hist_edges: np.ndarray


# -- single-step propagators ---------------------------------------------------


def overdamped_step(x, potential: Potential, params: PhysParams, dt: float, z):
    """One Euler-Maruyama step: x - V'(x) dt / (M gamma) + sqrt(2 D dt) z."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    drift = -potential.eval(x, 1) / (params.mass * params.gamma)
    return x + drift * dt + math.sqrt(2.0 * params.diffusion * dt) * np.asarray(z)


def inertial_step(x, v, potential: Potential, params: PhysParams, dt: float, z):
    """One Euler-Maruyama step of the inertial dynamics; returns (x', v').

    v' = v + dt (-gamma v - V'(x)/M) + gamma sqrt(2 D dt) z, and the
    position update uses the pre-step velocity.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    accel = -params.gamma * np.asarray(v) - potential.eval(x, 1) / params.mass
    kick = params.gamma * math.sqrt(2.0 * params.diffusion * dt) * np.asarray(z)
    return x + dt * np.asarray(v), v + dt * accel + kick


# -- numba kernels --------------------------------------------------------------


@njit(cache=True)
def _poly_eval(coeffs, x):
    acc = 0.0
    for i in range(len(coeffs) - 1, -1, -1):
        acc = acc * x + coeffs[i]
    return acc


@njit(cache=True)
def _escape_one(seed, x_init, x_abs, x_refl, drift_dt, noise_scale, dt, max_steps, dcoeffs):
    # status: 1 escaped, 0 censored, 2 non-finite state
    np.random.seed(seed)
    x = x_init
    for step in range(max_steps):
        x_new = x - _poly_eval(dcoeffs, x) * drift_dt + noise_scale * np.random.normal()
        if not np.isfinite(x_new):
            return 2, dt * step
        if x_new >= x_abs:
            frac = (x_abs - x) / (x_new - x)  # linear interpolation of the crossing
            return 1, dt * (step + frac)
        if x_new < x_refl:
            x_new = 2.0 * x_refl - x_new
        x = x_new
    return 0, dt * max_steps


@njit(cache=True, parallel=True)
def _escape_ensemble(seeds, x_init, x_abs, x_refl, drift_dt, noise_scale, dt, max_steps, dcoeffs):
    n = seeds.shape[0]
    status = np.empty(n, dtype=np.int64)
    times = np.empty(n)
    for i in prange(n):
        s, t = _escape_one(
            seeds[i], x_init, x_abs, x_refl, drift_dt, noise_scale, dt, max_steps, dcoeffs
        )
        status[i] = s
        times[i] = t
    return status, times


@njit(cache=True)
def _equilibrium_walk(seed, x_init, drift_dt, noise_scale, burn_steps, n_samples, thin_steps, dcoeffs):
    np.random.seed(seed)
    x = x_init
    for _ in range(burn_steps):
        x = x - _poly_eval(dcoeffs, x) * drift_dt + noise_scale * np.random.normal()
    out = np.empty(n_samples)
    for k in range(n_samples):
        for _ in range(thin_steps):
            x = x - _poly_eval(dcoeffs, x) * drift_dt + noise_scale * np.random.normal()
        out[k] = x
    return out


@njit(cache=True)
def _inertial_walk(seed, x_init, v_init, dt, steps, sample_every, inv_mass, gamma, kick_scale, dcoeffs):
    np.random.seed(seed)
    x = x_init
    v = v_init
    n_out = steps // sample_every
    xs = np.empty(n_out)
    vs = np.empty(n_out)
    j = 0
    for step in range(steps):
        v_new = v + dt * (-gamma * v - _poly_eval(dcoeffs, x) * inv_mass) + kick_scale * np.random.normal()
        x = x + dt * v
        v = v_new
        if (step + 1) % sample_every == 0 and j < n_out:
            xs[j] = x
            vs[j] = v
            j += 1
    return xs, vs


# -- ensemble estimators ---------------------------------------------------------


def mfpt_ensemble(
    potential: Potential,
    params: PhysParams,
    config: EscapeConfig,
    noise: NoiseModel | None = None,
) -> EnsembleResult:
    """Estimate the mean first passage time from an ensemble of trajectories.

    Reflection at x_refl folds the overshoot back (x -> 2 x_refl - x);
    absorption at x_abs records the passage time with the crossing linearly
    interpolated inside the step. Censored trajectories (still alive at
    max_time) are counted, never dropped.

    Raises
    ------
    EstimationError
        If every trajectory is censored.
    NumericsError
        If any trajectory reaches a non-finite position.
    """
    if noise is None:
        noise = NoiseModel(diffusion=params.diffusion, master_seed=0)
    dcoeffs = np.asarray(potential.derivative_coefficients(1), dtype=float)
    drift_dt = config.dt / (params.mass * params.gamma)
    noise_scale = math.sqrt(2.0 * noise.diffusion * config.dt)
    max_steps = int(math.ceil(config.max_time / config.dt)) if config.max_time > 0 else 0
    seeds = noise.trajectory_seeds(config.n_traj)

    status, times = _escape_ensemble(
        seeds, config.x_init, config.x_abs, config.x_refl,
        drift_dt, noise_scale, config.dt, max_steps, dcoeffs,
    )

    bad = np.nonzero(status == 2)[0]
    if bad.size:
        i = int(bad[0])
        raise NumericsError(
            f"trajectory {i} became non-finite at step {int(round(times[i] / config.dt))}",
            step=int(round(times[i] / config.dt)),
        )

    escaped = status == 1
    n_escaped = int(np.count_nonzero(escaped))
    n_censored = config.n_traj - n_escaped
    if n_escaped == 0:
        raise EstimationError(
            f"all {config.n_traj} trajectories censored at max_time={config.max_time} "
            f"(dt={config.dt}, x_abs={config.x_abs}); no escape time observed"
        )

    esc = np.sort(times[escaped])  # fixed order for reduction, independent of scheduling
    mean = float(np.mean(esc))
    stderr = float(np.std(esc, ddof=1) / math.sqrt(n_escaped)) if n_escaped > 1 else float("nan")
    counts, edges = np.histogram(esc, bins=_HIST_BINS)
    return EnsembleResult(
        mfpt_mean=mean,
        mfpt_stderr=stderr,
        n_escaped=n_escaped,
        n_censored=n_censored,
        escape_times=esc,
        hist_counts=counts,
        hist_edges=edges,
    )


def equilibrium_sample(
    potential: Potential,
    params: PhysParams,
    burn_in: float,
    n_samples: int,
    thin: float,
    seed: int,
    x_init: float = 0.0,
    dt: float | None = None,
) -> np.ndarray:
    """Positions sampled from a long overdamped trajectory after burn-in.

    Samples are taken every ``thin`` time units; with thinning of a few
    relaxation times they are approximately independent draws from the
    stationary density proportional to exp(-beta V).
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if dt is None:
        dt = default_timestep(potential, params, x_init)
    thin_steps = max(1, int(round(thin / dt)))
    burn_steps = int(math.ceil(burn_in / dt))
    dcoeffs = np.asarray(potential.derivative_coefficients(1), dtype=float)
    drift_dt = dt / (params.mass * params.gamma)
    noise_scale = math.sqrt(2.0 * params.diffusion * dt)
    seed32 = int(np.random.SeedSequence(seed).generate_state(1)[0])
    return _equilibrium_walk(
        seed32, x_init, drift_dt, noise_scale, burn_steps, int(n_samples), thin_steps, dcoeffs
    )


def default_timestep(
    potential: Potential, params: PhysParams, x_center: float, halfwidth: float | None = None
) -> float:
    """Default dt = 0.01 * (M gamma / max |V''|): resolves the fastest drift relaxation."""
    if halfwidth is None:
        curv = potential.eval(x_center, 2)
        if curv <= 0:
            raise ValueError(
                "cannot infer a timestep at a non-confining point; pass dt explicitly"
            )
        halfwidth = 6.0 / math.sqrt(params.beta * curv)
    grid = np.linspace(x_center - halfwidth, x_center + halfwidth, 512)
    max_curv = float(np.max(np.abs(potential.eval(grid, 2))))
    if max_curv == 0.0:
        raise ValueError("flat potential: pass dt explicitly")
    return 0.01 * params.mass * params.gamma / max_curv


def default_escape_config(
    potential: Potential,
    params: PhysParams,
    analysis: StationaryAnalysis,
    n_traj: int = 2000,
    dt: float | None = None,
    max_time: float | None = None,
    x_init: float | None = None,
    x_abs: float | None = None,
    x_refl: float | None = None,
) -> EscapeConfig:
    """Escape geometry conventions for a metastable well.

    Absorption is placed at the second minimum when one exists, otherwise
    three barrier-top thermal lengths past the barrier; reflection sits five
    well thermal lengths left of the minimum, where edge effects are
    exponentially small.
    """
    thermal0 = 1.0 / (analysis.omega0 * math.sqrt(params.beta * params.mass))
    thermalb = 1.0 / (analysis.omegab * math.sqrt(params.beta * params.mass))
    if x_abs is None:
        x_abs = analysis.xm if analysis.xm is not None else analysis.xb + 3.0 * thermalb
    if x_refl is None:
        x_refl = analysis.x0 - 5.0 * thermal0
    if x_init is None:
        x_init = analysis.x0
    if dt is None:
        grid = np.linspace(x_refl, x_abs, 512)
        max_curv = float(np.max(np.abs(potential.eval(grid, 2))))
        dt = 0.01 * params.mass * params.gamma / max_curv
    if max_time is None:
        rate_estimate = (
            analysis.omega0 * analysis.omegab / (2.0 * math.pi * params.gamma)
            * math.exp(-params.beta * analysis.barrier)
        )
        max_time = 50.0 / rate_estimate
    return EscapeConfig(
        x_init=float(x_init),
        x_abs=float(x_abs),
        x_refl=float(x_refl),
        dt=float(dt),
        max_time=float(max_time),
        n_traj=int(n_traj),
    )


# -- deterministic oracle ---------------------------------------------------------


def mfpt_quadrature(
    potential: Potential,
    params: PhysParams,
    x_refl: float,
    x_abs: float,
    x_init: float,
    n_panels: int = 256,
) -> float:
    """Mean first passage time by the standard double-integral formula.

    tau(x_init) = (1/D) * int_{x_init}^{x_abs} dy e^{beta V(y)}
                          int_{x_refl}^{y} dz e^{-beta V(z)}

    evaluated with composite Simpson rules, the panel count doubling until
    two successive values agree to 1e-8 relative; the returned value is the
    Richardson extrapolation of the last pair. Both exponentials are shifted
    by min V over the domain, which cancels analytically in the product.
    """
    if n_panels < 64:
        raise ValueError(f"n_panels must be >= 64, got {n_panels}")
    if not (x_refl <= x_init <= x_abs):
        raise ValueError(
            f"need x_refl <= x_init <= x_abs, got {x_refl}, {x_init}, {x_abs}"
        )
    if x_init == x_abs:
        return 0.0

    beta = params.beta
    diffusion = params.diffusion
    probe = np.linspace(x_refl, x_abs, 4097)
    v_ref = float(np.min(potential(probe)))
    v_max_outer = float(np.max(potential(np.linspace(x_init, x_abs, 4097))))
    if beta * (v_max_outer - v_ref) > 700.0:
        raise QuadratureError(
            f"exp(beta V) overflows double precision (beta dV = {beta * (v_max_outer - v_ref):.3g})"
        )

    def tau_of(n: int) -> float:
        # inner cumulative integral of e^{-beta (V - v_ref)} up to x_init ...
        if x_init > x_refl:
            z1 = np.linspace(x_refl, x_init, n + 1)
            base = simpson(np.exp(-beta * (potential(z1) - v_ref)), x=z1)
        else:
            base = 0.0
        # ... then continued across the outer integration range
        y = np.linspace(x_init, x_abs, n + 1)
        g = np.exp(-beta * (potential(y) - v_ref))
        inner = base + cumulative_simpson(g, x=y, initial=0.0)
        outer = np.exp(beta * (potential(y) - v_ref)) * inner
        return float(simpson(outer, x=y)) / diffusion

    n = int(n_panels) + (int(n_panels) % 2)
    prev = tau_of(n)
    for _ in range(14):
        n *= 2
        cur = tau_of(n)
        if abs(cur - prev) <= 1e-8 * abs(cur):
            return cur + (cur - prev) / 15.0
        prev = cur
    raise QuadratureError(
        f"MFPT quadrature did not converge to 1e-8 relative by n_panels={n}"
    )
