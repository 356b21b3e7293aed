"""One-dimensional polynomial potentials with exact derivatives.

All potentials are stored as power-series coefficients, so every derivative
through fourth order is evaluated analytically (no finite differencing).
Stationary points are located by a grid scan for sign changes of V' followed
by bisection and Newton polishing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import StructureError

MAX_DEGREE = 12

_SCAN_POINTS = 512
_ROOT_TOL = 1e-12


@lru_cache(maxsize=256)
def _deriv_coeffs(coeffs: tuple[float, ...], order: int) -> tuple[float, ...]:
    c = np.asarray(coeffs, dtype=float)
    if order:
        c = npoly.polyder(c, m=order)
    if c.size == 0:
        c = np.zeros(1)
    return tuple(float(v) for v in c)


def _horner(coeffs: tuple[float, ...], x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class Potential:
    """A 1-D potential of kind ``cubic``, ``double_well``, or ``polynomial``.

    Forms:
        cubic        V(x) = A x^2 - B x^3          (A, B > 0)
        double_well  V(x) = A x^2 (x - B)^2        (A, B > 0)
        polynomial   V(x) = sum_k c_k x^k          (degree <= 12)

    ``params`` holds the defining parameters ((A, B) for the named kinds,
    the coefficient list for polynomials); ``coeffs`` always holds the
    ascending power-series coefficients used for evaluation.
    """

    kind: str
    params: tuple[float, ...]
    coeffs: tuple[float, ...]

    # -- constructors ------------------------------------------------------

    @classmethod
    def cubic(cls, A: float, B: float) -> "Potential":
        if not (A > 0 and B > 0):
            raise ValueError(f"cubic potential requires A > 0 and B > 0, got A={A}, B={B}")
        return cls("cubic", (float(A), float(B)), (0.0, 0.0, float(A), -float(B)))

    @classmethod
    def double_well(cls, A: float, B: float) -> "Potential":
        if not (A > 0 and B > 0):
            raise ValueError(f"double-well potential requires A > 0 and B > 0, got A={A}, B={B}")
        A = float(A)
        B = float(B)
        # A x^2 (x - B)^2 = A (B^2 x^2 - 2 B x^3 + x^4)
        return cls("double_well", (A, B), (0.0, 0.0, A * B * B, -2.0 * A * B, A))

    @classmethod
    def polynomial(cls, coefficients) -> "Potential":
        coeffs = tuple(float(c) for c in coefficients)
        if len(coeffs) == 0:
            raise ValueError("polynomial potential needs at least one coefficient")
        if len(coeffs) - 1 > MAX_DEGREE:
            raise ValueError(
                f"polynomial degree {len(coeffs) - 1} exceeds the supported maximum {MAX_DEGREE}"
            )
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("polynomial coefficients must be finite")
        return cls("polynomial", coeffs, coeffs)

    @classmethod
    def harmonic(cls, stiffness: float) -> "Potential":
        """Convenience: V(x) = stiffness * x^2 / 2."""
        if stiffness <= 0:
            raise ValueError(f"harmonic stiffness must be > 0, got {stiffness}")
        return cls.polynomial((0.0, 0.0, 0.5 * float(stiffness)))

    # -- evaluation --------------------------------------------------------

    def eval(self, x, order: int = 0):
        """Evaluate the order-th derivative of V at x (scalar or array).

        Parameters
        ----------
        x : float or array_like
        order : int
            Derivative order, 0 through 4. Exact for the stored
            polynomial; orders above the degree return 0.
        """
        if order not in (0, 1, 2, 3, 4):
            raise ValueError(f"derivative order must be in 0..4, got {order!r}")
        dc = _deriv_coeffs(self.coeffs, order)
        if np.isscalar(x) or isinstance(x, float):
            return _horner(dc, float(x))
        return npoly.polyval(np.asarray(x, dtype=float), np.asarray(dc))

    def __call__(self, x):
        return self.eval(x, 0)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def derivative_coefficients(self, order: int = 1) -> tuple[float, ...]:
        """Ascending coefficients of the order-th derivative polynomial."""
        return _deriv_coeffs(self.coeffs, order)


@dataclass(frozen=True)
class StationaryAnalysis:
    """Well/barrier geometry of a metastable potential.

    Attributes
    ----------
    x0, xb : float
        Well minimum and barrier maximum (V'(x0) = V'(xb) = 0).
    xm : float or None
        Second minimum beyond the barrier, when one lies in the bracket.
    barrier : float
        V(xb) - V(x0) > 0.
    omega0, omegab : float
        Curvature frequencies sqrt(V''(x0)/M) and sqrt(|V''(xb)|/M).
    mass : float
        Mass used to convert curvatures to frequencies.
    """

    x0: float
    xb: float
    barrier: float
    omega0: float
    omegab: float
    mass: float
    xm: float | None = None


def _refine_root(potential: Potential, lo: float, hi: float) -> float:
    """Bisection on V' followed by Newton polishing to |V'| <= 1e-12."""
    flo = potential.eval(lo, 1)
    if flo == 0.0:
        x = lo
    else:
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            fmid = potential.eval(mid, 1)
            if fmid == 0.0:
                lo = hi = mid
                break
            if (fmid > 0) == (flo > 0):
                lo, flo = mid, fmid
            else:
                hi = mid
            if hi - lo < 1e-15 * max(1.0, abs(lo)):
                break
        x = 0.5 * (lo + hi)
    for _ in range(8):
        f = potential.eval(x, 1)
        if abs(f) <= _ROOT_TOL:
            break
        fp = potential.eval(x, 2)
        if fp == 0.0:
            break
        step = f / fp
        if not (lo - 1e-12 <= x - step <= hi + 1e-12):
            break  # Newton left the bisection bracket; keep the bisected value
        x -= step
    return x


def find_stationary_points(
    potential: Potential, mass: float = 1.0, bracket: tuple[float, float] = (-1.0, 1.0)
) -> StationaryAnalysis:
    """Locate the well minimum and barrier maximum of V inside ``bracket``.

    The bracket is scanned on a uniform 512-point grid for sign changes of
    V'; each crossing is refined by bisection plus Newton iterations. The
    first minimum and the first maximum after it define the metastable
    structure; a further minimum, when present, is reported as ``xm``.

    Raises
    ------
    StructureError
        If V' has no zero in the bracket, or the zeros do not form a
        minimum followed by a maximum.
    """
    if mass <= 0:
        raise ValueError(f"mass must be > 0, got {mass}")
    a, b = float(bracket[0]), float(bracket[1])
    if not a < b:
        raise ValueError(f"bracket must satisfy left < right, got {bracket}")

    grid = np.linspace(a, b, _SCAN_POINTS)
    vp = np.asarray(potential.eval(grid, 1), dtype=float)

    roots: list[float] = []
    i = 0
    while i < _SCAN_POINTS - 1:
        if vp[i] == 0.0:
            roots.append(float(grid[i]))
            i += 1
            continue
        if vp[i] * vp[i + 1] < 0.0:
            roots.append(_refine_root(potential, float(grid[i]), float(grid[i + 1])))
        i += 1
    if vp[-1] == 0.0:
        roots.append(float(grid[-1]))

    # drop duplicates from adjacent detections
    span = b - a
    deduped: list[float] = []
    for r in roots:
        if not deduped or abs(r - deduped[-1]) > 1e-9 * span:
            deduped.append(r)

    if not deduped:
        raise StructureError(
            f"V' has no sign change in bracket [{a}, {b}]; no stationary point found"
        )

    x0 = xb = xm = None
    for r in deduped:
        curv = potential.eval(r, 2)
        if x0 is None:
            if curv > 0:
                x0 = r
            elif curv < 0:
                raise StructureError(
                    f"first stationary point x={r:.6g} in bracket is a maximum, not a minimum"
                )
        elif xb is None:
            if curv < 0:
                xb = r
        elif xm is None and curv > 0:
            xm = r

    if x0 is None:
        raise StructureError(f"no minimum of V found in bracket [{a}, {b}]")
    if xb is None:
        raise StructureError(f"no maximum of V follows the minimum x0={x0:.6g} in [{a}, {b}]")

    curv0 = potential.eval(x0, 2)
    curvb = potential.eval(xb, 2)
    if curv0 <= 0:
        raise StructureError(f"candidate minimum x0={x0:.6g} has V''(x0) = {curv0:.3g} <= 0")
    barrier = potential(xb) - potential(x0)
    if barrier <= 0:
        raise StructureError(f"barrier height {barrier:.3g} is not positive")

    return StationaryAnalysis(
        x0=x0,
        xb=xb,
        barrier=barrier,
        omega0=math.sqrt(curv0 / mass),
        omegab=math.sqrt(abs(curvb) / mass),
        mass=float(mass),
        xm=xm,
    )
