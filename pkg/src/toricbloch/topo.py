"""
Large-size approximations, the perturbation law near the toric point, the
area-law fit for the topological constant, and the entropy maximum in theta.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np
from mpmath import mp, mpf

from .bloch import BlochAngles, toric_angles
from .errors import ConditionViolated, InsufficientPoints
from .purity import PrecisionPolicy, PurityValue, purity_block

GOLDEN_TOL = 1e-10
PRESCAN_POINTS = 128
PHI_POINTS = 64


@dataclass(frozen=True)
class FitResult:
    alpha: float
    s_gamma: float
    residual: float
    fit_mode: str
    coef_inv_L: float | None = None


@dataclass(frozen=True)
class Perturbation:
    """Distance from the toric point, epsilon = cos^4(theta / 2)."""

    epsilon: float

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")


def approx_large_k(L: int, angles: BlochAngles, bits: int = 256) -> PurityValue:
    with mp.workprec(bits):
        s, c = angles.half_angle_trig()
        p = (s**4 * mpmath.ldexp(1, -4 * L + 1)
             + 2 * s**2 * c**2 * mpmath.ldexp(1, -L * L - 4 * L + 1)
             + c**4)
        return PurityValue.from_purity(p)


def approx_large_L(L: int, angles: BlochAngles, bits: int = 256) -> PurityValue:
    with mp.workprec(bits):
        s, c = angles.half_angle_trig()
        return PurityValue.from_purity(s**4 * mpmath.ldexp(1, -4 * L + 1) + c**4)


def epsilon_to_theta(p: Perturbation, bits: int = 256) -> BlochAngles:
    with mp.workprec(bits + 32):
        eps = mpf(p.epsilon)
        theta = 2 * mpmath.acos(mpmath.root(eps, 4))
    return BlochAngles(theta, mpf(0))


def perturbed_entropy(L: int, p: Perturbation) -> float:
    """Leading correction 4L - 1 + 2 sqrt(eps) / ln 2 to S2 near the toric point."""
    if p.epsilon >= 2.0 ** (-4 * L):
        warnings.warn(
            f"epsilon={p.epsilon:g} is not small against 2^(-4L)={2.0 ** (-4 * L):g}",
            ConditionViolated, stacklevel=2,
        )
    return 4 * L - 1 + 2 * math.sqrt(p.epsilon) / math.log(2)


def _renyi2(k: int, L: int, angles: BlochAngles, policy: PrecisionPolicy) -> mpf:
    return purity_block(k, L, angles, policy).renyi2


def fit_area_law(L_values: Sequence[int], entropies: Sequence[float],
                 fit_mode: str = "two-term") -> FitResult:
    """Least squares of S2(L) = alpha L + S_gamma (+ c / L in three-term mode)."""
    L_arr = np.asarray(L_values, dtype=float)
    S = np.asarray(entropies, dtype=float)
    if fit_mode == "two-term":
        need, cols = 2, [L_arr, np.ones_like(L_arr)]
    elif fit_mode == "three-term":
        need, cols = 3, [L_arr, np.ones_like(L_arr), 1 / L_arr]
    else:
        raise ValueError(f"unknown fit mode {fit_mode!r}")
    if len(set(L_values)) < need:
        raise InsufficientPoints(f"{fit_mode} fit needs {need} distinct L values")
    X = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(X, S, rcond=None)
    residual = float(np.max(np.abs(X @ coef - S)))
    return FitResult(
        alpha=float(coef[0]), s_gamma=float(coef[1]), residual=residual, fit_mode=fit_mode,
        coef_inv_L=float(coef[2]) if fit_mode == "three-term" else None,
    )


def extract_sgamma(k: int, L_values: Sequence[int], theta=None, phi=0,
                   fit_mode: str = "two-term",
                   policy: PrecisionPolicy = PrecisionPolicy()) -> FitResult:
    """
    Fit the area law to exact block entropies at fixed (theta, phi).

    ``theta=None`` selects the toric point of the k x k torus.
    """
    L_values = list(L_values)
    if theta is None:
        angles = BlochAngles(toric_angles(k * k - 1, policy.bits).theta, phi)
    else:
        angles = BlochAngles.of(theta, phi)
    need = 2 if fit_mode == "two-term" else 3
    if len(set(L_values)) < need:
        raise InsufficientPoints(f"{fit_mode} fit needs {need} distinct L values")
    entropies = [_renyi2(k, L, angles, policy) for L in L_values]
    return fit_area_law(L_values, [float(s) for s in entropies], fit_mode)


def _golden_max(f, a: mpf, b: mpf, tol: float) -> mpf:
    invphi = (mpmath.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2


def find_entropy_max(k: int, L: int, phi=0,
                     policy: PrecisionPolicy = PrecisionPolicy()) -> tuple[float, float]:
    """
    theta maximising S2 at fixed phi.

    A uniform pre-scan brackets the global grid maximum, then golden-section
    search refines it to ``GOLDEN_TOL`` in theta.
    """
    with mp.workprec(policy.bits):
        pi = +mp.pi

        def s2(theta):
            return _renyi2(k, L, BlochAngles(theta, mpf(phi)), policy)

        grid = [pi * (i + 1) / (PRESCAN_POINTS + 1) for i in range(PRESCAN_POINTS)]
        values = [s2(t) for t in grid]
        best = max(range(PRESCAN_POINTS), key=values.__getitem__)
        lo = grid[best - 1] if best > 0 else mpf(0)
        hi = grid[best + 1] if best < PRESCAN_POINTS - 1 else pi
        theta_max = _golden_max(s2, lo, hi, GOLDEN_TOL)
        return float(theta_max), float(s2(theta_max))


def phi_variation(k: int, L: int, theta, policy: PrecisionPolicy = PrecisionPolicy()) -> mpf:
    """max_phi S2 - min_phi S2 over a uniform 64-point phi grid at fixed theta."""
    with mp.workprec(policy.bits):
        values = [
            _renyi2(k, L, BlochAngles.of(theta, 2 * mp.pi * j / PHI_POINTS), policy)
            for j in range(PHI_POINTS)
        ]
        return max(values) - min(values)
