"""
Grover kernel K = (2|Psi_0><Psi_0| - 1) O in the {|0bar>, |1bar>} plane.

O flips the sign of |0bar> only, so in that basis K is the real rotation
by theta_tilde = 2 arcsin(|G|^-1/2) taking (sin a, cos a) to
(sin(a + theta_tilde), cos(a + theta_tilde)).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import mpmath
import numpy as np
from mpmath import mp, mpf

from .errors import NotInPlane

CLOSED_FORM_THRESHOLD = 10**6
NORM_TOL = 1e-12
PLANE_TOL = 1e-9


@dataclass(frozen=True)
class TwoLevelState:
    amp0: complex
    amp1: complex

    def __post_init__(self):
        norm = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state not normalised: |amp|^2 = {norm!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1], dtype=complex)

    def overlap(self, other: "TwoLevelState") -> complex:
        return self.amp0.conjugate() * other.amp0 + self.amp1.conjugate() * other.amp1

    def close_to(self, other: "TwoLevelState", tol: float = 1e-12, up_to_phase: bool = False) -> bool:
        if up_to_phase:
            return 1 - abs(self.overlap(other)) <= tol
        return abs(self.amp0 - other.amp0) <= tol and abs(self.amp1 - other.amp1) <= tol


@dataclass(frozen=True)
class GroverParams:
    log2_G: int

    def __post_init__(self):
        if self.log2_G < 1:
            raise ValueError("log2_G must be >= 1")

    @property
    def prec(self) -> int:
        """Working bits: enough to resolve angles of order theta_tilde after ~|G|^1/2 steps."""
        return 128 + self.log2_G

    @cached_property
    def theta_tilde(self) -> mpf:
        with mp.workprec(self.prec):
            x = 1 / mpmath.sqrt(mpmath.ldexp(1, self.log2_G))
            if self.log2_G > 100:
                # 2 arcsin x = 2x (1 + x^2/6 + 3x^4/40 + ...)
                return 2 * x * (1 + x**2 / 6 + 3 * x**4 / 40)
            return 2 * mpmath.asin(x)

    @property
    def G(self) -> int:
        return 2**self.log2_G

    def ground(self) -> TwoLevelState:
        """|Psi_0> = (sin(theta_tilde/2), cos(theta_tilde/2))."""
        with mp.workprec(self.prec):
            x = 1 / mpmath.sqrt(mpmath.ldexp(1, self.log2_G))
            return TwoLevelState(complex(x), complex(mpmath.sqrt(1 - x * x)))

    def kernel_matrix(self) -> mpmath.matrix:
        """(2 psi psi^T - 1) O at the working precision (call inside a workprec block)."""
        x = 1 / mpmath.sqrt(mpmath.ldexp(1, self.log2_G))
        psi = mpmath.matrix([x, mpmath.sqrt(1 - x * x)])
        oracle = mpmath.diag([-1, 1])
        return (2 * psi * psi.T - mpmath.eye(2)) * oracle


PRODUCT_ZERO = TwoLevelState(1 + 0j, 0j)


def _rotate(state: TwoLevelState, angle) -> TwoLevelState:
    """Rotate (sin a, cos a) -> (sin(a + angle), cos(a + angle)); complex-linear."""
    c, s = float(mpmath.cos(angle)), float(mpmath.sin(angle))
    return TwoLevelState(
        c * state.amp0 + s * state.amp1,
        -s * state.amp0 + c * state.amp1,
    )


def apply_kernel(state: TwoLevelState, params: GroverParams, m: int) -> TwoLevelState:
    """Apply K^m (K^-1 repeated for negative m)."""
    if m == 0:
        return state
    if abs(m) > CLOSED_FORM_THRESHOLD:
        with mp.workprec(params.prec + abs(m).bit_length()):
            return _rotate(state, m * params.theta_tilde)
    with mp.workprec(params.prec + 2 * abs(m).bit_length()):
        K = params.kernel_matrix()
        if m < 0:
            K, m = K.T, -m  # K is orthogonal
        vec = K**m * mpmath.matrix([state.amp0, state.amp1])
        return TwoLevelState(complex(vec[0]), complex(vec[1]))


def closed_form_iterate(params: GroverParams, m: int) -> TwoLevelState:
    """K^m |Psi_0> = sin((2m+1) theta_tilde / 2) |0bar> + cos(...) |1bar>."""
    with mp.workprec(params.prec + abs(m).bit_length()):
        angle = (2 * m + 1) * params.theta_tilde / 2
        return TwoLevelState(complex(mpmath.sin(angle)), complex(mpmath.cos(angle)))


def _best_m(params: GroverParams) -> int:
    """Integer m >= 0 minimising |(2m+1) theta_tilde / 2 - pi/2|."""
    with mp.workprec(params.prec):
        return max(0, int(mpmath.nint(mp.pi / (2 * params.theta_tilde) - mpf(1) / 2)))


def _miss_probability(params: GroverParams, m: int) -> tuple[mpf, mpf]:
    """(cos^2, sin^2) of (2m+1) theta_tilde / 2: weight off and on |0bar> after K^m |Psi_0>."""
    with mp.workprec(params.prec + m.bit_length()):
        angle = (2 * m + 1) * params.theta_tilde / 2
        return mpmath.cos(angle) ** 2, mpmath.sin(angle) ** 2


@dataclass(frozen=True)
class SearchResult:
    m: int
    state: TwoLevelState
    miss: mpf  # failure probability (optimal) or infidelity (inverse)
    success_prob: mpf  # 1 - miss, kept at the working precision of the search

    @property
    def log2_miss(self) -> float:
        return float(mpmath.log(self.miss, 2)) if self.miss > 0 else float("-inf")


def optimal_iterations(params: GroverParams) -> SearchResult:
    """Number of K steps sending |Psi_0> closest to the searched state |0bar>."""
    m = _best_m(params)
    return SearchResult(m, closed_form_iterate(params, m), *_miss_probability(params, m))


def inverse_prepare(params: GroverParams) -> SearchResult:
    """
    Number of K^-1 steps taking |0bar> closest to |Psi_0>.

    K^-m |0bar> is at angle pi/2 - m theta_tilde, so the infidelity against
    |Psi_0> is cos^2((2m+1) theta_tilde / 2). Over the first half-turn
    (m theta_tilde < pi) it is minimised by the same m as the forward search.
    """
    best = _best_m(params)
    candidates = {max(0, best + d) for d in (-1, 0, 1)}
    m = min(candidates, key=lambda c: _miss_probability(params, c)[0])
    with mp.workprec(params.prec + m.bit_length()):
        angle = mp.pi / 2 - m * params.theta_tilde
        state = TwoLevelState(complex(mpmath.sin(angle)), complex(mpmath.cos(angle)))
    return SearchResult(m, state, *_miss_probability(params, m))


def fractional_power(params: GroverParams, exponent: float, state: TwoLevelState) -> TwoLevelState:
    """K^exponent on a state of the real X-Z plane (rotation by exponent * theta_tilde)."""
    pivot = state.amp0 if abs(state.amp0) >= abs(state.amp1) else state.amp1
    phase = pivot / abs(pivot)
    r0, r1 = state.amp0 / phase, state.amp1 / phase
    if abs(r0.imag) > PLANE_TOL or abs(r1.imag) > PLANE_TOL:
        raise NotInPlane("relative phase between the amplitudes is not 0 or pi")
    with mp.workprec(params.prec):
        rotated = _rotate(TwoLevelState(complex(r0.real), complex(r1.real)),
                          mpf(exponent) * params.theta_tilde)
    return TwoLevelState(rotated.amp0 * phase, rotated.amp1 * phase)
