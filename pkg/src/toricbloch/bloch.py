"""
Points on the Bloch sphere spanned by |0bar> = |0...0> and the toric-code
ground state, and the (a, b) coefficients of ``a |0bar> + b |Psi_0>``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import mpmath
from mpmath import mp, mpf

from .errors import ScaleTooLarge

_REDUCE_PREC = 512
MAX_ORACLE_LOG2_G = 60


def _as_mpf(x) -> mpf:
    if isinstance(x, mpf):
        return x
    if isinstance(x, (int, float)):
        return mpf(x)  # exact for binary floats
    if hasattr(x, "_mpf_"):  # mpmath constants such as mp.pi
        with mp.workprec(_REDUCE_PREC):
            return mpf(x)
    raise TypeError(f"angle must be real, got {type(x).__name__}")


@dataclass(frozen=True)
class BlochAngles:
    """
    Polar angle ``theta`` in [0, pi] and azimuth ``phi`` in [0, 2 pi).

    Values outside the ranges are folded back onto the same physical state:
    theta is reduced mod 2 pi, and theta in (pi, 2 pi) maps to
    (2 pi - theta, phi + pi), which differs only by a global sign.
    """

    theta: mpf
    phi: mpf = mpf(0)

    def __post_init__(self):
        theta, phi = _as_mpf(self.theta), _as_mpf(self.phi)
        with mp.workprec(_REDUCE_PREC):
            two_pi = 2 * mp.pi
            if theta < 0 or theta > mp.pi:
                theta = theta % two_pi
                if theta > mp.pi:
                    theta = two_pi - theta
                    phi = phi + mp.pi
            if phi < 0 or phi >= two_pi:
                phi = phi % two_pi
                if phi >= two_pi:  # rounding at the upper edge
                    phi = mpf(0)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def of(cls, theta, phi=0) -> "BlochAngles":
        return cls(_as_mpf(theta), _as_mpf(phi))

    def half_angle_trig(self) -> tuple[mpf, mpf]:
        """(sin(theta/2), cos(theta/2)) at the current mpmath precision."""
        if self.theta == 0:
            return mpf(0), mpf(1)
        h = self.theta / 2
        return mpmath.sin(h), mpmath.cos(h)


class StateTag(Enum):
    PRODUCT_ZERO = "product_zero"
    ORTHOGONAL_ONE = "orthogonal_one"
    TORIC_GROUND = "toric_ground"
    TORIC_ANTIPODE = "toric_antipode"


@dataclass(frozen=True)
class NamedState:
    tag: StateTag
    angles: BlochAngles


@dataclass(frozen=True)
class SuperpositionCoefficients:
    a: complex
    b: complex


def toric_angles(log2_G: int, bits: int = 256) -> BlochAngles:
    """Angles (theta_0, 0) of the toric ground state, theta_0 = 2 arccos(|G|^-1/2)."""
    if log2_G < 1:
        raise ValueError("log2_G must be >= 1")
    # keep the ~2^(-log2_G/2) gap below pi resolvable in theta itself
    with mp.workprec(bits + 64 + log2_G // 2):
        x = 1 / mpmath.sqrt(mpmath.ldexp(1, log2_G))
        if log2_G > 1000:
            theta = mp.pi - 2 * x
        else:
            theta = 2 * mpmath.acos(x)
    return BlochAngles(theta, mpf(0))


def named_state(tag: StateTag | str, log2_G: int, bits: int = 256) -> NamedState:
    tag = StateTag(tag)
    if tag is StateTag.PRODUCT_ZERO:
        angles = BlochAngles(mpf(0), mpf(0))
    elif tag is StateTag.ORTHOGONAL_ONE:
        with mp.workprec(bits + 64):
            angles = BlochAngles(+mp.pi, mpf(0))
    else:
        toric = toric_angles(log2_G, bits)
        if tag is StateTag.TORIC_GROUND:
            angles = toric
        else:
            with mp.workprec(bits + 64):
                angles = BlochAngles(mp.pi - toric.theta, +mp.pi)
    return NamedState(tag, angles)


def two_level_amplitudes(angles: BlochAngles) -> tuple[complex, complex]:
    """Amplitudes on (|0bar>, |1bar>) as double-precision complex numbers."""
    theta, phi = float(angles.theta), float(angles.phi)
    if angles.theta == 0:
        return 1 + 0j, 0j
    return complex(math.cos(theta / 2)), cmath.exp(1j * phi) * math.sin(theta / 2)


def coefficients(angles: BlochAngles, log2_G: int) -> SuperpositionCoefficients:
    """
    Expansion ``|theta, phi> = a |0bar> + b |Psi_0>``.

    Only meaningful at oracle scale; the closed-form evaluators never form
    a and b explicitly.
    """
    if log2_G > MAX_ORACLE_LOG2_G:
        raise ScaleTooLarge(f"log2_G={log2_G} exceeds {MAX_ORACLE_LOG2_G}")
    if log2_G < 1:
        raise ValueError("log2_G must be >= 1")
    G = 2**log2_G
    with mp.workprec(128):
        s, c = angles.half_angle_trig()
        e = mpmath.expj(angles.phi)
        a = c - e * s / mpmath.sqrt(G - 1)
        b = e * s * mpmath.sqrt(mpf(G) / (G - 1))
    return SuperpositionCoefficients(complex(a), complex(b))
