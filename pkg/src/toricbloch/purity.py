"""
Closed-form purity tr(rho_A^2) and 2-Renyi entropy on the Bloch sphere.

Every ``2**n`` polynomial with integer ``n`` is formed as an exact Python
integer; only the final combination with the trigonometric factors is done
in mpmath floating point at ``PrecisionPolicy.bits`` of precision.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import mpmath
from mpmath import mp, mpf

from .bloch import BlochAngles
from .errors import NonRealResidue, PrecisionTooLow
from .lattice import RegionCombinatorics, block_sigma

DEFAULT_BITS = 256
PRECISION_ENV = "TORICBLOCH_PRECISION"
_MIN_SURVIVING_BITS = 10


@dataclass(frozen=True)
class PrecisionPolicy:
    bits: int = DEFAULT_BITS

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError(f"precision must be >= 64 bits, got {self.bits}")

    @classmethod
    def from_env(cls) -> "PrecisionPolicy":
        raw = os.environ.get(PRECISION_ENV)
        return cls(int(raw)) if raw else cls()


@dataclass(frozen=True)
class PurityValue:
    purity: mpf
    log2_purity: mpf

    @property
    def renyi2(self) -> mpf:
        """2-Renyi entropy in bits."""
        return -self.log2_purity

    @classmethod
    def from_purity(cls, purity: mpf) -> "PurityValue":
        if not purity > 0:
            raise PrecisionTooLow(f"non-positive purity {purity}")
        if purity == 1:
            return cls(purity, mpf(0))
        return cls(purity, mpmath.log(purity, 2))


def _checked_sum(terms: Sequence[mpf], bits: int) -> mpf:
    total = mpmath.fsum(terms)
    magnitude = mpmath.fsum(abs(t) for t in terms)
    if magnitude == 0:
        return total
    # bits lost to cancellation ~ log2(sum|t| / |sum t|); a few extra for rounding
    error_bound = magnitude * mpmath.ldexp(1, -bits + 4)
    if total <= error_bound * 2**_MIN_SURVIVING_BITS:
        raise PrecisionTooLow(
            f"fewer than {_MIN_SURVIVING_BITS} significant bits survive at {bits}-bit precision"
        )
    return total


@lru_cache(maxsize=256)
def _block_integers(k: int, L: int) -> tuple[int, int, int, int]:
    sig = block_sigma(k, L)
    pA, pB = 2**sig.sigma_A, 2**sig.sigma_B
    denom = 2 ** (k * k - 1) - 1
    quartic = 2 ** (2 * k * k - 4 * L - 1) - (2 * pA - 1) * (2 * pB - 1)
    cubic = (pA - 1) * (pB - 1)
    quadratic = pA + pB - 2
    return quartic, cubic, quadratic, denom


def purity_block(k: int, L: int, angles: BlochAngles,
                 policy: PrecisionPolicy = PrecisionPolicy()) -> PurityValue:
    """
    Purity of an L x L block on the k x k torus.

    Four terms: sin^4 * quartic / D^2, 4 cos(phi) sin^3 cos * cubic / D^(3/2),
    2 sin^2 cos^2 * quadratic / D and cos^4, with D = 2^(k^2-1) - 1.
    """
    quartic, cubic, quadratic, denom = _block_integers(k, L)
    bits = policy.bits
    with mp.workprec(bits):
        s, c = angles.half_angle_trig()
        D = mpf(denom)
        terms = [
            s**4 * (mpf(quartic) / (D * D)),
            4 * mpmath.cos(angles.phi) * s**3 * c * (mpf(cubic) / (D * mpmath.sqrt(D))),
            2 * s**2 * c**2 * (mpf(quadratic) / D),
            c**4,
        ]
        total = _checked_sum(terms, bits)
        return PurityValue.from_purity(total)


def purity_general(comb: RegionCombinatorics, angles: BlochAngles,
                   policy: PrecisionPolicy = PrecisionPolicy()) -> PurityValue:
    """
    Purity for an arbitrary subset A from its group exponents.

    With x = |a|^2, y = |b|^2 and c = a* b / sqrt|G| the reduced state is
    ``x |0_A><0_A| + y rho0 + c |phi_A><0_A| + c* |0_A><phi_A|`` and the
    ten trace terms are summed in complex arithmetic; the imaginary part
    must cancel.
    """
    bits = policy.bits
    G = 2**comb.log2_G
    with mp.workprec(bits):
        s, co = angles.half_angle_trig()
        N = mpf(G - 1)
        rootN = mpmath.sqrt(N)
        dA = mpmath.ldexp(1, comb.log2_dA)
        inv_f = mpmath.ldexp(1, -comb.log2_f)
        cphi, sphi = mpmath.cos(angles.phi), mpmath.sin(angles.phi)

        # a = co - e s / rootN, b = e s sqrt(G/N), expanded without forming a, b
        x = co * co - 2 * co * s * cphi / rootN + s * s / N
        y = s * s * (mpf(G) / N)
        c = mpmath.mpc(co * s * cphi - s * s / rootN, co * s * sphi) / rootN
        cc = mpmath.conj(c)

        terms = [
            x * x,
            y * y * dA * inv_f,
            c * c,
            cc * cc,
            2 * x * y * inv_f,
            2 * x * c,
            2 * x * cc,
            2 * y * c * dA * inv_f,
            2 * y * cc * dA * inv_f,
            2 * c * cc * dA,
        ]
        total = mpmath.fsum(terms)
        if abs(total.imag) > mpmath.ldexp(1, -(bits // 2)):
            raise NonRealResidue(f"imaginary residue {mpmath.nstr(total.imag, 5)}")
        real_terms = [
            terms[0], terms[1], terms[4], terms[9].real,
            (terms[2] + terms[3]).real, (terms[5] + terms[6]).real, (terms[7] + terms[8]).real,
        ]
        return PurityValue.from_purity(_checked_sum(real_terms, bits))


def sweep(k: int, L: int, theta_grid: Sequence, phi_grid: Sequence,
          policy: PrecisionPolicy = PrecisionPolicy()) -> list[tuple[object, object, mpf]]:
    """Row-major (theta outer, phi inner) table of (theta, phi, S2)."""
    if not len(theta_grid) or not len(phi_grid):
        raise ValueError("grids must be non-empty")
    rows = []
    for theta in theta_grid:
        for phi in phi_grid:
            pv = purity_block(k, L, BlochAngles.of(theta, phi), policy)
            rows.append((theta, phi, pv.renyi2))
    return rows
