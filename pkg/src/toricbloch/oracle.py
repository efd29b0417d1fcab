"""
Brute-force state-vector oracle for small tori.

States of the Bloch-sphere family are supported on the |G| bitstrings
``g |0...0>``, so they are stored sparsely as ``{bitstring: amplitude}``.
Reduced density matrices are dense, indexed by the bits of the subset links
in increasing link order. Everything here is double precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .bloch import BlochAngles, two_level_amplitudes
from .errors import ScaleTooLarge, SubsetTooLarge
from .lattice import Link, TorusLattice, subset_combinatorics

MAX_GROUP_K = 4
MAX_STATE_K = 3
MAX_SUBSET = 12
TOL = 1e-10


def star_masks(k: int) -> list[int]:
    return list(TorusLattice(k).star_masks)


def plaquette_masks(k: int) -> list[int]:
    return list(TorusLattice(k).plaquette_masks)


def build_group(k: int) -> list[int]:
    """All 2^(k^2-1) X-type masks spanned by the stars (identity first)."""
    if k > MAX_GROUP_K:
        raise ScaleTooLarge(f"group enumeration limited to k <= {MAX_GROUP_K}")
    gens = star_masks(k)[:-1]
    group = [0]
    for g in gens:
        group += [h ^ g for h in group]
    return group


@dataclass
class SparseStateVector:
    n_links: int
    entries: dict[int, complex] = field(default_factory=dict)

    def norm(self) -> float:
        return math.sqrt(sum(abs(v) ** 2 for v in self.entries.values()))

    def inner(self, other: "SparseStateVector") -> complex:
        """<self|other>."""
        return sum(v.conjugate() * other.entries.get(s, 0) for s, v in self.entries.items())

    def distance(self, other: "SparseStateVector") -> float:
        keys = self.entries.keys() | other.entries.keys()
        return max((abs(self.entries.get(s, 0) - other.entries.get(s, 0)) for s in keys), default=0.0)

    def apply_x(self, mask: int) -> "SparseStateVector":
        return SparseStateVector(self.n_links, {s ^ mask: v for s, v in self.entries.items()})

    def apply_z(self, mask: int) -> "SparseStateVector":
        return SparseStateVector(
            self.n_links,
            {s: (-v if (s & mask).bit_count() & 1 else v) for s, v in self.entries.items()},
        )


@dataclass
class ReducedDensity:
    subset: tuple[int, ...]  # link indices, increasing
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        m = self.matrix
        return float(np.sum(np.abs(m) ** 2))  # tr(m m) for Hermitian m


def _check_state_k(k: int) -> TorusLattice:
    if k > MAX_STATE_K:
        raise ScaleTooLarge(f"explicit states limited to k <= {MAX_STATE_K}")
    return TorusLattice(k)


def ground_state(k: int) -> SparseStateVector:
    lat = _check_state_k(k)
    group = build_group(k)
    amp = 1 / math.sqrt(len(group))
    return SparseStateVector(lat.n_links, {g: complex(amp) for g in group})


def bloch_state(k: int, angles: BlochAngles) -> SparseStateVector:
    lat = _check_state_k(k)
    group = build_group(k)
    amp0, amp1 = two_level_amplitudes(angles)
    rest = amp1 / math.sqrt(len(group) - 1)
    entries = {0: amp0}
    entries.update((g, rest) for g in group[1:])
    return SparseStateVector(lat.n_links, entries)


def _subset_indices(lattice: TorusLattice, subset: Iterable[Link] | int) -> tuple[int, ...]:
    if isinstance(subset, int):
        mask = subset
    else:
        mask = lattice.mask(subset)
    return tuple(i for i in range(lattice.n_links) if mask >> i & 1)


def _a_index(bits: np.ndarray, positions: tuple[int, ...]) -> np.ndarray:
    idx = np.zeros_like(bits)
    for j, p in enumerate(positions):
        idx |= ((bits >> np.uint64(p)) & np.uint64(1)) << np.uint64(j)
    return idx


def reduced_density(state: SparseStateVector, subset: Iterable[Link] | int,
                    lattice: TorusLattice | None = None) -> ReducedDensity:
    """Partial trace over the complement of ``subset``."""
    if lattice is None:
        lattice = TorusLattice(math.isqrt(state.n_links // 2))
    positions = _subset_indices(lattice, subset)
    if len(positions) > MAX_SUBSET:
        raise SubsetTooLarge(f"|A| = {len(positions)} > {MAX_SUBSET}")
    a_mask = sum(1 << p for p in positions)
    keys = np.fromiter(state.entries.keys(), dtype=np.uint64, count=len(state.entries))
    amps = np.fromiter(state.entries.values(), dtype=complex, count=len(state.entries))
    a_idx = _a_index(keys, positions).astype(np.intp)
    b_keys = keys & np.uint64(~a_mask & lattice.full_mask)
    _, b_idx = np.unique(b_keys, return_inverse=True)
    # (a, b) pairs are unique because the bitstrings are
    psi = np.zeros((1 << len(positions), b_idx.max() + 1), dtype=complex)
    psi[a_idx, b_idx.ravel()] = amps
    return ReducedDensity(positions, psi @ psi.conj().T)


def oracle_purity(k: int, subset: Iterable[Link] | int, angles: BlochAngles) -> float:
    rho = reduced_density(bloch_state(k, angles), subset, TorusLattice(k))
    return rho.purity()


@dataclass(frozen=True)
class CheckResult:
    check_name: str
    deviation: float
    passed: bool

    def as_dict(self) -> dict:
        return {"check_name": self.check_name, "deviation": self.deviation, "pass": self.passed}


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, name: str, deviation: float, tol: float = TOL) -> None:
        deviation = float(deviation)
        self.checks.append(CheckResult(name, deviation, bool(deviation <= tol)))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_deviation(self) -> float:
        return max((c.deviation for c in self.checks), default=0.0)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.check_name == name:
                return c
        raise KeyError(name)


def stabilizer_expectations(state: SparseStateVector, k: int) -> tuple[list[float], list[float]]:
    """<A_s> for every star and <B_p> for every plaquette."""
    lat = TorusLattice(k)
    stars = [state.inner(state.apply_x(m)).real for m in lat.star_masks]
    plaqs = [state.inner(state.apply_z(m)).real for m in lat.plaquette_masks]
    return stars, plaqs


def verify_ground(k: int, state: SparseStateVector | None = None) -> VerificationReport:
    """Check A_s |Psi> = |Psi> and B_p |Psi> = |Psi> for all stars and plaquettes."""
    lat = _check_state_k(k)
    psi = ground_state(k) if state is None else state
    report = VerificationReport()
    report.add("norm", abs(psi.norm() - 1))
    report.add("star_eigenvalue", max(psi.apply_x(m).distance(psi) for m in lat.star_masks))
    report.add("plaquette_eigenvalue", max(psi.apply_z(m).distance(psi) for m in lat.plaquette_masks))
    stars, plaqs = stabilizer_expectations(psi, k)
    energy = -(sum(stars) + sum(plaqs))
    report.add("ground_energy", abs(energy + 2 * k * k))
    return report


@dataclass(frozen=True)
class SubgroupData:
    d_A: int
    d_B: int
    G: int
    phi_A: np.ndarray

    @property
    def f(self) -> float:
        return self.G / self.d_B


def subgroup_data(k: int, subset: Iterable[Link] | int) -> SubgroupData:
    """Enumerate G_A, G_B directly and build |phi_A> = sum_{g in G_A} g_A |0_A>."""
    lat = TorusLattice(k)
    positions = _subset_indices(lat, subset)
    a_mask = sum(1 << p for p in positions)
    b_mask = lat.full_mask & ~a_mask
    group = build_group(k)
    in_A = [g for g in group if g & b_mask == 0]
    d_B = sum(1 for g in group if g & a_mask == 0)
    phi = np.zeros(1 << len(positions), dtype=complex)
    idx = _a_index(np.array(in_A, dtype=np.uint64), positions)
    phi[idx.astype(np.intp)] += 1
    return SubgroupData(len(in_A), d_B, len(group), phi)


def verify_appendix_identities(k: int, subset: Iterable[Link] | int) -> VerificationReport:
    """Check the operator identities satisfied by rho_A^(0), |0_A> and |phi_A>."""
    lat = _check_state_k(k)
    subset_mask = subset if isinstance(subset, int) else lat.mask(subset)
    rho0 = reduced_density(ground_state(k), subset_mask, lat).matrix
    sub = subgroup_data(k, subset_mask)
    comb = subset_combinatorics(lat, subset_mask)
    d_A, f = sub.d_A, sub.f
    phi = sub.phi_A
    zero = np.zeros(rho0.shape[0], dtype=complex)
    zero[0] = 1

    report = VerificationReport()
    report.add("dA_matches_gf2", abs(math.log2(d_A) - comb.log2_dA))
    report.add("f_matches_gf2", abs(math.log2(f) - comb.log2_f))
    report.add("hermitian", np.abs(rho0 - rho0.conj().T).max())
    report.add("phiA_norm_eq_GA", abs(np.vdot(phi, phi) - d_A))
    report.add("phiA_overlap_0A", abs(np.vdot(phi, zero) - 1))
    report.add("rho0_squared", np.abs(rho0 @ rho0 - (d_A / f) * rho0).max())
    report.add("rho0_trace", abs(np.trace(rho0) - 1))
    report.add("rho0_on_0A", np.abs(rho0 @ zero - phi / f).max())
    report.add("rho0_00", abs(np.vdot(zero, rho0 @ zero) - 1 / f))
    report.add("rho0_0phi", abs(np.vdot(zero, rho0 @ phi) - d_A / f))
    P = (f / d_A) * rho0
    report.add("projector_idempotent", np.abs(P @ P - P).max())
    report.add("projector_trace", abs(np.trace(P) - f / d_A))
    evals = np.linalg.eigvalsh(rho0)
    nonzero = evals[evals > 0.5 * d_A / f]
    rank_dev = abs(len(nonzero) - f / d_A)
    spread = np.abs(nonzero - d_A / f).max() if len(nonzero) else 1.0
    rest = np.abs(evals[evals <= 0.5 * d_A / f]).max(initial=0.0)
    report.add("spectrum_rank", rank_dev)
    report.add("spectrum_values", max(spread, rest))
    return report
