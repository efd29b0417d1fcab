"""End-to-end acceptance checks, one test per criterion."""
import math
import time

import mpmath
import numpy as np
import pytest
from mpmath import mp

from conftest import ANGLE_POINTS
from toricbloch import cli
from toricbloch.bloch import BlochAngles, toric_angles
from toricbloch.grover import (GroverParams, PRODUCT_ZERO, apply_kernel, closed_form_iterate,
                               inverse_prepare, optimal_iterations)
from toricbloch.lattice import TorusLattice, enumerate_block_links, subset_combinatorics
from toricbloch.oracle import oracle_purity, verify_appendix_identities
from toricbloch.purity import PrecisionPolicy, purity_block, purity_general
from toricbloch.topo import (Perturbation, epsilon_to_theta, extract_sgamma, find_entropy_max,
                             phi_variation)

# fixed pseudo-random link subsets (drawn once with seed 20261016)
SUBSETS_K2 = [[4, 6], [0, 1, 7], [0, 1, 2, 3, 4, 5], [0, 1, 3, 4, 5, 7], [2, 3, 5, 6, 7]]
SUBSETS_K3 = [[0, 3, 5, 8, 9, 13, 16, 17], [15], [10, 14, 16, 17]]


def _mask(indices):
    return sum(1 << i for i in indices)


def test_c01_block_oracle(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    for theta in np.linspace(0, math.pi, 9):
        for phi in np.linspace(0, 2 * math.pi, 8, endpoint=False):
            a = BlochAngles.of(float(theta), float(phi))
            worst = max(worst, abs(float(purity_block(3, 1, a).purity) - oracle_purity(3, _block3(), a)))
    dt = time.perf_counter() - t0
    verdict("1 block purity vs oracle (k=3, L=1, 9x8)", worst <= 1e-10 and dt < 30,
            f"max dev {worst:.2e}, {dt:.1f}s")


def _block3():
    return TorusLattice(3).mask(enumerate_block_links(3, 1).link_set)


def test_c02_general_oracle(verdict):
    t0 = time.perf_counter()
    lat2, lat3 = TorusLattice(2), TorusLattice(3)
    cases = [(2, lat2.mask(lat2.star_links(0, 0)))] + [(2, _mask(s)) for s in SUBSETS_K2]
    cases += [(3, _block3())] + [(3, _mask(s)) for s in SUBSETS_K3]
    assert all(bin(m).count("1") <= (6 if k == 2 else 8) for k, m in cases)
    worst = 0.0
    for k, mask in cases:
        comb = subset_combinatorics(TorusLattice(k), mask)
        for theta, phi in ANGLE_POINTS:
            a = BlochAngles.of(theta, phi)
            worst = max(worst, abs(float(purity_general(comb, a).purity) - oracle_purity(k, mask, a)))
    dt = time.perf_counter() - t0
    verdict("2 general-subset purity vs oracle (10 subsets x 5 angles)", worst <= 1e-10 and dt < 120,
            f"max dev {worst:.2e}, {dt:.1f}s")


def test_c03_toric_point(verdict):
    t0 = time.perf_counter()
    small = purity_block(3, 1, toric_angles(8)).renyi2
    large = purity_block(20, 10, toric_angles(399, 256), PrecisionPolicy(256)).renyi2
    d_small, d_large = abs(float(small - 3)), abs(float(large - 39))
    dt = time.perf_counter() - t0
    verdict("3 S2 = 4L-1 at the toric point", d_small <= 1e-12 and d_large <= 1e-9 and dt < 10,
            f"|dS2| = {d_small:.1e} (k=3), {d_large:.1e} (k=20)")


def test_c04_topological_constant(verdict):
    t0 = time.perf_counter()
    fit = extract_sgamma(12, [1, 2, 3])
    dt = time.perf_counter() - t0
    ok = (abs(fit.alpha - 4) <= 1e-6 and abs(fit.s_gamma + 1) <= 1e-6
          and fit.residual <= 1e-9 and dt < 10)
    verdict("4 area-law fit at the toric point (k=12)", ok,
            f"alpha={fit.alpha:.12f} S_gamma={fit.s_gamma:.12f} residual={fit.residual:.1e}")


def test_c05_sgamma_curve(verdict):
    theta0 = float(toric_angles(15).theta)
    at_toric = extract_sgamma(4, [1, 2]).s_gamma
    grid = np.round(np.arange(0, math.pi, 0.01), 10)
    sg = np.array([extract_sgamma(4, [1, 2], theta=float(t)).s_gamma for t in grid])
    far = np.abs(grid - theta0) >= 0.05
    min_departure = float(np.min(np.abs(sg[far] + 1)))
    max_jump = float(np.max(np.abs(np.diff(sg))))
    ok = abs(at_toric + 1) <= 1e-6 and min_departure > 1e-6 and max_jump < 0.1
    verdict("5 S_gamma(theta) at k=4: pinned at toric point, departs, continuous", ok,
            f"S_gamma(theta0)={at_toric:.9f}, min |S_gamma+1| off-peak {min_departure:.1e}, "
            f"max step {max_jump:.3f}")


def test_c06_perturbation_law(verdict):
    t0 = time.perf_counter()
    eps, L = 1e-20, 6
    angles = epsilon_to_theta(Perturbation(eps), 256)
    exact = purity_block(30, L, angles, PrecisionPolicy(256)).renyi2
    with mp.workprec(256):
        law = 4 * L - 1 + 2 * mpmath.sqrt(mpmath.mpf(eps)) / mpmath.log(2)
        dev = abs(float(exact - law))
    dt = time.perf_counter() - t0
    verdict("6 perturbation law near the toric point (k=30, L=6, eps=1e-20)",
            dev <= 1e-12 and dt < 5, f"dev {dev:.2e}")


def test_c07_phi_weakness(verdict):
    large = [phi_variation(20, 10, t) for t in (math.pi / 4, math.pi / 2, 3 * math.pi / 4)]
    small = phi_variation(4, 1, math.pi / 2)
    ok = all(v <= 1e-9 for v in large) and small > 0
    verdict("7 phi dependence negligible at k=20, visible at k=4", ok,
            f"max var k=20 {float(max(large)):.1e}, k=4 {float(small):.2e}")


def test_c08_max_drift(verdict):
    t2, _ = find_entropy_max(20, 2)
    t4, _ = find_entropy_max(20, 4)
    verdict("8 entropy maximum shifts with L (k=20)", t4 > t2,
            f"theta_max(L=2)={t2:.6f}, theta_max(L=4)={t4:.6f}")


def test_c09_grover(verdict):
    t0 = time.perf_counter()
    p4 = GroverParams(2)
    one = apply_kernel(p4.ground(), p4, 1)
    ok4 = abs(abs(one.amp0) ** 2 - 1) <= 1e-12

    p256 = GroverParams(8)
    psi0 = p256.ground()
    dev = max(
        float(np.max(np.abs(apply_kernel(psi0, p256, m).as_array()
                            - closed_form_iterate(p256, m).as_array())))
        for m in range(101)
    )
    opt = optimal_iterations(p256)
    ok256 = dev <= 1e-12 and opt.m == 12 and opt.success_prob >= 0.9999

    infid = {n: inverse_prepare(GroverParams(n)).miss for n in (2, 3, 8, 15)}
    ok_inv = all(v <= mpmath.ldexp(1, -n) for n, v in infid.items())
    back = apply_kernel(PRODUCT_ZERO, GroverParams(15), -inverse_prepare(GroverParams(15)).m)
    ok_inv &= 1 - abs(back.overlap(GroverParams(15).ground())) ** 2 <= 2.0**-15
    dt = time.perf_counter() - t0
    verdict("9 Grover search and inverse preparation", ok4 and ok256 and ok_inv and dt < 5,
            f"|G|=256 max dev {dev:.1e}, m={opt.m}, success {float(opt.success_prob):.6f}; "
            f"worst infidelity*|G| {max(float(v * 2**n) for n, v in infid.items()):.3f}")


def test_c10_class4_scan(verdict):
    t0 = time.perf_counter()
    thetas = cli.parse_grid("0:pi:64")
    phis = cli.parse_grid("0:2pi:16")
    report = cli.classify(20, 10, thetas, phis)
    rows = [(float(t), purity_block(20, 10, BlochAngles.of(t, p)).renyi2) for t in thetas for p in phis]
    positive = all(s > 0 for t, s in rows if t > 0)
    zero = all(s == 0 for t, s in rows if t == 0)
    dt = time.perf_counter() - t0
    verdict("10 only theta=0 is separable (k=20, L=10, 64x16)",
            positive and zero and report["class4_consistent"] and dt < 60,
            f"min S2 at theta>0 {report['min_S2_theta_positive']:.3e}")


@pytest.mark.parametrize("k", [2, 3])
def test_c11_reduced_state_identities(k, verdict):
    lat = TorusLattice(k)
    subset = lat.mask(lat.star_links(0, 0)) if k == 2 else _block3()
    report = verify_appendix_identities(k, subset)
    failing = [c.check_name for c in report.checks if not c.passed]
    verdict(f"11 reduced-state identities (k={k}, {'star' if k == 2 else 'block(1)'})",
            report.passed and len(report.checks) >= 14,
            f"{len(report.checks)} checks, max dev {report.max_deviation:.1e}"
            + (f", failing {failing}" if failing else ""))
