"""Command-line front end: ``toricbloch <command> ...``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import mpmath
from mpmath import mp, mpf

from . import grover, oracle, topo
from .bloch import BlochAngles, toric_angles
from .errors import NonRealResidue, PrecisionTooLow, ToricBlochError
from .lattice import (Link, TorusLattice, block_combinatorics, enumerate_block_links,
                      subset_combinatorics)
from .purity import PrecisionPolicy, purity_block, purity_general

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_MISMATCH = 0, 2, 3, 4
COMMANDS = ("sweep", "curve", "gamma", "grover", "verify", "classify", "maxdrift")
_PARSE_PREC = 320
_ANGLE_RE = re.compile(
    r"^(?P<coef>[+-]?(?:\d+\.?\d*|\.\d+)(?:e[+-]?\d+)?|[+-])?\*?(?P<pi>pi)?(?:/(?P<den>\d+\.?\d*))?$"
)

CLASSIFY_DISCLAIMER = (
    "Only pure states on the sphere surface were scanned; "
    "mixed states in the interior are not tested."
)


class UsageError(ToricBlochError, ValueError):
    pass


def parse_angle(text: str) -> mpf:
    """Parse ``0.7``, ``pi``, ``2pi``, ``-pi/4``, ``3*pi/4``."""
    m = _ANGLE_RE.match(text.strip().replace(" ", ""))
    if not m or (m["coef"] is None and m["pi"] is None):
        raise UsageError(f"cannot parse angle {text!r}")
    with mp.workprec(_PARSE_PREC):
        coef = m["coef"]
        value = mpf(1 if coef in (None, "+") else -1 if coef == "-" else coef)
        if m["pi"]:
            value *= mp.pi
        if m["den"]:
            value /= mpf(m["den"])
        return value


def parse_grid(text: str) -> list[mpf]:
    """``start:stop:steps`` -> ``steps`` evenly spaced points including both ends."""
    parts = text.split(":")
    if len(parts) == 1:
        return [parse_angle(parts[0])]
    if len(parts) != 3:
        raise UsageError(f"grid must be start:stop:steps, got {text!r}")
    start, stop = parse_angle(parts[0]), parse_angle(parts[1])
    try:
        steps = int(parts[2])
    except ValueError:
        raise UsageError(f"grid step count must be an integer, got {parts[2]!r}") from None
    if steps < 1:
        raise UsageError("grid needs at least one point")
    if steps == 1:
        return [start]
    with mp.workprec(_PARSE_PREC):
        return [start + (stop - start) * i / (steps - 1) for i in range(steps)]


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def parse_subset(text: str, k: int) -> tuple[int, str | None]:
    """``block:L``, ``star:x,y`` or ``links:h:0,0;v:1,0`` -> (mask, block tag)."""
    lat = TorusLattice(k)
    kind, _, rest = text.partition(":")
    if kind == "block":
        L = int(rest)
        return lat.mask(enumerate_block_links(k, L).link_set), f"block:{L}"
    if kind == "star":
        x, y = (int(v) for v in rest.split(","))
        return lat.mask(lat.star_links(x, y)), None
    if kind == "links":
        items = [s for s in re.split(r"[;\s]+", rest) if s]
        return lat.mask(Link.parse(s) for s in items), None
    raise UsageError(f"unknown subset {text!r}")


def fmt(x) -> str:
    return format(float(x), ".17g")


def write_output(text: str, path: str | None) -> None:
    """Write to ``path`` atomically (temp file + rename), or stdout."""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".toricbloch-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


@dataclass(frozen=True)
class _RowTask:
    k: int
    L: int
    theta: mpf
    phis: tuple
    bits: int

    def __call__(self):
        policy = PrecisionPolicy(self.bits)
        out = []
        for phi in self.phis:
            pv = purity_block(self.k, self.L, BlochAngles(self.theta, phi), policy)
            out.append((self.theta, phi, pv.renyi2, pv.log2_purity))
        return out


def _run_task(task: _RowTask):
    return task()


def _grid_rows(k, L, thetas, phis, bits, jobs):
    tasks = [_RowTask(k, L, t, tuple(phis), bits) for t in thetas]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_task, tasks))
    else:
        chunks = [t() for t in tasks]
    return [row for chunk in chunks for row in chunk]


def cmd_sweep(args) -> int:
    rows = _grid_rows(args.k, args.L, parse_grid(args.theta), parse_grid(args.phi),
                      args.bits, args.jobs)
    if args.format == "json":
        text = to_json([
            {"theta": float(t), "phi": float(p), "S2": float(s), "log2_purity": float(lp)}
            for t, p, s, lp in rows
        ])
    else:
        text = to_csv(["theta", "phi", "S2"], [(fmt(t), fmt(p), fmt(s)) for t, p, s, _ in rows])
    write_output(text, args.output)
    return EXIT_OK


def cmd_curve(args) -> int:
    rows = _grid_rows(args.k, args.L, parse_grid(args.theta), [parse_angle(args.phi)],
                      args.bits, args.jobs)
    if args.format == "json":
        text = to_json([{"theta": float(t), "S2": float(s), "log2_purity": float(lp)}
                        for t, _, s, lp in rows])
    else:
        text = to_csv(["theta", "S2"], [(fmt(t), fmt(s)) for t, _, s, _ in rows])
    write_output(text, args.output)
    return EXIT_OK


def cmd_gamma(args) -> int:
    policy = PrecisionPolicy(args.bits)
    phi = parse_angle(args.phi)
    L_values = parse_int_list(args.L)
    if args.theta_at == "toric":
        theta = toric_angles(args.k * args.k - 1, args.bits).theta
    elif args.theta is not None:
        theta = parse_angle(args.theta)
    else:
        raise UsageError("give --theta or --theta-at toric")
    fit = topo.extract_sgamma(args.k, L_values, theta, phi, args.fit_mode, policy)
    out = {
        "k": args.k, "theta": float(theta), "phi": float(phi), "L_values": L_values,
        "alpha": fit.alpha, "s_gamma": fit.s_gamma, "residual": fit.residual,
        "fit_mode": fit.fit_mode,
    }
    if fit.coef_inv_L is not None:
        out["coef_inv_L"] = fit.coef_inv_L
    write_output(to_json(out), args.output)
    return EXIT_OK


def cmd_grover(args) -> int:
    params = grover.GroverParams(args.log2_g)
    out: dict = {"log2_G": args.log2_g}
    if args.optimal or args.inverse:
        res = grover.optimal_iterations(params) if args.optimal else grover.inverse_prepare(params)
        out.update(m=res.m, amp0=res.state.amp0.real, amp1=res.state.amp1.real)
        key = "success_prob" if args.optimal else "infidelity"
        value = res.success_prob if args.optimal else res.miss
        out[key] = float(value)
        out["log2_" + ("failure" if args.optimal else "infidelity")] = res.log2_miss
    elif args.fractional is not None:
        state = grover.fractional_power(params, args.fractional, params.ground())
        out.update(m=args.fractional, amp0=state.amp0.real, amp1=state.amp1.real,
                   success_prob=abs(state.amp0) ** 2)
    else:
        m = 0 if args.iterations is None else args.iterations
        state = grover.apply_kernel(params.ground(), params, m)
        out.update(m=m, amp0=state.amp0.real, amp1=state.amp1.real,
                   success_prob=abs(state.amp0) ** 2)
    write_output(to_json(out), args.output)
    return EXIT_OK


def verify_report(k: int, subset_mask: int, block: str | None, angles: BlochAngles,
                  policy: PrecisionPolicy) -> oracle.VerificationReport:
    """Oracle checks plus closed-form vs oracle purity at one Bloch point."""
    lat = TorusLattice(k)
    report = oracle.verify_ground(k)
    report.checks += oracle.verify_appendix_identities(k, subset_mask).checks
    ref = oracle.oracle_purity(k, subset_mask, angles)
    comb = subset_combinatorics(lat, subset_mask)
    report.add("purity_general_vs_oracle", abs(float(purity_general(comb, angles, policy).purity) - ref))
    if block is not None:
        L = int(block.split(":")[1])
        report.add("block_combinatorics_vs_gf2", float(comb != block_combinatorics(k, L)))
        report.add("purity_block_vs_oracle",
                   abs(float(purity_block(k, L, angles, policy).purity) - ref))
    return report


def cmd_verify(args) -> int:
    mask, block = parse_subset(args.subset, args.k)
    angles = BlochAngles(parse_angle(args.theta), parse_angle(args.phi))
    report = verify_report(args.k, mask, block, angles, PrecisionPolicy(args.bits))
    out = {
        "k": args.k,
        "subset": [str(lk) for lk in TorusLattice(args.k).links_of_mask(mask)],
        "theta": float(angles.theta), "phi": float(angles.phi),
        "checks": [c.as_dict() for c in report.checks],
        "pass": report.passed,
    }
    write_output(to_json(out), args.output)
    return EXIT_OK if report.passed else EXIT_MISMATCH


def classify(k: int, L: int, thetas: Sequence, phis: Sequence,
             policy: PrecisionPolicy = PrecisionPolicy()) -> dict:
    """Scan the sphere surface for separable states (S2 = 0)."""
    min_positive = None
    s2_at_zero = []
    for theta in thetas:
        for phi in phis:
            angles = BlochAngles.of(theta, phi)
            s2 = purity_block(k, L, angles, policy).renyi2
            if angles.theta == 0:
                s2_at_zero.append(s2)
            elif min_positive is None or s2 < min_positive[0]:
                min_positive = (s2, angles)
    entangled = min_positive is None or min_positive[0] > 0
    pole_separable = bool(s2_at_zero) and all(s == 0 for s in s2_at_zero)
    report = {
        "k": k, "L": L, "points": len(thetas) * len(phis),
        "min_S2_theta_positive": None if min_positive is None else float(min_positive[0]),
        "argmin_theta": None if min_positive is None else float(min_positive[1].theta),
        "argmin_phi": None if min_positive is None else float(min_positive[1].phi),
        "S2_at_theta_zero": None if not s2_at_zero else float(max(s2_at_zero)),
        "class4_consistent": bool(entangled and pole_separable),
        "disclaimer": CLASSIFY_DISCLAIMER,
    }
    return report


def cmd_classify(args) -> int:
    report = classify(args.k, args.L, parse_grid(args.theta), parse_grid(args.phi),
                      PrecisionPolicy(args.bits))
    write_output(to_json(report), args.output)
    return EXIT_OK


def cmd_maxdrift(args) -> int:
    policy = PrecisionPolicy(args.bits)
    phi = parse_angle(args.phi)
    rows = []
    for L in parse_int_list(args.L):
        theta_max, s2_max = topo.find_entropy_max(args.k, L, phi, policy)
        rows.append((L, theta_max, s2_max))
    if args.format == "json":
        text = to_json([{"L": L, "theta_max": t, "S2_max": s} for L, t, s in rows])
    else:
        text = to_csv(["L", "theta_max", "S2_max"], [(L, fmt(t), fmt(s)) for L, t, s in rows])
    write_output(text, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    default_bits = PrecisionPolicy.from_env().bits
    parser = argparse.ArgumentParser(
        prog="toricbloch",
        description="2-Renyi entropy and topological diagnostics on the toric-code Bloch sphere.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_choice=False):
        p.add_argument("--bits", type=int, default=default_bits,
                       help="floating precision in bits (env TORICBLOCH_PRECISION)")
        p.add_argument("-o", "--output", help="output file (default: stdout)")
        if fmt_choice:
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        return p

    p = common(sub.add_parser("sweep", help="S2 over a (theta, phi) grid"), True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--theta", default="0:pi:64")
    p.add_argument("--phi", default="0:2pi:64")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = common(sub.add_parser("curve", help="S2 along theta at fixed phi"), True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--theta", default="0:pi:256")
    p.add_argument("--phi", default="0")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_curve)

    p = common(sub.add_parser("gamma", help="area-law fit for the topological constant"))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--L", required=True, help="comma-separated block sizes")
    p.add_argument("--phi", default="0")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--theta")
    g.add_argument("--theta-at", choices=("toric",))
    p.add_argument("--fit-mode", choices=("two-term", "three-term"), default="two-term")
    p.set_defaults(func=cmd_gamma)

    p = common(sub.add_parser("grover", help="Grover kernel in the two-level subspace"))
    p.add_argument("--log2-g", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--iterations", type=int)
    g.add_argument("--optimal", action="store_true")
    g.add_argument("--inverse", action="store_true")
    g.add_argument("--fractional", type=float)
    p.set_defaults(func=cmd_grover)

    p = common(sub.add_parser("verify", help="brute-force oracle checks (k <= 3)"))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--subset", required=True, help="block:L | star:x,y | links:h:0,0;v:1,0")
    p.add_argument("--theta", default="0")
    p.add_argument("--phi", default="0")
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("classify", help="separability scan of the sphere surface"))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--theta", default="0:pi:64")
    p.add_argument("--phi", default="0:2pi:16")
    p.set_defaults(func=cmd_classify)

    p = common(sub.add_parser("maxdrift", help="theta of the entropy maximum per block size"), True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--L", required=True, help="comma-separated block sizes")
    p.add_argument("--phi", default="0")
    p.set_defaults(func=cmd_maxdrift)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        PrecisionPolicy(args.bits)
        return args.func(args)
    except (PrecisionTooLow, NonRealResidue) as exc:
        print(f"toricbloch: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, ToricBlochError) as exc:
        print(f"toricbloch: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
