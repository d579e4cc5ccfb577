"""``s6twistor`` command-line interface.

Exit codes: 0 success / all checks pass, 1 verification failure, 2 usage or I/O error.
Every report is UTF-8 JSON and depends only on the command line (no timings).
"""
from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from . import octonion
from .cayley import CayleyStructure, fiber_operator_residuals, operator_distance
from .forms import nk_pde_check
from .sphere import random_points, sphere_point
from .twistor import (
    CONVENTION as FAMILY_CONVENTION,
    PERIOD,
    TwistorPoint,
    family_through,
    intersection_scan,
    membership_test,
    phi_distance,
    random_twistor_point,
    reduce_phi,
)
from .verify import DEFAULT_TOLERANCES, SUITES, Check, RunConfig, build_report, run_suite

STRUCTURES_SCHEMA = "s6twistor-structures-v1"


class UsageError(Exception):
    """Bad input that should end the process with exit code 2."""


# -- argument helpers -------------------------------------------------------------

_PHI_RE = re.compile(r"^\s*([-+]?\d*\.?\d*(?:e[-+]?\d+)?)?\s*\*?\s*(pi|π)?\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$", re.I)


def parse_angle(text):
    """Float or a multiple of pi such as ``pi/6``, ``2pi/3`` or ``-0.5*pi``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _PHI_RE.match(text)
    if not m or not m.group(2):
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}")
    coef = m.group(1)
    value = (float(coef) if coef not in (None, "", "+", "-") else (-1.0 if coef == "-" else 1.0)) * np.pi
    if m.group(3):
        value /= float(m.group(3))
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def _common(with_tolerances=False):
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=42)
    parent.add_argument("--samples", type=_positive_int, default=200)
    parent.add_argument("--h", type=_positive_float, default=1e-4, help="finite-difference step")
    parent.add_argument("--out", help="write the JSON report here instead of stdout")
    parent.add_argument("--format", choices=["json"], default="json")
    if with_tolerances:
        group = parent.add_argument_group("tolerances")
        for name, value in DEFAULT_TOLERANCES.items():
            group.add_argument(f"--tol-{name}", type=_positive_float, default=value, dest=f"tol_{name}")
    return parent


def build_parser():
    parser = argparse.ArgumentParser(prog="s6twistor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    plain, tolerant = _common(), _common(with_tolerances=True)

    p = sub.add_parser("gen", parents=[plain], help="sample random Cayley structures")
    p.add_argument("--count", type=int, default=1)

    p = sub.add_parser("verify", parents=[tolerant], help="run verification suites")
    p.add_argument("suite", choices=(*SUITES, "all", "structure"))
    p.add_argument("--structure", help="structure file whose invariants are checked")
    p.add_argument("--index", type=int, default=0, help="entry to use from a multi-structure file")
    p.add_argument("--phi1", type=parse_angle)
    p.add_argument("--phi2", type=parse_angle)

    p = sub.add_parser("family", parents=[plain], help="evaluate the family through a twistor point")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--point", help="serialized twistor point")
    src.add_argument("--random", action="store_true", help="random twistor point from --seed")
    p.add_argument("--phi", type=parse_angle, nargs="+", default=[0.0, np.pi / 6, np.pi / 3])

    p = sub.add_parser("intersect", parents=[plain], help="locate points where two structures agree")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--grid", type=_positive_int, default=10_000)
    p.add_argument("--index-a", type=int, default=0)
    p.add_argument("--index-b", type=int, default=0)

    p = sub.add_parser("eval", parents=[plain], help="evaluate a structure at points")
    p.add_argument("structure")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--point", type=float, nargs=7, help="evaluate at this point (normalized) only")

    sub.add_parser("pde", parents=[tolerant], help="finite-difference nearly Kaehler equations")
    return parser


# -- I/O ----------------------------------------------------------------------------


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _write(report, out):
    text = json.dumps(report, indent=2, allow_nan=True) + "\n"
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _structure_entry(data, index=0):
    """The raw structure dict from a rotation file, a gen output or a family output."""
    if isinstance(data, dict) and "rotation" in data:
        return data
    if isinstance(data, dict):
        entries = data.get("structures", data.get("members"))
        if isinstance(entries, list):
            try:
                entry = entries[index]
            except IndexError:
                raise UsageError(f"index {index} out of range ({len(entries)} entries)") from None
            if isinstance(entry, dict) and "rotation" in entry:
                entry = dict(entry)
                entry.setdefault("convention", data.get("convention"))
                return entry
    raise UsageError("file does not contain a structure")


def load_structure(path, index=0):
    entry = _structure_entry(_read_json(path), index)
    try:
        return CayleyStructure.from_json(entry)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"{path}: invalid structure: {exc}") from exc


def _config(args):
    tolerances = {name: getattr(args, f"tol_{name}", value) for name, value in DEFAULT_TOLERANCES.items()}
    return RunConfig(
        seed=args.seed,
        samples=args.samples,
        h=args.h,
        tolerances=tolerances,
        phi1=getattr(args, "phi1", None),
        phi2=getattr(args, "phi2", None),
    )


# -- commands -----------------------------------------------------------------------


def cmd_gen(args):
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    rng = np.random.default_rng(args.seed)
    structures = [CayleyStructure(octonion.random_rotation(7, rng)).to_json() for _ in range(args.count)]
    return {
        "schema": STRUCTURES_SCHEMA,
        "convention": octonion.CONVENTION,
        "seed": args.seed,
        "structures": structures,
    }, 0


def structure_checks(entry, samples, seed, tol=1e-9):
    """Invariant checks of a raw serialized structure; never raises on bad numbers."""
    checks = [Check("convention", float(entry.get("convention") != octonion.CONVENTION), 0.0)]
    try:
        A = np.asarray(entry["rotation"], dtype=float)
    except (KeyError, TypeError, ValueError):
        return checks + [Check("rotation_entries", 1.0, 0.0)]
    checks.append(Check("rotation_entries", float(A.size != 49), 0.0))
    if A.size != 49:
        return checks
    A = A.reshape(7, 7)
    finite = bool(np.all(np.isfinite(A)))
    checks.append(Check("finite", float(not finite), 0.0))
    if not finite:
        return checks
    checks.append(Check("orthogonality", float(np.max(np.abs(A.T @ A - np.eye(7)))), tol))
    checks.append(Check("determinant", abs(float(np.linalg.det(A)) - 1.0), tol))
    # the fiber-operator invariants, evaluated without the constructor's validation
    xs = random_points(samples, seed)
    tang = square = skew = 0.0
    for x in xs:
        J = A.T @ octonion.right_mul_operator(A @ x) @ A
        r = fiber_operator_residuals(x, J)
        tang, square, skew = max(tang, r["tangency"]), max(square, r["square"]), max(skew, r["skew"])
    checks += [
        Check("tangency", tang, tol),
        Check("square_minus_identity", square, tol),
        Check("skew", skew, tol),
    ]
    return checks


def cmd_verify(args):
    cfg = _config(args)
    results = {}
    if args.suite == "structure" and not args.structure:
        raise UsageError("verify structure needs --structure FILE")
    if args.structure:
        entry = _structure_entry(_read_json(args.structure), args.index)
        results["structure"] = (structure_checks(entry, min(cfg.samples, 100), cfg.seed), [])
    names = SUITES if args.suite == "all" else (() if args.suite == "structure" else (args.suite,))
    for name in names:
        checks, notes, _ = run_suite(name, cfg)
        results[name] = (checks, notes)
    report = build_report(args.suite, cfg, results)
    for c in report["checks"]:
        if not c["pass"]:
            print(f"FAIL {c['suite']}.{c['name']}: {c['residual']:.3e} {c['comparison']} {c['threshold']:.1e} fails",
                  file=sys.stderr)
    return report, 0 if report["pass"] else 1


def _load_point(path):
    data = _read_json(path)
    try:
        tp = TwistorPoint.from_json(data)
        tp.validate()
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: malformed twistor point: {exc}") from exc
    return tp


def cmd_family(args):
    tp = _load_point(args.point) if args.point else random_twistor_point(args.seed)
    fam = family_through(tp)
    members = []
    tol = DEFAULT_TOLERANCES["family"]
    for phi_in in args.phi:
        phi = reduce_phi(phi_in)
        S = fam(phi)
        duplicate = next(
            (i for i, m in enumerate(members) if phi_distance(m["phi"], phi) < 1e-12), None
        )
        residual = float(operator_distance(S.evaluate(tp.point), tp.operator))
        members.append({
            "phi_input": float(phi_in),
            "phi": float(phi),
            "rotation": S.rotation.ravel().tolist(),
            "base_residual": residual,
            "duplicate_of": duplicate,
        })
    ok = all(m["base_residual"] <= tol for m in members)
    return {
        "schema": "s6twistor-family-v1",
        "convention": octonion.CONVENTION,
        "family_convention": FAMILY_CONVENTION,
        "period": PERIOD,
        "base": tp.to_json(),
        "lift": fam.lift.ravel().tolist(),
        "members": members,
        "threshold": tol,
        "pass": ok,
    }, 0 if ok else 1


def _certify(S, point):
    tp = TwistorPoint(point, S.evaluate(point))
    m = membership_test(S, tp)
    return {"member": bool(m.member), "phi": None if m.phi is None else float(m.phi), "residual": float(m.residual)}


def cmd_intersect(args):
    S1 = load_structure(args.file_a, args.index_a)
    S2 = load_structure(args.file_b, args.index_b)
    res = intersection_scan(S1, S2, grid=args.grid, seed=args.seed)
    clusters = []
    for c in res.clusters:
        clusters.append({
            "point": c.point.tolist(),
            "residual": c.residual,
            "size": c.size,
            # the common operator at c lies in the family through it of both structures
            "certification": {"a": _certify(S1, c.point), "b": _certify(S2, c.point)},
        })
    report = {
        "schema": "s6twistor-intersection-v1",
        "convention": octonion.CONVENTION,
        "grid": res.samples,
        "degenerate": res.degenerate,
        "clusters": clusters,
        "statistics": {
            "min_sample_difference": res.min_sample_difference,
            "max_sample_difference": res.max_sample_difference,
            "min_difference_outside": res.min_difference_outside,
        },
    }
    if res.degenerate:
        report["marker"] = "degenerate: sections coincide"
    return report, 0


def cmd_eval(args):
    S = load_structure(args.structure, args.index)
    xs = sphere_point(np.array([args.point])) if args.point else random_points(args.samples, args.seed)
    J = S.evaluate(xs)
    return {
        "schema": "s6twistor-eval-v1",
        "convention": octonion.CONVENTION,
        "points": xs.tolist(),
        "operators": J.reshape(len(xs), 49).tolist(),
    }, 0


def cmd_pde(args):
    cfg = _config(args)
    n = cfg.scaled(20)
    reports = [nk_pde_check(p, cfg.h) for p in random_points(n, np.random.default_rng([cfg.seed, 99]))]
    mus = np.array([r.mu for r in reports])
    checks = [
        Check("d_omega_minus_3psi", max(r.residual_domega for r in reports), cfg.tol("domega")),
        Check("d_phi_hat_plus_2mu_omega2", max(r.residual_dphi for r in reports), cfg.tol("dphi")),
        Check("mu_spread", float(mus.max() - mus.min()), cfg.tol("mu")),
    ]
    report = build_report("pde", cfg, {"pde": (checks, [])})
    report["points"] = [r.to_json() for r in reports]
    return report, 0 if report["pass"] else 1


COMMANDS = {
    "gen": cmd_gen,
    "verify": cmd_verify,
    "family": cmd_family,
    "intersect": cmd_intersect,
    "eval": cmd_eval,
    "pde": cmd_pde,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    try:
        report, code = COMMANDS[args.command](args)
        _write(report, args.out)
    except UsageError as exc:
        print(f"s6twistor: error: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
