"""Command-line front end.

    pathdeform verify {cocycle,delta-squared,associativity,triviality-torus,local-triviality} ...
    pathdeform trace {equator,deflection} ...
    pathdeform monoid {delta-check,solve-triviality} FIXTURE.json

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import scenarios
from .deformation import DeformationParams
from .geometry import FlatTorus, Lattice, UnitSphere
from .monoid import FiniteMonoid, MonoidFormatError, Verdict, solve_triviality
from .verify import (associativity_suite, cocycle_suite, delta_squared_suite, finite_delta_squared,
                     local_triviality_suite, torus_triviality_suite, triviality_roundtrip, weights_cochain)

VERIFY_SUITES = ("cocycle", "delta-squared", "associativity", "triviality-torus", "local-triviality")


class UsageError(Exception):
    pass


def _add_geometry_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=("torus", "sphere"))
    p.add_argument("--lattice", nargs=4, type=float, metavar=("B1X", "B1Y", "B2X", "B2Y"),
                   help="torus lattice basis (default: unit square)")
    p.add_argument("--scale", type=float, default=1.0, help="form scale c (sphere modulus is 4 pi |c|)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--lambda", dest="lam", type=float, help="continuous deformation parameter (torus)")
    mode.add_argument("--quantum", type=int, help="quantum number n (sphere)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathdeform", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run an identity-check suite")
    v.add_argument("suite", choices=VERIFY_SUITES)
    _add_geometry_flags(v)
    v.add_argument("--samples", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, help="override the pass threshold of every check")
    v.add_argument("--base", nargs="+", type=float,
                   help="local-triviality base point (3 floats on the sphere, 2 lattice coords on the torus)")
    v.add_argument("--radius", type=float, help="local-triviality ball radius")

    t = sub.add_parser("trace", help="run a scenario and write CSV")
    tsub = t.add_subparsers(dest="scenario", required=True)
    eq = tsub.add_parser("equator", help="phase along the equator after deflection")
    eq.add_argument("--colatitude", type=float, default=0.0)
    eq.add_argument("--quantum", type=int, default=1)
    eq.add_argument("--steps", type=int, default=360)
    eq.add_argument("--scale", type=float, default=1.0)
    eq.add_argument("--output", "-o", help="CSV path (default: stdout, summary on stderr)")
    de = tsub.add_parser("deflection", help="torus deflection weights and their mirrors")
    de.add_argument("--lattice", nargs=4, type=float, metavar=("B1X", "B1Y", "B2X", "B2Y"))
    de.add_argument("--lambda", dest="lam", type=float, default=1.0)
    de.add_argument("--scale", type=float, default=1.0)
    de.add_argument("--first", nargs=2, type=float, default=(0.7, 0.2),
                    help="displacement of the first straight path, in lattice coordinates")
    de.add_argument("--angles", type=int, default=100, help="number of angles in [0, pi]")
    de.add_argument("--leg", type=float, default=0.5, help="length of the deflected leg")
    de.add_argument("--output", "-o")

    m = sub.add_parser("monoid", help="finite partial monoid checks")
    m.add_argument("action", choices=("delta-check", "solve-triviality"))
    m.add_argument("fixture", type=Path)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--cochains", type=int, default=100)
    return parser


def _backend_and_params(args) -> tuple:
    backend_name = args.backend
    if backend_name is None:
        if args.lam is not None or getattr(args, "suite", None) == "triviality-torus":
            backend_name = "torus"
        else:
            backend_name = "sphere"
    if backend_name == "sphere":
        if args.lam is not None:
            raise UsageError("--lambda needs the torus backend (the sphere form has positive modulus)")
        if args.lattice is not None:
            raise UsageError("--lattice only applies to the torus backend")
        if args.scale == 0:
            raise UsageError("--scale must be nonzero on the sphere")
        backend = UnitSphere()
        params = DeformationParams.quantized(backend.area_form(args.scale), 1 if args.quantum is None else args.quantum)
    else:
        if args.quantum is not None:
            raise UsageError("--quantum needs the sphere backend (the torus form has modulus 0)")
        try:
            lattice = Lattice.from_flat(args.lattice) if args.lattice else Lattice()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        backend = FlatTorus(lattice)
        params = DeformationParams.continuous(backend.area_form(args.scale), 0.3 if args.lam is None else args.lam)
    return backend, params


def _mode_str(params: DeformationParams) -> str:
    m = params.mode
    return f"n={m.n}" if hasattr(m, "n") else f"lambda={m.lam:g}"


def _apply_tol(verdicts: list[Verdict], tol: float | None) -> list[Verdict]:
    if tol is not None:
        for v in verdicts:
            v.passed = v.residual < tol
    return verdicts


def _report(out, header: str, verdicts: list[Verdict]) -> int:
    print(header, file=out)
    for v in verdicts:
        print(v.line(), file=out)
    total = sum(v.samples + v.undefined for v in verdicts)
    und = sum(v.undefined for v in verdicts)
    print(f"# undefined_fraction={und / total if total else 0.0:.3e}", file=out)
    return 0 if all(v.passed for v in verdicts) else 1


def cmd_verify(args, out) -> int:
    if args.samples <= 0:
        raise UsageError("--samples must be positive")
    backend, params = _backend_and_params(args)
    rng = np.random.default_rng(args.seed)
    suite = args.suite
    if suite == "cocycle":
        verdicts = cocycle_suite(params, args.samples, rng)
    elif suite == "delta-squared":
        verdicts = delta_squared_suite(backend, params.form, args.samples, rng)
    elif suite == "associativity":
        verdicts = [associativity_suite(params, args.samples, rng)]
    elif suite == "triviality-torus":
        if backend.name != "torus":
            raise UsageError("triviality-torus runs on the torus backend")
        verdicts = [torus_triviality_suite(params, args.samples, rng)]
    else:
        want = 3 if backend.name == "sphere" else 2
        if args.base is not None and len(args.base) != want:
            raise UsageError(f"--base needs {want} numbers on the {backend.name}")
        if backend.name == "sphere":
            base = backend.point(*(args.base or (0.0, 0.0, 1.0)))
            radius = 1.0 if args.radius is None else args.radius
        else:
            base = backend.point(*(args.base or (0.5, 0.5)))
            radius = 0.5 * backend.injectivity_radius() if args.radius is None else args.radius
        try:
            verdicts = [local_triviality_suite(params, base, radius, args.samples, rng)]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    header = (f"# pathdeform verify {suite} backend={backend.name} seed={args.seed} "
              f"samples={args.samples} scale={args.scale:g} {_mode_str(params)}")
    return _report(out, header, _apply_tol(verdicts, args.tol))


def cmd_trace(args, out, err) -> int:
    if args.scenario == "equator":
        try:
            cfg = scenarios.EquatorTraceConfig(args.colatitude, args.quantum, args.steps, args.scale)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        rows = scenarios.equator_trace(cfg)
        total = scenarios.total_phase(rows)
        expected = scenarios.expected_total_phase(cfg)
        summary = f"total_phase={total:.17g} expected={expected:.17g} residual={abs(total - expected):.3e}"
    else:
        try:
            lattice = Lattice.from_flat(args.lattice) if args.lattice else Lattice()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if args.angles < 1:
            raise UsageError("--angles must be positive")
        torus = FlatTorus(lattice)
        p = torus.point(0.1, 0.1)
        end = np.array([0.1, 0.1]) + np.array(args.first)
        gamma = torus.class_between_lifts(torus.lift(p), lattice.to_xy(end))
        angles = np.linspace(0.0, math.pi, args.angles)
        rows = scenarios.torus_deflection(lattice, args.lam, gamma, angles, args.leg, args.scale)
        worst = max(abs(r.product - 1) for r in rows)
        summary = f"max_mirror_product_error={worst:.3e} angles={len(rows)}"
    if args.output:
        scenarios.emit_csv(rows, args.output)
        print(summary, file=out)
    else:
        scenarios.emit_csv(rows, out)
        print(summary, file=err)
    return 0


def _load_weights(path: Path, monoid: FiniteMonoid):
    import json

    data = json.loads(path.read_text())
    raw = data.get("weights")
    if raw is None:
        return None
    weights = {}
    for key, val in raw.items():
        parts = key.split(",")
        if len(parts) != 2 or any(p.strip() not in monoid.elements for p in parts):
            raise MonoidFormatError(f"weights key {key!r}: expected 'a,b' with known elements")
        try:
            w = float(val)
        except (TypeError, ValueError):
            raise MonoidFormatError(f"weights key {key!r}: {val!r} is not a number") from None
        if w <= 0:
            raise MonoidFormatError(f"weights key {key!r}: weights must be positive")
        weights[(parts[0].strip(), parts[1].strip())] = w
    return weights


def cmd_monoid(args, out) -> int:
    try:
        monoid = FiniteMonoid.from_json(args.fixture)
        weights = _load_weights(args.fixture, monoid)
    except (OSError, MonoidFormatError) as exc:
        raise UsageError(str(exc)) from None
    rng = np.random.default_rng(args.seed)
    header = f"# pathdeform monoid {args.action} fixture={args.fixture.name} seed={args.seed}"
    if args.action == "delta-check":
        bad = monoid.associativity_violations()
        assoc = Verdict("associativity", not bad, float(len(bad)), len(monoid.elements) ** 3, 0)
        return _report(out, header, [assoc] + finite_delta_squared(monoid, rng, args.cochains))
    if weights is None:
        v = triviality_roundtrip(monoid, rng)
        code = _report(out, header, [v])
        print(f"verdict: {v.detail['verdict']}", file=out)
        return code
    f = weights_cochain(monoid, weights)
    g = solve_triviality(f, monoid)
    print(header, file=out)
    if g:
        values = " ".join(f"g({e})={g(e).real:.12g}" for e in monoid.elements)
        print(f"verdict: trivial {values}", file=out)
    else:
        print(f"verdict: not-trivial residual={g.residual:.3e}", file=out)
    return 0


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "verify":
            return cmd_verify(args, out)
        if args.command == "trace":
            return cmd_trace(args, out, err)
        return cmd_monoid(args, out)
    except UsageError as exc:
        print(f"pathdeform: error: {exc}", file=err)
        return 2
    except OSError as exc:
        print(f"pathdeform: error: {exc}", file=err)
        return 2


if __name__ == "__main__":
    sys.exit(main())
