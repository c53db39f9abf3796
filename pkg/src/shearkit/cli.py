"""Command-line front end.

Subcommands: verify-identity, compat, closure, codim2, sl-demo,
decompose, approx, basin.  Inputs are inline strings or files in the
polynomial / vector-field grammar; artifacts are canonical JSON, CSV or
PGM so identical invocations (including the seed) are byte-identical.
Exit code 0 means every requested verdict was established, 1 means some
verdict was not established, 2 means a usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

from .errors import ShearKitError
from . import density, dynamics, serialize, subvariety
from .fields import parse_vector_field
from .poly import parse_poly, parse_scalar
from .subvariety import SubvarietyInput

DEFAULT_SEED = dynamics.DEFAULT_SEED

EXIT_OK = 0
EXIT_NOT_ESTABLISHED = 1
EXIT_USAGE = 2


@dataclass
class JobSpec:
    """Validated parameters of one CLI invocation."""

    subcommand: str
    inputs: dict = dataclass_field(default_factory=dict)
    params: dict = dataclass_field(default_factory=dict)
    output: str | None = None
    seed: int = DEFAULT_SEED

    def require_positive(self, *names: str) -> None:
        for name in names:
            value = self.params.get(name)
            if value is not None and value <= 0:
                raise ShearKitError(f"parameter {name} must be positive, got {value}")


def _emit(document: dict, output: str | None) -> None:
    text = serialize.canonical_dumps(document)
    if output:
        Path(output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _read_fields_file(path: str, nvars: int | None):
    fields = []
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            fields.append(parse_vector_field(line, nvars))
        except ShearKitError as exc:
            raise ShearKitError(f"{path}:{lineno}: {exc}") from exc
        if nvars is None:
            nvars = fields[-1].nvars
    return fields


def _require_operands(args, *names: str) -> None:
    missing = [name for name in names if getattr(args, name) is None]
    if missing:
        flags = ", ".join(f"--{name}" for name in missing)
        raise ShearKitError(f"identity {args.name!r} needs {flags}")


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _run_verify_identity(args) -> int:
    spec = JobSpec("verify-identity", params={"nvars": args.nvars}, seed=args.seed)
    spec.require_positive("nvars")
    n = args.nvars
    name = args.name
    if name in ("andersen-lempert", "al"):
        _require_operands(args, "f1", "f2")
        check = density.verify_shear_identity(
            parse_poly(args.f1, n), parse_poly(args.f2, n)
        )
        checks = {"andersen-lempert": check.holds}
        residuals = {"andersen-lempert": serialize.field_to_text(check.residual)}
    elif name == "compat-pair":
        _require_operands(args, "d1", "d2", "a", "f1", "f2")
        check = density.verify_compat_identity(
            parse_vector_field(args.d1, n),
            parse_vector_field(args.d2, n),
            parse_poly(args.a, n),
            parse_poly(args.f1, n),
            parse_poly(args.f2, n),
        )
        checks = {"compat-pair": check.holds}
        residuals = {"compat-pair": serialize.field_to_text(check.residual)}
    elif name == "codim2-pair":
        _require_operands(args, "f1", "h1", "f2", "h2")
        check = subvariety.verify_codim2_identity(
            parse_poly(args.f1, n),
            parse_poly(args.h1, n),
            parse_poly(args.f2, n),
            parse_poly(args.h2, n),
        )
        checks = {"codim2-pair": check.holds}
        residuals = {"codim2-pair": serialize.field_to_text(check.residual)}
    elif name == "local-triple":
        _require_operands(args, "r", "h", "f", "g")
        report = subvariety.verify_local_identities(
            parse_poly(args.r, n),
            parse_poly(args.h, n),
            args.s,
            parse_poly(args.f, n),
            parse_poly(args.g, n),
        )
        checks = {
            f"local-{i + 1}": c.holds for i, c in enumerate(report.checks)
        }
        residuals = {
            f"local-{i + 1}": serialize.field_to_text(c.residual)
            for i, c in enumerate(report.checks)
        }
    else:
        raise ShearKitError(f"unknown identity {name!r}")
    established = all(checks.values())
    _emit(
        {
            "schema_version": serialize.SCHEMA_VERSION,
            "kind": "identity-verdicts",
            "identity": name,
            "checks": checks,
            "residuals": residuals,
            "established": established,
        },
        args.output,
    )
    print("established" if established else "failed", file=sys.stderr)
    return EXIT_OK if established else EXIT_NOT_ESTABLISHED


def _run_compat(args) -> int:
    spec = JobSpec("compat", params={"degree": args.degree}, seed=args.seed)
    spec.require_positive("degree")
    d1 = parse_vector_field(args.d1)
    d2 = parse_vector_field(args.d2, d1.nvars)
    candidates = [parse_poly(text, d1.nvars) for text in args.candidate]
    verdict = density.check_compatibility(d1, d2, args.degree, candidates)
    _emit(verdict.to_json_dict(), args.output)
    return EXIT_OK if verdict.established else EXIT_NOT_ESTABLISHED


def _run_closure(args) -> int:
    spec = JobSpec(
        "closure",
        params={"degree_cap": args.degree_cap, "depth": args.depth},
        seed=args.seed,
    )
    spec.require_positive("degree_cap", "depth")
    if args.generators:
        generators = _read_fields_file(args.generators, None)
        if not generators:
            raise ShearKitError("generators file is empty")
        nvars = generators[0].nvars
    elif args.shear_family is not None:
        generators = density.shear_generator_family(args.shear_family, 2)
        nvars = 2
    else:
        raise ShearKitError("provide --generators FILE or --shear-family DEGREE")
    if args.targets:
        targets = _read_fields_file(args.targets, nvars)
    elif args.monomial_targets is not None:
        targets = density.monomial_field_targets(nvars, args.monomial_targets)
    else:
        targets = []
    cert = density.lie_closure(generators, args.degree_cap, args.depth, targets)
    _emit(cert.to_json_dict(), args.output)
    return EXIT_OK if cert.all_targets_established else EXIT_NOT_ESTABLISHED


def _load_subvariety(args) -> SubvarietyInput:
    if args.ideal:
        doc = json.loads(Path(args.ideal).read_text(encoding="utf-8"))
        return SubvarietyInput.from_json_dict(doc)
    if args.gens:
        if args.nvars is None:
            raise ShearKitError("--gens needs -n/--nvars")
        return SubvarietyInput(
            args.nvars, tuple(parse_poly(g, args.nvars) for g in args.gens)
        )
    raise ShearKitError("provide --ideal FILE or --gens POLY...")


def _run_codim2(args) -> int:
    spec = JobSpec(
        "codim2",
        params={"degree": args.degree, "degree_cap": args.degree_cap, "depth": args.depth},
        seed=args.seed,
    )
    spec.require_positive("degree", "depth")
    data = _load_subvariety(args)
    cert = subvariety.codim2_module_certificate(
        data, args.degree, args.degree_cap, args.depth
    )
    _emit(cert.to_json_dict(), args.output)
    return EXIT_OK if cert.all_targets_established else EXIT_NOT_ESTABLISHED


def _run_sl_demo(args) -> int:
    spec = JobSpec(
        "sl-demo", params={"n": args.n, "trials": args.trials}, seed=args.seed
    )
    spec.require_positive("n", "trials")
    n = args.n
    d1, d2 = density.sl_pair_derivations(n)
    det = density.determinant_poly(n)
    det_minus_one = det - parse_poly("1", n * n)
    points = density.sample_sl_points(n, args.trials, args.seed)
    zero = density.VectorField.zero(n * n)
    tangency1 = density.verify_on_variety(
        density.VectorField.monomial(n * n, 0, d1.apply(det)), zero, [det_minus_one], points
    )
    tangency2 = density.verify_on_variety(
        density.VectorField.monomial(n * n, 0, d2.apply(det)), zero, [det_minus_one], points
    )
    a = density.matrix_variable(n, 0, 0)
    b = d1.apply(a)
    witness_ok = (
        d2.apply(a).is_zero() and not b.is_zero() and d1.apply(b).is_zero()
    )
    holds = (
        d1.apply(det).is_zero()
        and d2.apply(det).is_zero()
        and tangency1.holds_on_samples
        and tangency2.holds_on_samples
        and witness_ok
    )
    _emit(
        {
            "schema_version": serialize.SCHEMA_VERSION,
            "kind": "sl-demo",
            "n": n,
            "points_tested": len(points),
            "tangency_symbolic": d1.apply(det).is_zero() and d2.apply(det).is_zero(),
            "tangency_on_samples": tangency1.holds_on_samples and tangency2.holds_on_samples,
            "witness": {
                "a": serialize.poly_to_text(a),
                "b": serialize.poly_to_text(b),
                "holds": witness_ok,
            },
            "holds": holds,
            "note": tangency1.note,
            "seed": args.seed,
        },
        args.output,
    )
    return EXIT_OK if holds else EXIT_NOT_ESTABLISHED


def _run_decompose(args) -> int:
    field = parse_vector_field(args.field)
    primitives = dynamics.decompose_field(field)
    listing = []
    for prim in primitives:
        if isinstance(prim, dynamics.Shear):
            listing.append(
                {
                    "kind": "shear",
                    "axis": prim.axis + 1,
                    "coeff": serialize.poly_to_text(prim.coeff),
                }
            )
        else:
            listing.append(
                {
                    "kind": "bracket-pair",
                    "axis": prim.axis + 1,
                    "aux": prim.aux + 1,
                    "f1": serialize.poly_to_text(prim.f1),
                    "f2": serialize.poly_to_text(prim.f2),
                }
            )
    _emit(
        {
            "schema_version": serialize.SCHEMA_VERSION,
            "kind": "decomposition",
            "field": serialize.field_to_text(field),
            "primitives": listing,
        },
        args.output,
    )
    return EXIT_OK


def _parse_int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _run_approx(args) -> int:
    spec = JobSpec(
        "approx",
        params={"time": args.time, "steps": args.steps, "points": args.points},
        seed=args.seed,
    )
    spec.require_positive("time", "steps", "points")
    substeps = _parse_int_list(args.substeps)
    if not substeps or any(m < 1 for m in substeps):
        raise ShearKitError("--substeps needs positive step counts, e.g. 8,16,32")
    if args.isotopy:
        doc = json.loads(Path(args.isotopy).read_text(encoding="utf-8"))
        table = [parse_vector_field(text) for text in doc["fields"]]
        field_at = table
        slices = len(table)
    else:
        if not args.field:
            raise ShearKitError("provide --field or --isotopy FILE")
        field = parse_vector_field(args.field)
        field_at = [field] * args.steps
        slices = args.steps
    seq, report = dynamics.approximate_isotopy(
        field_at,
        args.time,
        slices,
        substeps,
        args.radius,
        args.points,
        args.seed,
        args.scheme,
    )
    document = {
        "schema_version": serialize.SCHEMA_VERSION,
        "kind": "approximation-run",
        "sequence_length": len(seq),
        "scheme": args.scheme,
        "report": report.to_json_dict(),
    }
    if args.save_sequence:
        Path(args.save_sequence).write_text(
            serialize.canonical_dumps(dynamics.autoseq_to_json_dict(seq)) + "\n",
            encoding="utf-8",
        )
    _emit(document, args.output)
    return EXIT_OK


def _run_basin(args) -> int:
    spec = JobSpec(
        "basin",
        params={"max_iter": args.max_iter},
        seed=args.seed,
    )
    spec.require_positive("max_iter")
    if args.map:
        doc = json.loads(Path(args.map).read_text(encoding="utf-8"))
        seq = dynamics.autoseq_from_json_dict(doc)
    elif args.builtin == "attracting-shears":
        seq = dynamics.attracting_shear_composition()
    elif args.builtin == "radial-contraction":
        seq = dynamics.radial_contraction()
    else:
        raise ShearKitError("provide --map FILE or --builtin NAME")
    if args.grid:
        grid = dynamics.GridSpec.from_json_dict(
            json.loads(Path(args.grid).read_text(encoding="utf-8"))
        )
    else:
        grid = dynamics.GridSpec.real_plane(
            seq.nvars, args.nu, args.nv, tuple(args.u), tuple(args.v)
        )
    fixed_point = tuple(
        parse_scalar(part).to_complex() for part in args.fixed_point.split(",")
    )
    result = dynamics.basin_sample(
        seq,
        fixed_point,
        grid,
        max_iter=args.max_iter,
        attract_radius=args.attract_radius,
        escape_radius=args.escape_radius,
    )
    result.write_csv(args.csv)
    if args.pgm:
        result.write_pgm(args.pgm)
    summary = {
        "schema_version": serialize.SCHEMA_VERSION,
        "kind": "basin-summary",
        "counts": result.counts(),
        "spectral_radius_estimate": result.spectral_radius_estimate,
        "contraction_warning": result.contraction_warning,
        "grid": grid.to_json_dict(),
    }
    _emit(summary, args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shearkit",
        description="Exact density certificates and shear-automorphism numerics.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("-o", "--output", help="write the JSON artifact here")

    p = sub.add_parser("verify-identity", help="check a named bracket identity exactly")
    p.add_argument(
        "name",
        choices=["andersen-lempert", "al", "compat-pair", "codim2-pair", "local-triple"],
    )
    p.add_argument("-n", "--nvars", type=int, required=True)
    for flag in ("--f1", "--f2", "--h1", "--h2", "--a", "--d1", "--d2", "--r", "--h", "--f", "--g"):
        p.add_argument(flag)
    p.add_argument("-s", type=int, default=0)
    common(p)
    p.set_defaults(handler=_run_verify_identity)

    p = sub.add_parser("compat", help="compatibility verdict for a pair of derivations")
    p.add_argument("--d1", required=True)
    p.add_argument("--d2", required=True)
    p.add_argument("-d", "--degree", type=int, required=True)
    p.add_argument("--candidate", action="append", default=[],
                   help="candidate principal-ideal generator (repeatable)")
    common(p)
    p.set_defaults(handler=_run_compat)

    p = sub.add_parser("closure", help="Lie-closure span certificate")
    p.add_argument("--generators", help="file with one vector field per line")
    p.add_argument("--shear-family", type=int,
                   help="use the plane shear family at this degree")
    p.add_argument("--targets", help="file with one target field per line")
    p.add_argument("--monomial-targets", type=int,
                   help="target all monomial fields up to this degree")
    p.add_argument("-D", "--degree-cap", type=int, required=True)
    p.add_argument("--depth", type=int, default=density.DEFAULT_BRACKET_DEPTH)
    common(p)
    p.set_defaults(handler=_run_closure)

    p = sub.add_parser("codim2", help="vanishing-module certificate for a subvariety")
    p.add_argument("--ideal", help="JSON file with nvars and generators")
    p.add_argument("--gens", nargs="+", help="ideal generators inline")
    p.add_argument("-n", "--nvars", type=int)
    p.add_argument("-d", "--degree", type=int, required=True)
    p.add_argument("-D", "--degree-cap", type=int, default=None)
    p.add_argument("--depth", type=int, default=density.DEFAULT_BRACKET_DEPTH)
    common(p)
    p.set_defaults(handler=_run_codim2)

    p = sub.add_parser("sl-demo", help="random-point identity tests on determinant-1 matrices")
    p.add_argument("-n", type=int, default=2)
    p.add_argument("--trials", type=int, default=50)
    common(p)
    p.set_defaults(handler=_run_sl_demo)

    p = sub.add_parser("decompose", help="split a field into complete primitives")
    p.add_argument("--field", required=True)
    common(p)
    p.set_defaults(handler=_run_decompose)

    p = sub.add_parser("approx", help="flow approximation with a convergence report")
    p.add_argument("--field", help="autonomous field in bracket grammar")
    p.add_argument("--isotopy", help="JSON file with per-slice fields")
    p.add_argument("-T", "--time", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=1, help="time slices")
    p.add_argument("--substeps", default="8,16,32,64")
    p.add_argument("--radius", type=float, default=0.5)
    p.add_argument("--points", type=int, default=25)
    p.add_argument("--scheme", choices=["symmetric", "plain"], default="symmetric")
    p.add_argument("--save-sequence", help="write the finest automorphism sequence here")
    common(p)
    p.set_defaults(handler=_run_approx)

    p = sub.add_parser("basin", help="classify a grid under iteration")
    p.add_argument("--map", help="automorphism sequence JSON file")
    p.add_argument("--builtin", choices=["attracting-shears", "radial-contraction"])
    p.add_argument("--grid", help="grid spec JSON file")
    p.add_argument("--nu", type=int, default=200)
    p.add_argument("--nv", type=int, default=200)
    p.add_argument("--u", type=float, nargs=2, default=[-3.0, 3.0])
    p.add_argument("--v", type=float, nargs=2, default=[-3.0, 3.0])
    p.add_argument("--fixed-point", default="0,0")
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--attract-radius", type=float, default=1e-6)
    p.add_argument("--escape-radius", type=float, default=1e6)
    p.add_argument("--csv", required=True)
    p.add_argument("--pgm")
    common(p)
    p.set_defaults(handler=_run_basin)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.handler(args)
    except ShearKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
