"""Criteria engine: bracket-identity verifiers and span certificates.

The operations here turn the generation criteria for Lie algebras of
completely integrable polynomial vector fields into machine-checkable
objects.  Everything runs in the exact regime and every certificate is
one-sided: a success is an exact, replayable containment at a truncated
degree, a failure establishes nothing.

Conventions used throughout:

* a shear is f * d/dx_i with f independent of x_i; its bracket with a
  coordinate-multiplied shear spans coefficient ideals,
* compatibility of a pair (d1, d2) of derivations asks (i) that products
  of their kernels span an ideal and (ii) that some a in Ker d2 has
  d1(a) in Ker d1 minus zero,
* Lie-closure certificates record, for every basis element and every
  established target, an exact combination over the generators that can
  be replayed independently.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import ArityMismatch, PreconditionError, RegimeMismatch, ShearKitError
from .fields import (
    DEFAULT_NILPOTENCY_CAP,
    NilpotencyVerdict,
    VectorField,
    kernel_basis,
    nilpotency_report,
)
from .linalg import TrackedSpan, nullspace, rref
from .poly import MonomialBasis, Poly, grlex_key
from .scalars import Regime, Scalar
from . import serialize

__all__ = [
    "IdentityCheck",
    "verify_shear_identity",
    "verify_compat_identity",
    "ConditionOne",
    "ConditionTwo",
    "CompatibilityVerdict",
    "check_compatibility",
    "replay_compatibility",
    "LieClosureCertificate",
    "lie_closure",
    "replay_closure",
    "closure_from_json_dict",
    "shear_generator_family",
    "monomial_field_targets",
    "OrbitSpanReport",
    "orbit_span_closure",
    "isotropy_update",
    "determinant_poly",
    "matrix_variable",
    "sl_pair_derivations",
    "sample_sl_points",
    "VarietyCheck",
    "verify_on_variety",
    "DEFAULT_BRACKET_DEPTH",
]

DEFAULT_BRACKET_DEPTH = 6


# ---------------------------------------------------------------------------
# Identity verifiers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    """Exact verdict for one displayed bracket identity."""

    holds: bool
    residual: VectorField

    def __bool__(self) -> bool:
        return self.holds


def _require_exact(*polys: Poly) -> None:
    for p in polys:
        if p.regime is Regime.APPROX:
            raise RegimeMismatch("identity verification runs in the exact regime only")


def _check(residual: VectorField) -> IdentityCheck:
    return IdentityCheck(residual.is_zero(), residual)


def verify_shear_identity(f1: Poly, f2: Poly) -> IdentityCheck:
    """Check [f1 d1, x1 f2 d2] - [x1 f1 d1, f2 d2] = f1 f2 d2 exactly.

    Requires f1 in Ker d1 and f2 in Ker d2 (d_i the coordinate
    derivations); violations raise instead of producing a verdict.
    """
    _require_exact(f1, f2)
    if f1.nvars != f2.nvars:
        raise ArityMismatch("operands disagree on variable count")
    n = f1.nvars
    if n < 2:
        raise PreconditionError("the shear identity needs at least two variables")
    violations = []
    if not f1.partial(0).is_zero():
        violations.append("f1 must not depend on x1")
    if not f2.partial(1).is_zero():
        violations.append("f2 must not depend on x2")
    if violations:
        raise PreconditionError(violations)
    x1 = Poly.variable(n, 0)
    a = VectorField.monomial(n, 0, f1)
    b = VectorField.monomial(n, 1, x1 * f2)
    c = VectorField.monomial(n, 0, x1 * f1)
    d = VectorField.monomial(n, 1, f2)
    lhs = a.bracket(b) - c.bracket(d)
    rhs = VectorField.monomial(n, 1, f1 * f2)
    return _check(lhs - rhs)


def verify_compat_identity(
    d1: VectorField, d2: VectorField, a: Poly, f1: Poly, f2: Poly
) -> IdentityCheck:
    """Check [a f1 d1, f2 d2] - [f1 d1, a f2 d2] = -b f1 f2 d2 with b = d1(a)."""
    _require_exact(a, f1, f2)
    if len({d1.nvars, d2.nvars, a.nvars, f1.nvars, f2.nvars}) != 1:
        raise ArityMismatch("operands disagree on variable count")
    violations = []
    if not d1.apply(f1).is_zero():
        violations.append("f1 must lie in Ker d1")
    if not d2.apply(f2).is_zero():
        violations.append("f2 must lie in Ker d2")
    if not d2.apply(a).is_zero():
        violations.append("a must lie in Ker d2")
    b = d1.apply(a)
    if b.is_zero():
        violations.append("a must have degree exactly 1 with respect to d1 (d1(a) = 0)")
    elif not d1.apply(b).is_zero():
        violations.append("d1(a) must lie in Ker d1")
    if violations:
        raise PreconditionError(violations)
    lhs = d1.mul_poly(a * f1).bracket(d2.mul_poly(f2)) - d1.mul_poly(f1).bracket(
        d2.mul_poly(a * f2)
    )
    rhs = d2.mul_poly(b * f1 * f2).scale(Scalar.exact(-1))
    return _check(lhs - rhs)


# ---------------------------------------------------------------------------
# Compatibility checking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionOne:
    """Span(Ker d1 * Ker d2) versus an ideal, at truncated degree."""

    kind: str  # "full-span" | "ideal-found" | "not-established"
    degree: int
    witness_ideal: Poly | None = None

    @property
    def established(self) -> bool:
        return self.kind != "not-established"


@dataclass(frozen=True)
class ConditionTwo:
    """Degree-1 witness a in Ker d2 with b = d1(a) in Ker d1 minus zero."""

    kind: str  # "witness-found" | "not-established"
    a: Poly | None = None
    b: Poly | None = None

    @property
    def established(self) -> bool:
        return self.kind == "witness-found"


@dataclass(frozen=True)
class CompatibilityVerdict:
    nvars: int
    degree: int
    condition_one: ConditionOne
    condition_two: ConditionTwo
    product_span_dimension: int

    @property
    def established(self) -> bool:
        return self.condition_one.established and self.condition_two.established

    def to_json_dict(self) -> dict:
        doc = {
            "schema_version": serialize.SCHEMA_VERSION,
            "kind": "compatibility-verdict",
            "nvars": self.nvars,
            "degree": self.degree,
            "product_span_dimension": self.product_span_dimension,
            "condition_one": {
                "kind": self.condition_one.kind,
                "degree": self.condition_one.degree,
            },
            "condition_two": {"kind": self.condition_two.kind},
            "established": self.established,
        }
        if self.condition_one.witness_ideal is not None:
            doc["condition_one"]["witness_ideal"] = serialize.poly_to_text(
                self.condition_one.witness_ideal
            )
        if self.condition_two.a is not None:
            doc["condition_two"]["a"] = serialize.poly_to_text(self.condition_two.a)
            doc["condition_two"]["b"] = serialize.poly_to_text(self.condition_two.b)
        return doc


def _is_diagonal(field: VectorField) -> bool:
    """True when every component is zero or a scalar multiple of its own x_i."""
    n = field.nvars
    for i, comp in enumerate(field.components):
        if comp.is_zero():
            continue
        if len(comp.terms) != 1:
            return False
        (exp, _coeff), = comp.terms.items()
        expected = tuple(1 if j == i else 0 for j in range(n))
        if exp != expected:
            return False
    return True


def _poly_coords(p: Poly, basis: MonomialBasis) -> dict[int, Scalar]:
    return {basis.index_of(exp): coeff for exp, coeff in p.terms.items()}


def _echelon_polys(polys: Sequence[Poly], nvars: int) -> list[Poly]:
    """Canonical reduced basis of the span, rows by descending leading monomial."""
    monomials = sorted(
        {exp for p in polys for exp in p.terms}, key=grlex_key, reverse=True
    )
    index = {exp: i for i, exp in enumerate(monomials)}
    zero = Scalar.exact(0)
    rows = []
    for p in polys:
        row = [zero] * len(monomials)
        for exp, coeff in p.terms.items():
            row[index[exp]] = coeff
        rows.append(row)
    reduced, _pivots = rref(rows)
    out = []
    for row in reduced:
        terms = {
            monomials[i]: value for i, value in enumerate(row) if not value.is_zero()
        }
        out.append(Poly(nvars, terms))
    return out


def check_compatibility(
    d1: VectorField,
    d2: VectorField,
    degree: int,
    candidate_ideals: Sequence[Poly] = (),
    cap: int = DEFAULT_NILPOTENCY_CAP,
) -> CompatibilityVerdict:
    """One-sided compatibility verdict for a pair of derivations.

    d1 must be locally nilpotent; d2 locally nilpotent or diagonal.
    Condition (i) checks whether the pairwise products of the truncated
    kernels span every polynomial of degree <= degree (full span), or
    failing that, whether the principal ideal of a supplied candidate h
    is contained in the product span up to the bound.  Condition (ii)
    solves the linear conditions for a degree-1 witness exactly and
    returns the graded-lex-smallest one.
    """
    if d1.nvars != d2.nvars:
        raise ArityMismatch("derivations disagree on variable count")
    if degree < 0:
        raise ValueError("degree bound must be non-negative")
    report1 = nilpotency_report(d1, cap)
    if report1.verdict is not NilpotencyVerdict.NILPOTENT:
        raise PreconditionError(
            f"d1 must be locally nilpotent (verdict {report1.verdict.value})"
        )
    if not _is_diagonal(d2):
        report2 = nilpotency_report(d2, cap)
        if report2.verdict is not NilpotencyVerdict.NILPOTENT:
            raise PreconditionError(
                "d2 must be locally nilpotent or diagonal "
                f"(verdict {report2.verdict.value})"
            )
    n = d1.nvars
    basis = MonomialBasis(n, degree)
    ker1 = kernel_basis(d1, degree)
    ker2 = kernel_basis(d2, degree)

    span = TrackedSpan()
    for k1 in ker1:
        for k2 in ker2:
            product = k1 * k2
            if product.is_zero() or product.degree > degree:
                continue
            span.insert(_poly_coords(product, basis))

    if span.dimension == len(basis):
        condition_one = ConditionOne("full-span", degree)
    else:
        condition_one = ConditionOne("not-established", degree)
        for h in candidate_ideals:
            if h.is_zero() or h.degree > degree or h.regime is Regime.APPROX:
                continue
            h_deg = h.degree
            multiples_ok = True
            for exp in MonomialBasis(n, degree - h_deg):
                multiple = h * Poly.monomial(n, exp, Scalar.exact(1))
                if not span.contains(_poly_coords(multiple, basis)):
                    multiples_ok = False
                    break
            if multiples_ok:
                condition_one = ConditionOne("ideal-found", degree, h)
                break

    condition_two = _degree_one_witness(d1, ker2, n)
    return CompatibilityVerdict(n, degree, condition_one, condition_two, span.dimension)


def _degree_one_witness(d1: VectorField, ker2: Sequence[Poly], nvars: int) -> ConditionTwo:
    if not ker2:
        return ConditionTwo("not-established")
    images = [d1.apply(d1.apply(k)) for k in ker2]
    monomials = sorted({exp for p in images for exp in p.terms}, key=grlex_key)
    index = {exp: i for i, exp in enumerate(monomials)}
    zero = Scalar.exact(0)
    rows = [[zero] * len(ker2) for _ in monomials]
    for col, image in enumerate(images):
        for exp, coeff in image.terms.items():
            rows[index[exp]][col] = coeff
    candidates = []
    for vec in nullspace(rows, len(ker2)):
        a = Poly.zero(nvars)
        for coeff, k in zip(vec, ker2):
            if not coeff.is_zero():
                a = a + k.scale(coeff)
        if not a.is_zero():
            candidates.append(a)
    if not candidates:
        return ConditionTwo("not-established")
    for a in reversed(_echelon_polys(candidates, nvars)):
        b = d1.apply(a)
        if not b.is_zero():
            return ConditionTwo("witness-found", a, b)
    return ConditionTwo("not-established")


def replay_compatibility(
    verdict: CompatibilityVerdict, d1: VectorField, d2: VectorField
) -> bool:
    """Re-check every established piece of a compatibility verdict exactly."""
    ok = True
    two = verdict.condition_two
    if two.established:
        a, b = two.a, two.b
        ok = ok and d2.apply(a).is_zero()
        ok = ok and d1.apply(a) == b
        ok = ok and not b.is_zero()
        ok = ok and d1.apply(b).is_zero()
    one = verdict.condition_one
    if one.established:
        fresh = check_compatibility(
            d1,
            d2,
            verdict.degree,
            candidate_ideals=[one.witness_ideal] if one.witness_ideal else (),
        )
        ok = ok and fresh.condition_one.kind == one.kind
    return ok


# ---------------------------------------------------------------------------
# Lie-closure certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BasisRecord:
    """Provenance of one span basis element.

    The element equals ``scale * raw + sum(c_k * basis_k)`` where raw is
    either a generator or the bracket of two earlier basis elements.
    """

    source_kind: str  # "generator" | "bracket"
    left: int
    right: int | None
    scale: Scalar
    corrections: tuple[tuple[Scalar, int], ...]
    depth: int


@dataclass(frozen=True)
class TargetRecord:
    target: VectorField
    established: bool
    combination: tuple[tuple[Scalar, int], ...] | None
    reason: str = ""


@dataclass
class LieClosureCertificate:
    """Replayable record of a truncated Lie-closure computation."""

    nvars: int
    degree_cap: int
    depth_cap: int
    generators: list[VectorField]
    basis: list[BasisRecord]
    targets: list[TargetRecord]
    span_dimension: int
    bracket_depth_reached: int
    discarded_brackets: int

    @property
    def all_targets_established(self) -> bool:
        return all(t.established for t in self.targets)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": serialize.SCHEMA_VERSION,
            "kind": "lie-closure-certificate",
            "nvars": self.nvars,
            "degree_cap": self.degree_cap,
            "depth_cap": self.depth_cap,
            "generators": [serialize.field_to_text(g) for g in self.generators],
            "basis": [
                {
                    "source_kind": rec.source_kind,
                    "left": rec.left,
                    "right": rec.right,
                    "scale": serialize.scalar_to_text(rec.scale),
                    "corrections": serialize.combination_to_json(rec.corrections),
                    "depth": rec.depth,
                }
                for rec in self.basis
            ],
            "targets": [
                {
                    "field": serialize.field_to_text(t.target),
                    "established": t.established,
                    "combination": (
                        serialize.combination_to_json(t.combination)
                        if t.combination is not None
                        else None
                    ),
                    "reason": t.reason,
                }
                for t in self.targets
            ],
            "span_dimension": self.span_dimension,
            "bracket_depth_reached": self.bracket_depth_reached,
            "discarded_brackets": self.discarded_brackets,
        }


def closure_from_json_dict(doc: dict) -> LieClosureCertificate:
    nvars = doc["nvars"]
    generators = [serialize.field_from_text(g, nvars) for g in doc["generators"]]
    basis = [
        BasisRecord(
            rec["source_kind"],
            rec["left"],
            rec["right"],
            serialize.scalar_from_text(rec["scale"]),
            tuple(serialize.combination_from_json(rec["corrections"])),
            rec["depth"],
        )
        for rec in doc["basis"]
    ]
    targets = [
        TargetRecord(
            serialize.field_from_text(t["field"], nvars),
            t["established"],
            (
                tuple(serialize.combination_from_json(t["combination"]))
                if t["combination"] is not None
                else None
            ),
            t.get("reason", ""),
        )
        for t in doc["targets"]
    ]
    return LieClosureCertificate(
        nvars,
        doc["degree_cap"],
        doc["depth_cap"],
        generators,
        basis,
        targets,
        doc["span_dimension"],
        doc["bracket_depth_reached"],
        doc["discarded_brackets"],
    )


def _field_coords(field: VectorField, basis: MonomialBasis) -> dict[int, Scalar]:
    size = len(basis)
    out = {}
    for i, comp in enumerate(field.components):
        for exp, coeff in comp.terms.items():
            out[i * size + basis.index_of(exp)] = coeff
    return out


def lie_closure(
    generators: Sequence[VectorField],
    degree_cap: int,
    depth_cap: int = DEFAULT_BRACKET_DEPTH,
    targets: Sequence[VectorField] = (),
) -> LieClosureCertificate:
    """Close the linear span of the generators under brackets, with caps.

    Brackets whose coefficient degree exceeds `degree_cap` are discarded
    (counted in the certificate), so failure to establish a target is
    uninformative.  Every basis element and every established target
    records an exact combination over the generators.
    """
    generators = list(generators)
    if not generators:
        raise PreconditionError("lie_closure needs at least one generator")
    nvars = generators[0].nvars
    for gen in generators:
        if gen.nvars != nvars:
            raise ArityMismatch("generators disagree on variable count")
        if gen.regime is Regime.APPROX:
            raise RegimeMismatch("lie_closure runs in the exact regime only")
        if gen.degree > degree_cap:
            raise PreconditionError(
                f"generator {gen} exceeds the coefficient degree cap {degree_cap}"
            )
    basis = MonomialBasis(nvars, degree_cap)
    span = TrackedSpan()
    fields: list[VectorField] = []
    records: list[BasisRecord] = []
    discarded = 0

    def insert(raw: VectorField, kind: str, left: int, right: int | None, depth: int) -> bool:
        row = span.insert(_field_coords(raw, basis), source=(kind, left, right))
        if row is None:
            return False
        scale = span.scales[row]
        corrections = tuple(span.corrections[row])
        combined = raw.scale(scale)
        for coeff, idx in corrections:
            combined = combined + fields[idx].scale(coeff)
        fields.append(combined)
        records.append(BasisRecord(kind, left, right, scale, corrections, depth))
        return True

    for k, gen in enumerate(generators):
        if gen.is_zero():
            continue
        insert(gen, "generator", k, None, 0)

    frontier = list(range(len(fields)))
    while frontier:
        round_start = len(fields)
        for j in frontier:
            depth_j = records[j].depth
            deg_j = fields[j].degree
            for i in range(j):
                depth = max(records[i].depth, depth_j) + 1
                if depth > depth_cap:
                    continue
                if fields[i].degree + deg_j - 1 > degree_cap:
                    discarded += 1
                    continue
                bracket = fields[i].bracket(fields[j])
                if bracket.is_zero():
                    continue
                if bracket.degree > degree_cap:
                    discarded += 1
                    continue
                insert(bracket, "bracket", i, j, depth)
        frontier = list(range(round_start, len(fields)))

    depth_reached = max((rec.depth for rec in records), default=0)

    target_records = []
    for target in targets:
        if target.nvars != nvars:
            raise ArityMismatch("target disagrees on variable count")
        if target.regime is Regime.APPROX:
            raise RegimeMismatch("targets must be exact")
        if target.degree > degree_cap:
            target_records.append(
                TargetRecord(target, False, None, "target degree exceeds the cap")
            )
            continue
        remainder, combo = span.reduce(_field_coords(target, basis))
        if remainder:
            target_records.append(
                TargetRecord(target, False, None, "not in the truncated span")
            )
        else:
            target_records.append(TargetRecord(target, True, tuple(combo)))

    return LieClosureCertificate(
        nvars,
        degree_cap,
        depth_cap,
        generators,
        records,
        target_records,
        len(fields),
        depth_reached,
        discarded,
    )


def replay_closure(cert: LieClosureCertificate) -> bool:
    """Rebuild every basis element and established target from the record.

    Returns True iff every recorded combination reproduces its field
    exactly (zero residual).
    """
    fields: list[VectorField] = []
    for rec in cert.basis:
        if rec.source_kind == "generator":
            raw = cert.generators[rec.left]
        elif rec.source_kind == "bracket":
            raw = fields[rec.left].bracket(fields[rec.right])
        else:
            return False
        combined = raw.scale(rec.scale)
        for coeff, idx in rec.corrections:
            if idx >= len(fields):
                return False
            combined = combined + fields[idx].scale(coeff)
        if combined.degree > cert.degree_cap:
            return False
        fields.append(combined)
    if len(fields) != cert.span_dimension:
        return False
    for record in cert.targets:
        if not record.established:
            continue
        total = VectorField.zero(cert.nvars)
        for coeff, idx in record.combination:
            total = total + fields[idx].scale(coeff)
        if not (total - record.target).is_zero():
            return False
    return True


def shear_generator_family(degree: int, nvars: int = 2) -> list[VectorField]:
    """The family {f d/dx_i, x_i f d/dx_i} with monomial f in Ker d/dx_i.

    Only generators whose coefficient degree fits under `degree` are
    emitted, so the family is directly usable as lie_closure input with
    degree_cap = degree.
    """
    if nvars < 2:
        raise PreconditionError("the shear family needs at least two variables")
    gens = []
    for i in range(nvars):
        kernel_exponents = [
            exp for exp in MonomialBasis(nvars, degree) if exp[i] == 0
        ]
        for exp in kernel_exponents:
            f = Poly.monomial(nvars, exp, Scalar.exact(1))
            gens.append(VectorField.monomial(nvars, i, f))
            if sum(exp) + 1 <= degree:
                lifted = f * Poly.variable(nvars, i)
                gens.append(VectorField.monomial(nvars, i, lifted))
    return gens


def monomial_field_targets(nvars: int, degree: int) -> list[VectorField]:
    """All monomial fields m * d/dx_i with deg m <= degree."""
    targets = []
    for i in range(nvars):
        for exp in MonomialBasis(nvars, degree):
            targets.append(
                VectorField.monomial(nvars, i, Poly.monomial(nvars, exp, Scalar.exact(1)))
            )
    return targets


# ---------------------------------------------------------------------------
# Orbit span closure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitSpanReport:
    """Smallest subspace containing the seeds and invariant under the maps."""

    dimension: int
    ambient_dimension: int
    full: bool
    basis: tuple[tuple[Scalar, ...], ...]
    seed_count: int
    map_count: int


def orbit_span_closure(
    seeds: Sequence[Sequence[Scalar]], maps: Sequence[Sequence[Sequence[Scalar]]]
) -> OrbitSpanReport:
    """Close span(seeds) under the given linear maps, to a fixpoint."""
    seeds = [list(v) for v in seeds]
    if not seeds:
        raise PreconditionError("orbit_span_closure needs at least one seed vector")
    n = len(seeds[0])
    for v in seeds:
        if len(v) != n:
            raise ArityMismatch("seed vectors disagree on dimension")
    matrices = [[list(row) for row in m] for m in maps]
    for m in matrices:
        if len(m) != n or any(len(row) != n for row in m):
            raise ArityMismatch("linear maps must be square of matching dimension")

    span = TrackedSpan()
    dense: list[list[Scalar]] = []

    def insert(vec: list[Scalar]) -> bool:
        coords = {i: v for i, v in enumerate(vec) if not v.is_zero()}
        if not coords:
            return False
        if span.insert(coords) is None:
            return False
        dense.append(vec)
        return True

    for v in seeds:
        insert(v)
    cursor = 0
    while cursor < len(dense):
        vec = dense[cursor]
        cursor += 1
        for m in matrices:
            image = [
                sum((m[i][j] * vec[j] for j in range(n)), Scalar.exact(0))
                for i in range(n)
            ]
            insert(image)

    reduced, _ = rref(dense) if dense else ([], [])
    basis = tuple(tuple(row) for row in reduced)
    return OrbitSpanReport(
        dimension=span.dimension,
        ambient_dimension=n,
        full=span.dimension == n,
        basis=basis,
        seed_count=len(seeds),
        map_count=len(matrices),
    )


def isotropy_update(df: Sequence[Scalar], direction: Sequence[Scalar]) -> list[list[Scalar]]:
    """The linearized flow action w -> w + df(w) * direction as a matrix."""
    n = len(direction)
    if len(df) != n:
        raise ArityMismatch("differential and direction disagree on dimension")
    one = Scalar.exact(1)
    zero = Scalar.exact(0)
    return [
        [
            (one if i == j else zero) + direction[i] * df[j]
            for j in range(n)
        ]
        for i in range(n)
    ]


# ---------------------------------------------------------------------------
# Random-point identity testing on the special linear group
# ---------------------------------------------------------------------------


def matrix_variable(n: int, row: int, col: int) -> Poly:
    """The coordinate c_{row,col} (0-based) on the space of n x n matrices."""
    return Poly.variable(n * n, row * n + col)


def determinant_poly(n: int) -> Poly:
    """Determinant as a polynomial on the n^2 matrix entries."""
    import itertools

    nvars = n * n
    terms: dict[tuple[int, ...], Scalar] = {}
    for perm in itertools.permutations(range(n)):
        inversions = sum(
            1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j]
        )
        sign = Scalar.exact(-1 if inversions % 2 else 1)
        exp = [0] * nvars
        for row, col in enumerate(perm):
            exp[row * n + col] += 1
        terms[tuple(exp)] = sign
    return Poly(nvars, terms)


def sl_pair_derivations(n: int) -> tuple[VectorField, VectorField]:
    """The row-shear derivations d1(c_{1j}) = c_{nj} and d2(c_{nj}) = c_{1j}.

    Written on the ambient matrix space; both are tangent to the
    determinant-1 subvariety.
    """
    if n < 2:
        raise PreconditionError("the special linear demo needs n >= 2")
    nvars = n * n
    comps1 = [Poly.zero(nvars)] * nvars
    comps2 = [Poly.zero(nvars)] * nvars
    for j in range(n):
        comps1[0 * n + j] = matrix_variable(n, n - 1, j)
        comps2[(n - 1) * n + j] = matrix_variable(n, 0, j)
    return VectorField(comps1), VectorField(comps2)


def _exact_det(entries: list[list[Scalar]]) -> Scalar:
    n = len(entries)
    if n == 1:
        return entries[0][0]
    total = Scalar.exact(0)
    sign = Scalar.exact(1)
    for col in range(n):
        minor = [row[:col] + row[col + 1 :] for row in entries[1:]]
        total = total + sign * entries[0][col] * _exact_det(minor)
        sign = -sign
    return total


def sample_sl_points(n: int, count: int, seed: int = 1729) -> list[tuple[Scalar, ...]]:
    """Exact Gaussian-rational matrices of determinant one, flattened row-major.

    Entries are drawn as small Gaussian integers and entry (1,1) is then
    solved for via its cofactor; draws with a vanishing cofactor are
    retried.
    """
    if n < 2:
        raise PreconditionError("n must be at least 2")
    rng = random.Random(seed)
    points = []
    attempts = 0
    limit = max(200, count * 200)
    while len(points) < count:
        attempts += 1
        if attempts > limit:
            raise ShearKitError("exhausted retries while sampling determinant-1 points")
        entries = [
            [
                Scalar.exact(rng.randint(-3, 3), rng.randint(-1, 1))
                for _ in range(n)
            ]
            for _ in range(n)
        ]
        minor = [row[1:] for row in entries[1:]]
        cofactor = _exact_det(minor)
        if cofactor.is_zero():
            continue
        zeroed = [row[:] for row in entries]
        zeroed[0][0] = Scalar.exact(0)
        rest = _exact_det(zeroed)
        entries[0][0] = (Scalar.exact(1) - rest) / cofactor
        assert (_exact_det(entries) - Scalar.exact(1)).is_zero()
        points.append(tuple(value for row in entries for value in row))
    return points


@dataclass(frozen=True)
class VarietyCheck:
    """Sampled-evaluation verdict; evidence, not a proof."""

    holds_on_samples: bool
    points_tested: int
    failures: tuple[tuple[int, int], ...]
    note: str = (
        "verified by exact evaluation at sampled variety points; "
        "this is randomized identity-testing evidence, not a proof"
    )


def verify_on_variety(
    lhs: VectorField,
    rhs: VectorField,
    ideal_generators: Sequence[Poly],
    points: Sequence[Sequence[Scalar]],
) -> VarietyCheck:
    """Evaluate lhs - rhs at sampled points of the variety, exactly."""
    if lhs.nvars != rhs.nvars:
        raise ArityMismatch("fields disagree on variable count")
    for p_idx, point in enumerate(points):
        for g_idx, gen in enumerate(ideal_generators):
            if not gen.evaluate(point).is_zero():
                raise PreconditionError(
                    f"point {p_idx} does not annihilate ideal generator {g_idx}"
                )
    diff = lhs - rhs
    failures = []
    for p_idx, point in enumerate(points):
        for c_idx, comp in enumerate(diff.components):
            if not comp.evaluate(point).is_zero():
                failures.append((p_idx, c_idx))
    return VarietyCheck(not failures, len(points), tuple(failures))


