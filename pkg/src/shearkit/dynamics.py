"""Numeric flow approximation by compositions of exactly integrable maps.

Any polynomial field decomposes into primitives whose flows are known in
closed form: shears (coefficient free of the flow direction) integrate
to x_i += t*f, coordinate-multiplied shears integrate to the entire map
x_i *= exp(t*f), and diagonal fields to coordinate scalings.  A field
component c*x^a*d/dx_i whose coefficient involves x_i is not itself
integrable in this sense, but it is the value of the bracket identity

    [f1 dj, xj f2 di] - [xj f1 dj, f2 di] = f1 f2 di

on four integrable factors, so its flow can be approximated by group
commutators of exact elementary automorphisms.  Splitting those steps
over m substeps and measuring against an independent Runge-Kutta oracle
quantifies the approximation; iterating an attracting composition
samples its basin, a Fatou-Bieberbach style domain.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ArityMismatch, PreconditionError, RegimeMismatch
from .fields import VectorField
from .poly import Poly, grlex_key
from .scalars import Regime, Scalar
from . import serialize

__all__ = [
    "ShearFlow",
    "OvershearFlow",
    "DiagonalFlow",
    "AutoSeq",
    "Shear",
    "BracketPair",
    "decompose_field",
    "primitive_target",
    "commutator_step",
    "trotter_compose",
    "approximate_isotopy",
    "ConvergenceReport",
    "measure_convergence",
    "trotter_convergence_report",
    "integrate_flow",
    "sample_ball",
    "fit_loglog_slope",
    "GridSpec",
    "BasinResult",
    "basin_sample",
    "attracting_shear_composition",
    "radial_contraction",
    "autoseq_to_json_dict",
    "autoseq_from_json_dict",
    "DEFAULT_SEED",
]

DEFAULT_SEED = 1729


# ---------------------------------------------------------------------------
# Elementary exactly-integrable automorphisms
# ---------------------------------------------------------------------------


def _shear_coefficient(axis: int, coeff: Poly) -> Poly:
    if not coeff.partial(axis).is_zero():
        raise PreconditionError(
            f"shear coefficient must not depend on x{axis + 1}"
        )
    return coeff


def _time_complex(time) -> complex:
    return time.to_complex() if isinstance(time, Scalar) else complex(time)


@dataclass(frozen=True)
class ShearFlow:
    """Exact time-t flow of coeff * d/dx_axis with coeff free of x_axis.

    The time is a complex number in the numeric pipeline; an exact
    Scalar time makes the whole flow evaluable without rounding through
    apply_exact.
    """

    axis: int
    coeff: Poly
    time: "complex | Scalar"

    def __post_init__(self):
        _shear_coefficient(self.axis, self.coeff)

    def apply(self, point: tuple[complex, ...]) -> tuple[complex, ...]:
        out = list(point)
        out[self.axis] = out[self.axis] + _time_complex(self.time) * self.coeff.eval_complex(point)
        return tuple(out)

    def apply_array(self, points: np.ndarray) -> np.ndarray:
        out = points.copy()
        out[self.axis] += _time_complex(self.time) * _eval_poly_array(self.coeff, points)
        return out

    def apply_exact(self, point: Sequence[Scalar], time: Scalar) -> tuple[Scalar, ...]:
        out = list(point)
        out[self.axis] = out[self.axis] + time * self.coeff.evaluate(point)
        return tuple(out)

    def inverse(self) -> "ShearFlow":
        return ShearFlow(self.axis, self.coeff, -self.time)


@dataclass(frozen=True)
class OvershearFlow:
    """Exact flow of x_axis * coeff * d/dx_axis: multiplies x_axis by exp(t*coeff).

    The field is completely integrable but not locally nilpotent, so its
    flow is entire holomorphic rather than polynomial.
    """

    axis: int
    coeff: Poly
    time: complex

    def __post_init__(self):
        _shear_coefficient(self.axis, self.coeff)

    def apply(self, point: tuple[complex, ...]) -> tuple[complex, ...]:
        out = list(point)
        out[self.axis] = out[self.axis] * cmath.exp(
            self.time * self.coeff.eval_complex(point)
        )
        return tuple(out)

    def apply_array(self, points: np.ndarray) -> np.ndarray:
        out = points.copy()
        out[self.axis] *= np.exp(self.time * _eval_poly_array(self.coeff, points))
        return out

    def inverse(self) -> "OvershearFlow":
        return OvershearFlow(self.axis, self.coeff, -self.time)


@dataclass(frozen=True)
class DiagonalFlow:
    """Coordinate scaling x_i -> factor**weights[i] * x_i."""

    weights: tuple[int, ...]
    factor: complex

    def __post_init__(self):
        if self.factor == 0:
            raise PreconditionError("diagonal flow needs a nonzero factor")

    def apply(self, point: tuple[complex, ...]) -> tuple[complex, ...]:
        return tuple(z * self.factor**w for z, w in zip(point, self.weights))

    def apply_array(self, points: np.ndarray) -> np.ndarray:
        scales = np.array([self.factor**w for w in self.weights])
        return points * scales[:, None]

    def inverse(self) -> "DiagonalFlow":
        return DiagonalFlow(self.weights, 1.0 / self.factor)


ElementaryFlow = ShearFlow | OvershearFlow | DiagonalFlow


def _eval_poly_array(poly: Poly, points: np.ndarray) -> np.ndarray:
    """Evaluate at a batch of points, shape (nvars, npoints)."""
    total = np.zeros(points.shape[1], dtype=complex)
    for exp, coeff in poly.terms.items():
        term = np.full(points.shape[1], coeff.to_complex())
        for i, e in enumerate(exp):
            if e:
                term = term * points[i] ** e
        total += term
    return total


class AutoSeq:
    """Composition of elementary automorphisms, evaluated right to left.

    `elements[0]` is the outermost factor (applied last).  Every element
    carries its exact inverse; reversing and inverting the list yields
    the exact inverse sequence.
    """

    __slots__ = ("nvars", "elements")

    def __init__(self, nvars: int, elements: Sequence[ElementaryFlow]):
        self.nvars = nvars
        self.elements = tuple(elements)

    @classmethod
    def from_application_order(
        cls, nvars: int, steps: Sequence[ElementaryFlow]
    ) -> "AutoSeq":
        return cls(nvars, tuple(reversed(list(steps))))

    def __len__(self) -> int:
        return len(self.elements)

    def apply(self, point: Sequence[complex]) -> tuple[complex, ...]:
        z = tuple(complex(v) for v in point)
        if len(z) != self.nvars:
            raise ArityMismatch(f"point has {len(z)} coordinates, expected {self.nvars}")
        for element in reversed(self.elements):
            z = element.apply(z)
        return z

    def apply_array(self, points: np.ndarray) -> np.ndarray:
        if points.shape[0] != self.nvars:
            raise ArityMismatch("point array has the wrong leading dimension")
        out = points
        for element in reversed(self.elements):
            out = element.apply_array(out)
        return out

    def apply_exact(self, point: Sequence[Scalar]) -> tuple[Scalar, ...]:
        """Exact evaluation; requires every element to be a shear with exact data."""
        z = tuple(point)
        for element in reversed(self.elements):
            if not isinstance(element, ShearFlow):
                raise RegimeMismatch("exact evaluation supports shear elements only")
            t = element.time
            if isinstance(t, Scalar):
                time = t
            elif isinstance(t, complex) or isinstance(t, float):
                raise RegimeMismatch("exact evaluation needs exact times")
            else:
                time = Scalar.exact(t)
            z = element.apply_exact(z, time)
        return z

    def inverse(self) -> "AutoSeq":
        return AutoSeq(
            self.nvars, tuple(e.inverse() for e in reversed(self.elements))
        )

    def then(self, outer: "AutoSeq") -> "AutoSeq":
        """The composition outer o self."""
        if outer.nvars != self.nvars:
            raise ArityMismatch("composed sequences disagree on variable count")
        return AutoSeq(self.nvars, outer.elements + self.elements)

    def __repr__(self) -> str:
        return f"AutoSeq(nvars={self.nvars}, {len(self.elements)} factors)"


def autoseq_to_json_dict(seq: AutoSeq) -> dict:
    elements = []
    for element in seq.elements:
        if isinstance(element, ShearFlow):
            t = _time_complex(element.time)
            elements.append(
                {
                    "kind": "shear",
                    "axis": element.axis + 1,
                    "coeff": serialize.poly_to_text(element.coeff),
                    "time": [t.real, t.imag],
                }
            )
        elif isinstance(element, OvershearFlow):
            t = complex(element.time)
            elements.append(
                {
                    "kind": "overshear",
                    "axis": element.axis + 1,
                    "coeff": serialize.poly_to_text(element.coeff),
                    "time": [t.real, t.imag],
                }
            )
        elif isinstance(element, DiagonalFlow):
            f = complex(element.factor)
            elements.append(
                {
                    "kind": "diagonal",
                    "weights": list(element.weights),
                    "factor": [f.real, f.imag],
                }
            )
        else:
            raise TypeError(f"unknown element {element!r}")
    return {
        "schema_version": serialize.SCHEMA_VERSION,
        "kind": "autoseq",
        "nvars": seq.nvars,
        "elements": elements,
    }


def autoseq_from_json_dict(doc: dict) -> AutoSeq:
    nvars = doc["nvars"]
    elements: list[ElementaryFlow] = []
    for entry in doc["elements"]:
        kind = entry["kind"]
        if kind == "shear":
            elements.append(
                ShearFlow(
                    entry["axis"] - 1,
                    serialize.poly_from_text(entry["coeff"], nvars),
                    complex(entry["time"][0], entry["time"][1]),
                )
            )
        elif kind == "overshear":
            elements.append(
                OvershearFlow(
                    entry["axis"] - 1,
                    serialize.poly_from_text(entry["coeff"], nvars),
                    complex(entry["time"][0], entry["time"][1]),
                )
            )
        elif kind == "diagonal":
            elements.append(
                DiagonalFlow(
                    tuple(entry["weights"]),
                    complex(entry["factor"][0], entry["factor"][1]),
                )
            )
        else:
            raise ValueError(f"unknown element kind {kind!r}")
    return AutoSeq(nvars, elements)


# ---------------------------------------------------------------------------
# Decomposition into complete primitives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Shear:
    """Primitive f * d/dx_axis with f free of x_axis; its flow is exact."""

    axis: int
    coeff: Poly

    def __post_init__(self):
        _shear_coefficient(self.axis, self.coeff)


@dataclass(frozen=True)
class BracketPair:
    """Primitive realizing f1*f2*d/dx_axis as a difference of two brackets.

    The four integrable factor fields are f1 d/dx_aux, x_aux f2 d/dx_axis,
    x_aux f1 d/dx_aux and f2 d/dx_axis; the identity

        [f1 dj, xj f2 di] - [xj f1 dj, f2 di] = f1 f2 di

    is re-verified exactly at construction time.
    """

    axis: int
    aux: int
    f1: Poly
    f2: Poly

    def __post_init__(self):
        if self.axis == self.aux:
            raise PreconditionError("bracket pair needs a distinct auxiliary direction")
        if not self.f1.partial(self.aux).is_zero():
            raise PreconditionError("f1 must not depend on the auxiliary variable")
        if not self.f2.partial(self.axis).is_zero():
            raise PreconditionError("f2 must not depend on the target variable")
        n = self.f1.nvars
        xj = Poly.variable(n, self.aux)
        lhs = VectorField.monomial(n, self.aux, self.f1).bracket(
            VectorField.monomial(n, self.axis, xj * self.f2)
        ) - VectorField.monomial(n, self.aux, xj * self.f1).bracket(
            VectorField.monomial(n, self.axis, self.f2)
        )
        rhs = VectorField.monomial(n, self.axis, self.f1 * self.f2)
        if not (lhs - rhs).is_zero():
            raise PreconditionError("bracket-pair identity failed to verify")


CompletePrimitive = Shear | BracketPair


def primitive_target(primitive: CompletePrimitive, nvars: int) -> VectorField:
    """The field a primitive stands for."""
    if isinstance(primitive, Shear):
        return VectorField.monomial(nvars, primitive.axis, primitive.coeff)
    return VectorField.monomial(nvars, primitive.axis, primitive.f1 * primitive.f2)


def decompose_field(field: VectorField) -> list[CompletePrimitive]:
    """Split a field, monomial by monomial, into complete primitives.

    A monomial c*x^a*d/dx_i with a_i = 0 is already a shear.  Otherwise
    the smallest auxiliary index j != i is used: f2 = xj^{a_j} and
    f1 = c*x^a / xj^{a_j} give a BracketPair whose identity target is
    the monomial.  The targets sum to the field exactly.
    """
    n = field.nvars
    if n < 2:
        raise PreconditionError("decomposition needs at least two variables")
    if field.regime is Regime.APPROX:
        raise RegimeMismatch("decompose_field runs on exact fields")
    primitives: list[CompletePrimitive] = []
    for i, comp in enumerate(field.components):
        for exp in sorted(comp.terms, key=grlex_key):
            coeff = comp.terms[exp]
            if exp[i] == 0:
                primitives.append(Shear(i, Poly.monomial(n, exp, coeff)))
                continue
            j = min(k for k in range(n) if k != i)
            f2 = Poly.monomial(
                n, tuple(exp[k] if k == j else 0 for k in range(n)), Scalar.exact(1)
            )
            f1 = Poly.monomial(
                n, tuple(0 if k == j else exp[k] for k in range(n)), coeff
            )
            primitives.append(BracketPair(i, j, f1, f2))
    return primitives


# ---------------------------------------------------------------------------
# Splitting schemes
# ---------------------------------------------------------------------------


def _factor_flow(axis: int, coeff: Poly, time: complex, overshear: bool) -> ElementaryFlow:
    if overshear:
        return OvershearFlow(axis, coeff, time)
    return ShearFlow(axis, coeff, time)


def _classify_integrable(field: VectorField) -> tuple[int, Poly, bool]:
    """Recognize f*d/dx_i (shear) or x_i*f*d/dx_i (overshear), exactly.

    Returns (axis, f, is_overshear); anything else is rejected, since no
    exact elementary flow is available for it.
    """
    nonzero = [i for i, c in enumerate(field.components) if not c.is_zero()]
    if len(nonzero) != 1:
        raise PreconditionError("not an elementary integrable field (one component expected)")
    axis = nonzero[0]
    coeff = field.components[axis]
    if coeff.partial(axis).is_zero():
        return axis, coeff, False
    # try the overshear shape x_axis * f with f free of x_axis
    lowered = {}
    for exp, value in coeff.terms.items():
        if exp[axis] != 1:
            raise PreconditionError(
                "not an elementary integrable field (coefficient must be free of "
                "its direction variable or linear in it)"
            )
        new_exp = list(exp)
        new_exp[axis] = 0
        lowered[tuple(new_exp)] = value
    return axis, Poly(field.nvars, lowered), True


def _commutator_factors(
    a_field: VectorField, b_field: VectorField, a_time: complex
) -> list[ElementaryFlow]:
    """Group-commutator factors approximating exp(a^2 [A, B]) as a map.

    Flows compose anti-homomorphically with the field bracket (pulling
    back functions reverses products), so the map realizing the field
    bracket [A, B] applies the flows in the order A(-a), B(-a), A(a),
    B(a); the returned list is in application order.
    """
    ax_a, f_a, over_a = _classify_integrable(a_field)
    ax_b, f_b, over_b = _classify_integrable(b_field)
    return [
        _factor_flow(ax_a, f_a, -a_time, over_a),
        _factor_flow(ax_b, f_b, -a_time, over_b),
        _factor_flow(ax_a, f_a, a_time, over_a),
        _factor_flow(ax_b, f_b, a_time, over_b),
    ]


def commutator_step(a_field: VectorField, b_field: VectorField, s: float) -> AutoSeq:
    """Group-commutator fragment approximating exp(s*[A, B]).

    Both inputs must be exactly integrable elementary fields (shears or
    coordinate-multiplied shears).  The four factors use time sqrt(s),
    so the local error is of order s**(3/2).
    """
    if s < 0:
        raise PreconditionError("commutator_step takes a non-negative time")
    nvars = a_field.nvars
    if nvars != b_field.nvars:
        raise ArityMismatch("fields disagree on variable count")
    a = math.sqrt(s)
    return AutoSeq.from_application_order(
        nvars, _commutator_factors(a_field, b_field, a)
    )


def _bracket_pair_fields(primitive: BracketPair, nvars: int):
    xj = Poly.variable(nvars, primitive.aux)
    a1 = VectorField.monomial(nvars, primitive.aux, primitive.f1)
    b1 = VectorField.monomial(nvars, primitive.axis, xj * primitive.f2)
    a2 = VectorField.monomial(nvars, primitive.aux, xj * primitive.f1)
    b2 = VectorField.monomial(nvars, primitive.axis, primitive.f2)
    return a1, b1, a2, b2


def _primitive_step(
    primitive: CompletePrimitive, nvars: int, dt: float, scheme: str
) -> list[ElementaryFlow]:
    """Application-ordered factors advancing one primitive by time dt."""
    if isinstance(primitive, Shear):
        return [ShearFlow(primitive.axis, primitive.coeff, dt)]
    a1, b1, a2, b2 = _bracket_pair_fields(primitive, nvars)
    if scheme == "plain":
        a = cmath.sqrt(dt)
        # exp(dt [A1,B1]) then exp(-dt [A2,B2]) = exp(dt [B2,A2])
        return _commutator_factors(b2, a2, a) + _commutator_factors(a1, b1, a)
    if scheme == "symmetric":
        a = cmath.sqrt(dt / 2.0)
        # each palindromic pair K(a) K(-a) cancels the order-s^{3/2} term
        return (
            _commutator_factors(b2, a2, -a)
            + _commutator_factors(b2, a2, a)
            + _commutator_factors(a1, b1, -a)
            + _commutator_factors(a1, b1, a)
        )
    raise ValueError(f"unknown splitting scheme {scheme!r}")


def trotter_compose(
    primitives: Sequence[CompletePrimitive],
    nvars: int,
    total_time: float,
    steps: int,
    scheme: str = "symmetric",
) -> AutoSeq:
    """Compose elementary steps (product over primitives)**steps.

    Shear primitives contribute their exact flows; bracket pairs are
    realized by group commutators at each substep.  The symmetric scheme
    pairs each commutator with its time-reversed copy, which restores
    first-order accuracy in the step count; the plain scheme uses single
    commutators and converges like steps**(-1/2).
    """
    if steps < 1:
        raise PreconditionError("steps must be at least 1")
    dt = total_time / steps
    per_step: list[ElementaryFlow] = []
    for primitive in primitives:
        per_step.extend(_primitive_step(primitive, nvars, dt, scheme))
    return AutoSeq.from_application_order(nvars, per_step * steps)


# ---------------------------------------------------------------------------
# Error measurement against an independent oracle
# ---------------------------------------------------------------------------


def sample_ball(nvars: int, radius: float, count: int, seed: int = DEFAULT_SEED) -> list[tuple[complex, ...]]:
    """Deterministic sample of points in the complex ball of given radius."""
    rng = np.random.default_rng(seed)
    points = []
    for _ in range(count):
        raw = rng.standard_normal(2 * nvars)
        norm = float(np.linalg.norm(raw))
        if norm == 0:
            raw = np.ones(2 * nvars)
            norm = float(np.linalg.norm(raw))
        shell = radius * float(rng.uniform()) ** (1.0 / (2 * nvars))
        scaled = raw / norm * shell
        points.append(tuple(complex(scaled[2 * i], scaled[2 * i + 1]) for i in range(nvars)))
    return points


def integrate_flow(
    field_at: Callable[[float], VectorField],
    start: Sequence[complex],
    total_time: float,
    tol: float = 1e-10,
    max_doublings: int = 16,
) -> tuple[complex, ...]:
    """Classical fixed-step fourth-order integration with Richardson control.

    The step count doubles until two successive endpoint estimates agree
    within tol; the finer answer is returned.  Independent of the
    composition pipeline by construction.
    """

    def rhs(t: float, z: np.ndarray) -> np.ndarray:
        return np.array(field_at(t).eval_complex(tuple(z)), dtype=complex)

    def run(steps: int) -> np.ndarray:
        z = np.array(start, dtype=complex)
        h = total_time / steps
        t = 0.0
        for _ in range(steps):
            k1 = rhs(t, z)
            k2 = rhs(t + h / 2, z + h / 2 * k1)
            k3 = rhs(t + h / 2, z + h / 2 * k2)
            k4 = rhs(t + h, z + h * k3)
            z = z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
        return z

    steps = 32
    previous = run(steps)
    for _ in range(max_doublings):
        steps *= 2
        current = run(steps)
        if float(np.max(np.abs(current - previous))) < tol:
            return tuple(current)
        previous = current
    return tuple(previous)


def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x); needs >= 3 points."""
    if len(xs) < 3 or len(xs) != len(ys):
        raise PreconditionError("slope fitting needs at least three matched samples")
    floor = 1e-300
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.maximum(np.asarray(ys, dtype=float), floor))
    slope, _intercept = np.polyfit(lx, ly, 1)
    return float(slope)


@dataclass(frozen=True)
class ConvergenceReport:
    """Max errors over fixed sample points, one entry per step count.

    `order` is the fitted decay exponent: error ~ step_count**(-order).
    """

    step_counts: tuple[int, ...]
    max_errors: tuple[float, ...]
    order: float
    radius: float
    sample_count: int
    seed: int

    @property
    def monotone_decreasing(self) -> bool:
        return all(a > b for a, b in zip(self.max_errors, self.max_errors[1:]))

    def to_json_dict(self) -> dict:
        return {
            "schema_version": serialize.SCHEMA_VERSION,
            "kind": "convergence-report",
            "step_counts": list(self.step_counts),
            "max_errors": list(self.max_errors),
            "order": self.order,
            "radius": self.radius,
            "sample_count": self.sample_count,
            "seed": self.seed,
        }


def measure_convergence(
    build: Callable[[int], AutoSeq],
    reference: Callable[[tuple[complex, ...]], tuple[complex, ...]],
    step_counts: Sequence[int],
    nvars: int,
    radius: float,
    sample_count: int = 25,
    seed: int = DEFAULT_SEED,
) -> ConvergenceReport:
    """Max-error report for a family of approximants against a reference map."""
    points = sample_ball(nvars, radius, sample_count, seed)
    truths = [reference(z) for z in points]
    errors = []
    for m in step_counts:
        seq = build(m)
        worst = 0.0
        for z, truth in zip(points, truths):
            approx = seq.apply(z)
            err = math.sqrt(
                sum(abs(a - b) ** 2 for a, b in zip(approx, truth))
            )
            worst = max(worst, err)
        errors.append(worst)
    order = -fit_loglog_slope(list(step_counts), errors)
    return ConvergenceReport(
        tuple(step_counts), tuple(errors), order, radius, sample_count, seed
    )


def trotter_convergence_report(
    field: VectorField,
    total_time: float,
    step_counts: Sequence[int],
    radius: float,
    sample_count: int = 25,
    seed: int = DEFAULT_SEED,
    scheme: str = "symmetric",
    reference: Callable[[tuple[complex, ...]], tuple[complex, ...]] | None = None,
) -> ConvergenceReport:
    """Convergence of the split composition for one autonomous field."""
    primitives = decompose_field(field)
    if reference is None:
        def reference(z):
            return integrate_flow(lambda _t: field, z, total_time)

    return measure_convergence(
        lambda m: trotter_compose(primitives, field.nvars, total_time, m, scheme),
        reference,
        step_counts,
        field.nvars,
        radius,
        sample_count,
        seed,
    )


def approximate_isotopy(
    field_at: Callable[[float], VectorField] | Sequence[VectorField],
    total_time: float,
    slices: int,
    substep_counts: Sequence[int],
    radius: float,
    sample_count: int = 25,
    seed: int = DEFAULT_SEED,
    scheme: str = "symmetric",
) -> tuple[AutoSeq, ConvergenceReport]:
    """Split a time-dependent field slice by slice into elementary steps.

    Each of the `slices` time slices uses the field sampled at its
    midpoint; the finest entry of `substep_counts` provides the returned
    sequence, and all entries feed the convergence report against the
    Runge-Kutta oracle.
    """
    if slices < 1:
        raise PreconditionError("slices must be at least 1")
    if not substep_counts:
        raise PreconditionError("at least one substep count is required")
    table: list[VectorField] | None = None
    if isinstance(field_at, Sequence):
        table = list(field_at)
        if len(table) != slices:
            raise ArityMismatch("field table length must equal the slice count")

        def field_fn(t: float) -> VectorField:
            index = min(int(t / total_time * slices), slices - 1)
            return table[index]

    else:
        field_fn = field_at

    dt_slice = total_time / slices
    midpoints = [(k + 0.5) * dt_slice for k in range(slices)]
    slice_fields = [field_fn(t) for t in midpoints]
    nvars = slice_fields[0].nvars
    slice_primitives = [decompose_field(f) for f in slice_fields]

    def build(m: int) -> AutoSeq:
        seq = AutoSeq(nvars, ())
        for primitives in slice_primitives:
            seq = seq.then(trotter_compose(primitives, nvars, dt_slice, m, scheme))
        return seq

    if table is not None:
        # a table means piecewise-constant data; integrate slice by slice
        # so the oracle never steps across a discontinuity
        def reference(z: tuple[complex, ...]) -> tuple[complex, ...]:
            current = z
            for slice_field in table:
                current = integrate_flow(
                    lambda _t, f=slice_field: f, current, dt_slice
                )
            return current

    else:
        def reference(z: tuple[complex, ...]) -> tuple[complex, ...]:
            return integrate_flow(field_fn, z, total_time)

    report = measure_convergence(
        build, reference, substep_counts, nvars, radius, sample_count, seed
    )
    return build(max(substep_counts)), report


# ---------------------------------------------------------------------------
# Basin sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """A two-real-parameter slice of complex n-space.

    Grid point (row, col) maps to origin + u*axis_u + v*axis_v with u
    running along columns and v along rows; axis vectors may be complex,
    so a complex coordinate line is the special case axis_v = i*axis_u.
    """

    origin: tuple[complex, ...]
    axis_u: tuple[complex, ...]
    axis_v: tuple[complex, ...]
    nu: int
    nv: int
    u_range: tuple[float, float]
    v_range: tuple[float, float]

    def __post_init__(self):
        n = len(self.origin)
        if len(self.axis_u) != n or len(self.axis_v) != n:
            raise ArityMismatch("grid axes disagree with the origin dimension")
        if self.nu < 0 or self.nv < 0:
            raise PreconditionError("grid sizes must be non-negative")

    def parameter(self, row: int, col: int) -> tuple[float, float]:
        u0, u1 = self.u_range
        v0, v1 = self.v_range
        u = u0 if self.nu <= 1 else u0 + (u1 - u0) * col / (self.nu - 1)
        v = v0 if self.nv <= 1 else v0 + (v1 - v0) * row / (self.nv - 1)
        return u, v

    def point(self, row: int, col: int) -> tuple[complex, ...]:
        u, v = self.parameter(row, col)
        return tuple(
            o + u * a + v * b
            for o, a, b in zip(self.origin, self.axis_u, self.axis_v)
        )

    @classmethod
    def real_plane(
        cls,
        nvars: int,
        nu: int,
        nv: int,
        u_range: tuple[float, float],
        v_range: tuple[float, float],
    ) -> "GridSpec":
        origin = (0j,) * nvars
        e1 = tuple(1 + 0j if i == 0 else 0j for i in range(nvars))
        e2 = tuple(1 + 0j if i == 1 else 0j for i in range(nvars))
        return cls(origin, e1, e2, nu, nv, u_range, v_range)

    def to_json_dict(self) -> dict:
        def vec(v):
            return [[z.real, z.imag] for z in v]

        return {
            "schema_version": serialize.SCHEMA_VERSION,
            "kind": "grid-spec",
            "origin": vec(self.origin),
            "axis_u": vec(self.axis_u),
            "axis_v": vec(self.axis_v),
            "nu": self.nu,
            "nv": self.nv,
            "u_range": list(self.u_range),
            "v_range": list(self.v_range),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "GridSpec":
        def vec(entries):
            return tuple(complex(a, b) for a, b in entries)

        return cls(
            vec(doc["origin"]),
            vec(doc["axis_u"]),
            vec(doc["axis_v"]),
            doc["nu"],
            doc["nv"],
            tuple(doc["u_range"]),
            tuple(doc["v_range"]),
        )


ATTRACTED, ESCAPED, UNDECIDED = "attracted", "escaped", "undecided"
_CLASS_CODES = {ATTRACTED: 255, UNDECIDED: 128, ESCAPED: 0}


@dataclass
class BasinResult:
    """Classification grid for iteration of an automorphism sequence."""

    grid: GridSpec
    fixed_point: tuple[complex, ...]
    classes: list[list[str]]
    iterations: list[list[int]]
    overflowed: list[list[bool]]
    attract_radius: float
    escape_radius: float
    max_iter: int
    spectral_radius_estimate: float
    contraction_warning: bool

    def counts(self) -> dict[str, int]:
        out = {ATTRACTED: 0, ESCAPED: 0, UNDECIDED: 0}
        for row in self.classes:
            for label in row:
                out[label] += 1
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("row,col,re,im,class,iters\n")
            for row in range(self.grid.nv):
                for col in range(self.grid.nu):
                    u, v = self.grid.parameter(row, col)
                    handle.write(
                        f"{row},{col},{u:.17g},{v:.17g},"
                        f"{self.classes[row][col]},{self.iterations[row][col]}\n"
                    )

    def write_pgm(self, path) -> None:
        header = f"P5\n{self.grid.nu} {self.grid.nv}\n255\n".encode("ascii")
        body = bytearray()
        for row in range(self.grid.nv):
            for col in range(self.grid.nu):
                body.append(_CLASS_CODES[self.classes[row][col]])
        with open(path, "wb") as handle:
            handle.write(header + bytes(body))


def _estimate_spectral_radius(
    seq: AutoSeq, fixed_point: tuple[complex, ...], h: float = 1e-6
) -> float:
    n = seq.nvars
    base = np.array(seq.apply(fixed_point))
    jac = np.zeros((n, n), dtype=complex)
    for j in range(n):
        bumped = list(fixed_point)
        bumped[j] += h
        jac[:, j] = (np.array(seq.apply(tuple(bumped))) - base) / h
    return float(np.max(np.abs(np.linalg.eigvals(jac))))


def basin_sample(
    seq: AutoSeq,
    fixed_point: Sequence[complex],
    grid: GridSpec,
    max_iter: int = 500,
    attract_radius: float = 1e-6,
    escape_radius: float = 1e6,
    fixed_point_tol: float = 1e-9,
) -> BasinResult:
    """Classify grid points by iterating the sequence.

    A point is Attracted once it enters the attract_radius ball around
    the fixed point, Escaped once it leaves the escape_radius ball or
    overflows (recorded with a flag), and Undecided at max_iter.  The
    result is deterministic for a fixed grid and thresholds.
    """
    fixed_point = tuple(complex(v) for v in fixed_point)
    if len(fixed_point) != seq.nvars:
        raise ArityMismatch("fixed point dimension disagrees with the sequence")
    moved = seq.apply(fixed_point)
    drift = math.sqrt(sum(abs(a - b) ** 2 for a, b in zip(moved, fixed_point)))
    if drift > fixed_point_tol:
        raise PreconditionError(
            f"supplied point moves by {drift:.3e} under the map; not a fixed point"
        )
    spectral = _estimate_spectral_radius(seq, fixed_point)
    warning = spectral >= 1.0
    if warning:
        import warnings

        warnings.warn(
            f"fixed point is not attracting (spectral radius estimate {spectral:.3f})",
            stacklevel=2,
        )

    nv, nu = grid.nv, grid.nu
    classes = [[UNDECIDED] * nu for _ in range(nv)]
    iterations = [[max_iter] * nu for _ in range(nv)]
    overflowed = [[False] * nu for _ in range(nv)]
    total = nu * nv
    if total:
        points = np.empty((seq.nvars, total), dtype=complex)
        for row in range(nv):
            for col in range(nu):
                points[:, row * nu + col] = grid.point(row, col)
        fp = np.array(fixed_point, dtype=complex)[:, None]
        active = np.arange(total)
        current = points
        for it in range(1, max_iter + 1):
            if active.size == 0:
                break
            with np.errstate(over="ignore", invalid="ignore"):
                current = seq.apply_array(current)
            finite = np.all(np.isfinite(current), axis=0)
            dist = np.full(current.shape[1], np.inf)
            dist[finite] = np.sqrt(
                np.sum(np.abs(current[:, finite] - fp) ** 2, axis=0)
            )
            attracted = finite & (dist <= attract_radius)
            escaped = (~finite) | (dist >= escape_radius)
            done = attracted | escaped
            for local_idx in np.nonzero(done)[0]:
                global_idx = int(active[local_idx])
                row, col = divmod(global_idx, nu)
                classes[row][col] = ATTRACTED if attracted[local_idx] else ESCAPED
                iterations[row][col] = it
                if not finite[local_idx]:
                    overflowed[row][col] = True
            keep = ~done
            active = active[keep]
            current = current[:, keep]
    return BasinResult(
        grid,
        fixed_point,
        classes,
        iterations,
        overflowed,
        attract_radius,
        escape_radius,
        max_iter,
        spectral,
        warning,
    )


# ---------------------------------------------------------------------------
# Built-in demonstration maps
# ---------------------------------------------------------------------------


def attracting_shear_composition(quadratic: float = 1.0, contraction: float = 0.5) -> AutoSeq:
    """Contracting quadratic automorphism of the plane built from exact pieces.

    Application order: the shear x1 += quadratic*x2^2, then the swap
    (x1, x2) -> (x2, -x1) via three unit shears, then scaling by the
    contraction factor.  The origin is an attracting fixed point and far
    points along x2 escape, so the basin shows both classes.
    """
    x1 = Poly.variable(2, 0)
    x2 = Poly.variable(2, 1)
    steps = [
        ShearFlow(0, x2 * x2, complex(quadratic)),
        ShearFlow(0, x2, 1.0),
        ShearFlow(1, x1, -1.0),
        ShearFlow(0, x2, 1.0),
        DiagonalFlow((1, 1), complex(contraction)),
    ]
    return AutoSeq.from_application_order(2, steps)


def radial_contraction(nvars: int = 2, rate: float = 1.0) -> AutoSeq:
    """Time-one flow of -rate * sum x_i d/dx_i: scaling by exp(-rate)."""
    return AutoSeq(nvars, (DiagonalFlow((1,) * nvars, cmath.exp(-rate)),))
