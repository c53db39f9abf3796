"""Shared random generators and independent oracles for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from shearkit.poly import Poly
from shearkit.fields import VectorField
from shearkit.scalars import Scalar


@pytest.fixture
def rng():
    return random.Random(20240811)


def random_exact_scalar(rng, imaginary=True, nonzero=False):
    while True:
        re = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        im = Fraction(rng.randint(-2, 2)) if imaginary and rng.random() < 0.4 else Fraction(0)
        if not nonzero or re != 0 or im != 0:
            return Scalar.exact(re, im)


def random_exact_poly(rng, nvars, degree, max_terms=4, allowed_vars=None, imaginary=True):
    """Random sparse polynomial; allowed_vars restricts the support."""
    if allowed_vars is None:
        allowed_vars = list(range(nvars))
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exp = [0] * nvars
        budget = rng.randint(0, degree)
        for _ in range(budget):
            exp[rng.choice(allowed_vars)] += 1
        terms[tuple(exp)] = random_exact_scalar(rng, imaginary)
    return Poly(nvars, terms)


def random_field(rng, nvars, degree, max_terms=3):
    return VectorField(
        [random_exact_poly(rng, nvars, degree, max_terms) for _ in range(nvars)]
    )


def random_triangular_field(rng, nvars, degree):
    """Strictly triangular, hence locally nilpotent: component i uses x_{i+1}.."""
    comps = []
    for i in range(nvars):
        later = list(range(i + 1, nvars))
        if not later:
            comps.append(Poly.zero(nvars))
        else:
            comps.append(
                random_exact_poly(rng, nvars, degree, max_terms=2, allowed_vars=later)
            )
    return VectorField(comps)


def numeric_bracket(v, w, point, h=1e-6):
    """Finite-difference Lie bracket at a point; independent of the symbolic path."""
    n = v.nvars

    def jacobian_times(field, other_value, z):
        out = [0j] * n
        for j in range(n):
            zp = list(z)
            zm = list(z)
            zp[j] += h
            zm[j] -= h
            fp = field.eval_complex(tuple(zp))
            fm = field.eval_complex(tuple(zm))
            for k in range(n):
                out[k] += (fp[k] - fm[k]) / (2 * h) * other_value[j]
        return out

    vz = v.eval_complex(point)
    wz = w.eval_complex(point)
    dw_v = jacobian_times(w, vz, point)
    dv_w = jacobian_times(v, wz, point)
    return [a - b for a, b in zip(dw_v, dv_w)]
