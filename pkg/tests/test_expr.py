import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_sphere.expr import (
    DenominatorError,
    PhaseSpace,
    PhaseVar,
    central_factorization,
    ideal_reduce,
    invert_central,
    is_unit,
    normalize_constraint,
    partial,
    qp_part,
    random_expr,
    substitute,
)

S = PhaseSpace(2, 1)
X = S.sq_x
PHI1 = X - S.R**2
PHI2 = S.dot_xp


def test_additive_inverse_cancels():
    assert S.x(1) + (-S.x(1)) == S.zero
    assert not (S.x(1) - S.x(1))


def test_difference_of_squares():
    assert (S.x(1) + S.x(2)) * (S.x(1) - S.x(2)) == S.x(1) ** 2 - S.x(2) ** 2


def test_distributes_over_declared_inverse():
    e = PHI1 * (1 / X)
    assert e == S.one - S.R**2 / X
    assert e.den == (0, 1, 0)


def test_canonical_form_cancels_central_factors():
    e = (X * S.x(1)) / X**2
    assert e == S.x(1) / X
    assert e.den == (0, 1, 0)
    assert str(e) == "(x1)/(sq(x))"


def test_invert_central():
    assert invert_central(X, 1) == 1 / X
    assert invert_central(X, 1) * X == S.one
    Y = X + S.P(1)
    assert invert_central(Y, 2) * Y**2 == S.one


def test_invert_rejects_non_central():
    with pytest.raises(DenominatorError, match="not a declared central element"):
        invert_central(S.x(1), 1)


def test_division_by_non_unit_rejected():
    with pytest.raises(DenominatorError, match="denominator must be a power of sq"):
        S.one / S.x(1)


def test_central_factorization_and_units():
    c, (r, a, b) = central_factorization(3 * X**2 * S.R)
    assert (Fraction(int(c.numerator), int(c.denominator)), r, a, b) == (3, 1, 2, 0)
    assert is_unit(Fraction(1, 2) * X * (X + S.P(1)))
    assert not is_unit(X + S.x(1))


def test_partial_derivatives():
    assert partial(PHI1, PhaseVar("x", 1)) == 2 * S.x(1)
    assert partial(PHI2, PhaseVar("p", 2)) == S.x(2)
    assert partial(1 / X, PhaseVar("x", 1)) == -2 * S.x(1) / X**2


def test_substitute():
    e = substitute(S.x(1) ** 2 + S.p(1), {PhaseVar("x", 1): S.Q(1)})
    assert e == S.Q(1) ** 2 + S.p(1)


def test_ideal_explicit_multiple():
    res = ideal_reduce(S.x(1) * PHI2, [PHI1, PHI2])
    assert res.member
    assert res.witness[0] * PHI1 + res.witness[1] * PHI2 == S.x(1) * PHI2


@pytest.mark.parametrize("bound", [0, 1, 2, 3])
def test_ideal_proper(bound):
    res = ideal_reduce(S.one, [PHI1, PHI2], degree_bound=bound)
    assert not res.member
    assert res.bound == bound


def test_ideal_factorization():
    res = ideal_reduce(X * PHI2 - S.R**2 * PHI2, [PHI1])
    assert res.member
    assert res.witness[0] == PHI2


def test_ideal_with_central_denominator():
    e = -S.x(1) * PHI2 / X
    res = ideal_reduce(e, [PHI1, PHI2])
    assert res.member
    assert res.witness[0] * PHI1 + res.witness[1] * PHI2 == e


def test_normalize_constraint_strips_units_and_sign():
    e = -2 * S.R**2 * PHI2 / X
    assert normalize_constraint(e) == PHI2


def test_qp_part_grading():
    e = PHI2 + 2 * X * S.Q(1) + S.P(1) * S.Q(1)
    assert qp_part(e, 0) == PHI2
    assert qp_part(e, 1) == 2 * X * S.Q(1)
    assert qp_part(e, 2) == S.P(1) * S.Q(1)


def test_out_of_range_variable():
    with pytest.raises((IndexError, ValueError)):
        S.x(4)


# --- properties ----------------------------------------------------------

seeds = st.integers(min_value=0, max_value=10**6)


def _rand(seed, k=3):
    rng = random.Random(seed)
    out = []
    for _ in range(k):
        e = random_expr(S, rng, degree=3, terms=3, include_aux=True)
        out.append(e / X ** rng.randint(0, 2) / (X + S.P(1)) ** rng.randint(0, 1))
    return out


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_ring_axioms(seed):
    a, b, c = _rand(seed)
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == S.zero
    assert a * S.one == a


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_canonical_form_idempotent(seed):
    (a,) = _rand(seed, 1)
    again = type(a)(a.ctx, a.num, a.den)
    assert again == a
    assert again.den == a.den
    assert hash(again) == hash(a)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from(S.variables), st.sampled_from(S.variables))
def test_partials_commute(seed, u, v):
    (a,) = _rand(seed, 1)
    assert partial(partial(a, u), v) == partial(partial(a, v), u)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_product_rule(seed):
    a, b = _rand(seed, 2)
    v = PhaseVar("x", 1)
    assert partial(a * b, v) == partial(a, v) * b + a * partial(b, v)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=4), st.booleans())
def test_invert_central_property(k, aux):
    e = (X + S.P(1)) if aux else X
    assert invert_central(e, k) * e**k == S.one
