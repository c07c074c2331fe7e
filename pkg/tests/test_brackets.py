import random

import pytest

from dirac_sphere import brackets as br
from dirac_sphere.expr import PhaseSpace, PhaseVar, random_expr

S = PhaseSpace(2, 1)
X = S.sq_x
PHI1 = X - S.R**2
PHI2 = S.dot_xp
CS = br.sphere_constraints(S)


def test_poisson_basics():
    assert br.poisson(S.x(1), S.p(1)) == S.one
    assert br.poisson(S.p(1), S.x(1)) == -S.one
    assert br.poisson(PHI1, PHI2) == 2 * X
    assert br.poisson(S.Q(1), S.P(1)) == S.one


def test_poisson_sectors_split_the_bracket():
    A = S.x(1) * S.Q(1) + S.p(2) * S.P(1)
    B = S.p(1) * S.P(1) + S.x(2) ** 2 * S.Q(1)
    assert br.poisson(A, B, "xp") + br.poisson(A, B, "QP") == br.poisson(A, B)


def test_delta_antisymmetric_and_det():
    d = CS.delta
    assert d[0][1] == -d[1][0] == 2 * X
    assert CS.det == 4 * X**2


def test_delta_inverse():
    inv = CS.delta_inverse
    d = CS.delta
    for a in range(2):
        for b in range(2):
            s = sum((d[a][c] * inv[c][b] for c in range(2)), S.zero)
            assert s == (S.one if a == b else S.zero)


@pytest.mark.parametrize(
    "i, j, want",
    [
        (("x", 1), ("x", 2), lambda: S.zero),
        (("x", 1), ("p", 1), lambda: S.one - S.x(1) ** 2 / X),
        (("p", 1), ("p", 2), lambda: (S.p(1) * S.x(2) - S.p(2) * S.x(1)) / X),
    ],
)
def test_dirac_examples(i, j, want):
    assert br.dirac(S.var(*i), S.var(*j), CS) == want()


def test_dirac_annihilates_constraints():
    rng = random.Random(5)
    for _ in range(10):
        A = random_expr(S, rng, degree=3)
        for phi in CS:
            assert not br.dirac(A, phi, CS)


def test_classification():
    assert br.classify(CS) == br.SECOND_CLASS
    s1, s2 = PHI1 + S.P(1), PHI2 + 2 * X * S.Q(1)
    assert br.classify(br.ConstraintSet([s1, s2])) == br.FIRST_CLASS
    assert br.classify(br.ConstraintSet([PHI1])) == br.FIRST_CLASS
    assert br.classify(br.ConstraintSet([PHI1, PHI2, S.x(1)])) == br.MIXED


def test_ellipsoid_is_undetermined_and_not_invertible():
    F = S.x(1) ** 2 + 2 * S.x(2) ** 2 + S.x(3) ** 2 - S.R**2
    g = br.GeneralConstraint(F)
    assert g.phi2 == S.x(1) * S.p(1) + 2 * S.x(2) * S.p(2) + S.x(3) * S.p(3)
    assert g.is_linear_in_p()
    cs = g.constraint_set()
    assert cs.classification == br.UNDETERMINED
    with pytest.raises(br.NotInvertibleError):
        cs.delta_inverse


def test_secondary_constraints_sphere():
    res = br.secondary_constraints(S.sq_p / 2, [PHI1])
    assert list(res.constraints) == [PHI1, PHI2]
    assert res.fixed_multipliers == {0: S.sq_p / (2 * X)}


def test_secondary_constraints_empty():
    res = br.secondary_constraints(S.sq_p / 2, [], S)
    assert len(res.constraints) == 0


def test_secondary_iteration_bound():
    with pytest.raises(br.IterationBoundError):
        br.secondary_constraints(S.sq_p / 2, [PHI1], max_iterations=1)


def test_eom_coordinate_residual():
    H = S.sq_p / 2
    r = br.eom_residual(H, CS, PhaseVar("x", 1))
    assert r.residual == -S.x(1) * PHI2 / X
    assert r.on_shell
    A = r.ideal.witness
    assert A[0] * PHI1 + A[1] * PHI2 == r.residual


def test_eom_constraint_as_observable():
    H = S.sq_p / 2
    r = br.eom_residual(H, CS, PHI1)
    assert r.residual == -br.poisson(PHI1, H)


def test_eom_auxiliary_variable():
    r = br.eom_residual(S.sq_p / 2, CS, PhaseVar("Q", 1))
    assert not r.residual


def test_bare_momentum_residual_is_off_shell():
    # {p, p^2/2} = 0, while the Dirac bracket keeps the centripetal force
    r = br.eom_residual(S.sq_p / 2, CS, PhaseVar("p", 1))
    assert r.residual
    assert not r.on_shell


@pytest.mark.parametrize("kind", ["x", "p"])
@pytest.mark.parametrize("i", [1, 2, 3])
def test_total_hamiltonian_residuals_on_shell(kind, i):
    r = br.eom_residual(S.sq_p / 2, CS, PhaseVar(kind, i), total=True)
    assert r.on_shell
    A = r.ideal.witness
    assert A[0] * PHI1 + A[1] * PHI2 == r.residual


def test_multipliers_preserve_constraints():
    HT = br.total_hamiltonian(S.sq_p / 2, CS)
    for phi in CS:
        assert br.on_shell_zero(br.poisson(phi, HT), list(CS)).member
