import random
from fractions import Fraction

import pytest

from dirac_sphere.weyl import (
    Algebra,
    Gauss,
    I,
    angular_momentum,
    casimir,
    centrality_residuals,
    commutator,
    confluence_check,
    hamiltonian_split,
    homomorphism_residuals,
    jacobi_residual,
    jacobi_sweep,
    matrix_generator,
    radial_analysis,
    random_word,
    so_pairs,
)

CAN = Algebra(3, "canonical")
DIR = Algebra(3, "dirac")


def ih(alg):
    return alg.scalar(I, h=1)


def test_gauss_arithmetic():
    z = Gauss(Fraction(1, 2), 3)
    assert z * z.conjugate() == Gauss(Fraction(37, 4), 0)
    assert I * I == Gauss(-1, 0)


def test_canonical_reordering():
    a = CAN
    assert a.p(1) * a.x(1) == a.x(1) * a.p(1) - ih(a)
    assert commutator(a.x(1), a.p(1)) == ih(a)


def test_dirac_reordering():
    a = DIR
    R2 = a.R * a.R
    assert a.p(1) * a.x(1) == a.x(1) * a.p(1) - ih(a) + ih(a) * a.x(1) * a.x(1) / R2
    assert not (a.x(1) * a.x(2) - a.x(2) * a.x(1))


def test_dirac_momentum_commutator():
    a = DIR
    want = ih(a) * (a.p(1) * a.x(2) - a.p(2) * a.x(1)) / (a.R * a.R)
    assert commutator(a.p(1), a.p(2)) == want


def test_sq_x_is_central_only_after_substitution():
    assert not any(centrality_residuals(DIR).values())
    raw = Algebra(3, "dirac", central_substitution=False)
    assert any(centrality_residuals(raw).values())


@pytest.mark.parametrize("N", [3, 4])
def test_jacobi_sweep(N):
    assert not any(jacobi_sweep(Algebra(N, "dirac")).values())


def test_jacobi_single_triple():
    assert not jacobi_residual(DIR.x(1), DIR.p(1), DIR.p(2))
    assert not any(jacobi_sweep(CAN).values())


def test_angular_momentum_and_hermiticity():
    a = DIR
    L = angular_momentum(a, 1, 2)
    assert L == a.x(1) * a.p(2) - a.x(2) * a.p(1)
    assert L.dagger() == L
    assert (a.x(1) * a.p(2)).dagger() == a.p(2) * a.x(1)


def test_dagger_is_antilinear_involution():
    a = DIR
    e = ih(a) * a.x(1) * a.p(2) * a.p(3) + a.x(2)
    assert e.dagger().dagger() == e
    assert ih(a).dagger() == -ih(a)


@pytest.mark.parametrize("alg", [CAN, DIR], ids=["canonical", "dirac"])
def test_rotation_conventions(alg):
    L = lambda i, j: angular_momentum(alg, i, j)  # noqa: E731
    G = lambda i, j: matrix_generator(alg, i, j)  # noqa: E731
    assert commutator(L(1, 2), L(1, 3)) == ih(alg) * L(2, 3)
    assert commutator(G(1, 2), G(1, 3)) == -ih(alg) * G(2, 3)
    assert not homomorphism_residuals(alg)


def test_casimir_canonical_expansion():
    a = CAN
    x2 = sum((a.x(i) * a.x(i) for i in range(1, 4)), a.zero)
    p2 = sum((a.p(i) * a.p(i) for i in range(1, 4)), a.zero)
    xp = sum((a.x(i) * a.p(i) for i in range(1, 4)), a.zero)
    assert casimir(a) == x2 * p2 - xp * xp + ih(a) * xp


def test_so_pairs():
    assert so_pairs(3) == [(1, 2), (1, 3), (2, 3)]


@pytest.mark.parametrize("N", [3, 4])
def test_normal_form_confluence(N):
    alg = Algebra(N, "dirac")
    rng = random.Random(N)
    words = [random_word(alg, rng.randint(2, 5), rng) for _ in range(40)]
    assert confluence_check(alg, words) == []


@pytest.mark.parametrize("D", [2, 3])
def test_hamiltonian_split(D):
    res = hamiltonian_split(D)
    assert not res.residual
    assert not any(res.identity_residuals.values())
    assert not any(res.insertion.values())
    assert res.ok


@pytest.mark.parametrize("D, anti, c_im, energy", [(2, 2, 1, Fraction(1, 2)), (3, 3, Fraction(3, 2), Fraction(9, 8))])
def test_radial_analysis(D, anti, c_im, energy):
    r = radial_analysis(D)
    alg = r.anti_hermitian_part.alg
    assert r.anti_hermitian_part == alg.scalar(I * anti, r=-1, h=1)
    assert r.central
    assert r.c_value == Gauss(0, c_im)
    assert r.c_r == 0 and r.gamma == 0
    assert r.transverse_energy == energy == Fraction(D * D, 8)
