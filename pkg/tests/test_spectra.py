from fractions import Fraction

import pytest

from dirac_sphere import spectra as sp


def test_gauge_levels():
    assert sp.gauge_spectrum(2, 1, 1).energy(1) == 1
    assert sp.gauge_spectrum(3, 2, 2).energy(2) == 1
    for D in range(1, 5):
        row = sp.gauge_spectrum(D, Fraction(3, 2), 0).rows[0]
        assert (row.energy, row.degeneracy) == (0, 1)


def test_dirac_levels():
    assert sp.dirac_spectrum(2, 1, 0).energy(0) == Fraction(1, 2)
    assert sp.dirac_spectrum(3, 1, 1).energy(1) == Fraction(21, 8)
    assert sp.dirac_spectrum(3, 1, 1).as_tuples() == [(0, Fraction(9, 8), 1), (1, Fraction(21, 8), 4)]


@pytest.mark.parametrize("D", [1, 2, 3, 4])
def test_dirac_minus_gauge_is_constant(D):
    R = Fraction(5, 3)
    g, d = sp.gauge_spectrum(D, R, 4), sp.dirac_spectrum(D, R, 4)
    assert {b.energy - a.energy for a, b in zip(g.rows, d.rows)} == {Fraction(D * D) / (8 * R * R)}


def test_curvature_shift_values():
    assert sp.curvature_shift(3, 1, Fraction(1, 24)) == Fraction(1, 4)
    assert sp.curvature_shift(2, 1, Fraction(1, 8)) == Fraction(1, 4)
    for a in sp.ALPHAS:
        assert sp.curvature_shift(1, 1, a) == 0
    t = sp.curvature_shift_spectrum(2, 1, 1, Fraction(1, 8))
    assert t.as_tuples() == [(0, Fraction(1, 4), 1), (1, Fraction(5, 4), 3)]


def test_shift_polynomials_never_agree():
    for a in sp.ALPHAS:
        t, c = sp.shift_polynomials(a)
        assert t != c
        for D in range(1, 5):
            assert sum(k * D**n for n, k in enumerate(c)) == sp.curvature_shift(D, 1, a)
            assert sum(k * D**n for n, k in enumerate(t)) == sp.transverse_constant(D, 1)


def test_spectrum_dispatch_errors():
    with pytest.raises(ValueError):
        sp.spectrum("curvature_shift", 2, 1, 2)
    with pytest.raises(ValueError):
        sp.spectrum("nope", 2, 1, 2)
    with pytest.raises(ValueError):
        sp.gauge_spectrum(0, 1, 2)
    with pytest.raises(ValueError):
        sp.gauge_spectrum(2, -1, 2)


@pytest.mark.parametrize("D, l, dim", [(2, 1, 3), (2, 2, 5), (3, 2, 9), (2, 3, 7), (1, 2, 2), (3, 1, 4)])
def test_harmonic_dimensions(D, l, dim):
    assert sp.degeneracy(D, l, oracle=True) == dim == sp.degeneracy_formula(D, l)


def test_harmonic_basis_is_harmonic():
    B = sp.harmonic_basis(3, 3)
    for p in B.polys():
        assert not sp.laplacian(p, B.N)
    assert sp.harmonic_basis(2, 1).monomials == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


@pytest.mark.parametrize("D, l, eig", [(2, 1, 2), (2, 0, 0), (3, 2, 8)])
def test_casimir_examples(D, l, eig):
    r = sp.casimir_check(D, l)
    assert r.eigenvalue == eig and r.uniform


def test_rotations_preserve_harmonics():
    B = sp.harmonic_basis(2, 2)
    for p in B.polys():
        assert not sp.laplacian(sp.rotation_action(p, 1, 3), 3)


def test_fischer_gram_positive():
    G = sp.fischer_gram(2, 2)
    assert all(G[i][i] > 0 for i in range(len(G)))
    assert all(G[i][j] == G[j][i] for i in range(len(G)) for j in range(len(G)))


def test_coordinates_reject_outside_vectors():
    B = sp.harmonic_basis(2, 2)
    with pytest.raises(sp.CasimirError):
        B.coordinates({(2, 0, 0): Fraction(1)})
