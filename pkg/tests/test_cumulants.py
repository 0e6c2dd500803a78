"""Free cumulants, t-coefficients, and the routes between them."""

import numpy as np
import pytest

from infconv import (
    CumulantVector,
    DualScalar,
    InfLaw,
    InvalidInputError,
    MathDomainError,
    SizeLimitError,
    TCoeffVector,
    boolean_mixed_moments,
    constant_cumulant_law,
    cumulants_from_moments,
    d_t_pi_value,
    enumerate_ncl,
    free_mixed_moments,
    inf_cumulants_direct,
    kappa_from_t,
    make_mixed_t,
    mixed_vanishing_check,
    moments_from_cumulants,
    moments_from_t,
    scaled,
    t_coeffs_from_moments,
    t_pi_value,
)

CATALAN = [1.0, 2.0, 5.0, 14.0, 42.0, 132.0, 429.0, 1430.0]


def rand_law(rng, K=8, lo=0.7, hi=1.3):
    m = rng.uniform(-1, 1, K)
    mp = rng.uniform(-1, 1, K)
    m[0] = rng.uniform(lo, hi)
    return InfLaw.from_moments(
        [DualScalar(complex(a), complex(b)) for a, b in zip(m, mp)]
    )


# -- moments <-> cumulants ------------------------------------------------------

def test_catalan_moments_have_unit_cumulants():
    cum = cumulants_from_moments(InfLaw.from_moments(CATALAN))
    assert np.allclose(cum.kappa, np.ones(8), atol=1e-12)
    assert np.allclose(cum.kappa_prime, np.zeros(8))


def test_point_mass_cumulants_stop_after_the_mean():
    cum = cumulants_from_moments(InfLaw.point_mass(1.5, K=6))
    assert cum.kappa[0] == pytest.approx(1.5)
    assert np.allclose(cum.kappa[1:], np.zeros(5), atol=1e-12)


def test_semicircle_has_only_variance():
    law = InfLaw.from_moments([0.0, 1.0, 0.0, 2.0, 0.0, 5.0])
    cum = cumulants_from_moments(law)
    assert np.allclose(cum.kappa, [0, 1, 0, 0, 0, 0], atol=1e-12)


def test_moment_cumulant_roundtrip():
    rng = np.random.default_rng(21)
    for _ in range(20):
        law = rand_law(rng)
        back = moments_from_cumulants(cumulants_from_moments(law))
        assert max(law.max_abs_diff(back)) < 1e-10


def test_constant_cumulant_law_frozen_moments():
    # kappa_n = c for all n gives the free Poisson moment polynomials
    c, cp = 2.0, 1.5
    law = constant_cumulant_law(c, cp, K=4)
    assert np.allclose(law.m, [c,
                               c + c ** 2,
                               c + 3 * c ** 2 + c ** 3,
                               c + 6 * c ** 2 + 6 * c ** 3 + c ** 4])
    assert np.allclose(law.m_prime, [cp,
                                     cp * (1 + 2 * c),
                                     cp * (1 + 6 * c + 3 * c ** 2),
                                     cp * (1 + 12 * c + 18 * c ** 2 + 4 * c ** 3)])


def test_inf_cumulants_direct_matches_dual_route():
    rng = np.random.default_rng(22)
    for _ in range(10):
        law = rand_law(rng)
        dual_route = cumulants_from_moments(law).kappa_prime
        direct = inf_cumulants_direct(law)
        # order-8 cumulants reach ~1e4, so keep the route tolerance absolute 1e-9
        assert np.max(np.abs(direct - dual_route)) < 1e-9


def test_cumulant_vector_length_check():
    with pytest.raises(InvalidInputError):
        CumulantVector(3, [1.0, 2.0], [0.0, 0.0, 0.0])


# -- t-coefficients ----------------------------------------------------------------

def test_free_poisson_t_vector():
    tv = t_coeffs_from_moments(InfLaw.from_moments(CATALAN))
    expected = np.zeros(8)
    expected[0] = 1.0
    expected[1] = 1.0
    assert np.allclose(tv.t, expected, atol=1e-10)
    assert np.allclose(tv.t_prime, np.zeros(8), atol=1e-10)


def test_t_moment_roundtrip():
    rng = np.random.default_rng(23)
    for _ in range(10):
        law = rand_law(rng)
        back = moments_from_t(t_coeffs_from_moments(law))
        assert max(law.max_abs_diff(back)) < 1e-9


def test_t_scales_linearly_with_the_variable():
    rng = np.random.default_rng(24)
    law = rand_law(rng)
    tv = t_coeffs_from_moments(law)
    tvc = t_coeffs_from_moments(scaled(law, 1.7))
    assert np.max(np.abs(tvc.t - 1.7 * tv.t)) < 1e-10
    assert np.max(np.abs(tvc.t_prime - 1.7 * tv.t_prime)) < 1e-10


def test_t_vector_requires_invertible_mean():
    with pytest.raises(MathDomainError):
        TCoeffVector(2, [0.0, 1.0], [0.0, 0.0])


@pytest.mark.parametrize("route", ["linked", "interval"])
def test_kappa_from_t_routes(route):
    rng = np.random.default_rng(25)
    for _ in range(5):
        law = rand_law(rng)
        cum = cumulants_from_moments(law)
        via_t = kappa_from_t(t_coeffs_from_moments(law), route=route)
        assert np.max(np.abs(via_t.kappa - cum.kappa)) < 1e-9
        assert np.max(np.abs(via_t.kappa_prime - cum.kappa_prime)) < 1e-9


def test_kappa_from_t_unknown_route():
    tv = TCoeffVector(2, [1.0, 0.5], [0.0, 0.0])
    with pytest.raises(InvalidInputError):
        kappa_from_t(tv, route="sideways")


# -- linked-partition summands -----------------------------------------------------

def test_t_pi_eps_part_matches_literal_product_rule():
    rng = np.random.default_rng(26)
    vals = {}

    def t_fn(word):
        if word not in vals:
            vals[word] = DualScalar(complex(rng.uniform(0.5, 1.5)),
                                    complex(rng.uniform(-1, 1)))
        return vals[word]

    word = ("x", "y", "x", "y")
    for pi in enumerate_ncl(4):
        full = t_pi_value(pi, word, t_fn)
        lit = d_t_pi_value(pi, word, t_fn)
        assert abs(full.eps - lit) < 1e-12


def test_t_pi_word_length_mismatch():
    pi = enumerate_ncl(3)[0]
    with pytest.raises(InvalidInputError):
        t_pi_value(pi, ("x", "y"), lambda w: DualScalar(1.0))


# -- mixed t-coefficients ------------------------------------------------------------

def test_mixed_t_vanishes_for_free_letters():
    rng = np.random.default_rng(27)
    lawX = rand_law(rng, K=5)
    lawY = rand_law(rng, K=5)
    report = mixed_vanishing_check(free_mixed_moments(lawX, lawY), max_len=4)
    assert report.words_checked == 4 + 8 + 16 - 6
    assert report.max_body < 1e-9
    assert report.max_eps < 1e-9


def test_mixed_t_detects_boolean_pair():
    rng = np.random.default_rng(28)
    lawX = rand_law(rng, K=5)
    lawY = rand_law(rng, K=5)
    report = mixed_vanishing_check(boolean_mixed_moments(lawX, lawY), max_len=4)
    assert report.max_body > 1e-3


def test_make_mixed_t_needs_invertible_means():
    lawX = InfLaw.from_moments([0.0, 1.0, 0.0])
    lawY = InfLaw.from_moments([1.0, 1.0, 1.0])
    t = make_mixed_t(free_mixed_moments(lawX, lawY))
    with pytest.raises(MathDomainError):
        t(("x", "y"))


def test_mixed_check_size_guard():
    law = InfLaw.point_mass(1.0, K=4)
    with pytest.raises(SizeLimitError):
        mixed_vanishing_check(free_mixed_moments(law, law), max_len=11)


# -- serialization ---------------------------------------------------------------------

def test_vector_json_keys():
    cum = cumulants_from_moments(InfLaw.point_mass(1.0, K=3))
    assert set(cum.to_json_obj()) == {"K", "kappa", "kappa_prime"}
    tv = t_coeffs_from_moments(InfLaw.point_mass(1.0, K=3))
    assert set(tv.to_json_obj()) == {"K", "t", "t_prime"}
