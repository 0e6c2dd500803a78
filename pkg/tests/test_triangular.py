"""Upper-triangular series matrices and block transforms.

The scalar dual arithmetic is the corner-tracked shadow of 2x2 upper
triangular matrices with equal diagonal; these tests pin that bridge and
compare the direct matrix route for each block transform against the
series-calculus formula route.
"""

import numpy as np
import pytest

from infconv import (
    DualScalar,
    DualSeries,
    InfLaw,
    InvalidInputError,
    SizeLimitError,
    TildeFunctional,
    TransformKind,
    UT2,
    apply_series,
    block_transform,
    block_transform_formula,
    centered_alternating_check,
)

BLOCK_KINDS = [TransformKind.PSI, TransformKind.ETA_PLAIN,
               TransformKind.KAPPA, TransformKind.RHO, TransformKind.T]


def rand_law(rng, K=8, lo=0.7, hi=1.3):
    m = rng.uniform(-1, 1, K)
    mp = rng.uniform(-1, 1, K)
    m[0] = rng.uniform(lo, hi)
    return InfLaw.from_moments(
        [DualScalar(complex(a), complex(b)) for a, b in zip(m, mp)]
    )


def rand_plain(rng, order=6, vanishing=True):
    coeffs = rng.uniform(-0.8, 0.8, order + 1)
    if vanishing:
        coeffs[0] = 0.0
    return DualSeries.from_coeffs([complex(v) for v in coeffs])


# -- matrix ring ---------------------------------------------------------------

def test_entries_must_share_order():
    with pytest.raises(InvalidInputError):
        UT2(DualSeries(3), DualSeries(4))


def test_entries_must_be_plain():
    dual = DualSeries.from_coeffs([DualScalar(1.0, 1.0)])
    with pytest.raises(InvalidInputError):
        UT2(dual, DualSeries(0))


def test_dual_constant_embedding():
    m = UT2.dual_constant(DualScalar(2.0, 3.0), 2)
    assert m.diag.body[0] == 2.0 and m.corner.body[0] == 3.0
    assert np.all(m.diag.body[1:] == 0)


def test_identity_neutral():
    rng = np.random.default_rng(41)
    a = UT2.of(rand_plain(rng, vanishing=False), rand_plain(rng, vanishing=False))
    e = UT2.identity(a.order)
    assert (a * e).max_abs_diff(a) == 0.0
    assert (e * a).max_abs_diff(a) == 0.0


def test_mul_associative():
    rng = np.random.default_rng(42)
    a, b, c = (UT2.of(rand_plain(rng, vanishing=False),
                      rand_plain(rng, vanishing=False)) for _ in range(3))
    assert ((a * b) * c).max_abs_diff(a * (b * c)) < 1e-12


def test_mul_corner_is_leibniz():
    rng = np.random.default_rng(43)
    a = UT2.of(rand_plain(rng, vanishing=False), rand_plain(rng, vanishing=False))
    b = UT2.of(rand_plain(rng, vanishing=False), rand_plain(rng, vanishing=False))
    prod = a * b
    want = a.diag * b.corner + a.corner * b.diag
    assert max(prod.corner.max_abs_diff(want)) < 1e-12


def test_inverse_roundtrip():
    rng = np.random.default_rng(44)
    d = rand_plain(rng, vanishing=False)
    d.body[0] = 1.3
    a = UT2.of(d, rand_plain(rng, vanishing=False))
    assert (a * a.inv()).max_abs_diff(UT2.identity(a.order)) < 1e-12


def test_dual_series_roundtrip():
    rng = np.random.default_rng(45)
    f = DualSeries.from_coeffs(
        [DualScalar(complex(x), complex(y))
         for x, y in zip(rng.uniform(-1, 1, 6), rng.uniform(-1, 1, 6))]
    )
    m = UT2.from_dual_series(f)
    assert m.to_dual_series().almost_equal(f, 0.0)


# -- the bridge identity ----------------------------------------------------------

def test_apply_series_is_dual_composition():
    # f evaluated on [[b, c], [0, b]] == f composed with (b + eps c)
    rng = np.random.default_rng(46)
    for _ in range(5):
        f = DualSeries.from_coeffs(
            [DualScalar(complex(x), complex(y))
             for x, y in zip(rng.uniform(-1, 1, 7), rng.uniform(-1, 1, 7))]
        )
        b = rand_plain(rng)
        c = rand_plain(rng)
        arg = UT2.of(b, c)
        direct = apply_series(f, arg)
        composed = f.compose(DualSeries.recombine(b, c))
        assert direct.to_dual_series().almost_equal(composed, 1e-10)


def test_apply_series_needs_vanishing_argument():
    f = DualSeries.identity(4)
    arg = UT2.dual_constant(DualScalar(1.0), 4)
    with pytest.raises(InvalidInputError):
        apply_series(f, arg)


# -- the dual expectation functional -----------------------------------------------

def test_moment_matrix_shape():
    law = InfLaw.from_moments([DualScalar(1.0, 0.5), DualScalar(2.0, 0.25)])
    m = TildeFunctional(law).moment_matrix(2)
    assert m[0, 0] == 2.0 and m[0, 1] == 0.25 and m[1, 0] == 0.0 and m[1, 1] == 2.0


def test_expect_poly_monomial():
    rng = np.random.default_rng(47)
    law = rand_law(rng, K=4)
    tf = TildeFunctional(law)
    coeffs = [UT2.zero(3), UT2.zero(3), UT2.identity(3)]
    got = tf.expect_poly(coeffs)
    want = UT2.dual_constant(law.dual_moment(2), 3)
    assert got.max_abs_diff(want) == 0.0


def test_expect_poly_degree_guard():
    law = InfLaw.point_mass(1.0, K=2)
    coeffs = [UT2.identity(2)] * 4
    with pytest.raises(SizeLimitError):
        TildeFunctional(law).expect_poly(coeffs)


# -- block transforms: direct matrix route vs formula route -------------------------

@pytest.mark.parametrize("kind", BLOCK_KINDS)
def test_block_routes_agree(kind):
    rng = np.random.default_rng(48)
    for _ in range(3):
        law = rand_law(rng)
        b = rand_plain(rng)
        c = rand_plain(rng)
        got = block_transform(kind, law, b, c)
        want = block_transform_formula(kind, law, b, c)
        assert got.max_abs_diff(want) < 1e-9, kind


def test_block_at_zero_corner_collapses_to_scalar_transform():
    # with c = 0 the corner of the block is the infinitesimal transform of b
    from infconv import d_transform, transform

    rng = np.random.default_rng(49)
    law = rand_law(rng)
    b = rand_plain(rng)
    zero = DualSeries(b.order)
    blk = block_transform(TransformKind.ETA_PLAIN, law, b, zero)
    body, _ = transform(TransformKind.ETA_PLAIN, law).eps_split()
    want_diag = body.compose(b)
    want_corner = d_transform(TransformKind.ETA_PLAIN, law).compose(b)
    assert max(blk.diag.max_abs_diff(want_diag.truncated(blk.order))) < 1e-10
    assert max(blk.corner.max_abs_diff(want_corner.truncated(blk.order))) < 1e-10


def test_eta_tilde_has_no_matrix_form():
    law = InfLaw.point_mass(1.0, K=4)
    b = DualSeries.identity(4)
    with pytest.raises(InvalidInputError):
        block_transform(TransformKind.ETA_TILDE, law, b, DualSeries(4))
    with pytest.raises(InvalidInputError):
        block_transform_formula(TransformKind.ETA_TILDE, law, b, DualSeries(4))


# -- centered alternating words -------------------------------------------------------

def test_centered_words_vanish_for_free_pairs():
    rng = np.random.default_rng(50)
    lawX, lawY = rand_law(rng, K=3), rand_law(rng, K=3)
    rep = centered_alternating_check(lawX, lawY, max_word_len=5, model="free")
    assert rep.words_checked == 8
    assert rep.max_body < 1e-9 and rep.max_eps < 1e-9


def test_centered_words_survive_boolean_pairs():
    rng = np.random.default_rng(50)
    lawX, lawY = rand_law(rng, K=3), rand_law(rng, K=3)
    rep = centered_alternating_check(lawX, lawY, max_word_len=5, model="boolean")
    assert rep.max_body > 1e-6


def test_centered_report_json_keys():
    law = InfLaw.point_mass(1.0, K=3)
    rep = centered_alternating_check(law, law, max_word_len=3, model="free")
    assert set(rep.to_json_obj()) == {
        "model", "words_checked", "max_body", "max_eps",
        "worst_body_word", "worst_eps_word",
    }


def test_centered_check_guards():
    law = InfLaw.point_mass(1.0, K=3)
    with pytest.raises(SizeLimitError):
        centered_alternating_check(law, law, max_word_len=13)
    with pytest.raises(InvalidInputError):
        centered_alternating_check(law, law, max_word_len=4, model="classical")
