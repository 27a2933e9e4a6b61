import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pptcone import catalog
from pptcone.faces import (
    FacePair,
    PairKind,
    certificate_matches,
    dual_face_of_state,
    exposedness_selftest,
    face_of_state,
    in_T,
    is_exposed_decomposition_pair,
    is_intersection_pair,
    pairing_zero_set_check,
    random_ppt_state,
)
from pptcone.linalg import ContractError, MatrixSubspace, complement, partial_transpose, range_space, vectorize
from pptcone.states import product_state

from conftest import crandn

D22 = (2, 2)
seeds = st.integers(0, 2**32 - 1)
small_dims = st.sampled_from([(2, 2), (2, 3)])


def span(*mats, dims=D22):
    return MatrixSubspace.from_matrices(dims, list(mats))


def rank_one(x, y):
    return np.outer(x, np.conj(y))


X, Y = np.array([1, 1j]), np.array([1, 0])
I_SPAN = span(np.eye(2))


def test_membership_examples():
    v = vectorize(np.eye(2)) / np.sqrt(2)
    m = in_T(np.outer(v, v), D22)
    assert m.in_psd and not m.in_pt_psd
    assert m.min_eig_pt == pytest.approx(-0.5)
    assert in_T(product_state(np.array([1, 2j]), np.array([1, -1])), D22).in_T
    assert in_T(catalog.paper_example(), D22).in_T


def test_face_of_product_state():
    x, y = np.array([1, 1j]) / np.sqrt(2), np.array([2, 1 - 1j]) / np.sqrt(6)
    face = face_of_state(product_state(x, y), D22)
    assert face.kind is PairKind.IntersectionPair
    assert face.D.equiv(span(rank_one(x, y)))
    assert face.E.equiv(span(rank_one(x.conj(), y)))


def test_face_of_printed_example():
    face = face_of_state(catalog.paper_example(), D22)
    assert face.D.equiv(I_SPAN.perp()) and face.E.dim == 4


def test_face_of_identity_is_everything():
    face = face_of_state(np.eye(6), (2, 3))
    assert face.D.dim == face.E.dim == 6


def test_dual_face_examples():
    dual = dual_face_of_state(catalog.paper_example(), D22)
    assert dual.kind is PairKind.DecompositionPair
    assert dual.D.equiv(I_SPAN) and dual.E.dim == 0
    dual = dual_face_of_state(np.eye(4), D22)
    assert dual.D.dim == dual.E.dim == 0
    x, y = np.array([1, 2]), np.array([1j, 1])
    dual = dual_face_of_state(product_state(x, y), D22)
    assert dual.D.equiv(span(rank_one(x, y)).perp())
    assert dual.E.equiv(span(rank_one(x.conj(), y)).perp())


def test_face_requires_ppt():
    v = vectorize(np.eye(2))
    with pytest.raises(ContractError):
        face_of_state(np.outer(v, v), D22)


def test_zero_set_examples(rng):
    assert pairing_zero_set_check(catalog.paper_example(), np.eye(2), D22)
    A = random_ppt_state((2, 3), rng, rank=3, method="separable")
    V = range_space(A)[:, 0].reshape(2, 3)
    assert pairing_zero_set_check(A, V, (2, 3))


@given(seeds, small_dims)
@settings(max_examples=25)
def test_dual_pair_complements_face_pair(seed, dims):
    rng = np.random.default_rng(seed)
    A = random_ppt_state(dims, rng)
    face, dual = face_of_state(A, dims), dual_face_of_state(A, dims)
    assert dual.D.equiv(face.D.perp()) and dual.E.equiv(face.E.perp())
    assert certificate_matches(A, face.D, face.E)


@given(seeds, small_dims)
@settings(max_examples=25)
def test_zero_pairing_iff_orthogonal(seed, dims):
    rng = np.random.default_rng(seed)
    A = random_ppt_state(dims, rng, method="separable", rank=int(rng.integers(1, dims[0] * dims[1])))
    K = complement(range_space(A))
    for v in (K @ crandn(rng, K.shape[1]) if K.shape[1] else crandn(rng, A.shape[0]), crandn(rng, A.shape[0])):
        V = v.reshape(dims)
        assert pairing_zero_set_check(A, V, dims)
        # the co-CP version goes through the block transpose
        assert pairing_zero_set_check(partial_transpose(A, dims), V, dims)


def test_intersection_pair_extremal():
    v = span(rank_one(X, Y))
    good = is_intersection_pair(v, span(rank_one(X.conj(), Y)))
    assert good.verdict
    expected = product_state(X / np.linalg.norm(X), Y)
    cert = good.certificate / np.trace(good.certificate)
    assert np.allclose(cert, expected, atol=1e-8)
    bad = is_intersection_pair(v, v)
    assert not bad.verdict and bad.gap > 1


def test_intersection_pair_identity_complement():
    res = is_intersection_pair(I_SPAN.perp(), MatrixSubspace.full(D22))
    assert res.verdict
    assert certificate_matches(catalog.paper_example(), I_SPAN.perp(), MatrixSubspace.full(D22))


def test_intersection_pair_zero_conventions():
    Z = MatrixSubspace.zero(D22)
    assert is_intersection_pair(Z, Z).verdict
    assert not is_intersection_pair(Z, MatrixSubspace.full(D22)).verdict


@pytest.mark.parametrize("D,E", [
    (I_SPAN, MatrixSubspace.zero(D22)),
    (span(rank_one(X, Y)).perp(), span(rank_one(X.conj(), Y)).perp()),
    (MatrixSubspace.full(D22), MatrixSubspace.full(D22)),
])
def test_exposed_decomposition_pairs(D, E):
    assert is_exposed_decomposition_pair(D, E)


def test_certificates_satisfy_rank_conditions(rng):
    for k in range(5):
        A = random_ppt_state(D22, rng)
        face = face_of_state(A, D22)
        res = is_intersection_pair(face.D, face.E, seed=k)
        assert res.verdict
        assert certificate_matches(res.certificate, face.D, face.E)
        assert in_T(res.certificate, D22)


def test_pair_rejects_bad_certificate():
    with pytest.raises(ContractError):
        FacePair(I_SPAN, MatrixSubspace.full(D22), PairKind.IntersectionPair, np.eye(4))


@pytest.mark.parametrize("A", [
    catalog.paper_example(),
    np.eye(4),
    product_state(np.array([1, 1j]) / np.sqrt(2), np.array([1, 0])),
], ids=["printed", "identity", "product"])
def test_exposedness_examples(A):
    rep = exposedness_selftest(A, D22, samples=100, seed=5)
    assert rep.passed, rep.failures
    assert rep.dual_zero_samples >= 100


def test_exposedness_at_2x3(rng):
    for k in range(3):
        A = random_ppt_state((2, 3), rng)
        rep = exposedness_selftest(A, (2, 3), samples=50, seed=k)
        assert rep.passed, rep.failures


@pytest.mark.parametrize("method", ["wishart", "separable"])
def test_random_ppt_states(method, rng):
    for dims in [(2, 2), (2, 3), (3, 3)]:
        A = random_ppt_state(dims, rng, method=method)
        assert in_T(A, dims)
        assert np.trace(A).real == pytest.approx(1)
