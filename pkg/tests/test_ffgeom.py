import pytest
from hypothesis import given, strategies as st

from oracles import gaussian_binomial_product, gf_rank
from ultraortho.ffgeom import (
    GeometryError,
    enumerate_points,
    enumerate_proj_points,
    enumerate_subspaces,
    gaussian_binomial,
    incidence,
    point,
    rank_generic,
    rank_gf2,
    rank_vecs,
    rho_n,
    rref,
    span,
    span_dim,
    subspace_contains,
    subspace_points,
    to_mask,
    vec_axpy,
)
from ultraortho.gf import field_of_order


def vec_lists(q, max_n=5, max_rows=6):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.tuples(*[st.integers(0, q - 1)] * n), min_size=1, max_size=max_rows)
    )


@pytest.mark.parametrize("q", [2, 3, 5, 7])
@given(data=st.data())
def test_rank_matches_oracle(q, data):
    vecs = data.draw(vec_lists(q))
    F = field_of_order(q)
    assert rank_vecs(F, vecs) == gf_rank(vecs, q)
    assert rank_generic(F, vecs) == gf_rank(vecs, q)


@given(vec_lists(2, max_n=10, max_rows=10))
def test_gf2_bitset_path_agrees(vecs):
    F = field_of_order(2)
    assert rank_gf2(to_mask(v) for v in vecs) == rank_generic(F, vecs)


@pytest.mark.parametrize("q", [2, 3, 4, 9])
@given(data=st.data())
def test_rref_is_a_span_invariant(q, data):
    F = field_of_order(q)
    vecs = data.draw(vec_lists(q, max_n=4, max_rows=4))
    R = rref(F, vecs)
    # adding a combination of rows to another row leaves the span unchanged
    if len(vecs) >= 2:
        c = data.draw(st.integers(0, q - 1))
        moved = list(vecs)
        moved[0] = vec_axpy(F, c, vecs[1], vecs[0])
        assert rref(F, moved) == R
    assert rref(F, list(reversed(vecs))) == R
    assert len(R) == rank_vecs(F, vecs)
    for r in R:
        assert next(x for x in r if x) == 1


@pytest.mark.parametrize("q,n", [(2, 1), (2, 4), (3, 3), (4, 2), (5, 2), (8, 2), (9, 2)])
def test_point_counts(q, n):
    assert len(enumerate_points(n, q)) == q ** n - 1
    pp = enumerate_proj_points(n, q)
    assert len(pp) == (q ** n - 1) // (q - 1)
    assert len({p.rep.coords for p in pp}) == len(pp)


@pytest.mark.parametrize("q,n,s", [(2, 3, 1), (2, 4, 2), (3, 3, 2), (4, 3, 1), (2, 5, 3), (3, 4, 2), (5, 2, 1)])
def test_grassmannian_counts(q, n, s):
    subs = enumerate_subspaces(s, n, q)
    assert len(subs) == gaussian_binomial(n, s, q) == gaussian_binomial_product(n, s, q)
    assert len(set(subs)) == len(subs)
    assert all(W.dim == s for W in subs)


def test_gaussian_binomial_edges():
    assert gaussian_binomial(4, 0, 3) == 1
    assert gaussian_binomial(4, 4, 3) == 1
    assert gaussian_binomial(4, 5, 3) == 0
    assert gaussian_binomial(4, 2, 2) == 35


@pytest.mark.parametrize("q", [2, 3, 4])
def test_subspace_points_and_membership(q):
    F = field_of_order(q)
    W = span([point(F, (1, 0, 1)), point(F, (0, 1, 1))])
    pts = subspace_points(W)
    assert len(pts) == q ** 2 - 1
    inside = {p.coords for p in pts}
    for p in enumerate_points(3, F):
        assert subspace_contains(W, p) == (p.coords in inside)


@pytest.mark.parametrize("q,n,dim", [(2, 3, 2), (3, 3, 2), (2, 4, 2)])
@pytest.mark.parametrize("projective", [False, True])
def test_incidence_structure(q, n, dim, projective):
    pts, subs, members = incidence(q, n, dim, projective)
    per = (q ** dim - 1) // (q - 1) if projective else q ** dim - 1
    assert len(subs) == gaussian_binomial(n, dim, q)
    assert all(len(m) == per for m in members)
    # every point lies in the same number of dim-subspaces
    counts = [0] * len(pts)
    for m in members:
        for i in m:
            counts[i] += 1
    assert len(set(counts)) == 1
    assert counts[0] == gaussian_binomial(n - 1, dim - 1, q)


def test_projection_and_span_dim():
    F = field_of_order(3)
    v = point(F, (0, 2, 1))
    assert rho_n(v).rep.coords == (0, 1, 2)
    assert str(rho_n(v)) == "[0,1,2]"
    assert span_dim([v, point(F, (0, 1, 2))]) == 1
    assert span_dim([]) == 0
    with pytest.raises(GeometryError):
        rho_n(point(F, (0, 0, 0)))


def test_caps_and_errors():
    with pytest.raises(GeometryError):
        enumerate_points(10, 2, cap=100)
    with pytest.raises(GeometryError):
        enumerate_subspaces(3, 2, 2)
    with pytest.raises(GeometryError):
        span([])
