"""Finite geometry over F_q: points, projective points, rank, Grassmannians.

Vectors are tuples of residue-field indices (see ``gf.FieldSpec``).  Over F_2
rank computations switch to int bitsets; both paths must agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, List, Sequence, Tuple, Union

from .gf import FieldSpec, field_of_order

DEFAULT_POINT_CAP = 1 << 20

Vec = Tuple[int, ...]


class GeometryError(ValueError):
    pass


def _field(q: Union[int, FieldSpec]) -> FieldSpec:
    return q if isinstance(q, FieldSpec) else field_of_order(q)


@dataclass(frozen=True)
class PointFq:
    field: FieldSpec
    coords: Vec

    @property
    def n(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def supp(self) -> Tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coords) if c)

    def __str__(self):
        return "(" + ",".join(self.field.digit_str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class ProjPoint:
    """A point of P^{n-1}(F_q); ``rep`` has first nonzero coordinate 1."""

    rep: PointFq

    @property
    def n(self) -> int:
        return self.rep.n

    def __str__(self):
        return "[" + str(self.rep)[1:-1] + "]"


@dataclass(frozen=True)
class SubspaceFq:
    """Subspace of F_q^n stored as its reduced row echelon basis."""

    field: FieldSpec
    n: int
    rows: Tuple[Vec, ...]

    @property
    def s(self) -> int:
        return len(self.rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __str__(self):
        return "<" + "; ".join(str(PointFq(self.field, r)) for r in self.rows) + ">"


def point(F: Union[int, FieldSpec], coords: Iterable[int]) -> PointFq:
    F = _field(F)
    return PointFq(F, tuple(int(c) for c in coords))


# -- vector primitives on index tuples --

def vec_scale(F: FieldSpec, c: int, v: Vec) -> Vec:
    mul = F.mul
    return tuple(mul(c, x) for x in v)


def vec_axpy(F: FieldSpec, c: int, x: Vec, y: Vec) -> Vec:
    """c*x + y."""
    add, mul = F.add, F.mul
    return tuple(add(mul(c, a), b) for a, b in zip(x, y))


def normalize_vec(F: FieldSpec, v: Vec) -> Vec:
    for c in v:
        if c:
            return v if c == 1 else vec_scale(F, F.inv(c), v)
    raise GeometryError("zero vector has no projective point")


def rho_n(v: PointFq) -> ProjPoint:
    """Projection F_q^n minus 0 -> P^{n-1}(F_q)."""
    return ProjPoint(PointFq(v.field, normalize_vec(v.field, v.coords)))


def rref(F: FieldSpec, vecs: Sequence[Vec]) -> Tuple[Vec, ...]:
    """Reduced row echelon basis of the span (zero rows dropped)."""
    rows = [list(v) for v in vecs]
    if not rows:
        return ()
    n = len(rows[0])
    add, mul, neg, inv = F.add, F.mul, F.neg, F.inv
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        c = inv(rows[r][col])
        if c != 1:
            rows[r] = [mul(c, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = neg(rows[i][col])
                rows[i] = [add(a, mul(f, b)) for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return tuple(tuple(row) for row in rows[:r])


def to_mask(v: Vec) -> int:
    m = 0
    for i, c in enumerate(v):
        if c:
            m |= 1 << i
    return m


def rank_gf2(masks: Iterable[int]) -> int:
    """Rank over F_2 of bitset vectors (XOR basis keyed by top bit)."""
    basis = {}
    for m in masks:
        while m:
            top = m.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = m
                break
            m ^= b
    return len(basis)


def rank_generic(F: FieldSpec, vecs: Sequence[Vec]) -> int:
    return len(rref(F, vecs))


def rank_vecs(F: FieldSpec, vecs: Sequence[Vec]) -> int:
    if F.q == 2:
        return rank_gf2(to_mask(v) for v in vecs)
    return rank_generic(F, vecs)


def span_dim(vs: Sequence[PointFq]) -> int:
    """Dimension of the F_q-span."""
    if not vs:
        return 0
    return rank_vecs(vs[0].field, [v.coords for v in vs])


def span(vs: Sequence[PointFq]) -> SubspaceFq:
    if not vs:
        raise GeometryError("span of an empty list needs an ambient dimension")
    F = vs[0].field
    return SubspaceFq(F, vs[0].n, rref(F, [v.coords for v in vs]))


def span_of(F: FieldSpec, n: int, vecs: Sequence[Vec]) -> SubspaceFq:
    return SubspaceFq(F, n, rref(F, list(vecs)) if vecs else ())


# -- enumeration --

def _check_cap(count: int, cap: int, what: str) -> None:
    if count > cap:
        raise GeometryError(f"{what}: {count} items exceeds cap {cap}")


def iter_vectors(F: FieldSpec, n: int) -> Iterable[Vec]:
    """Nonzero vectors of F_q^n, lexicographic on coordinates."""
    for v in product(range(F.q), repeat=n):
        if any(v):
            yield v


def enumerate_points(n: int, q: Union[int, FieldSpec], cap: int = DEFAULT_POINT_CAP) -> List[PointFq]:
    F = _field(q)
    _check_cap(F.q ** n - 1, cap, "enumerate_points")
    return [PointFq(F, v) for v in iter_vectors(F, n)]


def proj_vectors(F: FieldSpec, n: int) -> List[Vec]:
    return [v for v in iter_vectors(F, n) if next(c for c in v if c) == 1]


def enumerate_proj_points(n: int, q: Union[int, FieldSpec], cap: int = DEFAULT_POINT_CAP) -> List[ProjPoint]:
    F = _field(q)
    _check_cap((F.q ** n - 1) // (F.q - 1), cap, "enumerate_proj_points")
    return [ProjPoint(PointFq(F, v)) for v in proj_vectors(F, n)]


def gaussian_binomial(n: int, s: int, q: int) -> int:
    """Number of s-dimensional subspaces of F_q^n."""
    if s < 0 or s > n:
        return 0
    num = den = 1
    for i in range(s):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    value, rem = divmod(num, den)
    assert rem == 0
    return value


def iter_rref(F: FieldSpec, s: int, n: int) -> Iterable[Tuple[Vec, ...]]:
    """Every s x n RREF matrix, ordered by pivot columns then free entries."""
    q = F.q
    for pivots in combinations(range(n), s):
        free = [(r, c) for r in range(s) for c in range(pivots[r] + 1, n) if c not in pivots]
        for vals in product(range(q), repeat=len(free)):
            rows = [[0] * n for _ in range(s)]
            for r, c in enumerate(pivots):
                rows[r][c] = 1
            for (r, c), x in zip(free, vals):
                rows[r][c] = x
            yield tuple(tuple(row) for row in rows)


def enumerate_subspaces(s: int, n: int, q: Union[int, FieldSpec], cap: int = DEFAULT_POINT_CAP) -> List[SubspaceFq]:
    F = _field(q)
    if not 0 <= s <= n:
        raise GeometryError(f"need 0 <= s <= n, got s={s}, n={n}")
    _check_cap(gaussian_binomial(n, s, F.q), cap, "enumerate_subspaces")
    return [SubspaceFq(F, n, rows) for rows in iter_rref(F, s, n)]


def subspace_contains(W: SubspaceFq, v: PointFq) -> bool:
    if v.n != W.n:
        raise GeometryError("dimension mismatch")
    if v.is_zero():
        return True
    return rank_vecs(W.field, list(W.rows) + [v.coords]) == W.s


def subspace_vectors(F: FieldSpec, rows: Sequence[Vec]) -> List[Vec]:
    """Nonzero vectors of span(rows), rows assumed independent."""
    n = len(rows[0]) if rows else 0
    out = []
    for coeffs in product(range(F.q), repeat=len(rows)):
        if not any(coeffs):
            continue
        v = (0,) * n
        for c, r in zip(coeffs, rows):
            if c:
                v = vec_axpy(F, c, r, v)
        out.append(v)
    return sorted(out)


def subspace_points(W: SubspaceFq) -> List[PointFq]:
    """The q^s - 1 nonzero points of W."""
    return [PointFq(W.field, v) for v in subspace_vectors(W.field, W.rows)]


def vec_code(q: int, v: Vec) -> int:
    """Index of a vector in base q, first coordinate most significant."""
    c = 0
    for x in v:
        c = c * q + x
    return c


@lru_cache(maxsize=64)
def incidence(q: int, n: int, dim: int, projective: bool):
    """Points of F_q^n minus 0 (or of P^{n-1}) and, for every dim-dimensional
    subspace W, the positions of the points lying in W.

    Returns (points, subspaces, members) with members[j] a sorted tuple of
    point positions.
    """
    F = field_of_order(q)
    pts = proj_vectors(F, n) if projective else list(iter_vectors(F, n))
    pos = {v: i for i, v in enumerate(pts)}
    subs = list(iter_rref(F, dim, n)) if dim > 0 else []
    members = []
    for rows in subs:
        vs = subspace_vectors(F, rows)
        if projective:
            vs = [v for v in vs if next(c for c in v if c) == 1]
        members.append(tuple(sorted(pos[v] for v in vs)))
    return tuple(pts), tuple(subs), tuple(members)
