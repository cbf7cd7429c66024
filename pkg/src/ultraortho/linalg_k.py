"""Vectors and subspaces over a discretely valued field K.

The decision procedures here work on residues: a family of unit-sphere
vectors is orthogonal exactly when its reductions are independent over F_q.
The wedge norm and the definitional falsifier are slower, independent routes
to the same answers and are used as oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations, permutations, product
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .ffgeom import PointFq, SubspaceFq, rank_vecs, rho_n, rref
from .valued import (
    INF,
    Norm,
    ParseError,
    PrecisionError,
    ValuedElem,
    ValuedError,
    ValuedFieldSpec,
    absval,
    delta,
    elem_to_str,
    parse_elem,
    res_index,
    ve_add,
    ve_from_digits,
    ve_from_int,
    ve_mul,
    ve_one,
    ve_shift,
    ve_sub,
    ve_zero,
)


class OrthogonalityError(ValueError):
    """Inputs violate a precondition (off-sphere vector, dimension mismatch)."""


@dataclass(frozen=True)
class VectorK:
    K: ValuedFieldSpec
    entries: Tuple[ValuedElem, ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def __str__(self):
        return vector_to_str(self)


@dataclass(frozen=True)
class SubspaceK:
    """Subspace of K^n given by an orthogonal basis on the unit sphere."""

    K: ValuedFieldSpec
    n: int
    basis: Tuple[VectorK, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


def vector(K: ValuedFieldSpec, entries: Iterable[Union[ValuedElem, int, str]]) -> VectorK:
    out = []
    for e in entries:
        if isinstance(e, ValuedElem):
            if e.K != K:
                raise ValuedError("entry belongs to a different field")
            out.append(e)
        elif isinstance(e, int):
            out.append(ve_from_int(K, e))
        else:
            out.append(parse_elem(K, e))
    if not out:
        raise OrthogonalityError("vectors need n >= 1")
    return VectorK(K, tuple(out))


def unit_vector(K: ValuedFieldSpec, n: int, i: int) -> VectorK:
    return VectorK(K, tuple(ve_one(K) if j == i else ve_zero(K) for j in range(n)))


def is_zero_vector(v: VectorK) -> bool:
    return all(e.nu == INF for e in v.entries)


def vec_valuation(v: VectorK):
    """min over entries of the valuation; INF for the zero vector."""
    return min(e.nu for e in v.entries)


def inf_norm(v: VectorK) -> Norm:
    nu = vec_valuation(v)
    return Norm(v.K.q, None if nu == INF else -nu)


def on_unit_sphere(v: VectorK) -> bool:
    return vec_valuation(v) == 0


def scale(c: ValuedElem, v: VectorK) -> VectorK:
    return VectorK(v.K, tuple(ve_mul(c, e) for e in v.entries))


def shift(v: VectorK, k: int) -> VectorK:
    """pi^k * v."""
    return VectorK(v.K, tuple(ve_shift(e, k) for e in v.entries))


def vadd(u: VectorK, v: VectorK) -> VectorK:
    _check_dims([u, v])
    return VectorK(u.K, tuple(ve_add(a, b) for a, b in zip(u.entries, v.entries)))


def vsub(u: VectorK, v: VectorK) -> VectorK:
    _check_dims([u, v])
    return VectorK(u.K, tuple(ve_sub(a, b) for a, b in zip(u.entries, v.entries)))


def linear_combination(coeffs: Sequence[ValuedElem], vs: Sequence[VectorK]) -> VectorK:
    _check_dims(vs)
    K, n = vs[0].K, vs[0].n
    acc = [ve_zero(K)] * n
    for c, v in zip(coeffs, vs):
        if c.nu == INF:
            continue
        for i, e in enumerate(v.entries):
            acc[i] = ve_add(acc[i], ve_mul(c, e))
    return VectorK(K, tuple(acc))


def normalize_to_sphere(v: VectorK) -> VectorK:
    """Scale v by pi^(-nu(v)) so that its norm becomes 1."""
    nu = vec_valuation(v)
    if nu == INF:
        raise OrthogonalityError("the zero vector cannot be normalized")
    return v if nu == 0 else shift(v, -nu)


def gamma_n(v: VectorK) -> PointFq:
    """Entrywise reduction mod the maximal ideal; entries must be integral."""
    return PointFq(v.K.residue, tuple(res_index(e, 0) for e in v.entries))


def delta_n(K: ValuedFieldSpec, w: PointFq) -> VectorK:
    if w.field != K.residue:
        raise ValuedError("residue vector belongs to a different field")
    return VectorK(K, tuple(delta(K, c) for c in w.coords))


def _check_dims(vs: Sequence[VectorK]) -> None:
    if not vs:
        raise OrthogonalityError("empty vector list")
    K, n = vs[0].K, vs[0].n
    for v in vs:
        if v.K != K:
            raise ValuedError("vectors live over different fields")
        if v.n != n:
            raise OrthogonalityError("vectors have different dimensions")


def _check_sphere(vs: Sequence[VectorK]) -> None:
    _check_dims(vs)
    for i, v in enumerate(vs):
        if not on_unit_sphere(v):
            raise OrthogonalityError(f"vector {i} is not on the unit sphere")


def pair_orthogonal(u: VectorK, v: VectorK) -> bool:
    """Two sphere vectors are orthogonal iff their residues span different lines."""
    _check_sphere([u, v])
    return rho_n(gamma_n(u)) != rho_n(gamma_n(v))


def residue_rank(vs: Sequence[VectorK]) -> int:
    F = vs[0].K.residue
    return rank_vecs(F, [gamma_n(v).coords for v in vs])


def set_orthogonal(vs: Sequence[VectorK]) -> bool:
    """Residue-rank criterion: orthogonal iff the reductions are independent."""
    _check_sphere(vs)
    if len(vs) > vs[0].n:
        return False
    return residue_rank(vs) == len(vs)


def c_matrix_criterion(vs: Sequence[VectorK]) -> bool:
    """Some l x l column block of the residue matrix is invertible."""
    _check_sphere(vs)
    l, n = len(vs), vs[0].n
    if l > n:
        return False
    F = vs[0].K.residue
    rows = [gamma_n(v).coords for v in vs]
    for cols in combinations(range(n), l):
        if rank_vecs(F, [tuple(r[c] for c in cols) for r in rows]) == l:
            return True
    return False


# -- determinants and the wedge norm --

def _perm_sign(p: Sequence[int]) -> int:
    s = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


@dataclass(frozen=True)
class _PermTable:
    even: Tuple[Tuple[int, ...], ...]
    odd: Tuple[Tuple[int, ...], ...]


_PERMS: dict = {}


def _perms(r: int) -> _PermTable:
    t = _PERMS.get(r)
    if t is None:
        ps = list(permutations(range(r)))
        t = _PermTable(tuple(p for p in ps if _perm_sign(p) > 0), tuple(p for p in ps if _perm_sign(p) < 0))
        _PERMS[r] = t
    return t


def _working_field(rows: Sequence[Sequence[ValuedElem]]) -> ValuedFieldSpec:
    """A precision wide enough that Leibniz sums of exact entries stay exact."""
    K = rows[0][0].K
    r = len(rows)
    longest = max((len(e.digits) for row in rows for e in row), default=1)
    extra = math.ceil(math.log(math.factorial(r), K.p)) + 2 if r > 1 else 1
    return K.with_precision(max(K.precision, r * longest + extra))


def _lift(e: ValuedElem, W: ValuedFieldSpec) -> ValuedElem:
    return e if e.K == W else replace(e, K=W)


def det_k(rows: Sequence[Sequence[ValuedElem]]) -> ValuedElem:
    """Leibniz determinant.  Even and odd permutation terms are summed
    separately and subtracted once, so exact cancellation stays exact.
    The result lives in a widened-precision copy of the field."""
    r = len(rows)
    W = _working_field(rows)
    M = [[_lift(e, W) for e in row] for row in rows]
    table = _perms(r)

    def total(perms):
        acc = ve_zero(W)
        for p in perms:
            t = ve_one(W)
            for i in range(r):
                t = ve_mul(t, M[i][p[i]])
                if t.nu == INF:
                    break
            acc = ve_add(acc, t)
        return acc

    return ve_sub(total(table.even), total(table.odd))


def _norm_le(a: Norm, b: Norm) -> bool:
    return not b < a


def wedge_norm(vs: Sequence[VectorK]) -> Norm:
    """max |det| over all l-column minors of the l x n matrix of vs.

    Minors whose value cancels below the stored precision are bounded by the
    precision they were known to; the maximum is returned only when those
    bounds cannot change it (the Hadamard bound is used as a ceiling).
    """
    _check_dims(vs)
    K, n, l = vs[0].K, vs[0].n, len(vs)
    if l > n:
        return Norm(K.q, None)
    best = Norm(K.q, None)
    unknown = None
    for cols in combinations(range(n), l):
        rows = [[v.entries[c] for c in cols] for v in vs]
        try:
            d = det_k(rows)
        except PrecisionError as exc:
            bound = Norm(K.q, -exc.bound) if exc.bound is not None else Norm(K.q, 10 ** 9)
            if unknown is None or unknown < bound:
                unknown = bound
            continue
        a = absval(d)
        if best < a:
            best = a
    if unknown is not None and not unknown < best:
        ceiling = hadamard_bound(vs)
        if best != ceiling:
            raise PrecisionError("wedge norm is not certified at this precision")
    return best


def hadamard_bound(vs: Sequence[VectorK]) -> Norm:
    out = Norm(vs[0].K.q, 0)
    for v in vs:
        out = out * inf_norm(v)
    return out


def hadamard_equality(vs: Sequence[VectorK]) -> bool:
    return wedge_norm(vs) == hadamard_bound(vs)


# -- definitional falsifier --

def _coefficients(K: ValuedFieldSpec, depth: int) -> List[ValuedElem]:
    """Integral elements with at most ``depth`` digits, units of depth 1 first."""
    q = K.q
    out = []
    seen = set()
    for d in range(1, depth + 1):
        for ds in product(range(q), repeat=d):
            key = ds + (0,) * (depth - d)
            if key in seen:
                continue
            seen.add(key)
            out.append(ve_from_digits(K, 0, ds) if any(ds) else ve_zero(K))
    return out


@dataclass(frozen=True)
class FalsifierVerdict:
    counterexample: Optional[Tuple[ValuedElem, ...]]

    @property
    def found(self) -> bool:
        return self.counterexample is not None

    def __str__(self):
        if self.counterexample is None:
            return "no-counterexample"
        return "counterexample(" + ", ".join(elem_to_str(c) for c in self.counterexample) + ")"


def _combination_is_short(lams: Sequence[ValuedElem], vs: Sequence[VectorK]) -> bool:
    """True when ||sum lam_i v_i|| < max ||lam_i v_i|| is certified."""
    target = max(absval(l) * inf_norm(v) for l, v in zip(lams, vs))
    if target.is_zero:
        return False
    K, n = vs[0].K, vs[0].n
    for i in range(n):
        acc = ve_zero(K)
        try:
            for l, v in zip(lams, vs):
                if l.nu != INF:
                    acc = ve_add(acc, ve_mul(l, v.entries[i]))
        except PrecisionError as exc:
            if exc.bound is None:
                return False
            a = Norm(K.q, -exc.bound)
        else:
            a = absval(acc)
        if not a < target:
            return False
    return True


def definitional_orthogonality_falsifier(vs: Sequence[VectorK], depth: int = 1) -> FalsifierVerdict:
    """Search for coefficients violating the ultrametric equality case.

    Coefficients range over integral elements with at most ``depth`` digits,
    at least one of them a unit.  Sound: every reported tuple is genuine.
    """
    _check_sphere(vs)
    K = vs[0].K
    coeffs = _coefficients(K, depth)
    for lams in product(coeffs, repeat=len(vs)):
        if not any(l.nu == 0 for l in lams):
            continue
        if _combination_is_short(lams, vs):
            return FalsifierVerdict(tuple(lams))
    return FalsifierVerdict(None)


# -- orthogonalization, K-rank, mu_n --

def _dependency(F, rows: Sequence[Tuple[int, ...]]):
    """First i whose row lies in the span of rows[:i], with coefficients a
    (a[i] = 1) such that sum a_j rows[j] = 0; None if independent."""
    for i, r in enumerate(rows):
        prefix = list(rows[:i])
        if rank_vecs(F, prefix + [r]) == rank_vecs(F, prefix):
            coeffs = _solve_combination(F, prefix, r)
            return i, [F.neg(c) for c in coeffs] + [1]
    return None


def _solve_combination(F, rows: Sequence[Tuple[int, ...]], target: Tuple[int, ...]) -> List[int]:
    """Coefficients c with sum c_j rows[j] = target (target in the span)."""
    t = len(rows)
    n = len(target)
    aug = [[rows[j][i] for j in range(t)] + [target[i]] for i in range(n)]
    add, mul, neg, inv = F.add, F.mul, F.neg, F.inv
    piv_cols = []
    r = 0
    for col in range(t):
        piv = next((i for i in range(r, n) if aug[i][col]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        c = inv(aug[r][col])
        aug[r] = [mul(c, x) for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][col]:
                f = neg(aug[i][col])
                aug[i] = [add(a, mul(f, b)) for a, b in zip(aug[i], aug[r])]
        piv_cols.append(col)
        r += 1
    sol = [0] * t
    for i, col in enumerate(piv_cols):
        sol[col] = aug[i][t]
    return sol


def orthogonalize(vs: Sequence[VectorK], max_steps: Optional[int] = None) -> SubspaceK:
    """Orthogonal unit-sphere basis of span(vs).

    Each step finds an F_q-dependency among residues, replaces the last vector
    involved by the lifted combination (which has positive valuation or is
    zero) and renormalizes.  Zero combinations are dropped, so spanning lists
    with redundant vectors are accepted.
    """
    _check_dims(vs)
    K = vs[0].K
    cur: List[VectorK] = []
    for i, v in enumerate(vs):
        if is_zero_vector(v):
            raise OrthogonalityError(f"input vector {i} is zero")
        cur.append(normalize_to_sphere(v))
    F = K.residue
    steps = 0
    limit = max_steps if max_steps is not None else len(vs) * K.precision + len(vs)
    while True:
        dep = _dependency(F, [gamma_n(v).coords for v in cur])
        if dep is None:
            break
        if steps >= limit:
            raise PrecisionError(f"orthogonalization did not settle in {limit} steps")
        steps += 1
        i, a = dep
        w = linear_combination([delta(K, c) for c in a], cur[: i + 1])
        if is_zero_vector(w):
            del cur[i]
        else:
            cur[i] = normalize_to_sphere(w)
    if len(cur) > vs[0].n:  # pragma: no cover - residues cannot exceed n
        raise OrthogonalityError("more independent residues than coordinates")
    return SubspaceK(K, vs[0].n, tuple(cur))


def subspace(vs: Sequence[VectorK]) -> SubspaceK:
    return orthogonalize(vs)


def rank_k(vs: Sequence[VectorK]) -> int:
    """K-rank via the largest nonvanishing minor.  Raises PrecisionError if a
    minor cannot be certified zero or nonzero."""
    _check_dims(vs)
    n = vs[0].n
    top = min(len(vs), n)
    for r in range(top, 0, -1):
        uncertain = False
        for rs in combinations(range(len(vs)), r):
            for cs in combinations(range(n), r):
                try:
                    d = det_k([[vs[i].entries[c] for c in cs] for i in rs])
                except PrecisionError:
                    uncertain = True
                    continue
                if d.nu != INF:
                    return r
        if uncertain:
            raise PrecisionError(f"cannot certify the {r} x {r} minors")
    return 0


def same_span(us: Sequence[VectorK], vs: Sequence[VectorK]) -> bool:
    """Mutual membership: rank(us) = rank(vs) = rank(us + vs)."""
    r = rank_k(us)
    return r == rank_k(vs) == rank_k(list(us) + list(vs))


def mu_n(V: SubspaceK) -> SubspaceFq:
    """Residue subspace of V, read off an orthogonal basis."""
    F = V.K.residue
    return SubspaceFq(F, V.n, rref(F, [gamma_n(b).coords for b in V.basis]))


def feebly_orthogonal(U: SubspaceK, V: SubspaceK) -> bool:
    if U.dim != V.dim or U.n != V.n:
        raise OrthogonalityError("feeble orthogonality compares subspaces of equal dimension")
    return mu_n(U) != mu_n(V)


def _line_orthogonal_to(u: VectorK, V: SubspaceK, depth: int) -> bool:
    """No depth-bounded combination v of V's basis breaks orthogonality of {u, v}."""
    coeffs = _coefficients(V.K, depth)
    for lams in product(coeffs, repeat=V.dim):
        if not any(l.nu == 0 for l in lams):
            continue
        v = normalize_to_sphere(linear_combination(lams, V.basis))
        if definitional_orthogonality_falsifier([u, v], depth).found:
            return False
    return True


def feeble_witness_search(U: SubspaceK, V: SubspaceK, depth: int = 1) -> Optional[VectorK]:
    """Bounded search straight from the definition: a vector u of U (or of V)
    whose line survives every depth-bounded orthogonality test against the
    other subspace.  Returns the first such vector, or None."""
    for A, B in ((U, V), (V, U)):
        coeffs = _coefficients(A.K, depth)
        for lams in product(coeffs, repeat=A.dim):
            if not any(l.nu == 0 for l in lams):
                continue
            u = normalize_to_sphere(linear_combination(lams, A.basis))
            if _line_orthogonal_to(u, B, depth):
                return u
    return None


# -- text form --

def vector_to_str(v: VectorK) -> str:
    return "(" + ", ".join(elem_to_str(e) for e in v.entries) + ")"


def _split_top(text: str, sep: str) -> List[Tuple[str, int]]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append((text[start:i], start))
            start = i + 1
    parts.append((text[start:], start))
    return parts


def parse_vector(K: ValuedFieldSpec, text: str) -> VectorK:
    """Parse ``(e1, e2, ...)`` with entries in the element syntax."""
    s = text.strip()
    off = len(text) - len(text.lstrip())
    if not (s.startswith("(") and s.endswith(")")):
        raise ParseError("vector literal must be wrapped in parentheses", off)
    entries = []
    for part, pos in _split_top(s[1:-1], ","):
        try:
            entries.append(parse_elem(K, part))
        except ParseError as exc:
            raise ParseError(f"entry {len(entries) + 1}: {exc.msg}", off + 1 + pos + exc.pos) from None
    return vector(K, entries)


def parse_vectors(K: ValuedFieldSpec, text: str) -> List[VectorK]:
    """Semicolon-separated vector literals."""
    out = []
    for part, pos in _split_top(text, ";"):
        if part.strip():
            try:
                out.append(parse_vector(K, part))
            except ParseError as exc:
                raise ParseError(exc.msg, pos + exc.pos) from None
    return out
