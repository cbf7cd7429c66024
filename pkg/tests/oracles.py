"""Independent oracles used to freeze expected values.

Nothing here imports the package.  Vectors over O/pi^2 are digit arrays
``(a0, a1)`` meaning ``a0 + a1*pi`` with digits in a prime field F_q, so
products and sums are plain polynomial arithmetic mod q.
"""

from __future__ import annotations

from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Dict, List, Sequence, Tuple

import numpy as np

N_DIGITS = 4  # exact for 3x3 minors of entries with two digits


# -- polynomial arithmetic over F_q[pi]/pi^N, vectorized over a leading axis --

def pmul(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    out = np.zeros(a.shape[:-1] + (N_DIGITS,), dtype=np.int64)
    for i in range(a.shape[-1]):
        for j in range(b.shape[-1]):
            if i + j < N_DIGITS:
                out[..., i + j] += a[..., i] * b[..., j]
    return out % q


def pad(a: np.ndarray) -> np.ndarray:
    out = np.zeros(a.shape[:-1] + (N_DIGITS,), dtype=np.int64)
    out[..., : a.shape[-1]] = a
    return out


def _perm_sign(p: Sequence[int]) -> int:
    s = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def det_poly(M: np.ndarray, q: int) -> np.ndarray:
    """Leibniz determinant of (..., l, l, digits) digit matrices."""
    l = M.shape[-3]
    acc = np.zeros(M.shape[:-3] + (N_DIGITS,), dtype=np.int64)
    for p in permutations(range(l)):
        term = pad(M[..., 0, p[0], :])
        for r in range(1, l):
            term = pmul(term, M[..., r, p[r], :], q)
        acc = acc + _perm_sign(p) * term
    return acc % q


def valuation_poly(a: np.ndarray) -> np.ndarray:
    """Index of the first nonzero digit; N_DIGITS encodes zero."""
    nz = a != 0
    first = np.argmax(nz, axis=-1)
    return np.where(nz.any(axis=-1), first, N_DIGITS)


def wedge_valuation(T: np.ndarray, q: int) -> np.ndarray:
    """min valuation over all l x l column minors of (..., l, n, digits) tuples."""
    l, n = T.shape[-3], T.shape[-2]
    best = np.full(T.shape[:-3], N_DIGITS, dtype=np.int64)
    for cols in combinations(range(n), l):
        d = det_poly(T[..., :, list(cols), :], q)
        best = np.minimum(best, valuation_poly(d))
    return best


# -- enumeration of depth-2 unit-sphere vectors and tuple orbits --

def sphere_codes(q: int, n: int) -> List[Tuple[Tuple[int, int], ...]]:
    """All (a0 + a1 pi)-entry vectors with some unit entry."""
    digs = list(product(range(q), repeat=2))
    return [v for v in product(digs, repeat=n) if any(e[0] for e in v)]


def _code(v, q: int) -> int:
    c = 0
    for a0, a1 in reversed(v):
        c = c * q * q + a0 + q * a1
    return c


def _decode(c: int, q: int, n: int):
    out = []
    for _ in range(n):
        d = c % (q * q)
        out.append((d % q, d // q))
        c //= q * q
    return tuple(out)


def _scale(v, c: int, q: int):
    return tuple(((c * a0) % q, (c * a1) % q) for a0, a1 in v)


def _normal(v, q: int) -> int:
    return min(_code(_scale(v, c, q), q) for c in range(1, q))


def tuple_orbit_representatives(q: int, n: int, l: int) -> List[Tuple[Tuple[Tuple[int, int], ...], ...]]:
    """Multisets of l sphere vectors, one per orbit of the group generated by
    reordering the tuple, scaling single vectors by F_q^*, and monomial
    column transformations (coordinate permutations and F_q^* scalings).

    Each of these maps preserves ||.|| on K^n and the unit sphere, so it
    preserves every orthogonality criterion.
    """
    vecs = sphere_codes(q, n)
    normals = sorted({_normal(v, q) for v in vecs})
    index = {c: i for i, c in enumerate(normals)}
    size = (q * q) ** n
    maps = []
    for perm in permutations(range(n)):
        for d in product(range(1, q), repeat=n):
            m = np.full(size, -1, dtype=np.int64)
            for c in normals:
                v = _decode(c, q, n)
                w = tuple(_scale((v[perm[j]],), d[j], q)[0] for j in range(n))
                m[c] = index[_normal(w, q)]
            maps.append(m)
    codes = np.array(normals, dtype=np.int64)
    B = len(normals)
    reps = []
    # the smallest entry of a canonical multiset is minimal in its own orbit
    orbit_min = np.min(np.stack([m[codes] for m in maps]), axis=0)
    firsts = [a for a in range(B) if orbit_min[a] == a]
    for a in firsts:
        rest = np.array(list(combinations_with_replacement(range(a, B), l - 1)), dtype=np.int64)
        chunk = np.hstack([np.full((max(len(rest), 1), 1), a, dtype=np.int64),
                           rest.reshape(max(len(rest), 1), l - 1)])
        own = _key(chunk, B)
        best = own.copy()
        for m in maps:
            img = np.sort(m[codes[chunk]], axis=1)
            best = np.minimum(best, _key(img, B))
        for row in chunk[own == best]:
            reps.append(tuple(_decode(int(codes[i]), q, n) for i in row))
    return reps


def _key(rows: np.ndarray, B: int) -> np.ndarray:
    k = np.zeros(len(rows), dtype=np.int64)
    for j in range(rows.shape[1]):
        k = k * B + rows[:, j]
    return k


def tuples_to_array(reps, l: int, n: int) -> np.ndarray:
    return np.array(reps, dtype=np.int64).reshape(len(reps), l, n, 2)


def _rank_rows(A: List[List[int]], q: int) -> int:
    A = [list(r) for r in A]
    rank, col = 0, 0
    rows, cols = len(A), len(A[0]) if A else 0
    while rank < rows and col < cols:
        piv = next((i for i in range(rank, rows) if A[i][col] % q), None)
        if piv is None:
            col += 1
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][col], q - 2, q)
        A[rank] = [(x * inv) % q for x in A[rank]]
        for i in range(rows):
            if i != rank and A[i][col] % q:
                f = A[i][col]
                A[i] = [(x - f * y) % q for x, y in zip(A[i], A[rank])]
        rank += 1
        col += 1
    return rank


def residue_rank_mod_q(T: np.ndarray, q: int) -> np.ndarray:
    """Rank over F_q of the residue rows of each tuple."""
    return np.array([_rank_rows(M.tolist(), q) for M in T[..., 0]])


# -- plain finite geometry --

def gf_rank(vecs: Sequence[Sequence[int]], q: int) -> int:
    """Rank over a prime field F_q."""
    return _rank_rows([list(v) for v in vecs], q)


def gaussian_binomial_product(n: int, s: int, q: int) -> int:
    num, den = 1, 1
    for i in range(s):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def brute_force_ind(q: int, n: int, k: int, l: int, projective: bool = False) -> int:
    """Largest S whose k-subsets all span >= l, by exhaustive subset search
    from the largest size down.  Prime q only; tiny spaces only."""
    pts = [v for v in product(range(q), repeat=n) if any(v)]
    if projective:
        pts = [v for v in pts if v[next(i for i, x in enumerate(v) if x)] == 1]
    for size in range(len(pts), 0, -1):
        if size < k:
            return size
        for S in combinations(pts, size):
            if all(gf_rank(X, q) >= l for X in combinations(S, k)):
                return size
    return 0
