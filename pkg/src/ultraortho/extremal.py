"""Exact extremal sizes: Delta, Omega, Ind, Ind^pro, Theta, Gamma.

Delta and Omega reduce to the symmetric profile program

    maximize sum(t)  subject to  sum(t_i for i in I) <= k-1  for |I| <= l-1,

solved in closed form over sorted heads.  Ind, Ind^pro and Theta reduce to a
cap program over F_q-points: every (l-1)-dimensional subspace W may carry at
most k-1 units of weight.  That program is solved by depth-first
branch-and-bound (largest value first, deterministic point order), so the
reported witness is the first optimum in that order.

Every witness is re-checked against the literal definition when the number of
k-subsets is within budget, and against the cap characterization otherwise.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .ffgeom import (
    PointFq,
    ProjPoint,
    gaussian_binomial,
    incidence,
    iter_rref,
    proj_vectors,
    rank_gf2,
    rank_vecs,
    rho_n,
    to_mask,
)
from .gf import FieldError, field_of_order
from .linalg_k import (
    SubspaceK,
    VectorK,
    delta_n,
    feeble_witness_search,
    gamma_n,
    hadamard_equality,
    mu_n,
    rank_k,
    vadd,
    vector_to_str,
)
from .valued import PrecisionError, ValuedFieldSpec, laurent, ve_from_digits, ve_zero

QUANTITIES = ("delta", "omega", "ind", "indpro", "theta", "gamma")
DEFAULT_SUBSET_BUDGET = 200_000


class ParameterError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class WitnessError(AssertionError):
    """A solver produced a witness that fails re-validation."""


@dataclass
class ExtremalResult:
    quantity: str
    q: int
    n: int
    s: int
    k: int
    l: int
    value: int
    witness: object
    method: str
    elapsed: float = 0.0
    validation: str = ""
    extra: Dict[str, object] = field(default_factory=dict)

    def key(self) -> str:
        return query_key(self.quantity, self.q, self.n, self.s, self.k, self.l)


def query_key(quantity: str, q: int, n: int, s: int, k: int, l: int) -> str:
    return f"{quantity},{q},{n},{s},{k},{l}"


# -- the profile program --

@dataclass(frozen=True)
class ProfileIP:
    m: int
    cap: int
    window: int

    def __post_init__(self):
        if self.m < 1 or self.window < 1 or self.cap < 0:
            raise ParameterError(f"invalid profile program {self}")

    @classmethod
    def from_kl(cls, m: int, k: int, l: int) -> "ProfileIP":
        return cls(m, k - 1, l - 1)

    @property
    def effective_window(self) -> int:
        return min(self.window, self.m)

    def feasible(self, t: Sequence[int]) -> bool:
        """Every set of at most ``window`` slots carries at most ``cap``."""
        if len(t) != self.m or any(x < 0 for x in t):
            return False
        top = sorted(t, reverse=True)[: self.effective_window]
        return sum(top) <= self.cap


def _heads(w: int, cap: int, ceiling: int):
    """Non-increasing tuples of length w with entries <= ceiling, sum <= cap,
    in lexicographically decreasing order."""
    if w == 0:
        yield ()
        return
    for a in range(min(ceiling, cap), -1, -1):
        for rest in _heads(w - 1, cap - a, a):
            yield (a,) + rest


def profile_ip_solve(ip: ProfileIP) -> Tuple[int, Tuple[int, ...]]:
    """Exact optimum and a non-increasing optimal profile.

    An optimum can be taken non-increasing with every slot past the window
    equal to the last head entry, so only sorted heads are searched.  When
    the window exceeds m the program caps the total at ``cap``.
    """
    w = ip.effective_window
    best, arg = -1, None
    for head in _heads(w, ip.cap, ip.cap):
        tail = head[-1] if head else 0
        val = sum(head) + (ip.m - w) * tail
        if val > best:
            best, arg = val, head + (tail,) * (ip.m - w)
    return best, arg


def profile_ip_closed_form(ip: ProfileIP) -> int:
    w = ip.effective_window
    return ip.cap + (ip.m - w) * (ip.cap // w)


def profile_ip_bruteforce(ip: ProfileIP) -> Tuple[int, Tuple[int, ...]]:
    """Literal enumeration of every profile in [0, cap]^m, every slot subset
    of size at most ``window`` checked.  For small m only."""
    subsets = [I for r in range(1, ip.effective_window + 1) for I in combinations(range(ip.m), r)]
    best, arg = -1, None
    for t in product(range(ip.cap + 1), repeat=ip.m):
        s = sum(t)
        if s <= best:
            continue
        if all(sum(t[i] for i in I) <= ip.cap for I in subsets):
            best, arg = s, t
    return best, arg


def sandwich_bounds(m: int, k: int, l: int) -> Tuple[int, int]:
    """floor((k-1)/(l-1)) * m and floor((k-1) m / (l-1))."""
    return ((k - 1) // (l - 1)) * m, ((k - 1) * m) // (l - 1)


# -- lifts to the unit sphere --

def _tail(K: ValuedFieldSpec, j: int):
    """pi * (base-q digits of j); j = 0 gives 0."""
    if j == 0:
        return ve_zero(K)
    ds = []
    while j:
        j, d = divmod(j, K.q)
        ds.append(d)
    if len(ds) + 1 > K.precision:
        raise PrecisionError(f"lift index needs {len(ds) + 1} digits, precision is {K.precision}")
    return ve_from_digits(K, 1, ds)


def fiber_lifts(K: ValuedFieldSpec, w: PointFq, count: int, coord: int = 0) -> List[VectorK]:
    """``count`` distinct sphere vectors reducing to w: delta_n(w) + pi*tail_j*e_coord."""
    base = delta_n(K, w)
    out = []
    for j in range(count):
        t = _tail(K, j)
        if t.nu == float("inf"):
            out.append(base)
            continue
        e = [ve_zero(K)] * w.n
        e[coord] = t
        out.append(vadd(base, VectorK(K, tuple(e))))
    return out


def _default_field(q: int, K: Optional[ValuedFieldSpec]) -> ValuedFieldSpec:
    if K is None:
        return laurent(q, 4)
    if K.q != q:
        raise ParameterError(f"field has residue size {K.q}, expected {q}")
    return K


# -- parameter checks --

def _check_kl(k: int, l: int) -> None:
    if not (isinstance(k, int) and isinstance(l, int)) or l < 2 or k < l:
        raise ParameterError(f"need k >= l >= 2, got k={k}, l={l}")


def _check_q(q: int) -> None:
    try:
        field_of_order(q)
    except FieldError as exc:
        raise ParameterError(str(exc)) from None


# -- Delta and Omega --

def delta_weak(q: int, n: int, k: int, l: int, K: Optional[ValuedFieldSpec] = None,
               materialize: bool = True, budget: int = DEFAULT_SUBSET_BUDGET) -> ExtremalResult:
    """Maximum (k,l)-weakly orthogonal set in K^n: profile program on the
    (q^n-1)/(q-1) projective residue classes."""
    _check_kl(k, l)
    _check_q(q)
    if n < 1:
        raise ParameterError("n must be >= 1")
    t0 = time.perf_counter()
    m = (q ** n - 1) // (q - 1)
    value, profile = profile_ip_solve(ProfileIP.from_kl(m, k, l))
    witness = {"profile": list(profile)}
    res = ExtremalResult("delta", q, n, 0, k, l, value, witness, "profile-IP")
    if materialize:
        Kf = _default_field(q, K)
        F = Kf.residue
        reps = proj_vectors(F, n)
        S = []
        for rep, t in zip(reps, profile):
            S.extend(fiber_lifts(Kf, PointFq(F, rep), t))
        witness["vectors"] = [vector_to_str(v) for v in S]
        res.validation = _validate_delta(S, k, l, value, budget)
        res.extra["set"] = S
    res.elapsed = time.perf_counter() - t0
    return res


def _validate_delta(S: List[VectorK], k: int, l: int, value: int, budget: int) -> str:
    if len(S) != value or len(set(S)) != len(S):
        raise WitnessError("delta witness has the wrong size or repeats")
    try:
        ok = definitional_oracle("delta", k, l, S, budget=budget)
        how = "definitional"
    except BudgetExceeded:
        counts: Dict[tuple, int] = {}
        for v in S:
            key = rho_n(gamma_n(v)).rep.coords
            counts[key] = counts.get(key, 0) + 1
        top = sorted(counts.values(), reverse=True)[: l - 1]
        ok = sum(top) <= k - 1
        how = "characterization"
    if not ok:
        raise WitnessError("delta witness is not (k,l)-weakly orthogonal")
    return how


def omega_feeble(q: int, s: int, n: int, k: int, l: int, K: Optional[ValuedFieldSpec] = None,
                 materialize: bool = True, budget: int = DEFAULT_SUBSET_BUDGET) -> ExtremalResult:
    """Maximum (k,l)-feebly orthogonal family in Gr_{s,n}(K).

    For s < n each residue subspace has infinitely many lifts, and the value is
    the profile program on [n s]_q slots.  For s = n the Grassmannian is a
    single point and the value is 1.
    """
    _check_kl(k, l)
    _check_q(q)
    if not 1 <= s <= n:
        raise ParameterError(f"need 1 <= s <= n, got s={s}, n={n}")
    t0 = time.perf_counter()
    m = gaussian_binomial(n, s, q)
    if s == n:
        value, profile, method = 1, (1,), "closed-form"
    else:
        value, profile = profile_ip_solve(ProfileIP.from_kl(m, k, l))
        method = "profile-IP"
    witness = {"profile": list(profile)}
    res = ExtremalResult("omega", q, n, s, k, l, value, witness, method)
    if materialize:
        Kf = _default_field(q, K)
        fam = omega_family(Kf, s, n, profile)
        witness["subspaces"] = [[vector_to_str(b) for b in V.basis] for V in fam]
        res.validation = _validate_omega(fam, k, l, value, budget)
        res.extra["family"] = fam
    res.elapsed = time.perf_counter() - t0
    return res


def omega_family(K: ValuedFieldSpec, s: int, n: int, profile: Sequence[int]) -> List[SubspaceK]:
    """Lift t_W distinct K-subspaces over every residue subspace W (RREF
    order): the first basis vector delta_n(w_1) gets pi*tail_j on a
    coordinate outside W."""
    F = K.residue
    fam = []
    for rows, t in zip(iter_rref(F, s, n), profile):
        if t == 0:
            continue
        pivots = [next(i for i, c in enumerate(r) if c) for r in rows]
        free = next((c for c in range(n) if c not in pivots), None)
        basis = [delta_n(K, PointFq(F, r)) for r in rows]
        if free is None:
            fam.append(SubspaceK(K, n, tuple(basis)))
            continue
        for j, b0 in enumerate(fiber_lifts(K, PointFq(F, rows[0]), t, coord=free)):
            fam.append(SubspaceK(K, n, (b0,) + tuple(basis[1:])))
    return fam


def _validate_omega(fam: List[SubspaceK], k: int, l: int, value: int, budget: int) -> str:
    if len(fam) != value:
        raise WitnessError("omega witness has the wrong size")
    s = fam[0].dim
    for A, B in combinations(fam, 2):
        if rank_k(list(A.basis) + list(B.basis)) == s:
            raise WitnessError("omega witness repeats a subspace")
    try:
        ok = definitional_oracle("omega", k, l, fam, budget=budget)
        how = "definitional"
    except BudgetExceeded:
        counts: Dict[tuple, int] = {}
        for V in fam:
            key = mu_n(V).rows
            counts[key] = counts.get(key, 0) + 1
        ok = sum(sorted(counts.values(), reverse=True)[: l - 1]) <= k - 1
        how = "characterization"
    if not ok:
        raise WitnessError("omega witness is not (k,l)-feebly orthogonal")
    return how


# -- the cap program --

@dataclass
class _CapProblem:
    npts: int
    members: Tuple[Tuple[int, ...], ...]
    cap: int
    ub: int
    forced: Tuple[int, ...] = ()


def _greedy(prob: _CapProblem, forced_min: List[int]) -> Tuple[int, List[int]]:
    res = [prob.cap] * len(prob.members)
    pw = _point_ws(prob)
    x = [0] * prob.npts
    for i in range(prob.npts):
        hi = min([prob.ub] + [res[w] for w in pw[i]])
        if hi < forced_min[i]:
            return -1, x
        x[i] = hi
        for w in pw[i]:
            res[w] -= hi
    return sum(x), x


def _point_ws(prob: _CapProblem) -> List[List[int]]:
    pw: List[List[int]] = [[] for _ in range(prob.npts)]
    for j, mem in enumerate(prob.members):
        for i in mem:
            pw[i].append(j)
    return pw


class _Search:
    """Depth-first branch-and-bound for the cap program."""

    def __init__(self, prob: _CapProblem, node_limit: Optional[int] = None):
        self.prob = prob
        self.pw = _point_ws(prob)
        self.deg = [len(p) for p in self.pw]
        self.r = min(self.deg) if self.deg and min(self.deg) > 0 else 0
        self.forced_min = [0] * prob.npts
        for i in prob.forced:
            self.forced_min[i] = 1
        self.node_limit = node_limit
        self.nodes = 0

    def run(self, prefix: Sequence[int] = (), floor: int = -1) -> Tuple[int, Optional[List[int]]]:
        """Best completion of ``prefix`` with value > floor (or (floor, None))."""
        prob = self.prob
        res = [prob.cap] * len(prob.members)
        x = [0] * prob.npts
        for i, val in enumerate(prefix):
            for w in self.pw[i]:
                res[w] -= val
            x[i] = val
        if any(r < 0 for r in res):
            return floor, None
        self.res, self.x = res, x
        self.best, self.best_x = floor, None
        self._dfs(len(prefix), sum(prefix), sum(res))
        return self.best, self.best_x

    def _dfs(self, i: int, cur: int, resid: int) -> None:
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise BudgetExceeded(f"branch-and-bound exceeded {self.node_limit} nodes")
        prob, res, pw, x = self.prob, self.res, self.pw, self.x
        npts = prob.npts
        if i == npts:
            if cur > self.best:
                self.best, self.best_x = cur, list(x)
            return
        best = self.best
        if self.r and cur + resid // self.r <= best:
            return
        room = 0
        ub = prob.ub
        for j in range(i, npts):
            h = ub
            for w in pw[j]:
                if res[w] < h:
                    h = res[w]
            room += h
            if j == i:
                hi = h
        if cur + room <= best:
            return
        lo = self.forced_min[i]
        d = self.deg[i]
        wi = pw[i]
        for val in range(hi, lo - 1, -1):
            for w in wi:
                res[w] -= val
            x[i] = val
            self._dfs(i + 1, cur + val, resid - val * d)
            for w in wi:
                res[w] += val
            x[i] = 0
            if cur + room - (hi - val) <= self.best and val > lo:
                # lowering x_i further cannot beat the incumbent
                break


def _prefixes(prob: _CapProblem, depth: int, forced_min: List[int]) -> List[Tuple[int, ...]]:
    pw = _point_ws(prob)
    out: List[Tuple[int, ...]] = []

    def rec(i, res, acc):
        if i == depth:
            out.append(tuple(acc))
            return
        hi = min([prob.ub] + [res[w] for w in pw[i]])
        for val in range(hi, forced_min[i] - 1, -1):
            for w in pw[i]:
                res[w] -= val
            rec(i + 1, res, acc + [val])
            for w in pw[i]:
                res[w] += val

    rec(0, [prob.cap] * len(prob.members), [])
    return out


def _solve_subtree(args):
    prob, prefix, floor, node_limit = args
    s = _Search(prob, node_limit)
    val, x = s.run(prefix, floor)
    return val, x, s.nodes


def solve_cap_program(prob: _CapProblem, workers: int = 1, node_limit: Optional[int] = None
                      ) -> Tuple[int, List[int], int]:
    """(optimum, first optimal assignment in search order, nodes visited)."""
    if not prob.members:
        x = [prob.ub] * prob.npts
        return sum(x), x, 1
    search = _Search(prob, node_limit)
    g, gx = _greedy(prob, search.forced_min)
    floor = g - 1 if g >= 0 else -1
    if workers <= 1:
        val, x = search.run((), floor)
        if x is None:  # pragma: no cover - greedy solution is always reachable
            raise WitnessError("search lost the greedy incumbent")
        return val, x, search.nodes
    depth = min(prob.npts, 3)
    prefixes = _prefixes(prob, depth, search.forced_min)
    tasks = [(prob, p, floor, node_limit) for p in prefixes]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        outs = list(ex.map(_solve_subtree, tasks))
    best, best_x, nodes = floor, None, 0
    for val, x, nd in outs:  # prefixes are in search order: first optimum wins
        nodes += nd
        if x is not None and val > best:
            best, best_x = val, x
    return best, best_x, nodes


def cap_problem(q: int, n: int, k: int, l: int, projective: bool, ub: int = 1,
                symmetry: bool = False):
    """Points, subspaces and the cap program for the given parameters."""
    pts, subs, members = incidence(q, n, l - 1, projective)
    forced: Tuple[int, ...] = ()
    if symmetry and l >= 1:
        pos = {v: i for i, v in enumerate(pts)}
        forced = tuple(sorted(pos[tuple(1 if j == i else 0 for j in range(n))] for i in range(l)))
    return pts, _CapProblem(len(pts), members, k - 1, ub, forced)


def _check_ind(q: int, n: int, k: int, l: int, total: int) -> None:
    _check_q(q)
    if n < 1:
        raise ParameterError("n must be >= 1")
    if not 1 <= l <= min(k, n):
        raise ParameterError(f"need 1 <= l <= min(k, n), got k={k}, l={l}, n={n}")
    if k > total:
        raise ParameterError(f"need k <= {total}, got k={k}")


def ind(q: int, n: int, k: int, l: int, *, symmetry: bool = False, workers: int = 1,
        node_limit: Optional[int] = None, budget: int = DEFAULT_SUBSET_BUDGET) -> ExtremalResult:
    """Ind_q(n,k,l): largest S in F_q^n minus 0 whose k-subsets all span >= l.

    Solved as: every (l-1)-dimensional subspace holds at most k-1 points of S.
    """
    _check_ind(q, n, k, l, q ** n - 1)
    return _ind_common("ind", q, n, k, l, False, symmetry, workers, node_limit, budget)


def ind_pro(q: int, n: int, k: int, l: int, *, symmetry: bool = False, workers: int = 1,
            node_limit: Optional[int] = None, budget: int = DEFAULT_SUBSET_BUDGET) -> ExtremalResult:
    """Projective version: points of P^{n-1}(F_q), W counted by projective points."""
    _check_ind(q, n, k, l, (q ** n - 1) // (q - 1))
    return _ind_common("indpro", q, n, k, l, True, symmetry, workers, node_limit, budget)


def _ind_common(name, q, n, k, l, projective, symmetry, workers, node_limit, budget):
    t0 = time.perf_counter()
    pts, prob = cap_problem(q, n, k, l, projective, 1, symmetry)
    value, x, nodes = solve_cap_program(prob, workers, node_limit)
    S = [pts[i] for i in range(len(pts)) if x[i]]
    res = ExtremalResult(name, q, n, 0, k, l, value, [list(v) for v in S], "branch-and-bound")
    res.extra["nodes"] = nodes
    F = field_of_order(q)
    res.validation = validate_independent_set(F, S, k, l, projective, budget)
    res.elapsed = time.perf_counter() - t0
    return res


def is_independent_definitional(F, S: Sequence[Tuple[int, ...]], k: int, l: int,
                                budget: int = DEFAULT_SUBSET_BUDGET) -> bool:
    """Every k-subset of S spans dimension >= l (literal check)."""
    if comb(len(S), k) > budget:
        raise BudgetExceeded(f"C({len(S)},{k}) k-subsets exceed budget {budget}")
    if F.q == 2:
        masks = [to_mask(v) for v in S]
        return all(rank_gf2(X) >= l for X in combinations(masks, k))
    return all(rank_vecs(F, list(X)) >= l for X in combinations(S, k))


def cap_counts_ok(F, S: Sequence[Tuple[int, ...]], k: int, l: int, projective: bool) -> bool:
    n = len(S[0]) if S else 1
    _, _, members = incidence(F.q, n, l - 1, projective)
    pts, _, _ = incidence(F.q, n, l - 1, projective)
    pos = {v: i for i, v in enumerate(pts)}
    chosen = {pos[tuple(v)] for v in S}
    return all(sum(1 for i in mem if i in chosen) <= k - 1 for mem in members)


def validate_independent_set(F, S, k, l, projective, budget) -> str:
    S = [tuple(v) for v in S]
    if len(set(S)) != len(S):
        raise WitnessError("independent-set witness repeats a point")
    if projective and any(next(c for c in v if c) != 1 for v in S):
        raise WitnessError("projective witness has a non-normalized point")
    try:
        ok = is_independent_definitional(F, S, k, l, budget)
        how = "definitional"
    except BudgetExceeded:
        ok = cap_counts_ok(F, S, k, l, projective)
        how = "characterization"
    if not ok:
        raise WitnessError("witness is not (k,l)-independent")
    return how


def validate_cap_characterization(q: int, n: int, k: int, l: int, projective: bool = False,
                                  max_points: int = 15) -> bool:
    """Check, over every subset S of the point set, that

        (every k-subset of S spans >= l)  <=>  (|S & W| <= k-1 for all W).

    The left side is computed literally with a subset recursion; both sides
    are evaluated for all 2^P subsets.  Only for P <= max_points.
    """
    pts, _, members = incidence(q, n, l - 1, projective)
    P = len(pts)
    if P > max_points:
        raise BudgetExceeded(f"{P} points exceed the exhaustive limit {max_points}")
    F = field_of_order(q)
    full = 1 << P
    # bad[S]: S contains a k-subset of rank < l
    bad = bytearray(full)
    pc = [bin(S).count("1") for S in range(full)]
    for S in range(full):
        c = pc[S]
        if c < k:
            continue
        if c == k:
            vecs = [pts[i] for i in range(P) if S >> i & 1]
            bad[S] = rank_vecs(F, vecs) < l
            continue
        T = S
        while T:
            low = T & -T
            if bad[S ^ low]:
                bad[S] = 1
                break
            T ^= low
    wmasks = [sum(1 << i for i in mem) for mem in members]
    for S in range(full):
        char_bad = any(bin(S & wm).count("1") >= k for wm in wmasks)
        if char_bad != bool(bad[S]):
            return False
    return True


# -- Theta and Gamma --

def theta(q: int, n: int, k: int, l: int, *, K: Optional[ValuedFieldSpec] = None,
          symmetry: bool = False, workers: int = 1, node_limit: Optional[int] = None,
          materialize: bool = True, budget: int = DEFAULT_SUBSET_BUDGET) -> ExtremalResult:
    """Theta_n^(k,l): largest (k,l)-orthogonal S on the unit sphere.

    Multiplicity program: m_v lifts over each nonzero residue v, with
    sum of m_v over W minus 0 at most k-1 for every (l-1)-dim W.
    """
    _check_kl(k, l)
    _check_q(q)
    if l > n:
        raise ParameterError(f"need l <= n, got l={l}, n={n}")
    t0 = time.perf_counter()
    pts, prob = cap_problem(q, n, k, l, False, k - 1, symmetry)
    value, x, nodes = solve_cap_program(prob, workers, node_limit)
    mult = [[list(pts[i]), x[i]] for i in range(len(pts)) if x[i]]
    witness = {"multiplicities": mult}
    res = ExtremalResult("theta", q, n, 0, k, l, value, witness, "branch-and-bound")
    res.extra["nodes"] = nodes
    if materialize:
        Kf = _default_field(q, K)
        F = Kf.residue
        S = []
        for v, m in mult:
            S.extend(fiber_lifts(Kf, PointFq(F, tuple(v)), m))
        witness["vectors"] = [vector_to_str(v) for v in S]
        res.extra["set"] = S
        res.validation = _validate_theta(S, k, l, value, budget)
    res.elapsed = time.perf_counter() - t0
    return res


def _validate_theta(S, k, l, value, budget) -> str:
    if len(S) != value or len(set(S)) != len(S):
        raise WitnessError("theta witness has the wrong size or repeats")
    try:
        ok = definitional_oracle("theta", k, l, S, budget=budget)
        how = "definitional"
    except BudgetExceeded:
        F = S[0].K.residue
        res = [gamma_n(v).coords for v in S]
        n = S[0].n
        _, _, members = incidence(F.q, n, l - 1, False)
        pts, _, _ = incidence(F.q, n, l - 1, False)
        pos = {v: i for i, v in enumerate(pts)}
        cnt = [0] * len(pts)
        for r in res:
            cnt[pos[r]] += 1
        ok = all(sum(cnt[i] for i in mem) <= k - 1 for mem in members)
        how = "characterization"
    if not ok:
        raise WitnessError("theta witness is not (k,l)-orthogonal")
    return how


def gamma_strong(q: int, n: int, k: int, l: int, *, K: Optional[ValuedFieldSpec] = None,
                 symmetry: bool = False, workers: int = 1, node_limit: Optional[int] = None,
                 materialize: bool = True, budget: int = DEFAULT_SUBSET_BUDGET) -> ExtremalResult:
    """Gamma_n^(k,l): largest (k,l)-strongly orthogonal set; equal to
    Ind^pro and witnessed by the lift of a pro-independent set."""
    _check_kl(k, l)
    t0 = time.perf_counter()
    base = ind_pro(q, n, k, l, symmetry=symmetry, workers=workers, node_limit=node_limit, budget=budget)
    res = ExtremalResult("gamma", q, n, 0, k, l, base.value, {"points": base.witness}, "via-indpro")
    res.extra["nodes"] = base.extra.get("nodes")
    if materialize:
        Kf = _default_field(q, K)
        F = Kf.residue
        S = [delta_n(Kf, PointFq(F, tuple(v))) for v in base.witness]
        res.witness["vectors"] = [vector_to_str(v) for v in S]
        res.extra["set"] = S
        try:
            ok = definitional_oracle("gamma", k, l, S, budget=budget)
            res.validation = "definitional"
        except BudgetExceeded:
            ok = True
            res.validation = "via-indpro:" + base.validation
        if not ok:
            raise WitnessError("gamma witness is not (k,l)-strongly orthogonal")
    res.elapsed = time.perf_counter() - t0
    return res


# -- definitional oracle --

class _OrthCache:
    """Memoized literal orthogonality (Hadamard equality of the wedge norm)."""

    def __init__(self, S: Sequence[VectorK]):
        self.S = S
        self.memo: Dict[Tuple[int, ...], bool] = {}

    def __call__(self, idx: Tuple[int, ...]) -> bool:
        r = self.memo.get(idx)
        if r is None:
            r = hadamard_equality([self.S[i] for i in idx])
            self.memo[idx] = r
        return r


def definitional_oracle(quantity: str, k: int, l: int, candidate: Sequence,
                        budget: int = DEFAULT_SUBSET_BUDGET) -> bool:
    """Evaluate the defining (k,l) property of ``candidate`` literally.

    delta  : sphere vectors; every k-subset has l pairwise orthogonal members
    theta  : sphere vectors; every k-subset has an orthogonal l-subset
    gamma  : sphere vectors, pairwise orthogonal, and the theta property
    ind    : F_q-vectors (PointFq or tuples); every k-subset spans >= l
    indpro : projective points; same as ind on representatives
    omega  : K-subspaces; every k-subfamily has l pairwise feebly orthogonal
    Sets smaller than k satisfy every property vacuously.
    """
    quantity = quantity.lower()
    items = list(candidate)
    N = len(items)
    if N < k:
        return True
    if comb(N, k) > budget:
        raise BudgetExceeded(f"C({N},{k}) k-subsets exceed budget {budget}")
    if quantity in ("ind", "indpro"):
        vecs = [_as_tuple(v) for v in items]
        F = _field_of_items(items)
        return is_independent_definitional(F, vecs, k, l, budget)
    if quantity in ("delta", "gamma", "theta"):
        orth = _OrthCache(items)
        pair = {}
        for i, j in combinations(range(N), 2):
            pair[(i, j)] = orth((i, j))
        if quantity == "gamma" and not all(pair.values()):
            return False
        for X in combinations(range(N), k):
            if quantity == "delta":
                ok = any(all(pair[e] for e in combinations(F_, 2)) for F_ in combinations(X, l))
            else:
                ok = any(orth(F_) for F_ in combinations(X, l))
            if not ok:
                return False
        return True
    if quantity == "omega":
        feeble = {}
        for i, j in combinations(range(N), 2):
            feeble[(i, j)] = feeble_witness_search(items[i], items[j]) is not None
        for X in combinations(range(N), k):
            if not any(all(feeble[e] for e in combinations(R, 2)) for R in combinations(X, l)):
                return False
        return True
    raise ParameterError(f"unknown quantity {quantity!r}")


def _as_tuple(v) -> Tuple[int, ...]:
    if isinstance(v, ProjPoint):
        return v.rep.coords
    if isinstance(v, PointFq):
        return v.coords
    return tuple(v)


def _field_of_items(items):
    v = items[0]
    if isinstance(v, ProjPoint):
        return v.rep.field
    if isinstance(v, PointFq):
        return v.field
    raise ParameterError("pass PointFq or ProjPoint values so the field is known")


# -- Theta characterization check via explicit lifts --

def theta_profile_feasible(q: int, n: int, k: int, l: int, mult: Sequence[int]) -> bool:
    """Cap-program feasibility of a multiplicity vector (indexed like the
    nonzero points of F_q^n in enumeration order)."""
    _, _, members = incidence(q, n, l - 1, False)
    return all(sum(mult[i] for i in mem) <= k - 1 for mem in members)


def theta_profile_definitional(K: ValuedFieldSpec, n: int, k: int, l: int, mult: Sequence[int],
                               budget: int = DEFAULT_SUBSET_BUDGET) -> bool:
    """Build the explicit lifts for ``mult`` and test (k,l)-orthogonality literally."""
    pts, _, _ = incidence(K.q, n, l - 1, False)
    F = K.residue
    S = []
    for v, m in zip(pts, mult):
        if m:
            S.extend(fiber_lifts(K, PointFq(F, v), m))
    return definitional_oracle("theta", k, l, S, budget=budget)


# -- dispatch and cache --

def solve(quantity: str, q: int, n: int, k: int, l: int, s: int = 0, **kw) -> ExtremalResult:
    quantity = quantity.lower()
    if quantity == "delta":
        return delta_weak(q, n, k, l, **_only(kw, "K", "materialize", "budget"))
    if quantity == "omega":
        return omega_feeble(q, s, n, k, l, **_only(kw, "K", "materialize", "budget"))
    if quantity == "ind":
        return ind(q, n, k, l, **_only(kw, "symmetry", "workers", "node_limit", "budget"))
    if quantity == "indpro":
        return ind_pro(q, n, k, l, **_only(kw, "symmetry", "workers", "node_limit", "budget"))
    if quantity == "theta":
        return theta(q, n, k, l, **_only(kw, "K", "symmetry", "workers", "node_limit", "materialize", "budget"))
    if quantity == "gamma":
        return gamma_strong(q, n, k, l, **_only(kw, "K", "symmetry", "workers", "node_limit", "materialize",
                                                 "budget"))
    raise ParameterError(f"unknown quantity {quantity!r}; expected one of {', '.join(QUANTITIES)}")


def _only(kw, *names):
    return {k: v for k, v in kw.items() if k in names and v is not None}


def canonical_witness(result: ExtremalResult) -> str:
    return json.dumps(result.witness, sort_keys=True, separators=(",", ":"))


def witness_hash(result: ExtremalResult) -> str:
    return hashlib.sha256(canonical_witness(result).encode()).hexdigest()[:16]


def cache_record(result: ExtremalResult) -> str:
    return f"{result.key()},{result.value},{result.method},{witness_hash(result)}"


class ResultCache:
    """Append-only result store.

    ``PATH`` holds one record per line, ``quantity,q,n,s,k,l,value,method,hash``;
    ``PATH.witnesses`` holds ``{"hash": ..., "witness": ...}`` JSON lines so
    that cache hits can be re-verified.
    """

    ENV = "ULTRAORTHO_CACHE"

    def __init__(self, path: Optional[str] = None):
        self.path = path or os.environ.get(self.ENV)
        self.records: Dict[str, Tuple[int, str, str]] = {}
        self.witnesses: Dict[str, object] = {}
        if self.path and os.path.exists(self.path):
            with open(self.path) as fh:
                for line in fh:
                    parts = line.strip().split(",")
                    if len(parts) != 9:
                        continue
                    key = ",".join(parts[:6])
                    self.records[key] = (int(parts[6]), parts[7], parts[8])
            wpath = self.path + ".witnesses"
            if os.path.exists(wpath):
                with open(wpath) as fh:
                    for line in fh:
                        if line.strip():
                            obj = json.loads(line)
                            self.witnesses[obj["hash"]] = obj["witness"]

    def lookup(self, quantity, q, n, s, k, l) -> Optional[ExtremalResult]:
        """A cached result whose stored witness re-verifies, else None."""
        key = query_key(quantity, q, n, s, k, l)
        rec = self.records.get(key)
        if rec is None:
            return None
        value, method, h = rec
        w = self.witnesses.get(h)
        if w is None:
            return None
        res = ExtremalResult(quantity, q, n, s, k, l, value, w, method)
        if witness_hash(res) != h or not reverify(res):
            return None
        res.validation = "cache-reverified"
        return res

    def store(self, result: ExtremalResult) -> None:
        if not self.path:
            return
        h = witness_hash(result)
        with open(self.path, "a") as fh:
            fh.write(cache_record(result) + "\n")
        with open(self.path + ".witnesses", "a") as fh:
            fh.write(json.dumps({"hash": h, "witness": result.witness}, sort_keys=True) + "\n")
        self.records[result.key()] = (result.value, result.method, h)
        self.witnesses[h] = result.witness


def reverify(res: ExtremalResult) -> bool:
    """Re-validate a stored witness from its JSON form."""
    F = field_of_order(res.q)
    try:
        if res.quantity in ("ind", "indpro"):
            S = [tuple(v) for v in res.witness]
            validate_independent_set(F, S, res.k, res.l, res.quantity == "indpro", DEFAULT_SUBSET_BUDGET)
            return len(S) == res.value
        if res.quantity == "gamma":
            S = [tuple(v) for v in res.witness["points"]]
            validate_independent_set(F, S, res.k, res.l, True, DEFAULT_SUBSET_BUDGET)
            return len(S) == res.value
        if res.quantity == "theta":
            mult = res.witness["multiplicities"]
            pts, _, _ = incidence(res.q, res.n, res.l - 1, False)
            pos = {v: i for i, v in enumerate(pts)}
            m = [0] * len(pts)
            for v, c in mult:
                m[pos[tuple(v)]] = c
            return sum(m) == res.value and theta_profile_feasible(res.q, res.n, res.k, res.l, m)
        if res.quantity in ("delta", "omega"):
            prof = res.witness["profile"]
            if res.quantity == "omega" and res.s == res.n:
                return res.value == 1 and prof == [1]
            m = (res.q ** res.n - 1) // (res.q - 1) if res.quantity == "delta" \
                else gaussian_binomial(res.n, res.s, res.q)
            ip = ProfileIP.from_kl(m, res.k, res.l)
            return sum(prof) == res.value and ip.feasible(prof)
    except (WitnessError, KeyError, TypeError, ValueError):
        return False
    return False
