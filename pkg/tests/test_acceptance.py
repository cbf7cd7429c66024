"""Acceptance gate: one test per criterion, each with its own runtime limit.

Expected values are frozen from closed formulas or from the independent
oracles in ``oracles.py``; the package is only the system under test.
"""

import time
from math import ceil

import numpy as np
import pytest

import oracles
from ultraortho import extremal as ex
from ultraortho.ffgeom import enumerate_subspaces, gaussian_binomial
from ultraortho.linalg_k import (
    VectorK,
    c_matrix_criterion,
    definitional_orthogonality_falsifier,
    hadamard_bound,
    mu_n,
    orthogonalize,
    rank_k,
    residue_rank,
    same_span,
    set_orthogonal,
    wedge_norm,
)
from ultraortho.valued import absval, laurent, padic, ve_add, ve_from_digits, ve_mul, ve_zero

pytestmark = pytest.mark.acceptance


def proj(q, n):
    return (q ** n - 1) // (q - 1)


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_criterion_1_delta_pairs(detail):
    with Timer() as t:
        bad = []
        for q in (2, 3):
            for n in (2, 3):
                for k in range(2, 7):
                    v = ex.delta_weak(q, n, k, 2).value
                    if v != (k - 1) * proj(q, n):
                        bad.append((q, n, k, v))
    detail(f"60 values checked in {t.elapsed:.2f} s")
    assert not bad
    assert t.elapsed < 1.0


def test_criterion_2_delta_divisible_and_sandwich(detail):
    with Timer() as t:
        bad = []
        for n in (2, 3):
            m = proj(2, n)
            for l in range(2, 7):
                for k in range(l, 7):
                    v = ex.delta_weak(2, n, k, l).value
                    lo, hi = (k - 1) // (l - 1) * m, (k - 1) * m // (l - 1)
                    ok = lo <= v <= hi
                    if (k - 1) % (l - 1) == 0:
                        ok = ok and v == (k - 1) // (l - 1) * m
                    if not ok:
                        bad.append(f"n={n} k={k} l={l}: Delta={v}, bounds [{lo}, {hi}]")
    for line in bad:
        detail(line)
    if bad:
        detail("these cases have l-1 > (q^n-1)/(q-1): no l pairwise orthogonal vectors exist, so "
               "every set of size k-1 qualifies and Delta = k-1")
    assert not bad
    assert t.elapsed < 10.0


def test_criterion_3_profile_program(detail):
    with Timer() as t:
        count = 0
        for m in range(1, 8):
            for l in range(2, 5):
                for k in range(l, 6):
                    ip = ex.ProfileIP.from_kl(m, k, l)
                    a, prof = ex.profile_ip_solve(ip)
                    b, _ = ex.profile_ip_bruteforce(ip)
                    assert a == b, (m, k, l)
                    assert sum(prof) == a and ip.feasible(prof)
                    count += 1
    detail(f"{count} programs, solver = enumeration")
    assert t.elapsed < 30.0


def test_criterion_4_omega_and_gaussian_binomial(detail):
    with Timer() as t:
        for s in (1, 2):
            for k in range(2, 7):
                assert ex.omega_feeble(2, s, 3, k, 2).value == (k - 1) * 7
        for q in (2, 3):
            for n in range(0, 5):
                for s in range(0, n + 1):
                    want = oracles.gaussian_binomial_product(n, s, q)
                    assert gaussian_binomial(n, s, q) == want
                    assert len(enumerate_subspaces(s, n, q)) == want
    detail(f"Omega at s=1,2 and [n s]_q for n <= 4 agree ({t.elapsed:.2f} s)")
    assert t.elapsed < 10.0


def test_criterion_5_ind_values(detail):
    with Timer() as t:
        assert ex.ind(2, 3, 3, 3).value == 4
        assert ex.ind(2, 4, 3, 3).value == 8
        assert ex.ind(2, 4, 4, 4).value == 5
        for k in range(4, 8):
            assert ex.ind(2, 3, k, 3).value == 7
        # small cases against exhaustive subset search
        assert ex.ind(2, 3, 3, 3).value == oracles.brute_force_ind(2, 3, 3, 3)
        assert ex.ind(2, 3, 4, 3).value == oracles.brute_force_ind(2, 3, 4, 3)
    detail(f"Ind_2(3,3,3)=4, Ind_2(4,3,3)=8, Ind_2(4,4,4)=5, Ind_2(3,k,3)=7 for k=4..7 ({t.elapsed:.2f} s)")
    assert t.elapsed < 600


def test_criterion_6_diagonal_threshold(detail):
    with Timer() as t:
        for n in (2, 3, 4):
            for l in range(2, n + 1):
                v = ex.ind(2, n, l, l).value
                expect = 3 * l >= 2 * (n + 1)
                assert (v == n + 1) == expect, (n, l, v)
                detail(f"n={n} l={l}: Ind={v}, (2/3)(n+1) <= l is {expect}")
    assert t.elapsed < 600


def test_criterion_7_monotonicity_and_chain(detail):
    with Timer() as t:
        for l in (2, 3):
            seq = [ex.ind(2, 3, k, l).value for k in range(l, 2 ** (l - 1) + 1)]
            assert all(a < b for a, b in zip(seq, seq[1:])), seq
            detail(f"l={l}: Ind_2(3,k,l) for k={l}..{2 ** (l - 1)} = {seq}")
        chain = [ex.ind(2, 3, 4, l).value for l in range(1, 4)]
        flat = 3  # floor(log_2 4) + 1
        assert chain[:flat] == [7] * flat
        assert chain[-1] >= 4
        detail(f"chain at k=4: {chain}")
    assert t.elapsed < 600


def test_criterion_8_ind_vs_indpro(detail):
    with Timer() as t:
        q, n = 3, 2
        for k in range(2, proj(q, n) + 1):
            l = 2
            i, pro = ex.ind(q, n, k, l).value, ex.ind_pro(q, n, k, l).value
            up = ex.ind(q, n, (q - 1) * k, l).value
            assert ceil(i / (q - 1)) <= pro <= up // (q - 1), (k, i, pro, up)
        for n in (2, 3):
            for l in range(2, n + 1):
                for k in range(l, proj(2, n) + 1):
                    assert ex.ind(2, n, k, l).value == ex.ind_pro(2, n, k, l).value
        # which stabilization threshold holds: k >= T or k > T, T = (q^(l-1)-1)/(q-1)
        for q in (2, 3):
            n, l = 3, 3
            T = (q ** (l - 1) - 1) // (q - 1)
            full = proj(q, n)
            vals = {k: ex.ind_pro(q, n, k, l).value for k in range(l, T + 3)}
            ge = all((v == full) == (k >= T) for k, v in vals.items())
            gt = all((v == full) == (k > T) for k, v in vals.items())
            detail(f"q={q}: T={T}, Ind^pro(3,k,3) = {vals}; 'k >= T' {'holds' if ge else 'fails'}, "
                   f"'k > T' {'holds' if gt else 'fails'}")
            assert gt
    assert t.elapsed < 600


def test_criterion_9_gamma(detail):
    with Timer() as t:
        count = 0
        for q in (2, 3):
            for n in (2, 3):
                for l in range(2, n + 1):
                    for k in range(l, min(proj(q, n), 5) + 1):
                        g = ex.gamma_strong(q, n, k, l, materialize=False)
                        assert g.value == ex.ind_pro(q, n, k, l).value
                        count += 1
        for n in (2, 3):
            for l in (2, 3):
                for k in (2, 3):
                    if l > min(k, n):
                        continue
                    g = ex.gamma_strong(2, n, k, l)
                    assert ex.definitional_oracle("gamma", k, l, g.extra["set"])
    detail(f"Gamma = Ind^pro on {count} parameter sets; witnesses pass the literal strong test")
    assert t.elapsed < 300


def test_criterion_10_theta(detail):
    with Timer() as t:
        q = 2
        for n in (2, 3):
            for l in range(2, n + 1):
                tll = ex.theta(q, n, l, l).value
                for k in range(l, 5):
                    th = ex.theta(q, n, k, l)
                    assert ex.definitional_oracle("theta", k, l, th.extra["set"])
                    d = ex.delta_weak(q, n, k, l).value
                    assert (k - 1) // (l - 1) * tll <= th.value <= d
                    if k > q ** n - 1:
                        # Ind needs k <= q^n-1
                        detail(f"n={n} k={k} l={l}: Theta={th.value} <= Delta={d}")
                        continue
                    i = ex.ind(q, n, k, l).value
                    assert i <= th.value <= (k - l + 1) * i
                    if k == l:
                        assert th.value == i
                    detail(f"n={n} k={k} l={l}: Ind={i} <= Theta={th.value} <= Delta={d}")
        t33, d33 = ex.theta(2, 3, 3, 3).value, ex.delta_weak(2, 3, 3, 3).value
        assert t33 < d33
        # maximality at n = 2: best multiplicity profile accepted by the literal test
        K = laurent(2, 6)
        for l in (2,):
            for k in range(2, 5):
                best = max(sum(m) for m in np.ndindex(*(k,) * 3)
                           if ex.theta_profile_definitional(K, 2, k, l, m))
                assert best == ex.theta(2, 2, k, l).value
    assert t.elapsed < 900


def _criterion_11_case(q, n, l, lib_cache):
    reps = oracles.tuple_orbit_representatives(q, n, l)
    arr = oracles.tuples_to_array(reps, l, n)
    wv = oracles.wedge_valuation(arr, q)
    rr = oracles.residue_rank_mod_q(arr, q)
    K = laurent(q, 4)

    def vec(v):
        if v not in lib_cache:
            lib_cache[v] = VectorK(K, tuple(ve_from_digits(K, 0, list(e)) if any(e) else ve_zero(K)
                                            for e in v))
        return lib_cache[v]

    disagreements, negatives = [], 0
    for t, w, r in zip(reps, wv, rr):
        vs = [vec(v) for v in t]
        oracle = bool(w == 0)
        rank = residue_rank(vs)
        # wedge_norm == hadamard_bound is the Hadamard-equality route, computed once
        norm = wedge_norm(vs)
        got = (rank == l, set_orthogonal(vs), c_matrix_criterion(vs), norm == hadamard_bound(vs))
        if r != rank or any(g != oracle for g in got):
            disagreements.append((t, oracle, got))
            continue
        if norm.exp != (None if w == oracles.N_DIGITS else -int(w)):
            disagreements.append((t, "wedge", norm))
        if not oracle:
            negatives += 1
            if not (definitional_orthogonality_falsifier(vs, 1).found
                    or definitional_orthogonality_falsifier(vs, 2).found):
                disagreements.append((t, "falsifier", None))
    return len(reps), negatives, disagreements


def test_criterion_11_orthogonality_criteria(detail):
    with Timer() as t:
        total = 0
        for q in (2, 3):
            cache = {}
            for n in (2, 3):
                for l in range(1, n + 1):
                    reps, neg, bad = _criterion_11_case(q, n, l, cache)
                    total += reps
                    detail(f"q={q} n={n} l={l}: {reps} orbit representatives, {neg} negatives, "
                           f"{len(bad)} disagreements")
                    assert not bad, bad[:3]
    detail(f"{total} tuples in {t.elapsed:.1f} s")
    assert t.elapsed < 300


def test_criterion_12_ultrametric(detail):
    rng = np.random.default_rng(12)
    with Timer() as t:
        for K in (laurent(2, 6), padic(3, 6)):
            base = K.q if K.backend == "laurent" else K.p
            for _ in range(100_000):
                els = []
                for _ in range(2):
                    if rng.random() < 0.05:
                        els.append(ve_zero(K))
                        continue
                    L = int(rng.integers(1, 7))
                    ds = [int(rng.integers(1, base))] + [int(x) for x in rng.integers(0, base, L - 1)]
                    els.append(ve_from_digits(K, int(rng.integers(-4, 5)), ds))
                a, b = els
                na, nb = absval(a), absval(b)
                s = absval(ve_add(a, b))
                assert s <= max(na, nb)
                if na != nb:
                    assert s == max(na, nb)
                assert absval(ve_mul(a, b)) == na * nb
    detail(f"2 x 100000 pairs in {t.elapsed:.1f} s")
    assert t.elapsed < 60


def test_criterion_13_residue_subspaces(detail):
    rng = np.random.default_rng(13)
    K = laurent(2, 16)
    with Timer() as t:
        done = 0
        while done < 1000:
            n = int(rng.choice([3, 4]))
            s = int(rng.integers(1, n + 1))
            vs = []
            for _ in range(s):
                ents = []
                for _ in range(n):
                    if rng.random() < 0.2:
                        ents.append(ve_zero(K))
                    else:
                        ds = [1] + [int(x) for x in rng.integers(0, 2, int(rng.integers(0, 2)))]
                        ents.append(ve_from_digits(K, int(rng.integers(-1, 3)), ds))
                vs.append(VectorK(K, tuple(ents)))
            if any(all(e.nu == float("inf") for e in v.entries) for v in vs):
                continue
            if rank_k(vs) != s:
                continue
            B = orthogonalize(vs)
            assert B.dim == s
            assert same_span(vs, list(B.basis))
            assert set_orthogonal(list(B.basis))
            assert mu_n(B).dim == s
            done += 1
    detail(f"1000 subspaces in {t.elapsed:.1f} s")
    assert t.elapsed < 120


def test_criterion_14_theta_ratio_data(detail):
    ratios = []
    for k in range(3, 9):
        v = ex.theta(2, 3, k, 3, materialize=False).value
        ratios.append((k, v))
        assert k <= v <= k * 7
    detail("Theta^(k,3)/k at q=2, n=3: " + ", ".join(f"k={k}: {v}/{k}" for k, v in ratios))
    detail("window for the limit: [7/3, 7]; finite data only")
