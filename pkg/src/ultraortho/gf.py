"""Exact arithmetic in the finite field F_q, q = p^m.

Elements are polynomials over F_p reduced modulo a fixed monic irreducible
polynomial of degree m.  Each element has a canonical coefficient vector
``rep`` (highest degree first) and an integer ``index`` whose base-p digits
are exactly ``rep``; enumeration order is numeric order on the index, which
coincides with lexicographic order on ``rep``.

Index-level operations (``FieldSpec.add`` and friends) are what the rest of
the package uses in hot loops; ``FieldElem`` is the value-level wrapper.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import List, Sequence, Tuple

DEFAULT_SIZE_CAP = 2 ** 16
_TABLE_CAP = 256


class FieldError(ValueError):
    """Invalid field parameters or mismatched operands."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def prime_power(q: int) -> Tuple[int, int]:
    """Return (p, m) with q = p^m, or raise FieldError."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = 2
    while p * p <= q and q % p:
        p += 1
    if q % p:
        p = q
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, m


# -- polynomial helpers over F_p; coefficient lists, highest degree first --

def _poly_trim(a: List[int]) -> List[int]:
    i = 0
    while i < len(a) - 1 and a[i] == 0:
        i += 1
    return a[i:]


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    """Remainder of a modulo the monic polynomial b."""
    r = list(a)
    db = len(b) - 1
    while len(r) - 1 >= db and any(r):
        c = r[0]
        if c:
            for i in range(len(b)):
                r[i] = (r[i] - c * b[i]) % p
        r.pop(0)
    return _poly_trim(r) if r else [0]


def _monic_polys(p: int, deg: int):
    for tail in product(range(p), repeat=deg):
        yield [1, *tail]


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg//2."""
    deg = len(poly) - 1
    if deg < 1 or poly[0] != 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(p, d):
            if not any(_poly_mod(poly, g, p)):
                return False
    return True


def least_irreducible(p: int, m: int) -> Tuple[int, ...]:
    """Lexicographically least monic irreducible polynomial of degree m."""
    for cand in _monic_polys(p, m):
        if is_irreducible(cand, p):
            return tuple(cand)
    raise FieldError(f"no irreducible polynomial of degree {m} over F_{p}")  # pragma: no cover


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """The field F_q with a fixed modulus.

    Two specs compare equal when p and the modulus agree.
    """

    p: int
    m: int
    modulus: Tuple[int, ...]
    _add: list = field(default=None, repr=False)
    _mul: list = field(default=None, repr=False)
    _neg: list = field(default=None, repr=False)
    _inv: list = field(default=None, repr=False)

    @property
    def q(self) -> int:
        return self.p ** self.m

    def __eq__(self, other):
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return self.p == other.p and self.modulus == other.modulus

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        return f"FieldSpec(q={self.q}, modulus={self.modulus_str()})"

    def modulus_str(self) -> str:
        return _poly_str(self.modulus, "x")

    # -- index <-> coefficient vector --

    def rep_of(self, index: int) -> Tuple[int, ...]:
        out = []
        for _ in range(self.m):
            index, c = divmod(index, self.p)
            out.append(c)
        return tuple(reversed(out))

    def index_of(self, rep: Sequence[int]) -> int:
        i = 0
        for c in rep:
            i = i * self.p + c
        return i

    # -- raw arithmetic on coefficient vectors --

    def _rep_add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def _rep_mul(self, a, b):
        p, m = self.p, self.m
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] = (prod[i + j] + x * y) % p
        r = _poly_mod(prod, self.modulus, p)
        return tuple([0] * (m - len(r)) + r)

    # -- index-level operations --

    def add(self, i: int, j: int) -> int:
        if self._add is not None:
            return self._add[i][j]
        if self.m == 1:
            return (i + j) % self.p
        return self.index_of(self._rep_add(self.rep_of(i), self.rep_of(j)))

    def mul(self, i: int, j: int) -> int:
        if self._mul is not None:
            return self._mul[i][j]
        if self.m == 1:
            return (i * j) % self.p
        return self.index_of(self._rep_mul(self.rep_of(i), self.rep_of(j)))

    def neg(self, i: int) -> int:
        if self._neg is not None:
            return self._neg[i]
        return self.index_of(tuple((-c) % self.p for c in self.rep_of(i)))

    def sub(self, i: int, j: int) -> int:
        return self.add(i, self.neg(j))

    def inv(self, i: int) -> int:
        if i == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        if self._inv is not None:
            return self._inv[i]
        if self.m == 1:
            return pow(i, -1, self.p)
        # a^(q-2) by square-and-multiply
        result, base, e = 1, i, self.q - 2
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def elem(self, x) -> "FieldElem":
        """Coerce an int index, coefficient tuple or FieldElem to an element."""
        if isinstance(x, FieldElem):
            if x.spec != self:
                raise FieldError("field mismatch")
            return x
        if isinstance(x, int):
            if self.m == 1:
                return FieldElem(self, (x % self.p,))
            if not 0 <= x < self.q:
                raise FieldError(f"index {x} out of range for F_{self.q}")
            return FieldElem(self, self.rep_of(x))
        rep = tuple(int(c) % self.p for c in x)
        if len(rep) != self.m:
            raise FieldError(f"coefficient vector must have length {self.m}")
        return FieldElem(self, rep)

    def zero(self) -> "FieldElem":
        return FieldElem(self, (0,) * self.m)

    def one(self) -> "FieldElem":
        return FieldElem(self, (0,) * (self.m - 1) + (1,))

    def digit_str(self, i: int) -> str:
        """Printable form of an element index: an integer for prime fields,
        a polynomial in ``a`` wrapped in brackets otherwise."""
        if self.m == 1:
            return str(i)
        return "[" + _poly_str(self.rep_of(i), "a") + "]"


def _poly_str(coeffs: Sequence[int], var: str) -> str:
    deg = len(coeffs) - 1
    terms = []
    for k, c in enumerate(coeffs):
        e = deg - k
        if c == 0:
            continue
        if e == 0:
            terms.append(str(c))
        else:
            mono = var if e == 1 else f"{var}^{e}"
            terms.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(terms) if terms else "0"


def _build_tables(spec: FieldSpec) -> None:
    q = spec.q
    reps = [spec.rep_of(i) for i in range(q)]
    add = [[spec.index_of(spec._rep_add(a, b)) for b in reps] for a in reps]
    mul = [[spec.index_of(spec._rep_mul(a, b)) for b in reps] for a in reps]
    neg = [row.index(0) for row in add]
    inv = [0] + [row.index(1) for row in mul[1:]]
    object.__setattr__(spec, "_add", add)
    object.__setattr__(spec, "_mul", mul)
    object.__setattr__(spec, "_neg", neg)
    object.__setattr__(spec, "_inv", inv)


_SPEC_CACHE: dict = {}


def gf_make(p: int, m: int = 1, size_cap: int = DEFAULT_SIZE_CAP) -> FieldSpec:
    """Build F_{p^m} with the lexicographically least monic irreducible modulus."""
    if not isinstance(p, int) or not is_prime(p):
        raise FieldError(f"characteristic {p} is not prime")
    if not isinstance(m, int) or m < 1:
        raise FieldError(f"extension degree must be >= 1, got {m}")
    if p ** m > size_cap:
        raise FieldError(f"field size {p}^{m} exceeds cap {size_cap}")
    key = (p, m)
    if key in _SPEC_CACHE:
        return _SPEC_CACHE[key]
    spec = FieldSpec(p, m, least_irreducible(p, m))
    if spec.q <= _TABLE_CAP:
        _build_tables(spec)
    _SPEC_CACHE[key] = spec
    return spec


def field_of_order(q: int, size_cap: int = DEFAULT_SIZE_CAP) -> FieldSpec:
    p, m = prime_power(q)
    return gf_make(p, m, size_cap)


@dataclass(frozen=True)
class FieldElem:
    spec: FieldSpec
    rep: Tuple[int, ...]

    @property
    def index(self) -> int:
        return self.spec.index_of(self.rep)

    def _check(self, other: "FieldElem") -> None:
        if not isinstance(other, FieldElem) or other.spec != self.spec:
            raise FieldError("operands belong to different fields")

    def __add__(self, other):
        return gf_add(self, other)

    def __sub__(self, other):
        return gf_add(self, gf_neg(other))

    def __mul__(self, other):
        return gf_mul(self, other)

    def __neg__(self):
        return gf_neg(self)

    def __truediv__(self, other):
        return gf_mul(self, gf_inv(other))

    def __pow__(self, e: int):
        s = self.spec
        if e < 0:
            return gf_inv(self) ** (-e)
        r, b = 1, self.index
        while e:
            if e & 1:
                r = s.mul(r, b)
            b = s.mul(b, b)
            e >>= 1
        return s.elem(r)

    def __bool__(self):
        return any(self.rep)

    def __str__(self):
        return self.spec.digit_str(self.index).strip("[]")


def gf_add(a: FieldElem, b: FieldElem) -> FieldElem:
    a._check(b)
    return FieldElem(a.spec, a.spec._rep_add(a.rep, b.rep))


def gf_mul(a: FieldElem, b: FieldElem) -> FieldElem:
    a._check(b)
    s = a.spec
    return s.elem(s.mul(a.index, b.index))


def gf_neg(a: FieldElem) -> FieldElem:
    p = a.spec.p
    return FieldElem(a.spec, tuple((-c) % p for c in a.rep))


def gf_inv(a: FieldElem) -> FieldElem:
    if not a:
        raise ZeroDivisionError("inverse of zero in F_q")
    s = a.spec
    return s.elem(s.inv(a.index))


def gf_enumerate(spec: FieldSpec) -> List[FieldElem]:
    """All q elements, zero first, in lexicographic order of ``rep``."""
    return [spec.elem(i) for i in range(spec.q)]
