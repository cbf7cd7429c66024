"""Truncated exact arithmetic in a discretely valued field K.

Two backends share one element type:

* ``laurent`` -- F_q((x^-1)) with uniformizer pi = x^-1.  Digits add without
  carries, so exact inputs give exact outputs as long as they fit the window.
* ``padic`` -- Q_p with uniformizer p.  Digits carry; negation of a nonzero
  exact element never terminates and is returned truncated.

An element is ``pi^nu * (d0 + d1*pi + ... + d_{L-1}*pi^{L-1})`` with d0 != 0 and
L <= precision.  ``exact`` says the expansion stops there; otherwise the
value is only known modulo pi^(nu+L).  Any result whose leading digit cannot
be certified raises ``PrecisionError``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import total_ordering
from typing import List, Optional, Sequence, Tuple, Union

from .gf import FieldElem, FieldError, FieldSpec, field_of_order, gf_make

INF = math.inf


class PrecisionError(ArithmeticError):
    """A result needs digits beyond what the operands certify.

    ``bound`` (when known) is an A with the true value in pi^A O.
    """

    def __init__(self, msg: str, bound=None):
        super().__init__(msg)
        self.bound = bound


class ValuedError(ValueError):
    """Bad arguments for a valued-field operation (not a precision issue)."""


@dataclass(frozen=True)
class ValuedFieldSpec:
    backend: str
    residue: FieldSpec
    precision: int = 4

    def __post_init__(self):
        if self.backend not in ("laurent", "padic"):
            raise ValuedError(f"unknown backend {self.backend!r}")
        if self.precision < 1:
            raise ValuedError("precision must be >= 1")
        if self.backend == "padic" and self.residue.m != 1:
            raise ValuedError("p-adic backend needs a prime residue field")

    @property
    def q(self) -> int:
        return self.residue.q

    @property
    def p(self) -> int:
        return self.residue.p

    @property
    def pi_name(self) -> str:
        return "x^-1" if self.backend == "laurent" else "p"

    def with_precision(self, n: int) -> "ValuedFieldSpec":
        return ValuedFieldSpec(self.backend, self.residue, n)


def laurent(q: Union[int, FieldSpec] = 2, precision: int = 4) -> ValuedFieldSpec:
    F = q if isinstance(q, FieldSpec) else field_of_order(q)
    return ValuedFieldSpec("laurent", F, precision)


def padic(p: int = 2, precision: int = 4) -> ValuedFieldSpec:
    try:
        F = gf_make(p, 1)
    except FieldError as exc:
        raise ValuedError(f"p-adic backend needs a prime, got {p}") from exc
    return ValuedFieldSpec("padic", F, precision)


@total_ordering
@dataclass(frozen=True)
class Norm:
    """Exact absolute value q^exp; ``exp is None`` encodes |0| = 0."""

    base: int
    exp: Optional[int]

    def _key(self):
        return -INF if self.exp is None else self.exp

    def __lt__(self, other: "Norm"):
        return self._key() < other._key()

    def __eq__(self, other):
        if not isinstance(other, Norm):
            return NotImplemented
        return self.base == other.base and self.exp == other.exp

    def __hash__(self):
        return hash((self.base, self.exp))

    def __mul__(self, other: "Norm") -> "Norm":
        if self.exp is None or other.exp is None:
            return Norm(self.base, None)
        return Norm(self.base, self.exp + other.exp)

    @property
    def is_zero(self) -> bool:
        return self.exp is None

    def __str__(self):
        return "0" if self.exp is None else f"{self.base}^{self.exp}"


@dataclass(frozen=True, slots=True)
class ValuedElem:
    K: ValuedFieldSpec
    nu: Union[int, float]
    digits: Tuple[int, ...]
    exact: bool = True

    @property
    def is_zero(self) -> bool:
        return self.nu == INF

    @property
    def abs_prec(self) -> Union[int, float]:
        """Absolute precision: the value is known modulo pi^abs_prec."""
        return INF if self.exact else self.nu + len(self.digits)

    def __add__(self, other):
        return ve_add(self, other)

    def __sub__(self, other):
        return ve_sub(self, other)

    def __mul__(self, other):
        return ve_mul(self, other)

    def __neg__(self):
        return ve_neg(self)

    def __str__(self):
        return elem_to_str(self)


# -- construction --

def ve_zero(K: ValuedFieldSpec) -> ValuedElem:
    return ValuedElem(K, INF, (), True)


def ve_one(K: ValuedFieldSpec) -> ValuedElem:
    return ValuedElem(K, 0, (1,), True)


def ve_from_digits(K: ValuedFieldSpec, nu: int, digits: Sequence[int], exact: bool = True) -> ValuedElem:
    """Element pi^nu * sum(digits[i] pi^i); digits are residue-field indices
    (or 0..p-1 for p-adic).  Leading zero digits are absorbed into nu."""
    ds = [int(d) for d in digits]
    A = INF if exact else nu + len(ds)
    if K.backend == "laurent":
        for d in ds:
            if not 0 <= d < K.q:
                raise ValuedError(f"digit {d} out of range for F_{K.q}")
        return _finish_laurent(K, nu, ds, A)
    p = K.p
    for d in ds:
        if not 0 <= d < p:
            raise ValuedError(f"digit {d} out of range for p={p}")
    return _finish_padic(K, nu, _digits_to_int(ds, p), A)


def ve_from_int(K: ValuedFieldSpec, n: int) -> ValuedElem:
    """The image of the integer n in K."""
    if K.backend == "laurent":
        c = n % K.p
        return ve_zero(K) if c == 0 else ValuedElem(K, 0, (c,), True)
    return _finish_padic(K, 0, n, INF)


def ve_monomial(K: ValuedFieldSpec, c: int, k: int) -> ValuedElem:
    """delta(c) * pi^k."""
    if c == 0:
        return ve_zero(K)
    return ValuedElem(K, k, (c,), True)


# -- normalization helpers --

def _digits_to_int(ds: Sequence[int], p: int) -> int:
    u = 0
    for d in reversed(ds):
        u = u * p + d
    return u


def _int_to_digits(u: int, p: int, length: Optional[int] = None) -> List[int]:
    out = []
    if length is None:
        while u:
            u, d = divmod(u, p)
            out.append(d)
    else:
        for _ in range(length):
            u, d = divmod(u, p)
            out.append(d)
    return out


def _finish_laurent(K: ValuedFieldSpec, lo: int, buf: List[int], A) -> ValuedElem:
    i = 0
    while i < len(buf) and buf[i] == 0:
        i += 1
    if i == len(buf):
        if A == INF:
            return ve_zero(K)
        raise PrecisionError(f"result is O(pi^{A}); leading digit not certified", A)
    nu = lo + i
    if A == INF:
        j = len(buf)
        while buf[j - 1] == 0:
            j -= 1
        ds = buf[i:j]
        exact = True
    else:
        ds = buf[i:A - lo]
        ds += [0] * (A - nu - len(ds))
        exact = False
    N = K.precision
    if len(ds) > N:
        ds = ds[:N]
        exact = False
    return ValuedElem(K, nu, tuple(ds), exact)


def _finish_padic(K: ValuedFieldSpec, lo: int, u: int, A) -> ValuedElem:
    p, N = K.p, K.precision
    if A != INF:
        u %= p ** (A - lo)
    if u == 0:
        if A == INF:
            return ve_zero(K)
        raise PrecisionError(f"result is O(p^{A}); leading digit not certified", A)
    v = 0
    while u % p == 0:
        u //= p
        v += 1
    nu = lo + v
    if A == INF and u > 0:
        ds = _int_to_digits(u, p)
        if len(ds) <= N:
            return ValuedElem(K, nu, tuple(ds), True)
        return ValuedElem(K, nu, tuple(ds[:N]), False)
    L = N if A == INF else min(A - nu, N)
    return ValuedElem(K, nu, tuple(_int_to_digits(u % p ** L, p, L)), False)


def _same(a: ValuedElem, b: ValuedElem) -> ValuedFieldSpec:
    if a.K != b.K:
        raise ValuedError("operands live in different valued fields")
    return a.K


def _unit_int(a: ValuedElem) -> int:
    return _digits_to_int(a.digits, a.K.p)


# -- arithmetic --

def _laurent_combine(a: ValuedElem, b: ValuedElem, negate_b: bool) -> ValuedElem:
    K = a.K
    F = K.residue
    A = min(a.abs_prec, b.abs_prec)
    lo = min(a.nu, b.nu)
    hi = max(a.nu + len(a.digits), b.nu + len(b.digits))
    if A != INF and A < hi:
        hi = A
    buf = [0] * (hi - lo)
    off = a.nu - lo
    for i, d in enumerate(a.digits):
        if off + i < len(buf):
            buf[off + i] = d
    off = b.nu - lo
    add = F.add
    neg = F.neg
    for i, d in enumerate(b.digits):
        j = off + i
        if j < len(buf):
            buf[j] = add(buf[j], neg(d) if negate_b else d)
    return _finish_laurent(K, lo, buf, A)


def _padic_combine(a: ValuedElem, b: ValuedElem, sign: int) -> ValuedElem:
    K = a.K
    p = K.p
    A = min(a.abs_prec, b.abs_prec)
    lo = min(a.nu, b.nu)
    u = _unit_int(a) * p ** (a.nu - lo) + sign * _unit_int(b) * p ** (b.nu - lo)
    return _finish_padic(K, lo, u, A)


def ve_add(a: ValuedElem, b: ValuedElem) -> ValuedElem:
    _same(a, b)
    if a.nu == INF:
        return b
    if b.nu == INF:
        return a
    if a.K.backend == "laurent":
        return _laurent_combine(a, b, False)
    return _padic_combine(a, b, 1)


def ve_sub(a: ValuedElem, b: ValuedElem) -> ValuedElem:
    """a - b.  For exact p-adic operands the difference is formed exactly, so
    its valuation is always certified (zero stays an exact zero)."""
    _same(a, b)
    if b.nu == INF:
        return a
    if a.nu == INF:
        return ve_neg(b)
    if a.K.backend == "laurent":
        return _laurent_combine(a, b, True)
    return _padic_combine(a, b, -1)


def ve_neg(a: ValuedElem) -> ValuedElem:
    if a.nu == INF:
        return a
    K = a.K
    if K.backend == "laurent":
        neg = K.residue.neg
        return ValuedElem(K, a.nu, tuple(neg(d) for d in a.digits), a.exact)
    return _finish_padic(K, a.nu, -_unit_int(a), a.abs_prec)


def _rel_prec(a: ValuedElem):
    return INF if a.exact else len(a.digits)


def ve_mul(a: ValuedElem, b: ValuedElem) -> ValuedElem:
    K = _same(a, b)
    if a.nu == INF or b.nu == INF:
        # exact zero annihilates, even against truncated operands
        return ve_zero(K)
    R = min(_rel_prec(a), _rel_prec(b))
    nu = a.nu + b.nu
    if K.backend == "padic":
        return _finish_padic(K, nu, _unit_int(a) * _unit_int(b), INF if R == INF else nu + R)
    F = K.residue
    da, db = a.digits, b.digits
    full = len(da) + len(db) - 1
    keep = full if R == INF else min(full, R)
    keep = min(keep, K.precision)
    add, mul = F.add, F.mul
    out = [0] * keep
    for i, x in enumerate(da):
        if i >= keep:
            break
        for j, y in enumerate(db):
            if i + j >= keep:
                break
            out[i + j] = add(out[i + j], mul(x, y))
    if R == INF:
        exact = full <= K.precision
    else:
        exact = False
        out += [0] * (min(R, K.precision) - len(out))
    return ValuedElem(K, nu, tuple(out), exact)


def ve_inv(a: ValuedElem) -> ValuedElem:
    if a.nu == INF:
        raise ZeroDivisionError("inverse of zero in K")
    K = a.K
    N = K.precision
    L = min(_rel_prec(a), N)
    if K.backend == "padic":
        u = _unit_int(a)
        if a.exact and u == 1:
            return ValuedElem(K, -a.nu, (1,), True)
        mod = K.p ** L
        return ValuedElem(K, -a.nu, tuple(_int_to_digits(pow(u, -1, mod), K.p, L)), False)
    F = K.residue
    d = a.digits
    c0 = F.inv(d[0])
    if a.exact and len(d) == 1:
        return ValuedElem(K, -a.nu, (c0,), True)
    out = [c0]
    mc0 = F.neg(c0)
    for k in range(1, L):
        s = 0
        for j in range(1, min(k, len(d) - 1) + 1):
            s = F.add(s, F.mul(d[j], out[k - j]))
        out.append(F.mul(mc0, s))
    return ValuedElem(K, -a.nu, tuple(out), False)


def ve_div(a: ValuedElem, b: ValuedElem) -> ValuedElem:
    return ve_mul(a, ve_inv(b))


def ve_shift(a: ValuedElem, k: int) -> ValuedElem:
    """Multiply by pi^k (always exact)."""
    if a.nu == INF:
        return a
    return ValuedElem(a.K, a.nu + k, a.digits, a.exact)


def ve_truncate(a: ValuedElem, A: int) -> ValuedElem:
    """Forget everything from pi^A on."""
    if a.nu != INF and a.nu >= A:
        raise PrecisionError(f"element is O(pi^{A}) after truncation")
    if a.nu == INF:
        raise PrecisionError(f"zero truncated at pi^{A} is not certified")
    if a.abs_prec <= A:
        return a
    L = A - a.nu
    ds = list(a.digits[:L]) + [0] * max(0, L - len(a.digits))
    return ValuedElem(a.K, a.nu, tuple(ds), False)


# -- valuation, residues --

def valuation(a: ValuedElem):
    return a.nu


def absval(a: ValuedElem) -> Norm:
    return Norm(a.K.q, None if a.nu == INF else -a.nu)


def res_m(a: ValuedElem, m: int) -> FieldElem:
    """Coefficient of pi^m in a, for a in pi^m O."""
    F = a.K.residue
    if a.nu == INF:
        return F.zero()
    if a.nu < m:
        raise ValuedError(f"res_{m} needs valuation >= {m}, got {a.nu}")
    if a.nu > m:
        return F.zero()
    off = m - a.nu
    if off < len(a.digits):
        return F.elem(a.digits[off])
    if a.exact:
        return F.zero()
    raise PrecisionError(f"digit at pi^{m} is beyond the stored precision")


def res_index(a: ValuedElem, m: int = 0) -> int:
    """``res_m`` as a residue-field index (hot-path variant)."""
    if a.nu == INF or a.nu > m:
        return 0
    if a.nu < m:
        raise ValuedError(f"res_{m} needs valuation >= {m}, got {a.nu}")
    return a.digits[0]


def gamma(a: ValuedElem) -> FieldElem:
    """Reduction O -> F_q."""
    return res_m(a, 0)


def delta(K: ValuedFieldSpec, c: Union[FieldElem, int]) -> ValuedElem:
    """Section of gamma: the constant lift of a residue (least nonnegative
    representative for the p-adic backend)."""
    i = c.index if isinstance(c, FieldElem) else int(c)
    if isinstance(c, FieldElem) and c.spec != K.residue:
        raise ValuedError("residue belongs to a different field")
    return ve_monomial(K, i, 0)


# -- text form --

def _mono(K: ValuedFieldSpec, k: int) -> str:
    if K.backend == "laurent":
        return f"x^{-k}"
    return f"p^{k}"


def elem_to_str(a: ValuedElem) -> str:
    """Canonical text: ``pi^nu*(d0 + d1*pi^1 + ... [+ O(pi^L)])``."""
    if a.nu == INF:
        return "0"
    K = a.K
    dstr = K.residue.digit_str
    terms = []
    for i, d in enumerate(a.digits):
        if d == 0:
            continue
        terms.append(dstr(d) if i == 0 else f"{dstr(d)}*{_mono(K, i)}")
    if not a.exact:
        terms.append(f"O({_mono(K, len(a.digits))})")
    return f"{_mono(K, a.nu)}*({' + '.join(terms)})"


_TOKEN = re.compile(r"\s*(?:(\d+)|(\[[^\]]*\])|([xpO])|(\^-?\d+)|([-+*/()]))")


class ParseError(ValuedError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.msg = msg
        self.pos = pos


def _tokenize(s: str):
    pos, out = 0, []
    s = s.rstrip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            while s[pos].isspace():
                pos += 1
            raise ParseError(f"unexpected character {s[pos]!r}", pos)
        start = m.start(m.lastindex)
        out.append((m.lastindex, m.group(m.lastindex), start))
        pos = m.end()
    out.append((0, "", len(s)))
    return out


def _parse_felem(F: FieldSpec, text: str, pos: int) -> int:
    body = text.replace(" ", "")
    if not body:
        raise ParseError("empty field element", pos)
    coeffs = [0] * F.m
    for term in body.replace("-", "+-").split("+"):
        if not term:
            continue
        m = re.fullmatch(r"(-?\d*)(a(?:\^(\d+))?)?", term)
        if not m or (not m.group(1) and not m.group(2)) or m.group(1) == "-" and not m.group(2):
            raise ParseError(f"bad field element {text!r}", pos)
        c = m.group(1)
        c = 1 if c in ("", None) else (-1 if c == "-" else int(c))
        e = 0 if not m.group(2) else int(m.group(3) or 1)
        if e >= F.m:
            raise ParseError(f"exponent {e} too large in {text!r}", pos)
        coeffs[F.m - 1 - e] = (coeffs[F.m - 1 - e] + c) % F.p
    return F.index_of(coeffs)


class _Approx:
    """Value plus absolute precision bound contributed by O(...) terms."""

    __slots__ = ("val", "prec")

    def __init__(self, val: ValuedElem, prec=INF):
        self.val = val
        self.prec = prec

    def settle(self) -> "_Approx":
        if self.prec == INF:
            return self
        v = self.val
        if v.nu == INF or v.nu >= self.prec:
            return _Approx(ve_zero(v.K), self.prec)
        return _Approx(ve_truncate(v, self.prec), self.prec)


class _Parser:
    def __init__(self, K: ValuedFieldSpec, text: str):
        self.K = K
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end'!r}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> ValuedElem:
        r = self.expr()
        tok = self.peek()
        if tok[0] != 0:
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])
        r = r.settle()
        if r.prec != INF and r.val.nu == INF:
            raise PrecisionError("literal is O(pi^k) only; no certified digit")
        return r.val

    def expr(self) -> _Approx:
        neg = False
        if self.peek()[1] in "+-" and self.peek()[0] == 5:
            neg = self.take()[1] == "-"
        acc = self.term()
        if neg:
            acc = _Approx(ve_neg(acc.val), acc.prec)
        while self.peek()[0] == 5 and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            val = ve_add(acc.val, rhs.val) if op == "+" else ve_sub(acc.val, rhs.val)
            acc = _Approx(val, min(acc.prec, rhs.prec)).settle() if min(acc.prec, rhs.prec) != INF \
                else _Approx(val)
        return acc

    def term(self) -> _Approx:
        acc = self.factor()
        while self.peek()[0] == 5 and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.factor()
            if op == "/":
                if rhs.prec != INF:
                    raise ParseError("cannot divide by an O(...) term", self.peek()[2])
                rhs = _Approx(ve_inv(rhs.val))
            acc = self._mul(acc, rhs)
        return acc

    def _mul(self, a: _Approx, b: _Approx) -> _Approx:
        prec = INF
        if a.prec != INF:
            prec = min(prec, a.prec + (b.val.nu if b.prec == INF else min(b.val.nu, b.prec)))
        if b.prec != INF:
            prec = min(prec, b.prec + (a.val.nu if a.prec == INF else min(a.val.nu, a.prec)))
        r = _Approx(ve_mul(a.val, b.val), prec)
        return r.settle() if prec != INF else r

    def factor(self) -> _Approx:
        base = self.atom()
        if self.peek()[0] == 4:
            tok = self.take()
            e = int(tok[1][1:])
            if base.prec != INF:
                raise ParseError("cannot raise an O(...) term to a power", tok[2])
            v = base.val
            if e < 0:
                v = ve_inv(v)
                e = -e
            r = ve_one(self.K)
            for _ in range(e):
                r = ve_mul(r, v)
            base = _Approx(r)
        return base

    def atom(self) -> _Approx:
        kind, text, pos = self.take()
        K = self.K
        if kind == 1:
            return _Approx(ve_from_int(K, int(text)))
        if kind == 2:
            if K.backend == "padic":
                return _Approx(ve_from_int(K, _parse_felem(K.residue, text[1:-1], pos)))
            return _Approx(ve_monomial(K, _parse_felem(K.residue, text[1:-1], pos), 0))
        if kind == 3:
            if text == "x":
                if K.backend != "laurent":
                    raise ParseError("'x' only exists in the Laurent backend", pos)
                return _Approx(ve_monomial(K, 1, -1))
            if text == "p":
                if K.backend != "padic":
                    raise ParseError("'p' only exists in the p-adic backend", pos)
                return _Approx(ve_monomial(K, 1, 1))
            self.take("(")
            inner = self.expr()
            self.take(")")
            v = inner.val
            if inner.prec != INF or v.nu == INF or len(v.digits) != 1 or not v.exact:
                raise ParseError("O(...) takes a monomial", pos)
            return _Approx(ve_zero(K), v.nu)
        if kind == 5 and text == "(":
            inner = self.expr()
            self.take(")")
            return inner
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos)


def parse_elem(K: ValuedFieldSpec, text: str) -> ValuedElem:
    """Parse an element literal such as ``1+x^-1``, ``18``, ``1/2`` or the
    canonical form produced by ``elem_to_str``."""
    return _Parser(K, text).parse()
