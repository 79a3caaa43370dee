"""Sparse multivariate polynomial arithmetic over F_p.

Monomials are exponent tuples; polynomials store their terms sorted
strictly descending in the ring's monomial order, so iteration order and
printed output are canonical.
"""

from __future__ import annotations

from .errors import ExponentOverflowError, ParseError, UnknownVariableError
from .gf import FieldContext

EXPONENT_LIMIT = 2**31 - 1


# ---------------------------------------------------------------------------
# monomial helpers (exponent tuples)

def mono_mul(a: tuple, b: tuple) -> tuple:
    out = tuple(x + y for x, y in zip(a, b))
    for e in out:
        if e > EXPONENT_LIMIT:
            raise ExponentOverflowError(f"exponent {e} exceeds 32-bit bound")
    return out


def mono_scale(a: tuple, n: int) -> tuple:
    out = tuple(x * n for x in a)
    for e in out:
        if e > EXPONENT_LIMIT:
            raise ExponentOverflowError(f"exponent {e} exceeds 32-bit bound")
    return out


def mono_div(a: tuple, b: tuple):
    """a / b, or None when b does not divide a."""
    out = []
    for x, y in zip(a, b):
        if x < y:
            return None
        out.append(x - y)
    return tuple(out)


def mono_lcm(a: tuple, b: tuple) -> tuple:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_gcd(a: tuple, b: tuple) -> tuple:
    return tuple(min(x, y) for x, y in zip(a, b))


def mono_degree(a: tuple) -> int:
    return sum(a)


def monomial_count_box(bounds) -> int:
    """Number of monomials in the box prod [0, b_i): the standard monomials
    of the pure-power ideal (x_1^b_1, ..., x_n^b_n)."""
    out = 1
    for b in bounds:
        if b < 0:
            raise ValueError("box bounds must be non-negative")
        out *= b
    return out


# ---------------------------------------------------------------------------
# monomial orders

class MonomialOrder:
    """Total order on exponent tuples, compatible with multiplication and
    with 1 as least element.

    kind is one of 'lex', 'grevlex', 'elim'; 'elim' compares a leading block
    of variables first (grevlex within each block), which eliminates the
    block variables in Groebner bases.
    """

    __slots__ = ("kind", "nvars", "block")

    def __init__(self, kind: str, nvars: int, block: int = 0):
        if kind not in ("lex", "grevlex", "elim"):
            raise ValueError(f"unknown monomial order kind '{kind}'")
        if kind == "elim" and not (0 < block < nvars):
            raise ValueError("elimination block must be a proper prefix")
        self.kind = kind
        self.nvars = nvars
        self.block = block

    @staticmethod
    def lex(nvars: int) -> "MonomialOrder":
        return MonomialOrder("lex", nvars)

    @staticmethod
    def grevlex(nvars: int) -> "MonomialOrder":
        return MonomialOrder("grevlex", nvars)

    @staticmethod
    def elimination(nvars: int, block: int) -> "MonomialOrder":
        return MonomialOrder("elim", nvars, block)

    def key(self, mono: tuple):
        """Sort key: bigger key = bigger monomial."""
        if self.kind == "lex":
            return mono
        if self.kind == "grevlex":
            return _grevlex_key(mono)
        k = self.block
        return (_grevlex_key(mono[:k]), _grevlex_key(mono[k:]))

    def __eq__(self, other):
        return (
            isinstance(other, MonomialOrder)
            and (self.kind, self.nvars, self.block)
            == (other.kind, other.nvars, other.block)
        )

    def __hash__(self):
        return hash((self.kind, self.nvars, self.block))

    def __repr__(self):
        if self.kind == "elim":
            return f"MonomialOrder(elim, block={self.block})"
        return f"MonomialOrder({self.kind})"


def _grevlex_key(mono: tuple):
    return (sum(mono), tuple(-e for e in reversed(mono)))


# ---------------------------------------------------------------------------
# ring and polynomials

class PolyRing:
    """F_p[x_1..x_n] with a fixed monomial order (default grevlex)."""

    __slots__ = ("field", "names", "order", "nvars", "_index")

    def __init__(self, field: FieldContext, names, order: MonomialOrder | None = None):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.field = field
        self.names = names
        self.nvars = len(names)
        self.order = order if order is not None else MonomialOrder.grevlex(len(names))
        if self.order.nvars != self.nvars:
            raise ValueError("order arity does not match variable count")
        self._index = {n: i for i, n in enumerate(names)}

    @property
    def p(self) -> int:
        return self.field.p

    def zero(self) -> "Polynomial":
        return Polynomial(self, ())

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c: int) -> "Polynomial":
        c = self.field.normalize(c)
        if c == 0:
            return self.zero()
        return Polynomial(self, (((0,) * self.nvars, c),))

    def gen(self, i: int) -> "Polynomial":
        mono = tuple(1 if j == i else 0 for j in range(self.nvars))
        return Polynomial(self, ((mono, 1),))

    def gens(self):
        return [self.gen(i) for i in range(self.nvars)]

    def monomial(self, mono, c: int = 1) -> "Polynomial":
        c = self.field.normalize(c)
        if c == 0:
            return self.zero()
        mono = tuple(mono)
        if len(mono) != self.nvars:
            raise ValueError("monomial arity mismatch")
        return Polynomial(self, ((mono, c),))

    def from_dict(self, coeffs: dict) -> "Polynomial":
        items = []
        for mono, c in coeffs.items():
            c = self.field.normalize(c)
            if c:
                items.append((tuple(mono), c))
        items.sort(key=lambda t: self.order.key(t[0]), reverse=True)
        return Polynomial(self, tuple(items))

    def parse(self, src: str) -> "Polynomial":
        return parse_poly(src, self)

    def with_order(self, order: MonomialOrder) -> "PolyRing":
        return PolyRing(self.field, self.names, order)

    def extend(self, new_names, order: MonomialOrder | None = None) -> "PolyRing":
        """Ring with extra variables appended."""
        return PolyRing(self.field, self.names + tuple(new_names), order)

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.field == other.field
            and self.names == other.names
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.field, self.names, self.order))

    def __repr__(self):
        return f"PolyRing(F_{self.p}[{', '.join(self.names)}], {self.order!r})"


class Polynomial:
    """Immutable sparse polynomial; terms sorted descending in the ring order."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms):
        self.ring = ring
        self.terms = tuple(terms)

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def lm(self) -> tuple:
        """Leading monomial."""
        return self.terms[0][0]

    def lc(self) -> int:
        return self.terms[0][1]

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(m) for m, _ in self.terms)

    def num_terms(self) -> int:
        return len(self.terms)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            assert other.ring == self.ring, "mixed rings"
            return other
        if isinstance(other, int):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = dict(self.terms)
        p = self.ring.p
        for m, c in other.terms:
            nc = (d.get(m, 0) + c) % p
            if nc:
                d[m] = nc
            else:
                d.pop(m, None)
        return self.ring.from_dict(d)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial(self.ring, tuple((m, (-c) % p) for m, c in self.terms))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.ring.p
        d: dict = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = mono_mul(m1, m2)
                nc = (d.get(m, 0) + c1 * c2) % p
                if nc:
                    d[m] = nc
                else:
                    d.pop(m, None)
        return self.ring.from_dict(d)

    __rmul__ = __mul__

    def scale(self, c: int) -> "Polynomial":
        c = self.ring.field.normalize(c)
        if c == 0:
            return self.ring.zero()
        p = self.ring.p
        return Polynomial(self.ring, tuple((m, (c0 * c) % p) for m, c0 in self.terms))

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        return self.scale(self.ring.field.inv(self.lc()))

    def mul_monomial(self, mono: tuple, c: int = 1) -> "Polynomial":
        c = self.ring.field.normalize(c)
        if c == 0:
            return self.ring.zero()
        p = self.ring.p
        return Polynomial(
            self.ring,
            tuple((mono_mul(m, mono), (c0 * c) % p) for m, c0 in self.terms),
        )

    def __pow__(self, n: int) -> "Polynomial":
        return poly_pow(self, n)

    def frobenius_power(self, q: int) -> "Polynomial":
        """self**q for q a power of p, by the term-wise Frobenius (c^q = c in F_p)."""
        return Polynomial(
            self.ring, tuple((mono_scale(m, q), c) for m, c in self.terms)
        )

    # -- calculus / evaluation ----------------------------------------------

    def evaluate(self, point) -> int:
        p = self.ring.p
        point = [a % p for a in point]
        total = 0
        for m, c in self.terms:
            v = c
            for a, e in zip(point, m):
                if e:
                    v = (v * pow(a, e, p)) % p
            total = (total + v) % p
        return total

    def derivative(self, i: int) -> "Polynomial":
        p = self.ring.p
        d: dict = {}
        for m, c in self.terms:
            e = m[i]
            if e % p == 0:
                continue
            nm = m[:i] + (e - 1,) + m[i + 1 :]
            d[nm] = (d.get(nm, 0) + c * e) % p
        return self.ring.from_dict(d)

    def substitute_var(self, i: int, value: "Polynomial") -> "Polynomial":
        """Replace x_i by the given polynomial."""
        ring = self.ring
        groups: dict = {}
        for m, c in self.terms:
            e = m[i]
            rest = m[:i] + (0,) + m[i + 1 :]
            groups.setdefault(e, {})
            groups[e][rest] = (groups[e].get(rest, 0) + c) % ring.p
        out = ring.zero()
        powers = {0: ring.one()}
        for e in sorted(groups):
            if e not in powers:
                prev = max(powers)
                acc = powers[prev]
                for _ in range(prev, e):
                    acc = acc * value
                powers[e] = acc
            out = out + ring.from_dict(groups[e]) * powers[e]
        return out

    def shift(self, point) -> "Polynomial":
        """f(x + a): translate the point a to the origin."""
        ring = self.ring
        out = self
        for i, a in enumerate(point):
            a = ring.field.normalize(a)
            if a:
                out = out.substitute_var(i, ring.gen(i) + ring.const(a))
        return out

    # -- dunder plumbing ----------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        return (
            isinstance(other, Polynomial)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ring.names, self.ring.p, self.terms))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            factors = []
            if c != 1 or not any(m):
                factors.append(str(c))
            for name, e in zip(self.ring.names, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"<{self} over F_{self.ring.p}>"


def poly_pow(f: Polynomial, n: int) -> Polynomial:
    """f**n by repeated squaring, with the term-wise Frobenius fast path
    when n is a power of the characteristic."""
    if n < 0:
        raise ValueError("negative exponent")
    if n == 0:
        return f.ring.one()
    p = f.ring.p
    m = n
    while m % p == 0:
        m //= p
    if m == 1:  # n = p^e
        return f.frobenius_power(n)
    result = f.ring.one()
    base = f
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


# ---------------------------------------------------------------------------
# parser
#
# expr   := term (('+'|'-') term)*
# term   := factor ('*' factor)*
# factor := INT | VAR | factor '^' INT | '(' expr ')'
#
# Whitespace is ignored; implicit multiplication is not allowed; INT is a
# non-negative decimal literal (reduced mod p).

class _Tokens:
    def __init__(self, src: str):
        self.src = src
        self.toks: list[tuple[str, str, int]] = []
        i, n = 0, len(src)
        while i < n:
            ch = src[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < n and src[j].isdigit():
                    j += 1
                self.toks.append(("INT", src[i:j], i))
                i = j
            elif ch.isalpha() or ch == "_":
                j = i
                while j < n and (src[j].isalnum() or src[j] == "_"):
                    j += 1
                self.toks.append(("VAR", src[i:j], i))
                i = j
            elif ch in "+-*^()":
                self.toks.append((ch, ch, i))
                i += 1
            else:
                raise ParseError(f"unexpected character '{ch}'", i)
        self.pos = 0

    def peek(self):
        if self.pos < len(self.toks):
            return self.toks[self.pos]
        return ("EOF", "", len(self.src))

    def next(self):
        t = self.peek()
        self.pos += 1
        return t


def parse_poly(src: str, ring: PolyRing) -> Polynomial:
    """Parse the exact expression grammar above into a polynomial."""
    toks = _Tokens(src)
    result = _parse_expr(toks, ring)
    kind, text, pos = toks.peek()
    if kind != "EOF":
        raise ParseError(f"unexpected '{text}'", pos)
    return result


def _parse_expr(toks: _Tokens, ring: PolyRing) -> Polynomial:
    out = _parse_term(toks, ring)
    while True:
        kind, _, _ = toks.peek()
        if kind == "+":
            toks.next()
            out = out + _parse_term(toks, ring)
        elif kind == "-":
            toks.next()
            out = out - _parse_term(toks, ring)
        else:
            return out


def _parse_term(toks: _Tokens, ring: PolyRing) -> Polynomial:
    out = _parse_factor(toks, ring)
    while toks.peek()[0] == "*":
        toks.next()
        out = out * _parse_factor(toks, ring)
    return out


def _parse_factor(toks: _Tokens, ring: PolyRing) -> Polynomial:
    kind, text, pos = toks.next()
    if kind == "INT":
        out = ring.const(int(text))
    elif kind == "VAR":
        idx = ring._index.get(text)
        if idx is None:
            raise UnknownVariableError(text, pos)
        out = ring.gen(idx)
    elif kind == "(":
        out = _parse_expr(toks, ring)
        kind2, _, pos2 = toks.next()
        if kind2 != ")":
            raise ParseError("expected ')'", pos2)
    else:
        raise ParseError(f"expected INT, variable, or '(', got '{text or kind}'", pos)
    while toks.peek()[0] == "^":
        toks.next()
        kind2, text2, pos2 = toks.next()
        if kind2 != "INT":
            raise ParseError("exponent must be a non-negative integer", pos2)
        out = poly_pow(out, int(text2))
    return out
