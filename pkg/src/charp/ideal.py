"""Groebner bases and ideal arithmetic over F_p[x_1..x_n].

Buchberger's algorithm with the normal pair-selection strategy (degree of
the lcm, then the monomial order, then pair indices) and both classical
pair-elimination criteria.  Output bases are reduced, hence canonical for
a fixed ideal and order; every downstream report inherits its determinism
from that.

Inside the engine a monomial is a single integer with one bit-field per
variable, so multiplication is integer addition and divisibility is a
guarded subtraction; order keys are packed the same way and combine
additively under multiplication (with a constant correction), which keeps
the reduction loop free of tuple traffic.  Public polynomials keep their
exponent-tuple form.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement

from .errors import (
    NotAPowerOfPError,
    NotPrimaryError,
    NotStabilizedError,
    ResourceBudgetError,
    UnitIdealError,
)
from .poly import (
    MonomialOrder,
    Polynomial,
    PolyRing,
    mono_degree,
    mono_div,
    monomial_count_box,
)

INFINITE = math.inf

_FIELD_BITS = 40
_FIELD_CAP = 1 << (_FIELD_BITS - 1)


@dataclass
class Budget:
    """Resource caps plus usage counters; one instance per task."""

    max_basis: int = 2000
    max_pairs: int = 200_000
    max_box: int = 1_000_000
    used_basis: int = 0
    used_pairs: int = 0
    used_box: int = 0

    def charge_basis(self, n: int):
        self.used_basis = max(self.used_basis, n)
        if n > self.max_basis:
            raise ResourceBudgetError("basis size", n, self.max_basis)

    def charge_pair(self):
        self.used_pairs += 1
        if self.used_pairs > self.max_pairs:
            raise ResourceBudgetError("pair count", self.used_pairs, self.max_pairs)

    def charge_box(self, n: int):
        self.used_box = max(self.used_box, n)
        if n > self.max_box:
            raise ResourceBudgetError("standard monomial box", n, self.max_box)

    def snapshot(self) -> dict:
        return {
            "max_basis": self.max_basis,
            "max_pairs": self.max_pairs,
            "max_box": self.max_box,
            "used_basis": self.used_basis,
            "used_pairs": self.used_pairs,
            "used_box": self.used_box,
        }


# ---------------------------------------------------------------------------
# packed-monomial engine

class _Engine:
    """Packed-integer monomial codec and order keys for one ring."""

    __slots__ = ("ring", "n", "p", "guard", "kcorr", "kind", "block")

    def __init__(self, ring: PolyRing):
        self.ring = ring
        n = ring.nvars
        self.n = n
        self.p = ring.p
        B = _FIELD_BITS
        self.guard = 0
        for j in range(n):
            self.guard |= 1 << (j * B + B - 1)
        self.kind = ring.order.kind
        self.block = ring.order.block
        # key(m1*m2) = key(m1) + key(m2) - kcorr for every supported order,
        # and key(1) = kcorr by taking m1 = m2 = 1
        self.kcorr = self._key((0,) * n)

    def pack(self, t: tuple) -> int:
        B = _FIELD_BITS
        m = 0
        for j, e in enumerate(t):
            m |= e << (j * B)
        return m

    def unpack(self, m: int) -> tuple:
        B = _FIELD_BITS
        mask = (1 << B) - 1
        return tuple((m >> (j * B)) & mask for j in range(self.n))

    def _grevlex_key(self, t: tuple) -> int:
        B = _FIELD_BITS
        c = _FIELD_CAP - 1
        n = len(t)
        key = sum(t) << (n * B)
        for j, e in enumerate(t):
            key |= (c - e) << (j * B)
        return key

    def _key(self, t: tuple) -> int:
        B = _FIELD_BITS
        if self.kind == "lex":
            n = len(t)
            key = 0
            for j, e in enumerate(t):
                key |= e << ((n - 1 - j) * B)
            return key
        if self.kind == "grevlex":
            return self._grevlex_key(t)
        k = self.block
        hi = self._grevlex_key(t[:k])
        lo = self._grevlex_key(t[k:])
        return (hi << ((self.n - k + 1) * B)) | lo

    def key(self, t: tuple) -> int:
        return self._key(t)

    def degree(self, m: int) -> int:
        return sum(self.unpack(m))

    def div(self, a: int, b: int):
        """a / b as packed monomials, or None."""
        t = (a | self.guard) - b
        if t & self.guard == self.guard:
            return t ^ self.guard
        return None

    def lcm(self, a: int, b: int) -> int:
        ta, tb = self.unpack(a), self.unpack(b)
        return self.pack(tuple(max(x, y) for x, y in zip(ta, tb)))

    def plist(self, f: Polynomial):
        """[(key, packed_mono, coeff)] descending; terms are ring-sorted."""
        out = [(self._key(m), self.pack(m), c) for m, c in f.terms]
        out.sort(key=lambda t: t[0], reverse=True)
        return out

    def to_poly(self, terms) -> Polynomial:
        return Polynomial(
            self.ring, tuple((self.unpack(m), c) for _, m, c in terms)
        )


_ENGINES: dict = {}


def _engine(ring: PolyRing) -> _Engine:
    key = (ring.p, ring.names, ring.order.kind, ring.order.block)
    eng = _ENGINES.get(key)
    if eng is None:
        eng = _Engine(ring)
        _ENGINES[key] = eng
    return eng


def _shift_scale(terms, skey, smono, coef, p, kcorr):
    """coef * x^s * terms; keys combine additively."""
    delta = skey - kcorr
    return [(k + delta, m + smono, (c * coef) % p) for k, m, c in terms]


def _sub(fl, gl, p):
    """fl - gl for descending packed term lists."""
    out = []
    i, j = 0, 0
    nf, ng = len(fl), len(gl)
    while i < nf and j < ng:
        kf, kg = fl[i][0], gl[j][0]
        if kf > kg:
            out.append(fl[i])
            i += 1
        elif kg > kf:
            kk, mg, cg = gl[j]
            out.append((kk, mg, (-cg) % p))
            j += 1
        else:
            c = (fl[i][2] - gl[j][2]) % p
            if c:
                out.append((fl[i][0], fl[i][1], c))
            i += 1
            j += 1
    out.extend(fl[i:])
    for k in range(j, ng):
        kk, mg, cg = gl[k]
        out.append((kk, mg, (-cg) % p))
    return out


def _monic(terms, field):
    c = terms[0][2]
    if c == 1:
        return terms
    inv = field.inv(c)
    p = field.p
    return [(k, m, (cc * inv) % p) for k, m, cc in terms]


def _merge_add(a, b, p):
    """a + b for ascending term lists."""
    out = []
    i, j = 0, 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        ka, kb = a[i][0], b[j][0]
        if ka < kb:
            out.append(a[i])
            i += 1
        elif kb < ka:
            out.append(b[j])
            j += 1
        else:
            c = (a[i][2] + b[j][2]) % p
            if c:
                out.append((ka, a[i][1], c))
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return out


class _Geobucket:
    """Sum-of-buckets accumulator; subtracting a short reducer touches only
    a short bucket, which keeps long division passes near-linear."""

    __slots__ = ("p", "buckets")

    def __init__(self, p):
        self.p = p
        self.buckets: list = []  # ascending term lists, bucket i holds <= 4<<i

    def add_desc(self, terms):
        """Add a descending term list."""
        if not terms:
            return
        cur = terms[::-1]
        i = 0
        while (4 << i) < len(cur):
            i += 1
        while len(self.buckets) <= i:
            self.buckets.append([])
        cur = _merge_add(self.buckets[i], cur, self.p)
        self.buckets[i] = []
        while len(cur) > (4 << i):
            i += 1
            while len(self.buckets) <= i:
                self.buckets.append([])
            cur = _merge_add(self.buckets[i], cur, self.p)
            self.buckets[i] = []
        self.buckets[i] = cur

    def pop_max(self):
        """Remove and return the leading (key, mono, coeff), or None."""
        p = self.p
        while True:
            best_key = -1
            best_i = -1
            for i, b in enumerate(self.buckets):
                if b and b[-1][0] > best_key:
                    best_key = b[-1][0]
                    best_i = i
            if best_i < 0:
                return None
            key, mono, coeff = self.buckets[best_i].pop()
            for b in self.buckets:
                if b and b[-1][0] == key:
                    coeff = (coeff + b.pop()[2]) % p
            if coeff:
                return (key, mono, coeff)


def _reduce_full(fl, basis, eng: _Engine):
    """Full normal form of fl against basis entries (key, mono, coeff) lists."""
    p = eng.p
    kcorr = eng.kcorr
    div = eng.div
    out = []
    bucket = _Geobucket(p)
    bucket.add_desc(list(fl))
    seen: dict = {}  # packed mono -> basis index or -1 (irreducible)
    tails: dict = {}
    while True:
        head = bucket.pop_max()
        if head is None:
            break
        k0, m0, c0 = head
        idx = seen.get(m0)
        if idx is None:
            idx = -1
            for bi, terms in enumerate(basis):
                if div(m0, terms[0][1]) is not None:
                    idx = bi
                    break
            seen[m0] = idx
        if idx < 0:
            out.append(head)
            continue
        terms = basis[idx]
        tail = tails.get(idx)
        if tail is None:
            tail = terms[1:]
            tails[idx] = tail
        if tail:
            s = m0 - terms[0][1]
            skey = k0 - terms[0][0] + kcorr
            bucket.add_desc(_shift_scale(tail, skey, s, (-c0) % p, p, kcorr))
    return out


def _buchberger(gens, ring: PolyRing, budget: Budget):
    eng = _engine(ring)
    field = ring.field
    basis: list = []
    heap: list = []
    done: set = set()

    def push_pairs(k):
        mk = basis[k][0][1]
        for i in range(k):
            l = eng.lcm(basis[i][0][1], mk)
            heapq.heappush(heap, (eng.degree(l), eng._key(eng.unpack(l)), i, k))

    for f in gens:
        if f.is_zero():
            continue
        r = _reduce_full(eng.plist(f), basis, eng)
        if r:
            basis.append(_monic(r, field))
            budget.charge_basis(len(basis))
            push_pairs(len(basis) - 1)

    while heap:
        budget.charge_pair()
        _, _, i, j = heapq.heappop(heap)
        done.add((i, j))
        mi, mj = basis[i][0][1], basis[j][0][1]
        l = eng.lcm(mi, mj)
        if l == mi + mj:
            continue  # coprime leading terms
        chained = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            if eng.div(l, basis[k][0][1]) is not None:
                pa = (min(i, k), max(i, k))
                pb = (min(j, k), max(j, k))
                if pa in done and pb in done:
                    chained = True
                    break
        if chained:
            continue
        p = eng.p
        kcorr = eng.kcorr
        lkey = eng._key(eng.unpack(l))
        fi, fj = basis[i], basis[j]
        a = _shift_scale(fi, lkey - fi[0][0] + kcorr, l - fi[0][1], 1, p, kcorr)
        b = _shift_scale(fj, lkey - fj[0][0] + kcorr, l - fj[0][1], 1, p, kcorr)
        r = _reduce_full(_sub(a, b, p), basis, eng)
        if r:
            basis.append(_monic(r, field))
            budget.charge_basis(len(basis))
            push_pairs(len(basis) - 1)

    # reduce: minimalize leading terms, then tail-reduce sequentially
    basis.sort(key=lambda t: t[0][0])
    minimal = []
    for terms in basis:
        if not any(eng.div(terms[0][1], m[0][1]) is not None for m in minimal):
            minimal.append(terms)
    for idx in range(len(minimal)):
        others = minimal[:idx] + minimal[idx + 1 :]
        minimal[idx] = _monic(_reduce_full(minimal[idx], others, eng), field)
    minimal.sort(key=lambda t: t[0][0], reverse=True)
    return tuple(eng.to_poly(t) for t in minimal)


# ---------------------------------------------------------------------------
# ideals

class Ideal:
    """Generator list with a write-once cache of its reduced Groebner basis."""

    __slots__ = ("ring", "gens", "_gb")

    def __init__(self, ring: PolyRing, gens):
        self.ring = ring
        self.gens = tuple(g for g in gens if not g.is_zero())
        self._gb = None

    def groebner_basis(self, budget: Budget | None = None):
        if self._gb is None:
            self._gb = _buchberger(self.gens, self.ring, budget or Budget())
        return self._gb

    def is_unit(self, budget=None) -> bool:
        gb = self.groebner_basis(budget)
        return bool(gb) and not any(gb[0].lm())

    def is_zero(self) -> bool:
        return not self.gens

    def contains(self, f: Polynomial, budget=None) -> bool:
        return normal_form(f, self, budget).is_zero()

    def __repr__(self):
        return f"Ideal({', '.join(str(g) for g in self.gens) or '0'})"


def groebner(I: Ideal, order: MonomialOrder | None = None, budget=None) -> Ideal:
    """Ideal with its reduced Groebner basis cache filled (for the given
    order, defaulting to the ring's own)."""
    if order is None or order == I.ring.order:
        I.groebner_basis(budget)
        return I
    ring2 = I.ring.with_order(order)
    J = Ideal(ring2, [ring2.from_dict(dict(g.terms)) for g in I.gens])
    J.groebner_basis(budget)
    return J


def normal_form(f: Polynomial, I: Ideal, budget=None) -> Polynomial:
    """The unique fully reduced remainder of f modulo I."""
    gb = I.groebner_basis(budget)
    eng = _engine(I.ring)
    basis = [eng.plist(g) for g in gb]
    return eng.to_poly(_reduce_full(eng.plist(f), basis, eng))


def s_polynomial(f: Polynomial, g: Polynomial) -> Polynomial:
    from .poly import mono_lcm

    ring = f.ring
    l = mono_lcm(f.lm(), g.lm())
    a = f.mul_monomial(mono_div(l, f.lm()), ring.field.inv(f.lc()))
    b = g.mul_monomial(mono_div(l, g.lm()), ring.field.inv(g.lc()))
    return a - b


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    return Ideal(I.ring, I.gens + J.gens)


def ideal_product(I: Ideal, J: Ideal) -> Ideal:
    if I.is_zero() or J.is_zero():
        return Ideal(I.ring, ())
    return Ideal(I.ring, [f * g for f in I.gens for g in J.gens])


def ideal_power(I: Ideal, n: int) -> Ideal:
    if n == 0:
        return Ideal(I.ring, (I.ring.one(),))
    gens = []
    for combo in combinations_with_replacement(I.gens, n):
        g = I.ring.one()
        for f in combo:
            g = g * f
        gens.append(g)
    return Ideal(I.ring, gens)


def bracket_power(I: Ideal, q: int) -> Ideal:
    """Ideal generated by generator-wise q-th powers, q a power of p."""
    p = I.ring.p
    if q < 1:
        raise NotAPowerOfPError(q, p)
    m = q
    while m % p == 0:
        m //= p
    if m != 1:
        raise NotAPowerOfPError(q, p)
    return Ideal(I.ring, [g.frobenius_power(q) for g in I.gens])


def exact_divide(h: Polynomial, g: Polynomial) -> Polynomial:
    """h / g for h in the principal ideal (g)."""
    ring = h.ring
    eng = _engine(ring)
    p = ring.p
    glist = _monic(eng.plist(g), ring.field)
    ginv = ring.field.inv(g.lc())
    work = eng.plist(h)
    lt_key, lt_mono = glist[0][0], glist[0][1]
    quot: dict = {}
    while work:
        k0, m0, c0 = work[0]
        s = eng.div(m0, lt_mono)
        if s is None:
            raise ValueError("exact_divide: dividend not in the principal ideal")
        quot[eng.unpack(s)] = (quot.get(eng.unpack(s), 0) + c0) % p
        work = _sub(
            work, _shift_scale(glist, k0 - lt_key + eng.kcorr, s, c0, p, eng.kcorr), p
        )
    return ring.from_dict(quot).scale(ginv)


def intersect(I: Ideal, J: Ideal, budget=None) -> Ideal:
    """I intersect J via elimination of a fresh leading variable t:
    (t*I + (1-t)*J) with the block order, keeping t-free basis elements."""
    ring = I.ring
    n = ring.nvars
    ext = PolyRing(
        ring.field,
        ("#t",) + ring.names,
        MonomialOrder.elimination(n + 1, 1) if n else MonomialOrder.lex(1),
    )

    def lift(f: Polynomial) -> Polynomial:
        return ext.from_dict({(0,) + m: c for m, c in f.terms})

    t = ext.gen(0)
    one = ext.one()
    gens = [t * lift(f) for f in I.gens]
    gens += [(one - t) * lift(g) for g in J.gens]
    gb = Ideal(ext, gens).groebner_basis(budget)
    out = []
    for g in gb:
        if all(m[0] == 0 for m, _ in g.terms):
            out.append(ring.from_dict({m[1:]: c for m, c in g.terms}))
    return Ideal(ring, out)


def colon(I: Ideal, J: Ideal, budget=None) -> Ideal:
    """(I : J) = {f | f*J in I}, as the intersection over generators g of J
    of (I intersect (g)) / g."""
    ring = I.ring
    gens = [g for g in J.gens if not g.is_zero()]
    if not gens:
        return Ideal(ring, (ring.one(),))  # (I : 0) = (1)
    acc = None
    for g in gens:
        meet = intersect(I, Ideal(ring, (g,)), budget)
        part = Ideal(ring, [exact_divide(h, g) for h in meet.gens])
        acc = part if acc is None else intersect(acc, part, budget)
    return acc


def ideal_equal(I: Ideal, J: Ideal, budget=None) -> bool:
    return all(I.contains(g, budget) for g in J.gens) and all(
        J.contains(f, budget) for f in I.gens
    )


def ideal_contains_ideal(I: Ideal, J: Ideal, budget=None) -> bool:
    """J subset of I, by generator membership."""
    return all(I.contains(g, budget) for g in J.gens)


# ---------------------------------------------------------------------------
# standard monomials, length, dimension

def _minimalize_monomials(gens):
    """Drop exponent vectors dominated componentwise by another."""
    out = []
    for g in sorted(set(gens), key=lambda m: (mono_degree(m), m)):
        if not any(mono_div(g, h) is not None for h in out):
            out.append(g)
    return out


def _count_standard(gens, bounds, cache):
    """Monomials in prod [0,b_i) divisible by no generator."""
    if not bounds:
        return 0 if gens else 1
    key = (gens, bounds)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if not gens:
        out = monomial_count_box(bounds)
        cache[key] = out
        return out
    b0 = bounds[0]
    cuts = sorted({0, b0} | {g[0] for g in gens if g[0] < b0})
    total = 0
    for s, e in zip(cuts, cuts[1:]):
        active = tuple(
            _minimalize_monomials([g[1:] for g in gens if g[0] <= s])
        )
        total += (e - s) * _count_standard(active, bounds[1:], cache)
    cache[key] = total
    return total


def _leading_data(I: Ideal, budget):
    """(leading monomials, per-variable pure-power bounds or None)."""
    gb = I.groebner_basis(budget)
    lts = [g.lm() for g in gb]
    n = I.ring.nvars
    bounds = [None] * n
    for m in lts:
        support = [i for i, e in enumerate(m) if e]
        if len(support) == 1:
            i = support[0]
            if bounds[i] is None or m[i] < bounds[i]:
                bounds[i] = m[i]
    return lts, bounds


def length(I: Ideal, budget=None):
    """dim_{F_p} S/I: the number of standard monomials, or INFINITE.

    Pure-power leading terms give the box; remaining leading terms are
    excluded by a threshold recursion over the variables, so the cost scales
    with the generator structure rather than the box volume.
    """
    budget = budget or Budget()
    if I.is_unit(budget):
        return 0
    lts, bounds = _leading_data(I, budget)
    if any(b is None for b in bounds):
        return INFINITE
    budget.charge_box(monomial_count_box(bounds))
    bounds_t = tuple(bounds)
    mixed = [
        m
        for m in lts
        if sum(1 for e in m if e) != 1 and all(e < b for e, b in zip(m, bounds_t))
    ]
    gens = tuple(_minimalize_monomials(mixed))
    return _count_standard(gens, bounds_t, {})


@dataclass
class StandardMonomialBasis:
    """Monomials outside the leading-term ideal; a basis of S/I when finite."""

    monomials: tuple
    is_finite: bool
    ideal: Ideal = field(repr=False, default=None)


def standard_monomial_basis(I: Ideal, budget=None) -> StandardMonomialBasis:
    budget = budget or Budget()
    if I.is_unit(budget):
        return StandardMonomialBasis((), True, I)
    lts, bounds = _leading_data(I, budget)
    if any(b is None for b in bounds):
        return StandardMonomialBasis((), False, I)
    budget.charge_box(monomial_count_box(bounds))
    from itertools import product as iproduct

    lts_min = _minimalize_monomials(lts)
    out = []
    for m in iproduct(*[range(b) for b in bounds]):
        if not any(mono_div(m, g) is not None for g in lts_min):
            out.append(m)
    out.sort(key=I.ring.order.key)
    return StandardMonomialBasis(tuple(out), True, I)


def krull_dim(I: Ideal, budget=None) -> int:
    """Dimension of S/I: the largest number of variables supporting no
    leading-term generator (combinatorial dimension of the leading ideal)."""
    budget = budget or Budget()
    if I.is_unit(budget):
        raise UnitIdealError("krull_dim of the unit ideal")
    gb = I.groebner_basis(budget)
    supports = {frozenset(i for i, e in enumerate(g.lm()) if e) for g in gb}
    n = I.ring.nvars
    for size in range(n, -1, -1):
        for combo in combinations(range(n), size):
            u = frozenset(combo)
            if not any(s <= u for s in supports):
                return size
    raise AssertionError("unreachable: empty subset always independent")


@dataclass
class HilbertSamuelResult:
    multiplicity: Fraction
    exact: bool
    dim: int
    lengths: tuple


def hilbert_samuel(
    I: Ideal, n_max: int, m_gens=None, budget=None
) -> HilbertSamuelResult:
    """Hilbert-Samuel multiplicity e(S/I at m) from the difference table of
    n -> length(S/(I + m^n)), m defaulting to the origin maximal ideal.

    The d-th finite differences of the length function equal d! times the
    leading coefficient once the polynomial regime is reached; the value is
    flagged exact when the last two d-th differences agree.
    """
    budget = budget or Budget()
    ring = I.ring
    m = Ideal(ring, tuple(m_gens) if m_gens is not None else tuple(ring.gens()))
    d = krull_dim(I, budget)
    if n_max < d + 1:
        raise NotStabilizedError(n_max)
    lengths = [0]
    for n in range(1, n_max + 1):
        lam = length(ideal_sum(I, ideal_power(m, n)), budget)
        if lam == INFINITE:
            raise NotPrimaryError("m is not primary to the point modulo I")
        lengths.append(lam)
    diffs = list(lengths)
    for _ in range(d):
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
    if len(diffs) < 2 or diffs[-1] != diffs[-2]:
        raise NotStabilizedError(n_max)
    return HilbertSamuelResult(Fraction(diffs[-1]), True, d, tuple(lengths))
