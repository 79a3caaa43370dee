"""Local F-invariants at F_p-rational maximal ideals.

The point is translated to the origin, so lengths of point-primary
quotients can be computed globally in the polynomial ring (the quotient is
supported at the single point).  Rational points have trivial residue-field
degree, so every normalization exponent is the local dimension d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotPrimaryError, ZeroIdealError
from .ideal import (
    INFINITE,
    Budget,
    Ideal,
    bracket_power,
    colon,
    hilbert_samuel,
    ideal_power,
    ideal_product,
    ideal_sum,
    krull_dim,
    length,
    normal_form,
)
from .poly import PolyRing

HL_TOLERANCE = Fraction(5, 100)


class LocalRingAtPoint:
    """R = S/I localized at a rational point of V(I)."""

    __slots__ = ("ring", "gens", "point", "ideal0", "m0", "d")

    def __init__(self, ring: PolyRing, gens, point):
        point = tuple(ring.field.normalize(a) for a in point)
        if len(point) != ring.nvars:
            raise ValueError("point arity does not match the ring")
        gens = tuple(gens)
        for g in gens:
            if g.evaluate(point) != 0:
                raise ValueError(f"generator {g} does not vanish at {point}")
        self.ring = ring
        self.gens = gens
        self.point = point
        shifted = [g.shift(point) for g in gens]
        for g in shifted:
            assert g.is_zero() or any(g.lm()), "translated ideal not inside m"
        self.ideal0 = Ideal(ring, shifted)
        self.m0 = Ideal(ring, ring.gens())
        self.d = ring.nvars if self.ideal0.is_zero() else krull_dim(self.ideal0)

    @property
    def p(self) -> int:
        return self.ring.p

    def translate(self, J: Ideal) -> Ideal:
        """Move an ideal of the presentation ring into origin coordinates."""
        return Ideal(self.ring, [g.shift(self.point) for g in J.gens])

    def __repr__(self):
        return f"LocalRingAtPoint({self.ideal0!r} at {self.point})"


@dataclass(frozen=True)
class HKRecord:
    e: int
    q: int
    lam: int
    normalized: Fraction


@dataclass(frozen=True)
class SplitRecord:
    e: int
    q: int
    a_e: int
    s_e: Fraction


@dataclass(frozen=True)
class LimitEstimate:
    """Extrapolated limit of a normalized sequence.

    confidence is 'exact' (all values equal, or a sound zero short-circuit),
    'converged' (last step under the tolerance), or 'inconclusive'; it is a
    heuristic label, never a proof, because the error constant of the
    underlying O(1/q) term is not effective.
    """

    value: Fraction
    e_used: int
    raw: tuple
    successive_diffs: tuple
    confidence: str


def _extrapolate(values, p: int, tol: float, lo=None, hi=None) -> LimitEstimate:
    values = [Fraction(v) for v in values]
    diffs = tuple(b - a for a, b in zip(values, values[1:]))
    if all(d == 0 for d in diffs):
        return LimitEstimate(values[-1], len(values), tuple(values), diffs, "exact")
    # model v_e = v + c/p^e fitted on the last two points, clamped to the
    # invariant's a-priori range (the model can overshoot when the true
    # error term decays faster than 1/q)
    value = values[-1] + (values[-1] - values[-2]) / (p - 1)
    if lo is not None and value < lo:
        value = Fraction(lo)
    if hi is not None and value > hi:
        value = Fraction(hi)
    conf = "converged" if abs(float(diffs[-1])) < tol else "inconclusive"
    return LimitEstimate(value, len(values), tuple(values), diffs, conf)


# ---------------------------------------------------------------------------
# Hilbert-Kunz

def hk_function(L: LocalRingAtPoint, e: int, J: Ideal | None = None,
                budget: Budget | None = None) -> HKRecord:
    """lambda(R/J^[q]R) for q = p^e, J defaulting to the maximal ideal."""
    budget = budget or Budget()
    if e < 0:
        raise ValueError("e must be non-negative")
    q = L.p**e
    if J is None:
        J0 = L.m0
    else:
        J0 = L.translate(J)
        if length(ideal_sum(L.ideal0, J0), budget) == INFINITE:
            raise NotPrimaryError("J is not primary to the point modulo I")
    lam = length(ideal_sum(L.ideal0, bracket_power(J0, q)), budget)
    if lam == INFINITE:
        raise NotPrimaryError("J is not primary to the point modulo I")
    return HKRecord(e, q, lam, Fraction(lam, q**L.d))


def hk_estimate(L: LocalRingAtPoint, e_max: int, tol: float = 1e-2,
                budget: Budget | None = None) -> LimitEstimate:
    """Normalized Hilbert-Kunz sequence with a 1/q-model extrapolation."""
    if e_max < 2:
        raise ValueError("e_max must be at least 2")
    budget = budget or Budget()
    values = [hk_function(L, e, None, budget).normalized for e in range(1, e_max + 1)]
    return _extrapolate(values, L.p, tol, lo=1)


# ---------------------------------------------------------------------------
# Frobenius splitting

def _frobenius_colon(L: LocalRingAtPoint, q: int, budget: Budget) -> Ideal:
    """(I^[q] : I); the unit ideal when I = 0, by the colon-by-zero convention."""
    return colon(bracket_power(L.ideal0, q), L.ideal0, budget)


def _hypersurface_step_ideal(L: LocalRingAtPoint) -> Ideal:
    from .poly import poly_pow

    f = L.ideal0.gens[0]
    return Ideal(L.ring, (poly_pow(f, L.p - 1),))


def _splitting_ideal_chain(L: LocalRingAtPoint, e: int, budget: Budget) -> Ideal:
    """Splitting ideal of a hypersurface by iterated colon: over the
    polynomial ring (m^[pq] : f^(pq-1)) = ((m^[q] : f^(q-1))^[p] : f^(p-1)),
    so only the small multiplier f^(p-1) ever enters a colon."""
    U = _hypersurface_step_ideal(L)
    J = L.m0
    for _ in range(e):
        J = colon(bracket_power(J, L.p), U, budget)
    return J


def _splitting_length_chain(L: LocalRingAtPoint, e: int, budget: Budget) -> int:
    """lambda(S/I_e) along the same chain, one length per step:
    lambda(S/(J^[p] : u)) = p^n * lambda(S/J) - lambda(S/(J^[p] + u))."""
    U = _hypersurface_step_ideal(L)
    pn = L.p**L.ring.nvars
    lam = 1  # lambda(S/m)
    J = L.m0
    for step in range(1, e + 1):
        lam = pn * lam - length(ideal_sum(bracket_power(J, L.p), U), budget)
        if step < e:
            J = colon(bracket_power(J, L.p), U, budget)
    return lam


def fedder_is_fpure(L: LocalRingAtPoint, budget: Budget | None = None) -> bool:
    """Fedder's criterion: F-pure iff (I^[p] : I) is not inside m^[p]."""
    budget = budget or Budget()
    K = _frobenius_colon(L, L.p, budget)
    mq = bracket_power(L.m0, L.p)
    return any(not normal_form(g, mq, budget).is_zero() for g in K.gens)


def splitting_ideal(L: LocalRingAtPoint, e: int, budget: Budget | None = None) -> Ideal:
    """Lift of I_e: elements whose Frobenius images all land in m.

    Computed as (m^[q] : (I^[q] : I)) over the polynomial presentation; for
    a hypersurface the same ideal is reached by the iterated small colon of
    _splitting_ideal_chain.
    """
    if e < 1:
        raise ValueError("e must be at least 1")
    budget = budget or Budget()
    if len(L.ideal0.gens) == 1:
        return _splitting_ideal_chain(L, e, budget)
    q = L.p**e
    K = _frobenius_colon(L, q, budget)
    return colon(bracket_power(L.m0, q), K, budget)


def splitting_number(L: LocalRingAtPoint, e: int,
                     budget: Budget | None = None) -> SplitRecord:
    """a_e = lambda(R/I_e), normalized by q^d.

    Hypersurfaces walk the iterated-colon chain, converting each colon
    length into the exact difference lambda(S/(M:u)) = lambda(S/M) -
    lambda(S/(M+u)); other presentations take the colon ideal's length
    directly.
    """
    if e < 1:
        raise ValueError("e must be at least 1")
    budget = budget or Budget()
    q = L.p**e
    if len(L.ideal0.gens) == 1:
        a_e = _splitting_length_chain(L, e, budget)
    elif L.ideal0.is_zero():
        a_e = q**L.ring.nvars  # regular ambient point: F-split of full rank
    else:
        mq = bracket_power(L.m0, q)
        K = _frobenius_colon(L, q, budget)
        a_e = length(colon(mq, K, budget), budget)
    return SplitRecord(e, q, a_e, Fraction(a_e, q**L.d))


def fsig_estimate(L: LocalRingAtPoint, e_max: int, tol: float = 1e-2,
                  budget: Budget | None = None) -> LimitEstimate:
    """F-signature estimate from the normalized splitting numbers.

    a_1 = 0 means R is not F-split, hence a_e = 0 for every e and the limit
    is exactly 0; that short-circuit is sound and is taken.
    """
    if e_max < 2:
        raise ValueError("e_max must be at least 2")
    budget = budget or Budget()
    first = splitting_number(L, 1, budget)
    if first.a_e == 0:
        return LimitEstimate(Fraction(0), 1, (Fraction(0),), (), "exact")
    values = [first.s_e]
    for e in range(2, e_max + 1):
        values.append(splitting_number(L, e, budget).s_e)
    return _extrapolate(values, L.p, tol, lo=0, hi=1)


# ---------------------------------------------------------------------------
# pairs

def pair_splitting_number(L: LocalRingAtPoint, a: Ideal, t, e: int,
                          budget: Budget | None = None) -> SplitRecord:
    """Splitting number of the pair (R, a^t):
    a_e = lambda(S / (m^[q] : a^ceil(t(q-1)) * (I^[q]:I)))."""
    if e < 1:
        raise ValueError("e must be at least 1")
    t = Fraction(t)
    if t < 0:
        raise ValueError("t must be non-negative")
    budget = budget or Budget()
    a0 = L.translate(a)
    if not any(not normal_form(g, L.ideal0, budget).is_zero() for g in a0.gens):
        raise ZeroIdealError("pair ideal is zero modulo I")
    q = L.p**e
    n_mult = math.ceil(t * (q - 1))
    mq = bracket_power(L.m0, q)
    K = _frobenius_colon(L, q, budget)
    mult = ideal_product(ideal_power(a0, n_mult), K)
    if len(mult.gens) == 1:
        u = mult.gens[0]
        a_e = q**L.ring.nvars - length(ideal_sum(mq, Ideal(L.ring, (u,))), budget)
    else:
        a_e = length(colon(mq, mult, budget), budget)
    return SplitRecord(e, q, a_e, Fraction(a_e, q**L.d))


def nu_invariant(L: LocalRingAtPoint, a: Ideal, e: int,
                 budget: Budget | None = None) -> int:
    """nu(q) = max{r >= 0 : a^r not inside m^[q] + I}, by binary search."""
    if e < 1:
        raise ValueError("e must be at least 1")
    budget = budget or Budget()
    a0 = L.translate(a)
    if not any(not normal_form(g, L.ideal0, budget).is_zero() for g in a0.gens):
        raise ZeroIdealError("nu of the zero ideal")
    for g in a0.gens:
        if g.evaluate((0,) * L.ring.nvars) != 0:
            raise ValueError("a must be contained in the maximal ideal")
    q = L.p**e
    M = ideal_sum(L.ideal0, bracket_power(L.m0, q))
    M.groebner_basis(budget)

    def contained(r: int) -> bool:
        return all(
            normal_form(g, M, budget).is_zero() for g in ideal_power(a0, r).gens
        )

    lo, hi = 0, L.ring.nvars * (q - 1) + 1  # m^(n(q-1)+1) lies in m^[q]
    assert contained(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if contained(mid):
            hi = mid
        else:
            lo = mid
    return lo


# ---------------------------------------------------------------------------
# classification

@dataclass(frozen=True)
class DiagnosticFlags:
    regular: bool
    f_pure: bool
    hk: LimitEstimate
    fsig: LimitEstimate
    hilbert_samuel: Fraction | None
    threshold: Fraction | None
    predicted_sfr_gorenstein: bool | None
    hl_satisfied: bool | None
    hl_near_equality: bool | None
    hl_note: str
    basis: str = "limit flags are estimate-based, never proved"

    def as_dict(self) -> dict:
        return {
            "regular": self.regular,
            "f_pure": self.f_pure,
            "hilbert_samuel": None if self.hilbert_samuel is None
            else str(self.hilbert_samuel),
            "threshold": None if self.threshold is None else str(self.threshold),
            "predicted_sfr_gorenstein": self.predicted_sfr_gorenstein,
            "hl_satisfied": self.hl_satisfied,
            "hl_near_equality": self.hl_near_equality,
            "hl_note": self.hl_note,
            "basis": self.basis,
        }


def classify(L: LocalRingAtPoint, e_max: int = 2, tol: float = 1e-2,
             n_max: int = 8, budget: Budget | None = None) -> DiagnosticFlags:
    """Diagnostic flags: exact regularity test (lambda_1 = p^d), Fedder
    F-purity, the small-multiplicity threshold 1 + max{1/d!, 1/e(R)}, and
    the multiplicity bound (e(R)-1)(1-s) >= e_HK - 1 on the estimates."""
    budget = budget or Budget()
    lam1 = hk_function(L, 1, None, budget)
    regular = lam1.lam == L.p**L.d
    f_pure = fedder_is_fpure(L, budget)
    hk = hk_estimate(L, e_max, tol, budget)
    fsig = fsig_estimate(L, e_max, tol, budget)
    try:
        hs = hilbert_samuel(L.ideal0, n_max, None, budget)
        e_hs: Fraction | None = hs.multiplicity
    except Exception:
        e_hs = None
    threshold = None
    predicted = None
    hl_satisfied = None
    hl_near = None
    hl_note = "hilbert_samuel unavailable"
    if e_hs is not None:
        threshold = 1 + max(Fraction(1, math.factorial(L.d)), Fraction(1, e_hs))
        predicted = hk.value <= threshold
        if e_hs == 1:
            hl_satisfied = True
            hl_near = None
            hl_note = "vacuous (e(R) = 1)"
        else:
            lhs = (e_hs - 1) * (1 - fsig.value)
            rhs = hk.value - 1
            hl_satisfied = lhs >= rhs - HL_TOLERANCE
            hl_near = abs(lhs - rhs) <= HL_TOLERANCE
            hl_note = f"(e-1)(1-s) = {lhs}, e_HK - 1 = {rhs}"
    return DiagnosticFlags(
        regular=regular,
        f_pure=f_pure,
        hk=hk,
        fsig=fsig,
        hilbert_samuel=e_hs,
        threshold=threshold,
        predicted_sfr_gorenstein=predicted,
        hl_satisfied=hl_satisfied,
        hl_near_equality=hl_near,
        hl_note=hl_note,
    )
