"""Global invariants over Spec for finite products of polynomial quotients.

Each component is F_p[x_1..x_n]/I with F_p-rational sample points, so the
residue-field degree correction vanishes at every sampled prime and each
component's normalization exponent is its dimension.  The global Hilbert-
Kunz value is a max and the global F-signature a min over the sampled
primes, with the locus bookkeeping deciding when the minimum collapses to
an exact zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .finv import (
    LimitEstimate,
    LocalRingAtPoint,
    fsig_estimate,
    hk_estimate,
    hk_function,
    pair_splitting_number,
    splitting_number,
)
from .ideal import Budget, Ideal, krull_dim, normal_form
from .poly import PolyRing


class RingComponent:
    """One factor F_p[vars]/I of a product presentation."""

    __slots__ = ("ring", "gens", "declared_min_primes", "primes_checked")

    def __init__(self, ring: PolyRing, gens, declared_min_primes=None):
        self.ring = ring
        self.gens = tuple(gens)
        ideal = Ideal(ring, self.gens)
        if ideal.gens and ideal.is_unit():
            raise ValueError("component ideal is the unit ideal")
        self.declared_min_primes = tuple(declared_min_primes or ())
        self.primes_checked = False
        if self.declared_min_primes:
            for Q in self.declared_min_primes:
                if Q.is_unit():
                    raise ValueError("declared minimal prime is the unit ideal")
                for g in self.gens:
                    if not normal_form(g, Q).is_zero():
                        raise ValueError(
                            "declared minimal prime does not contain the ideal"
                        )
            self.primes_checked = True  # containment and properness only

    def ideal(self) -> Ideal:
        return Ideal(self.ring, self.gens)

    def dim(self) -> int:
        if not self.gens:
            return self.ring.nvars
        return krull_dim(self.ideal())

    def local_at(self, point) -> LocalRingAtPoint:
        return LocalRingAtPoint(self.ring, self.gens, point)

    def __repr__(self):
        return f"RingComponent(F_{self.ring.p}[{','.join(self.ring.names)}]/({', '.join(map(str, self.gens))}))"


class RingPresentation:
    """Non-empty product of components over one characteristic p."""

    __slots__ = ("components", "p")

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise ValueError("a presentation needs at least one component")
        p = components[0].ring.p
        for c in components:
            if c.ring.p != p:
                raise ValueError("all components must share the characteristic")
        self.components = components
        self.p = p

    def __repr__(self):
        return " x ".join(repr(c) for c in self.components)


@dataclass(frozen=True)
class PrimeSample:
    """A rational point on one component (empty point for 0-variable
    components, whose whole Spec is that single point)."""

    component: int
    point: tuple

    def label(self) -> str:
        return f"c{self.component}:({','.join(map(str, self.point))})"


@dataclass(frozen=True)
class GammaData:
    dims: tuple
    alpha_at_closed_point: tuple
    gammas: tuple
    gamma: int
    z_components: tuple
    z_is_spec: bool
    primes_checked: tuple


def gamma_data(R: RingPresentation) -> GammaData:
    """Per-component dimension = gamma (rational closed points have alpha 0),
    the global gamma as their max, and the components attaining it."""
    dims = tuple(c.dim() for c in R.components)
    gamma = max(dims)
    z = tuple(i for i, d in enumerate(dims) if d == gamma)
    return GammaData(
        dims=dims,
        alpha_at_closed_point=(0,) * len(dims),
        gammas=dims,
        gamma=gamma,
        z_components=z,
        z_is_spec=len(z) == len(dims),
        primes_checked=tuple(c.primes_checked for c in R.components),
    )


@dataclass(frozen=True)
class GlobalInvariantResult:
    value: Fraction
    exact: bool
    estimate: LimitEstimate | None
    arg_sample: PrimeSample | None
    per_sample: tuple
    excluded: tuple
    note: str


def global_hk(R: RingPresentation, samples, e_max: int, tol: float = 1e-2,
              budget: Budget | None = None) -> GlobalInvariantResult:
    """Max of the local Hilbert-Kunz estimates over the sampled primes on
    gamma-attaining components; off-locus samples are excluded.  The result
    is a lower bound for the global value when sampling is incomplete."""
    budget = budget or Budget()
    gd = gamma_data(R)
    included = [s for s in samples if s.component in gd.z_components]
    excluded = tuple(s for s in samples if s.component not in gd.z_components)
    if not included:
        raise ValueError("no samples lie on a gamma-attaining component")
    per = []
    for s in included:
        L = R.components[s.component].local_at(s.point)
        per.append((s, hk_estimate(L, e_max, tol, budget)))
    best = max(per, key=lambda t: (t[1].value,))
    # deterministic argmax: first sample attaining the max
    for s, est in per:
        if est.value == best[1].value:
            best = (s, est)
            break
    return GlobalInvariantResult(
        value=best[1].value,
        exact=best[1].confidence == "exact",
        estimate=best[1],
        arg_sample=best[0],
        per_sample=tuple(per),
        excluded=excluded,
        note="max over sampled primes: a lower bound for the global value "
             "under incomplete sampling",
    )


def global_fsig(R: RingPresentation, samples, e_max: int, tol: float = 1e-2,
                budget: Budget | None = None) -> GlobalInvariantResult:
    """Min of the local F-signature estimates over the sampled primes, or
    exactly 0 whenever some component misses the global gamma (the free-rank
    of every module then grows a full power of p too slowly)."""
    budget = budget or Budget()
    gd = gamma_data(R)
    if not gd.z_is_spec:
        return GlobalInvariantResult(
            value=Fraction(0),
            exact=True,
            estimate=None,
            arg_sample=None,
            per_sample=(),
            excluded=tuple(samples),
            note="exact 0: a component misses the global gamma, so free "
                 "summands are asymptotically negligible",
        )
    samples = list(samples)
    if not samples:
        raise ValueError("global_fsig needs at least one sample")
    per = []
    for s in samples:
        L = R.components[s.component].local_at(s.point)
        per.append((s, fsig_estimate(L, e_max, tol, budget)))
    best = min(per, key=lambda t: (t[1].value,))
    for s, est in per:
        if est.value == best[1].value:
            best = (s, est)
            break
    return GlobalInvariantResult(
        value=best[1].value,
        exact=best[1].confidence == "exact",
        estimate=best[1],
        arg_sample=best[0],
        per_sample=tuple(per),
        excluded=(),
        note="min over sampled primes: an upper bound for the global value "
             "under incomplete sampling",
    )


# ---------------------------------------------------------------------------
# semicontinuity

@dataclass(frozen=True)
class SemicontinuityReport:
    e: int
    q: int
    special: PrimeSample
    special_value: Fraction
    rows: tuple
    ok: bool
    note: str


def semicontinuity_probe(R: RingPresentation, special: PrimeSample, nearby,
                         e: int, budget: Budget | None = None) -> SemicontinuityReport:
    """Check lambda_e(special) >= lambda_e(P) for the nearby samples on one
    equidimensional component.  The inequality is a theorem under the
    hypotheses, so a violation is reported as an engine bug."""
    budget = budget or Budget()
    comp = R.components[special.component]
    if any(s.component != special.component for s in nearby):
        raise ValueError("all samples must lie on one component")
    if comp.declared_min_primes:
        dims = {krull_dim(Q) for Q in comp.declared_min_primes}
        if len(dims) > 1:
            raise ValueError(
                "component is not equidimensional per its declared minimal primes"
            )
    sp = hk_function(comp.local_at(special.point), e, None, budget)
    rows = []
    ok = True
    for s in nearby:
        rec = hk_function(comp.local_at(s.point), e, None, budget)
        rows.append((s, rec.lam, rec.normalized))
        if rec.normalized > sp.normalized:
            ok = False
    note = "upper semicontinuity holds on the sample" if ok else \
        "VIOLATION: semicontinuity failed; this indicates an engine bug"
    return SemicontinuityReport(
        e=e, q=sp.q, special=special, special_value=sp.normalized,
        rows=tuple(rows), ok=ok, note=note,
    )


def is_smooth_point(comp: RingComponent, point) -> bool:
    """Jacobian triage at a rational point: full-rank Jacobian certifies a
    regular point cheaply; the length test stays the ground truth."""
    if not comp.gens:
        return True
    point = tuple(comp.ring.field.normalize(a) for a in point)
    p = comp.ring.p
    rows = []
    for g in comp.gens:
        rows.append([g.derivative(j).evaluate(point) for j in range(comp.ring.nvars)])
    codim = comp.ring.nvars - comp.dim()
    return _modp_rank(rows, p) == codim


def _modp_rank(rows, p) -> int:
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(rows)):
            if rows[r][col] % p:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [(v * inv) % p for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] % p:
                c = rows[r][col]
                rows[r] = [(a - c * b) % p for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# flat extension checks

@dataclass(frozen=True)
class FlatExtensionReport:
    n_extra_vars: int
    rows: tuple  # (e, q, lam_R, lam_T, s_R, s_T, lam_ok, s_ok)
    pair_rows: tuple
    ok: bool


def flat_extension_check(L: LocalRingAtPoint, n_extra_vars: int, e_max: int,
                         pair=None, budget: Budget | None = None) -> FlatExtensionReport:
    """Adjoin free variables (a flat extension with regular closed fiber)
    and verify, integer-exactly for each e, that lambda scales by q^k and
    the normalized splitting numbers are unchanged."""
    if n_extra_vars < 1:
        raise ValueError("need at least one extra variable")
    budget = budget or Budget()
    ring = L.ring
    names = list(ring.names)
    extra = []
    i = 1
    while len(extra) < n_extra_vars:
        cand = f"t{i}"
        if cand not in names and cand not in extra:
            extra.append(cand)
        i += 1
    ext = ring.extend(extra)

    def lift(f):
        return ext.from_dict({m + (0,) * n_extra_vars: c for m, c in f.terms})

    LT = LocalRingAtPoint(ext, [lift(g) for g in L.gens],
                          L.point + (0,) * n_extra_vars)
    rows = []
    ok = True
    for e in range(1, e_max + 1):
        q = L.p**e
        lam_r = hk_function(L, e, None, budget).lam
        lam_t = hk_function(LT, e, None, budget).lam
        s_r = splitting_number(L, e, budget).s_e
        s_t = splitting_number(LT, e, budget).s_e
        lam_ok = lam_t == lam_r * q**n_extra_vars
        s_ok = s_t == s_r
        ok = ok and lam_ok and s_ok
        rows.append((e, q, lam_r, lam_t, s_r, s_t, lam_ok, s_ok))
    pair_rows = []
    if pair is not None:
        a, t = pair
        a_ext = Ideal(ext, [lift(g) for g in a.gens])
        for e in range(1, e_max + 1):
            q = L.p**e
            pr = pair_splitting_number(L, a, t, e, budget)
            pt = pair_splitting_number(LT, a_ext, t, e, budget)
            s_ok = pr.s_e == pt.s_e
            ok = ok and s_ok
            pair_rows.append((e, q, pr.s_e, pt.s_e, s_ok))
    return FlatExtensionReport(
        n_extra_vars=n_extra_vars, rows=tuple(rows),
        pair_rows=tuple(pair_rows), ok=ok,
    )
