"""Job files: parsing, validation, and task execution.

Two encodings share one schema: a sectioned key-value text format (grammar
in the README) and JSON.  Unknown keys are hard errors so typos cannot
silently change a run.  Tasks are independent and may run in a process
pool; results are reassembled in task order, so reports do not depend on
scheduling.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .errors import CharpError, ParseError
from .finv import (
    classify,
    fedder_is_fpure,
    fsig_estimate,
    hk_estimate,
    hk_function,
    nu_invariant,
    pair_splitting_number,
    splitting_number,
)
from .gf import field_new
from .ideal import Budget, Ideal
from .poly import PolyRing
from .spectrum import (
    PrimeSample,
    RingComponent,
    RingPresentation,
    flat_extension_check,
    gamma_data,
    global_fsig,
    global_hk,
    semicontinuity_probe,
)

TASK_KINDS = (
    "hk", "fsig", "fedder", "pair", "nu",
    "global_hk", "global_fsig", "semicontinuity", "flat_check", "classify",
)

_JOB_KEYS = {"p", "tolerance", "budget_monomials", "budget_basis",
             "budget_pairs", "jobs"}
_COMPONENT_KEYS = {"vars", "ideal", "min_primes"}
_TASK_KEYS = {
    "hk": {"component", "point", "e_max", "tolerance"},
    "fsig": {"component", "point", "e_max", "tolerance"},
    "fedder": {"component", "point"},
    "pair": {"component", "point", "a", "t", "t_grid", "e_max", "tolerance"},
    "nu": {"component", "point", "a", "e"},
    "global_hk": {"samples", "e_max", "tolerance"},
    "global_fsig": {"samples", "e_max", "tolerance"},
    "semicontinuity": {"special", "nearby", "e"},
    "flat_check": {"component", "point", "extra_vars", "e_max", "a", "t"},
    "classify": {"component", "point", "e_max", "tolerance"},
}
_TASK_REQUIRED = {
    "pair": {"a"},
    "nu": {"a"},
    "global_hk": {"samples"},
    "global_fsig": {"samples"},
    "semicontinuity": {"special", "nearby"},
}


# ---------------------------------------------------------------------------
# parsing

def parse_job_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            job = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON job file: {exc}") from None
        return validate_job(job)
    return validate_job(parse_job_text(text))


def parse_job_text(text: str) -> dict:
    """Sectioned key-value format; see the README for the grammar."""
    job: dict = {"components": [], "tasks": []}
    target: dict = job
    target_keys = _JOB_KEYS
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"line {lineno}: unterminated section header")
            header = line[1:-1].strip()
            if header == "component":
                target = {}
                job["components"].append(target)
                target_keys = _COMPONENT_KEYS
            elif header.startswith("task"):
                kind = header[4:].strip()
                if kind not in TASK_KINDS:
                    raise ParseError(f"line {lineno}: unknown task kind '{kind}'")
                target = {"kind": kind}
                job["tasks"].append(target)
                target_keys = _TASK_KEYS[kind] | {"kind"}
            else:
                raise ParseError(f"line {lineno}: unknown section '[{header}]'")
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in target_keys:
            raise ParseError(f"line {lineno}: unknown key '{key}'")
        if key in target:
            raise ParseError(f"line {lineno}: duplicate key '{key}'")
        target[key] = _parse_value(key, value, lineno)
    return job


def _parse_value(key: str, value: str, lineno: int):
    if key in ("p", "jobs", "budget_monomials", "budget_basis", "budget_pairs",
               "component", "e", "e_max", "extra_vars"):
        try:
            return int(value)
        except ValueError:
            raise ParseError(f"line {lineno}: '{key}' must be an integer") from None
    if key == "tolerance":
        try:
            return float(value)
        except ValueError:
            raise ParseError(f"line {lineno}: tolerance must be a number") from None
    if key == "vars":
        return value.split()
    if key in ("ideal", "a"):
        return [g.strip() for g in value.split(";") if g.strip()]
    if key == "min_primes":
        primes = []
        for chunk in value.split("|"):
            gens = [g.strip() for g in chunk.split(";") if g.strip()]
            if gens:
                primes.append(gens)
        return primes
    if key == "point":
        return [int(tok) for tok in value.replace(",", " ").split()]
    if key == "t":
        return value
    if key == "t_grid":
        return value.split()
    if key in ("samples", "nearby"):
        return [_parse_sample(tok, lineno) for tok in value.split()]
    if key == "special":
        return _parse_sample(value, lineno)
    raise ParseError(f"line {lineno}: unhandled key '{key}'")


def _parse_sample(tok: str, lineno: int) -> dict:
    # component:(a,b,c), with () for 0-variable components
    if ":" not in tok:
        raise ParseError(f"line {lineno}: sample '{tok}' must be comp:(coords)")
    comp, _, coords = tok.partition(":")
    coords = coords.strip()
    if not (coords.startswith("(") and coords.endswith(")")):
        raise ParseError(f"line {lineno}: sample '{tok}' must be comp:(coords)")
    inner = coords[1:-1].strip()
    point = [int(c) for c in inner.split(",")] if inner else []
    try:
        return {"component": int(comp), "point": point}
    except ValueError:
        raise ParseError(f"line {lineno}: bad sample '{tok}'") from None


def validate_job(job: dict) -> dict:
    if not isinstance(job, dict):
        raise ParseError("job must be a mapping")
    unknown = set(job) - (_JOB_KEYS | {"components", "tasks"})
    if unknown:
        raise ParseError(f"unknown job keys: {sorted(unknown)}")
    if "p" not in job:
        raise ParseError("job is missing the characteristic 'p'")
    try:
        field_new(job["p"])
    except Exception as exc:
        raise ParseError(f"NotPrime: {exc}") from None
    components = job.get("components", [])
    if not components:
        raise ParseError("job declares no components")
    for i, comp in enumerate(components):
        unknown = set(comp) - _COMPONENT_KEYS
        if unknown:
            raise ParseError(f"component {i}: unknown keys {sorted(unknown)}")
        comp.setdefault("vars", [])
        comp.setdefault("ideal", [])
    for i, task in enumerate(job.get("tasks", [])):
        kind = task.get("kind")
        if kind not in TASK_KINDS:
            raise ParseError(f"task {i}: unknown kind '{kind}'")
        unknown = set(task) - (_TASK_KEYS[kind] | {"kind"})
        if unknown:
            raise ParseError(f"task {i} ({kind}): unknown keys {sorted(unknown)}")
        missing = _TASK_REQUIRED.get(kind, set()) - set(task)
        if missing:
            raise ParseError(f"task {i} ({kind}): missing keys {sorted(missing)}")
    job.setdefault("tasks", [])
    return job


# ---------------------------------------------------------------------------
# execution

def build_presentation(job: dict) -> RingPresentation:
    field = field_new(job["p"])
    comps = []
    for spec in job["components"]:
        ring = PolyRing(field, tuple(spec.get("vars", [])))
        gens = [ring.parse(src) for src in spec.get("ideal", [])]
        primes = None
        if spec.get("min_primes"):
            primes = [
                Ideal(ring, [ring.parse(src) for src in gens_src])
                for gens_src in spec["min_primes"]
            ]
        comps.append(RingComponent(ring, gens, primes))
    return RingPresentation(comps)


def _fraction_cell(x: Fraction) -> dict:
    x = Fraction(x)
    return {
        "fraction": f"{x.numerator}/{x.denominator}",
        "decimal": f"{float(x):.12f}",
    }


def _estimate_payload(est) -> dict:
    return {
        "value": _fraction_cell(est.value),
        "e_used": est.e_used,
        "raw": [_fraction_cell(v) for v in est.raw],
        "successive_diffs": [_fraction_cell(v) for v in est.successive_diffs],
        "confidence": est.confidence,
    }


def _point_label(point) -> str:
    return "(" + ",".join(str(a) for a in point) + ")"


def _budget_for(job: dict, task: dict, overrides: dict) -> Budget:
    box = overrides.get("budget_monomials") or job.get("budget_monomials") or 1_000_000
    env_cap = overrides.get("env_budget_monomials")
    if env_cap is not None:
        box = min(box, env_cap)
    return Budget(
        max_basis=job.get("budget_basis") or 2000,
        max_pairs=job.get("budget_pairs") or 200_000,
        max_box=box,
    )


def _tolerance_for(job: dict, task: dict, overrides: dict) -> float:
    if overrides.get("tolerance") is not None:
        return overrides["tolerance"]
    if task.get("tolerance") is not None:
        return task["tolerance"]
    return job.get("tolerance", 1e-2)


def run_task(job: dict, index: int, overrides: dict | None = None) -> dict:
    """Execute one task; returns a JSON-able result with TSV rows."""
    overrides = overrides or {}
    task = job["tasks"][index]
    kind = task["kind"]
    budget = _budget_for(job, task, overrides)
    tol = _tolerance_for(job, task, overrides)
    out = {"index": index, "kind": kind, "status": "ok", "rows": []}
    try:
        R = build_presentation(job)
        _dispatch(kind, R, job, task, out, tol, budget)
    except CharpError as exc:
        out["status"] = "error"
        out["error"] = f"{type(exc).__name__}: {exc}"
    except (ValueError, ZeroDivisionError) as exc:
        out["status"] = "error"
        out["error"] = f"{type(exc).__name__}: {exc}"
    out["budget"] = budget.snapshot()
    return out


def _component(R: RingPresentation, index: int):
    if not 0 <= index < len(R.components):
        raise ValueError(f"component index {index} out of range "
                         f"(presentation has {len(R.components)})")
    return R.components[index]


def _local(R: RingPresentation, task: dict):
    ci = task.get("component", 0)
    comp = _component(R, ci)
    point = task.get("point")
    if point is None:
        point = [0] * comp.ring.nvars
    return comp.local_at(point), ci, point


def _samples(R: RingPresentation, raw) -> list:
    out = []
    for s in raw:
        _component(R, s["component"])
        out.append(PrimeSample(s["component"], tuple(s["point"])))
    return out


def _row(task_label, component, point, e, q, lam=None, norm=None,
         a_e=None, s_e=None):
    return {
        "task": task_label,
        "component": component,
        "point": _point_label(point),
        "e": e,
        "q": q,
        "lambda": lam,
        "norm": None if norm is None else _fraction_cell(norm),
        "a_e": a_e,
        "s_e": None if s_e is None else _fraction_cell(s_e),
    }


def _dispatch(kind, R, job, task, out, tol, budget):
    if kind == "hk":
        L, ci, point = _local(R, task)
        e_max = task.get("e_max", 2)
        for e in range(1, e_max + 1):
            rec = hk_function(L, e, None, budget)
            out["rows"].append(_row("hk", ci, point, rec.e, rec.q,
                                    rec.lam, rec.normalized))
        out["estimate"] = _estimate_payload(hk_estimate(L, e_max, tol, budget))
    elif kind == "fsig":
        L, ci, point = _local(R, task)
        e_max = task.get("e_max", 2)
        est = fsig_estimate(L, e_max, tol, budget)
        for e in range(1, est.e_used + 1):
            rec = splitting_number(L, e, budget)
            out["rows"].append(_row("fsig", ci, point, rec.e, rec.q,
                                    a_e=rec.a_e, s_e=rec.s_e))
        out["estimate"] = _estimate_payload(est)
    elif kind == "fedder":
        L, ci, point = _local(R, task)
        out["f_pure"] = fedder_is_fpure(L, budget)
    elif kind == "pair":
        L, ci, point = _local(R, task)
        ring = L.ring
        a = Ideal(ring, [ring.parse(src) for src in task["a"]])
        ts = task.get("t_grid") or [task.get("t", "0")]
        e_max = task.get("e_max", 2)
        out["pair"] = []
        for t_src in ts:
            t = Fraction(t_src)
            recs = [pair_splitting_number(L, a, t, e, budget)
                    for e in range(1, e_max + 1)]
            for rec in recs:
                out["rows"].append(_row(f"pair t={t}", ci, point, rec.e, rec.q,
                                        a_e=rec.a_e, s_e=rec.s_e))
            out["pair"].append({
                "t": str(t),
                "s_e": [_fraction_cell(rec.s_e) for rec in recs],
            })
    elif kind == "nu":
        L, ci, point = _local(R, task)
        ring = L.ring
        a = Ideal(ring, [ring.parse(src) for src in task["a"]])
        out["nu"] = nu_invariant(L, a, task.get("e", 1), budget)
    elif kind in ("global_hk", "global_fsig"):
        samples = _samples(R, task["samples"])
        fn = global_hk if kind == "global_hk" else global_fsig
        res = fn(R, samples, task.get("e_max", 2), tol, budget)
        gd = gamma_data(R)
        out["gamma"] = {
            "dims": list(gd.dims),
            "gamma": gd.gamma,
            "z_components": list(gd.z_components),
            "z_is_spec": gd.z_is_spec,
        }
        out["value"] = _fraction_cell(res.value)
        out["exact"] = res.exact
        out["bound_note"] = res.note
        out["arg_sample"] = None if res.arg_sample is None else {
            "component": res.arg_sample.component,
            "point": list(res.arg_sample.point),
        }
        out["excluded_samples"] = [
            {"component": s.component, "point": list(s.point)}
            for s in res.excluded
        ]
        for s, est in res.per_sample:
            d = R.components[s.component].dim()
            for e, v in enumerate(est.raw, start=1):
                q = R.p**e
                if kind == "global_hk":
                    out["rows"].append(_row(kind, s.component, s.point, e, q,
                                            lam=int(v * q**d), norm=v))
                else:
                    out["rows"].append(_row(kind, s.component, s.point, e, q,
                                            a_e=int(v * q**d), s_e=v))
    elif kind == "semicontinuity":
        special = _samples(R, [task["special"]])[0]
        nearby = _samples(R, task["nearby"])
        rep = semicontinuity_probe(R, special, nearby, task.get("e", 1), budget)
        out["ok"] = rep.ok
        out["note"] = rep.note
        ci = special.component
        d = R.components[ci].dim()
        out["rows"].append(_row("semicontinuity:special", ci, special.point,
                                rep.e, rep.q,
                                lam=int(rep.special_value * rep.q**d),
                                norm=rep.special_value))
        for s, lam, norm in rep.rows:
            out["rows"].append(_row("semicontinuity:nearby", ci, s.point,
                                    rep.e, rep.q, lam=lam, norm=norm))
        if not rep.ok:
            out["status"] = "error"
            out["error"] = rep.note
    elif kind == "flat_check":
        L, ci, point = _local(R, task)
        pair = None
        if task.get("a"):
            a = Ideal(L.ring, [L.ring.parse(src) for src in task["a"]])
            pair = (a, Fraction(task.get("t", "0")))
        rep = flat_extension_check(L, task.get("extra_vars", 1),
                                   task.get("e_max", 2), pair, budget)
        out["ok"] = rep.ok
        for e, q, lam_r, lam_t, s_r, s_t, lam_ok, s_ok in rep.rows:
            out["rows"].append(_row("flat_check:base", ci, point, e, q,
                                    lam=lam_r, norm=Fraction(lam_r, q**L.d),
                                    a_e=None, s_e=s_r))
            ext_point = tuple(point) + (0,) * rep.n_extra_vars
            out["rows"].append(_row("flat_check:ext", ci, ext_point, e, q,
                                    lam=lam_t,
                                    norm=Fraction(lam_t, q**(L.d + rep.n_extra_vars)),
                                    a_e=None, s_e=s_t))
        out["pair_rows"] = [
            {"e": e, "q": q, "s_base": _fraction_cell(sr),
             "s_ext": _fraction_cell(st), "equal": ok}
            for e, q, sr, st, ok in rep.pair_rows
        ]
        if not rep.ok:
            out["status"] = "error"
            out["error"] = "flat extension comparison failed"
    elif kind == "classify":
        L, ci, point = _local(R, task)
        flags = classify(L, task.get("e_max", 2), tol, budget=budget)
        out["flags"] = flags.as_dict()
        out["flags"]["hk"] = _estimate_payload(flags.hk)
        out["flags"]["fsig"] = _estimate_payload(flags.fsig)
    else:  # pragma: no cover - validate_job keeps this unreachable
        raise ParseError(f"unknown task kind '{kind}'")


def _run_task_star(args):
    job, index, overrides = args
    return run_task(job, index, overrides)


def run_job(job: dict, overrides: dict | None = None, jobs: int = 1) -> dict:
    """Execute all tasks; deterministic report regardless of scheduling."""
    overrides = overrides or {}
    t0 = time.time()
    n = len(job["tasks"])
    jobs = max(1, overrides.get("jobs") or job.get("jobs") or jobs)
    if jobs > 1 and n > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task_star,
                                    [(job, i, overrides) for i in range(n)]))
    else:
        results = [run_task(job, i, overrides) for i in range(n)]
    results.sort(key=lambda r: r["index"])
    report = {
        "p": job["p"],
        "components": [
            {"vars": c.get("vars", []), "ideal": c.get("ideal", [])}
            for c in job["components"]
        ],
        "tasks": results,
        "status": "error" if any(r["status"] != "ok" for r in results) else "ok",
        "wall_time_s": round(time.time() - t0, 3),
    }
    return report
