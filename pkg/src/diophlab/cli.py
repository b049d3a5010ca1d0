"""Command-line front end: every library operation as a subcommand.

Output is machine-readable (json, tsv, or a plain table) and fully
deterministic for a fixed configuration and seed, so reports can be
diffed byte for byte.  Exit status is 0 on success, 1 when an audit
finds a violation, and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .bestapprox import (
    best_approximations,
    height_minimum,
    shortest_vector_oracle,
    shortest_vector_reduced,
    wx_profile,
)
from .cfrac import convergents, dn_gap_audit, neighbors, quotient_interval
from .construct import (
    cantor_children,
    expansion_tree,
    fixed_chain,
    growth_ok,
    nesting_ok,
    regularize_schedule,
    slow_chain,
    slow_step,
    tree_audit,
    verify_spacing,
)
from .core import NormChoice, PrimVec, RatPoint, pvec, residual, wedge
from .dimension import (
    bounds_crossing,
    cantor_bounds,
    cantor_exact_dim,
    cantor_tree,
    covering_s_estimate,
    dn_bounds,
)
from .domains import audit_ball_sandwich, ball_bounds, in_domain
from .latinv import (
    companion_pair,
    distortion_below,
    invariants,
    lattice_minima,
    scan_minima,
    wedge_constraint_ok,
)
from .util import frac_str, json_ready, parse_frac, resolve_seed


FORMATS = ("json", "tsv", "table")
DEFAULT_ROOT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class RunConfig:
    """Validated run settings, resolved once before dispatch.

    Every subcommand shares these; the tolerance only binds where a
    subcommand reports a root-finding residual to hold it against.
    """

    subcommand: str
    fmt: str = "json"
    norm: NormChoice = "sup"
    seed: int = 0
    jobs: int = 1
    tolerance: float | None = None

    def __post_init__(self):
        if self.fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.fmt!r}")
        if self.norm not in ("sup", "euclid"):
            raise ValueError(f"unknown norm {self.norm!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    @property
    def root_tolerance(self) -> float:
        return DEFAULT_ROOT_TOLERANCE if self.tolerance is None else self.tolerance


def config_from_args(args) -> RunConfig:
    return RunConfig(
        subcommand=args.command,
        fmt=args.format,
        norm=getattr(args, "norm", "sup"),
        seed=resolve_seed(args.seed),
        jobs=args.jobs,
        tolerance=getattr(args, "tol", None),
    )


def parse_point(text: str) -> RatPoint:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"point must be 'x1,x2', got {text!r}")
    return RatPoint(parse_frac(parts[0]), parse_frac(parts[1]))


def parse_vec(text: str) -> PrimVec:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"vector must be 'p1,p2,q', got {text!r}")
    return pvec(int(parts[0]), int(parts[1]), int(parts[2]))


def emit(payload: dict, fmt: str, rows: list[dict] | None = None) -> str:
    """Render a payload; tsv and table need a row list, json never does."""
    if fmt == "json":
        return json.dumps(json_ready(payload), indent=2, sort_keys=True) + "\n"
    if rows is None:
        rows = [
            {"key": k, "value": json.dumps(json_ready(v), sort_keys=True)}
            for k, v in payload.items()
        ]
    rows = [{k: json_ready(v) for k, v in row.items()} for row in rows]
    if not rows:
        return "\n"
    headers = list(rows[0].keys())
    cells = [[str(r.get(h, "")) for h in headers] for r in rows]
    if fmt == "tsv":
        lines = ["\t".join(headers)] + ["\t".join(c) for c in cells]
        return "\n".join(lines) + "\n"
    widths = [
        max(len(h), max(len(row[i]) for row in cells)) for i, h in enumerate(headers)
    ]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    for row in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------- handlers


def cmd_best_approx(args, cfg: RunConfig) -> tuple[int, dict, list[dict] | None]:
    x = parse_point(args.x)
    seq = best_approximations(x, args.qmax)
    payload = seq.to_jsonable()
    payload["norm"] = cfg.norm
    payload["exact_hit"] = seq.exact_hit
    rows = []
    for v, r in zip(seq.items, seq.residuals):
        rows.append(
            {
                "p1": v.p1,
                "p2": v.p2,
                "q": v.q,
                "residual": frac_str(r),
                "residual_float": float(residual(x, v, cfg.norm)),
            }
        )
    payload["items"] = rows
    return 0, payload, rows


def cmd_profile(args, cfg: RunConfig) -> tuple[int, dict, list[dict] | None]:
    x = parse_point(args.x)
    prof = wx_profile(best_approximations(x, args.qmax))
    payload = prof.to_jsonable()
    if args.samples:
        payload["samples"] = [
            {"t": t, "w": w} for t, w in prof.samples(args.samples)
        ]
    rows = payload["breakpoints"]
    return 0, payload, rows


def cmd_invariants(args, cfg: RunConfig) -> tuple[int, dict, list[dict] | None]:
    iv = invariants(parse_vec(args.v))
    return 0, iv.to_jsonable(), None


def cmd_domain(args, cfg: RunConfig) -> tuple[int, dict, list[dict] | None]:
    v = parse_vec(args.v)
    bb = ball_bounds(v)
    audit = audit_ball_sandwich(v, rejects=args.rejects)
    payload = {"v": [v.p1, v.p2, v.q], "sandwich": audit}
    payload.update(bb.to_jsonable())
    if args.x is not None:
        payload["member"] = in_domain(parse_point(args.x), v)
    return (0 if audit["pass"] else 1), payload, None


def cmd_psi_tree(args, cfg: RunConfig) -> tuple[int, dict, list[dict] | None]:
    seed_vec = parse_vec(args.seed_vec)
    eps = parse_frac(args.eps)
    root = expansion_tree(
        seed_vec, eps, n=args.family, depth=args.depth,
        expand=args.expand, width=args.width,
    )
    rep = tree_audit(root, eps, n=args.family)
    payload = {
        "seed": [seed_vec.p1, seed_vec.p2, seed_vec.q],
        "eps": frac_str(eps),
        "depth": args.depth,
        "depth1_children": len(root.children),
        "totals": rep["totals"],
        "fails": rep["fails"],
        "min_spacing_ratio": float(rep["min_spacing_ratio"]),
        "min_kappa": float(rep["min_kappa"]),
        "pass": rep["ok"],
    }
    rows = [
        {"check": k, "failures": rep["fails"][k]} for k in sorted(rep["fails"])
    ]
    return (0 if rep["ok"] else 1), payload, rows


def cmd_slow_chain(args, cfg: RunConfig) -> tuple[int, dict, list[dict] | None]:
    u0 = parse_vec(args.seed_vec)
    if args.target == "log1p":
        target = lambda t: -math.log1p(t)
    else:
        level = args.level
        target = lambda t: level
    chain, cert = slow_chain(
        u0, target, parse_frac(args.delta), steps=args.steps,
        samples=args.samples,
    )
    rows = chain.to_jsonable()
    payload = {
        "target": args.target,
        "steps": args.steps,
        "nodes": rows,
        "certificate": {
            "pass": cert["ok"],
            "slack": cert["slack"],
            "alignment_bound": cert["alignment_bound"],
            "float_defect": cert["float_defect"],
            "envelope": cert["envelope"],
            "defect_bound": cert["defect_bound"],
            "strictly_decreasing_eps": cert["sing_like"],
            "constant_eps": cert["di_like"],
            "window": list(cert["window"]),
            "samples": len(cert["samples"]),
        },
    }
    return (0 if cert["ok"] else 1), payload, rows


def cmd_dims(args, cfg: RunConfig) -> tuple[int, dict, list[dict] | None]:
    tol = cfg.root_tolerance
    if args.action == "cantor":
        if args.delta is None:
            raise ValueError("--delta is required for 'dims cantor'")
        res = cantor_exact_dim(parse_frac(args.delta))
        payload = {"action": "cantor", "delta": args.delta}
        payload.update(res.to_jsonable())
        if args.depth:
            est = covering_s_estimate(cantor_tree(parse_frac(args.delta), args.depth))
            payload["covering_estimate"] = est.to_jsonable()
        payload["tolerance"] = tol
        payload["within_tolerance"] = res.residual <= tol
        return (0 if res.residual <= tol else 1), payload, None
    if args.action == "bounds":
        if args.delta is None:
            raise ValueError("--delta is required for 'dims bounds'")
        h_d, h_g = cantor_bounds(parse_frac(args.delta))
        return 0, {
            "action": "bounds",
            "delta": args.delta,
            "density": h_d,
            "gap": h_g,
        }, None
    rep = bounds_crossing()
    payload = {
        "action": "crossing",
        "delta": rep["delta"],
        "h": rep["h"],
        "residual": rep["residual"],
        "tolerance": tol,
        "within_tolerance": rep["residual"] <= tol,
    }
    return (0 if rep["residual"] <= tol else 1), payload, None


def cmd_dn(args, cfg: RunConfig) -> tuple[int, dict, list[dict] | None]:
    s_minus, s_plus = dn_bounds(args.n)
    tol = cfg.root_tolerance
    payload = {
        "n": args.n,
        "s_minus": s_minus.to_jsonable(),
        "s_plus": s_plus.to_jsonable(),
        "tolerance": tol,
        "within_tolerance": max(s_minus.residual, s_plus.residual) <= tol,
    }
    code = 0 if payload["within_tolerance"] else 1
    if args.root is not None:
        audit = dn_gap_audit(parse_frac(args.root), args.n)
        payload["gap_audit"] = audit
        if not (audit["nested"] and audit["disjoint"] and audit["gaps_ok"]):
            code = 1
    return code, payload, None


def cmd_cf(args, cfg: RunConfig) -> tuple[int, dict, list[dict] | None]:
    x = parse_frac(args.x)
    conv = convergents(x)
    payload = {"x": frac_str(x), "convergents": [frac_str(c) for c in conv]}
    if x.denominator >= 2:
        vm, vp = neighbors(x)
        payload["neighbors"] = [frac_str(vm), frac_str(vp)]
    if args.n is not None:
        payload["interval"] = quotient_interval(x, args.n).to_jsonable()
    rows = [{"k": i, "convergent": frac_str(c)} for i, c in enumerate(conv)]
    return 0, payload, rows


# --------------------------------------------------------------- audit-all


@dataclass
class ItemResult:
    name: str
    description: str
    checks: int
    failures: int
    witness: str | None

    def to_jsonable(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "checks": self.checks,
            "failures": self.failures,
            "pass": self.failures == 0,
            "witness": self.witness,
        }


def _rng_for(seed: int, name: str) -> random.Random:
    return random.Random(f"{seed}:{name}")


def _random_targets(rng: random.Random, count: int, den_max: int = 60):
    out = []
    while len(out) < count:
        den = rng.randint(5, den_max)
        out.append(RatPoint(
            Fraction(rng.randint(1, den - 1), den),
            Fraction(rng.randint(1, den - 1), den),
        ))
    return out


def _random_vectors(rng: random.Random, count: int, q_max: int = 500):
    from .util import gcd3

    out = []
    while len(out) < count:
        q = rng.randint(2, q_max)
        p1, p2 = rng.randint(0, q), rng.randint(0, q)
        if gcd3(p1, p2, q) == 1:
            out.append(PrimVec(p1, p2, q))
    return out


def item_best_approx_records(seed: int, fault: str | None) -> ItemResult:
    rng = _rng_for(seed, "best-approx-records")
    checks = failures = 0
    witness = None
    for x in _random_targets(rng, 12):
        seq = best_approximations(x, 400)
        for a, b in zip(seq.items, seq.items[1:]):
            checks += 1
            if a.q >= b.q:
                failures += 1
                witness = witness or f"heights stall at {a} -> {b}"
        for a, b in zip(seq.residuals, seq.residuals[1:]):
            checks += 1
            if a <= b:
                failures += 1
                witness = witness or f"residual rises near {frac_str(b)}"
    return ItemResult(
        "best-approx-records",
        "record heights strictly increase while residuals strictly decrease",
        checks, failures, witness,
    )


def item_best_approx_realiser(seed: int, fault: str | None) -> ItemResult:
    rng = _rng_for(seed, "best-approx-realiser")
    checks = failures = 0
    witness = None
    targets = [RatPoint(Fraction(1, 2), Fraction(1, 2))] + _random_targets(rng, 8)
    pick = max if fault == "tie-break" else min
    for x in targets:
        seq = best_approximations(x, 200)
        for v in seq.items:
            _, realisers = height_minimum(x, v.q)
            expected = pick(realisers)
            checks += 1
            if (v.p1, v.p2) != expected:
                failures += 1
                if witness is None:
                    witness = (
                        f"target ({frac_str(x.x1)},{frac_str(x.x2)}) height "
                        f"{v.q}: tie resolved to ({v.p1},{v.p2}), "
                        f"expected ({expected[0]},{expected[1]})"
                    )
    return ItemResult(
        "best-approx-realiser",
        "each record realises its height minimum with lexicographic ties",
        checks, failures, witness,
    )


def item_profile_alternation(seed: int, fault: str | None) -> ItemResult:
    rng = _rng_for(seed, "profile-alternation")
    checks = failures = 0
    witness = None
    for x in _random_targets(rng, 10):
        prof = wx_profile(best_approximations(x, 300))
        bps = prof.breakpoints
        for a, b in zip(bps, bps[1:]):
            checks += 1
            if not (a.T < b.T and a.kind != b.kind):
                failures += 1
                witness = witness or f"breakpoints collide at T={frac_str(b.T)}"
    return ItemResult(
        "profile-alternation",
        "profile breakpoints strictly interleave minima and crossings",
        checks, failures, witness,
    )


def item_profile_crossings(seed: int, fault: str | None) -> ItemResult:
    rng = _rng_for(seed, "profile-crossings")
    checks = failures = 0
    witness = None
    for x in _random_targets(rng, 10):
        prof = wx_profile(best_approximations(x, 300))
        for bp in prof.breakpoints:
            if bp.kind != "max":
                continue
            checks += 1
            if prof.value_at(bp.T) != Fraction(bp.height):
                failures += 1
                witness = witness or f"crossing value off at T={frac_str(bp.T)}"
    return ItemResult(
        "profile-crossings",
        "local maxima of the envelope sit exactly at successor heights",
        checks, failures, witness,
    )


def item_lattice_minima_agreement(seed: int, fault: str | None) -> ItemResult:
    rng = _rng_for(seed, "lattice-minima-agreement")
    checks = failures = 0
    witness = None
    for v in _random_vectors(rng, 40):
        checks += 1
        if lattice_minima(v) != scan_minima(v):
            failures += 1
            witness = witness or f"reduced pair disagrees with scan at {v}"
    return ItemResult(
        "lattice-minima-agreement",
        "reduced shortest pair matches the brute-force scan",
        checks, failures, witness,
    )


def item_wedge_constraint(seed: int, fault: str | None) -> ItemResult:
    rng = _rng_for(seed, "wedge-constraint")
    checks = failures = 0
    witness = None
    for v in _random_vectors(rng, 40):
        l, h = lattice_minima(v)
        for w in (l, h):
            checks += 1
            if not wedge_constraint_ok(w, v):
                failures += 1
                witness = witness or f"class {w} violates the constraint at {v}"
    return ItemResult(
        "wedge-constraint",
        "both minima classes satisfy the defining linear constraint",
        checks, failures, witness,
    )


def item_distortion_identities(seed: int, fault: str | None) -> ItemResult:
    rng = _rng_for(seed, "distortion-identities")
    checks = failures = 0
    witness = None
    for v in _random_vectors(rng, 40):
        iv = invariants(v)
        checks += 1
        ok = (
            iv.eps3 == Fraction(iv.absL**2, v.q)
            and iv.exp3tau == Fraction(v.q**2, iv.absL)
            and iv.eps3 * iv.exp3tau == iv.absL * v.q
            and iv.absL <= iv.absLhat
        )
        if not ok:
            failures += 1
            witness = witness or f"invariant identities fail at {v}"
    return ItemResult(
        "distortion-identities",
        "distortion and clock invariants satisfy their defining identities",
        checks, failures, witness,
    )


def item_companion_pair(seed: int, fault: str | None) -> ItemResult:
    rng = _rng_for(seed, "companion-pair")
    checks = failures = 0
    witness = None
    for v in _random_vectors(rng, 25):
        l, _ = lattice_minima(v)
        um, up = companion_pair(v, l)
        for u in (um, up):
            w = wedge(v, u)
            checks += 1
            if abs(w.m13) != abs(l.m13) or abs(w.m23) != abs(l.m23):
                failures += 1
                witness = witness or f"companion wedge differs from class at {v}"
    return ItemResult(
        "companion-pair",
        "companions of the shortest class realise that class as a wedge",
        checks, failures, witness,
    )


def item_domain_sandwich(seed: int, fault: str | None) -> ItemResult:
    rng = _rng_for(seed, "domain-sandwich")
    checks = failures = 0
    witness = None
    for v in _random_vectors(rng, 15, q_max=120):
        rep = audit_ball_sandwich(v)
        checks += 1
        if not rep["pass"]:
            failures += 1
            witness = witness or f"ball sandwich fails at {v}"
    return ItemResult(
        "domain-sandwich",
        "inner and outer balls bracket domain membership on grids",
        checks, failures, witness,
    )


def item_domain_band(seed: int, fault: str | None) -> ItemResult:
    rng = _rng_for(seed, "domain-band")
    checks = failures = 0
    witness = None
    eps = Fraction(1, 8)
    for ch in cantor_children(pvec(0, 0, 1), eps):
        checks += 1
        if not (distortion_below(ch, eps) and not distortion_below(ch, eps / 2)):
            failures += 1
            witness = witness or f"child {ch} leaves the distortion band"
    return ItemResult(
        "domain-band",
        "descendant vectors land in the half-open distortion band",
        checks, failures, witness,
    )


def item_sibling_spacing(seed: int, fault: str | None) -> ItemResult:
    rng = _rng_for(seed, "sibling-spacing")
    checks = failures = 0
    witness = None
    eps = Fraction(1, 8)
    seed_vec = pvec(0, 0, 1)
    kids = cantor_children(seed_vec, eps)
    for i in range(len(kids)):
        for j in range(i + 1, len(kids)):
            checks += 1
            if not verify_spacing(seed_vec, kids[i], kids[j], eps)["ok"]:
                failures += 1
                witness = witness or f"siblings {kids[i]},{kids[j]} too close"
    return ItemResult(
        "sibling-spacing",
        "all sibling domains clear the spacing floor pairwise",
        checks, failures, witness,
    )


def item_nested_domains(seed: int, fault: str | None) -> ItemResult:
    chain = fixed_chain(pvec(0, 0, 1), Fraction(1, 8), 3)
    vs = chain.vectors()
    checks = failures = 0
    witness = None
    for u, v in zip(vs, vs[1:]):
        checks += 1
        if not nesting_ok(u, v)["ok"]:
            failures += 1
            witness = witness or f"domain of {v} escapes {u}"
    return ItemResult(
        "nested-domains",
        "chain domains nest strictly with positive slack",
        checks, failures, witness,
    )


def item_height_growth(seed: int, fault: str | None) -> ItemResult:
    chain = fixed_chain(pvec(0, 0, 1), Fraction(1, 8), 3)
    vs = chain.vectors()
    checks = failures = 0
    witness = None
    for u, v in zip(vs, vs[1:]):
        rep = growth_ok(u, v, Fraction(1, 8))
        if rep["applicable"]:
            checks += 1
            if not rep["ok"]:
                failures += 1
                witness = witness or f"edge {u}->{v} grows too slowly"
    checks += 1
    if not vs[2].q > 8**6 * vs[1].q:
        failures += 1
        witness = witness or "second extension misses the sixth-power factor"
    return ItemResult(
        "height-growth",
        "distorted parents grow height by the sixth-power factor",
        checks, failures, witness,
    )


def item_schedule_regularity(seed: int, fault: str | None) -> ItemResult:
    sched = regularize_schedule(lambda t: Fraction(t), 1, Fraction(2))
    rep = sched.verify()
    checks = 3
    failures = sum(
        0 if rep[k] else 1 for k in ("below_target", "nondecreasing", "slope_ok")
    )
    witness = None if failures == 0 else f"schedule verify flags: {rep}"
    return ItemResult(
        "schedule-regularity",
        "regularised step schedules stay below target with bounded steps",
        checks, failures, witness,
    )


def item_slow_step_gaps(seed: int, fault: str | None) -> ItemResult:
    checks = failures = 0
    witness = None
    for eps_p, q_expected in ((Fraction(1, 2), 9), (Fraction(1, 8), 513)):
        v, gaps = slow_step(pvec(0, 0, 1), eps_p)
        checks += 1
        if v.q != q_expected or abs(gaps["log_eps_gap"]) > 0.05:
            failures += 1
            witness = witness or f"slow step at {frac_str(eps_p)} lands on {v}"
    return ItemResult(
        "slow-step-gaps",
        "minimal slow successors land at frozen heights with small gaps",
        checks, failures, witness,
    )


def item_cantor_dimension(seed: int, fault: str | None) -> ItemResult:
    checks = failures = 0
    witness = None
    checks += 1
    if abs(cantor_exact_dim(1).s - 1.0) > 1e-12:
        failures += 1
        witness = "undistorted construction misses dimension one"
    prev = 0.0
    for k in range(1, 11):
        d = Fraction(k, 10)
        s = cantor_exact_dim(d).s
        checks += 1
        if s <= prev:
            failures += 1
            witness = witness or f"dimension not increasing at delta={d}"
        prev = s
    est = covering_s_estimate(cantor_tree(Fraction(1, 2), 4)).s
    checks += 1
    if abs(est - cantor_exact_dim(Fraction(1, 2)).s) > 1e-9:
        failures += 1
        witness = witness or "covering estimate drifts from the exact root"
    return ItemResult(
        "cantor-dimension",
        "exact Cantor dimension is monotone and matches covering estimates",
        checks, failures, witness,
    )


def item_bounds_crossing(seed: int, fault: str | None) -> ItemResult:
    rep = bounds_crossing()
    checks = 2
    failures = 0
    witness = None
    if abs(rep["delta"] - 0.2726604) > 1e-6:
        failures += 1
        witness = f"crossing delta={rep['delta']!r}"
    if abs(rep["h"] - 0.3478475) > 1e-6:
        failures += 1
        witness = witness or f"crossing height={rep['h']!r}"
    return ItemResult(
        "bounds-crossing",
        "density and gap dimension bounds cross at the frozen point",
        checks, failures, witness,
    )


def item_dn_brackets(seed: int, fault: str | None) -> ItemResult:
    checks = failures = 0
    witness = None
    prev_minus = prev_plus = None
    for n in (72, 100, 1000, 10**6):
        s_minus, s_plus = dn_bounds(n)
        checks += 1
        if not (0.5 < s_minus.s < s_plus.s < 1.0):
            failures += 1
            witness = witness or f"brackets out of order at N={n}"
        if prev_minus is not None:
            checks += 1
            if not (s_minus.s < prev_minus and s_plus.s < prev_plus):
                failures += 1
                witness = witness or f"brackets not shrinking at N={n}"
        prev_minus, prev_plus = s_minus.s, s_plus.s
    return ItemResult(
        "dn-brackets",
        "quotient-level dimension brackets order and shrink in the level",
        checks, failures, witness,
    )


def item_quotient_intervals(seed: int, fault: str | None) -> ItemResult:
    rng = _rng_for(seed, "quotient-intervals")
    checks = failures = 0
    witness = None
    for _ in range(12):
        den = rng.randint(3, 80)
        num = rng.randint(1, den - 1)
        v = Fraction(num, den)
        if math.gcd(num, den) != 1:
            continue
        vm, vp = neighbors(v)
        checks += 1
        ok = (
            vm.denominator + vp.denominator == den
            and vp.numerator * den - num * vp.denominator == 1
            and quotient_interval(v, 72).contains_point(v)
        )
        if not ok:
            failures += 1
            witness = witness or f"neighbor identities fail at {v}"
    rep = dn_gap_audit(Fraction(1, 2), 72)
    checks += 1
    if not (rep["nested"] and rep["disjoint"] and rep["gaps_ok"]):
        failures += 1
        witness = witness or "gap audit fails for the half family"
    return ItemResult(
        "quotient-intervals",
        "neighbor fractions and quotient intervals satisfy exact identities",
        checks, failures, witness,
    )


def item_shortest_vector_duality(seed: int, fault: str | None) -> ItemResult:
    rng = _rng_for(seed, "shortest-vector-duality")
    checks = failures = 0
    witness = None
    for _ in range(12):
        den = rng.randint(7, 120)
        x = RatPoint(
            Fraction(rng.randint(1, den - 1), den),
            Fraction(rng.randint(1, den - 1), den),
        )
        t_val = Fraction(rng.randint(2, 2500))
        checks += 1
        if shortest_vector_oracle(x, t_val)[1] != shortest_vector_reduced(x, t_val)[1]:
            failures += 1
            witness = witness or f"oracles disagree at T={t_val}"
    return ItemResult(
        "shortest-vector-duality",
        "reduction-based shortest vectors match the scanning oracle",
        checks, failures, witness,
    )


AUDIT_ITEMS = [
    item_best_approx_records,
    item_best_approx_realiser,
    item_profile_alternation,
    item_profile_crossings,
    item_lattice_minima_agreement,
    item_wedge_constraint,
    item_distortion_identities,
    item_companion_pair,
    item_domain_sandwich,
    item_domain_band,
    item_sibling_spacing,
    item_nested_domains,
    item_height_growth,
    item_schedule_regularity,
    item_slow_step_gaps,
    item_cantor_dimension,
    item_bounds_crossing,
    item_dn_brackets,
    item_quotient_intervals,
    item_shortest_vector_duality,
]


def _run_item(entry: tuple[int, int, str | None]) -> dict:
    idx, seed, fault = entry
    return AUDIT_ITEMS[idx](seed, fault).to_jsonable()


def cmd_audit_all(args, cfg: RunConfig) -> tuple[int, dict, list[dict] | None]:
    seed = cfg.seed
    fault = args.inject_fault
    entries = [(i, seed, fault) for i in range(len(AUDIT_ITEMS))]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_item, entries))
    else:
        results = [_run_item(e) for e in entries]
    total_checks = sum(r["checks"] for r in results)
    total_failures = sum(r["failures"] for r in results)
    payload = {
        "seed": seed,
        "fault": fault,
        "items": results,
        "total_checks": total_checks,
        "total_failures": total_failures,
        "pass": total_failures == 0,
    }
    return (0 if total_failures == 0 else 1), payload, results


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="diophlab",
        description="Exact simultaneous-approximation toolkit for planar targets.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=list(FORMATS), default="json",
        help="output format (default: json)",
    )
    common.add_argument("--seed", type=int, default=None,
                        help="RNG seed; DIOPHLAB_SEED overrides the default 0")
    common.add_argument("--jobs", type=int, default=1,
                        help="parallel workers for batch audits")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("best-approx", parents=[common],
                       help="record-breaking approximations to a rational target")
    p.add_argument("--x", required=True, help="target point 'x1,x2', e.g. 1/2,1/2")
    p.add_argument("--qmax", type=int, required=True, help="height bound")
    p.add_argument("--norm", choices=["sup", "euclid"], default="sup")
    p.set_defaults(handler=cmd_best_approx)

    p = sub.add_parser("profile", parents=[common],
                       help="piecewise-linear minima profile of a target")
    p.add_argument("--x", required=True, help="target point 'x1,x2'")
    p.add_argument("--qmax", type=int, required=True, help="height bound")
    p.add_argument("--samples", type=int, default=0,
                   help="optionally sample (t, W) pairs across the window")
    p.set_defaults(handler=cmd_profile)

    p = sub.add_parser("invariants", parents=[common],
                       help="shortest-class invariants of one primitive vector")
    p.add_argument("--v", required=True, help="vector 'p1,p2,q'")
    p.set_defaults(handler=cmd_invariants)

    p = sub.add_parser("domain", parents=[common],
                       help="approximation domain bounds and membership")
    p.add_argument("--v", required=True, help="vector 'p1,p2,q'")
    p.add_argument("--x", default=None, help="optional point to test membership")
    p.add_argument("--rejects", type=int, default=40)
    p.set_defaults(handler=cmd_domain)

    p = sub.add_parser("psi-tree", parents=[common],
                       help="expand and audit a self-similar descendant tree")
    p.add_argument("--seed-vec", default="0,0,1", help="root vector 'p1,p2,q'")
    p.add_argument("--eps", default="1/8", help="distortion bound, e.g. 1/8")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--expand", type=int, default=5,
                   help="children recursively expanded per node")
    p.add_argument("--width", type=int, default=50,
                   help="children materialised per node")
    p.add_argument("--family", type=int, default=1, help="branching family size")
    p.set_defaults(handler=cmd_psi_tree)

    p = sub.add_parser("slow-chain", parents=[common],
                       help="chain tracking a prescribed decay profile")
    p.add_argument("--seed-vec", default="67,1,1000", help="seed 'p1,p2,q'")
    p.add_argument("--target", choices=["log1p", "const"], default="log1p")
    p.add_argument("--level", type=float, default=-2.0,
                   help="profile level for --target const")
    p.add_argument("--delta", default="1", help="schedule step bound")
    p.add_argument("--steps", type=int, default=15)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(handler=cmd_slow_chain)

    p = sub.add_parser("dims", parents=[common],
                       help="dimension values and bound crossings")
    p.add_argument("action", choices=["cantor", "bounds", "crossing"])
    p.add_argument("--delta", default=None, help="distortion parameter in (0,1]")
    p.add_argument("--depth", type=int, default=0,
                   help="also estimate from a covering tree of this depth")
    p.add_argument("--tol", type=float, default=None,
                   help="residual ceiling for root finding (default 1e-9)")
    p.set_defaults(handler=cmd_dims)

    p = sub.add_parser("dn", parents=[common],
                       help="dimension brackets for divergent quotient levels")
    p.add_argument("--n", type=int, required=True, help="quotient level N >= 72")
    p.add_argument("--root", default=None,
                   help="optionally audit the interval family at this fraction")
    p.add_argument("--tol", type=float, default=None,
                   help="residual ceiling for root finding (default 1e-9)")
    p.set_defaults(handler=cmd_dn)

    p = sub.add_parser("cf", parents=[common],
                       help="continued-fraction convergents and intervals")
    p.add_argument("--x", required=True, help="rational 'num/den'")
    p.add_argument("--n", type=int, default=None,
                   help="also emit the quotient interval at this level")
    p.set_defaults(handler=cmd_cf)

    p = sub.add_parser("audit-all", parents=[common],
                       help="run the consolidated invariant audit corpus")
    p.add_argument("--inject-fault", choices=["tie-break"], default=None,
                   help="corrupt one checked rule to prove the audit bites")
    p.set_defaults(handler=cmd_audit_all)

    return ap


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return ex.code if isinstance(ex.code, int) else 2
    try:
        cfg = config_from_args(args)
        code, payload, rows = args.handler(args, cfg)
    except (ValueError, ZeroDivisionError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2
    sys.stdout.write(emit(payload, cfg.fmt, rows))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
