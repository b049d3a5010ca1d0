"""Nested chains of approximation vectors with prescribed decay.

A chain starts from a seed vector and repeatedly adjoins a child whose
wedge with the current tip is a prescribed element of the tip's pair
lattice and whose height sits in a prescribed slot.  Exact invariants are
enforced at every step: the wedge is primitive and avoids the tip's
shortest class, the height clears the distortion window, the child's
domain nests strictly inside the parent's, and (when the parent is
already distorted) the height grows by the required factor.

Three flavours of chain are built here.  Fixed-distortion chains take the
lexicographically first admissible slot at a constant distortion bound.
Spaced families enumerate every admissible slot, giving the Cantor-type
branching whose sibling domains repel each other.  Slow chains follow a
regularised step schedule so that the minima profile of the limit point
tracks a prescribed decay target.

The sandwich audit closes the loop: it compares the chain's own minima
envelope against a from-scratch lattice minimum at sampled times, in
exact arithmetic at each sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .bestapprox import shortest_vector_reduced
from .core import PrimVec, RatPoint, Wedge2, residual, seminorm, wedge
from .latinv import canonical_sign, distortion_below, invariants, wedge_constraint_ok
from .util import extgcd, frac_str, gcd3, ln_fraction

# Height slots are sampled on this arithmetic progression; the stride
# guarantees distinct slots produce children whose domains cannot meet.
SLOT_STRIDE = 20


def _wedge_residue(u: PrimVec, target: Wedge2) -> int:
    """Height residue class (mod |u|) forced by the wedge equation.

    A height h admits a vector v with wedge(v, u) = target exactly when
    h lies in this class; the numerators are then determined.
    """
    d, s, t = extgcd(u.p1, u.p2)
    g, e, _ = extgcd(d, u.q)
    if g != 1:
        raise ValueError(f"{u} is not primitive")
    alpha, beta = e * s, e * t
    return (-(alpha * target.m13 + beta * target.m23)) % u.q


def _vector_with_wedge(u: PrimVec, target: Wedge2, h: int) -> PrimVec:
    """The vector v of height h with wedge(v, u) = target, exactly."""
    num1 = target.m13 + h * u.p1
    num2 = target.m23 + h * u.p2
    if num1 % u.q or num2 % u.q:
        raise ValueError(f"height {h} is not in the residue class of the target")
    v = PrimVec(num1 // u.q, num2 // u.q, h)
    assert wedge(v, u).as_tuple() == target.as_tuple()
    return v


def coprime_pairs(n: int) -> list[tuple[int, int]]:
    """Slot pairs (a, b) with 1 <= a <= n, a >= b >= 0, gcd(a, b) = 1.

    Only a = 1 admits the boundary values b = 0 and b = a; larger a
    contribute their phi(a) interior coprime residues.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    out = []
    for a in range(1, n + 1):
        for b in range(0, a + 1):
            if math.gcd(a, b) == 1:
                out.append((a, b))
    return out


def slot_sublattice(u: PrimVec, a: int, b: int) -> Wedge2:
    """The wedge target a*Hhat(u) + b*L(u) for the slot pair (a, b)."""
    inv = invariants(u)
    return Wedge2(
        a * inv.Lhat.m12 + b * inv.L.m12,
        a * inv.Lhat.m13 + b * inv.L.m13,
        a * inv.Lhat.m23 + b * inv.L.m23,
    )


def height_window(u: PrimVec, a: int, b: int, eps) -> tuple[Fraction, Fraction]:
    """Open interval (M, 2M - 1) of admissible height multipliers.

    M is the distortion threshold for the slot's sublattice: any child
    of height above M * |u| lands strictly below distortion eps.
    """
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError("distortion bound must lie in (0, 1/2)")
    target = slot_sublattice(u, a, b)
    m = Fraction(seminorm(target) ** 2, u.q) / eps**3
    return m, 2 * m - 1


def slot_heights(u: PrimVec, a: int, b: int, eps, limit: int | None = None) -> list[int]:
    """Sampled height multipliers for the slot pair: the first
    floor((M - 1)/stride) multiples of the stride strictly above M,
    kept only while they stay inside the open window (M, 2M - 1).
    A limit returns just the first that many."""
    m, hi = height_window(u, a, b, eps)
    count = max(0, (m - 1) // SLOT_STRIDE)
    if limit is not None:
        count = min(count, limit)
    first = SLOT_STRIDE * (m // SLOT_STRIDE + 1)
    cs = []
    for i in range(count):
        c = int(first + SLOT_STRIDE * i)
        if m < c < hi:
            cs.append(c)
    return cs


def admissible_slots(
    u: PrimVec, eps, n: int = 1, per_pair: int | None = None
) -> list[tuple[int, int, int]]:
    """Slots (a, b, c) admissible at distortion eps, in lex order.

    The full family can be enormous away from small seeds (the window
    above M holds about M/stride multipliers); per_pair caps the count
    taken from each sublattice pair.
    """
    out = []
    for a, b in coprime_pairs(n):
        for c in slot_heights(u, a, b, eps, per_pair):
            out.append((a, b, c))
    return out


def first_admissible_slot(u: PrimVec, eps, n: int = 1) -> tuple[int, int, int] | None:
    """Lex-least admissible slot, or None when every window is empty."""
    for a, b in coprime_pairs(n):
        cs = slot_heights(u, a, b, eps, limit=1)
        if cs:
            return (a, b, cs[0])
    return None


def child_vector(u: PrimVec, a: int, b: int, c: int, eps) -> PrimVec:
    """The child of u in slot (a, b, c) at distortion bound eps.

    The child v is the unique vector with wedge(v, u) = a*Hhat + b*L and
    floor(|v| / |u|) = c.  The multiplier c must lie in the open window
    (M, 2M - 1) with M = eps^-3 |a*Hhat + b*L|^2 / |u|; heights above M
    put the child below distortion eps, and the cap keeps the sublattice
    recoverable from the child alone.  Raises ValueError on a slot
    outside the window.
    """
    if a < 1 or b < 0 or b > a or math.gcd(a, b) != 1:
        raise ValueError(f"slot pair ({a}, {b}) must be coprime with a >= b >= 0")
    m, hi = height_window(u, a, b, eps)
    if not m < c < hi:
        raise ValueError(
            f"height multiplier {c} outside the admissible window "
            f"({frac_str(m)}, {frac_str(hi)})"
        )
    target = slot_sublattice(u, a, b)
    assert wedge_constraint_ok(target, u)
    z = _wedge_residue(u, target)
    v = _vector_with_wedge(u, target, c * u.q + z)
    assert v.q // u.q == c
    return v


def cantor_children(u: PrimVec, eps, n: int = 1) -> list[PrimVec]:
    """Every child of u over the admissible slots with a <= n, lex order."""
    return [child_vector(u, a, b, c, eps) for a, b, c in admissible_slots(u, eps, n)]


def spacing_floor(eps, n: int) -> Fraction:
    """Separation constant rho: sibling domains under a common parent
    stay at least rho * diam apart, where diam bounds the parent domain."""
    eps = Fraction(eps)
    if n < 1:
        raise ValueError("need n >= 1")
    return eps**9 / (2**11 * n**3)


def _sup_dist(x: RatPoint, y: RatPoint) -> Fraction:
    return max(abs(x.x1 - y.x1), abs(x.x2 - y.x2))


def _domain_radius(v: PrimVec) -> Fraction:
    """r = |L(v)| / |v|^2; the domain of v lies within sup distance 2r of
    the rational point and contains the ball of radius r/2 around it."""
    return Fraction(invariants(v).absL, v.q * v.q)


def verify_spacing(u: PrimVec, va: PrimVec, vb: PrimVec, eps, n: int = 1) -> dict:
    """Exact separation certificate for two children of u.

    Bounds the distance between the children's domains from below by
    center distance minus both outer radii, and the parent domain's
    diameter from above by four times its radius, then checks

        dist(domain(va), domain(vb)) >= rho * diam(domain(u))

    with rho = eps^9 / (2^11 n^3).  Both bounds err on the safe side, so
    a pass is a proof.  Raises ValueError when the children coincide.
    """
    if va.as_tuple() == vb.as_tuple():
        raise ValueError("spacing needs two distinct children")
    rho = spacing_floor(eps, n)
    diam = 4 * _domain_radius(u)
    lower = (
        _sup_dist(va.proj(), vb.proj())
        - 2 * _domain_radius(va)
        - 2 * _domain_radius(vb)
    )
    floor_val = rho * diam
    return {
        "ok": lower > floor_val,
        "lower": lower,
        "floor": floor_val,
        "ratio": float(lower / floor_val) if floor_val else math.inf,
    }


def admissible_successor(u: PrimVec, v: PrimVec, eps) -> dict:
    """Exact membership checks for v as a chain successor of u.

    The wedge of the two must be primitive and differ from the shortest
    class of u's pair lattice, and v's height must exceed eps^-3 times
    the squared wedge seminorm.
    """
    eps = Fraction(eps)
    w = wedge(v, u)
    if w.is_zero():
        return {"wedge_primitive": False, "avoids_shortest": False,
                "height_ok": False, "ok": False}
    prim = gcd3(w.m12, w.m13, w.m23) == 1
    inv = invariants(u)
    avoids = canonical_sign(w).as_tuple() != canonical_sign(inv.L).as_tuple()
    height_ok = Fraction(v.q) * eps**3 > seminorm(w) ** 2
    return {
        "wedge_primitive": prim,
        "avoids_shortest": avoids,
        "height_ok": height_ok,
        "ok": prim and avoids and height_ok,
    }


def nesting_ok(u: PrimVec, v: PrimVec) -> dict:
    """Strict nesting of v's domain inside u's, certified via the ball
    bounds: center distance plus v's outer radius must fall short of u's
    inner radius.  Valid for any parent height; the inner ball of a
    height-one parent is the direct half-residual box.
    """
    if v.q < 2:
        raise ValueError("child height must exceed 1 for the outer bound")
    r_u = _domain_radius(u)
    slack = r_u / 2 - _sup_dist(u.proj(), v.proj()) - 2 * _domain_radius(v)
    return {"ok": slack > 0, "slack": slack}


def growth_ok(u: PrimVec, v: PrimVec, eps) -> dict:
    """Conditional height growth: once the parent is below distortion
    eps, the child must be taller by a factor above eps^-6.  Parents not
    yet distorted are exempt (the check reports inapplicable)."""
    eps = Fraction(eps)
    applicable = distortion_below(u, eps)
    ok = None
    if applicable:
        ok = Fraction(v.q) * eps**6 > u.q
    return {"applicable": applicable, "ok": ok}


def _proportional(w1: Wedge2, w2: Wedge2) -> bool:
    """Whether two wedge triples are parallel (all cross minors vanish)."""
    a = w1.as_tuple()
    b = w2.as_tuple()
    return (
        a[0] * b[1] == a[1] * b[0]
        and a[0] * b[2] == a[2] * b[0]
        and a[1] * b[2] == a[2] * b[1]
    )


def _audit_edge(
    u: PrimVec, v: PrimVec, eps, prev_wedge: Wedge2 | None,
    check_growth: bool = True,
) -> Wedge2:
    """Enforce the chain invariants on one parent-child edge, exactly.

    Returns the edge's wedge for the caller's independence bookkeeping.
    Raises RuntimeError on any failure, leaving the caller's chain as it
    was.  The eps^-6 growth bound is a property of the slotted height
    window, so callers stepping by the minimal-height rule skip it.
    """
    member = admissible_successor(u, v, eps)
    if not member["ok"]:
        raise RuntimeError(f"successor membership failed: {member}")
    if not nesting_ok(u, v)["ok"]:
        raise RuntimeError("child domain does not nest inside the parent")
    if check_growth:
        growth = growth_ok(u, v, eps)
        if growth["applicable"] and not growth["ok"]:
            raise RuntimeError(
                f"height grew by {Fraction(v.q, u.q)}, below the required {eps**-6}"
            )
    w = wedge(v, u)
    if prev_wedge is not None and _proportional(prev_wedge, w):
        raise RuntimeError("consecutive steps share a rational line")
    return w


@dataclass
class ChainNode:
    """One link: the vector plus the parameters that admitted it."""

    u: PrimVec
    eps: Fraction | None = None
    slot: tuple[int, int, int] | None = None
    family_n: int | None = None


@dataclass
class Chain:
    """A nested chain of approximation vectors."""

    nodes: list[ChainNode]
    kind: str = "fixed"

    def vectors(self) -> list[PrimVec]:
        return [n.u for n in self.nodes]

    @property
    def tip(self) -> PrimVec:
        return self.nodes[-1].u

    @property
    def depth(self) -> int:
        return len(self.nodes) - 1

    def to_jsonable(self) -> list[dict]:
        rows = []
        for k, node in enumerate(self.nodes):
            inv = invariants(node.u)
            rows.append(
                {
                    "k": k,
                    "p": [node.u.p1, node.u.p2],
                    "q": node.u.q,
                    "eps": frac_str(node.eps) if node.eps is not None else None,
                    "slot": list(node.slot) if node.slot else None,
                    "eps_cubed": frac_str(inv.eps3),
                    "tau": inv.tau,
                }
            )
        return rows


def seed_chain(u0: PrimVec, kind: str = "fixed") -> Chain:
    return Chain([ChainNode(u0)], kind=kind)


@dataclass(frozen=True)
class FixedPolicy:
    """Constant distortion bound, lex-first slot each step."""

    eps: Fraction
    n: int = 1
    distortion_shrink: Fraction | None = None

    def params(self, step: int, prev_eps) -> tuple[Fraction, int]:
        return Fraction(self.eps), self.n


@dataclass(frozen=True)
class SingPolicy:
    """Shrinking distortion bounds for singular-type chains.

    Step k targets eps_k^6 * loglog(n_k) > c with n_k = start + k, using
    the doubled constant as headroom, clamped to stay nonincreasing.
    Feasible bounds need c well below (1/2)^6 * loglog(start); the
    default keeps eps_k near 1/4 for small k.  The slot rule also forces
    each node's distortion cube below distortion_shrink times its
    parent's, so the node distortions decrease strictly by construction
    rather than by the band position of whichever slot comes first (the
    schedule's own decrement is smaller than the slot granularity).
    Each node lands just under the bound used for its edge while the
    next bound shrinks further, so parents sit above the later bounds
    and the conditional height-growth clause stays dormant; the slot
    rule enforces it anyway whenever it does apply.
    """

    c: float = 1e-4
    start: int = 16
    eps_cap: Fraction = Fraction(1, 4)
    distortion_shrink: Fraction = Fraction(1023, 1024)

    def params(self, step: int, prev_eps) -> tuple[Fraction, int]:
        n_k = self.start + step
        loglog = math.log(math.log(n_k))
        if loglog <= 0:
            raise ValueError("family size too small for the schedule")
        raw = (2 * self.c / loglog) ** (1 / 6)
        eps = Fraction(raw)
        if eps**6 * Fraction(loglog) <= Fraction(self.c):
            raise ValueError("rounded bound lost the schedule margin")
        eps = min(eps, Fraction(self.eps_cap))
        if prev_eps is not None:
            eps = min(eps, prev_eps)
            if eps < prev_eps / 2:
                raise ValueError("schedule step shrinks faster than ratio 1/2")
        return eps, n_k


def shrinking_slot(u: PrimVec, eps, n: int, eps3_cap: Fraction):
    """Lex-least admissible slot whose child is forced below the given
    distortion cube: the height floor c*|u| > |L'|^2 / eps3_cap makes
    eps(child)^3 < eps3_cap exact, since the child height only exceeds
    the floor and the child's shortest class is at most the slot wedge.
    When the parent sits below the working bound, the slot is also kept
    above the height-growth threshold that nested domains require."""
    growth = Fraction(eps) ** -6 if distortion_below(u, eps) else Fraction(0)
    for a, b in coprime_pairs(n):
        m, hi = height_window(u, a, b, eps)
        floor2 = Fraction(seminorm(slot_sublattice(u, a, b)) ** 2, u.q) / eps3_cap
        lo = max(m, floor2, growth)
        c = SLOT_STRIDE * (lo // SLOT_STRIDE + 1)
        if lo < c < hi:
            return (a, b, int(c))
    return None


def extend_chain(chain: Chain, policy) -> Chain:
    """Adjoin the lex-first admissible child under the policy's current
    parameters, enforcing every chain invariant exactly.

    Raises RuntimeError when an invariant fails; the chain is unchanged
    in that case.
    """
    u = chain.tip
    prev_eps = chain.nodes[-1].eps
    eps, n = policy.params(chain.depth, prev_eps)
    shrink = getattr(policy, "distortion_shrink", None)
    if shrink is None:
        slot = first_admissible_slot(u, eps, n)
    else:
        slot = shrinking_slot(u, eps, n, shrink * invariants(u).eps3)
    if slot is None:
        raise RuntimeError(f"no admissible slots at distortion {eps}")
    v = child_vector(u, *slot, eps)
    prev_wedge = (
        wedge(u, chain.nodes[-2].u) if len(chain.nodes) >= 2 else None
    )
    _audit_edge(u, v, eps, prev_wedge)
    chain.nodes.append(ChainNode(v, eps, slot, n))
    return chain


def fixed_chain(u0: PrimVec, eps, depth: int, n: int = 1) -> Chain:
    """Depth many lex-first extensions at a constant distortion bound."""
    chain = seed_chain(u0, kind="fixed")
    policy = FixedPolicy(Fraction(eps), n)
    for _ in range(depth):
        extend_chain(chain, policy)
    return chain


def limit_box(chain: Chain) -> tuple[RatPoint, Fraction]:
    """Center and radius of a box containing the chain's limit points.

    Every continuation of the chain stays inside the tip's domain, which
    lies within twice the tip's radius of its rational point.
    """
    v = chain.tip
    if v.q <= 1:
        raise ValueError("chain too short: tip height must exceed 1")
    return v.proj(), 2 * _domain_radius(v)


def _exp_fraction(y: float) -> Fraction:
    """exp(y) as an exact dyadic rational, safe for large y."""
    m = max(1, math.ceil(abs(y) / 350.0))
    return Fraction(math.exp(y / m)) ** m


def chain_score(chain: Chain, x: RatPoint, t: Fraction) -> Fraction:
    """min over chain vectors of max(T * residual, height) at T = t."""
    return min(max(t * residual(x, v), Fraction(v.q)) for v in chain.vectors())


def sandwich_audit(chain: Chain, samples: int = 50) -> dict:
    """Two-sided audit of the chain envelope against the true lattice
    minimum at sampled times, plus a cap on the envelope's local maxima.

    At each sampled T inside the chain's window the exact checks are

        M_lattice <= M_chain        (the chain can only overestimate)
        (1 - eps^6) M_chain <= M_lattice   (and not by much),

    where M_chain minimises max(T * residual, height) over the chain and
    M_lattice is the reduction-certified minimum over all of Z^3.  The
    local maxima of the chain envelope sit at consecutive-pair crossings;
    each cubed crossing value height * residual^2 must stay below
    4 eps^3.  A single-vector chain passes vacuously.
    """
    vecs = chain.vectors()
    if len(vecs) == 1:
        return {"vacuous": True, "ok": True, "sandwich": [], "maxima": []}
    if len(vecs) < 4:
        raise ValueError("sandwich window needs chain depth >= 3")
    eps = max(n.eps for n in chain.nodes[1:])
    x, _ = limit_box(chain)
    invs = [invariants(v) for v in vecs]
    t_lo, t_hi = invs[1].exp3tau, invs[-2].exp3tau
    ln_lo, ln_hi = ln_fraction(t_lo), ln_fraction(t_hi)

    slack = 1 - eps**6
    rows = []
    for i in range(samples):
        if i == 0:
            t = t_lo
        elif i == samples - 1:
            t = t_hi
        else:
            t = _exp_fraction(ln_lo + i * (ln_hi - ln_lo) / (samples - 1))
        m_chain = chain_score(chain, x, t)
        _, m_lat = shortest_vector_reduced(x, t)
        ln_t = ln_fraction(t)
        rows.append(
            {
                "t": ln_t / 3,
                "w_chain": ln_fraction(m_chain) - 2 * ln_t / 3,
                "w_lattice": ln_fraction(m_lat) - 2 * ln_t / 3,
                "upper_ok": m_lat <= m_chain,
                "lower_ok": slack * m_chain <= m_lat,
            }
        )

    cap = 4 * eps**3
    maxima = []
    for k in range(len(vecs) - 1):
        value_cubed = vecs[k + 1].q * residual(x, vecs[k]) ** 2
        maxima.append(
            {
                "k": k,
                "value_cubed": value_cubed,
                "ok": value_cubed <= cap,
            }
        )

    ok = all(r["upper_ok"] and r["lower_ok"] for r in rows) and all(
        m["ok"] for m in maxima
    )
    return {
        "vacuous": False,
        "ok": ok,
        "eps": float(eps),
        "window": (ln_lo / 3, ln_hi / 3),
        "sandwich": rows,
        "maxima": maxima,
    }


@dataclass
class Schedule:
    """A nondecreasing step function built by the regularised recursion.

    Knots (t_k, y_k) satisfy t_{k+1} = t_k + y_k and
    y_{k+1} = min(F(t_{k+1}), y_k + delta); the function takes the value
    y_k on [t_k, t_{k+1}).  Knots extend lazily on demand.
    """

    delta: Fraction
    knots: list[tuple[Fraction, Fraction]]
    target: Callable[[float], float] = field(repr=False)

    def _extend(self):
        t, y = self.knots[-1]
        t = t + y
        y = min(Fraction(self.target(float(t))), y + self.delta)
        self.knots.append((t, y))

    def value_at(self, t) -> Fraction:
        t = Fraction(t)
        if t < self.knots[0][0]:
            raise ValueError(f"schedule starts at {self.knots[0][0]}, got {t}")
        while self.knots[-1][0] + self.knots[-1][1] <= t:
            self._extend()
        lo, hi = 0, len(self.knots) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.knots[mid][0] <= t:
                lo = mid
            else:
                hi = mid - 1
        return self.knots[lo][1]

    def verify(self) -> dict:
        """Check the defining properties on the materialised knots: values
        never exceed the target, never decrease, and rise by at most delta
        per knot (so f(t + f(t)) <= f(t) + delta everywhere)."""
        below = all(
            y <= Fraction(self.target(float(t))) + Fraction(1, 10**12)
            for t, y in self.knots
        )
        ys = [y for _, y in self.knots]
        nondecreasing = all(b >= a for a, b in zip(ys, ys[1:]))
        slope = all(b <= a + self.delta for a, b in zip(ys, ys[1:]))
        return {
            "below_target": below,
            "nondecreasing": nondecreasing,
            "slope_ok": slope,
            "ok": below and nondecreasing and slope,
        }


def regularize_schedule(f_target, delta, t0, steps: int = 8) -> Schedule:
    """Regularise a nondecreasing target into a self-consistent step
    function: starting from t0, each knot advances time by the current
    value and lifts the value toward the target by at most delta.

    The result never exceeds the target and satisfies
    f(t + f(t)) <= f(t) + delta.  Requires f_target(t0) > 0.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    t0 = Fraction(t0)
    y0 = Fraction(f_target(float(t0)))
    if y0 <= 0:
        raise ValueError("target must be positive at the start")
    sched = Schedule(delta, [(t0, y0)], f_target)
    for _ in range(steps - 1):
        sched._extend()
    return sched


def slow_step(u: PrimVec, eps_prime) -> tuple[PrimVec, dict]:
    """One slow extension: the shortest admissible child over the tip's
    second-minimum sublattice at distortion target eps_prime.

    The child is the minimal height in the forced residue class strictly
    above eps_prime^-3 |Hhat(u)|^2.  Returns the child plus float gaps
    measuring how closely the child's distortion tracks eps_prime and
    how the log-height clock advanced.
    """
    eps_prime = Fraction(eps_prime)
    if not 0 < eps_prime < 1:
        raise ValueError("distortion target must lie in (0, 1)")
    inv = invariants(u)
    target = inv.Lhat
    bound = Fraction(inv.absLhat**2) / eps_prime**3
    base = math.floor(bound) + 1
    z = _wedge_residue(u, target)
    h = base + ((z - base) % u.q)
    v = _vector_with_wedge(u, target, h)
    inv_v = invariants(v)
    log_eps_v = ln_fraction(inv_v.eps3) / 3
    log_eps_p = ln_fraction(eps_prime)
    gap_eps = log_eps_v - log_eps_p
    gap_tau = inv_v.tau - inv.tau - 2 * abs(log_eps_p) - abs(ln_fraction(inv.eps3)) / 3
    return v, {"log_eps_gap": gap_eps, "tau_gap": gap_tau}


def slow_chain(
    u0: PrimVec,
    w_target: Callable[[float], float],
    delta,
    steps: int = 15,
    samples: int = 200,
) -> tuple[Chain, dict]:
    """Chain whose limit's minima profile tracks a decay target.

    w_target is the desired profile bound (nonpositive, nonincreasing on
    the relevant range); one third of the negated target is regularised
    into a step schedule and each extension solves for the distortion
    the schedule dictates at the current clock reading.  The returned certificate
    samples the true profile of the limit point and checks it never dips
    below the target by more than the measured envelope
    3 * (alignment bound) + (float defect).
    """
    chain = seed_chain(u0, kind="slow")
    inv0 = invariants(u0)
    f_third = lambda t: -w_target(t) / 3
    sched = regularize_schedule(f_third, delta, Fraction(inv0.tau))
    aligns = []
    eps_used = []
    prev_wedge = None
    for _ in range(steps):
        u = chain.tip
        inv_u = invariants(u)
        log_eps_u = ln_fraction(inv_u.eps3) / 3
        y = sched.value_at(Fraction(inv_u.tau + abs(log_eps_u)))
        eps_p = _exp_fraction(-float(y))
        if not eps_p < 1:
            raise ValueError("schedule produced a non-shrinking distortion")
        v, _gaps = slow_step(u, eps_p)
        prev_wedge = _audit_edge(u, v, eps_p, prev_wedge, check_growth=False)
        aligns.append(abs(float(sched.value_at(Fraction(inv_u.tau))) + log_eps_u))
        eps_used.append(eps_p)
        chain.nodes.append(ChainNode(v, eps_p))

    vecs = chain.vectors()
    invs = [invariants(v) for v in vecs]
    taus = [iv.tau for iv in invs]
    eps3s = [iv.eps3 for iv in invs]
    defects = [
        taus[k + 1] - taus[k] - abs(ln_fraction(eps3s[k]))
        for k in range(len(vecs) - 1)
    ]
    align_bound = max(aligns)
    eps_max = max(max(eps_used), max(float(iv.eps) for iv in invs[1:]))
    float_defect = abs(math.log(1 - eps_max**6))
    envelope = 3 * align_bound + float_defect

    x, _ = limit_box(chain)
    t_lo, t_hi = taus[1], taus[-2]
    worst = 0.0
    rows = []
    for i in range(samples):
        t = t_lo + i * (t_hi - t_lo) / (samples - 1)
        big_t = _exp_fraction(3 * t)
        _, m_lat = shortest_vector_reduced(x, big_t)
        w_x = ln_fraction(m_lat) - 2 * ln_fraction(big_t) / 3
        gap = w_target(t) - w_x
        worst = max(worst, gap)
        rows.append({"t": t, "w_x": w_x, "w_target": w_target(t)})
    sing_like = all(b < a for a, b in zip(eps3s, eps3s[1:]))
    di_like = len(set(eps_used)) == 1
    cert = {
        "ok": worst <= envelope + 1e-9,
        "slack": worst,
        "alignment_bound": align_bound,
        "float_defect": float_defect,
        "envelope": envelope,
        "defects": defects,
        "defect_bound": max(abs(d) for d in defects),
        "sing_like": sing_like,
        "di_like": di_like,
        "window": (t_lo, t_hi),
        "samples": rows,
    }
    return chain, cert


@dataclass
class TreeNode:
    """One vertex of a branching family expansion."""

    u: PrimVec
    slot: tuple[int, int, int] | None
    depth: int
    children: list = field(default_factory=list)
    expanded: bool = False


def expansion_tree(
    seed: PrimVec, eps, n: int = 1, depth: int = 3, expand: int = 5,
    width: int = 50,
) -> TreeNode:
    """Branching family: every expanded node materialises its lex-first
    `width` children (split evenly across sublattice pairs), and the
    lex-first `expand` of those recurse until `depth` levels."""
    pairs = len(coprime_pairs(n))
    per_pair = max(1, width // pairs)
    root = TreeNode(seed, None, 0)
    frontier = [root]
    for level in range(depth):
        nxt = []
        for node in frontier:
            slots = admissible_slots(node.u, eps, n, per_pair)[:width]
            node.children = [
                TreeNode(child_vector(node.u, *s, eps), s, level + 1) for s in slots
            ]
            node.expanded = True
            nxt.extend(node.children[:expand])
        frontier = nxt
    return root


def iter_tree(root: TreeNode):
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def tree_audit(root: TreeNode, eps, n: int = 1) -> dict:
    """Exact per-edge and per-sibling audit of an expansion tree.

    Every parent-child edge must pass successor membership, strict
    nesting, and (when the parent is distorted) the height growth bound;
    every child must land in the half-open distortion band
    [eps/2, eps); and every sibling pair must clear the spacing floor.
    Reports the worst margins alongside the pass flags.
    """
    eps = Fraction(eps)
    rho = spacing_floor(eps, n)
    totals = {
        "nodes": 0,
        "expanded": 0,
        "edges": 0,
        "growth_checked": 0,
        "spacing_pairs": 0,
    }
    fails = {"membership": 0, "band": 0, "nesting": 0, "growth": 0, "spacing": 0}
    min_spacing_ratio = None
    min_kappa = None
    for node in iter_tree(root):
        totals["nodes"] += 1
        if not node.expanded:
            continue
        totals["expanded"] += 1
        inv = invariants(node.u)
        kappa = Fraction(inv.absLhat * inv.absL, node.u.q)
        min_kappa = kappa if min_kappa is None else min(min_kappa, kappa)
        diam = 4 * Fraction(inv.absL, node.u.q**2)
        floor_val = rho * diam
        balls = []
        for ch in node.children:
            totals["edges"] += 1
            if not admissible_successor(node.u, ch.u, eps)["ok"]:
                fails["membership"] += 1
            if not (distortion_below(ch.u, eps) and not distortion_below(ch.u, eps / 2)):
                fails["band"] += 1
            if not nesting_ok(node.u, ch.u)["ok"]:
                fails["nesting"] += 1
            g = growth_ok(node.u, ch.u, eps)
            if g["applicable"]:
                totals["growth_checked"] += 1
                if not g["ok"]:
                    fails["growth"] += 1
            pt = ch.u.proj()
            balls.append((pt.x1, pt.x2, 2 * _domain_radius(ch.u)))
        for i in range(len(balls)):
            x1, y1, r1 = balls[i]
            for j in range(i + 1, len(balls)):
                x2, y2, r2 = balls[j]
                totals["spacing_pairs"] += 1
                lower = max(abs(x1 - x2), abs(y1 - y2)) - r1 - r2
                if lower <= floor_val:
                    fails["spacing"] += 1
                ratio = lower / floor_val
                if min_spacing_ratio is None or ratio < min_spacing_ratio:
                    min_spacing_ratio = ratio
    return {
        "totals": totals,
        "fails": fails,
        "ok": not any(fails.values()),
        "min_spacing_ratio": float(min_spacing_ratio)
        if min_spacing_ratio is not None
        else None,
        "min_kappa": float(min_kappa) if min_kappa is not None else None,
    }
