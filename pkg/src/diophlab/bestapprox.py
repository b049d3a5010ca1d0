"""Best approximations to a rational target and the associated minima profile.

The profile tracks, in exact arithmetic, the shortest-vector length of a
one-parameter family of lattices attached to the target.  A convenient
normalisation removes the contracting factor: at time parameter T (a
positive rational standing for the cube of the usual exponential scale),
the vector (p, q) scores

    score(p, q) = max(T * ||q x - p||, q)

and the profile is the minimum score over the best-approximation items.
Heights, residuals, and scores stay rational throughout; logarithms appear
only in float convenience accessors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import PrimVec, RatPoint, proj_dist, residual, seminorm, wedge
from .latinv import wedge_constraint_ok
from .util import frac_str, gcd3, ln_fraction, nearest_int

# Heights above this determine their minimizing numerator uniquely
# (ball-packing in the sup norm).  Audits measure the actual maximum tie
# height rather than trusting the constant.
TIE_HEIGHT_THRESHOLD = 64


def height_minimum(x: RatPoint, q: int) -> tuple[Fraction, list[tuple[int, int]]]:
    """Smallest residual ||q x - p|| over integer p, with the achieving p.

    Returns the exact minimum and the lex-sorted list of minimizing
    numerator pairs (at most four; more than one only on half-integer
    ties).  Every listed pair achieves the minimum exactly.
    """
    if q < 1:
        raise ValueError(f"height must be positive, got {q}")
    n1, n2, d = x.common_denominator()
    per_coord: list[tuple[list[int], int]] = []
    for n in (n1, n2):
        lo = (q * n) // d
        r = q * n - lo * d
        if 2 * r < d:
            per_coord.append(([lo], r))
        elif 2 * r > d:
            per_coord.append(([lo + 1], d - r))
        else:
            per_coord.append(([lo, lo + 1], r))
    (opts1, r1), (opts2, r2) = per_coord
    res = Fraction(max(r1, r2), d)
    cands = [(p1, p2) for p1 in opts1 for p2 in opts2]
    return res, cands


@dataclass(frozen=True)
class BestApproxSeq:
    """Record-breaking approximations to a rational target, by height."""

    target: RatPoint
    items: tuple[PrimVec, ...]
    residuals: tuple[Fraction, ...]
    height_bound: int

    def __post_init__(self):
        if len(self.items) != len(self.residuals) or not self.items:
            raise ValueError("items and residuals must align and be nonempty")
        for a, b in zip(self.items, self.items[1:]):
            if a.q >= b.q:
                raise ValueError("heights must strictly increase")
        for a, b in zip(self.residuals, self.residuals[1:]):
            if a <= b:
                raise ValueError("residuals must strictly decrease")

    def __len__(self) -> int:
        return len(self.items)

    @property
    def exact_hit(self) -> bool:
        return self.residuals[-1] == 0

    def to_jsonable(self) -> dict:
        return {
            "target": [frac_str(c) for c in self.target.coords],
            "height_bound": self.height_bound,
            "items": [
                {"p": [v.p1, v.p2], "q": v.q, "residual": frac_str(r)}
                for v, r in zip(self.items, self.residuals)
            ],
        }


def best_approximations(x: RatPoint, height_bound: int) -> BestApproxSeq:
    """All strict record-breakers of the per-height residual minimum.

    Scans heights q = 1..height_bound, keeping q whenever its minimal
    residual strictly beats every smaller height.  Equal-height ties are
    resolved lexicographically on the numerator pair.  A residual of zero
    terminates the scan: the target itself has been reached.

    Record-breakers are automatically primitive: a common factor g > 1
    would put a strictly smaller residual at height q/g, contradicting the
    record property (and the first exact hit occurs at the reduced common
    denominator, which is coprime to the numerators).
    """
    if height_bound < 1:
        raise ValueError(f"height_bound must be >= 1, got {height_bound}")
    items: list[PrimVec] = []
    residuals: list[Fraction] = []
    record: Fraction | None = None
    for q in range(1, height_bound + 1):
        res, cands = height_minimum(x, q)
        if record is None or res < record:
            p1, p2 = cands[0]
            items.append(PrimVec(p1, p2, q))
            residuals.append(res)
            record = res
            if res == 0:
                break
    return BestApproxSeq(x, tuple(items), tuple(residuals), height_bound)


@dataclass(frozen=True)
class Breakpoint:
    """One breakpoint of the profile, stored as an exact (height, residual) pair.

    kind "min": the per-vector minimum of the item at this height.
    kind "max": the crossing between an item (whose residual this is) and
    its successor (whose height this is).  Either way the breakpoint sits
    at T = height/residual with cubed profile value height * residual**2.
    """

    kind: str
    height: int
    res: Fraction

    @property
    def T(self) -> Fraction:
        return Fraction(self.height) / self.res

    @property
    def value_cubed(self) -> Fraction:
        return self.height * self.res * self.res

    @property
    def tau(self) -> float:
        """The time coordinate t = (1/3) log T as a float."""
        return ln_fraction(self.T) / 3.0

    @property
    def log_value(self) -> float:
        return ln_fraction(self.value_cubed) / 3.0

    def to_jsonable(self) -> dict:
        return {
            "kind": self.kind,
            "height": self.height,
            "residual": frac_str(self.res),
            "T": frac_str(self.T),
            "value_cubed": frac_str(self.value_cubed),
            "tau": self.tau,
            "log_value": self.log_value,
        }


@dataclass(frozen=True)
class PLProfile:
    """Piecewise-linear minima profile of a best-approximation sequence.

    Between breakpoints the log-profile has slope +1 (rising toward a
    crossing) or -2 (falling from a crossing to the next per-vector
    minimum); equivalently, in the T-normalisation used here, the score is
    proportional to T on rising pieces and constant on falling ones.  The
    window brackets the first and last crossing; outside it the finite
    sequence no longer certifies the true lattice minimum, so the profile
    is truncated rather than extrapolated.
    """

    seq: BestApproxSeq
    breakpoints: tuple[Breakpoint, ...]
    window: tuple[Fraction, Fraction]

    @property
    def exact_hit(self) -> bool:
        return self.seq.exact_hit

    def value_at(self, T) -> Fraction:
        """Exact normalised profile value min_j max(T*res_j, q_j)."""
        T = Fraction(T)
        if T <= 0:
            raise ValueError("T must be positive")
        return min(
            max(T * r, Fraction(v.q))
            for v, r in zip(self.seq.items, self.seq.residuals)
        )

    def minimizer_at(self, T) -> PrimVec:
        T = Fraction(T)
        best = None
        arg = None
        for v, r in zip(self.seq.items, self.seq.residuals):
            val = max(T * r, Fraction(v.q))
            if best is None or val < best:
                best, arg = val, v
        return arg

    def log_length_at(self, T) -> float:
        """W value at time t = (1/3) log T, as a float."""
        T = Fraction(T)
        return ln_fraction(self.value_at(T)) - 2.0 * ln_fraction(T) / 3.0

    def samples(self, n: int) -> list[tuple[float, float]]:
        """n evenly spaced (t, W(t)) float pairs across the window."""
        lo, hi = self.window
        if n < 1:
            raise ValueError("need at least one sample")
        out = []
        for k in range(n):
            T = lo + (hi - lo) * Fraction(k, max(n - 1, 1))
            out.append((ln_fraction(T) / 3.0, self.log_length_at(T)))
        return out

    def to_jsonable(self) -> dict:
        return {
            "target": [frac_str(c) for c in self.seq.target.coords],
            "breakpoints": [b.to_jsonable() for b in self.breakpoints],
            "window_T": [frac_str(self.window[0]), frac_str(self.window[1])],
            "exact_hit": self.exact_hit,
        }


def wx_profile(seq: BestApproxSeq) -> PLProfile:
    """Profile of a nonempty sequence: minima, crossings, certified window."""
    if not isinstance(seq, BestApproxSeq) or not seq.items:
        raise ValueError("need a nonempty best-approximation sequence")
    bps: list[Breakpoint] = []
    n = len(seq.items)
    for j in range(n):
        q, res = seq.items[j].q, seq.residuals[j]
        if res > 0:
            bps.append(Breakpoint("min", q, res))
            if j + 1 < n:
                bps.append(Breakpoint("max", seq.items[j + 1].q, res))
    for a, b in zip(bps, bps[1:]):
        assert a.T < b.T, "breakpoints must interleave strictly"
    maxima = [b for b in bps if b.kind == "max"]
    if maxima:
        window = (maxima[0].T, maxima[-1].T)
    else:
        window = (Fraction(1), Fraction(1))
    return PLProfile(seq, tuple(bps), window)


def shortest_vector_oracle(
    x: RatPoint, T, budget: int = 2_000_000
) -> tuple[tuple[int, int, int], Fraction]:
    """Certified minimum of max(T*|q*x1 - p1|, T*|q*x2 - p2|, |q|) over Z^3.

    Independent of the best-approximation machinery: scans heights q = 0,
    1, 2, ... outward, choosing nearest numerators per coordinate, and
    stops once q exceeds the best score seen (any unscanned vector then
    scores more than the incumbent on its height coordinate alone).
    Raises RuntimeError when the scan would exceed the iteration budget.

    Returns (vector, score) with the score exact; vectors are canonicalised
    to q >= 0.
    """
    T = Fraction(T)
    if T <= 0:
        raise ValueError("T must be positive")
    n1, n2, d = x.common_denominator()
    best_val = T  # (1, 0, 0): purely horizontal unit vector
    best_vec = (1, 0, 0)
    q = 0
    while True:
        q += 1
        if q > best_val:
            break
        if q > budget:
            raise RuntimeError(
                f"certification exceeded enumeration budget {budget}"
            )
        ps = []
        rmax = 0
        for n in (n1, n2):
            lo = (q * n) // d
            r = q * n - lo * d
            if 2 * r <= d:
                ps.append(lo)
                rmax = max(rmax, r)
            else:
                ps.append(lo + 1)
                rmax = max(rmax, d - r)
        val = max(T * Fraction(rmax, d), Fraction(q))
        if val < best_val:
            best_val = val
            best_vec = (ps[0], ps[1], q)
    return best_vec, best_val


def _gso_from_gram(gram: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Gram-Schmidt coefficients mu and squared lengths from a Gram matrix."""
    n = len(gram)
    mu = [[Fraction(0)] * n for _ in range(n)]
    bstar = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            acc = gram[i][j]
            for k in range(j):
                acc -= mu[j][k] * mu[i][k] * bstar[k]
            mu[i][j] = acc / bstar[j]
        acc = gram[i][i]
        for k in range(i):
            acc -= mu[i][k] ** 2 * bstar[k]
        bstar[i] = acc
    return mu, bstar


def _sqrt_upper(f: Fraction) -> Fraction:
    """A rational upper bound on sqrt(f) for f >= 0."""
    n, d = f.numerator, f.denominator
    return Fraction(math.isqrt(n * d) + 1, d)


def shortest_vector_reduced(x: RatPoint, T) -> tuple[tuple[int, int, int], Fraction]:
    """Certified minimum of max(T*|q*x1 - p1|, T*|q*x2 - p2|, |q|) over Z^3.

    Same contract as shortest_vector_oracle, but runs in time polynomial in
    the bit sizes rather than linear in the answer, so it stays usable when
    the minimum has dozens of digits.  Reduces the Euclidean form

        E(p1, p2, q) = T^2 (q x1 - p1)^2 + T^2 (q x2 - p2)^2 + q^2

    with an exact rational LLL pass, then enumerates E <= 3 m0^2 where m0
    is the best sup score among the reduced basis vectors.  Any sup
    minimizer m satisfies E <= 3 m^2 <= 3 m0^2, so it lies inside the
    enumerated ellipsoid and the exact sup comparison over the candidates
    is a certificate.
    """
    T = Fraction(T)
    if T <= 0:
        raise ValueError("T must be positive")
    x1, x2 = x.coords
    T2 = T * T

    def euclid(v: tuple[int, int, int]) -> Fraction:
        a, b, q = v
        return T2 * ((q * x1 - a) ** 2 + (q * x2 - b) ** 2) + q * q

    def bil(u: tuple[int, int, int], v: tuple[int, int, int]) -> Fraction:
        s = (u[0] + v[0], u[1] + v[1], u[2] + v[2])
        return (euclid(s) - euclid(u) - euclid(v)) / 2

    def supscore(v: tuple[int, int, int]) -> Fraction:
        a, b, q = v
        r = max(abs(q * x1 - a), abs(q * x2 - b))
        return max(T * r, Fraction(abs(q)))

    basis = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]

    def gram() -> list[list[Fraction]]:
        return [[bil(basis[i], basis[j]) for j in range(3)] for i in range(3)]

    # LLL with the classical 3/4 parameter, Gram recomputed per step (the
    # dimension is 3; clarity beats the incremental updates).
    k = 1
    while k < 3:
        mu, bstar = _gso_from_gram(gram())
        for j in range(k - 1, -1, -1):
            r = nearest_int(mu[k][j])
            if r:
                bj = basis[j]
                basis[k] = (
                    basis[k][0] - r * bj[0],
                    basis[k][1] - r * bj[1],
                    basis[k][2] - r * bj[2],
                )
                mu, bstar = _gso_from_gram(gram())
        if bstar[k] >= (Fraction(3, 4) - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            basis[k], basis[k - 1] = basis[k - 1], basis[k]
            k = max(k - 1, 1)

    mu, bstar = _gso_from_gram(gram())
    m0 = min(supscore(v) for v in basis)
    radius = 3 * m0 * m0

    best_val = m0
    best_vec = min((v for v in basis), key=supscore)

    s2 = _sqrt_upper(radius / bstar[2])
    for c2 in range(-math.floor(s2), math.floor(s2) + 1):
        rem2 = radius - bstar[2] * c2 * c2
        if rem2 < 0:
            continue
        mid1 = -mu[2][1] * c2
        s1 = _sqrt_upper(rem2 / bstar[1])
        for c1 in range(math.ceil(mid1 - s1), math.floor(mid1 + s1) + 1):
            rem1 = rem2 - bstar[1] * (c1 + mu[2][1] * c2) ** 2
            if rem1 < 0:
                continue
            mid0 = -(mu[1][0] * c1 + mu[2][0] * c2)
            s0 = _sqrt_upper(rem1 / bstar[0])
            for c0 in range(math.ceil(mid0 - s0), math.floor(mid0 + s0) + 1):
                if c0 == 0 and c1 == 0 and c2 == 0:
                    continue
                v = (
                    c0 * basis[0][0] + c1 * basis[1][0] + c2 * basis[2][0],
                    c0 * basis[0][1] + c1 * basis[1][1] + c2 * basis[2][1],
                    c0 * basis[0][2] + c1 * basis[1][2] + c2 * basis[2][2],
                )
                val = supscore(v)
                if val < best_val:
                    best_val = val
                    best_vec = v

    a, b, q = best_vec
    if q < 0 or (q == 0 and (a < 0 or (a == 0 and b < 0))):
        a, b, q = -a, -b, -q
    return (a, b, q), best_val


def accelerated_subsequence(seq: BestApproxSeq) -> list[PrimVec]:
    """Items outside the integer span of their two predecessors.

    Consecutive items span a primitive rank-2 sublattice, so integer-span
    membership reduces to coplanarity, checked exactly on the wedge of the
    two predecessors.  Sequences with fewer than three items yield an
    empty list.
    """
    out: list[PrimVec] = []
    for j in range(2, len(seq.items)):
        w = wedge(seq.items[j - 2], seq.items[j - 1])
        if not wedge_constraint_ok(w, seq.items[j]):
            out.append(seq.items[j])
    return out


def crossing_eps_cubed(seq: BestApproxSeq, j: int) -> Fraction:
    """Cubed profile value at the crossing of items j and j+1."""
    return seq.items[j + 1].q * seq.residuals[j] ** 2


def audit_best_inequalities(seq: BestApproxSeq) -> dict:
    """Exact two-sided bounds on ||x - p_j/q_j|| from consecutive items.

    For each consecutive pair checks

        |L| / (q_j * (q_{j+1} + q_j))  <=  ||x - p_j/q_j||  <=  2|L| / (q_j * q_{j+1})

    where |L| is the sup seminorm of the pair's wedge, plus primitivity of
    the wedge itself.  All comparisons are rational.
    """
    if len(seq.items) < 2:
        raise ValueError("need at least two items")
    rows = []
    for j in range(len(seq.items) - 1):
        u, v = seq.items[j], seq.items[j + 1]
        w = wedge(u, v)
        labs = seminorm(w)
        mid = seq.residuals[j] / u.q
        lower = Fraction(labs, u.q * (v.q + u.q))
        upper = Fraction(2 * labs, u.q * v.q)
        rows.append(
            {
                "j": j,
                "L": labs,
                "distance": frac_str(mid),
                "lower_ok": lower <= mid,
                "upper_ok": mid <= upper,
                "primitive": gcd3(w.m12, w.m13, w.m23) == 1,
            }
        )
    return {
        "target": [frac_str(c) for c in seq.target.coords],
        "rows": rows,
        "all_ok": all(r["lower_ok"] and r["upper_ok"] and r["primitive"] for r in rows),
    }


def projective_sandwich_ok(x: RatPoint, u: PrimVec, v: PrimVec) -> bool:
    """Strict two-sided comparison of dist(u, x) against dist(u, v).

    Requires (1/2) dist(u, v) < ||u_dot - x|| < 2 dist(u, v), both strict,
    where dist(u, v) is the exact projective sup distance.  Intended for
    best-approximation items v and arbitrary lower-height u.
    """
    pd = proj_dist(u, v)
    du = residual(x, u) / u.q
    return pd < 2 * du and du < 2 * pd


def record_tie_heights(x: RatPoint, height_bound: int) -> list[int]:
    """Record heights whose minimal residual is achieved by several numerators."""
    out = []
    record: Fraction | None = None
    for q in range(1, height_bound + 1):
        res, cands = height_minimum(x, q)
        if record is None or res < record:
            record = res
            if len(cands) > 1:
                out.append(q)
            if res == 0:
                break
    return out
