"""Storage / repair-bandwidth trade-off.

The threshold ``alpha*(gamma)`` is an ordered list of :class:`Branch` pieces,
each of the form ``(M - c * gamma) / d`` on a closed interval of gamma.

For ``r | k`` and ``r <= n - k`` the pieces have closed forms: piece ``i``
counts the repair rounds a minimum cut crosses behind the helpers.  Elsewhere
the pieces come from the upper envelope of every collector cut
(:func:`cut_lines`), which is exact but enumerative.  The closed form that
reads a partial round last is kept for comparison.

Below the minimum-bandwidth point the threshold is reported as infinite.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .flowgraph import SystemParams
from .xrational import INF, ExtendedRational, xr


class OutsideAssumption(ValueError):
    """No branch selector z satisfies the non-divisible case's ordering assumption."""


@dataclass(frozen=True)
class Branch:
    tag: str
    gamma_lo: ExtendedRational
    gamma_hi: ExtendedRational
    c: ExtendedRational  # coefficient of gamma
    d: ExtendedRational  # denominator

    def alpha(self, M, gamma) -> ExtendedRational:
        gamma = xr(gamma)
        if self.c == 0:
            return xr(M) / self.d
        return (xr(M) - self.c * gamma) / self.d

    def gamma_for(self, M, alpha) -> ExtendedRational:
        return (xr(M) - self.d * xr(alpha)) / self.c


@dataclass(frozen=True)
class TradeoffPoint:
    alpha: ExtendedRational
    gamma: ExtendedRational
    regime: str
    gamma_per_failed_node: ExtendedRational | None = None


@dataclass(frozen=True)
class Thm2Params:
    p: int
    k0: int
    z: int
    k_prime: Fraction


# --- min-cut capacity ------------------------------------------------------

def _require_divisible(params: SystemParams):
    if not params.r_divides_k:
        raise ValueError(f"r={params.r} does not divide k={params.k}; use the non-divisible path")


def bound_sum(params: SystemParams, alpha, beta) -> ExtendedRational:
    """Sum over rounds s = 1..k/r of min(r*alpha1 + (n - s r) beta, r alpha)."""
    _require_divisible(params)
    n, k, r, rho, _ = params
    alpha, beta = xr(alpha), xr(beta)
    alpha1 = alpha * rho
    total = xr(0)
    for s in range(1, k // r + 1):
        total = total + min(alpha1 * r + beta * (n - s * r), alpha * r)
    return total


def breakpoints(params: SystemParams, beta) -> list[ExtendedRational]:
    """Storage values b_0..b_{k/r} where one more round flips behind the helpers."""
    _require_divisible(params)
    n, k, r, rho, _ = params
    return [(Fraction(n - k, r) + s) * xr(beta) / (1 - rho) for s in range(k // r + 1)]


def capacity_piecewise(params: SystemParams, alpha, gamma) -> ExtendedRational:
    """Piecewise-linear min-cut capacity C(alpha) at bandwidth gamma."""
    _require_divisible(params)
    n, k, r, rho, _ = params
    alpha = xr(alpha)
    beta = params.beta(gamma)
    b = breakpoints(params, beta)
    rounds = k // r
    i = 0
    while i < rounds and alpha > b[i]:
        i += 1
    # (1 - rho) * r * b_j equals (n - k + j r) beta.
    carried = sum((beta * (n - k + j * r) for j in range(i)), xr(0))
    return alpha * (k - i * r * (1 - rho)) + carried


# --- threshold pieces -------------------------------------------------------

def _f_full(params: SystemParams, i: int, k0: int) -> ExtendedRational:
    n, k, r, rho, M = params
    den = (2 * k - r * (i + 1) * (1 - rho)) * i + Fraction(2 * k * (n - k0), r)
    return xr(2 * M * (1 - rho) * (n - r)) / den


def _g(params: SystemParams, i: int, k0: int) -> ExtendedRational:
    n, _, r, _, _ = params
    return xr(Fraction(i * (2 * n - 2 * k0 - r + i * r), 2 * (n - r)))


def f_div(params: SystemParams, i: int) -> ExtendedRational:
    """Bandwidth at which the threshold crosses breakpoint b_i (r | k); f(-1) = inf."""
    _require_divisible(params)
    if i < 0:
        return INF
    return _f_full(params, i, params.k)


def g_div(params: SystemParams, i: int) -> ExtendedRational:
    """Gamma coefficient of threshold piece i (r | k)."""
    _require_divisible(params)
    return _g(params, i, params.k)


def _divisible_branches(params: SystemParams) -> list[Branch]:
    n, k, r, rho, M = params
    out = []
    for i in range(k // r):
        lo, hi = f_div(params, i), f_div(params, i - 1)
        out.append(Branch(str(i), lo, hi, g_div(params, i), xr(k - i * r * (1 - rho))))
    return out


def _thm2_z_candidates(params: SystemParams) -> list[int]:
    n, k, r = params.n, params.k, params.r
    p = k // r
    k0 = p * r
    ratio = Fraction(n - k0 - r, k - k0)
    found = []
    if 0 <= ratio <= Fraction(n - k0, r):
        found.append(0)
    for z in range(1, p - 1):
        if Fraction(n - k0 + (z - 1) * r, r) <= ratio <= Fraction(n - k0 + z * r, r):
            found.append(z)
    return found


def _f_partial(params: SystemParams, i: int, k0: int, kp: Fraction) -> ExtendedRational:
    n, k, r, rho, M = params
    den = ((2 * kp - r * (i + 1) * (1 - rho)) * i + Fraction(2 * kp * (n - k0), r)
           + 2 * (1 - rho) * (n - k0 - r))
    return xr(2 * M * (1 - rho) * (n - r)) / den


def _f_prime(params: SystemParams, z: int, k0: int) -> ExtendedRational:
    n, k, r, rho, M = params
    m = k - k0
    if z == 0:
        return xr(M * m * (n - r) * (1 - rho)) / (k * (n - k0 - r))
    tail = xr(2 * k * (n - k0 - r)) / (m * (1 - rho))
    den = (Fraction(2 * (n - k0) * (m - r) + 2 * r * r, m) + (z - 1) * r) * z + tail
    return xr(2 * M * (n - r)) / den


def _nondivisible_branches_for(params: SystemParams, z: int) -> list[Branch]:
    n, k, r, rho, M = params
    p = k // r
    k0 = p * r
    kp = k * rho + (1 - rho) * k0
    h = Fraction(n - k0 - r, n - r)

    def f(i):
        if i < 0:
            return INF
        return _f_full(params, i, k0) if i <= z - 1 else _f_partial(params, i, k0, kp)

    fp = _f_prime(params, z, k0)
    out = []
    for i in range(z):
        out.append(Branch(str(i), f(i), f(i - 1), _g(params, i, k0), xr(k - i * r * (1 - rho))))
    out.append(Branch(f"{z}", fp, f(z - 1), _g(params, z, k0), xr(k - z * r * (1 - rho))))
    out.append(Branch(f"{z}'", f(z), fp, _g(params, z, k0) + h, xr(kp - z * r * (1 - rho))))
    for i in range(z + 1, p):
        out.append(Branch(f"{i}'", f(i), f(i - 1), _g(params, i, k0) + h, xr(kp - i * r * (1 - rho))))
    return out


def thm2_params(params: SystemParams) -> Thm2Params:
    """Branch selector of the partial-round-last form; raises :class:`OutsideAssumption` if none fits."""
    n, k, r = params.n, params.k, params.r
    if params.r_divides_k:
        raise ValueError("r divides k; the divisible path applies")
    p = k // r
    if p < 1:
        raise OutsideAssumption(f"r={r} exceeds k={k}")
    cands = _thm2_z_candidates(params)
    if not cands:
        raise OutsideAssumption(
            f"no branch selector z fits {params.key()}")
    z = cands[0]
    if len(cands) > 1:
        # Boundary tie: every candidate must describe the same curve.
        ref = _nondivisible_branches_for(params, z)
        for other in cands[1:]:
            alt = _nondivisible_branches_for(params, other)
            for b in ref + alt:
                for gm in (b.gamma_lo, b.gamma_hi):
                    if gm.is_finite and _eval(ref, params.M, gm) != _eval(alt, params.M, gm):
                        raise AssertionError(f"z={z} and z={other} disagree at gamma={gm}")
    k0 = p * r
    return Thm2Params(p=p, k0=k0, z=z, k_prime=k * params.rho + (1 - params.rho) * k0)


def partial_last_branches(params: SystemParams) -> list[Branch]:
    """Closed-form pieces when the collector reads the partial round after all full rounds.

    This ordering is not always the cheapest cut; :func:`threshold_branches`
    gives the exact threshold.
    """
    return _nonempty(_nondivisible_branches_for(params, thm2_params(params).z))


def alpha_star_partial_last(params: SystemParams, gamma) -> ExtendedRational:
    _check_gamma(gamma)
    return _eval(partial_last_branches(params), params.M, gamma)


def _nonempty(branches):
    return [b for b in branches
            if b.gamma_lo < b.gamma_hi or (b.gamma_lo == b.gamma_hi and b.gamma_lo.is_finite)]


# --- exact threshold from cut families ---------------------------------------

@dataclass(frozen=True)
class CutLine:
    """One collector cut: storage ``(M - c * gamma) / d`` makes it reach ``M``."""

    c: Fraction
    d: Fraction
    all_behind: bool  # every collector node is cut behind its helpers


def _group_sequences(k: int, r: int, rounds: int):
    def rec(rem, left):
        if rem == 0:
            yield ()
            return
        if left == 0:
            return
        for m in range(1, min(r, rem) + 1):
            for rest in rec(rem - m, left - 1):
                yield (m,) + rest

    for untouched in range(k + 1):
        for seq in rec(k - untouched, rounds):
            yield untouched, seq


def cut_lines(params: SystemParams) -> set[CutLine]:
    """All distinct cut lines over collector orderings.

    The collector reads ``untouched`` never-failed nodes first, then groups of
    at most ``r`` nodes repaired in successive rounds.  A group of ``m`` nodes
    is cut either at its stored edges (``m * alpha``) or behind the helpers
    that are not yet on the collector side (``m * rho * alpha + H * beta``).
    """
    n, k, r, rho, _ = params
    out = set()
    for untouched, seq in _group_sequences(k, r, params.rounds):
        groups, prev = [], untouched
        for m in seq:
            helpers = n - r - prev
            if helpers < 0:
                break
            groups.append((m, helpers))
            prev += m
        else:
            for mask in range(1 << len(groups)):
                c, d = Fraction(0), Fraction(untouched)
                for j, (m, helpers) in enumerate(groups):
                    if mask >> j & 1:
                        c += Fraction(helpers, n - r)
                        d += m * rho
                    else:
                        d += m
                all_behind = untouched == 0 and mask == (1 << len(groups)) - 1
                out.add(CutLine(c, d, all_behind))
    return out


def envelope_branches(params: SystemParams) -> list[Branch]:
    """Exact threshold pieces as the upper envelope of :func:`cut_lines`.

    Below the point where a cut with every collector node behind its helpers
    takes over, the threshold is reported as infinite.
    """
    M = params.M
    lines = cut_lines(params)
    start = Fraction(0)
    finite = []
    for ln in lines:
        if ln.d == 0:
            if ln.c == 0:
                return []
            start = max(start, M / ln.c)
        else:
            finite.append(ln)
    # Max of lines a + s * gamma; slopes ascend along the envelope.
    best = {}
    for ln in finite:
        a, s = M / ln.d, -ln.c / ln.d
        cur = best.get(s)
        # On ties keep the cut that reads some node at alpha.
        if cur is None or a > cur[0] or (a == cur[0] and cur[1].all_behind and not ln.all_behind):
            best[s] = (a, ln)
    hull = []  # entries (a, s, line, left_x)
    for s in sorted(best):
        a, ln = best[s]
        while hull:
            a0, s0, _, x0 = hull[-1]
            x = (a0 - a) / (s - s0)
            if x0 is not None and x <= x0:
                hull.pop()
                continue
            break
        x = None if not hull else (hull[-1][0] - a) / (s - hull[-1][1])
        hull.append((a, s, ln, x))
    segs = []
    for j, (a, s, ln, x) in enumerate(hull):
        lo = start if x is None else max(start, x)
        hi = hull[j + 1][3] if j + 1 < len(hull) else None
        if hi is not None and hi < lo:
            continue
        if hi is not None and hi == lo and segs:
            continue
        segs.append((lo, hi, ln))
    mbr = start
    for lo, hi, ln in segs:
        if ln.all_behind and hi is not None:
            mbr = max(mbr, hi)
    out = []
    for lo, hi, ln in reversed(segs):
        if ln.all_behind:
            continue
        lo = max(lo, mbr)
        if hi is not None and hi < lo:
            continue
        out.append((lo, hi, ln))
    branches = []
    for i, (lo, hi, ln) in enumerate(out):
        branches.append(Branch(str(i), xr(lo), INF if hi is None else xr(hi), xr(ln.c), xr(ln.d)))
    return _nonempty(branches)


def closed_form_applies(params: SystemParams) -> bool:
    """True when the divisible closed form is exact: r | k and r <= n - k.

    With more failures than non-collector nodes a collector can read a helper
    together with the newcomer it fed, a cut the closed form does not price.
    """
    return params.r_divides_k and params.r <= params.n - params.k


def threshold_branches(params: SystemParams) -> list[Branch]:
    """Non-empty threshold pieces ordered by decreasing bandwidth."""
    if closed_form_applies(params):
        return _nonempty(_divisible_branches(params))
    return envelope_branches(params)


def _eval(branches: Sequence[Branch], M, gamma) -> ExtendedRational:
    gamma = xr(gamma)
    for b in branches:
        if b.gamma_lo <= gamma <= b.gamma_hi:
            return b.alpha(M, gamma)
    return INF


def alpha_star_div(params: SystemParams, gamma) -> ExtendedRational:
    """Minimum storage per node at total repair bandwidth ``gamma`` (r | k)."""
    _require_divisible(params)
    _check_gamma(gamma)
    return _eval(threshold_branches(params), params.M, gamma)


def alpha_star_nondiv(params: SystemParams, gamma) -> ExtendedRational:
    """Minimum storage per node at total repair bandwidth ``gamma`` (r does not divide k)."""
    if params.r_divides_k:
        raise ValueError("r divides k; use alpha_star_div")
    _check_gamma(gamma)
    return _eval(threshold_branches(params), params.M, gamma)


def alpha_star(params: SystemParams, gamma) -> ExtendedRational:
    if params.r_divides_k:
        return alpha_star_div(params, gamma)
    return alpha_star_nondiv(params, gamma)


def _check_gamma(gamma):
    if xr(gamma) < 0:
        raise ValueError("gamma must be non-negative")


def regime_of(params: SystemParams, gamma) -> str:
    """``infeasible``, ``MSR``, ``MBR`` or the tag of the piece containing ``gamma``."""
    gamma = xr(gamma)
    branches = threshold_branches(params)
    if not branches or gamma < branches[-1].gamma_lo:
        return "infeasible"
    if branches[0].c == 0 and gamma >= branches[0].gamma_lo:
        return "MSR"
    if gamma == branches[-1].gamma_lo:
        return "MBR"
    for b in branches:
        if b.gamma_lo <= gamma <= b.gamma_hi:
            return b.tag
    raise AssertionError("gamma not covered by any piece")


# --- corner points -----------------------------------------------------------

def closed_form_msr(params: SystemParams) -> TradeoffPoint:
    """Minimum-storage pair from the divisible closed form, whatever the regime."""
    n, k, r, rho, M = params
    alpha = xr(M) / k
    gamma = xr(M * r * (n - r) * (1 - rho)) / (k * (n - k))
    return TradeoffPoint(alpha, gamma, "infeasible" if gamma.is_infinite else "MSR", gamma / r)


def closed_form_mbr(params: SystemParams) -> TradeoffPoint:
    """Minimum-bandwidth pair from the divisible closed form, whatever the regime."""
    n, k, r, rho, M = params
    gamma = xr(2 * M * r * (n - r) * (1 - rho)) / (k * (2 * n - k * (1 - rho) - r * (1 + rho)))
    g_prime = Fraction((k - r) * (2 * n - k - 2 * r), 2 * r * (n - r))
    alpha = (xr(M) - gamma * g_prime) / (k * rho + r * (1 - rho))
    return TradeoffPoint(alpha, gamma, "MBR", gamma / r)


def msr_point(params: SystemParams) -> TradeoffPoint:
    """Minimum-storage corner: the lower end of the first flat piece."""
    if closed_form_applies(params):
        return closed_form_msr(params)
    top = threshold_branches(params)[0]
    if top.c != 0:
        raise AssertionError("top piece is not flat")
    gamma = top.gamma_lo
    return TradeoffPoint(top.alpha(params.M, gamma), gamma, "MSR", gamma / params.r)


def mbr_point(params: SystemParams) -> TradeoffPoint:
    """Minimum-bandwidth corner."""
    if closed_form_applies(params):
        return closed_form_mbr(params)
    last = threshold_branches(params)[-1]
    gamma = last.gamma_lo
    return TradeoffPoint(last.alpha(params.M, gamma), gamma, "MBR", gamma / params.r)


def gamma_star(params: SystemParams, alpha) -> ExtendedRational:
    """Least bandwidth at which storage ``alpha`` per node suffices; inf below minimum storage."""
    alpha = xr(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    M = params.M
    branches = threshold_branches(params)
    last = branches[-1]
    if alpha >= last.alpha(M, last.gamma_lo):
        return last.gamma_lo
    top = branches[0]
    if alpha < top.alpha(M, top.gamma_hi if top.gamma_hi.is_finite else top.gamma_lo):
        return INF
    for b in branches:
        a_lo = b.alpha(M, b.gamma_hi) if b.gamma_hi.is_finite else b.alpha(M, b.gamma_lo)
        a_hi = b.alpha(M, b.gamma_lo)
        if a_lo <= alpha <= a_hi:
            if b.c == 0:
                return b.gamma_lo
            return b.gamma_for(M, alpha)
    raise AssertionError("alpha not covered by any piece")


def gamma_breakpoints(params: SystemParams) -> list[ExtendedRational]:
    """Finite piece boundaries in decreasing order."""
    out = []
    for b in threshold_branches(params):
        for gm in (b.gamma_hi, b.gamma_lo):
            if gm.is_finite and gm not in out:
                out.append(gm)
    return sorted(out, reverse=True)


# --- curves -------------------------------------------------------------------

def sample_curve(params: SystemParams, gamma_grid: Iterable) -> list[TradeoffPoint]:
    pts = []
    for gm in gamma_grid:
        gm = xr(gm)
        a = alpha_star(params, gm)
        pts.append(TradeoffPoint(a, gm, regime_of(params, gm), gm / params.r))
    return pts


def linear_grid(lo, hi, count: int) -> list[ExtendedRational]:
    lo, hi = xr(lo), xr(hi)
    if count == 1:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + step * j for j in range(count)]


def default_gamma_grid(params: SystemParams, count: int = 50) -> list[ExtendedRational]:
    """``count`` points from the minimum-bandwidth point to twice the minimum-storage bandwidth."""
    lo = mbr_point(params).gamma
    hi = msr_point(params).gamma * 2
    return linear_grid(lo, hi, count)


def curve_csv(points: Sequence[TradeoffPoint]) -> str:
    """CSV with decimal columns for plotting followed by exact ``p/q`` columns."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gamma", "gamma_per_failed_node", "alpha", "regime",
                "gamma_exact", "gamma_per_failed_node_exact", "alpha_exact"])
    for pt in points:
        per = pt.gamma_per_failed_node
        w.writerow([pt.gamma.to_decimal(), per.to_decimal(), pt.alpha.to_decimal(), pt.regime,
                    str(pt.gamma), str(per), str(pt.alpha)])
    return buf.getvalue()
