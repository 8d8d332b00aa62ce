"""Weighted oscillation seminorms, ``L^r(f/v)`` norms and Luxemburg averages.

The per-ball oscillation is

    (1 / (w(B) |B|**beta)) * int_B |f - m_B f|

and the seminorm is its sup over a ball plan (a lower bound for the true
sup).  The older variant normalises by ``1 / inf_B w`` and ``|B|**(1+beta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import bisect, brentq

from .geometry import Ball, QuadratureSpec, ToleranceNotMet, integrate, measure
from .weights import BallSamplePlan, Weight, _inf_on_ball, weight_mass

__all__ = [
    "SampledFunction", "YoungFunction", "OscillationReport", "FixedRule", "ball_mean", "oscillation",
    "oscillation_old", "seminorm", "seminorm_old", "lr_norm", "luxemburg", "conjugate",
    "holder_orlicz_check", "power_young",
]


def _radius(y, n):
    y = np.asarray(y, dtype=float)
    return np.abs(y) if n == 1 else np.hypot(y[..., 0], y[..., 1])


@dataclass(frozen=True)
class SampledFunction:
    """A vectorised function, zero outside ``|y| <= support_radius``.

    ``singularities`` are ``(point, exponent)`` pairs (``f ~ |y - point|**e``);
    ``breaks`` are extra non-smooth points (one dimension) or radii (plane).
    """

    func: Callable = field(compare=False)
    n: int = 1
    support_radius: float = math.inf
    singularities: tuple = ()
    breaks: tuple = ()
    label: str = "f"

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            vals = np.asarray(self.func(y), dtype=float)
        vals = np.broadcast_to(vals, _radius(y, self.n).shape)
        if math.isfinite(self.support_radius):
            vals = np.where(_radius(y, self.n) <= self.support_radius, vals, 0.0)
        return vals

    def spec(self, rtol: float = 1e-9, extra_points=()) -> QuadratureSpec:
        brk = list(self.breaks)
        if math.isfinite(self.support_radius):
            A = self.support_radius
            brk += [-A, A] if self.n == 1 else [A]
        if self.n == 1:
            brk += list(extra_points)
        sing = self.singularities[:1] if self.n == 2 else self.singularities
        return QuadratureSpec(rtol=rtol, singularities=sing, breaks=tuple(brk))

    def scaled(self, c: float) -> "SampledFunction":
        return SampledFunction(lambda y: c * self.func(y), self.n, self.support_radius, self.singularities,
                               self.breaks, f"{c}*{self.label}")

    def plus(self, other: "SampledFunction") -> "SampledFunction":
        return SampledFunction(lambda y: self(y) + other(y), self.n,
                               max(self.support_radius, other.support_radius),
                               self.singularities + other.singularities, self.breaks + other.breaks,
                               f"{self.label}+{other.label}")

    @classmethod
    def wrap(cls, f, n: int = 1) -> "SampledFunction":
        return f if isinstance(f, SampledFunction) else cls(f, n)


# ---------------------------------------------------------------------------
# fixed rules on balls (for expensive integrands)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedRule:
    """Composite Gauss rule on a ball: ``panels`` pieces of ``order`` nodes.

    In one dimension the ball is first split at the given points.
    In the plane a polar product rule about the centre is used.
    """

    panels: int = 12
    order: int = 6

    def nodes(self, B: Ball, points=()) -> tuple[np.ndarray, np.ndarray]:
        if B.n == 1:
            x, R = B.center[0], B.radius
            cuts = sorted({x - R, x + R, *[p for p in points if x - R < p < x + R]})
            xs, ws = [], []
            for a, b in zip(cuts[:-1], cuts[1:]):
                k = max(1, int(round(self.panels * (b - a) / (2 * R))))
                edges = np.linspace(a, b, k + 1)
                xg, wg = np.polynomial.legendre.leggauss(self.order)
                mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
                xs.append((mid[:, None] + half[:, None] * xg).ravel())
                ws.append((half[:, None] * wg).ravel())
            return np.concatenate(xs), np.concatenate(ws)
        xr, wr = np.polynomial.legendre.leggauss(self.panels)
        r = 0.5 * B.radius * (xr + 1)
        wr = 0.5 * B.radius * wr
        m = 4 * self.panels
        th = 2 * np.pi * np.arange(m) / m
        rr, tt = np.meshgrid(r, th, indexing="ij")
        pts = np.stack([B.center[0] + rr * np.cos(tt), B.center[1] + rr * np.sin(tt)], axis=-1)
        w = (wr[:, None] * r[:, None] * (2 * np.pi / m)) * np.ones_like(tt)
        return pts.reshape(-1, 2), w.ravel()


def _f_points(f: SampledFunction):
    pts = [p for p, _ in f.singularities] + list(f.breaks)
    if f.n == 1 and math.isfinite(f.support_radius):
        pts += [-f.support_radius, f.support_radius]
    return [float(np.atleast_1d(p)[0]) for p in pts] if f.n == 1 else []


# ---------------------------------------------------------------------------
# means and oscillations
# ---------------------------------------------------------------------------

def ball_mean(f, B: Ball, rtol: float = 1e-10) -> float:
    """``m_B f = (1/|B|) int_B f``."""
    f = SampledFunction.wrap(f, B.n)
    return integrate(f, B, f.spec(rtol)) / measure(B)


def _rounding_zero(osc: float, m: float, B: Ball) -> float:
    # a constant f leaves only rounding noise in |f - m|
    return 0.0 if osc <= 64 * np.finfo(float).eps * abs(m) * measure(B) else osc


def _osc_integral(f: SampledFunction, B: Ball, rtol, rule: FixedRule | None):
    if rule is not None:
        x, wt = rule.nodes(B, _f_points(f))
        vals = f(x)
        m = float(np.dot(wt, vals)) / measure(B)
        return _rounding_zero(float(np.dot(wt, np.abs(vals - m))), m, B)
    m = ball_mean(f, B, rtol)
    g = lambda y: np.abs(f(y) - m)  # noqa: E731
    spec = f.spec(rtol, _level_crossings(f, m, B) if B.n == 1 else ())
    try:
        osc = integrate(g, B, spec)
    except ToleranceNotMet as exc:
        # unresolved kinks of |f - m|; the estimate is still accurate to the reported error
        osc = exc.estimate
    return _rounding_zero(osc, m, B)


def _level_crossings(f: SampledFunction, m: float, B: Ball, k: int = 2049):
    """Points of ``B`` where ``f = m`` (kinks of ``|f - m|``), located by sign changes."""
    x0, R = B.center[0], B.radius
    xs = np.linspace(x0 - R, x0 + R, k)
    d = f(xs) - m
    out = []
    for i in np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]:
        try:
            out.append(brentq(lambda t: float(f(np.array([t]))[0]) - m, xs[i], xs[i + 1], xtol=1e-15))
        except ValueError:
            continue
    return out


def _wmass(w: Weight, B: Ball) -> float:
    wB = weight_mass(w, B)
    if not wB > 0:
        raise ValueError(f"w(B) = 0 on {B}")
    return wB


def oscillation(f, w: Weight, beta: float, B: Ball, rtol: float = 1e-9,
                rule: FixedRule | None = None) -> float:
    """``(1/(w(B)|B|**beta)) int_B |f - m_B f|``."""
    f = SampledFunction.wrap(f, B.n)
    return _osc_integral(f, B, rtol, rule) / (_wmass(w, B) * measure(B) ** beta)


def oscillation_old(f, w: Weight, beta: float, B: Ball, rtol: float = 1e-9,
                    rule: FixedRule | None = None) -> float:
    """``(1 / (inf_B w |B|**(1+beta))) int_B |f - m_B f|``; infinite when ``inf_B w = 0``."""
    f = SampledFunction.wrap(f, B.n)
    osc = _osc_integral(f, B, rtol, rule)
    m = _inf_on_ball(w, B)
    if m <= 0:
        return 0.0 if osc == 0 else math.inf
    return osc / (m * measure(B) ** (1 + beta))


@dataclass(frozen=True)
class OscillationReport:
    beta: float
    sup: float
    argmax_ball: Ball | None
    values: tuple
    plan_digest: str

    def to_dict(self):
        return {"beta": self.beta, "sup": self.sup,
                "argmax_ball": None if self.argmax_ball is None else self.argmax_ball.to_dict(),
                "values": list(self.values), "plan_digest": self.plan_digest}


def _seminorm(per_ball, f, w, beta, plan: BallSamplePlan, rtol, rule, executor, balls=None):
    f = SampledFunction.wrap(f, plan.n)
    balls = plan.balls() if balls is None else balls
    if rule is not None:
        # one vectorised call of f for every node of every ball
        packs = [rule.nodes(B, _f_points(f)) for B in balls]
        sizes = [len(p[1]) for p in packs]
        allx = np.concatenate([p[0] for p in packs])
        vals = f(allx)
        out, k = [], 0
        for B, (x, wt), sz in zip(balls, packs, sizes):
            fv = vals[k:k + sz]
            k += sz
            m = float(np.dot(wt, fv)) / measure(B)
            osc = _rounding_zero(float(np.dot(wt, np.abs(fv - m))), m, B)
            out.append(per_ball(osc, B))
    else:
        mapper = executor.map if executor is not None else map
        out = list(mapper(lambda B: per_ball(_osc_integral(f, B, rtol, None), B), balls))
    vals = np.asarray(out, dtype=float)
    i = int(np.argmax(vals)) if len(vals) else 0
    return OscillationReport(float(beta), float(vals[i]) if len(vals) else 0.0,
                             balls[i] if len(vals) else None, tuple(vals.tolist()), plan.digest())


def seminorm(f, w: Weight, beta: float, plan: BallSamplePlan, rtol: float = 1e-9,
             rule: FixedRule | None = None, executor=None, balls=None) -> OscillationReport:
    """Sup over the plan of :func:`oscillation`."""
    return _seminorm(lambda osc, B: osc / (_wmass(w, B) * measure(B) ** beta), f, w, beta, plan, rtol,
                     rule, executor, balls)


def seminorm_old(f, w: Weight, beta: float, plan: BallSamplePlan, rtol: float = 1e-9,
                 rule: FixedRule | None = None, executor=None, balls=None) -> OscillationReport:
    """Sup over the plan of :func:`oscillation_old`."""
    def per(osc, B):
        m = _inf_on_ball(w, B)
        if m <= 0:
            return 0.0 if osc == 0 else math.inf
        return osc / (m * measure(B) ** (1 + beta))

    return _seminorm(per, f, w, beta, plan, rtol, rule, executor, balls)


# ---------------------------------------------------------------------------
# L^r(f/v)
# ---------------------------------------------------------------------------

def _pt_key(p):
    return tuple(np.atleast_1d(np.asarray(p, dtype=float)).tolist())


def lr_norm(f: SampledFunction, v: Weight, r, rtol: float = 1e-10) -> float:
    """``||f / v||_{L^r}`` over the support of ``f``; ``inf`` when divergent.

    ``r = inf`` gives the sampled essential sup.
    """
    n = f.n
    if not math.isfinite(f.support_radius):
        raise ValueError("lr_norm needs a compactly supported f")
    r = math.inf if (isinstance(r, str) and r == "inf") else float(r)
    if r < 1:
        raise ValueError("need r >= 1")
    exps: dict = {}
    for p, e in f.singularities:
        exps[_pt_key(p)] = exps.get(_pt_key(p), 0.0) + e
    for p, e in v.singularities(n, 1.0):
        exps[_pt_key(p)] = exps.get(_pt_key(p), 0.0) - e

    def ratio(y):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.abs(f(y)) / v.values(y, n)
        return np.where(np.isnan(out), 0.0, out)

    A = f.support_radius
    B = Ball(np.zeros(n), A)
    if math.isinf(r):
        if any(e < 0 for e in exps.values()):
            return math.inf
        if n == 1:
            ys = np.concatenate([np.linspace(-A, A, 20001), _f_points(f)])
        else:
            rr, tt = np.meshgrid(np.linspace(0, A, 401), np.linspace(0, 2 * np.pi, 256, endpoint=False))
            ys = np.stack([rr * np.cos(tt), rr * np.sin(tt)], axis=-1).reshape(-1, 2)
        return float(np.max(ratio(ys)))
    sing = []
    for p, e in exps.items():
        if e * r <= -n:
            return math.inf
        sing.append((p if n == 2 else p[0], e * r))
    brk = [*f.breaks, *([-A, A] if n == 1 else [A])] + ([b for b in v.breaks()] if n == 2 else
                                                            [s * b for b in v.breaks() for s in (1, -1)])
    spec = QuadratureSpec(rtol=rtol, singularities=tuple(sing[:1] if n == 2 else sing), breaks=tuple(brk))
    return integrate(lambda y: ratio(y) ** r, B, spec) ** (1.0 / r)


# ---------------------------------------------------------------------------
# Young functions and Luxemburg averages
# ---------------------------------------------------------------------------

_GRID = np.geomspace(1e-6, 1e6, 1000)


@dataclass(frozen=True)
class YoungFunction:
    """A Young function ``Phi``; monotonicity and convexity are sampled on construction."""

    phi: Callable = field(compare=False)
    label: str = "Phi"
    inverse_fn: Callable | None = field(default=None, compare=False)
    verify: bool = True

    def __post_init__(self):
        if not self.verify:
            return
        if abs(float(self.phi(np.array([0.0]))[0])) > 0:
            raise ValueError("a Young function must vanish at 0")
        t = np.geomspace(1e-3, 1e3, 1000)
        y = self(t)
        keep = np.isfinite(y)
        t, y = t[keep], y[keep]
        if np.any(np.diff(y) < -1e-12 * np.abs(y[1:])):
            raise ValueError("Young function must be nondecreasing")
        # convexity on a log grid through chord slopes
        s = np.diff(y) / np.diff(t)
        if np.any(np.diff(s) < -1e-8 * np.maximum(np.abs(s[1:]), 1e-300)):
            raise ValueError("Young function must be convex")

    def __call__(self, t):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.asarray(self.phi(np.asarray(t, dtype=float)), dtype=float)

    def inverse(self, t) -> np.ndarray:
        """Generalised inverse ``inf {s : Phi(s) > t}`` (vectorised bisection unless supplied)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.inverse_fn is not None:
            return np.asarray(self.inverse_fn(t), dtype=float)
        hi = np.ones_like(t)
        for _ in range(2100):
            low = self(hi) <= t
            if not low.any():
                break
            hi = np.where(low, hi * 2, hi)
        lo = hi / 2
        for _ in range(2100):
            high = (self(lo) > t) & (lo > 0)
            if not high.any():
                break
            lo = np.where(high, lo / 2, lo)
        lo = np.where(self(lo) > t, 0.0, lo)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            up = self(mid) > t
            lo, hi = np.where(up, lo, mid), np.where(up, mid, hi)
            if np.all(hi - lo <= 4e-16 * hi):
                break
        return np.where(t > 0, hi, 0.0)


def power_young(p: float, scale: float = 1.0) -> YoungFunction:
    """``scale * t**p``."""
    return YoungFunction(lambda t: scale * np.asarray(t, dtype=float) ** p, f"{scale:g} t^{p:g}",
                         lambda t: (np.asarray(t, dtype=float) / scale) ** (1.0 / p))


def conjugate(Phi: YoungFunction, iterations: int = 80) -> YoungFunction:
    """Complementary function ``sup_{s>0} (s t - Phi(s))``.

    ``s t - Phi(s)`` is concave in ``s``.  Its maximiser is bracketed on a log
    grid over ``[1e-6, 1e6]`` and then refined by a golden-section search run
    on all ``t`` at once.
    """
    grid_vals = Phi(_GRID)
    ratio = (math.sqrt(5) - 1) / 2

    def phit(t):
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        with np.errstate(over="ignore", invalid="ignore"):
            g = flat[:, None] * _GRID[None, :] - grid_vals[None, :]
        g = np.where(np.isnan(g), -np.inf, g)
        j = np.argmax(g, axis=1)
        lo = np.where(j > 0, _GRID[np.maximum(j - 1, 0)], 0.0)
        hi = _GRID[np.minimum(j + 1, len(_GRID) - 1)]
        obj = lambda s: flat * s - Phi(s)  # noqa: E731
        a, b = lo.copy(), hi.copy()
        c, d = b - ratio * (b - a), a + ratio * (b - a)
        fc, fd = obj(c), obj(d)
        for _ in range(iterations):
            left = fc >= fd
            b = np.where(left, d, b)
            a = np.where(left, a, c)
            c_new = b - ratio * (b - a)
            d_new = a + ratio * (b - a)
            c, d = np.where(left, c_new, d), np.where(left, c, d_new)
            fc_new, fd_new = np.where(left, obj(c), fd), np.where(left, fc, obj(d))
            fc, fd = fc_new, fd_new
        best = np.maximum(np.maximum(fc, fd), np.max(g, axis=1))
        out = np.where(flat > 0, np.maximum(best, 0.0), 0.0)
        return out.reshape(t.shape)

    return YoungFunction(phit, f"conj({Phi.label})", verify=False)


def _ball_sample(f: SampledFunction, B: Ball, rule: FixedRule | None):
    rule = rule or FixedRule(panels=64, order=10)
    x, wt = rule.nodes(B, _f_points(f))
    return np.abs(f(x)), wt


def luxemburg(f, Phi: YoungFunction, B: Ball, rule: FixedRule | None = None,
              rtol: float = 1e-12) -> float:
    """``inf {lam > 0 : (1/|B|) int_B Phi(|f|/lam) <= 1}`` by bisection.

    Integrals use one fixed rule on ``B`` (so every trial ``lam`` reuses the
    same samples of ``f``).
    """
    f = SampledFunction.wrap(f, B.n)
    vals, wt = _ball_sample(f, B, rule)
    mB = float(wt.sum())
    if not np.any(vals > 0):
        return 0.0

    def F(lam):
        return float(np.dot(wt, Phi(vals / lam))) / mB - 1.0

    top = float(vals.max())
    hi = top
    while F(hi) > 0:
        hi *= 2
        if hi > 1e300:
            raise ArithmeticError(f"bracket failure: F({hi}) still positive")
    lo = hi / 2
    while F(lo) <= 0:
        lo /= 2
        if lo < 1e-300:
            raise ArithmeticError(f"bracket failure: F({lo}) still non-positive")
    return bisect(F, lo, hi, xtol=1e-300, rtol=max(rtol, 4.5e-16), maxiter=2000)


def holder_orlicz_check(f, g, Phi: YoungFunction, B: Ball, Phi_conj: YoungFunction | None = None,
                        rule: FixedRule | None = None) -> float:
    """``mean_B |f g| / (||f||_{Phi,B} ||g||_{conj Phi,B})``; at most 2 in theory."""
    f = SampledFunction.wrap(f, B.n)
    g = SampledFunction.wrap(g, B.n)
    Phi_conj = Phi_conj or conjugate(Phi)
    fv, wt = _ball_sample(f, B, rule)
    gv, _ = _ball_sample(g, B, rule)
    lhs = float(np.dot(wt, fv * gv)) / float(wt.sum())
    if lhs == 0:
        return 0.0
    return lhs / (luxemburg(f, Phi, B, rule) * luxemburg(g, Phi_conj, B, rule))
