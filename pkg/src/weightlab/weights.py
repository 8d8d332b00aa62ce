"""Weights, the H(r, alpha_tilde, delta_tilde) functionals and membership tests.

For a ball ``B = B(x_B, R)`` the class functional is

    H(B) = |B|**((delta - dt)/n) * || v / (|B|**(1/n) + |x_B - .|)**gamma ||_{r'} * |B| / w(B)

with ``gamma = n - alpha_tilde + delta``; the pair belongs to the class when
``sup_B H(B) < inf``.  It splits into a local part (the norm over ``B``) and a
global part (the norm over the complement), see :func:`local_functional` and
:func:`global_functional`.

Membership of (piecewise) power pairs is decided exactly by
:func:`check_membership_symbolic`; :func:`check_membership_numeric` is an
independent sampled check that only ever reports consistency.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from . import _orders as O
from .geometry import Ball, Complement, DivergentIntegral, QuadratureSpec, integrate, measure, power_integral
from .params import CORNER, TRIVIAL, Setting, classify_region, is_inf, to_fraction

__all__ = [
    "Weight", "PowerWeight", "PiecewisePower", "CallableWeight", "ZeroWeight", "WeightPair",
    "MembershipVerdict", "BallSamplePlan", "FunctionalValue", "LocalIntegrabilityError",
    "h_functional", "local_functional", "global_functional", "old_class_functional",
    "check_membership_symbolic", "check_membership_numeric", "perturbed_membership",
    "double_ball_check", "reverse_holder_check", "doubling_check", "CatalogEntry", "catalog",
    "scaling_exponent", "weight_mass", "SLOPE_THRESHOLD", "SUP_GROWTH_SLOPE",
]

SLOPE_THRESHOLD = 0.05
SUP_GROWTH_SLOPE = 0.02
DEFAULT_RTOL = 1e-9


class LocalIntegrabilityError(DivergentIntegral):
    """A weight (or its power) fails to be locally integrable."""


def _radius(y, n):
    y = np.asarray(y, dtype=float)
    return np.abs(y) if n == 1 else np.hypot(y[..., 0], y[..., 1])


def _origin(n):
    return 0.0 if n == 1 else (0.0, 0.0)


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

class Weight:
    """Base class.  Subclasses evaluate ``w(y)`` on arrays of points."""

    radial = False

    def values(self, y, n: int) -> np.ndarray:
        raise NotImplementedError

    def powered(self, y, n: int, power: float) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self.values(y, n) ** power

    def singularities(self, n: int, power: float = 1.0) -> tuple:
        """``((point, exponent), ...)`` describing ``w**power`` near singular points."""
        return ()

    def breaks(self) -> tuple:
        """Radii where the profile is not smooth."""
        return ()

    def profile(self) -> "O.Profile | None":
        return None

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PowerWeight(Weight):
    """``|x|**exponent``."""

    exponent: Fraction
    radial = True

    def __init__(self, exponent):
        object.__setattr__(self, "exponent", to_fraction(exponent))

    def values(self, y, n):
        a = float(self.exponent)
        r = _radius(y, n)
        if a == 0:
            return np.ones_like(r)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return r**a

    def singularities(self, n, power=1.0):
        return ((_origin(n), float(self.exponent) * power),)

    def profile(self):
        return O.Profile(self.exponent, self.exponent)

    def to_dict(self):
        return {"kind": "power", "exponent": str(self.exponent)}

    def __repr__(self):
        return f"|x|^{self.exponent}"


@dataclass(frozen=True)
class PiecewisePower(Weight):
    """``|x|**inner`` on ``|x| <= break_radius`` and ``|x|**outer`` outside."""

    inner: Fraction
    outer: Fraction
    break_radius: float = 1.0
    radial = True

    def __init__(self, inner, outer, break_radius=1.0):
        if not break_radius > 0:
            raise ValueError("break radius must be positive")
        object.__setattr__(self, "inner", to_fraction(inner))
        object.__setattr__(self, "outer", to_fraction(outer))
        object.__setattr__(self, "break_radius", float(break_radius))

    def values(self, y, n):
        r = _radius(y, n)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.where(r <= self.break_radius, r ** float(self.inner), r ** float(self.outer))

    def singularities(self, n, power=1.0):
        return ((_origin(n), float(self.inner) * power),)

    def breaks(self):
        return (self.break_radius,)

    def profile(self):
        if self.break_radius != 1.0:
            return None
        return O.Profile(self.inner, self.outer)

    def to_dict(self):
        return {"kind": "piecewise_power", "inner": str(self.inner), "outer": str(self.outer),
                "break_radius": self.break_radius}

    def __repr__(self):
        return f"|x|^{self.inner} (|x|<={self.break_radius:g}), |x|^{self.outer} beyond"


@dataclass(frozen=True)
class CallableWeight(Weight):
    """An arbitrary nonnegative weight given by a vectorised function.

    ``singularities`` lists ``(point, exponent)`` pairs meaning ``w(y)``
    behaves like ``|y - point|**exponent`` nearby; they drive both the
    local-integrability checks and the quadrature.  ``breaks`` are radii
    about the origin where ``w`` is not smooth.
    """

    func: Callable = field(compare=False)
    label: str = "callable"
    annotated: tuple = ()
    kinks: tuple = ()
    is_radial: bool = False

    def __init__(self, func, label="callable", singularities=(), breaks=(), radial=False):
        object.__setattr__(self, "func", func)
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "annotated", tuple((p, float(e)) for p, e in singularities))
        object.__setattr__(self, "kinks", tuple(float(b) for b in breaks))
        object.__setattr__(self, "is_radial", bool(radial))

    @property
    def radial(self):
        return self.is_radial

    def values(self, y, n):
        return np.asarray(self.func(np.asarray(y, dtype=float)), dtype=float)

    def singularities(self, n, power=1.0):
        return tuple((p, e * power) for p, e in self.annotated)

    def breaks(self):
        return self.kinks

    def to_dict(self):
        return {"kind": "callable", "label": self.label}

    def __repr__(self):
        return f"<{self.label}>"


@dataclass(frozen=True)
class ZeroWeight(Weight):
    """The zero weight; admitted only as ``v``."""

    radial = True

    def values(self, y, n):
        return np.zeros_like(_radius(y, n))

    def profile(self):
        return None

    def to_dict(self):
        return {"kind": "zero"}

    def __repr__(self):
        return "0"


def _as_weight(x) -> Weight:
    if isinstance(x, Weight):
        return x
    if x == 0 and not isinstance(x, bool):
        return ZeroWeight()
    raise TypeError(f"not a weight: {x!r}")


@dataclass(frozen=True)
class WeightPair:
    w: Weight
    v: Weight
    n: int = 1

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if isinstance(self.w, ZeroWeight):
            raise ValueError("w = 0 is not a weight for the w-role")
        for e in _origin_exponents(self.w, self.n):
            if e <= -self.n:
                raise LocalIntegrabilityError(f"w = {self.w!r} is not locally integrable in dimension {self.n}")

    @property
    def is_power_pair(self) -> bool:
        return self.w.profile() is not None and (self.v.profile() is not None
                                                  or isinstance(self.v, ZeroWeight))

    @property
    def is_pure_power(self) -> bool:
        return isinstance(self.w, PowerWeight) and isinstance(self.v, PowerWeight)

    @property
    def radial(self) -> bool:
        return self.w.radial and self.v.radial

    def to_dict(self):
        return {"n": self.n, "w": self.w.to_dict(), "v": self.v.to_dict()}

    def __repr__(self):
        return f"({self.w!r}, {self.v!r})"


def _origin_exponents(wt: Weight, n: int, power: float = 1.0):
    return [e for _, e in wt.singularities(n, power)]


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FunctionalValue:
    """A functional evaluated with a truncated tail.

    ``value`` is the truncated value.  ``divergent`` is set when the tail
    keeps growing with the truncation; ``tail_order`` is the fitted growth
    exponent of the dyadic tail pieces (per doubling).
    """

    value: float
    divergent: bool = False
    tail_order: float | None = None

    def __float__(self):
        return math.inf if self.divergent else self.value

    def to_dict(self):
        return {"value": self.value, "divergent": self.divergent, "tail_order": self.tail_order}


STATUSES = ("member", "nonmember", "member-consistent", "nonmember-consistent", "undecided")
FAILING = ("none", "local", "global", "local-integrability")


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of a membership test.

    Symbolic verdicts are ``member``/``nonmember``.  Numeric ones can only be
    ``member-consistent``, ``nonmember-consistent`` or ``undecided``.
    """

    status: str
    failing_condition: str
    witness: object
    method: str
    sup_estimate: float | None = None
    notes: tuple = ()

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.failing_condition not in FAILING:
            raise ValueError(f"unknown failing condition {self.failing_condition!r}")
        if self.is_nonmember and not self.witness:
            raise ValueError("nonmember verdicts need a witness")

    @property
    def is_member(self) -> bool:
        return self.status in ("member", "member-consistent")

    @property
    def is_nonmember(self) -> bool:
        return self.status in ("nonmember", "nonmember-consistent")

    def agrees_with(self, other: "MembershipVerdict") -> bool:
        """No contradiction between two verdicts (undecided contradicts nothing)."""
        if "undecided" in (self.status, other.status):
            return True
        if self.is_member != other.is_member:
            return False
        return self.is_member or self.failing_condition == other.failing_condition

    def report(self, pair: WeightPair, setting: Setting, plan_digest: str | None = None) -> dict:
        return {
            "pair": pair.to_dict(),
            "setting": setting.to_dict(),
            "method": self.method,
            "status": self.status,
            "failing_condition": self.failing_condition,
            "witness": self.witness,
            "sup_estimate": self.sup_estimate,
            "plan_digest": plan_digest,
        }


# ---------------------------------------------------------------------------
# sample plans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BallSamplePlan:
    """A deterministic family of balls.

    Radii are log-uniform on ``[r_min, r_max]``; centre magnitudes are 0 and
    a log grid on ``[c_min, c_max]``; directions are ``+-e1`` on the line and
    eight compass directions in the plane.  ``jitter`` perturbs the centre
    magnitudes multiplicatively using ``seed``.
    """

    n: int = 1
    r_min: float = 1e-4
    r_max: float = 1e4
    n_radii: int = 33
    c_min: float = 1e-4
    c_max: float = 1e4
    n_centers: int = 9
    seed: int = 0
    jitter: float = 0.0

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if not (0 < self.r_min < self.r_max and 0 < self.c_min <= self.c_max):
            raise ValueError("bad plan ranges")
        if self.n_radii < 2 or self.n_centers < 1:
            raise ValueError("plan needs at least two radii and one centre magnitude")

    def radii(self) -> np.ndarray:
        return np.geomspace(self.r_min, self.r_max, self.n_radii)

    def center_magnitudes(self) -> np.ndarray:
        mags = np.geomspace(self.c_min, self.c_max, self.n_centers)
        if self.jitter:
            rng = np.random.default_rng(self.seed)
            mags = mags * np.exp(self.jitter * rng.standard_normal(mags.shape))
        return np.concatenate([[0.0], mags])

    def directions(self) -> np.ndarray:
        if self.n == 1:
            return np.array([[1.0], [-1.0]])
        ang = np.arange(8) * (np.pi / 4)
        return np.stack([np.cos(ang), np.sin(ang)], axis=-1)

    def balls(self, symmetric: bool = False) -> list[Ball]:
        """All balls, radius-major.  ``symmetric`` keeps only the first direction."""
        dirs = self.directions()[:1] if symmetric else self.directions()
        out = []
        for R in self.radii():
            for c in self.center_magnitudes():
                if c == 0:
                    out.append(Ball(np.zeros(self.n), R))
                    continue
                for d in dirs:
                    out.append(Ball(c * d, R))
        return out

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("n", "r_min", "r_max", "n_radii", "c_min", "c_max",
                                               "n_centers", "seed", "jitter")}

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------------------
# numeric functionals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Params:
    n: int
    alpha_tilde: float
    delta: float
    delta_tilde: float
    p: float  # norm exponent r'; inf when r = 1

    @property
    def gamma(self):
        return self.n - self.alpha_tilde + self.delta

    @property
    def inv_r(self):
        return 1.0 if math.isinf(self.p) else 1.0 - 1.0 / self.p


def _params(s: Setting, p=None) -> _Params:
    s._need_full()
    if p is None:
        p = s.r_conj
    p = math.inf if is_inf(p) else float(p)
    return _Params(s.n, float(s.alpha_tilde), float(s.delta), float(s.delta_tilde), p)


def _spec(n, weights_powers, rtol=DEFAULT_RTOL, points=()):
    sing, brk = [], set()
    for wt, pw in weights_powers:
        sing.extend(wt.singularities(n, pw))
        for b in wt.breaks():
            brk.update((b, -b) if n == 1 else (b,))
    if n == 1:
        brk.update(points)
    if not sing and n == 2 and brk:
        sing = [((0.0, 0.0), 0.0)]
    return QuadratureSpec(rtol=rtol, singularities=tuple(sing[:1] if n == 2 else sing),
                          breaks=tuple(brk))


def weight_mass(wt: Weight, B: Ball, power: float = 1.0, rtol: float = DEFAULT_RTOL) -> float:
    """``int_B w**power``; raises :class:`LocalIntegrabilityError` if infinite."""
    n = B.n
    if isinstance(wt, ZeroWeight):
        return 0.0
    for p0, e in wt.singularities(n, power):
        dist = math.dist(np.atleast_1d(p0), B.center)
        if e <= -n and dist <= B.radius:
            raise LocalIntegrabilityError(f"{wt!r}^{power:g} is not integrable on {B}")
    if isinstance(wt, PowerWeight):
        g = float(wt.exponent) * power
        if g == 0:
            return measure(B)
        return power_integral(B, g)
    if isinstance(wt, PiecewisePower) and n == 1:
        x, R, rb = B.center[0], B.radius, wt.break_radius
        pts = sorted({x - R, x + R, *[q for q in (-rb, rb) if x - R < q < x + R]})
        total = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            mid = 0.5 * (a + b)
            g = float(wt.inner if abs(mid) <= rb else wt.outer) * power
            total += power_integral(Ball(mid, 0.5 * (b - a)), g) if g else (b - a)
        return total
    spec = _spec(n, [(wt, power)], rtol)
    return integrate(lambda y: wt.powered(y, n, power), B, spec)


def _dist(y, B: Ball):
    y = np.asarray(y, dtype=float)
    if B.n == 1:
        return np.abs(y - B.center[0])
    return np.hypot(y[..., 0] - B.center[0], y[..., 1] - B.center[1])


def _check_v_local(pair: WeightPair, P: _Params):
    n = pair.n
    if isinstance(pair.v, ZeroWeight):
        return
    if math.isinf(P.p):
        for _, e in pair.v.singularities(n, 1.0):
            if e < 0:
                raise LocalIntegrabilityError(f"v = {pair.v!r} is unbounded near a point (needed for r = 1)")
    else:
        for _, e in pair.v.singularities(n, P.p):
            if e <= -n:
                raise LocalIntegrabilityError(f"v^{P.p:g} is not locally integrable")


def _default_M(B: Ball, M):
    return 2.0**40 * B.radius if M is None else float(M)


# ----- essential suprema (r = 1) -------------------------------------------

def _sample_dirs(B: Ball):
    if B.n == 1:
        return np.array([[1.0], [-1.0]])
    ang = list(np.linspace(0, 2 * np.pi, 32, endpoint=False))
    if B.center_norm > 0:
        a0 = math.atan2(B.center[1], B.center[0])
        ang += [a0, a0 + np.pi]
    ang = np.array(ang)
    return np.stack([np.cos(ang), np.sin(ang)], axis=-1)


def _sup_search(g, B: Ball, t_lo: float, t_hi: float, breaks=(), per_octave: int = 24):
    """Sup of ``g`` over ``t_lo <= |y - x_B| <= t_hi``, sampled along rays.

    Returns ``(sup, octave_maxima)``; octaves are measured from ``t_lo`` when
    ``t_lo > 0``.  In one dimension the best sample is polished with a
    bounded scalar search.
    """
    dirs = _sample_dirs(B)
    x = np.asarray(B.center)
    if t_lo > 0:
        k = max(1, int(math.ceil(math.log2(t_hi / t_lo) - 1e-12)))
        ts = t_lo * 2.0 ** np.linspace(0, k, k * per_octave + 1)
        ts = np.minimum(ts, t_hi)
        octave = np.minimum((np.arange(len(ts)) // per_octave), k - 1)
    else:
        k = 1
        ts = np.concatenate([[0.0], t_hi * np.geomspace(1e-8, 1, 8 * per_octave)])
        octave = np.zeros(len(ts), dtype=int)
    extra_t = []
    rho = B.center_norm
    for rb in breaks:
        for tt in (abs(rb - rho), rb + rho):
            for f in (1 - 1e-9, 1.0, 1 + 1e-9):
                if t_lo <= tt * f <= t_hi:
                    extra_t.append(tt * f)
    for tt in (rho,):
        if t_lo <= tt <= t_hi:
            extra_t.append(tt)
    ts_all = np.concatenate([ts, extra_t]) if extra_t else ts
    oct_all = np.concatenate([octave, np.full(len(extra_t), -1)]) if extra_t else octave
    pts = x[None, None, :] + ts_all[None, :, None] * dirs[:, None, :]
    pts = pts[..., 0] if B.n == 1 else pts
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        vals = np.asarray(g(pts), dtype=float)
    vals = np.where(np.isnan(vals), 0.0, vals)
    best = vals.max(axis=0)
    octave_max = [float(best[oct_all == i].max()) for i in range(k)]
    j = int(np.argmax(vals.ravel()))
    di, ti = divmod(j, len(ts_all))
    sup = float(vals.ravel()[j])
    if B.n == 1 and math.isfinite(sup) and ti < len(ts):
        lo = ts[max(ti - 1, 0)]
        hi = ts[min(ti + 1, len(ts) - 1)]
        if hi > lo:
            d = dirs[di, 0]
            res = minimize_scalar(lambda t: -float(g(np.array([x[0] + d * t]))[0]),
                                  bounds=(lo, hi), method="bounded", options={"xatol": 1e-12 * hi})
            sup = max(sup, -float(res.fun))
    return sup, octave_max


def _sup_tail(octave_max):
    """Fitted growth of octave maxima; divergent when clearly increasing."""
    c = np.asarray(octave_max[-8:], dtype=float)
    c = c[c > 0]
    if len(c) < 2:
        return -math.inf, False
    slope = float(np.polyfit(np.arange(len(c)), np.log2(c), 1)[0])
    return slope, slope > SUP_GROWTH_SLOPE


# ----- the functionals -------------------------------------------------------

def _ratio(pair: WeightPair, B: Ball, rtol) -> float:
    wB = weight_mass(pair.w, B, 1.0, rtol)
    if wB <= 0:
        return math.inf
    return measure(B) / wB


def _h(pair: WeightPair, P: _Params, B: Ball, M=None, rtol=DEFAULT_RTOL) -> FunctionalValue:
    if isinstance(pair.v, ZeroWeight):
        return FunctionalValue(0.0, False, None)
    _check_v_local(pair, P)
    n = pair.n
    side = measure(B) ** (1.0 / n)
    M = _default_M(B, M)
    pre = measure(B) ** ((P.delta - P.delta_tilde) / n) * _ratio(pair, B, rtol)
    if math.isinf(P.p):
        g = lambda y: pair.v.values(y, n) / (side + _dist(y, B)) ** P.gamma
        s_in, _ = _sup_search(g, B, 0.0, B.radius, pair.v.breaks())
        s_out, octs = _sup_search(g, B, B.radius, M, pair.v.breaks())
        slope, div = _sup_tail(octs)
        return FunctionalValue(pre * max(s_in, s_out), div, slope)
    p, K = P.p, P.p * P.gamma
    f = lambda y: pair.v.powered(y, n, p) * (side + _dist(y, B)) ** (-K)
    spec = _spec(n, [(pair.v, p)], rtol, points=(B.center[0],) if n == 1 else ())
    inner = integrate(f, B, spec)
    tail = integrate(f, Complement(B, M), spec)
    return FunctionalValue(pre * (inner + tail.value) ** (1.0 / p), tail.divergent, tail.tail_order)


def _local(pair: WeightPair, P: _Params, B: Ball, rtol=DEFAULT_RTOL) -> float:
    if isinstance(pair.v, ZeroWeight):
        return 0.0
    _check_v_local(pair, P)
    n = pair.n
    mB = measure(B)
    pre = mB ** ((P.alpha_tilde - P.delta_tilde) / n - P.inv_r) * _ratio(pair, B, rtol)
    if math.isinf(P.p):
        sup, _ = _sup_search(lambda y: pair.v.values(y, n), B, 0.0, B.radius, pair.v.breaks())
        return pre * sup
    return pre * (weight_mass(pair.v, B, P.p, rtol) / mB) ** (1.0 / P.p)


def _global(pair: WeightPair, P: _Params, B: Ball, M=None, rtol=DEFAULT_RTOL) -> FunctionalValue:
    if isinstance(pair.v, ZeroWeight):
        return FunctionalValue(0.0, False, None)
    _check_v_local(pair, P)
    n = pair.n
    M = _default_M(B, M)
    pre = measure(B) ** ((P.delta - P.delta_tilde) / n) * _ratio(pair, B, rtol)
    if math.isinf(P.p):
        g = lambda y: pair.v.values(y, n) / _dist(y, B) ** P.gamma
        sup, octs = _sup_search(g, B, B.radius, M, pair.v.breaks())
        slope, div = _sup_tail(octs)
        return FunctionalValue(pre * sup, div, slope)
    p, K = P.p, P.p * P.gamma
    f = lambda y: pair.v.powered(y, n, p) * _dist(y, B) ** (-K)
    spec = _spec(n, [(pair.v, p)], rtol)
    tail = integrate(f, Complement(B, M), spec)
    return FunctionalValue(pre * tail.value ** (1.0 / p), tail.divergent, tail.tail_order)


def h_functional(pair: WeightPair, s: Setting, B: Ball, M: float | None = None,
                 rtol: float = DEFAULT_RTOL) -> FunctionalValue:
    """The class functional ``H(B)`` with the tail truncated at ``|y - x_B| < M``.

    ``M`` defaults to ``2**40 R``.  For ``r = 1`` the norm is an essential
    supremum found by sampling.
    """
    return _h(pair, _params(s), B, M, rtol)


def local_functional(pair: WeightPair, s: Setting, B: Ball, rtol: float = DEFAULT_RTOL) -> float:
    """``|B|**((at - dt)/n - 1/r) * (mean_B v**r')**(1/r') * |B| / w(B)``."""
    return _local(pair, _params(s), B, rtol)


def global_functional(pair: WeightPair, s: Setting, B: Ball, M: float | None = None,
                      rtol: float = DEFAULT_RTOL) -> FunctionalValue:
    """``|B|**((delta - dt)/n) * ||v |x_B - .|**(-gamma)||_{L^r'(outside B)} * |B| / w(B)``."""
    return _global(pair, _params(s), B, M, rtol)


def _inf_on_ball(wt: Weight, B: Ball) -> float:
    n = B.n
    rho, R = B.center_norm, B.radius
    lo, hi = max(rho - R, 0.0), rho + R
    if isinstance(wt, (PowerWeight, PiecewisePower)):
        cands = [lo, hi] + [b for b in wt.breaks() if lo < b < hi]
        cands += [b * (1 + 1e-12) for b in wt.breaks() if lo < b < hi]
        vals = []
        for r in cands:
            y = np.array([r]) if n == 1 else np.array([[r, 0.0]])
            vals.append(float(wt.values(y, n)[0]))
        return min(vals)
    g = lambda y: -wt.values(y, n)
    sup, _ = _sup_search(g, B, 0.0, R, wt.breaks())
    return -sup


def old_class_functional(pair: WeightPair, s: Setting, B: Ball, M: float | None = None,
                         rtol: float = DEFAULT_RTOL) -> FunctionalValue:
    """The older functional with ``|B| / w(B)`` replaced by ``1 / inf_B w``.

    It dominates :func:`h_functional` at every ball.  ``inf_B w = 0`` gives an
    infinite value.
    """
    h = h_functional(pair, s, B, M, rtol)
    if h.value == 0:
        return h
    m = _inf_on_ball(pair.w, B)
    if m <= 0:
        return FunctionalValue(math.inf, h.divergent, h.tail_order)
    wB = weight_mass(pair.w, B, 1.0, rtol)
    return FunctionalValue(h.value * wB / (measure(B) * m), h.divergent, h.tail_order)


# ---------------------------------------------------------------------------
# exact decision for (piecewise) power pairs
# ---------------------------------------------------------------------------

# |x_B| = T**u, R = T**t, T -> inf.  Centred balls only use t.
_CENTRED = ((-1, "centred balls, R -> 0"), (1, "centred balls, R -> inf"))
_FAR = (
    ((1, 0), "far balls, R ~ 1 and |x_B| -> inf"),
    ((0, -1), "far balls, |x_B| ~ 1 and R -> 0"),
    ((1, 1), "far balls, |x_B| ~ R -> inf"),
    ((-1, -1), "far balls, |x_B| ~ R -> 0"),
    ((2, 1), "far balls, 1 << R << |x_B|"),
    ((1, -1), "far balls, R << 1 << |x_B|"),
    ((-1, -2), "far balls, R << |x_B| << 1"),
)


def _add(*xs):
    if any(x is None for x in xs):
        return None
    out = O.ONE
    for x in xs:
        out = out + x
    return out


def _neg(x):
    return None if x is None else O.ONE - x


def _scale(x, c):
    return None if x is None else x.scale(c)


@dataclass(frozen=True)
class _Exact:
    n: int
    alpha_tilde: Fraction
    delta: Fraction
    delta_tilde: Fraction
    p: object  # Fraction or math.inf

    @property
    def gamma(self):
        return self.n - self.alpha_tilde + self.delta

    @property
    def inv_r(self):
        return Fraction(1) if is_inf(self.p) else 1 - 1 / self.p


def _regime_orders(E: _Exact, wp: O.Profile, vp: O.Profile, old: bool):
    """``{regime: (local order, global order)}``; ``None`` marks an infinite order."""
    n, g = E.n, E.gamma
    at, d, dt = E.alpha_tilde, E.delta, E.delta_tilde
    NI, PI = O.NEG_INF, O.POS_INF
    out = {}
    finite = not is_inf(E.p)
    if finite:
        p = Fraction(E.p)
        V, K = vp.scale(p), p * g
        ip = 1 / p
    for t, desc in _CENTRED:
        t = Fraction(t)
        Bm = O.mono(n * t)
        norm = _neg(O.radial_inf(wp, NI, t)) if old else _add(Bm, _neg(O.radial_mass(wp, n, NI, t)))
        if finite:
            IB = O.radial_mass(V, n, NI, t)
            loc = _add(O.mono(t * (at - dt) - n * t * E.inv_r), _scale(_add(IB, _neg(Bm)), ip), norm)
            G = O.radial_mass(V.shift(-K), n, t, PI)
            glob = _add(O.mono(t * (d - dt)), _scale(G, ip), norm)
        else:
            loc = _add(O.mono(t * (at - dt) - n * t), O.radial_sup(vp, NI, t), norm)
            glob = _add(O.mono(t * (d - dt)), O.radial_sup(vp.shift(-g), t, PI), norm)
        out[desc] = (loc, glob)
    for (u, t), desc in _FAR:
        u, t = Fraction(u), Fraction(t)
        Bm = O.mono(n * t)
        norm = O.mono(-wp.at(u))  # |B|/w(B) and 1/inf_B w agree for far balls
        if finite:
            IB = O.mono(V.at(u) + n * t)
            loc = _add(O.mono(t * (at - dt) - n * t * E.inv_r), _scale(_add(IB, _neg(Bm)), ip), norm)
            G = O.omax(
                _add(O.mono(V.at(u)), O.radial_mass(O.Profile(-K, -K), n, t, u)),   # near x_B
                _add(O.mono(-K * u), O.radial_mass(V, n, NI, u)),                   # near 0
                O.radial_mass(V.shift(-K), n, u, PI),                               # far out
                O.mono(V.at(u) - K * u + n * u),                                    # the rest
            )
            glob = _add(O.mono(t * (d - dt)), _scale(G, ip), norm)
        else:
            loc = _add(O.mono(t * (at - dt) - n * t), O.mono(vp.at(u)), norm)
            S = O.omax(
                O.mono(vp.at(u) - g * t),
                _add(O.mono(-g * u), O.radial_sup(vp, NI, u)),
                O.radial_sup(vp.shift(-g), u, PI),
                O.mono(vp.at(u) - g * u),
            )
            glob = _add(O.mono(t * (d - dt)), S, norm)
        out[desc] = (loc, glob)
    return out


def _fmt_order(o):
    return "infinite" if o is None else str(o)


def _decide(E: _Exact, w: Weight, v: Weight, old: bool = False) -> MembershipVerdict:
    n = E.n
    if isinstance(v, ZeroWeight):
        return MembershipVerdict("member", "none", {"note": "v = 0, the functional vanishes"}, "symbolic", 0.0)
    wp, vp = w.profile(), v.profile()
    if wp is None or vp is None:
        raise TypeError("the symbolic decider handles power and piecewise power weights with break radius 1")
    if wp.inner <= -n:
        return MembershipVerdict("nonmember", "local-integrability",
                                 {"regime": "near the origin", "reason": f"w exponent {wp.inner} <= -n"},
                                 "symbolic")
    if is_inf(E.p):
        if vp.inner < 0:
            return MembershipVerdict("nonmember", "local-integrability",
                                     {"regime": "near the origin",
                                      "reason": f"v exponent {vp.inner} < 0 makes v unbounded (r = 1)"},
                                     "symbolic")
    elif vp.inner * E.p <= -n:
        return MembershipVerdict("nonmember", "local-integrability",
                                 {"regime": "near the origin",
                                  "reason": f"v^r' has exponent {vp.inner * E.p} <= -n"}, "symbolic")
    table = _regime_orders(E, wp, vp, old)
    for which, idx in (("local", 0), ("global", 1)):
        for desc, orders in table.items():
            o = orders[idx]
            if o is None or not o.bounded:
                wit = {"regime": desc, "functional": which, "order": _fmt_order(o)}
                if o is not None:
                    wit["exponent"] = str(o.exp)
                    wit["log_power"] = str(o.log)
                elif which == "global":
                    wit["reason"] = "the tail integral diverges"
                else:
                    wit["reason"] = "inf_B w = 0" if old else "the ball integral diverges"
                return MembershipVerdict("nonmember", which, wit, "symbolic")
    full = {desc: {"local": _fmt_order(a), "global": _fmt_order(b)} for desc, (a, b) in table.items()}
    return MembershipVerdict("member", "none", full, "symbolic")


def _exact(s: Setting, p=None) -> _Exact:
    s._need_full()
    p = s.r_conj if p is None else p
    return _Exact(s.n, s.alpha_tilde, s.delta, s.delta_tilde, p)


def check_membership_symbolic(pair: WeightPair, s: Setting, old_class: bool = False) -> MembershipVerdict:
    """Exact membership of a (piecewise) power pair.

    Every functional is reduced to its order ``T**e (log T)**k`` along the
    rays ``|x_B| = T**u, R = T**t`` that bound the sectors cut out by
    ``|x_B| = 1``, ``R = 1`` and ``|x_B| = R``, plus one interior ray per
    sector and the centred limits.  The pair is a member iff every order is
    bounded.  ``old_class=True`` tests the older class that normalises by
    ``inf_B w`` instead of ``w(B)/|B|``.
    """
    if pair.n != s.n:
        raise ValueError("pair and setting have different dimensions")
    return _decide(_exact(s), pair.w, pair.v, old_class)


def scaling_exponent(pair: WeightPair, s: Setting) -> Fraction:
    """``e`` with ``H(B(lam x, lam R)) = lam**e H(B(x, R))`` for pure power pairs."""
    if not pair.is_pure_power:
        raise TypeError("scaling covariance needs two pure power weights")
    return s.alpha_tilde - s.delta_tilde - s.n * s.inv_r + pair.v.exponent - pair.w.exponent


# ---------------------------------------------------------------------------
# sampled membership
# ---------------------------------------------------------------------------

def _slope(x, y):
    x, y = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    ok = np.isfinite(y)
    if ok.sum() < 2:
        return 0.0
    return float(np.polyfit(x[ok], y[ok], 1)[0])


def _evaluate_plan(pair, P, balls, M, rtol, executor):
    def one(B):
        loc = _local(pair, P, B, rtol)
        glob = _global(pair, P, B, M, rtol)
        h = _h(pair, P, B, M, rtol)
        return loc, glob, h

    mapper = executor.map if executor is not None else map
    return list(mapper(one, balls))


def check_membership_numeric(pair: WeightPair, s: Setting, plan: BallSamplePlan | None = None,
                             M: float | None = None, slope_threshold: float = SLOPE_THRESHOLD,
                             rtol: float = 1e-8, executor=None, _p=None) -> MembershipVerdict:
    """Sampled membership check over a ball plan.

    The verdict is ``nonmember-consistent`` when a tail integral diverges or
    the largest functional at a given radius grows with log-log slope beyond
    ``slope_threshold`` as ``R -> 0``, ``R -> inf`` or ``|x_B| -> inf``; it
    is ``member-consistent`` otherwise.  The failing condition is ``local``
    when the local functional already grows, else ``global``.
    """
    P = _params(s, _p)
    plan = plan or BallSamplePlan(n=pair.n)
    if plan.n != pair.n:
        raise ValueError("plan and pair have different dimensions")
    if isinstance(pair.v, ZeroWeight):
        return MembershipVerdict("member-consistent", "none", {"note": "H vanishes identically"},
                                 "numeric", 0.0)
    try:
        _check_v_local(pair, P)
    except LocalIntegrabilityError as exc:
        return MembershipVerdict("nonmember-consistent", "local-integrability",
                                 {"regime": "near a singular point", "reason": str(exc)}, "numeric")
    balls = plan.balls(symmetric=pair.radial)
    res = _evaluate_plan(pair, P, balls, M, rtol, executor)
    radii = plan.radii()
    nr = len(radii)
    k = len(balls) // nr
    L = np.array([r[0] for r in res]).reshape(nr, k)
    G = np.array([r[1].value for r in res]).reshape(nr, k)
    H = np.array([r[2].value for r in res]).reshape(nr, k)
    gdiv = [i for i, r in enumerate(res) if r[1].divergent or r[2].divergent]
    rho = np.array([b.center_norm for b in balls[:k]])
    per_dec = max(1, int(round((nr - 1) / math.log10(radii[-1] / radii[0]))))
    m = min(nr, per_dec + 1)

    def blowups(F):
        S = F.max(axis=1)
        found = []
        lo, hi = _slope(radii[:m], S[:m]), _slope(radii[-m:], S[-m:])
        if lo < -slope_threshold:
            found.append(("R -> 0", lo))
        if hi > slope_threshold:
            found.append(("R -> inf", hi))
        order = np.argsort(rho)
        top = order[-3:]
        for i, R in enumerate(radii):
            if len(top) >= 2 and np.all(rho[top] >= 4 * R):
                sl = _slope(rho[top], F[i, top])
                if sl > slope_threshold:
                    found.append((f"|x_B| -> inf at R = {R:.3g}", sl))
                    break
        return found

    sup_h = math.inf if gdiv else float(np.max(H))
    bl = blowups(L)
    if bl:
        d, sl = bl[0]
        return MembershipVerdict("nonmember-consistent", "local",
                                 {"regime": d, "functional": "local", "fitted_slope": sl}, "numeric", sup_h)
    if gdiv:
        B = balls[gdiv[0]]
        tail = res[gdiv[0]][1]
        return MembershipVerdict("nonmember-consistent", "global",
                                 {"regime": "tail truncation M -> inf", "functional": "global",
                                  "ball": B.to_dict(), "tail_order": tail.tail_order}, "numeric", sup_h)
    bg = blowups(G) or blowups(H)
    if bg:
        d, sl = bg[0]
        return MembershipVerdict("nonmember-consistent", "global",
                                 {"regime": d, "functional": "global", "fitted_slope": sl}, "numeric", sup_h)
    S = H.max(axis=1)
    wit = {"slope_small_R": _slope(radii[:m], S[:m]), "slope_large_R": _slope(radii[-m:], S[-m:]),
           "balls": len(balls)}
    return MembershipVerdict("member-consistent", "none", wit, "numeric", sup_h)


PERTURBATION_NOTE = ("the perturbed class is read as H((r't)') throughout; the reading H((r't')') "
                     "is not implemented")


def perturbed_membership(pair: WeightPair, s: Setting, t) -> MembershipVerdict:
    """Membership in the class with ``r`` replaced by the conjugate of ``r' t``.

    The norm exponent becomes ``r' t``; values below 1 are allowed (then the
    formal ``1/r = 1 - 1/(r' t)`` is negative).  Power pairs are decided
    exactly; other pairs need ``r' t >= 1`` and use the sampled check.
    """
    t = to_fraction(t)
    if t <= 0:
        raise ValueError("t must be positive")
    s._need_full()
    p = s.r_conj if is_inf(s.r_conj) else s.r_conj * t
    if pair.is_power_pair:
        v = _decide(_exact(s, p), pair.w, pair.v)
    else:
        if not is_inf(p) and p < 1:
            raise ValueError("the sampled check needs r' t >= 1")
        v = check_membership_numeric(pair, s, _p=p)
    return MembershipVerdict(v.status, v.failing_condition, v.witness, v.method, v.sup_estimate,
                             v.notes + (PERTURBATION_NOTE,))


# ---------------------------------------------------------------------------
# constant diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantEstimate:
    """Sup of a ratio over a plan, with the per-radius maxima kept."""

    sup: float
    radii: tuple = ()
    sup_by_radius: tuple = ()
    failure: str | None = None

    @property
    def finite(self) -> bool:
        return self.failure is None and math.isfinite(self.sup)

    def decade_sups(self) -> tuple[float, float]:
        """Sups over the smallest and the largest decade of radii."""
        r = np.asarray(self.radii)
        v = np.asarray(self.sup_by_radius)
        return float(v[r <= r[0] * 10 * (1 + 1e-12)].max()), float(v[r >= r[-1] / 10 * (1 - 1e-12)].max())

    def to_dict(self):
        return {"sup": self.sup, "failure": self.failure,
                "radii": list(self.radii), "sup_by_radius": list(self.sup_by_radius)}


def _over_plan(ratio, plan: BallSamplePlan, symmetric: bool, executor=None) -> ConstantEstimate:
    balls = plan.balls(symmetric=symmetric)
    mapper = executor.map if executor is not None else map
    vals = np.array(list(mapper(ratio, balls)), dtype=float)
    radii = plan.radii()
    per = vals.reshape(len(radii), -1).max(axis=1)
    return ConstantEstimate(float(vals.max()), tuple(radii.tolist()), tuple(per.tolist()))


def double_ball_check(pair: WeightPair, s: Setting, plan: BallSamplePlan | None = None,
                      rtol: float = DEFAULT_RTOL, executor=None) -> ConstantEstimate:
    """Sup over the plan of ``||v chi_2B||_{r'} |B|**((at - dt)/n) / w(B)``."""
    P = _params(s)
    plan = plan or BallSamplePlan(n=pair.n)
    if isinstance(pair.v, ZeroWeight):
        return _over_plan(lambda B: 0.0, plan, True)
    try:
        _check_v_local(pair, P)
    except LocalIntegrabilityError as exc:
        return ConstantEstimate(math.inf, failure=str(exc))
    n = pair.n

    def ratio(B):
        B2 = B.dilate(2.0)
        if math.isinf(P.p):
            norm, _ = _sup_search(lambda y: pair.v.values(y, n), B2, 0.0, B2.radius, pair.v.breaks())
        else:
            norm = weight_mass(pair.v, B2, P.p, rtol) ** (1.0 / P.p)
        return norm * measure(B) ** ((P.alpha_tilde - P.delta_tilde) / n) / weight_mass(pair.w, B, 1.0, rtol)

    return _over_plan(ratio, plan, pair.radial, executor)


def reverse_holder_check(w: Weight, exponent, plan: BallSamplePlan | None = None,
                         rtol: float = DEFAULT_RTOL, executor=None) -> ConstantEstimate:
    """Sup of ``(mean_B w**q)**(1/q) / mean_B w`` over the plan; ``q = inf`` uses ``sup_B w``."""
    plan = plan or BallSamplePlan()
    n = plan.n
    q = math.inf if is_inf(exponent) or exponent == "inf" else float(exponent)
    if q < 1:
        raise ValueError("reverse Hoelder exponent must be >= 1")
    for _, e in w.singularities(n, 1.0 if math.isinf(q) else q):
        if (math.isinf(q) and e < 0) or (not math.isinf(q) and e <= -n):
            return ConstantEstimate(math.inf, failure=f"{w!r}^{q:g} is not locally integrable")

    def ratio(B):
        mean = weight_mass(w, B, 1.0, rtol) / measure(B)
        if math.isinf(q):
            top, _ = _sup_search(lambda y: w.values(y, n), B, 0.0, B.radius, w.breaks())
        else:
            top = (weight_mass(w, B, q, rtol) / measure(B)) ** (1.0 / q)
        return top / mean

    return _over_plan(ratio, plan, w.radial, executor)


def doubling_check(w: Weight, plan: BallSamplePlan | None = None, power: float = 1.0,
                   rtol: float = DEFAULT_RTOL, executor=None) -> ConstantEstimate:
    """Sup of ``w**power(2B) / w**power(B)`` over the plan."""
    plan = plan or BallSamplePlan()
    n = plan.n
    if is_inf(power):
        raise ValueError("doubling of w**inf is not defined")
    power = float(power)
    for _, e in w.singularities(n, power):
        if e <= -n:
            return ConstantEstimate(math.inf, failure=f"{w!r}^{power:g} is not locally integrable")

    def ratio(B):
        return weight_mass(w, B.dilate(2.0), power, rtol) / weight_mass(w, B, power, rtol)

    return _over_plan(ratio, plan, w.radial, executor)


# ---------------------------------------------------------------------------
# catalog of explicit pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    """A named pair with its expected verdict, or the reason it is absent."""

    name: str
    pair: WeightPair | None
    expected: str | None  # "member" or "nonmember"
    failing_condition: str = "none"
    provenance: str = ""
    parameters: dict = field(default_factory=dict)
    omitted_reason: str | None = None

    @property
    def available(self) -> bool:
        return self.pair is not None

    def to_dict(self):
        return {"name": self.name, "pair": None if self.pair is None else self.pair.to_dict(),
                "expected": self.expected, "failing_condition": self.failing_condition,
                "provenance": self.provenance,
                "parameters": {k: str(v) for k, v in self.parameters.items()},
                "omitted_reason": self.omitted_reason}


def _pw(a):
    return PowerWeight(a)


def _omit(name, reason, provenance=""):
    return CatalogEntry(name, None, None, provenance=provenance, omitted_reason=reason)


def _tooth(s, n, at, d, dt, ir):
    name, prov = "power_tooth", "two-weight power pairs, case i: w=|x|^(k delta), v=|x|^(n/r-at+dt+k delta)"
    if is_inf(s.r) is False and s.r == 1:
        return _omit(name, "needs r > 1", prov)
    k = max(1, math.floor((at - n - dt) / d) + 1)
    lo, hi = at - n - k * d, min(at - n * ir - k * d, at - n - (k - 1) * d)
    if not lo < dt <= hi:
        return _omit(name, f"delta_tilde outside every window ({lo}, {hi}] of this family", prov)
    return CatalogEntry(name, WeightPair(_pw(k * d), _pw(n * ir - at + dt + k * d), n), "member",
                        provenance=prov, parameters={"k": k})


def _triangle(s, n, at, d, dt, ir):
    name = "power_triangle"
    prov = "two-weight power pairs, case ii: w=|x|^theta, v=|x|^beta, theta=at-n/r-k delta-2 dt, beta=-k delta-dt"
    if s.r == 1 or is_inf(s.r):
        return _omit(name, "needs 1 < r < inf", prov)
    k = 0
    while at - n - k * d >= dt:
        if at - n * ir - (k + 1) * d < dt:
            theta = at - n * ir - k * d - 2 * dt
            beta = -k * d - dt
            if -dt - theta + beta - n * ir + at != 0:
                return _omit(name, "exponent identity fails", prov)
            if not theta > 0:
                return _omit(name, f"theta = {theta} is not positive", prov)
            return CatalogEntry(name, WeightPair(_pw(theta), _pw(beta), n), "member", provenance=prov,
                                parameters={"k": k, "theta": theta, "beta": beta})
        k += 1
    return _omit(name, "delta_tilde outside every window of this family (needs n/r' < delta)", prov)


def _endpoint_r1(s, n, at, d, dt, ir):
    name, prov = "endpoint_r1", "r = 1 pair w=|x|^(-dt), v=|x|^(n-at)"
    if s.r != 1:
        return _omit(name, "needs r = 1", prov)
    if not dt < at - n:
        return _omit(name, "needs delta_tilde < alpha_tilde - n", prov)
    return CatalogEntry(name, WeightPair(_pw(-dt), _pw(n - at), n), "member", provenance=prov)


def _constant_r1(s, n, at, d, dt, ir):
    name, prov = "constant_r1", "w = v = 1 at r = 1, delta_tilde = alpha_tilde - n"
    if s.r != 1 or dt != at - n:
        return _omit(name, "needs r = 1 and delta_tilde = alpha_tilde - n", prov)
    return CatalogEntry(name, WeightPair(_pw(0), _pw(0), n), "member", provenance=prov)


def _unweighted(s, n, at, d, dt, ir):
    name, prov = "unweighted_w", "older-class pair (1, |x|^-theta), theta = at - n/r - dt"
    if s.r == 1 or is_inf(s.r):
        return _omit(name, "needs 1 < r < inf", prov)
    if not (at - n < dt <= at - n * ir < d):
        return _omit(name, "needs alpha_tilde - n < delta_tilde <= alpha_tilde - n/r < delta", prov)
    theta = at - n * ir - dt
    return CatalogEntry(name, WeightPair(_pw(0), _pw(-theta), n), "member", provenance=prov,
                        parameters={"theta": theta})


def _two_power(s, n, at, d, dt, ir):
    name = "two_power_old_class"
    prov = "older-class pair (|x|^-beta, |x|^-theta), beta = theta + delta - at + n/r"
    if s.r == 1 or is_inf(s.r):
        return _omit(name, "needs 1 < r < inf", prov)
    if not d < at - n * ir:
        return _omit(name, "needs delta < alpha_tilde - n/r", prov)
    if dt != d:
        return _omit(name, "only delta_tilde = delta works: the local exponent is delta - delta_tilde", prov)
    lo, hi = at - n * ir - d, n * (1 - ir)
    theta = (lo + hi) / 2
    beta = theta + d - at + n * ir
    return CatalogEntry(name, WeightPair(_pw(-beta), _pw(-theta), n), "member", provenance=prov,
                        parameters={"theta": theta, "beta": beta})


def _local_not_global(s, n, at, d, dt, ir):
    prov = "pairs meeting the local but not the global condition"
    if s.r == 1:
        reason = "needs r > 1 (for r = 1 the global supremum stays bounded)"
        return [_omit(f"local_not_global_{i}", reason, prov) for i in (1, 2, 3)]
    k0 = at - n * ir
    out = []
    if dt == d < k0:
        out.append(CatalogEntry("local_not_global_1", WeightPair(_pw(0), _pw(n * ir - at + d), n), "nonmember",
                                "global", prov))
    else:
        out.append(_omit("local_not_global_1", "needs delta_tilde = delta < alpha_tilde - n/r", prov))
    if dt < d <= k0:
        out.append(CatalogEntry("local_not_global_2", WeightPair(_pw(k0 - dt), _pw(0), n), "nonmember",
                                "global", prov))
    else:
        out.append(_omit("local_not_global_2", "needs delta_tilde < delta <= alpha_tilde - n/r", prov))
    if dt <= k0 <= d and not dt == k0 == d:
        p = s.r_conj
        floor_ = n * ir - at + d
        if not is_inf(p):
            floor_ = max(floor_, -n / p)
        theta = floor_ + Fraction(1, 4)
        beta = theta + k0 - dt
        out.append(CatalogEntry("local_not_global_3", WeightPair(_pw(beta), _pw(theta), n), "nonmember",
                                "global", prov, {"theta": theta, "beta": beta}))
    else:
        out.append(_omit("local_not_global_3", "needs delta_tilde <= alpha_tilde - n/r <= delta", prov))
    return out


def _piecewise(s, n, at, d, dt, ir):
    name = "piecewise_strict_inclusion"
    prov = "w = |x|^theta inside the unit ball, |x|^(theta+dt) outside, v = |x|^dt"
    if s.r == 1 or is_inf(s.r):
        return _omit(name, "needs n/alpha_tilde < r < n/(alpha_tilde - delta)", prov)
    if not (at > 0 and Fraction(n) / at < s.r and (at - d <= 0 or s.r < Fraction(n) / (at - d))):
        return _omit(name, "needs n/alpha_tilde < r < n/(alpha_tilde - delta)", prov)
    k0 = at - n * ir
    if not dt < min(k0, n * ir - at + d):
        return _omit(name, "needs delta_tilde < min(alpha_tilde - n/r, n/r - alpha_tilde + delta)", prov)
    lo = max(max(2 * k0 - d, Fraction(0)), k0 - dt)
    hi = k0
    lo_open = k0 - dt >= max(2 * k0 - d, Fraction(0))
    if hi < lo or (lo_open and hi == lo):
        return _omit(name, "no admissible theta for this delta_tilde", prov)
    theta = dt if (lo < dt <= hi or (not lo_open and lo == dt)) else (lo + hi) / 2
    return CatalogEntry(name, WeightPair(PiecewisePower(theta, theta + dt), _pw(dt), n), "member",
                        provenance=prov + "; not in the older class", parameters={"theta": theta})


def _generic(s, n, at, d, dt, ir):
    name, prov = "generic_power", "power pair built from the exact criterion"
    k = at - dt - n * ir
    if s.r == 1:
        b = (n - at + d) / 2
        return CatalogEntry(name, WeightPair(_pw(b + k), _pw(b), n), "member", provenance=prov,
                            parameters={"b": b})
    lo = max(n * ir - n, -n - k)
    hi = n * ir - at + d
    b = (lo + hi) / 2
    return CatalogEntry(name, WeightPair(_pw(b + k), _pw(b), n), "member", provenance=prov,
                        parameters={"b": b})


_BUILDERS = (_tooth, _triangle, _endpoint_r1, _constant_r1, _unweighted, _two_power, _local_not_global,
             _piecewise, _generic)


def catalog(s: Setting) -> list[CatalogEntry]:
    """Explicit pairs available at ``s`` (absent ones carry ``omitted_reason``).

    Outside the nontrivial region only the zero weight works, so the list
    holds a single omitted entry explaining why.
    """
    region = classify_region(s)
    if region.tag in (TRIVIAL, CORNER):
        return [_omit("all", f"{region.tag}: {region.reason}")]
    n, at, d, dt, ir = s.n, s.alpha_tilde, s.delta, s.delta_tilde, s.inv_r
    out: list[CatalogEntry] = []
    for build in _BUILDERS:
        e = build(s, n, at, d, dt, ir)
        out.extend(e if isinstance(e, list) else [e])
    return out
