"""Balls, dyadic dilates and the quadrature backend.

All integrals in the package go through the graded Gauss rules defined here.
A rule on ``[a, b]`` is geometrically refined toward both endpoints; an
endpoint carrying an algebraic singularity ``|t - a|**e`` gets a Gauss-Jacobi
innermost cell, which is exact for ``|t - a|**e`` times a polynomial.
Integrands are expected to be vectorised (they receive numpy arrays).

Dimensions 1 and 2 are supported.  In the plane, integrals are taken in polar
coordinates about one chosen point (the annotated singularity, if any).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

__all__ = [
    "Ball", "Annulus", "Complement", "DyadicFamily", "QuadratureSpec", "TailIntegral",
    "ToleranceNotMet", "DivergentIntegral", "measure", "power_integral",
    "power_integral_order", "PowerOrder", "dyadic_split", "integrate", "integrate_interval",
    "graded_rule", "batch_rule", "rule_nodes", "fit_tail",
]


class ToleranceNotMet(RuntimeError):
    """Refinement stopped before the requested tolerance was reached."""

    def __init__(self, message, estimate, error):
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error!r})")
        self.estimate = estimate
        self.error = error


class DivergentIntegral(ValueError):
    """The requested integral is infinite."""


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __init__(self, center, radius):
        c = tuple(float(v) for v in np.atleast_1d(np.asarray(center, dtype=float)))
        if len(c) not in (1, 2):
            raise ValueError("only dimensions 1 and 2 are supported")
        if not radius > 0 or not math.isfinite(radius):
            raise ValueError(f"radius must be positive and finite, got {radius!r}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(radius))

    @property
    def n(self) -> int:
        return len(self.center)

    @property
    def center_norm(self) -> float:
        return math.hypot(*self.center) if self.n == 2 else abs(self.center[0])

    def dilate(self, factor: float) -> "Ball":
        return Ball(self.center, self.radius * factor)

    def scale(self, lam: float) -> "Ball":
        """Image under ``x -> lam * x``."""
        return Ball(tuple(lam * c for c in self.center), lam * self.radius)

    def contains(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.n == 1:
            return np.abs(y - self.center[0]) < self.radius
        return np.hypot(y[..., 0] - self.center[0], y[..., 1] - self.center[1]) < self.radius

    def to_dict(self):
        return {"center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Annulus:
    """``{inner <= |y - center| < outer}``."""

    center: tuple
    inner: float
    outer: float

    def __init__(self, center, inner, outer):
        c = tuple(float(v) for v in np.atleast_1d(np.asarray(center, dtype=float)))
        if not 0 <= inner < outer:
            raise ValueError("need 0 <= inner < outer")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "inner", float(inner))
        object.__setattr__(self, "outer", float(outer))

    @property
    def n(self):
        return len(self.center)


@dataclass(frozen=True)
class Complement:
    """The complement of ``ball``, integrated out to ``|y - x_B| < truncation``.

    ``truncation`` defaults to ``2**40`` times the radius.
    """

    ball: Ball
    truncation: float | None = None

    @property
    def n(self):
        return self.ball.n

    @property
    def outer(self) -> float:
        return self.truncation if self.truncation is not None else 2.0**40 * self.ball.radius


@dataclass(frozen=True)
class QuadratureSpec:
    rtol: float = 1e-8
    atol: float = 0.0
    max_subdivisions: int = 12
    singularities: tuple = ()  # ((point, exponent), ...)
    breaks: tuple = ()  # 1D: points where f is merely non-smooth; 2D: radii about the polar centre

    def __post_init__(self):
        if not self.rtol > 0:
            raise ValueError("rtol must be positive")
        sing = tuple((tuple(np.atleast_1d(np.asarray(p, dtype=float)).tolist()), float(e))
                     for p, e in self.singularities)
        object.__setattr__(self, "singularities", sing)
        object.__setattr__(self, "breaks", tuple(sorted({float(b) for b in self.breaks})))

    def with_singularities(self, *sing) -> "QuadratureSpec":
        return QuadratureSpec(self.rtol, self.atol, self.max_subdivisions,
                              tuple(self.singularities) + tuple(sing), self.breaks)

    def with_breaks(self, *points) -> "QuadratureSpec":
        return QuadratureSpec(self.rtol, self.atol, self.max_subdivisions,
                              self.singularities, tuple(self.breaks) + tuple(points))


@dataclass(frozen=True)
class DyadicFamily:
    """The dilates ``2**i B`` of a base ball, with the split index ``N_1``."""

    base: Ball

    def member(self, i: int) -> Ball:
        return self.base.dilate(2.0**i)

    @property
    def split_index(self) -> int:
        return dyadic_split(self.base)

    def annulus(self, i: int) -> Annulus:
        """``2**(i+1) B minus 2**i B``."""
        return Annulus(self.base.center, 2.0**i * self.base.radius, 2.0**(i + 1) * self.base.radius)


def measure(B: Ball) -> float:
    return 2.0 * B.radius if B.n == 1 else math.pi * B.radius**2


def dyadic_split(B: Ball) -> int:
    """The ``N_1`` with ``2**N_1 R <= |x_B| < 2**(N_1+1) R``."""
    rho, R = B.center_norm, B.radius
    if rho <= R:
        raise ValueError("dyadic split needs |x_B| > R")
    k = int(math.floor(math.log2(rho / R)))
    # guard against rounding in log2
    while 2.0**k * R > rho:
        k -= 1
    while 2.0**(k + 1) * R <= rho:
        k += 1
    return k


@dataclass(frozen=True)
class PowerOrder:
    """Order of ``int_B |x|**gamma``: ``R**r_power * |x_B|**x_power``."""

    regime: str  # "centered" or "far"
    r_power: float
    x_power: float

    def value(self, B: Ball) -> float:
        return B.radius**self.r_power * (B.center_norm**self.x_power if self.x_power else 1.0)


def power_integral_order(B: Ball, gamma: float) -> PowerOrder:
    if gamma <= -B.n:
        raise DivergentIntegral(f"|x|**{gamma} is not integrable near 0 in dimension {B.n}")
    if B.center_norm <= B.radius:
        return PowerOrder("centered", gamma + B.n, 0)
    return PowerOrder("far", B.n, gamma)


def _power_antiderivative(t, g):
    if g == -1:
        return np.sign(t) * np.log(np.abs(t))
    return np.sign(t) * np.abs(t) ** (g + 1) / (g + 1)


def power_integral(B: Ball, gamma: float, spec: QuadratureSpec | None = None) -> float:
    """``int_B |x|**gamma dx``: closed form in 1D and for centred discs.

    Off-centre discs reduce to a one-dimensional angular integral of the
    closed-form radial primitive.  Exponents ``<= -n`` are fine as long as
    the closed ball stays away from the origin.
    """
    n = B.n
    rho, R = B.center_norm, B.radius
    if gamma <= -n and rho <= R:
        raise DivergentIntegral(f"|x|**{gamma} is not integrable near 0 in dimension {n}")
    if n == 1:
        x = B.center[0]
        return float(_power_antiderivative(x + R, gamma) - _power_antiderivative(x - R, gamma))
    if rho == 0:
        return 2 * math.pi * R ** (gamma + 2) / (gamma + 2)
    spec = spec or QuadratureSpec(rtol=1e-12)
    g2 = gamma + 2

    def radial(theta):
        r1, r2 = _ray_interval(theta, rho, R)
        if g2 == 0:
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(r2 > r1, np.log(r2 / r1), 0.0)
        return (r2**g2 - r1**g2) / g2

    if rho < R:
        return _angular_integral(radial, [], spec)
    tmax = math.asin(R / rho)
    return _angular_integral(radial, [-tmax, tmax], spec, support=(-tmax, tmax))


def _ray_interval(theta, rho, R):
    """Radial extent of the disc ``B((rho, 0), R)`` along direction ``theta``."""
    bu = rho * np.cos(theta)
    disc = np.maximum(bu * bu - rho * rho + R * R, 0.0)
    sq = np.sqrt(disc)
    r1 = np.maximum(bu - sq, 0.0)
    r2 = np.maximum(bu + sq, 0.0)
    return r1, r2


# ---------------------------------------------------------------------------
# graded Gauss rules
# ---------------------------------------------------------------------------

SIGMA = 0.35
LEVELS = 32
SMOOTH_LEVELS = 6


@lru_cache(maxsize=256)
def _half_rule(exponent, order: int, levels: int):
    """Rule on ``[0, 1]`` graded toward 0, innermost cell Jacobi if ``exponent``."""
    xg, wg = roots_legendre(order)
    xs, ws = [], []
    for k in range(levels):
        a, b = SIGMA ** (k + 1), SIGMA**k
        xs.append(0.5 * (b - a) * xg + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * wg)
    h = SIGMA**levels
    if exponent is None or exponent == 0:
        xs.append(0.5 * h * (xg + 1))
        ws.append(0.5 * h * wg)
    else:
        xj, wj = roots_jacobi(order, 0.0, exponent)
        t = 0.5 * h * (xj + 1)
        xs.append(t)
        ws.append((0.5 * h) ** (exponent + 1) * wj / t**exponent)
    x, w = np.concatenate(xs), np.concatenate(ws)
    idx = np.argsort(x)
    return x[idx], w[idx]


@lru_cache(maxsize=512)
def graded_rule(e_left, e_right, order: int = 8, levels_left: int = LEVELS, levels_right: int = LEVELS):
    """Graded rule on ``[0, 1]`` split at the midpoint.

    Returns ``(xl, wl, xr, wr)``: nodes ``a + L*xl`` near the left end and
    ``b - L*xr`` near the right end (offsets keep precision near the ends).
    ``e_left``/``e_right`` are algebraic exponents at the ends.  Ends
    without an exponent are still graded, which copes with kinks and mild
    unannotated singularities there.
    """
    xl, wl = _half_rule(e_left, order, levels_left)
    xr, wr = _half_rule(e_right, order, levels_right)
    out = (0.5 * xl, 0.5 * wl, 0.5 * xr, 0.5 * wr)
    for arr in out:
        arr.setflags(write=False)
    return out


def _levels(end: float, half: float, wanted: int) -> int:
    """Grading depth toward ``end`` limited by float resolution there."""
    if end == 0 or half <= 0:
        return wanted
    floor_cell = 1e-11 * abs(end) / half
    if floor_cell >= 1:
        return 1
    cap = int(math.log(floor_cell) / math.log(SIGMA))
    return max(1, min(wanted, cap))


def rule_nodes(a, b, e_left=None, e_right=None, order=8, levels=LEVELS):
    """Nodes and weights of the graded rule on ``[a, b]`` (scalars)."""
    L = b - a
    rule = graded_rule(e_left, e_right, order, _levels(a, L / 2, levels), _levels(b, L / 2, levels))
    xl, wl, xr, wr = rule
    return np.concatenate([a + L * xl, b - L * xr]), np.concatenate([L * wl, L * wr])


def batch_rule(a, b, e_left=None, e_right=None, order=8, levels=LEVELS):
    """Map one graded rule onto many intervals at once.

    Returns ``(nodes, weights)`` of shape ``(len(a), q)``.  The caller picks
    ``levels``; no float-resolution cap is applied.
    """
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    xl, wl, xr, wr = graded_rule(e_left, e_right, order, levels, levels)
    L = b - a
    nodes = np.concatenate([a + L * xl, b - L * xr], axis=-1)
    weights = np.concatenate([L * wl, L * wr], axis=-1)
    return nodes, weights


def integrate_interval(f: Callable, a: float, b: float, e_left=None, e_right=None,
                       rtol: float = 1e-8, atol: float = 0.0, max_subdivisions: int = 12,
                       _depth: int = 0) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]`` with endpoint exponents; returns ``(value, error)``.

    The error is the difference between two rules of different order and
    depth; intervals that fail the tolerance are bisected.
    """
    if a == b:
        return 0.0, 0.0
    if b < a:
        v, e = integrate_interval(f, b, a, e_right, e_left, rtol, atol, max_subdivisions)
        return -v, e
    x1, w1 = rule_nodes(a, b, e_left, e_right, 8, LEVELS)
    x2, w2 = rule_nodes(a, b, e_left, e_right, 12, LEVELS + 8)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        i1 = float(np.dot(w1, f(x1)))
        i2 = float(np.dot(w2, f(x2)))
    if not (math.isfinite(i1) and math.isfinite(i2)):
        raise DivergentIntegral(f"non-finite integrand values on [{a}, {b}]")
    err = abs(i2 - i1)
    if err <= max(rtol * abs(i2), atol):
        return i2, err
    if _depth >= max_subdivisions:
        raise ToleranceNotMet(f"interval [{a}, {b}] did not converge", i2, err)
    m = 0.5 * (a + b)
    child = max(atol, rtol * abs(i2)) / 2
    v1, e1 = integrate_interval(f, a, m, e_left, None, rtol, child, max_subdivisions, _depth + 1)
    v2, e2 = integrate_interval(f, m, b, None, e_right, rtol, child, max_subdivisions, _depth + 1)
    return v1 + v2, e1 + e2


def _sing_1d(spec: QuadratureSpec) -> dict:
    return {p[0]: e for p, e in spec.singularities}


def _pieces_1d(a, b, spec: QuadratureSpec, sing=None):
    sing = _sing_1d(spec) if sing is None else sing
    # split points closer than float resolution of the interval would leave empty or subnormal pieces
    tol = 1e-13 * (b - a)
    pts = [a]
    for p in sorted({p for p in (*sing, *spec.breaks) if a + tol < p < b - tol}):
        if p - pts[-1] <= tol:
            if p in sing and pts[-1] not in sing and pts[-1] != a:
                pts[-1] = p
            continue
        pts.append(p)
    pts.append(b)
    return [(lo, hi, sing.get(lo), sing.get(hi)) for lo, hi in zip(pts[:-1], pts[1:])]


def _integrate_1d_segments(f, a, b, spec: QuadratureSpec):
    total, err = 0.0, 0.0
    for lo, hi, el, er in _pieces_1d(a, b, spec):
        v, e = integrate_interval(f, lo, hi, el, er, spec.rtol, spec.atol, spec.max_subdivisions)
        total += v
        err += e
    return total, err


def _integrate_1d_many(f, intervals, spec: QuadratureSpec) -> np.ndarray:
    """Integrals of ``f`` over many intervals, evaluated in batches.

    Pieces are grouped by endpoint data and pushed through two rules in one
    call of ``f`` each; pieces whose two estimates disagree are redone with
    the adaptive routine.
    """
    sing = _sing_1d(spec)
    pieces = []
    for k, (a, b) in enumerate(intervals):
        for lo, hi, el, er in _pieces_1d(a, b, spec, sing):
            lv = (_levels(lo, (hi - lo) / 2, LEVELS) if el is not None else SMOOTH_LEVELS,
                  _levels(hi, (hi - lo) / 2, LEVELS) if er is not None else SMOOTH_LEVELS)
            pieces.append((k, lo, hi, el, er, lv))
    out = np.zeros(len(intervals))
    groups: dict = {}
    for pc in pieces:
        groups.setdefault((pc[3], pc[4], pc[5]), []).append(pc)
    for (el, er, (ll, lr)), grp in groups.items():
        lo = np.array([g[1] for g in grp])[:, None]
        hi = np.array([g[2] for g in grp])[:, None]
        L = hi - lo
        vals = []
        for order, extra in ((8, 0), (12, 2 if el is None and er is None else 8)):
            xl, wl, xr, wr = graded_rule(el, er, order, ll + (extra if el is not None else 2),
                                         lr + (extra if er is not None else 2))
            nodes = np.concatenate([lo + L * xl, hi - L * xr], axis=1)
            wts = np.concatenate([L * wl, L * wr], axis=1)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                fv = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
            vals.append((fv * wts).sum(axis=1))
        i1, i2 = vals
        for j, g in enumerate(grp):
            a_, b_ = g[1], g[2]
            ok = math.isfinite(i1[j]) and math.isfinite(i2[j]) and \
                abs(i2[j] - i1[j]) <= max(spec.rtol * abs(i2[j]), spec.atol)
            if ok:
                out[g[0]] += i2[j]
            else:
                out[g[0]] += integrate_interval(f, a_, b_, el, er, spec.rtol, spec.atol,
                                                spec.max_subdivisions)[0]
    return out


# ---------------------------------------------------------------------------
# plane: polar coordinates about one point
# ---------------------------------------------------------------------------

def _angular_integral(g, kinks, spec: QuadratureSpec, support=None):
    """``int g(theta) dtheta`` over the circle (or ``support``), split at kinks.

    ``g`` is vectorised in theta.  Kinks are tangency angles where ``g`` has
    a square-root behaviour; they get a Jacobi-1/2 end cell.
    """
    if support is None:
        lo, hi = -math.pi, math.pi
        cuts = sorted({lo, hi, *[k for k in kinks if lo < k < hi]})
        kinkset = set(kinks)
    else:
        lo, hi = support
        cuts = sorted({lo, hi, *[k for k in kinks if lo < k < hi]})
        kinkset = set(kinks) | {lo, hi}
    total, err = 0.0, 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        v, e = integrate_interval(g, a, b, 0.5 if a in kinkset else None,
                                  0.5 if b in kinkset else None, spec.rtol, spec.atol,
                                  spec.max_subdivisions)
        total += v
        err += e
    return total


def _disc_span(theta, d, Rad):
    """Radial interval ``[r1, r2]`` of the disc ``|c + r u - x_B| < Rad``.

    ``d = c - x_B``.  Empty spans come back with ``r1 == r2``.
    """
    ux, uy = np.cos(theta), np.sin(theta)
    bu = ux * d[0] + uy * d[1]
    disc = bu * bu - (d[0] ** 2 + d[1] ** 2) + Rad * Rad
    sq = np.sqrt(np.maximum(disc, 0.0))
    r1 = np.clip(-bu - sq, 0.0, None)
    r2 = np.clip(-bu + sq, 0.0, None)
    r2 = np.where(disc > 0, r2, r1)
    return r1, r2


def _tangent_angles(d, Rad):
    dist = math.hypot(*d)
    if dist <= Rad or Rad == 0:
        return []
    base = math.atan2(-d[1], -d[0])
    off = math.asin(Rad / dist)
    out = []
    for t in (base - off, base + off):
        out.append((t + math.pi) % (2 * math.pi) - math.pi)
    return out


def _unit_rule(e_left, order, levels):
    xl, wl, xr, wr = graded_rule(e_left, None, order, levels, levels)
    return np.concatenate([xl, 1 - xr]), np.concatenate([wl, wr])


def _integrate_2d(f, center, inner, outer, spec: QuadratureSpec):
    """``int f`` over ``{inner <= |y - center| < outer}`` in polar coords."""
    sing = spec.singularities
    c = np.array(sing[0][0] if sing else center, dtype=float)
    e = sing[0][1] if sing else None
    d = c - np.asarray(center, dtype=float)
    kinks = _tangent_angles(d, outer) + _tangent_angles(d, inner)
    dist = math.hypot(*d)
    # a polar centre off the region never starts a ray segment
    e_rad = None if e is None or dist > outer or dist < inner else e + 1.0
    if e_rad is not None and e_rad <= -1:
        raise DivergentIntegral(f"singularity of order {e} is not integrable in the plane")
    xr, wr = _unit_rule(e_rad, 10, 28)
    xr1, wr1 = _unit_rule(None, 10, 12)

    def radial(theta):
        theta = np.atleast_1d(theta)
        r1o, r2o = _disc_span(theta, d, outer)
        if inner > 0:
            r1i, r2i = _disc_span(theta, d, inner)
        else:
            r1i = r2i = r1o
        out = np.zeros_like(theta)
        ux, uy = np.cos(theta), np.sin(theta)
        # pieces: [r1o, min(r2o, r1i)] and [max(r1o, r2i), r2o] when the inner disc is hit
        hit = (r2i > r1i) & (inner > 0)
        segs = [(r1o, np.where(hit, np.minimum(r2o, r1i), r2o)),
                (np.where(hit, np.maximum(r1o, r2i), r2o), r2o)]
        edges = (0.0, *[b for b in spec.breaks if b > 0], math.inf)
        segs = [(np.maximum(lo, e0), np.minimum(hi, e1)) for lo, hi in segs
                for e0, e1 in zip(edges[:-1], edges[1:])]
        for lo, hi in segs:
            L = np.maximum(hi - lo, 0.0)
            at_c = lo <= 0.0
            # graded toward r = 0 only when the segment starts at the polar centre
            for mask, (x, w) in ((at_c, (xr, wr)), (~at_c, (xr1, wr1))):
                if not np.any(mask & (L > 0)):
                    continue
                rr = lo[:, None] + L[:, None] * x[None, :]
                yy = np.stack([c[0] + rr * ux[:, None], c[1] + rr * uy[:, None]], axis=-1)
                val = f(yy) * rr
                contrib = (val * w[None, :]).sum(axis=1) * L
                out += np.where(mask & (L > 0), contrib, 0.0)
        return out

    return _angular_integral(radial, kinks, spec)


# ---------------------------------------------------------------------------
# public integrate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailIntegral:
    """Result of integrating over the complement of a ball.

    ``tail_order`` is the fitted growth exponent of the dyadic annulus
    contributions per doubling of the truncation (``A_i ~ 2**(tail_order * i)``);
    ``divergent`` is set when it is not clearly negative.
    """

    value: float
    tail_order: float
    divergent: bool
    contributions: tuple = field(repr=False, default=())

    @property
    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.contributions)


DIVERGENCE_SLOPE = -0.02


def fit_tail(contributions: Sequence[float], last: int = 8) -> tuple[float, bool]:
    """Slope of ``log2`` of the last annulus contributions against their index."""
    c = np.asarray(contributions, dtype=float)
    c = c[-last:]
    if len(c) < 2 or np.all(c == 0):
        return -math.inf, False
    if np.any(c <= 0):
        c = np.abs(c)
        c = c[c > 0]
        if len(c) < 2:
            return -math.inf, False
    k = np.arange(len(c))
    slope = float(np.polyfit(k, np.log2(c), 1)[0])
    return slope, slope > DIVERGENCE_SLOPE


def _integrate_region_1d(f, region, spec):
    if isinstance(region, Ball):
        x, R = region.center[0], region.radius
        return _integrate_1d_segments(f, x - R, x + R, spec)[0]
    if isinstance(region, Annulus):
        x = region.center[0]
        two = _integrate_1d_many(f, [(x - region.outer, x - region.inner),
                                     (x + region.inner, x + region.outer)], spec)
        return float(two[0] + two[1])
    raise TypeError(f"unsupported region {region!r}")


def _integrate_region(f, region, spec):
    if region.n == 1:
        return _integrate_region_1d(f, region, spec)
    if isinstance(region, Ball):
        return _integrate_2d(f, region.center, 0.0, region.radius, spec)
    if isinstance(region, Annulus):
        return _integrate_2d(f, region.center, region.inner, region.outer, spec)
    raise TypeError(f"unsupported region {region!r}")


def integrate(f: Callable, region, spec: QuadratureSpec | None = None):
    """Integrate a vectorised ``f`` over a ball, an annulus or a ball complement.

    In dimension 1 ``f`` receives a 1-d array of points; in dimension 2 an
    array of shape ``(..., 2)``.  Complements are summed over the dyadic
    annuli ``2**(i+1)B minus 2**i B`` up to the truncation and come back as a
    :class:`TailIntegral`.
    """
    spec = spec or QuadratureSpec()
    if isinstance(region, Complement):
        B = region.ball
        K = max(1, int(math.ceil(math.log2(region.outer / B.radius) - 1e-12)))
        fam = DyadicFamily(B)
        anns = [fam.annulus(i) for i in range(K)]
        anns[-1] = Annulus(B.center, anns[-1].inner, min(anns[-1].outer, region.outer))
        if B.n == 1:
            x = B.center[0]
            iv = [(x - a.outer, x - a.inner) for a in anns] + [(x + a.inner, x + a.outer) for a in anns]
            vals = _integrate_1d_many(f, iv, spec)
            contrib = [float(u + w) for u, w in zip(vals[:K], vals[K:])]
        else:
            contrib = [_integrate_region(f, a, spec) for a in anns]
        slope, div = fit_tail(contrib)
        return TailIntegral(float(math.fsum(contrib)), slope, div, tuple(contrib))
    return _integrate_region(f, region, spec)
