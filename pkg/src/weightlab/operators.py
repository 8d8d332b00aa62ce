"""Kernels, Lipschitz symbols and the commutators ``T^m_{alpha,b}``.

    T^m_{alpha,b} f(x) = int (b(x) - b(y))**m K(x - y) f(y) dy

for compactly supported ``f``.  In one dimension the integral is computed in
shifted coordinates ``t = y - x`` so the kernel singularity sits exactly at
``t = 0``; many evaluation points are processed in one vectorised pass.
With ``m = 0`` and ``alpha = 0`` the integral is a principal value.

The two proof lemmas (tail and local estimates) are exposed as runnable
inequality checks returning both sides.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import (LEVELS, SMOOTH_LEVELS, Ball, QuadratureSpec, ToleranceNotMet, _levels,
                       graded_rule, integrate, integrate_interval, measure)
from .norms import FixedRule, SampledFunction, lr_norm, seminorm
from .params import Setting, is_inf
from .weights import BallSamplePlan, WeightPair, weight_mass

__all__ = [
    "Kernel", "FractionalKernel", "HilbertKernel", "CustomKernel", "KernelError", "SizeReport",
    "SmoothnessReport", "check_size", "check_smoothness", "Symbol", "CommutatorSpec",
    "PrincipalValueWarning", "apply_commutator", "apply_operator", "LemmaCheck", "tail_lemma_check",
    "local_lemma_check", "g_family", "test_function", "theorem_plan", "theorem_ratio",
]

SIZE_SAMPLES = 10_000
SMOOTH_TOL = 1.01
SYMBOL_RTOL = 1e-9
KINK_LEVELS = 16
_CHUNK = 256


class KernelError(ValueError):
    """A kernel or symbol fails its declared bound; ``witness`` holds the sample."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PrincipalValueWarning(RuntimeWarning):
    """The principal value was requested where ``f`` is not smooth."""


def _norm(z, n):
    z = np.asarray(z, dtype=float)
    return np.abs(z) if n == 1 else np.hypot(z[..., 0], z[..., 1])


def _random_dirs(rng, k, n):
    if n == 1:
        return rng.choice([-1.0, 1.0], size=k)
    th = rng.uniform(0, 2 * np.pi, size=k)
    return np.stack([np.cos(th), np.sin(th)], axis=-1)


def _scale_dirs(mag, dirs, n):
    return mag * dirs if n == 1 else mag[:, None] * dirs


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SizeReport:
    ok: bool
    ratio: float
    witness: object

    def to_dict(self):
        w = self.witness
        return {"ok": self.ok, "ratio": self.ratio, "witness": None if w is None else np.asarray(w).tolist()}


@dataclass(frozen=True)
class SmoothnessReport:
    ok: bool
    estimate: float
    declared: float
    witness: tuple | None  # (x, x', y)

    def to_dict(self):
        wit = None if self.witness is None else [np.asarray(p).tolist() for p in self.witness]
        return {"ok": self.ok, "estimate": self.estimate, "declared": self.declared, "witness": wit}


class Kernel:
    """``K`` with size bound ``|K(z)| <= size_constant |z|**(alpha - n)`` and
    smoothness of order ``eta`` with constant ``smooth_constant``."""

    n: int
    alpha: float
    eta: float
    size_constant: float
    smooth_constant: float
    odd: bool = False
    label: str = "K"

    def __call__(self, z) -> np.ndarray:
        raise NotImplementedError

    def _verify_size(self, seed: int = 0):
        rep = check_size(self, seed=seed)
        if not rep.ok:
            raise KernelError(f"{self.label}: size bound exceeded by factor {rep.ratio:.6g}", rep.witness)

    def to_dict(self):
        return {"kind": self.label, "n": self.n, "alpha": self.alpha, "eta": self.eta}


class FractionalKernel(Kernel):
    """``|z|**(alpha - n)``, ``0 < alpha < n``."""

    def __init__(self, alpha, n: int = 1):
        alpha = float(alpha)
        if not 0 < alpha < n:
            raise KernelError(f"need 0 < alpha < n, got alpha={alpha}")
        self.n, self.alpha, self.eta = n, alpha, 1.0
        self.size_constant = 1.0
        # mean value theorem: |grad K| = (n - alpha)|z|**(alpha-n-1), evaluated at |z| >= |x-y|/2
        self.smooth_constant = 2 * (n - alpha) * 2.0 ** (n - alpha + 1)
        self.label = f"fractional({alpha:g})"
        self._verify_size()

    def __call__(self, z):
        with np.errstate(divide="ignore"):
            return _norm(z, self.n) ** (self.alpha - self.n)


class HilbertKernel(Kernel):
    """``1/z`` on the line (no ``1/pi`` factor)."""

    def __init__(self):
        self.n, self.alpha, self.eta = 1, 0.0, 1.0
        self.size_constant = 1.0
        self.smooth_constant = 8.0
        self.odd = True
        self.label = "hilbert"
        self._verify_size()

    def __call__(self, z):
        with np.errstate(divide="ignore"):
            return 1.0 / np.asarray(z, dtype=float)


class CustomKernel(Kernel):
    """User kernel with declared constants; the size bound is sampled on construction."""

    def __init__(self, func: Callable, n: int = 1, alpha: float = 0.0, eta: float = 1.0,
                 size_constant: float = 1.0, smooth_constant: float = 1.0, odd: bool = False,
                 label: str = "custom", seed: int = 0):
        if not 0 <= alpha < n:
            raise KernelError(f"need 0 <= alpha < n, got {alpha}")
        if not 0 < eta <= 1:
            raise KernelError(f"need 0 < eta <= 1, got {eta}")
        self.func = func
        self.n, self.alpha, self.eta = n, float(alpha), float(eta)
        self.size_constant, self.smooth_constant = float(size_constant), float(smooth_constant)
        self.odd, self.label = odd, label
        self._verify_size(seed)

    def __call__(self, z):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.asarray(self.func(np.asarray(z, dtype=float)), dtype=float)


def check_size(k: Kernel, samples: int = SIZE_SAMPLES, seed: int = 0) -> SizeReport:
    """Largest ``|K(z)| |z|**(n-alpha) / C`` over log-uniform ``|z|`` in ``[1e-6, 1e6]``."""
    rng = np.random.default_rng(seed)
    mag = 10.0 ** rng.uniform(-6, 6, size=samples)
    z = _scale_dirs(mag, _random_dirs(rng, samples, k.n), k.n)
    ratio = np.abs(k(z)) * mag ** (k.n - k.alpha) / k.size_constant
    i = int(np.argmax(ratio))
    worst = float(ratio[i])
    return SizeReport(worst <= 1 + 1e-9, worst, z[i])


def check_smoothness(k: Kernel, samples: int = 4000, seed: int = 0) -> SmoothnessReport:
    """Sample ``(|K(x-y) - K(x'-y)| + |K(y-x) - K(y-x')|) |x-y|**(n-alpha+eta) / |x-x'|**eta``
    over triples with ``|x - y| >= 2|x - x'|``.

    A value above ``1.01`` times the declared constant is reported as a
    failure with the offending triple.
    """
    rng = np.random.default_rng(seed)
    n = k.n
    x = _scale_dirs(10.0 ** rng.uniform(-3, 3, samples), _random_dirs(rng, samples, n), n)
    d = 10.0 ** rng.uniform(-3, 3, samples)
    h = 0.5 * d * 10.0 ** rng.uniform(-4, 0, samples)
    y = x + _scale_dirs(d, _random_dirs(rng, samples, n), n)
    xp = x + _scale_dirs(h, _random_dirs(rng, samples, n), n)
    dist = _norm(x - y, n)
    step = _norm(x - xp, n)
    ok = dist >= 2 * step
    diff = np.abs(k(x - y) - k(xp - y)) + np.abs(k(y - x) - k(y - xp))
    val = np.where(ok, diff * dist ** (n - k.alpha + k.eta) / step**k.eta, 0.0)
    i = int(np.argmax(val))
    est = float(val[i])
    bad = est > SMOOTH_TOL * k.smooth_constant
    return SmoothnessReport(not bad, est, k.smooth_constant, (x[i], xp[i], y[i]) if bad else None)


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Symbol:
    """A function ``b`` in the homogeneous Lipschitz space of order ``delta``.

    ``seminorm`` is an upper bound for ``sup |b(x)-b(y)| / |x-y|**delta``;
    it is checked on sampled pairs when the symbol is built.  ``kinks`` lists
    points (one dimension) where ``b`` is not smooth.
    """

    func: Callable = field(compare=False)
    delta: float
    seminorm: float
    n: int = 1
    label: str = "b"
    kinks: tuple = ()
    verify: bool = True

    def __post_init__(self):
        if not 0 < self.delta <= 1:
            raise KernelError(f"need 0 < delta <= 1, got {self.delta}")
        if self.verify:
            rep = self.check()
            if not rep[0]:
                raise KernelError(f"{self.label}: Lipschitz bound exceeded (ratio {rep[1]:.6g})", rep[2])

    def __call__(self, y):
        return np.asarray(self.func(np.asarray(y, dtype=float)), dtype=float)

    def check(self, samples: int = 4000, seed: int = 0):
        """``(ok, worst ratio, (x, y))`` over sampled pairs at many scales."""
        rng = np.random.default_rng(seed)
        n = self.n
        x = _scale_dirs(10.0 ** rng.uniform(-4, 4, samples), _random_dirs(rng, samples, n), n)
        d = 10.0 ** rng.uniform(-6, 4, samples)
        y = x + _scale_dirs(d, _random_dirs(rng, samples, n), n)
        lhs = np.abs(self(x) - self(y))
        rhs = self.seminorm * _norm(x - y, n) ** self.delta
        ratio = lhs / rhs
        i = int(np.argmax(ratio))
        return bool(ratio[i] <= 1 + SYMBOL_RTOL), float(ratio[i]), (x[i], y[i])

    def scaled(self, c: float) -> "Symbol":
        return Symbol(lambda y: c * self.func(y), self.delta, abs(c) * self.seminorm, self.n,
                      f"{c:g}*{self.label}", self.kinks, verify=False)

    @classmethod
    def power(cls, delta, n: int = 1) -> "Symbol":
        """``|x|**delta`` with seminorm 1."""
        d = float(delta)
        return cls(lambda y: _norm(y, n) ** d, d, 1.0, n, f"|x|^{d:g}", (0.0,) if n == 1 else ())

    @classmethod
    def sine(cls, delta, n: int = 1, freq: float = 1.0) -> "Symbol":
        """``sin(freq * x_1)``; seminorm ``2**(1-delta) freq**delta``."""
        d = float(delta)

        def b(y):
            y = np.asarray(y, dtype=float)
            return np.sin(freq * (y if n == 1 else y[..., 0]))

        return cls(b, d, 2.0 ** (1 - d) * freq**d, n, f"sin({freq:g}x)")

    def to_dict(self):
        return {"label": self.label, "delta": self.delta, "seminorm": self.seminorm}


@dataclass(frozen=True)
class CommutatorSpec:
    """Kernel, symbol and order ``m``; requires ``m delta + alpha < n``."""

    kernel: Kernel
    symbol: Symbol | None = None
    m: int = 0

    def __post_init__(self):
        if self.m < 0 or int(self.m) != self.m:
            raise ValueError("m must be a non-negative integer")
        if self.m > 0:
            if self.symbol is None:
                raise ValueError("m > 0 needs a symbol")
            if self.symbol.n != self.kernel.n:
                raise ValueError("symbol and kernel dimensions differ")
        if self.alpha_tilde >= self.kernel.n:
            raise ValueError(f"need m*delta + alpha < n, got {self.alpha_tilde}")

    @property
    def n(self) -> int:
        return self.kernel.n

    @property
    def alpha_tilde(self) -> float:
        d = self.symbol.delta if self.symbol is not None else 0.0
        return self.m * d + self.kernel.alpha

    @property
    def principal_value(self) -> bool:
        return self.m == 0 and self.kernel.alpha == 0

    @property
    def local_exponent(self) -> float:
        """Guaranteed order of the integrand at ``y = x``: ``m delta + alpha - n``."""
        return self.alpha_tilde - self.n

    @property
    def symbol_norm(self) -> float:
        return 1.0 if self.m == 0 else self.symbol.seminorm**self.m

    def with_symbol(self, symbol: Symbol) -> "CommutatorSpec":
        return CommutatorSpec(self.kernel, symbol, self.m)


# ---------------------------------------------------------------------------
# evaluation on the line
# ---------------------------------------------------------------------------

def _need_support(f: SampledFunction):
    if not math.isfinite(f.support_radius):
        raise ValueError("the commutator is evaluated for compactly supported f only")


def _special_points(spec: CommutatorSpec, f: SampledFunction) -> dict:
    """``{y: (exponent or None, levels)}`` for non-smooth points of the integrand in ``y``."""
    A = f.support_radius
    pts: dict = {}
    for p, e in f.singularities:
        p = float(np.atleast_1d(p)[0])
        old = pts.get(p, (None, 0))[0]
        pts[p] = ((old or 0.0) + e, LEVELS)
    for p in f.breaks:
        pts.setdefault(float(p), (None, KINK_LEVELS))
    if spec.m > 0:
        for p in spec.symbol.kinks:
            pts.setdefault(float(p), (None, KINK_LEVELS))
    for p in (-A, A):
        pts.setdefault(p, (None, SMOOTH_LEVELS))
    return {p: v for p, v in pts.items() if -A <= p <= A}


def _integrand(spec: CommutatorSpec, f: SampledFunction, x, t):
    """``(b(x) - b(x+t))**m K(-t) f(x+t)`` with ``x`` broadcast against ``t``."""
    y = x + t
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        val = spec.kernel(-t) * f(y)
        if spec.m > 0:
            b = spec.symbol
            val = val * (b(x) - b(y)) ** spec.m
    return val


def _x_pieces(x: float, pts: dict, A: float, e_kernel: float):
    """Pieces ``(lo, hi, e_lo, e_hi, lev_lo, lev_hi)`` in ``t`` for one ``x``."""
    tp = {p - x: v for p, v in pts.items()}
    lo_t, hi_t = -A - x, A - x
    if lo_t < 0 < hi_t or x in pts:
        own = pts.get(x, (None, 0))[0]
        tp[0.0] = (e_kernel + (own or 0.0), LEVELS)
    keys = sorted(k for k in tp if lo_t <= k <= hi_t)
    out = []
    for a, b in zip(keys[:-1], keys[1:]):
        if b <= a:
            continue
        (ea, la), (eb, lb) = tp[a], tp[b]
        half = (b - a) / 2
        la = _levels(a, half, la) if ea is not None else la
        lb = _levels(b, half, lb) if eb is not None else lb
        out.append((a, b, ea, eb, la, lb))
    return out


def _adaptive_piece(spec, f, x, a, b, ea, eb, rtol):
    g = lambda t: _integrand(spec, f, x, t)  # noqa: E731
    try:
        return integrate_interval(g, a, b, ea, eb, rtol, 0.0, 16)[0]
    except ToleranceNotMet as exc:
        warnings.warn(f"commutator at x={x}: {exc}", RuntimeWarning, stacklevel=3)
        return exc.estimate


def _eval_line(spec: CommutatorSpec, f: SampledFunction, xs: np.ndarray, rtol: float) -> np.ndarray:
    A = f.support_radius
    pts = _special_points(spec, f)
    e_k = spec.local_exponent
    out = np.zeros(len(xs))
    groups: dict = {}
    for i, x in enumerate(xs):
        for a, b, ea, eb, la, lb in _x_pieces(float(x), pts, A, e_k):
            groups.setdefault((ea, eb, la, lb), []).append((i, a, b))
    for (ea, eb, la, lb), items in groups.items():
        for s in range(0, len(items), _CHUNK):
            chunk = items[s:s + _CHUNK]
            idx = np.array([c[0] for c in chunk])
            lo = np.array([c[1] for c in chunk])[:, None]
            hi = np.array([c[2] for c in chunk])[:, None]
            L = hi - lo
            xx = xs[idx][:, None]
            ests = []
            for order, extra in ((8, 0), (12, 4)):
                xl, wl, xr, wr = graded_rule(ea, eb, order, la + extra, lb + extra)
                t = np.concatenate([lo + L * xl, hi - L * xr], axis=1)
                w = np.concatenate([L * wl, L * wr], axis=1)
                ests.append((_integrand(spec, f, xx, t) * w).sum(axis=1))
            i1, i2 = ests
            good = np.isfinite(i1) & np.isfinite(i2) & (np.abs(i2 - i1) <= rtol * np.abs(i2) + 1e-300)
            np.add.at(out, idx[good], i2[good])
            for j in np.nonzero(~good)[0]:
                out[idx[j]] += _adaptive_piece(spec, f, float(xs[idx[j]]), float(lo[j, 0]), float(hi[j, 0]),
                                               ea, eb, rtol)
    return out


def _pv_point(spec: CommutatorSpec, f: SampledFunction, x: float, rtol: float) -> float:
    """Principal value at ``x`` inside the support (``m = 0``, ``alpha = 0``).

    The part ``|t| > rho`` (``rho`` the distance to the nearest special
    point) is an ordinary integral.  The symmetric part ``eps < |t| < rho``
    is computed for ``eps = h, h/2, h/4`` and extrapolated to ``eps -> 0``
    (removing the ``eps`` and ``eps**3`` terms).
    """
    K = spec.kernel
    if not K.odd:
        raise ValueError("a principal value needs an odd kernel")
    A = f.support_radius
    pts = _special_points(spec, f)
    rho = min(abs(p - x) for p in pts)
    if rho == 0:
        warnings.warn(f"principal value at x={x}: f is not smooth there; returning a truncated value",
                      PrincipalValueWarning, stacklevel=3)
        rho = 1e-8 * max(A, abs(x))
        near = 0.0
    else:
        def sym(t):
            with np.errstate(divide="ignore", invalid="ignore"):
                return K(t) * f(x - t) + K(-t) * f(x + t)

        h = rho / 8

        def inner(eps):
            return integrate_interval(sym, eps, rho, None, None, rtol, 0.0, 16)[0]

        I1, I2, I3 = inner(h), inner(h / 2), inner(h / 4)
        R1, R2 = 2 * I2 - I1, 2 * I3 - I2
        near = (8 * R2 - R1) / 7
    far = 0.0
    spec_far = QuadratureSpec(rtol=rtol, max_subdivisions=16)
    for lo, hi in ((-A - x, -rho), (rho, A - x)):
        if hi <= lo:
            continue
        inner_pts = {p - x: v for p, v in pts.items() if lo < p - x < hi}
        cuts = sorted({lo, hi, *inner_pts})
        for a, b in zip(cuts[:-1], cuts[1:]):
            ea = inner_pts.get(a, (None,))[0]
            eb = inner_pts.get(b, (None,))[0]
            far += integrate_interval(lambda t: _integrand(spec, f, x, t), a, b, ea, eb, spec_far.rtol,
                                      0.0, spec_far.max_subdivisions)[0]
    return near + far


def _eval_plane(spec: CommutatorSpec, f: SampledFunction, x, rtol: float) -> float:
    x = np.asarray(x, dtype=float)
    A = f.support_radius
    brk = [float(np.hypot(*(np.asarray(p, dtype=float) - x))) for p, _ in f.singularities]
    brk += [float(np.hypot(*x)) + A]
    qs = QuadratureSpec(rtol=rtol, max_subdivisions=14, singularities=((x, spec.local_exponent),),
                        breaks=tuple(b for b in brk if b > 0))

    def g(y):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            val = spec.kernel(x - y) * f(y)
            if spec.m > 0:
                val = val * (spec.symbol(x) - spec.symbol(y)) ** spec.m
        return np.where(np.isfinite(val), val, 0.0)

    try:
        return float(integrate(g, Ball(np.zeros(2), A), qs))
    except ToleranceNotMet as exc:
        warnings.warn(f"commutator at x={x.tolist()}: {exc}", RuntimeWarning, stacklevel=3)
        return exc.estimate


def apply_commutator(spec: CommutatorSpec, f: SampledFunction, x, rtol: float = 1e-8):
    """``T^m_{alpha,b} f`` at ``x`` (a scalar/array on the line, a point/array of points in the plane).

    ``f`` must have finite ``support_radius``.  Returns a float for a single
    point and an array otherwise.
    """
    _need_support(f)
    if f.n != spec.n:
        raise ValueError("f and kernel dimensions differ")
    if spec.n == 2:
        pts = np.asarray(x, dtype=float)
        if pts.ndim == 1:
            return _eval_plane(spec, f, pts, rtol)
        return np.array([_eval_plane(spec, f, p, rtol) for p in pts.reshape(-1, 2)]).reshape(pts.shape[:-1])
    xs = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xs).ravel()
    if spec.principal_value:
        A = f.support_radius
        inside = np.abs(flat) < A
        out = np.empty(len(flat))
        if np.any(~inside):
            out[~inside] = _eval_line(spec, f, flat[~inside], rtol)
        for i in np.nonzero(inside)[0]:
            out[i] = _pv_point(spec, f, float(flat[i]), rtol)
    else:
        out = _eval_line(spec, f, flat, rtol)
    return float(out[0]) if xs.ndim == 0 else out.reshape(xs.shape)


def apply_operator(kernel: Kernel, f: SampledFunction, x, rtol: float = 1e-8):
    """``T_alpha f``: the ``m = 0`` commutator, through the same code path."""
    return apply_commutator(CommutatorSpec(kernel, None, 0), f, x, rtol)


# ---------------------------------------------------------------------------
# lemma checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LemmaCheck:
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else math.inf

    def to_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio}


def _line_only(spec):
    if spec.n != 1:
        raise NotImplementedError("lemma checks are implemented on the line")


def _dt(s: Setting) -> float:
    s._need_full()
    return float(s.delta_tilde)


def tail_lemma_check(spec: CommutatorSpec, pair: WeightPair, s: Setting, B: Ball, f: SampledFunction,
                     x: float, y: float, rtol: float = 1e-9) -> LemmaCheck:
    """Tail estimate for ``x, y`` in ``B``.

    lhs: ``int_{(2B)^c} |b(x)-b(z)|**m |K(x-z) - K(y-z)| |f(z)| dz``;
    rhs: ``||b||**m w(B) |B|**(dt/n - 1) ||f/v||_r``.
    """
    _line_only(spec)
    _need_support(f)
    xb, R = B.center[0], B.radius
    if abs(x - xb) > R or abs(y - xb) > R:
        raise ValueError("x and y must lie in B")
    K = spec.kernel

    def g(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.abs(K(x - z) - K(y - z)) * np.abs(f(z))
            if spec.m > 0:
                val = val * np.abs(spec.symbol(x) - spec.symbol(z)) ** spec.m
        return val

    A = f.support_radius
    pts = _special_points(spec, f)
    sing = {p: v[0] for p, v in pts.items() if v[0] is not None}
    lhs = 0.0
    for lo, hi in ((-A, xb - 2 * R), (xb + 2 * R, A)):
        if hi <= lo:
            continue
        cuts = sorted({lo, hi, *[p for p in pts if lo < p < hi]})
        for a, b in zip(cuts[:-1], cuts[1:]):
            lhs += integrate_interval(g, a, b, sing.get(a), sing.get(b), rtol, 0.0, 16)[0]
    rhs = (spec.symbol_norm * weight_mass(pair.w, B) * measure(B) ** (_dt(s) - 1)
           * lr_norm(f, pair.v, _r(s)))
    return LemmaCheck(float(lhs), float(rhs))


def _r(s: Setting):
    return math.inf if is_inf(s.r) else float(s.r)


def _restrict(f: SampledFunction, B: Ball) -> SampledFunction:
    """``f * indicator(B)`` as a sampled function."""
    xb, R = B.center[0], B.radius
    sup = min(f.support_radius, abs(xb) + R)
    inside = [p for p in (xb - R, xb + R) if abs(p) < sup]
    sing = tuple((p, e) for p, e in f.singularities if abs(float(np.atleast_1d(p)[0]) - xb) <= R)
    return SampledFunction(lambda y: np.where(np.abs(np.asarray(y) - xb) <= R, f(y), 0.0), 1, sup, sing,
                           tuple(f.breaks) + tuple(inside), f"{f.label}*chi")


def local_lemma_check(spec: CommutatorSpec, pair: WeightPair, s: Setting, B: Ball, f: SampledFunction,
                      rule: FixedRule | None = None, rtol: float = 1e-8) -> LemmaCheck:
    """Local estimate.

    lhs: ``(1/w(B)) int_B |T(f chi_{2B})|``; rhs: ``||b||**m |B|**(dt/n) ||f/v||_r``.
    """
    _line_only(spec)
    _need_support(f)
    f2 = _restrict(f, B.dilate(2))
    rule = rule or FixedRule(panels=16, order=8)
    special = list(_special_points(spec, f2))
    nodes, wts = rule.nodes(B, special)
    vals = apply_commutator(spec, f2, nodes, rtol)
    lhs = float(np.dot(wts, np.abs(vals))) / weight_mass(pair.w, B)
    rhs = spec.symbol_norm * measure(B) ** _dt(s) * lr_norm(f, pair.v, _r(s))
    return LemmaCheck(lhs, float(rhs))


# ---------------------------------------------------------------------------
# the boundedness experiment
# ---------------------------------------------------------------------------

def g_family(count: int = 5, seed: int = 0) -> list[Callable]:
    """Smooth, seeded profiles on ``[-1, 1]``: a constant plus two cosine modes and a slope."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        c = rng.normal(size=4)
        ph = rng.uniform(0, 2 * np.pi, size=2)

        def g(u, c=c, ph=ph):
            u = np.asarray(u, dtype=float)
            return 1.5 + c[0] * np.cos(np.pi * u + ph[0]) + 0.5 * c[1] * np.cos(2 * np.pi * u + ph[1]) \
                + 0.5 * c[2] * u + 0.25 * c[3]

        out.append(g)
    return out


def test_function(v, g: Callable, A: float, n: int = 1) -> SampledFunction:
    """``f = v * g(y/A)`` on ``|y| <= A`` (zero outside)."""
    sing = tuple(v.singularities(n, 1.0))
    brk = tuple(v.breaks()) if n == 2 else tuple(x for b in v.breaks() for x in (-b, b))

    def f(y):
        y = np.asarray(y, dtype=float)
        u = y / A if n == 1 else y[..., 0] / A
        with np.errstate(divide="ignore", invalid="ignore"):
            return v.values(y, n) * g(u)

    return SampledFunction(f, n, float(A), sing, brk, f"v*g(./{A:g})")


test_function.__test__ = False  # not a pytest test


def theorem_plan(A: float, n: int = 1) -> BallSamplePlan:
    """Balls scaled with the support radius ``A``."""
    return BallSamplePlan(n=n, r_min=A / 64, r_max=4 * A, n_radii=9, c_min=A / 8, c_max=2 * A, n_centers=5)


def theorem_ratio(spec: CommutatorSpec, pair: WeightPair, s: Setting, f: SampledFunction,
                  plan: BallSamplePlan | None = None, rule: FixedRule | None = None,
                  rtol: float = 1e-8) -> float:
    """``sup_B osc(T f) / (||b||**m ||f/v||_r)`` with oscillation exponent ``dt/n``."""
    plan = plan or theorem_plan(f.support_radius, spec.n)
    rule = rule or FixedRule(panels=12, order=6)
    pts = tuple(_special_points(spec, f))
    Tf = SampledFunction(lambda y: apply_commutator(spec, f, y, rtol), spec.n, math.inf, (), pts, "Tf")
    osc = seminorm(Tf, pair.w, _dt(s) / spec.n, plan, rule=rule)
    return osc.sup / (spec.symbol_norm * lr_norm(f, pair.v, _r(s)))
