"""Parameter algebra for the two-weight classes H(r, alpha_tilde, delta_tilde).

A :class:`Setting` fixes the dimension, the operator parameters and the
exponents ``(r, delta_tilde)``.  :func:`classify_region` places a setting in
the ``(1/r, delta_tilde)`` plane.

Numbers are held as :class:`fractions.Fraction`.  Floats are converted through
their shortest decimal representation, so ``0.3`` becomes ``3/10``; a setting
built from floats remembers that and boundary hits within ``SNAP_TOL`` are
reported with ``snapped=True``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

Number = Union[int, float, Fraction, str]

INF = math.inf
SNAP_TOL = Fraction(1, 10**12)

NONTRIVIAL = "NontrivialAdmissible"
ONE_WEIGHT = "OneWeightBoundary"
TRIVIAL = "TrivialOnly"
CORNER = "TrivialCorner"
REGION_TAGS = (NONTRIVIAL, ONE_WEIGHT, TRIVIAL, CORNER)


class SettingError(ValueError):
    """Raised when a parameter tuple violates the admissibility constraints."""


def is_inf(x) -> bool:
    return isinstance(x, float) and math.isinf(x) and x > 0


def to_fraction(x: Number) -> Fraction:
    """Exact rational value of ``x``; floats go through ``repr``."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise SettingError(f"non-finite value {x!r} where a finite number is required")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, np.floating):
        return to_fraction(float(x))
    if isinstance(x, np.integer):
        return Fraction(int(x))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact number")


def to_exponent(r: Number):
    """Lebesgue exponent in ``[1, inf]``; ``inf`` stays the float infinity."""
    if isinstance(r, str) and r.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    if is_inf(r):
        return INF
    return to_fraction(r)


def inverse(r) -> Fraction:
    """``1/r`` with ``1/inf = 0``."""
    return Fraction(0) if is_inf(r) else 1 / Fraction(r)


def conjugate(r):
    """Conjugate exponent with ``1' = inf`` and ``inf' = 1``."""
    if is_inf(r):
        return Fraction(1)
    r = Fraction(r)
    if r == 1:
        return INF
    return r / (r - 1)


def _was_float(*xs) -> bool:
    return any(isinstance(x, (float, np.floating)) and not is_inf(x) for x in xs)


@dataclass(frozen=True)
class Setting:
    """The tuple ``(n, alpha, delta, m, eta, r, delta_tilde)``.

    ``alpha_tilde = m*delta + alpha`` and ``r_conj`` are derived.  ``r`` and
    ``delta_tilde`` may be left as ``None`` for a partial setting used to
    describe a region grid.
    """

    n: int
    alpha: Fraction
    delta: Fraction
    m: int = 0
    eta: Fraction = Fraction(1)
    r: object = None
    delta_tilde: Fraction | None = None
    from_float: bool = field(default=False, compare=False)

    def __init__(self, n, alpha, delta, m=0, eta=1, r=None, delta_tilde=None):
        set_ = object.__setattr__
        if n not in (1, 2):
            raise SettingError(f"dimension must be 1 or 2, got {n!r}")
        if int(m) != m or m < 0:
            raise SettingError(f"commutator order must be a non-negative integer, got {m!r}")
        set_(self, "n", int(n))
        set_(self, "m", int(m))
        set_(self, "alpha", to_fraction(alpha))
        set_(self, "delta", to_fraction(delta))
        set_(self, "eta", to_fraction(eta))
        set_(self, "r", None if r is None else to_exponent(r))
        set_(self, "delta_tilde", None if delta_tilde is None else to_fraction(delta_tilde))
        set_(self, "from_float", _was_float(alpha, delta, eta, r, delta_tilde))
        self._validate()

    def _validate(self):
        n, a, d, m, eta = self.n, self.alpha, self.delta, self.m, self.eta
        if not 0 <= a < n:
            raise SettingError(f"need 0 <= alpha < n, got alpha={a}")
        if not 0 < eta <= 1:
            raise SettingError(f"need 0 < eta <= 1, got eta={eta}")
        upper = eta if m == 0 else min(eta, (Fraction(n) - a) / m)
        if not 0 < d < upper:
            raise SettingError(f"need 0 < delta < {upper}, got delta={d}")
        if self.alpha_tilde >= n:
            raise SettingError("alpha_tilde = m*delta + alpha must be < n")
        if self.r is not None and not is_inf(self.r) and self.r < 1:
            raise SettingError(f"need 1 <= r <= inf, got r={self.r}")

    @property
    def alpha_tilde(self) -> Fraction:
        return self.m * self.delta + self.alpha

    @property
    def r_conj(self):
        self._need_r()
        return conjugate(self.r)

    @property
    def inv_r(self) -> Fraction:
        self._need_r()
        return inverse(self.r)

    @property
    def gamma(self) -> Fraction:
        """Decay exponent ``n - alpha_tilde + delta`` of the class kernel."""
        return self.n - self.alpha_tilde + self.delta

    def _need_r(self):
        if self.r is None:
            raise SettingError("setting has no r")

    def _need_full(self):
        self._need_r()
        if self.delta_tilde is None:
            raise SettingError("setting has no delta_tilde")

    def with_(self, **changes) -> "Setting":
        kw = dict(n=self.n, alpha=self.alpha, delta=self.delta, m=self.m, eta=self.eta,
                  r=self.r, delta_tilde=self.delta_tilde)
        kw.update(changes)
        out = Setting(**kw)
        if self.from_float:
            object.__setattr__(out, "from_float", True)
        return out

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": str(self.alpha),
            "delta": str(self.delta),
            "m": self.m,
            "eta": str(self.eta),
            "r": None if self.r is None else ("inf" if is_inf(self.r) else str(self.r)),
            "delta_tilde": None if self.delta_tilde is None else str(self.delta_tilde),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Setting":
        return cls(**d)

    def __repr__(self):
        r = "inf" if is_inf(self.r) else self.r
        return (f"Setting(n={self.n}, alpha={self.alpha}, delta={self.delta}, m={self.m}, "
                f"eta={self.eta}, r={r}, delta_tilde={self.delta_tilde})")


@dataclass(frozen=True)
class RegionClass:
    tag: str
    reason: str
    snapped: bool = False


def one_weight_delta(s: Setting) -> Fraction:
    """The only ``delta_tilde`` at which a single nontrivial weight can work."""
    return s.alpha_tilde - s.n * s.inv_r


def _cmp(x: Fraction, y: Fraction, snap: bool) -> tuple[int, bool]:
    d = x - y
    if d == 0:
        return 0, False
    if snap and abs(d) <= SNAP_TOL:
        return 0, True
    return (1 if d > 0 else -1), False


def classify_region(s: Setting) -> RegionClass:
    """Place ``(r, delta_tilde)`` in the parameter plane.

    Decisions use exact rational arithmetic.  For float-built settings a
    distance below ``SNAP_TOL`` from a boundary line counts as on it.
    """
    s._need_full()
    dt, d = s.delta_tilde, s.delta
    kappa0 = one_weight_delta(s)
    c_delta, snap1 = _cmp(dt, d, s.from_float)
    c_line, snap2 = _cmp(dt, kappa0, s.from_float)
    snapped = snap1 or snap2
    if c_delta > 0 or c_line > 0:
        which = "delta_tilde > delta" if c_delta > 0 else "delta_tilde > alpha_tilde - n/r"
        return RegionClass(TRIVIAL, f"{which}: only v = 0 a.e. satisfies the class", snapped)
    if c_delta == 0 and c_line == 0:
        return RegionClass(CORNER, "delta_tilde = delta = alpha_tilde - n/r: only v = 0 a.e.", snapped)
    if c_line == 0:
        return RegionClass(ONE_WEIGHT, "delta_tilde = alpha_tilde - n/r < delta: one-weight line", snapped)
    return RegionClass(NONTRIVIAL, "delta_tilde <= min(delta, alpha_tilde - n/r): nontrivial pairs exist",
                       snapped)


@dataclass(frozen=True)
class RegionGrid:
    r_inv: tuple
    delta_tilde: tuple
    classes: tuple  # classes[i][j] for r_inv[i], delta_tilde[j]

    def rows(self):
        for i, ri in enumerate(self.r_inv):
            for j, dt in enumerate(self.delta_tilde):
                c = self.classes[i][j]
                yield ri, dt, c.tag, c.reason

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r_inv", "delta_tilde", "class", "reason"])
        for ri, dt, tag, reason in self.rows():
            w.writerow([_fmt(ri), _fmt(dt), tag, reason])
        return buf.getvalue()


def _fmt(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return repr(float(x))


def _axis(lo, hi, k: int) -> list[Fraction]:
    lo, hi = to_fraction(lo), to_fraction(hi)
    if k == 1:
        return [lo]
    return [lo + (hi - lo) * i / (k - 1) for i in range(k)]


def default_delta_tilde_window(s: Setting) -> tuple[Fraction, Fraction]:
    """``[alpha_tilde - n - 3 delta, delta + delta/2]``; unbounded below in truth."""
    return s.alpha_tilde - s.n - 3 * s.delta, s.delta + s.delta / 2


def region_grid(s: Setting, r_inv_range: Sequence[Number] = (0, 1),
                delta_tilde_range: Sequence[Number] | None = None,
                resolution: int | tuple[int, int] = 100, executor=None) -> RegionGrid:
    """Classify a rectangular grid over ``(1/r, delta_tilde)``.

    ``r`` and ``delta_tilde`` of ``s`` are ignored.  ``resolution`` may be a
    pair ``(n_r, n_delta)``; a 1x1 grid needs both ranges degenerate.
    """
    if delta_tilde_range is None:
        delta_tilde_range = default_delta_tilde_window(s)
    nr, nd = (resolution, resolution) if isinstance(resolution, int) else resolution
    (r0, r1), (d0, d1) = (map(to_fraction, r_inv_range)), (map(to_fraction, delta_tilde_range))
    for lo, hi, k, name in ((r0, r1, nr, "r_inv"), (d0, d1, nd, "delta_tilde")):
        if hi < lo:
            raise ValueError(f"empty {name} range [{lo}, {hi}]")
        if k < 1 or (k < 2 and hi != lo):
            raise ValueError(f"{name} resolution must be >= 2 for a non-degenerate range")
    if not (0 <= r0 and r1 <= 1):
        raise ValueError("1/r must lie in [0, 1]")
    rs, ds = _axis(r0, r1, nr), _axis(d0, d1, nd)

    def row(ri):
        r = INF if ri == 0 else 1 / ri
        return tuple(classify_region(s.with_(r=r, delta_tilde=dt)) for dt in ds)

    mapper = executor.map if executor is not None else map
    classes = tuple(mapper(row, rs))
    return RegionGrid(tuple(rs), tuple(ds), classes)


def admissible_upper(s: Setting, r_inv: Fraction) -> Fraction:
    """Upper edge ``min(delta, alpha_tilde - n/r)`` of the admissible region."""
    return min(s.delta, s.alpha_tilde - s.n * r_inv)


def iter_settings(base: Setting, points: Iterable[tuple]) -> Iterable[Setting]:
    for r, dt in points:
        yield base.with_(r=r, delta_tilde=dt)
