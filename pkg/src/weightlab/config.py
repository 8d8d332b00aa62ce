"""Versioned JSON experiment configuration.

Unknown keys are rejected at every level.  :meth:`ExperimentConfig.canonical`
is the fully defaulted form; its SHA-256 is the digest written into every
output.
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .params import Setting, SettingError
from .weights import (BallSamplePlan, PiecewisePower, PowerWeight, Weight, WeightPair, ZeroWeight,
                      catalog)

SCHEMA_VERSION = 1

DEFAULTS: dict = {
    "schema_version": SCHEMA_VERSION,
    "setting": {"n": 1, "alpha": "1/2", "delta": "3/10", "m": 1, "eta": "1", "r": "4", "delta_tilde": "1/5"},
    "pair": {"catalog": None, "w": None, "v": None},
    "kernel": {"kind": "fractional"},
    "symbol": {"kind": "power", "freq": 1.0},
    "plan": {"r_min": 1e-4, "r_max": 1e4, "n_radii": 33, "c_min": 1e-4, "c_max": 1e4, "n_centers": 9,
             "jitter": 0.0},
    "seed": 0,
    "quadrature": {"rtol": 1e-8},
    "region": {"r_inv_range": [0, 1], "delta_tilde_range": None, "resolution": [100, 100]},
    "scan": {"radius": 1.0, "j_max": 40},
    "theorem": {"A": [1, 4, 16], "n_g": 5, "bound": 5.0, "panels": 12, "order": 6},
    "output": {"dir": "out"},
}

_KERNELS = ("fractional", "hilbert")
_SYMBOLS = ("power", "sine")


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


def _merge(base: dict, over: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        where = f"{path}{k}"
        if k not in base:
            raise ConfigError(f"unknown key '{where}'")
        if isinstance(base[k], dict):
            if not isinstance(v, dict):
                raise ConfigError(f"'{where}' must be an object")
            out[k] = _merge(base[k], v, where + ".")
        else:
            out[k] = v
    return out


def _num(x):
    """Numbers stay JSON numbers; exact strings like ``"3/10"`` are kept verbatim."""
    if isinstance(x, bool):
        raise ConfigError("booleans are not numbers")
    return x


def weight_from_json(d) -> Weight:
    """``{"kind": "power", "exponent": e}``, ``{"kind": "piecewise", ...}``, ``{"kind": "zero"}`` or a bare exponent."""
    if isinstance(d, (int, float, str)) and not isinstance(d, bool):
        return PowerWeight(d)
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError(f"bad weight descriptor {d!r}")
    kind = d["kind"]
    allowed = {"power": {"kind", "exponent"}, "piecewise": {"kind", "inner", "outer", "break_radius"},
               "zero": {"kind"}}
    if kind not in allowed:
        raise ConfigError(f"unknown weight kind {kind!r}")
    extra = set(d) - allowed[kind]
    if extra:
        raise ConfigError(f"unknown keys {sorted(extra)} in weight descriptor")
    try:
        if kind == "power":
            return PowerWeight(d["exponent"])
        if kind == "piecewise":
            return PiecewisePower(d["inner"], d["outer"], d.get("break_radius", 1.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad weight descriptor {d!r}: {exc}") from exc
    return ZeroWeight()


def _norm_key(key: str) -> str:
    return key.strip().lower().replace("_", "-")


_ALIASES = {
    "case-i": "power-tooth",
    "case-ii": "power-triangle",
    "r1-endpoint": "endpoint-r1",
    "remark": "piecewise-strict-inclusion",
}


def resolve_catalog_key(key: str, s: Setting):
    """Catalog entry for ``name[,param=value...]``.

    ``local-not-global`` picks the first available local-but-not-global pair.
    Parameters must match the entry's own (for example ``case-i,k=1``).
    """
    name, *conds = [p.strip() for p in key.split(",")]
    name = _norm_key(name)
    name = _ALIASES.get(name, name)
    want = {}
    for c in conds:
        if "=" not in c:
            raise ConfigError(f"bad catalog selector {c!r}")
        k, v = c.split("=", 1)
        want[k.strip()] = v.strip()
    entries = catalog(s)
    cands = [e for e in entries if _norm_key(e.name) == name or
             (name == "local-not-global" and _norm_key(e.name).startswith("local-not-global"))]
    if not cands:
        known = sorted({_norm_key(e.name) for e in entries} | set(_ALIASES))
        raise ConfigError(f"unknown catalog key {key!r}; known: {known}")
    avail = [e for e in cands if e.available]
    if not avail:
        raise ConfigError(f"catalog key {key!r} unavailable at this setting: {cands[0].omitted_reason}")
    for e in avail:
        if all(str(e.parameters.get(k)) == v for k, v in want.items()):
            return e
    got = {k: str(avail[0].parameters.get(k)) for k in want}
    raise ConfigError(f"catalog key {key!r}: this setting gives {got}")


@dataclass(frozen=True)
class ExperimentConfig:
    data: dict

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        v = d.get("schema_version", SCHEMA_VERSION)
        if v != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {v!r} (expected {SCHEMA_VERSION})")
        cfg = cls(_merge(DEFAULTS, d))
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        return cls.from_dict(d)

    def with_seed(self, seed: int | None) -> "ExperimentConfig":
        if seed is None:
            return self
        d = copy.deepcopy(self.data)
        d["seed"] = int(seed)
        return ExperimentConfig(d)

    def canonical(self) -> str:
        return json.dumps(self.data, sort_keys=True, separators=(",", ":"))

    def to_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    def validate(self):
        self.setting()
        d = self.data
        if not isinstance(d["seed"], int) or isinstance(d["seed"], bool):
            raise ConfigError("seed must be an integer")
        if d["kernel"].get("kind") not in _KERNELS:
            raise ConfigError(f"kernel.kind must be one of {_KERNELS}")
        if d["symbol"].get("kind") not in _SYMBOLS:
            raise ConfigError(f"symbol.kind must be one of {_SYMBOLS}")
        p = d["pair"]
        if p["catalog"] is not None and (p["w"] is not None or p["v"] is not None):
            raise ConfigError("give either pair.catalog or pair.w/pair.v, not both")
        if (p["w"] is None) != (p["v"] is None):
            raise ConfigError("pair.w and pair.v go together")
        self.plan()
        if not d["quadrature"]["rtol"] > 0:
            raise ConfigError("quadrature.rtol must be positive")
        j = d["scan"]["j_max"]
        if not isinstance(j, int) or j < 2:
            raise ConfigError("scan.j_max must be an integer >= 2")
        th = d["theorem"]
        if not th["A"] or any(not a > 0 for a in th["A"]):
            raise ConfigError("theorem.A must be a list of positive numbers")
        if not isinstance(th["n_g"], int) or th["n_g"] < 1:
            raise ConfigError("theorem.n_g must be a positive integer")

    def setting(self) -> Setting:
        try:
            return Setting(**{k: _num(v) for k, v in self.data["setting"].items()})
        except (SettingError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"invalid setting: {exc}") from exc

    def plan(self) -> BallSamplePlan:
        p = self.data["plan"]
        try:
            return BallSamplePlan(n=self.setting().n, seed=self.data["seed"], **p)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid plan: {exc}") from exc

    def pair(self, s: Setting | None = None):
        """``(WeightPair, CatalogEntry or None)``."""
        s = s or self.setting()
        p = self.data["pair"]
        if p["catalog"] is not None:
            e = resolve_catalog_key(p["catalog"], s)
            return e.pair, e
        if p["w"] is None:
            raise ConfigError("no pair given (pair.catalog or pair.w/pair.v)")
        try:
            return WeightPair(weight_from_json(p["w"]), weight_from_json(p["v"]), s.n), None
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"invalid pair: {exc}") from exc
