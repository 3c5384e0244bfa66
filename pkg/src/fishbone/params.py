"""Structural parameters, named presets and the key=value config format.

Config files are flat UTF-8 ``key = value`` lines; ``#`` starts a comment.
Recognised keys::

    alpha  flexural stiffness coefficient          [1/s^2]
    beta   torsional stiffness coefficient         [1/s^2]
    gamma  deck geometry ratio l^2 S / J           [-]
    j, k   flexural / torsional mode indices       [-]
    model  mmk | mmk-bar | sqrt | exp | piecewise
    m      slope f'(0)                             [1/s^2]
    r0     slack offset (mmk, mmk-bar)             [length]
    h      smoothing scale (sqrt, exp)             [force]
    M      asymptotic slope (informational; must match the model)
    knots  CSV sidecar with r,f pairs (piecewise), relative to the config
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import ConfigError, SchemaError, ValidationError
from .slackening import MMK, Exponential, PiecewiseLinear, SqrtSmooth, load_knots_csv

FLOAT_KEYS = ("alpha", "beta", "gamma", "m", "r0", "h", "M")
INT_KEYS = ("j", "k")
STR_KEYS = ("model", "knots")
KNOWN_KEYS = FLOAT_KEYS + INT_KEYS + STR_KEYS
MODELS = ("mmk", "mmk-bar", "sqrt", "exp", "piecewise")


@dataclass(frozen=True)
class BridgeParams:
    alpha: float
    beta: float
    gamma: float
    j: int = 1
    k: int = 1

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValidationError(f"{name} must be a finite number", field=name)
        if not self.alpha > 0:
            raise ValidationError("alpha must be positive", field="alpha")
        if not self.beta >= 0:
            raise ValidationError("beta must be non-negative", field="beta")
        if not self.gamma > 0:
            raise ValidationError("gamma must be positive", field="gamma")
        for name in ("j", "k"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ValidationError(f"{name} must be an integer", field=name)
            if v < 1:
                raise ValidationError(f"{name} must be >= 1", field=name)

    def replace(self, **changes) -> "BridgeParams":
        data = asdict(self)
        data.update(changes)
        return BridgeParams(**data)


@dataclass(frozen=True)
class Preset:
    name: str
    params: BridgeParams
    model: dict
    meta: dict = field(default_factory=dict)


TNB_BETA = 8.1833e-5

_PRESETS = {
    "academic": dict(alpha=1.0, gamma=3.0, model={"model": "mmk", "m": 3.0, "r0": 1.0 / 3.0},
                     meta={"source": "academic parameter set, beta swept"}),
    "tnb": dict(alpha=8.0353e-4, gamma=None, model={"model": "mmk", "m": 185.1, "r0": 0.0265},
                meta={"source": "Tacoma Narrows values, beta swept",
                      "beta_reference": TNB_BETA,
                      "gamma": "not published with this set; supply it in the config"}),
}


def available_presets():
    return sorted(_PRESETS)


def preset(name: str, j: int = 1, k: int = 1, beta=None, gamma=None) -> Preset:
    """Named parameter set.  ``tnb`` has no gamma; pass one explicitly."""
    try:
        entry = _PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(available_presets())}") from None
    g = entry["gamma"] if gamma is None else gamma
    if g is None:
        raise ValidationError(f"preset {name!r} needs an explicit gamma", field="gamma")
    if beta is None:
        beta = entry["meta"].get("beta_reference", 0.0)
    params = BridgeParams(alpha=entry["alpha"], beta=float(beta), gamma=float(g), j=j, k=k)
    return Preset(name=name, params=params, model=dict(entry["model"]), meta=dict(entry["meta"]))


def parse_config(text: str) -> dict:
    """Parse key=value lines into typed values (no validation of ranges)."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SchemaError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise SchemaError(f"line {lineno}: unknown key {key!r}", key=key)
        if key in out:
            raise SchemaError(f"line {lineno}: duplicate key {key!r}", key=key)
        try:
            if key in FLOAT_KEYS:
                out[key] = float(value)
            elif key in INT_KEYS:
                out[key] = int(value)
            else:
                out[key] = value
        except ValueError:
            raise SchemaError(f"line {lineno}: cannot parse {key} = {value!r}", key=key) from None
    return out


def params_from_mapping(data: dict) -> BridgeParams:
    missing = [k for k in ("alpha", "beta", "gamma", "j", "k") if k not in data]
    if missing:
        raise SchemaError(f"missing key {missing[0]!r}", key=missing[0])
    return BridgeParams(alpha=float(data["alpha"]), beta=float(data["beta"]),
                        gamma=float(data["gamma"]), j=data["j"], k=data["k"])


def load_params(source: str) -> BridgeParams:
    """BridgeParams from config text."""
    return params_from_mapping(parse_config(source))


def serialize_params(params: BridgeParams) -> str:
    return "".join(f"{key} = {getattr(params, key)!r}\n" for key in ("alpha", "beta", "gamma", "j", "k"))


def model_descriptor(data: dict) -> dict:
    desc = {k: data[k] for k in ("model", "m", "r0", "h", "M", "knots") if k in data}
    if "model" not in desc:
        raise SchemaError("missing key 'model'", key="model")
    if desc["model"] not in MODELS:
        raise SchemaError(f"unknown model {desc['model']!r}; expected one of {', '.join(MODELS)}",
                          key="model")
    return desc


def build_model(desc: dict, base_dir=None):
    """Instantiate a restoring-force model (or the bar approximation) from a descriptor."""
    kind = desc["model"]

    def need(key):
        if key not in desc:
            raise SchemaError(f"model {kind!r} needs key {key!r}", key=key)
        return float(desc[key])

    if kind == "mmk":
        model = MMK(m=need("m"), r0=need("r0"))
    elif kind == "mmk-bar":
        from .piecewise import BarModel
        model = BarModel(m=need("m"), r0=need("r0"))
    elif kind == "sqrt":
        model = SqrtSmooth(m=need("m"), h=need("h"))
    elif kind == "exp":
        model = Exponential(m=need("m"), h=need("h"))
    elif kind == "piecewise":
        if "knots" in desc and isinstance(desc["knots"], (list, tuple)):
            knots = desc["knots"]
        elif "knots" in desc:
            path = Path(desc["knots"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            try:
                knots = load_knots_csv(path)
            except OSError as exc:
                raise ConfigError(f"cannot read knots file {path}: {exc}") from exc
        else:
            raise SchemaError("model 'piecewise' needs key 'knots'", key="knots")
        model = PiecewiseLinear(knots=tuple(tuple(p) for p in knots))
    else:
        raise SchemaError(f"unknown model {kind!r}", key="model")

    if "M" in desc:
        M = getattr(model, "M_asymptotic", None)
        if M is None or not math.isclose(M, float(desc["M"]), rel_tol=1e-12):
            raise ValidationError(f"M = {desc['M']} is inconsistent with model {kind!r} (M = {M})",
                                  field="M")
    return model
