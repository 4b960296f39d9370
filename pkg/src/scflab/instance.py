"""Instance files (JSON) and deterministic report emission."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from .batchode import QuadratureSpec
from .errors import SCFError
from .model import CustomMonotone, ModelParams, Monod

SCHEMA_VERSION = "1"


class InstanceError(SCFError, ValueError):
    """Malformed instance file; the message starts with the offending location."""


# ---------------------------------------------------------------------------
# named custom responses
# ---------------------------------------------------------------------------


def _tessier(m: float, a: float) -> CustomMonotone:
    return CustomMonotone(lambda s: m * (1.0 - math.exp(-s / a)),
                          lambda s: m / a * math.exp(-s / a), name="tessier", supremum=m)


def _hill(m: float, a: float, n: float) -> CustomMonotone:
    return CustomMonotone(lambda s: m * s ** n / (a ** n + s ** n),
                          lambda s: m * n * a ** n * s ** (n - 1) / (a ** n + s ** n) ** 2,
                          name="hill", supremum=m)


CUSTOM_RESPONSES: dict[str, tuple[Callable[..., CustomMonotone], tuple[str, ...]]] = {
    "tessier": (_tessier, ("m", "a")),
    "hill": (_hill, ("m", "a", "n")),
}


def register_response(name: str, factory: Callable[..., CustomMonotone],
                      param_names: tuple[str, ...]) -> None:
    CUSTOM_RESPONSES[name] = (factory, tuple(param_names))


# ---------------------------------------------------------------------------
# schema
# ---------------------------------------------------------------------------

_PARAM_KEYS = ("f1", "f2", "Y1", "Y2", "D", "r", "s1_bar", "s2_bar", "s1_in", "s2_in")
_INITIAL_KEYS = ("s1", "s2", "x")
_RUN_DEFAULTS = {
    "horizon": 1e6, "max_impulses": 200, "rtol": 1e-10, "atol": 1e-10,
    "quad_abs_tol": 1e-12, "quad_rel_tol": 1e-10, "max_subdivisions": 200, "r_grid": 64,
}
_INT_RUN_KEYS = {"max_impulses", "max_subdivisions", "r_grid"}


def _number(v, loc) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InstanceError(f"{loc}: expected a number, got {v!r}")
    return v


def _object(v, loc, allowed, required=()) -> dict:
    if not isinstance(v, dict):
        raise InstanceError(f"{loc}: expected an object, got {type(v).__name__}")
    for k in v:
        if k not in allowed:
            raise InstanceError(f"{loc}.{k}: unknown field")
    for k in required:
        if k not in v:
            raise InstanceError(f"{loc}.{k}: missing required field")
    return v


def _response(v, loc) -> dict:
    _object(v, loc, {"kind", "name", "m", "a", "n"}, ("kind",))
    kind = v["kind"]
    if kind == "monod":
        _object(v, loc, {"kind", "m", "a"}, ("m", "a"))
        return {"kind": "monod", "m": _number(v["m"], f"{loc}.m"), "a": _number(v["a"], f"{loc}.a")}
    if kind == "custom":
        if "name" not in v:
            raise InstanceError(f"{loc}.name: missing required field")
        name = v["name"]
        if name not in CUSTOM_RESPONSES:
            raise InstanceError(f"{loc}.name: unknown custom response {name!r}")
        names = CUSTOM_RESPONSES[name][1]
        _object(v, loc, {"kind", "name", *names}, names)
        out = {"kind": "custom", "name": name}
        out.update({k: _number(v[k], f"{loc}.{k}") for k in names})
        return out
    raise InstanceError(f"{loc}.kind: expected 'monod' or 'custom', got {kind!r}")


def _build_response(spec: dict):
    if spec["kind"] == "monod":
        return Monod(spec["m"], spec["a"])
    factory, names = CUSTOM_RESPONSES[spec["name"]]
    return factory(*(spec[k] for k in names))


@dataclass
class InstanceFile:
    """Validated instance; ``params`` is the user-frame dict as written."""

    params: dict
    initial: Optional[dict] = None
    run: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def model_params(self) -> ModelParams:
        kw = {k: self.params[k] for k in _PARAM_KEYS if k not in ("f1", "f2")}
        return ModelParams(f1=_build_response(self.params["f1"]),
                           f2=_build_response(self.params["f2"]), **kw)

    def run_value(self, key: str):
        return self.run.get(key, _RUN_DEFAULTS[key])

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(self.run_value("quad_abs_tol"), self.run_value("quad_rel_tol"),
                              self.run_value("max_subdivisions"))

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"schema_version": self.schema_version, "params": self.params}
        if self.initial is not None:
            d["initial"] = self.initial
        if self.run:
            d["run"] = self.run
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def parse_instance(data: dict) -> InstanceFile:
    _object(data, "$", {"schema_version", "params", "initial", "run"},
            ("schema_version", "params"))
    if data["schema_version"] != SCHEMA_VERSION:
        raise InstanceError(f"$.schema_version: unsupported version {data['schema_version']!r}")
    raw = _object(data["params"], "$.params", set(_PARAM_KEYS), _PARAM_KEYS)
    params = {}
    for k in _PARAM_KEYS:
        loc = f"$.params.{k}"
        params[k] = _response(raw[k], loc) if k in ("f1", "f2") else _number(raw[k], loc)
    initial = None
    if data.get("initial") is not None:
        raw_i = _object(data["initial"], "$.initial", set(_INITIAL_KEYS), _INITIAL_KEYS)
        initial = {k: _number(raw_i[k], f"$.initial.{k}") for k in _INITIAL_KEYS}
    run = {}
    if data.get("run") is not None:
        raw_r = _object(data["run"], "$.run", set(_RUN_DEFAULTS))
        for k, v in raw_r.items():
            loc = f"$.run.{k}"
            if k in _INT_RUN_KEYS:
                if isinstance(v, bool) or not isinstance(v, int):
                    raise InstanceError(f"{loc}: expected an integer, got {v!r}")
                run[k] = v
            else:
                run[k] = _number(v, loc)
    inst = InstanceFile(params, initial, run)
    try:
        inst.model_params()
    except SCFError as exc:
        raise InstanceError(f"$.params: {exc}") from exc
    return inst


def loads_instance(text: str) -> InstanceFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"$: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    return parse_instance(data)


def load_instance(path) -> InstanceFile:
    with open(path, encoding="utf-8") as fh:
        return loads_instance(fh.read())


def instance_from_params(p: ModelParams, initial=None, run=None) -> InstanceFile:
    """Serialize Monod-only instances (user frame restored)."""
    def resp(f):
        if not isinstance(f, Monod):
            raise InstanceError("only Monod responses can be serialized from objects")
        return {"kind": "monod", "m": f.m, "a": f.a}

    d = {"f1": resp(p.f1), "f2": resp(p.f2), "Y1": p.Y1, "Y2": p.Y2,
         "s1_bar": p.s1_bar, "s2_bar": p.s2_bar, "s1_in": p.s1_in, "s2_in": p.s2_in}
    if p.swapped:
        d = {"f1": d["f2"], "f2": d["f1"], "Y1": d["Y2"], "Y2": d["Y1"],
             "s1_bar": d["s2_bar"], "s2_bar": d["s1_bar"], "s1_in": d["s2_in"], "s2_in": d["s1_in"]}
    d.update(D=p.D, r=p.r)
    params = {k: d[k] for k in _PARAM_KEYS}
    ini = None if initial is None else dict(zip(_INITIAL_KEYS, map(float, initial)))
    return InstanceFile(params, ini, dict(run or {}))


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------


def jsonable(obj):
    """Plain-JSON view: numpy scalars to floats, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if hasattr(obj, "value") and hasattr(obj, "name"):  # enums
        return obj.value
    return obj


def dumps_json(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def fmt_csv(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return format(v, ".17g") if math.isfinite(v) else ("nan" if math.isnan(v) else
                                                          ("inf" if v > 0 else "-inf"))
    return str(v)


def dumps_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_csv(v) for v in row])
    return buf.getvalue()
