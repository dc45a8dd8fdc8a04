"""
Run-configuration parsing and deterministic file output.

Configurations are JSON objects.  Full-line comments starting with ``#`` or
``//`` are stripped before parsing, duplicate keys and unknown keys are
errors, and the configuration hash is taken over the canonical form with
all defaults and the preset applied.  Floats are written with Python's
shortest round-trip ``repr`` so identical inputs give identical bytes.
"""
import copy
import hashlib
import json
import os
from dataclasses import dataclass

import numpy as np

from . import __version__
from .materials import ktp_source, xi_from_waist
from .metrics import FilterWindow
from .overlap import TYPE_0_GRID, TYPE_II_GRID, uniform_grid
from .sweep import PRESETS

__all__ = ["ConfigError", "RunOptions", "parse_config", "write_csv", "write_json",
           "format_value", "expand_values", "DEFAULTS"]


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending key or invariant."""


DEFAULT_LAMBDA_P = 405e-9

# None marks a value filled from the matching type or the preset
DEFAULTS = {
    "source": {
        "material": "KTP",
        "matching": "type2",
        "length": None,
        "poling": "uniform",
        "sigma_over_L": 0.25,
        "lambda_p": DEFAULT_LAMBDA_P,
        "xi": None,
        "waists": None,
        "phi_tilde": 0.0,
        "omega_grid": None,
        "p_max": 4,
        "z_nodes": None,
    },
    "filter": {"kind": "none", "center": 0.0, "width": None},
    "sweep": {"log_xi": None, "step": None, "phi_values": None},
    "tradeoff": {"B_targets": None, "band": 0.02},
    "fit": {"targets": ["H", "log10_xi_p", "log10_xi_s"]},
    "purity": {"n_grid": 128, "search_interval": None, "rank_cap": 64, "dump_jsa": False},
    "scaling": {"lengths": None, "filtered": False, "narrow_width": 0.01},
}

_LENGTH = {"type2": 0.04, "sgvm": 0.04, "type0": 0.005}
_LOG_XI = {"uniform": [-2.0, 1.0], "gaussian": [-2.2, 0.8]}


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ConfigError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _strip_comments(text):
    keep = []
    for line in text.splitlines():
        s = line.lstrip()
        if s.startswith("#") or s.startswith("//"):
            continue
        keep.append(line)
    return "\n".join(keep)


def _merge(defaults, given, path=""):
    out = copy.deepcopy(defaults)
    for k, v in given.items():
        if k not in defaults:
            raise ConfigError(f"unknown key {path + k!r}")
        if isinstance(defaults[k], dict):
            if not isinstance(v, dict):
                raise ConfigError(f"{path + k!r} must be an object")
            out[k] = _merge(defaults[k], v, path + k + ".")
        else:
            out[k] = v
    return out


def _grid_spec(value, matching):
    if value is None:
        start, stop, step = TYPE_0_GRID if matching == "type0" else TYPE_II_GRID
        return {"start": start, "stop": stop, "step": step}
    if not isinstance(value, dict) or set(value) != {"start", "stop", "step"}:
        raise ConfigError("source.omega_grid must have exactly start, stop, step")
    if not value["step"] > 0 or not value["stop"] > value["start"]:
        raise ConfigError("source.omega_grid needs step > 0 and stop > start")
    return {k: float(value[k]) for k in ("start", "stop", "step")}


@dataclass(eq=False)
class RunOptions:
    """Resolved configuration: canonical tree, hash and derived objects."""
    tree: dict
    preset: str
    config_hash: str
    source: object
    window: FilterWindow

    def section(self, name):
        return self.tree[name]


def _resolve(tree, preset):
    src = tree["source"]
    if src["material"] != "KTP":
        raise ConfigError(f"unknown material {src['material']!r}; only 'KTP' is embedded")
    if src["matching"] not in _LENGTH:
        raise ConfigError(f"source.matching must be one of {sorted(_LENGTH)}")
    if src["poling"] not in ("uniform", "gaussian"):
        raise ConfigError("source.poling must be 'uniform' or 'gaussian'")
    if src["length"] is None:
        src["length"] = _LENGTH[src["matching"]]
    src["omega_grid"] = _grid_spec(src["omega_grid"], src["matching"])
    if src["xi"] is not None and src["waists"] is not None:
        raise ConfigError("give either source.xi or source.waists, not both")
    if src["xi"] is None and src["waists"] is None:
        src["xi"] = [1.0, 1.0, 1.0]
    if src["xi"] is not None:
        xi = src["xi"]
        if isinstance(xi, (int, float)):
            xi = [xi, xi, xi]
        if len(xi) != 3 or not all(isinstance(v, (int, float)) and v > 0 for v in xi):
            raise ConfigError("source.xi must be a positive number or three positive numbers")
        src["xi"] = [float(v) for v in xi]
    sweep = tree["sweep"]
    if sweep["log_xi"] is None:
        sweep["log_xi"] = list(_LOG_XI[src["poling"]])
    if sweep["step"] is None:
        sweep["step"] = PRESETS[preset]["log_xi_step"]
    if sweep["phi_values"] is None:
        sweep["phi_values"] = ({"start": -1.125, "stop": 2.375, "step": 0.25}
                               if src["matching"] == "type0" else [src["phi_tilde"]])
    if tree["tradeoff"]["B_targets"] is None:
        tree["tradeoff"]["B_targets"] = {"start": 0.05, "stop": 1.0, "step": 0.025}
    if tree["scaling"]["lengths"] is None:
        L = src["length"]
        tree["scaling"]["lengths"] = [L / 4, L / 2, L, 2 * L]
    flt = tree["filter"]
    if flt["kind"] not in ("none", "rect"):
        raise ConfigError("filter.kind must be 'none' or 'rect'")
    return tree


def expand_values(value):
    if isinstance(value, dict):
        n = int(np.floor((value["stop"] - value["start"]) / value["step"] + 1e-9)) + 1
        return [round(value["start"] + value["step"] * k, 10) for k in range(n)]
    return [float(v) for v in value]


def build_source(tree):
    src = tree["source"]
    g = src["omega_grid"]
    grid = uniform_grid(g["start"], g["stop"], g["step"])
    L = src["length"]
    sigma = src["sigma_over_L"] * L if src["poling"] == "gaussian" else None
    cfg = ktp_source(src["matching"], L, xi=src["xi"] or (1.0, 1.0, 1.0), poling=src["poling"],
                     phi_tilde=src["phi_tilde"], lambda_p=src["lambda_p"],
                     omega_grid=grid, p_max=src["p_max"], sigma=sigma)
    if src["xi"] is None:
        w = src["waists"]
        if len(w) != 3 or not all(isinstance(v, (int, float)) and v > 0 for v in w):
            raise ConfigError("source.waists must be three positive lengths in meters")
        xi = [xi_from_waist(wj, cfg.L_eff, lam, n) for wj, lam, n in
              zip(w, (cfg.lambda_p, cfg.lambda_s, cfg.lambda_i), (cfg.n_p, cfg.n_s, cfg.n_i))]
        cfg = cfg.with_(xi_p=xi[0], xi_s=xi[1], xi_i=xi[2])
    if src["z_nodes"] is not None:
        cfg = cfg.with_(z_nodes=int(src["z_nodes"]))
    return cfg


def parse_config(text, preset="desk"):
    """Validate a JSON run configuration and apply defaults.

    Raises :class:`ConfigError` for malformed JSON, duplicate keys, unknown
    keys or values that violate a source invariant.
    """
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; known: {sorted(PRESETS)}")
    try:
        given = json.loads(_strip_comments(text), object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from None
    if not isinstance(given, dict):
        raise ConfigError("configuration must be a JSON object")
    tree = _resolve(_merge(DEFAULTS, given), preset)
    canonical = json.dumps({"config": tree, "preset": preset}, sort_keys=True)
    digest = hashlib.sha256(canonical.encode()).hexdigest()[:16]
    try:
        source = build_source(tree)
        flt = tree["filter"]
        window = (FilterWindow() if flt["kind"] == "none"
                  else FilterWindow.rect(flt["width"], flt["center"]))
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid configuration: {exc}") from exc
    return RunOptions(tree, preset, digest, source, window)


# --- output -------------------------------------------------------------------

def format_value(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _header(meta):
    return "".join(f"# {k}={format_value(meta[k])}\n" for k in sorted(meta))


def write_csv(path, columns, rows, meta=None):
    """CSV with ``# key=value`` metadata lines (tool version always included)."""
    meta = dict(meta or {})
    meta.setdefault("tool", "spdcmodes")
    meta.setdefault("version", __version__)
    lines = [_header(meta), ",".join(columns) + "\n"]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row) + "\n")
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write("".join(lines))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if not np.isfinite(f):
            return repr(f)
        return f
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def write_json(path, payload, meta=None):
    meta = dict(meta or {})
    meta.setdefault("tool", "spdcmodes")
    meta.setdefault("version", __version__)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        fh.write(json.dumps({"meta": _plain(meta), "result": _plain(payload)},
                            sort_keys=True, indent=2) + "\n")

