"""Run configuration: parsing, validation and serialization.

Documents are YAML (JSON is accepted as a subset). Every key is optional;
missing keys take the defaults below. Unknown keys are rejected.

    line:
      hyperfine_offsets: {1: -423.597, 2: -266.65, 3: 0.0}
      g_max: 9.2
      kappa: 2.6
      gamma: 3.0
    spatial:
      axial: uniform            # or a list of k*z phases in radians
      transverse: null          # or {waist: 25, trap_depth: 330, temperature: 33}
    mf_distribution: equal      # or {-2: p, -1: p, 0: p, 1: p, 2: p}
    atom_number: 1000           # or a list, one output per value
    cavity_detuning: {start: -700, stop: 300, step: 5}
    probe_detuning: {start: -700, stop: 700, step: 5}
    output_format: csv          # csv | json
    threshold: false
    threshold_level: 0.01
    seed: 0
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
import yaml

from .atomic_data import LineConstants
from .coupling import MfDistribution, SpatialModel, TransverseModel

__all__ = ["ConfigError", "Grid", "RunConfig", "parse_config", "load_config", "serialize_config"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if self.step == 0 or not math.isfinite(self.step):
            raise ValueError("step must be non-zero and finite")
        if (self.stop - self.start) * self.step < 0:
            raise ValueError("step points away from stop")

    def values(self) -> np.ndarray:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(n)

    def to_dict(self) -> dict:
        return {"start": self.start, "stop": self.stop, "step": self.step}


@dataclass(frozen=True)
class RunConfig:
    line: LineConstants = field(default_factory=LineConstants)
    spatial: SpatialModel = field(default_factory=SpatialModel)
    mf_distribution: MfDistribution = field(default_factory=MfDistribution.equal)
    atom_numbers: tuple[float, ...] = (1000.0,)
    cavity_grid: Grid = field(default_factory=lambda: Grid(-700.0, 300.0, 5.0))
    probe_grid: Grid = field(default_factory=lambda: Grid(-700.0, 700.0, 5.0))
    output_format: str = "csv"
    threshold: bool = False
    threshold_level: float = 0.01
    seed: int = 0

    @property
    def multi_n(self) -> bool:
        return len(self.atom_numbers) > 1

    def to_dict(self) -> dict:
        sp = self.spatial
        transverse = None
        if sp.transverse is not None:
            t = sp.transverse
            transverse = {"waist": t.waist, "trap_depth": t.trap_depth, "temperature": t.temperature}
        return {
            "line": self.line.to_dict(),
            "spatial": {
                "axial": sp.axial if isinstance(sp.axial, str) else list(sp.axial),
                "transverse": transverse,
            },
            "mf_distribution": {str(m): p for m, p in self.mf_distribution.p.items()},
            "atom_number": list(self.atom_numbers) if self.multi_n else self.atom_numbers[0],
            "cavity_detuning": self.cavity_grid.to_dict(),
            "probe_detuning": self.probe_grid.to_dict(),
            "output_format": self.output_format,
            "threshold": self.threshold,
            "threshold_level": self.threshold_level,
            "seed": self.seed,
        }


_TOP_KEYS = {
    "line", "spatial", "mf_distribution", "atom_number", "cavity_detuning",
    "probe_detuning", "output_format", "threshold", "threshold_level", "seed",
}
_LINE_KEYS = {"hyperfine_offsets", "g_max", "kappa", "gamma"}
_SPATIAL_KEYS = {"axial", "transverse"}
_TRANSVERSE_KEYS = {"waist", "trap_depth", "temperature"}
_GRID_KEYS = {"start", "stop", "step"}


def _check_keys(doc: Any, allowed: set, path: str) -> Mapping:
    if not isinstance(doc, Mapping):
        raise ConfigError(f"{path or '<root>'}: expected a mapping")
    for key in doc:
        if key not in allowed:
            where = f"{path}.{key}" if path else str(key)
            raise ConfigError(f"unknown key {where!r}")
    return doc


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _wrap(path: str, build):
    try:
        return build()
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _grid(doc: Any, default: Grid, path: str) -> Grid:
    if doc is None:
        return default
    _check_keys(doc, _GRID_KEYS, path)
    vals = {k: _number(doc[k], f"{path}.{k}") if k in doc else getattr(default, k) for k in _GRID_KEYS}
    return _wrap(path, lambda: Grid(**vals))


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads exponent floats without a dot (``1e-06``)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)


def parse_config(text: str | Mapping | None) -> RunConfig:
    """Validate a YAML/JSON document (or an already-loaded mapping)."""
    if text is None:
        doc = {}
    elif isinstance(text, str):
        try:
            doc = yaml.load(text, Loader=_Loader)
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed document: {exc}") from None
        doc = {} if doc is None else doc
    else:
        doc = text
    _check_keys(doc, _TOP_KEYS, "")
    default = RunConfig()

    line_doc = _check_keys(doc.get("line") or {}, _LINE_KEYS, "line")
    line_kw = {}
    if "hyperfine_offsets" in line_doc:
        offs = line_doc["hyperfine_offsets"]
        if not isinstance(offs, Mapping):
            raise ConfigError("line.hyperfine_offsets: expected a mapping F' -> MHz")
        line_kw["hyperfine_offsets"] = {
            _wrap("line.hyperfine_offsets", lambda k=k: int(k)): _number(v, f"line.hyperfine_offsets.{k}")
            for k, v in offs.items()
        }
    for key in ("g_max", "kappa", "gamma"):
        if key in line_doc:
            line_kw[key] = _number(line_doc[key], f"line.{key}")
    line = _wrap("line", lambda: LineConstants(**line_kw))

    sp_doc = _check_keys(doc.get("spatial") or {}, _SPATIAL_KEYS, "spatial")
    axial = sp_doc.get("axial", "uniform")
    if not isinstance(axial, str):
        if not isinstance(axial, (list, tuple)):
            raise ConfigError("spatial.axial: expected 'uniform' or a list of phases")
        axial = tuple(_number(x, "spatial.axial[]") for x in axial)
    transverse = None
    if sp_doc.get("transverse") is not None:
        tdoc = _check_keys(sp_doc["transverse"], _TRANSVERSE_KEYS, "spatial.transverse")
        missing = _TRANSVERSE_KEYS - set(tdoc)
        if missing:
            raise ConfigError(f"spatial.transverse: missing {sorted(missing)}")
        tvals = {k: _number(tdoc[k], f"spatial.transverse.{k}") for k in _TRANSVERSE_KEYS}
        transverse = _wrap("spatial.transverse", lambda: TransverseModel(**tvals))
    spatial = _wrap("spatial", lambda: SpatialModel(line.g_max, axial, transverse))

    mf = doc.get("mf_distribution", "equal")
    if mf == "equal":
        dist = MfDistribution.equal()
    elif isinstance(mf, Mapping):
        pops = {}
        for k, v in mf.items():
            pops[_wrap("mf_distribution", lambda k=k: int(k))] = _number(v, f"mf_distribution.{k}")
        dist = _wrap("mf_distribution", lambda: MfDistribution(pops))
    else:
        raise ConfigError("mf_distribution: expected 'equal' or a mapping m_F -> population")

    n_doc = doc.get("atom_number", default.atom_numbers[0])
    n_list = n_doc if isinstance(n_doc, (list, tuple)) else [n_doc]
    if not n_list:
        raise ConfigError("atom_number: empty list")
    atom_numbers = tuple(_number(n, "atom_number") for n in n_list)
    if any(n < 0 for n in atom_numbers):
        raise ConfigError("atom_number: must be >= 0")

    fmt = doc.get("output_format", default.output_format)
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output_format: expected 'csv' or 'json', got {fmt!r}")
    threshold = doc.get("threshold", default.threshold)
    if not isinstance(threshold, bool):
        raise ConfigError("threshold: expected true or false")
    level = _number(doc.get("threshold_level", default.threshold_level), "threshold_level")
    if level < 0:
        raise ConfigError("threshold_level: must be >= 0")
    seed = doc.get("seed", default.seed)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("seed: expected an integer")

    return RunConfig(
        line=line,
        spatial=spatial,
        mf_distribution=dist,
        atom_numbers=atom_numbers,
        cavity_grid=_grid(doc.get("cavity_detuning"), default.cavity_grid, "cavity_detuning"),
        probe_grid=_grid(doc.get("probe_detuning"), default.probe_grid, "probe_detuning"),
        output_format=fmt,
        threshold=threshold,
        threshold_level=level,
        seed=seed,
    )


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(config: RunConfig) -> str:
    return json.dumps(config.to_dict(), indent=2)
