"""JSON run configuration: geometry, truncation, band, oracle grid, outputs."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .fdfd import GridSpec, GridSnapError
from .geometry import Geometry, InvalidGeometryError
from .resonance import BandError, FrequencyBand, validate_band
from .solver import ModeMatchSolver

DEFAULT_N = 200
DEFAULT_M = 30

_OUTPUT_KEYS = ("sweep", "resonance", "validate", "compare", "field")


class ConfigError(ValueError):
    """Configuration file is malformed or violates an invariant."""


@dataclass(frozen=True)
class RunConfig:
    geometry: Geometry
    N: int
    M: int
    band: FrequencyBand
    oracle: GridSpec | None
    k_values: tuple[float, ...] | None
    output: dict[str, str]

    def to_dict(self) -> dict:
        g = self.geometry
        geo: dict = {"H": g.H, "hole": {"x0": g.x0, "delta": g.delta}, "w": g.w, "L": g.L}
        if g.is_rectangular:
            geo["H2"] = g.H2
            geo["hole"]["x0_2"] = g.x0_2
            geo["hole"]["delta_2"] = g.delta_2
        out: dict = {
            "geometry": geo,
            "truncation": {"N": self.N, "M": self.M},
            "band": {"kmin": self.band.kmin, "kmax": self.band.kmax,
                     "points": self.band.points},
        }
        if self.oracle is not None:
            blk: dict = {"h": self.oracle.h, "Z": self.oracle.Z, "Nb": self.oracle.Nb}
            if self.k_values is not None:
                blk["k_values"] = list(self.k_values)
            out["oracle"] = blk
        if self.output:
            out["output"] = dict(self.output)
        return out


def _take(block: dict, context: str, required: tuple[str, ...],
          optional: tuple[str, ...] = ()) -> dict:
    if not isinstance(block, dict):
        raise ConfigError(f"{context} must be an object")
    unknown = set(block) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"unknown keys in {context}: {sorted(unknown)}")
    missing = [key for key in required if key not in block]
    if missing:
        raise ConfigError(f"missing keys in {context}: {missing}")
    return block


def _number(block: dict, key: str, context: str) -> float:
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{context}.{key} must be a number, got {v!r}")
    return float(v)


def _count(block: dict, key: str, context: str) -> int:
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{context}.{key} must be an integer, got {v!r}")
    return v


def from_dict(data: dict) -> RunConfig:
    """Build and fully re-validate a RunConfig from parsed JSON."""
    data = _take(data, "config", ("geometry", "band"),
                 ("truncation", "oracle", "output"))
    geo = _take(data["geometry"], "geometry", ("H", "hole", "w", "L"),
                ("H2",))
    hole = _take(geo["hole"], "geometry.hole", ("x0", "delta"), ("x0_2", "delta_2"))
    kwargs = {}
    if "H2" in geo:
        kwargs["H2"] = _number(geo, "H2", "geometry")
        kwargs["x0_2"] = _number(hole, "x0_2", "geometry.hole")
        kwargs["delta_2"] = _number(hole, "delta_2", "geometry.hole")
    try:
        geometry = Geometry(H=_number(geo, "H", "geometry"),
                            x0=_number(hole, "x0", "geometry.hole"),
                            delta=_number(hole, "delta", "geometry.hole"),
                            w=_number(geo, "w", "geometry"),
                            L=_number(geo, "L", "geometry"), **kwargs)
    except InvalidGeometryError as exc:
        raise ConfigError(f"geometry: {exc}") from exc

    N, M = DEFAULT_N, DEFAULT_M
    if "truncation" in data:
        tr = _take(data["truncation"], "truncation", (), ("N", "M"))
        N = _count(tr, "N", "truncation") if "N" in tr else DEFAULT_N
        M = _count(tr, "M", "truncation") if "M" in tr else DEFAULT_M
    if N < 2 or M < 1:
        raise ConfigError(f"need N >= 2 and M >= 1, got N={N}, M={M}")

    bd = _take(data["band"], "band", ("kmin", "kmax", "points"))
    try:
        band = FrequencyBand(kmin=_number(bd, "kmin", "band"),
                             kmax=_number(bd, "kmax", "band"),
                             points=_count(bd, "points", "band"))
        validate_band(band, ModeMatchSolver(geometry, 2, 1))
    except BandError as exc:
        raise ConfigError(f"band: {exc}") from exc

    oracle = None
    k_values = None
    if "oracle" in data:
        ob = _take(data["oracle"], "oracle", ("h", "Z", "Nb"), ("k_values",))
        try:
            oracle = GridSpec(h=_number(ob, "h", "oracle"),
                              Z=_number(ob, "Z", "oracle"),
                              Nb=_count(ob, "Nb", "oracle"))
        except GridSnapError as exc:
            raise ConfigError(f"oracle: {exc}") from exc
        if "k_values" in ob:
            vals = ob["k_values"]
            if not isinstance(vals, list) or not vals:
                raise ConfigError("oracle.k_values must be a non-empty list")
            k_values = tuple(float(v) for v in vals)

    output: dict[str, str] = {}
    if "output" in data:
        out = _take(data["output"], "output", (), _OUTPUT_KEYS)
        output = {key: str(val) for key, val in out.items()}

    return RunConfig(geometry=geometry, N=N, M=M, band=band,
                     oracle=oracle, k_values=k_values, output=output)


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a JSON configuration file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return from_dict(data)
