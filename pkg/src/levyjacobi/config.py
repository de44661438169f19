"""Run configuration: JSON in, validated dataclasses out, lossless round trip."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .measure import FAMILIES, MeasureError, as_number


class ConfigError(ValueError):
    pass


@dataclass
class Truncation:
    max_degree: int = 6
    ell2_dim: int = 7
    word_length: int = 6


@dataclass
class Tolerances:
    rel: float = 1e-9
    gram: float = 1e-8
    rank: float = 1e-10


@dataclass
class MCConfig:
    samples: int = 100_000
    seed: int = 0


@dataclass
class RunConfig:
    nu_tilde: dict
    grid: list
    test_functions: list
    truncation: Truncation = field(default_factory=Truncation)
    tolerances: Tolerances = field(default_factory=Tolerances)
    mc: MCConfig = field(default_factory=MCConfig)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["grid"] = {"weights": out["grid"]}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _int(block: dict, name: str, where: str) -> int:
    v = block[name]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where}.{name}: expected an integer, got {v!r}")
    return v


def _pos_float(block: dict, name: str, where: str) -> float:
    v = block[name]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
        raise ConfigError(f"{where}.{name}: expected a positive number, got {v!r}")
    return float(v)


def _sub(raw: dict, name: str, cls, where: str, kind) -> Any:
    block = raw.get(name, {})
    if not isinstance(block, dict):
        raise ConfigError(f"{name}: expected an object")
    known = set(cls.__dataclass_fields__)
    unknown = set(block) - known
    if unknown:
        raise ConfigError(f"{name}: unknown field(s) {sorted(unknown)}")
    out = cls()
    for k in block:
        setattr(out, k, kind(block, k, name))
    return out


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    unknown = set(raw) - {"nu_tilde", "grid", "test_functions", "truncation", "tolerances", "mc"}
    if unknown:
        raise ConfigError(f"unknown top-level field(s) {sorted(unknown)}")
    for req in ("nu_tilde", "grid", "test_functions"):
        if req not in raw:
            raise ConfigError(f"{req}: missing")

    nt = raw["nu_tilde"]
    if not isinstance(nt, dict) or (("atoms" in nt) == ("family" in nt)):
        raise ConfigError("nu_tilde: give exactly one of 'atoms' or 'family'")
    if "family" in nt:
        if nt["family"] not in FAMILIES:
            raise ConfigError(f"nu_tilde.family: unknown family {nt['family']!r}")
        nu = {"family": nt["family"]}
    else:
        atoms = []
        for i, pair in enumerate(nt["atoms"]):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ConfigError(f"nu_tilde.atoms[{i}]: expected [s, w]")
            try:
                s, w = as_number(pair[0]), as_number(pair[1])
            except MeasureError as exc:
                raise ConfigError(f"nu_tilde.atoms[{i}]: {exc}") from exc
            if s == 0:
                raise ConfigError(f"nu_tilde.atoms[{i}]: Levy measure charges zero")
            if not w > 0:
                raise ConfigError(f"nu_tilde.atoms[{i}]: mass must be positive")
            atoms.append([pair[0], pair[1]])
        if not atoms:
            raise ConfigError("nu_tilde.atoms: empty")
        nu = {"atoms": atoms}

    grid_block = raw["grid"]
    weights = grid_block.get("weights") if isinstance(grid_block, dict) else grid_block
    if not isinstance(weights, list) or not weights:
        raise ConfigError("grid.weights: expected a nonempty list")
    if any(isinstance(x, bool) or not isinstance(x, (int, float)) or not x > 0 for x in weights):
        raise ConfigError("grid.weights: all weights must be positive numbers")

    tfs = raw["test_functions"]
    if not isinstance(tfs, list) or not tfs:
        raise ConfigError("test_functions: expected a nonempty list of vectors")
    for i, f in enumerate(tfs):
        if not isinstance(f, list) or len(f) != len(weights):
            raise ConfigError(f"test_functions[{i}]: expected {len(weights)} values")
        if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in f):
            raise ConfigError(f"test_functions[{i}]: values must be numbers")

    tr = _sub(raw, "truncation", Truncation, "truncation", _int)
    tol = _sub(raw, "tolerances", Tolerances, "tolerances", _pos_float)
    mc = _sub(raw, "mc", MCConfig, "mc", _int)
    if tr.word_length < 0 or tr.max_degree < 0 or tr.ell2_dim < 1:
        raise ConfigError("truncation: sizes must be nonnegative (ell2_dim >= 1)")
    if tr.ell2_dim < tr.word_length + 1:
        raise ConfigError("truncation.ell2_dim: ell2_dim too small for word_length")
    if tr.max_degree < tr.word_length:
        raise ConfigError("truncation.max_degree: max_degree smaller than word_length")
    if mc.samples < 1:
        raise ConfigError("mc.samples: must be positive")
    return RunConfig(
        nu_tilde=nu,
        grid=list(weights),
        test_functions=[list(f) for f in tfs],
        truncation=tr,
        tolerances=tol,
        mc=mc,
    )


def parse_config(path) -> RunConfig:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return config_from_dict(raw)


def standard_config() -> RunConfig:
    """Two-point nu~ = (delta_-1 + delta_1)/2, grid weights (1/2, 1/2), phi = (1, -1), psi = (1, 1)."""
    return config_from_dict(
        {
            "nu_tilde": {"atoms": [[-1, "1/2"], [1, "1/2"]]},
            "grid": {"weights": [0.5, 0.5]},
            "test_functions": [[1.0, -1.0], [1.0, 1.0]],
            "truncation": {"max_degree": 4, "ell2_dim": 5, "word_length": 4},
            "mc": {"samples": 1_000_000, "seed": 20240611},
        }
    )


def three_atom_config() -> RunConfig:
    """3-atom nu~, 3-point grid, three fixed generic test functions."""
    return config_from_dict(
        {
            "nu_tilde": {"atoms": [[-1, "1/4"], [1, "1/2"], [2, "1/4"]]},
            "grid": {"weights": [0.2, 0.3, 0.5]},
            "test_functions": [
                [0.7, -1.1, 0.4],
                [1.3, 0.2, -0.6],
                [-0.5, 0.9, 1.2],
            ],
            "truncation": {"max_degree": 6, "ell2_dim": 7, "word_length": 6},
            "mc": {"samples": 200_000, "seed": 7},
        }
    )
