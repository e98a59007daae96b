"""Run-configuration files.

Flat ``section.key = value`` lines; ``#`` lines are comments. Vectors are
bracketed comma lists, matrices repeat the key once per row, and numeric
entries may be written as simple fractions (``1/3``). Example::

    chain.M = 4
    chain.x = [0.1, 0.2, 0.3, 0.4]
    chain.v = [3, 2, 1, 3]
    chain.P = [0, 1/3, 1/3, 1/3]
    chain.P = [1/3, 0, 1/3, 1/3]
    chain.P = [1/3, 1/3, 0, 1/3]
    chain.P = [1/3, 1/3, 1/3, 0]
    chain.i0 = 1

State indices in files are 1-based (``i0 = 1`` is the first state); the
Python API is 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basket import BasketContract
from .chain import ChainSpec
from .errors import ConfigError, ValidationError
from .montecarlo import MCConfig
from .occupation import MGFQuery
from .single_name import HazardSpec, fatality_probabilities
from .two_firm import TwoFirmParams

# value kinds: int | float | vec | matrix | str
_SCHEMA: dict[str, dict[str, str]] = {
    "chain": {"M": "int", "x": "vec", "v": "vec", "P": "matrix", "i0": "int"},
    "hazard": {"lambda": "vec", "p": "vec", "c": "float"},
    "contract": {
        "n": "int",
        "b": "float",
        "c": "float",
        "r": "float",
        "T": "float",
        "k": "int",
    },
    "two_firm": {
        "a1": "float",
        "a2": "float",
        "b1": "float",
        "b2": "float",
        "p": "float",
        "r": "float",
        "T": "float",
    },
    "mc": {"paths": "int", "seed": "int", "horizon": "float", "workers": "int"},
    "sweep": {"b_grid": "vec", "c_grid": "vec"},
    "mgf": {"u": "vec", "t": "float", "method": "str"},
    "output": {"format": "str", "path": "str"},
}


def _parse_number(token: str, section: str, key: str) -> float:
    token = token.strip()
    if "/" in token:
        num, _, den = token.partition("/")
        try:
            return float(num) / float(den)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(section, key, f"bad fraction {token!r}") from None
    try:
        return float(token)
    except ValueError:
        raise ConfigError(section, key, f"bad number {token!r}") from None


def _parse_vector(text: str, section: str, key: str) -> list[float]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ConfigError(section, key, "expected a bracketed list [a, b, ...]")
    inner = text[1:-1].strip()
    if not inner:
        raise ConfigError(section, key, "list must not be empty")
    return [_parse_number(tok, section, key) for tok in inner.split(",")]


@dataclass
class RunConfig:
    """Parsed configuration; section builders validate on demand so each
    subcommand only requires the sections it uses."""

    sections: dict[str, dict[str, object]]

    def has(self, section: str, key: str | None = None) -> bool:
        if section not in self.sections:
            return False
        return key is None or key in self.sections[section]

    def _get(self, section: str, key: str):
        if not self.has(section):
            raise ConfigError(section, None, "missing required section")
        if key not in self.sections[section]:
            raise ConfigError(section, key, "missing required key")
        return self.sections[section][key]

    def _get_default(self, section: str, key: str, default):
        if self.has(section, key):
            return self.sections[section][key]
        return default

    # -- builders ----------------------------------------------------------

    def chain_spec(self) -> ChainSpec:
        M = int(self._get("chain", "M"))
        x = self._get("chain", "x")
        v = self._get("chain", "v")
        P = self._get("chain", "P")
        try:
            spec = ChainSpec(x=np.asarray(x), v=np.asarray(v), P=np.asarray(P))
        except ValidationError as exc:
            raise ConfigError("chain", None, str(exc)) from exc
        if spec.M != M:
            raise ConfigError("chain", "M", f"M={M} but x has length {spec.M}")
        return spec

    def initial_state(self, spec: ChainSpec) -> int:
        i0 = int(self._get_default("chain", "i0", 1))
        if not 1 <= i0 <= spec.M:
            raise ConfigError("chain", "i0", f"i0={i0} outside 1..{spec.M}")
        return i0 - 1

    def hazard_spec(self, spec: ChainSpec) -> HazardSpec:
        lam = np.asarray(self._get("hazard", "lambda"), dtype=float)
        has_p = self.has("hazard", "p")
        has_c = self.has("hazard", "c")
        if has_p and has_c:
            raise ConfigError("hazard", "c", "give either p or c, not both")
        if has_p:
            p = np.asarray(self.sections["hazard"]["p"], dtype=float)
        elif has_c:
            c = float(self.sections["hazard"]["c"])
            try:
                p = fatality_probabilities(spec.x, c)
            except ValidationError as exc:
                raise ConfigError("hazard", "c", str(exc)) from exc
        else:
            raise ConfigError("hazard", "p", "missing fatality spec (p or c)")
        try:
            hazard = HazardSpec(lam=lam, p=p)
        except ValidationError as exc:
            raise ConfigError("hazard", None, str(exc)) from exc
        if hazard.M != spec.M:
            raise ConfigError("hazard", "lambda", "length does not match chain.M")
        return hazard

    def contract(self, spec: ChainSpec) -> BasketContract:
        try:
            return BasketContract(
                n=int(self._get("contract", "n")),
                b=float(self._get("contract", "b")),
                c=float(self._get("contract", "c")),
                r=float(self._get("contract", "r")),
                T=float(self._get("contract", "T")),
                k=int(self._get("contract", "k")),
                chain=spec,
                i0=self.initial_state(spec),
            )
        except ValidationError as exc:
            # degenerate-parameter errors keep their own type for exit codes
            if type(exc) is ValidationError:
                raise ConfigError("contract", None, str(exc)) from exc
            raise

    def contract_times(self) -> tuple[float, float]:
        """(r, T) for subcommands that need discounting but no basket."""
        return (
            float(self._get("contract", "r")),
            float(self._get("contract", "T")),
        )

    def two_firm_params(self) -> TwoFirmParams:
        try:
            return TwoFirmParams(
                a1=float(self._get("two_firm", "a1")),
                a2=float(self._get("two_firm", "a2")),
                b1=float(self._get("two_firm", "b1")),
                b2=float(self._get("two_firm", "b2")),
                p=float(self._get("two_firm", "p")),
                r=float(self._get("two_firm", "r")),
                T=float(self._get("two_firm", "T")),
            )
        except ValidationError as exc:
            raise ConfigError("two_firm", None, str(exc)) from exc

    def mc_config(
        self, seed_override: int | None = None, paths_override: int | None = None,
        horizon_default: float | None = None,
    ) -> MCConfig:
        paths = paths_override if paths_override is not None else int(
            self._get("mc", "paths")
        )
        seed = seed_override if seed_override is not None else int(
            self._get("mc", "seed")
        )
        if self.has("mc", "horizon"):
            horizon = float(self.sections["mc"]["horizon"])
        elif horizon_default is not None:
            horizon = float(horizon_default)
        else:
            raise ConfigError("mc", "horizon", "missing required key")
        workers = int(self._get_default("mc", "workers", 1))
        try:
            return MCConfig(paths=paths, seed=seed, horizon=horizon, workers=workers)
        except ValidationError as exc:
            raise ConfigError("mc", None, str(exc)) from exc

    def sweep_grids(self) -> tuple[list[float], list[float]]:
        b_grid = [float(b) for b in self._get("sweep", "b_grid")]
        c_grid = [float(c) for c in self._get("sweep", "c_grid")]
        return b_grid, c_grid

    def mgf_query(self, spec: ChainSpec) -> tuple[MGFQuery, str]:
        u = np.asarray(self._get("mgf", "u"), dtype=float)
        t = float(self._get("mgf", "t"))
        method = str(self._get_default("mgf", "method", "expm"))
        if method not in ("expm", "rk"):
            raise ConfigError("mgf", "method", f"unknown method {method!r}")
        try:
            query = MGFQuery(u=u, t=t, i0=self.initial_state(spec))
        except ValidationError as exc:
            raise ConfigError("mgf", None, str(exc)) from exc
        if u.shape != (spec.M,):
            raise ConfigError("mgf", "u", "length does not match chain.M")
        return query, method

    def output_format(self) -> str:
        fmt = str(self._get_default("output", "format", "csv"))
        if fmt not in ("csv", "json"):
            raise ConfigError("output", "format", f"unknown format {fmt!r}")
        return fmt

    def output_path(self) -> str | None:
        path = self._get_default("output", "path", None)
        return None if path is None else str(path)


def parse_config(text: str) -> RunConfig:
    """Parse and schema-check configuration text."""
    sections: dict[str, dict[str, object]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError("?", None, f"line {lineno}: expected 'section.key = value'")
        lhs, _, rhs = line.partition("=")
        lhs = lhs.strip()
        rhs = rhs.strip()
        if "." not in lhs:
            raise ConfigError("?", None, f"line {lineno}: key {lhs!r} lacks a section")
        section, _, key = lhs.partition(".")
        section = section.strip()
        key = key.strip()
        if section not in _SCHEMA:
            raise ConfigError(section, key, "unknown section")
        if key not in _SCHEMA[section]:
            raise ConfigError(section, key, "unknown key")
        kind = _SCHEMA[section][key]
        bucket = sections.setdefault(section, {})
        if kind == "matrix":
            row = _parse_vector(rhs, section, key)
            bucket.setdefault(key, []).append(row)
            continue
        if key in bucket:
            raise ConfigError(section, key, "duplicate key")
        if kind == "int":
            value = _parse_number(rhs, section, key)
            if value != int(value):
                raise ConfigError(section, key, f"expected an integer, got {rhs!r}")
            bucket[key] = int(value)
        elif kind == "float":
            bucket[key] = _parse_number(rhs, section, key)
        elif kind == "vec":
            bucket[key] = _parse_vector(rhs, section, key)
        else:  # str
            bucket[key] = rhs
    return RunConfig(sections=sections)


def load_config(path: str | Path) -> RunConfig:
    return parse_config(Path(path).read_text())
