"""Scenario files: a strict TOML format describing one allocation problem.

    [signal]     p_db, constellation ("QPSK" | "16APSK"), ring_ratio
    [hpa]        alpha_i, beta_i, alpha_q, beta_q, expansion_point
    [omux]       path ("default" or a CSV path relative to the file), bandwidth_mhz, guard_mhz
    [numerics]   L, K, OSF, seed or seeds (list), n_symbols
    [[carriers]] label, rs_mbauds, rolloff, power_fraction

Every section except [[carriers]] is optional; unknown sections and keys are
errors, because a mistyped key would otherwise fall back to a default and
silently change the result.
"""
from __future__ import annotations

import sys
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .allocator import Scenario
from .carriers import CarrierSpec
from .hpa import SalehParams
from .omux import default_characteristic, read_characteristic


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario file."""


_SECTIONS = {
    "signal": {"p_db": float, "constellation": str, "ring_ratio": float},
    "hpa": {"alpha_i": float, "beta_i": float, "alpha_q": float, "beta_q": float, "expansion_point": float},
    "omux": {"path": str, "bandwidth_mhz": float, "guard_mhz": float},
    "numerics": {"L": int, "K": int, "OSF": int, "seed": int, "seeds": list, "n_symbols": int},
}
_CARRIER_KEYS = {"label": str, "rs_mbauds": float, "rolloff": float, "power_fraction": float}
_REQUIRED_CARRIER_KEYS = {"rs_mbauds", "rolloff", "power_fraction"}


def _typed(where: str, key: str, value, kind):
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise ScenarioError(f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _section(doc: dict, name: str) -> dict:
    raw = doc.get(name, {})
    if not isinstance(raw, dict):
        raise ScenarioError(f"[{name}] must be a table")
    spec = _SECTIONS[name]
    unknown = sorted(set(raw) - set(spec))
    if unknown:
        raise ScenarioError(f"[{name}]: unknown key(s) {', '.join(unknown)}")
    return {k: _typed(name, k, v, spec[k]) for k, v in raw.items()}


def parse_scenario(text: str, base_dir: Path | None = None) -> Scenario:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"not valid TOML: {exc}") from exc
    unknown = sorted(set(doc) - set(_SECTIONS) - {"carriers"})
    if unknown:
        raise ScenarioError(f"unknown section(s) {', '.join(unknown)}")
    signal, hpa, omux, num = (_section(doc, n) for n in ("signal", "hpa", "omux", "numerics"))

    rows = doc.get("carriers")
    if not isinstance(rows, list) or not rows:
        raise ScenarioError("need at least one [[carriers]] entry")
    carriers = []
    for i, row in enumerate(rows, 1):
        where = f"carriers[{i}]"
        if not isinstance(row, dict):
            raise ScenarioError(f"{where} must be a table")
        bad = sorted(set(row) - set(_CARRIER_KEYS))
        if bad:
            raise ScenarioError(f"{where}: unknown key(s) {', '.join(bad)}")
        missing = sorted(_REQUIRED_CARRIER_KEYS - set(row))
        if missing:
            raise ScenarioError(f"{where}: missing key(s) {', '.join(missing)}")
        vals = {k: _typed(where, k, v, _CARRIER_KEYS[k]) for k, v in row.items()}
        if vals["rs_mbauds"] <= 0 or not 0 < vals["power_fraction"] <= 1:
            raise ScenarioError(f"{where}: rs_mbauds must be > 0 and power_fraction in (0, 1]")
        if not 0.05 <= vals["rolloff"] <= 1:
            raise ScenarioError(f"{where}: rolloff must lie in [0.05, 1]")
        carriers.append(CarrierSpec(vals["rs_mbauds"], vals["rolloff"], vals["power_fraction"],
                                    label=vals.get("label", f"C{i}")))

    if "seed" in num and "seeds" in num:
        raise ScenarioError("[numerics]: give either seed or seeds, not both")
    seeds = num.get("seeds", [num.get("seed", 1)])
    if not seeds or not all(isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in seeds):
        raise ScenarioError("[numerics].seeds: expected a non-empty list of non-negative integers")

    path = omux.get("path", "default")
    try:
        if path == "default":
            char = default_characteristic()
        else:
            p = Path(path)
            if not p.is_absolute() and base_dir is not None:
                p = base_dir / p
            char = read_characteristic(p)
    except OSError as exc:
        raise ScenarioError(f"cannot read OMUX characteristic: {exc}") from exc

    try:
        return Scenario(
            carriers=tuple(carriers),
            p_db=signal.get("p_db", -15.0),
            omux=char,
            omux_bandwidth_mhz=omux.get("bandwidth_mhz", 500.0),
            guard_mhz=omux.get("guard_mhz", 0.0),
            saleh=SalehParams(**{k: hpa[k] for k in ("alpha_i", "beta_i", "alpha_q", "beta_q") if k in hpa}),
            expansion_point=hpa.get("expansion_point", 0.0),
            constellation=signal.get("constellation", "QPSK"),
            ring_ratio=signal.get("ring_ratio", 2.7),
            L=num.get("L", 10),
            truncation_span=num.get("K", 32),
            oversampling=num.get("OSF", 16),
            n_symbols=num.get("n_symbols", 100_000),
            seeds=tuple(seeds),
        )
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    return parse_scenario(text, path.parent)
