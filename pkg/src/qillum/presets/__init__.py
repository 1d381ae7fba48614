"""Scenario and table presets shipped with the package, plus YAML loading."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import yaml

from ..metrics import StateEntry
from ..states import ProbeSpec, PureState, build_probe, parse_label

PROBE_KEYS = {"family", "label", "dims", "d", "roles", "theta", "weights", "pair", "blocks", "amps"}


class ConfigError(ValueError):
    """A scenario or preset could not be read or understood."""


@dataclass(frozen=True)
class Reference:
    """Published mean values for one table cell (``holevo`` in nats)."""

    hb: float | None
    holevo: float | None


def _read_resource(name: str) -> dict:
    text = resources.files(__package__).joinpath(name).read_text(encoding="utf-8")
    return yaml.safe_load(text)


@lru_cache(maxsize=None)
def _scenarios() -> dict:
    return _read_resource("scenarios.yaml")


@lru_cache(maxsize=None)
def _suites() -> dict:
    return _read_resource("tables.yaml")


def scenario_names() -> list[str]:
    return sorted(_scenarios())


def suite_names() -> list[str]:
    return list(_suites())


def probe_from_mapping(m: Mapping[str, Any], d: int | None = None) -> PureState:
    """Build a probe from configuration keys.

    Either ``label`` (hyphen notation, with per-mode dimension ``d``) or
    ``family`` must be given; ``dims`` may be replaced by ``d`` plus ``roles``.
    """
    unknown = set(m) - PROBE_KEYS
    if unknown:
        raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
    d = int(m.get("d", d or 2))
    try:
        if "label" in m:
            if "family" in m:
                raise ConfigError("give either 'label' or 'family', not both")
            return parse_label(str(m["label"]), d)
        if "family" not in m:
            raise ConfigError("scenario needs a 'family' or a 'label'")
        roles = tuple(str(m["roles"])) if isinstance(m.get("roles"), str) else tuple(m.get("roles", ()))
        if not roles:
            raise ConfigError("scenario needs 'roles'")
        dims = tuple(m["dims"]) if "dims" in m else (d,) * len(roles)
        amps = m.get("amps")
        if amps is not None:
            amps = tuple(complex(a) if not isinstance(a, (list, tuple)) else complex(*a) for a in amps)
        spec = ProbeSpec(
            family=str(m["family"]),
            dims=dims,
            roles=roles,
            theta=float(m.get("theta", math.pi / 2)),
            pair=tuple(m["pair"]) if "pair" in m else None,
            blocks=tuple(tuple(b) for b in m["blocks"]) if "blocks" in m else None,
            weights=tuple(m["weights"]) if "weights" in m else None,
            amps=amps,
        )
        return build_probe(spec)
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc


def load_scenario(ref: str | Path | Mapping[str, Any]) -> PureState:
    """Probe from a preset name, a YAML file path or an already-parsed mapping."""
    if isinstance(ref, Mapping):
        return probe_from_mapping(ref)
    ref = str(ref)
    presets = _scenarios()
    if ref in presets:
        return probe_from_mapping(presets[ref])
    path = Path(ref)
    if not path.is_file():
        raise ConfigError(f"{ref!r} is neither a preset ({', '.join(sorted(presets))}) nor a file")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, Mapping):
        raise ConfigError(f"{path} must hold a mapping of scenario keys")
    if "probe" in data:
        data = data["probe"]
    return probe_from_mapping(data)


def _suite(name: str) -> dict:
    suites = _suites()
    if name not in suites:
        raise ConfigError(f"unknown table preset {name!r}; expected one of {list(suites)}")
    return suites[name]


def _suite_rows(name: str) -> list[tuple[int, dict]]:
    suite = _suite(name)
    rows = []
    for inc in suite.get("include", ()):
        rows.extend(_suite_rows(inc))
    rows.extend((suite["d"], r) for r in suite["rows"])
    return rows


def suite_entries(name: str) -> list[StateEntry]:
    """Probe states of a preset table, in published column order."""
    out = []
    for d, row in _suite_rows(name):
        probe_keys = {k: v for k, v in row.items() if k in PROBE_KEYS}
        out.append(StateEntry(row["configuration"], row["state"], probe_from_mapping(probe_keys, d)))
    return out


def suite_references(name: str) -> dict[tuple[str, str], Reference]:
    """Published values keyed by ``(configuration, state)``."""
    return {(r["configuration"], r["state"]): Reference(r.get("hb"), r.get("holevo"))
            for _, r in _suite_rows(name)}


def suite_is_expensive(name: str) -> bool:
    return bool(_suite(name).get("expensive", False))
