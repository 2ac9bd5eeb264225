"""Scenario files: a YAML mapping that builds a WorldConfig, and its inverse.

Top-level keys: n, V, m, sep, seed, max_rounds, behavior, obstacles, init.
The behavior block takes kind, spacing, gain, leader_index, waypoints,
waypoint_tolerance, max_step. init takes exactly one of positions or box.
Validation errors always name the offending key.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import yaml

from .engine import InitSpec, WorldConfig
from .geom import Point2, Polygon
from .graphs import is_connected, visibility_graph
from .motion import BEHAVIOR_KINDS, BehaviorSpec

_TOP_KEYS = {"n", "V", "m", "sep", "seed", "max_rounds", "behavior", "obstacles", "init"}
_BEHAVIOR_KEYS = {"kind", "spacing", "gain", "leader_index", "waypoints", "waypoint_tolerance", "max_step"}
_INIT_KEYS = {"positions", "box"}


class ScenarioError(ValueError):
    """A scenario file failed to parse or validate."""


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ScenarioError(f"missing required key '{context}{key}'")
    return mapping[key]


def _as_int(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"'{key}' must be an integer, got {value!r}")
    return value


def _as_number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"'{key}' must be a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ScenarioError(f"'{key}' must be finite, got {value!r}")
    return v


def _as_pairs(value, key: str) -> list[tuple[float, float]]:
    if not isinstance(value, (list, tuple)):
        raise ScenarioError(f"'{key}' must be a list of [x, y] pairs")
    out = []
    for idx, item in enumerate(value):
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ScenarioError(f"'{key}[{idx}]' must be an [x, y] pair, got {item!r}")
        out.append((_as_number(item[0], f"{key}[{idx}][0]"), _as_number(item[1], f"{key}[{idx}][1]")))
    return out


def _check_keys(mapping: dict, allowed: set[str], context: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise ScenarioError(f"unknown key '{context}{key}' (allowed: {sorted(allowed)})")


def load_scenario(path) -> WorldConfig:
    """Parse and validate a scenario file into a WorldConfig."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioError(f"{path}: scenario file must be a mapping at the top level")
    _check_keys(raw, _TOP_KEYS, "")

    n = _as_int(_require(raw, "n", ""), "n")
    if n < 1:
        raise ScenarioError(f"'n' must be >= 1, got {n}")
    vis_range = _as_number(_require(raw, "V", ""), "V")
    if vis_range <= 0:
        raise ScenarioError(f"'V' must be positive, got {vis_range}")
    rng_plus = _as_int(raw.get("m", 0), "m")
    if rng_plus < 0:
        raise ScenarioError(f"'m' must be >= 0, got {rng_plus}")
    sep = _as_number(raw.get("sep", vis_range / 10.0), "sep")
    if not (0.0 <= sep < vis_range):
        raise ScenarioError(f"'sep' must satisfy 0 <= sep < V, got sep={sep}, V={vis_range}")
    seed = _as_int(raw.get("seed", 0), "seed")
    max_rounds = _as_int(raw.get("max_rounds", 1000), "max_rounds")
    if max_rounds < 0:
        raise ScenarioError(f"'max_rounds' must be >= 0, got {max_rounds}")

    braw = _require(raw, "behavior", "")
    if not isinstance(braw, dict):
        raise ScenarioError("'behavior' must be a mapping")
    _check_keys(braw, _BEHAVIOR_KEYS, "behavior.")
    kind = _require(braw, "kind", "behavior.")
    if kind not in BEHAVIOR_KINDS:
        raise ScenarioError(f"'behavior.kind' must be one of {list(BEHAVIOR_KINDS)}, got {kind!r}")
    spacing = _as_number(braw.get("spacing", vis_range / 10.0), "behavior.spacing")
    gain = _as_number(braw.get("gain", 0.5), "behavior.gain")
    if not (0.0 < gain <= 1.0):
        raise ScenarioError(f"'behavior.gain' must lie in (0, 1], got {gain}")
    leader_index = _as_int(braw.get("leader_index", 0), "behavior.leader_index")
    if kind == "leader_follow" and not (0 <= leader_index < n):
        raise ScenarioError(f"'behavior.leader_index' must lie in [0, {n}), got {leader_index}")
    waypoints = _as_pairs(braw.get("waypoints", []), "behavior.waypoints")
    tol = _as_number(braw.get("waypoint_tolerance", 0.05 * vis_range), "behavior.waypoint_tolerance")
    if tol < 0:
        raise ScenarioError(f"'behavior.waypoint_tolerance' must be >= 0, got {tol}")
    max_step = _as_number(braw.get("max_step", 0.2 * vis_range), "behavior.max_step")
    if max_step <= 0:
        raise ScenarioError(f"'behavior.max_step' must be positive, got {max_step}")
    if sep > 0.0:
        if spacing < sep:
            raise ScenarioError(
                f"'behavior.spacing' must be >= 'sep' ({sep}) so the target spacing is reachable, got {spacing}"
            )
        limit = 0.5 * (vis_range - sep)
        if max_step > limit + 1e-12:
            raise ScenarioError(
                f"'behavior.max_step' must be <= (V - sep) / 2 = {limit} to keep the separation floor, got {max_step}"
            )

    obstacles = []
    oraw = raw.get("obstacles", [])
    if oraw is None:
        oraw = []
    if not isinstance(oraw, (list, tuple)):
        raise ScenarioError("'obstacles' must be a list of vertex lists")
    for idx, verts in enumerate(oraw):
        pairs = _as_pairs(verts, f"obstacles[{idx}]")
        try:
            obstacles.append(Polygon(tuple(Point2(x, y) for x, y in pairs)))
        except ValueError as exc:
            raise ScenarioError(f"'obstacles[{idx}]': {exc}") from exc

    iraw = _require(raw, "init", "")
    if not isinstance(iraw, dict):
        raise ScenarioError("'init' must be a mapping")
    _check_keys(iraw, _INIT_KEYS, "init.")
    if ("positions" in iraw) == ("box" in iraw):
        raise ScenarioError("'init' must give exactly one of 'positions' or 'box'")
    if "positions" in iraw:
        positions = _as_pairs(iraw["positions"], "init.positions")
        if len(positions) != n:
            raise ScenarioError(f"'init.positions' must list n={n} points, got {len(positions)}")
        xy = np.asarray(positions, dtype=float)
        if not is_connected(visibility_graph(xy, vis_range)):
            raise ScenarioError("'init.positions': initial visibility graph is disconnected")
        init = InitSpec(positions=tuple(positions))
    else:
        box = iraw["box"]
        if not isinstance(box, (list, tuple)) or len(box) != 4:
            raise ScenarioError("'init.box' must be [xmin, ymin, xmax, ymax]")
        xmin, ymin, xmax, ymax = (_as_number(v, f"init.box[{k}]") for k, v in enumerate(box))
        if not (xmin < xmax and ymin < ymax):
            raise ScenarioError(f"'init.box' must satisfy xmin < xmax and ymin < ymax, got {box}")
        init = InitSpec(box=(xmin, ymin, xmax, ymax))

    behavior = BehaviorSpec(
        kind=kind,
        max_step=max_step,
        desired_spacing=spacing,
        spring_gain=gain,
        leader_index=leader_index,
        waypoints=tuple(waypoints),
        waypoint_tolerance=tol,
    )
    try:
        return WorldConfig(
            n=n,
            vis_range=vis_range,
            behavior=behavior,
            init=init,
            rng_plus=rng_plus,
            min_separation=sep,
            obstacles=tuple(obstacles),
            max_rounds=max_rounds,
            seed=seed,
        )
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def save_scenario(world: WorldConfig, path) -> None:
    """Write a scenario file that load_scenario turns back into this config."""
    spec = world.behavior
    doc: dict = {
        "n": world.n,
        "V": world.vis_range,
        "m": world.rng_plus,
        "sep": world.min_separation,
        "seed": world.seed,
        "max_rounds": world.max_rounds,
        "behavior": {
            "kind": spec.kind,
            "spacing": spec.desired_spacing,
            "gain": spec.spring_gain,
            "leader_index": spec.leader_index,
            "waypoints": [list(w) for w in spec.waypoints],
            "waypoint_tolerance": spec.waypoint_tolerance,
            "max_step": spec.max_step,
        },
    }
    if world.obstacles:
        doc["obstacles"] = [[[p.x, p.y] for p in poly.vertices] for poly in world.obstacles]
    if world.init.positions is not None:
        doc["init"] = {"positions": [list(p) for p in world.init.positions]}
    else:
        doc["init"] = {"box": list(world.init.box)}
    Path(path).write_text(yaml.safe_dump(doc, sort_keys=False))
