#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Module for managing map profiles and turning map specs into bundles.

A map spec is a JSON object with a "kind":

    {"kind": "lemniscate", "s": 3}
    {"kind": "two_corner", "theta1": "3/4pi"}
    {"kind": "laurent", "leading": [1, 0], "constant": [0, 0],
     "tail": [[re, im], ...], "finite": true,
     "corners": [{"theta": 1.57, "lambda": 0.5, "A": [re, im], "z": [re, im]}]}

Profiles wrap a spec with an "id", a "name" and a "description".
"""

import json
import math
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from faberlab.core.conformal import (
    DEFAULT_TRUNCATION,
    CornerData,
    LaurentMap,
    MapBundle,
    lemniscate_map,
    two_corner_map,
)
from faberlab.core.exceptions import DomainError, MapSpecError
from faberlab.utils.config import ConfigError, parse_angle

logger = logging.getLogger(__name__)

DEFAULT_CORNER_TOL = 1e-6


class MapProfileManager:
    """
    Manages named map profiles.

    Profiles ship in faberlab/data/maps; a custom directory may add more or
    override shipped ids.
    """

    def __init__(self, custom_profiles_dir: Optional[Union[str, Path]] = None) -> None:
        """
        Initialize the map profile manager.

        Args:
            custom_profiles_dir: Optional directory containing extra profiles
        """
        self.profiles: Dict[str, Dict[str, Any]] = {}
        self.system_profiles_dir = Path(__file__).parent.parent / "data" / "maps"
        self.custom_profiles_dir = Path(custom_profiles_dir) if custom_profiles_dir else None
        self._load_profiles()

    def _load_profiles(self) -> None:
        if self.system_profiles_dir.exists():
            self._load_profiles_from_dir(self.system_profiles_dir)
        if self.custom_profiles_dir and self.custom_profiles_dir.exists():
            self._load_profiles_from_dir(self.custom_profiles_dir)

    def _load_profiles_from_dir(self, directory: Path) -> None:
        for profile_file in sorted(directory.glob("*.json")):
            try:
                with open(profile_file, "r") as f:
                    profile_data = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                logger.error(f"Error loading map profile {profile_file}: {str(e)}")
                continue
            if "id" not in profile_data or "spec" not in profile_data:
                logger.warning(f"Map profile missing 'id' or 'spec': {profile_file}")
                continue
            self.profiles[profile_data["id"]] = profile_data
            logger.debug(f"Loaded map profile: {profile_data['id']}")

    def get_profile(self, profile_id: str) -> Optional[Dict[str, Any]]:
        """
        Get a map profile by id.

        Returns:
            Profile data or None if not found
        """
        return self.profiles.get(profile_id)

    def get_all_profiles(self) -> List[Dict[str, Any]]:
        return list(self.profiles.values())


def resolve_map_argument(
    argument: str,
    manager: Optional[MapProfileManager] = None,
) -> Dict[str, Any]:
    """
    Turn a --map argument into a spec dict.

    The argument is tried as a profile id, then as a path to a JSON file
    (either a bare spec or a profile), then as inline JSON.

    Raises:
        MapSpecError: If nothing matches
    """
    manager = manager or MapProfileManager()
    profile = manager.get_profile(argument)
    if profile is not None:
        return dict(profile["spec"], name=profile["id"])

    path = Path(argument)
    text: Optional[str] = None
    if path.suffix == ".json" or path.is_file():
        try:
            text = path.read_text()
        except OSError as e:
            raise MapSpecError(f"cannot read map spec {argument}: {str(e)}")
    elif argument.lstrip().startswith("{"):
        text = argument

    if text is None:
        known = ", ".join(sorted(manager.profiles))
        raise MapSpecError(f"unknown map {argument!r}; known profiles: {known}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise MapSpecError(f"map spec is not valid JSON: {str(e)}")
    if not isinstance(data, dict):
        raise MapSpecError("map spec must be a JSON object")
    if "spec" in data:
        return dict(data["spec"], name=data.get("id", ""))
    return data


def _complex(value: Any, key: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise MapSpecError(f"{key} must be a number or a [re, im] pair, got {value!r}")


def _corner_from_spec(entry: Dict[str, Any], lmap: LaurentMap, index: int) -> CornerData:
    try:
        theta, theta_frac = parse_angle(entry["theta"])
        lam = float(entry["lambda"])
        A = _complex(entry["A"], f"corners[{index}].A")
    except KeyError as e:
        raise MapSpecError(f"corners[{index}] is missing {str(e)}")
    except ConfigError as e:
        raise MapSpecError(f"corners[{index}]: {str(e)}")
    theta = math.fmod(theta, 2.0 * math.pi)
    if theta < 0:
        theta += 2.0 * math.pi
    omega = complex(np.exp(1j * theta))

    computed = complex(lmap.value(np.asarray(omega)))
    if "z" in entry:
        z = _complex(entry["z"], f"corners[{index}].z")
        tol = float(entry.get("corner_tol", DEFAULT_CORNER_TOL))
        if abs(computed - z) > tol * (1.0 + abs(z)):
            raise MapSpecError(
                f"corners[{index}].z={z} disagrees with psi(omega)={computed} "
                f"(tolerance {tol:g})"
            )
    else:
        z = computed

    try:
        return CornerData(
            omega=omega,
            theta=theta,
            lam=lam,
            z=z,
            A=A,
            r=entry.get("r"),
            m=entry.get("m"),
            theta_over_pi=theta_frac,
        )
    except DomainError as e:
        raise MapSpecError(f"corners[{index}]: {str(e)}")


def _laurent_bundle(spec: Dict[str, Any], K: int) -> MapBundle:
    if "tail" not in spec or "corners" not in spec:
        raise MapSpecError("laurent map spec needs 'tail' and 'corners'")
    leading = _complex(spec.get("leading", 1.0), "leading")
    constant = _complex(spec.get("constant", 0.0), "constant")
    tail = np.array([_complex(c, "tail") for c in spec["tail"]], dtype=complex)
    if spec.get("finite", False) and tail.size < K:
        tail = np.concatenate([tail, np.zeros(K - tail.size, dtype=complex)])
    try:
        lmap = LaurentMap(leading, constant, tail)
    except DomainError as e:
        raise MapSpecError(str(e))
    corners = tuple(_corner_from_spec(entry, lmap, i) for i, entry in enumerate(spec["corners"]))
    return MapBundle(lmap, corners, kind="laurent", name=str(spec.get("name", "laurent")), params={})


def bundle_from_spec(spec: Dict[str, Any], K: int = DEFAULT_TRUNCATION) -> MapBundle:
    """
    Build a MapBundle from a spec dict.

    Args:
        spec: Map spec (see module docstring)
        K: Laurent truncation for maps with an infinite tail

    Raises:
        MapSpecError: On an unknown kind or inconsistent data
    """
    kind = spec.get("kind")
    try:
        if kind == "lemniscate":
            if "s" not in spec:
                raise MapSpecError("lemniscate spec needs 's'")
            bundle = lemniscate_map(int(spec["s"]), K)
        elif kind == "two_corner":
            if "theta1" not in spec:
                raise MapSpecError("two_corner spec needs 'theta1'")
            theta1, frac = parse_angle(spec["theta1"])
            bundle = two_corner_map(theta1, K, frac)
        elif kind == "laurent":
            bundle = _laurent_bundle(spec, K)
        else:
            raise MapSpecError(f"unknown map kind {kind!r}")
    except ConfigError as e:
        raise MapSpecError(str(e))
    except DomainError as e:
        raise MapSpecError(f"invalid {kind} map: {str(e)}")

    if spec.get("name") and bundle.name != spec["name"]:
        bundle = MapBundle(bundle.map, bundle.corners, bundle.kind, str(spec["name"]), bundle.params)
    logger.info(f"Built map {bundle.name} ({bundle.kind}, K={bundle.map.K}, {len(bundle.corners)} corners)")
    return bundle
