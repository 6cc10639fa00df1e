"""Fan input files: a single JSON object with rays and maximal cones.

    {
      "name": "P2",                      # optional
      "lattice_rank": 2,
      "rays": [[1, 0], [0, 1], [-1, -1]],
      "max_cones": [[0, 1], [1, 2], [2, 0]]
    }

Rays are primitivized on load (with a warning) and indices are checked.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .cones import Fan, primitive
from .intlinalg import Lattice


class FanFileError(Exception):
    """Malformed fan file; the message carries position info when the
    JSON itself is broken."""


@dataclass
class FanFile:
    lattice_rank: int
    rays: tuple
    max_cones: tuple
    name: str | None = None
    warnings: list = field(default_factory=list)

    def to_jsonable(self) -> dict:
        out = {
            "lattice_rank": self.lattice_rank,
            "rays": [list(r) for r in self.rays],
            "max_cones": [list(c) for c in self.max_cones],
        }
        if self.name:
            out["name"] = self.name
        return out


def parse_fan_file(text: str, origin: str = "<string>") -> FanFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FanFileError(
            f"{origin}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(data, dict):
        raise FanFileError(f"{origin}: expected a JSON object")
    try:
        rank = int(data["lattice_rank"])
        rays_in = data["rays"]
        cones_in = data["max_cones"]
    except KeyError as e:
        raise FanFileError(f"{origin}: missing field {e.args[0]!r}") from e
    if rank < 1:
        raise FanFileError(f"{origin}: lattice_rank must be positive")
    warnings = []
    rays = []
    for i, r in enumerate(rays_in):
        if not isinstance(r, list) or len(r) != rank or not all(
            isinstance(x, int) for x in r
        ):
            raise FanFileError(f"{origin}: ray {i} is not an integer vector of length {rank}")
        p = primitive(r)
        if p is None:
            raise FanFileError(f"{origin}: ray {i} is zero")
        if list(p) != r:
            warnings.append(f"ray {i} {r} normalized to primitive {list(p)}")
        rays.append(p)
    cones = []
    for i, c in enumerate(cones_in):
        if not isinstance(c, list) or not all(isinstance(x, int) for x in c):
            raise FanFileError(f"{origin}: max cone {i} is not a list of ray indices")
        for x in c:
            if not 0 <= x < len(rays):
                raise FanFileError(f"{origin}: max cone {i} uses unknown ray index {x}")
        cones.append(tuple(c))
    return FanFile(
        lattice_rank=rank,
        rays=tuple(rays),
        max_cones=tuple(cones),
        name=data.get("name"),
        warnings=warnings,
    )


def load_fan_file(path: str | Path) -> FanFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise FanFileError(f"cannot read {path}: {e}") from e
    return parse_fan_file(text, origin=str(path))


def build_fan(ff: FanFile) -> Fan:
    return Fan.from_rays_and_indices(
        Lattice(ff.lattice_rank), ff.rays, ff.max_cones
    )
