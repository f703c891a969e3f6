"""Uniform point sampling of boxes and prisms for the brute-force oracle."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
import shapely

from app.geometry.primitives import OrientedBox, Prism

DEFAULT_SEED = 42

Sampleable = Union[OrientedBox, Prism]


def sample_box_volume(box: OrientedBox, n: int, rng: np.random.Generator) -> np.ndarray:
    """Per-axis uniform draws in box-local coordinates, mapped to the box frame."""
    he = np.asarray(box.half_extents)
    local = rng.uniform(-1.0, 1.0, size=(n, 3)) * he
    return box.to_global(local)


def sample_box_surface(box: OrientedBox, n: int, rng: np.random.Generator) -> np.ndarray:
    """Area-weighted uniform samples over the six faces."""
    hx, hy, hz = box.half_extents
    # face pairs normal to x, y, z
    areas = np.array([hy * hz, hx * hz, hx * hy])
    axis = rng.choice(3, size=n, p=areas / areas.sum())
    local = rng.uniform(-1.0, 1.0, size=(n, 3)) * np.array([hx, hy, hz])
    side = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    he = np.array([hx, hy, hz])
    rows = np.arange(n)
    local[rows, axis] = side * he[axis]
    return box.to_global(local)


def sample_prism_volume(prism: Prism, n: int, rng: np.random.Generator) -> np.ndarray:
    """Rejection sampling of the footprint, uniform in height."""
    minx, miny, maxx, maxy = prism.shape.bounds
    fill = max(prism.footprint.area / max((maxx - minx) * (maxy - miny), 1e-300), 1e-3)
    chunks, have = [], 0
    while have < n:
        batch = int((n - have) / fill * 1.2) + 16
        xy = np.column_stack([rng.uniform(minx, maxx, batch), rng.uniform(miny, maxy, batch)])
        keep = xy[shapely.contains_xy(prism.shape, xy[:, 0], xy[:, 1])]
        chunks.append(keep)
        have += len(keep)
    xy = np.vstack(chunks)[:n]
    z = rng.uniform(prism.z_min, prism.z_max, n)
    return np.column_stack([xy, z])


def box_surface_area(box: OrientedBox) -> float:
    hx, hy, hz = box.half_extents
    return 8.0 * (hx * hy + hx * hz + hy * hz)


@dataclass(frozen=True)
class SampledRegion:
    """N uniform samples of a region, reproducible from the seed."""

    source: Sampleable
    points: np.ndarray = field(repr=False, compare=False)
    seed: int
    surface: bool = False

    @classmethod
    def create(cls, source: Sampleable, n: int, seed: int = DEFAULT_SEED, surface: bool = False) -> "SampledRegion":
        if n <= 0:
            raise ValueError(f"sample count must be positive, got {n}")
        rng = np.random.default_rng(seed)
        if isinstance(source, OrientedBox):
            pts = sample_box_surface(source, n, rng) if surface else sample_box_volume(source, n, rng)
        else:
            if surface:
                raise ValueError("surface sampling is only defined for boxes")
            pts = sample_prism_volume(source, n, rng)
        region = cls(source, pts, seed, surface)
        region.verify()
        return region

    @property
    def count(self) -> int:
        return len(self.points)

    def spacing(self) -> float:
        """Typical distance between neighbouring samples."""
        if isinstance(self.source, OrientedBox):
            if self.surface:
                return float(np.sqrt(box_surface_area(self.source) / self.count))
            return float(np.cbrt(self.source.volume / self.count))
        return float(np.cbrt(self.source.volume / self.count))

    def verify(self, tol: float = 1e-9):
        """Recheck that every sample lies in its source region."""
        if isinstance(self.source, OrientedBox):
            inside = self.source.contains_points(self.points, tol=tol)
        else:
            inside = (
                shapely.contains_xy(shapely.buffer(self.source.shape, tol), self.points[:, 0], self.points[:, 1])
                & (self.points[:, 2] >= self.source.z_min - tol)
                & (self.points[:, 2] <= self.source.z_max + tol)
            )
        if not bool(np.all(inside)):
            raise RuntimeError(f"{int(np.sum(~inside))} samples fall outside their source region")
