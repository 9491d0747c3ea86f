"""Spherical grid of candidate directions of arrival.

The same grid indexes the audio projection head output, the visual crop
stack, and the contrastive losses, so it is built once and treated as
immutable. Points are placed on a Fibonacci lattice, which is deterministic
and close to uniform for any point count.

Spherical convention used throughout the package: azimuth theta is measured
from +x toward +y, elevation phi from the xy-plane toward +z, so that
``(x, y, z) = (cos phi cos theta, cos phi sin theta, sin phi)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GOLDEN_RATIO = (1.0 + np.sqrt(5.0)) / 2.0

_UNIT_TOL = 1e-6


def sph_to_cart(azimuth, elevation) -> np.ndarray:
    """Unit vector(s) for azimuth/elevation angles in radians."""
    azimuth = np.asarray(azimuth, dtype=float)
    elevation = np.asarray(elevation, dtype=float)
    return np.stack(
        [
            np.cos(elevation) * np.cos(azimuth),
            np.cos(elevation) * np.sin(azimuth),
            np.sin(elevation),
        ],
        axis=-1,
    )


def cart_to_sph(v):
    """(azimuth, elevation) in radians for unit vector(s) ``v``."""
    v = np.asarray(v, dtype=float)
    azimuth = np.arctan2(v[..., 1], v[..., 0])
    elevation = np.arcsin(np.clip(v[..., 2], -1.0, 1.0))
    return azimuth, elevation


def angular_distance(u, v):
    """Great-circle angle in [0, pi] between unit vectors (broadcasts over
    leading axes)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise ValueError("angular_distance: inputs must be finite")
    for name, a in (("u", u), ("v", v)):
        norms = np.linalg.norm(a, axis=-1)
        if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
            raise ValueError(f"angular_distance: {name} must be unit norm")
    dot = np.sum(u * v, axis=-1)
    return np.arccos(np.clip(dot, -1.0, 1.0))


@dataclass(frozen=True)
class DoaGrid:
    """K candidate directions with their azimuth/elevation angles.

    Immutable after construction (backing arrays are made read-only), so it
    can be shared freely across threads.
    """

    directions: np.ndarray  # (K, 3) unit vectors
    azimuths: np.ndarray  # (K,) radians in (-pi, pi]
    elevations: np.ndarray  # (K,) radians in [-pi/2, pi/2]

    def __post_init__(self):
        directions = np.ascontiguousarray(self.directions, dtype=float)
        azimuths = np.ascontiguousarray(self.azimuths, dtype=float)
        elevations = np.ascontiguousarray(self.elevations, dtype=float)
        if directions.ndim != 2 or directions.shape[1] != 3:
            raise ValueError("DoaGrid: directions must have shape (K, 3)")
        k = directions.shape[0]
        if k < 1:
            raise ValueError("DoaGrid: need at least one direction")
        if azimuths.shape != (k,) or elevations.shape != (k,):
            raise ValueError("DoaGrid: angle arrays must have shape (K,)")
        norms = np.linalg.norm(directions, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("DoaGrid: directions must be unit norm")
        rebuilt = sph_to_cart(azimuths, elevations)
        if np.max(np.abs(rebuilt - directions)) > 1e-9:
            raise ValueError("DoaGrid: angles disagree with directions")
        if k > 1:
            gram = np.clip(directions @ directions.T, -1.0, 1.0)
            np.fill_diagonal(gram, -1.0)
            if np.max(gram) >= 1.0:
                raise ValueError("DoaGrid: directions must be pairwise distinct")
        for arr in (directions, azimuths, elevations):
            arr.flags.writeable = False
        object.__setattr__(self, "directions", directions)
        object.__setattr__(self, "azimuths", azimuths)
        object.__setattr__(self, "elevations", elevations)

    @property
    def K(self) -> int:
        return self.directions.shape[0]


def build_fibonacci_grid(K: int) -> DoaGrid:
    """Fibonacci lattice with offset 0.5: z_k = 1 - 2(k+0.5)/K, azimuth
    2*pi*k/golden_ratio wrapped to (-pi, pi]. Deterministic for fixed K."""
    if K < 1:
        raise ValueError("build_fibonacci_grid: K must be >= 1")
    k = np.arange(K, dtype=float)
    z = 1.0 - 2.0 * (k + 0.5) / K
    azimuth = np.mod(2.0 * np.pi * k / GOLDEN_RATIO, 2.0 * np.pi)
    azimuth = np.where(azimuth > np.pi, azimuth - 2.0 * np.pi, azimuth)
    elevation = np.arcsin(np.clip(z, -1.0, 1.0))
    return DoaGrid(
        directions=sph_to_cart(azimuth, elevation),
        azimuths=azimuth,
        elevations=elevation,
    )


def nearest_doa(grid: DoaGrid, v) -> int:
    """Index of the grid direction closest in angle to unit vector ``v``
    (ties go to the smallest index)."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError("nearest_doa: v must be a single 3-vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("nearest_doa: v must be finite")
    if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
        raise ValueError("nearest_doa: v must be unit norm")
    return int(np.argmax(grid.directions @ v))


def grid_table(grid: DoaGrid) -> str:
    """Plain-text table (index, azimuth_deg, elevation_deg) for inspection."""
    lines = [f"{'index':>5s} {'azimuth_deg':>12s} {'elevation_deg':>14s}"]
    for i in range(grid.K):
        az = np.degrees(grid.azimuths[i])
        el = np.degrees(grid.elevations[i])
        lines.append(f"{i:5d} {az:12.3f} {el:14.3f}")
    return "\n".join(lines)
