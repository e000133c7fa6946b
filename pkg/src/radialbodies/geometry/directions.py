"""Deterministic direction grids on the unit sphere."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SCHEMES = ("uniform-angle", "fibonacci-sphere", "seeded-random", "axis")


@dataclass(frozen=True)
class DirectionGrid:
    dimension: int
    directions: np.ndarray = field(repr=False)
    scheme: str
    seed: int = 0

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float)
        if d.ndim != 2 or d.shape[1] != self.dimension:
            raise ValueError("directions must have shape (count, dimension)")
        if np.abs(np.linalg.norm(d, axis=1) - 1).max() > 1e-12:
            raise ValueError("grid directions must be unit vectors")
        d.setflags(write=False)
        object.__setattr__(self, "directions", d)

    def __len__(self):
        return len(self.directions)

    def __iter__(self):
        return iter(self.directions)

    @classmethod
    def make(cls, dimension: int, count: int, scheme: str | None = None,
             seed: int = 0) -> "DirectionGrid":
        """Build ``count`` directions; the default scheme depends on the dimension."""
        if scheme is None:
            scheme = {1: "axis", 2: "uniform-angle", 3: "fibonacci-sphere"}.get(
                dimension, "seeded-random")
        if scheme == "axis":
            if dimension != 1:
                raise ValueError("axis scheme is for the line only")
            dirs = np.array([[1.0], [-1.0]])[np.arange(count) % 2]
        elif scheme == "uniform-angle":
            if dimension != 2:
                raise ValueError("uniform-angle needs dimension 2")
            t = 2 * np.pi * np.arange(count) / count
            dirs = np.column_stack([np.cos(t), np.sin(t)])
        elif scheme == "fibonacci-sphere":
            if dimension != 3:
                raise ValueError("fibonacci-sphere needs dimension 3")
            i = np.arange(count) + 0.5
            z = 1 - 2 * i / count
            phi = np.pi * (1 + 5**0.5) * i
            rho = np.sqrt(1 - z * z)
            dirs = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
        elif scheme == "seeded-random":
            dirs = random_directions(np.random.default_rng(seed), count, dimension)
        else:
            raise ValueError(f"unknown grid scheme {scheme!r}")
        dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
        return cls(dimension, dirs, scheme, seed)


def random_directions(rng: np.random.Generator, count: int, dimension: int) -> np.ndarray:
    v = rng.standard_normal((count, dimension))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
