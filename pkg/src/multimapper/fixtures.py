"""Deterministic synthetic datasets for demos and tests.

Every generator is a pure function of its arguments: the same seed always
produces the same array, byte for byte, so CSV outputs are reproducible.
"""

from __future__ import annotations

import numpy as np


def circle(n: int = 500, noise: float = 0.02, seed: int = 0) -> np.ndarray:
    """n points on the unit circle with isotropic Gaussian noise."""
    rng = np.random.default_rng(seed)
    theta = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return pts + rng.normal(0.0, noise, size=(n, 2))


def two_blob(n: int = 100, seed: int = 0) -> np.ndarray:
    """Two well-separated Gaussian blobs at (0,0) and (10,10)."""
    rng = np.random.default_rng(seed)
    n_first = n // 2
    first = rng.normal((0.0, 0.0), 0.5, size=(n_first, 2))
    second = rng.normal((10.0, 10.0), 0.5, size=(n - n_first, 2))
    return np.vstack([first, second])


def blob_ring(seed: int = 7, blob_n: int = 500, ring_n: int = 100) -> np.ndarray:
    """Dense central blob (sigma 0.3) plus a sparse radius-5 ring (sigma 0.2).

    Blob points come first (indices 0..blob_n-1), ring points after, so
    sub-complexes can be attributed to a region by member index.
    """
    rng = np.random.default_rng(seed)
    blob = rng.normal(0.0, 0.3, size=(blob_n, 2))
    ang = np.linspace(0.0, 2.0 * np.pi, ring_n, endpoint=False)
    ring = 5.0 * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    ring = ring + rng.normal(0.0, 0.2, size=(ring_n, 2))
    return np.vstack([blob, ring])


def parallel_segments(n_per_segment: int = 50) -> np.ndarray:
    """Two horizontal segments at y=0 and y=2 over the same x-range.

    Projecting onto x collapses both onto one interval, which is the
    canonical lens-degeneracy construction: magnifying one segment's nodes
    drags the other segment's points along.
    """
    x = np.linspace(0.0, 4.0, n_per_segment)
    low = np.stack([x, np.zeros(n_per_segment)], axis=1)
    high = np.stack([x, np.full(n_per_segment, 2.0)], axis=1)
    return np.vstack([low, high])


def blobs(k: int, n_per: int = 60, seed: int = 0) -> np.ndarray:
    """k Gaussian blobs (sigma 0.5) centered at (12i, 0), i = 0..k-1."""
    rng = np.random.default_rng(seed)
    parts = [
        rng.normal((12.0 * i, 0.0), 0.5, size=(n_per, 2)) for i in range(k)
    ]
    return np.vstack(parts)


FIXTURE_NAMES = ("circle", "two_blob", "blob_ring", "parallel_segments")


def make_fixture(name: str, seed: int, n: int | None) -> np.ndarray:
    """Dispatch by name; ``n`` scales the fixtures that take a count."""
    if name == "circle":
        return circle(n=n if n is not None else 500, seed=seed)
    if name == "two_blob":
        return two_blob(n=n if n is not None else 100, seed=seed)
    if name == "blob_ring":
        return blob_ring(seed=seed)
    if name == "parallel_segments":
        return parallel_segments(n_per_segment=n if n is not None else 50)
    raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")
