import math

import numpy as np
import pytest

from kleinian import BoundaryPoint, Disc, SchottkyGroup

DEG = math.pi / 180.0


def arc(center_deg: float, radius_deg: float) -> Disc:
    return Disc.from_angles(center_deg * DEG, radius_deg * DEG)


def cap(center, radius: float) -> Disc:
    return Disc(BoundaryPoint(center), radius)


@pytest.fixture(scope="session")
def std_group() -> SchottkyGroup:
    """Well-separated 2-generator group on S^1, clear of the chart pole."""
    return SchottkyGroup.from_disc_pairs(
        1,
        [(arc(72, 10), arc(216, 10)), (arc(144, 10), arc(288, 10))],
        labels=["a", "b"])


@pytest.fixture(scope="session")
def std_group_2d() -> SchottkyGroup:
    """Well-separated 2-generator group on S^2 (caps away from the pole)."""
    return SchottkyGroup.from_disc_pairs(
        2,
        [(cap([0.0, 1.0, 0.0], 0.35), cap([0.0, -1.0, 0.0], 0.35)),
         (cap([0.0, 0.0, 1.0], 0.35), cap([0.0, 0.0, -1.0], 0.35))],
        labels=["a", "b"])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)


def random_boundary_points(rng, dim: int, count: int) -> np.ndarray:
    pts = rng.normal(size=(count, dim + 1))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def random_interior_points(rng, dim: int, count: int, rmax: float = 0.9) -> np.ndarray:
    pts = rng.normal(size=(count, dim + 1))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return pts * rng.uniform(0.0, rmax, size=(count, 1))


def random_reduced_words(rng, group: SchottkyGroup, count: int, max_len: int):
    """Random reduced words (as letter tuples) of length 1..max_len."""
    words = []
    k2 = group.letter_count
    for _ in range(count):
        length = int(rng.integers(1, max_len + 1))
        letters = [int(rng.integers(0, k2))]
        while len(letters) < length:
            nxt = int(rng.integers(0, k2))
            if nxt != letters[-1] ^ 1:
                letters.append(nxt)
        words.append(tuple(letters))
    return words
