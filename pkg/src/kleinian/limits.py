"""Desk-scale limit-set diagnostics.

Radial, uniformly-radial and big-horospherical membership are tail
properties invisible at any finite depth, so everything here is labelled
evidence: orbit-distance profiles along rays, horoball entry witnesses,
and slope fits.  The one exact decision is the Jorgensen test for
Schottky data, where the disc structure makes the fundamental domain
computable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded
from .group import QuotientSpec, QuotientTracker, SchottkyGroup, Word, WordTable, \
    iter_word_batches
from .model import BoundaryPoint, InteriorPoint, embed3, hyperbolic_distance_raw
from .mobius import origin_images_raw

GROWTH_SLOPE = 0.5
BOUNDED_SLOPE = 0.2
DEFAULT_T_GRID = tuple(float(t) for t in range(1, 13))
DEFAULT_C_GRID = tuple(2.0 ** k for k in range(-3, 7))


@dataclass(frozen=True)
class RadialProfile:
    """Orbit-distance samples Delta(xi_T) along the ray toward a target.

    Each Delta value is an upper bound for the true orbit distance
    (nonincreasing in enumeration depth).  ``slope`` is the linear fit on
    the later half of the profile; growth evidence means the ray escapes
    every finite orbit neighbourhood, bounded evidence the opposite.
    """

    target: BoundaryPoint
    samples: tuple[tuple[float, float], ...]
    depth: int
    slope: float
    bounded_evidence: bool
    growth_evidence: bool

    def deltas(self) -> list[float]:
        return [d for _, d in self.samples]

    def to_csv(self, path) -> None:
        with open(path, "w") as handle:
            handle.write("T,delta\n")
            for t, d in self.samples:
                handle.write(f"{t!r},{d!r}\n")

    def summary(self) -> dict:
        return {
            "target": self.target.coords.tolist(),
            "depth": self.depth,
            "slope": self.slope,
            "bounded_evidence": self.bounded_evidence,
            "growth_evidence": self.growth_evidence,
            "samples": [[t, d] for t, d in self.samples],
        }


def _orbit_points(group: SchottkyGroup, max_length: int,
                  budget: int | None) -> tuple[np.ndarray, np.ndarray, bool]:
    pts = []
    conorms = []
    exhausted = False
    try:
        for batch in iter_word_batches(group, max_length, budget):
            img, conorm = origin_images_raw(batch.mats)
            pts.append(img)
            conorms.append(conorm)
    except BudgetExceeded:
        exhausted = True
    return np.concatenate(pts), np.concatenate(conorms), exhausted


def orbit_distance(group: SchottkyGroup, z: InteriorPoint, max_length: int,
                   budget: int | None = None) -> float:
    """min over enumerated words of d(z, w(0)): an upper bound on the true
    distance of z to the orbit of the origin, nonincreasing in depth."""
    pts, conorms, _ = _orbit_points(group, max_length, budget)
    return float(np.min(hyperbolic_distance_raw(pts, embed3(z.coords),
                                                conorms, z.conorm)))


def radial_profile(group: SchottkyGroup, zeta: BoundaryPoint,
                   t_grid: Sequence[float] = DEFAULT_T_GRID,
                   max_length: int = 8,
                   budget: int | None = None) -> RadialProfile:
    """Delta(xi_T) for xi_T on the ray toward ``zeta`` at hyperbolic distance T."""
    if any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise ValueError("T grid must increase")
    pts, conorms, _ = _orbit_points(group, max_length, budget)
    zc = embed3(zeta.coords)
    samples = []
    for t in t_grid:
        radius = math.tanh(t / 2.0)
        xi = radius * zc
        xi_conorm = (1.0 - radius) * (1.0 + radius)
        samples.append((float(t), float(np.min(
            hyperbolic_distance_raw(pts, xi, conorms, xi_conorm)))))
    tail = samples[len(samples) // 2:]
    slope = float(np.polyfit([t for t, _ in tail], [d for _, d in tail], 1)[0])
    return RadialProfile(zeta, tuple(samples), max_length, slope,
                         bounded_evidence=slope < BOUNDED_SLOPE,
                         growth_evidence=slope > GROWTH_SLOPE)


def jorgensen_test(group: SchottkyGroup, zeta: BoundaryPoint,
                   declared: bool = False) -> bool:
    """Exact Jorgensen-point test for Schottky data.

    True iff the point lies in the closed exterior of every generator disc
    and is either a declared limit point or an accumulation point of the
    disc family (the per-generator distances decay geometrically along the
    construction order).  When true, the radial ray toward the point meets
    no half-space over a generator disc, so it runs inside the fundamental
    domain forever.
    """
    if not group.fundamental_domain_contains(zeta):
        return False
    if declared:
        return True
    dists = []
    for gen in group.generators:
        gaps = []
        for disc in (gen.source, gen.target):
            dot = float(np.clip(np.dot(disc.center.coords, zeta.coords), -1.0, 1.0))
            gaps.append(math.acos(dot) - disc.angular_radius)
        dists.append(max(min(gaps), 1e-300))
    if len(dists) < 3:
        return False
    logs = np.log(dists)
    slope = float(np.polyfit(np.arange(len(logs)), logs, 1)[0])
    return slope < -0.2 and dists[-1] == min(dists)


@dataclass
class HoroballWitnesses:
    """Words whose orbit point enters the horoball of level c at the target."""

    level: float
    witnesses: list[tuple[Word, float]] = field(default_factory=list)

    def count(self) -> int:
        return len(self.witnesses)


def horoball_entry(group: SchottkyGroup, zeta: BoundaryPoint, c: float,
                   max_length: int, budget: int | None = None,
                   kernel: QuotientSpec | None = None,
                   max_witnesses: int = 10_000) -> HoroballWitnesses:
    """All enumerated words with k(w(0), zeta) > c, by descending kernel value.

    Membership of the big horospherical limit set is a tail property; a
    growing witness count with depth is evidence, never a decision.  The
    ``kernel`` restriction scans a normal subgroup's orbit instead.
    """
    if c <= 0.0:
        raise ValueError("horoball level must be positive")
    zc = embed3(zeta.coords)
    table = WordTable(group)
    tracker = QuotientTracker(group, kernel, max_length) if kernel is not None else None
    found: list[tuple[float, int, int]] = []
    try:
        for batch in iter_word_batches(group, max_length, budget):
            table.record(batch)
            img, conorm = origin_images_raw(batch.mats)
            diff = zc[None, :] - img
            kvals = conorm / np.einsum("ij,ij->i", diff, diff)
            mask = kvals > c
            if tracker is not None:
                _, lengths = tracker.extend(batch)
                mask &= QuotientTracker.kernel_mask(lengths)
            for i in np.nonzero(mask)[0]:
                found.append((float(kvals[i]), batch.length, batch.offset + int(i)))
    except BudgetExceeded:
        pass
    found.sort(key=lambda rec: (-rec[0], rec[1], rec[2]))
    out = HoroballWitnesses(c)
    for kval, length, index in found[:max_witnesses]:
        out.witnesses.append((table.word(length, index), kval))
    return out
