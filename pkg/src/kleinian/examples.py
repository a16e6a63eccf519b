"""Reproducible desk-scale builders for the three showcase constructions.

1. A separated family of arc pairs accumulating at a boundary point: the
   boundary series at the accumulation point gets a closed-form geometric
   tail certificate and the ending measure is certifiably atomic there.
2. The kernel of the retraction of a rank-4 free product onto one rank-2
   factor: exponent estimates separate the kernel from the full group,
   its ending measures at the factor's fixed points spread their mass
   (non-atomicity evidence) and have disjoint supports.
3. A free product with a parabolic generator: the parabolic stabilizer
   has unit derivative at its fixed point, the coset transversal is the
   complement kernel, and the reduced series is dominated through the
   measured horospherical gap.

Each builder returns its handles plus a JSON-serializable report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PlacementInfeasible, StabilizerNotParabolic
from .group import (DeclaredStabilizer, EndingSequenceSpec, QuotientSpec,
                    SchottkyGroup, ending_sequence, kernel_enumerate)
from .limits import DEFAULT_C_GRID, horoball_entry, jorgensen_test
from .measure import (AtomicMeasure, AtomicityVerdict, classify_atomicity,
                      ending_measure, orbit_measure, singularity_diagnostic,
                      support_gap, weak_distance)
from .model import BoundaryPoint, Disc
from .series import (BranchBounds, DeltaEstimate, SeparationSchedule, SeriesResult,
                     branch_contraction, bounded_parabolic_domination,
                     estimate_delta, example1_certificate, example1_tail_bound,
                     horospherical_partial, reduced_horospherical_partial)

POLE_SAFETY = 0.2        # keep all constructions away from the chart pole
SLOT_FILL = 0.45         # enlarged discs fill this fraction of their half-slot


def _series_summary(series: SeriesResult) -> dict:
    return {
        "exponent": series.exponent,
        "depth": series.depth,
        "depth_completed": series.depth_completed,
        "partial_sum": series.partial_sum,
        "level_sums": list(series.level_sums),
        "tail_bound": series.tail_bound,
        "verdict": series.verdict.kind,
        "budget_exhausted": series.budget_exhausted,
        "incomplete_cosets": series.incomplete_cosets,
    }


# --- construction 1: separated arc families ------------------------------------

@dataclass(frozen=True)
class Example1Config:
    """Separated family of arc pairs accumulating at one boundary angle.

    phi(n) = schedule_scale * schedule_base^n is the separation schedule;
    the family is admissible when sum_n (4/phi(n))^(2s) < 1/2, which the
    constructor enforces.  ``pairs`` arc pairs are instantiated inside
    dyadic slots on both sides of the accumulation angle (pi), with radii
    the largest the separation permits.
    """

    exponent: float = 0.5
    schedule_scale: float = 16.0
    schedule_base: float = 2.0
    pairs: int = 4
    span: float = math.pi / 2.0
    depth: int = 8
    budget: int | None = None
    sequence_count: int = 8
    weak_depth: int = 6

    def __post_init__(self):
        if self.pairs < 1:
            raise PlacementInfeasible("need at least one generator pair")
        if not (0.0 < self.span and 0.975 * self.span < math.pi - POLE_SAFETY):
            raise PlacementInfeasible(
                f"span {self.span} pushes arcs onto the projection pole")
        adm = self.schedule().admissibility_sum(self.exponent)
        if not adm < 0.5:
            raise ValueError(
                f"inadmissible schedule: sum_n (4/phi(n))^(2s) = {adm} >= 1/2")

    def schedule(self) -> SeparationSchedule:
        return SeparationSchedule.geometric(self.schedule_scale, self.schedule_base)


@dataclass
class Example1Result:
    group: SchottkyGroup
    target: BoundaryPoint
    series: SeriesResult
    measure: AtomicMeasure
    branch: BranchBounds
    atomicity: AtomicityVerdict
    report: dict


def place_example1_discs(cfg: Example1Config) -> tuple[list[tuple[Disc, Disc]], list[float]]:
    """Deterministic arc placement: pair n sits in the dyadic slot
    [2^-n, 2^-n+1) * span on both sides of the accumulation angle."""
    schedule = cfg.schedule()
    pairs = []
    seps = []
    for n in range(1, cfg.pairs + 1):
        phi = schedule.phi(n)
        enlarged_angular = SLOT_FILL * 2.0 ** (-n) * cfg.span
        radius = 2.0 * math.sin(enlarged_angular / 2.0) / phi
        if radius <= 0.0 or radius >= 2.0:
            raise PlacementInfeasible(f"pair {n}: no admissible radius")
        offset = 1.5 * 2.0 ** (-n) * cfg.span
        plus = Disc(BoundaryPoint.from_angle(math.pi - offset), radius)
        minus = Disc(BoundaryPoint.from_angle(math.pi + offset), radius)
        pairs.append((plus, minus))
        seps.append(phi)
    return pairs, seps


def build_example1(cfg: Example1Config) -> Example1Result:
    schedule = cfg.schedule()
    pairs, seps = place_example1_discs(cfg)
    labels = [f"g{n}" for n in range(1, cfg.pairs + 1)]
    group = SchottkyGroup.from_disc_pairs(1, pairs, labels=labels, separations=seps)
    target = BoundaryPoint.from_angle(math.pi)

    for (plus, minus), phi in zip(pairs, seps):
        for disc in (plus, minus):
            if disc.enlarged(phi).contains(target):
                raise PlacementInfeasible("target fell inside an enlarged disc")

    s = cfg.exponent
    adm = schedule.admissibility_sum(s)
    certificate = example1_certificate(schedule, s)
    branch = branch_contraction(group, seps)
    paper_bounds = [(4.0 / schedule.phi(1 + e // 2)) ** 2
                    for e in range(group.letter_count)]
    stab = DeclaredStabilizer.trivial()
    series = horospherical_partial(group, target, s, cfg.depth, budget=cfg.budget,
                                   tail=certificate)
    measure = ending_measure(group, target, s, cfg.depth, stab=stab,
                             budget=cfg.budget, tail=certificate)
    # trivial stabilizer: the reduced series coincides with the plain one
    atomicity = classify_atomicity(group, target, s, stab, cfg.depth,
                                   budget=cfg.budget, tail=certificate,
                                   precomputed_series=series)

    report = {
        "construction": "separated-arc-family",
        "pairs": cfg.pairs,
        "exponent": s,
        "admissibility_sum": adm,
        "admissible": adm < 0.5,
        "tail_rate": 2.0 * adm,
        "tail_from_depth": example1_tail_bound(schedule, s, cfg.depth + 1),
        "branch_bounds": [
            {"letter": group.letter_labels[e],
             "bound": branch.letter_bounds[e],
             "schedule_bound": paper_bounds[e],
             "within_schedule_bound": branch.letter_bounds[e] <= paper_bounds[e]}
            for e in range(group.letter_count)],
        "branch_rate": branch.rate(s),
        "series": _series_summary(series),
        "series_upper_bound": series.upper_bound(),
        "target_is_jorgensen": jorgensen_test(group, target),
        "target_atom_weight": measure.weight_at(target),
        "atom_weight_lower_bound": 1.0 / series.upper_bound(),
        "atomicity": atomicity.conclusion,
        "stabilizer_check": atomicity.stabilizer_check.kind,
    }
    return Example1Result(group, target, series, measure, branch, atomicity, report)


def example1_weak_trend(cfg: Example1Config, result: Example1Result) -> list[float]:
    """weak_distance(orbit measure at z_n, ending measure) along the radial
    approach; the trend toward zero is the weak-convergence diagnostic."""
    seq = ending_sequence(result.group,
                          EndingSequenceSpec.dyadic(result.target, cfg.sequence_count))
    reference = ending_measure(result.group, result.target, cfg.exponent,
                               cfg.weak_depth, stab=DeclaredStabilizer.trivial())
    out = []
    for z in seq:
        mu = orbit_measure(result.group, z, cfg.exponent, cfg.weak_depth)
        out.append(weak_distance(mu, reference))
    return out


# --- construction 2: retraction kernels of free products -------------------------

@dataclass(frozen=True)
class Example2Config:
    """Free product of a small-arc pair group with a large-arc pair group.

    The quotient retracts onto the large-arc factor; measures are built
    for the kernel at the attracting fixed points of the factor's two
    generators.  Radii are angular (radians); eight arcs sit at equal
    spacing away from the chart pole.
    """

    small_radius: float = math.radians(4.0)
    large_radius: float = math.radians(16.0)
    first_center: float = math.radians(30.0)
    last_center: float = math.radians(330.0)
    exponent: float | None = None          # default: upper kernel-exponent estimate
    depth: int = 8
    decay_depths: tuple[int, ...] = (6, 7, 8)
    delta_budget: int | None = 10 ** 6     # per exponent probe
    measure_budget: int | None = None      # measures need the full enumeration
    bracket: tuple[float, float] = (0.02, 0.9)
    probe_depths: tuple[int, ...] = (5, 6)
    max_probes: int = 10


@dataclass
class Example2Result:
    group: SchottkyGroup
    quotient: QuotientSpec
    targets: tuple[BoundaryPoint, BoundaryPoint]
    measures: tuple[AtomicMeasure, AtomicMeasure]
    delta_group: DeltaEstimate
    delta_kernel: DeltaEstimate
    report: dict


def _top_atom_gap(mu: AtomicMeasure, nu: AtomicMeasure, k: int = 32) -> float:
    """Separation of the mass cores: min distance between the top-k atoms."""
    pa, _ = mu.top_atoms(k)
    pb, _ = nu.top_atoms(k)
    d = np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=2)
    return float(np.min(d))


def build_example2(cfg: Example2Config) -> Example2Result:
    centers = np.linspace(cfg.first_center, cfg.last_center, 8)
    small = [Disc.from_angles(centers[i], cfg.small_radius) for i in (0, 4, 2, 6)]
    large = [Disc.from_angles(centers[i], cfg.large_radius) for i in (1, 5, 3, 7)]
    factor_small = SchottkyGroup.from_disc_pairs(
        1, [(small[0], small[1]), (small[2], small[3])], labels=["a", "b"])
    factor_large = SchottkyGroup.from_disc_pairs(
        1, [(large[0], large[1]), (large[2], large[3])], labels=["c", "d"])
    group = SchottkyGroup.free_product(factor_small, factor_large)
    quotient = QuotientSpec("free", {"a": (), "b": (), "c": ("c",), "d": ("d",)})

    delta_group = estimate_delta(group, cfg.bracket, depths=cfg.probe_depths,
                                 budget=cfg.delta_budget, max_probes=cfg.max_probes)
    delta_kernel = estimate_delta(group, cfg.bracket,
                                  depths=cfg.probe_depths + (cfg.probe_depths[-1] + 1,),
                                  budget=cfg.delta_budget, restrict=quotient,
                                  max_probes=cfg.max_probes)
    s = cfg.exponent if cfg.exponent is not None else delta_kernel.high

    targets = []
    for label in ("c", "d"):
        cls = group.generator(label).transform.classify()
        targets.append(cls.fixed_points[0])

    depths_needed = sorted(set(cfg.decay_depths) | {cfg.depth})
    by_depth: dict[int, tuple[AtomicMeasure, AtomicMeasure]] = {}
    for depth in depths_needed:
        by_depth[depth] = tuple(
            ending_measure(group, zeta, s, depth, kernel=quotient,
                           budget=cfg.measure_budget) for zeta in targets)
    measures = by_depth[cfg.depth]

    decay_tables = []
    for i in range(2):
        decay_tables.append([
            {"depth": depth, "max_atom_weight": by_depth[depth][i].max_atom_weight(),
             "atoms": by_depth[depth][i].atom_count}
            for depth in cfg.decay_depths])

    # At full depth the two orbits collide below float resolution, so the
    # minimal-gap diagnostic runs at the deepest depth where the atom sets
    # still resolve.
    singularity_depth = cfg.depth
    gap = support_gap(measures[0], measures[1])
    while gap <= 0.0 and singularity_depth > 2:
        singularity_depth -= 1
        if singularity_depth not in by_depth:
            by_depth[singularity_depth] = tuple(
                ending_measure(group, zeta, s, singularity_depth, kernel=quotient,
                               budget=cfg.measure_budget) for zeta in targets)
        pair = by_depth[singularity_depth]
        gap = support_gap(pair[0], pair[1])
    sing_measures = by_depth[singularity_depth]
    eps = gap / 4.0
    overlap = singularity_diagnostic(sing_measures[0], sing_measures[1], eps)
    heavy_gap = _top_atom_gap(measures[0], measures[1])

    horoball_scan = []
    for c in DEFAULT_C_GRID:
        witnesses = horoball_entry(group, targets[0], c, min(cfg.depth, 7),
                                   budget=cfg.measure_budget, kernel=quotient)
        horoball_scan.append({"level": c, "witnesses": witnesses.count()})

    report = {
        "construction": "retraction-kernel",
        "exponent_used": s,
        "delta_group": {"low": delta_group.low, "high": delta_group.high},
        "delta_kernel": {"low": delta_kernel.low, "high": delta_kernel.high},
        "exponent_gap_resolved": delta_kernel.high < delta_group.low,
        "max_atom_decay": decay_tables,
        "max_atom_strictly_decreasing": [
            all(r2["max_atom_weight"] < r1["max_atom_weight"]
                for r1, r2 in zip(rows, rows[1:]))
            for rows in decay_tables],
        "support_gap": gap,
        "singularity_depth": singularity_depth,
        "singularity_eps": eps,
        "singularity_overlap": list(overlap),
        "heavy_support_gap_top32": heavy_gap,
        "horoball_scan_at_first_target": horoball_scan,
        "measure_verdicts": [m.series.verdict.kind for m in measures],
    }
    return Example2Result(group, quotient, tuple(targets), measures,
                          delta_group, delta_kernel, report)


# --- construction 3: parabolic stabilizers ----------------------------------------

@dataclass(frozen=True)
class Example3Config:
    """Free product of a rank-2 arc group with one parabolic generator.

    The parabolic fixes the center of its disc (placed at angle pi); the
    reduced boundary series at that point runs over the retraction kernel
    and is dominated by e^{s b} P(0, s) with the measured gap b.
    """

    arc_radius: float = math.radians(6.0)
    parabolic_radius: float = math.radians(12.0)
    strength: float = 4.5
    exponent: float = 0.8
    depth: int = 8
    identity_depth: int = 6
    power_checks: int = 20
    budget: int | None = None
    bracket: tuple[float, float] = (0.05, 1.2)


@dataclass
class Example3Result:
    group: SchottkyGroup
    target: BoundaryPoint
    stabilizer: DeclaredStabilizer
    reduced: SeriesResult
    unreduced: SeriesResult
    measure: AtomicMeasure
    domination: dict
    report: dict


def build_example3(cfg: Example3Config) -> Example3Result:
    deg = math.pi / 180.0
    arcs = SchottkyGroup.from_disc_pairs(
        1,
        [(Disc.from_angles(60.0 * deg, cfg.arc_radius),
          Disc.from_angles(300.0 * deg, cfg.arc_radius)),
         (Disc.from_angles(120.0 * deg, cfg.arc_radius),
          Disc.from_angles(240.0 * deg, cfg.arc_radius))],
        labels=["a", "b"])
    pdisc = Disc.from_angles(math.pi, cfg.parabolic_radius)
    group = arcs.with_parabolic("p", pdisc, cfg.strength)
    pgen = group.generator("p")
    cls = pgen.transform.classify()
    if cls.kind != "parabolic":
        raise StabilizerNotParabolic(
            f"declared parabolic generator classifies as {cls.kind}")
    target = cls.fixed_points[0]
    stab = DeclaredStabilizer(("p",))
    s = cfg.exponent

    power_table = []
    mat = np.eye(2, dtype=complex)
    from .mobius import Transform
    for k in range(1, cfg.power_checks + 1):
        mat = mat @ pgen.transform.matrix
        power_table.append(Transform(mat, group.dim, _trusted_unit_det=True)
                           .derivative_boundary(target))
    max_power_defect = max(abs(v - 1.0) for v in power_table)

    reduced = reduced_horospherical_partial(group, target, s, cfg.depth,
                                            stab=stab, budget=cfg.budget)
    unreduced = horospherical_partial(group, target, s, cfg.depth,
                                      budget=cfg.budget)

    # independent per-word recomputation of the kernel sum at a small depth
    reduced_small = reduced_horospherical_partial(group, target, s,
                                                  cfg.identity_depth, stab=stab)
    kernel_sum = math.fsum(
        t.derivative_boundary(target) ** s
        for _, t in kernel_enumerate(group, stab.quotient_for(group),
                                     cfg.identity_depth))
    identity_defect = abs(reduced_small.partial_sum - kernel_sum)

    domination = bounded_parabolic_domination(group, target, s, cfg.depth, stab,
                                              budget=cfg.budget)
    measure = ending_measure(group, target, s, cfg.depth, stab=stab,
                             budget=cfg.budget)
    atomicity = classify_atomicity(group, target, s, stab, cfg.depth,
                                   budget=cfg.budget)
    delta_group = estimate_delta(group, cfg.bracket, depths=(5, 6),
                                 budget=10 ** 6)

    report = {
        "construction": "parabolic-stabilizer",
        "exponent": s,
        "stabilizer_derivatives_at_powers": power_table,
        "max_power_defect": max_power_defect,
        "coset_vs_kernel_sum": {
            "depth": cfg.identity_depth,
            "coset_sum": reduced_small.partial_sum,
            "kernel_sum": kernel_sum,
            "defect": identity_defect,
        },
        "reduced_series": _series_summary(reduced),
        "unreduced_series": _series_summary(unreduced),
        "unreduced_growth_witness": unreduced.verdict.kind == "growth_witness",
        "domination": {k: v for k, v in domination.items()
                       if k in ("b", "factor", "dominated_at_every_depth")},
        "measure_verdict": measure.series.verdict.kind,
        "atomicity": atomicity.conclusion,
        "stabilizer_check": atomicity.stabilizer_check.kind,
        "exponent_of_convergence_evidence": {
            "low": delta_group.low, "high": delta_group.high},
        "assumptions_recorded_not_verified": [
            "convergence type at the exponent of convergence",
            "exponent exceeds half the boundary dimension",
        ],
    }
    return Example3Result(group, target, stab, reduced, unreduced, measure,
                          domination, report)
