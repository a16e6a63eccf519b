"""Poincare-type series as certified partial sums.

Every evaluator walks the breadth-first word stream once, forms the block
sum of each word length with error-free-transformation summation
(``math.fsum`` per slab and per level, combined in enumeration order),
and returns a :class:`SeriesResult` carrying the per-level blocks, a
three-valued convergence verdict and an optional certified tail.

A ``converged_within`` verdict is only ever issued against a
:class:`TailCertificate` (a proven geometric bound on the level blocks);
truncations alone never claim convergence.  Divergence is reported as
``growth_witness`` evidence: either the level blocks refuse to decay, or
identical summand values keep reappearing across consecutive levels, the
signature of a boundary point fixed with unit derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (BudgetExceeded, EnlargedDiscsOverlap, InconclusiveBracket,
                     InvalidSeparation)
from .group import (DeclaredStabilizer, QuotientSpec, QuotientTracker, SchottkyGroup,
                    WordBatch, iter_word_batches)
from .mobius import (boundary_derivative_raw, disc_boundary_points,
                     interior_derivative_raw, inverse_origin_images_raw)
from .model import BoundaryPoint, InteriorPoint, embed3

RATIO_CONVERGENT = 0.95
RATIO_DIVERGENT = 1.05
EQUAL_SUMMAND_RTOL = 1e-12
RATIO_WINDOW = 3
STRUCTURAL_MATCH_FRACTION = 0.01
CIRCLE_SAMPLES = 4096


# --- results -----------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    """Three-valued convergence verdict.

    kind is one of ``converged_within`` (carries the certified tail bound),
    ``growth_witness`` (carries the per-level sums and equal-summand match
    counts) or ``inconclusive``.
    """

    kind: str
    tail_bound: float | None = None
    evidence: dict | None = None

    @property
    def is_certified(self) -> bool:
        return self.kind == "converged_within"


@dataclass
class SeriesResult:
    exponent: float
    depth: int
    depth_completed: int
    partial_sum: float
    level_sums: tuple[float, ...]
    verdict: Verdict
    tail_bound: float | None = None
    budget_exhausted: bool = False
    incomplete_cosets: bool = False
    transcript: dict = field(default_factory=dict)

    def upper_bound(self) -> float:
        """partial_sum + certified tail, or +inf without a certificate."""
        if self.tail_bound is None:
            return math.inf
        return self.partial_sum + self.tail_bound


@dataclass(frozen=True)
class TailCertificate:
    """Certified geometric bound: block sum at length l is <= coeff * rate^l.

    ``tail_from(k)`` bounds the whole series beyond (and including) length
    k; it is finite exactly when rate < 1.
    """

    rate: float
    coeff: float = 1.0
    source: str = ""
    details: dict = field(default_factory=dict)

    def tail_from(self, k_start: int) -> float:
        if self.rate >= 1.0:
            return math.inf
        return self.coeff * self.rate ** k_start / (1.0 - self.rate)

    def admits_blocks(self, level_sums: Sequence[float], rtol: float = 1e-9) -> bool:
        """Audit the measured blocks against the certified envelope."""
        for length, block in enumerate(level_sums):
            if length == 0:
                continue
            if block > self.coeff * self.rate ** length * (1.0 + rtol) + 1e-300:
                return False
        return True


# --- the shared accumulation core ---------------------------------------------

@dataclass
class _Accumulated:
    level_sums: list[float]
    level_counts: list[int]
    depth_completed: int
    budget_exhausted: bool
    match_counts: list[int]           # equal-summand matches per level pair
    match_fractions: list[float]      # matches relative to the smaller level
    truncated_tail_sum: float         # sum seen beyond the last complete level


def _accumulate(group: SchottkyGroup, max_length: int, budget: int | None,
                values_fn: Callable[[WordBatch], np.ndarray],
                mask_fn: Callable[[WordBatch], np.ndarray] | None = None,
                track_values: bool = True) -> _Accumulated:
    level_parts: list[list[float]] = [[] for _ in range(max_length + 1)]
    level_counts = [0] * (max_length + 1)
    match_counts: list[int] = []
    match_fractions: list[float] = []
    prev_sorted: np.ndarray | None = None
    cur_values: list[np.ndarray] = []
    depth_completed = -1
    exhausted = False
    current_level = 0

    def close_level(length: int) -> None:
        nonlocal prev_sorted, cur_values, depth_completed
        depth_completed = length
        if not track_values:
            return
        cur = (np.sort(np.concatenate(cur_values))
               if cur_values else np.empty(0))
        if prev_sorted is not None and length >= 1:
            matches = _count_equal_values(prev_sorted, cur)
            match_counts.append(matches)
            smaller = min(prev_sorted.shape[0], cur.shape[0])
            match_fractions.append(matches / smaller if smaller else 0.0)
        prev_sorted = cur
        cur_values = []

    try:
        for batch in iter_word_batches(group, max_length, budget):
            if batch.length != current_level:
                close_level(current_level)
                current_level = batch.length
            values = values_fn(batch)
            if mask_fn is not None:
                values = values[mask_fn(batch)]
            level_parts[batch.length].append(math.fsum(values.tolist()))
            level_counts[batch.length] += values.shape[0]
            if track_values and values.shape[0]:
                cur_values.append(values)
            if batch.final and batch.length == max_length:
                close_level(batch.length)
    except BudgetExceeded:
        exhausted = True
    else:
        if depth_completed < current_level:
            close_level(current_level)
        depth_completed = max_length  # every level enumerated, even empty ones

    level_sums = [math.fsum(parts) for parts in level_parts]
    tail = 0.0
    if exhausted:
        tail = math.fsum(level_sums[depth_completed + 1:])
        level_sums = level_sums[: depth_completed + 1]
        level_counts = level_counts[: depth_completed + 1]
    return _Accumulated(level_sums, level_counts, depth_completed, exhausted,
                        match_counts, match_fractions, tail)


def _count_equal_values(prev_sorted: np.ndarray, cur: np.ndarray) -> int:
    """How many current values coincide (relative 1e-12) with a previous one."""
    if prev_sorted.shape[0] == 0 or cur.shape[0] == 0:
        return 0
    idx = np.searchsorted(prev_sorted, cur)
    matched = np.zeros(cur.shape[0], dtype=bool)
    for shift in (-1, 0):
        j = np.clip(idx + shift, 0, prev_sorted.shape[0] - 1)
        near = prev_sorted[j]
        tol = EQUAL_SUMMAND_RTOL * np.maximum(np.abs(near), np.abs(cur))
        matched |= np.abs(near - cur) <= tol
    return int(np.count_nonzero(matched))


def _fit_ratio(level_sums: Sequence[float]) -> float | None:
    """Geometric ratio fitted to the last RATIO_WINDOW nonzero blocks."""
    blocks = [b for b in level_sums[1:] if b > 0.0]
    if len(blocks) < RATIO_WINDOW:
        return None
    window = blocks[-RATIO_WINDOW:]
    ratios = [b / a for a, b in zip(window, window[1:])]
    return float(np.exp(np.mean(np.log(ratios))))


def _build_verdict(acc: _Accumulated, exponent: float, depth: int,
                   tail: TailCertificate | None) -> tuple[Verdict, float | None, dict]:
    transcript: dict = {
        "level_counts": list(acc.level_counts),
        "ratio_fit": _fit_ratio(acc.level_sums),
        "equal_summand_matches": list(acc.match_counts),
    }
    blocks_beyond = [b for b in acc.level_sums[1:] if b > 0.0]
    if not blocks_beyond and acc.depth_completed >= depth and not acc.budget_exhausted:
        # finite group exhausted: the partial sum is the series
        return Verdict("converged_within", 0.0), 0.0, transcript
    if tail is not None:
        if not tail.admits_blocks(acc.level_sums):
            transcript["certificate_rejected"] = (
                "measured level sums violate the certified envelope")
        elif tail.rate < 1.0:
            bound = tail.tail_from(acc.depth_completed + 1)
            transcript["certificate"] = {"rate": tail.rate, "coeff": tail.coeff,
                                         "source": tail.source}
            return Verdict("converged_within", bound), bound, transcript
        else:
            transcript["certificate_rejected"] = f"certified rate {tail.rate} >= 1"
    ratio = transcript["ratio_fit"]
    growth_evidence = {"level_sums": list(acc.level_sums),
                       "equal_summand_matches": list(acc.match_counts)}
    window = acc.match_fractions[-2:]
    persistent_matches = (len(window) == 2
                          and all(f >= STRUCTURAL_MATCH_FRACTION for f in window))
    if ratio is not None and ratio > RATIO_DIVERGENT:
        return Verdict("growth_witness", None, growth_evidence), None, transcript
    if persistent_matches and ratio is not None and ratio >= 0.98:
        return Verdict("growth_witness", None, growth_evidence), None, transcript
    return Verdict("inconclusive"), None, transcript


def _finish(acc: _Accumulated, exponent: float, depth: int,
            tail: TailCertificate | None, *, incomplete_cosets: bool = False,
            extra_transcript: dict | None = None) -> SeriesResult:
    verdict, bound, transcript = _build_verdict(acc, exponent, depth, tail)
    if extra_transcript:
        transcript.update(extra_transcript)
    partial = math.fsum(acc.level_sums + [acc.truncated_tail_sum])
    return SeriesResult(
        exponent=exponent, depth=depth, depth_completed=acc.depth_completed,
        partial_sum=partial, level_sums=tuple(acc.level_sums), verdict=verdict,
        tail_bound=bound, budget_exhausted=acc.budget_exhausted,
        incomplete_cosets=incomplete_cosets, transcript=transcript)


# --- public evaluators ----------------------------------------------------------

def poincare_partial(group: SchottkyGroup, z: InteriorPoint, s: float, max_length: int,
                     budget: int | None = None, tail: TailCertificate | None = None,
                     precision: str = "double", mantissa_bits: int = 160) -> SeriesResult:
    """Partial sum of P(z, s) = sum over words of j(w, z)^s, by word length."""
    if precision == "extended":
        return _sum_series_mp(group, "interior", z.coords, s, max_length, mantissa_bits)
    zc = embed3(z.coords)

    def values(batch: WordBatch) -> np.ndarray:
        return interior_derivative_raw(batch.mats, zc) ** s

    acc = _accumulate(group, max_length, budget, values)
    return _finish(acc, s, max_length, tail)


def horospherical_partial(group: SchottkyGroup, zeta: BoundaryPoint, s: float,
                          max_length: int, budget: int | None = None,
                          tail: TailCertificate | None = None,
                          precision: str = "double",
                          mantissa_bits: int = 160) -> SeriesResult:
    """Partial sum of the boundary series sum_w j(w, zeta)^s, by word length."""
    if precision == "extended":
        return _sum_series_mp(group, "boundary", zeta.coords, s, max_length,
                              mantissa_bits)
    bc = embed3(zeta.coords)

    def values(batch: WordBatch) -> np.ndarray:
        return boundary_derivative_raw(batch.mats, bc) ** s

    acc = _accumulate(group, max_length, budget, values)
    return _finish(acc, s, max_length, tail)


def reduced_horospherical_partial(group: SchottkyGroup, zeta: BoundaryPoint, s: float,
                                  max_length: int,
                                  stab: DeclaredStabilizer | QuotientSpec | None = None,
                                  budget: int | None = None,
                                  tail: TailCertificate | None = None) -> SeriesResult:
    """Boundary series summed over one representative per coset of the stabilizer.

    With a :class:`DeclaredStabilizer` the representatives are the words of
    the canonical complement (the kernel of the retraction killing the
    stabilizer letters), which is the exact coset transversal and makes the
    truncation identical to a kernel enumeration at the same depth.  With a
    trivial stabilizer this is the plain boundary series.  The
    ``incomplete_cosets`` flag records that a depth-truncated transversal
    of a nontrivial stabilizer cannot be certified complete.
    """
    bc = embed3(zeta.coords)

    def values(batch: WordBatch) -> np.ndarray:
        return boundary_derivative_raw(batch.mats, bc) ** s

    if stab is None or (isinstance(stab, DeclaredStabilizer) and not stab.labels):
        acc = _accumulate(group, max_length, budget, values)
        return _finish(acc, s, max_length, tail)
    if isinstance(stab, DeclaredStabilizer):
        # The canonical complement of a declared stabilizer is an exact
        # transversal, so the reduced sum is a kernel-filtered sum.
        spec = stab.quotient_for(group)
        tracker = QuotientTracker(group, spec, max_length)

        def mask(batch: WordBatch) -> np.ndarray:
            _, lengths = tracker.extend(batch)
            return QuotientTracker.kernel_mask(lengths)

        acc = _accumulate(group, max_length, budget, values, mask_fn=mask)
        return _finish(acc, s, max_length, tail, incomplete_cosets=True)
    if isinstance(stab, QuotientSpec):
        # Subgroup given as a kernel: cosets are keyed by the image word and
        # the representative minimizes d(0, w(0)) among enumerated members.
        from .group import coset_representatives

        bc3 = embed3(zeta.coords)
        level_sums = [0.0] * (max_length + 1)
        exhausted = False
        try:
            for word, t in coset_representatives(group, stab, max_length, budget,
                                                 policy="min_distance"):
                level_sums[len(word)] += t.derivative_boundary(zeta) ** s
        except BudgetExceeded:
            exhausted = True
        del bc3
        acc = _Accumulated(level_sums, [0] * len(level_sums),
                           max_length if not exhausted else max_length - 1,
                           exhausted, [], [], 0.0)
        return _finish(acc, s, max_length, tail, incomplete_cosets=True)
    raise TypeError(f"unsupported stabilizer declaration: {stab!r}")


# --- certified tails -------------------------------------------------------------

@dataclass(frozen=True)
class SeparationSchedule:
    """Closed-form separation schedule phi(n) for enlarged-disc families.

    ``geometric``: phi(n) = scale * base^n (base > 1, increasing);
    ``constant``: phi(n) = value for every n.
    """

    kind: str
    scale: float = 0.0
    base: float = 0.0
    value: float = 0.0

    @classmethod
    def geometric(cls, scale: float, base: float) -> "SeparationSchedule":
        if base <= 1.0:
            raise ValueError("geometric schedule needs base > 1")
        return cls("geometric", scale=scale, base=base)

    @classmethod
    def constant(cls, value: float) -> "SeparationSchedule":
        return cls("constant", value=value)

    def phi(self, n: int) -> float:
        if self.kind == "geometric":
            return self.scale * self.base ** n
        return self.value

    def min_phi(self) -> float:
        return self.phi(1) if self.kind == "geometric" else self.value

    def admissibility_sum(self, s: float) -> float:
        """sum over all n >= 1 of (4 / phi(n))^(2s), in closed form."""
        if self.kind == "geometric":
            term = (4.0 / self.scale) ** (2.0 * s)
            q = self.base ** (-2.0 * s)
            return term * q / (1.0 - q)
        return math.inf if self.value > 0 else math.inf


def example1_tail_bound(schedule: SeparationSchedule, s: float,
                        k_start: int) -> float | None:
    """Tail of the separated-family boundary series from word length k_start.

    Uses the geometric envelope with per-level rate q = 2 * sum_n
    (4/phi(n))^(2s); admissible exactly when the admissibility sum is
    below 1/2, in which case the value is sum_{k >= k_start} q^k.  Returns
    None when the admissibility condition fails.
    """
    if schedule.min_phi() < 2.0:
        raise InvalidSeparation(
            f"separation schedule dips below 2 (min {schedule.min_phi()})")
    adm = schedule.admissibility_sum(s)
    if not adm < 0.5:
        return None
    q = 2.0 * adm
    return q ** k_start / (1.0 - q)


def example1_certificate(schedule: SeparationSchedule, s: float) -> TailCertificate | None:
    """The same envelope as :func:`example1_tail_bound`, as a certificate."""
    if schedule.min_phi() < 2.0:
        raise InvalidSeparation(
            f"separation schedule dips below 2 (min {schedule.min_phi()})")
    adm = schedule.admissibility_sum(s)
    if not adm < 0.5:
        return None
    return TailCertificate(rate=2.0 * adm, coeff=1.0, source="separation_schedule",
                           details={"admissibility_sum": adm})


@dataclass(frozen=True)
class BranchBounds:
    """Certified per-letter bounds sup{j(letter, zeta) : zeta off the enlarged disc}."""

    letter_bounds: tuple[float, ...]
    letter_labels: tuple[str, ...]
    enlargement_factors: tuple[float, ...]
    notes: tuple[str, ...] = ()
    chain_valid: bool = True

    def rate(self, s: float) -> float:
        """q_s = sum of letter bounds to the power s: the certified level rate."""
        return float(math.fsum(b ** s for b in self.letter_bounds))

    def _require_chain(self) -> None:
        if not self.chain_valid:
            raise ValueError(
                "per-letter bounds cannot be chained into a level envelope here "
                "(parabolic generator present, or a letter bound is uncertified); "
                f"notes: {self.notes}")

    def boundary_certificate(self, s: float) -> TailCertificate:
        """Envelope for the boundary series at any point off every enlarged disc."""
        self._require_chain()
        return TailCertificate(rate=self.rate(s), coeff=1.0,
                               source="branch_contraction",
                               details={"letter_bounds": list(self.letter_bounds)})

    def interior_certificate(self, s: float, group: SchottkyGroup) -> TailCertificate:
        """Envelope for P(0, s): blocks <= 2k (2 rho_max)^s q^(l-1)."""
        self._require_chain()
        rho_max = max(d.radius for _, d in group.discs())
        q = self.rate(s)
        coeff = group.letter_count * (2.0 * rho_max) ** s / q if q > 0 else math.inf
        return TailCertificate(rate=q, coeff=coeff, source="branch_contraction",
                               details={"rho_max": rho_max})


def branch_contraction(group: SchottkyGroup,
                       enlargement_factors: Sequence[float] | float) -> BranchBounds:
    """Certified sup of each letter's boundary derivative off its enlarged source disc.

    The derivative j(g, .) = k(g^{-1}(0), .) is a Poisson kernel, radially
    decreasing about the direction of g^{-1}(0); over the complement of an
    enlarged disc containing that direction its sup sits on the enlarged
    boundary circle.  For arcs the two endpoints give the exact sup; for
    caps the circle is sampled densely and padded with a derivative bound.
    """
    gens = group.generators
    if isinstance(enlargement_factors, (int, float)):
        factors = [float(enlargement_factors)] * len(gens)
    else:
        factors = [float(f) for f in enlargement_factors]
        if len(factors) != len(gens):
            raise ValueError("need one enlargement factor per generator")
    enlarged = []
    for gen, f in zip(gens, factors):
        enlarged.append(gen.source.enlarged(f))
        enlarged.append(gen.target.enlarged(f))
    for i in range(len(enlarged)):
        for j in range(i + 1, len(enlarged)):
            if enlarged[i] is enlarged[j] or (i // 2 == j // 2 and gens[i // 2].kind == "parabolic"):
                continue
            if not enlarged[i].is_disjoint_from(enlarged[j]):
                raise EnlargedDiscsOverlap(
                    f"enlarged discs {i} and {j} intersect; shrink the factors")
    bounds = []
    notes = []
    pres, conorms = inverse_origin_images_raw(group.letter_matrices)
    for e in range(group.letter_count):
        disc = group.letter_sources[e].enlarged(factors[e // 2])
        u = pres[e]
        conorm = conorms[e]
        direction = u / np.linalg.norm(u)
        if not disc.contains(BoundaryPoint(direction[: group.dim + 1]), closed=False):
            bounds.append(math.inf)
            notes.append(f"{group.letter_labels[e]}: pole direction escaped the "
                         "enlarged disc; no certified bound")
            continue
        samples = disc_boundary_points(disc, 2 if group.dim == 1 else CIRCLE_SAMPLES)
        diffs = samples - u[None, :]
        dists_sq = np.einsum("ij,ij->i", diffs, diffs)
        kmax = float(np.max(conorm / dists_sq))
        if group.dim == 1:
            bounds.append(kmax * (1.0 + 1e-12))
        else:
            circle_radius = math.sin(disc.angular_radius)
            gap = circle_radius * (2.0 * math.pi / CIRCLE_SAMPLES)
            dmin = math.sqrt(float(np.min(dists_sq))) - gap / 2.0
            if dmin <= 0:
                bounds.append(math.inf)
                notes.append(f"{group.letter_labels[e]}: sampling gap swallows "
                             "the distance margin")
                continue
            grad_bound = 2.0 * conorm / dmin ** 3
            bounds.append(kmax + grad_bound * gap / 2.0)
    chain_valid = (all(math.isfinite(b) for b in bounds)
                   and all(gen.kind != "parabolic" for gen in gens))
    return BranchBounds(tuple(bounds), group.letter_labels, tuple(factors),
                        tuple(notes), chain_valid)


# --- bounded-parabolic domination -------------------------------------------------

def bounded_parabolic_domination(group: SchottkyGroup, zeta: BoundaryPoint, s: float,
                                 max_length: int, stab: DeclaredStabilizer,
                                 budget: int | None = None) -> dict:
    """Measure the constant b dominating the reduced series by e^{s b} P(0, s).

    For each transversal word the excess b_w = d(0, w(0)) + log j(w, zeta)
    is the gap between hyperbolic and horospherical distance of w^{-1}(0)
    to the origin; b is the max over the enumerated transversal.  Returns
    the per-depth partial sums of both series and the measured b, and
    whether reduced(<=d) <= e^{s b} poincare0(<=d) held at every depth.
    """
    bc = embed3(zeta.coords)
    spec = stab.quotient_for(group)
    tracker = QuotientTracker(group, spec, max_length)
    red_levels = [0.0] * (max_length + 1)
    poi_levels = [0.0] * (max_length + 1)
    b_measured = 0.0
    origin = np.zeros(3)
    for batch in iter_word_batches(group, max_length, budget):
        jb = boundary_derivative_raw(batch.mats, bc)
        ji = interior_derivative_raw(batch.mats, origin)
        poi_levels[batch.length] += math.fsum((ji ** s).tolist())
        _, lengths = tracker.extend(batch)
        mask = QuotientTracker.kernel_mask(lengths)
        if np.any(mask):
            red_levels[batch.length] += math.fsum((jb[mask] ** s).tolist())
            conorm = ji[mask]  # at the origin 1 - |w(0)|^2 = j(w, 0)
            dist = np.arccosh(np.maximum(2.0 / conorm - 1.0, 1.0))
            b_here = float(np.max(dist + np.log(jb[mask])))
            b_measured = max(b_measured, b_here)
    factor = math.exp(s * b_measured)
    red_cum = np.cumsum(red_levels)
    poi_cum = np.cumsum(poi_levels)
    ok = bool(np.all(red_cum <= factor * poi_cum * (1.0 + 1e-12)))
    return {
        "b": b_measured,
        "factor": factor,
        "reduced_partials": red_cum.tolist(),
        "poincare_partials": poi_cum.tolist(),
        "dominated_at_every_depth": ok,
    }


# --- exponent of convergence --------------------------------------------------------

@dataclass
class ProbeRecord:
    s: float
    depth: int
    level_sums: tuple[float, ...]
    ratio: float | None
    label: str


@dataclass
class DeltaEstimate:
    low: float
    high: float
    probes: list[ProbeRecord]
    notes: list[str] = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.high - self.low


def _probe_label(level_sums: Sequence[float], requested_depth: int,
                 depth_completed: int) -> tuple[str, float | None]:
    if all(b == 0.0 for b in level_sums[1:]) and depth_completed >= 1:
        return "convergent", 0.0
    ratio = _fit_ratio(level_sums)
    if ratio is None:
        return "inconclusive", ratio
    if ratio < RATIO_CONVERGENT:
        return "convergent", ratio
    if ratio > RATIO_DIVERGENT:
        return "divergent", ratio
    return "inconclusive", ratio


def estimate_delta(group: SchottkyGroup, bracket: tuple[float, float],
                   depths: Sequence[int] = (6, 8), budget: int | None = None,
                   restrict: QuotientSpec | None = None, max_probes: int = 8,
                   tol: float = 1e-2) -> DeltaEstimate:
    """Bracket the exponent of convergence by bisection on ratio evidence.

    Each probe evaluates the series at the origin (restricted to a kernel
    when ``restrict`` is given) at increasing depths from ``depths`` until
    the fitted level-block ratio leaves the inconclusive band.  The result
    is evidence, never a certificate: the returned interval carries the
    probe transcripts.
    """
    s_lo, s_hi = bracket
    if not s_lo < s_hi:
        raise ValueError("bracket must satisfy s_lo < s_hi")
    probes: list[ProbeRecord] = []
    notes: list[str] = []
    origin = np.zeros(3)

    def run_probe(s: float) -> str:
        label = "inconclusive"
        for depth in depths:
            tracker = (QuotientTracker(group, restrict, depth)
                       if restrict is not None else None)

            def values(batch: WordBatch) -> np.ndarray:
                return interior_derivative_raw(batch.mats, origin) ** s

            def mask(batch: WordBatch) -> np.ndarray:
                _, lengths = tracker.extend(batch)
                return QuotientTracker.kernel_mask(lengths)

            acc = _accumulate(group, depth, budget, values,
                              mask_fn=mask if tracker is not None else None,
                              track_values=False)
            label, ratio = _probe_label(acc.level_sums, depth, acc.depth_completed)
            probes.append(ProbeRecord(s, acc.depth_completed,
                                      tuple(acc.level_sums), ratio, label))
            if label != "inconclusive":
                return label
        return label

    lo_label = run_probe(s_lo)
    if lo_label == "convergent":
        notes.append(f"series already convergent at s_lo={s_lo}; "
                     "exponent estimate collapses to [0, s_lo]")
        return DeltaEstimate(0.0, s_lo, probes, notes)
    if lo_label != "divergent":
        raise InconclusiveBracket(f"no divergence evidence at s_lo={s_lo}")
    hi_label = run_probe(s_hi)
    if hi_label != "convergent":
        raise InconclusiveBracket(f"no convergence evidence at s_hi={s_hi}")
    lo, hi = s_lo, s_hi
    for _ in range(max_probes):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        label = run_probe(mid)
        if label == "divergent":
            lo = mid
            continue
        if label == "convergent":
            hi = mid
            continue
        # mid sits inside the evidence band; the quarter points can still
        # tighten the bracket from both sides
        moved = False
        quarter_lo = 0.5 * (lo + mid)
        if run_probe(quarter_lo) == "divergent":
            lo = quarter_lo
            moved = True
        quarter_hi = 0.5 * (mid + hi)
        if run_probe(quarter_hi) == "convergent":
            hi = quarter_hi
            moved = True
        if not moved:
            notes.append(f"probes around s={mid} all inconclusive; stopping")
            break
    return DeltaEstimate(lo, hi, probes, notes)


# --- extended-precision oracle path --------------------------------------------------

def _sum_series_mp(group: SchottkyGroup, kind: str, coords: np.ndarray, s: float,
                   max_length: int, mantissa_bits: int) -> SeriesResult:
    """Slow reimplementation of the series sums with mpmath matrices.

    Exists as an independent cross-check of the double-precision pipeline;
    enumerates words recursively, so it is capped at small depths.
    """
    from mpmath import mp, mpf, mpc

    total_words = sum((2 * len(group.generators)) *
                      max(2 * len(group.generators) - 1, 1) ** max(l - 1, 0)
                      if l else 1 for l in range(max_length + 1))
    if total_words > 200_000:
        raise ValueError("extended-precision path is for oracle-scale runs only")
    old_prec = mp.prec
    mp.prec = mantissa_bits
    try:
        letters = [[[mpc(x) for x in row] for row in mat]
                   for mat in group.letter_matrices]

        def mat_mul(a, b):
            return [[a[0][0] * b[0][0] + a[0][1] * b[1][0],
                     a[0][0] * b[0][1] + a[0][1] * b[1][1]],
                    [a[1][0] * b[0][0] + a[1][1] * b[1][0],
                     a[1][0] * b[0][1] + a[1][1] * b[1][1]]]

        point = [mpf(float(x)) for x in embed3(coords)]

        def term(mat) -> mpf:
            a, b = mat[0]
            c, d = mat[1]
            if kind == "boundary":
                denom = abs(a) ** 2 + abs(c) ** 2
                z0 = (-b * a.conjugate() - d * c.conjugate()) / denom
                t0 = 1 / denom
                dball = abs(z0) ** 2 + (t0 + 1) ** 2
                u = [(abs(z0) ** 2 + t0 ** 2 - 1) / dball, 2 * z0.real / dball,
                     2 * z0.imag / dball]
                conorm = 4 * t0 / dball
                diff2 = sum((p - q) ** 2 for p, q in zip(point, u))
                return (conorm / diff2) ** mpf(s)
            nsq = sum(x ** 2 for x in point)
            tau = (1 - nsq) / (2 * (1 - point[0]))
            t = tau / (1 - tau)
            z = (t + 1) / (1 - point[0]) * mpc(point[1], point[2])
            czd = c * z + d
            denom = abs(czd) ** 2 + abs(c) ** 2 * t ** 2
            z2 = ((a * z + b) * czd.conjugate() + a * c.conjugate() * t ** 2) / denom
            t2 = t / denom
            dball = abs(z2) ** 2 + (t2 + 1) ** 2
            return ((4 * t2 / dball) / (1 - nsq)) ** mpf(s)

        level_sums = [mpf(0)] * (max_length + 1)
        identity = [[mpc(1), mpc(0)], [mpc(0), mpc(1)]]
        level_sums[0] = term(identity)
        frontier = [(identity, -1)]
        for length in range(1, max_length + 1):
            nxt = []
            acc = mpf(0)
            for mat, last in frontier:
                for e in range(len(letters)):
                    if last >= 0 and e == (last ^ 1):
                        continue
                    child = mat_mul(mat, letters[e])
                    acc += term(child)
                    nxt.append((child, e))
            level_sums[length] = acc
            frontier = nxt
        sums = tuple(float(v) for v in level_sums)
        partial = float(sum(level_sums))
    finally:
        mp.prec = old_prec
    verdict = Verdict("inconclusive")
    return SeriesResult(exponent=s, depth=max_length, depth_completed=max_length,
                        partial_sum=partial, level_sums=sums, verdict=verdict,
                        transcript={"precision_bits": mantissa_bits,
                                    "backend": "mpmath"})
