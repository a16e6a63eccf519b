"""Truncated atomic conformal measures and their diagnostics.

An orbit measure places mass j(w, z)^s at every orbit point w(z) of an
interior point; an ending measure places mass j(w, zeta)^s at the
boundary orbit of a target point, summed over a coset transversal of its
stabilizer.  Both are normalized truncations of the measures whose weak
limits the theory studies; every synthesized measure therefore carries
the :class:`~kleinian.series.SeriesResult` of its normalizer, verdict
included, and consumers are expected to surface that verdict.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import BudgetExceeded, TargetNotInDomainClosure
from .group import (DeclaredStabilizer, QuotientSpec, QuotientTracker, SchottkyGroup,
                    iter_word_batches)
from .mobius import (apply_boundary_raw, apply_interior_raw, boundary_derivative_raw,
                     interior_derivative_raw)
from .model import BoundaryPoint, InteriorPoint, embed3
from .series import SeriesResult, TailCertificate, _Accumulated, _finish

# Atoms are coalesced only when indistinguishable at float resolution.  A
# coarser merge (1e-12 was tried) misattributes mass across cells where the
# derivative field varies violently, and breaks the conformality-residual
# budget for strongly contracting generator families.
MERGE_TOL = 1e-15
MASS_TOL = 1e-12
DEFAULT_CELLS = 64
TOP_K_ATOMS = 32
PARTITION_OFFSET = 0.5 * (math.sqrt(5.0) - 1.0)  # keeps atoms off cell edges


# --- the measure value type ---------------------------------------------------

@dataclass
class AtomicMeasure:
    """Finitely many atoms in the closed ball with unit total mass.

    ``points`` are ambient coordinates (norm 1 for boundary-supported
    measures, < 1 for orbit measures), ``word_lengths`` the word length
    that produced each atom.  ``series`` is the normalizing partial sum.
    """

    points: np.ndarray
    weights: np.ndarray
    word_lengths: np.ndarray
    dim: int
    source: str
    exponent: float
    depth: int
    boundary_supported: bool
    series: SeriesResult | None = None
    meta: dict = field(default_factory=dict)

    @property
    def atom_count(self) -> int:
        return int(self.points.shape[0])

    def total_mass(self) -> float:
        return float(math.fsum(self.weights.tolist()))

    def max_atom_weight(self) -> float:
        return float(np.max(self.weights))

    def shell_mass(self, length: int | None = None) -> float:
        """Mass contributed by words of the given length (default: the depth).

        Reads the normalizing series' level sums when available, which stays
        correct even when atoms of different lengths coalesce.
        """
        length = self.depth if length is None else length
        if self.series is not None and length < len(self.series.level_sums):
            return self.series.level_sums[length] / self.series.partial_sum
        return float(math.fsum(self.weights[self.word_lengths == length].tolist()))

    def top_atoms(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        order = np.lexsort((np.arange(self.atom_count), -self.weights))[:k]
        return self.points[order], self.weights[order]

    def directions(self) -> np.ndarray:
        """Radial projections of the atoms onto the boundary sphere."""
        norms = np.linalg.norm(self.points, axis=1)
        safe = np.where(norms > 0, norms, 1.0)
        return self.points / safe[:, None]

    def weight_at(self, point: BoundaryPoint | InteriorPoint,
                  tol: float = 1e-9) -> float:
        d = np.linalg.norm(self.points - point.coords[None, :], axis=1)
        return float(math.fsum(self.weights[d <= tol].tolist()))

    def to_csv(self, path) -> None:
        """Columns x[,y][,z], weight, word_length; rows by descending weight."""
        order = np.lexsort((np.arange(self.atom_count), -self.weights))
        headers = ["x", "y", "z"][: self.dim + 1] + ["weight", "word_length"]
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(headers)
            for i in order:
                row = [repr(float(c)) for c in self.points[i]]
                row += [repr(float(self.weights[i])), int(self.word_lengths[i])]
                writer.writerow(row)


def _merge_atoms(points: np.ndarray, weights: np.ndarray,
                 lengths: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coalesce atoms closer than the merge tolerance (grid snap), keeping
    the earliest representative and summing weights."""
    keys = np.round(points / MERGE_TOL).astype(np.int64)
    view = np.ascontiguousarray(keys).view(
        np.dtype((np.void, keys.dtype.itemsize * keys.shape[1]))).ravel()
    _, first_idx, inverse = np.unique(view, return_index=True, return_inverse=True)
    merged_w = np.zeros(first_idx.shape[0])
    np.add.at(merged_w, inverse, weights)
    merged_l = np.full(first_idx.shape[0], np.iinfo(np.int32).max, dtype=np.int64)
    np.minimum.at(merged_l, inverse, lengths.astype(np.int64))
    order = np.argsort(first_idx, kind="stable")
    return points[first_idx[order]], merged_w[order], merged_l[order]


# --- synthesis ------------------------------------------------------------------

def orbit_measure(group: SchottkyGroup, z: InteriorPoint, s: float, max_length: int,
                  budget: int | None = None) -> AtomicMeasure:
    """Normalized point masses j(w, z)^s at the orbit points w(z), w of length <= L."""
    zc = embed3(z.coords)
    pts: list[np.ndarray] = []
    wts: list[np.ndarray] = []
    lens: list[np.ndarray] = []
    level_sums = [0.0] * (max_length + 1)
    exhausted = False
    depth_completed = max_length
    try:
        for batch in iter_word_batches(group, max_length, budget):
            values = interior_derivative_raw(batch.mats, zc) ** s
            level_sums[batch.length] += math.fsum(values.tolist())
            pts.append(apply_interior_raw(batch.mats, zc))
            wts.append(values)
            lens.append(np.full(values.shape[0], batch.length, dtype=np.int32))
    except BudgetExceeded as exc:
        exhausted = True
        depth_completed = exc.depth_completed
    points = np.concatenate(pts)[:, : group.dim + 1]
    weights = np.concatenate(wts)
    lengths = np.concatenate(lens)
    acc = _Accumulated(level_sums[: depth_completed + 1], [], depth_completed,
                       exhausted, [], [], math.fsum(level_sums[depth_completed + 1:]))
    series = _finish(acc, s, max_length, None)
    points, weights, lengths = _merge_atoms(points, weights, lengths)
    weights = weights / series.partial_sum
    meta = {"base_point": z.coords.tolist(),
            "enumeration": {"group": group, "point": embed3(z.coords),
                            "kind": "interior", "kernel": None,
                            "budget": budget}}
    return AtomicMeasure(points, weights, lengths, group.dim, "orbit", s,
                         max_length, boundary_supported=False, series=series,
                         meta=meta)


def ending_measure(group: SchottkyGroup, zeta: BoundaryPoint, s: float,
                   max_length: int,
                   stab: DeclaredStabilizer | None = None,
                   kernel: QuotientSpec | None = None,
                   budget: int | None = None,
                   tail: TailCertificate | None = None,
                   check_domain: bool = True) -> AtomicMeasure:
    """Normalized point masses j(w, zeta)^s at the boundary orbit of the target.

    ``stab`` declares the stabilizer of ``zeta``; the sum then runs over
    the canonical coset transversal (the complement kernel).  ``kernel``
    instead restricts the whole construction to a normal subgroup given as
    a quotient kernel (the measure for that subgroup); the two are
    mutually exclusive.  The normalizing series verdict is attached, never
    hidden: a truncation of a divergent series stays flagged.
    """
    if stab is not None and kernel is not None:
        raise ValueError("pass a stabilizer or a kernel restriction, not both")
    if check_domain:
        _check_target(group, zeta, stab, kernel)
    bc = embed3(zeta.coords)
    spec = None
    if stab is not None and stab.labels:
        spec = stab.quotient_for(group)
    elif kernel is not None:
        spec = kernel
    tracker = QuotientTracker(group, spec, max_length) if spec is not None else None

    pts: list[np.ndarray] = []
    wts: list[np.ndarray] = []
    lens: list[np.ndarray] = []
    level_sums = [0.0] * (max_length + 1)
    exhausted = False
    depth_completed = max_length
    try:
        for batch in iter_word_batches(group, max_length, budget):
            values = boundary_derivative_raw(batch.mats, bc) ** s
            positions = apply_boundary_raw(batch.mats, bc)
            if tracker is not None:
                _, lengths_arr = tracker.extend(batch)
                mask = QuotientTracker.kernel_mask(lengths_arr)
                values = values[mask]
                positions = positions[mask]
            if values.shape[0] == 0:
                continue
            level_sums[batch.length] += math.fsum(values.tolist())
            pts.append(positions)
            wts.append(values)
            lens.append(np.full(values.shape[0], batch.length, dtype=np.int32))
    except BudgetExceeded as exc:
        exhausted = True
        depth_completed = exc.depth_completed
    points = np.concatenate(pts)[:, : group.dim + 1]
    weights = np.concatenate(wts)
    lengths = np.concatenate(lens)
    acc = _Accumulated(level_sums[: depth_completed + 1], [], depth_completed,
                       exhausted, [], [], math.fsum(level_sums[depth_completed + 1:]))
    series = _finish(acc, s, max_length, tail,
                     incomplete_cosets=bool(stab is not None and stab.labels))
    points, weights, lengths = _merge_atoms(points, weights, lengths)
    weights = weights / series.partial_sum
    meta = {"target": zeta.coords.tolist(),
            "enumeration": {"group": group, "point": embed3(zeta.coords),
                            "kind": "boundary",
                            "kernel": spec, "budget": budget}}
    if kernel is not None:
        meta["domain_check"] = "skipped (subgroup measure; the subgroup's domain is larger)"
    return AtomicMeasure(points, weights, lengths, group.dim, "ending", s,
                         max_length, boundary_supported=True, series=series,
                         meta=meta)


def _check_target(group: SchottkyGroup, zeta: BoundaryPoint,
                  stab: DeclaredStabilizer | None,
                  kernel: QuotientSpec | None) -> None:
    if kernel is not None:
        return  # the subgroup's fundamental domain is larger than the group's
    exempt: set[str] = set(stab.labels) if stab is not None else set()
    for name, disc in group.discs():
        if name[:-1] in exempt:
            continue  # a declared stabilizer's own disc may cover its fixed point
        if disc.chordal_distance(zeta) < disc.radius - 1e-12:
            raise TargetNotInDomainClosure(
                f"target {zeta.coords} lies inside open generator disc {name}")


# --- conformality --------------------------------------------------------------

def _cell_index(directions: np.ndarray, dim: int, cells: int) -> np.ndarray:
    """Deterministic partition of the boundary into arcs (S^1) or a
    longitude/latitude grid (S^2), rotated by an irrational offset so that
    atom images do not straddle cell edges."""
    if dim == 1:
        ang = np.arctan2(directions[:, 1], directions[:, 0])
        frac = (ang / (2.0 * math.pi) + PARTITION_OFFSET) % 1.0
        return np.minimum((frac * cells).astype(np.int64), cells - 1)
    lon_cells = int(round(math.sqrt(cells)))
    lat_cells = cells // lon_cells
    lon = np.arctan2(directions[:, 2], directions[:, 1])
    lat = np.arccos(np.clip(directions[:, 0], -1.0, 1.0))
    lon_frac = (lon / (2.0 * math.pi) + PARTITION_OFFSET) % 1.0
    i = np.minimum((lon_frac * lon_cells).astype(np.int64), lon_cells - 1)
    j = np.minimum((lat / math.pi * lat_cells).astype(np.int64), lat_cells - 1)
    return i * lat_cells + j


def _cell_masses(points: np.ndarray, weights: np.ndarray, dim: int,
                 cells: int) -> np.ndarray:
    emb = embed3(points)
    norms = np.linalg.norm(emb, axis=1)
    dirs = emb / np.where(norms > 0, norms, 1.0)[:, None]
    idx = _cell_index(dirs, dim, cells)
    out = np.zeros(cells)
    np.add.at(out, idx, weights)
    return out


def conformality_residual(mu: AtomicMeasure, g, s: float,
                          cells: int = DEFAULT_CELLS) -> float:
    """Worst cell defect of the transformation rule mu(g A) = int_A j(g,.)^s dmu.

    Exact conformal measures give zero; depth-L truncations leak only the
    words whose g-translate crosses the depth boundary, so the residual is
    controlled by the mass of the depth shell.

    For measures synthesized from a word enumeration the two sides are
    paired word by word through the chain rule, under which all interior
    terms cancel identically and only the depth-shell stragglers remain;
    this keeps the computation meaningful even when distinct deep atoms
    are closer than float resolution.  Measures without enumeration data
    (or restricted to a subgroup) fall back to the direct atom formula.
    """
    enum = mu.meta.get("enumeration")
    if enum is not None and enum.get("kernel") is None:
        letters = _letters_of(enum["group"], g)
        if letters[0] >= 0:
            return _conformality_residual_paired(mu, g, s, cells, enum, letters)
    emb = embed3(mu.points)
    ginv = g.inverse()
    if mu.boundary_supported:
        pre = apply_boundary_raw(ginv.matrix[None, :, :], emb)
        jvals = _boundary_derivative_at_points(g, emb)
    else:
        pre = apply_interior_raw(ginv.matrix[None, :, :], emb)
        jvals = _interior_derivative_at_points(g, emb)
    lhs = _cell_masses(pre, mu.weights, mu.dim, cells)        # mass of g(A_i)
    rhs_weights = (jvals ** s) * mu.weights
    rhs = _cell_masses(emb, rhs_weights, mu.dim, cells)
    return float(np.max(np.abs(lhs - rhs)))


def _conformality_residual_paired(mu: AtomicMeasure, g, s: float, cells: int,
                                  enum: dict, letters: tuple[int, int]) -> float:
    """Residual via the exact word pairing w = g v.

    Every word v with |g v| <= L contributes j(g v, zeta)^s at the cell of
    v(zeta) to both sides, cancelling exactly.  What remains per cell is

      + weight(w)        for |w| = L not starting with the g letter,
                         binned at g^{-1} w (zeta)  [mu(g A) keeps them]
      - j(g v, zeta)^s/S for |v| = L not starting with the g^{-1} letter,
                         binned at v(zeta)          [the integral keeps them]

    both of which are depth-shell terms.
    """
    group: SchottkyGroup = enum["group"]
    point3 = embed3(np.asarray(enum["point"]))
    boundary = enum["kind"] == "boundary"
    g_letter, ginv_letter = letters
    ginv = g.inverse()
    depth = mu.depth
    scale = mu.series.partial_sum
    net = np.zeros(cells)
    first_by_level: list[np.ndarray] = []

    def first_letters(batch) -> np.ndarray:
        while len(first_by_level) <= batch.length:
            first_by_level.append(np.empty(0, dtype=np.int16))
        if batch.length == 0:
            arr = np.array([-1], dtype=np.int16)
        else:
            parents = first_by_level[batch.length - 1][batch.parent]
            arr = np.where(parents < 0, batch.last, parents).astype(np.int16)
        first_by_level[batch.length] = np.concatenate(
            [first_by_level[batch.length], arr])
        return arr

    def bin_of(points: np.ndarray) -> np.ndarray:
        norms = np.linalg.norm(points, axis=1)
        dirs = points / np.where(norms > 0, norms, 1.0)[:, None]
        return _cell_index(dirs, mu.dim, cells)

    try:
        for batch in iter_word_batches(group, depth, enum.get("budget")):
            first = first_letters(batch)
            if batch.length != depth:
                continue
            pre_mats = np.einsum("ij,njk->nik", ginv.matrix, batch.mats)
            comp_mats = np.einsum("ij,njk->nik", g.matrix, batch.mats)
            if boundary:
                jw = boundary_derivative_raw(batch.mats, point3) ** s
                pos_v = apply_boundary_raw(batch.mats, point3)
                pos_pre = apply_boundary_raw(pre_mats, point3)
                jgv = boundary_derivative_raw(comp_mats, point3) ** s
            else:
                jw = interior_derivative_raw(batch.mats, point3) ** s
                pos_v = apply_interior_raw(batch.mats, point3)
                pos_pre = apply_interior_raw(pre_mats, point3)
                jgv = interior_derivative_raw(comp_mats, point3) ** s
            keep_lhs = first != g_letter
            keep_rhs = first != ginv_letter
            np.add.at(net, bin_of(pos_pre)[keep_lhs], jw[keep_lhs] / scale)
            np.subtract.at(net, bin_of(pos_v)[keep_rhs], jgv[keep_rhs] / scale)
    except BudgetExceeded:
        pass
    return float(np.max(np.abs(net)))


def _letters_of(group: SchottkyGroup, g) -> tuple[int, int]:
    """Letter indices of a generator transform and its inverse (-2 if absent)."""
    for idx, gen in enumerate(group.generators):
        if gen.transform.is_close(g, tol=1e-12):
            return 2 * idx, 2 * idx + 1
        if gen.transform.inverse().is_close(g, tol=1e-12):
            return 2 * idx + 1, 2 * idx
    return -2, -2


def _boundary_derivative_at_points(g, points3: np.ndarray) -> np.ndarray:
    from .mobius import inverse_origin_images_raw

    pre, conorm = inverse_origin_images_raw(g.matrix)
    diff = points3 - pre[None, :]
    return conorm / np.einsum("ij,ij->i", diff, diff)


def _interior_derivative_at_points(g, points3: np.ndarray) -> np.ndarray:
    from .mobius import apply_halfspace_raw, ball_to_halfspace

    z, t = ball_to_halfspace(points3)
    z2, t2 = apply_halfspace_raw(g.matrix, z, t)
    dd = np.abs(z2) ** 2 + (t2 + 1.0) ** 2
    nsq = np.einsum("ij,ij->i", points3, points3)
    return (4.0 * t2 / dd) / (1.0 - nsq)


# --- atomicity ------------------------------------------------------------------

@dataclass(frozen=True)
class StabilizerCheck:
    kind: str                 # all_derivatives_one | derivative_not_one | none_declared
    witness: str | None = None
    value: float | None = None


@dataclass
class AtomicityVerdict:
    """Outcome of the two-sided atom test at a boundary point.

    ``atom_at_target`` only ever holds with a unit-derivative stabilizer
    and a certified convergent reduced series; a growth witness with unit
    derivatives, or any non-unit stabilizer derivative, excludes the atom.
    """

    stabilizer_check: StabilizerCheck
    series: SeriesResult
    conclusion: str           # atom_at_target | no_atom_at_target | inconclusive
    transcript: dict = field(default_factory=dict)


def classify_atomicity(group: SchottkyGroup, zeta: BoundaryPoint, s: float,
                       stab: DeclaredStabilizer | None, max_length: int,
                       budget: int | None = None,
                       tail: TailCertificate | None = None,
                       precomputed_series: SeriesResult | None = None) -> AtomicityVerdict:
    """Decide atom-or-not at ``zeta`` from stabilizer derivatives and the
    reduced boundary series, per the two-condition criterion.

    ``precomputed_series`` skips the series enumeration when the caller
    already evaluated the reduced series for the same target and exponent.
    """
    from .series import reduced_horospherical_partial

    transcript: dict = {}
    if stab is None:
        check = StabilizerCheck("none_declared")
        transcript["stabilizer"] = ("no stabilizer declared; the unit-derivative "
                                    "condition cannot be assessed")
        series = precomputed_series if precomputed_series is not None else \
            reduced_horospherical_partial(group, zeta, s, max_length,
                                          stab=None, budget=budget, tail=tail)
        return AtomicityVerdict(check, series, "inconclusive", transcript)
    if not stab.labels:
        check = StabilizerCheck("all_derivatives_one")
        transcript["stabilizer"] = "trivial declaration; condition holds vacuously"
    else:
        check = StabilizerCheck("all_derivatives_one")
        for label in stab.labels:
            gen = group.generator(label)
            moved = gen.transform.apply_boundary(zeta)
            if float(np.linalg.norm(moved.coords - zeta.coords)) > 1e-8:
                raise ValueError(
                    f"declared stabilizer generator {label} does not fix the target")
            value = gen.transform.derivative_boundary(zeta)
            transcript.setdefault("stabilizer_derivatives", {})[label] = value
            if abs(value - 1.0) > 1e-9:
                check = StabilizerCheck("derivative_not_one", label, value)
                break
    if precomputed_series is not None:
        if (precomputed_series.exponent != s
                or precomputed_series.depth != max_length):
            raise ValueError("precomputed series does not match the request")
        series = precomputed_series
    else:
        try:
            series = reduced_horospherical_partial(group, zeta, s, max_length,
                                                   stab=stab, budget=budget,
                                                   tail=tail)
        except BudgetExceeded:
            series = reduced_horospherical_partial(group, zeta, s, 0, stab=stab)
            transcript["budget"] = "exhausted before any level completed"
            return AtomicityVerdict(check, series, "inconclusive", transcript)

    if check.kind == "derivative_not_one":
        conclusion = "no_atom_at_target"
    elif series.verdict.kind == "converged_within":
        conclusion = "atom_at_target"
    elif series.verdict.kind == "growth_witness":
        conclusion = "no_atom_at_target"
    else:
        conclusion = "inconclusive"
    return AtomicityVerdict(check, series, conclusion, transcript)


# --- weak-convergence and singularity diagnostics --------------------------------

def weak_distance(mu: AtomicMeasure, nu: AtomicMeasure,
                  cells: int = DEFAULT_CELLS, top_k: int = TOP_K_ATOMS) -> float:
    """Bounded-Lipschitz-style distance: greedy transport between the top-K
    atoms plus total variation of the leftovers on the fixed partition.

    Symmetric; zero exactly when the matched heavy atoms coincide and the
    remaining mass agrees on every partition cell.
    """
    if mu.dim != nu.dim:
        raise ValueError("measures live on different boundary dimensions")
    pa, wa = mu.top_atoms(top_k)
    pb, wb = nu.top_atoms(top_k)
    wa = wa.copy()
    wb = wb.copy()
    ea, eb = embed3(pa), embed3(pb)
    dist = np.linalg.norm(ea[:, None, :] - eb[None, :, :], axis=2)
    transport = 0.0
    moved_a = np.zeros_like(wa)
    moved_b = np.zeros_like(wb)
    active = np.ones_like(dist, dtype=bool)
    while np.any(active) and wa.sum() > 1e-15 and wb.sum() > 1e-15:
        masked = np.where(active, dist, np.inf)
        i, j = np.unravel_index(np.argmin(masked), masked.shape)
        if not math.isfinite(masked[i, j]):
            break
        m = min(wa[i], wb[j])
        if m > 0.0:
            transport += m * dist[i, j]
            wa[i] -= m
            wb[j] -= m
            moved_a[i] += m
            moved_b[j] += m
        active[i, j] = False
        if wa[i] <= 1e-15:
            active[i, :] = False
        if wb[j] <= 1e-15:
            active[:, j] = False
    cells_a = _cell_masses(mu.points, mu.weights, mu.dim, cells)
    cells_b = _cell_masses(nu.points, nu.weights, nu.dim, cells)
    cells_a -= _cell_masses(pa, moved_a, mu.dim, cells)
    cells_b -= _cell_masses(pb, moved_b, nu.dim, cells)
    return float(transport + 0.5 * np.sum(np.abs(cells_a - cells_b)))


def singularity_diagnostic(mu: AtomicMeasure, nu: AtomicMeasure,
                           eps: float) -> tuple[float, float]:
    """(mass of mu within eps of supp nu, mass of nu within eps of supp mu)."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    ea, eb = embed3(mu.points), embed3(nu.points)
    tree_b = cKDTree(eb)
    tree_a = cKDTree(ea)
    da, _ = tree_b.query(ea, k=1)
    db, _ = tree_a.query(eb, k=1)
    overlap_a = float(math.fsum(mu.weights[da <= eps].tolist()))
    overlap_b = float(math.fsum(nu.weights[db <= eps].tolist()))
    return overlap_a, overlap_b


def support_gap(mu: AtomicMeasure, nu: AtomicMeasure) -> float:
    """Smallest distance between the two atom sets."""
    tree = cKDTree(embed3(nu.points))
    d, _ = tree.query(embed3(mu.points), k=1)
    return float(np.min(d))
