"""Schottky-type groups: paired-disc generators and reduced-word machinery.

The enumeration engine works on whole word-length levels at a time with
numpy arrays: a level is described by its last-letter and parent-index
arrays plus the evaluated matrices, and children are produced in
breadth-first, parent-major / letter-minor order, which makes the stream
deterministic and the per-level matrix array double as the prefix cache.
The final level of a deep run is emitted in slabs so its matrices never
have to be held in memory at once.

Letters are integers: generator ``i`` contributes letters ``2*i`` (the
generator) and ``2*i + 1`` (its inverse); ``letter ^ 1`` is the inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, DiscsOverlap, TargetNotInDomainClosure
from .mobius import Transform, image_disc, pair_discs, parabolic_fixing
from .model import BoundaryPoint, Disc, InteriorPoint, embed3, project_dim

SLAB_WORDS = 1 << 20          # fixed, so partial sums are bit-reproducible
PARABOLIC_POWER_CHECK = 30


# --- generators and the group -----------------------------------------------

@dataclass(frozen=True)
class Generator:
    """One generator: a transform pairing ``source`` onto ``target``.

    Loxodromic generators map Ext(source) onto Int(target); a parabolic
    generator has source == target (one disc around its fixed point) and
    every nonzero power maps the disc exterior inside.
    """

    label: str
    transform: Transform
    source: Disc
    target: Disc
    kind: str = "loxodromic"
    separation: float | None = None


@dataclass(frozen=True)
class Word:
    """A reduced word over the generator letters."""

    letters: tuple[int, ...]
    labels: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "id"
        if self.labels:
            return " ".join(self.labels[l] for l in self.letters)
        return " ".join(str(l) for l in self.letters)


class SchottkyGroup:
    """Finitely many disc-pairing generators acting on the ball of dimension N."""

    def __init__(self, dim: int, generators: Sequence[Generator],
                 validate: bool = True):
        if dim not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {dim}")
        self.dim = dim
        self.generators = tuple(generators)
        self.letter_count = 2 * len(self.generators)
        mats = []
        labels = []
        sources = []
        targets = []
        for gen in self.generators:
            inv = gen.transform.inverse()
            mats.extend([gen.transform.matrix, inv.matrix])
            labels.extend([gen.label, gen.label + "^-1"])
            sources.extend([gen.source, gen.target])
            targets.extend([gen.target, gen.source])
        self.letter_matrices = (np.stack(mats) if mats
                                else np.zeros((0, 2, 2), dtype=complex))
        self.letter_labels = tuple(labels)
        self.letter_sources = tuple(sources)
        self.letter_targets = tuple(targets)
        if validate:
            self._validate()

    # -- construction helpers --

    @classmethod
    def trivial(cls, dim: int) -> "SchottkyGroup":
        """The trivial group (no generators); its only word is the identity."""
        return cls(dim, [])

    @classmethod
    def from_disc_pairs(cls, dim: int, pairs: Sequence[tuple[Disc, Disc]],
                        labels: Sequence[str] | None = None,
                        separations: Sequence[float] | None = None) -> "SchottkyGroup":
        if labels is None:
            labels = [chr(ord("a") + i) for i in range(len(pairs))]
        gens = []
        for i, (plus, minus) in enumerate(pairs):
            sep = separations[i] if separations is not None else None
            try:
                transform = pair_discs(plus, minus)
            except DiscsOverlap as exc:
                raise DiscsOverlap(f"pair {labels[i]!r}: {exc}") from exc
            gens.append(Generator(labels[i], transform, plus, minus,
                                  "loxodromic", sep))
        return cls(dim, gens)

    @classmethod
    def free_product(cls, *groups: "SchottkyGroup") -> "SchottkyGroup":
        """Combine generator lists; all discs must stay pairwise disjoint."""
        dims = {g.dim for g in groups}
        if len(dims) != 1:
            raise ValueError("free product factors must share a dimension")
        gens: list[Generator] = []
        for g in groups:
            gens.extend(g.generators)
        return cls(dims.pop(), gens)

    def with_parabolic(self, label: str, disc: Disc,
                       strength: float = 4.0) -> "SchottkyGroup":
        """Extend by a parabolic generator fixing the center of ``disc``."""
        p = parabolic_fixing(disc, strength)
        gen = Generator(label, p, disc, disc, "parabolic")
        return SchottkyGroup(self.dim, self.generators + (gen,))

    # -- validation --

    def discs(self) -> list[tuple[str, Disc]]:
        """All distinct generator discs with their owning labels."""
        out = []
        for gen in self.generators:
            out.append((gen.label + "+", gen.source))
            if gen.kind != "parabolic":
                out.append((gen.label + "-", gen.target))
        return out

    def _validate(self) -> None:
        discs = self.discs()
        for i in range(len(discs)):
            for j in range(i + 1, len(discs)):
                if not discs[i][1].is_disjoint_from(discs[j][1]):
                    raise DiscsOverlap(
                        f"generator discs {discs[i][0]} and {discs[j][0]} overlap "
                        f"(angular gap {discs[i][1].angular_gap(discs[j][1]):.3e})")
        for e in range(self.letter_count):
            t = Transform(self.letter_matrices[e], self.dim)
            src, tgt = self.letter_sources[e], self.letter_targets[e]
            for _, disc in discs:
                if disc is src:
                    continue
                img = image_disc(t, disc)
                if not tgt.contains_disc(img, strict=True):
                    raise DiscsOverlap(
                        f"ping-pong failure: {self.letter_labels[e]} does not map "
                        f"disc at {disc.center.coords} inside its target")
        for gen in self.generators:
            if gen.kind == "parabolic":
                self._check_parabolic_powers(gen)

    def _check_parabolic_powers(self, gen: Generator) -> None:
        # Ext(source) is itself a disc: the complementary cap.
        ext = Disc(BoundaryPoint(project_dim(-embed3(gen.source.center.coords), self.dim)),
                   math.sqrt(max(0.0, 4.0 - gen.source.radius ** 2)))
        for sign_mat in (gen.transform.matrix, gen.transform.inverse().matrix):
            power = np.eye(2, dtype=complex)
            for _ in range(PARABOLIC_POWER_CHECK):
                power = power @ sign_mat
                img = image_disc(Transform(power, self.dim), ext)
                if not gen.source.contains_disc(img, strict=True):
                    raise DiscsOverlap(
                        f"parabolic generator {gen.label}: some power leaks out of its disc "
                        "(increase the strength or shrink the disc)")

    # -- queries --

    def letter_transform(self, letter: int) -> Transform:
        return Transform(self.letter_matrices[letter], self.dim)

    def generator(self, label: str) -> Generator:
        for gen in self.generators:
            if gen.label == label:
                return gen
        raise KeyError(f"no generator labelled {label!r}")

    def letters_for(self, labels: Sequence[str]) -> frozenset[int]:
        """Letters (both signs) of the named generators."""
        out = set()
        for idx, gen in enumerate(self.generators):
            if gen.label in labels:
                out.update((2 * idx, 2 * idx + 1))
        return frozenset(out)

    def fundamental_domain_contains(self, zeta: BoundaryPoint) -> bool:
        """True iff ``zeta`` lies in the closed exterior of every generator disc."""
        for _, disc in self.discs():
            if disc.chordal_distance(zeta) < disc.radius - 1e-12:
                return False
        return True

    def word_transform(self, word: Word | Sequence[int]) -> Transform:
        letters = word.letters if isinstance(word, Word) else tuple(word)
        mat = np.eye(2, dtype=complex)
        for letter in letters:
            mat = mat @ self.letter_matrices[letter]
        return Transform(mat, self.dim, _trusted_unit_det=True)

    def word(self, letters: Sequence[int]) -> Word:
        letters = tuple(letters)
        for a, b in zip(letters, letters[1:]):
            if b == a ^ 1:
                raise ValueError(f"word {letters} is not reduced")
        return Word(letters, self.letter_labels)


# --- the level engine ---------------------------------------------------------

@dataclass
class WordBatch:
    """A contiguous run of words of one length, in enumeration order.

    ``parent`` holds indices into the previous level's enumeration order;
    ``offset`` is the index of the batch's first word within its level.
    """

    length: int
    offset: int
    last: np.ndarray       # (m,) int16 letters, -1 for the identity
    parent: np.ndarray     # (m,) int64 indices into the previous level
    mats: np.ndarray       # (m, 2, 2) complex128
    final: bool            # True when this is the last batch of its level


def _expand_indices(parent_last: np.ndarray, letter_count: int
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Children of a level in parent-major, letter-minor order.

    Returns (parent_index, letter) arrays covering every reduced extension.
    """
    m = parent_last.shape[0]
    letters = np.tile(np.arange(letter_count, dtype=np.int16), m)
    parents = np.repeat(np.arange(m, dtype=np.int64), letter_count)
    forbidden = np.repeat(parent_last ^ 1, letter_count)
    keep = (letters != forbidden) | (np.repeat(parent_last, letter_count) < 0)
    return parents[keep], letters[keep]


def iter_word_batches(group: SchottkyGroup, max_length: int,
                      budget: int | None = None,
                      slab: int = SLAB_WORDS) -> Iterator[WordBatch]:
    """Yield every reduced word of length <= max_length as WordBatch runs.

    Level ``l`` has exactly 2k (2k-1)^(l-1) words.  Levels below the top
    are produced whole (their matrices are the prefix cache for the next
    level); the top level is sliced into slabs of at most ``slab`` words.
    Raises :class:`BudgetExceeded` after yielding whatever fits within the
    node budget.
    """
    letter_mats = group.letter_matrices
    k2 = group.letter_count
    generated = 0

    if budget is not None and budget < 1:
        raise BudgetExceeded("node budget exhausted before the identity word",
                             words_generated=0, depth_completed=-1)
    identity = np.eye(2, dtype=complex)[None, :, :]
    root = WordBatch(0, 0, np.array([-1], dtype=np.int16),
                     np.array([0], dtype=np.int64), identity, final=True)
    generated = 1
    yield root
    if max_length == 0:
        return

    prev_mats = identity
    prev_last = root.last
    length = 1
    while length <= max_length:
        parents, letters = _expand_indices(prev_last, k2)
        total = parents.shape[0]
        is_top = length == max_length
        next_mats = None if is_top else np.empty((total, 2, 2), dtype=complex)
        pos = 0
        while pos < total:
            hi = min(pos + slab, total)
            if budget is not None and generated + (hi - pos) > budget:
                hi = pos + (budget - generated)
                if hi > pos:
                    chunk = _compose_chunk(prev_mats, letter_mats,
                                           parents[pos:hi], letters[pos:hi])
                    generated += hi - pos
                    yield WordBatch(length, pos, letters[pos:hi], parents[pos:hi],
                                    chunk, final=True)
                raise BudgetExceeded(
                    f"node budget {budget} exhausted inside level {length}",
                    words_generated=generated, depth_completed=length - 1)
            chunk = _compose_chunk(prev_mats, letter_mats,
                                   parents[pos:hi], letters[pos:hi])
            if next_mats is not None:
                next_mats[pos:hi] = chunk
            generated += hi - pos
            yield WordBatch(length, pos, letters[pos:hi], parents[pos:hi],
                            chunk, final=hi == total)
            pos = hi
        if is_top:
            return
        prev_mats = next_mats
        prev_last = letters
        length += 1


def _compose_chunk(prev_mats: np.ndarray, letter_mats: np.ndarray,
                   parents: np.ndarray, letters: np.ndarray) -> np.ndarray:
    return np.einsum("nij,njk->nik", prev_mats[parents], letter_mats[letters])


class WordTable:
    """Per-level (last, parent) records for reconstructing words by index."""

    def __init__(self, group: SchottkyGroup):
        self.group = group
        self.last: list[np.ndarray] = []
        self.parent: list[np.ndarray] = []

    def record(self, batch: WordBatch) -> None:
        while len(self.last) <= batch.length:
            self.last.append(np.empty(0, dtype=np.int16))
            self.parent.append(np.empty(0, dtype=np.int64))
        self.last[batch.length] = np.concatenate([self.last[batch.length], batch.last])
        self.parent[batch.length] = np.concatenate([self.parent[batch.length], batch.parent])

    def word(self, length: int, index: int) -> Word:
        letters: list[int] = []
        lvl, idx = length, index
        while lvl > 0:
            letters.append(int(self.last[lvl][idx]))
            idx = int(self.parent[lvl][idx])
            lvl -= 1
        return Word(tuple(reversed(letters)), self.group.letter_labels)


def enumerate_words(group: SchottkyGroup, max_length: int,
                    budget: int | None = None) -> Iterator[tuple[Word, Transform]]:
    """Stream (word, transform) pairs in breadth-first lexicographic order.

    Yields 2k (2k-1)^(l-1) words at each length l >= 1 plus the identity;
    raises :class:`BudgetExceeded` once the configured node budget is hit,
    after yielding the words that fit.
    """
    table = WordTable(group)
    for batch in iter_word_batches(group, max_length, budget):
        table.record(batch)
        for i in range(batch.last.shape[0]):
            word = table.word(batch.length, batch.offset + i)
            yield word, Transform(batch.mats[i], group.dim, _trusted_unit_det=True)


def level_count(group: SchottkyGroup, length: int) -> int:
    k2 = group.letter_count
    if length == 0:
        return 1
    return k2 * (k2 - 1) ** (length - 1)


# --- quotients, kernels and cosets --------------------------------------------

@dataclass(frozen=True)
class QuotientSpec:
    """Homomorphism onto a free or free-abelian target, by generator images.

    ``images`` maps each generator label to a word in target symbols, e.g.
    ``{"a": (), "b": ("b",)}`` kills ``a`` and keeps ``b``.  Because the
    domain is free the assignment always extends to a homomorphism.
    """

    target_kind: str                      # "free" | "abelian"
    images: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def target_symbols(self) -> tuple[str, ...]:
        seen: list[str] = []
        for word in self.images.values():
            for sym in word:
                base = sym[:-3] if sym.endswith("^-1") else sym
                if base not in seen:
                    seen.append(base)
        return tuple(seen)


class QuotientTracker:
    """Vectorized image-word state along the BFS.

    The image of a word is tracked as a reduced stack of target letters;
    appending a domain letter whose image is empty or a single target
    letter is a masked push/pop, so kernel membership (empty stack) and
    coset keys (the stack contents) are exact and symbolic.
    """

    def __init__(self, group: SchottkyGroup, spec: QuotientSpec, max_length: int):
        self.group = group
        self.spec = spec
        symbols = spec.target_symbols()
        self.symbol_index = {s: i for i, s in enumerate(symbols)}
        self.letter_image = np.full(group.letter_count, -1, dtype=np.int16)
        for idx, gen in enumerate(group.generators):
            image = spec.images.get(gen.label, (gen.label,))
            if len(image) > 1:
                raise NotImplementedError(
                    "only trivial or single-letter generator images are supported")
            if image:
                sym = image[0]
                base, inv = (sym[:-3], True) if sym.endswith("^-1") else (sym, False)
                code = 2 * self.symbol_index[base] + (1 if inv else 0)
                self.letter_image[2 * idx] = code
                self.letter_image[2 * idx + 1] = code ^ 1
        self.depth = max_length
        self.stacks: list[np.ndarray] = []
        self.lengths: list[np.ndarray] = []

    def extend(self, batch: WordBatch) -> tuple[np.ndarray, np.ndarray]:
        """Image stacks for a batch; returns (stack rows, stack lengths)."""
        if batch.length == 0:
            stacks = np.full((1, self.depth), -1, dtype=np.int16)
            lengths = np.zeros(1, dtype=np.int16)
            self._store(batch, stacks, lengths)
            return stacks, lengths
        pstacks = self.stacks[batch.length - 1][batch.parent]
        plens = self.lengths[batch.length - 1][batch.parent]
        codes = self.letter_image[batch.last]
        stacks = pstacks.copy()
        lengths = plens.copy()
        m = batch.last.shape[0]
        rows = np.arange(m)
        has_image = codes >= 0
        top = np.where(plens > 0, pstacks[rows, np.maximum(plens - 1, 0)], -2)
        pops = has_image & (top == (codes ^ 1))
        pushes = has_image & ~pops
        if np.any(pops):
            r = rows[pops]
            lengths[r] = plens[r] - 1
            stacks[r, lengths[r]] = -1
        if np.any(pushes):
            r = rows[pushes]
            stacks[r, plens[r]] = codes[pushes]
            lengths[r] = plens[r] + 1
        self._store(batch, stacks, lengths)
        return stacks, lengths

    def _store(self, batch: WordBatch, stacks: np.ndarray, lengths: np.ndarray) -> None:
        while len(self.stacks) <= batch.length:
            self.stacks.append(np.empty((0, self.depth), dtype=np.int16))
            self.lengths.append(np.empty(0, dtype=np.int16))
        self.stacks[batch.length] = np.concatenate([self.stacks[batch.length], stacks])
        self.lengths[batch.length] = np.concatenate([self.lengths[batch.length], lengths])

    @staticmethod
    def kernel_mask(lengths: np.ndarray) -> np.ndarray:
        return lengths == 0

    @staticmethod
    def coset_keys(stacks: np.ndarray) -> np.ndarray:
        """One hashable row key per word: the packed image stack."""
        return np.ascontiguousarray(stacks).view(
            np.dtype((np.void, stacks.dtype.itemsize * stacks.shape[1])) ).ravel()


class StabilizerTracker:
    """Schreier coset keys for a stabilizer generated by a subset of letters.

    In a free group the words with no trailing stabilizer letter form a
    transversal; the key of a word is the index of its maximal prefix with
    that property, maintained incrementally (no suffix walking).
    """

    def __init__(self, group: SchottkyGroup, letters: frozenset[int]):
        self.letters = np.zeros(group.letter_count, dtype=bool)
        for l in letters:
            self.letters[l] = True
        self.anchors: list[np.ndarray] = []   # per level: (level, index) pairs

    def extend(self, batch: WordBatch) -> np.ndarray:
        """(m, 2) array of coset keys: the (level, index) of the stripped prefix."""
        if batch.length == 0:
            anchors = np.zeros((1, 2), dtype=np.int64)
            self._store(batch, anchors)
            return anchors
        pa = self.anchors[batch.length - 1][batch.parent]
        in_stab = self.letters[batch.last]
        own = np.stack([np.full(batch.last.shape[0], batch.length, dtype=np.int64),
                        batch.offset + np.arange(batch.last.shape[0], dtype=np.int64)],
                       axis=1)
        anchors = np.where(in_stab[:, None], pa, own)
        self._store(batch, anchors)
        return anchors

    def _store(self, batch: WordBatch, anchors: np.ndarray) -> None:
        while len(self.anchors) <= batch.length:
            self.anchors.append(np.empty((0, 2), dtype=np.int64))
        self.anchors[batch.length] = np.concatenate([self.anchors[batch.length], anchors])


def kernel_enumerate(group: SchottkyGroup, spec: QuotientSpec, max_length: int,
                     budget: int | None = None) -> Iterator[tuple[Word, Transform]]:
    """Stream the reduced words of length <= max_length killed by the quotient."""
    tracker = QuotientTracker(group, spec, max_length)
    table = WordTable(group)
    for batch in iter_word_batches(group, max_length, budget):
        table.record(batch)
        _, lengths = tracker.extend(batch)
        for i in np.nonzero(lengths == 0)[0]:
            word = table.word(batch.length, batch.offset + int(i))
            yield word, Transform(batch.mats[i], group.dim, _trusted_unit_det=True)


@dataclass(frozen=True)
class DeclaredStabilizer:
    """Stabilizer declared as a generator subset, with its retraction quotient.

    The retraction sends every non-stabilizer generator to the identity, so
    the kernel is a canonical complement and each coset of the stabilizer
    contains exactly one kernel word.
    """

    labels: tuple[str, ...]

    @classmethod
    def trivial(cls) -> "DeclaredStabilizer":
        return cls(())

    def retraction(self) -> QuotientSpec:
        return QuotientSpec("free", {label: (label,) for label in self.labels})

    def quotient_for(self, group: SchottkyGroup) -> QuotientSpec:
        images = {}
        keep = set(self.labels)
        for gen in group.generators:
            images[gen.label] = (gen.label,) if gen.label in keep else ()
        return QuotientSpec("free", images)


def coset_representatives(group: SchottkyGroup, stab, max_length: int,
                          budget: int | None = None,
                          policy: str = "auto") -> Iterator[tuple[Word, Transform]]:
    """One representative per left coset of ``stab`` among words <= max_length.

    ``stab`` is None (trivial), a :class:`DeclaredStabilizer`, or a
    :class:`QuotientSpec` whose kernel is the subgroup.  Policies:

    * ``"kernel"`` (default for declared stabilizers): representatives are
      the canonical complement words, i.e. exactly the kernel of the
      retraction killing the stabilizer letters;
    * ``"min_distance"``: among the enumerated members of each coset keep
      the one minimizing d(0, w(0)), ties to the earlier word.
    """
    if stab is None:
        yield from enumerate_words(group, max_length, budget)
        return
    if isinstance(stab, DeclaredStabilizer):
        if policy in ("auto", "kernel"):
            yield from kernel_enumerate(group, stab.quotient_for(group),
                                        max_length, budget)
            return
        tracker = StabilizerTracker(group, group.letters_for(stab.labels))
        yield from _min_distance_reps(group, max_length, budget,
                                      lambda b: _anchor_keys(tracker.extend(b)))
        return
    if isinstance(stab, QuotientSpec):
        tracker = QuotientTracker(group, stab, max_length)
        yield from _min_distance_reps(
            group, max_length, budget,
            lambda b: QuotientTracker.coset_keys(tracker.extend(b)[0]))
        return
    raise TypeError(f"unsupported stabilizer declaration: {stab!r}")


def _anchor_keys(anchors: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(anchors).view(
        np.dtype((np.void, anchors.dtype.itemsize * 2))).ravel()


def _min_distance_reps(group, max_length, budget, key_fn):
    from .mobius import origin_images_raw

    table = WordTable(group)
    best: dict[bytes, tuple[float, int, int, np.ndarray]] = {}
    order: list[bytes] = []
    exhausted = None
    try:
        for batch in iter_word_batches(group, max_length, budget):
            table.record(batch)
            keys = key_fn(batch)
            img, conorm = origin_images_raw(batch.mats)
            dist = np.arccosh(np.maximum(2.0 / conorm - 1.0, 1.0))
            for i in range(batch.last.shape[0]):
                key = keys[i].tobytes()
                entry = best.get(key)
                if entry is None:
                    best[key] = (float(dist[i]), batch.length, batch.offset + i,
                                 batch.mats[i].copy())
                    order.append(key)
                elif float(dist[i]) < entry[0] - 1e-13:
                    best[key] = (float(dist[i]), batch.length, batch.offset + i,
                                 batch.mats[i].copy())
    except BudgetExceeded as exc:
        exhausted = exc
    for key in order:
        _, length, index, mat = best[key]
        yield table.word(length, index), Transform(mat, group.dim, _trusted_unit_det=True)
    if exhausted is not None:
        raise exhausted


# --- ending sequences ---------------------------------------------------------

@dataclass(frozen=True)
class EndingSequenceSpec:
    """Radial approach data: target on the boundary, parameters t_n -> 1.

    ``offset`` (hyperbolic distance) allows a bounded lateral displacement
    from the ray; the default 0 keeps the sequence exactly radial.
    """

    target: BoundaryPoint
    t_values: tuple[float, ...]
    offset: float = 0.0

    def __post_init__(self):
        ts = tuple(self.t_values)
        if not ts or any(not 0.0 < t < 1.0 for t in ts):
            raise ValueError("t values must lie in (0, 1)")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("t values must increase")

    @classmethod
    def dyadic(cls, target: BoundaryPoint, count: int) -> "EndingSequenceSpec":
        return cls(target, tuple(1.0 - 2.0 ** (-n) for n in range(1, count + 1)))


def ending_sequence(group: SchottkyGroup, spec: EndingSequenceSpec) -> list[InteriorPoint]:
    """Points t_n * zeta marching out to the boundary target inside the domain cone.

    The target must lie in the closure of the fundamental domain; radial
    segments toward such a target never enter a generator disc's half-space,
    so every point is accepted exactly.
    """
    if not group.fundamental_domain_contains(spec.target):
        raise TargetNotInDomainClosure(
            f"target {spec.target.coords} lies inside an open generator disc")
    if spec.offset != 0.0:
        raise NotImplementedError("only radial sequences are generated; the "
                                  "offset field is reserved")
    return [InteriorPoint.radial(spec.target, t) for t in spec.t_values]
