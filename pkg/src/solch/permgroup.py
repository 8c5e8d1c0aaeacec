"""Finite permutation groups on 0-indexed points.

Permutations are stored as numpy image arrays so that composition is a
single fancy-indexing operation even at degrees in the tens of thousands.
Groups carry a stabilizer chain built eagerly at construction, with base
points chosen in natural order (0, 1, 2, ...), so that orders and membership
tests are deterministic and reproducible.  Groups whose order would exceed
``ORDER_CAP`` are rejected at construction time.

Besides classic point-stabilizer levels, a chain level may stabilize a
labelling of the points (the ``key`` of the level).  Tower computations use
key levels to descend along invariant block systems whose fibers are small;
this keeps stabilizer computations tractable at degrees where full point
transversals would not fit in memory.
"""

import math
import random
from dataclasses import dataclass, field

import numpy as np

ORDER_CAP = 10 ** 12

# Default search budgets for core_triviality_witness.
CONJUGATOR_LENGTH = 12
CONJUGATE_VISIT_CAP = 200_000
SUBGROUP_ELEMENT_CAP = 20_000

_IDENTITY_ARRAYS = {}


def _identity_array(degree):
    """Shared read-only identity image array for a degree."""
    arr = _IDENTITY_ARRAYS.get(degree)
    if arr is None:
        arr = np.arange(degree, dtype=np.int32)
        arr.setflags(write=False)
        _IDENTITY_ARRAYS[degree] = arr
    return arr


class GroupSizeError(Exception):
    """Raised when a group or closure would exceed its size cap."""


class NotABlockSystem(Exception):
    """A partition that some generator fails to map blocks-to-blocks."""

    def __init__(self, gen_index, block, point):
        self.gen_index = gen_index
        self.block = block
        self.point = point
        super().__init__(
            "generator %d splits block %d at point %d"
            % (gen_index, block, point)
        )


class Permutation:
    """A bijection of {0, ..., degree-1} stored as an image array."""

    __slots__ = ("images", "_key")

    def __init__(self, images):
        arr = np.array(images, dtype=np.int32)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("images must be a nonempty 1-d sequence")
        n = arr.size
        if arr.min() < 0 or arr.max() >= n:
            raise ValueError("image values out of range")
        seen = np.zeros(n, dtype=bool)
        seen[arr] = True
        if not seen.all():
            raise ValueError("images is not a bijection")
        arr.setflags(write=False)
        self.images = arr
        self._key = None

    @classmethod
    def _unchecked(cls, arr):
        """Wrap an image array known to be a bijection (internal)."""
        p = object.__new__(cls)
        arr.setflags(write=False)
        p.images = arr
        p._key = None
        return p

    @classmethod
    def identity(cls, degree):
        """The identity permutation on `degree` points."""
        return cls._unchecked(_identity_array(degree))

    @property
    def degree(self):
        return int(self.images.size)

    def __mul__(self, other):
        """Compose left-to-right: (p * q) applies p first, then q."""
        if self.images.size != other.images.size:
            raise ValueError("degree mismatch in composition")
        return Permutation._unchecked(other.images[self.images])

    def inverse(self):
        """The inverse permutation."""
        inv = np.empty_like(self.images)
        inv[self.images] = _identity_array(self.images.size)
        return Permutation._unchecked(inv)

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = Permutation.identity(self.degree)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def apply(self, point):
        """Image of a single point."""
        return int(self.images[point])

    def is_identity(self):
        return bool(np.array_equal(self.images,
                                   _identity_array(self.images.size)))

    def key(self):
        """Hashable fingerprint of the image array."""
        if self._key is None:
            self._key = self.images.tobytes()
        return self._key

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.images.size == other.images.size and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def moved_points(self):
        """Indices the permutation does not fix, ascending."""
        return [int(x) for x in np.flatnonzero(self.images != np.arange(self.images.size))]

    def to_cycles(self):
        """Cycle decomposition, fixed points omitted, each cycle starting at
        its smallest point, cycles sorted by smallest point."""
        n = self.degree
        seen = [False] * n
        cycles = []
        for start in range(n):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            x = int(self.images[start])
            while x != start:
                cyc.append(x)
                seen[x] = True
                x = int(self.images[x])
            if len(cyc) > 1:
                cycles.append(tuple(cyc))
        return cycles

    def cycle_string(self):
        """Serialize as cycle notation, e.g. "(0 1 2)(3 4)"; identity is "()"."""
        cycles = self.to_cycles()
        if not cycles:
            return "()"
        return "".join("(" + " ".join(str(x) for x in c) + ")" for c in cycles)

    @classmethod
    def from_cycle_string(cls, text, degree):
        """Parse cycle notation such as "(0 1 2)(3 4)"."""
        images = list(range(degree))
        body = text.strip()
        if body in ("", "()"):
            return cls(images)
        if not body.startswith("(") or not body.endswith(")"):
            raise ValueError("cycle string must be parenthesized: %r" % text)
        for chunk in body[1:-1].split(")("):
            pts = [int(tok) for tok in chunk.replace(",", " ").split()]
            if len(pts) != len(set(pts)):
                raise ValueError("repeated point in cycle %r" % chunk)
            for p in pts:
                if not 0 <= p < degree:
                    raise ValueError("point %d out of range for degree %d" % (p, degree))
            for a, b in zip(pts, pts[1:] + pts[:1]):
                images[a] = b
        return cls(images)

    def order(self):
        """Multiplicative order (lcm of cycle lengths)."""
        result = 1
        for c in self.to_cycles():
            result = math.lcm(result, len(c))
        return result

    def __repr__(self):
        return "Permutation(%r, degree=%d)" % (self.cycle_string(), self.degree)


def evaluate_word(letters, images, inverses=None):
    """Evaluate a signed word left-to-right over generator images.

    Letters are nonzero integers: +k means generator k-1, -k its inverse.
    """
    if not images:
        raise ValueError("no generator images to evaluate over")
    perm = Permutation.identity(images[0].degree)
    for letter in letters:
        idx = abs(letter) - 1
        if letter > 0:
            perm = perm * images[idx]
        elif inverses is not None:
            perm = perm * inverses[idx]
        else:
            perm = perm * images[idx].inverse()
    return perm


def closure_elements(generators, degree, cap=None):
    """Enumerate a generated group by breadth-first closure, identity first.

    Deterministic: elements are discovered by right-multiplying earlier
    elements by the generators in their given order.
    """
    ident = Permutation.identity(degree)
    elems = [ident]
    index = {ident.key(): 0}
    qi = 0
    while qi < len(elems):
        p = elems[qi]
        qi += 1
        for g in generators:
            q = p * g
            k = q.key()
            if k not in index:
                if cap is not None and len(elems) >= cap:
                    raise GroupSizeError(
                        "closure exceeds %d elements" % cap)
                index[k] = len(elems)
                elems.append(q)
    return elems


class _ChainLevel:
    """One level of a stabilizer chain.

    `key` maps points to the values this level stabilizes (None means the
    point itself); `rep` is a point whose key value is `base`.  `transversal`
    maps each reachable key value to a group element carrying `base` there.
    """

    __slots__ = ("key", "base", "rep", "orbit", "transversal", "gens",
                 "_tinv")

    def __init__(self, key, base, rep, gens):
        self.key = key
        self.base = base
        self.rep = rep
        self.gens = gens
        self.orbit = []
        self.transversal = {}
        self._tinv = {}

    def value(self, perm):
        """Key value that `perm` sends this level's base class to."""
        x = int(perm.images[self.rep])
        if self.key is None:
            return x
        return int(self.key[x])

    def inv_array(self, v):
        """Image array of the inverse of the transversal element at `v`,
        cached until the next rebuild."""
        arr = self._tinv.get(v)
        if arr is None:
            images = self.transversal[v].images
            arr = np.empty_like(images)
            arr[images] = _identity_array(images.size)
            self._tinv[v] = arr
        return arr

    def rebuild(self, degree, gens=None):
        """Recompute orbit and transversal by BFS over the given generators
        (the level's own, by default)."""
        if gens is None:
            gens = self.gens
        gen_arrs = [g.images for g in gens]
        key = self.key
        rep = self.rep
        self.orbit = [self.base]
        self.transversal = {self.base: Permutation.identity(degree)}
        self._tinv = {}
        qi = 0
        while qi < len(self.orbit):
            v = self.orbit[qi]
            qi += 1
            t_arr = self.transversal[v].images
            for ga in gen_arrs:
                tg = ga[t_arr]
                x = int(tg[rep])
                w = x if key is None else int(key[x])
                if w not in self.transversal:
                    self.transversal[w] = Permutation._unchecked(tg)
                    self.orbit.append(w)


def _sift(levels, perm):
    """Strip a permutation through a chain.

    Returns (residue, index): `index` is the level where stripping stopped,
    or len(levels) if every level was passed.
    """
    arr = perm.images
    stripped = False
    for i, lvl in enumerate(levels):
        x = int(arr[lvl.rep])
        v = x if lvl.key is None else int(lvl.key[x])
        if v not in lvl.transversal:
            return (Permutation._unchecked(arr) if stripped else perm), i
        arr = lvl.inv_array(v)[arr]
        stripped = True
    return (Permutation._unchecked(arr) if stripped else perm), len(levels)


def _min_moved(perm):
    diffs = np.flatnonzero(perm.images != _identity_array(perm.images.size))
    return int(diffs[0])


def _chain_order(levels):
    n = 1
    for lvl in levels:
        n *= len(lvl.orbit)
    return n


def _schreier_sims(degree, generators, order_cap, seed_levels=None):
    """Deterministic Schreier-Sims with natural point order for bases.

    Each level stores the generators first adjoined there; the group at
    level i is generated by the union of the generators at levels >= i
    (deeper residues fix longer base prefixes), so orbits and Schreier
    checks run over that effective set.

    `seed_levels` optionally prescribes the initial levels (typically
    key-valued ones whose orbits are block systems); they receive the
    generators, keep their order, and the chain continues past them with
    plain point levels as residues demand.

    Verification walks from the deepest level toward the top.  A residue
    inserted at level j only enlarges the effective sets of levels <= j,
    so the levels already verified below j stay verified and the walk
    resumes at j.
    """
    gens = [g for g in generators if not g.is_identity()]
    if not gens:
        return []

    def effective(levels, i):
        out = []
        for j in range(i, len(levels)):
            out.extend(levels[j].gens)
        return out

    if seed_levels:
        levels = list(seed_levels)
        levels[0].gens = list(gens)
    else:
        base = min(_min_moved(g) for g in gens)
        levels = [_ChainLevel(None, base, base, list(gens))]
    ident = _identity_array(degree)
    i = 0
    while i >= 0:
        lvl = levels[i]
        eff = effective(levels, i)
        lvl.rebuild(degree, eff)
        if _chain_order(levels) > order_cap:
            raise GroupSizeError("group order exceeds cap %d" % order_cap)
        eff_arrs = [g.images for g in eff]
        key = lvl.key
        rep = lvl.rep
        inserted = None
        for v in lvl.orbit:
            t_arr = lvl.transversal[v].images
            for ga in eff_arrs:
                tg = ga[t_arr]
                x = int(tg[rep])
                w = x if key is None else int(key[x])
                s_arr = lvl.inv_array(w)[tg]
                if np.array_equal(s_arr, ident):
                    continue
                residue, j = _sift(levels[i + 1:],
                                   Permutation._unchecked(s_arr))
                if residue.is_identity():
                    continue
                j_abs = i + 1 + j
                if j_abs == len(levels):
                    b = _min_moved(residue)
                    levels.append(_ChainLevel(None, b, b, []))
                levels[j_abs].gens.append(residue)
                inserted = j_abs
                break
            if inserted is not None:
                break
        i = inserted if inserted is not None else i - 1
    return levels


class PermutationGroup:
    """A permutation group with an eagerly built stabilizer chain."""

    def __init__(self, degree, generators, order_cap=ORDER_CAP):
        generators = list(generators)
        for g in generators:
            if g.degree != degree:
                raise ValueError("generator degree %d != group degree %d"
                                 % (g.degree, degree))
        self.degree = degree
        self.generators = generators
        self._levels = _schreier_sims(degree, generators, order_cap)
        self._order = _chain_order(self._levels)

    @classmethod
    def _from_chain(cls, degree, generators, levels, order_cap=ORDER_CAP):
        """Adopt a precomputed stabilizer chain (internal).

        Used by tower computations that build chains along block systems.
        """
        obj = object.__new__(cls)
        obj.degree = degree
        obj.generators = list(generators)
        obj._levels = list(levels)
        obj._order = _chain_order(obj._levels)
        if obj._order > order_cap:
            raise GroupSizeError("group order exceeds cap %d" % order_cap)
        return obj

    def order(self):
        return self._order

    def is_trivial(self):
        return self._order == 1

    def contains(self, perm):
        if perm.degree != self.degree:
            raise ValueError("degree mismatch in membership test")
        residue, _ = _sift(self._levels, perm)
        return residue.is_identity()

    def __contains__(self, perm):
        return self.contains(perm)

    def elements(self, cap=None):
        """All elements by breadth-first closure (identity first)."""
        return closure_elements(self.generators, self.degree, cap=cap)

    def nonredundant_generators(self):
        """A subsequence of the generators that still generates the group."""
        kept = []
        for g in self.generators:
            if g.is_identity():
                continue
            if kept and PermutationGroup(self.degree, kept).contains(g):
                continue
            kept.append(g)
            if PermutationGroup(self.degree, kept).order() == self._order:
                break
        return kept

    def __repr__(self):
        return "PermutationGroup(degree=%d, order=%d, gens=%d)" % (
            self.degree, self._order, len(self.generators))


def orbit(group, point):
    """Orbit of a point with Schreier witness words.

    Returns (points, words): the orbit in breadth-first discovery order
    starting at `point`, and for each orbit point a tuple of generator
    indices whose left-to-right product carries `point` there.
    """
    if not 0 <= point < group.degree:
        raise ValueError("point out of range")
    gens = group.generators
    points = [point]
    words = {point: ()}
    qi = 0
    while qi < len(points):
        x = points[qi]
        qi += 1
        for i, g in enumerate(gens):
            y = int(g.images[x])
            if y not in words:
                words[y] = words[x] + (i,)
                points.append(y)
    # The BFS invariant makes each word correct by construction; re-evaluate
    # them anyway so the witnesses are verified, not merely trusted.
    for x in points:
        z = point
        for i in words[x]:
            z = int(gens[i].images[z])
        if z != x:
            raise AssertionError("orbit witness failed verification")
    return points, words


def _orbit_transversal(generators, degree, point):
    """Orbit with permutation transversal (BFS, generator order)."""
    points = [point]
    transversal = {point: Permutation.identity(degree)}
    qi = 0
    while qi < len(points):
        x = points[qi]
        qi += 1
        t = transversal[x]
        for g in generators:
            y = int(g.images[x])
            if y not in transversal:
                transversal[y] = t * g
                points.append(y)
    return points, transversal


def schreier_generators(generators, degree, point):
    """Deduplicated Schreier generators of a point stabilizer."""
    points, transversal = _orbit_transversal(generators, degree, point)
    seen = set()
    result = []
    for x in points:
        t = transversal[x]
        for g in generators:
            y = int(g.images[x])
            s = t * g * transversal[y].inverse()
            k = s.key()
            if k in seen or s.is_identity():
                continue
            seen.add(k)
            result.append(s)
    return result


def stabilizer(group, point):
    """Point stabilizer as a new group (via Schreier generators)."""
    if not 0 <= point < group.degree:
        raise ValueError("point out of range")
    gens = schreier_generators(group.generators, group.degree, point)
    return PermutationGroup(group.degree, gens)


class GroupMap:
    """A homomorphism carried by a structural recipe.

    GroupMaps are produced by structural constructions (induced actions on
    block systems, tower bondings, coset actions), never by arbitrary
    generator assignment, so the homomorphism property holds by construction;
    it is additionally spot-checked on all generator pairs when the source
    generators are permutations.  `provenance` is one of "coset-action",
    "block-quotient", "tower-bonding".
    """

    PROVENANCES = ("coset-action", "block-quotient", "tower-bonding")

    def __init__(self, source_gens, images, provenance, evaluator=None,
                 source_names=None, check=True):
        if provenance not in self.PROVENANCES:
            raise ValueError("unknown provenance %r" % provenance)
        if source_gens is not None and len(source_gens) != len(images):
            raise ValueError("source and image generator counts differ")
        if source_names is not None and len(source_names) != len(images):
            raise ValueError("source names and image counts differ")
        self.source_gens = list(source_gens) if source_gens is not None else None
        self.images = list(images)
        self.provenance = provenance
        self.source_names = list(source_names) if source_names is not None else None
        self._evaluator = evaluator
        if check and self.source_gens is not None and evaluator is not None:
            for i, g in enumerate(self.source_gens):
                gi = evaluator(g)
                if gi != self.images[i]:
                    raise AssertionError(
                        "evaluator disagrees with stated image of generator %d" % i)
                for j, h in enumerate(self.source_gens):
                    if evaluator(g * h) != gi * self.images[j]:
                        raise AssertionError(
                            "homomorphism spot-check failed on generators (%d, %d)"
                            % (i, j))

    def apply(self, perm):
        """Image of an arbitrary source element."""
        if self._evaluator is None:
            raise ValueError("map has no pointwise evaluator (named source)")
        return self._evaluator(perm)

    def apply_word(self, letters):
        """Image of a word in the source generators (signed indices)."""
        return evaluate_word(letters, self.images)

    def __repr__(self):
        return "GroupMap(%s, %d generators)" % (self.provenance, len(self.images))


def _block_reps(block_map, n_blocks):
    reps = np.full(n_blocks, -1, dtype=np.int64)
    order = np.argsort(block_map, kind="stable")
    labels = block_map[order]
    first = np.ones(labels.size, dtype=bool)
    first[1:] = labels[1:] != labels[:-1]
    reps[labels[first]] = order[first]
    if (reps < 0).any():
        raise ValueError("block map is not surjective onto 0..%d" % (n_blocks - 1))
    return reps


def block_quotient_map(source_gens, block_map, provenance="block-quotient",
                       check=True):
    """GroupMap through an invariant partition given as a label array.

    Raises NotABlockSystem with a witness if some generator splits a block.
    """
    block_map = np.asarray(block_map, dtype=np.int64)
    n_blocks = int(block_map.max()) + 1
    reps = _block_reps(block_map, n_blocks)
    images = []
    for i, g in enumerate(source_gens):
        img = block_map[g.images[reps]]
        ok = block_map[g.images] == img[block_map]
        if not ok.all():
            bad = int(np.flatnonzero(~ok)[0])
            raise NotABlockSystem(i, int(block_map[bad]), bad)
        images.append(Permutation(img))

    def ev(perm):
        return Permutation(block_map[perm.images[reps]])

    return GroupMap(list(source_gens), images, provenance, evaluator=ev,
                    check=check)


def induced_action(group, block_map):
    """Action of a group on an invariant partition.

    Returns (group on blocks, GroupMap).  The partition is given as an array
    mapping each point to its block index; invariance is verified, and a
    non-invariant partition is rejected with a witness generator and block.
    """
    gmap = block_quotient_map(group.generators, block_map)
    blocks_group = PermutationGroup(
        gmap.images[0].degree if gmap.images else int(np.asarray(block_map).max()) + 1,
        gmap.images)
    return blocks_group, gmap


def prefix_restriction_map(source_gens, prefix, provenance="tower-bonding"):
    """GroupMap restricting to an invariant initial segment of the points."""
    for i, g in enumerate(source_gens):
        if int(g.images[:prefix].max(initial=-1)) >= prefix:
            raise ValueError(
                "generator %d does not preserve the first %d points" % (i, prefix))

    def ev(perm):
        head = perm.images[:prefix]
        if int(head.max(initial=-1)) >= prefix:
            raise ValueError("element does not preserve the invariant subset")
        return Permutation(head)

    images = [ev(g) for g in source_gens]
    return GroupMap(list(source_gens), images, provenance, evaluator=ev)


def word_map(source_names, images, provenance="coset-action"):
    """GroupMap from named abstract generators (a free source) to images.

    Any assignment from a free source is a homomorphism, so there is nothing
    to spot-check; elements are mapped through `apply_word`.
    """
    return GroupMap(None, images, provenance, evaluator=None,
                    source_names=source_names, check=False)


def kernel_of_action(group, gmap, closure_cap=100_000):
    """Kernel of a structural homomorphism, as a permutation group.

    Enumerates the image group by closure (budgeted by `closure_cap`) with
    lifted coset representatives; the kernel is generated by the Schreier
    generators of the stabilizer of the identity point of the image.
    """
    if len(gmap.images) != len(group.generators):
        raise ValueError("map does not cover the group generators")
    img_degree = gmap.images[0].degree if gmap.images else 1
    ident_img = Permutation.identity(img_degree)
    points = [ident_img]
    lifts = {ident_img.key(): Permutation.identity(group.degree)}
    order = {ident_img.key(): 0}
    elems = [ident_img]
    qi = 0
    while qi < len(elems):
        q = elems[qi]
        qi += 1
        for g, gi in zip(group.generators, gmap.images):
            r = q * gi
            k = r.key()
            if k not in order:
                if len(elems) >= closure_cap:
                    raise GroupSizeError("image closure exceeds %d" % closure_cap)
                order[k] = len(elems)
                elems.append(r)
                lifts[k] = lifts[q.key()] * g
    seen = set()
    kgens = []
    for q in elems:
        for g, gi in zip(group.generators, gmap.images):
            target = (q * gi).key()
            s = lifts[q.key()] * g * lifts[target].inverse()
            k = s.key()
            if s.is_identity() or k in seen:
                continue
            seen.add(k)
            kgens.append(s)
    kernel = PermutationGroup(group.degree, kgens)
    # The kernel of a homomorphism is normal; verify it on the generators.
    for g in group.generators:
        ginv = g.inverse()
        for s in kernel.generators:
            if not kernel.contains(ginv * s * g):
                raise AssertionError("kernel failed normality verification")
    return kernel


@dataclass
class CoreVerdict:
    """Outcome of a core-triviality search.

    status "trivial": every nontrivial subgroup element has a recorded
    conjugator word moving it outside the subgroup.  status "nontrivial":
    `core_element` lies in every conjugate of the subgroup (its conjugation
    closure stayed inside, so its normal closure is contained in the
    subgroup).  status "undetermined": a search budget ran out; never a
    false certificate.
    """

    status: str
    witnesses: dict = field(default_factory=dict)
    core_element: Permutation = None
    bounds: dict = field(default_factory=dict)


def core_triviality_witness(ambient, subgroup,
                            max_conjugator_length=CONJUGATOR_LENGTH,
                            element_cap=SUBGROUP_ELEMENT_CAP,
                            visit_cap=CONJUGATE_VISIT_CAP,
                            random_tries=64, seed=0):
    """Decide whether the largest normal subgroup of `ambient` inside
    `subgroup` is trivial, with certificates.

    For each nontrivial subgroup element, walk its conjugates breadth-first
    (conjugating by ambient generators and their inverses, word length up to
    `max_conjugator_length`).  Escaping the subgroup certifies the element
    contributes nothing to the core; a conjugation closure that stays inside
    certifies a nontrivial core.  Budget exhaustion falls back to a seeded
    random conjugator sample, then to "undetermined".
    """
    for g in subgroup.generators:
        if not ambient.contains(g):
            raise ValueError("subgroup is not contained in the ambient group")
    bounds = {
        "max_conjugator_length": max_conjugator_length,
        "element_cap": element_cap,
        "visit_cap": visit_cap,
        "random_tries": random_tries,
        "seed": seed,
    }
    try:
        elems = subgroup.elements(cap=element_cap)
    except GroupSizeError:
        return CoreVerdict("undetermined", bounds=dict(bounds, reason="subgroup too large"))
    amb_gens = ambient.generators
    steps = []
    for i, g in enumerate(amb_gens):
        steps.append((i + 1, g.inverse(), g))      # conjugate by g
        steps.append((-(i + 1), g, g.inverse()))   # conjugate by g^-1
    witnesses = {}
    undetermined = False
    rng = random.Random(seed)
    for s in elems[1:]:
        frontier = [(s, ())]
        visited = {s.key()}
        escape = None
        budget_hit = False
        while frontier and escape is None:
            nxt = []
            for elem, word in frontier:
                for letter, left, right in steps:
                    conj = left * elem * right
                    k = conj.key()
                    if k in visited:
                        continue
                    if not subgroup.contains(conj):
                        escape = word + (letter,)
                        break
                    if len(word) + 1 >= max_conjugator_length:
                        budget_hit = True
                        continue
                    if len(visited) >= visit_cap:
                        budget_hit = True
                        continue
                    visited.add(k)
                    nxt.append((conj, word + (letter,)))
                if escape is not None:
                    break
            frontier = nxt
        if escape is not None:
            witnesses[s.cycle_string()] = escape
            continue
        if not budget_hit:
            # The conjugation closure of s stayed inside the subgroup, so the
            # normal closure of s is a nontrivial normal subgroup inside it.
            return CoreVerdict("nontrivial", core_element=s, bounds=bounds)
        for _ in range(random_tries):
            length = rng.randrange(max_conjugator_length, 2 * max_conjugator_length + 1)
            word = tuple(rng.choice([1, -1]) * (rng.randrange(len(amb_gens)) + 1)
                         for _ in range(length))
            conj = s
            for letter in word:
                _, left, right = steps[2 * (abs(letter) - 1) + (0 if letter > 0 else 1)]
                conj = left * conj * right
            if not subgroup.contains(conj):
                escape = word
                break
        if escape is not None:
            witnesses[s.cycle_string()] = escape
        else:
            undetermined = True
    if undetermined:
        return CoreVerdict("undetermined", witnesses=witnesses, bounds=bounds)
    return CoreVerdict("trivial", witnesses=witnesses, bounds=bounds)


def cyclic_group(n):
    """Cyclic group generated by the n-cycle (0 1 ... n-1)."""
    if n < 1:
        raise ValueError("degree must be positive")
    images = np.roll(np.arange(n, dtype=np.int32), -1)
    return PermutationGroup(n, [Permutation(images)])


def symmetric_group(n):
    """Symmetric group on n points."""
    if n < 1:
        raise ValueError("degree must be positive")
    if n == 1:
        return PermutationGroup(1, [])
    cycle = Permutation(np.roll(np.arange(n, dtype=np.int32), -1))
    swap = Permutation.from_cycle_string("(0 1)", n)
    gens = [swap] if n == 2 else [cycle, swap]
    return PermutationGroup(n, gens)


def alternating_group(n):
    """Alternating group on n points."""
    if n < 1:
        raise ValueError("degree must be positive")
    if n < 3:
        return PermutationGroup(n, [])
    three = Permutation.from_cycle_string("(0 1 2)", n)
    if n == 3:
        return PermutationGroup(n, [three])
    if n % 2 == 1:
        big = Permutation(np.roll(np.arange(n, dtype=np.int32), -1))
    else:
        images = np.arange(n, dtype=np.int32)
        images[1:] = np.roll(images[1:], -1)
        big = Permutation(images)
    return PermutationGroup(n, [three, big])


def direct_sum(*groups):
    """Direct product acting on the disjoint union of the point sets.

    Generators are the factors' generators extended by the identity, listed
    factor by factor.
    """
    degree = sum(g.degree for g in groups)
    gens = []
    offset = 0
    for g in groups:
        for p in g.generators:
            images = np.arange(degree, dtype=np.int32)
            images[offset:offset + g.degree] = p.images + offset
            gens.append(Permutation(images))
        offset += g.degree
    return PermutationGroup(degree, gens)
