"""Constructors for chain towers.

The central entry point is ``lenstra_chain``: given finite groups H_l with
bonding epimorphisms, a subgroup D_l per level, and coherent generator
sequences that are dense (generate every H_l), it realizes the chain whose
level-l space is the right-coset space D_l\\H_l with the generators acting
by right translation.  The per-level triviality of the largest normal
subgroup inside D_l is checked with certificates; when it holds, the
output's discriminant tower reproduces the prescribed D_l.

The remaining builders produce the standard examples: odometers, the
Klein-bottle-group tower (via coset enumeration), product chains with a
non-normal direct factor, diagonal and factor-by-factor subgroups of
products of alternating groups, and a free-group tree fixture whose
generator acts identically on one subtree while permuting another.
"""

from dataclasses import dataclass, field

import numpy as np

from .fpgroup import (Presentation, action_from_table, coset_witness_words,
                      format_word, parse_word, todd_coxeter)
from .permgroup import (GroupSizeError, GroupMap, Permutation,
                        PermutationGroup, alternating_group,
                        block_quotient_map, core_triviality_witness,
                        cyclic_group, direct_sum, prefix_restriction_map)
from .tower import ChainTower, TowerLevel, validate

DEGREE_CAP = 200_000


class LenstraCoreError(Exception):
    """A level subgroup contains a nontrivial normal subgroup of its
    ambient group (or triviality could not be certified)."""

    def __init__(self, level, status, element=None):
        self.level = level
        self.status = status
        self.element = element
        msg = "level %d core check: %s" % (level, status)
        if element is not None:
            msg += " (element %s)" % element.cycle_string()
        super().__init__(msg)


@dataclass
class QuotientTowerSpec:
    """Levelwise data for the coset-space construction.

    ``groups[l]`` is H_l (level 0 trivial on one point), ``bondings[l]`` the
    epimorphism H_{l+1} -> H_l, ``subgroups[l]`` is D_l <= H_l, and
    ``gen_sequences[i][l]`` the level-l image of abstract generator i,
    coherent under the bondings.
    """

    gen_names: tuple
    groups: list
    bondings: list
    subgroups: list
    gen_sequences: list

    @property
    def depth(self):
        return len(self.groups) - 1

    def validate(self):
        L = self.depth
        if len(self.bondings) != L or len(self.subgroups) != L + 1:
            raise ValueError("bonding/subgroup counts do not match depth")
        if self.groups[0].degree != 1 or self.groups[0].order() != 1:
            raise ValueError("level 0 group must be trivial on one point")
        if self.subgroups[0].order() != 1:
            raise ValueError("level 0 subgroup must be trivial")
        if len(self.gen_sequences) != len(self.gen_names):
            raise ValueError("one generator sequence per name required")
        for seq in self.gen_sequences:
            if len(seq) != L + 1:
                raise ValueError("generator sequences must cover all levels")
        for l in range(L + 1):
            H, D = self.groups[l], self.subgroups[l]
            for d in D.generators:
                if not H.contains(d):
                    raise ValueError("level %d subgroup not inside its group" % l)
            level_gens = [seq[l] for seq in self.gen_sequences]
            if PermutationGroup(H.degree, level_gens).order() != H.order():
                raise ValueError(
                    "generator sequences are not dense at level %d" % l)
        for l in range(L):
            theta = self.bondings[l]
            for seq in self.gen_sequences:
                if theta.apply(seq[l + 1]) != seq[l]:
                    raise ValueError(
                        "generator sequence incoherent across levels %d->%d"
                        % (l + 1, l))
            for d in self.subgroups[l + 1].generators:
                if not self.subgroups[l].contains(theta.apply(d)):
                    raise ValueError(
                        "subgroup tower not nested across levels %d->%d"
                        % (l + 1, l))

    def index(self, level):
        H, D = self.groups[level], self.subgroups[level]
        if H.order() % D.order():
            raise ValueError("subgroup order does not divide group order")
        return H.order() // D.order()


def _coset_space(group_degree, gen_images, subgroup_elements):
    """BFS enumeration of right cosets D.h under right translation.

    Returns (image arrays per generator, representatives).  Coset identity
    is the minimum of (d*h) image bytes over d in D; the basepoint D.e is
    coset 0, and numbering follows breadth-first discovery in generator
    order.
    """
    nontrivial = len(subgroup_elements) > 1

    def canonical(h):
        if not nontrivial:
            return h.key()
        return min((d * h).key() for d in subgroup_elements)

    ident = Permutation.identity(group_degree)
    reps = [ident]
    index = {canonical(ident): 0}
    out_edges = [[] for _ in gen_images]
    qi = 0
    while qi < len(reps):
        h = reps[qi]
        qi += 1
        for gi, g in enumerate(gen_images):
            h2 = h * g
            key = canonical(h2)
            j = index.get(key)
            if j is None:
                j = len(reps)
                index[key] = j
                reps.append(h2)
            out_edges[gi].append(j)
    images = [Permutation(np.array(edges, dtype=np.int32))
              for edges in out_edges]
    return images, reps, index, canonical


def lenstra_chain(spec, mode="strict", seed=0, degree_cap=DEGREE_CAP):
    """Realize a chain tower from levelwise quotient data.

    Level l acts on the [H_l : D_l] right cosets of D_l.  In "strict" mode
    every level must have a certified-trivial core (largest normal subgroup
    of H_l inside D_l); a nontrivial or uncertified core raises
    LenstraCoreError.  In "quotient" mode construction proceeds regardless
    (the coset action factors the core out by itself) and the per-level
    certificates are recorded in the tower source.
    """
    if mode not in ("strict", "quotient"):
        raise ValueError("mode must be 'strict' or 'quotient'")
    spec.validate()
    L = spec.depth
    indices = [spec.index(l) for l in range(L + 1)]
    for l in range(L):
        if indices[l + 1] <= indices[l]:
            raise ValueError(
                "not a proper chain: index %d at level %d does not exceed "
                "index %d at level %d" % (indices[l + 1], l + 1, indices[l], l))
    if max(indices) > degree_cap:
        raise GroupSizeError("level degree %d exceeds cap %d"
                             % (max(indices), degree_cap))

    core_status = []
    for l in range(L + 1):
        if spec.subgroups[l].order() == 1:
            core_status.append("trivial")
            continue
        verdict = core_triviality_witness(spec.groups[l], spec.subgroups[l],
                                          seed=seed)
        core_status.append(verdict.status)
        if mode == "strict" and verdict.status != "trivial":
            raise LenstraCoreError(l, verdict.status, verdict.core_element)

    levels = []
    prev_index = None
    prev_canonical = None
    for l in range(L + 1):
        gen_images = [seq[l] for seq in spec.gen_sequences]
        d_elements = spec.subgroups[l].elements()
        images, reps, index, canonical = _coset_space(
            spec.groups[l].degree, gen_images, d_elements)
        if len(reps) != indices[l]:
            raise AssertionError(
                "coset count %d != index %d at level %d"
                % (len(reps), indices[l], l))
        if l == 0:
            proj = None
        else:
            theta = spec.bondings[l - 1]
            proj = np.empty(len(reps), dtype=np.int32)
            for i, h in enumerate(reps):
                proj[i] = prev_index[prev_canonical(theta.apply(h))]
        levels.append(TowerLevel(len(reps), images, proj))
        prev_index, prev_canonical = index, canonical

    source = {
        "kind": "lenstra",
        "mode": mode,
        "core_status": core_status,
        "indices": indices,
    }
    tower = ChainTower(spec.gen_names, levels, source)
    report = validate(tower)
    if not report.ok:
        raise AssertionError("construction produced an invalid tower: %r"
                             % report.violations)
    return tower


def odometer(scales):
    """The +1 action on nested cyclic quotients Z/(s_1 ... s_l)."""
    scales = [int(s) for s in scales]
    if not scales:
        raise ValueError("at least one scale required")
    for s in scales:
        if s < 2:
            raise ValueError("scales must be >= 2")
    sizes = [1]
    for s in scales:
        sizes.append(sizes[-1] * s)
    levels = [TowerLevel(1, [Permutation.identity(1)])]
    for l in range(1, len(sizes)):
        n = sizes[l]
        step = Permutation(np.roll(np.arange(n, dtype=np.int32), -1))
        proj = np.arange(n, dtype=np.int32) % sizes[l - 1]
        levels.append(TowerLevel(n, [step], proj))
    source = {"kind": "builder", "name": "odometer", "params": {"scales": scales}}
    return ChainTower(("a",), levels, source)


def fp_tower(presentation, level_subgroup_words, max_cosets=100_000,
             source=None):
    """Tower from one coset enumeration per level.

    ``level_subgroup_words[l-1]`` generates the level-l subgroup; each level's
    words must lie in the previous level's subgroup (nesting is checked by
    tracing them in the previous table).  Projections follow each coset's
    witness word through the previous table.
    """
    names = presentation.names
    levels = [TowerLevel(1, [Permutation.identity(1)] * len(names))]
    prev_ct = None
    for l, words in enumerate(level_subgroup_words, start=1):
        ct = todd_coxeter(presentation, words, max_cosets=max_cosets)
        if not ct.complete:
            raise GroupSizeError(
                "coset enumeration hit the %d-coset cap at level %d"
                % (max_cosets, l))
        if prev_ct is not None:
            for w in ct.subgroup_words:
                if prev_ct.follow(0, w) != 0:
                    raise ValueError(
                        "level %d subgroup is not contained in level %d"
                        % (l, l - 1))
        perms = action_from_table(ct)
        witness = coset_witness_words(ct)
        if prev_ct is None:
            proj = np.zeros(ct.n_cosets, dtype=np.int32)
        else:
            proj = np.array([prev_ct.follow(0, w) for w in witness],
                            dtype=np.int32)
        levels.append(TowerLevel(ct.n_cosets, perms, proj))
        prev_ct = ct
    if source is None:
        source = {
            "kind": "fp_presentation",
            "generators": list(names),
            "relators": [format_word(r, names) for r in presentation.relators],
            "subgroups": [
                [format_word(parse_word(w, names) if isinstance(w, str)
                             else tuple(w), names) for w in lvl]
                for lvl in level_subgroup_words],
        }
    tower = ChainTower(names, levels, source)
    report = validate(tower)
    if not report.ok:
        raise AssertionError("enumeration produced an invalid tower: %r"
                             % report.violations)
    return tower


def rt_klein(depth):
    """Tower for the group <a, b | b a b^-1 a> over subgroups <a^(2^l), b>."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    pres = Presentation(("a", "b"), ["b a b^-1 a"])
    level_words = [["a^%d" % (2 ** l), "b"] for l in range(1, depth + 1)]
    source = {"kind": "builder", "name": "rt_klein", "params": {"depth": depth}}
    tower = fp_tower(pres, level_words, source=source)
    if tower.degrees != [2 ** l for l in range(depth + 1)]:
        raise AssertionError("unexpected degree sequence %s" % tower.degrees)
    return tower


def _parity(perm):
    return sum(len(c) - 1 for c in perm.to_cycles()) % 2


def _pad(perm, degree):
    images = np.arange(degree, dtype=np.int32)
    images[:perm.degree] = perm.images
    return Permutation(images)


def _alt_generating_pairs(m, count):
    """Generating pairs of Alt(m), pairwise distinguished by word-order
    signatures (orders of x, y, xy, xxy, xyy — invariant under any
    automorphism), so products over distinct pairs generate the full power
    of the simple group."""
    if m < 3:
        raise ValueError("alternating groups on < 3 points are trivial")
    target = alternating_group(m).order()
    three = Permutation.from_cycle_string("(0 1 2)", m)
    if m % 2 == 1:
        big = Permutation(np.roll(np.arange(m, dtype=np.int32), -1))
    else:
        images = np.arange(m, dtype=np.int32)
        images[1:] = np.roll(images[1:], -1)
        big = Permutation(images)
    candidates = []
    seen = set()
    for p in (three, big, three * three, big * big, three * big, big * three,
              three * big * big, big * big * three, big * three * big,
              three * three * big, big * big * three * three,
              three * big * three, big * three * three):
        if p.is_identity() or p.key() in seen:
            continue
        seen.add(p.key())
        candidates.append(p)
    pairs = []
    sigs = set()
    used = set()
    for x in candidates:
        if x.key() in used:
            continue
        for y in candidates:
            if x == y or y.key() in used:
                continue
            sig = (x.order(), y.order(), (x * y).order(),
                   (x * x * y).order(), (x * y * y).order())
            if sig in sigs:
                continue
            if PermutationGroup(m, [x, y]).order() != target:
                continue
            sigs.add(sig)
            # no component may repeat across pairs: repeats would let very
            # short words land in a diagonal subgroup of the product
            used.add(x.key())
            used.add(y.key())
            pairs.append((x, y))
            if len(pairs) == count:
                return pairs
            break
    raise ValueError(
        "found only %d independent generating pairs of Alt(%d), need %d"
        % (len(pairs), m, count))


def _product_spec(factor_degrees, subgroup_gens_per_level, gen_names,
                  pair_schedule):
    """QuotientTowerSpec for H_l = Alt(m_1) x ... x Alt(m_l) with supplied
    subgroup generators and generator-pair schedule per factor."""
    L = len(factor_degrees)
    groups = [PermutationGroup(1, [])]
    offsets = [0]
    for m in factor_degrees:
        offsets.append(offsets[-1] + m)
    for l in range(1, L + 1):
        groups.append(direct_sum(*[alternating_group(m)
                                   for m in factor_degrees[:l]]))
    bondings = []
    for l in range(L):
        if l == 0:
            block = np.zeros(groups[1].degree, dtype=np.int64)
            bondings.append(block_quotient_map(groups[1].generators, block,
                                               provenance="tower-bonding"))
        else:
            bondings.append(prefix_restriction_map(groups[l + 1].generators,
                                                   offsets[l]))
    subgroups = [PermutationGroup(1, [])]
    for l in range(1, L + 1):
        gens = subgroup_gens_per_level(l, offsets)
        subgroups.append(PermutationGroup(groups[l].degree, gens))
    sequences = []
    for gi in range(len(gen_names)):
        seq = [Permutation.identity(1)]
        for l in range(1, L + 1):
            parts = [pair_schedule[k][gi] for k in range(l)]
            images = np.concatenate([parts[k].images + offsets[k]
                                     for k in range(l)]).astype(np.int32)
            seq.append(Permutation(images))
        sequences.append(seq)
    return QuotientTowerSpec(tuple(gen_names), groups, bondings, subgroups,
                             sequences)


def _as_padded_subgroup(f, m):
    if isinstance(f, PermutationGroup):
        gens = f.generators
        if f.degree > m:
            raise ValueError("subgroup degree exceeds the ambient %d points" % m)
    else:
        gens = list(f)
    padded = [_pad(g, m) for g in gens]
    for g in padded:
        if _parity(g) != 0:
            raise ValueError(
                "subgroup generator %s is odd on %d points"
                % (g.cycle_string(), m))
    return padded


def alt_diagonal_chain(f, m, depth, mode="strict", seed=0,
                       degree_cap=DEGREE_CAP):
    """Chain with H_l = Alt(m)^l and D_l the diagonal copy of ``f``.

    ``f`` is a permutation group (or generator list) on at most m points,
    acting by even permutations.  The subgroup sits diagonally across all
    factors, so every truncation of the resulting tower keeps a discriminant
    isomorphic to ``f``.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    f_gens = _as_padded_subgroup(f, m)
    pairs = _alt_generating_pairs(m, depth)

    def diag_gens(l, offsets):
        gens = []
        for g in f_gens:
            images = np.concatenate([g.images + offsets[k]
                                     for k in range(l)]).astype(np.int32)
            gens.append(Permutation(images))
        return gens

    spec = _product_spec([m] * depth, diag_gens, ("u", "v"), pairs)
    tower = lenstra_chain(spec, mode=mode, seed=seed, degree_cap=degree_cap)
    tower.source.update({
        "kind": "builder", "name": "alt_diagonal",
        "params": {"f": [g.cycle_string() for g in f_gens], "m": m,
                   "depth": depth},
    })
    return tower


def full_product_chain(factors, depth=None, mode="strict", seed=0,
                       degree_cap=DEGREE_CAP):
    """Chain with H_l = prod Alt(m_i) and D_l = prod F_i, factor by factor.

    ``factors`` is a list of (f, m) pairs; level l uses the first l factors.
    Unlike the diagonal construction, truncations erode the leading factors
    but the deeper ones keep every truncated discriminant nontrivial.
    """
    factors = list(factors)
    if depth is None:
        depth = len(factors)
    if not 1 <= depth <= len(factors):
        raise ValueError("depth must be between 1 and the factor count")
    factors = factors[:depth]
    degrees = [m for _, m in factors]
    padded = [_as_padded_subgroup(f, m) for f, m in factors]

    # pairwise-distinct generating pairs are needed within each isomorphism
    # class of factors; factors of different degree cannot collide
    by_degree = {}
    pairs = []
    for m in degrees:
        by_degree[m] = by_degree.get(m, 0) + 1
    pools = {m: _alt_generating_pairs(m, count)
             for m, count in by_degree.items()}
    used = {m: 0 for m in by_degree}
    for m in degrees:
        pairs.append(pools[m][used[m]])
        used[m] += 1

    def factor_gens(l, offsets):
        gens = []
        for k in range(l):
            for g in padded[k]:
                images = np.arange(offsets[l], dtype=np.int32)
                images[offsets[k]:offsets[k + 1]] = g.images + offsets[k]
                gens.append(Permutation(images))
        return gens

    spec = _product_spec(degrees, factor_gens, ("u", "v"), pairs)
    tower = lenstra_chain(spec, mode=mode, seed=seed, degree_cap=degree_cap)
    tower.source.update({
        "kind": "builder", "name": "full_product",
        "params": {"factors": [{"f": [g.cycle_string() for g in padded[i]],
                                "m": degrees[i]} for i in range(depth)],
                   "depth": depth},
    })
    return tower


def product_chain(h, k, scales, seed=0):
    """Chain G_l = K x (scaled integers) inside G_0 = H x Z.

    ``h`` acts on its coset space by ``k`` (which must have trivial core in
    ``h``); one extra generator steps a growing cyclic factor.  Level l has
    [H:K] * (s_1...s_l) points.
    """
    scales = [int(s) for s in scales]
    if not scales:
        raise ValueError("at least one scale required")
    for s in scales:
        if s < 2:
            raise ValueError("scales must be >= 2")
    if not isinstance(h, PermutationGroup):
        raise ValueError("h must be a permutation group")
    k_gens = [g if isinstance(g, Permutation) else Permutation(g) for g in
              (k.generators if isinstance(k, PermutationGroup) else k)]
    k_group = PermutationGroup(h.degree, k_gens)
    for g in k_gens:
        if not h.contains(g):
            raise ValueError("k is not a subgroup of h")
    verdict = core_triviality_witness(h, k_group, seed=seed)
    if verdict.status != "trivial":
        raise LenstraCoreError(0, verdict.status, verdict.core_element)

    # faithful coset action of h on h/k
    coset_images, reps, index, canonical = _coset_space(
        h.degree, h.generators, k_group.elements())
    n_cosets = len(reps)

    def coset_image(perm):
        return Permutation(np.array(
            [index[canonical(r * perm)] for r in reps], dtype=np.int32))

    k_images = [coset_image(g) for g in k_gens]

    sizes = [1]
    for s in scales:
        sizes.append(sizes[-1] * s)
    L = len(scales)
    groups = [PermutationGroup(1, [])]
    subgroups = [PermutationGroup(1, [])]
    h_names = tuple("g%d" % (i + 1) for i in range(len(h.generators)))
    gen_names = h_names + ("t",)
    sequences = [[Permutation.identity(1)] for _ in gen_names]
    for l in range(1, L + 1):
        n = sizes[l]
        degree = n_cosets + n
        cyc = Permutation(np.concatenate([
            np.arange(n_cosets, dtype=np.int32),
            np.roll(np.arange(n, dtype=np.int32), -1) + n_cosets]))
        ext_h = [_pad(g, degree) for g in coset_images]
        groups.append(PermutationGroup(degree, ext_h + [cyc]))
        subgroups.append(PermutationGroup(degree, [_pad(g, degree)
                                                   for g in k_images]))
        for gi in range(len(h_names)):
            sequences[gi].append(ext_h[gi])
        sequences[-1].append(cyc)
    bondings = []
    for l in range(L):
        if l == 0:
            block = np.zeros(groups[1].degree, dtype=np.int64)
        else:
            block = np.concatenate([
                np.arange(n_cosets, dtype=np.int64),
                np.arange(sizes[l + 1], dtype=np.int64) % sizes[l] + n_cosets])
        bondings.append(block_quotient_map(groups[l + 1].generators, block,
                                           provenance="tower-bonding"))
    spec = QuotientTowerSpec(gen_names, groups, bondings, subgroups, sequences)
    tower = lenstra_chain(spec, mode="strict", seed=seed)
    tower.source.update({
        "kind": "builder", "name": "product_chain",
        "params": {
            "h": [g.cycle_string() for g in h.generators],
            "h_degree": h.degree,
            "k": [g.cycle_string() for g in k_gens],
            "scales": scales,
        },
    })
    return tower


def free_tree_tower(depth, images_per_level, gen_names):
    """Binary-tree tower (level l has 2^l points, projection x -> x // 2)
    with caller-supplied generator images; no relations are imposed, so any
    equivariant assignment is legal.  The result is validated and rejected
    if incoherent or intransitive."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    gen_names = tuple(gen_names)
    if len(images_per_level) != depth + 1:
        raise ValueError("need images for every level 0..depth")
    levels = []
    for l in range(depth + 1):
        n = 2 ** l
        perms = []
        for img in images_per_level[l]:
            perm = img if isinstance(img, Permutation) else Permutation(img)
            if perm.degree != n:
                raise ValueError("level %d image degree %d != %d"
                                 % (l, perm.degree, n))
            perms.append(perm)
        if len(perms) != len(gen_names):
            raise ValueError("level %d image count mismatch" % l)
        proj = None if l == 0 else np.arange(n, dtype=np.int32) // 2
        levels.append(TowerLevel(n, perms, proj))
    tower = ChainTower(gen_names, levels,
                       {"kind": "builder", "name": "free_tree",
                        "params": {"depth": depth}})
    report = validate(tower)
    if not report.ok:
        raise ValueError("supplied images are not a valid tower: %r"
                         % report.violations)
    return tower


def _bit_reverse(x, bits):
    out = 0
    for _ in range(bits):
        out = (out << 1) | (x & 1)
        x >>= 1
    return out


def free_tree_sqa_fixture(depth=3):
    """Free tower on the binary tree with a tree adding machine ``t`` and a
    generator ``s`` that is the identity on the left subtree but swaps two
    leaves on the right — the standard shape of a quasi-analyticity
    violation."""
    if depth < 3:
        raise ValueError("the fixture needs depth >= 3")
    t_levels = []
    s_levels = []
    for l in range(depth + 1):
        n = 2 ** l
        t_img = np.empty(n, dtype=np.int32)
        for x in range(n):
            t_img[x] = _bit_reverse((_bit_reverse(x, l) + 1) % n, l)
        t_levels.append(Permutation(t_img))
        s_img = np.arange(n, dtype=np.int32)
        if l == depth:
            half = n // 2
            s_img[half], s_img[half + 1] = half + 1, half
        s_levels.append(Permutation(s_img))
    tower = free_tree_tower(depth, [[t_levels[l], s_levels[l]]
                                    for l in range(depth + 1)], ("t", "s"))
    tower.source.update({"name": "free_tree_sqa",
                         "params": {"depth": depth}})
    return tower


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    summary: str
    factory: object = field(repr=False)


def _c3():
    return [Permutation.from_cycle_string("(0 1 2)", 3)]


def _alt5_k5():
    return (alternating_group(5),
            [Permutation.from_cycle_string("(0 1 2 3 4)", 5)])


CATALOG = {}
for _entry in (
    CatalogEntry("odometer_2x10", "dyadic +1 action, depth 10",
                 lambda: odometer([2] * 10)),
    CatalogEntry("odometer_2x6", "dyadic +1 action, depth 6",
                 lambda: odometer([2] * 6)),
    CatalogEntry("odometer_4x3", "4-adic +1 action, depth 3",
                 lambda: odometer([4] * 3)),
    CatalogEntry("odometer_3x4", "triadic +1 action, depth 4",
                 lambda: odometer([3] * 4)),
    CatalogEntry("odometer_2_3", "mixed-scale +1 action (2 then 3)",
                 lambda: odometer([2, 3])),
    CatalogEntry("rt_klein_4", "Klein-bottle-group tower, depth 4",
                 lambda: rt_klein(4)),
    CatalogEntry("rt_klein_8", "Klein-bottle-group tower, depth 8",
                 lambda: rt_klein(8)),
    CatalogEntry("product_alt5_2x3",
                 "Alt(5)/<5-cycle> times a dyadic cycle, scales (2,2,2)",
                 lambda: product_chain(*_alt5_k5(), scales=[2, 2, 2])),
    CatalogEntry("alt_diagonal_c3_5_1",
                 "diagonal 3-cycle subgroup in Alt(5), depth 1",
                 lambda: alt_diagonal_chain(_c3(), 5, 1)),
    CatalogEntry("alt_diagonal_c3_5_3",
                 "diagonal 3-cycle subgroup in Alt(5)^3, depth 3",
                 lambda: alt_diagonal_chain(_c3(), 5, 3)),
    CatalogEntry("full_product_c3_alt5_3",
                 "factor-by-factor 3-cycle subgroups in Alt(5)^3, depth 3",
                 lambda: full_product_chain([(_c3(), 5)] * 3)),
    CatalogEntry("free_tree_sqa",
                 "free binary-tree fixture with a subtree-fixing swap",
                 lambda: free_tree_sqa_fixture(3)),
):
    CATALOG[_entry.name] = _entry
