"""Invariants of chain towers.

Every verdict here is finite-depth evidence: computed from the tower's
levels only, carrying the depth and search bounds under which it holds, and
never claiming anything about the inverse-limit object beyond them.

The workhorse is a stabilizer descent along the tower's own projections
(`_level_groups`): the image group of a level action is given a chain whose
first stages stabilize the basepoint's coordinates level by level (each
stage's orbit is one fiber), so orders and membership tests stay cheap even
when the level has tens of thousands of points.  The basepoint stabilizer
that remains at the bottom is the level's discriminant group.
"""

import hashlib
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .permgroup import (ORDER_CAP, GroupMap, Permutation, PermutationGroup,
                        _ChainLevel, _schreier_sims, block_quotient_map,
                        closure_elements, word_map)
from .tower import ChainTower, FiberPoint, TowerLevel, rebase, truncate, \
    validate
from .tower import _schreier_stabilizer_words

ISO_CAP = 5040
FINGERPRINT_ELEMENT_CAP = 5040
ISO_BACKTRACK_BUDGET = 10_000_000


def _digest(perm):
    return hashlib.blake2b(perm.images.tobytes(), digest_size=16).digest()


def _free_reduce(letters):
    out = []
    for letter in letters:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


# ---------------------------------------------------------------------------
# level image groups and discriminants via stabilizer descent


def _descend_level(tower, level):
    """Image group H and basepoint stabilizer D of one level action.

    The stabilizer chain for H is seeded so that stage k stabilizes the
    basepoint's level-k coordinate for k = 1..level; each seeded orbit is
    one fiber of the tower (checked against the fiber size) and the chain
    continues past the seeds as a classic chain of the remaining small
    stabilizer, which is exactly D.  Fiber-sized orbits keep transversal
    tables and Schreier churn small even on levels with tens of thousands
    of points.
    """
    degree = tower.level_degree(level)
    images = list(tower.level_images(level))
    if level == 0 or degree == 1:
        return (PermutationGroup(degree, images),
                PermutationGroup(degree, [g for g in images
                                          if not g.is_identity()]))
    seeds = []
    fiber_sizes = []
    for k in range(1, level + 1):
        if tower.level_degree(k) % tower.level_degree(k - 1):
            raise AssertionError("fiber sizes are not constant at level %d" % k)
        fiber_sizes.append(tower.level_degree(k) // tower.level_degree(k - 1))
        key = None if k == level else tower.composed_projection(level, k)
        seeds.append(_ChainLevel(key, 0, 0, []))
    chain = _schreier_sims(degree, images, ORDER_CAP, seed_levels=seeds)
    for k, fiber_size in enumerate(fiber_sizes, start=1):
        got = len(chain[k - 1].orbit) if k - 1 < len(chain) else 1
        if got != fiber_size:
            raise AssertionError(
                "stage-%d orbit size %d != fiber size %d (level %d)"
                % (k, got, fiber_size, level))
    d_levels = chain[level:]
    d_gens = [g for lvl in d_levels for g in lvl.gens]
    h_group = PermutationGroup._from_chain(degree, images, chain)
    d_group = PermutationGroup._from_chain(degree, d_gens, d_levels)
    if h_group.order() != degree * d_group.order():
        raise AssertionError(
            "orbit-stabilizer mismatch at level %d: |H|=%d, degree=%d, |D|=%d"
            % (level, h_group.order(), degree, d_group.order()))
    return h_group, d_group


def _level_groups(tower):
    """Per-level (H, D) pairs, cached on the tower."""
    if "level_groups" not in tower.cache:
        tower.cache["level_groups"] = [
            _descend_level(tower, level) for level in range(tower.depth + 1)]
    return tower.cache["level_groups"]


def _truncation(tower, n):
    key = ("truncation", n)
    if key not in tower.cache:
        tower.cache[key] = truncate(tower, n)
    return tower.cache[key]


@dataclass
class CoreQuotientTower:
    """Faithful level image groups with their quotient and bonding maps."""

    groups: list
    quotients: list       # abstract generators -> level images
    bondings: list        # level l+1 image group -> level l image group

    def orders(self):
        return [g.order() for g in self.groups]


def core_quotient_tower(tower):
    """Image group of every level action, with bonding surjections along
    the tower projections."""
    if "core_quotient_tower" in tower.cache:
        return tower.cache["core_quotient_tower"]
    pairs = _level_groups(tower)
    groups = [h for h, _ in pairs]
    quotients = []
    bondings = []
    for level in range(tower.depth + 1):
        quotients.append(word_map(list(tower.gen_names),
                                  list(tower.level_images(level))))
    for level in range(tower.depth):
        bond = block_quotient_map(
            list(tower.level_images(level + 1)),
            tower.level_projection(level + 1).astype(np.int64),
            provenance="tower-bonding")
        bondings.append(bond)
    result = CoreQuotientTower(groups, quotients, bondings)
    tower.cache["core_quotient_tower"] = result
    return result


@dataclass
class DiscriminantTower:
    """Basepoint stabilizers of the faithful level actions, their bonding
    restrictions, and the eventual (deepest-available) images."""

    groups: list            # D_l per level
    bondings: list          # D_{l+1} -> D_l (restriction of the H bonding)
    eventual_images: list   # image of D_depth in D_l
    image_orders: list      # per level l: orders of im(D_m -> D_l), m = l..depth
    stabilized: list        # per level: did the image chain go constant

    def orders(self):
        return [g.order() for g in self.groups]

    def eventual_orders(self):
        return [g.order() for g in self.eventual_images]


def discriminant_tower(tower):
    """Discriminant groups of every level with bondings and eventual images.

    Asserts |H_l| = d_l * |D_l| at every level and that each bonding maps
    generators into the shallower discriminant.
    """
    if "discriminant_tower" in tower.cache:
        return tower.cache["discriminant_tower"]
    pairs = _level_groups(tower)
    cq = core_quotient_tower(tower)
    d_groups = [d for _, d in pairs]
    for level, (h, d) in enumerate(pairs):
        if h.order() != tower.level_degree(level) * d.order():
            raise AssertionError("orbit-stabilizer identity fails at level %d"
                                 % level)
    bondings = []
    for level in range(tower.depth):
        bond = cq.bondings[level]
        d_hi, d_lo = d_groups[level + 1], d_groups[level]
        imgs = [bond.apply(g) for g in d_hi.generators]
        for img in imgs:
            if not d_lo.contains(img):
                raise AssertionError(
                    "bonding image leaves the discriminant at level %d" % level)
        bondings.append(GroupMap(list(d_hi.generators), imgs, "tower-bonding",
                                 evaluator=bond.apply,
                                 check=d_hi.order() <= ISO_CAP))
    L = tower.depth
    eventual = []
    image_orders = []
    stabilized = []
    for level in range(L + 1):
        orders = []
        img_group = None
        for m in range(level, L + 1):
            gens = list(d_groups[m].generators)
            for k in range(m - 1, level - 1, -1):
                gens = [cq.bondings[k].apply(g) for g in gens]
            g = PermutationGroup(tower.level_degree(level),
                                 [p for p in gens if not p.is_identity()])
            orders.append(g.order())
            if m == L:
                img_group = g
        eventual.append(img_group)
        image_orders.append(orders)
        if len(orders) >= 2:
            stabilized.append(orders[-1] == orders[-2])
        else:
            stabilized.append(orders[-1] == 1)
    result = DiscriminantTower(d_groups, bondings, eventual, image_orders,
                               stabilized)
    tower.cache["discriminant_tower"] = result
    return result


# ---------------------------------------------------------------------------
# the regular cover (translation tower)


@dataclass
class MolinoResult:
    """Regular tower of right translations on the level image groups.

    ``level_sizes`` holds |H_l| for every level (exact, from the stabilizer
    chains); the tower itself is materialized only up to
    ``materialized_depth`` when a deeper |H_l| exceeds the degree cap.
    ``fibrations[l]`` maps the materialized level-l points (group elements)
    onto the original level-l points via h -> h(0).
    """

    tower: ChainTower
    fibrations: list
    level_sizes: list
    fiber_sizes: list
    materialized_depth: int
    capped: bool


def molino_tower(tower, degree_cap=200_000):
    """Tower of regular actions on the level image groups.

    Points of level l are the elements of H_l (numbered by closure order,
    identity first), each abstract generator acts by right translation, and
    projections apply the level bonding elementwise.  The fiber of the
    fibration over the basepoint is exactly the discriminant; the resulting
    tower's own discriminant is trivial at every materialized level.
    """
    pairs = _level_groups(tower)
    cq = core_quotient_tower(tower)
    disc = discriminant_tower(tower)
    level_sizes = [h.order() for h, _ in pairs]
    mat = 0
    while mat < tower.depth and level_sizes[mat + 1] <= degree_cap:
        mat += 1
    capped = mat < tower.depth

    levels = []
    fibrations = []
    prev_index = None
    for level in range(mat + 1):
        gen_images = list(tower.level_images(level))
        elems = closure_elements(gen_images, tower.level_degree(level),
                                 cap=degree_cap + 1)
        if len(elems) != level_sizes[level]:
            raise AssertionError("closure order disagrees with chain order "
                                 "at level %d" % level)
        index = {e.key(): i for i, e in enumerate(elems)}
        images = []
        for g in gen_images:
            arr = np.array([index[(e * g).key()] for e in elems],
                           dtype=np.int32)
            images.append(Permutation(arr))
        if level == 0:
            proj = None
        else:
            bond = cq.bondings[level - 1]
            proj = np.array([prev_index[bond.apply(e).key()] for e in elems],
                            dtype=np.int32)
        levels.append(TowerLevel(len(elems), images, proj))
        fibrations.append(np.array([int(e.images[0]) for e in elems],
                                   dtype=np.int32))
        prev_index = index

    mol = ChainTower(tower.gen_names, levels,
                     {"kind": "molino", "base": tower.source})
    report = validate(mol)
    if not report.ok:
        raise AssertionError("translation tower failed validation: %r"
                             % report.violations)
    fiber_sizes = [d.order() for _, d in pairs]
    for level in range(mat + 1):
        over_base = int(np.count_nonzero(fibrations[level] == 0))
        if over_base != fiber_sizes[level]:
            raise AssertionError(
                "fiber over the basepoint has %d elements, discriminant "
                "order is %d (level %d)"
                % (over_base, fiber_sizes[level], level))
    return MolinoResult(mol, fibrations, level_sizes, fiber_sizes, mat, capped)


# ---------------------------------------------------------------------------
# fingerprints and isomorphism


@dataclass(frozen=True)
class Fingerprint:
    """Isomorphism evidence for a finite group: order, invariant factors of
    the quotient by the derived subgroup, and the element-order multiset.
    ``complete`` is False when only the order was computed (size cap)."""

    order: int
    invariant_factors: tuple = None
    element_orders: tuple = None
    complete: bool = True

    def describe(self):
        if self.order == 1:
            return "trivial"
        if not self.complete:
            return "group of order %d (order-only)" % self.order
        abelian = math.prod(self.invariant_factors) == self.order
        if abelian and len(self.invariant_factors) == 1:
            return "cyclic of order %d" % self.order
        if abelian:
            return "abelian %s" % "x".join(
                "C%d" % f for f in self.invariant_factors)
        return "group of order %d (abelianization %s)" % (
            self.order,
            "x".join("C%d" % f for f in self.invariant_factors)
            if self.invariant_factors else "trivial")

    def to_json(self):
        return {
            "order": self.order,
            "invariant_factors": list(self.invariant_factors)
            if self.invariant_factors is not None else None,
            "element_orders": [list(p) for p in self.element_orders]
            if self.element_orders is not None else None,
            "complete": self.complete,
            "name": self.describe(),
        }


def _prime_factors(n):
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _abelian_invariants(element_orders):
    """Invariant factors of a finite abelian group from the multiset of its
    element orders.

    For each prime p, counting the elements of order dividing p^k gives
    p^(sum of min(k, e_i)) over the exponent partition (e_i), so consecutive
    count ratios recover the partition's conjugate.  Factors are combined
    across primes largest-with-largest, yielding d_1, d_2, ... with each
    d_{i+1} dividing d_i.
    """
    n = len(element_orders)
    if n == 1:
        return ()
    factors_by_prime = {}
    for p in _prime_factors(n):
        conjugate = []   # conjugate[k-1] = number of exponents >= k
        prev_a = 0
        k = 1
        while True:
            pk = p ** k
            f = sum(1 for o in element_orders if pk % o == 0)
            a = 0
            while f > 1:
                if f % p:
                    raise AssertionError(
                        "count of order-dividing elements is not a power "
                        "of %d" % p)
                f //= p
                a += 1
            step = a - prev_a
            if step == 0:
                break
            conjugate.append(step)
            prev_a = a
            k += 1
            if k > 64:
                raise AssertionError("runaway exponent scan")
        exponents = []
        i = 1
        while True:
            e = sum(1 for c in conjugate if c >= i)
            if e == 0:
                break
            exponents.append(e)
            i += 1
        factors_by_prime[p] = exponents  # descending by construction
    width = max((len(v) for v in factors_by_prime.values()), default=0)
    factors = []
    for j in range(width):
        f = 1
        for p, exps in factors_by_prime.items():
            if j < len(exps):
                f *= p ** exps[j]
        factors.append(f)
    return tuple(factors)


def _derived_elements(elements, generators, degree):
    """Element set of the derived subgroup (normal closure of generator
    commutators), as a dict of keys."""
    der_gens = []
    seen = set()
    for g in generators:
        for h in generators:
            c = g.inverse() * h.inverse() * g * h
            if not c.is_identity() and c.key() not in seen:
                seen.add(c.key())
                der_gens.append(c)
    while True:
        closure = closure_elements(der_gens, degree) if der_gens else \
            [Permutation.identity(degree)]
        keys = {e.key() for e in closure}
        new = []
        for s in closure:
            for g in generators:
                t = g.inverse() * s * g
                if t.key() not in keys:
                    new.append(t)
        if not new:
            return keys
        der_gens.extend(new)


def group_fingerprint(group, element_cap=FINGERPRINT_ELEMENT_CAP):
    """Fingerprint of a finite permutation group; falls back to order-only
    beyond the element cap (or when materializing all elements would be
    unreasonably large)."""
    order = group.order()
    if order > element_cap or order * group.degree > 50_000_000:
        return Fingerprint(order, complete=False)
    elements = group.elements()
    order_counts = {}
    for e in elements:
        o = e.order()
        order_counts[o] = order_counts.get(o, 0) + 1
    derived = _derived_elements(elements, group.generators, group.degree)
    coset_orders = []
    for e in elements:
        o = e.order()
        for m in sorted(_divisors(o)):
            if (e ** m).key() in derived:
                coset_orders.append(m)
                break
    if len(coset_orders) % len(derived):
        raise AssertionError("coset order count inconsistent")
    # each coset of the derived subgroup is counted |derived| times
    quotient_orders = _quotient_order_multiset(coset_orders, len(derived))
    invariants = _abelian_invariants(quotient_orders)
    element_orders = tuple(sorted(order_counts.items()))
    return Fingerprint(order, invariants, element_orders, True)


def _quotient_order_multiset(coset_orders, derived_size):
    counts = {}
    for o in coset_orders:
        counts[o] = counts.get(o, 0) + 1
    out = []
    for o, c in sorted(counts.items()):
        if c % derived_size:
            raise AssertionError("coset order multiplicities inconsistent")
        out.extend([o] * (c // derived_size))
    return out


def _divisors(n):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def groups_isomorphic(a, b, iso_cap=ISO_CAP):
    """Exhaustive isomorphism test by generator-image backtracking.

    Returns True/False, or None when the search space exceeds the budget
    (callers must then fall back to fingerprint-grade evidence).
    """
    if a.order() != b.order():
        return False
    if a.order() > iso_cap:
        return None
    if a.order() == 1:
        return True
    fa, fb = group_fingerprint(a), group_fingerprint(b)
    if fa != fb:
        return False
    gens = a.nonredundant_generators()
    a_elems = closure_elements(gens, a.degree)
    a_index = {e.key(): i for i, e in enumerate(a_elems)}
    edges = np.empty((len(a_elems), len(gens)), dtype=np.int64)
    for i, e in enumerate(a_elems):
        for j, g in enumerate(gens):
            edges[i, j] = a_index[(e * g).key()]
    b_elems = b.elements()
    by_order = {}
    for e in b_elems:
        by_order.setdefault(e.order(), []).append(e)
    candidate_lists = [by_order.get(g.order(), []) for g in gens]
    total = 1
    for lst in candidate_lists:
        total *= len(lst)
    if total * len(a_elems) > ISO_BACKTRACK_BUDGET:
        return None

    def try_assignment(imgs):
        phi = [None] * len(a_elems)
        phi[0] = Permutation.identity(b.degree)
        used = {phi[0].key()}
        for i in range(len(a_elems)):
            if phi[i] is None:
                return False
            for j in range(len(gens)):
                t = int(edges[i, j])
                val = phi[i] * imgs[j]
                if phi[t] is None:
                    k = val.key()
                    if k in used:
                        return False
                    phi[t] = val
                    used.add(k)
                elif phi[t] != val:
                    return False
        return len(used) == len(a_elems)

    for imgs in itertools.product(*candidate_lists):
        if try_assignment(list(imgs)):
            return True
    return False


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class ClassificationVerdict:
    kind: str               # regular-to-depth | weakly-normal | irregular-to-depth
    witness: int = None     # truncation level for weakly-normal
    depth: int = 0

    def __str__(self):
        if self.kind == "weakly-normal":
            return "weakly-normal(%d)" % self.witness
        return self.kind

    def to_json(self):
        return {"kind": self.kind, "witness": self.witness,
                "depth": self.depth}


def classify(tower, depth=None):
    """Regular / weakly normal / irregular, certified to the tower depth.

    Regular iff every discriminant is trivial; weakly normal iff some
    truncation with at least two remaining levels is regular through its
    remaining depth (a one-level truncation is vacuously regular whenever
    the deepest fiber action happens to be free, so it is no evidence);
    irregular otherwise.
    """
    if depth is None:
        depth = tower.depth
    if not 0 <= depth <= tower.depth:
        raise ValueError("classification depth out of range")
    if depth == 0:
        return ClassificationVerdict("regular-to-depth", depth=0)
    disc = discriminant_tower(tower)
    if all(o == 1 for o in disc.orders()[1:depth + 1]):
        return ClassificationVerdict("regular-to-depth", depth=depth)
    for n in range(1, depth - 1):
        sub = _truncation(tower, n)
        sub_disc = discriminant_tower(sub)
        if all(o == 1 for o in sub_disc.orders()):
            return ClassificationVerdict("weakly-normal", witness=n,
                                         depth=depth)
    return ClassificationVerdict("irregular-to-depth", depth=depth)


# ---------------------------------------------------------------------------
# stability


@dataclass
class TruncationRow:
    n: int
    remaining_depth: int
    discriminant_orders: list
    eventual_orders: list
    proxy_level: int            # None when the window is too short
    fingerprint: Fingerprint    # of the deepest eventual image (or proxy)
    window: str                 # "ok" | "too-short"

    def to_json(self):
        return {
            "n": self.n,
            "remaining_depth": self.remaining_depth,
            "discriminant_orders": self.discriminant_orders,
            "eventual_orders": self.eventual_orders,
            "proxy_level": self.proxy_level,
            "fingerprint": self.fingerprint.to_json()
            if self.fingerprint is not None else None,
            "window": self.window,
        }


@dataclass
class StabilityReport:
    verdict: str                # stable-evidence | wild-evidence | undetermined
    n0: int
    rows: list
    note: str

    def to_json(self):
        return {
            "verdict": self.verdict,
            "n0": self.n0,
            "rows": [r.to_json() for r in self.rows],
            "note": self.note,
        }

    def __str__(self):
        if self.verdict == "stable-evidence":
            return "stable-evidence(%d)" % self.n0
        return self.verdict


def _truncation_row(tower, n):
    sub = tower if n == 0 else _truncation(tower, n)
    disc = discriminant_tower(sub)
    d_orders = disc.orders()[1:]
    e_orders = disc.eventual_orders()[1:]
    remaining = sub.depth
    proxy_level = None
    if remaining >= 2 and e_orders:
        # smallest level where the eventual orders are constant to the end,
        # with at least two levels in the constant run
        tail = e_orders[-1]
        k = len(e_orders)
        while k >= 1 and e_orders[k - 1] == tail:
            k -= 1
        if len(e_orders) - k >= 2:
            proxy_level = k + 1
    window = "ok" if proxy_level is not None else "too-short"
    if e_orders:
        fp_group = disc.eventual_images[len(e_orders)]  # deepest available
        if proxy_level is not None:
            fp_group = disc.eventual_images[proxy_level]
        fingerprint = group_fingerprint(fp_group)
    else:
        fingerprint = Fingerprint(1)
    return TruncationRow(n, remaining, d_orders, e_orders, proxy_level,
                         fingerprint, window)


def stability_report(tower, depth=None):
    """Eventual-discriminant behaviour across truncations of the tower.

    Rows cover n = 0..depth-1.  A row enters the comparison only when its
    remaining depth shows a constant eventual-order run of length >= 2; the
    verdict is stable-evidence(n0) when all comparable rows from n0 on share
    one fingerprint (confirmed by exhaustive isomorphism when affordable),
    wild-evidence when deepest orders strictly drop, undetermined otherwise.
    """
    if depth is None:
        depth = tower.depth
    if depth < 2:
        return StabilityReport(
            "undetermined", -1, [],
            "depth %d is too shallow for truncation comparisons" % depth)
    rows = [_truncation_row(tower, n) for n in range(depth)]
    valid = [r for r in rows if r.window == "ok"]
    note = ("evidence to depth %d only; the verdict quantifies over the "
            "computed truncations, not the inverse limit" % depth)
    if not valid:
        return StabilityReport("undetermined", -1, rows, note)

    def rows_agree(r1, r2):
        if r1.fingerprint != r2.fingerprint:
            return False
        g1 = discriminant_tower(
            tower if r1.n == 0 else _truncation(tower, r1.n)).eventual_images[
                r1.proxy_level]
        g2 = discriminant_tower(
            tower if r2.n == 0 else _truncation(tower, r2.n)).eventual_images[
                r2.proxy_level]
        iso = groups_isomorphic(g1, g2)
        return iso is not False

    for start in range(len(valid)):
        suffix = valid[start:]
        if all(rows_agree(suffix[0], r) for r in suffix[1:]):
            return StabilityReport("stable-evidence", suffix[0].n, rows, note)
    deepest = [r.discriminant_orders[-1] if r.discriminant_orders else 1
               for r in valid]
    if len(deepest) >= 2 and all(a > b for a, b in zip(deepest, deepest[1:])):
        return StabilityReport("wild-evidence", -1, rows, note)
    return StabilityReport("undetermined", -1, rows, note)


def psi_restriction(tower, n, m):
    """The surjection from the n-truncation's deepest discriminant onto the
    m-truncation's (n <= m): restrict each element to the deeper basepoint
    fiber.  Returns (generator images, image order, target order); surjectivity
    is asserted."""
    if not 0 <= n <= m <= tower.depth:
        raise ValueError("need 0 <= n <= m <= depth")
    L = tower.depth
    fiber_n = np.flatnonzero(tower.composed_projection(L, n) == 0)
    fiber_m = np.flatnonzero(tower.composed_projection(L, m) == 0)
    rank_n = np.full(tower.level_degree(L), -1, dtype=np.int64)
    rank_n[fiber_n] = np.arange(fiber_n.size)
    rank_m = np.full(tower.level_degree(L), -1, dtype=np.int64)
    rank_m[fiber_m] = np.arange(fiber_m.size)
    sub_n = tower if n == 0 else _truncation(tower, n)
    sub_m = tower if m == 0 else _truncation(tower, m)
    d_n = _level_groups(sub_n)[sub_n.depth][1]
    d_m = _level_groups(sub_m)[sub_m.depth][1]
    images = []
    pos = rank_n[fiber_m]
    if (pos < 0).any():
        raise AssertionError("deeper fiber is not inside the shallower one")
    for g in d_n.generators:
        restricted = rank_m[fiber_n[g.images[pos]]]
        if (restricted < 0).any():
            raise AssertionError("discriminant element leaves the fiber")
        img = Permutation(restricted.astype(np.int32))
        if not d_m.contains(img):
            raise AssertionError("restriction misses the target discriminant")
        images.append(img)
    image_group = PermutationGroup(fiber_m.size,
                                   [g for g in images if not g.is_identity()])
    if image_group.order() != d_m.order():
        raise AssertionError(
            "restriction of the level-%d discriminant is not onto the "
            "level-%d one" % (n, m))
    return images, image_group.order(), d_m.order()


# ---------------------------------------------------------------------------
# kernel words and holonomy


class NotKernelCandidate(ValueError):
    """The supplied word moves the basepoint at some level."""

    def __init__(self, word_string, level, moved_to):
        self.word_string = word_string
        self.level = level
        self.moved_to = moved_to
        super().__init__("word %s moves the basepoint at level %d (to %d)"
                         % (word_string, level, moved_to))


def _point_at_level(tower, level, point):
    """Coherent coordinates of a level point, as a FiberPoint."""
    coords = [0] * (level + 1)
    coords[level] = int(point)
    for k in range(level, 0, -1):
        coords[k - 1] = int(tower.level_projection(k)[coords[k]])
    return FiberPoint(tuple(coords))


def _word_fixes_basepoint(tower, letters, depth=None):
    """(fixes_everywhere, first bad level, image point)."""
    if depth is None:
        depth = tower.depth
    inv_cache = tower.cache.setdefault("inverse_images", {})
    for level in range(1, depth + 1):
        x = 0
        for letter in letters:
            gi = abs(letter) - 1
            img = tower.level_images(level)[gi].images
            if letter > 0:
                x = int(img[x])
            else:
                key = (level, gi)
                if key not in inv_cache:
                    inv = np.empty_like(img)
                    inv[img] = np.arange(img.size, dtype=img.dtype)
                    inv_cache[key] = inv
                x = int(inv_cache[key][x])
        if x != 0:
            return False, level, x
    return True, None, None


def _reduced_words(gen_count, max_length):
    """Freely reduced words, breadth first, letters ordered +1,-1,+2,-2,..."""
    letters = []
    for i in range(1, gen_count + 1):
        letters.extend([i, -i])
    frontier = [()]
    for _ in range(max_length):
        nxt = []
        for w in frontier:
            for letter in letters:
                if w and w[-1] == -letter:
                    continue
                nw = w + (letter,)
                nxt.append(nw)
                yield nw
        frontier = nxt


def kernel_words(tower, max_word_length=6, depth=None):
    """Words fixing the basepoint at every level <= depth.

    Breadth-first over freely reduced words; the empty word is always
    first.  Nonempty findings are deduplicated by their deepest-level
    action (the first, hence shortest/lexicographically-least, word of each
    action class is kept — including the class acting as the identity).
    Results are kernel candidates certified to the stated depth only.
    """
    if depth is None:
        depth = tower.depth
    if max_word_length < 0:
        raise ValueError("word length bound must be >= 0")
    found = [tower.word(())]
    seen_actions = set()
    for letters in _reduced_words(len(tower.gen_names), max_word_length):
        ok, _, _ = _word_fixes_basepoint(tower, letters, depth)
        if not ok:
            continue
        action = tower.word_image(depth, letters)
        dg = _digest(action)
        if dg in seen_actions:
            continue
        seen_actions.add(dg)
        found.append(tower.word(letters))
    return found


@dataclass
class HolonomyVerdict:
    kind: str                   # trivial-evidence | nontrivial
    level: int = None           # cylinder level for trivial-evidence
    witness: FiberPoint = None  # moved point for nontrivial
    word: object = None
    certified_depth: int = 0

    def to_json(self):
        return {
            "kind": self.kind,
            "level": self.level,
            "witness": list(self.witness.coordinates)
            if self.witness is not None else None,
            "word": str(self.word) if self.word is not None else None,
            "certified_depth": self.certified_depth,
        }


def holonomy_test(tower, word, depth=None):
    """Does a basepoint-fixing word act identically near the basepoint?

    Scans cylinders around the basepoint at levels n = 1..depth-2 (two
    levels of refinement below the cylinder root are required before
    identical action counts as evidence — a word can fix one fiber setwise
    while permuting the refinements the tower cannot see).  Returns
    trivial-evidence(n) for the shallowest such cylinder, or the deepest
    scanned cylinder's moved witness.
    """
    if depth is None:
        depth = tower.depth
    letters = tower.letters(word)
    ok, bad_level, moved_to = _word_fixes_basepoint(tower, letters, depth)
    if not ok:
        raise NotKernelCandidate(tower.word_string(letters), bad_level,
                                 moved_to)
    word_obj = tower.word(letters)
    action = tower.word_image(depth, letters)
    if action.is_identity():
        return HolonomyVerdict("trivial-evidence", level=0, word=word_obj,
                               certified_depth=depth)
    deepest_scan = max(depth - 2, 0)
    for n in range(1, deepest_scan + 1):
        members = np.flatnonzero(tower.composed_projection(depth, n) == 0)
        if np.array_equal(action.images[members], members):
            return HolonomyVerdict("trivial-evidence", level=n, word=word_obj,
                                   certified_depth=depth)
    members = np.flatnonzero(
        tower.composed_projection(depth, deepest_scan) == 0)
    moved = members[action.images[members] != members]
    if moved.size == 0:
        raise AssertionError("nonidentity word fixed the deepest cylinder")
    witness = _point_at_level(tower, depth, int(moved[0]))
    return HolonomyVerdict("nontrivial", witness=witness, word=word_obj,
                           certified_depth=depth)


@dataclass
class KernelDiscriminantReport:
    """Finite-level comparison of kernel candidates with the discriminant.

    ``holonomy_words`` are candidates acting nontrivially at depth, found by
    walking the basepoint pointwise; ``discriminant_words`` are candidates
    whose levelwise images sift into every discriminant and are nonidentity
    at depth.  The two sets are computed by independent routes and asserted
    equal.  ``truncation_consequence`` checks that a nontrivial holonomy
    witness is accompanied by nontrivial truncated discriminants at every
    adequately deep truncation."""

    holonomy_words: list
    discriminant_words: list
    holonomy_verdicts: list
    sets_agree: bool
    truncation_consequence: str
    truncated_deepest_orders: list
    bounds: dict

    def to_json(self):
        return {
            "holonomy_words": [str(w) for w in self.holonomy_words],
            "discriminant_words": [str(w) for w in self.discriminant_words],
            "holonomy_verdicts": [v.to_json() for v in self.holonomy_verdicts],
            "sets_agree": self.sets_agree,
            "truncation_consequence": self.truncation_consequence,
            "truncated_deepest_orders": self.truncated_deepest_orders,
            "bounds": self.bounds,
        }


def kernel_vs_discriminant(tower, depth=None, max_word_length=6):
    """Cross-validate kernel-candidate findings against the discriminant.

    Set (i): kernel candidates whose depth action is nonidentity (pointwise
    route).  Set (ii): kernel candidates whose level-l images are members of
    D_l for every l (stabilizer-chain route) and nonidentity at depth.  The
    sets must coincide; their holonomy verdicts and the truncated
    discriminant orders are reported alongside.
    """
    if depth is None:
        depth = tower.depth
    disc = discriminant_tower(tower)
    words = kernel_words(tower, max_word_length, depth)
    set_i = []
    set_ii = []
    verdicts = []
    for w in words:
        if not w.letters:
            continue
        action = tower.word_image(depth, w.letters)
        nonidentity = not action.is_identity()
        if nonidentity:
            set_i.append(w)
            verdicts.append(holonomy_test(tower, w, depth))
        in_all = True
        for level in range(1, depth + 1):
            img = tower.word_image(level, w.letters)
            if not disc.groups[level].contains(img):
                in_all = False
                break
        if in_all and nonidentity:
            set_ii.append(w)
    agree = [str(w) for w in set_i] == [str(w) for w in set_ii]
    if not agree:
        raise AssertionError(
            "pointwise and stabilizer-chain kernel scans disagree: %s vs %s"
            % ([str(w) for w in set_i], [str(w) for w in set_ii]))
    has_nontrivial_holonomy = any(v.kind == "nontrivial" for v in verdicts)
    orders = []
    for n in range(0, max(depth - 1, 0)):
        sub = tower if n == 0 else _truncation(tower, n)
        sub_orders = discriminant_tower(sub).orders()
        orders.append(sub_orders[-1] if len(sub_orders) > 1 else 1)
    if not has_nontrivial_holonomy:
        consequence = "not-applicable"
    elif all(o > 1 for o in orders):
        consequence = "confirmed-to-depth"
    else:
        consequence = "violated"
        raise AssertionError(
            "nontrivial holonomy with a trivial truncated discriminant: %r"
            % orders)
    return KernelDiscriminantReport(
        set_i, set_ii, verdicts, agree, consequence, orders,
        {"depth": depth, "max_word_length": max_word_length})


# ---------------------------------------------------------------------------
# quasi-analyticity search


@dataclass
class SqaVerdict:
    kind: str                   # violation | none-found
    word: object = None
    level: int = None           # cylinder root level
    subtree_point: int = None   # level-n point fixed subtree sits under
    cylinder_point: FiberPoint = None
    witness_point: int = None   # depth-level point the word moves
    bounds: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "kind": self.kind,
            "word": str(self.word) if self.word is not None else None,
            "level": self.level,
            "subtree_point": self.subtree_point,
            "cylinder_point": list(self.cylinder_point.coordinates)
            if self.cylinder_point is not None else None,
            "witness_point": self.witness_point,
            "bounds": self.bounds,
        }


def sqa_violation_search(tower, depth=None, max_word_length=6):
    """Search for a word acting identically on one subtree but not globally.

    A violation is a word w, a level n in 1..depth-2, and a level-n point u
    such that no depth-level point above u is moved by w although w is not
    the identity at depth.  (The margin of two levels below n keeps
    fiber-permuting words from masquerading as subtree-fixing ones.)  Words
    are scanned breadth first, deduplicated by depth action; the first
    violation in word order, then by level, then by point index, is
    returned.
    """
    if depth is None:
        depth = tower.depth
    bounds = {"depth": depth, "max_word_length": max_word_length,
              "levels_scanned": [1, depth - 2] if depth >= 3 else None}
    if depth < 3:
        return SqaVerdict("none-found", bounds=bounds)
    seen = set()
    identity = np.arange(tower.level_degree(depth), dtype=np.int32)
    for letters in _reduced_words(len(tower.gen_names), max_word_length):
        action = tower.word_image(depth, letters)
        dg = _digest(action)
        if dg in seen:
            continue
        seen.add(dg)
        moved = np.flatnonzero(action.images != identity)
        if moved.size == 0:
            continue
        for n in range(1, depth - 1):
            labels = tower.composed_projection(depth, n)[moved]
            counts = np.bincount(labels, minlength=tower.level_degree(n))
            empty = np.flatnonzero(counts == 0)
            if empty.size:
                u = int(empty[0])
                above = np.flatnonzero(
                    tower.composed_projection(depth, n) == u)
                cyl_point = _point_at_level(tower, depth, int(above[0]))
                return SqaVerdict(
                    "violation", word=tower.word(letters), level=n,
                    subtree_point=u, cylinder_point=cyl_point,
                    witness_point=int(moved[0]), bounds=bounds)
    return SqaVerdict("none-found", bounds=bounds)


# ---------------------------------------------------------------------------
# equivalence probe


@dataclass
class EquivalenceVerdict:
    kind: str               # equivalent-to-depth | conjugate-equivalent-to-depth
    #                       # | distinct | undetermined
    interleaving: list = None
    conjugate_point: FiberPoint = None
    witness: dict = None
    advisory: dict = None

    def to_json(self):
        return {
            "kind": self.kind,
            "interleaving": self.interleaving,
            "conjugate_point": list(self.conjugate_point.coordinates)
            if self.conjugate_point is not None else None,
            "witness": self.witness,
            "advisory": self.advisory,
        }


def _level_contained(container_tower, container_level, sub_tower, sub_level):
    """Evidence that the sub tower's level subgroup lies inside the
    container tower's: every stabilizer Schreier word of the sub level must
    fix the container basepoint at its level."""
    words = _schreier_stabilizer_words(sub_tower, sub_level)
    images = container_tower.level_images(container_level)
    inv = {}
    for w in words:
        letters = _free_reduce(w)
        if not letters:
            continue
        x = 0
        for letter in letters:
            gi = abs(letter) - 1
            img = images[gi].images
            if letter > 0:
                x = int(img[x])
            else:
                if gi not in inv:
                    arr = np.empty_like(img)
                    arr[img] = np.arange(img.size, dtype=img.dtype)
                    inv[gi] = arr
                x = int(inv[gi][x])
        if x != 0:
            return False
    return True


def _greedy_interleaving(tower_a, tower_b):
    """Alternating containment certificate A_i1 >= B_j1 >= A_i2 >= B_j2 ...

    Greedy: take the shallowest level of the other tower contained in the
    current one, alternating until either tower's depth is exhausted.
    Returns the matched (i, j) pairs, or None when the alternation gets
    stuck before reaching a depth end."""
    if tower_a.depth < 1 or tower_b.depth < 1:
        return None
    pairs = []
    i, j = 1, 0
    while True:
        found_j = None
        for jj in range(j + 1, tower_b.depth + 1):
            if _level_contained(tower_a, i, tower_b, jj):
                found_j = jj
                break
        if found_j is None:
            return None
        j = found_j
        pairs.append((i, j))
        if j == tower_b.depth or i == tower_a.depth:
            return pairs
        found_i = None
        for ii in range(i + 1, tower_a.depth + 1):
            if _level_contained(tower_b, j, tower_a, ii):
                found_i = ii
                break
        if found_i is None:
            return None
        i = found_i


def _divisibility_obstruction(seq_a, seq_b):
    """True when no entry of either sequence is a multiple of the other's
    first entry.  Containment of chain levels forces index divisibility
    (Lagrange), so this blocks any interleaving in both orientations."""
    if not seq_a or not seq_b:
        return False
    return (all(b % seq_a[0] for b in seq_b)
            and all(a % seq_b[0] for a in seq_a))


def equivalence_probe(tower_a, tower_b, depth=None, rebase_cap=256):
    """Partial equivalence certificate for two towers over one alphabet.

    Tries an alternating containment interleaving (equivalent-to-depth);
    failing that, rebases B at candidate fiber points and retries
    (conjugate-equivalent-to-depth); reports distinct only on a sound
    obstruction (no degree or image-order entry of either tower divides
    into the other's first, so no containment can exist at the compared
    depths); otherwise undetermined.
    """
    if tower_a.gen_names != tower_b.gen_names:
        raise ValueError("towers use different generator alphabets")
    advisory = {
        "degrees_a": tower_a.degrees,
        "degrees_b": tower_b.degrees,
        "image_orders_a": [h.order() for h, _ in _level_groups(tower_a)],
        "image_orders_b": [h.order() for h, _ in _level_groups(tower_b)],
        "discriminant_orders_a": discriminant_tower(tower_a).orders(),
        "discriminant_orders_b": discriminant_tower(tower_b).orders(),
    }
    inter = _greedy_interleaving(tower_a, tower_b)
    if inter:
        return EquivalenceVerdict("equivalent-to-depth",
                                  interleaving=[list(p) for p in inter],
                                  advisory=advisory)
    if _divisibility_obstruction(tower_a.degrees[1:], tower_b.degrees[1:]):
        return EquivalenceVerdict(
            "distinct",
            witness={"obstruction": "degree-divisibility",
                     "degrees_a": tower_a.degrees,
                     "degrees_b": tower_b.degrees},
            advisory=advisory)
    if _divisibility_obstruction(advisory["image_orders_a"][1:],
                                 advisory["image_orders_b"][1:]):
        return EquivalenceVerdict(
            "distinct",
            witness={"obstruction": "image-order-divisibility",
                     "orders_a": advisory["image_orders_a"],
                     "orders_b": advisory["image_orders_b"]},
            advisory=advisory)
    deepest = tower_b.level_degree(tower_b.depth)
    for y in range(1, min(deepest, rebase_cap)):
        candidate = rebase(tower_b, tower_b.fiber_point(y))
        inter = _greedy_interleaving(tower_a, candidate)
        if inter:
            return EquivalenceVerdict(
                "conjugate-equivalent-to-depth",
                interleaving=[list(p) for p in inter],
                conjugate_point=tower_b.fiber_point(y),
                advisory=advisory)
    return EquivalenceVerdict("undetermined", advisory=advisory)


# ---------------------------------------------------------------------------
# virtual regularity


@dataclass
class VirtualRegularityResult:
    words: list
    indices: list            # per level: index of the basepoint orbit
    restricted_degrees: list
    classification: ClassificationVerdict
    name: str = ""

    def to_json(self):
        return {
            "name": self.name,
            "words": self.words,
            "indices": self.indices,
            "restricted_degrees": self.restricted_degrees,
            "classification": self.classification.to_json(),
        }


def virtual_regularity_probe(tower, subgroup_words, depth=None, name="",
                             normality_degree_cap=512):
    """Restrict the tower to a finite-index normal subgroup and classify.

    The subgroup is given by generator words.  Per level, its basepoint
    orbit becomes the restricted level (points sorted ascending); the index
    d_l / orbit must stabilize at the deepest levels (finite-index
    evidence), and the orbit partition must be invariant under the full
    generator set (normality evidence; on small degrees the conjugates are
    additionally sifted back into the restricted level group).
    """
    if depth is None:
        depth = tower.depth
    word_letters = [tower.letters(w) for w in subgroup_words]
    deep_images = [tower.word_image(depth, w) for w in word_letters]
    restricted_rows = []
    projections = []
    indices = []
    prev_rank = None
    for level in range(depth + 1):
        degree = tower.level_degree(level)
        if level == depth:
            images = deep_images
        else:
            # each word acts at this level as the projection of its deepest
            # action (evaluated once), read off on fiber representatives
            comp = tower.composed_projection(depth, level)
            _, reps = np.unique(comp, return_index=True)
            images = [Permutation(comp[p.images[reps]]) for p in deep_images]
        step_arrays = [p.images for p in images]
        reached = np.zeros(degree, dtype=bool)
        reached[0] = True
        frontier = np.array([0], dtype=np.int32)
        while frontier.size and step_arrays:
            steps = [arr[frontier] for arr in step_arrays]
            nxt = np.unique(np.concatenate(steps))
            nxt = nxt[~reached[nxt]]
            reached[nxt] = True
            frontier = nxt
        orbit = np.flatnonzero(reached).astype(np.int32)
        if degree % orbit.size:
            raise AssertionError("orbit size does not divide the degree")
        indices.append(degree // orbit.size)
        # normality evidence: the full orbit partition is generator-invariant
        labels = _orbit_labels(images, degree)
        try:
            block_quotient_map(list(tower.level_images(level)), labels,
                               check=False)
        except Exception as exc:
            raise ValueError(
                "subgroup orbits are not invariant at level %d: %s"
                % (level, exc)) from exc
        if degree <= normality_degree_cap and images:
            distinct = []
            seen_actions = set()
            for s in images:
                sig = s.images.tobytes()
                if s.is_identity() or sig in seen_actions:
                    continue
                seen_actions.add(sig)
                distinct.append(s)
            if distinct:
                sub = PermutationGroup(degree, distinct)
                for g in tower.level_images(level):
                    g_inv = g.inverse()
                    for s in distinct:
                        if not sub.contains(g_inv * s * g):
                            raise ValueError(
                                "conjugate of a subgroup generator leaves "
                                "the level-%d subgroup" % level)
        rank = np.full(degree, -1, dtype=np.int32)
        rank[orbit] = np.arange(orbit.size, dtype=np.int32)
        restricted = []
        for p in images:
            arr = rank[p.images[orbit]]
            if (arr < 0).any():
                raise AssertionError("subgroup image leaves its own orbit")
            restricted.append(Permutation(arr))
        if level == 0:
            projections.append(None)
        else:
            proj = prev_rank[tower.level_projection(level)[orbit]]
            if (proj < 0).any():
                raise AssertionError("orbit projection leaves the orbit")
            projections.append(proj)
        restricted_rows.append(restricted)
        prev_rank = rank
    if depth >= 1 and indices[-1] != indices[-2]:
        raise ValueError(
            "basepoint-orbit index is still growing at depth (%d vs %d): "
            "finite index not evidenced within bounds"
            % (indices[-2], indices[-1]))
    # the restricted tower only sees basepoint-orbit actions, so its
    # generating words are deduplicated by their deepest-orbit action
    keep = []
    seen = set()
    for i, p in enumerate(restricted_rows[-1]):
        if p.is_identity():
            continue
        sig = p.images.tobytes()
        if sig in seen:
            continue
        seen.add(sig)
        keep.append(i)
    if not keep and word_letters:
        keep = [0]
    word_strings = [tower.word_string(word_letters[i]) for i in keep]
    levels = [
        TowerLevel(restricted_rows[level][0].degree if restricted_rows[level]
                   else tower.level_degree(level) // indices[level],
                   [restricted_rows[level][i] for i in keep],
                   projections[level])
        for level in range(depth + 1)]
    sub_names = tuple("w%d" % (i + 1) for i in range(len(keep)))
    restricted_tower = ChainTower(
        sub_names, levels,
        {"kind": "restriction", "words": word_strings, "base": tower.source})
    report = validate(restricted_tower)
    if not report.ok:
        raise AssertionError("restricted tower failed validation: %r"
                             % report.violations)
    verdict = classify(restricted_tower)
    all_words = [tower.word_string(w) for w in word_letters]
    return VirtualRegularityResult(all_words, indices,
                                   restricted_tower.degrees, verdict, name)


def _orbit_labels(images, degree):
    """Orbit partition of a set of permutations as a dense label array.

    Each point's label converges to the smallest point of its orbit under
    repeated min-propagation along the generators (forward steps suffice:
    on a finite set the inverse of a permutation is one of its powers);
    labels are then re-ranked dense in order of orbit minimum."""
    labels = np.arange(degree, dtype=np.int64)
    arrs = [p.images for p in images]
    changed = bool(arrs)
    while changed:
        changed = False
        for arr in arrs:
            pulled = np.minimum(labels, labels[arr])
            if not np.array_equal(pulled, labels):
                changed = True
            labels = pulled
    _, dense = np.unique(labels, return_inverse=True)
    return dense.astype(np.int64)


@dataclass
class NormalProbe:
    name: str
    index: int
    words: list         # letter tuples over the tower's two generators

    def to_json(self):
        return {"name": self.name, "index": self.index,
                "words": [list(w) for w in self.words]}


def _regular_action_pair(elements, index_of, x, y):
    deg = len(elements)
    px = Permutation(np.array([index_of[(e * x).key()] for e in elements],
                              dtype=np.int32))
    py = Permutation(np.array([index_of[(e * y).key()] for e in elements],
                              dtype=np.int32))
    return px, py


def _canonical_pair_key(px, py):
    """BFS-canonical form of the transitive action of an ordered pair —
    equal keys mean equal kernels in the free group on two letters."""
    n = px.degree
    perms = [px.images, py.images]
    invs = []
    for arr in perms:
        inv = np.empty_like(arr)
        inv[arr] = np.arange(n, dtype=arr.dtype)
        invs.append(inv)
    cols = [perms[0], invs[0], perms[1], invs[1]]
    number = {0: 0}
    order = [0]
    qi = 0
    while qi < len(order):
        c = order[qi]
        qi += 1
        for col in cols:
            d = int(col[c])
            if d not in number:
                number[d] = len(order)
                order.append(d)
    renum = np.empty(n, dtype=np.int32)
    for old, new in number.items():
        renum[old] = new
    out = []
    for col in cols:
        arr = np.empty(n, dtype=np.int32)
        for old in range(n):
            arr[number[old]] = renum[col[old]]
        out.append(arr.tobytes())
    return b"".join(out)


def _schreier_words_of_pair(px, py):
    """Generator words of the stabilizer of point 0 under the action of an
    ordered pair (x -> letter 1, y -> letter 2).  For a free group acting
    through the pair, these generate the full point stabilizer."""
    n = px.degree
    words = {0: ()}
    order = [0]
    qi = 0
    while qi < len(order):
        c = order[qi]
        qi += 1
        for letter, arr in ((1, px.images), (2, py.images)):
            d = int(arr[c])
            if d not in words:
                words[d] = words[c] + (letter,)
                order.append(d)
    if len(order) != n:
        raise AssertionError("pair action is not transitive")
    out = []
    seen = set()
    for c in order:
        for letter, arr in ((1, px.images), (2, py.images)):
            d = int(arr[c])
            w = _free_reduce(words[c] + (letter,)
                             + tuple(-l for l in reversed(words[d])))
            if w and w not in seen:
                seen.add(w)
                out.append(w)
    return out


def _small_group_targets(max_order):
    """The 2-generated groups of order <= max_order, as permutation groups."""
    from .fpgroup import Presentation as _P, todd_coxeter as _tc, \
        action_from_table as _aft
    from .permgroup import (alternating_group as _alt, cyclic_group as _cyc,
                            direct_sum as _ds, symmetric_group as _sym)
    targets = []

    def add(name, group):
        if group.order() <= max_order:
            targets.append((name, group))

    add("C1", PermutationGroup(1, []))
    for n in range(2, max_order + 1):
        add("C%d" % n, _cyc(n))
    add("C2xC2", _ds(_cyc(2), _cyc(2)))
    add("C4xC2", _ds(_cyc(4), _cyc(2)))
    add("C3xC3", _ds(_cyc(3), _cyc(3)))
    add("C6xC2", _ds(_cyc(6), _cyc(2)))
    add("S3", _sym(3))
    add("D4", PermutationGroup(4, [
        Permutation.from_cycle_string("(0 1 2 3)", 4),
        Permutation.from_cycle_string("(1 3)", 4)]))
    q8 = _tc(_P(("a", "b"), ["a^4", "a^2 b^-2", "b^-1 a b a"]), [],
             max_cosets=64)
    add("Q8", PermutationGroup(8, _aft(q8)))
    add("D5", PermutationGroup(5, [
        Permutation.from_cycle_string("(0 1 2 3 4)", 5),
        Permutation.from_cycle_string("(1 4)(2 3)", 5)]))
    add("D6", PermutationGroup(6, [
        Permutation.from_cycle_string("(0 1 2 3 4 5)", 6),
        Permutation.from_cycle_string("(1 5)(2 4)", 6)]))
    add("A4", _alt(4))
    dic3 = _tc(_P(("a", "b"), ["a^6", "b^2 a^-3", "b^-1 a b a"]), [],
               max_cosets=64)
    add("Dic3", PermutationGroup(12, _aft(dic3)))
    return targets


def enumerate_normal_probes(max_index=12):
    """All normal subgroups of the free group on two generators with index
    <= max_index, each as Schreier generator words.

    The subgroups are the kernels of surjections onto the 2-generated
    groups of order <= max_index; every ordered generating pair of each
    target is tried and distinct kernels are kept (identified by the
    canonical form of the pair's regular action)."""
    probes = []
    seen = set()
    for name, target in _small_group_targets(max_index):
        elements = target.elements()
        index_of = {e.key(): i for i, e in enumerate(elements)}
        order = target.order()
        for x in elements:
            for y in elements:
                if len(closure_elements([x, y], target.degree)) != order:
                    continue
                px, py = _regular_action_pair(elements, index_of, x, y)
                key = _canonical_pair_key(px, py)
                if key in seen:
                    continue
                seen.add(key)
                words = _schreier_words_of_pair(px, py)
                if not words:
                    words = [(1,), (2,)] if order == 1 else words
                probes.append(NormalProbe(name, order, words))
    probes.sort(key=lambda p: (p.index, p.name))
    return probes


@dataclass
class VirtualRegularityScan:
    aggregate: str          # virtually-regular | not-virtually-regular-evidence
    #                       # | undetermined
    witness: str = None
    results: list = None
    bounds: dict = None

    def to_json(self):
        return {
            "aggregate": self.aggregate,
            "witness": self.witness,
            "results": [r.to_json() for r in self.results],
            "bounds": self.bounds,
        }


def virtual_regularity_scan(tower, probes=None, max_index=12, depth=None):
    """Probe the tower with a family of finite-index normal subgroups.

    Virtually regular as soon as one restriction classifies as regular or
    weakly normal; not-virtually-regular evidence when every probe's
    restriction is irregular through depth."""
    if len(tower.gen_names) != 2 and probes is None:
        raise ValueError("default probe enumeration covers two-generator "
                         "towers; pass explicit probes otherwise")
    if probes is None:
        probes = enumerate_normal_probes(max_index)
    results = []
    witness = None
    any_regular = False
    for probe in probes:
        result = virtual_regularity_probe(tower, probe.words, depth=depth,
                                          name=probe.name)
        results.append(result)
        if result.classification.kind in ("regular-to-depth", "weakly-normal"):
            if not any_regular:
                witness = probe.name
            any_regular = True
    if any_regular:
        aggregate = "virtually-regular"
    elif results and all(r.classification.kind == "irregular-to-depth"
                         for r in results):
        aggregate = "not-virtually-regular-evidence"
    else:
        aggregate = "undetermined"
    return VirtualRegularityScan(aggregate, witness, results,
                                 {"max_index": max_index,
                                  "probe_count": len(probes)})


# ---------------------------------------------------------------------------
# aggregate report


@dataclass
class AnalysisReport:
    source: dict
    bounds: dict
    validation: dict
    degrees: list
    core_orders: list
    discriminant: dict
    molino: dict
    classification: ClassificationVerdict
    stability: StabilityReport
    kernel: dict
    kernel_discriminant: KernelDiscriminantReport
    sqa: SqaVerdict

    def to_json_dict(self):
        return {
            "schema": "solch-report/1",
            "source": self.source,
            "bounds": self.bounds,
            "validation": self.validation,
            "degrees": self.degrees,
            "core_quotient_orders": self.core_orders,
            "discriminant": self.discriminant,
            "molino": self.molino,
            "classification": self.classification.to_json(),
            "stability": self.stability.to_json(),
            "kernel": self.kernel,
            "kernel_vs_discriminant": self.kernel_discriminant.to_json(),
            "sqa": self.sqa.to_json(),
        }

    def to_text(self):
        lines = []
        lines.append("degrees: %s" % " ".join(str(d) for d in self.degrees))
        lines.append("image-group orders: %s"
                     % " ".join(str(o) for o in self.core_orders))
        lines.append("discriminant orders: %s"
                     % " ".join(str(o) for o in self.discriminant["orders"]))
        lines.append("eventual-image orders: %s"
                     % " ".join(str(o)
                                for o in self.discriminant["eventual_orders"]))
        lines.append("translation-tower sizes: %s%s"
                     % (" ".join(str(s) for s in self.molino["level_sizes"]),
                        " (capped at level %d)" % self.molino["materialized_depth"]
                        if self.molino["capped"] else ""))
        lines.append("classification: %s" % str(self.classification))
        lines.append("stability: %s" % str(self.stability))
        words = self.kernel["words"]
        lines.append("kernel candidates (length <= %d): %s"
                     % (self.kernel["max_word_length"],
                        ", ".join(words) if words else "none"))
        for verdict in self.kernel["holonomy"]:
            if verdict["kind"] == "nontrivial":
                lines.append("holonomy %s: nontrivial (witness %s)"
                             % (verdict["word"], verdict["witness"]))
            else:
                lines.append("holonomy %s: trivial-evidence(%d)"
                             % (verdict["word"], verdict["level"]))
        if self.sqa.kind == "violation":
            lines.append(
                "sqa: violation (word %s, level %d, subtree point %d, "
                "witness %d)" % (str(self.sqa.word), self.sqa.level,
                                 self.sqa.subtree_point,
                                 self.sqa.witness_point))
        else:
            lines.append("sqa: none-found (depth %d, word length <= %d, "
                         "word-level only)"
                         % (self.sqa.bounds["depth"],
                            self.sqa.bounds["max_word_length"]))
        lines.append("certified to depth %d" % self.bounds["depth"])
        return "\n".join(lines) + "\n"


def analyze(tower, depth=None, max_word_length=6, degree_cap=200_000,
            seed=0):
    """Full invariant report for one tower; deterministic for fixed inputs."""
    if depth is None:
        depth = tower.depth
    report = validate(tower)
    disc = discriminant_tower(tower)
    cq = core_quotient_tower(tower)
    mol = molino_tower(tower, degree_cap=degree_cap)
    cls = classify(tower, depth)
    stab = stability_report(tower, depth)
    words = kernel_words(tower, max_word_length, depth)
    holonomy = [holonomy_test(tower, w, depth) for w in words]
    kvd = kernel_vs_discriminant(tower, depth, max_word_length)
    sqa = sqa_violation_search(tower, depth, max_word_length)
    return AnalysisReport(
        source=tower.source,
        bounds={"depth": depth, "max_word_length": max_word_length,
                "degree_cap": degree_cap, "seed": seed},
        validation={"ok": report.ok, "flags": report.flags,
                    "violations": report.violations},
        degrees=tower.degrees,
        core_orders=[h.order() for h in cq.groups],
        discriminant={
            "orders": disc.orders(),
            "eventual_orders": disc.eventual_orders(),
            "image_orders": disc.image_orders,
            "stabilized": disc.stabilized,
        },
        molino={
            "level_sizes": mol.level_sizes,
            "fiber_sizes": mol.fiber_sizes,
            "materialized_depth": mol.materialized_depth,
            "capped": mol.capped,
        },
        classification=cls,
        stability=stab,
        kernel={
            "max_word_length": max_word_length,
            "words": [str(w) for w in words],
            "holonomy": [h.to_json() for h in holonomy],
        },
        kernel_discriminant=kvd,
        sqa=sqa,
    )
