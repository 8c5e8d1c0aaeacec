"""Finite-depth chain towers: levelwise group actions with projections.

A ``ChainTower`` models a nested family of finite coset spaces: level ``l``
has ``d_l`` points acted on by a fixed set of named generators, and a
projection onto level ``l-1`` that is equivariant and basepoint-preserving
(point 0 projects to point 0 at every level).  Level 0 always has a single
point.  Towers are immutable once built; derived data (composed projections,
expensive invariants) is memoized on the tower's ``cache`` dict.

All verdicts computed from a tower are certified only to its finite depth;
the tower never represents the inverse-limit object itself.
"""

from dataclasses import dataclass

import numpy as np

from .fpgroup import Word, format_word, parse_word
from .permgroup import Permutation, PermutationGroup, evaluate_word

TOWER_SCHEMA = "solch-tower/1"


@dataclass(frozen=True)
class FiberPoint:
    """A coherent choice of one point per level: projections must map each
    coordinate to the previous one."""

    coordinates: tuple

    def __post_init__(self):
        object.__setattr__(self, "coordinates",
                           tuple(int(x) for x in self.coordinates))

    @property
    def depth(self):
        return len(self.coordinates) - 1

    def __getitem__(self, level):
        return self.coordinates[level]


class TowerLevel:
    """One level: its degree, one permutation per generator, and (above
    level 0) the projection array onto the previous level."""

    __slots__ = ("degree", "images", "projection")

    def __init__(self, degree, images, projection=None):
        self.degree = int(degree)
        self.images = tuple(images)
        for p in self.images:
            if p.degree != self.degree:
                raise ValueError("image degree %d != level degree %d"
                                 % (p.degree, self.degree))
        if projection is None:
            self.projection = None
        else:
            proj = np.array(projection, dtype=np.int32)
            if proj.size != self.degree:
                raise ValueError("projection length != level degree")
            proj.setflags(write=False)
            self.projection = proj


class ChainTower:
    """Levelwise actions of named generators with bonding projections."""

    def __init__(self, gen_names, levels, source=None):
        self.gen_names = tuple(gen_names)
        self.levels = tuple(levels)
        if not self.levels:
            raise ValueError("a tower has at least level 0")
        for lvl in self.levels:
            if len(lvl.images) != len(self.gen_names):
                raise ValueError("level image count != generator count")
        self.source = source if source is not None else {"kind": "unknown"}
        self.cache = {}

    @property
    def depth(self):
        return len(self.levels) - 1

    @property
    def degrees(self):
        return [lvl.degree for lvl in self.levels]

    def level_degree(self, level):
        return self.levels[level].degree

    def level_images(self, level):
        return self.levels[level].images

    def level_projection(self, level):
        if level == 0:
            raise ValueError("level 0 has no projection")
        return self.levels[level].projection

    def basepoint(self):
        return FiberPoint((0,) * (self.depth + 1))

    def letters(self, word):
        """Normalize a word (string, Word, or signed-letter sequence) to a
        tuple of signed generator indices over this tower's alphabet."""
        if isinstance(word, str):
            return parse_word(word, self.gen_names)
        if isinstance(word, Word):
            if word.names != self.gen_names:
                raise ValueError("word alphabet does not match the tower")
            return word.letters
        return tuple(int(x) for x in word)

    def word(self, letters):
        return Word(tuple(letters), self.gen_names)

    def word_string(self, letters):
        return format_word(tuple(letters), self.gen_names)

    def word_image(self, level, word):
        """The permutation a word induces at one level."""
        lts = self.letters(word)
        if not lts:
            return Permutation.identity(self.level_degree(level))
        return evaluate_word(lts, list(self.level_images(level)))

    def composed_projection(self, from_level, to_level):
        """Array mapping level ``from_level`` points down to ``to_level``."""
        if not 0 <= to_level <= from_level <= self.depth:
            raise ValueError("bad projection levels")
        key = ("composed_projection", from_level, to_level)
        if key in self.cache:
            return self.cache[key]
        comp = np.arange(self.level_degree(from_level), dtype=np.int32)
        for level in range(from_level, to_level, -1):
            comp = self.levels[level].projection[comp]
        comp.setflags(write=False)
        self.cache[key] = comp
        return comp

    def fiber_point(self, deepest_point):
        """The coherent FiberPoint through a deepest-level point."""
        x = int(deepest_point)
        coords = [x]
        for level in range(self.depth, 0, -1):
            x = int(self.levels[level].projection[x])
            coords.append(x)
        return FiberPoint(tuple(reversed(coords)))

    def check_point(self, point):
        """Verify a FiberPoint is coherent for this tower; raise otherwise."""
        if point.depth != self.depth:
            raise ValueError("point depth %d != tower depth %d"
                             % (point.depth, self.depth))
        for level in range(self.depth + 1):
            x = point[level]
            if not 0 <= x < self.level_degree(level):
                raise ValueError("coordinate %d out of range at level %d"
                                 % (x, level))
            if level >= 1 and int(self.levels[level].projection[x]) != point[level - 1]:
                raise ValueError("incoherent coordinates at level %d" % level)

    def to_json_dict(self):
        levels = []
        for lvl in self.levels:
            levels.append({
                "degree": lvl.degree,
                "images": [[int(v) for v in p.images] for p in lvl.images],
                "projection": None if lvl.projection is None
                else [int(v) for v in lvl.projection],
            })
        return {
            "schema": TOWER_SCHEMA,
            "gen_names": list(self.gen_names),
            "levels": levels,
            "source": self.source,
        }

    @classmethod
    def from_json_dict(cls, data):
        if data.get("schema") != TOWER_SCHEMA:
            raise ValueError("expected schema %r, got %r"
                             % (TOWER_SCHEMA, data.get("schema")))
        levels = []
        for i, lvl in enumerate(data["levels"]):
            images = [Permutation(img) for img in lvl["images"]]
            proj = lvl.get("projection")
            if (proj is None) != (i == 0):
                raise ValueError("projection must be present exactly above level 0")
            levels.append(TowerLevel(lvl["degree"], images, proj))
        return cls(tuple(data["gen_names"]), levels, data.get("source"))

    def __eq__(self, other):
        if not isinstance(other, ChainTower):
            return NotImplemented
        if self.gen_names != other.gen_names or self.depth != other.depth:
            return False
        for a, b in zip(self.levels, other.levels):
            if a.degree != b.degree or len(a.images) != len(b.images):
                return False
            if any(p != q for p, q in zip(a.images, b.images)):
                return False
            if (a.projection is None) != (b.projection is None):
                return False
            if a.projection is not None and not np.array_equal(a.projection, b.projection):
                return False
        return True

    def __repr__(self):
        return "ChainTower(depth=%d, degrees=%s, gens=%s)" % (
            self.depth, self.degrees, list(self.gen_names))


@dataclass
class ValidationReport:
    """Outcome of validate(): every violated invariant with a witness, plus
    advisory flags ("trivial", "non-proper") that are not violations."""

    ok: bool
    violations: list
    flags: list

    def __bool__(self):
        return self.ok


def _orbit_of_zero(images, degree):
    reached = np.zeros(degree, dtype=bool)
    reached[0] = True
    frontier = np.array([0], dtype=np.int32)
    while frontier.size:
        if not images:
            break
        nxt = np.unique(np.concatenate([p.images[frontier] for p in images]))
        nxt = nxt[~reached[nxt]]
        reached[nxt] = True
        frontier = nxt
    return reached


def validate(tower):
    """Check every structural invariant; report violations with witnesses."""
    violations = []
    flags = []
    if tower.level_degree(0) != 1:
        violations.append({"invariant": "level-0-degree",
                           "witness": {"degree": tower.level_degree(0)}})
    for level in range(tower.depth + 1):
        lvl = tower.levels[level]
        reached = _orbit_of_zero(lvl.images, lvl.degree)
        if not reached.all():
            violations.append({
                "invariant": "transitivity", "level": level,
                "witness": {"unreached_point": int(np.flatnonzero(~reached)[0])}})
        if level == 0:
            continue
        proj = lvl.projection
        prev_degree = tower.level_degree(level - 1)
        if proj.min() < 0 or proj.max() >= prev_degree:
            violations.append({
                "invariant": "projection-range", "level": level,
                "witness": {"point": int(np.flatnonzero(
                    (proj < 0) | (proj >= prev_degree))[0])}})
            continue
        hit = np.zeros(prev_degree, dtype=bool)
        hit[proj] = True
        if not hit.all():
            violations.append({
                "invariant": "projection-surjective", "level": level,
                "witness": {"missing_point": int(np.flatnonzero(~hit)[0])}})
        if int(proj[0]) != 0:
            violations.append({
                "invariant": "basepoint-coherence", "level": level,
                "witness": {"projection_of_0": int(proj[0])}})
        prev = tower.levels[level - 1]
        for gi, (g, g_prev) in enumerate(zip(lvl.images, prev.images)):
            lhs = proj[g.images]
            rhs = g_prev.images[proj]
            if not np.array_equal(lhs, rhs):
                bad = int(np.flatnonzero(lhs != rhs)[0])
                violations.append({
                    "invariant": "equivariance", "level": level,
                    "witness": {"generator": tower.gen_names[gi], "point": bad}})
    if all(d == 1 for d in tower.degrees):
        flags.append("trivial")
    if any(tower.degrees[i + 1] <= tower.degrees[i] for i in range(tower.depth)):
        flags.append("non-proper")
    return ValidationReport(not violations, violations, flags)


def act(tower, word, point):
    """Apply a generator word (left to right) to a FiberPoint, levelwise."""
    tower.check_point(point)
    letters = tower.letters(word)
    coords = []
    for level in range(tower.depth + 1):
        perm = tower.word_image(level, letters)
        coords.append(int(perm.images[point[level]]))
    result = FiberPoint(tuple(coords))
    tower.check_point(result)  # equivariance keeps words coherent
    return result


def _walk_fiber(tower, level, points, letters):
    """Images of a point array under a word of one level action.

    Letters are applied one at a time to the point labels, so the cost is
    per point rather than per level degree; inverse letters use image
    arrays cached on the tower.
    """
    inv_cache = tower.cache.setdefault("inverse_images", {})
    vec = points
    for letter in letters:
        gi = abs(letter) - 1
        img = tower.level_images(level)[gi].images
        if letter > 0:
            vec = img[vec]
        else:
            key = (level, gi)
            if key not in inv_cache:
                inv = np.empty_like(img)
                inv[img] = np.arange(img.size, dtype=img.dtype)
                inv_cache[key] = inv
            vec = inv_cache[key][vec]
    return vec


def _schreier_stabilizer_words(tower, level):
    """Schreier generator words (signed letters over the tower alphabet) for
    the stabilizer of the basepoint at the given level.

    Witness words use positive letters only (orbits are closed under the
    generator monoid), so each Schreier word is u_x . g . u_{x.g}^-1.
    """
    images = tower.level_images(level)
    degree = tower.level_degree(level)
    words = {0: ()}
    order = [0]
    qi = 0
    while qi < len(order):
        x = order[qi]
        qi += 1
        for i, g in enumerate(images):
            y = int(g.images[x])
            if y not in words:
                words[y] = words[x] + (i + 1,)
                order.append(y)
    if len(order) != degree:
        raise ValueError("level %d action is not transitive" % level)
    schreier = []
    for x in order:
        for i, g in enumerate(images):
            y = int(g.images[x])
            w = words[x] + (i + 1,) + tuple(-l for l in reversed(words[y]))
            schreier.append(w)
    return schreier


def truncate(tower, n):
    """Restrict the tower to the fibers above the level-``n`` basepoint.

    New level k is the fiber of level n+k over basepoint_n (points ordered
    ascending, so the basepoint stays 0), acted on by the Schreier
    generators of the basepoint stabilizer at level n.  Generator words in
    the original alphabet are recorded in the source descriptor; Schreier
    words acting identically at the deepest level are dropped, and each
    kept word is new at the deepest level (not generated by the actions of
    earlier kept words), so the restricted action is unchanged but the
    generating set stays small.
    """
    if not 0 <= n <= tower.depth:
        raise ValueError("truncation level %d out of range 0..%d"
                         % (n, tower.depth))
    L = tower.depth
    schreier = _schreier_stabilizer_words(tower, n)

    fibers = []
    ranks = []
    for k in range(L - n + 1):
        comp = tower.composed_projection(n + k, n)
        pts = np.flatnonzero(comp == 0).astype(np.int32)
        rank = np.full(tower.level_degree(n + k), -1, dtype=np.int32)
        rank[pts] = np.arange(pts.size, dtype=np.int32)
        fibers.append(pts)
        ranks.append(rank)

    deep_fiber, deep_rank = fibers[L - n], ranks[L - n]
    ident = np.arange(deep_fiber.size, dtype=np.int32)
    kept = []
    kept_restrs = []
    span = None
    seen = set()
    for w in schreier:
        restr = deep_rank[_walk_fiber(tower, L, deep_fiber, w)]
        if (restr < 0).any():
            raise AssertionError("stabilizer word left the fiber")
        if np.array_equal(restr, ident):
            continue
        key = restr.tobytes()
        if key in seen:
            continue
        seen.add(key)
        perm = Permutation(restr)
        if span is not None and span.contains(perm):
            continue
        kept.append(w)
        kept_restrs.append(perm)
        span = PermutationGroup(deep_fiber.size, kept_restrs)
    if not kept:
        kept = [()]  # degenerate tower: a single trivial generator

    gen_names = tuple("s%d" % (i + 1) for i in range(len(kept)))
    levels = []
    for k in range(L - n + 1):
        level_images = []
        for w in kept:
            restr = ranks[k][_walk_fiber(tower, n + k, fibers[k], w)]
            if (restr < 0).any():
                raise AssertionError("stabilizer word left the fiber")
            level_images.append(Permutation(restr))
        if k == 0:
            proj = None
        else:
            proj = ranks[k - 1][tower.level_projection(n + k)[fibers[k]]]
            if (proj < 0).any():
                raise AssertionError("fiber projection left the fiber")
        levels.append(TowerLevel(fibers[k].size, level_images, proj))

    source = {
        "kind": "truncation",
        "n": n,
        "generator_words": [tower.word_string(w) for w in kept],
        "base": tower.source,
    }
    result = ChainTower(gen_names, levels, source)
    report = validate(result)
    if not report.ok:
        raise AssertionError("truncation produced an invalid tower: %r"
                             % report.violations)
    return result


def rebase(tower, point):
    """Renumber every level so the given FiberPoint becomes the basepoint.

    The levelwise action is conjugated by the transposition 0 <-> y_l; all
    degrees, image-group orders, and stabilizer orders are preserved.
    """
    tower.check_point(point)
    swaps = []
    for level in range(tower.depth + 1):
        swap = np.arange(tower.level_degree(level), dtype=np.int32)
        y = point[level]
        swap[0], swap[y] = y, 0
        swaps.append(swap)
    levels = []
    for level in range(tower.depth + 1):
        swap = swaps[level]
        images = [Permutation(swap[p.images[swap]])
                  for p in tower.level_images(level)]
        if level == 0:
            proj = None
        else:
            proj = swaps[level - 1][tower.level_projection(level)[swap]]
        levels.append(TowerLevel(tower.level_degree(level), images, proj))
    source = {
        "kind": "rebase",
        "point": list(point.coordinates),
        "base": tower.source,
    }
    return ChainTower(tower.gen_names, levels, source)


def cylinder(tower, point, n):
    """Membership predicate of the clopen set of FiberPoints agreeing with
    ``point`` on every level <= n."""
    tower.check_point(point)
    if not 0 <= n <= tower.depth:
        raise ValueError("cylinder level %d out of range" % n)

    def member(other):
        tower.check_point(other)
        return all(other[level] == point[level] for level in range(n + 1))

    return member


def cylinder_members(tower, point, n):
    """Deepest-level points of the cylinder: those projecting to point_n."""
    tower.check_point(point)
    if not 0 <= n <= tower.depth:
        raise ValueError("cylinder level %d out of range" % n)
    comp = tower.composed_projection(tower.depth, n)
    return np.flatnonzero(comp == point[n]).astype(np.int32)
