"""Finitely presented groups and coset enumeration.

Words over named generators are parsed from a whitespace-separated syntax
("b a b^-1 a", "a^2") into tuples of signed generator indices: letter +k is
generator k-1, -k its inverse, applied left to right.

`todd_coxeter` enumerates the cosets of a finitely generated subgroup by the
HLT strategy (relator scanning with coset definition, coincidence handling
by merging toward the lower-numbered coset).  Enumeration is deterministic
for a fixed presentation and coset cap.  A cap hit returns an explicitly
incomplete table rather than raising, so callers can distinguish "ran out
of budget" from "finished".
"""

from dataclasses import dataclass, field

import numpy as np

from .permgroup import Permutation


class WordSyntaxError(Exception):
    """A word string failed to parse; carries the failing token position."""

    def __init__(self, message, position):
        self.position = position
        super().__init__("%s (token %d)" % (message, position))


@dataclass(frozen=True)
class Word:
    """A word in named generators, stored as signed 1-based indices."""

    letters: tuple
    names: tuple

    def __post_init__(self):
        for letter in self.letters:
            if letter == 0 or abs(letter) > len(self.names):
                raise ValueError("letter %d out of range" % letter)

    def __str__(self):
        return format_word(self.letters, self.names)

    def inverse(self):
        return Word(tuple(-x for x in reversed(self.letters)), self.names)

    def __mul__(self, other):
        if self.names != other.names:
            raise ValueError("words over different generator alphabets")
        return Word(self.letters + other.letters, self.names)

    def free_reduce(self):
        out = []
        for letter in self.letters:
            if out and out[-1] == -letter:
                out.pop()
            else:
                out.append(letter)
        return Word(tuple(out), self.names)


def parse_word(text, names):
    """Parse "b a b^-1 a" / "a^2" into signed letters over `names`.

    The empty string (or "1") is the empty word.
    """
    lookup = {name: i + 1 for i, name in enumerate(names)}
    letters = []
    tokens = text.split()
    if tokens == ["1"]:
        tokens = []
    for pos, token in enumerate(tokens):
        name, sep, exp = token.partition("^")
        if name not in lookup:
            raise WordSyntaxError("unknown generator %r" % name, pos)
        power = 1
        if sep:
            try:
                power = int(exp)
            except ValueError:
                raise WordSyntaxError("bad exponent %r" % exp, pos) from None
            if power == 0:
                raise WordSyntaxError("zero exponent", pos)
        letter = lookup[name] if power > 0 else -lookup[name]
        letters.extend([letter] * abs(power))
    return tuple(letters)


def format_word(letters, names):
    """Render signed letters back to the string syntax; empty word is "1"."""
    if not letters:
        return "1"
    parts = []
    i = 0
    while i < len(letters):
        j = i
        while j < len(letters) and letters[j] == letters[i]:
            j += 1
        count = j - i
        name = names[abs(letters[i]) - 1]
        if letters[i] > 0:
            parts.append(name if count == 1 else "%s^%d" % (name, count))
        else:
            parts.append("%s^-%d" % (name, count))
        i = j
    return " ".join(parts)


class Presentation:
    """Generator names plus freely reduced relator words."""

    def __init__(self, names, relators):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        if not names:
            raise ValueError("a presentation needs at least one generator")
        self.names = names
        rels = []
        for r in relators:
            letters = parse_word(r, names) if isinstance(r, str) else tuple(r)
            reduced = Word(letters, names).free_reduce().letters
            if not reduced:
                raise ValueError("trivial relator %r" % (r,))
            rels.append(reduced)
        self.relators = tuple(rels)

    def word(self, text):
        return Word(parse_word(text, self.names), self.names)

    def __repr__(self):
        return "Presentation(%s; %d relators)" % (", ".join(self.names),
                                                  len(self.relators))


@dataclass
class CosetTable:
    """Result of a coset enumeration.

    `table[c][2*i]` is coset c acted on by generator i, `table[c][2*i+1]`
    by its inverse; -1 marks an undefined entry (only in incomplete tables).
    Coset 0 is the subgroup itself.  `complete` is False when the coset cap
    was hit before the table closed.
    """

    names: tuple
    table: np.ndarray
    complete: bool
    cosets_defined: int
    subgroup_words: tuple = ()
    stats: dict = field(default_factory=dict)

    @property
    def n_cosets(self):
        return int(self.table.shape[0])

    def follow(self, coset, letters):
        """Coset reached from `coset` along a signed word, or None if the
        path runs through an undefined entry."""
        c = coset
        for letter in letters:
            col = 2 * (abs(letter) - 1) + (0 if letter > 0 else 1)
            c = int(self.table[c, col])
            if c < 0:
                return None
        return c


def _column(letter):
    return 2 * (letter - 1) if letter > 0 else 2 * (-letter - 1) + 1


def _inv_column(letter):
    return _column(-letter)


def todd_coxeter(presentation, subgroup_words=(), max_cosets=100_000):
    """Enumerate cosets of the subgroup generated by `subgroup_words`.

    HLT strategy: scan the subgroup words at coset 0, then scan every
    relator at every live coset, defining new cosets to fill gaps and
    merging coincidences toward the lower-numbered coset.  Completed tables
    are re-verified against all relators and the subgroup words before
    being returned with standardized (BFS from coset 0, generator order)
    numbering.
    """
    names = presentation.names
    ngens = len(names)
    words = []
    for w in subgroup_words:
        letters = parse_word(w, names) if isinstance(w, str) else tuple(w.letters if isinstance(w, Word) else w)
        words.append(letters)
    ncols = 2 * ngens
    table = [[-1] * ncols]
    p = [0]           # union-find toward smaller representative
    live = [True]
    dead_queue = []

    def rep(c):
        r = c
        while p[r] != r:
            r = p[r]
        while p[c] != r:
            p[c], c = r, p[c]
        return r

    def define():
        c = len(table)
        if c >= max_cosets:
            return None
        table.append([-1] * ncols)
        p.append(c)
        live.append(True)
        return c

    def merge(a, b):
        a, b = rep(a), rep(b)
        if a == b:
            return
        if a > b:
            a, b = b, a
        p[b] = a
        live[b] = False
        dead_queue.append(b)

    def set_entry(c, col, d):
        # record c.col = d and the inverse deduction d.invcol = c,
        # merging on conflicts
        c, d = rep(c), rep(d)
        cur = table[c][col]
        if cur >= 0:
            merge(rep(cur), d)
            return
        table[c][col] = d
        icol = col + 1 if col % 2 == 0 else col - 1
        cur = table[d][icol]
        if cur >= 0:
            merge(rep(cur), c)
        else:
            table[d][icol] = c

    def process_coincidences():
        while dead_queue:
            b = dead_queue.pop()
            a = rep(b)
            row = table[b]
            for col in range(ncols):
                d = row[col]
                if d < 0:
                    continue
                row[col] = -1
                set_entry(a, col, rep(d))

    def scan_and_fill(c, letters):
        # Scan a word at coset c, defining cosets to fill gaps; returns
        # False when the coset cap blocks a needed definition.  After any
        # definition the scan restarts, so merges cannot leave stale
        # positions.
        while True:
            start = rep(c)
            f, fi = start, 0
            b, bi = start, len(letters)
            while fi < bi:
                nxt = table[f][_column(letters[fi])]
                if nxt < 0:
                    break
                f = rep(nxt)
                fi += 1
            if fi == bi:
                if f != b:
                    merge(f, b)
                    process_coincidences()
                return True
            while bi > fi:
                nxt = table[b][_inv_column(letters[bi - 1])]
                if nxt < 0:
                    break
                b = rep(nxt)
                bi -= 1
            if bi == fi:
                # forward and backward met at the same position
                if f != b:
                    merge(f, b)
                    process_coincidences()
                return True
            if bi == fi + 1:
                set_entry(f, _column(letters[fi]), b)
                process_coincidences()
                return True
            nc = define()
            if nc is None:
                return False
            set_entry(f, _column(letters[fi]), nc)
            process_coincidences()

    capped = False
    for w in words:
        if not scan_and_fill(0, w):
            capped = True
            break
    scanned = 0
    while not capped:
        c = scanned
        if c >= len(table):
            break
        scanned += 1
        if not live[c] or rep(c) != c:
            continue
        ok = True
        for r in presentation.relators:
            if not scan_and_fill(c, r):
                ok = False
                break
            if not live[c] or rep(c) != c:
                break
        if not ok:
            capped = True
            break
        if not live[c] or rep(c) != c:
            continue
        for col in range(ncols):
            if not live[c]:
                break
            if table[c][col] < 0:
                nc = define()
                if nc is None:
                    capped = True
                    break
                set_entry(c, col, nc)
                process_coincidences()
        if capped:
            break

    # compress to live cosets, renumbering by BFS from coset 0 in column order
    live_set = [c for c in range(len(table)) if live[c] and rep(c) == c]
    if capped:
        # partial table: keep raw renumbering by coset id (still deterministic)
        number = {c: i for i, c in enumerate(live_set)}
        arr = np.full((len(live_set), ncols), -1, dtype=np.int64)
        for c in live_set:
            for col in range(ncols):
                d = table[c][col]
                if d >= 0:
                    arr[number[c], col] = number[rep(d)]
        return CosetTable(names, arr, False, len(table),
                          tuple(words), {"capped": True, "max_cosets": max_cosets})

    number = {rep(0): 0}
    order = [rep(0)]
    qi = 0
    while qi < len(order):
        c = order[qi]
        qi += 1
        for col in range(ncols):
            d = rep(table[c][col])
            if d not in number:
                number[d] = len(order)
                order.append(d)
    if len(order) != len(live_set):
        raise AssertionError("completed table is not transitive")
    arr = np.empty((len(order), ncols), dtype=np.int64)
    for c in order:
        for col in range(ncols):
            arr[number[c], col] = number[rep(table[c][col])]

    result = CosetTable(names, arr, True, len(table), tuple(words),
                        {"capped": False, "max_cosets": max_cosets})
    _verify_table(presentation, result)
    return result


def _verify_table(presentation, ct):
    """Re-check a completed table against relators, inverses and subgroup
    words; raises on any defect."""
    arr = ct.table
    n = arr.shape[0]
    if (arr < 0).any():
        raise AssertionError("complete table has undefined entries")
    idx = np.arange(n)
    for i in range(len(ct.names)):
        if not np.array_equal(arr[arr[:, 2 * i], 2 * i + 1], idx):
            raise AssertionError("inverse columns inconsistent for generator %d" % i)
    for r in presentation.relators:
        cur = idx
        for letter in r:
            cur = arr[cur, _column(letter)]
        if not np.array_equal(cur, idx):
            raise AssertionError("relator %s does not fix all cosets"
                                 % format_word(r, ct.names))
    for w in ct.subgroup_words:
        if ct.follow(0, w) != 0:
            raise AssertionError("subgroup word does not fix coset 0")


def action_from_table(ct):
    """Generator permutations of the coset action from a completed table.

    Returns a list of `Permutation`s (one per generator name, acting on
    cosets with the subgroup as point 0).  The action is transitive by
    construction; this is asserted.
    """
    if not ct.complete:
        raise ValueError("cannot build an action from an incomplete table")
    n = ct.n_cosets
    perms = [Permutation(ct.table[:, 2 * i].astype(np.int32))
             for i in range(len(ct.names))]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for col in range(ct.table.shape[1]):
            y = int(ct.table[x, col])
            if not seen[y]:
                seen[y] = True
                frontier.append(y)
    if not seen.all():
        raise AssertionError("coset action is not transitive")
    return perms


def coset_witness_words(ct):
    """For each coset, a signed word carrying coset 0 there (BFS order,
    positive and negative letters in column order)."""
    n = ct.n_cosets
    words = {0: ()}
    frontier = [0]
    qi = 0
    while qi < len(frontier):
        c = frontier[qi]
        qi += 1
        for i in range(len(ct.names)):
            for letter in (i + 1, -(i + 1)):
                d = int(ct.table[c, _column(letter)])
                if d >= 0 and d not in words:
                    words[d] = words[c] + (letter,)
                    frontier.append(d)
    if len(words) != n:
        raise AssertionError("table is not transitive from coset 0")
    return [words[c] for c in range(n)]
