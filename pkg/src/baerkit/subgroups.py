"""Canonical subgroups of a free nilpotent group, with membership by sieving.

A subgroup is stored as a filtered generating sequence: for every degree m
up to the cap, a Hermite-form integer lattice inside the degree-m Lyndon
coordinate space, each basis row realized by an actual group element of
weight m whose leading coordinates are that row.

Membership (`sieve`) reduces an element's leading coordinates against the
lattice of its weight, divides the realizing elements off, and recurses at
strictly larger weight; an element belongs to the subgroup exactly when
this terminates at the identity, provided the sequence is saturated.

Saturation means: every product of two stored elements, every inverse of a
stored element and, for normal subgroups, every conjugate of a stored
element by an ambient generator sieves to membership.  `insert_and_close`
establishes this by fixpoint; it terminates because every insertion
strictly enlarges one of finitely many lattices of bounded rank.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import CapacityError
from .intlinalg import AbelianInvariants, IntMatrix, abelian_invariants, hnf, _xgcd
from .lyndon import get_basis, lyndon_words, witt_dimension
from .magnus import GroupElement, identity_element, generator_element, series_of_letters

DEFAULT_MONOMIAL_BUDGET = 50_000


class AmbientContext:
    """The free nilpotent group on n generators of class `cap`, together with
    the per-degree Lyndon bases used for coordinates."""

    def __init__(self, n: int, cap: int, monomial_budget: int | None = DEFAULT_MONOMIAL_BUDGET):
        if n < 1 or cap < 1:
            raise ValueError("need n >= 1 and cap >= 1")
        total = sum(n ** m for m in range(1, cap + 1))
        if monomial_budget is not None and total > monomial_budget:
            raise CapacityError(
                f"job needs {total} monomials (n={n}, cap={cap}), "
                f"budget is {monomial_budget}"
            )
        self.n = n
        self.cap = cap
        self.bases = [get_basis(n, m) for m in range(1, cap + 1)]
        self.generators = [generator_element(i, n, cap) for i in range(n)]
        self.generator_inverses = [g.inverse() for g in self.generators]
        self._brackets: dict[tuple[int, ...], GroupElement] = {}
        self._full = None

    def compatible(self, other: "AmbientContext") -> bool:
        return self.n == other.n and self.cap == other.cap

    def basis(self, m: int):
        return self.bases[m - 1]

    def identity(self) -> GroupElement:
        return identity_element(self.cap)

    def element_of_letters(self, letters) -> GroupElement:
        return series_of_letters(letters, self.n, self.cap)

    def element_of_word(self, word) -> GroupElement:
        if len(word.alphabet) > self.n:
            raise ValueError("word alphabet exceeds the ambient rank")
        return self.element_of_letters(word.letters)

    def bracket_element(self, word: tuple[int, ...]) -> GroupElement:
        """Group element realizing the standard bracketing of a Lyndon word;
        built recursively so shared sub-brackets are computed once."""
        el = self._brackets.get(word)
        if el is None:
            if len(word) == 1:
                el = self.generators[word[0]]
            else:
                from .lyndon import standard_factorization

                u, v = standard_factorization(word)
                el = self.bracket_element(u).commutator(self.bracket_element(v))
            self._brackets[word] = el
        return el

    def leading_coordinates(self, g: GroupElement) -> tuple[int, list[int]]:
        """(weight, Lyndon coordinates of the leading part); the leading part
        of a group element is always a Lie element, so this cannot fail."""
        m = g.weight()
        if m is None:
            raise ValueError("identity has no leading coordinates")
        coords = self.basis(m).coordinates(g.leading())
        if coords is None:
            raise AssertionError("leading part escaped the Lyndon lattice")
        return m, coords

    def full_group(self) -> "FilteredSubgroup":
        """The whole ambient group as a saturated filtered subgroup: full
        lattices at every degree, realized by standard bracketings."""
        if self._full is None:
            sub = FilteredSubgroup(self, normal=True)
            for m in range(1, self.cap + 1):
                level = sub.levels[m - 1]
                words = lyndon_words(self.n, m)
                dim = len(words)
                for j, w in enumerate(words):
                    row = [0] * dim
                    row[j] = 1
                    level.rows.append(row)
                    level.elems.append(self.bracket_element(w))
            self._full = sub
        return self._full


class _Level:
    """One degree of a filtered subgroup: echelon lattice rows plus the
    group elements realizing them."""

    __slots__ = ("dim", "rows", "elems")

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[list[int]] = []
        self.elems: list[GroupElement] = []

    def copy(self) -> "_Level":
        out = _Level(self.dim)
        out.rows = [row[:] for row in self.rows]
        out.elems = self.elems[:]
        return out

    def pivot(self, i: int) -> int:
        return next(j for j, x in enumerate(self.rows[i]) if x)

    def member_exponents(self, vec) -> list[int] | None:
        """Exponents expressing vec over the rows, or None when outside."""
        v = list(vec)
        exps = [0] * len(self.rows)
        for i, row in enumerate(self.rows):
            p = self.pivot(i)
            b = v[p]
            if b == 0:
                continue
            if b % row[p]:
                return None
            q = b // row[p]
            exps[i] = q
            v = [x - q * y for x, y in zip(v, row)]
        return None if any(v) else exps

    def index(self) -> int | None:
        """Index of the lattice in Z^dim, None when the rank is deficient."""
        if len(self.rows) < self.dim:
            return None
        out = 1
        for i in range(len(self.rows)):
            out *= self.rows[i][self.pivot(i)]
        return out

    @property
    def is_full(self) -> bool:
        return self.index() == 1

    def add(self, vec, elem: GroupElement) -> list[GroupElement]:
        """Insert a vector with its realizing element, keeping Hermite form.

        Returns byproduct elements whose leading coordinates cancelled to
        zero during reduction: they have strictly larger weight (or are the
        identity) and must be re-sieved by the caller.
        """
        byproducts: list[GroupElement] = []
        v = list(vec)
        e = elem
        while True:
            j = next((k for k, x in enumerate(v) if x), None)
            if j is None:
                if not e.is_identity:
                    byproducts.append(e)
                break
            pos = 0
            while pos < len(self.rows) and self.pivot(pos) < j:
                pos += 1
            if pos < len(self.rows) and self.pivot(pos) == j:
                row = self.rows[pos]
                a, b = row[j], v[j]
                if b % a == 0:
                    q = b // a
                    v = [x - q * y for x, y in zip(v, row)]
                    e = (self.elems[pos] ** (-q)) * e
                    continue
                g, x, y = _xgcd(a, b)
                new_row = [x * ra + y * rb for ra, rb in zip(row, v)]
                new_elem = (self.elems[pos] ** x) * (e ** y)
                ag, bg = a // g, b // g
                v = [ag * rb - bg * ra for ra, rb in zip(row, v)]
                e = (e ** ag) * (self.elems[pos] ** (-bg))
                self.rows[pos] = new_row
                self.elems[pos] = new_elem
                continue
            if v[j] < 0:
                v = [-x for x in v]
                e = e.inverse()
            self.rows.insert(pos, v)
            self.elems.insert(pos, e)
            break
        self._normalize()
        return byproducts

    def _normalize(self):
        # Reduce entries above every pivot into [0, pivot).
        for t in range(len(self.rows)):
            p = self.pivot(t)
            a = self.rows[t][p]
            for i in range(t):
                q = self.rows[i][p] // a
                if q:
                    self.rows[i] = [
                        x - q * y for x, y in zip(self.rows[i], self.rows[t])
                    ]
                    self.elems[i] = self.elems[i] * (self.elems[t] ** (-q))


@dataclass
class SieveResult:
    member: bool
    recipe: list  # ((degree, row index), exponent) pairs, in product order
    residue: GroupElement | None


class FilteredSubgroup:
    """See the module docstring; construct through the functions below."""

    def __init__(self, ambient: AmbientContext, normal: bool):
        self.ambient = ambient
        self.normal = normal
        self.levels = [
            _Level(witt_dimension(ambient.n, m)) for m in range(1, ambient.cap + 1)
        ]

    def copy(self) -> "FilteredSubgroup":
        out = FilteredSubgroup(self.ambient, self.normal)
        out.levels = [lvl.copy() for lvl in self.levels]
        return out

    def stored(self) -> list[tuple[int, int, GroupElement]]:
        """All realizing elements as (degree, row index, element), ordered."""
        out = []
        for m in range(1, self.ambient.cap + 1):
            level = self.levels[m - 1]
            for i, el in enumerate(level.elems):
                out.append((m, i, el))
        return out

    def lattice_rows(self, m: int) -> list[list[int]]:
        return [row[:] for row in self.levels[m - 1].rows]

    def sieve(self, g: GroupElement) -> SieveResult:
        """Reduce g level by level; MEMBER comes with a recipe that
        multiplies out exactly to g."""
        self._check_ambient(g)
        recipe = []
        cur = g
        while True:
            m = cur.weight()
            if m is None:
                return SieveResult(True, recipe, None)
            _, coords = self.ambient.leading_coordinates(cur)
            level = self.levels[m - 1]
            exps = level.member_exponents(coords)
            if exps is None:
                return SieveResult(False, recipe, cur)
            steps = [((m, i), e) for i, e in enumerate(exps) if e]
            recipe.extend(steps)
            if m == self.ambient.cap:
                # Dividing off at the top degree leaves weight > cap, which
                # is the identity here; no group arithmetic needed.
                return SieveResult(True, recipe, None)
            for (_, i), e in steps:
                cur = (level.elems[i] ** (-e)) * cur

    def contains(self, g: GroupElement) -> bool:
        return self.sieve(g).member

    def resolve(self, ref) -> GroupElement:
        m, i = ref
        return self.levels[m - 1].elems[i]

    def contains_all(self, other: "FilteredSubgroup") -> bool:
        return all(self.contains(el) for _, _, el in other.stored())

    def equal_as_subgroup(self, other: "FilteredSubgroup") -> bool:
        return self.contains_all(other) and other.contains_all(self)

    def _check_ambient(self, g: GroupElement):
        if g.cap != self.ambient.cap:
            raise ValueError("element cap does not match the ambient")


def trivial_subgroup(ambient: AmbientContext, normal: bool = True) -> FilteredSubgroup:
    return FilteredSubgroup(ambient, normal)


def insert_and_close(
    base: FilteredSubgroup | None,
    ambient: AmbientContext,
    elements,
    normal: bool,
) -> FilteredSubgroup:
    """Saturated closure of `base` (may be None) together with `elements`.

    In normal mode the result is closed under conjugation by the ambient
    generators and their inverses, which in a nilpotent group generates all
    conjugation.  The final verification passes re-sieve every product,
    inverse and conjugate of the stored elements until one pass adds
    nothing, so the saturation invariant holds by construction.
    """
    if base is not None:
        if not base.ambient.compatible(ambient):
            raise ValueError("ambient mismatch")
        sub = base.copy()
        sub.normal = base.normal or normal
    else:
        sub = FilteredSubgroup(ambient, normal)

    cap = ambient.cap
    conjugators = ambient.generators + ambient.generator_inverses
    queue = deque(elements)

    def process(g: GroupElement) -> bool:
        res = sub.sieve(g)
        if res.member:
            return False
        r = res.residue
        m = r.weight()
        _, coords = ambient.leading_coordinates(r)
        queue.extend(sub.levels[m - 1].add(coords, r))
        if sub.normal and m < cap:
            for t in conjugators:
                queue.append(r.conjugate(t))
        return True

    while True:
        while queue:
            process(queue.popleft())
        # Verification pass: enqueue the saturation obligations and repeat
        # if anything new appears.  Products of two top-degree elements and
        # inverses/conjugates at the top degree stay inside the lattice
        # automatically and are skipped.
        stored = sub.stored()
        dirty = False
        for m, _, r in stored:
            if m < cap:
                queue.append(r.inverse())
                if sub.normal:
                    for t in conjugators:
                        queue.append(r.conjugate(t))
        for m1, _, r in stored:
            for m2, _, s in stored:
                if m1 == cap and m2 == cap:
                    continue
                queue.append(r * s)
        while queue:
            if process(queue.popleft()):
                dirty = True
        if not dirty:
            return sub


def join(u: FilteredSubgroup, v: FilteredSubgroup) -> FilteredSubgroup:
    """Smallest saturated subgroup containing both (normal closure when
    either input is normal)."""
    if not u.ambient.compatible(v.ambient):
        raise ValueError("ambient mismatch")
    return insert_and_close(
        u, u.ambient, [el for _, _, el in v.stored()], u.normal or v.normal
    )


def commutator_with(u: FilteredSubgroup, v: FilteredSubgroup) -> FilteredSubgroup:
    """Normal closure of the commutators of the stored realizing elements of
    the two subgroups; iterating with v = full ambient group computes
    iterated commutator subgroups with the whole group."""
    if not u.ambient.compatible(v.ambient):
        raise ValueError("ambient mismatch")
    cap = u.ambient.cap
    elems = []
    for m1, _, a in u.stored():
        for m2, _, b in v.stored():
            if m1 + m2 > cap:
                continue  # commutator weight >= m1 + m2: identity here
            c = a.commutator(b)
            if not c.is_identity:
                elems.append(c)
    return insert_and_close(None, u.ambient, elems, normal=True)


def intersect_with_gamma(u: FilteredSubgroup, m: int) -> FilteredSubgroup:
    """Intersection with the degree-m lower-central term: keep the levels at
    degree >= m.  A saturated filtered sequence is induced along the central
    filtration, so the stored elements of weight >= m generate exactly the
    intersection, and their sieve paths never visit lower degrees."""
    if m > u.ambient.cap:
        raise ValueError("gamma degree exceeds the cap")
    out = u.copy()
    for j in range(1, m):
        out.levels[j - 1] = _Level(out.levels[j - 1].dim)
    return out


def quotient_order(u: FilteredSubgroup) -> int | None:
    """Order of ambient/U for saturated normal U: the product over degrees
    of the lattice index, or None (infinite) at any rank deficiency."""
    total = 1
    for level in u.levels:
        ix = level.index()
        if ix is None:
            return None
        total *= ix
    return total


def is_full(u: FilteredSubgroup) -> bool:
    return all(level.is_full for level in u.levels)


def quotient_invariants(
    num: FilteredSubgroup, den: FilteredSubgroup
) -> AbelianInvariants:
    """Invariants of the abelian quotient N/D.

    Preconditions are checked, not assumed: every stored element of D must
    sieve into N, and every commutator of two stored N-generators must sieve
    into D.  The abelian presentation has one generator per stored element
    of N; its relations are the abelianized sieve recipes of D's stored
    elements and of the pairwise commutators of N's generators.
    """
    if not num.ambient.compatible(den.ambient):
        raise ValueError("ambient mismatch")
    cap = num.ambient.cap
    gens = num.stored()
    pos = {(m, i): k for k, (m, i, _) in enumerate(gens)}
    width = len(gens)

    def recipe_row(recipe) -> list[int]:
        row = [0] * width
        for ref, e in recipe:
            row[pos[ref]] += e
        return row

    rows = []
    for _, _, d in den.stored():
        res = num.sieve(d)
        if not res.member:
            raise ValueError("denominator is not contained in the numerator")
        rows.append(recipe_row(res.recipe))
    for a in range(width):
        for b in range(a + 1, width):
            ma, _, ga = gens[a]
            mb, _, gb = gens[b]
            if ma + mb > cap:
                continue  # commutator is the identity at this cap
            c = ga.commutator(gb)
            if c.is_identity:
                continue
            if not den.contains(c):
                raise ValueError("quotient is not abelian")
            res = num.sieve(c)
            if not res.member:
                raise AssertionError("commutator escaped the numerator")
            rows.append(recipe_row(res.recipe))
    return abelian_invariants(width, rows)


def embedded_copy(
    u: FilteredSubgroup,
    target: AmbientContext,
    offset: int,
    normal: bool,
) -> FilteredSubgroup:
    """Image of a subgroup under the free-factor embedding that shifts every
    generator index by `offset`; re-closed in the target ambient."""
    from .magnus import reindex_element

    if target.cap != u.ambient.cap:
        raise ValueError("cap mismatch between ambients")
    elems = [
        reindex_element(el, offset, target.n) for _, _, el in u.stored()
    ]
    return insert_and_close(None, target, elems, normal)


def lattices_intersect_trivially(
    u: FilteredSubgroup, v: FilteredSubgroup
) -> bool:
    """True when at every degree the leading-coordinate lattices of the two
    subgroups meet only in zero; then the subgroups meet only in the
    identity, since a nontrivial common element would put its leading
    coordinates in both lattices."""
    for lu, lv in zip(u.levels, v.levels):
        if not lu.rows or not lv.rows:
            continue
        ra = len(hnf(IntMatrix(lu.rows, cols=lu.dim))[0].nonzero_rows())
        rb = len(hnf(IntMatrix(lv.rows, cols=lv.dim))[0].nonzero_rows())
        stacked = IntMatrix(lu.rows + lv.rows, cols=lu.dim)
        rs = len(hnf(stacked)[0].nonzero_rows())
        if rs < ra + rb:
            return False
    return True
