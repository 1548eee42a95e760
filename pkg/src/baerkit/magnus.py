"""Free nilpotent group arithmetic via truncated integer power series.

A free group on n generators embeds into the units of the ring of
noncommutative integer power series by x_i -> 1 + X_i; discarding every
monomial of degree above a cap W turns this into exact arithmetic in the
free nilpotent quotient of class W.  The kernel of the truncated map is
precisely the (W+1)-st lower central term, so two words map to the same
series exactly when they agree in that quotient, and the lowest nonzero
degree of (series - 1) reads off lower-central depth.
"""

from __future__ import annotations

from .lyndon import Monomial


class TruncatedSeries:
    """Noncommutative polynomial over Z with all terms of degree <= cap.

    Terms map monomials (tuples of generator indices) to nonzero integer
    coefficients; the empty tuple is the constant term.  Instances are
    treated as immutable.
    """

    __slots__ = ("cap", "terms")

    def __init__(self, cap: int, terms: dict):
        if cap < 1:
            raise ValueError("cap must be >= 1")
        self.cap = cap
        self.terms = {m: c for m, c in terms.items() if c}
        for mono in self.terms:
            if len(mono) > cap:
                raise ValueError("monomial exceeds the cap")

    @classmethod
    def one(cls, cap: int) -> "TruncatedSeries":
        return cls(cap, {(): 1})

    @property
    def is_one(self) -> bool:
        return self.terms == {(): 1}

    def constant(self) -> int:
        return self.terms.get((), 0)

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        """Terms in length-lexicographic monomial order."""
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.cap == other.cap and self.terms == other.terms

    def __repr__(self):
        parts = []
        for mono, c in self.sorted_terms()[:8]:
            name = "".join(f"X{i}" for i in mono) or "1"
            parts.append(f"{c}*{name}")
        tail = " + ..." if len(self.terms) > 8 else ""
        return f"<series cap={self.cap}: {' + '.join(parts) or '0'}{tail}>"

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        if self.cap != other.cap:
            raise ValueError("cap mismatch")
        cap = self.cap
        by_len: dict[int, list] = {}
        for mono, c in other.terms.items():
            by_len.setdefault(len(mono), []).append((mono, c))
        out: dict[Monomial, int] = {}
        for ma, ca in self.terms.items():
            room = cap - len(ma)
            for lb, items in by_len.items():
                if lb > room:
                    continue
                for mb, cb in items:
                    key = ma + mb
                    val = out.get(key, 0) + ca * cb
                    if val:
                        out[key] = val
                    else:
                        del out[key]
        return TruncatedSeries(cap, out)

    def weight(self) -> int | None:
        """Smallest degree in [1, cap] carrying a nonzero term, or None when
        the series is the constant 1 (identity element)."""
        w = None
        for mono in self.terms:
            d = len(mono)
            if d and (w is None or d < w):
                w = d
        return w

    def homogeneous(self, m: int) -> dict:
        return {mono: c for mono, c in self.terms.items() if len(mono) == m}

    def invert_unit(self) -> "TruncatedSeries":
        """Inverse of a series with constant term 1, by the finite geometric
        series in (self - 1); exact at the cap."""
        if self.constant() != 1:
            raise ValueError("only series with constant term 1 are inverted")
        cap = self.cap
        u = {m: c for m, c in self.terms.items() if m}
        out = {(): 1}
        power = TruncatedSeries(cap, {(): 1})
        u_series = TruncatedSeries(cap, u)
        sign = 1
        for _ in range(cap):
            power = power * u_series
            if not power.terms:
                break
            sign = -sign
            for mono, c in power.terms.items():
                val = out.get(mono, 0) + sign * c
                if val:
                    out[mono] = val
                else:
                    del out[mono]
        return TruncatedSeries(cap, out)


class GroupElement:
    """An element of the free nilpotent group of class `cap`: a truncated
    series with constant term 1, optionally remembering a defining word."""

    __slots__ = ("series", "word", "_weight")

    def __init__(self, series: TruncatedSeries, word=None):
        if series.constant() != 1:
            raise ValueError("group elements have constant term exactly 1")
        self.series = series
        self.word = word
        self._weight = False  # not yet computed

    @property
    def cap(self) -> int:
        return self.series.cap

    @property
    def is_identity(self) -> bool:
        return self.series.is_one

    def weight(self) -> int | None:
        if self._weight is False:
            self._weight = self.series.weight()
        return self._weight

    def leading(self) -> dict:
        """Homogeneous component of (series - 1) at the weight degree."""
        w = self.weight()
        if w is None:
            raise ValueError("identity element has no leading part")
        return self.series.homogeneous(w)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.series * other.series)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.series.invert_unit())

    def __pow__(self, e: int) -> "GroupElement":
        if e < 0:
            return self.inverse() ** (-e)
        out = GroupElement(TruncatedSeries.one(self.cap))
        base = self
        while e:
            if e & 1:
                out = out * base
            base_needed = e >> 1
            if base_needed:
                base = base * base
            e = base_needed
        return out

    def commutator(self, other: "GroupElement") -> "GroupElement":
        """[g, h] = g^-1 h^-1 g h."""
        return self.inverse() * other.inverse() * self * other

    def conjugate(self, by: "GroupElement") -> "GroupElement":
        """g^t = t^-1 g t."""
        return by.inverse() * self * by

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.series == other.series

    def __repr__(self):
        return f"GroupElement({self.series!r})"


def identity_element(cap: int) -> GroupElement:
    return GroupElement(TruncatedSeries.one(cap))


def generator_element(i: int, n: int, cap: int) -> GroupElement:
    if not 0 <= i < n:
        raise ValueError("generator index out of range")
    return GroupElement(TruncatedSeries(cap, {(): 1, (i,): 1}))


def series_of_letters(letters, n: int, cap: int) -> GroupElement:
    """Image of a word given as (generator index, sign) pairs."""
    gens = [generator_element(i, n, cap) for i in range(n)]
    invs = [g.inverse() for g in gens]
    out = identity_element(cap)
    for i, s in letters:
        if not 0 <= i < n:
            raise ValueError("letter outside the declared alphabet")
        out = out * (gens[i] if s > 0 else invs[i])
    return out


def series_of_word(word, n: int, cap: int) -> GroupElement:
    """Image of a presentations.Word; its alphabet may not exceed n letters."""
    if len(word.alphabet) > n:
        raise ValueError("word alphabet is larger than the ambient rank")
    g = series_of_letters(word.letters, n, cap)
    return GroupElement(g.series, word=word)


def weight_of(g: GroupElement) -> int | None:
    return g.weight()


def leading_part(g: GroupElement) -> dict:
    return g.leading()


def reindex_element(g: GroupElement, offset: int, n: int) -> GroupElement:
    """Reinterpret an element over a larger alphabet, shifting every letter
    by `offset`; an injective homomorphism between the ambient groups."""
    terms = {}
    for mono, c in g.series.terms.items():
        shifted = tuple(i + offset for i in mono)
        if shifted and max(shifted) >= n:
            raise ValueError("reindexed letter exceeds the target alphabet")
        terms[shifted] = c
    return GroupElement(TruncatedSeries(g.cap, terms))
