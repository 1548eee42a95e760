"""Lyndon-word bases of the free Lie ring, degree by degree.

Degree-m Lyndon words over an n-letter alphabet index a basis of the m-th
lower-central section of a free group of rank n.  This module enumerates
them, computes the Witt dimension independently, builds the standard
bracketing of each word both as a group commutator word and as its monomial
expansion, and extracts exact integer coordinates of homogeneous Lie
elements with respect to that basis.

Letters are integers 0..n-1; words and monomials are tuples of letters.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intlinalg import solve_echelon

Monomial = tuple[int, ...]


def _mobius(d: int) -> int:
    out = 1
    p = 2
    while p * p <= d:
        if d % p == 0:
            d //= p
            if d % p == 0:
                return 0
            out = -out
        p += 1
    if d > 1:
        out = -out
    return out


def witt_dimension(n: int, m: int) -> int:
    """Rank of the degree-m component of the free Lie ring on n letters:
    (1/m) * sum over d | m of mobius(d) * n^(m/d)."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    total = sum(_mobius(d) * n ** (m // d) for d in range(1, m + 1) if m % d == 0)
    return total // m


def lyndon_words(n: int, m: int) -> list[Monomial]:
    """All Lyndon words of length exactly m over n letters, sorted.

    Duval's algorithm: generates every word that is strictly smaller than
    all of its proper suffixes, in lexicographic order.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    out = []
    w = [0]
    while w:
        if len(w) == m:
            out.append(tuple(w))
        k = len(w)
        while len(w) < m:
            w.append(w[len(w) % k])
        while w and w[-1] == n - 1:
            w.pop()
        if w:
            w[-1] += 1
    return out


def is_lyndon(word: Monomial) -> bool:
    return len(word) > 0 and all(word < word[i:] for i in range(1, len(word)))


def standard_factorization(word: Monomial) -> tuple[Monomial, Monomial]:
    """Split a Lyndon word of length >= 2 as u * v with v the longest proper
    suffix that is itself Lyndon."""
    for i in range(1, len(word)):
        if is_lyndon(word[i:]):
            return word[:i], word[i:]
    raise ValueError(f"{word!r} is not a Lyndon word")


def _poly_bracket(p: dict, q: dict) -> dict:
    """Lie bracket of two homogeneous noncommutative polynomials: pq - qp."""
    out: dict[Monomial, int] = {}
    for (ma, ca, mb, cb, sign) in (
        [(ma, ca, mb, cb, 1) for ma, ca in p.items() for mb, cb in q.items()]
        + [(ma, ca, mb, cb, -1) for ma, ca in q.items() for mb, cb in p.items()]
    ):
        key = ma + mb
        val = out.get(key, 0) + sign * ca * cb
        if val:
            out[key] = val
        else:
            out.pop(key, None)
    return out


@dataclass(frozen=True)
class Bracketing:
    """Standard bracketing of a Lyndon word.

    `letters` spells the iterated group commutator over the alphabet as
    (letter, sign) pairs; `expansion` is its image in the free associative
    ring, i.e. the Lie polynomial obtained by replacing group commutators
    with ring brackets.
    """

    word: Monomial
    letters: tuple[tuple[int, int], ...]
    expansion: dict


_BRACKETING_CACHE: dict[Monomial, Bracketing] = {}


def bracketing(word: Monomial) -> Bracketing:
    word = tuple(word)
    cached = _BRACKETING_CACHE.get(word)
    if cached is not None:
        return cached
    if not is_lyndon(word):
        raise ValueError(f"{word!r} is not a Lyndon word")
    if len(word) == 1:
        out = Bracketing(word, ((word[0], 1),), {word: 1})
    else:
        u, v = standard_factorization(word)
        bu, bv = bracketing(u), bracketing(v)
        inv_u = tuple((g, -s) for g, s in reversed(bu.letters))
        inv_v = tuple((g, -s) for g, s in reversed(bv.letters))
        letters = inv_u + inv_v + bu.letters + bv.letters
        out = Bracketing(word, letters, _poly_bracket(bu.expansion, bv.expansion))
    _BRACKETING_CACHE[word] = out
    return out


def bracket_shape(word: Monomial) -> tuple:
    """Nested-pair view of the standard bracketing, for display."""
    if len(word) == 1:
        return word[0]
    u, v = standard_factorization(tuple(word))
    return (bracket_shape(u), bracket_shape(v))


class LyndonBasis:
    """Basis data for one degree: the sorted Lyndon words and the monomial
    expansions of their standard bracketings.

    Triangularity makes the expansion matrix row-echelon with unit pivots
    (the expansion of a word w is supported on monomials >= w, with
    coefficient 1 on w itself), so integer coordinates are recovered by
    exact back-substitution.
    """

    __slots__ = ("n", "m", "words", "expansions")

    def __init__(self, n: int, m: int):
        self.n = n
        self.m = m
        self.words = lyndon_words(n, m)
        self.expansions = [bracketing(w).expansion for w in self.words]

    def __len__(self):
        return len(self.words)

    def coordinates(self, tensor: dict) -> list[int] | None:
        """Integer coordinates of a homogeneous degree-m tensor in this
        basis, or None when it is not an integer combination (for instance
        any tensor that is not a Lie element)."""
        for mono, coeff in tensor.items():
            if len(mono) != self.m:
                raise ValueError("tensor is not homogeneous of the basis degree")
            if coeff and any(x < 0 or x >= self.n for x in mono):
                raise ValueError("tensor uses letters outside the alphabet")
        return solve_echelon(tensor, self.expansions)


_BASIS_CACHE: dict[tuple[int, int], LyndonBasis] = {}


def get_basis(n: int, m: int) -> LyndonBasis:
    key = (n, m)
    basis = _BASIS_CACHE.get(key)
    if basis is None:
        basis = _BASIS_CACHE[key] = LyndonBasis(n, m)
    return basis


def lie_coordinates(tensor: dict, n: int, m: int | None = None) -> list[int] | None:
    """Coordinates of a homogeneous tensor in the degree-m Lyndon basis over
    n letters; m is inferred from the tensor when omitted."""
    if m is None:
        degrees = {len(mono) for mono in tensor}
        if len(degrees) != 1:
            raise ValueError("tensor is empty or not homogeneous")
        m = degrees.pop()
    return get_basis(n, m).coordinates(tensor)
