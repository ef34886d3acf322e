"""Free-group word calculus.

Words are stored as (generator index, nonzero exponent) pairs in freely
reduced form.  The commutator convention throughout the whole toolkit is

    [a, b] = a^-1 b^-1 a b

and every other module relies on it.  Hall basic commutators use the
order "weight first, then lexicographic structure encoding"; Magnus
series are truncated noncommutative integer power series with sparse
coefficient storage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iproduct


@dataclass(frozen=True)
class Word:
    """Freely reduced word over generators 0..alphabet_size-1."""

    alphabet_size: int
    letters: tuple = ()  # ((gen, exp), ...), adjacent gens distinct, exps nonzero

    def __post_init__(self):
        for g, e in self.letters:
            if not (0 <= g < self.alphabet_size):
                raise ValueError(f"generator {g} out of range")
            if e == 0:
                raise ValueError("zero exponent in reduced word")
        for (g1, _), (g2, _) in zip(self.letters, self.letters[1:]):
            if g1 == g2:
                raise ValueError("word is not freely reduced")

    @staticmethod
    def from_letters(alphabet_size: int, letters) -> "Word":
        return Word(alphabet_size, _free_reduce(letters))

    @staticmethod
    def generator(alphabet_size: int, g: int, e: int = 1) -> "Word":
        return Word.from_letters(alphabet_size, [(g, e)])

    @staticmethod
    def empty(alphabet_size: int) -> "Word":
        return Word(alphabet_size, ())

    def is_empty(self) -> bool:
        return not self.letters

    def __mul__(self, other: "Word") -> "Word":
        n = max(self.alphabet_size, other.alphabet_size)
        return Word.from_letters(n, self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(self.alphabet_size,
                    tuple((g, -e) for g, e in reversed(self.letters)))

    def __pow__(self, k: int) -> "Word":
        if k == 0:
            return Word.empty(self.alphabet_size)
        base = self if k > 0 else self.inverse()
        out = []
        for _ in range(abs(k)):
            out.extend(base.letters)
        return Word.from_letters(self.alphabet_size, out)

    def commutator(self, other: "Word") -> "Word":
        return self.inverse() * other.inverse() * self * other

    def length(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def exponent_sums(self) -> tuple:
        out = [0] * self.alphabet_size
        for g, e in self.letters:
            out[g] += e
        return tuple(out)


def _free_reduce(letters):
    stack = []
    for g, e in letters:
        if e == 0:
            continue
        if stack and stack[-1][0] == g:
            merged = stack[-1][1] + e
            stack.pop()
            if merged:
                stack.append((g, merged))
        else:
            stack.append((g, e))
    return tuple(stack)


def reduce(w: Word) -> Word:
    """Freely reduced normal form (idempotent; Word is already reduced)."""
    return Word.from_letters(w.alphabet_size, w.letters)


# ---------------------------------------------------------------------------
# text syntax: letters a..z, optional ^k, juxtaposition or '*' for products,
# nested [u,v] commutator brackets


DEFAULT_NAMES = tuple(chr(ord("a") + i) for i in range(26))


def parse_word(text: str, names=None, alphabet_size=None) -> Word:
    """Parse the CLI/JSON word syntax.

    `names` maps position -> generator name; default is a..z.  The
    alphabet size defaults to len(names) when given explicitly, else to
    the highest letter used.
    """
    if names is None:
        table = {ch: i for i, ch in enumerate(DEFAULT_NAMES)}
        explicit = False
    else:
        table = {ch: i for i, ch in enumerate(names)}
        explicit = True

    pos = 0
    n = len(text)

    def skip_sep():
        nonlocal pos
        while pos < n and (text[pos].isspace() or text[pos] == "*"):
            pos += 1

    def parse_int():
        nonlocal pos
        start = pos
        if pos < n and text[pos] in "+-":
            pos += 1
        while pos < n and text[pos].isdigit():
            pos += 1
        if pos == start or text[start:pos] in ("+", "-"):
            raise ValueError(f"expected integer at position {start} in {text!r}")
        return int(text[start:pos])

    def parse_factors(stop_chars):
        nonlocal pos
        letters = []
        while True:
            skip_sep()
            if pos >= n or text[pos] in stop_chars:
                return letters
            ch = text[pos]
            if ch == "[":
                pos += 1
                u = parse_factors(",")
                if pos >= n or text[pos] != ",":
                    raise ValueError(f"expected ',' in commutator in {text!r}")
                pos += 1
                v = parse_factors("]")
                if pos >= n or text[pos] != "]":
                    raise ValueError(f"unclosed commutator in {text!r}")
                pos += 1
                wu = Word.from_letters(26, u)
                wv = Word.from_letters(26, v)
                base = list(wu.commutator(wv).letters)
            elif ch in table:
                pos += 1
                base = [(table[ch], 1)]
            else:
                raise ValueError(f"unexpected character {ch!r} in {text!r}")
            skip_sep()
            if pos < n and text[pos] == "^":
                pos += 1
                k = parse_int()
            else:
                k = 1
            if k != 0:
                w = Word.from_letters(26, base) ** k
                letters.extend(w.letters)

    letters = parse_factors("")
    if pos != n:
        raise ValueError(f"trailing input at position {pos} in {text!r}")
    if alphabet_size is None:
        if explicit:
            alphabet_size = len(table)
        else:
            alphabet_size = max((g for g, _ in letters), default=-1) + 1
    return Word.from_letters(alphabet_size, letters)


def word_to_text(w: Word, names=None) -> str:
    names = names or DEFAULT_NAMES
    parts = []
    for g, e in w.letters:
        parts.append(names[g] if e == 1 else f"{names[g]}^{e}")
    return "*".join(parts) if parts else "1"


# ---------------------------------------------------------------------------
# Hall basis


@dataclass(frozen=True)
class BasicCommutator:
    """Hall basic commutator: a generator leaf or a bracket of two basics."""

    weight: int
    left: "BasicCommutator | None" = None
    right: "BasicCommutator | None" = None
    gen: int = -1

    @staticmethod
    def leaf(g: int) -> "BasicCommutator":
        return BasicCommutator(1, gen=g)

    @staticmethod
    def bracket(u: "BasicCommutator", v: "BasicCommutator") -> "BasicCommutator":
        return BasicCommutator(u.weight + v.weight, left=u, right=v)

    def is_leaf(self) -> bool:
        return self.gen >= 0

    def encoding(self):
        if self.is_leaf():
            return (0, self.gen)
        return (1, self.left.encoding(), self.right.encoding())

    def sort_key(self):
        return (self.weight, self.encoding())

    def as_word(self, alphabet_size: int) -> Word:
        if self.is_leaf():
            return Word.generator(alphabet_size, self.gen)
        return self.left.as_word(alphabet_size).commutator(self.right.as_word(alphabet_size))

    def __str__(self):
        if self.is_leaf():
            return DEFAULT_NAMES[self.gen]
        return f"[{self.left},{self.right}]"


def hall_basis(rank: int, max_class: int):
    """Basic commutators grouped by weight, [weight 1 list, weight 2 list, ...].

    Hall condition under the fixed order (weight, then structure encoding):
    [u, v] is basic when u > v and, for u = [x, y], additionally y <= v.
    """
    if rank < 1 or max_class < 1:
        raise ValueError("rank and max_class must be >= 1")
    by_weight = [[BasicCommutator.leaf(g) for g in range(rank)]]
    for k in range(2, max_class + 1):
        level = []
        for wu in range(1, k):
            wv = k - wu
            for u in by_weight[wu - 1]:
                for v in by_weight[wv - 1]:
                    if u.sort_key() <= v.sort_key():
                        continue
                    if not u.is_leaf() and u.right.sort_key() > v.sort_key():
                        continue
                    level.append(BasicCommutator.bracket(u, v))
        level.sort(key=BasicCommutator.sort_key)
        by_weight.append(level)
    return by_weight


# ---------------------------------------------------------------------------
# Magnus expansion


@dataclass(frozen=True)
class MagnusSeries:
    """Truncated noncommutative power series with integer coefficients.

    Monomials are tuples of generator indices (the empty tuple is the
    constant term); only monomials of length <= truncation_degree are
    stored, and only with nonzero coefficients.
    """

    alphabet_size: int
    truncation_degree: int
    coeffs: tuple  # sorted tuple of (monomial, coefficient)

    @staticmethod
    def from_dict(alphabet_size: int, degree: int, d: dict) -> "MagnusSeries":
        items = tuple(sorted((m, c) for m, c in d.items() if c and len(m) <= degree))
        return MagnusSeries(alphabet_size, degree, items)

    @staticmethod
    def one(alphabet_size: int, degree: int) -> "MagnusSeries":
        return MagnusSeries.from_dict(alphabet_size, degree, {(): 1})

    @staticmethod
    def generator(alphabet_size: int, g: int, degree: int) -> "MagnusSeries":
        return MagnusSeries.from_dict(alphabet_size, degree, {(): 1, (g,): 1})

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def coefficient(self, monomial) -> int:
        return self.as_dict().get(tuple(monomial), 0)

    def constant_term(self) -> int:
        return self.coefficient(())

    def __mul__(self, other: "MagnusSeries") -> "MagnusSeries":
        d = self.truncation_degree
        out = {}
        other_items = other.coeffs
        for m1, c1 in self.coeffs:
            room = d - len(m1)
            for m2, c2 in other_items:
                if len(m2) > room:
                    continue
                key = m1 + m2
                out[key] = out.get(key, 0) + c1 * c2
        return MagnusSeries.from_dict(self.alphabet_size, d, out)

    def __add__(self, other: "MagnusSeries") -> "MagnusSeries":
        out = self.as_dict()
        for m, c in other.coeffs:
            out[m] = out.get(m, 0) + c
        return MagnusSeries.from_dict(self.alphabet_size, self.truncation_degree, out)

    def inverse(self) -> "MagnusSeries":
        """Inverse of a series with constant term 1 (geometric series)."""
        if self.constant_term() != 1:
            raise ValueError("only series with constant term 1 are invertible here")
        d = self.truncation_degree
        n = MagnusSeries.from_dict(self.alphabet_size, d,
                                   {m: -c for m, c in self.coeffs if m})
        out = MagnusSeries.one(self.alphabet_size, d)
        term = MagnusSeries.one(self.alphabet_size, d)
        for _ in range(d):
            term = term * n
            if not term.coeffs:
                break
            out = out + term
        return out

    def __pow__(self, k: int) -> "MagnusSeries":
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = MagnusSeries.one(self.alphabet_size, self.truncation_degree)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def min_positive_degree(self):
        degs = [len(m) for m, _ in self.coeffs if m]
        return min(degs) if degs else None


def magnus_expand(w: Word, d: int) -> MagnusSeries:
    """Magnus embedding x_i -> 1 + X_i, truncated at total degree d."""
    if d < 1:
        raise ValueError("truncation degree must be >= 1")
    out = MagnusSeries.one(w.alphabet_size, d)
    for g, e in w.letters:
        out = out * (MagnusSeries.generator(w.alphabet_size, g, d) ** e)
    return out


def lcs_weight(w: Word, max_class: int):
    """Lower-central depth detected by the Magnus expansion.

    Returns the smallest positive degree with a nonzero coefficient, the
    value max_class + 1 standing for "all coefficients vanish up to
    max_class", or math.inf for the empty word.
    """
    if w.is_empty():
        return math.inf
    s = magnus_expand(w, max_class)
    deg = s.min_positive_degree()
    return deg if deg is not None else max_class + 1
