"""Truncated series in the completed free associative algebra and its abelianization.

Words are tuples of 1-based generator indices; the empty tuple is the unit.
Coefficients are :class:`fractions.Fraction`. Every value carries its number
of generators ``n`` and truncation order ``trunc`` (the largest retained
degree), and binary operations refuse operands that disagree on either.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .errors import (
    DimensionMismatch,
    DivergentSubstitution,
    IndexOutOfRange,
    SeriesSyntaxError,
)

Word = tuple


def word_key(word):
    """Graded-lexicographic sort key."""
    return (len(word), word)


def words_of_degree(n, d):
    return [tuple(w) for w in product(range(1, n + 1), repeat=d)]


def words_up_to(n, N):
    out = []
    for d in range(N + 1):
        out.extend(words_of_degree(n, d))
    return out


def _check_word(word, n):
    for i in word:
        if not 1 <= i <= n:
            raise IndexOutOfRange(f"generator index {i} outside [1, {n}]")


class NCSeries:
    """Element of k<<x_1..x_n>> modulo words of degree > trunc."""

    __slots__ = ("n", "trunc", "_terms", "_hash")

    def __init__(self, n: int, trunc: int, terms: Mapping[tuple, object] | None = None):
        if n < 1:
            raise ValueError("need at least one generator")
        if trunc < 0:
            raise ValueError("truncation order must be nonnegative")
        self.n = n
        self.trunc = trunc
        clean = {}
        for word, coef in (terms or {}).items():
            word = tuple(word)
            _check_word(word, n)
            if len(word) > trunc:
                continue
            coef = Fraction(coef)
            if coef:
                clean[word] = clean.get(word, 0) + coef
                if not clean[word]:
                    del clean[word]
        self._terms = clean
        self._hash = None

    # constructors

    @classmethod
    def zero(cls, n, trunc):
        return cls(n, trunc)

    @classmethod
    def one(cls, n, trunc):
        return cls(n, trunc, {(): 1})

    @classmethod
    def gen(cls, i, n, trunc):
        return cls(n, trunc, {(i,): 1})

    @classmethod
    def _raw(cls, n, trunc, terms):
        obj = cls.__new__(cls)
        obj.n = n
        obj.trunc = trunc
        obj._terms = terms
        obj._hash = None
        return obj

    # inspection

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, word):
        return self._terms.get(tuple(word), Fraction(0))

    def is_zero(self):
        return not self._terms

    def constant_term(self):
        return self._terms.get((), Fraction(0))

    def homogeneous_part(self, d):
        return NCSeries._raw(self.n, self.trunc, {w: c for w, c in self._terms.items() if len(w) == d})

    def degree_parts(self):
        parts = {}
        for w, c in self._terms.items():
            parts.setdefault(len(w), {})[w] = c
        return parts

    def order(self):
        """Lowest degree present; None for zero."""
        return min((len(w) for w in self._terms), default=None)

    def max_degree(self):
        return max((len(w) for w in self._terms), default=None)

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda t: word_key(t[0]))

    def same_shape(self, other):
        if not isinstance(other, NCSeries):
            raise TypeError(f"expected NCSeries, got {type(other).__name__}")
        if (self.n, self.trunc) != (other.n, other.trunc):
            raise DimensionMismatch(
                f"operands differ: (n={self.n}, N={self.trunc}) vs (n={other.n}, N={other.trunc})"
            )

    # arithmetic

    def __add__(self, other):
        if not isinstance(other, NCSeries):
            return self + NCSeries(self.n, self.trunc, {(): other})
        self.same_shape(other)
        out = dict(self._terms)
        for w, c in other._terms.items():
            v = out.get(w, 0) + c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        return NCSeries._raw(self.n, self.trunc, out)

    __radd__ = __add__

    def __neg__(self):
        return NCSeries._raw(self.n, self.trunc, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return NCSeries.zero(self.n, self.trunc)
        return NCSeries._raw(self.n, self.trunc, {w: c * v for w, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, NCSeries):
            return self.scale(other)
        self.same_shape(other)
        N = self.trunc
        right = other.degree_parts()
        out = {}
        for u, a in self._terms.items():
            room = N - len(u)
            for d, part in right.items():
                if d > room:
                    continue
                for v, b in part.items():
                    w = u + v
                    val = out.get(w, 0) + a * b
                    if val:
                        out[w] = val
                    else:
                        del out[w]
        return NCSeries._raw(self.n, N, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k):
        result = NCSeries.one(self.n, self.trunc)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, NCSeries):
            return NotImplemented
        return (self.n, self.trunc, self._terms) == (other.n, other.trunc, other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.trunc, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"NCSeries(n={self.n}, N={self.trunc}, {series_format(self)!r})"

    def __str__(self):
        return series_format(self)

    def truncate(self, N):
        """Explicit projection to a lower truncation order."""
        if N > self.trunc:
            raise DimensionMismatch("cannot raise the truncation order of a truncated series")
        return NCSeries(self.n, N, {w: c for w, c in self._terms.items() if len(w) <= N})


def series_add(a: NCSeries, b: NCSeries) -> NCSeries:
    a.same_shape(b)
    return a + b


def series_mul(a: NCSeries, b: NCSeries) -> NCSeries:
    a.same_shape(b)
    return a * b


def series_commutator(a: NCSeries, b: NCSeries) -> NCSeries:
    a.same_shape(b)
    return a * b - b * a


def series_substitute(a: NCSeries, images: Sequence[NCSeries]) -> NCSeries:
    """Apply the continuous algebra map ``x_i -> images[i-1]`` to ``a``."""
    if len(images) != a.n:
        raise DimensionMismatch(f"need {a.n} images, got {len(images)}")
    for i, img in enumerate(images, 1):
        a.same_shape(img)
        if img.constant_term():
            raise DivergentSubstitution(f"image of x{i} has nonzero constant term {img.constant_term()}")
    n, N = a.n, a.trunc
    cache = {(): NCSeries.one(n, N)}

    def power_product(word):
        hit = cache.get(word)
        if hit is None:
            hit = power_product(word[:-1]) * images[word[-1] - 1]
            cache[word] = hit
        return hit

    out = {}
    for word, coef in a.sorted_terms():
        for w, c in power_product(word).items():
            v = out.get(w, 0) + coef * c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
    return NCSeries._raw(n, N, out)


# commutative quotient


def exponent_of(word, n):
    exps = [0] * n
    for i in word:
        exps[i - 1] += 1
    return tuple(exps)


def monomial_key(exps):
    """Graded order on exponent vectors, lexicographic on the sorted letter word."""
    word = tuple(i + 1 for i, e in enumerate(exps) for _ in range(e))
    return (len(word), word)


def monomials_of_degree(n, d):
    if n == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return sorted(out, key=monomial_key)


class CommSeries:
    """Element of k[[x_1..x_n]] modulo total degree > trunc."""

    __slots__ = ("n", "trunc", "_terms")

    def __init__(self, n, trunc, terms=None):
        self.n = n
        self.trunc = trunc
        clean = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != n or any(e < 0 for e in exps):
                raise IndexOutOfRange(f"bad exponent vector {exps} for n={n}")
            if sum(exps) > trunc:
                continue
            coef = Fraction(coef)
            if coef:
                v = clean.get(exps, 0) + coef
                if v:
                    clean[exps] = v
                else:
                    clean.pop(exps, None)
        self._terms = clean

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, exps):
        return self._terms.get(tuple(exps), Fraction(0))

    def is_zero(self):
        return not self._terms

    def constant_term(self):
        return self._terms.get((0,) * self.n, Fraction(0))

    def same_shape(self, other):
        if (self.n, self.trunc) != (other.n, other.trunc):
            raise DimensionMismatch("commutative series differ in n or N")

    def __add__(self, other):
        self.same_shape(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return CommSeries(self.n, self.trunc, out)

    def __neg__(self):
        return CommSeries(self.n, self.trunc, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, CommSeries):
            return CommSeries(self.n, self.trunc, {e: c * Fraction(other) for e, c in self._terms.items()})
        self.same_shape(other)
        out = {}
        for e1, c1 in self._terms.items():
            d1 = sum(e1)
            for e2, c2 in other._terms.items():
                if d1 + sum(e2) > self.trunc:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return CommSeries(self.n, self.trunc, out)

    def __eq__(self, other):
        if not isinstance(other, CommSeries):
            return NotImplemented
        return (self.n, self.trunc, self._terms) == (other.n, other.trunc, other._terms)

    def __hash__(self):
        return hash((self.n, self.trunc, frozenset(self._terms.items())))

    def __repr__(self):
        return f"CommSeries(n={self.n}, N={self.trunc}, {comm_format(self)!r})"

    def __str__(self):
        return comm_format(self)


def comm_substitute(a: CommSeries, images: Sequence[CommSeries]) -> CommSeries:
    if len(images) != a.n:
        raise DimensionMismatch(f"need {a.n} images, got {len(images)}")
    for img in images:
        a.same_shape(img)
        if img.constant_term():
            raise DivergentSubstitution("image with nonzero constant term")
    one = CommSeries(a.n, a.trunc, {(0,) * a.n: 1})
    powers = [[one] for _ in range(a.n)]
    out = CommSeries(a.n, a.trunc)
    for exps, coef in a.items():
        term = one * coef
        for i, e in enumerate(exps):
            while len(powers[i]) <= e:
                powers[i].append(powers[i][-1] * images[i])
            term = term * powers[i][e]
        out = out + term
    return out


def series_abelianize(a: NCSeries) -> CommSeries:
    out = {}
    for word, coef in a.items():
        e = exponent_of(word, a.n)
        out[e] = out.get(e, 0) + coef
    return CommSeries(a.n, a.trunc, out)


# text format

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<gen>x)|(?P<op>[-+*/^]))")


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            offset = len(text[pos:]) - len(text[pos:].lstrip())
            raise SeriesSyntaxError(f"unexpected character {text[pos + offset]!r}", pos + offset)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, n):
        self.tokens = _tokenize(text)
        self.i = 0
        self.n = n

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind, value=None):
        tok = self.tokens[self.i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise SeriesSyntaxError(f"expected {want!r}, found {got!r}", tok[2])
        self.i += 1
        return tok

    def integer(self):
        return int(self.take("num")[1])

    def factor(self):
        self.take("gen")
        tok = self.peek()
        if tok[0] != "num":
            raise SeriesSyntaxError("generator needs an index, e.g. x1", tok[2])
        index = self.integer()
        if not 1 <= index <= self.n:
            raise IndexOutOfRange(f"x{index} outside [1, {self.n}] (at position {tok[2]})")
        power = 1
        if self.peek()[:2] == ("op", "^"):
            self.i += 1
            power = self.integer()
        return (index,) * power

    def term(self):
        coef = Fraction(1)
        word = ()
        tok = self.peek()
        if tok[0] == "num":
            num = self.integer()
            den = 1
            if self.peek()[:2] == ("op", "/"):
                self.i += 1
                den_tok = self.peek()
                den = self.integer()
                if den == 0:
                    raise SeriesSyntaxError("zero denominator", den_tok[2])
            coef = Fraction(num, den)
            if self.peek()[:2] != ("op", "*"):
                return coef, word
            self.i += 1
            word = self.factor()
        elif tok[0] == "gen":
            word = self.factor()
        else:
            raise SeriesSyntaxError(f"expected a term, found {tok[1] or 'end of input'!r}", tok[2])
        while self.peek()[:2] == ("op", "*"):
            self.i += 1
            word = word + self.factor()
        return coef, word

    def expression(self):
        terms = []
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            self.i += 1
        while True:
            coef, word = self.term()
            terms.append((sign * coef, word))
            tok = self.peek()
            if tok[0] == "end":
                return terms
            if tok[0] == "op" and tok[1] in "+-":
                sign = -1 if tok[1] == "-" else 1
                self.i += 1
                continue
            raise SeriesSyntaxError(f"unexpected {tok[1]!r}", tok[2])


def parse_terms(text: str, n: int):
    """Parse to a list of (coefficient, word) pairs without truncating."""
    return _Parser(text, n).expression()


def series_parse(text: str, n: int, N: int) -> NCSeries:
    """Parse the textual series grammar; words above degree N are projected away."""
    out = {}
    for coef, word in parse_terms(text, n):
        out[word] = out.get(word, 0) + coef
    return NCSeries(n, N, out)


def format_rational(c):
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_word(word, var="x"):
    """Runs of a repeated letter are written with ^ (k-fold concatenation)."""
    if not word:
        return ""
    parts = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        run = j - i
        parts.append(f"{var}{word[i]}" + (f"^{run}" if run > 1 else ""))
        i = j
    return "*".join(parts)


def join_terms(pieces):
    """Join (coefficient, monomial-text) pairs into a signed sum."""
    if not pieces:
        return "0"
    chunks = []
    for idx, (coef, mono) in enumerate(pieces):
        neg = coef < 0
        mag = -coef if neg else coef
        if not mono:
            body = format_rational(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_rational(mag)}*{mono}"
        if idx == 0:
            chunks.append(("-" if neg else "") + body)
        else:
            chunks.append((" - " if neg else " + ") + body)
    return "".join(chunks)


def series_format(a: NCSeries) -> str:
    return join_terms([(c, format_word(w)) for w, c in a.sorted_terms()])


def comm_format(a: CommSeries) -> str:
    pieces = []
    for exps, c in sorted(a.items(), key=lambda t: monomial_key(t[0])):
        mono = "*".join(
            f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e
        )
        pieces.append((c, mono))
    return join_terms(pieces)


def random_series(rng, n, N, *, min_degree=0, max_degree=None, density=0.5, coeff_range=3):
    """Sparse random series with small integer-over-small-integer coefficients."""
    max_degree = N if max_degree is None else max_degree
    terms = {}
    for d in range(min_degree, max_degree + 1):
        for w in words_of_degree(n, d):
            if rng.random() < density:
                num = rng.randint(-coeff_range, coeff_range)
                terms[w] = Fraction(num, rng.choice((1, 1, 2, 3)))
    return NCSeries(n, N, terms)


def linear_part(a: NCSeries):
    return [a.coeff((j,)) for j in range(1, a.n + 1)]
