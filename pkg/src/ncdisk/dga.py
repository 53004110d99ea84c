"""Polynomial forms on an affine chart tensored with the free algebra on the fiber.

An element is a finite sum of terms ``c * b^e * db_I * xi_w`` stored as a map
``(I, w, e) -> Fraction`` where ``I`` is a strictly increasing tuple of form
indices, ``w`` a fiber word and ``e`` an exponent vector. Forms commute with
fiber letters; the only sign comes from reordering the ``db``'s. Every element
carries a fiber bound and a base bound (``None`` means unbounded), and products
drop terms outside the box.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping

from .errors import DimensionMismatch, IndexOutOfRange, SeriesSyntaxError
from .ncseries import format_word, join_terms


def merge_forms(a, b):
    """Wedge of two sorted index tuples: (sign, merged) or (0, None)."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    if set(a) & set(b):
        return 0, None
    inversions = sum(1 for x in a for y in b if x > y)
    return (-1 if inversions % 2 else 1), tuple(sorted(a + b))


def _fits(bound, deg):
    return bound is None or deg <= bound


def _add_exps(e, f):
    return tuple(x + y for x, y in zip(e, f))


class DGAElement:
    """Element of Omega^*[b_1..b_m] tensor T(xi_1..xi_m), truncated to a box."""

    __slots__ = ("m", "fiber_trunc", "base_trunc", "_terms")

    def __init__(self, m: int, fiber_trunc, base_trunc, terms: Mapping | None = None):
        if m < 1:
            raise ValueError("need at least one base variable")
        self.m = m
        self.fiber_trunc = fiber_trunc
        self.base_trunc = base_trunc
        clean = {}
        for (forms, word, exps), c in (terms or {}).items():
            forms, word, exps = tuple(forms), tuple(word), tuple(exps)
            if len(exps) != m:
                raise DimensionMismatch(f"exponent vector {exps} for {m} base variables")
            for i in forms + word:
                if not 1 <= i <= m:
                    raise IndexOutOfRange(f"index {i} outside [1, {m}]")
            if list(forms) != sorted(set(forms)):
                raise ValueError(f"form indices {forms} must be strictly increasing")
            if not (_fits(fiber_trunc, len(word)) and _fits(base_trunc, sum(exps))):
                continue
            key = (forms, word, exps)
            v = clean.get(key, 0) + Fraction(c)
            if v:
                clean[key] = v
            else:
                clean.pop(key, None)
        self._terms = clean

    @classmethod
    def _raw(cls, m, N, B, terms):
        obj = cls.__new__(cls)
        obj.m, obj.fiber_trunc, obj.base_trunc, obj._terms = m, N, B, terms
        return obj

    # constructors

    @classmethod
    def zero(cls, m, N=None, B=None):
        return cls._raw(m, N, B, {})

    @classmethod
    def const(cls, c, m, N=None, B=None):
        return cls(m, N, B, {((), (), (0,) * m): c})

    @classmethod
    def b(cls, i, m, N=None, B=None):
        return cls(m, N, B, {((), (), _unit(i, m)): 1})

    @classmethod
    def db(cls, i, m, N=None, B=None):
        return cls(m, N, B, {((i,), (), (0,) * m): 1})

    @classmethod
    def xi(cls, i, m, N=None, B=None):
        return cls(m, N, B, {((), (i,), (0,) * m): 1})

    # access

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, forms, word, exps):
        return self._terms.get((tuple(forms), tuple(word), tuple(exps)), Fraction(0))

    def is_zero(self):
        return not self._terms

    def form_degrees(self):
        return sorted({len(k[0]) for k in self._terms})

    def form_part(self, p):
        return self._filter(lambda f, w, e: len(f) == p)

    def fiber_part(self, d):
        return self._filter(lambda f, w, e: len(w) == d)

    def window(self, fiber_max, base_max):
        """Terms with fiber degree <= fiber_max and base degree <= base_max."""
        return self._filter(lambda f, w, e: len(w) <= fiber_max and sum(e) <= base_max)

    def _filter(self, keep):
        return DGAElement._raw(
            self.m, self.fiber_trunc, self.base_trunc,
            {k: c for k, c in self._terms.items() if keep(*k)},
        )

    def coefficient_of(self, forms, word):
        """The base polynomial in front of ``db_forms * xi_word``."""
        forms, word = tuple(forms), tuple(word)
        return BasePoly(self.m, {e: c for (f, w, e), c in self._terms.items() if f == forms and w == word})

    def grouped(self):
        """``{(forms, word): BasePoly}``."""
        out = {}
        for (f, w, e), c in self._terms.items():
            out.setdefault((f, w), {})[e] = c
        return {k: BasePoly(self.m, v) for k, v in out.items()}

    def max_fiber_degree(self):
        return max((len(k[1]) for k in self._terms), default=-1)

    def max_base_degree(self):
        return max((sum(k[2]) for k in self._terms), default=-1)

    def with_box(self, N, B):
        return DGAElement(self.m, N, B, self._terms)

    # arithmetic

    def _check(self, other):
        if not isinstance(other, DGAElement):
            raise TypeError(f"cannot combine DGAElement with {type(other).__name__}")
        if self.m != other.m:
            raise DimensionMismatch(f"chart dimensions differ ({self.m} vs {other.m})")
        if (self.fiber_trunc, self.base_trunc) != (other.fiber_trunc, other.base_trunc):
            raise DimensionMismatch(
                f"truncation boxes differ ({self.fiber_trunc}, {self.base_trunc}) vs "
                f"({other.fiber_trunc}, {other.base_trunc})"
            )

    def __add__(self, other):
        self._check(other)
        out = dict(self._terms)
        _accumulate(out, other._terms, 1)
        return DGAElement._raw(self.m, self.fiber_trunc, self.base_trunc, out)

    def __sub__(self, other):
        self._check(other)
        out = dict(self._terms)
        _accumulate(out, other._terms, -1)
        return DGAElement._raw(self.m, self.fiber_trunc, self.base_trunc, out)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return DGAElement.zero(self.m, self.fiber_trunc, self.base_trunc)
        return DGAElement._raw(
            self.m, self.fiber_trunc, self.base_trunc, {k: v * c for k, v in self._terms.items()}
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        return DGAElement._raw(
            self.m, self.fiber_trunc, self.base_trunc,
            mul_terms(self._terms, other._terms, self.fiber_trunc, self.base_trunc),
        )

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, DGAElement):
            return NotImplemented
        return (
            self.m == other.m
            and (self.fiber_trunc, self.base_trunc) == (other.fiber_trunc, other.base_trunc)
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.m, self.fiber_trunc, self.base_trunc, frozenset(self._terms.items())))

    def __repr__(self):
        return f"DGAElement({dga_format(self)!r}, m={self.m}, N={self.fiber_trunc}, B={self.base_trunc})"

    def __str__(self):
        return dga_format(self)


def _unit(i, m):
    if not 1 <= i <= m:
        raise IndexOutOfRange(f"index {i} outside [1, {m}]")
    return tuple(int(k == i - 1) for k in range(m))


def _accumulate(target, source, sign):
    for k, c in source.items():
        v = target.get(k, 0) + sign * c
        if v:
            target[k] = v
        else:
            target.pop(k, None)


def mul_terms(a, b, N, B):
    out = {}
    for (f1, w1, e1), c1 in a.items():
        for (f2, w2, e2), c2 in b.items():
            if N is not None and len(w1) + len(w2) > N:
                continue
            e = _add_exps(e1, e2)
            if B is not None and sum(e) > B:
                continue
            sign, f = merge_forms(f1, f2)
            if not sign:
                continue
            key = (f, w1 + w2, e)
            v = out.get(key, 0) + sign * c1 * c2
            if v:
                out[key] = v
            else:
                del out[key]
    return out


def de_rham_terms(terms, m, B=None):
    """Exterior derivative on the base: d(p db_I) = sum_i dp/db_i db_i ^ db_I."""
    out = {}
    for (f, w, e), c in terms.items():
        for i in range(m):
            if not e[i]:
                continue
            sign, merged = merge_forms((i + 1,), f)
            if not sign:
                continue
            ne = e[:i] + (e[i] - 1,) + e[i + 1 :]
            key = (merged, w, ne)
            v = out.get(key, 0) + sign * c * e[i]
            if v:
                out[key] = v
            else:
                del out[key]
    return out


def leibniz_terms(terms, images, N=None, B=None):
    """Apply the fiber derivation ``xi_k -> images[k-1]`` letter by letter.

    ``images`` are form-0 term maps; forms and base coefficients ride along.
    Input words may exceed the box, only the output is truncated.
    """
    prepared = [
        [(len(xw), sum(xe), xw, xe, xc) for (_, xw, xe), xc in img.items()] for img in images
    ]
    out = {}
    for (f, w, e), c in terms.items():
        room_fiber = None if N is None else N - len(w) + 1
        room_base = None if B is None else B - sum(e)
        for pos, letter in enumerate(w):
            prefix, suffix = w[:pos], w[pos + 1 :]
            for xlen, xdeg, xw, xe, xc in prepared[letter - 1]:
                if room_fiber is not None and xlen > room_fiber:
                    continue
                if room_base is not None and xdeg > room_base:
                    continue
                key = (f, prefix + xw + suffix, _add_exps(e, xe))
                out[key] = out.get(key, 0) + c * xc
    return {k: v for k, v in out.items() if v}


def base_derivative_terms(terms, i):
    """Partial derivative in b_i (1-based) of every coefficient."""
    out = {}
    for (f, w, e), c in terms.items():
        k = e[i - 1]
        if k:
            ne = e[: i - 1] + (k - 1,) + e[i:]
            key = (f, w, ne)
            out[key] = out.get(key, 0) + c * k
    return {k: v for k, v in out.items() if v}


class BasePoly:
    """Polynomial in the base variables b_1..b_m with rational coefficients."""

    __slots__ = ("m", "_terms")

    def __init__(self, m, terms=None):
        self.m = m
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != m:
                raise DimensionMismatch(f"exponent vector {e} for {m} base variables")
            c = Fraction(c)
            if c:
                clean[e] = clean.get(e, 0) + c
        self._terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def var(cls, i, m):
        return cls(m, {_unit(i, m): 1})

    @classmethod
    def const(cls, c, m):
        return cls(m, {(0,) * m: c})

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self):
        return not self._terms

    def degree(self):
        return max((sum(e) for e in self._terms), default=-1)

    def constant_term(self):
        return self._terms.get((0,) * self.m, Fraction(0))

    def coeff(self, exps):
        return self._terms.get(tuple(exps), Fraction(0))

    def truncate(self, B):
        return BasePoly(self.m, {e: c for e, c in self._terms.items() if sum(e) <= B})

    def __add__(self, other):
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return BasePoly(self.m, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        return BasePoly(self.m, {e: v * c for e, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = _add_exps(e1, e2)
                out[e] = out.get(e, 0) + c1 * c2
        return BasePoly(self.m, out)

    __rmul__ = __mul__

    def derivative(self, i):
        out = {}
        for e, c in self._terms.items():
            if e[i - 1]:
                ne = e[: i - 1] + (e[i - 1] - 1,) + e[i:]
                out[ne] = out.get(ne, 0) + c * e[i - 1]
        return BasePoly(self.m, out)

    def evaluate(self, point):
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for x, k in zip(point, e):
                term *= Fraction(x) ** k
            total += term
        return total

    def as_element(self, N=None, B=None):
        return DGAElement(self.m, N, B, {((), (), e): c for e, c in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, BasePoly):
            return NotImplemented
        return self.m == other.m and self._terms == other._terms

    def __hash__(self):
        return hash((self.m, frozenset(self._terms.items())))

    def __repr__(self):
        return f"BasePoly({poly_format(self)!r})"

    def __str__(self):
        return poly_format(self)

    @classmethod
    def parse(cls, text, m):
        el = dga_parse(text, m)
        if any(f or w for f, w, _ in el._terms):
            raise SeriesSyntaxError("base polynomial may only contain b variables and numbers", 0)
        return cls(m, {e: c for (_, _, e), c in el.items()})


class BaseForm:
    """Polynomial differential form on the chart; ``terms`` maps index tuples to BasePoly."""

    __slots__ = ("m", "_el")

    def __init__(self, m, terms=None):
        raw = {}
        for forms, poly in (terms or {}).items():
            forms = tuple(forms)
            if list(forms) != sorted(set(forms)):
                raise ValueError(f"form indices {forms} must be strictly increasing")
            if not isinstance(poly, BasePoly):
                poly = BasePoly.const(poly, m)
            for e, c in poly.items():
                raw[(forms, (), e)] = c
        self.m = m
        self._el = DGAElement(m, None, None, raw)

    @classmethod
    def from_element(cls, el):
        if any(w for _, w, _ in el._terms):
            raise ValueError("element has fiber letters")
        form = cls.__new__(cls)
        form.m = el.m
        form._el = DGAElement(el.m, None, None, el.terms)
        return form

    @property
    def element(self):
        return self._el

    @property
    def terms(self):
        return {f: p for (f, _), p in self._el.grouped().items()}

    def degrees(self):
        return self._el.form_degrees()

    def is_zero(self):
        return self._el.is_zero()

    def __add__(self, other):
        return BaseForm.from_element(self._el + other._el)

    def __sub__(self, other):
        return BaseForm.from_element(self._el - other._el)

    def __mul__(self, other):
        return BaseForm.from_element(self._el * other._el)

    def __eq__(self, other):
        return isinstance(other, BaseForm) and self._el == other._el

    def __hash__(self):
        return hash(self._el)

    def __repr__(self):
        return f"BaseForm({dga_format(self._el)!r})"

    def __str__(self):
        return dga_format(self._el)

    @classmethod
    def parse(cls, text, m):
        return cls.from_element(dga_parse(text, m))


# text format: sums of factors b<i>[^k], db<i>, x<i>[^k], rationals, (groups)

_DGA_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>db|b|x)|(?P<op>[-+*/^()]))")


def _dga_tokenize(text):
    pos, tokens = 0, []
    while pos < len(text):
        if not text[pos:].strip():
            break
        m = _DGA_TOKEN.match(text, pos)
        if not m:
            at = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise SeriesSyntaxError(f"unexpected character {text[at]!r}", at)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _DGAParser:
    def __init__(self, text, m):
        self.tokens = _dga_tokenize(text)
        self.i = 0
        self.m = m

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind, value=None):
        tok = self.tokens[self.i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            got = tok[1] or "end of input"
            raise SeriesSyntaxError(f"expected {value or kind!r}, found {got!r}", tok[2])
        self.i += 1
        return tok

    def at_op(self, op):
        return self.peek()[:2] == ("op", op)

    def index(self):
        tok = self.peek()
        if tok[0] != "num":
            raise SeriesSyntaxError("variable needs an index", tok[2])
        self.i += 1
        idx = int(tok[1])
        if not 1 <= idx <= self.m:
            raise IndexOutOfRange(f"index {idx} outside [1, {self.m}] (at position {tok[2]})")
        return idx

    def expression(self):
        total = DGAElement.zero(self.m)
        sign = 1
        if self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = -1 if self.take("op")[1] == "-" else 1
        while True:
            total = total + self.term().scale(sign)
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                sign = -1 if tok[1] == "-" else 1
                self.i += 1
                continue
            return total

    def term(self):
        value = self.factor()
        while self.at_op("*"):
            self.i += 1
            value = value * self.factor()
        return value

    def factor(self):
        tok = self.peek()
        m = self.m
        if tok[0] == "num":
            num = int(self.take("num")[1])
            den = 1
            if self.at_op("/"):
                self.i += 1
                den_tok = self.take("num")
                den = int(den_tok[1])
                if den == 0:
                    raise SeriesSyntaxError("zero denominator", den_tok[2])
            return DGAElement.const(Fraction(num, den), m)
        if tok[:2] == ("op", "("):
            self.i += 1
            inner = self.expression()
            self.take("op", ")")
            return inner
        if tok[0] == "var":
            self.i += 1
            idx = self.index()
            if tok[1] == "db":
                value = DGAElement.db(idx, m)
                # db1^db2 is the wedge product
                while self.at_op("^") and self.tokens[self.i + 1][1] == "db":
                    self.i += 2
                    value = value * DGAElement.db(self.index(), m)
                return value
            base = DGAElement.b(idx, m) if tok[1] == "b" else DGAElement.xi(idx, m)
            power = 1
            if self.at_op("^"):
                self.i += 1
                power = int(self.take("num")[1])
            value = DGAElement.const(1, m)
            for _ in range(power):
                value = value * base
            return value
        raise SeriesSyntaxError(f"expected a factor, found {tok[1] or 'end of input'!r}", tok[2])


def dga_parse(text: str, m: int, N=None, B=None) -> DGAElement:
    """Parse sums such as ``(3/2*b1^2 - 1)*db1^db2*x1*x2``; fiber letters are ``x<i>``."""
    parser = _DGAParser(text, m)
    if parser.peek()[0] == "end":
        raise SeriesSyntaxError("empty expression", 0)
    value = parser.expression()
    tok = parser.peek()
    if tok[0] != "end":
        raise SeriesSyntaxError(f"unexpected {tok[1]!r}", tok[2])
    return value.with_box(N, B)


def _mono_text(exps):
    return "*".join(f"b{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(exps) if k)


def _poly_key(exps):
    return (sum(exps), tuple(-k for k in exps))


def poly_format(p: BasePoly) -> str:
    return join_terms([(c, _mono_text(e)) for e, c in sorted(p.items(), key=lambda t: _poly_key(t[0]))])


def _tail_text(forms, word):
    parts = []
    if forms:
        parts.append("^".join(f"db{i}" for i in forms))
    if word:
        parts.append(format_word(word))
    return "*".join(parts)


def dga_format(el: DGAElement) -> str:
    groups = el.grouped()
    if not groups:
        return "0"
    order = sorted(groups, key=lambda k: (len(k[0]), k[0], len(k[1]), k[1]))
    pieces = []
    for forms, word in order:
        poly = groups[(forms, word)]
        tail = _tail_text(forms, word)
        items = list(poly.items())
        if len(items) == 1:
            e, c = items[0]
            mono = "*".join(s for s in (_mono_text(e), tail) if s)
            pieces.append((c, mono))
        elif not tail:
            pieces.extend((c, _mono_text(e)) for e, c in sorted(items, key=lambda t: _poly_key(t[0])))
        else:
            pieces.append((Fraction(1), f"({poly_format(poly)})*{tail}"))
    return join_terms(pieces)
