"""Derivations of the truncated free algebra: Leibniz action, bracket, exponential."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Sequence

from .autgrp import NCAutomorphism
from .errors import DimensionMismatch, NonNilpotentAtTruncation
from .linalg import rank
from .ncseries import NCSeries, series_format, series_parse, words_of_degree


class NCDerivation:
    """Derivation fixed by the images of the generators.

    Constant terms are allowed (these are the directions outside the augmented
    subalgebra); a derivation of weight m sends degree d into degree d + m.
    """

    __slots__ = ("n", "trunc", "images")

    def __init__(self, images: Sequence[NCSeries]):
        images = tuple(images)
        if not images:
            raise DimensionMismatch("need at least one image")
        n, N = images[0].n, images[0].trunc
        if len(images) != n:
            raise DimensionMismatch(f"{len(images)} images for {n} generators")
        for img in images:
            images[0].same_shape(img)
        self.n, self.trunc, self.images = n, N, images

    @classmethod
    def zero(cls, n, trunc):
        return cls([NCSeries.zero(n, trunc)] * n)

    @classmethod
    def elementary(cls, i, word, n, trunc):
        """``x_i -> word``, every other generator -> 0."""
        return cls([NCSeries(n, trunc, {tuple(word): 1} if j == i else {}) for j in range(1, n + 1)])

    def is_augmented(self):
        return all(not img.constant_term() for img in self.images)

    def weight_component(self, m):
        return NCDerivation([img.homogeneous_part(m + 1) for img in self.images])

    def weights(self):
        return sorted({len(w) - 1 for img in self.images for w, _ in img.items()})

    def __add__(self, other):
        self._check(other)
        return NCDerivation([a + b for a, b in zip(self.images, other.images)])

    def __sub__(self, other):
        self._check(other)
        return NCDerivation([a - b for a, b in zip(self.images, other.images)])

    def __neg__(self):
        return NCDerivation([-a for a in self.images])

    def scale(self, c):
        return NCDerivation([a.scale(c) for a in self.images])

    def _check(self, other):
        if (self.n, self.trunc) != (other.n, other.trunc):
            raise DimensionMismatch("derivations differ in n or N")

    def __eq__(self, other):
        return isinstance(other, NCDerivation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __call__(self, a):
        return der_apply(self, a)

    def __repr__(self):
        return f"NCDerivation({self.to_strings()!r}, N={self.trunc})"

    def to_strings(self):
        return [series_format(img) for img in self.images]

    @classmethod
    def from_strings(cls, texts, n, trunc):
        return cls([series_parse(t, n, trunc) for t in texts])


def der_apply(delta: NCDerivation, a: NCSeries) -> NCSeries:
    """Leibniz extension: each letter of each word is replaced in turn."""
    if (delta.n, delta.trunc) != (a.n, a.trunc):
        raise DimensionMismatch("derivation and series differ in n or N")
    N = a.trunc
    out = {}
    for word, coef in a.items():
        for pos, letter in enumerate(word):
            prefix, suffix = word[:pos], word[pos + 1 :]
            room = N - len(prefix) - len(suffix)
            for w, c in delta.images[letter - 1].items():
                if len(w) > room:
                    continue
                key = prefix + w + suffix
                v = out.get(key, 0) + coef * c
                if v:
                    out[key] = v
                else:
                    del out[key]
    return NCSeries._raw(a.n, N, out)


def der_bracket(delta: NCDerivation, eps: NCDerivation) -> NCDerivation:
    delta._check(eps)
    return NCDerivation(
        [der_apply(delta, e) - der_apply(eps, d) for d, e in zip(delta.images, eps.images)]
    )


def der_exp(delta: NCDerivation) -> NCAutomorphism:
    """``exp(delta)`` as an automorphism, summing ``delta^m(x_i) / m!`` until it vanishes.

    Requires zero constant terms and a nilpotent linear part, which together
    make ``delta`` nilpotent on the truncated algebra.
    """
    check_exponentiable(delta)
    n, N = delta.n, delta.trunc
    images = []
    for i in range(1, n + 1):
        term = NCSeries.gen(i, n, N)
        total = term
        m = 0
        while not term.is_zero():
            m += 1
            term = der_apply(delta, term)
            total = total + term.scale(Fraction(1, factorial(m)))
        images.append(total)
    return NCAutomorphism(images, check=False)


def _linear_nilpotent(delta):
    n = delta.n
    mat = [[delta.images[i].coeff((j,)) for j in range(1, n + 1)] for i in range(n)]
    power = mat
    for _ in range(n):
        power = [[sum(power[i][k] * mat[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return all(not x for row in power for x in row)


def check_exponentiable(delta: NCDerivation):
    if not delta.is_augmented():
        raise NonNilpotentAtTruncation("derivation has a constant term")
    if not _linear_nilpotent(delta):
        raise NonNilpotentAtTruncation("linear part of the derivation is not nilpotent")


def der_graded_dim(n: int, m: int) -> int:
    """Dimension of the weight-m derivations, by enumerating a spanning set.

    Every pair (generator slot, word of length m+1) gives an elementary
    derivation; the count is the rank of their images on the generators.
    """
    if m < 0:
        raise ValueError("weight must be nonnegative")
    d = m + 1
    words = words_of_degree(n, d)
    index = {w: k for k, w in enumerate(words)}
    vectors = []
    for i in range(1, n + 1):
        for w in words:
            der = NCDerivation.elementary(i, w, n, d)
            vec = {}
            for slot, img in enumerate(der.images):
                for word, c in img.items():
                    vec[slot * len(words) + index[word]] = c
            vectors.append(vec)
    return rank(vectors)
