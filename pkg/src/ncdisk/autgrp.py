"""Augmented automorphisms of the truncated noncommutative disk and their abelianization."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch, NonzeroConstantTerm, SingularLinearPart
from .ncseries import (
    CommSeries,
    NCSeries,
    comm_format,
    comm_substitute,
    series_abelianize,
    series_format,
    random_series,
    series_parse,
    series_substitute,
)


def invert_matrix(rows):
    """Exact Gauss-Jordan inverse; raises SingularLinearPart."""
    size = len(rows)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(size)] for i, row in enumerate(rows)]
    for col in range(size):
        piv = next((r for r in range(col, size) if aug[r][col]), None)
        if piv is None:
            raise SingularLinearPart("linear part is not invertible")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(size):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[size:] for row in aug]


def _linear_matrix(images, n):
    # row i holds the degree-one coefficients of images[i]
    return [[img.coeff((j,)) for j in range(1, n + 1)] for img in images]


class NCAutomorphism:
    """``x_i -> images[i-1]``: zero constant terms, invertible linear part.

    Acts on series by substitution, so ``g(a) = series_substitute(a, g.images)``.
    """

    __slots__ = ("n", "trunc", "images", "linear_part")

    def __init__(self, images: Sequence[NCSeries], *, check=True):
        images = tuple(images)
        if not images:
            raise DimensionMismatch("need at least one image")
        n, N = images[0].n, images[0].trunc
        if len(images) != n:
            raise DimensionMismatch(f"{len(images)} images for {n} generators")
        for img in images:
            images[0].same_shape(img)
        self.n, self.trunc, self.images = n, N, images
        self.linear_part = _linear_matrix(images, n)
        if check:
            for i, img in enumerate(images, 1):
                if img.constant_term():
                    raise NonzeroConstantTerm(f"image of x{i} has constant term {img.constant_term()}")
            invert_matrix(self.linear_part)

    @classmethod
    def identity(cls, n, trunc):
        return cls([NCSeries.gen(i, n, trunc) for i in range(1, n + 1)])

    def __call__(self, a: NCSeries) -> NCSeries:
        return series_substitute(a, self.images)

    def __eq__(self, other):
        return isinstance(other, NCAutomorphism) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"NCAutomorphism({self.to_strings()!r}, N={self.trunc})"

    def to_strings(self):
        return [series_format(img) for img in self.images]

    @classmethod
    def from_strings(cls, texts, n, trunc):
        return aut_validate([series_parse(t, n, trunc) for t in texts])


def aut_validate(images: Sequence[NCSeries]) -> NCAutomorphism:
    return NCAutomorphism(images)


def aut_compose(g: NCAutomorphism, h: NCAutomorphism) -> NCAutomorphism:
    """``g o h``: the image of x_i is h's image with g substituted in."""
    if (g.n, g.trunc) != (h.n, h.trunc):
        raise DimensionMismatch("automorphisms differ in n or N")
    return NCAutomorphism([series_substitute(img, g.images) for img in h.images], check=False)


def aut_invert(g: NCAutomorphism) -> NCAutomorphism:
    """Two-sided inverse, solved one degree at a time.

    With ``h = h_1 + ... + h_{d-1}`` known, the degree-d part of ``h(g(x))``
    must vanish; its only unknown contribution is ``h_d`` evaluated on the
    linear part of g, which the inverse linear substitution undoes.
    """
    n, N = g.n, g.trunc
    inv = invert_matrix(g.linear_part)
    # x_j -> sum_k inv[j][k] x_k undoes the linear part of g
    undo = [NCSeries(n, N, {(k + 1,): inv[j][k] for k in range(n)}) for j in range(n)]
    gens = [NCSeries.gen(i, n, N) for i in range(1, n + 1)]
    h = [series_substitute(x, undo) for x in gens]
    for d in range(2, N + 1):
        new = []
        for i in range(n):
            err = series_substitute(h[i], g.images).homogeneous_part(d)
            new.append(h[i] - series_substitute(err, undo))
        h = new
    return NCAutomorphism(h, check=False)


class CommAutomorphism:
    """Automorphism of the truncated commutative disk."""

    __slots__ = ("n", "trunc", "images")

    def __init__(self, images: Sequence[CommSeries]):
        images = tuple(images)
        self.n, self.trunc, self.images = images[0].n, images[0].trunc, images
        for i, img in enumerate(images, 1):
            if img.constant_term():
                raise NonzeroConstantTerm(f"image of x{i} has constant term")
        lin = [[img.coeff(tuple(int(k == j) for k in range(self.n))) for j in range(self.n)] for img in images]
        invert_matrix(lin)

    def __eq__(self, other):
        return isinstance(other, CommAutomorphism) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"CommAutomorphism({self.to_strings()!r})"

    def to_strings(self):
        return [comm_format(img) for img in self.images]


def comm_compose(g: CommAutomorphism, h: CommAutomorphism) -> CommAutomorphism:
    return CommAutomorphism([comm_substitute(img, g.images) for img in h.images])


def aut_abelianize(g: NCAutomorphism) -> CommAutomorphism:
    return CommAutomorphism([series_abelianize(img) for img in g.images])


def random_automorphism(rng, n, N, *, density=0.4, tail_range=2):
    """Random element of the augmented group: invertible linear part plus a tail."""
    while True:
        lin = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        try:
            invert_matrix(lin)
            break
        except SingularLinearPart:
            continue
    images = []
    for i in range(n):
        tail = random_series(rng, n, N, min_degree=2, density=density, coeff_range=tail_range)
        lin_part = NCSeries(n, N, {(j + 1,): lin[i][j] for j in range(n)})
        images.append(lin_part + tail)
    return NCAutomorphism(images)
