"""Lower central series of the free algebra, graded pieces, and truncated quotients.

Notation: ``L_1 = A``, ``L_k = [A, L_{k-1}]`` and ``M_k = A L_k A``. Every object
here is graded by word length, so subspaces are handled one degree slice at a
time. ``N_k`` is taken to mean ``M_k / M_{k+1}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .config import enumeration_cap
from .errors import CapExceeded, DimensionMismatch, NonRecentred, SingularLinearPart
from .linalg import Echelon, rank
from .ncseries import NCSeries, series_abelianize, words_of_degree


def word_index(word, n):
    idx = 0
    for i in word:
        idx = idx * n + (i - 1)
    return idx


def index_word(idx, n, d):
    letters = []
    for _ in range(d):
        idx, r = divmod(idx, n)
        letters.append(r + 1)
    return tuple(reversed(letters))


def _guard(n, d, cap=None):
    cap = enumeration_cap(cap)
    if n**d > cap:
        raise CapExceeded(f"n^d = {n}^{d} = {n**d} exceeds the enumeration cap {cap}")


@dataclass(frozen=True)
class GradedSubspace:
    """Subspace of the degree-d words, stored as a reduced echelon basis.

    Columns follow the lexicographic order of ``words_of_degree(n, d)``; rows
    are sparse ``{column: Fraction}`` dicts frozen into sorted tuples.
    """

    n: int
    d: int
    rows: tuple = ()

    @classmethod
    def from_vectors(cls, n, d, vectors):
        ech = Echelon(vectors)
        return cls(n, d, tuple(tuple(sorted(r.items())) for r in ech.rows()))

    @classmethod
    def full(cls, n, d):
        return cls(n, d, tuple(((i, Fraction(1)),) for i in range(n**d)))

    @property
    def dim(self):
        return len(self.rows)

    @property
    def ambient_dim(self):
        return self.n**self.d

    def vectors(self):
        return [dict(r) for r in self.rows]

    def matrix(self):
        out = []
        for r in self.rows:
            dense = [Fraction(0)] * self.ambient_dim
            for c, v in r:
                dense[c] = v
            out.append(dense)
        return out

    def basis_series(self, trunc=None):
        trunc = self.d if trunc is None else trunc
        return [
            NCSeries(self.n, trunc, {index_word(c, self.n, self.d): v for c, v in r})
            for r in self.rows
        ]

    def contains_vector(self, vec):
        return Echelon(self.vectors()).contains(vec)

    def contains(self, other: "GradedSubspace"):
        if (self.n, self.d) != (other.n, other.d):
            raise DimensionMismatch("subspaces live in different slices")
        ech = Echelon(self.vectors())
        return all(ech.contains(v) for v in other.vectors())


def series_slice_vector(a: NCSeries, d):
    return {word_index(w, a.n): c for w, c in a.items() if len(w) == d}


@lru_cache(maxsize=None)
def _lcs_rows(k, d, n):
    if k == 1:
        return GradedSubspace.full(n, d)
    if d < k:
        return GradedSubspace(n, d)
    vectors = []
    for e in range(1, d - k + 2):
        inner = _lcs_rows(k - 1, d - e, n)
        if not inner.rows:
            continue
        for w in words_of_degree(n, e):
            for row in inner.rows:
                vec = {}
                for col, c in row:
                    u = index_word(col, n, d - e)
                    left = word_index(w + u, n)
                    right = word_index(u + w, n)
                    vec[left] = vec.get(left, 0) + c
                    vec[right] = vec.get(right, 0) - c
                vectors.append(vec)
    return GradedSubspace.from_vectors(n, d, vectors)


def lcs_component(k: int, d: int, n: int, cap=None) -> GradedSubspace:
    """Degree-d slice of ``L_k`` in the free algebra on n generators."""
    if k < 1 or d < 1:
        raise ValueError("need k >= 1 and d >= 1")
    _guard(n, d, cap)
    return _lcs_rows(k, d, n)


@lru_cache(maxsize=None)
def _ideal_rows(k, d, n, two_sided):
    if k == 1:
        return GradedSubspace.full(n, d)
    vectors = []
    for inner_deg in range(k, d + 1):
        inner = _lcs_rows(k, inner_deg, n)
        if not inner.rows:
            continue
        pad = d - inner_deg
        splits = range(pad + 1) if two_sided else (pad,)
        for left_len in splits:
            right_len = pad - left_len
            for lw in words_of_degree(n, left_len):
                for rw in words_of_degree(n, right_len):
                    for row in inner.rows:
                        vec = {}
                        for col, c in row:
                            u = index_word(col, n, inner_deg)
                            vec[word_index(lw + u + rw, n)] = c
                        vectors.append(vec)
    return GradedSubspace.from_vectors(n, d, vectors)


def lcs_ideal_component(k: int, d: int, n: int, cap=None, two_sided=False) -> GradedSubspace:
    """Degree-d slice of ``M_k``.

    By default only left multiples ``w * L_k`` are used; ``two_sided=True``
    spans ``u * L_k * v`` instead, which must give the same subspace.
    """
    if k < 1 or d < 1:
        raise ValueError("need k >= 1 and d >= 1")
    _guard(n, d, cap)
    return _ideal_rows(k, d, n, two_sided)


def in_lcs_ideal(a: NCSeries, k: int, cap=None) -> bool:
    """Whether every homogeneous part of ``a`` lies in ``M_k``."""
    for d, part in sorted(a.degree_parts().items()):
        if d == 0:
            if k > 1:
                return False
            continue
        vec = {word_index(w, a.n): c for w, c in part.items()}
        if not lcs_ideal_component(k, d, a.n, cap).contains_vector(vec):
            return False
    return True


@dataclass(frozen=True)
class DimensionTable:
    """Integer table; ``rows`` maps a row label to dims at degrees dmin, dmin+1, ..."""

    n: int
    rows: dict = field(default_factory=dict)
    dmin: int = 1
    kind: str = "quotient"
    label: str = "k"

    def degrees(self):
        width = max((len(v) for v in self.rows.values()), default=0)
        return list(range(self.dmin, self.dmin + width))

    def entry(self, row, d):
        return self.rows[row][d - self.dmin]

    def to_dict(self):
        return {
            "n": self.n,
            "kind": self.kind,
            "dmin": self.dmin,
            "rows": [{self.label: key, "dims": list(dims)} for key, dims in self.rows.items()],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        rows = data["rows"]
        label = "k" if rows and "k" in rows[0] else "row"
        return cls(
            n=data["n"],
            rows={r[label]: tuple(r["dims"]) for r in rows},
            dmin=data.get("dmin", 1),
            kind=data.get("kind", "quotient"),
            label=label,
        )

    def to_text(self):
        degs = self.degrees()
        head = [self.label] + [f"d={d}" for d in degs]
        body = [[str(key)] + [str(x) for x in dims] for key, dims in self.rows.items()]
        widths = [max(len(r[i]) for r in [head] + body) for i in range(len(head))]
        lines = ["  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in [head] + body]
        return "\n".join(lines)


def lcs_ideal_table(kmax: int, dmax: int, n: int, cap=None) -> DimensionTable:
    """Table of ``dim M_k`` slices for k <= kmax, 1 <= d <= dmax."""
    _guard(n, dmax, cap)
    rows = {
        k: tuple(lcs_ideal_component(k, d, n, cap).dim for d in range(1, dmax + 1))
        for k in range(1, kmax + 1)
    }
    return DimensionTable(n=n, rows=rows, kind="ideal")


def lcs_quotient_table(kmax: int, dmax: int, n: int, cap=None) -> DimensionTable:
    """Table of ``dim N_k = dim M_k - dim M_{k+1}`` slices."""
    ideal = lcs_ideal_table(kmax + 1, dmax, n, cap)
    rows = {
        k: tuple(a - b for a, b in zip(ideal.rows[k], ideal.rows[k + 1]))
        for k in range(1, kmax + 1)
    }
    return DimensionTable(n=n, rows=rows, kind="quotient")


# two-sided ideals of the truncated free algebra


class _TruncatedIdeal:
    """Two-sided ideal of k<x>/(words of degree > T), closed by fixed-point iteration.

    Columns run through all words of degree <= T in graded order, so the
    pivot of an echelon row is its lowest-degree term (its initial form).
    """

    def __init__(self, n, T, cap=None):
        self.n, self.T = n, T
        total = sum(n**e for e in range(T + 1))
        capv = enumeration_cap(cap)
        if total > capv:
            raise CapExceeded(f"{total} words up to degree {T} exceeds the cap {capv}")
        self.offsets = [sum(n**e for e in range(d)) for d in range(T + 2)]
        self.ech = Echelon()

    def column(self, word):
        return self.offsets[len(word)] + word_index(word, self.n)

    def degree_of_column(self, col):
        for d in range(self.T + 1):
            if col < self.offsets[d + 1]:
                return d
        raise IndexError(col)

    def vector(self, terms):
        out = {}
        for w, c in terms.items():
            if len(w) <= self.T:
                col = self.column(w)
                out[col] = out.get(col, 0) + c
        return {k: v for k, v in out.items() if v}

    def close(self, generators):
        queue = [dict(g) for g in generators]
        for g in queue:
            self.ech.add(self.vector(g))
        while queue:
            g = queue.pop()
            for j in range(1, self.n + 1):
                for side in (0, 1):
                    prod = {}
                    for w, c in g.items():
                        if len(w) < self.T:
                            nw = (j,) + w if side == 0 else w + (j,)
                            prod[nw] = c
                    if prod and self.ech.add(self.vector(prod)):
                        queue.append(prod)
        return self

    def initial_counts(self):
        counts = [0] * (self.T + 1)
        for piv in self.ech.pivots:
            counts[self.degree_of_column(piv)] += 1
        return counts

    def initial_slice(self, d):
        lo, hi = self.offsets[d], self.offsets[d + 1]
        vecs = []
        for piv, row in self.ech.pivots.items():
            if lo <= piv < hi:
                vecs.append({c - lo: v for c, v in row.items() if lo <= c < hi})
        return GradedSubspace.from_vectors(self.n, d, vecs)


def _shape_of(generators, n):
    if generators:
        n0 = generators[0].n
        for g in generators:
            if g.n != n0:
                raise DimensionMismatch("generators differ in the number of variables")
        if n is not None and n != n0:
            raise DimensionMismatch(f"generators have n={n0}, asked for n={n}")
        return n0
    if n is None:
        raise ValueError("n is required when there are no generators")
    return n


def ideal_closure(generators, d, n=None, cap=None) -> GradedSubspace:
    """Degree-d slice of the two-sided ideal generated by ``generators``.

    For inhomogeneous generators this is the slice of initial (lowest-degree)
    forms, i.e. the degree-d piece of the associated graded ideal.
    """
    n = _shape_of(list(generators), n)
    for g in generators:
        if g.trunc < d:
            raise DimensionMismatch(f"generator known only to degree {g.trunc} < {d}")
    _guard(n, d, cap)
    ideal = _TruncatedIdeal(n, d, cap).close([g.terms for g in generators])
    return ideal.initial_slice(d)


def _commutator_terms(i, j):
    return {(i, j): Fraction(1), (j, i): Fraction(-1)}


def ci_thickening_dims(f_tilde, dmax, n=None, cap=None) -> DimensionTable:
    """Graded dimensions of ``A/<f~>`` and of its abelianization, degrees 0..dmax.

    Relations must already vanish at the chosen point (zero constant term) and
    their abelianized linear parts must be independent.
    """
    f_tilde = list(f_tilde)
    n = _shape_of(f_tilde, n)
    for idx, f in enumerate(f_tilde, 1):
        if f.constant_term():
            raise NonRecentred(f"relation {idx} has constant term {f.constant_term()}; recentre it first")
        if f.trunc < dmax:
            raise DimensionMismatch(f"relation {idx} known only to degree {f.trunc} < {dmax}")
    if f_tilde:
        lin = [[series_abelianize(f).coeff(tuple(int(i == j) for i in range(n))) for j in range(n)] for f in f_tilde]
        if rank([{j: v for j, v in enumerate(r) if v} for r in lin]) < len(f_tilde):
            raise SingularLinearPart("abelianized relations are not smooth at the origin")
    rels = [f.terms for f in f_tilde]
    nc = _TruncatedIdeal(n, dmax, cap).close(rels).initial_counts()
    comms = [_commutator_terms(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    ab = _TruncatedIdeal(n, dmax, cap).close(rels + comms).initial_counts()
    free = [n**d for d in range(dmax + 1)]
    rows = {
        "quotient": tuple(f - c for f, c in zip(free, nc)),
        "abelianized": tuple(f - c for f, c in zip(free, ab)),
    }
    return DimensionTable(n=n, rows=rows, dmin=0, kind="complete_intersection", label="row")
