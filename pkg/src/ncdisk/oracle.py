"""Slow reference computations used to cross-check the sparse modules.

Everything here is dense and definitional: words are enumerated explicitly,
products are expanded letter by letter, and ranks come from plain Gaussian
elimination on lists of Fractions. Nothing is shared with the sparse kernels
(no series arithmetic, no echelon helper, no left-multiple shortcut for the
ideals). The only imports from the package are the error types and the
table container.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from .errors import CapExceeded

ORACLE_CAP = 4096


def _check_cap(size, cap):
    cap = ORACLE_CAP if cap is None else cap
    if size > cap:
        raise CapExceeded(f"dense slice of size {size} exceeds the oracle cap {cap}")


def all_words(n, d):
    return [tuple(w) for w in product(range(1, n + 1), repeat=d)]


def all_words_up_to(n, N):
    return [w for d in range(N + 1) for w in all_words(n, d)]


def dense_rank(rows):
    """Rank of a list of equal-length Fraction lists."""
    mat = [[Fraction(x) for x in r] for r in rows]
    if not mat:
        return 0
    width = len(mat[0])
    rank = 0
    for col in range(width):
        pivot = None
        for r in range(rank, len(mat)):
            if mat[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        p = mat[rank][col]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col] / p
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank


def _poly_mul(a, b):
    out = {}
    for w1, c1 in a.items():
        for w2, c2 in b.items():
            out[w1 + w2] = out.get(w1 + w2, 0) + c1 * c2
    return out


def oracle_multiply(a, b):
    """Product of two {word: coeff} maps by explicit concatenation."""
    return {w: c for w, c in _poly_mul(a, b).items() if c != 0}


def oracle_commutator(a, b):
    ab = _poly_mul(a, b)
    for w, c in _poly_mul(b, a).items():
        ab[w] = ab.get(w, 0) - c
    return {w: c for w, c in ab.items() if c != 0}


def _dense(poly, words):
    return [Fraction(poly.get(w, 0)) for w in words]


def _span_basis(polys, words):
    """A basis (as dense vectors) of the span of ``polys`` in the given word slice."""
    vecs = [_dense(p, words) for p in polys]
    vecs = [v for v in vecs if any(v)]
    mat = [list(v) for v in vecs]
    if not mat:
        return []
    width = len(words)
    rank = 0
    for col in range(width):
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        p = mat[rank][col]
        mat[rank] = [x / p for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
    return mat[:rank]


def _to_poly(vec, words):
    return {w: c for w, c in zip(words, vec) if c != 0}


def oracle_lcs_slices(n, kmax, dmax, cap=None):
    """``{(k, d): dim M_k slice}`` for 1 <= k <= kmax, 1 <= d <= dmax, by two-sided closure."""
    _check_cap(n**dmax, cap)
    words = {d: all_words(n, d) for d in range(dmax + 1)}
    gens = [{(i,): Fraction(1)} for i in range(1, n + 1)]
    # L[k][d]: basis polys of the degree-d slice of L_k
    L = {1: {d: [{w: Fraction(1)} for w in words[d]] for d in range(1, dmax + 1)}}
    for k in range(2, kmax + 1):
        L[k] = {}
        for d in range(1, dmax + 1):
            brackets = []
            for e in range(1, d):
                for w in words[e]:
                    for v in L[k - 1].get(d - e, []):
                        brackets.append(oracle_commutator({w: Fraction(1)}, v))
            L[k][d] = [_to_poly(v, words[d]) for v in _span_basis(brackets, words[d])]
    dims = {}
    for k in range(1, kmax + 1):
        prev = []
        for d in range(1, dmax + 1):
            # two-sided closure: L_k itself plus left and right generator multiples
            candidates = list(L[k][d])
            for p in prev:
                for g in gens:
                    candidates.append(_poly_mul(g, p))
                    candidates.append(_poly_mul(p, g))
            basis = _span_basis(candidates, words[d])
            dims[(k, d)] = len(basis)
            prev = [_to_poly(v, words[d]) for v in basis]
    return dims


def oracle_lcs_dims(n, kmax, dmax, cap=None):
    """Quotient table ``dim M_k - dim M_{k+1}`` in the same container as the sparse module."""
    from .lcs import DimensionTable

    slices = oracle_lcs_slices(n, kmax + 1, dmax, cap)
    rows = {
        k: tuple(slices[(k, d)] - slices[(k + 1, d)] for d in range(1, dmax + 1))
        for k in range(1, kmax + 1)
    }
    return DimensionTable(n=n, rows=rows, kind="quotient")


def oracle_leibniz_apply(images, word, n, N, cap=None):
    """Dense vector (all words of degree <= N, graded-lex) of ``delta(word)``.

    ``images[i-1]`` is a ``{word: coeff}`` map giving ``delta(x_i)``.
    """
    basis = all_words_up_to(n, N)
    _check_cap(len(basis), cap)
    position = {w: k for k, w in enumerate(basis)}
    out = [Fraction(0)] * len(basis)
    word = tuple(word)
    for pos in range(len(word)):
        for img_word, c in images[word[pos] - 1].items():
            new = word[:pos] + tuple(img_word) + word[pos + 1 :]
            if len(new) <= N:
                out[position[new]] += Fraction(c)
    return out


def comm_monomials(n, d):
    return [e for e in product(range(d + 1), repeat=n) if sum(e) == d]


def oracle_comm_quotient_dims(relations, n, dmax, cap=None):
    """Dims of the graded pieces of k[x_1..x_n]/(relations), truncated above dmax.

    ``relations`` are ``{exponent tuple: coeff}`` maps with zero constant term.
    The ideal of the truncated ring is spanned by monomial multiples of the
    relations; its degree-d initial piece is read off from a dense reduction
    with columns in increasing degree.
    """
    cols = [e for d in range(dmax + 1) for e in comm_monomials(n, d)]
    _check_cap(len(cols), cap)
    index = {e: k for k, e in enumerate(cols)}
    rows = []
    for f in relations:
        for mono in cols:
            row = [Fraction(0)] * len(cols)
            for e, c in f.items():
                prod_e = tuple(a + b for a, b in zip(mono, e))
                if sum(prod_e) <= dmax:
                    row[index[prod_e]] += Fraction(c)
            if any(row):
                rows.append(row)
    basis = _span_basis([_to_poly(r, cols) for r in rows], cols)
    lead = [0] * (dmax + 1)
    for r in basis:
        first = next(k for k, x in enumerate(r) if x != 0)
        lead[sum(cols[first])] += 1
    return tuple(len(comm_monomials(n, d)) - lead[d] for d in range(dmax + 1))
