"""Sparse row echelon forms over exact rationals.

Vectors are dicts ``column -> Fraction`` with integer columns. The pivot of a
row is its smallest column, so callers choose which monomials lead by the way
they number columns.
"""

from fractions import Fraction


def _axpy(target, scale, source):
    """target += scale * source, pruning zeros in place."""
    for col, val in source.items():
        new = target.get(col, 0) + scale * val
        if new:
            target[col] = new
        else:
            target.pop(col, None)


class Echelon:
    """Incrementally maintained reduced row echelon basis of a subspace."""

    def __init__(self, rows=()):
        self.pivots = {}
        for row in rows:
            self.add(row)

    def __len__(self):
        return len(self.pivots)

    def reduce(self, vec):
        vec = {c: Fraction(v) for c, v in vec.items() if v}
        for col in sorted(c for c in vec if c in self.pivots):
            coef = vec.get(col)
            if coef:
                _axpy(vec, -coef, self.pivots[col])
        return vec

    def add(self, vec):
        """Insert ``vec``; returns True when the span grew."""
        vec = self.reduce(vec)
        if not vec:
            return False
        piv = min(vec)
        inv = 1 / vec[piv]
        vec = {c: v * inv for c, v in vec.items()}
        for row in self.pivots.values():
            coef = row.get(piv)
            if coef:
                _axpy(row, -coef, vec)
        self.pivots[piv] = vec
        return True

    def contains(self, vec):
        return not self.reduce(vec)

    def rows(self):
        return [dict(sorted(self.pivots[p].items())) for p in sorted(self.pivots)]


def rref(rows):
    return Echelon(rows).rows()


def rank(rows):
    return len(Echelon(rows))


def nullspace(equations, unknowns):
    """Basis of ``{x : sum_j eq[j] * x[j] = 0 for every equation}``.

    ``unknowns`` is the number of columns; the result is in reduced echelon
    form with the same pivot convention.
    """
    ech = Echelon(equations)
    pivots = ech.pivots
    basis = []
    for free in range(unknowns):
        if free in pivots:
            continue
        vec = {free: Fraction(1)}
        for p, row in pivots.items():
            coef = row.get(free)
            if coef:
                vec[p] = -coef
        basis.append(vec)
    return rref(basis)


def solve(equations, rhs, unknowns):
    """One solution of ``sum_j eq[j] * x[j] = rhs[row]`` or None when inconsistent.

    Free unknowns are set to zero. ``equations`` are sparse rows over
    ``range(unknowns)``.
    """
    aug = Echelon()
    for eq, r in zip(equations, rhs):
        row = dict(eq)
        if r:
            row[unknowns] = Fraction(r)
        aug.add(row)
    if unknowns in aug.pivots:
        return None
    return {p: row.get(unknowns, Fraction(0)) for p, row in aug.pivots.items() if row.get(unknowns)}
