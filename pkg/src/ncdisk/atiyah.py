"""The quadratic part of a connection as a Hom(T x T, T)-valued 1-form, and coboundary tests.

``omega2`` has entries ``c[i][(j, k)][l]``: the polynomial in front of
``db_i * xi_j * xi_k`` in ``D(xi_l)``. A 0-cochain ``g[(j, k)][l]`` has
differential ``(dg)[i][(j, k)][l] = d g[(j, k)][l] / d b_i``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product

from .config import enumeration_cap
from .dga import BasePoly, poly_format
from .errors import CapExceeded, DimensionMismatch
from .linalg import solve
from .ncconn import ConnectionData


def _clean(entries, m):
    out = {}
    for key, poly in entries.items():
        if not isinstance(poly, BasePoly):
            poly = BasePoly.const(poly, m)
        if poly.m != m:
            raise DimensionMismatch("coefficient on the wrong chart")
        if not poly.is_zero():
            out[key] = poly
    return out


class BilinearMapForm:
    """Sparse ``{(i, (j, k), l): BasePoly}`` meaning ``db_i (x) (xi_j xi_k -> xi_l)``."""

    __slots__ = ("m", "entries")

    def __init__(self, m: int, entries=None):
        clean = {}
        for (i, (j, k), l), poly in (entries or {}).items():
            for idx in (i, j, k, l):
                if not 1 <= idx <= m:
                    raise DimensionMismatch(f"index {idx} outside [1, {m}]")
            clean[(i, (j, k), l)] = poly
        self.m = m
        self.entries = _clean(clean, m)

    def entry(self, i, j, k, l):
        return self.entries.get((i, (j, k), l), BasePoly(self.m))

    def is_zero(self):
        return not self.entries

    def max_base_degree(self):
        return max((p.degree() for p in self.entries.values()), default=-1)

    def _check(self, other):
        if self.m != other.m:
            raise DimensionMismatch(f"chart dimensions differ ({self.m} vs {other.m})")

    def __add__(self, other):
        self._check(other)
        out = dict(self.entries)
        for key, p in other.entries.items():
            out[key] = out[key] + p if key in out else p
        return BilinearMapForm(self.m, out)

    def __neg__(self):
        return BilinearMapForm(self.m, {k: -p for k, p in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, BilinearMapForm) and (self.m, self.entries) == (other.m, other.entries)

    def __hash__(self):
        return hash((self.m, frozenset(self.entries.items())))

    def __repr__(self):
        return f"BilinearMapForm({self.to_json()})"

    def to_dict(self):
        return {
            "n": self.m,
            "entries": [
                {"base": i, "from": [j, k], "to": l, "coeff_poly": poly_format(p)}
                for (i, (j, k), l), p in sorted(self.entries.items())
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        m = data["n"]
        entries = {}
        for e in data["entries"]:
            key = (e["base"], tuple(e["from"]), e["to"])
            p = BasePoly.parse(e["coeff_poly"], m)
            entries[key] = entries[key] + p if key in entries else p
        return cls(m, entries)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


class BilinearMap:
    """A 0-cochain ``{((j, k), l): BasePoly}``."""

    __slots__ = ("m", "entries")

    def __init__(self, m, entries=None):
        self.m = m
        self.entries = _clean({((j, k), l): p for ((j, k), l), p in (entries or {}).items()}, m)

    def differential(self) -> BilinearMapForm:
        out = {}
        for ((j, k), l), p in self.entries.items():
            for i in range(1, self.m + 1):
                out[(i, (j, k), l)] = p.derivative(i)
        return BilinearMapForm(self.m, out)

    def __eq__(self, other):
        return isinstance(other, BilinearMap) and (self.m, self.entries) == (other.m, other.entries)

    def __hash__(self):
        return hash((self.m, frozenset(self.entries.items())))

    def __repr__(self):
        return f"BilinearMap({self.to_dict()})"

    def to_dict(self):
        return {
            "n": self.m,
            "entries": [
                {"from": [j, k], "to": l, "coeff_poly": poly_format(p)}
                for ((j, k), l), p in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_dict(cls, data):
        m = data["n"]
        return cls(m, {(tuple(e["from"]), e["to"]): BasePoly.parse(e["coeff_poly"], m) for e in data["entries"]})


def omega2_extract(c: ConnectionData) -> BilinearMapForm:
    entries = {}
    for l, i, word, poly in c.nabla(2):
        entries[(i, word, l)] = poly
    return BilinearMapForm(c.m, entries)


def cech_difference(a: BilinearMapForm, b: BilinearMapForm) -> BilinearMapForm:
    a._check(b)
    return a - b


@dataclass(frozen=True)
class CoboundaryResult:
    found: bool
    base_deg_max: int
    witness: BilinearMap | None = None
    failures: tuple = field(default=())

    def __bool__(self):
        return self.found

    def describe(self):
        if self.found:
            return f"COBOUNDARY (witness of base degree <= {self.base_deg_max})"
        return f"NOT A COBOUNDARY within base degree <= {self.base_deg_max}"


def _monomials(m, dmax, dmin=0):
    return [e for d in range(dmin, dmax + 1) for e in product(range(d + 1), repeat=m) if sum(e) == d]


def coboundary_solve(delta: BilinearMapForm, base_deg_max: int, cap=None) -> CoboundaryResult:
    """Find ``g`` with ``dg = delta`` and entries of degree <= base_deg_max.

    Each (j, k, l) slot is an independent linear system; constants of
    integration are set to zero.
    """
    m = delta.m
    unknowns = _monomials(m, base_deg_max, 1)
    limit = enumeration_cap(cap)
    if len(unknowns) > limit:
        raise CapExceeded(f"{len(unknowns)} unknowns per entry exceed the cap {limit}")
    index = {e: k for k, e in enumerate(unknowns)}
    slots = sorted({(jk, l) for (_, jk, l) in delta.entries})
    witness = {}
    failures = []
    for jk, l in slots:
        # equation rows indexed by (i, monomial of d g / d b_i)
        rows, rhs = {}, {}
        for e, col in index.items():
            for i in range(m):
                if e[i]:
                    lower = e[:i] + (e[i] - 1,) + e[i + 1 :]
                    rows.setdefault((i, lower), {})[col] = e[i]
        for i in range(1, m + 1):
            for e, c in delta.entry(i, *jk, l).items():
                rhs[(i - 1, e)] = c
                rows.setdefault((i - 1, e), {})
        keys = list(rows)
        sol = solve([rows[k] for k in keys], [rhs.get(k, 0) for k in keys], len(unknowns))
        if sol is None:
            failures.append((jk, l))
            continue
        witness[(jk, l)] = BasePoly(m, {unknowns[col]: v for col, v in sol.items()})
    if failures:
        return CoboundaryResult(False, base_deg_max, None, tuple(failures))
    g = BilinearMap(m, witness)
    if g.differential() != delta:
        raise AssertionError("coboundary witness failed re-verification")
    return CoboundaryResult(True, base_deg_max, g)
