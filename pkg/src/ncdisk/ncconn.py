"""The flat differential D of a noncommutative connection on a chart.

``D`` is the degree-1 derivation of forms-tensor-fiber with ``D(b_i) = db_i``,
``D(db_i) = 0`` and ``D(xi_l) = sum_i db_i * theta_i(xi_l)``. On a term
``e = alpha * p(b) * xi_w`` this reads ``D(e) = sum_i db_i ^ (d_i e + theta_i(e))``
with ``theta_i`` acting on the fiber word by Leibniz.

Truncation: D lowers fiber degree (through the leading part of theta) and
base degree (through d/db_i), so D^2 of boxed data is exact only on the window
fiber <= N - 1, base <= B - 1. Flatness is asserted there.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .chart import GKForm
from .config import enumeration_cap
from .dga import (
    BasePoly,
    DGAElement,
    base_derivative_terms,
    dga_format,
    leibniz_terms,
    merge_forms,
    poly_format,
)
from .errors import CapExceeded, DimensionMismatch, MalformedGK
from .linalg import Echelon, nullspace
from .ncseries import words_of_degree


class ConnectionData:
    """The images ``theta[i][l]`` (form-0 elements) defining ``D(xi_l)``.

    ``nabla(k)`` lists the part with k fiber letters, so ``nabla(0)`` is the
    leading term (``delta_il`` for a twisted connection) and ``nabla(2)``
    carries the quadratic part read off by the Atiyah layer.
    """

    __slots__ = ("m", "fiber_trunc", "base_trunc", "theta")

    def __init__(self, theta: Sequence[Sequence[DGAElement]], fiber_trunc: int, base_trunc: int):
        gk = GKForm(theta, fiber_trunc, base_trunc)
        self.m, self.fiber_trunc, self.base_trunc, self.theta = gk.m, fiber_trunc, base_trunc, gk.theta

    @property
    def n(self):
        return self.m

    def _theta_terms(self, i):
        return [el.terms for el in self.theta[i]]

    def d_xi(self, l):
        """``D(xi_l)`` as a 1-form."""
        return apply_D(self, DGAElement.xi(l, self.m, self.fiber_trunc, self.base_trunc))

    def nabla(self, k):
        """``[(from l, form i, word, BasePoly)]`` for the k-letter part of D(xi_l)."""
        out = []
        for l in range(1, self.m + 1):
            for i in range(1, self.m + 1):
                groups = self.theta[i - 1][l - 1].fiber_part(k).grouped()
                for (_, word), poly in sorted(groups.items(), key=lambda t: t[0][1]):
                    out.append((l, i, word, poly))
        return out

    def leading(self):
        return [[self.theta[i][l].fiber_part(0).coefficient_of((), ()) for l in range(self.m)] for i in range(self.m)]

    def replace(self, i, l, image: DGAElement):
        rows = [list(r) for r in self.theta]
        rows[i - 1][l - 1] = image
        return ConnectionData(rows, self.fiber_trunc, self.base_trunc)

    def to_dict(self):
        nabla = {}
        for k in range(1, self.fiber_trunc + 1):
            entries = [
                {"from": l, "form": i, "word": list(word), "coeff_poly": poly_format(poly)}
                for l, i, word, poly in self.nabla(k)
            ]
            if entries:
                nabla[str(k)] = entries
        data = {
            "n": self.m,
            "fiber_trunc": self.fiber_trunc,
            "base_trunc": self.base_trunc,
            "nabla": nabla,
        }
        lead = self.leading()
        if any(lead[i][l] != BasePoly.const(int(i == l), self.m) for i in range(self.m) for l in range(self.m)):
            data["leading"] = [
                {"from": l + 1, "form": i + 1, "coeff_poly": poly_format(lead[i][l])}
                for i in range(self.m) for l in range(self.m) if not lead[i][l].is_zero()
            ]
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        m, N, B = data["n"], data["fiber_trunc"], data["base_trunc"]
        terms = [[{} for _ in range(m)] for _ in range(m)]

        def put(i, l, word, text):
            poly = BasePoly.parse(text, m)
            for e, c in poly.items():
                key = ((), tuple(word), e)
                terms[i - 1][l - 1][key] = terms[i - 1][l - 1].get(key, 0) + c

        if "leading" in data:
            for entry in data["leading"]:
                put(entry["form"], entry["from"], (), entry["coeff_poly"])
        else:
            for i in range(1, m + 1):
                put(i, i, (), "1")
        for k, entries in data.get("nabla", {}).items():
            for entry in entries:
                if len(entry["word"]) != int(k):
                    raise ValueError(f"entry {entry} filed under k={k}")
                put(entry["form"], entry["from"], entry["word"], entry["coeff_poly"])
        theta = [[DGAElement(m, N, B, terms[i][l]) for l in range(m)] for i in range(m)]
        return cls(theta, N, B)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        return isinstance(other, ConnectionData) and (
            (self.fiber_trunc, self.base_trunc, self.theta)
            == (other.fiber_trunc, other.base_trunc, other.theta)
        )

    def __hash__(self):
        return hash((self.fiber_trunc, self.base_trunc, self.theta))

    def __repr__(self):
        return f"ConnectionData({self.to_json()})"


def connection_from_gk(theta: GKForm) -> ConnectionData:
    m = theta.m
    for i in range(m):
        for l in range(m):
            lead = theta.theta[i][l].fiber_part(0)
            expected = DGAElement.const(int(i == l), m, theta.fiber_trunc, theta.base_trunc)
            if lead != expected:
                raise MalformedGK(
                    f"leading part of theta_{i + 1}(x{l + 1}) is {dga_format(lead)}, expected {int(i == l)}"
                )
    return ConnectionData(theta.theta, theta.fiber_trunc, theta.base_trunc)


def _check_box(c, e):
    if e.m != c.m:
        raise DimensionMismatch(f"element on a chart of dimension {e.m}, connection on {c.m}")
    if (e.fiber_trunc, e.base_trunc) != (c.fiber_trunc, c.base_trunc):
        raise DimensionMismatch(
            f"element box ({e.fiber_trunc}, {e.base_trunc}) differs from connection box "
            f"({c.fiber_trunc}, {c.base_trunc})"
        )


def apply_D(c: ConnectionData, e: DGAElement) -> DGAElement:
    _check_box(c, e)
    N, B, m = c.fiber_trunc, c.base_trunc, c.m
    src = e.terms
    out = {}
    for i in range(1, m + 1):
        inner = base_derivative_terms(src, i)
        for key, v in leibniz_terms(src, c._theta_terms(i - 1), N, B).items():
            s = inner.get(key, 0) + v
            if s:
                inner[key] = s
            else:
                inner.pop(key, None)
        for (f, w, ex), v in inner.items():
            sign, merged = merge_forms((i,), f)
            if not sign:
                continue
            key = (merged, w, ex)
            s = out.get(key, 0) + sign * v
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return DGAElement(m, N, B, out)


@dataclass(frozen=True)
class FlatnessReport:
    passed: bool
    window: tuple
    generator: str | None = None
    value: DGAElement | None = None

    def __bool__(self):
        return self.passed

    def describe(self):
        fiber, base = self.window
        where = f"fiber degree <= {fiber}, base degree <= {base}"
        if self.passed:
            return f"PASS ({where})"
        return f"FAIL: D^2({self.generator}) = {dga_format(self.value)} ({where})"


def flatness_window(c: ConnectionData):
    return (c.fiber_trunc - 1, c.base_trunc - 1)


def flatness_check(c: ConnectionData) -> FlatnessReport:
    """D^2 on every fiber generator and base coordinate, within the exact window."""
    window = flatness_window(c)
    N, B, m = c.fiber_trunc, c.base_trunc, c.m
    probes = [(f"x{l}", DGAElement.xi(l, m, N, B)) for l in range(1, m + 1)]
    probes += [(f"b{i}", DGAElement.b(i, m, N, B)) for i in range(1, m + 1)]
    for name, el in probes:
        value = apply_D(c, apply_D(c, el)).window(*window)
        if not value.is_zero():
            return FlatnessReport(False, window, name, value)
    return FlatnessReport(True, window)


@dataclass(frozen=True)
class ShapeReport:
    passed: bool
    violations: tuple = ()

    def __bool__(self):
        return self.passed

    def describe(self):
        return "PASS" if self.passed else "VIOLATION: " + "; ".join(self.violations)


def validate_twisted_shape(c: ConnectionData) -> ShapeReport:
    """D(xi_l) must reduce to db_l modulo fiber degree >= 1, and D(b_i) must be db_i."""
    N, B, m = c.fiber_trunc, c.base_trunc, c.m
    problems = []
    for l in range(1, m + 1):
        lead = apply_D(c, DGAElement.xi(l, m, N, B)).fiber_part(0)
        if lead != DGAElement.db(l, m, N, B):
            problems.append(f"x{l}: D(x{l}) mod fiber degree >= 1 is {dga_format(lead)}, expected db{l}")
    for i in range(1, m + 1):
        if B >= 1 and apply_D(c, DGAElement.b(i, m, N, B)) != DGAElement.db(i, m, N, B):
            problems.append(f"b{i}: D(b{i}) is not db{i}")
    return ShapeReport(not problems, tuple(problems))


def box_monomials(m, fiber_max, base_max):
    """Form-0 monomials ``(word, exps)`` ordered with higher fiber degree first."""
    exps = [e for d in range(base_max + 1) for e in _exps_of_degree(m, d)]
    out = []
    for d in range(fiber_max, -1, -1):
        for w in words_of_degree(m, d):
            out.extend((w, e) for e in exps)
    return out


def _exps_of_degree(m, d):
    return sorted((e for e in product(range(d + 1), repeat=m) if sum(e) == d), reverse=True)


@dataclass(frozen=True)
class FlatSections:
    basis: tuple
    fiber_max: int
    base_max: int

    def leading_fiber_degrees(self):
        """Fiber degree of the leading (highest fiber degree) term of each basis element."""
        return [el.max_fiber_degree() for el in self.basis]

    def count_by_fiber_degree(self):
        out = {}
        for d in self.leading_fiber_degrees():
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))


def flat_sections(c: ConnectionData, fiber_max: int, base_max: int, cap=None) -> FlatSections:
    """Exact kernel of D on form-0 elements with fiber <= fiber_max and base <= base_max.

    One linear system over the whole box. Columns put higher fiber degree
    first, so each echelon basis vector leads with its top fiber component.
    """
    N, B, m = c.fiber_trunc, c.base_trunc, c.m
    if fiber_max > N or base_max > B:
        raise DimensionMismatch(f"bounds ({fiber_max}, {base_max}) exceed the connection box ({N}, {B})")
    if fiber_max < 0 or base_max < 0:
        raise ValueError("bounds must be nonnegative")
    monos = box_monomials(m, fiber_max, base_max)
    limit = enumeration_cap(cap)
    if len(monos) > limit:
        raise CapExceeded(f"{len(monos)} unknowns exceed the cap {limit}")
    rows = {}
    for col, (w, e) in enumerate(monos):
        image = apply_D(c, DGAElement(m, N, B, {((), w, e): 1}))
        for key, v in image.items():
            rows.setdefault(key, {})[col] = v
    kernel = nullspace(list(rows.values()), len(monos))
    basis = []
    for vec in kernel:
        terms = {((), monos[col][0], monos[col][1]): v for col, v in vec.items()}
        basis.append(DGAElement(m, N, B, terms))
    return FlatSections(tuple(basis), fiber_max, base_max)


def truncate_total(e: DGAElement, T: int) -> DGAElement:
    """Drop terms whose fiber degree plus base degree exceeds T."""
    return e._filter(lambda f, w, ex: len(w) + sum(ex) <= T)


def _vector(e: DGAElement, index):
    return {index[(w, ex)]: c for (f, w, ex), c in e.items()}


def products_closed(sections: FlatSections, total=None):
    """Check that pairwise products of basis elements stay in the span.

    Products are cut at total degree ``total`` (default: the smaller bound),
    which for a connection homogeneous in total degree commutes with D.
    Returns ``(closed, number_of_products_checked)``.
    """
    T = min(sections.fiber_max, sections.base_max) if total is None else total
    if not sections.basis:
        return True, 0
    m = sections.basis[0].m
    index = {mono: k for k, mono in enumerate(box_monomials(m, sections.fiber_max, sections.base_max))}
    span = Echelon(_vector(truncate_total(b, T), index) for b in sections.basis)
    checked = 0
    for a in sections.basis:
        for b in sections.basis:
            prod = truncate_total(a * b, T)
            if not span.contains(_vector(prod, index)):
                return False, checked
            checked += 1
    return True, checked


def perturb(c: ConnectionData, form: int, word: Sequence[int], target: int, coeff=1) -> ConnectionData:
    """Add ``coeff * db_form * xi_word`` to ``D(xi_target)``."""
    m = c.m
    image = c.theta[form - 1][target - 1] + DGAElement(
        m, c.fiber_trunc, c.base_trunc, {((), tuple(word), (0,) * m): Fraction(coeff)}
    )
    return c.replace(form, target, image)


def rescale_leading(c: ConnectionData, target: int, factor) -> ConnectionData:
    """Multiply the leading term of ``D(xi_target)`` by ``factor``."""
    i = target
    el = c.theta[i - 1][target - 1]
    lead = el.fiber_part(0)
    return c.replace(i, target, el - lead + lead.scale(factor))
