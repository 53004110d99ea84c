"""A polynomial chart: de Rham differential, Gelfand-Kazhdan forms and gauge changes.

A GK form assigns to each base direction ``i`` a fiber derivation ``theta_i``
with polynomial coefficients, stored as the images ``theta_i(xi_l)``. The
connection it induces is ``D(xi_l) = sum_i db_i * theta_i(xi_l)``. Everything
lives in a box: fiber words of length at most N, base degree at most B.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Sequence

from .autgrp import invert_matrix
from .derlie import NCDerivation
from .errors import (
    DimensionMismatch,
    LiftMismatch,
    NonRecentred,
    NonzeroConstantTerm,
    SingularJacobian,
    SingularLinearPart,
)
from .dga import (
    BaseForm,
    BasePoly,
    DGAElement,
    base_derivative_terms,
    de_rham_terms,
    dga_format,
    dga_parse,
    leibniz_terms,
    mul_terms,
)


def de_rham(form: BaseForm) -> BaseForm:
    el = form.element
    return BaseForm.from_element(DGAElement(el.m, None, None, de_rham_terms(el.terms, el.m)))


def _zero_exps(m):
    return (0,) * m


class GKForm:
    """``theta[i][l]`` is the form-0 element ``theta_{i+1}(xi_{l+1})``."""

    __slots__ = ("m", "fiber_trunc", "base_trunc", "theta")

    def __init__(self, theta: Sequence[Sequence[DGAElement]], fiber_trunc: int, base_trunc: int):
        theta = tuple(tuple(row) for row in theta)
        m = len(theta)
        if m < 1 or any(len(row) != m for row in theta):
            raise DimensionMismatch("GK form needs an m x m array of images")
        if fiber_trunc < 0 or base_trunc < 0:
            raise ValueError("bounds must be nonnegative")
        boxed = []
        for row in theta:
            new_row = []
            for el in row:
                if el.m != m:
                    raise DimensionMismatch(f"image lives on a chart of dimension {el.m}, expected {m}")
                if any(f for (f, _, _) in el.terms):
                    raise ValueError("GK images must have form degree 0")
                new_row.append(el.with_box(fiber_trunc, base_trunc))
            boxed.append(tuple(new_row))
        self.m = m
        self.fiber_trunc = fiber_trunc
        self.base_trunc = base_trunc
        self.theta = tuple(boxed)

    @property
    def n(self):
        return self.m

    def image(self, i, l):
        return self.theta[i - 1][l - 1]

    def derivation_terms(self, i):
        """The images of theta_i as raw term maps, ready for ``leibniz_terms``."""
        return [el.terms for el in self.theta[i - 1]]

    @classmethod
    def from_derivations(cls, derivations: Sequence[NCDerivation], base_trunc: int):
        """GK form with constant coefficients, one derivation per base direction."""
        m = len(derivations)
        N = derivations[0].trunc
        theta = []
        for der in derivations:
            if der.n != m or der.trunc != N:
                raise DimensionMismatch("derivations must share n = m and N")
            theta.append([
                DGAElement(m, N, base_trunc, {((), w, _zero_exps(m)): c for w, c in img.items()})
                for img in der.images
            ])
        return cls(theta, N, base_trunc)

    def to_strings(self):
        return [[dga_format(el) for el in row] for row in self.theta]

    @classmethod
    def from_strings(cls, rows, fiber_trunc, base_trunc):
        m = len(rows)
        return cls([[dga_parse(t, m) for t in row] for row in rows], fiber_trunc, base_trunc)

    def to_dict(self):
        return {
            "n": self.m,
            "fiber_trunc": self.fiber_trunc,
            "base_trunc": self.base_trunc,
            "theta": self.to_strings(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls.from_strings(data["theta"], data["fiber_trunc"], data["base_trunc"])

    def __eq__(self, other):
        return isinstance(other, GKForm) and (
            (self.m, self.fiber_trunc, self.base_trunc, self.theta)
            == (other.m, other.fiber_trunc, other.base_trunc, other.theta)
        )

    def __hash__(self):
        return hash((self.m, self.fiber_trunc, self.base_trunc, self.theta))

    def __repr__(self):
        return f"GKForm({self.to_strings()!r}, N={self.fiber_trunc}, B={self.base_trunc})"


def tautological_gk(n: int, N: int, B: int = None) -> GKForm:
    """theta_i = the constant derivation xi_i -> 1; B defaults to N."""
    B = N if B is None else B
    theta = [
        [DGAElement.const(int(i == l), n, N, B) for l in range(n)]
        for i in range(n)
    ]
    return GKForm(theta, N, B)


class Gauge:
    """Change of trivialization: ``b = phi(b')`` on the base, ``xi = psi(b', xi')`` on the fiber.

    ``phi`` is a list of m exact polynomials vanishing at the origin with
    invertible Jacobian there; ``psi`` is a list of m form-0 elements whose
    fiber-linear part is exactly the Jacobian matrix of ``phi``.
    """

    __slots__ = ("m", "phi", "psi")

    def __init__(self, phi: Sequence[BasePoly], psi: Sequence[DGAElement]):
        phi, psi = tuple(phi), tuple(psi)
        m = len(phi)
        if m < 1 or len(psi) != m:
            raise DimensionMismatch("gauge needs m base images and m fiber images")
        for p in phi:
            if p.m != m:
                raise DimensionMismatch("base image on the wrong chart")
        self.m = m
        self.phi = phi
        self.psi = tuple(DGAElement(m, None, None, el.terms) for el in psi)
        self._validate()

    def jacobian(self):
        """``J[l][k] = d phi_l / d b_k``."""
        return [[p.derivative(k) for k in range(1, self.m + 1)] for p in self.phi]

    def _validate(self):
        m = self.m
        for l, p in enumerate(self.phi, 1):
            if p.constant_term():
                raise NonRecentred(f"phi_{l} does not vanish at the origin")
        J = self.jacobian()
        try:
            invert_matrix([[entry.constant_term() for entry in row] for row in J])
        except SingularLinearPart:
            raise SingularJacobian("Jacobian of phi is singular at the origin") from None
        for l, el in enumerate(self.psi, 1):
            if any(f for (f, _, _) in el.terms):
                raise ValueError("fiber images must have form degree 0")
            if not el.fiber_part(0).is_zero():
                raise NonzeroConstantTerm(f"psi_{l} has a fiber-degree-0 part")
            for k in range(1, m + 1):
                if el.coefficient_of((), (k,)) != J[l - 1][k - 1]:
                    raise LiftMismatch(
                        f"coefficient of x{k} in psi_{l} is not d phi_{l}/d b_{k}"
                    )

    @classmethod
    def identity(cls, m):
        return cls(
            [BasePoly.var(i, m) for i in range(1, m + 1)],
            [DGAElement.xi(i, m) for i in range(1, m + 1)],
        )

    @classmethod
    def linear_lift(cls, phi: Sequence[BasePoly], extra: Sequence[DGAElement] | None = None):
        """psi_l = sum_k J_lk(b) xi_k, plus optional higher fiber terms."""
        phi = tuple(phi)
        m = len(phi)
        J = [[p.derivative(k) for k in range(1, m + 1)] for p in phi]
        psi = []
        for l in range(m):
            terms = {}
            for k in range(m):
                for e, c in J[l][k].items():
                    terms[((), (k + 1,), e)] = c
            el = DGAElement(m, None, None, terms)
            if extra is not None:
                el = el + DGAElement(m, None, None, extra[l].terms)
            psi.append(el)
        return cls(phi, psi)

    def truncated(self, N, B):
        """Drop data that cannot reach the (N, B) box of a transformed GK form."""
        m = self.m
        phi = [p.truncate(B + 2) for p in self.phi]
        psi = [DGAElement(m, N + 1, B + 1, el.terms).with_box(None, None) for el in self.psi]
        return Gauge(phi, psi)

    def to_dict(self):
        return {
            "n": self.m,
            "phi": [str(p) for p in self.phi],
            "psi": [dga_format(el) for el in self.psi],
        }

    @classmethod
    def from_dict(cls, data):
        m = data["n"]
        return cls(
            [BasePoly.parse(t, m) for t in data["phi"]],
            [dga_parse(t, m) for t in data["psi"]],
        )

    def __eq__(self, other):
        return isinstance(other, Gauge) and (self.phi, self.psi) == (other.phi, other.psi)

    def __hash__(self):
        return hash((self.phi, self.psi))

    def __repr__(self):
        return f"Gauge({self.to_dict()!r})"


class _Substitution:
    """The algebra map b -> phi(b'), xi -> psi(b', xi') on form-0 elements, truncated to a box."""

    def __init__(self, gauge: Gauge, N, B):
        self.m, self.N, self.B = gauge.m, N, B
        self.phi = [p.as_element().terms for p in gauge.phi]
        self.psi = [el.terms for el in gauge.psi]
        self.unit = {((), (), _zero_exps(self.m)): Fraction(1)}
        self._powers = {}
        self._words = {(): self.unit}

    def _mul(self, a, b):
        return mul_terms(a, b, self.N, self.B)

    def power(self, i, k):
        key = (i, k)
        if key not in self._powers:
            self._powers[key] = self.unit if k == 0 else self._mul(self.power(i, k - 1), self.phi[i])
        return self._powers[key]

    def word(self, w):
        if w not in self._words:
            self._words[w] = self._mul(self.word(w[:-1]), self.psi[w[-1] - 1])
        return self._words[w]

    def base(self, exps):
        out = self.unit
        for i, k in enumerate(exps):
            if k:
                out = self._mul(out, self.power(i, k))
        return out

    def __call__(self, terms):
        out = {}
        for (f, w, e), c in terms.items():
            if f:
                raise ValueError("substitution only acts on form-0 elements")
            for key, v in self._mul(self.base(e), self.word(w)).items():
                s = out.get(key, 0) + c * v
                if s:
                    out[key] = s
                else:
                    del out[key]
        return out


def _add_into(target, source, scale=1):
    for k, v in source.items():
        s = target.get(k, 0) + scale * v
        if s:
            target[k] = s
        else:
            target.pop(k, None)


def _truncated_inverse(J, m, B):
    """Inverse of a matrix of polynomials in the ring truncated above base degree B."""
    J0 = [[J[r][c].constant_term() for c in range(m)] for r in range(m)]
    J0inv = invert_matrix(J0)
    zero = _zero_exps(m)

    def const(x):
        return {((), (), zero): Fraction(x)} if x else {}

    def matmul(a, b):
        out = [[{} for _ in range(m)] for _ in range(m)]
        for r in range(m):
            for c in range(m):
                acc = {}
                for k in range(m):
                    _add_into(acc, mul_terms(a[r][k], b[k][c], None, B))
                out[r][c] = acc
        return out

    inv0 = [[const(J0inv[r][c]) for c in range(m)] for r in range(m)]
    # J = J0 (1 + M) with M = J0^{-1}(J - J0) of positive base degree
    rest = [[{k: v for k, v in J[r][c].as_element().terms.items() if sum(k[2])} for c in range(m)] for r in range(m)]
    M = matmul(inv0, rest)
    neg_M = [[{k: -v for k, v in M[r][c].items()} for c in range(m)] for r in range(m)]
    series = [[const(int(r == c)) for c in range(m)] for r in range(m)]
    power = series
    for _ in range(B):
        power = matmul(power, neg_M)
        for r in range(m):
            for c in range(m):
                _add_into(series[r][c], power[r][c])
    return matmul(series, inv0)


def gauge_gk(theta: GKForm, gauge: Gauge) -> GKForm:
    """Transport a GK form to the trivialization ``(b', xi')`` defined by ``gauge``.

    The new form is the unique ``theta'`` making the substitution map a chain
    map, ``D' o Phi = Phi o D``. Evaluating both sides on ``xi_l`` and reading
    the ``db'_j`` coefficient gives

        sum_k J_lk theta'_j(xi'_k) + (nonlinear part of psi_l under theta'_j)
            = sum_i J_ij Phi(theta_i(xi_l)) - d psi_l / d b'_j,

    which is triangular in fiber degree and is solved by fixed-point iteration.
    """
    m, N, B = theta.m, theta.fiber_trunc, theta.base_trunc
    if gauge.m != m:
        raise DimensionMismatch(f"gauge on a chart of dimension {gauge.m}, GK form on {m}")
    J = gauge.jacobian()
    Jinv = _truncated_inverse(J, m, B)
    J_terms = [[J[r][c].as_element(N, B).terms for c in range(m)] for r in range(m)]
    sub = _Substitution(gauge, N, B)
    pulled = [[sub(theta.theta[i][l].terms) for l in range(m)] for i in range(m)]
    nonlinear = [{k: v for k, v in el.items() if len(k[1]) >= 2} for el in gauge.psi]

    new_theta = []
    for j in range(m):
        known = []
        for l in range(m):
            acc = {}
            for i in range(m):
                _add_into(acc, mul_terms(J_terms[i][j], pulled[i][l], N, B))
            dpsi = base_derivative_terms(gauge.psi[l].terms, j + 1)
            _add_into(acc, {k: v for k, v in dpsi.items() if len(k[1]) <= N and sum(k[2]) <= B}, -1)
            known.append(acc)
        X = [{} for _ in range(m)]
        for _ in range(N + 1):
            resid = []
            for l in range(m):
                r = dict(known[l])
                _add_into(r, leibniz_terms(nonlinear[l], X, N, B), -1)
                resid.append(r)
            new_X = []
            for k in range(m):
                acc = {}
                for l in range(m):
                    _add_into(acc, mul_terms(Jinv[k][l], resid[l], N, B))
                new_X.append(acc)
            if new_X == X:
                break
            X = new_X
        new_theta.append([DGAElement(m, N, B, x) for x in X])
    return GKForm(new_theta, N, B)


def compose_gauges(g: Gauge, h: Gauge, box=None) -> Gauge:
    """Apply ``g`` first, then ``h``: ``gauge_gk(gauge_gk(t, g), h) == gauge_gk(t, compose_gauges(g, h))``.

    ``box = (N, B)`` truncates the composite to what an (N, B) GK form can see.
    """
    if g.m != h.m:
        raise DimensionMismatch("gauges on different charts")
    m = g.m
    N, B = (None, None) if box is None else box
    sub = _Substitution(h, None if box is None else N + 1, None if box is None else B + 2)
    phi = [BasePoly(m, {e: c for (_, _, e), c in sub(p.as_element().terms).items()}) for p in g.phi]
    if box is not None:
        sub = _Substitution(h, N + 1, B + 1)
    psi = [DGAElement(m, None, None, sub(el.terms)) for el in g.psi]
    return Gauge(phi, psi)


def random_gauge(rng, m, *, base_degree=2, fiber_degree=2, coeff_range=2, density=0.5):
    """Random gauge: invertible linear base map plus a polynomial tail, psi lifted linearly
    with random higher fiber terms whose coefficients have degree <= 1."""
    zero = _zero_exps(m)
    while True:
        lin = [[Fraction(rng.randint(-2, 2)) for _ in range(m)] for _ in range(m)]
        try:
            invert_matrix(lin)
            break
        except SingularLinearPart:
            continue
    monos = [e for d in range(2, base_degree + 1) for e in product(range(d + 1), repeat=m) if sum(e) == d]
    phi = []
    for l in range(m):
        terms = {tuple(int(k == j) for k in range(m)): lin[l][j] for j in range(m)}
        for e in monos:
            if rng.random() < density:
                terms[e] = Fraction(rng.randint(-coeff_range, coeff_range), rng.choice((1, 2)))
        phi.append(BasePoly(m, terms))
    low = [zero] + [tuple(int(k == j) for k in range(m)) for j in range(m)]
    extra = []
    for _ in range(m):
        terms = {}
        for d in range(2, fiber_degree + 1):
            for w in product(range(1, m + 1), repeat=d):
                for e in low:
                    if rng.random() < density / 2:
                        terms[((), tuple(w), e)] = Fraction(rng.randint(-coeff_range, coeff_range))
        extra.append(DGAElement(m, None, None, terms))
    return Gauge.linear_lift(phi, extra)
