"""Acceptance suite: one printed PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""

import math
import random
import time
from fractions import Fraction

import pytest

from ncdisk.atiyah import coboundary_solve, omega2_extract
from ncdisk.autgrp import NCAutomorphism, aut_abelianize, aut_compose, aut_invert, comm_compose, random_automorphism
from ncdisk.chart import gauge_gk, random_gauge, tautological_gk
from ncdisk.derlie import NCDerivation, der_apply, der_bracket, der_graded_dim
from ncdisk.lcs import ci_thickening_dims, in_lcs_ideal, lcs_ideal_component, lcs_quotient_table
from ncdisk.ncconn import (
    connection_from_gk,
    flat_sections,
    flatness_check,
    perturb,
    products_closed,
    validate_twisted_shape,
)
from ncdisk.ncseries import NCSeries, random_series, series_parse
from ncdisk.oracle import all_words, all_words_up_to, dense_rank, oracle_comm_quotient_dims, oracle_lcs_dims, oracle_leibniz_apply

SEED = 20240


def report(number, title, ok, detail, seconds):
    status = "PASS" if ok else "FAIL"
    print(f"\ncriterion {number} [{status}] {title}: {detail} ({seconds:.1f}s)", flush=True)
    return ok


def timed(fn):
    start = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - start


def lcs_oracle_equivalence():
    cases = [(2, 4, 5), (3, 3, 4)]
    mismatched = [c for c in cases if lcs_quotient_table(c[1], c[2], c[0]) != oracle_lcs_dims(*c)]
    return not mismatched, f"{len(cases) - len(mismatched)}/{len(cases)} tables identical"


def abelianization_kernel_law():
    bad = []
    for n in (1, 2, 3):
        for d in range(1, 6):
            if lcs_ideal_component(2, d, n).dim != n**d - math.comb(n + d - 1, d):
                bad.append((n, d))
    return not bad, f"15 slices checked, mismatches {bad}"


def derivation_dimension_law():
    bad = []
    for n in (1, 2, 3):
        for m in range(5):
            # images of the elementary derivations x_i -> w, |w| = m + 1, read on the generators
            rows = []
            for i in range(1, n + 1):
                for w in all_words(n, m + 1):
                    images = [{w: 1} if j == i else {} for j in range(1, n + 1)]
                    rows.append([c for x in range(1, n + 1) for c in oracle_leibniz_apply(images, (x,), n, m + 1)])
            expected = n ** (m + 2)
            if not der_graded_dim(n, m) == dense_rank(rows) == expected:
                bad.append((n, m))
    return not bad, f"15 (n, m) pairs checked, mismatches {bad}"


def group_and_lie_axioms():
    rng = random.Random(SEED)
    n, N = 2, 5
    identity = NCAutomorphism.identity(n, N)
    inverse_ok = sum(
        aut_compose(g, aut_invert(g)) == identity for g in (random_automorphism(rng, n, N) for _ in range(200))
    )
    jacobi_ok = 0
    for _ in range(200):
        a, b, c = (NCDerivation([random_series(rng, n, N, min_degree=1, density=0.3) for _ in range(n)]) for _ in range(3))
        total = der_bracket(a, der_bracket(b, c)) + der_bracket(b, der_bracket(c, a)) + der_bracket(c, der_bracket(a, b))
        jacobi_ok += total == NCDerivation.zero(n, N)
    ab_ok = 0
    for _ in range(100):
        g, h = random_automorphism(rng, n, N), random_automorphism(rng, n, N)
        ab_ok += aut_abelianize(aut_compose(g, h)) == comm_compose(aut_abelianize(g), aut_abelianize(h))
    filt_ok = 0
    for _ in range(100):
        g = random_automorphism(rng, n, N)
        k = rng.randint(2, 3)
        d = rng.randint(k, N)
        v = NCSeries.zero(n, N)
        for b in lcs_ideal_component(k, d, n).basis_series(N):
            v = v + b.scale(Fraction(rng.randint(-3, 3)))
        filt_ok += in_lcs_ideal(g(v), k)
    ok = (inverse_ok, jacobi_ok, ab_ok, filt_ok) == (200, 200, 100, 100)
    return ok, f"inverse {inverse_ok}/200, Jacobi {jacobi_ok}/200, abelianization {ab_ok}/100, filtration {filt_ok}/100"


def flatness_suite():
    taut_ok = taut_total = 0
    for n in (1, 2):
        for N in range(1, 5):
            for B in range(4):
                c = connection_from_gk(tautological_gk(n, N, B))
                taut_total += 1
                taut_ok += bool(flatness_check(c)) and bool(validate_twisted_shape(c))
    rng = random.Random(SEED)
    gauged = []
    for t in range(20):
        n = 1 + t % 2
        gauged.append(connection_from_gk(gauge_gk(tautological_gk(n, 4, 3), random_gauge(rng, n))))
    gauge_ok = sum(bool(flatness_check(c)) and bool(validate_twisted_shape(c)) for c in gauged)
    # one variant per nonzero first-order entry db_i x_j of D(x_l), on each two-dimensional gauge
    variants = caught = 0
    for c in gauged:
        if c.m != 2:
            continue
        for l, i, word, _ in c.nabla(1):
            variants += 1
            caught += not flatness_check(perturb(c, i, word, l))
        for l in (1, 2):
            variants += 1
            caught += not flatness_check(perturb(c, 1, (1, 2), l))
    ok = taut_ok == taut_total and gauge_ok == 20 and caught == variants and variants > 0
    return ok, f"tautological {taut_ok}/{taut_total}, gauged {gauge_ok}/20, corrupted caught {caught}/{variants}"


def kernel_recovery_census():
    parts = []
    ok = True
    for n in (1, 2):
        sections = flat_sections(connection_from_gk(tautological_gk(n, 3, 3)), 3, 3)
        census = sections.count_by_fiber_degree()
        closed, products = products_closed(sections)
        ok &= census == {d: n**d for d in range(4)} and closed
        parts.append(f"n={n} census {[census.get(d, 0) for d in range(4)]} closed over {products} products")
    return ok, "; ".join(parts)


def atiyah_layer():
    taut_zero = omega2_extract(connection_from_gk(tautological_gk(2, 4, 3))).is_zero()
    rng = random.Random(SEED)
    found = {1: 0, 2: 0}
    for t in range(10):
        n = 1 + t % 2
        w = omega2_extract(connection_from_gk(gauge_gk(tautological_gk(n, 4, 3), random_gauge(rng, n))))
        result = coboundary_solve(w, w.max_base_degree() + 1)
        if result:
            # coboundary_solve re-verifies internally; check again here
            assert result.witness.differential() == w
            found[n] += 1
    ok = taut_zero and sum(found.values()) == 10
    return ok, f"tautological zero {taut_zero}, witnesses n=1 {found[1]}/5, n=2 {found[2]}/5"


def leibniz_oracle():
    rng = random.Random(SEED)
    agree = 0
    for _ in range(500):
        n, N = rng.randint(1, 3), rng.randint(1, 4)
        images = [random_series(rng, n, N, density=0.3) for _ in range(n)]
        word = tuple(rng.randint(1, n) for _ in range(rng.randint(0, N)))
        got = der_apply(NCDerivation(images), NCSeries(n, N, {word: 1}))
        want = oracle_leibniz_apply([dict(s.items()) for s in images], word, n, N)
        agree += [got.coeff(w) for w in all_words_up_to(n, N)] == want
    return agree == 500, f"{agree}/500 pairs agree"


def complete_intersection_sanity():
    dmax = 5
    f = series_parse("x1 + x1*x2 - x2*x1", 2, dmax)
    row = ci_thickening_dims([f], dmax).rows["abelianized"]
    expected = oracle_comm_quotient_dims([{(1, 0): 1}], 2, dmax)
    return row == expected, f"abelianized row {list(row)}, commutative quotient {list(expected)}"


CRITERIA = [
    (1, "LCS oracle equivalence", lcs_oracle_equivalence),
    (2, "abelianization kernel law", abelianization_kernel_law),
    (3, "derivation dimension law", derivation_dimension_law),
    (4, "group and Lie axioms", group_and_lie_axioms),
    (5, "flatness suite", flatness_suite),
    (6, "kernel-recovery census", kernel_recovery_census),
    (7, "Atiyah layer", atiyah_layer),
    (8, "Leibniz oracle", leibniz_oracle),
    (9, "complete-intersection sanity", complete_intersection_sanity),
]

# Two-dimensional gauges give a quadratic part that is only covariantly closed,
# so the plain de Rham primitive does not exist. See README, "Known failures".
KNOWN_FAILURES = {7}


def _params():
    for number, title, fn in CRITERIA:
        marks = [pytest.mark.xfail(strict=True, reason="no plain primitive for n=2 gauges")] if number in KNOWN_FAILURES else []
        yield pytest.param(number, title, fn, id=f"criterion_{number}", marks=marks)


@pytest.mark.parametrize("number,title,fn", list(_params()))
def test_criterion(number, title, fn):
    ok, detail, seconds = timed(fn)
    assert report(number, title, ok, detail, seconds), detail


if __name__ == "__main__":
    results = [report(num, title, *timed(fn)) for num, title, fn in CRITERIA]
    print(f"\n{sum(results)}/{len(results)} criteria pass")
