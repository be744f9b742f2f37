"""End-to-end acceptance checks.

Each test exercises one advertised guarantee at its stated tolerance and
prints a single summary line; run with -rP to see the lines for passing
tests as well.
"""

import math

import numpy as np
import pytest

from envelope import boundary as bd
from envelope import expr
from envelope import extension as ext
from envelope import geometry as geom
from envelope import moments as mom
from envelope import quadrature as quad

SEED = 20260815

# first nonzero moment of z^-m on a circle around 0 sits at degree m-1,
# by the residue at 0 of z^(k-m); written down before the engine existed
LADDER_ORACLE = {1: 0, 2: 1, 3: 2, 4: 3, 5: 4, 6: 5, 7: 6, 8: 7}

ANNULUS = geom.DomainSpec(geom.circle(0j, 2.0), (geom.circle(0j, 0.5),))
UNIT_CIRCLE = geom.circle(0j, 1.0)


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n} {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    assert ok, line


def clit(c: complex) -> str:
    return f"({c.real:.6f}{c.imag:+.6f}i)"


def snap(c: complex) -> complex:
    """Round to the exact value the formatted literal will parse back to."""
    return complex(float(f"{c.real:.6f}"), float(f"{c.imag:.6f}"))


def test_criterion_1_residue_identities():
    worst = 0.0
    for m in range(1, 9):
        f = expr.parse(f"1/z^{m}")
        for k in range(0, 9):
            got = mom.moment(f, UNIT_CIRCLE, k)
            want = 2j * math.pi if k == m - 1 else 0j
            worst = max(worst, abs(got - want))
    report(1, worst <= 1e-10, f"max |moment - residue| = {worst:.3e} "
           f"over m=1..8, k=0..8 (tol 1e-10)")


def test_criterion_2_reciprocal_power_ladder():
    got = {}
    definitive = True
    for m in range(1, 9):
        verdict = mom.max_primitive_order(expr.parse(f"1/z^{m}"), ANNULUS)
        got[m] = verdict.max_order
        definitive = definitive and verdict.definitive
    ok = got == LADDER_ORACLE and definitive
    report(2, ok, f"max_order(1/z^m) = {got} vs oracle {LADDER_ORACLE}, "
           f"all definitive: {definitive}")


def test_criterion_3_three_way_equivalence_harness():
    rng = np.random.default_rng(SEED)
    ztol = mom.ZeroTolerance(1e-9, 1e-10)
    inconsistent = 0
    yes_count = 0
    no_count = 0
    worst_coeff = 0.0

    for _ in range(10):  # poles strictly outside the hull
        terms = []
        for _ in range(2):
            p = rng.uniform(3.0, 5.0) * np.exp(2j * math.pi * rng.uniform())
            c = complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) + 0.5
            o = int(rng.integers(1, 4))
            terms.append(f"{clit(c)}/(z-{clit(p)})^{o}")
        f = expr.parse(" + ".join(terms))
        rep = ext.cross_verify(f, ANNULUS, zero_tol=ztol)
        if rep.consistent and rep.verdict.all_orders:
            yes_count += 1
        else:
            inconsistent += 1

    for _ in range(10):  # one pole inside the hole
        p = snap(0.3 * rng.uniform() * np.exp(2j * math.pi * rng.uniform()))
        c = snap(complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) + 0.5)
        o = int(rng.integers(1, 5))
        f = expr.parse(f"{clit(c)}/(z-{clit(p)})^{o}")
        rep = ext.cross_verify(f, ANNULUS, zero_tol=ztol)
        comp = rep.decomposition.components[0]
        coeff_err = abs(comp.coefficients[o - 1] - c)
        worst_coeff = max(worst_coeff, coeff_err)
        degree_matches = rep.verdict.max_order == o - 1
        if rep.consistent and degree_matches and coeff_err < 1e-8:
            no_count += 1
        else:
            inconsistent += 1

    ok = inconsistent == 0 and yes_count == 10 and no_count == 10
    report(3, ok, f"{yes_count}/10 extendable and {no_count}/10 obstructed "
           f"rationals consistent, {inconsistent} inconsistencies, "
           f"worst Laurent coefficient error {worst_coeff:.3e}")


def test_criterion_4_extension_accuracy():
    rng = np.random.default_rng(SEED + 4)
    points = []
    while len(points) < 10:  # hole interior
        w = complex(rng.uniform(-0.35, 0.35), rng.uniform(-0.35, 0.35))
        if abs(w) < 0.35:
            points.append(w)
    while len(points) < 50:  # proper domain points
        w = complex(rng.uniform(-1.8, 1.8), rng.uniform(-1.8, 1.8))
        if 0.65 < abs(w) < 1.8:
            points.append(w)

    worst_rel = 0.0
    worst_pair = 0.0
    for spec in ("1/(z-4)", "(1+2i)/(z-(3+3i))^2", "1/(z-4) + 1/(z+3.5)^3"):
        f = expr.parse(spec)
        verdict = mom.max_primitive_order(f, ANNULUS)
        assert verdict.all_orders
        for w in points:
            v0 = ext.evaluate_extension(f, ANNULUS, w, verdict=verdict,
                                        which_contour=0)
            v1 = ext.evaluate_extension(f, ANNULUS, w, verdict=verdict,
                                        which_contour=1)
            direct = complex(f(w))
            worst_rel = max(worst_rel, abs(v0 - direct) / abs(direct))
            worst_pair = max(worst_pair, abs(v0 - v1))
    ok = worst_rel <= 1e-8 and worst_pair <= 2e-9
    report(4, ok, f"50 hull points x 3 rationals: relative error "
           f"{worst_rel:.3e} (tol 1e-8), contour discrepancy "
           f"{worst_pair:.3e} (tol 2e-9)")


def test_criterion_5_hull_correctness():
    disc = geom.DomainSpec(geom.circle(0j, 2.0), ())
    hulled = geom.simply_connected_hull(geom.rasterize(ANNULUS, 256))
    disc_grid = geom.rasterize(disc, 256)
    cellwise = np.array_equal(hulled.mask, disc_grid.mask)

    rng = np.random.default_rng(SEED + 5)
    invariants = True
    for _ in range(10):
        nx = ny = 64
        x = np.linspace(-1, 1, nx)
        y = np.linspace(-1, 1, ny)
        X, Y = np.meshgrid(x, y)
        cx, cy = rng.uniform(-0.2, 0.2, size=2)
        mask = (X - cx) ** 2 + (Y - cy) ** 2 < rng.uniform(0.5, 0.8) ** 2
        for _ in range(int(rng.integers(1, 4))):
            hx, hy = rng.uniform(-0.4, 0.4, size=2)
            hr = rng.uniform(0.05, 0.25)
            mask &= (X - hx) ** 2 + (Y - hy) ** 2 > hr ** 2
        grid = geom.GridDomain((-1.0, 1.0, -1.0, 1.0), nx, ny, mask)
        hull = geom.simply_connected_hull(grid)
        contains = bool(np.all(hull.mask[grid.mask]))
        idempotent = np.array_equal(geom.simply_connected_hull(hull).mask,
                                    hull.mask)
        invariants = invariants and contains and idempotent
    ok = cellwise and invariants
    report(5, ok, f"hull(annulus@256) == disc@256: {cellwise}; containment "
           f"and idempotence on 10 random masks: {invariants}")


def test_criterion_6_boundary_duality_and_parts():
    cases = [(f"z^{k}", (lambda z, k=k: z ** k), 4) for k in range(0, 4)]
    cases += [(f"1/z^{m}", (lambda z, m=m: np.reciprocal(z) ** m), m - 1)
              for m in range(1, 4)]
    cases += [("conj(z)", np.conj, 0)]

    depth_ok = True
    analytic_worst = 0.0
    rows = []
    for label, fn, want in cases:
        curve = bd.unit_circle_samples(fn, 256)
        tower = bd.primitive_tower(curve)
        match = (tower.pass_depth == tower.leading_zero_count
                 and tower.pass_depth == min(want, 4))
        depth_ok = depth_ok and match
        rows.append(f"{label}:{tower.pass_depth}")
        analytic_worst = max(analytic_worst, bd.analytic_ibp_residual(curve))

    ratios = []
    for fn in (np.conj, lambda z: np.reciprocal(z) ** 2):
        res = [bd.ibp_residual(bd.unit_circle_samples(fn, m, 0.3))
               for m in (256, 512)]
        ratios.append(res[0] / res[1])
    halving_ok = all(3.5 < r < 4.5 for r in ratios)

    ok = depth_ok and analytic_worst <= 1e-9 and halving_ok
    report(6, ok, f"tower depth == leading zeros for all of "
           f"[{', '.join(rows)}]; analytic parts residual "
           f"{analytic_worst:.3e} (tol 1e-9); discrete halving ratios "
           f"{[f'{r:.2f}' for r in ratios]} in [3.5, 4.5]")


def test_criterion_7_cauchy_transform_oracles():
    rng = np.random.default_rng(SEED + 7)
    points = [0.7 * math.sqrt(rng.uniform()) * np.exp(2j * math.pi
                                                      * rng.uniform())
              for _ in range(20)]
    worst_poly = 0.0
    for n in range(0, 7):
        curve = bd.unit_circle_samples(lambda z, n=n: z ** n, 64)
        for w in points:
            got = bd.cauchy_transform(curve, complex(w))
            worst_poly = max(worst_poly, abs(got - complex(w) ** n))

    conj_curve = bd.unit_circle_samples(np.conj, 64)
    worst_conj = max(abs(bd.cauchy_transform(conj_curve, complex(w)))
                     for w in points)
    ok = worst_poly <= 1e-9 and worst_conj <= 1e-9
    report(7, ok, f"transform of z^n data at 20 points: {worst_poly:.3e}; "
           f"of conj data: {worst_conj:.3e} (tol 1e-9)")


def test_criterion_8_chord_arc_and_difference_quotients():
    curve = bd.unit_circle_samples(lambda z: z ** 2, 1024)
    constant = bd.chord_arc_constant(curve)
    constant_ok = abs(constant - math.pi / 2) <= 0.02 * (math.pi / 2)

    rep = bd.difference_quotient_check(curve, constant=math.pi / 2)
    r = rep.residuals
    monotone = r[0] < r[1] < r[2] < r[3]
    ok = constant_ok and monotone and rep.bound_satisfied
    report(8, ok, f"chord-arc constant {constant:.5f} vs pi/2 (2%); "
           f"residuals over last 4 dyadic offsets decreasing: {monotone}; "
           f"bound with C=pi/2 held at every step: {rep.bound_satisfied}")


def test_criterion_9_derivative_ladder():
    rng = np.random.default_rng(SEED + 9)
    line_pts = [complex(rng.uniform(0.5, 2.0), rng.uniform(-1, 1))
                for _ in range(5)]
    ring_pts = [1.2 * np.exp(2j * math.pi * rng.uniform())
                for _ in range(5)]

    res = {
        "1/(z-5) at n=3": mom.derivative_check(expr.parse("1/(z-5)"), 3,
                                               line_pts),
        "z^2+2z at n=2": mom.derivative_check(expr.parse("z^2+2z"), 2,
                                              line_pts),
        "3z^3-1 at n=2": mom.derivative_check(expr.parse("3z^3-1"), 2,
                                              line_pts),
        "1/z^2 at n=1": mom.derivative_check(
            expr.parse("1/z^2"), 1, ring_pts, base=1 + 0j,
            path_builder=mom.ring_route),
    }
    worst = max(res.values())
    ok = worst <= 1e-5
    report(9, ok, "finite-difference ladder residuals: "
           + ", ".join(f"{k}: {v:.2e}" for k, v in res.items())
           + " (tol 1e-5, h=1e-4)")
