import numpy as np
import pytest

from envelope import expr
from envelope.errors import ParseError, PoleFindingError, PoleProximityError


def ev(text, z):
    return expr.evaluate(expr.parse(text), z)


class TestParsing:
    @pytest.mark.parametrize("text,z,expected", [
        ("1+2*3", 0j, 7 + 0j),
        ("2*3^2", 0j, 18 + 0j),
        ("-z^2", 2 + 0j, -4 + 0j),
        ("(-z)^2", 2 + 0j, 4 + 0j),
        ("z^-2", 2 + 0j, 0.25 + 0j),
        ("2z", 3 + 0j, 6 + 0j),
        ("z(z+1)", 2 + 0j, 6 + 0j),
        ("1/2z", 4 + 0j, 2 + 0j),
        ("(1+2i)", 0j, 1 + 2j),
        ("(-1-2i)", 0j, -1 - 2j),
        ("(0+2i)*z", 1j, -2 + 0j),
        ("exp(0)", 5j, 1 + 0j),
        ("z/z/z", 4 + 0j, 0.25 + 0j),
        ("1 - 2 - 3", 0j, -4 + 0j),
    ])
    def test_evaluation_oracles(self, text, z, expected):
        assert ev(text, z) == pytest.approx(expected)

    def test_exponent_must_be_integer(self):
        with pytest.raises(ParseError):
            expr.parse("z^1.5")

    def test_no_exponent_chains(self):
        with pytest.raises(ParseError):
            expr.parse("z^2^3")

    def test_error_carries_position(self):
        with pytest.raises(ParseError) as err:
            expr.parse("1/(z-")
        assert err.value.position == 5

    def test_unknown_function_rejected(self):
        with pytest.raises(ParseError):
            expr.parse("sin(z)")

    def test_empty_input_rejected(self):
        with pytest.raises(ParseError):
            expr.parse("   ")

    def test_roundtrip_through_format(self, rng):
        texts = ["1/z^2", "(1+2i)z^3 - 4", "exp(1/z)", "z(z-1)(z+1)",
                 "(z^2+1)/(z-3)^2", "-z^-3 + 2/z"]
        zs = rng.uniform(-2, 2, 8) + 1j * rng.uniform(0.5, 2, 8)
        for text in texts:
            node = expr.parse(text)
            again = expr.parse(expr.format_expr(node))
            for z in zs:
                assert expr.evaluate(again, z) == pytest.approx(
                    expr.evaluate(node, z), rel=1e-12)


class TestEvaluation:
    def test_array_broadcast(self):
        zs = np.array([1 + 0j, 2 + 0j, 1j])
        out = ev("z^2 + 1", zs)
        assert isinstance(out, np.ndarray)
        np.testing.assert_allclose(out, zs ** 2 + 1)

    def test_scalar_returns_complex(self):
        out = ev("z+1", 2 + 0j)
        assert isinstance(out, complex)

    def test_pole_guard_scalar(self):
        with pytest.raises(PoleProximityError):
            ev("1/z", 1e-12 + 0j)

    def test_pole_guard_array(self):
        zs = np.array([1 + 0j, 1e-12 + 0j])
        with pytest.raises(PoleProximityError):
            ev("1/z", zs)

    def test_pole_guard_negative_power(self):
        with pytest.raises(PoleProximityError):
            ev("z^-1", 0j)

    def test_exclusion_override(self):
        node = expr.parse("1/z")
        assert expr.evaluate(node, 1e-12 + 0j, exclusion=1e-15) \
            == pytest.approx(1e12)

    def test_as_callable_vectorized(self):
        fn = expr.as_callable(expr.parse("exp(z)"))
        zs = np.linspace(0, 1, 5).astype(complex)
        np.testing.assert_allclose(fn(zs), np.exp(zs))


class TestDifferentiation:
    def test_quotient_string_oracle(self):
        out = expr.differentiate(expr.parse("1/z"))
        assert expr.format_expr(out) == "(-1 / z^2)"

    @pytest.mark.parametrize("text", [
        "z^3", "1/z", "exp(z)", "(z^2+1)/(z-3)", "exp(1/z)",
        "(2+1i)z^4 - z", "1/(z-1)^2",
    ])
    def test_matches_central_difference(self, text, rng):
        node = expr.parse(text)
        deriv = expr.differentiate(node)
        h = 1e-5
        for _ in range(6):
            z = complex(rng.uniform(0.4, 1.6), rng.uniform(0.4, 1.6))
            fd = (expr.evaluate(node, z + h) - expr.evaluate(node, z - h)) \
                / (2 * h)
            assert expr.evaluate(deriv, z) == pytest.approx(fd, rel=1e-6,
                                                            abs=1e-8)

    def test_constant_derivative_is_zero(self):
        out = expr.differentiate(expr.parse("(3+4i)"))
        assert expr.evaluate(out, 2 + 1j) == 0


class TestPoleSet:
    def test_double_pole_from_product(self):
        records = expr.pole_set(expr.parse("1/((z-1)(z-1))"))
        assert len(records) == 1
        assert records[0].location == pytest.approx(1 + 0j, abs=1e-8)
        assert records[0].order == 2

    def test_cancellation_reduces_order(self):
        records = expr.pole_set(expr.parse("(z-1)/(z-1)^3"))
        assert [(r.order,) for r in records] == [(2,)]

    def test_triple_pole_cluster_polish(self):
        records = expr.pole_set(expr.parse("1/(z-1)^3"))
        assert len(records) == 1
        assert records[0].order == 3
        assert records[0].location == pytest.approx(1 + 0j, abs=1e-8)

    def test_conjugate_pair(self):
        records = expr.pole_set(expr.parse("1/(z^2+1)"))
        locs = sorted((r.location.real, r.location.imag) for r in records)
        assert locs[0][1] == pytest.approx(-1.0, abs=1e-10)
        assert locs[1][1] == pytest.approx(1.0, abs=1e-10)
        assert all(r.order == 1 for r in records)

    def test_exp_argument_defeats_analysis(self):
        assert expr.pole_set(expr.parse("exp(1/z)")) is None

    def test_entire_function_has_no_poles(self):
        assert expr.pole_set(expr.parse("z^2 + 1")) == []

    def test_any_exp_defeats_analysis(self):
        # even an entire exp reports unknown: the analysis covers
        # rational functions only
        assert expr.pole_set(expr.parse("exp(z)")) is None

    def test_zero_denominator_rejected(self):
        with pytest.raises(PoleFindingError):
            expr.pole_set(expr.parse("1/(z-z)"))

    def test_poles_sorted_and_complete(self):
        records = expr.pole_set(
            expr.parse("(2+0i)/((z-(1+1i))^2 (z+3))"))
        assert [r.order for r in records] == [1, 2]
        assert records[0].location == pytest.approx(-3 + 0j, abs=1e-8)
        assert records[1].location == pytest.approx(1 + 1j, abs=1e-8)

    def test_pure_power_pole_at_origin(self):
        records = expr.pole_set(expr.parse("1/z^5"))
        assert [(r.location, r.order) for r in records] == [(0j, 5)]

    def test_property_random_rationals_agree_with_roots(self, rng):
        for _ in range(10):
            roots = rng.uniform(-2, 2, 3) + 1j * rng.uniform(-2, 2, 3)
            text = "1/(" + "".join(
                f"(z-({r.real:.6f}{r.imag:+.6f}i))" for r in roots) + ")"
            records = expr.pole_set(expr.parse(text))
            found = sorted((r.location for r in records),
                           key=lambda c: (c.real, c.imag))
            want = sorted(roots, key=lambda c: (c.real, c.imag))
            assert len(found) == 3
            for a, b in zip(found, want):
                assert a == pytest.approx(b, abs=1e-6)
