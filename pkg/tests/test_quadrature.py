"""
Tests for quadrature rules built from multiplication matrices.

Covers: the basic rule and its Gaussian properties, bilinear and product
forms, reweighted rules, endpoint clearance and improper integrals.
"""

import math
import os

import numpy as np
import pytest

import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "../src"))

from opquad.core.basis import LAGUERRE, jacobi_matrix
from opquad.core.errors import NodeTooCloseError, SingularNodeError, UsageError, ZeroWeightingError
from opquad.core.opmatrix import basis_vector
from opquad.core.quadrature import (
    NEGATIVE_WEIGHT_TOLERANCE,
    QuadratureRule,
    check_clearance,
    default_guard,
    endpoint_clearance,
    integrate_basic,
    integrate_bilinear,
    integrate_element,
    integrate_improper,
    integrate_product,
    integrate_reweighted,
    operator_matrix,
    rule_from_matrix,
    rule_to_dict,
    substitute,
    weighting_coefficients,
)
from opquad.core.spectral import eigh, entry_of_function
from opquad.functions.expression import parse
from opquad.functions.registry import compose, resolve

SQRT_PI = math.sqrt(math.pi)
F1_INTEGRAL = SQRT_PI / 2 * math.exp(-0.25)
E_E1 = 0.5963473623231940

ID = resolve("id")


def rule_for(g, n):
    return rule_from_matrix(eigh(operator_matrix(LAGUERRE, g, n)))


@pytest.fixture(scope="module")
def inside_matrices():
    """M_40[g] for the four inside functions, truncated per test."""
    return {name: operator_matrix(LAGUERRE, resolve(name), 40) for name in ("sqrt", "id", "x15", "square")}


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------

class TestRuleFromMatrix:
    def test_two_point_gauss_laguerre(self):
        rule = rule_for(ID, 1)
        s = math.sqrt(2.0)
        np.testing.assert_allclose(rule.nodes, [2 - s, 2 + s], rtol=1e-14)
        np.testing.assert_allclose(rule.weights, [(2 + s) / 4, (2 - s) / 4], rtol=1e-13)
        assert rule.weighting == "1"
        assert rule.order == 1
        assert rule.inside_function == "id"

    def test_single_node(self):
        rule = rule_for(ID, 0)
        assert rule.nodes.tolist() == [1.0]
        assert rule.weights.tolist() == [1.0]

    @pytest.mark.parametrize("points", [2, 5, 10, 20])
    def test_matches_laggauss(self, points):
        rule = rule_for(ID, points - 1)
        ref_nodes, ref_weights = np.polynomial.laguerre.laggauss(points)
        np.testing.assert_allclose(rule.nodes, ref_nodes, rtol=1e-10)
        np.testing.assert_allclose(rule.weights, ref_weights, rtol=1e-10, atol=1e-14)

    def test_sqrt_rule(self):
        rule = rule_for(resolve("sqrt"), 2)
        assert len(rule.nodes) == 3
        assert np.all(rule.nodes > 0)
        assert rule.weights.sum() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("name", ["sqrt", "id", "x15", "square"])
    def test_weights_normalized_and_nonnegative(self, name, inside_matrices):
        rule = rule_from_matrix(eigh(inside_matrices[name].truncate(20)))
        assert np.all(rule.weights >= -NEGATIVE_WEIGHT_TOLERANCE)
        assert abs(rule.weights.sum() - 1.0) <= 1e-12

    def test_zero_weighting_at_node(self):
        dec = eigh(jacobi_matrix(LAGUERRE, 3))
        with pytest.raises(ZeroWeightingError):
            rule_from_matrix(dec, parse("0"), basis_vector(LAGUERRE, 0, 3))

    def test_coefficient_length_checked(self):
        dec = eigh(jacobi_matrix(LAGUERRE, 3))
        with pytest.raises(UsageError):
            rule_from_matrix(dec, parse("1"), [1.0, 0.0])

    def test_rule_is_immutable(self):
        rule = rule_for(ID, 3)
        with pytest.raises(ValueError):
            rule.weights[0] = 0.0

    def test_mismatched_lengths(self):
        with pytest.raises(UsageError):
            QuadratureRule(nodes=[1.0, 2.0], weights=[1.0])

    def test_to_dict(self):
        data = rule_to_dict(rule_for(ID, 2))
        assert data["basis"] == "laguerre"
        assert data["g"] == "id"
        assert data["h"] == "1"
        assert data["n"] == 2
        assert len(data["nodes"]) == len(data["weights"]) == 3
        assert data["coefficients"] == [1.0, 0.0, 0.0]


# ---------------------------------------------------------------------------
# Basic rule
# ---------------------------------------------------------------------------

class TestIntegrateBasic:
    @pytest.mark.parametrize("n", [1, 4, 9])
    def test_gaussian_exactness(self, n):
        for k in range(2 * n + 2):
            value = integrate_basic(LAGUERRE, ID, parse(f"x^{k}"), n)
            assert value == pytest.approx(math.factorial(k), rel=1e-8)

    def test_gaussian_inequality_for_even_monomials(self):
        for n in range(0, 21):
            rule = rule_for(ID, n)
            for m in range(0, 11):
                value = rule.apply(lambda x: x ** (2 * m))
                assert value <= math.factorial(2 * m) * (1 + 1e-6)

    def test_constant_one(self):
        assert integrate_basic(LAGUERRE, ID, parse("1"), 7) == pytest.approx(1.0, abs=1e-12)

    def test_equals_matrix_function_entry(self, inside_matrices):
        f = parse("cos(x)/(1+x)")
        dec = eigh(inside_matrices["sqrt"].truncate(10))
        via_rule = rule_from_matrix(dec).apply(f)
        assert via_rule == pytest.approx(entry_of_function(dec, f, 0, 0), abs=1e-12)
        assert integrate_basic(LAGUERRE, resolve("sqrt"), f, 10) == pytest.approx(via_rule, abs=1e-7)

    def test_square_inside_recovers_f1(self):
        F = compose("f1", "g4")
        assert integrate_basic(LAGUERRE, resolve("g4"), F, 30) == pytest.approx(F1_INTEGRAL, abs=1e-2)

    def test_singular_node(self):
        with pytest.raises(SingularNodeError):
            integrate_basic(LAGUERRE, ID, parse("log(x - 10)"), 5)

    def test_element_form(self):
        assert integrate_element(LAGUERRE, ID, parse("x"), 1, 2, 4) == pytest.approx(2.0, abs=1e-12)
        assert integrate_element(LAGUERRE, ID, parse("x^2"), 0, 0, 1) == pytest.approx(2.0, abs=1e-12)


class TestBilinearAndProduct:
    def test_bilinear_first_unit_vectors_is_basic(self):
        e0 = basis_vector(LAGUERRE, 0, 6)
        f = resolve("f1")
        assert integrate_bilinear(LAGUERRE, ID, f, e0, e0, 6) == pytest.approx(
            integrate_basic(LAGUERRE, ID, f, 6), abs=1e-14)

    def test_bilinear_recovers_entries(self):
        e0, e1 = basis_vector(LAGUERRE, 0, 4), basis_vector(LAGUERRE, 1, 4)
        x = parse("x")
        assert integrate_bilinear(LAGUERRE, ID, x, e0, e1, 4) == pytest.approx(1.0, abs=1e-12)
        assert integrate_bilinear(LAGUERRE, ID, x, e1, e1, 4) == pytest.approx(3.0, abs=1e-12)

    def test_bilinear_accepts_plain_arrays(self):
        u = np.array([1.0, 0.0, 0.0])
        assert integrate_bilinear(LAGUERRE, ID, parse("x"), u, u, 2) == pytest.approx(1.0, abs=1e-12)

    def test_product_of_identities(self):
        x = parse("x")
        assert integrate_product(LAGUERRE, ID, ID, x, x, 3) == pytest.approx(2.0, abs=1e-12)

    def test_product_with_unit_factor_is_basic(self):
        g = resolve("sqrt")
        f = parse("exp(-x)")
        assert integrate_product(LAGUERRE, g, ID, f, parse("1"), 6) == pytest.approx(
            integrate_basic(LAGUERRE, g, f, 6), abs=1e-12)

    def test_square_roots_multiply_back(self):
        # sqrt(M) sqrt(M) = M, so the corner entry is the second moment
        root = parse("sqrt(x)")
        square = resolve("square")
        assert integrate_product(LAGUERRE, square, square, root, root, 20) == pytest.approx(2.0, rel=1e-8)


# ---------------------------------------------------------------------------
# Reweighted rules
# ---------------------------------------------------------------------------

class TestReweighted:
    def test_substitute_is_plain_composition(self):
        assert substitute(parse("x^2"), parse("x + 1"))(2.0) == pytest.approx(9.0)
        assert substitute(math.exp, parse("2*x"))(0.5) == pytest.approx(math.e)

    def test_constant_weighting_coefficients(self):
        v = weighting_coefficients(LAGUERRE, ID, parse("2"), 3)
        assert v.values.tolist() == [2.0, 0.0, 0.0, 0.0]

    def test_unit_weighting_matches_basic(self):
        F = resolve("f1")
        basic = integrate_basic(LAGUERRE, resolve("sqrt"), F, 8)
        assert integrate_reweighted(LAGUERRE, resolve("sqrt"), F, resolve("h1"), 8) == pytest.approx(basic, abs=1e-14)

    def test_weights_nonnegative(self):
        dec = eigh(jacobi_matrix(LAGUERRE, 12))
        h2 = resolve("h2")
        rule = rule_from_matrix(dec, h2, weighting_coefficients(LAGUERRE, ID, h2, 12))
        assert np.all(rule.weights >= -NEGATIVE_WEIGHT_TOLERANCE)
        assert rule.weighting == "h2"

    def test_rule_records_weighting_coefficients(self):
        h2 = resolve("h2")
        v = weighting_coefficients(LAGUERRE, ID, h2, 6)
        rule = rule_from_matrix(eigh(jacobi_matrix(LAGUERRE, 6)), h2, v)
        np.testing.assert_array_equal(rule.coefficients, v.values)
        assert not rule.coefficients.flags.writeable
        assert rule_to_dict(rule)["coefficients"] == v.values.tolist()

    def test_exponential_growth_with_h2(self):
        f2, h2 = resolve("f2"), resolve("h2")
        early = abs(integrate_reweighted(LAGUERRE, ID, f2, h2, 4) - math.pi / 2)
        late = abs(integrate_reweighted(LAGUERRE, ID, f2, h2, 30) - math.pi / 2)
        assert late < early
        assert late < 0.3

    def test_zero_weighting(self):
        with pytest.raises(ZeroWeightingError):
            integrate_reweighted(LAGUERRE, ID, parse("1"), parse("0"), 4)


# ---------------------------------------------------------------------------
# Endpoints and improper integrals
# ---------------------------------------------------------------------------

class TestEndpoints:
    @pytest.mark.parametrize("name", ["sqrt", "id", "x15", "square"])
    @pytest.mark.parametrize("n", [2, 10, 20, 40])
    def test_zero_is_never_a_node(self, name, n, inside_matrices):
        rule = rule_from_matrix(eigh(inside_matrices[name].truncate(n)))
        assert rule.nodes[0] > 0
        assert endpoint_clearance(rule, 0.0) > 0

    def test_clearance_at_a_node_is_zero(self):
        rule = rule_for(ID, 4)
        assert endpoint_clearance(rule, rule.nodes[0]) == 0.0

    def test_sqrt_clearance_is_smallest_node(self):
        rule = rule_for(resolve("sqrt"), 2)
        assert endpoint_clearance(rule, 0.0) == rule.nodes[0]

    def test_guard(self):
        rule = rule_for(ID, 4)
        assert default_guard(-1.0) == pytest.approx(2e-8)
        assert check_clearance(rule, 0.0) == pytest.approx(rule.nodes[0])
        with pytest.raises(NodeTooCloseError):
            check_clearance(rule, 0.0, guard_tol=1.0)


class TestImproper:
    def test_inverse_square_root_increases_towards_gamma_half(self):
        f = parse("x^(-1/2)")
        values = [integrate_improper(LAGUERRE, ID, f, 0.0, 0.5, n) for n in (5, 10, 15, 20, 25)]
        errors = [SQRT_PI - v for v in values]
        assert all(e > 0 for e in errors)
        assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
        assert errors[-1] < 0.25

    def test_bounded_integrand(self):
        assert integrate_improper(LAGUERRE, ID, parse("1"), 0.0, 0.0, 6) == pytest.approx(1.0, abs=1e-12)

    def test_singularity_outside_range(self):
        value = integrate_improper(LAGUERRE, ID, parse("1/(1+x)"), -1.0, 1.0, 25)
        assert value == pytest.approx(E_E1, abs=1e-3)

    def test_node_too_close(self):
        rule = rule_for(ID, 5)
        c = float(rule.nodes[0])
        with pytest.raises(NodeTooCloseError):
            integrate_improper(LAGUERRE, ID, parse(f"1/abs(x - {c!r})"), c, 1.0, 5)

    @pytest.mark.parametrize("p", [-0.1, 1.5])
    def test_order_outside_unit_interval(self, p):
        with pytest.raises(UsageError):
            integrate_improper(LAGUERRE, ID, parse("x^(-1/2)"), 0.0, p, 5)
