# ------ tests/test_vfparse.py ------

import math

import numpy as np
import pytest

from src.errors import ArityError, FieldSyntaxError, NumericError, UnknownIdentifier
from src.vfparse.parser import eval_field, parse_field


class TestParseField:
    def test_cubic_field(self):
        expr = parse_field('x - x^3', 1)
        assert expr.arity == 1
        assert eval_field(expr, [2.0]) == pytest.approx(-6.0)

    def test_unary_minus_binds_looser_than_power(self):
        assert eval_field(parse_field('-x^2', 1), [3.0]) == pytest.approx(-9.0)

    def test_power_is_right_associative(self):
        assert eval_field(parse_field('2^3^2', 1), [0.0]) == pytest.approx(512.0)

    def test_precedence_of_products(self):
        assert eval_field(parse_field('1 + 2*3 - 4/2', 1), [0.0]) == pytest.approx(5.0)

    def test_two_dimensional_damped_oscillator(self):
        expr = parse_field('x - x^3 - 0.5*y', 2)
        assert expr.indices == (1, 2)
        assert eval_field(expr, [1.0, 2.0]) == pytest.approx(-1.0)

    def test_indexed_names(self):
        expr = parse_field('x1 * x4', 4)
        assert expr.arity == 4
        assert eval_field(expr, [2.0, 0.0, 0.0, 3.0]) == pytest.approx(6.0)

    def test_functions(self):
        expr = parse_field('sin(x) + cos(x) + exp(0) + tanh(0) + abs(-2) + sqrt(4)', 1)
        assert eval_field(expr, [0.0]) == pytest.approx(6.0)

    def test_scientific_literals(self):
        assert eval_field(parse_field('1.5e2 + .5', 1), [0.0]) == pytest.approx(150.5)

    def test_printed_form_reparses_to_same_values(self):
        expr = parse_field('x - x^3 - 0.5*y', 2)
        again = parse_field(str(expr), 2)
        for point in ([0.3, -1.2], [1.7, 0.4], [-2.0, 2.0]):
            assert eval_field(again, point) == eval_field(expr, point)

    @pytest.mark.parametrize('text, dim', [
        ('-x^2', 1),
        ('2^3^2', 1),
        ('1 + 2*3 - 4/2', 1),
        ('x - x^3 - 0.5*y', 2),
        ('-(x1 - x2)^2 / sqrt(abs(x3) + 1e-5)', 3),
    ])
    def test_printed_form_reparses_to_same_tree(self, text, dim):
        expr = parse_field(text, dim)
        assert parse_field(str(expr), dim).ast == expr.ast

    def test_batch_evaluation(self):
        expr = parse_field('x^2', 1)
        values = expr.evaluate(np.array([[1.0], [2.0], [3.0]]))
        np.testing.assert_allclose(values, [1.0, 4.0, 9.0])

    def test_constant_broadcasts_over_batch(self):
        values = parse_field('3', 2).evaluate(np.zeros((4, 2)))
        assert values.shape == (4,)


class TestParseErrors:
    def test_dangling_operator_reports_position(self):
        with pytest.raises(FieldSyntaxError) as info:
            parse_field('x +', 1)
        assert info.value.position == 4

    def test_unbalanced_parenthesis(self):
        with pytest.raises(FieldSyntaxError):
            parse_field('(x + 1', 1)

    def test_bad_character(self):
        with pytest.raises(FieldSyntaxError) as info:
            parse_field('x $ 2', 1)
        assert info.value.position == 3

    def test_empty_expression(self):
        with pytest.raises(FieldSyntaxError):
            parse_field('  ', 1)

    def test_variable_exponent_rejected(self):
        with pytest.raises(FieldSyntaxError):
            parse_field('2^x', 1)

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifier) as info:
            parse_field('x + w', 1)
        assert info.value.name == 'w'

    def test_unknown_function(self):
        with pytest.raises(UnknownIdentifier):
            parse_field('log(x)', 1)

    def test_arity_exceeds_dimension(self):
        with pytest.raises(ArityError):
            parse_field('y', 1)

    def test_non_finite_result(self):
        with pytest.raises(NumericError):
            eval_field(parse_field('1/x', 1), [0.0])

    def test_nan_from_sqrt(self):
        with pytest.raises(NumericError):
            eval_field(parse_field('sqrt(x)', 1), [-1.0])

    def test_short_point(self):
        with pytest.raises(ValueError):
            eval_field(parse_field('x*y', 2), [1.0])


def test_exp_matches_math():
    assert eval_field(parse_field('exp(x)', 1), [1.0]) == pytest.approx(math.e)
