import math

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from finslerlab import expr, jets
from finslerlab.expr import (
    ArityError,
    BinOp,
    Call,
    ExprDomainError,
    ExprSyntaxError,
    Neg,
    NonSmoothFunctionError,
    Num,
    ScalarField,
    UnknownIdentifierError,
    Var,
    compile_field,
    evaluate,
    free_variables,
    parse,
    to_source,
)

XY = ["x1", "x2"]


def ev(source, **values):
    field = parse(source, sorted(values) if values else ["x1"])
    return evaluate(field, values)


def count_calls(node):
    if isinstance(node, Call):
        return 1 + sum(count_calls(a) for a in node.args)
    if isinstance(node, BinOp):
        return count_calls(node.left) + count_calls(node.right)
    if isinstance(node, Neg):
        return count_calls(node.operand)
    return 0


class TestParse:
    def test_pythagorean_identity_ast(self):
        field = parse("sin(x1)^2 + cos(x1)^2", ["x1"])
        assert count_calls(field.ast) == 2
        assert evaluate(field, {"x1": 0.7}) == pytest.approx(1.0, abs=1e-15)

    def test_syntax_error_offset(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse("x1 + * x2", XY)
        assert err.value.offset == 5

    def test_bh_density_expression(self):
        field = parse("(1 - 0.16*x1^2)^1.5", XY)
        assert evaluate(field, {"x1": 0.5, "x2": 0.0}) == pytest.approx(0.96**1.5)

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError):
            parse("x1 + y", XY)

    def test_unknown_function(self):
        with pytest.raises(UnknownIdentifierError):
            parse("spam(x1)", XY)

    def test_wrong_arity(self):
        with pytest.raises(ArityError):
            parse("sin(x1, x2)", XY)

    def test_abs_rejected_as_non_smooth(self):
        with pytest.raises(NonSmoothFunctionError, match="non-smooth"):
            parse("abs(x1)", XY)

    def test_trailing_input(self):
        with pytest.raises(ExprSyntaxError):
            parse("x1 x2", XY)

    def test_non_ascii_rejected(self):
        with pytest.raises(ExprSyntaxError):
            parse("x1 + π", XY)

    def test_empty_coordinates_rejected(self):
        with pytest.raises(ValueError):
            parse("1", [])

    def test_duplicate_coordinates_rejected(self):
        with pytest.raises(ValueError):
            parse("1", ["x1", "x1"])

    def test_reserved_coordinate_name_rejected(self):
        with pytest.raises(ValueError):
            parse("1", ["sin"])


class TestPrecedence:
    def test_multiplication_binds_tighter(self):
        assert ev("2+3*4") == 14.0

    def test_power_right_associative(self):
        assert ev("2^3^2") == 512.0

    def test_power_binds_above_unary_minus(self):
        assert ev("-2^2") == -4.0

    def test_power_above_multiplication(self):
        assert ev("2*3^2") == 18.0

    def test_division_left_associative(self):
        assert ev("8/4/2") == 1.0

    def test_subtraction_left_associative(self):
        assert ev("2-3-4") == -5.0

    def test_negative_exponent_literal(self):
        assert ev("2^-2") == 0.25


class TestEvaluate:
    def test_polynomial_jet_derivative(self):
        field = parse("x1^2", ["x1"])
        (x,) = jets.seed((0.5,), {0})
        # width-1 seed: partial slot 0 belongs to the only coordinate
        out = evaluate(field, {"x1": jets.Jet(0.5, (1.0,))})
        assert out.value == 0.25
        assert out.partials[0] == 1.0
        assert jets.standard_part(evaluate(field, {"x1": x.value})) == 0.25

    def test_constants(self):
        assert ev("pi") == math.pi
        assert ev("e") == math.e

    def test_log_domain_error(self):
        field = parse("log(x1)", ["x1"])
        with pytest.raises(ExprDomainError, match="log"):
            evaluate(field, {"x1": 0.0})

    def test_sqrt_domain_error(self):
        with pytest.raises(ExprDomainError):
            ev("sqrt(x1)", x1=-1.0)

    def test_division_by_zero(self):
        with pytest.raises(ExprDomainError, match="division by zero"):
            ev("1/x1", x1=0.0)

    def test_zero_base_negative_exponent(self):
        with pytest.raises(ExprDomainError):
            ev("x1^-1", x1=0.0)

    def test_non_integer_power_of_negative_base(self):
        with pytest.raises(ExprDomainError, match="non-integer power"):
            ev("x1^0.5", x1=-2.0)

    def test_functions_match_math(self):
        for name, fn in (("sinh", math.sinh), ("cosh", math.cosh), ("tanh", math.tanh)):
            assert ev(f"{name}(x1)", x1=0.3) == fn(0.3)

    def test_unassigned_variable(self):
        field = parse("x1 + x2", XY)
        with pytest.raises(ExprDomainError, match="unassigned"):
            evaluate(field, {"x1": 1.0})

    def test_integer_power_allows_negative_base(self):
        assert ev("x1^3", x1=-2.0) == -8.0

    def test_error_names_offending_node(self):
        field = parse("1 + log(x1 - 2)", ["x1"])
        with pytest.raises(ExprDomainError, match=r"log\(x1-2(\.0)?\)"):
            evaluate(field, {"x1": 1.0})


class TestFreeVariables:
    def test_two_variables(self):
        assert free_variables(parse("x1*x2 + 1", XY)) == {"x1", "x2"}

    def test_constant(self):
        assert free_variables(parse("3.0", XY)) == set()

    def test_single(self):
        assert free_variables(parse("sin(x2)", XY)) == {"x2"}


# -- property tests ---------------------------------------------------------


def _asts():
    numbers = st.floats(
        min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False
    ).map(abs)
    leaves = st.one_of(
        st.builds(Num, numbers),
        st.sampled_from([Var("x1"), Var("x2")]),
    )

    def extend(children):
        return st.one_of(
            st.builds(Neg, children),
            st.builds(
                lambda op, l, r: BinOp(op, l, r),
                st.sampled_from("+-*/^"),
                children,
                children,
            ),
            st.builds(
                lambda f, a: Call(f, (a,)),
                st.sampled_from(sorted(expr.FUNCTIONS)),
                children,
            ),
        )

    return st.recursive(leaves, extend, max_leaves=24)


@settings(max_examples=1000, derandomize=True)
@given(_asts())
def test_print_parse_round_trip(ast):
    assert parse(to_source(ast), XY).ast == ast


def _same_result(fn):
    """Run fn, capturing either the value or the error type."""
    try:
        return ("ok", fn())
    except (ExprDomainError, OverflowError) as exc:
        return ("err", type(exc))


@settings(max_examples=300, derandomize=True)
@given(
    _asts(),
    st.floats(min_value=-2.0, max_value=2.0),
    st.floats(min_value=-2.0, max_value=2.0),
)
def test_zero_seed_jets_match_plain_evaluation_bitwise(ast, a, b):
    field = ScalarField(ast, to_source(ast))
    plain_env = {"x1": a, "x2": b}
    jet_env = {"x1": jets.Jet(a, (0.0, 0.0)), "x2": jets.Jet(b, (0.0, 0.0))}
    plain = _same_result(lambda: evaluate(field, plain_env))
    jet = _same_result(lambda: jets.standard_part(evaluate(field, jet_env)))
    assert plain[0] == jet[0]
    if plain[0] == "ok":
        pv, jv = plain[1], jet[1]
        assert (pv == jv) or (math.isnan(pv) and math.isnan(jv))


@settings(max_examples=300, derandomize=True)
@given(
    _asts(),
    st.floats(min_value=-2.0, max_value=2.0),
    st.floats(min_value=-2.0, max_value=2.0),
)
def test_compiled_matches_interpreted_bitwise(ast, a, b):
    field = ScalarField(ast, to_source(ast))
    compiled = compile_field(field, XY)
    interp = _same_result(lambda: evaluate(field, {"x1": a, "x2": b}))
    fast = _same_result(lambda: compiled((a, b)))
    assert interp[0] == fast[0]
    if interp[0] == "ok":
        pv, jv = interp[1], fast[1]
        assert (pv == jv) or (math.isnan(pv) and math.isnan(jv))
