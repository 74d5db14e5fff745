"""Expression language: parsing, evaluation, dual-number derivatives."""

import math

import numpy as np
import pytest

from cartanlib import ParseError, UnknownSymbol, parse_expression


def test_arithmetic_and_precedence():
    cases = [
        ("2+3*4", 14.0),
        ("(2+3)*4", 20.0),
        ("2^3^2", 512.0),          # right-associative power
        ("-2^2", -4.0),            # unary minus binds looser than power
        ("2^-1", 0.5),
        ("6/3/2", 1.0),
        ("1 - 2 - 3", -4.0),
        ("pi", math.pi),
        ("1.5e2 + 1e-2", 150.01),
    ]
    for src, want in cases:
        ast = parse_expression(src, [])
        assert ast.evaluate([]) == pytest.approx(want, rel=1e-15), src


def test_functions_and_variables():
    ast = parse_expression("sin(u1)^2 + cos(u1)^2", ["u1"])
    for v in (-2.0, 0.0, 1.3):
        assert ast.evaluate([v]) == pytest.approx(1.0)
    ast = parse_expression("2/(u1^2 + u2^2)", ["u1", "u2"])
    assert ast.evaluate([1.0, 1.0]) == pytest.approx(1.0)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    ast = parse_expression(
        "sinh(u1)*cos(u2) + exp(-u1*u2) + sqrt(u1 + 3)", ["u1", "u2"]
    )
    for _ in range(10):
        x = rng.uniform(0.2, 1.5, size=2)
        grad = ast.gradient(x)
        h = 1e-6
        for k in range(2):
            xp, xm = x.copy(), x.copy()
            xp[k] += h
            xm[k] -= h
            fd = (ast.evaluate(xp) - ast.evaluate(xm)) / (2 * h)
            assert grad[k] == pytest.approx(fd, abs=1e-8)


def test_value_and_gradient_consistency():
    ast = parse_expression("log(u1) * u1^3", ["u1"])
    v, g = ast.value_and_gradient([2.0])
    assert v == pytest.approx(math.log(2) * 8)
    assert g[0] == pytest.approx(3 * 4 * math.log(2) + 4)


def test_parse_error_carries_offset():
    with pytest.raises(ParseError) as exc:
        parse_expression("1 + * 2", [])
    assert exc.value.offset == 4


def test_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        parse_expression("u1 + u3", ["u1", "u2"])


def test_function_requires_argument():
    with pytest.raises(ParseError):
        parse_expression("sin + 1", [])


def test_unbalanced_parens():
    with pytest.raises(ParseError):
        parse_expression("(1 + 2", [])


def test_trailing_garbage():
    with pytest.raises(ParseError):
        parse_expression("1 + 2 )", [])
