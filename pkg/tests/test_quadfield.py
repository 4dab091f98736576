import math
from fractions import Fraction

import pytest

from modelset.errors import ConfigError
from modelset.quadfield import (
    QuadReal,
    format_quadreal,
    golden,
    parse_quadreal,
    qr,
    sqrt_of,
)


def test_field_identities():
    phi = golden()
    root5 = sqrt_of(5)
    assert (phi * phi - phi - qr(1)).sign() == 0
    assert (root5 * root5 - qr(5)).sign() == 0
    assert (phi + phi.conjugate() - qr(1)).sign() == 0
    assert (phi * phi.conjugate() + qr(1)).sign() == 0


def test_arithmetic_is_exact():
    phi = golden()
    x = qr(Fraction(3, 7)) + phi * qr(Fraction(-2, 9))
    y = qr(Fraction(11, 5)) - phi * qr(Fraction(4, 3))
    assert ((x + y) - (y + x)).sign() == 0
    assert ((x * y) - (y * x)).sign() == 0
    z = x / y
    assert (z * y - x).sign() == 0
    assert abs(x.to_float() - (3 / 7 - 2 / 9 * (1 + 5**0.5) / 2)) < 1e-14


def test_sign_beats_floats():
    # convergents a/b of sqrt(5) from (2 + sqrt(5))^n; at depth 20 the
    # difference a - b*sqrt(5) is ~1e-25, far below float resolution,
    # and its sign alternates with n
    a, b = 2, 1
    for n in range(2, 21):
        a, b = 2 * a + 5 * b, a + 2 * b
        x = qr(a) - sqrt_of(5) * qr(b)
        assert x.sign() == (1 if n % 2 == 0 else -1), n
    assert abs(x.to_float()) < 1e-15


def test_floor_ceil():
    phi = golden()
    assert phi.floor() == 1 and phi.ceil() == 2
    assert (-phi).floor() == -2 and (-phi).ceil() == -1
    assert qr(3).floor() == 3 and qr(3).ceil() == 3
    assert qr(Fraction(-7, 2)).floor() == -4
    assert qr(Fraction(-7, 2)).ceil() == -3
    big = qr(1000) - sqrt_of(5) * qr(Fraction(1, 10**6))
    assert big.floor() == 999 and big.ceil() == 1000


def test_parse_serialize_round_trip():
    cases = [
        "0",
        "-3",
        "1/2",
        "-7/3",
        "1/2 + 1/2*sqrt(5)",
        "-1/2*sqrt(5)",
        "2 - 1*sqrt(5)",
        "-1 - 3/4*sqrt(5)",
        "1*sqrt(5)",
    ]
    for text in cases:
        x = parse_quadreal(text, 5)
        again = parse_quadreal(x.serialize(), 5)
        assert (x - again).sign() == 0, text
    assert parse_quadreal("1/2 + 1/2*sqrt(5)", 5).serialize() == "1/2 + 1/2*sqrt(5)"


def test_parse_rejects_garbage():
    for bad in ["", "sqrt(7)", "1 +", "one", "2 ** 3", "1/0"]:
        with pytest.raises(ConfigError):
            parse_quadreal(bad, 5)
    with pytest.raises(ConfigError):
        parse_quadreal("1*sqrt(3)", 5)


def test_mixed_field_ops_rejected():
    x = QuadReal(Fraction(1), Fraction(1), 5)
    y = QuadReal(Fraction(1), Fraction(1), 2)
    with pytest.raises(ConfigError):
        _ = x + y


def test_is_rational_and_format():
    assert qr(Fraction(5, 3)).is_rational()
    assert not golden().is_rational()
    assert format_quadreal(golden()) == "1/2 + 1/2*sqrt(5)"


def test_ordering_helpers():
    xs = [golden(), qr(1), qr(2), sqrt_of(5) - qr(1)]
    fl = sorted(x.to_float() for x in xs)
    assert fl == sorted(fl)
    assert math.isclose(fl[-1], 2.0)
