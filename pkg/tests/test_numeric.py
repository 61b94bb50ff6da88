import cmath
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eppsim import qubits as qb
from eppsim._numeric import Surd, check_probability, coerce, exact_sqrt, parse_number, sqrt_scalar
from eppsim.bell_core import ORDER

small = st.fractions(min_value=-5, max_value=5, max_denominator=20)
surds = st.builds(Surd, small, small, small, small)


def value(s):
    return complex(s)


@settings(max_examples=100, deadline=None)
@given(surds, surds)
def test_surd_arithmetic_matches_complex(a, b):
    assert cmath.isclose(value(a + b), value(a) + value(b), abs_tol=1e-9)
    assert cmath.isclose(value(a * b), value(a) * value(b), abs_tol=1e-9)
    if not b.is_zero():
        assert cmath.isclose(value(a / b), value(a) / value(b), rel_tol=1e-9, abs_tol=1e-9)


def test_surd_constants():
    r = Surd.inv_sqrt2()
    assert r * r == Surd(Fr(1, 2))
    assert Surd.i() * Surd.i() == Surd(-1)
    assert (Surd.sqrt2() * r).to_rational() == 1


def test_sqrt_scalar():
    assert sqrt_scalar(Fr(1, 100)) == Surd(Fr(1, 10))
    assert isinstance(sqrt_scalar(Fr(1, 10)), float)
    assert exact_sqrt(Fr(9, 4)) == Fr(3, 2)
    assert exact_sqrt(Fr(2)) is None


def test_parse_and_coerce():
    assert parse_number("3/4") == Fr(3, 4)
    assert float(parse_number("0.75")) == 0.75
    assert coerce(1) == 1
    with pytest.raises(ValueError):
        check_probability(Fr(-1, 5))


def test_bell_vectors_orthonormal():
    m = np.array([qb.bell_vector(c).reshape(-1) for c in ORDER])
    assert np.allclose(m.conj() @ m.T, np.eye(4))
    for c in ORDER:
        w = qb.bell_weights(qb.bell_vector(c), 0, 1)
        assert w[c.index] == pytest.approx(1)
