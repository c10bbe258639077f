from fractions import Fraction
import math

import pytest
from mpmath import iv
from sympy import Symbol, resultant

from src.backend.cubic_forms import MonicCubic
from src.backend.exactmath import DomainError, IntMatrix, IntPoly, quadratic_value
from src.backend.intervals import interval_precision
from src.backend.number_field import (
    FracIdeal,
    element_mul,
    element_norm,
    ideal_inverse,
    ideal_mul,
    ideal_pow,
    make_field,
    minkowski_bound,
    prime_power,
    split_prime,
    t2_gram,
    t2_value_upper,
    trace_matrix,
    valuation,
)

T = Symbol('t')

COMPLEX = MonicCubic(0, -1, -1)        # x^3 - x - 1, disc -23
REAL = MonicCubic(1, -2, -1)           # x^3 + x^2 - 2x - 1, disc 49
REAL_FAMILY = MonicCubic(5, 6, 1)      # x^3 + 5x^2 + 6x + 1, disc 49
CLASS_TWO = MonicCubic(0, 4, -1)       # x^3 + 4x - 1, disc -283


@pytest.fixture(scope="module")
def complex_field():
    return make_field(COMPLEX)


@pytest.fixture(scope="module")
def real_field():
    return make_field(REAL)


# ---------------------------------------------------------------------------
# Construção
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("f, disc, signature", [
    (COMPLEX, -23, (1, 1)),
    (REAL, 49, (3, 0)),
    (REAL_FAMILY, 49, (3, 0)),
    (CLASS_TWO, -283, (1, 1)),
])
def test_make_field_signature(f, disc, signature):
    K = make_field(f)
    assert K.disc == disc
    assert K.signature == signature
    assert K.unit_rank == sum(signature) - 1
    assert len(K.places) == sum(signature)


@pytest.mark.parametrize("f", [MonicCubic(0, 0, -1), MonicCubic(1, -2, 8)])
def test_make_field_rejects(f):
    # x^3 - 1 é redutível; x^3 + x^2 - 2x + 8 tem índice 2
    with pytest.raises(DomainError):
        make_field(f)


@pytest.mark.parametrize("f", [COMPLEX, REAL, CLASS_TWO])
def test_root_enclosures(f):
    K = make_field(f)
    a, b, c = f.coefficients
    with interval_precision(K.precision):
        for r in K.places:
            value = r ** 3 + a * r ** 2 + b * r + c
            assert 0 in value
        for r in K.real_roots:
            assert float(r.delta) < 2.0 ** (-K.precision + 2)


def test_real_roots_ascending(real_field):
    mids = [float(r.mid) for r in real_field.real_roots]
    assert mids == sorted(mids)
    assert mids == pytest.approx([-1.8019377, -0.4450419, 1.2469796], abs=1e-6)


def test_at_precision_refines(complex_field):
    finer = complex_field.at_precision(256)
    assert finer.precision == 256
    assert finer.disc == complex_field.disc
    assert float(finer.real_roots[0].delta) < float(complex_field.real_roots[0].delta)
    assert complex_field.at_precision(complex_field.precision) is complex_field


@pytest.mark.parametrize("f", [COMPLEX, REAL, REAL_FAMILY, CLASS_TWO, MonicCubic(2, -7, 5)])
def test_trace_form_determinant_is_discriminant(f):
    assert IntMatrix.from_rows(trace_matrix(f.coefficients)).det() == f.discriminant


# ---------------------------------------------------------------------------
# Normas
# ---------------------------------------------------------------------------

def test_norm_of_alpha(complex_field, real_field):
    assert element_norm(complex_field, (0, 1, 0)) == 1
    assert element_norm(real_field, (0, 1, 0)) == 1
    assert element_norm(make_field(CLASS_TWO), (0, 1, 0)) == 1


def test_norm_matches_resultant(real_field):
    f = T ** 3 + T ** 2 - 2 * T - 1
    for theta in [(1, 1, 0), (2, -3, 1), (0, 0, 5), (7, 2, -4), (-1, 5, 3)]:
        g = theta[0] + theta[1] * T + theta[2] * T ** 2
        assert element_norm(real_field, theta) == int(resultant(f, g, T))


def test_norm_is_multiplicative(complex_field):
    u, v = (1, 2, -1), (3, 0, 2)
    assert element_norm(complex_field, element_mul(u, v, complex_field.key)) == \
        element_norm(complex_field, u) * element_norm(complex_field, v)


def test_log_embedding_of_unit_sums_to_zero(complex_field):
    logs = complex_field.log_embedding((0, 1, 0))
    with interval_precision(complex_field.precision):
        total = sum((w * l for w, l in zip(complex_field.place_weights, logs)), iv.mpf(0))
    assert 0 in total
    assert float(logs[0].mid) == pytest.approx(math.log(1.3247179572), abs=1e-9)


def test_minkowski_bounds(complex_field, real_field):
    assert minkowski_bound(complex_field) < Fraction(136, 100)
    assert minkowski_bound(complex_field) > Fraction(135, 100)
    assert minkowski_bound(real_field) == Fraction(14, 9)


# ---------------------------------------------------------------------------
# Primos e ideais
# ---------------------------------------------------------------------------

def test_split_ramified_prime(complex_field):
    primes = split_prime(complex_field, 23)
    shape = sorted((P.residue_degree, P.ramification) for P in primes)
    assert shape == [(1, 1), (1, 2)]
    double = next(P for P in primes if P.ramification == 2)
    assert double.generator_poly == IntPoly((13, 1))
    assert double.hnf.contains((-10, 1, 0))
    assert valuation(complex_field, double, (23, 0, 0), 10) == 2


def test_inert_and_mixed_primes(complex_field):
    inert = split_prime(complex_field, 2)
    assert len(inert) == 1 and inert[0].norm == 8
    assert inert[0].hnf == FracIdeal.principal(complex_field.key, (2, 0, 0))
    assert sorted(P.norm for P in split_prime(complex_field, 5)) == [5, 25]


@pytest.mark.parametrize("f, p", [(COMPLEX, 2), (MonicCubic(0, -1, 1), 2), (REAL, 2), (REAL, 3)])
def test_inert_prime_is_principal(f, p):
    # f irredutível mod p: o fator de grau 3 tem 4 coeficientes
    K = make_field(f)
    (P,) = split_prime(K, p)
    assert (P.residue_degree, P.ramification, P.norm) == (3, 1, p ** 3)
    assert P.generator_poly.degree == 3
    assert P.hnf == FracIdeal.principal(K.key, (p, 0, 0))


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 23, 29, 43])
def test_prime_decomposition_recovers_p(complex_field, p):
    primes = split_prime(complex_field, p)
    assert sum(P.residue_degree * P.ramification for P in primes) == 3
    assert any(P.ramification > 1 for P in primes) == (complex_field.disc % p == 0)
    product = FracIdeal.unit(complex_field.key)
    for P in primes:
        product = ideal_mul(product, prime_power(complex_field, P, P.ramification))
    assert product == FracIdeal.principal(complex_field.key, (p, 0, 0))


def test_split_prime_rejects_composite(complex_field):
    with pytest.raises(DomainError):
        split_prime(complex_field, 15)


def test_ideal_identity_and_inverse(real_field):
    for p in (2, 3, 7, 13):
        for P in split_prime(real_field, p):
            I = P.hnf
            assert ideal_mul(I, FracIdeal.unit(real_field.key)) == I
            assert ideal_mul(I, ideal_inverse(I)) == FracIdeal.unit(real_field.key)
            assert ideal_pow(I, -2) == ideal_inverse(ideal_pow(I, 2))


def test_ideal_norm_multiplicative_and_associative(complex_field):
    I = split_prime(complex_field, 5)[0].hnf
    J = split_prime(complex_field, 23)[0].hnf
    L = FracIdeal.principal(complex_field.key, (1, 1, 1))
    assert ideal_mul(I, J).norm == I.norm * J.norm
    assert ideal_mul(ideal_mul(I, J), L) == ideal_mul(I, ideal_mul(J, L))
    assert L.norm == abs(element_norm(complex_field, (1, 1, 1)))


def test_fractional_ideal_canonical_form(complex_field):
    I = FracIdeal.principal(complex_field.key, (3, 0, 0), den=6)
    assert I == FracIdeal.principal(complex_field.key, (1, 0, 0), den=2)
    assert I.den == 2 and not I.is_integral()
    assert I.norm == Fraction(1, 8)
    with pytest.raises(DomainError):
        FracIdeal.principal(complex_field.key, (0, 0, 0))


# ---------------------------------------------------------------------------
# Forma T2
# ---------------------------------------------------------------------------

def test_t2_totally_real_is_trace_form(real_field):
    G, inflation = t2_gram(real_field, IntMatrix.identity(3))
    assert inflation == 1
    assert G == [[Fraction(e) for e in row] for row in trace_matrix(real_field.key)]
    assert quadratic_value(G, (0, 1, 0)) == 5


def test_t2_complex_gram_bounds_true_value(complex_field):
    G, inflation = t2_gram(complex_field, IntMatrix.identity(3))
    assert inflation >= 1
    assert G[0][0] == 3
    for theta in [(0, 1, 0), (1, -1, 2), (4, 0, -3)]:
        true_upper = t2_value_upper(complex_field, theta)
        assert quadratic_value(G, theta) <= inflation * true_upper


@pytest.mark.parametrize("f", [COMPLEX, MonicCubic(0, -1, 1), CLASS_TWO])
def test_t2_complex_first_row_is_trace_row(f):
    # sigma(1) = 1: a primeira linha da Gram de T2 é Tr(alpha^j)
    K = make_field(f)
    G, inflation = t2_gram(K, IntMatrix.identity(3))
    trace_row = trace_matrix(K.key)[0]
    assert all(abs(G[0][j] - trace_row[j]) < Fraction(1, 10 ** 20) for j in range(3))
    assert all(G[i][j] == G[j][i] for i in range(3) for j in range(3))
    assert 1 <= inflation < 2
