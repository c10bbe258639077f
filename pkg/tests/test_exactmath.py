import math
import random
from fractions import Fraction
from itertools import product

import pytest
from sympy import Matrix, Poly, Symbol, resultant
from sympy.matrices.normalforms import invariant_factors

from src.backend.exactmath import (
    DomainError,
    IntMatrix,
    IntPoly,
    enumerate_short_vectors,
    factor_mod_p,
    hermite_normal_form,
    integer_roots,
    lll_reduce,
    poly_discriminant,
    quadratic_value,
    smith_normal_form,
)

t = Symbol('t')


# ---------------------------------------------------------------------------
# poly_discriminant
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("coeffs, expected", [
    ((-1, -1, 0, 1), -23),
    ((1, 2, 1, 1), -23),
    ((0, 0, 0, 1), 0),
])
def test_poly_discriminant_examples(coeffs, expected):
    assert poly_discriminant(IntPoly(coeffs)) == expected


def test_poly_discriminant_rejects_constants():
    with pytest.raises(DomainError):
        poly_discriminant(IntPoly((5,)))


def test_poly_discriminant_matches_resultant_and_closed_formula():
    rng = random.Random(11)
    for _ in range(1000):
        a, b, c = (rng.randint(-100, 100) for _ in range(3))
        f = IntPoly((c, b, a, 1))
        closed = 18 * a * b * c - 4 * a ** 3 * c + a * a * b * b - 4 * b ** 3 - 27 * c * c
        F = t ** 3 + a * t ** 2 + b * t + c
        # grau 3: sinal (-1)^3 = -1
        assert poly_discriminant(f) == closed == -int(resultant(F, F.diff(t), t))


def test_poly_discriminant_non_monic():
    f = IntPoly((1, 0, 2))  # 2x^2 + 1
    assert poly_discriminant(f) == -8


# ---------------------------------------------------------------------------
# factor_mod_p
# ---------------------------------------------------------------------------

def test_factor_mod_23_has_double_root():
    factors = factor_mod_p(IntPoly((-1, -1, 0, 1)), 23)
    # raízes 10 (dupla) e 3
    assert factors == [(IntPoly((13, 1)), 2), (IntPoly((20, 1)), 1)]


def test_factor_mod_2_is_irreducible():
    assert factor_mod_p(IntPoly((-1, -1, 0, 1)), 2) == [(IntPoly((1, 1, 0, 1)), 1)]


def test_factor_square():
    assert factor_mod_p(IntPoly((0, 0, 1)), 3) == [(IntPoly((0, 1)), 2)]


def test_factor_mod_composite_rejected():
    with pytest.raises(DomainError):
        factor_mod_p(IntPoly((-1, -1, 0, 1)), 15)


def _mul_mod(u, v, p):
    out = [0] * (len(u) + len(v) - 1)
    for i, x in enumerate(u):
        for j, y in enumerate(v):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def _has_root_mod(f: IntPoly, p: int) -> bool:
    return any(f(r) % p == 0 for r in range(p))


def test_factor_mod_p_product_and_irreducibility():
    rng = random.Random(5)
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
    for _ in range(300):
        p = rng.choice(primes)
        lead = rng.choice([1, 1, 2, 3])
        if lead % p == 0:
            lead = 1
        f = IntPoly((rng.randint(-20, 20), rng.randint(-20, 20), rng.randint(-20, 20), lead))
        factors = factor_mod_p(f, p)

        prod = [1]
        for g, e in factors:
            assert g.leading == 1
            assert all(0 <= c < p for c in g.coeffs)
            # grau <= 3: irredutível <=> sem raízes
            if g.degree > 1:
                assert not _has_root_mod(g, p)
            for _ in range(e):
                prod = _mul_mod(prod, list(g.coeffs), p)

        inv = pow(lead, -1, p)
        monic = [(c * inv) % p for c in f.coeffs]
        assert prod == monic


# ---------------------------------------------------------------------------
# integer_roots
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("coeffs, roots", [
    ((0, -1, 0, 1), [-1, 0, 1]),
    ((-1, -1, 0, 1), []),
    ((6, -5, 1), [2, 3]),
    ((0, 0, 2), [0]),
])
def test_integer_roots(coeffs, roots):
    assert integer_roots(IntPoly(coeffs)) == roots


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def _check_snf(M: IntMatrix):
    D, U, V = smith_normal_form(M)
    assert U @ M @ V == D
    assert abs(U.det()) == 1
    assert abs(V.det()) == 1
    assert D.is_diagonal()
    diag = [d for d in D.diagonal() if d]
    assert all(d > 0 for d in diag)
    assert all(diag[i + 1] % diag[i] == 0 for i in range(len(diag) - 1))
    # zeros só no fim
    zeros_at = [i for i, d in enumerate(D.diagonal()) if d == 0]
    assert zeros_at == list(range(len(diag), min(M.rows, M.cols)))
    return D, U, V


def test_snf_coprime_diagonal():
    D, _, _ = _check_snf(IntMatrix.from_rows([[2, 0], [0, 3]]))
    assert D.diagonal() == [1, 6]


def test_snf_zero_matrix():
    D, U, V = _check_snf(IntMatrix.zeros(2, 3))
    assert D == IntMatrix.zeros(2, 3)
    assert U == IntMatrix.identity(2)
    assert V == IntMatrix.identity(3)


def test_snf_small_example():
    D, _, _ = _check_snf(IntMatrix.from_rows([[2, 4], [6, 8]]))
    assert D.diagonal() == [2, 4]


def test_snf_random_matrices_against_sympy():
    rng = random.Random(2024)
    for _ in range(500):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        M = IntMatrix.from_rows(
            [[rng.randint(-9, 9) if rng.random() < 0.7 else 0 for _ in range(cols)]
             for _ in range(rows)]
        )
        D, _, _ = _check_snf(M)
        ours = [d for d in D.diagonal() if d]
        theirs = [abs(int(f)) for f in invariant_factors(M.to_sympy()) if f != 0]
        assert ours == theirs


# ---------------------------------------------------------------------------
# Hermite normal form
# ---------------------------------------------------------------------------

def _in_column_lattice(basis: IntMatrix, v) -> bool:
    solution = basis.to_sympy().solve(Matrix(list(v)))
    return all(x.is_integer for x in solution)


def test_hnf_identity():
    assert hermite_normal_form(IntMatrix.identity(3)) == IntMatrix.identity(3)


def test_hnf_permutation():
    assert hermite_normal_form(IntMatrix.from_rows([[0, 1], [1, 0]])) == IntMatrix.identity(2)


def test_hnf_is_canonical_and_spans_the_same_lattice():
    M = IntMatrix.from_rows([[2, 1], [0, 3]])
    W = hermite_normal_form(M)
    assert W == IntMatrix.from_rows([[2, 1], [0, 3]])
    assert abs(W.det()) == abs(M.det())
    for col in M.columns():
        assert _in_column_lattice(W, col)
    for col in W.columns():
        assert _in_column_lattice(M, col)

    rng = random.Random(3)
    for _ in range(30):
        # mesma rede, base diferente
        V = IntMatrix.identity(2)
        for _ in range(4):
            k = rng.randint(-3, 3)
            step = rng.choice([[[1, k], [0, 1]], [[1, 0], [k, 1]], [[0, 1], [1, 0]]])
            V = V @ IntMatrix.from_rows(step)
        assert hermite_normal_form(M @ V) == W


def test_hnf_shape_invariants():
    rng = random.Random(8)
    for _ in range(100):
        M = IntMatrix.from_rows([[rng.randint(-20, 20) for _ in range(5)] for _ in range(3)])
        W = hermite_normal_form(M)
        if W.cols != 3:
            continue
        for i in range(3):
            assert W[i, i] > 0
            for j in range(i):
                assert W[i, j] == 0
            for j in range(i + 1, 3):
                assert 0 <= W[i, j] < W[i, i]


def test_hnf_modular_path_agrees():
    M = IntMatrix.from_rows([[6, 4, 2], [0, 3, 9], [1, 1, 5]])
    det = M.det()
    assert hermite_normal_form(M, det_multiple=det) == hermite_normal_form(M)


def test_hnf_zero_input():
    W = hermite_normal_form(IntMatrix.zeros(3, 2))
    assert (W.rows, W.cols) == (3, 0)


# ---------------------------------------------------------------------------
# LLL
# ---------------------------------------------------------------------------

def _norm2(v):
    return sum(x * x for x in v)


def test_lll_orthogonal_basis_unchanged():
    B = IntMatrix.from_rows([[3, 0, 0], [0, 1, 0], [0, 0, 2]])
    R = lll_reduce(B)
    assert sorted(tuple(abs(x) for x in R.row(i)) for i in range(3)) == \
        sorted(tuple(abs(x) for x in B.row(i)) for i in range(3))


def test_lll_finds_short_vector():
    R = lll_reduce(IntMatrix.from_rows([[1, 0], [1000, 1]]))
    assert min(_norm2(R.row(i)) for i in range(2)) == 1


def test_lll_preserves_determinant():
    rng = random.Random(17)
    done = 0
    while done < 50:
        B = IntMatrix.from_rows([[rng.randint(-50, 50) for _ in range(3)] for _ in range(3)])
        if B.det() == 0:
            continue
        R = lll_reduce(B)
        assert abs(R.det()) == abs(B.det())
        # vetor mais curto não cresce
        assert _norm2(R.row(0)) <= max(_norm2(B.row(i)) for i in range(3))
        done += 1


def test_lll_dependent_basis_rejected():
    with pytest.raises(DomainError):
        lll_reduce(IntMatrix.from_rows([[1, 2, 3], [2, 4, 6], [0, 0, 1]]))


def test_lll_on_gram_data_returns_unimodular_transform():
    gram = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    B = [[1, 0], [1000, 1]]
    G = [[sum(B[i][k] * B[j][k] for k in range(2)) for j in range(2)] for i in range(2)]
    T = lll_reduce(G)
    assert abs(T.det()) == 1
    shortest = min(quadratic_value(G, T.row(i)) for i in range(2))
    assert shortest == 1
    assert lll_reduce(gram) in (IntMatrix.identity(2), IntMatrix.from_rows([[0, 1], [1, 0]]))


# ---------------------------------------------------------------------------
# Fincke-Pohst
# ---------------------------------------------------------------------------

def _box_scan(gram, bound):
    n = len(gram)
    inverse = Matrix(gram).inv()
    reach = [math.isqrt(math.floor(Fraction(bound) * Fraction(str(inverse[i, i])))) + 1
             for i in range(n)]
    found = set()
    for v in product(*[range(-r, r + 1) for r in reach]):
        if any(v) and quadratic_value(gram, v) <= bound:
            last = next(c for c in reversed(v) if c)
            if last > 0:
                found.add(v)
    return found


def test_short_vectors_identity():
    I2 = [[1, 0], [0, 1]]
    assert set(enumerate_short_vectors(I2, 1)) == {(1, 0), (0, 1)}
    assert set(enumerate_short_vectors(I2, 2)) == {(1, 0), (0, 1), (1, 1), (-1, 1)}


def test_short_vectors_diagonal():
    assert set(enumerate_short_vectors([[1, 0], [0, 4]], 4)) == {(1, 0), (2, 0), (0, 1)}


def test_short_vectors_each_once():
    vectors = list(enumerate_short_vectors([[2, 1, 0], [1, 2, 1], [0, 1, 2]], 6))
    assert len(vectors) == len(set(vectors))
    assert not any(tuple(-x for x in v) in vectors for v in vectors)


def test_short_vectors_match_box_scan():
    rng = random.Random(99)
    done = 0
    while done < 100:
        B = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]
        if Matrix(B).det() == 0:
            continue
        gram = [[sum(B[k][i] * B[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
        if max(abs(e) for row in gram for e in row) > 20:
            continue
        bound = rng.randint(1, 50)
        assert set(enumerate_short_vectors(gram, bound)) == _box_scan(gram, bound)
        done += 1


def test_short_vectors_rational_gram():
    gram = [[Fraction(3, 2), Fraction(1, 3)], [Fraction(1, 3), Fraction(5, 4)]]
    assert set(enumerate_short_vectors(gram, Fraction(7, 2))) == _box_scan(gram, Fraction(7, 2))


def test_short_vectors_indefinite_rejected():
    with pytest.raises(DomainError):
        list(enumerate_short_vectors([[1, 2], [2, 1]], 5))


def test_matrix_helpers():
    M = IntMatrix.from_rows([[1, 2, 3], [4, 5, 6]])
    assert M.transpose().transpose() == M
    assert M.column(1) == (2, 5)
    assert IntMatrix.from_columns(M.columns()) == M
    with pytest.raises(DomainError):
        IntMatrix(2, 2, (1, 2, 3))
    assert Poly(t ** 2 + 1, t).degree() == IntPoly((1, 0, 1)).degree
