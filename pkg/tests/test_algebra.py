from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from mkptau.algebra import (
    LaurentPolynomial,
    Q,
    TimeSpace,
    miwa_shift,
    miwa_shift_by_derivatives,
    rational,
    residue,
    schur,
    schur_derivative_action,
    xi_exponential,
    xi_times,
)
from mkptau.algebra.laurent import residue_of_product
from mkptau.errors import ConfigurationError, NormalizationError

S = TimeSpace(2, 3, 1, 4)
EXACT = TimeSpace(2, 3)
SYM = {(a, k): sp.Symbol(f"t{a}_{k}") for a in (1, 2) for k in (1, 2, 3)}
Z = sp.Symbol("z")


def polys(space, max_terms=6, max_deg=3):
    coeff = st.fractions(max_denominator=4, min_value=-3, max_value=3).map(lambda f: Q(f.numerator, f.denominator))
    var = st.sampled_from(list(space.variables()))

    def build(items):
        out = space.zero
        for c, vs in items:
            m = space.const(c)
            for copy, a, k in vs:
                m = m * space.var(a, k, copy)
            out = out + m
        return out

    return st.lists(st.tuples(coeff, st.lists(var, max_size=max_deg)), max_size=max_terms).map(build)


def to_sympy(P):
    expr = sp.Integer(0)
    for exps, c in P.monomials():
        term = sp.Rational(int(c.numerator), int(c.denominator))
        for i, e in enumerate(exps):
            if e:
                _, a, k = P.space.label(i)
                term *= SYM[(a, k)] ** e
        expr += term
    return sp.expand(expr)


def laurent_to_sympy(L):
    return sp.expand(sum((to_sympy(c) * Z ** e[0] for e, c in L.coeffs.items()), sp.Integer(0)))


# -- ring structure ------------------------------------------------------------

@given(polys(S), polys(S), polys(S))
def test_ring_axioms(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == S.zero and (a + S.zero) == a and a * S.one == a


@given(polys(EXACT), polys(EXACT))
def test_truncation_is_a_ring_homomorphism(a, b):
    cap = 3
    assert (a * b).truncate(cap) == a.truncate(cap) * b.truncate(cap)
    assert (a + b).truncate(cap) == a.truncate(cap) + b.truncate(cap)


@given(polys(EXACT), polys(EXACT))
def test_exact_product_matches_sympy(a, b):
    assert to_sympy(a * b) == sp.expand(to_sympy(a) * to_sympy(b))


@given(polys(S), st.integers(1, 4).map(lambda n: Q(n, 3)))
def test_inverse(a, c0):
    a = a - a.constant_term + c0
    assert a * a.inverse() == S.one
    assert (S.one / a) * a == S.one


def test_inverse_of_non_normalizable():
    with pytest.raises(NormalizationError):
        S.var(1, 1).inverse()


@given(polys(EXACT), polys(EXACT), st.sampled_from([(1, 1), (2, 2), (1, 3)]))
def test_leibniz(a, b, v):
    assert (a * b).derivative(*v) == a.derivative(*v) * b + a * b.derivative(*v)


@given(polys(EXACT))
def test_restrict_to_primed_copy_and_back(a):
    D2 = EXACT.doubled()
    primed = a.restrict(D2, {0: 1})
    assert all(D2.copy_degree(k, 0) == 0 for k in primed.terms)
    assert primed.restrict(EXACT, {1: 0}) == a


def test_restrict_drops_missing_times():
    P = EXACT.var(1, 3) + EXACT.var(2, 1) * 2
    assert P.restrict(TimeSpace(2, 2, 1, 3)).to_text() == "2*t[2,1]"


def test_degree_cap_per_copy():
    D2 = TimeSpace(1, 1, 2, 1)
    x, y = D2.var(1, 1, 0), D2.var(1, 1, 1)
    assert (x * y).to_text() == "t[1,1]*tp[1,1]"
    assert (x * x).is_zero()


def test_canonical_text():
    P = S.one + S.var(1, 1) * 2
    assert P.to_text() == "1 + 2*t[1,1]"
    assert (S.var(2, 2) * Q(-3, 2) + S.var(1, 1) ** 2).to_text() == "-3/2*t[2,2] + t[1,1]^2"
    assert rational("-3/2") == Q(-3, 2)


def test_space_validation():
    with pytest.raises(ConfigurationError):
        TimeSpace(0, 3)
    with pytest.raises(ConfigurationError):
        S.var(3, 1)


# -- Schur polynomials ------------------------------------------------------------

def sympy_schur(K, tvals):
    series = sp.series(sp.exp(sum(t * Z ** (k + 1) for k, t in enumerate(tvals))), Z, 0, K + 1).removeO()
    return [sp.expand(series).coeff(Z, n) for n in range(K + 1)]


@given(st.lists(st.fractions(max_denominator=5, min_value=-2, max_value=2), min_size=1, max_size=4))
def test_schur_numeric_matches_series(ts):
    got = schur(5, [Q(f.numerator, f.denominator) for f in ts])
    want = sympy_schur(5, [sp.Rational(f.numerator, f.denominator) for f in ts])
    assert [Fraction(int(g.numerator), int(g.denominator)) for g in got] == [Fraction(str(w)) for w in want]


def test_schur_low_orders():
    t = [EXACT.var(1, k) for k in (1, 2, 3)]
    h = schur(3, t)
    assert h[1].to_text() == "t[1,1]"
    assert h[2].to_text() == "t[1,2] + 1/2*t[1,1]^2"
    assert h[3].to_text() == "t[1,3] + t[1,1]*t[1,2] + 1/6*t[1,1]^3"


@given(polys(EXACT), st.sampled_from([1, -1]), st.sampled_from([1, 2]))
def test_miwa_shift_matches_sympy_substitution(P, sign, gamma):
    L = miwa_shift(P, gamma, sign)
    expr = to_sympy(P).subs({SYM[(gamma, k)]: SYM[(gamma, k)] + sign * Z ** (-k) / k for k in (1, 2, 3)},
                            simultaneous=True)
    assert sp.expand(laurent_to_sympy(L) - expr) == 0


@given(polys(EXACT), st.sampled_from([1, -1]), st.sampled_from([1, 2]), st.integers(1, 5))
def test_miwa_shift_two_routes(P, sign, gamma, z_max):
    assert miwa_shift(P, gamma, sign) == miwa_shift_by_derivatives(P, gamma, sign)
    assert miwa_shift(P, gamma, sign, z_max=z_max) == miwa_shift_by_derivatives(P, gamma, sign, z_max=z_max)


@given(polys(EXACT), st.integers(0, 5))
def test_schur_action_is_miwa_coefficient(P, k):
    assert schur_derivative_action(k, 1, P, -1) == miwa_shift(P, 1, -1).coefficient((-k,))


def test_xi_exponential_matches_series():
    sp3 = TimeSpace(1, 3, 1, 3)
    E = xi_exponential(xi_times(sp3, 1))
    t = [SYM[(1, k)] for k in (1, 2, 3)]
    series = sp.expand(sp.series(sp.exp(sum(t[k - 1] * Z ** k for k in (1, 2, 3))), Z, 0, 10).removeO())
    # keep total degree <= 3 in t
    poly = sp.Poly(series, *t)
    kept = sum((c * sp.prod([x ** e for x, e in zip(t, m)]) for m, c in poly.terms() if sum(m) <= 3), sp.Integer(0))
    assert sp.expand(laurent_to_sympy(E) - kept) == 0


# -- Laurent polynomials ------------------------------------------------------------

def test_residue_and_symbols():
    L = LaurentPolynomial("z", S, {(-1,): S.var(1, 1), (2,): S.one})
    assert residue(L) == S.var(1, 1)
    M = LaurentPolynomial("mu", S, {(0,): S.one})
    with pytest.raises(ConfigurationError):
        L + M
    with pytest.raises(ConfigurationError):
        LaurentPolynomial("w", S)


def test_two_symbol_residue():
    L = LaurentPolynomial(("mu", "nu"), S, {(-1, 2): S.one, (0, -1): S.var(1, 1)})
    r = residue(L, "mu")
    assert r.symbols == ("nu",) and r.coefficient((2,)) == S.one


def test_floor_drops_low_powers():
    A = LaurentPolynomial("z", S, {(-1,): S.one, (-3,): S.one}, floor=-2)
    assert A.exponents() == [(-1,)]
    B = LaurentPolynomial("z", S, {(-1,): S.one})
    assert (A * B).coeffs == {(-2,): S.one}


@given(polys(S), polys(S), st.integers(-3, 3))
def test_residue_of_product(a, b, shift):
    A = LaurentPolynomial("z", S, {(-2,): a, (1,): b, (0,): S.one})
    B = LaurentPolynomial("z", S, {(-1,): b, (3,): a})
    whole = residue((A * B).shift(shift))
    assert residue_of_product(A, B, shift) == whole
