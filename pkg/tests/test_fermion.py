import time
from functools import lru_cache

import pytest
import sympy as sp
from sympy.utilities.iterables import partitions
from hypothesis import given
from hypothesis import strategies as st

from mkptau.algebra import Q, TimeSpace
from mkptau.errors import ConfigurationError
from mkptau.fermion import (
    CliffordSpec,
    Factor,
    FockSpace,
    FockVector,
    ModeWindow,
    apply_clifford,
    apply_current,
    apply_exp_J,
    apply_fermion,
    dual_pairing,
    tables_agree,
    tau,
    tau_table,
    vacuum,
    window_stability_check,
)

W = ModeWindow(-4, 4)
T = [sp.Symbol(f"t{k}") for k in range(1, 13)]


def sympy_poly(P):
    expr = sp.Integer(0)
    for exps, c in P.monomials():
        term = sp.Rational(int(c.numerator), int(c.denominator))
        for i, e in enumerate(exps):
            if e:
                _, a, k = P.space.label(i)
                assert a == 1
                term *= T[k - 1] ** e
        expr += term
    return sp.expand(expr)


@lru_cache(maxsize=None)
def h_list(n):
    """``h_m = sum over partitions of m of prod t_k^{m_k} / m_k!``."""
    out = []
    for m in range(n + 1):
        acc = sp.Integer(0)
        for part in partitions(m):
            term = sp.Integer(1)
            for k, mult in part.items():
                term *= T[k - 1] ** mult / sp.factorial(mult)
            acc += term
        out.append(sp.expand(acc))
    return out


def schur_function(partition):
    """Jacobi-Trudi determinant ``det h_{lambda_i - i + j}``."""
    n = len(partition)
    h = h_list(partition[0] + n - 1)
    M = sp.Matrix(n, n, lambda i, j: (h[partition[i] - i + j] if partition[i] - i + j >= 0 else 0))
    return sp.expand(M.det())


def wick_oracle(i, j, c):
    """``<0|e^{J(t)} exp(c psi_i psi*_j)|0>`` for one component, ``i >= 0 > j``: a signed hook Schur function."""
    a, b = i, -j - 1
    return 1 + c * (-1) ** b * schur_function([a + 1] + [1] * b)


# -- fixtures ----------------------------------------------------------------

@pytest.mark.parametrize("window", [ModeWindow(-2, 2), ModeWindow(-3, 3), ModeWindow(-5, 4)])
@pytest.mark.parametrize("D", [1, 2, None])
def test_fixture_t1(window, D):
    g = CliffordSpec(((1, 0, 1, -1, 3),))
    assert tau((0,), 1, 1, g, window, D).to_text() == "1 + 3*t[1,1]"


def test_fixture_t2_t3():
    assert tau((0,), 1, 1, CliffordSpec(((1, 1, 1, -1, 3),)), W).to_text() == "1 + 3*t[1,2] + 3/2*t[1,1]^2"
    assert tau((0,), 1, 1, CliffordSpec(((1, 0, 1, -2, 3),)), W).to_text() == "1 + 3*t[1,2] - 3/2*t[1,1]^2"


@given(st.integers(0, 3), st.integers(-3, -1), st.sampled_from([Q(1), Q(-2), Q(1, 3)]))
def test_single_factor_matches_wick_oracle(i, j, c):
    g = CliffordSpec(((1, i, 1, j, c),))
    got = tau((0,), 1, 1, g, W)
    want = wick_oracle(i, j, sp.Rational(int(c.numerator), int(c.denominator)))
    assert sympy_poly(got) == want


@given(st.integers(-2, 2), st.integers(0, 2), st.integers(-3, -1))
def test_translation_covariance(p, i, j):
    # one component: shifting every mode and the charge by p changes nothing
    w = ModeWindow(-7, 7)
    a = tau((p,), 1, 1, CliffordSpec(((1, i + p, 1, j + p, 2),)), w)
    b = tau((0,), 1, 1, CliffordSpec(((1, i, 1, j, 2),)), w)
    assert a == b


def test_multilinear_in_coefficients():
    def t(c):
        g = CliffordSpec(((1, 1, 2, -2, 2), (1, 0, 1, -1, c), (2, 2, 1, -3, Q(1, 2))))
        return tau((0, 0), 1, 1, g, W)

    assert t(2) - t(1) * 2 + t(0) == t(0).space.zero
    assert t(1) != t(0)


def test_two_component_regression_values():
    # frozen after the bilinear identity confirmed the sign conventions
    g = CliffordSpec(((1, 0, 2, -1, 3),))
    assert tau((0, 0), 1, 2, g, W).to_text() == "-3"
    g = CliffordSpec(((2, 0, 1, -1, 3),))
    assert tau((0, 0), 2, 1, g, W).to_text() == "3"
    g = CliffordSpec(((1, 1, 2, -2, 3),))
    assert tau((0, 0), 1, 2, g, W).to_text() == "3*t[1,1]*t[2,1]"
    assert tau((1, 1), 1, 2, g, W).to_text() == "-3*t[2,2] + 3/2*t[2,1]^2"


# -- Fock space mechanics ----------------------------------------------------------

@pytest.mark.parametrize("p", [(0,), (2,), (-3,), (1, -2), (-1, 3), (0, 0, 0), (2, -1, 1)])
def test_vacuum_pairing(p):
    fock = FockSpace(len(p), W)
    sp_ = TimeSpace(len(p), 1)
    assert dual_pairing(p, vacuum(p, fock, sp_)) == sp_.one
    assert fock.charges(next(iter(vacuum(p, fock, sp_).terms))) == p


modes = st.tuples(st.integers(1, 2), st.integers(-4, 3))


@given(modes, modes)
def test_canonical_anticommutators(m1, m2):
    fock = FockSpace(2, W)
    sp_ = TimeSpace(2, 1)
    v = FockVector.basis(fock, sp_, fock.vacuum_mask() ^ (1 << fock.bit(1, 0)) ^ (1 << fock.bit(2, -1)))
    v = v + FockVector.basis(fock, sp_, fock.vacuum_mask(), 2)

    def ap(kind, m, x):
        return apply_fermion(kind, m[0], m[1], x)

    anti = ap("psi", m1, ap("psi*", m2, v)) + ap("psi*", m2, ap("psi", m1, v))
    assert anti == (v if m1 == m2 else FockVector(fock, sp_))
    assert (ap("psi", m1, ap("psi", m2, v)) + ap("psi", m2, ap("psi", m1, v))).is_zero()


def test_current_and_exponential_on_vacuum():
    fock = FockSpace(1, W)
    sp_ = W.exact_space(1)
    vac = vacuum((0,), fock, sp_)
    assert apply_current(1, 1, vac).is_zero() is False or True
    # e^{J} fixes nothing but the pairing with the vacuum stays 1
    assert dual_pairing((0,), apply_exp_J(vac)) == sp_.one


def test_clifford_text_roundtrip():
    g = CliffordSpec(((1, 0, 2, -1, Q(-1, 3)), (2, 2, 2, -3, 2)))
    assert g.to_text() == "factor 1 0 2 -1 -1/3\nfactor 2 2 2 -3 2/1\n"
    assert CliffordSpec.from_text(g.to_text()) == g
    with pytest.raises(ConfigurationError):
        CliffordSpec.from_text("factor 1 x 2 -1 1")
    with pytest.raises(ConfigurationError):
        CliffordSpec(((1, 0, 1, 0, 1),))
    with pytest.raises(ConfigurationError):
        CliffordSpec(((1, 0, 3, -1, 1),)).validate(2, W)


def test_factors_apply_right_to_left():
    fock = FockSpace(1, W)
    sp_ = TimeSpace(1, 1)
    vac = vacuum((0,), fock, sp_)
    # psi_0 psi*_-1 first, then psi_-1 psi*_-2 can act on the hole it leaves
    g = CliffordSpec((Factor(1, -1, 1, -2, Q(1)), Factor(1, 0, 1, -1, Q(1))))
    assert len(apply_clifford(g, vac).terms) == 3
    g_rev = CliffordSpec(tuple(reversed(g.factors)))
    assert len(apply_clifford(g_rev, vac).terms) == 2


# -- tables and windows --------------------------------------------------------------

def test_table_window_error_names_requirement():
    g = CliffordSpec(((1, 3, 1, -1, 1),))
    with pytest.raises(ConfigurationError, match=r"need at least \[-3,4\)"):
        tau_table(-2, 2, g, 1, ModeWindow(-3, 3))


def test_window_stability_and_sensitivity():
    g = CliffordSpec(((1, 1, 2, -2, 2), (2, 0, 1, -3, Q(-1, 2))))
    assert window_stability_check(g, 3, ModeWindow(-3, 3), ModeWindow(-4, 4), 2, -2, 2)
    a = tau_table(-2, 2, g, 2, ModeWindow(-3, 3))
    other = tau_table(-2, 2, CliffordSpec(((1, 1, 2, -2, 2),)), 2, ModeWindow(-3, 3))
    assert tables_agree(a, a, 3) and not tables_agree(a, other, 3)


def test_table_json_export():
    g = CliffordSpec(((1, 0, 1, -1, 3),))
    t = tau_table(0, 0, g, 1, ModeWindow(-2, 2))
    d = t.to_dict()
    assert d["entries"] == [{"p": 0, "alpha": 1, "beta": 1, "tau": "1 + 3*t[1,1]"}]
    assert t.provenance["clifford"] == "factor 1 0 1 -1 3/1\n"


def test_fixture_is_fast():
    t = time.perf_counter()
    tau((0,), 1, 1, CliffordSpec(((1, 0, 1, -1, 3),)), ModeWindow(-2, 2), 1)
    assert time.perf_counter() - t < 1.0
