import os
import random
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mkptau.algebra import _pykernels, kernels
from mkptau.algebra.timepoly import Q, TimeSpace

ckernels = pytest.importorskip("mkptau.algebra._ckernels")


def terms_strategy(space):
    mono = st.lists(st.integers(0, space.nvars - 1), max_size=space.degree_cap or 4)
    coeff = st.fractions(max_denominator=6).filter(bool).map(lambda f: Q(f.numerator, f.denominator))

    def encode(pairs):
        out = {}
        for idx, c in pairs:
            exps = [0] * space.nvars
            for i in idx:
                exps[i] += 1
            out[space.encode(exps)] = c
        return out

    return st.lists(st.tuples(mono, coeff), max_size=12).map(encode)


SPACE = TimeSpace(2, 3, 1, 3)
SPACE2 = TimeSpace(2, 2, 2, 2)


@given(terms_strategy(SPACE), terms_strategy(SPACE))
def test_mul_backends_agree(a, b):
    args = (SPACE.deg_shift, 1, SPACE.degree_cap)
    assert ckernels.mul_terms(a, b, *args) == _pykernels.mul_terms(a, b, *args)


@given(terms_strategy(SPACE2), terms_strategy(SPACE2))
def test_mul_backends_agree_doubled(a, b):
    args = (SPACE2.deg_shift, 2, SPACE2.degree_cap)
    assert ckernels.mul_terms(a, b, *args) == _pykernels.mul_terms(a, b, *args)


@given(terms_strategy(SPACE), terms_strategy(SPACE), st.sampled_from([1, -1]))
def test_add_backends_agree(a, b, sign):
    assert ckernels.add_terms(a, b, sign) == _pykernels.add_terms(a, b, sign)


def test_untruncated_product_and_overflow():
    sp = TimeSpace(1, 1, 1, None)
    x = {sp.encode([40]): Q(1)}
    for mod in (ckernels, _pykernels):
        assert mod.mul_terms({sp.encode([1]): Q(2)}, {sp.encode([1]): Q(3)}, sp.deg_shift, 1, None) == {
            sp.encode([2]): Q(6)
        }
        with pytest.raises(OverflowError):
            mod.mul_terms(x, x, sp.deg_shift, 1, None)


def test_products_do_not_alias_inputs():
    a = {0: Q(2)}
    b = {0: Q(3)}
    out = ckernels.mul_terms(a, b, SPACE.deg_shift, 1, 3)
    out2 = ckernels.mul_terms(out, b, SPACE.deg_shift, 1, 3)
    assert out == {0: Q(6)} and out2 == {0: Q(18)} and a == {0: Q(2)}


def test_non_mpq_coefficients_accepted():
    out = ckernels.mul_terms({0: 2}, {0: Q(1, 3)}, SPACE.deg_shift, 1, 3)
    assert out == {0: Q(2, 3)}


def test_backend_selection():
    forced = os.environ.get("MKPTAU_PURE_PYTHON") == "1"
    assert kernels.BACKEND == ("python" if forced else "cython")
    env = dict(os.environ, MKPTAU_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from mkptau.algebra import BACKEND; print(BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_random_cancellation():
    rng = random.Random(3)
    a = {SPACE.encode([rng.randint(0, 1) for _ in range(SPACE.nvars)]): Q(rng.randint(1, 5)) for _ in range(8)}
    neg = {k: -v for k, v in a.items()}
    for mod in (ckernels, _pykernels):
        assert mod.add_terms(a, neg) == {}
        assert mod.mul_terms(a, {}, SPACE.deg_shift, 1, 3) == {}
